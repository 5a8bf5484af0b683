//! Dense two-phase simplex for small linear programs.
//!
//! Problems have the form
//!
//! ```text
//! maximize    c . x
//! subject to  A_le x <= b_le
//!             A_eq x  = b_eq
//!             0 <= x_j <= u_j   (u_j optional)
//! ```
//!
//! Pivoting follows Bland's rule (lowest eligible index for both the entering
//! and the leaving variable), which rules out cycling on degenerate vertices.
//! The returned point is always a basic feasible solution, i.e. a vertex.

const PIVOT_EPS: f64 = 1e-12;
const FEAS_EPS: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram {
    pub objective: Vec<f64>,
    pub le_rows: Vec<(Vec<f64>, f64)>,
    pub eq_rows: Vec<(Vec<f64>, f64)>,
    pub upper: Vec<Option<f64>>,
}

impl LinearProgram {
    pub fn new(objective: Vec<f64>) -> Self {
        let n = objective.len();
        LinearProgram { objective, le_rows: Vec::new(), eq_rows: Vec::new(), upper: vec![None; n] }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn add_le(&mut self, row: Vec<f64>, rhs: f64) -> &mut Self {
        assert_eq!(row.len(), self.num_vars());
        self.le_rows.push((row, rhs));
        self
    }

    pub fn add_eq(&mut self, row: Vec<f64>, rhs: f64) -> &mut Self {
        assert_eq!(row.len(), self.num_vars());
        self.eq_rows.push((row, rhs));
        self
    }

    pub fn set_upper(&mut self, var: usize, bound: f64) -> &mut Self {
        self.upper[var] = Some(bound);
        self
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        dot(&self.objective, x)
    }

    /// Largest violation of any constraint at `x` (0 when feasible).
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let mut worst: f64 = 0.0;
        for (row, rhs) in &self.le_rows {
            worst = worst.max(dot(row, x) - rhs);
        }
        for (row, rhs) in &self.eq_rows {
            worst = worst.max((dot(row, x) - rhs).abs());
        }
        for (j, &xj) in x.iter().enumerate() {
            worst = worst.max(-xj);
            if let Some(u) = self.upper[j] {
                worst = worst.max(xj - u);
            }
        }
        worst
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    pub x: Vec<f64>,
    pub objective: f64,
}

impl LpSolution {
    fn failed(status: LpStatus, n: usize) -> Self {
        LpSolution { status, x: vec![0.0; n], objective: f64::NAN }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

struct Tableau {
    rows: Vec<Vec<f64>>,
    basis: Vec<usize>,
    /// Reduced costs `c_j - c_B B^-1 A_j`; the last entry is minus the
    /// objective value.
    cost: Vec<f64>,
    ncols: usize,
    first_artificial: usize,
}

impl Tableau {
    fn rhs(&self, i: usize) -> f64 {
        self.rows[i][self.ncols]
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.rows[r][c];
        for v in self.rows[r].iter_mut() {
            *v /= p;
        }
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let f = row[c];
            if f != 0.0 {
                for (v, pv) in row.iter_mut().zip(&pivot_row) {
                    *v -= f * pv;
                }
                row[c] = 0.0;
            }
        }
        let f = self.cost[c];
        if f != 0.0 {
            for (v, pv) in self.cost.iter_mut().zip(&pivot_row) {
                *v -= f * pv;
            }
            self.cost[c] = 0.0;
        }
        self.basis[r] = c;
    }

    fn set_objective(&mut self, c: &[f64]) {
        let mut cost = vec![0.0; self.ncols + 1];
        cost[..c.len()].copy_from_slice(c);
        for (i, row) in self.rows.iter().enumerate() {
            let cb = c.get(self.basis[i]).copied().unwrap_or(0.0);
            if cb != 0.0 {
                for (v, a) in cost.iter_mut().zip(row) {
                    *v -= cb * a;
                }
            }
        }
        self.cost = cost;
    }

    /// Runs Bland's-rule pivots over columns `< allowed`. Returns false when
    /// the objective is unbounded.
    fn optimize(&mut self, allowed: usize) -> bool {
        loop {
            let Some(enter) = (0..allowed).find(|&j| self.cost[j] > PIVOT_EPS) else {
                return true;
            };
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..self.rows.len() {
                let a = self.rows[i][enter];
                if a <= PIVOT_EPS {
                    continue;
                }
                let ratio = self.rhs(i) / a;
                leave = match leave {
                    None => Some((i, ratio)),
                    Some((bi, br)) => {
                        if ratio < br - PIVOT_EPS || (ratio <= br + PIVOT_EPS && self.basis[i] < self.basis[bi]) {
                            Some((i, ratio))
                        } else {
                            Some((bi, br))
                        }
                    }
                };
            }
            match leave {
                Some((r, _)) => self.pivot(r, enter),
                None => return false,
            }
        }
    }
}

/// Solves `lp` to optimality.
pub fn solve(lp: &LinearProgram) -> LpSolution {
    let n = lp.num_vars();

    // Collect every row as (coefficients, rhs, is_equality).
    let mut raw: Vec<(Vec<f64>, f64, bool)> = Vec::new();
    for (row, rhs) in &lp.le_rows {
        raw.push((row.clone(), *rhs, false));
    }
    for (j, u) in lp.upper.iter().enumerate() {
        if let Some(u) = u {
            let mut row = vec![0.0; n];
            row[j] = 1.0;
            raw.push((row, *u, false));
        }
    }
    for (row, rhs) in &lp.eq_rows {
        raw.push((row.clone(), *rhs, true));
    }

    let n_slack = raw.iter().filter(|r| !r.2).count();
    let needs_art: Vec<bool> = raw.iter().map(|(_, rhs, eq)| *eq || *rhs < 0.0).collect();
    let n_art = needs_art.iter().filter(|&&b| b).count();
    let ncols = n + n_slack + n_art;
    let first_artificial = n + n_slack;

    let mut rows = Vec::with_capacity(raw.len());
    let mut basis = Vec::with_capacity(raw.len());
    let (mut slack_idx, mut art_idx) = (n, first_artificial);
    for ((coef, rhs, eq), art) in raw.iter().zip(&needs_art) {
        let mut row = vec![0.0; ncols + 1];
        row[..n].copy_from_slice(coef);
        row[ncols] = *rhs;
        let slack = if *eq {
            None
        } else {
            row[slack_idx] = 1.0;
            slack_idx += 1;
            Some(slack_idx - 1)
        };
        if *rhs < 0.0 {
            for v in row.iter_mut() {
                *v = -*v;
            }
        }
        if *art {
            row[art_idx] = 1.0;
            basis.push(art_idx);
            art_idx += 1;
        } else {
            basis.push(slack.expect("non-artificial rows carry a slack"));
        }
        rows.push(row);
    }

    let mut t = Tableau { rows, basis, cost: Vec::new(), ncols, first_artificial };

    if n_art > 0 {
        let mut phase1 = vec![0.0; ncols];
        for v in phase1.iter_mut().skip(first_artificial) {
            *v = -1.0;
        }
        t.set_objective(&phase1);
        t.optimize(ncols);
        // cost[ncols] holds minus the phase-1 objective, i.e. the sum of
        // artificials.
        if -t.cost[ncols] < -FEAS_EPS {
            return LpSolution::failed(LpStatus::Infeasible, n);
        }
        // Pivot remaining artificials out of the basis, dropping redundant rows.
        let mut i = 0;
        while i < t.rows.len() {
            if t.basis[i] >= t.first_artificial {
                let col = (0..t.first_artificial).find(|&j| t.rows[i][j].abs() > 1e-9);
                match col {
                    Some(j) => t.pivot(i, j),
                    None => {
                        t.rows.remove(i);
                        t.basis.remove(i);
                        continue;
                    }
                }
            }
            i += 1;
        }
    }

    t.set_objective(&lp.objective);
    if !t.optimize(first_artificial) {
        return LpSolution::failed(LpStatus::Unbounded, n);
    }

    let mut x = vec![0.0; n];
    for (i, &b) in t.basis.iter().enumerate() {
        if b < n {
            x[b] = t.rhs(i).max(0.0);
        }
    }
    for (xj, u) in x.iter_mut().zip(&lp.upper) {
        if let Some(u) = u {
            *xj = xj.min(*u);
        }
    }
    let objective = lp.value(&x);
    LpSolution { status: LpStatus::Optimal, x, objective }
}

/// Optimizes `lp.objective`, then each entry of `tiebreaks` in turn over the
/// optimal face of the previous stage.
pub fn solve_lexicographic(lp: &LinearProgram, tiebreaks: &[Vec<f64>]) -> LpSolution {
    // Fallback slack on the face constraint, used only when rounding makes
    // the exact face look infeasible.
    const FACE_TOL: f64 = 1e-10;
    let mut best = solve(lp);
    if best.status != LpStatus::Optimal {
        return best;
    }
    let mut staged = lp.clone();
    let mut current = lp.objective.clone();
    let mut current_value = best.objective;
    for tb in tiebreaks {
        let neg: Vec<f64> = current.iter().map(|v| -v).collect();
        let mut exact = staged.clone();
        exact.add_le(neg.clone(), -current_value);
        exact.objective = tb.clone();
        let mut sol = solve(&exact);
        staged = exact;
        if sol.status != LpStatus::Optimal {
            let mut relaxed = staged.clone();
            relaxed.le_rows.pop();
            relaxed.add_le(neg, -(current_value - FACE_TOL * current_value.abs().max(1.0)));
            sol = solve(&relaxed);
            staged = relaxed;
        }
        if sol.status != LpStatus::Optimal {
            break;
        }
        current_value = dot(tb, &sol.x);
        current = tb.clone();
        best = LpSolution { status: LpStatus::Optimal, objective: lp.value(&sol.x), x: sol.x };
    }
    best
}
