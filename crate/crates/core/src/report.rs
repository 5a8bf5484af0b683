//! CSV output. Numbers use six decimal places and a '.' separator regardless
//! of locale; lines end with '\n'.

use std::io::Write;

use crate::error::{Error, QueueId, Result};
use crate::optimizer::Solution;
use crate::rates::RateReport;
use crate::region::RegionPoint;
use crate::simulator::SimOutcome;

pub const OPTIMIZE_HEADER: [&str; 12] =
    ["lambda_p1", "lambda_p2", "alpha1", "alpha2", "eta1", "eta2", "eta3", "eta4", "a_s1", "a_s2", "mu_s_max", "status"];

pub const SWEEP_HEADER: [&str; 8] =
    ["lambda_p1", "lambda_p2", "system", "mode", "feasible", "lambda_s_max", "alpha1", "alpha2"];

/// Fixed six-decimal formatting; NaN is written as `nan`.
pub fn num(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else {
        format!("{v:.6}")
    }
}

fn io_err(e: impl std::fmt::Display) -> Error {
    Error::InvalidConfig(format!("cannot write CSV: {e}"))
}

fn writer<W: Write>(out: W) -> csv::Writer<W> {
    csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out)
}

pub fn write_rates<W: Write>(out: W, r: &RateReport) -> Result<()> {
    let mut w = writer(out);
    let fields = r.fields();
    w.write_record(fields.iter().map(|(k, _)| *k)).map_err(io_err)?;
    w.write_record(fields.iter().map(|(_, v)| num(*v))).map_err(io_err)?;
    w.flush().map_err(io_err)
}

/// Header plus one row. Policy columns are empty when infeasible.
pub fn write_solution<W: Write>(out: W, lambda: [f64; 2], s: &Solution) -> Result<()> {
    let mut w = writer(out);
    w.write_record(OPTIMIZE_HEADER).map_err(io_err)?;
    let mut row = vec![num(lambda[0]), num(lambda[1]), num(s.alpha[0]), num(s.alpha[1])];
    match &s.policy {
        Some(p) => {
            row.extend(p.eta.iter().map(|&v| num(v)));
            row.push(num(p.a_s1));
            row.push(num(p.a_s2));
        }
        None => row.extend(std::iter::repeat_n(String::new(), 6)),
    }
    row.push(num(s.mu_s_max));
    row.push(s.status.as_str().into());
    w.write_record(&row).map_err(io_err)?;
    w.flush().map_err(io_err)
}

pub fn write_sweep<W: Write>(out: W, points: &[RegionPoint]) -> Result<()> {
    let mut w = writer(out);
    w.write_record(SWEEP_HEADER).map_err(io_err)?;
    for p in points {
        w.write_record([
            num(p.lambda_p1),
            num(p.lambda_p2),
            p.system.name().into(),
            p.mode.as_str().into(),
            p.feasible.to_string(),
            num(p.lambda_s_max),
            num(p.alpha[0]),
            num(p.alpha[1]),
        ])
        .map_err(io_err)?;
    }
    w.flush().map_err(io_err)
}

/// Header plus one row: run identity, then per queue its arrival rate,
/// service rate (departures per busy slot), opportunity rate with standard
/// error, throughput, empty fraction with standard error and drift verdict.
pub fn write_outcome<W: Write>(out: W, o: &SimOutcome) -> Result<()> {
    let mut w = writer(out);
    let mut header = vec!["system".to_string(), "seed".into(), "slots".into(), "status".into()];
    let mut row = vec![o.system.name().to_string(), o.seed.to_string(), o.slots.to_string(), o.status.as_str().into()];
    for q in QueueId::ALL {
        let s = o.queue(q);
        for (k, v) in [
            ("arrival_rate", num(s.arrival_rate.mean)),
            ("service_rate", num(s.service_rate)),
            ("opportunity_rate", num(s.opportunity_rate.mean)),
            ("opportunity_se", num(s.opportunity_rate.std_err)),
            ("throughput", num(s.throughput)),
            ("empty_frac", num(s.empty_frac.mean)),
            ("empty_se", num(s.empty_frac.std_err)),
            ("final_len", s.final_len.to_string()),
            ("verdict", if o.slots == 0 { String::new() } else { s.verdict.as_str().into() }),
        ] {
            header.push(format!("{}_{k}", q.name()));
            row.push(v);
        }
    }
    w.write_record(&header).map_err(io_err)?;
    w.write_record(&row).map_err(io_err)?;
    w.flush().map_err(io_err)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::optimizer::Solution;

    #[test]
    fn infeasible_row_has_empty_policy() {
        let mut buf = Vec::new();
        write_solution(&mut buf, [0.9, 0.2], &Solution::infeasible([1.0, 1.0])).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines[0], OPTIMIZE_HEADER.join(","));
        assert_eq!(lines[1], "0.900000,0.200000,1.000000,1.000000,,,,,,,0.000000,infeasible");
        assert!(!text.contains('\r'));
    }
}
