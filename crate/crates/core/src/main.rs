use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use cogrelay::channel::link_table;
use cogrelay::optimizer::{optimize_probs, AlphaMode, OptimizeOptions, Solution};
use cogrelay::rates::report_from_probs;
use cogrelay::region::{sweep, Grid, SweepMode, SweepSpec};
use cogrelay::report;
use cogrelay::scenario::{self, Scenario};
use cogrelay::simulator::{run, SimConfig, System, RELAY_BACKOFF};
use cogrelay::{Error, Exec, Policy};

const EXIT_CONFIG: u8 = 2;
const EXIT_INFEASIBLE: u8 = 3;

#[derive(Parser)]
#[command(name = "cogrelay", version, about = "Cooperative cognitive relaying: rates, optimization, sweeps, simulation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print every analytic rate for the scenario's policy (or the optimal one).
    Rates(RatesArgs),
    /// Find the throughput-maximizing policy.
    Optimize(OptimizeArgs),
    /// Trace stability-region curves over a grid of primary arrival rates.
    Sweep(SweepArgs),
    /// Simulate the protocol slot by slot.
    Simulate(SimulateArgs),
}

#[derive(Args)]
struct ScenarioArgs {
    /// Scenario file, or `builtin:NAME` for a bundled one (fig1, fig3, table1).
    scenario: String,
    #[arg(long)]
    lambda_p1: Option<f64>,
    #[arg(long)]
    lambda_p2: Option<f64>,
}

#[derive(Args)]
struct AlphaArgs {
    /// Search a single admittance factor shared by both users (default).
    #[arg(long, conflicts_with = "independent_alpha")]
    equal_alpha: bool,
    /// Search both admittance factors independently.
    #[arg(long)]
    independent_alpha: bool,
    #[arg(long, default_value_t = 0.01)]
    alpha_step: f64,
}

impl AlphaArgs {
    fn options(&self) -> OptimizeOptions {
        OptimizeOptions {
            alpha_mode: if self.independent_alpha { AlphaMode::Independent } else { AlphaMode::Equal },
            alpha_step: self.alpha_step,
            ..OptimizeOptions::default()
        }
    }
}

#[derive(Args)]
struct RatesArgs {
    #[command(flatten)]
    scenario: ScenarioArgs,
    #[command(flatten)]
    alpha: AlphaArgs,
    /// Also write the report as CSV.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct OptimizeArgs {
    #[command(flatten)]
    scenario: ScenarioArgs,
    #[command(flatten)]
    alpha: AlphaArgs,
    /// Write CSV here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Analytic,
    Empirical,
    Both,
}

#[derive(Args)]
struct SweepArgs {
    /// Scenario file, or `builtin:NAME`.
    scenario: String,
    #[arg(long, default_value_t = 0.0)]
    p1_start: f64,
    #[arg(long, default_value_t = 0.4)]
    p1_stop: f64,
    #[arg(long, default_value_t = 0.05)]
    p1_step: f64,
    /// Primary-2 arrival rates; defaults to the scenario's.
    #[arg(long, value_delimiter = ',')]
    lambda_p2: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_value = "S,S1,S2")]
    systems: Vec<String>,
    #[arg(long, value_enum, default_value_t = ModeArg::Analytic)]
    mode: ModeArg,
    #[command(flatten)]
    alpha: AlphaArgs,
    /// Slots per empirical stability probe.
    #[arg(long, default_value_t = 1_000_000)]
    slots: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Evaluate grid points one at a time.
    #[arg(long)]
    sequential: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    scenario: ScenarioArgs,
    #[arg(long)]
    lambda_s: Option<f64>,
    #[arg(long, default_value = "S")]
    system: String,
    /// Measured slots; defaults to the scenario's [sim] section, else 10^6.
    #[arg(long)]
    slots: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    warmup: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

enum Failure {
    Config(String),
    Infeasible(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_infeasibility() {
            Failure::Infeasible(e.to_string())
        } else {
            Failure::Config(e.to_string())
        }
    }
}

type CmdResult = Result<(), Failure>;

fn load_scenario(name: &str) -> Result<Scenario, Error> {
    match name.strip_prefix("builtin:") {
        Some(b) => scenario::bundled(b),
        None => scenario::load(std::path::Path::new(name)),
    }
}

fn load(args: &ScenarioArgs) -> Result<Scenario, Error> {
    let mut s = load_scenario(&args.scenario)?;
    if let Some(v) = args.lambda_p1 {
        s.config.arrivals.lambda_p1 = v;
    }
    if let Some(v) = args.lambda_p2 {
        s.config.arrivals.lambda_p2 = v;
    }
    s.config.validate()?;
    Ok(s)
}

fn output(path: &Option<PathBuf>) -> Result<Box<dyn Write>, Failure> {
    match path {
        Some(p) => std::fs::File::create(p)
            .map(|f| Box::new(std::io::BufWriter::new(f)) as Box<dyn Write>)
            .map_err(|e| Failure::Config(format!("cannot create {}: {e}", p.display()))),
        None => Ok(Box::new(std::io::stdout().lock())),
    }
}

fn solve(s: &Scenario, opts: &OptimizeOptions) -> Result<Solution, Error> {
    let probs = link_table(&s.config)?;
    optimize_probs(&probs, &s.config.arrivals, opts)
}

fn cmd_rates(a: &RatesArgs) -> CmdResult {
    let s = load(&a.scenario)?;
    let policy = match s.policy {
        Some(p) => p,
        None => {
            let sol = solve(&s, &a.alpha.options())?;
            sol.policy.ok_or_else(|| Failure::Infeasible("no policy keeps both relaying queues stable".into()))?
        }
    };
    let r = report_from_probs(&link_table(&s.config)?, &s.config.arrivals, &policy)?;
    let mut out = std::io::stdout().lock();
    for (k, v) in r.fields() {
        writeln!(out, "{k:<12} {}", report::num(v)).map_err(|e| Failure::Config(e.to_string()))?;
    }
    if let Some(path) = &a.csv {
        report::write_rates(output(&Some(path.clone()))?, &r)?;
    }
    if !r.relays_stable() {
        return Err(Failure::Infeasible("a relaying queue is unstable under this policy".into()));
    }
    Ok(())
}

fn cmd_optimize(a: &OptimizeArgs) -> CmdResult {
    let s = load(&a.scenario)?;
    let lambda = [s.config.arrivals.lambda_p1, s.config.arrivals.lambda_p2];
    let (sol, err) = match solve(&s, &a.alpha.options()) {
        Ok(sol) => (sol, None),
        Err(e) if e.is_infeasibility() => (Solution::infeasible([1.0, 1.0]), Some(e.to_string())),
        Err(e) => return Err(e.into()),
    };
    report::write_solution(output(&a.out)?, lambda, &sol)?;
    if sol.is_optimal() {
        let active: Vec<String> = sol.active_constraints.iter().map(ToString::to_string).collect();
        eprintln!("active constraints: {}", active.join(", "));
        for n in &sol.notes {
            eprintln!("note: {n}");
        }
        Ok(())
    } else {
        Err(Failure::Infeasible(err.unwrap_or_else(|| "no admittance factor keeps the relaying queues stable".into())))
    }
}

fn cmd_sweep(a: &SweepArgs) -> CmdResult {
    let s = load_scenario(&a.scenario)?;
    let systems = a.systems.iter().map(|x| x.parse()).collect::<Result<Vec<System>, Error>>()?;
    let lambda_p2 = if a.lambda_p2.is_empty() { vec![s.config.arrivals.lambda_p2] } else { a.lambda_p2.clone() };
    let mode = match a.mode {
        ModeArg::Analytic => SweepMode::Analytic,
        ModeArg::Empirical => SweepMode::Empirical,
        ModeArg::Both => SweepMode::Both,
    };
    let grid = Grid { start: a.p1_start, stop: a.p1_stop, step: a.p1_step };
    let mut spec = SweepSpec::new(grid, lambda_p2, systems, mode);
    spec.equal_alpha = !a.alpha.independent_alpha;
    spec.alpha_step = a.alpha.alpha_step;
    spec.boundary.probe.slots = a.slots;
    spec.seed = a.seed;
    spec.exec = if a.sequential { Exec::Sequential } else { Exec::Parallel };
    let points = sweep(&s.config, &spec)?;
    report::write_sweep(output(&a.out)?, &points)?;
    Ok(())
}

fn cmd_simulate(a: &SimulateArgs) -> CmdResult {
    let mut s = load(&a.scenario)?;
    if let Some(v) = a.lambda_s {
        s.config.arrivals.lambda_s = Some(v);
    }
    let system: System = a.system.parse()?;
    let settings = s.sim;
    let slots = a.slots.or(settings.map(|m| m.slots)).unwrap_or(1_000_000);
    let seed = a.seed.or(settings.map(|m| m.seed)).unwrap_or(0);
    let warmup = a.warmup.or(settings.map(|m| m.warmup)).unwrap_or(0);
    let policy = match (system, s.policy) {
        (_, Some(p)) => p,
        (System::S, None) => {
            let opts = OptimizeOptions { relay_backoff: RELAY_BACKOFF, ..OptimizeOptions::default() };
            solve(&s, &opts)?
                .policy
                .ok_or_else(|| Failure::Infeasible("no policy keeps both relaying queues stable".into()))?
        }
        (_, None) => Policy::new([1.0, 1.0], [1.0, 1.0], [1.0, 0.0, 0.0, 0.0])?,
    };
    let sim = SimConfig::new(system, s.config, policy, slots, seed).with_warmup(warmup);
    let outcome = run(&sim)?;
    report::write_outcome(output(&a.out)?, &outcome)?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Rates(a) => cmd_rates(a),
        Command::Optimize(a) => cmd_optimize(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Simulate(a) => cmd_simulate(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(EXIT_CONFIG)
        }
        Err(Failure::Infeasible(m)) => {
            eprintln!("infeasible: {m}");
            ExitCode::from(EXIT_INFEASIBLE)
        }
    }
}
