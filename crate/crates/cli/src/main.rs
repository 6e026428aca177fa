use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use ifp_core::checks::{self, CheckConfig, Level};
use ifp_core::figures::{figure1, figure2, DEFAULT_POINTS, DEFAULT_RANGE};
use ifp_core::sweep::{sweep, Spacing, SweepOutput, SweepSpec, Table};
use ifp_core::{
    consumption_approx_small_r, consumption_path, derivatives, h_approx_small_r, h_closed_r0,
    h_numeric, ModelParams,
};

#[derive(Parser)]
#[command(name = "ifp", version, about = "Closed-form consumption functions with a borrowing constraint")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Depletion time, consumption and derivatives at one asset level.
    Eval(EvalArgs),
    /// CSV table of selected outputs over an asset grid.
    Sweep(SweepArgs),
    /// CSV data behind figure 1 (discrete time) or figure 2 (small r).
    Figure(FigureArgs),
    /// Runs the acceptance checks; exits 1 if any fails.
    Check(CheckArgs),
}

#[derive(Args, Clone, Copy)]
struct ParamArgs {
    /// Discount rate.
    #[arg(long, default_value_t = 0.08, allow_negative_numbers = true)]
    rho: f64,
    /// Interest rate, 0 <= r < rho.
    #[arg(long, default_value_t = 0.01, allow_negative_numbers = true)]
    r: f64,
    /// Relative risk aversion.
    #[arg(long, default_value_t = 0.5, allow_negative_numbers = true)]
    gamma: f64,
    /// Constant income.
    #[arg(long, default_value_t = 3.0, allow_negative_numbers = true)]
    y: f64,
}

impl ParamArgs {
    fn build(&self) -> Result<ModelParams, ifp_core::Error> {
        Ok(ModelParams::new(self.rho, self.r, self.gamma, self.y)?)
    }
}

#[derive(Args)]
struct GridArgs {
    /// Lower end of the asset grid.
    #[arg(long = "a-min", allow_negative_numbers = true)]
    a_min: Option<f64>,
    /// Upper end of the asset grid.
    #[arg(long = "a-max", allow_negative_numbers = true)]
    a_max: Option<f64>,
    /// Number of grid points.
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, default_value = "linear")]
    spacing: Spacing,
    /// Grid and consumption in absolute units instead of multiples of y.
    #[arg(long)]
    absolute: bool,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl GridArgs {
    fn spec(&self) -> Result<SweepSpec, ifp_core::Error> {
        SweepSpec::new(
            self.a_min.unwrap_or(DEFAULT_RANGE.0),
            self.a_max.unwrap_or(DEFAULT_RANGE.1),
            self.n.unwrap_or(DEFAULT_POINTS),
            self.spacing,
            !self.absolute,
        )
    }
}

#[derive(Args)]
struct EvalArgs {
    #[command(flatten)]
    params: ParamArgs,
    /// Initial assets.
    #[arg(long, allow_negative_numbers = true)]
    a: f64,
    /// Time at which consumption is reported.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    t: f64,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    params: ParamArgs,
    #[command(flatten)]
    grid: GridArgs,
    /// Comma-separated outputs among c, T, jacobian, hessian.
    #[arg(long, value_delimiter = ',', default_value = "c")]
    outputs: Vec<SweepOutput>,
}

#[derive(Args)]
struct FigureArgs {
    #[command(flatten)]
    params: ParamArgs,
    #[command(flatten)]
    grid: GridArgs,
    /// Figure number, 1 or 2.
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
    which: u8,
    /// Period length of the discrete-time model (figure 1).
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    delta: f64,
}

#[derive(Args)]
struct CheckArgs {
    #[command(flatten)]
    params: ParamArgs,
    #[arg(long, default_value = "quick")]
    level: Level,
    /// Relative residual demanded of the Lambert W kernel.
    #[arg(long = "lambert-residual-tol", default_value_t = 1e-13)]
    lambert_residual_tol: f64,
}

enum Failure {
    Usage(String),
    Checks,
}

impl From<ifp_core::Error> for Failure {
    fn from(e: ifp_core::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Eval(args) => eval(&args),
        Command::Sweep(args) => run_sweep(&args),
        Command::Figure(args) => figure(&args),
        Command::Check(args) => check(&args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Checks) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn eval(args: &EvalArgs) -> Result<(), Failure> {
    let p = args.params.build()?;
    let (a, t) = (args.a, args.t);
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Failure::Usage(format!("t must be finite and >= 0, got {t}")));
    }
    let mut s = String::new();
    let mut kv = |k: &str, v: f64| writeln!(s, "{k}={v}").expect("writing to a String");
    kv("a", a);
    kv("t", t);
    if p.is_zero_rate() {
        kv("T_exact_r0", h_closed_r0(&p, a)?.time);
    }
    kv("T_approx_small_r", h_approx_small_r(&p, a)?.time);
    kv("T_numeric", h_numeric(&p, a)?.time);
    kv("c", consumption_path(&p, a, t)?);
    kv("c_approx_small_r", consumption_approx_small_r(&p, a, t)?);
    if p.is_zero_rate() && a > 0.0 {
        let d = derivatives(&p, a)?;
        kv("dc_da", d.dc_da);
        kv("dc_dy", d.dc_dy);
        kv("d2c_da2", d.d2c_da2);
        kv("d2c_dady", d.d2c_dady);
        kv("d2c_dy2", d.d2c_dy2);
    }
    print!("{s}");
    Ok(())
}

fn run_sweep(args: &SweepArgs) -> Result<(), Failure> {
    let p = args.params.build()?;
    let table = sweep(&p, &args.grid.spec()?, &args.outputs)?;
    emit(&table, args.grid.out.as_ref())
}

fn figure(args: &FigureArgs) -> Result<(), Failure> {
    let p = args.params.build()?;
    let spec = args.grid.spec()?;
    let table = match args.which {
        1 => figure1(&p, &spec, args.delta)?,
        _ => figure2(&p, &spec)?,
    };
    emit(&table, args.grid.out.as_ref())
}

fn check(args: &CheckArgs) -> Result<(), Failure> {
    let p = args.params.build()?;
    let config = CheckConfig {
        level: args.level,
        lambert_residual_tol: args.lambert_residual_tol,
    };
    let outcomes = checks::run_all(&p, &config);
    for o in &outcomes {
        println!("{o}");
    }
    let passed = outcomes.iter().filter(|o| o.passed).count();
    let advisory = outcomes.iter().filter(|o| o.advisory && !o.passed).count();
    println!(
        "{passed}/{} checks passed ({advisory} advisory failures)",
        outcomes.len()
    );
    if checks::all_passed(&outcomes) {
        Ok(())
    } else {
        Err(Failure::Checks)
    }
}

/// Serializes the whole table before touching the destination.
fn emit(table: &Table, out: Option<&PathBuf>) -> Result<(), Failure> {
    let bytes = to_csv(table).map_err(|e| Failure::Usage(format!("csv encoding: {e}")))?;
    match out {
        Some(path) => std::fs::write(path, &bytes)
            .map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display()))),
        None => {
            use std::io::Write;
            std::io::stdout()
                .write_all(&bytes)
                .map_err(|e| Failure::Usage(format!("cannot write to stdout: {e}")))
        }
    }
}

fn to_csv(table: &Table) -> Result<Vec<u8>, csv::Error> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(&table.header)?;
    for row in &table.rows {
        w.write_record(row.iter().map(|v| format!("{v:.16e}")))?;
    }
    w.into_inner().map_err(|e| e.into_error().into())
}
