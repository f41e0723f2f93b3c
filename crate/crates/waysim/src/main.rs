use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use waysim::{CliError, ModelName, Outcome, Overrides, Status, Suite, SweepConfig};

#[derive(Parser)]
#[command(name = "waysim", version, about = "Sweeps and checks for momentum-conserving position measurements")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute one record per coupling value and write CSV and JSON.
    Sweep(RunArgs),
    /// Run every check; exit 1 if any fails.
    Verify(RunArgs),
    /// Check the noise/momentum inequalities.
    Bounds(RunArgs),
    /// Compare repeatability widths with the predicted halfwidths.
    Repeat(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// JSON configuration; defaults apply to missing fields.
    #[arg(short, long)]
    config: Option<PathBuf>,
    /// Comma-separated coupling values.
    #[arg(long, value_delimiter = ',')]
    lambda: Option<Vec<f64>>,
    #[arg(long, value_enum)]
    model: Option<ModelName>,
    /// CSV output path; the JSON report goes next to it.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    grid_n: Option<usize>,
    /// Grid range as LO,HI, e.g. --grid-span=-16,16.
    #[arg(long, allow_hyphen_values = true)]
    grid_span: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    /// Also write `x<TAB>e(x)` files for every coupling value.
    #[arg(long)]
    emit_plot_data: bool,
}

fn parse_span(s: &str) -> Result<(f64, f64), CliError> {
    let bad = || CliError::Config(format!("--grid-span expects LO,HI, got {s:?}"));
    let (a, b) = s.split_once(',').ok_or_else(bad)?;
    Ok((a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?))
}

fn load(args: &RunArgs) -> Result<SweepConfig, CliError> {
    let mut cfg = match &args.config {
        Some(p) => SweepConfig::load(p)?,
        None => SweepConfig::default(),
    };
    Overrides {
        lambda: args.lambda.clone(),
        model: args.model,
        out: args.out.clone(),
        grid_n: args.grid_n,
        grid_span: args.grid_span.as_deref().map(parse_span).transpose()?,
        seed: args.seed,
    }
    .apply(&mut cfg)?;
    Ok(cfg)
}

fn opt(x: Option<f64>) -> String {
    x.map(|v| format!("{v:.4}")).unwrap_or_else(|| "-".into())
}

fn print_summary(cfg: &SweepConfig, out: &Outcome) {
    println!(
        "{:>10} {:>12} {:>10} {:>12} {:>12} {:>12} {:>9} {:>9} {:>10}",
        "lambda", "var_e", "width_e", "eps_sq", "rhs_general", "rhs_yanase", "repeat", "pred_d", "l1_gap"
    );
    for r in &out.records {
        println!(
            "{:>10.4} {:>12.5e} {:>10.4} {:>12.5e} {:>12.5e} {:>12.5e} {:>9.4} {:>9} {:>10.2e}",
            r.lambda,
            r.var_e,
            r.width_e,
            r.eps_sq,
            r.rhs_general,
            r.rhs_yanase,
            r.repeat_width,
            opt(r.predicted_d),
            r.oracle_l1_gap
        );
    }
    for c in &out.checks {
        let tag = match c.status {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::ExpectedViolation => "EXPECTED-VIOLATION",
        };
        println!("{tag:<18} {:<18} lambda={:<10} {}", c.name, c.lambda, c.detail);
    }
    println!("wrote {} and {}", cfg.csv_path().display(), cfg.json_path().display());
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let (name, args, suite) = match &cli.command {
        Command::Sweep(a) => ("sweep", a, None),
        Command::Verify(a) => ("verify", a, Some(Suite::All)),
        Command::Bounds(a) => ("bounds", a, Some(Suite::Bounds)),
        Command::Repeat(a) => ("repeat", a, Some(Suite::Repeat)),
    };
    let result = load(args).and_then(|cfg| {
        let out = waysim::run(name, &cfg, suite, args.emit_plot_data)?;
        print_summary(&cfg, &out);
        Ok(out)
    });
    match result {
        Ok(out) => ExitCode::from(out.exit_code() as u8),
        Err(e) => {
            eprintln!("waysim: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
