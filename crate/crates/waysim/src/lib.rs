//! Configuration-driven sweeps over the coupling strength for the two
//! measurement models of `waysim-core`, with CSV/JSON output and pass/fail
//! checks. The `waysim` binary is a thin wrapper around [`run`].

pub mod checks;
pub mod config;
pub mod error;
pub mod report;
pub mod sweep;

use std::path::PathBuf;

pub use checks::{Check, Status, Suite};
pub use config::{ModelName, StateSpec, SweepConfig};
pub use error::CliError;
pub use sweep::{prepare, run_sweep, Setup, SweepRecord};

/// Command-line replacements for configuration fields.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub lambda: Option<Vec<f64>>,
    pub model: Option<ModelName>,
    pub out: Option<PathBuf>,
    pub grid_n: Option<usize>,
    pub grid_span: Option<(f64, f64)>,
    pub seed: Option<u64>,
}

impl Overrides {
    pub fn apply(&self, cfg: &mut SweepConfig) -> Result<(), CliError> {
        if let Some(l) = &self.lambda {
            cfg.lambda_values = l.clone();
        }
        if let Some(m) = self.model {
            cfg.model = m;
        }
        if let Some(o) = &self.out {
            cfg.output_path = o.clone();
        }
        if let Some(n) = self.grid_n {
            cfg.grid.n = n;
        }
        if let Some((lo, hi)) = self.grid_span {
            cfg.grid.x_min = lo;
            cfg.grid.x_max = hi;
        }
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        cfg.validate()
    }
}

/// Result of one command.
#[derive(Debug)]
pub struct Outcome {
    pub records: Vec<SweepRecord>,
    pub checks: Vec<Check>,
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        if self.checks.iter().any(Check::failed) {
            1
        } else {
            0
        }
    }
}

/// Runs the sweep, evaluates `suite` (if any) and writes the CSV, the JSON
/// report and, with `plot_data`, one error-density file per coupling value.
pub fn run(command: &str, cfg: &SweepConfig, suite: Option<Suite>, plot_data: bool) -> Result<Outcome, CliError> {
    let setup = prepare(cfg)?;
    let records = sweep::run_prepared(cfg, &setup)?;
    let checks = suite.map(|s| checks::run(&setup, &records, s)).unwrap_or_default();
    report::write_csv(&cfg.csv_path(), &records)?;
    let mut rep = report::Report::new(command, cfg, &records);
    if suite.is_some() {
        rep.checks = Some(&checks);
    }
    rep.write(&cfg.json_path())?;
    if plot_data {
        for (k, &lambda) in cfg.lambda_values.iter().enumerate() {
            let e = setup
                .error_density(lambda)
                .map_err(|e| CliError::numeric(format!("lambda = {lambda}"), e))?;
            report::write_density_tsv(&cfg.plot_path(k), &e)?;
        }
    }
    Ok(Outcome { records, checks })
}
