//! CSV and JSON output.

use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::checks::Check;
use crate::config::SweepConfig;
use crate::error::CliError;
use crate::sweep::SweepRecord;

/// Bumped whenever a column is added, removed or reordered.
pub const SCHEMA_VERSION: u32 = 1;

pub const CSV_HEADER: [&str; 22] = [
    "lambda",
    "var_e",
    "var_e_expected",
    "mean_e",
    "width_e",
    "width_reference",
    "eps_sq",
    "eps_sq_sup",
    "mu_sq",
    "delta_p_object_sq",
    "delta_p_apparatus_sq",
    "delta_p_reference_sq",
    "commutator",
    "rhs_general",
    "rhs_yanase",
    "bound_general_ok",
    "bound_yanase_ok",
    "yanase_applicable",
    "repeat_width",
    "predicted_d",
    "support_d",
    "oracle_l1_gap",
];

/// 17 significant digits.
fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

fn row(r: &SweepRecord) -> Vec<String> {
    vec![
        num(r.lambda),
        num(r.var_e),
        num(r.var_e_expected),
        num(r.mean_e),
        num(r.width_e),
        opt(r.width_reference),
        num(r.eps_sq),
        num(r.eps_sq_sup),
        num(r.mu_sq),
        num(r.delta_p_object_sq),
        num(r.delta_p_apparatus_sq),
        num(r.delta_p_reference_sq),
        num(r.commutator),
        num(r.rhs_general),
        num(r.rhs_yanase),
        r.bound_general_ok.to_string(),
        r.bound_yanase_ok.to_string(),
        r.yanase_applicable.to_string(),
        num(r.repeat_width),
        opt(r.predicted_d),
        opt(r.support_d),
        num(r.oracle_l1_gap),
    ]
}

/// CSV text: a schema comment line, the header, one row per record.
pub fn csv_string(records: &[SweepRecord]) -> String {
    let mut out = format!("# waysim sweep schema {SCHEMA_VERSION}\n").into_bytes();
    {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(&mut out);
        w.write_record(CSV_HEADER).expect("in-memory write");
        for r in records {
            w.write_record(row(r)).expect("in-memory write");
        }
        w.flush().expect("in-memory write");
    }
    String::from_utf8(out).expect("ascii output")
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    let mut f = std::fs::File::create(path).map_err(|e| CliError::io(path, e))?;
    f.write_all(text.as_bytes()).map_err(|e| CliError::io(path, e))
}

pub fn write_csv(path: &Path, records: &[SweepRecord]) -> Result<(), CliError> {
    write_file(path, &csv_string(records))
}

#[derive(Debug, Serialize)]
pub struct Report<'a> {
    pub tool: &'static str,
    pub version: &'static str,
    pub schema: u32,
    pub command: &'a str,
    pub config: &'a SweepConfig,
    pub records: &'a [SweepRecord],
    #[serde(skip_serializing_if = "Option::is_none")]
    pub checks: Option<&'a [Check]>,
}

impl<'a> Report<'a> {
    pub fn new(command: &'a str, config: &'a SweepConfig, records: &'a [SweepRecord]) -> Self {
        Self {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            schema: SCHEMA_VERSION,
            command,
            config,
            records,
            checks: None,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn write(&self, path: &Path) -> Result<(), CliError> {
        write_file(path, &self.to_json())
    }
}

/// Two tab-separated columns `x\tvalue`, one line per sample.
pub fn write_density_tsv(path: &Path, d: &waysim_core::Density64) -> Result<(), CliError> {
    let mut s = String::with_capacity(d.values().len() * 48);
    for (x, v) in d.grid().points().zip(d.values()) {
        s.push_str(&format!("{}\t{}\n", num(x), num(*v)));
    }
    write_file(path, &s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_format_round_trips() {
        for x in [0.1, 1.0 / 3.0, 2.74e-3, 1e300, -0.0] {
            let s = num(x);
            assert_eq!(s.parse::<f64>().unwrap().to_bits(), x.to_bits(), "{s}");
        }
        assert_eq!(num(0.25), "2.5000000000000000e-1");
    }
}
