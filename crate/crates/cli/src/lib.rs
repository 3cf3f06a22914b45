//! Experiment runner for the `qip` simulator: config resolution, protocol
//! dispatch, and report emission.

pub mod config;
pub mod formulas;
pub mod report;
pub mod runner;

pub use config::{ConfigError, ExperimentConfig, Overrides, ProtocolConfig, ProtocolName};
pub use report::{emit_report, FormulaCheck, Report, TrialRow};
pub use runner::{run_experiment, RunError};

/// Resolves, runs and emits one experiment; returns the process exit code.
pub fn execute(protocol: ProtocolName, config_path: Option<&std::path::Path>, flags: &Overrides) -> (i32, String) {
    let table = match config_path.map(config::read_table).transpose() {
        Ok(t) => t.unwrap_or_default(),
        Err(e) => return (2, e.to_string()),
    };
    let config = match ExperimentConfig::resolve(protocol, table, flags) {
        Ok(c) => c,
        Err(e) => return (2, e.to_string()),
    };
    let report = match run_experiment(&config) {
        Ok(r) => r,
        Err(e) => return (e.exit_code(), e.to_string()),
    };
    if let Err(e) = emit_report(&report, &config.output_dir) {
        return (1, format!("cannot write report: {e}"));
    }
    let failed = report.failed_formulas();
    if !failed.is_empty() {
        let names: Vec<&str> = failed.iter().map(|f| f.name.as_str()).collect();
        return (3, format!("formula checks failed: {}", names.join(", ")));
    }
    let summary = match &report.rates {
        Some(r) => format!(
            "{}: {} trials, accept-and-valid {:.3}, accept-and-invalid {:.3}, abort {:.3}; report in {}",
            report.protocol,
            r.trials,
            r.accept_and_valid.rate,
            r.accept_and_invalid.rate,
            r.abort.rate,
            config.output_dir.display()
        ),
        None => format!(
            "{}: {} rows; report in {}",
            report.protocol,
            report.trials.len(),
            config.output_dir.display()
        ),
    };
    (0, summary)
}
