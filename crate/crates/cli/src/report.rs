//! Report assembly and emission: one JSON file with everything, one CSV
//! with a row per trial, and optional line-delimited transcripts.

use std::collections::BTreeMap;
use std::io;
use std::path::{Path, PathBuf};
use std::time::Duration;

use serde::Serialize;
use sha2::{Digest, Sha256};

use qip::harness::{Aggregate, RateRecord, TranscriptRecord};

use crate::config::ExperimentConfig;

pub const TOOL_VERSION: &str = concat!("qip ", env!("CARGO_PKG_VERSION"));

pub const REPORT_FILE: &str = "report.json";
pub const TABLE_FILE: &str = "trials.csv";
pub const TIMING_FILE: &str = "timing.json";
pub const TRANSCRIPT_DIR: &str = "transcripts";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialRow {
    pub index: usize,
    pub seed: u64,
    pub prover: String,
    pub verdict: String,
    /// Judge outcome for accepted trials; absent after an abort.
    pub valid: Option<bool>,
    pub verifier_queries: u64,
    pub prover_queries: u64,
    pub bits_c: u64,
    pub qudits_q: u64,
    pub peak_live_copies: usize,
    pub stats: BTreeMap<String, f64>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub attachments: BTreeMap<String, Vec<u64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub transcript: Option<TranscriptRef>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TranscriptRef {
    /// Relative to the output directory.
    pub file: String,
    /// SHA-256 of the file contents.
    pub digest: String,
}

/// Flat view written to the CSV file.
#[derive(Debug, Serialize)]
struct CsvRow<'a> {
    index: usize,
    seed: u64,
    prover: &'a str,
    verdict: &'a str,
    valid: Option<bool>,
    verifier_queries: u64,
    prover_queries: u64,
    bits_c: u64,
    qudits_q: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    Equal,
    AtMost,
}

/// A parameter or count recomputed from the config next to the value the
/// protocol actually used or observed.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FormulaCheck {
    pub name: String,
    pub expected: f64,
    pub observed: f64,
    pub relation: Relation,
    pub holds: bool,
}

const REL_TOL: f64 = 1e-12;

impl FormulaCheck {
    pub fn equal(name: &str, expected: f64, observed: f64) -> Self {
        let holds = (expected - observed).abs() <= REL_TOL * expected.abs().max(1.0);
        Self {
            name: name.to_string(),
            expected,
            observed,
            relation: Relation::Equal,
            holds,
        }
    }

    pub fn at_most(name: &str, bound: f64, observed: f64) -> Self {
        Self {
            name: name.to_string(),
            expected: bound,
            observed,
            relation: Relation::AtMost,
            holds: observed <= bound,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeterAggregates {
    pub verifier_queries: Aggregate,
    pub prover_queries: Aggregate,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChannelAggregates {
    pub classical_bits: Aggregate,
    pub qudits: Aggregate,
    pub peak_live_copies: Aggregate,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub tool: &'static str,
    pub protocol: &'static str,
    pub config: ExperimentConfig,
    pub rates: Option<RateRecord>,
    pub meters: MeterAggregates,
    pub channel: ChannelAggregates,
    pub formulas: Vec<FormulaCheck>,
    /// Protocol-specific results that do not fit the per-trial rows.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub extra: Option<serde_json::Value>,
    pub trials: Vec<TrialRow>,
    /// Kept out of the report file so that reruns compare byte for byte.
    #[serde(skip)]
    pub wall_time: Duration,
    #[serde(skip)]
    pub transcript_files: Vec<(String, Vec<u8>)>,
}

impl Report {
    pub fn new(config: &ExperimentConfig, protocol: &'static str, trials: Vec<TrialRow>, rates: Option<RateRecord>) -> Self {
        let agg = |f: fn(&TrialRow) -> f64| Aggregate::of(trials.iter().map(f));
        Self {
            tool: TOOL_VERSION,
            protocol,
            config: config.clone(),
            rates,
            meters: MeterAggregates {
                verifier_queries: agg(|t| t.verifier_queries as f64),
                prover_queries: agg(|t| t.prover_queries as f64),
            },
            channel: ChannelAggregates {
                classical_bits: agg(|t| t.bits_c as f64),
                qudits: agg(|t| t.qudits_q as f64),
                peak_live_copies: agg(|t| t.peak_live_copies as f64),
            },
            formulas: Vec::new(),
            extra: None,
            trials,
            wall_time: Duration::ZERO,
            transcript_files: Vec::new(),
        }
    }

    pub fn formulas_hold(&self) -> bool {
        self.formulas.iter().all(|f| f.holds)
    }

    pub fn failed_formulas(&self) -> Vec<&FormulaCheck> {
        self.formulas.iter().filter(|f| !f.holds).collect()
    }

    pub fn to_json(&self) -> Vec<u8> {
        let mut out = serde_json::to_vec_pretty(self).expect("report serializes");
        out.push(b'\n');
        out
    }

    pub fn to_csv(&self) -> Vec<u8> {
        let mut w = csv::Writer::from_writer(Vec::new());
        for t in &self.trials {
            w.serialize(CsvRow {
                index: t.index,
                seed: t.seed,
                prover: &t.prover,
                verdict: &t.verdict,
                valid: t.valid,
                verifier_queries: t.verifier_queries,
                prover_queries: t.prover_queries,
                bits_c: t.bits_c,
                qudits_q: t.qudits_q,
            })
            .expect("row serializes");
        }
        if self.trials.is_empty() {
            w.write_record([
                "index",
                "seed",
                "prover",
                "verdict",
                "valid",
                "verifier_queries",
                "prover_queries",
                "bits_c",
                "qudits_q",
            ])
            .expect("header serializes");
        }
        w.into_inner().expect("in-memory writer")
    }
}

/// Serializes a transcript as one JSON object per line.
pub fn transcript_lines(records: &[TranscriptRecord]) -> Vec<u8> {
    let mut out = Vec::new();
    for r in records {
        serde_json::to_writer(&mut out, r).expect("record serializes");
        out.push(b'\n');
    }
    out
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Writes the report files into `dir` and returns their paths.
pub fn emit_report(report: &Report, dir: &Path) -> io::Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    let mut put = |name: &str, bytes: &[u8]| -> io::Result<()> {
        let path = dir.join(name);
        if let Some(parent) = path.parent() {
            std::fs::create_dir_all(parent)?;
        }
        std::fs::write(&path, bytes)?;
        written.push(path);
        Ok(())
    };
    put(REPORT_FILE, &report.to_json())?;
    put(TABLE_FILE, &report.to_csv())?;
    let timing = serde_json::json!({ "wall_time_seconds": report.wall_time.as_secs_f64() });
    put(TIMING_FILE, format!("{timing}\n").as_bytes())?;
    for (name, bytes) in &report.transcript_files {
        put(name, bytes)?;
    }
    Ok(written)
}
