use std::path::Path;
use std::process::Command;

use qip::harness::{ChannelKind, Direction, HarnessError, Honesty, Instance, InstanceSource, Protocol, ProverStrategy, Register, Session, Verdict};
use qip::linalg::DensityMatrix;
use qip_cli::config::{parse_table, DEFAULT_TRIALS};
use qip_cli::report::{sha256_hex, REPORT_FILE, TABLE_FILE};
use qip_cli::runner::batch;
use qip_cli::{ExperimentConfig, Overrides, ProtocolName, RunError};

fn qip(args: &[&str], dir: &Path) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_qip"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    std::fs::write(dir.join(name), text).unwrap();
    name.to_string()
}

#[test]
fn reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "p.toml", "d = 4\ntrials = 10\nseed = 77\n");
    for out in ["a", "b"] {
        let o = qip(&["purity", "--config", &cfg, "--out", out], dir.path());
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    for file in [REPORT_FILE, TABLE_FILE] {
        let a = std::fs::read(dir.path().join("a").join(file)).unwrap();
        let b = std::fs::read(dir.path().join("b").join(file)).unwrap();
        assert_eq!(a, b, "{file}");
    }
    let o = qip(&["purity", "--config", &cfg, "--seed", "5", "--out", "c"], dir.path());
    assert!(o.status.success());
    // The file's seed wins over the flag.
    assert_eq!(
        std::fs::read(dir.path().join("a/report.json")).unwrap(),
        std::fs::read(dir.path().join("c/report.json")).unwrap()
    );
}

#[test]
fn config_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    for (name, text) in [
        ("delta.toml", "delta = 1.5\n"),
        ("key.toml", "colour = \"red\"\n"),
        ("adv.toml", "adversary = \"nobody\"\n"),
    ] {
        let cfg = write(dir.path(), name, text);
        let o = qip(&["purity", "--config", &cfg, "--trials", "1", "--out", "x"], dir.path());
        assert_eq!(o.status.code(), Some(2), "{name}: {}", String::from_utf8_lossy(&o.stderr));
    }
    let o = qip(&["tomo", "--config", "missing.toml"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    let cfg = write(dir.path(), "u.toml", "k = 256\n");
    let o = qip(&["uniformity", "--config", &cfg, "--trials", "1", "--out", "x"], dir.path());
    assert_eq!(o.status.code(), Some(2), "epsilon below 12/k^(1/4) must be rejected");
}

#[test]
fn tabular_rows_and_rates_agree() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "s.toml", "n = 2\nadversary = \"random_stabilizer\"\n");
    let o = qip(&["stab", "--config", &cfg, "--trials", "3", "--out", "s", "--transcripts"], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let mut csv = csv::Reader::from_path(dir.path().join("s").join(TABLE_FILE)).unwrap();
    let headers = csv.headers().unwrap().clone();
    for col in ["verdict", "valid", "verifier_queries", "prover_queries", "bits_c", "qudits_q", "seed"] {
        assert!(headers.iter().any(|h| h == col), "{col}");
    }
    let rows: Vec<csv::StringRecord> = csv.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 3);
    let valid_col = headers.iter().position(|h| h == "valid").unwrap();
    let valid = rows.iter().filter(|r| &r[valid_col] == "true").count();

    let report: serde_json::Value = serde_json::from_slice(&std::fs::read(dir.path().join("s").join(REPORT_FILE)).unwrap()).unwrap();
    let rate = report["rates"]["accept_and_valid"]["rate"].as_f64().unwrap();
    assert_eq!(rate, valid as f64 / 3.0);
    for t in report["trials"].as_array().unwrap() {
        let file = t["transcript"]["file"].as_str().unwrap();
        let bytes = std::fs::read(dir.path().join("s").join(file)).unwrap();
        assert_eq!(t["transcript"]["digest"].as_str().unwrap(), sha256_hex(&bytes));
        assert!(!bytes.is_empty());
    }
}

#[test]
fn uniformity_report_carries_both_sumcheck_transcripts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "u.toml", "k = 256\nwaive_constraint = true\ndegree_cap = 64\n");
    let o = qip(&["uniformity", "--config", &cfg, "--trials", "2", "--out", "u"], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let report: serde_json::Value = serde_json::from_slice(&std::fs::read(dir.path().join("u").join(REPORT_FILE)).unwrap()).unwrap();
    for t in report["trials"].as_array().unwrap() {
        assert_eq!(t["attachments"]["unique_rounds"].as_array().unwrap().len(), 8 * 66);
        assert_eq!(t["attachments"]["range_rounds"].as_array().unwrap().len(), 8 * 67);
        assert_eq!(t["qudits_q"], 0);
        assert!(t["stats"]["peak_field_elements"].as_f64().unwrap() <= 48.0);
    }
    assert!(report["formulas"].as_array().unwrap().iter().all(|f| f["holds"] == true));
}

struct Nobody;

impl ProverStrategy for Nobody {
    fn name(&self) -> String {
        "nobody".into()
    }

    fn honesty(&self) -> Honesty {
        Honesty::Honest
    }
}

/// Holds two verifier copies at once.
struct Hoarder;

impl Protocol for Hoarder {
    type Prover = Nobody;
    type Output = bool;

    fn name(&self) -> &'static str {
        "hoarder"
    }

    fn channel_kind(&self) -> ChannelKind {
        ChannelKind::Quantum
    }

    fn execute(&self, s: &mut Session, _: &mut Nobody) -> Result<Verdict<bool>, HarnessError> {
        let a = s.verifier.query("copy")?;
        let b = s.verifier.query("copy")?;
        drop((a, b));
        Ok(Verdict::Accepted(true))
    }
}

/// Sends a register over a channel it declares classical.
struct QuditLeak;

impl Protocol for QuditLeak {
    type Prover = Nobody;
    type Output = bool;

    fn name(&self) -> &'static str {
        "qudit_leak"
    }

    fn channel_kind(&self) -> ChannelKind {
        ChannelKind::Classical
    }

    fn execute(&self, s: &mut Session, _: &mut Nobody) -> Result<Verdict<bool>, HarnessError> {
        s.channel.send_qudits(
            Direction::VerifierToProver,
            "register",
            vec![Register::Prepared(DensityMatrix::maximally_mixed(2))],
        )?;
        Ok(Verdict::Accepted(true))
    }
}

#[test]
fn invariant_violations_exit_3() {
    let config = ExperimentConfig::resolve(ProtocolName::Purity, parse_table("trials = 2").unwrap(), &Overrides::default()).unwrap();
    let source = InstanceSource::fixed(Instance::Quantum(DensityMatrix::maximally_mixed(2)));
    let Err(err) = batch(&Hoarder, || Box::new(Nobody), &source, &config) else {
        panic!("two live copies were allowed")
    };
    assert!(matches!(err, RunError::Invariant(_)), "{err}");
    assert_eq!(err.exit_code(), 3);
    let Err(err) = batch(&QuditLeak, || Box::new(Nobody), &source, &config) else {
        panic!("a qudit crossed a classical channel")
    };
    assert_eq!(err.exit_code(), 3, "{err}");
}

#[test]
fn defaults_apply_without_a_file() {
    let c = ExperimentConfig::resolve(ProtocolName::Nogo, Default::default(), &Overrides::default()).unwrap();
    assert_eq!(c.trials, DEFAULT_TRIALS);
    let dir = tempfile::tempdir().unwrap();
    let o = qip(&["nogo", "--trials", "2", "--out", "n"], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let table = std::fs::read_to_string(dir.path().join("n").join(TABLE_FILE)).unwrap();
    assert_eq!(table.lines().count(), 1 + 4);
}
