//! Dispatch from a resolved config to a protocol batch.

use std::time::Instant;

use rand::Rng;

use qip::harness::{
    build_nogo_distinguisher, purity_task, rates, run_batch, trivial_validation_ip, BatchOptions, HarnessError, Instance, InstanceSource, Mode,
    Party, Protocol, Solver, Summary, Trial,
};
use qip::linalg::{sample_haar_state, sample_state, DensityMatrix};
use qip::lowrank::{lowrank_prover, lowrank_valid, LowRankIp, LowRankOutput, LowRankParams};
use qip::purity::{is_pure, purity_params, purity_prover, HonestPurityProver, PurityAnswer, PurityIp, PurityProver};
use qip::stab::{
    near_stabilizer_state, stab_prover, stab_valid, BruteForceSolver, GarbageSolver, StabIp, StabParams, StabilizerDecider, StabilizerStateDesc,
};
use qip::stream::{stream_prover, uniformity_judge, UniformityIp, UniformityParams};
use qip::tomo::{tomo_prover, tomography_valid, HypothesisState, TomoIp, TomoParams};

use crate::config::{ConfigError, ExperimentConfig, ProtocolConfig, PurityInstances, SolverName};
use crate::formulas;
use crate::report::{sha256_hex, transcript_lines, FormulaCheck, Report, TranscriptRef, TrialRow, TRANSCRIPT_DIR};

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("harness failure: {0}")]
    Harness(HarnessError),

    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

impl From<HarnessError> for RunError {
    fn from(e: HarnessError) -> Self {
        if e.is_invariant_violation() {
            RunError::Invariant(e.to_string())
        } else {
            RunError::Harness(e)
        }
    }
}

impl From<qip::Error> for RunError {
    fn from(e: qip::Error) -> Self {
        RunError::Config(ConfigError::Protocol(e.to_string()))
    }
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) => 2,
            RunError::Invariant(_) => 3,
            RunError::Harness(_) | RunError::Io(_) => 1,
        }
    }
}

fn unknown_adversary(name: &str) -> RunError {
    RunError::Config(ConfigError::Value {
        key: "adversary".into(),
        reason: format!("no prover named '{name}'"),
    })
}

/// Runs the configured experiment. A report whose formula checks fail is
/// still returned; the caller decides how to surface it.
pub fn run_experiment(config: &ExperimentConfig) -> Result<Report, RunError> {
    let start = Instant::now();
    let mut report = match &config.protocol {
        ProtocolConfig::Purity {
            d,
            delta,
            mask_ensemble,
            instances,
            adversary,
        } => {
            purity_prover(adversary).ok_or_else(|| unknown_adversary(adversary))?;
            let params = purity_params(*delta, *d)?;
            let ip = PurityIp::new(params.clone(), *mask_ensemble)?;
            let dim = *d;
            let kind = *instances;
            let source = InstanceSource::sampled(move |rng| {
                let pure = match kind {
                    PurityInstances::Pure => true,
                    PurityInstances::Mixed => false,
                    PurityInstances::Both => rng.random_bool(0.5),
                };
                Instance::Quantum(if pure {
                    sample_haar_state(dim, rng).to_density()
                } else {
                    DensityMatrix::maximally_mixed(dim)
                })
            });
            let judge = |inst: &Instance, out: &PurityAnswer| inst.state().is_some_and(|rho| (*out == PurityAnswer::Pure) == is_pure(rho));
            let trials = batch(&ip, || purity_prover(adversary).expect("checked"), &source, config)?;
            let mut report = assemble(config, &ip, &trials, judge);
            report.formulas = formulas::purity(*delta, *d, &params);
            let exact = trials
                .iter()
                .filter(|t| {
                    let compute = t.result.stats.get("rounds_compute").copied().unwrap_or(f64::NAN);
                    t.result.meter.queries(Party::Verifier) as f64 == params.copies as f64 * compute
                })
                .count();
            report.formulas.push(FormulaCheck::equal(
                "trials with verifier queries = m x compute rounds",
                trials.len() as f64,
                exact as f64,
            ));
            report
        }
        ProtocolConfig::Tomo {
            d,
            epsilon,
            delta,
            rank_k,
            c_v,
            c_p,
            adversary,
        } => {
            tomo_prover(adversary).ok_or_else(|| unknown_adversary(adversary))?;
            let mut params = TomoParams::new(*epsilon, *delta, *d, config.mode)?.with_constants(*c_v, *c_p)?;
            if let Some(k) = rank_k {
                params = params.with_rank(*k)?;
            }
            let ip = TomoIp::new(params.clone());
            let (dim, rank) = (*d, *rank_k);
            let source = InstanceSource::sampled(move |rng| {
                Instance::Quantum(match rank {
                    Some(k) => sample_state(dim, k, rng).expect("rank checked"),
                    None => sample_haar_state(dim, rng).to_density(),
                })
            });
            let eps = *epsilon;
            let judge = move |inst: &Instance, out: &HypothesisState| inst.state().is_some_and(|rho| tomography_valid(rho, out, eps));
            let trials = batch(&ip, || tomo_prover(adversary).expect("checked"), &source, config)?;
            let mut report = assemble(config, &ip, &trials, judge);
            report.formulas = formulas::tomo(*epsilon, *delta, *d, *rank_k, *c_v, *c_p, &params);
            if formulas::charged_by_formula(config.mode) {
                report.formulas.push(max_verifier_within(&trials, params.verifier_queries()));
            }
            report
        }
        ProtocolConfig::Lowrank {
            d,
            k,
            epsilon,
            delta,
            variant,
            adversary,
        } => {
            lowrank_prover(adversary).ok_or_else(|| unknown_adversary(adversary))?;
            let params = LowRankParams::new(*epsilon, *delta, *d, *k, *variant, config.mode)?;
            let ip = LowRankIp::new(params.clone());
            let dim = *d;
            let source = InstanceSource::sampled(move |rng| {
                let rank = 1 + rng.random_range(0..dim);
                Instance::Quantum(sample_state(dim, rank, rng).expect("rank in range"))
            });
            let p = params.clone();
            let judge = move |inst: &Instance, out: &LowRankOutput| inst.state().is_some_and(|rho| lowrank_valid(rho, out, &p));
            let trials = batch(&ip, || lowrank_prover(adversary).expect("checked"), &source, config)?;
            let mut report = assemble(config, &ip, &trials, judge);
            report.formulas = formulas::lowrank(*epsilon, *delta, *d, *k, *variant, &params);
            if formulas::charged_by_formula(config.mode) {
                report.formulas.push(max_verifier_within(&trials, params.verifier_queries()));
            }
            report
        }
        ProtocolConfig::Stab {
            n,
            epsilon,
            delta,
            spread,
            adversary,
        } => {
            stab_prover(adversary).ok_or_else(|| unknown_adversary(adversary))?;
            let params = StabParams::new(*epsilon, *delta, *n, config.mode)?;
            let ip = StabIp::new(params.clone());
            let source = stab_source(*n, *spread)?;
            let eps = *epsilon;
            let judge = move |inst: &Instance, out: &StabilizerStateDesc| inst.state().is_some_and(|rho| stab_valid(rho, out, eps));
            let trials = batch(&ip, || stab_prover(adversary).expect("checked"), &source, config)?;
            let mut report = assemble(config, &ip, &trials, judge);
            report.formulas = formulas::stab(*epsilon, *delta, *n, &params);
            report.formulas.push(max_verifier_within(&trials, params.verifier_queries()));
            report
        }
        ProtocolConfig::Uniformity {
            k,
            epsilon,
            degree_cap,
            distribution,
            waive_constraint,
            adversary,
        } => {
            stream_prover(adversary).ok_or_else(|| unknown_adversary(adversary))?;
            let params = if *waive_constraint {
                UniformityParams::mechanics(*k, *epsilon, *degree_cap)?
            } else {
                UniformityParams::new(*k, *epsilon, *degree_cap)?
            };
            let ip = UniformityIp::new(params.clone());
            let source = InstanceSource::fixed(Instance::Classical(distribution.probabilities(*k)));
            let trials = batch(&ip, || stream_prover(adversary).expect("checked"), &source, config)?;
            let mut report = assemble(config, &ip, &trials, uniformity_judge(*epsilon));
            report.formulas = formulas::uniformity(*k, *epsilon, &params);
            let stat_max = |key: &str| trials.iter().filter_map(|t| t.result.stats.get(key)).fold(0.0f64, |a, &b| a.max(b));
            report.formulas.push(FormulaCheck::at_most(
                "peak verifier field elements",
                params.max_field_elements() as f64,
                stat_max("peak_field_elements"),
            ));
            let first_attempt = trials
                .iter()
                .filter(|t| t.result.stats.get("restarts") == Some(&0.0))
                .filter_map(|t| t.result.stats.get("communication_field_elements"))
                .fold(0.0f64, |a, &b| a.max(b));
            report.formulas.push(FormulaCheck::at_most(
                "prover field elements without widening",
                params.communication(params.degree_cap) as f64,
                first_attempt,
            ));
            report.extra = Some(serde_json::json!({ "params": params }));
            report
        }
        ProtocolConfig::Nogo { d, delta, mask_ensemble } => {
            let params = purity_params(*delta, *d)?;
            let ip = PurityIp::new(params.clone(), *mask_ensemble)?;
            let task = purity_task(*d);
            let dist = build_nogo_distinguisher(
                &ip,
                || Box::new(HonestPurityProver) as Box<dyn PurityProver>,
                &task,
                |o| *o == PurityAnswer::MaximallyMixed,
                ip.channel_kind(),
            );
            let nogo = dist.evaluate(&task, config.trials, config.seed)?;
            let rows = nogo
                .runs
                .iter()
                .enumerate()
                .flat_map(|(i, r)| {
                    let row = |offset: usize, run: &qip::harness::NogoRun, correct: bool, label: &str| TrialRow {
                        index: 2 * i + offset,
                        seed: r.seed,
                        prover: "honest(simulated on the accept instance)".into(),
                        verdict: format!("{label}: {}", if run.accept { "accept" } else { "reject" }),
                        valid: Some(correct),
                        verifier_queries: run.queries,
                        prover_queries: 0,
                        bits_c: 0,
                        qudits_q: 0,
                        peak_live_copies: 0,
                        stats: Default::default(),
                        attachments: Default::default(),
                        transcript: None,
                    };
                    [
                        row(0, &r.on_accept, r.on_accept.accept, "accept instance"),
                        row(1, &r.on_reject, !r.on_reject.accept, "reject instance"),
                    ]
                })
                .collect();
            let mut report = Report::new(config, "nogo", rows, None);
            report.formulas = formulas::purity(*delta, *d, &params);
            report.formulas.push(FormulaCheck::equal(
                "D meters equal the wrapped verifier's",
                1.0,
                f64::from(u8::from(nogo.meters_match)),
            ));
            report.extra = Some(serde_json::json!({
                "task": nogo.task,
                "accept_success": nogo.accept_success,
                "reject_success": nogo.reject_success,
                "meters_match": nogo.meters_match,
            }));
            report
        }
        ProtocolConfig::Trivial {
            n,
            epsilon,
            delta,
            spread,
            exact_decider,
            solver,
        } => {
            let params = StabParams::new(*epsilon, *delta, *n, config.mode)?;
            let decider = StabilizerDecider {
                params: params.clone(),
                exact: *exact_decider,
            };
            let cost = if *exact_decider { 0 } else { params.verifier_queries() };
            let ip = trivial_validation_ip(decider);
            let source = stab_source(*n, *spread)?;
            let eps = *epsilon;
            let judge = move |inst: &Instance, out: &StabilizerStateDesc| inst.state().is_some_and(|rho| stab_valid(rho, out, eps));
            let (s, p) = (*solver, params.clone());
            let make = move || -> Box<dyn Solver<StabilizerStateDesc>> {
                match s {
                    SolverName::BruteForce => Box::new(BruteForceSolver { params: p.clone() }),
                    SolverName::Garbage => Box::new(GarbageSolver { params: p.clone() }),
                }
            };
            let trials = batch(&ip, make, &source, config)?;
            let mut report = assemble(config, &ip, &trials, judge);
            report.formulas.push(max_verifier_within(&trials, cost));
            report
        }
    };
    report.wall_time = start.elapsed();
    Ok(report)
}

fn stab_source(n: usize, spread: f64) -> Result<InstanceSource, RunError> {
    if !(0.0..=1.0).contains(&spread) {
        return Err(RunError::Config(ConfigError::Value {
            key: "spread".into(),
            reason: "expected 0 <= spread <= 1".into(),
        }));
    }
    Ok(InstanceSource::sampled(move |rng| {
        Instance::Quantum(near_stabilizer_state(n, spread, rng).expect("n checked").to_density())
    }))
}

fn max_verifier_within<O>(trials: &[Trial<O>], budget: u64) -> FormulaCheck {
    let max = trials.iter().map(|t| t.result.meter.queries(Party::Verifier)).max().unwrap_or(0);
    FormulaCheck::at_most("max verifier queries within budget", budget as f64, max as f64)
}

/// Runs the batch with the config's trial count, seed and transcript flag.
pub fn batch<P, F>(ip: &P, make: F, source: &InstanceSource, config: &ExperimentConfig) -> Result<Vec<Trial<P::Output>>, RunError>
where
    P: Protocol,
    F: Fn() -> Box<P::Prover> + Sync,
{
    let mut options = BatchOptions::new(config.trials, config.seed, ip.channel_kind());
    options.record_transcripts = config.transcripts;
    Ok(run_batch(ip, make, source, options)?)
}

/// Builds per-trial rows, rates and transcript files for a finished batch.
pub fn assemble<P, J>(config: &ExperimentConfig, ip: &P, trials: &[Trial<P::Output>], judge: J) -> Report
where
    P: Protocol,
    P::Output: Summary,
    J: Fn(&Instance, &P::Output) -> bool,
{
    let mut files = Vec::new();
    let rows = trials
        .iter()
        .map(|t| {
            let r = &t.result;
            let transcript = r.transcript.as_ref().map(|records| {
                let bytes = transcript_lines(records);
                let file = format!("{TRANSCRIPT_DIR}/trial_{:05}.jsonl", t.index);
                let digest = sha256_hex(&bytes);
                files.push((file.clone(), bytes));
                TranscriptRef { file, digest }
            });
            TrialRow {
                index: t.index,
                seed: r.seed,
                prover: r.prover.clone(),
                verdict: r.verdict.label(),
                valid: r.verdict.output().map(|o| judge(&t.instance, o)),
                verifier_queries: r.meter.queries(Party::Verifier),
                prover_queries: r.meter.queries(Party::Prover),
                bits_c: r.channel.classical_bits(),
                qudits_q: r.channel.qudits(),
                peak_live_copies: r.peak_live_copies,
                stats: r.stats.clone(),
                attachments: r.attachments.clone(),
                transcript,
            }
        })
        .collect();
    let mut report = Report::new(config, ip.name(), rows, Some(rates(trials, &judge)));
    report.transcript_files = files;
    report
}

/// Mode string for logs.
pub fn mode_name(mode: Mode) -> &'static str {
    match mode {
        Mode::Ideal => "ideal",
        Mode::Sampled => "sampled",
    }
}
