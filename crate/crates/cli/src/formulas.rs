//! Parameter formulas recomputed from the config, independently of the
//! protocol modules, for the report's comparison block.

use qip::harness::Mode;
use qip::lowrank::{LowRankParams, Variant};
use qip::purity::PurityParams;
use qip::stab::{stabilizer_count, StabParams};
use qip::stream::UniformityParams;
use qip::tomo::TomoParams;

use crate::report::FormulaCheck;

fn ceil(x: f64) -> f64 {
    x.ceil()
}

pub fn purity(delta: f64, d: usize, p: &PurityParams) -> Vec<FormulaCheck> {
    let rounds = ceil((72.0 * (6.0 / delta).ln()).max(4.0 * (2.0 / delta).log2()));
    let delta_tilde = delta / (2.0 * rounds);
    let budget_d = match p.rule {
        qip::purity::CopyRule::DimensionAware => d as f64,
        qip::purity::CopyRule::DimensionFree => 2.0,
    };
    let copies = 2.0 * ceil(-delta_tilde.ln() / (2.0 * budget_d / (budget_d + 1.0)).ln());
    vec![
        FormulaCheck::equal("rounds N", rounds, p.rounds as f64),
        FormulaCheck::equal("delta_tilde", delta_tilde, p.delta_tilde),
        FormulaCheck::equal("copies per round m", copies, p.copies as f64),
    ]
}

pub fn tomo(epsilon: f64, delta: f64, d: usize, rank: Option<usize>, c_v: f64, c_p: f64, p: &TomoParams) -> Vec<FormulaCheck> {
    let log = (2.0 / delta).ln();
    let v_size = rank.unwrap_or(d) as f64;
    let p_size = rank.map_or((d * d) as f64, |k| (k * d) as f64);
    let target = 0.99 * epsilon;
    vec![
        FormulaCheck::equal(
            "verifier budget",
            ceil(c_v * v_size * log / (epsilon * epsilon)),
            p.verifier_queries() as f64,
        ),
        FormulaCheck::equal(
            "prover budget at 0.99 epsilon",
            ceil(c_p * p_size * log / (target * target)),
            p.prover_queries(target) as f64,
        ),
    ]
}

pub fn lowrank(epsilon: f64, delta: f64, d: usize, k: usize, variant: Variant, p: &LowRankParams) -> Vec<FormulaCheck> {
    let run = if variant == Variant::State { epsilon / 2.0 } else { epsilon };
    let kf = k as f64;
    let eps1 = run / 10.0;
    let eps2 = run * run / (96.0 * kf);
    let f = (6.0 * kf * eps2).sqrt() + 2.0 * eps1 + eps2;
    let dt = delta / 5.0;
    let log = (1.0 / dt).ln();
    let pairs = ceil(log / (eps1 * eps1));
    let topk = ceil(kf * kf * log / (eps1 * eps1));
    let shots = ceil((2.0 / dt).ln() / (2.0 * eps2 * eps2));
    let prover = match variant {
        Variant::Wide => ceil(d as f64 * kf.powi(5) * log / (run * run)),
        _ => ceil((d * d) as f64 * log / (eps2 * eps2)),
    };
    vec![
        FormulaCheck::equal("eps1", eps1, p.eps1),
        FormulaCheck::equal("eps2", eps2, p.eps2),
        FormulaCheck::equal("slack f", f, p.f),
        FormulaCheck::equal("delta_tilde", dt, p.delta_tilde),
        FormulaCheck::equal("verifier budget", 2.0 * pairs + topk + 2.0 * shots, p.verifier_queries() as f64),
        FormulaCheck::equal("prover budget", prover, p.prover_queries() as f64),
    ]
}

pub fn stab(epsilon: f64, delta: f64, n: usize, p: &StabParams) -> Vec<FormulaCheck> {
    let (e1, e2, e3) = (epsilon / 5.0, epsilon / 5.0, 3.0 * epsilon / 20.0);
    let di = delta / 3.0;
    let samples = ceil(2.0 * (2.0 / di).ln() / (e3 * e3));
    let loss = ceil((2.0 / di).ln() / (2.0 * e2 * e2));
    let candidates = stabilizer_count(n) as f64;
    let half = e1 / 2.0;
    let prover = candidates * ceil((2.0 * candidates / di).ln() / (2.0 * half * half));
    vec![
        FormulaCheck::equal("eps1", e1, p.eps1),
        FormulaCheck::equal("eps2", e2, p.eps2),
        FormulaCheck::equal("eps3", e3, p.eps3),
        FormulaCheck::equal("A3 samples", samples, p.a3_samples() as f64),
        FormulaCheck::equal("verifier budget", loss + 6.0 * samples, p.verifier_queries() as f64),
        FormulaCheck::equal("prover budget", prover, p.prover_queries() as f64),
    ]
}

pub fn uniformity(k: usize, epsilon: f64, p: &UniformityParams) -> Vec<FormulaCheck> {
    let kf = k as f64;
    let n = ceil(140.0 * kf.sqrt() / (epsilon * epsilon));
    let tau = (1.0 - 1.0 / kf).powf(n - 1.0) - n * epsilon * epsilon / (8.0 * kf);
    let b = kf.log2();
    let d = p.degree_cap as f64;
    vec![
        FormulaCheck::equal("samples n", n, p.n as f64),
        // powf and exp(ln_1p) agree to a few ulps, not bit for bit.
        FormulaCheck::at_most("|tau - recomputed|", 1e-12, (tau - p.tau).abs()),
        FormulaCheck::at_most("|n tau - recomputed|", 1e-7, (n * tau - p.threshold_count).abs()),
        FormulaCheck::equal("memory bound 4b+16", 4.0 * b + 16.0, p.max_field_elements() as f64),
        FormulaCheck::equal(
            "communication at the initial cap",
            1.0 + b * (2.0 * d + 5.0),
            p.communication(p.degree_cap) as f64,
        ),
    ]
}

/// Mode-dependent note for budgets that are charged only in ideal mode.
pub fn charged_by_formula(mode: Mode) -> bool {
    mode == Mode::Ideal
}
