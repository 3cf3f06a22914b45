//! Full-size uniformity sessions at `k = 2¹⁶`, `ε = 0.75`.

use qip::harness::{rates, run_batch, BatchOptions, ChannelKind, Instance, InstanceSource};
use qip::stream::*;

const K: usize = 1 << 16;

fn run(prover: &str, dist: Vec<f64>, trials: usize, seed: u64) -> (UniformityParams, Vec<qip::harness::Trial<UniformityDecision>>) {
    let p = UniformityParams::new(K, 0.75, DEFAULT_DEGREE_CAP).unwrap();
    let ip = UniformityIp::new(p.clone());
    let source = InstanceSource::fixed(Instance::Classical(dist));
    let out = run_batch(
        &ip,
        || stream_prover(prover).unwrap(),
        &source,
        BatchOptions::new(trials, seed, ChannelKind::Classical),
    )
    .unwrap();
    (p, out)
}

#[test]
fn honest_prover_on_both_sides_of_the_gap() {
    let (p, uniform) = run("honest", vec![1.0 / K as f64; K], 6, 11);
    let judge = uniformity_judge(p.epsilon);
    assert_eq!(rates(&uniform, &judge).accept_and_valid.count, 6);
    for t in &uniform {
        assert_eq!(t.result.verdict.output(), Some(&UniformityDecision::Uniform));
        assert!(t.result.stats["peak_field_elements"] <= p.max_field_elements() as f64);
        assert_eq!(t.result.stats["communication_field_elements"], p.communication(DEFAULT_DEGREE_CAP) as f64);
        assert!(p.communication(DEFAULT_DEGREE_CAP) <= 1_200);
        assert_eq!(t.result.channel.qudits(), 0);
        let a = &t.result.attachments;
        assert_eq!(a["unique_rounds"].len(), p.b * (DEFAULT_DEGREE_CAP + 2));
        assert_eq!(a["range_rounds"].len(), p.b * (DEFAULT_DEGREE_CAP + 3));
        assert_eq!(a["unique_challenges"].len(), p.b - 1);
        assert_eq!(a["unique_claim"], vec![t.result.stats["unique_count"] as u64]);
    }
    let (_, far) = run("honest", support_fraction(K, 0.125), 6, 12);
    assert!(far.iter().all(|t| t.result.verdict.output() == Some(&UniformityDecision::NotUniform)));
}

#[test]
fn lying_provers_are_caught() {
    for name in ["flip", "plus_one"] {
        let (_, trials) = run(name, vec![1.0 / K as f64; K], 3, 13);
        assert!(trials.iter().all(|t| !t.result.verdict.is_accepted()), "{name}");
    }
    let (_, point) = run("honest", point_mass(K), 2, 14);
    assert!(point.iter().all(|t| t.result.verdict.output() == Some(&UniformityDecision::NotUniform)));
    let (_, hidden) = run("hide_cap", point_mass(K), 2, 15);
    assert!(hidden.iter().all(|t| !t.result.verdict.is_accepted()));
}
