use super::*;
use crate::harness::{rates, run_batch, trivial_validation_ip, BatchOptions, Instance, InstanceSource, Party, TrivialIp};
use crate::measure::bell_difference_distribution;
use crate::rng::rng_from_seed;
use proptest::prelude::*;
use rand::Rng;
use std::f64::consts::FRAC_PI_4;
use std::sync::Arc;

fn t_state() -> PureState {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    PureState::new(vec![C64::new(h, 0.0), C64::from_polar(h, FRAC_PI_4)]).unwrap()
}

fn oracle(party: Party, psi: &PureState) -> CopyOracle {
    CopyOracle::standalone(party, Arc::new(Instance::Quantum(psi.to_density())))
}

fn params(n: usize, mode: Mode) -> StabParams {
    StabParams::new(0.4, 1.0 / 3.0, n, mode).unwrap()
}

fn instances(n: usize) -> InstanceSource {
    near_instances(n, 0.6)
}

fn near_instances(n: usize, spread: f64) -> InstanceSource {
    InstanceSource::sampled(move |rng| Instance::Quantum(near_stabilizer_state(n, spread, rng).unwrap().to_density()))
}

#[test]
fn a3_examples() {
    for n in 1..=4 {
        let zero = PureState::basis(1 << n, 0);
        assert!((exact_a3(&zero).unwrap() - 1.0).abs() < 1e-12);
    }
    assert!((exact_a3(&t_state()).unwrap() - 0.625).abs() < 1e-12);
    let mut rng = rng_from_seed(1);
    for n in 1..=4 {
        let mean: f64 = (0..20).map(|_| exact_a3(&sample_haar_state(1 << n, &mut rng)).unwrap()).sum::<f64>() / 20.0;
        assert!(mean > 0.0 && mean <= 1.0);
    }
    let low = |n: usize, rng: &mut SimRng| (0..20).map(|_| exact_a3(&sample_haar_state(1 << n, rng)).unwrap()).sum::<f64>();
    assert!(low(4, &mut rng) < low(1, &mut rng));
    assert!(exact_a3(&PureState::basis(1 << 7, 0)).is_err());
}

#[test]
fn bound_examples() {
    assert_eq!(stab_bounds(1.0), (0.0, 0.0));
    let (ub, lb) = stab_bounds(0.625);
    assert!((ub - 0.5).abs() < 1e-15);
    assert!((lb - 0.07535).abs() < 1e-5);
    assert!((ub / lb - 6.64).abs() < 0.01);
    for i in 1..1000 {
        let (ub, lb) = stab_bounds(i as f64 / 1000.0);
        assert!(ub / lb <= 8.0 + 1e-9, "a = {}", i as f64 / 1000.0);
    }
}

#[test]
fn enumeration_counts() {
    for (n, want) in [(1, 6), (2, 60), (3, 1080), (4, 36720)] {
        assert_eq!(stabilizer_count(n), want);
        assert_eq!(enumerate_stabilizers(n).unwrap().len() as u64, want);
    }
    assert!(enumerate_stabilizers(0).is_err());
    assert!(enumerate_stabilizers(5).is_err());
}

#[test]
fn two_qubit_states_are_distinct_with_expected_overlaps() {
    let all = enumerate_stabilizers(2).unwrap();
    for (i, a) in all.iter().enumerate() {
        for (j, b) in all.iter().enumerate() {
            let f = a.fidelity(b.dense());
            let nearest = [0.0, 0.25, 0.5, 1.0].into_iter().fold(f64::INFINITY, |m, v| m.min((f - v).abs()));
            assert!(nearest < 1e-9, "fidelity {f}");
            assert_eq!((f - 1.0).abs() < 1e-9, i == j);
        }
    }
}

#[test]
fn rendering_is_a_joint_eigenstate() {
    for n in 1..=3 {
        for s in enumerate_stabilizers(n).unwrap() {
            for g in s.generators() {
                let v = s.dense().amplitudes();
                assert!((g.apply(v) - v).norm() < 1e-9);
            }
            let back = StabilizerStateDesc::from_tableau(&s.tableau()).unwrap();
            assert_eq!(&back, s);
        }
    }
}

#[test]
fn invalid_generators_are_rejected() {
    let p = |s: &str, negative: bool| SignedPauli {
        label: PauliLabel::parse(s).unwrap(),
        negative,
    };
    assert!(StabilizerStateDesc::from_generators(2, vec![p("XI", false), p("ZI", false)]).is_err());
    assert!(StabilizerStateDesc::from_generators(2, vec![p("ZZ", false), p("ZZ", true)]).is_err());
    assert!(StabilizerStateDesc::from_generators(2, vec![p("ZI", false)]).is_err());
    assert!(StabilizerStateDesc::from_generators(2, vec![p("ZI", false), p("Z", false)]).is_err());
    let bell = StabilizerStateDesc::from_generators(2, vec![p("XX", false), p("ZZ", false)]).unwrap();
    assert!((bell.dense().amplitudes()[0].re - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
    assert!(StabilizerStateDesc::from_tableau(&[vec![0, 1, 0], vec![1, 0, 0]]).is_err());
}

#[test]
fn primitive_mean_is_affine_in_a3() {
    let mut rng = rng_from_seed(2);
    for i in 0..20 {
        let n = 1 + i % 2;
        let psi = sample_haar_state(1 << n, &mut rng);
        let q = bell_difference_distribution(&psi).unwrap();
        let e = pauli_expectations(&psi).unwrap();
        let mean: f64 = q.iter().zip(&e).map(|(q, e)| q * (1.0 + e * e) / 2.0).sum();
        let a3 = exact_a3(&psi).unwrap();
        assert!((mean - primitive_mean(a3)).abs() < 1e-12);
        assert!((a3_from_primitive_mean(mean) - a3).abs() < 1e-12);
    }
}

#[test]
fn sampled_a3_examples() {
    let p = StabParams::new(0.4, 1.0 / 3.0, 2, Mode::Sampled).unwrap();
    assert!((p.eps3 - 0.06).abs() < 1e-15);
    assert!((p.delta3 - 1.0 / 9.0).abs() < 1e-15);
    let raw = 2.0 * 18.0f64.ln() / 0.0036;
    assert_eq!(p.a3_samples(), raw.ceil() as u64);
    assert_eq!(p.a3_samples(), 1606);
    assert_eq!(p.a3_copies(), 6 * 1606);
    let mut rng = rng_from_seed(3);
    for (psi, want) in [(PureState::basis(4, 0), 1.0), (t_state(), 0.625)] {
        let hits = (0..100)
            .filter(|_| (sampled_a3(&psi, p.a3_samples(), &mut rng).unwrap() - want).abs() <= p.eps3)
            .count();
        assert!(hits as f64 / 100.0 >= 1.0 - p.delta3, "{want}: {hits}");
    }
}

#[test]
fn a3_calibration_on_random_states() {
    let p = StabParams::new(0.4, 1.0 / 3.0, 2, Mode::Sampled).unwrap();
    let mut rng = rng_from_seed(4);
    let hits = (0..50)
        .filter(|_| {
            let psi = sample_haar_state(4, &mut rng);
            (sampled_a3(&psi, p.a3_samples(), &mut rng).unwrap() - exact_a3(&psi).unwrap()).abs() <= p.eps3
        })
        .count();
    assert!(hits as f64 / 50.0 >= 1.0 - p.delta3 - 0.05, "{hits}");
}

#[test]
fn brute_force_examples() {
    let mut rng = rng_from_seed(5);
    let s = &enumerate_stabilizers(3).unwrap()[700];
    let got = brute_force_best_stabilizer(&oracle(Party::Prover, s.dense()), &params(3, Mode::Ideal), &mut rng).unwrap();
    assert!((1.0 - got.fidelity(s.dense())).abs() < 1e-12);

    let t = t_state();
    let o = oracle(Party::Prover, &t);
    let p = params(1, Mode::Ideal);
    let got = brute_force_best_stabilizer(&o, &p, &mut rng).unwrap();
    assert!((got.fidelity(&t) - (2.0 + 2.0f64.sqrt()) / 4.0).abs() < 1e-12);
    assert!((optimal_stab_loss(&t).unwrap() - 0.1464).abs() < 1e-4);
    assert_eq!(o.meter().queries(Party::Prover), p.prover_queries());

    for _ in 0..20 {
        let psi = sample_haar_state(4, &mut rng);
        let exhaustive = enumerate_stabilizers(2)
            .unwrap()
            .iter()
            .map(|s| 1.0 - s.fidelity(&psi))
            .fold(f64::INFINITY, f64::min);
        let ideal = brute_force_best_stabilizer(&oracle(Party::Prover, &psi), &params(2, Mode::Ideal), &mut rng).unwrap();
        assert!((1.0 - ideal.fidelity(&psi) - exhaustive).abs() < 1e-12);
        let sp = params(2, Mode::Sampled);
        let sampled = brute_force_best_stabilizer(&oracle(Party::Prover, &psi), &sp, &mut rng).unwrap();
        assert!(1.0 - sampled.fidelity(&psi) <= exhaustive + sp.eps1);
    }
    assert!(brute_force_best_stabilizer(&oracle(Party::Prover, &t), &params(2, Mode::Ideal), &mut rng).is_err());
}

#[test]
fn loss_estimate_examples() {
    assert_eq!(loss_shots(0.1, 1.0 / 9.0), 145);
    assert_eq!(params(3, Mode::Ideal).loss_shots(), loss_shots(0.08, 1.0 / 9.0));
    let mut rng = rng_from_seed(6);
    let all = enumerate_stabilizers(2).unwrap();
    let s = &all[5];
    let orth = all.iter().find(|t| t.fidelity(s.dense()) < 1e-12).unwrap();
    let o = oracle(Party::Verifier, s.dense());
    assert_eq!(estimate_stab_loss(&o, s, 145, &mut rng).unwrap(), 0.0);
    assert_eq!(estimate_stab_loss(&o, orth, 145, &mut rng).unwrap(), 1.0);
    assert_eq!(o.meter().queries(Party::Verifier), 290);

    let psi = near_stabilizer_state(2, 0.8, &mut rng).unwrap();
    let exact = 1.0 - all[17].fidelity(&psi);
    let o = oracle(Party::Verifier, &psi);
    let hits = (0..200)
        .filter(|_| (estimate_stab_loss(&o, &all[17], 145, &mut rng).unwrap() - exact).abs() <= 0.1)
        .count();
    assert!(hits as f64 / 200.0 >= 1.0 - 1.0 / 9.0);
}

#[test]
fn verdict_examples() {
    let s = enumerate_stabilizers(1).unwrap()[0].clone();
    for eps in [0.01, 0.4, 0.9] {
        assert!(stab_verdict(0.0, 1.0, eps, s.clone()).is_accepted());
    }
    assert!(!stab_accepts(1.0, 1.0, 0.4));
    assert!(stab_accepts(1.0, 0.0, 0.01));
    assert_eq!(certified_bound(0.0), 1.0);
    assert!((certified_bound(0.625) - 0.5).abs() < 1e-15);
}

#[test]
fn sandwich_bound_on_random_states() {
    let mut rng = rng_from_seed(7);
    for i in 0..200 {
        let n = 2 + i % 2;
        let psi = if i % 4 < 2 {
            sample_haar_state(1 << n, &mut rng)
        } else {
            near_stabilizer_state(n, 0.5, &mut rng).unwrap()
        };
        let opt = optimal_stab_loss(&psi).unwrap();
        let (ub, lb) = stab_bounds(exact_a3(&psi).unwrap());
        assert!(opt - lb >= -1e-9 && ub - opt >= -1e-9, "lb {lb} opt {opt} ub {ub}");
    }
}

#[test]
fn soundness_chain_with_exact_estimates() {
    let mut rng = rng_from_seed(8);
    let mut accepted = 0;
    for i in 0..300 {
        let n = 1 + i % 3;
        let psi = near_stabilizer_state(n, 1.0, &mut rng).unwrap();
        let opt = optimal_stab_loss(&psi).unwrap();
        let a3 = exact_a3(&psi).unwrap();
        let eps = rng.random_range(0.01..0.99);
        for s in enumerate_stabilizers(n).unwrap().iter().step_by(7) {
            let loss = 1.0 - s.fidelity(&psi);
            if stab_accepts(loss, a3, eps) {
                accepted += 1;
                assert!(loss <= 8.0 * opt + eps + 1e-12);
            }
        }
    }
    assert!(accepted > 1000);
}

#[test]
fn ideal_sessions() {
    let p = params(3, Mode::Ideal);
    let ip = StabIp::new(p.clone());
    let source = instances(3);
    let judge = |inst: &Instance, out: &StabilizerStateDesc| stab_valid(inst.state().unwrap(), out, p.epsilon);
    let honest = run_batch(
        &ip,
        || Box::new(HonestStabProver) as Box<dyn StabProver>,
        &source,
        BatchOptions::new(200, 31, ChannelKind::Quantum),
    )
    .unwrap();
    let r = rates(&honest, judge);
    assert!(r.accept_and_valid.rate >= 2.0 / 3.0, "{:?}", r.accept_and_valid);
    assert!(honest.iter().all(|t| t.result.peak_live_copies <= 1));
    assert!(honest.iter().all(|t| t.result.meter.queries(Party::Verifier) == p.verifier_queries()));
    for name in STAB_ADVERSARIES {
        let trials = run_batch(
            &ip,
            || stab_prover(name).unwrap(),
            &source,
            BatchOptions::new(200, 32, ChannelKind::Quantum),
        )
        .unwrap();
        let r = rates(&trials, judge);
        assert!(r.accept_and_invalid.rate < 1.0 / 3.0, "{name}: {:?}", r.accept_and_invalid);
    }
}

#[test]
fn sampled_sessions() {
    let p = params(2, Mode::Sampled);
    let ip = StabIp::new(p.clone());
    let judge = |inst: &Instance, out: &StabilizerStateDesc| stab_valid(inst.state().unwrap(), out, p.epsilon);
    let honest = run_batch(
        &ip,
        || Box::new(HonestStabProver) as Box<dyn StabProver>,
        &instances(2),
        BatchOptions::new(60, 33, ChannelKind::Quantum),
    )
    .unwrap();
    assert!(rates(&honest, judge).accept_and_valid.rate >= 2.0 / 3.0);
    assert!(honest.iter().all(|t| t.result.meter.queries(Party::Verifier) == p.verifier_queries()));
    let worst = run_batch(
        &ip,
        || stab_prover("worst_stabilizer").unwrap(),
        &instances(2),
        BatchOptions::new(60, 34, ChannelKind::Quantum),
    )
    .unwrap();
    assert!(rates(&worst, judge).accept_and_invalid.rate < 1.0 / 3.0);
}

#[test]
fn trivial_ip_with_stabilizer_checker() {
    let p = params(2, Mode::Ideal);
    let ideal: TrivialIp<StabilizerDecider> = trivial_validation_ip(StabilizerDecider {
        params: p.clone(),
        exact: false,
    });
    let judge = |inst: &Instance, out: &StabilizerStateDesc| stab_valid(inst.state().unwrap(), out, p.epsilon);
    let opts = BatchOptions::new(300, 35, ChannelKind::Classical);
    let solver = || Box::new(BruteForceSolver { params: p.clone() }) as Box<dyn Solver<StabilizerStateDesc>>;
    let honest = run_batch(&ideal, solver, &instances(2), opts).unwrap();
    let r = rates(&honest, judge);
    assert!(r.accept_and_valid.rate >= 1.0 - p.delta, "{:?}", r.accept_and_valid);
    assert!(honest.iter().all(|t| t.result.meter.queries(Party::Verifier) == p.verifier_queries()));
    assert!(honest.iter().all(|t| t.result.channel.qudits() == 0));

    let garbage = || Box::new(GarbageSolver { params: p.clone() }) as Box<dyn Solver<StabilizerStateDesc>>;
    let exact = trivial_validation_ip(StabilizerDecider {
        params: p.clone(),
        exact: true,
    });
    let trials = run_batch(&exact, garbage, &near_instances(2, 0.2), opts).unwrap();
    let r = rates(&trials, judge);
    assert!(r.abort.rate >= 1.0 - p.delta, "{:?}", r.abort);
    assert_eq!(r.accept_and_invalid.count, 0);
    assert!(trials.iter().all(|t| t.result.meter.queries(Party::Verifier) == 0));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn bounds_order_and_ratio(a in 0.0f64..1.0) {
        let (ub, lb) = stab_bounds(a);
        prop_assert!(lb <= ub + 1e-15);
        prop_assert!(lb <= 0.0 || ub / lb <= 8.0 + 1e-9);
    }

    #[test]
    fn tableau_round_trip(idx in 0usize..1080) {
        let s = &enumerate_stabilizers(3).unwrap()[idx];
        let t = s.tableau();
        prop_assert_eq!(t.len(), 3);
        prop_assert!(t.iter().all(|r| r.len() == 7));
        prop_assert_eq!(&StabilizerStateDesc::from_tableau(&t).unwrap(), s);
    }

    #[test]
    fn accepted_with_exact_estimates_is_valid(seed in any::<u64>(), eps in 0.05f64..0.95) {
        let mut rng = rng_from_seed(seed);
        let psi = near_stabilizer_state(2, 1.0, &mut rng).unwrap();
        let s = &enumerate_stabilizers(2).unwrap()[seed as usize % 60];
        let loss = 1.0 - s.fidelity(&psi);
        if stab_accepts(loss, exact_a3(&psi).unwrap(), eps) {
            prop_assert!(stab_valid(&psi.to_density(), s, eps));
        }
    }
}
