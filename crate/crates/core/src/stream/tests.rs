use super::sumcheck::lagrange_h_eval;
use super::*;
use crate::harness::{rates, run_batch, BatchOptions, InstanceSource, Party};
use crate::rng::rng_from_seed;
use proptest::prelude::*;
use rand::Rng;

fn freq_of(k: usize, stream: &[usize]) -> Vec<u64> {
    let mut f = vec![0; k];
    for &x in stream {
        f[x] += 1;
    }
    f
}

#[test]
fn parameter_examples() {
    let p = UniformityParams::new(1 << 16, 0.75, DEFAULT_DEGREE_CAP).unwrap();
    assert_eq!(p.n, 63_716);
    assert_eq!(p.b, 16);
    let first = (63_715.0 * (1.0 - 1.0 / 65_536.0f64).ln()).exp();
    assert!((first - 0.378_242).abs() < 1e-6);
    assert!((p.tau - (first - 63_716.0 * 0.5625 / 524_288.0)).abs() < 1e-15);
    assert!((p.tau - 0.30988).abs() < 1e-5);
    assert!((p.threshold_count - 19_743.0).abs() / 19_743.0 < 1e-4);
    assert!(!p.constraint_waived);
    assert!(UniformityParams::new(1 << 16, 0.74, 32).is_err());
    assert!(UniformityParams::new(1 << 8, 0.75, 32).is_err());
    assert!(UniformityParams::mechanics(1 << 8, 0.75, 32).unwrap().constraint_waived);
    assert!(UniformityParams::mechanics(100, 0.75, 32).is_err());
    assert!(UniformityParams::mechanics(1 << 8, 0.75, 0).is_err());
    assert!(p.communication(32) <= 1_200);
    assert_eq!(p.max_field_elements(), 80);
}

#[test]
fn streaming_point_updates() {
    let mut rng = rng_from_seed(1);
    let empty = StreamVerifierState::new(8, &mut rng);
    assert_eq!(empty.a_tilde_at_r, Fq::ZERO);

    let mut zero = StreamVerifierState::new(4, &mut rng);
    zero.r = vec![Fq::ZERO; 4];
    zero.update(0).unwrap();
    assert_eq!(zero.a_tilde_at_r, Fq::ONE);
    assert!(zero.update(16).is_err());

    let mut state = StreamVerifierState::new(8, &mut rng);
    let stream = random_stream(256, 1000, &mut rng);
    for &x in &stream {
        state.update(x).unwrap();
    }
    let freq = freq_of(256, &stream);
    assert_eq!(state.a_tilde_at_r, multilinear_eval(&freq, &state.r));
    assert_eq!(state.a_tilde_at_r_range, multilinear_eval(&freq, &state.r_range));
    assert_eq!(state.sample_count, 1000);
    assert!(state.memory.peak() <= 4 * 8 + 16);
}

#[test]
fn interpolation_examples() {
    let h: Vec<Fq> = (0..=4).map(|j| if j == 1 { Fq::ONE } else { Fq::ZERO }).collect();
    assert_eq!(lagrange_h_eval(&h, Fq::ONE), Fq::ONE);
    assert_eq!(lagrange_h_eval(&h, Fq::new(3)), Fq::ZERO);
    // Naive Lagrange sum at t = 7.
    let t = Fq::new(7);
    let mut naive = Fq::ZERO;
    for (i, &hi) in h.iter().enumerate() {
        let mut term = hi;
        for l in 0..h.len() {
            if l != i {
                term = term * (t - Fq::new(l as u64)) * (Fq::from_i64(i as i64 - l as i64)).inverse();
            }
        }
        naive += term;
    }
    assert_eq!(lagrange_h_eval(&h, t), naive);
    // The closed form h̃(7) = Π_{l≠1}(7 - l) / Π_{l≠1}(1 - l) = (7·5·4·3)/(1·(-1)(-2)(-3)) = -70.
    assert_eq!(naive, Fq::from_i64(-70));
    let mut rng = rng_from_seed(2);
    for cap in [1, 4, 32] {
        let coeffs = unique_indicator_coeffs(cap);
        for _ in 0..10 {
            let t = Fq::random(&mut rng);
            assert_eq!(horner(&coeffs, t), unique_indicator_eval(cap, t));
        }
        let v = vanishing_coeffs(cap);
        assert!((0..=cap as u64).all(|j| horner(&v, Fq::new(j)) == Fq::ZERO));
        assert_ne!(horner(&v, Fq::new(cap as u64 + 1)), Fq::ZERO);
    }
}

#[test]
fn honest_totals_match_brute_force() {
    let mut rng = rng_from_seed(3);
    for trial in 0..100 {
        let samples = rng.random_range(0..600);
        let stream = random_stream(256, samples, &mut rng);
        let freq = freq_of(256, &stream);
        let cap = 32;
        let z = unique_count(&freq);
        let unique = honest_unique_prover(&freq, cap);
        assert_eq!(unique.total(), Fq::new(z), "trial {trial}");
        let mut unique = unique;
        let zeta: Vec<Fq> = (0..8).map(|_| Fq::random(&mut rng)).collect();
        assert_eq!(honest_range_prover(&freq, cap, &zeta).total(), Fq::ZERO);
        let build = |zeta: &[Fq]| Box::new(honest_range_prover(&freq, cap, zeta)) as Box<dyn SumcheckProver>;
        let (u, r) = offline_sumchecks(&freq, cap, Fq::new(z), &mut unique, Some(&build), &mut rng);
        assert!(u.is_verified() && r.is_verified(), "trial {trial}: {u:?} {r:?}");
    }
    let empty = vec![0u64; 16];
    let mut unique = honest_unique_prover(&empty, 4);
    let (u, _) = offline_sumchecks(&empty, 4, Fq::ZERO, &mut unique, None, &mut rng);
    assert!(u.is_verified());
}

#[test]
fn shifted_claims_are_rejected() {
    let mut rng = rng_from_seed(4);
    for _ in 0..10_000 {
        let stream = random_stream(16, 20, &mut rng);
        let freq = freq_of(16, &stream);
        let cap = freq.iter().copied().max().unwrap_or(1).max(6) as usize;
        let z = Fq::new(unique_count(&freq) + 1);
        let mut liar = ShiftingProver::new(honest_unique_prover(&freq, cap), z);
        let (u, _) = offline_sumchecks(&freq, cap, z, &mut liar, None, &mut rng);
        assert!(!u.is_verified());
    }
}

#[test]
fn range_certificate_examples() {
    let mut rng = rng_from_seed(5);
    let cap = 4;
    for _ in 0..10_000 {
        let mut freq = freq_of(16, &random_stream(16, 12, &mut rng));
        freq.iter_mut().for_each(|a| *a = (*a).min(cap as u64));
        freq[rng.random_range(0..16)] = cap as u64 + 1;
        // Above the cap the indicator interpolant is not the unique count.
        let mut unique = honest_unique_prover(&freq, cap);
        let z = unique.total();
        let liar = |zeta: &[Fq]| {
            let honest = honest_range_prover(&freq, cap, zeta);
            assert_ne!(honest.total(), Fq::ZERO);
            Box::new(ShiftingProver::new(honest, Fq::ZERO)) as Box<dyn SumcheckProver>
        };
        let (u, r) = offline_sumchecks(&freq, cap, z, &mut unique, Some(&liar), &mut rng);
        assert!(u.is_verified());
        assert!(!r.is_verified());
    }
    // With the cap at the stream length the certificate always holds.
    let freq = freq_of(16, &random_stream(16, 12, &mut rng));
    let mut unique = honest_unique_prover(&freq, 12);
    let honest = |zeta: &[Fq]| Box::new(honest_range_prover(&freq, 12, zeta)) as Box<dyn SumcheckProver>;
    let (u, r) = offline_sumchecks(&freq, 12, Fq::new(unique_count(&freq)), &mut unique, Some(&honest), &mut rng);
    assert!(u.is_verified() && r.is_verified());
}

#[test]
fn verdict_examples() {
    let ok = SumcheckOutcome::Verified;
    let bad = SumcheckOutcome::Rejected {
        round: 3,
        reason: "x".into(),
    };
    assert_eq!(
        uniformity_verdict(&ok, &ok, 24_000, 19_743.4),
        Verdict::Accepted(UniformityDecision::Uniform)
    );
    assert_eq!(
        uniformity_verdict(&ok, &ok, 27, 19_743.4),
        Verdict::Accepted(UniformityDecision::NotUniform)
    );
    assert!(!uniformity_verdict(&bad, &ok, 24_000, 19_743.4).is_accepted());
    assert!(!uniformity_verdict(&ok, &bad, 24_000, 19_743.4).is_accepted());
    let k = 1 << 16;
    let n = 63_716.0;
    assert!((n * (1.0 - 1.0 / k as f64).powf(n - 1.0) - 24_100.07).abs() < 0.01);
    assert!((n * (1.0 - 8.0 / k as f64).powf(n - 1.0) - 26.68).abs() < 0.01);
    assert!((distance_from_uniform(&support_fraction(k, 0.125)) - 0.875).abs() < 1e-12);
}

#[test]
fn mechanics_sessions() {
    let p = UniformityParams::mechanics(1 << 8, 0.75, DEFAULT_DEGREE_CAP).unwrap();
    let ip = UniformityIp::new(p.clone());
    let judge = uniformity_judge(p.epsilon);
    let uniform = InstanceSource::fixed(Instance::Classical(vec![1.0 / 256.0; 256]));
    let opts = BatchOptions::new(20, 41, ChannelKind::Classical);
    let honest = run_batch(&ip, || Box::new(HonestStreamProver::default()) as Box<dyn StreamProver>, &uniform, opts).unwrap();
    for t in &honest {
        assert!(t.result.verdict.is_accepted(), "{:?}", t.result.verdict);
        assert!(t.result.stats["peak_field_elements"] <= p.max_field_elements() as f64);
        assert_eq!(t.result.channel.qudits(), 0);
        let attempts = 1.0 + t.result.stats["restarts"];
        assert!(t.result.meter.queries(Party::Verifier) as f64 >= attempts * p.n as f64);
    }

    let point = InstanceSource::fixed(Instance::Classical(point_mass(256)));
    let trials = run_batch(&ip, || Box::new(HonestStreamProver::default()) as Box<dyn StreamProver>, &point, opts).unwrap();
    assert!(trials
        .iter()
        .all(|t| t.result.verdict == Verdict::Accepted(UniformityDecision::NotUniform)));
    assert_eq!(rates(&trials, &judge).accept_and_valid.count, 20);

    let hide = run_batch(&ip, || stream_prover("hide_cap").unwrap(), &point, opts).unwrap();
    assert!(hide.iter().all(|t| !t.result.verdict.is_accepted()));
    // At this size the honest count is near 0, so only a shifted claim lies.
    let plus_one = run_batch(&ip, || stream_prover("plus_one").unwrap(), &uniform, opts).unwrap();
    assert!(plus_one.iter().all(|t| !t.result.verdict.is_accepted()));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn sumcheck_total_is_unique_count(seed in any::<u64>(), samples in 0usize..80) {
        let mut rng = rng_from_seed(seed);
        let freq = freq_of(32, &random_stream(32, samples, &mut rng));
        let cap = freq.iter().copied().max().unwrap_or(0).max(1) as usize;
        prop_assert_eq!(honest_unique_prover(&freq, cap).total(), Fq::new(unique_count(&freq)));
        let mut unique = honest_unique_prover(&freq, cap);
        let (u, _) = offline_sumchecks(&freq, cap, Fq::new(unique_count(&freq)), &mut unique, None, &mut rng);
        prop_assert!(u.is_verified());
    }
}
