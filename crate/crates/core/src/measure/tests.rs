use super::*;
use crate::linalg::{sample_haar_state, sample_haar_unitary, sample_state, CVector, C64};
use crate::rng::rng_from_seed;
use proptest::prelude::*;
use std::collections::HashMap;

fn t_state() -> PureState {
    // cos(π/8)|0⟩ + sin(π/8)|1⟩, the +1 eigenstate of (X+Z)/√2.
    let a = (std::f64::consts::PI / 8.0).cos();
    let b = (std::f64::consts::PI / 8.0).sin();
    PureState::new(vec![C64::new(a, 0.0), C64::new(b, 0.0)]).unwrap()
}

fn three_sigma(p: f64, n: usize) -> f64 {
    3.0 * (p * (1.0 - p) / n as f64).sqrt().max(1e-12)
}

fn chi_square(counts: &[usize], probs: &[f64]) -> f64 {
    let n: usize = counts.iter().sum();
    counts
        .iter()
        .zip(probs)
        .map(|(&c, &p)| {
            let e = p * n as f64;
            (c as f64 - e).powi(2) / e
        })
        .sum()
}

#[test]
fn pauli_matrices_are_hermitian_involutions() {
    for idx in 0..16 {
        let l = PauliLabel::from_index(2, idx);
        let m = l.matrix();
        assert!(crate::linalg::hermitian_deviation(&m) < 1e-12);
        let sq = &m * &m;
        assert!(crate::linalg::max_abs(&(sq - CMatrix::identity(4, 4))) < 1e-12);
    }
    let y = PauliLabel::parse("Y").unwrap().matrix();
    assert_eq!(y[(0, 1)], C64::new(0.0, -1.0));
    assert_eq!(y[(1, 0)], C64::new(0.0, 1.0));
    assert_eq!(PauliLabel::parse("XZY").unwrap().to_string(), "XZY");
}

#[test]
fn apply_matches_matrix() {
    let mut rng = rng_from_seed(1);
    let psi = sample_haar_state(8, &mut rng);
    for idx in [0, 5, 17, 63] {
        let l = PauliLabel::from_index(3, idx);
        let a = l.apply(psi.amplitudes());
        let b = l.matrix() * psi.amplitudes();
        assert!((a - b).norm() < 1e-12);
    }
}

#[test]
fn basis_measurement_examples() {
    let mut rng = rng_from_seed(2);
    let zero = PureState::basis(2, 0).to_density();
    let id = UnitaryOp::identity(2);
    for _ in 0..100 {
        assert_eq!(measure_in_basis(&zero, &id, &mut rng).unwrap(), 0);
    }
    let mixed = DensityMatrix::maximally_mixed(4);
    let u = sample_haar_unitary(4, &mut rng);
    let mut counts = [0usize; 4];
    for _ in 0..100_000 {
        counts[measure_in_basis(&mixed, &u, &mut rng).unwrap()] += 1;
    }
    // χ²₃ critical value at level 0.01.
    assert!(chi_square(&counts, &[0.25; 4]) < 11.345);
    let rho = DensityMatrix::diagonal(&[0.7, 0.3]).unwrap();
    let n = 10_000;
    let zeros = (0..n).filter(|_| measure_in_basis(&rho, &id, &mut rng).unwrap() == 0).count();
    assert!((zeros as f64 / n as f64 - 0.7).abs() < three_sigma(0.7, n));
    assert!(measure_in_basis(&rho, &UnitaryOp::identity(3), &mut rng).is_err());
}

#[test]
fn two_outcome_examples() {
    let mut rng = rng_from_seed(3);
    let p0 = PureState::basis(2, 0).to_density();
    let p1 = PureState::basis(2, 1).to_density();
    let pi = p0.matrix().clone();
    for _ in 0..100 {
        assert!(two_outcome_measure(&p0, &pi, &mut rng).unwrap());
        assert!(!two_outcome_measure(&p1, &pi, &mut rng).unwrap());
    }
    let n = 10_000;
    let mixed = DensityMatrix::maximally_mixed(2);
    let ones = (0..n).filter(|_| two_outcome_measure(&mixed, &pi, &mut rng).unwrap()).count();
    assert!((ones as f64 / n as f64 - 0.5).abs() < three_sigma(0.5, n));
    assert!(two_outcome_measure(&mixed, &CMatrix::identity(2, 2).scale(0.5), &mut rng).is_err());
}

#[test]
fn swap_test_examples() {
    let p0 = PureState::basis(2, 0).to_density();
    let p1 = PureState::basis(2, 1).to_density();
    let m = DensityMatrix::maximally_mixed(2);
    assert!((swap_accept_probability(&p0, &p0).unwrap() - 1.0).abs() < 1e-12);
    assert!((swap_accept_probability(&p0, &p1).unwrap() - 0.5).abs() < 1e-12);
    assert!((swap_accept_probability(&m, &m).unwrap() - 0.75).abs() < 1e-12);
}

#[test]
fn swap_frequencies_match_overlap() {
    let mut rng = rng_from_seed(4);
    for t in 0..50 {
        let d = 2 + t % 7;
        let rho = sample_state(d, 1 + t % d, &mut rng).unwrap();
        let sigma = sample_state(d, 1 + (t / 2) % d, &mut rng).unwrap();
        let p = swap_accept_probability(&rho, &sigma).unwrap();
        let n = 10_000;
        let acc = (0..n).filter(|_| swap_test(&rho, &sigma, &mut rng).unwrap()).count();
        let sd = (p * (1.0 - p) / n as f64).sqrt();
        assert!((acc as f64 / n as f64 - p).abs() <= 4.0 * sd + 1e-12);
    }
}

#[test]
fn zero_state_bell_labels_are_z_type() {
    let mut rng = rng_from_seed(5);
    let psi = PureState::basis(8, 0);
    let s = BellSampler::new(&psi).unwrap();
    for _ in 0..1000 {
        assert!(s.bell_difference(&mut rng).is_z_type());
    }
}

fn tv(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum::<f64>() / 2.0
}

#[test]
fn t_state_bell_difference_law() {
    let psi = t_state();
    let q = bell_difference_distribution(&psi).unwrap();
    // Brute force over the four single-qubit Paulis.
    let p: Vec<f64> = (0..4)
        .map(|i| PauliLabel::from_index(1, i).expectation(&psi).unwrap().powi(2) / 2.0)
        .collect();
    let id_mass: f64 = p.iter().map(|v| v * v).sum();
    assert!((q[0] - id_mass).abs() < 1e-12);
    let s = BellSampler::new(&psi).unwrap();
    let mut rng = rng_from_seed(6);
    let n = 100_000;
    let mut counts = [0usize; 4];
    for _ in 0..n {
        counts[s.bell_difference(&mut rng).index()] += 1;
    }
    let emp: Vec<f64> = counts.iter().map(|&c| c as f64 / n as f64).collect();
    assert!(tv(&emp, &q) < 0.02);
}

#[test]
fn two_qubit_bell_difference_matches_brute_force() {
    let mut rng = rng_from_seed(7);
    for _ in 0..20 {
        let psi = sample_haar_state(4, &mut rng);
        let q = bell_difference_distribution(&psi).unwrap();
        let s = BellSampler::new(&psi).unwrap();
        let n = 100_000;
        let mut counts = [0usize; 16];
        for _ in 0..n {
            counts[s.bell_difference(&mut rng).index()] += 1;
        }
        let emp: Vec<f64> = counts.iter().map(|&c| c as f64 / n as f64).collect();
        assert!(tv(&emp, &q) < 0.03);
    }
}

#[test]
fn pauli_moment_examples() {
    let mut rng = rng_from_seed(8);
    let zero = PureState::basis(2, 0);
    let z = PauliLabel::parse("Z").unwrap();
    let x = PauliLabel::parse("X").unwrap();
    for _ in 0..100 {
        assert!(pauli_moment_sample(&zero, z, &mut rng).unwrap());
    }
    let n = 10_000;
    let mean_product = |psi: &PureState, l: PauliLabel, rng: &mut crate::rng::SimRng| {
        let agree = (0..n).filter(|_| pauli_moment_sample(psi, l, rng).unwrap()).count();
        2.0 * agree as f64 / n as f64 - 1.0
    };
    assert!(mean_product(&zero, x, &mut rng).abs() < 3.0 / (n as f64).sqrt());
    let m = mean_product(&t_state(), x, &mut rng);
    assert!((m - 0.5).abs() < 3.0 * (0.75f64 / n as f64).sqrt());
}

#[test]
fn pauli_moment_is_unbiased() {
    let mut rng = rng_from_seed(9);
    for t in 0..50 {
        let n_q = 1 + t % 3;
        let psi = sample_haar_state(1 << n_q, &mut rng);
        let l = PauliLabel::from_index(n_q, rand::Rng::random_range(&mut rng, 0..1usize << (2 * n_q)));
        let e2 = l.expectation(&psi).unwrap().powi(2);
        let shots = 10_000;
        let s = BellSampler::new(&psi).unwrap();
        let agree = (0..shots).filter(|_| s.pauli_moment(l, &mut rng)).count();
        let mean = 2.0 * agree as f64 / shots as f64 - 1.0;
        let sd = ((1.0 - e2 * e2).max(0.0) / shots as f64).sqrt();
        assert!((mean - e2).abs() <= 4.0 * sd + 1e-9, "{mean} vs {e2}");
    }
}

fn clifford_key(u: &UnitaryOp, n: usize) -> Vec<SignedPauli> {
    let um = u.matrix();
    (0..n)
        .flat_map(|j| [PauliLabel::new(n, 1 << j, 0).unwrap(), PauliLabel::new(n, 0, 1 << j).unwrap()])
        .map(|l| {
            let m = um * l.matrix() * um.adjoint();
            SignedPauli::identify(&m, n).expect("Clifford maps Paulis to Paulis")
        })
        .collect()
}

#[test]
fn single_qubit_cliffords_are_uniform() {
    let mut rng = rng_from_seed(10);
    let n = 100_000;
    let mut counts: HashMap<Vec<SignedPauli>, usize> = HashMap::new();
    for _ in 0..n {
        let u = sample_uniform_clifford(1, &mut rng).unwrap();
        *counts.entry(clifford_key(&u, 1)).or_default() += 1;
    }
    assert_eq!(counts.len(), 24);
    let c: Vec<usize> = counts.values().copied().collect();
    // χ²₂₃ critical value at level 0.01.
    assert!(chi_square(&c, &[1.0 / 24.0; 24]) < 41.638);
}

#[test]
fn cliffords_conjugate_paulis_to_paulis() {
    let mut rng = rng_from_seed(11);
    for n in 1..=3 {
        for _ in 0..20 {
            let u = sample_uniform_clifford(n, &mut rng).unwrap();
            assert!(crate::linalg::unitarity_residual(u.matrix()) < 1e-9);
            let um = u.matrix();
            for idx in 0..1usize << (2 * n) {
                let l = PauliLabel::from_index(n, idx);
                let m = um * l.matrix() * um.adjoint();
                assert!(SignedPauli::identify(&m, n).is_some());
            }
        }
    }
    let a = sample_uniform_clifford(2, &mut rng_from_seed(1)).unwrap();
    let b = sample_uniform_clifford(2, &mut rng_from_seed(1)).unwrap();
    assert_eq!(a, b);
    assert!(sample_uniform_clifford(7, &mut rng).is_err());
}

#[test]
fn categorical_matches_weights() {
    let mut rng = rng_from_seed(12);
    let c = Categorical::new(&[0.1, 0.0, 0.9]);
    let n = 20_000;
    let mut counts = [0usize; 3];
    for _ in 0..n {
        counts[c.sample(&mut rng)] += 1;
    }
    assert_eq!(counts[1], 0);
    assert!((counts[0] as f64 / n as f64 - 0.1).abs() < three_sigma(0.1, n));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn characteristic_distribution_sums_to_one(seed in any::<u64>(), n in 1usize..4) {
        let mut rng = rng_from_seed(seed);
        let psi = sample_haar_state(1 << n, &mut rng);
        let p = characteristic_distribution(&psi).unwrap();
        prop_assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-10);
        prop_assert!((p[0] - 1.0 / (1 << n) as f64).abs() < 1e-12);
        let q = bell_difference_distribution(&psi).unwrap();
        prop_assert!((q.iter().sum::<f64>() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn basis_probabilities_normalize(seed in any::<u64>(), d in 2usize..8) {
        let mut rng = rng_from_seed(seed);
        let rho = sample_state(d, 1 + seed as usize % d, &mut rng).unwrap();
        let u = sample_haar_unitary(d, &mut rng);
        let p = basis_probabilities(&rho, &u).unwrap();
        prop_assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn symplectic_images_are_a_symplectic_basis(seed in any::<u64>(), n in 1usize..6) {
        let mut rng = rng_from_seed(seed);
        let pairs = sample_uniform_symplectic(n, &mut rng);
        for (i, (a, b)) in pairs.iter().enumerate() {
            prop_assert!(a.anticommutes(b));
            for (c, e) in pairs.iter().skip(i + 1) {
                prop_assert!(!a.anticommutes(c) && !a.anticommutes(e));
                prop_assert!(!b.anticommutes(c) && !b.anticommutes(e));
            }
        }
    }
}

#[test]
fn pauli_label_validation() {
    assert!(PauliLabel::new(2, 4, 0).is_err());
    assert!(PauliLabel::parse("XQ").is_err());
    let v = CVector::from_element(2, C64::new(0.0, 0.0));
    assert_eq!(PauliLabel::identity(1).apply(&v), v);
    assert_eq!(qubits_of(6), Err(Error::NotQubitDimension(6)));
}

#[test]
fn ideal_estimate_is_bounded_and_unbiased() {
    let mut rng = rng_from_seed(77);
    let n = 20_000;
    let mut sum = 0.0;
    let mut outside = 0;
    for _ in 0..n {
        let v = ideal_estimate(0.3, 0.05, 0.1, &mut rng);
        assert!((v - 0.3).abs() <= 0.05);
        if (v - 0.3).abs() >= 0.05 {
            outside += 1;
        }
        sum += v;
    }
    assert!((sum / n as f64 - 0.3).abs() < 1e-3);
    assert!((outside as f64 / n as f64) <= 0.1);
}

#[test]
fn multinomial_counts_match_law() {
    let mut rng = rng_from_seed(78);
    let probs = [0.5, 0.0, 0.3, 0.2];
    let n = 100_000u64;
    let c = multinomial_counts(n, &probs, &mut rng);
    assert_eq!(c.iter().sum::<u64>(), n);
    assert_eq!(c[1], 0);
    for (i, &p) in probs.iter().enumerate() {
        let sd = (p * (1.0 - p) / n as f64).sqrt();
        assert!((c[i] as f64 / n as f64 - p).abs() <= 4.0 * sd + 1e-12);
    }
    assert_eq!(multinomial_counts(7, &[0.0, 1.0], &mut rng), vec![0, 7]);
}
