//! Action evaluations checked against independent entrywise and
//! finite-difference oracles.

use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spectral_lab::action::{
    bosonic_action, cross_term_quadratic, extended_action, fermionic_action, perturbative_expansion, spectral_trace,
    state_projector, ActionConfig, CutoffFunction, FermionState,
};
use spectral_lab::linalg::{
    matrix_function, random_hermitian, random_unitary, random_vector, AntiUnitaryOp, ComplexMatrix,
};
use spectral_lab::model::{build_lepton_triple, physical_projector, LeptonModelParams};
use spectral_lab::triple::FiniteSpectralTriple;

fn triple_with(d: ComplexMatrix) -> FiniteSpectralTriple {
    let n = d.dim();
    FiniteSpectralTriple::new(vec![], d, ComplexMatrix::identity(n), AntiUnitaryOp::conjugation(n), 0).unwrap()
}

/// `Tr((DP + PD)²)` from explicit index sums, with `P = ψψ†/‖ψ‖²`.
#[allow(clippy::needless_range_loop)]
fn cross_term_oracle(d: &ComplexMatrix, psi: &[Complex64]) -> f64 {
    let n = psi.len();
    let norm: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
    let p = |i: usize, j: usize| psi[i] * psi[j].conj() / norm;
    let mut s = vec![vec![Complex64::new(0.0, 0.0); n]; n];
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                s[i][j] += d.get(i, k) * p(k, j) + p(i, k) * d.get(k, j);
            }
        }
    }
    let mut tr = Complex64::new(0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            tr += s[i][j] * s[j][i];
        }
    }
    tr.re
}

fn expectation_oracle(d: &ComplexMatrix, psi: &[Complex64]) -> Complex64 {
    let n = psi.len();
    let mut total = Complex64::new(0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            total += psi[i].conj() * d.get(i, j) * psi[j];
        }
    }
    total
}

#[test]
fn cross_term_matches_entrywise_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for _ in 0..100 {
        let n = rng.random_range(2..=8);
        let d = random_hermitian(n, &mut rng);
        let psi = random_vector(n, &mut rng);
        let report = cross_term_quadratic(&triple_with(d.clone()), &FermionState::new(psi.clone())).unwrap();
        let oracle = cross_term_oracle(&d, &psi);
        assert!((report.lhs - oracle).abs() < 1e-10);
        assert!((report.derived_rhs - oracle).abs() < 1e-10);
        assert!(report.lhs_minus_derived.abs() < 1e-10);
    }
}

#[test]
fn cross_term_discriminating_case() {
    let d = ComplexMatrix::from_real_diagonal(&[1.0, -1.0]);
    let r = cross_term_quadratic(&triple_with(d.clone()), &FermionState::from_real(&[1.0, 1.0])).unwrap();
    assert!((r.lhs - 2.0).abs() < 1e-14);
    assert!((r.reference_rhs - 1.0).abs() < 1e-14);
    assert!((r.derived_rhs - 2.0).abs() < 1e-14);
    assert!((cross_term_oracle(&d, &[Complex64::new(1.0, 0.0); 2]) - 2.0).abs() < 1e-14);
}

#[test]
fn fermionic_action_matches_entrywise_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for _ in 0..50 {
        let n = rng.random_range(1..=10);
        let d = random_hermitian(n, &mut rng);
        let psi = random_vector(n, &mut rng);
        let got = fermionic_action(&triple_with(d.clone()), &FermionState::new(psi.clone())).unwrap();
        let want = expectation_oracle(&d, &psi);
        assert!(want.im.abs() < 1e-10 * (1.0 + want.re.abs()));
        assert!((got - want.re).abs() < 1e-10);
    }
}

#[test]
fn linear_cutoff_extended_action_matches_direct_square() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let linear = CutoffFunction::Polynomial { coefficients: vec![0.0, 1.0] };
    for _ in 0..20 {
        let n = rng.random_range(2..=7);
        let d = random_hermitian(n, &mut rng);
        let psi = FermionState::new(random_vector(n, &mut rng));
        let lambda = rng.random_range(0.5..3.0);
        let cfg = ActionConfig::new(lambda, linear.clone()).unwrap();
        let got = extended_action(&triple_with(d.clone()), &psi, &cfg).unwrap();
        let m = &d + &state_projector(&psi).unwrap();
        let want = (&m * &m).trace().re / (lambda * lambda);
        assert!((got - want).abs() < 1e-10);
    }
}

#[test]
fn zero_state_and_identity_projector_reduce_to_plain_actions() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..10 {
        let d = random_hermitian(5, &mut rng);
        let t = triple_with(d);
        let cfg = ActionConfig::new(1.7, CutoffFunction::Gaussian).unwrap();
        let zero = extended_action(&t, &FermionState::zero(5), &cfg).unwrap();
        assert_eq!(zero, bosonic_action(&t, &cfg).unwrap());

        let psi = FermionState::new(random_vector(5, &mut rng));
        let plain = extended_action(&t, &psi, &cfg).unwrap();
        let with_identity = cfg.clone().with_physical_projector(ComplexMatrix::identity(5)).unwrap();
        let projected = extended_action(&t, &psi, &with_identity).unwrap();
        assert!((plain - projected).abs() < 1e-12);
    }
}

#[test]
fn projected_trace_matches_explicit_sandwich() {
    let p = LeptonModelParams { y_e: 0.9, y_nu: 0.6, m_r: 2.0, v: 1.0, include_sterile: true, ..Default::default() };
    let t = build_lepton_triple(&p).unwrap();
    let pi = physical_projector(&p);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let psi = FermionState::new(random_vector(8, &mut rng));
    let lambda = 1.3;
    let cfg = ActionConfig::new(lambda, CutoffFunction::Gaussian).unwrap().with_physical_projector(pi.clone()).unwrap();
    let got = extended_action(&t, &psi, &cfg).unwrap();

    let m = t.d() + &state_projector(&psi).unwrap();
    let fm = matrix_function(&m, |x| (-(x * x) / (lambda * lambda)).exp()).unwrap();
    let want = (&(&pi * &fm) * &pi).trace().re;
    assert!((got - want).abs() < 1e-12);

    // the sterile directions contribute: projected and full traces differ
    let full = ActionConfig::new(lambda, CutoffFunction::Gaussian).unwrap();
    assert!((extended_action(&t, &psi, &full).unwrap() - got).abs() > 1e-3);
}

#[test]
fn gaussian_action_monotone_in_lambda() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let t = triple_with(random_hermitian(6, &mut rng).scale(3.0));
    let mut last = 0.0;
    for k in 1..=60 {
        let cfg = ActionConfig::new(0.1 * k as f64, CutoffFunction::Gaussian).unwrap();
        let s = bosonic_action(&t, &cfg).unwrap();
        assert!(s >= last);
        last = s;
    }
}

#[test]
fn polynomial_expansion_reproduces_extended_action() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for _ in 0..20 {
        let n = rng.random_range(2..=7);
        let d = random_hermitian(n, &mut rng);
        let psi = FermionState::new(random_vector(n, &mut rng));
        let coeffs: Vec<f64> = (0..3).map(|_| rng.random_range(-1.0..1.0)).collect();
        let cfg = ActionConfig::new(1.5, CutoffFunction::Polynomial { coefficients: coeffs }).unwrap();
        let t = triple_with(d);
        let c = perturbative_expansion(&t, &psi, &cfg, 4).unwrap();
        let partial: f64 = c.iter().sum();
        let exact = extended_action(&t, &psi, &cfg).unwrap();
        assert!((partial - exact).abs() < 1e-9, "{partial} vs {exact}");
        assert_eq!(c[0], bosonic_action(&t, &cfg).unwrap());
    }
}

#[test]
fn expansion_of_zero_state_has_no_corrections() {
    let t = triple_with(ComplexMatrix::from_real_diagonal(&[0.5, -2.0, 1.0]));
    for cutoff in [CutoffFunction::Gaussian, CutoffFunction::Polynomial { coefficients: vec![1.0, 0.5, 0.25] }] {
        let cfg = ActionConfig::new(1.0, cutoff).unwrap();
        let c = perturbative_expansion(&t, &FermionState::zero(3), &cfg, 4).unwrap();
        assert!(c[1..].iter().all(|&x| x == 0.0));
    }
}

/// `s(ε) = Tr f((D + εP)²/Λ²)` through the Hermitian spectrum.
fn s_of(d: &ComplexMatrix, p: &ComplexMatrix, eps: f64, cfg: &ActionConfig) -> f64 {
    spectral_trace(&(d + &p.scale(eps)), cfg).unwrap()
}

#[test]
fn gaussian_expansion_matches_derivative_oracles() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for _ in 0..10 {
        let n = rng.random_range(2..=6);
        let d = random_hermitian(n, &mut rng);
        let psi = FermionState::new(random_vector(n, &mut rng));
        let lambda = rng.random_range(0.8..2.5);
        let cfg = ActionConfig::new(lambda, CutoffFunction::Gaussian).unwrap();
        let t = triple_with(d.clone());
        let c = perturbative_expansion(&t, &psi, &cfg, 4).unwrap();
        let p = state_projector(&psi).unwrap();
        let l2 = lambda * lambda;

        // c₁ = Tr f′(D²/Λ²)(DP + PD)/Λ² with f′ = −exp(−x)
        let heat = matrix_function(&d, |x| (-(x * x) / l2).exp()).unwrap();
        let c1 = -(&heat * &(&(&d * &p) + &(&p * &d))).trace().re / l2;
        assert!((c[1] - c1).abs() < 1e-10, "{} vs {c1}", c[1]);

        // c₂ from a central second difference
        let h = 1e-3;
        let c2 = (s_of(&d, &p, h, &cfg) + s_of(&d, &p, -h, &cfg) - 2.0 * c[0]) / (2.0 * h * h);
        assert!((c[2] - c2).abs() < 1e-5 * (1.0 + c2.abs()));

        // truncated series against the exact value at small ε
        let eps: f64 = 0.05;
        let series: f64 = c.iter().enumerate().map(|(k, ck)| ck * eps.powi(k as i32)).sum();
        assert!((series - s_of(&d, &p, eps, &cfg)).abs() < 1e-7);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn projector_is_rank_one_orthogonal(seed in any::<u64>(), dim in 1usize..10) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let psi = random_vector(dim, &mut rng);
        let p = state_projector(&FermionState::new(psi)).unwrap();
        prop_assert!((&(&p * &p) - &p).max_abs() < 1e-12);
        prop_assert!(p.hermiticity_residual() < 1e-12);
        prop_assert!((p.trace().re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn bosonic_action_unitarily_invariant(seed in any::<u64>(), dim in 1usize..8, kind in 0usize..3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = random_hermitian(dim, &mut rng);
        let u = random_unitary(dim, &mut rng);
        let cutoff = [CutoffFunction::Sharp, CutoffFunction::Gaussian, CutoffFunction::PolynomialDecay { exponent: 3.0 }][kind].clone();
        let cfg = ActionConfig::new(1.2345, cutoff).unwrap();
        let rotated = &(&u * &d) * &u.adjoint();
        let a = bosonic_action(&triple_with(d), &cfg).unwrap();
        let b = bosonic_action(&triple_with(rotated), &cfg).unwrap();
        prop_assert!((a - b).abs() <= 1e-9);
    }
}
