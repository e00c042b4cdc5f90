//! One-generation lepton sector: the finite triple with an optional sterile
//! state, the electroweak gauge action on doublets, and the mass terms built
//! from them.
//!
//! Hilbert space basis: particle sector `(ν_L, e_L, e_R[, N])` followed by
//! the conjugate sector in the same order. The real structure swaps the two
//! sectors and conjugates, so `J² = +1`, `JD = DJ` and `Jγ = −γJ` (KO-dimension 6).
//! The algebra `ℂ ⊕ ℍ` acts on the particle sector by the quaternion on the
//! left doublet and the complex number on `e_R`, and by the complex number on
//! every conjugate state. The sterile `N` carries no representation.

use nalgebra::{Matrix2, Vector2};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{self, eigvalsh, AntiUnitaryOp, ComplexMatrix, LinalgError, DEFAULT_TOL};
use crate::triple::{FiniteSpectralTriple, TripleError};

pub const GEV_TO_EV: f64 = 1e9;

/// Higgs vacuum expectation value in GeV.
pub const DEFAULT_VEV_GEV: f64 = 246.0;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("invalid model parameters: {0}")]
    InvalidParams(String),
    #[error("matrix is not in SU(2): residual {residual:.3e}")]
    NotSU2 { residual: f64 },
    #[error("invalid U(1) phase: |z| = {0}")]
    NotUnitPhase(f64),
    #[error("{0} must be positive")]
    NonPositiveInput(&'static str),
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("the model has no sterile state")]
    NoSterileState,
    #[error(transparent)]
    Triple(#[from] TripleError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Left-handed lepton doublet `L = (ν, e_L)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LeptonDoublet {
    pub nu: Complex64,
    pub e: Complex64,
}

impl LeptonDoublet {
    pub fn new(nu: Complex64, e: Complex64) -> Self {
        Self { nu, e }
    }

    pub fn as_vector(&self) -> Vector2<Complex64> {
        Vector2::new(self.nu, self.e)
    }

    pub fn norm(&self) -> f64 {
        (self.nu.norm_sqr() + self.e.norm_sqr()).sqrt()
    }
}

/// Higgs doublet `H = (H⁺, H⁰)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HiggsDoublet {
    pub h_plus: Complex64,
    pub h_zero: Complex64,
}

impl HiggsDoublet {
    pub fn new(h_plus: Complex64, h_zero: Complex64) -> Self {
        Self { h_plus, h_zero }
    }

    /// `H = (0, v)`.
    pub fn vacuum(v: f64) -> Self {
        Self { h_plus: ZERO, h_zero: Complex64::new(v, 0.0) }
    }

    pub fn as_vector(&self) -> Vector2<Complex64> {
        Vector2::new(self.h_plus, self.h_zero)
    }
}

/// Element `(h, z)` of `SU(2) × U(1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaugeElement {
    h: Matrix2<Complex64>,
    z: Complex64,
}

impl GaugeElement {
    pub fn new(h: Matrix2<Complex64>, z: Complex64) -> Result<Self, ModelError> {
        let residual = su2_residual(&h);
        if residual > DEFAULT_TOL {
            return Err(ModelError::NotSU2 { residual });
        }
        if (z.norm() - 1.0).abs() > DEFAULT_TOL {
            return Err(ModelError::NotUnitPhase(z.norm()));
        }
        Ok(Self { h, z })
    }

    pub fn identity() -> Self {
        Self { h: Matrix2::identity(), z: ONE }
    }

    /// Unit quaternion `a + bi + cj + dk` as `[[a+ib, c+id], [−c+id, a−ib]]`.
    pub fn from_quaternion(q: [f64; 4], z: Complex64) -> Result<Self, ModelError> {
        let [a, b, c, d] = q;
        let h = Matrix2::new(Complex64::new(a, b), Complex64::new(c, d), Complex64::new(-c, d), Complex64::new(a, -b));
        Self::new(h, z)
    }

    pub fn h(&self) -> &Matrix2<Complex64> {
        &self.h
    }

    pub fn z(&self) -> Complex64 {
        self.z
    }
}

/// `max(‖h†h − 1‖_max, |det h − 1|)`.
pub fn su2_residual(h: &Matrix2<Complex64>) -> f64 {
    let unit = (h.adjoint() * h - Matrix2::identity()).iter().fold(0.0_f64, |acc, z| acc.max(z.norm()));
    unit.max((h.determinant() - ONE).norm())
}

/// Parameters of the lepton model. Masses and the vacuum expectation value
/// are in GeV.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LeptonModelParams {
    pub y_e: f64,
    pub y_nu: f64,
    pub v: f64,
    pub include_sterile: bool,
    pub m_r: f64,
    pub kappa: f64,
}

impl Default for LeptonModelParams {
    fn default() -> Self {
        Self { y_e: 1.0, y_nu: 0.0, v: DEFAULT_VEV_GEV, include_sterile: false, m_r: 0.0, kappa: 1.0 }
    }
}

impl LeptonModelParams {
    pub fn validate(&self) -> Result<(), ModelError> {
        let finite = [self.y_e, self.y_nu, self.v, self.m_r, self.kappa].iter().all(|x| x.is_finite());
        if !finite {
            return Err(ModelError::InvalidParams("all parameters must be finite".into()));
        }
        if self.v <= 0.0 {
            return Err(ModelError::InvalidParams(format!("v must be positive, got {}", self.v)));
        }
        if self.y_e < 0.0 {
            return Err(ModelError::InvalidParams(format!("y_e must be nonnegative, got {}", self.y_e)));
        }
        if !self.include_sterile && (self.y_nu != 0.0 || self.m_r != 0.0) {
            return Err(ModelError::InvalidParams("y_nu and m_r require include_sterile".into()));
        }
        Ok(())
    }

    /// Dirac neutrino mass `y_ν·v`.
    pub fn dirac_mass(&self) -> f64 {
        self.y_nu * self.v
    }

    /// Size of one sector: 3 without the sterile state, 4 with it.
    pub fn sector_dim(&self) -> usize {
        if self.include_sterile {
            4
        } else {
            3
        }
    }
}

/// Particle-sector indices.
pub const NU_L: usize = 0;
pub const E_L: usize = 1;
pub const E_R: usize = 2;
pub const STERILE: usize = 3;

/// Basis labels in Hilbert-space order.
pub fn basis_labels(include_sterile: bool) -> Vec<&'static str> {
    if include_sterile {
        vec!["nu_L", "e_L", "e_R", "N", "nu_L^c", "e_L^c", "e_R^c", "N^c"]
    } else {
        vec!["nu_L", "e_L", "e_R", "nu_L^c", "e_L^c", "e_R^c"]
    }
}

/// Representation of `(λ, q) ∈ ℂ ⊕ ℍ`, with `q` given as a 2×2 complex matrix.
pub fn algebra_element(p: &LeptonModelParams, lambda: Complex64, q: &Matrix2<Complex64>) -> ComplexMatrix {
    let n = p.sector_dim();
    let mut a = ComplexMatrix::zeros(2 * n);
    for i in 0..2 {
        for j in 0..2 {
            a.set(NU_L + i, NU_L + j, q[(i, j)]);
        }
    }
    a.set(E_R, E_R, lambda);
    for k in 0..n {
        a.set(n + k, n + k, lambda);
    }
    a
}

/// Unitary `(z, h)` of `U(1) × SU(2) ⊂ ℂ ⊕ ℍ` in the representation, extended
/// by the identity on the sterile state so the result is unitary.
pub fn gauge_unitary(p: &LeptonModelParams, g: &GaugeElement) -> ComplexMatrix {
    let mut u = algebra_element(p, g.z(), g.h());
    if p.include_sterile {
        u.set(STERILE, STERILE, ONE);
    }
    u
}

/// Real basis of `ℂ ⊕ ℍ`: `(1,0), (i,0), (0,1), (0,iσ₁), (0,iσ₂), (0,iσ₃)`.
pub fn algebra_generators(p: &LeptonModelParams) -> Vec<ComplexMatrix> {
    let zero = Matrix2::zeros();
    let quaternion_units = [
        Matrix2::identity(),
        Matrix2::new(ZERO, I, I, ZERO),
        Matrix2::new(ZERO, ONE, -ONE, ZERO),
        Matrix2::new(I, ZERO, ZERO, -I),
    ];
    let mut gens = vec![algebra_element(p, ONE, &zero), algebra_element(p, I, &zero)];
    gens.extend(quaternion_units.iter().map(|q| algebra_element(p, ZERO, q)));
    gens
}

/// Finite Dirac operator: Yukawa couplings inside each sector and the
/// Majorana mass `m_R` between `N` and its conjugate.
pub fn lepton_dirac_operator(p: &LeptonModelParams) -> ComplexMatrix {
    let n = p.sector_dim();
    let mut d = ComplexMatrix::zeros(2 * n);
    let mut couple = |i: usize, j: usize, m: f64| {
        d.set(i, j, Complex64::new(m, 0.0));
        d.set(j, i, Complex64::new(m, 0.0));
    };
    let m_e = p.y_e * p.v;
    couple(E_L, E_R, m_e);
    couple(n + E_L, n + E_R, m_e);
    if p.include_sterile {
        let m_d = p.dirac_mass();
        couple(NU_L, STERILE, m_d);
        couple(n + NU_L, n + STERILE, m_d);
        couple(STERILE, n + STERILE, p.m_r);
    }
    d
}

/// Chirality: `+1` on left-handed particles, `−1` on right-handed ones, and
/// the opposite signs on the conjugate sector.
pub fn lepton_grading(p: &LeptonModelParams) -> ComplexMatrix {
    let mut g = vec![1.0, 1.0, -1.0];
    if p.include_sterile {
        g.push(-1.0);
    }
    let conj: Vec<f64> = g.iter().map(|x| -x).collect();
    g.extend(conj);
    ComplexMatrix::from_real_diagonal(&g)
}

/// Sector swap composed with complex conjugation.
pub fn lepton_real_structure(p: &LeptonModelParams) -> AntiUnitaryOp {
    let n = p.sector_dim();
    let u = ComplexMatrix::from_fn(2 * n, |i, j| if (i + n) % (2 * n) == j { ONE } else { ZERO });
    AntiUnitaryOp::new(u).expect("permutation matrix is unitary")
}

pub fn build_lepton_triple(p: &LeptonModelParams) -> Result<FiniteSpectralTriple, ModelError> {
    p.validate()?;
    Ok(FiniteSpectralTriple::new(
        algebra_generators(p),
        lepton_dirac_operator(p),
        lepton_grading(p),
        lepton_real_structure(p),
        6,
    )?)
}

/// Projector onto the states carrying a representation of the algebra,
/// i.e. everything except `N` and its conjugate.
pub fn physical_projector(p: &LeptonModelParams) -> ComplexMatrix {
    let n = p.sector_dim();
    let diag: Vec<f64> = (0..2 * n).map(|k| if p.include_sterile && k % n == STERILE { 0.0 } else { 1.0 }).collect();
    ComplexMatrix::from_real_diagonal(&diag)
}

/// Block of the Dirac operator on `(ν_L, N, ν_L^c, N^c)`.
pub fn neutrino_mass_block(p: &LeptonModelParams) -> Result<ComplexMatrix, ModelError> {
    p.validate()?;
    if !p.include_sterile {
        return Err(ModelError::NoSterileState);
    }
    let n = p.sector_dim();
    Ok(lepton_dirac_operator(p).submatrix(&[NU_L, STERILE, n + NU_L, n + STERILE]))
}

/// Smallest `|eigenvalue|` of the neutrino mass block, in GeV.
pub fn light_neutrino_mass(p: &LeptonModelParams) -> Result<f64, ModelError> {
    let block = neutrino_mass_block(p)?;
    let eig = eigvalsh(&block, DEFAULT_TOL)?;
    Ok(eig.iter().map(|x| x.abs()).fold(f64::INFINITY, f64::min))
}

/// `L′ = h·L·conj(z)`, `H′ = h·H·z`.
pub fn gauge_transform(l: &LeptonDoublet, hd: &HiggsDoublet, g: &GaugeElement) -> (LeptonDoublet, HiggsDoublet) {
    let lv = g.h * l.as_vector() * g.z.conj();
    let hv = g.h * hd.as_vector() * g.z;
    (LeptonDoublet::new(lv[0], lv[1]), HiggsDoublet::new(hv[0], hv[1]))
}

/// Pauli matrix `σ₂ = [[0, −i], [i, 0]]`.
pub fn sigma2() -> Matrix2<Complex64> {
    Matrix2::new(ZERO, -I, I, ZERO)
}

/// `Hᵀσ₂L`, times `conj(n)` when a sterile amplitude is supplied.
pub fn invariant_term(hd: &HiggsDoublet, l: &LeptonDoublet, n: Option<Complex64>) -> Complex64 {
    let value = (hd.as_vector().transpose() * sigma2() * l.as_vector())[(0, 0)];
    match n {
        Some(n) => n.conj() * value,
        None => value,
    }
}

/// `‖σ₂hσ₂⁻¹ − conj(h)‖_max` for `h ∈ SU(2)`.
pub fn check_intertwine(h: &Matrix2<Complex64>) -> Result<f64, ModelError> {
    let residual = su2_residual(h);
    if residual > DEFAULT_TOL {
        return Err(ModelError::NotSU2 { residual });
    }
    let s = sigma2();
    // σ₂ is its own inverse
    let lhs = s * h * s;
    let diff = lhs - h.map(|z| z.conj());
    Ok(diff.iter().fold(0.0_f64, |acc, z| acc.max(z.norm())))
}

/// `m·⟨Cψ_L|ψ_L⟩ + c.c.`
pub fn majorana_term(m: f64, psi_l: &[Complex64], c: &AntiUnitaryOp) -> Result<f64, ModelError> {
    if psi_l.len() != c.dim() {
        return Err(ModelError::DimensionMismatch { expected: c.dim(), found: psi_l.len() });
    }
    let c_psi = c.apply(psi_l)?;
    Ok(2.0 * m * linalg::inner(&c_psi, psi_l).re)
}

/// `κ·(conj(Ce)·H⁺ − conj(Cν)·H⁰)·(H⁺e − H⁰ν)` with c-number amplitudes and a
/// one-dimensional charge conjugation `C`.
pub fn weinberg_term(
    p: &LeptonModelParams,
    l: &LeptonDoublet,
    hd: &HiggsDoublet,
    c: &AntiUnitaryOp,
) -> Result<Complex64, ModelError> {
    if c.dim() != 1 {
        return Err(ModelError::DimensionMismatch { expected: 1, found: c.dim() });
    }
    let c_e = c.apply(&[l.e])?[0];
    let c_nu = c.apply(&[l.nu])?[0];
    let left = c_e.conj() * hd.h_plus - c_nu.conj() * hd.h_zero;
    let right = hd.h_plus * l.e - hd.h_zero * l.nu;
    Ok(p.kappa * left * right)
}

/// `κ·v²/Λ` converted from GeV to eV.
pub fn neutrino_mass_estimate(kappa: f64, v: f64, lambda: f64) -> Result<f64, ModelError> {
    if !(v.is_finite() && v > 0.0) {
        return Err(ModelError::NonPositiveInput("v"));
    }
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(ModelError::NonPositiveInput("lambda"));
    }
    if !(kappa.is_finite() && kappa >= 0.0) {
        return Err(ModelError::NonPositiveInput("kappa"));
    }
    Ok(kappa * v * v / lambda * GEV_TO_EV)
}

/// Deterministic Haar sample of `SU(2) × U(1)`: a normalized Gaussian
/// quaternion and a uniform phase.
pub fn sample_su2(seed: u64) -> GaugeElement {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sample_su2_with(&mut rng)
}

pub fn sample_su2_with<R: Rng + ?Sized>(rng: &mut R) -> GaugeElement {
    loop {
        let q: [f64; 4] = std::array::from_fn(|_| rng.sample(StandardNormal));
        let norm = q.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm < 1e-6 {
            continue;
        }
        let q = q.map(|x| x / norm);
        let theta = rng.random_range(0.0..std::f64::consts::TAU);
        let (a, b, c, d) = (q[0], q[1], q[2], q[3]);
        let h = Matrix2::new(Complex64::new(a, b), Complex64::new(c, d), Complex64::new(-c, d), Complex64::new(a, -b));
        return GaugeElement { h, z: Complex64::from_polar(1.0, theta) };
    }
}
