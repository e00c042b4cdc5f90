//! Spectral actions of a finite Dirac operator, with and without a fermion
//! state inserted through its projector.
//!
//! The bosonic action is `Tr f(D²/Λ²)`, the fermionic action is `⟨ψ|Dψ⟩`,
//! and the extended action is `Tr f((D + P_ψ)²/Λ²)`, optionally traced over
//! a physical subspace only.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{self, eigh, ComplexMatrix, LinalgError, DEFAULT_TOL};
use crate::triple::FiniteSpectralTriple;

/// Highest Taylor order accepted by [`perturbative_expansion`].
pub const MAX_EXPANSION_ORDER: usize = 4;

const CONTOUR_POINTS: usize = 64;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ActionError {
    #[error("cutoff argument must be nonnegative, got {0}")]
    NegativeArgument(f64),
    #[error("fermion state is zero")]
    ZeroState,
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("cutoff scale must be positive and finite, got {0}")]
    InvalidLambda(f64),
    #[error("invalid cutoff function: {0}")]
    InvalidCutoff(String),
    #[error("physical projector is not a Hermitian idempotent: residual {0:.3e}")]
    InvalidProjector(f64),
    #[error("{0} cutoff is not smooth enough for a Taylor expansion")]
    NonSmoothCutoff(&'static str),
    #[error("expansion order {0} exceeds the maximum of {MAX_EXPANSION_ORDER}")]
    OrderTooHigh(usize),
    #[error("expectation value has imaginary part {0:.3e}: operator is not Hermitian")]
    NonRealExpectation(f64),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Cutoff function `f` of the spectral action.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CutoffSpec", into = "CutoffSpec")]
pub enum CutoffFunction {
    /// `1` on `[0, 1]`, `0` beyond. The boundary point is included.
    Sharp,
    /// `exp(−x)`.
    Gaussian,
    /// `(1 + x)^(−p)`.
    PolynomialDecay { exponent: f64 },
    /// `Σ cₖ xᵏ`.
    Polynomial { coefficients: Vec<f64> },
}

/// Wire form `{"kind": "...", "params": [...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CutoffSpec {
    pub kind: String,
    #[serde(default)]
    pub params: Vec<f64>,
}

impl TryFrom<CutoffSpec> for CutoffFunction {
    type Error = ActionError;

    fn try_from(spec: CutoffSpec) -> Result<Self, Self::Error> {
        let f = match spec.kind.as_str() {
            "sharp" => CutoffFunction::Sharp,
            "gaussian" => CutoffFunction::Gaussian,
            "polynomial-decay" => match spec.params.as_slice() {
                [p] => CutoffFunction::PolynomialDecay { exponent: *p },
                _ => {
                    return Err(ActionError::InvalidCutoff(
                        "polynomial-decay takes exactly one parameter (the exponent)".into(),
                    ))
                }
            },
            "polynomial" => CutoffFunction::Polynomial { coefficients: spec.params.clone() },
            other => return Err(ActionError::InvalidCutoff(format!("unknown kind `{other}`"))),
        };
        if spec.kind != "polynomial" && spec.kind != "polynomial-decay" && !spec.params.is_empty() {
            return Err(ActionError::InvalidCutoff(format!("{} takes no parameters", spec.kind)));
        }
        f.validate()?;
        Ok(f)
    }
}

impl From<CutoffFunction> for CutoffSpec {
    fn from(f: CutoffFunction) -> Self {
        let (kind, params) = match f {
            CutoffFunction::Sharp => ("sharp", vec![]),
            CutoffFunction::Gaussian => ("gaussian", vec![]),
            CutoffFunction::PolynomialDecay { exponent } => ("polynomial-decay", vec![exponent]),
            CutoffFunction::Polynomial { coefficients } => ("polynomial", coefficients),
        };
        CutoffSpec { kind: kind.to_string(), params }
    }
}

impl CutoffFunction {
    pub fn kind(&self) -> &'static str {
        match self {
            CutoffFunction::Sharp => "sharp",
            CutoffFunction::Gaussian => "gaussian",
            CutoffFunction::PolynomialDecay { .. } => "polynomial-decay",
            CutoffFunction::Polynomial { .. } => "polynomial",
        }
    }

    pub fn validate(&self) -> Result<(), ActionError> {
        match self {
            CutoffFunction::PolynomialDecay { exponent } if !(exponent.is_finite() && *exponent > 0.0) => {
                Err(ActionError::InvalidCutoff(format!("decay exponent must be positive, got {exponent}")))
            }
            CutoffFunction::Polynomial { coefficients } if coefficients.is_empty() => {
                Err(ActionError::InvalidCutoff("polynomial needs at least one coefficient".into()))
            }
            CutoffFunction::Polynomial { coefficients } if coefficients.iter().any(|c| !c.is_finite()) => {
                Err(ActionError::InvalidCutoff("polynomial coefficients must be finite".into()))
            }
            _ => Ok(()),
        }
    }

    pub fn eval(&self, x: f64) -> Result<f64, ActionError> {
        if x.is_nan() || x < 0.0 {
            return Err(ActionError::NegativeArgument(x));
        }
        Ok(self.eval_unchecked(x))
    }

    fn eval_unchecked(&self, x: f64) -> f64 {
        match self {
            CutoffFunction::Sharp => {
                if x <= 1.0 {
                    1.0
                } else {
                    0.0
                }
            }
            CutoffFunction::Gaussian => (-x).exp(),
            CutoffFunction::PolynomialDecay { exponent } => (1.0 + x).powf(-exponent),
            CutoffFunction::Polynomial { coefficients } => coefficients.iter().rev().fold(0.0, |acc, c| acc * x + c),
        }
    }
}

pub fn cutoff_eval(f: &CutoffFunction, x: f64) -> Result<f64, ActionError> {
    f.eval(x)
}

/// Fermion field in the Hilbert space of a triple. The zero vector is a
/// valid state standing for "no fermion inserted".
#[derive(Debug, Clone, PartialEq)]
pub struct FermionState {
    psi: Vec<Complex64>,
}

impl FermionState {
    pub fn new(psi: Vec<Complex64>) -> Self {
        Self { psi }
    }

    pub fn zero(dim: usize) -> Self {
        Self { psi: vec![Complex64::new(0.0, 0.0); dim] }
    }

    pub fn from_real(values: &[f64]) -> Self {
        Self { psi: values.iter().map(|&x| Complex64::new(x, 0.0)).collect() }
    }

    pub fn psi(&self) -> &[Complex64] {
        &self.psi
    }

    pub fn dim(&self) -> usize {
        self.psi.len()
    }

    pub fn norm_sqr(&self) -> f64 {
        linalg::norm_sqr(&self.psi)
    }

    pub fn is_zero(&self) -> bool {
        self.psi.iter().all(|z| *z == Complex64::new(0.0, 0.0))
    }

    /// Unit-norm copy.
    pub fn normalized(&self) -> Result<Self, ActionError> {
        let n = self.norm_sqr();
        if n == 0.0 {
            return Err(ActionError::ZeroState);
        }
        let s = 1.0 / n.sqrt();
        Ok(Self { psi: self.psi.iter().map(|z| z * s).collect() })
    }

    fn check_dim(&self, dim: usize) -> Result<(), ActionError> {
        if self.dim() != dim {
            return Err(ActionError::DimensionMismatch { expected: dim, found: self.dim() });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ActionConfig {
    lambda: f64,
    cutoff: CutoffFunction,
    physical_projector: Option<ComplexMatrix>,
}

impl ActionConfig {
    pub fn new(lambda: f64, cutoff: CutoffFunction) -> Result<Self, ActionError> {
        if !(lambda.is_finite() && lambda > 0.0) {
            return Err(ActionError::InvalidLambda(lambda));
        }
        cutoff.validate()?;
        Ok(Self { lambda, cutoff, physical_projector: None })
    }

    /// Restricts traces to the range of `projector`, which must satisfy
    /// `P² = P = P†` within 1e−10.
    pub fn with_physical_projector(mut self, projector: ComplexMatrix) -> Result<Self, ActionError> {
        let idem = (&(&projector * &projector) - &projector).max_abs();
        let residual = idem.max(projector.hermiticity_residual());
        if residual > DEFAULT_TOL {
            return Err(ActionError::InvalidProjector(residual));
        }
        self.physical_projector = Some(projector);
        Ok(self)
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn cutoff(&self) -> &CutoffFunction {
        &self.cutoff
    }

    pub fn physical_projector(&self) -> Option<&ComplexMatrix> {
        self.physical_projector.as_ref()
    }

    fn check_dim(&self, dim: usize) -> Result<(), ActionError> {
        match &self.physical_projector {
            Some(p) if p.dim() != dim => Err(ActionError::DimensionMismatch { expected: dim, found: p.dim() }),
            _ => Ok(()),
        }
    }
}

/// Rank-one orthogonal projector `|ψ⟩⟨ψ| / ⟨ψ|ψ⟩`.
pub fn state_projector(psi: &FermionState) -> Result<ComplexMatrix, ActionError> {
    let unit = psi.normalized()?;
    Ok(ComplexMatrix::outer(unit.psi(), unit.psi()))
}

/// `Tr(Π f(M²/Λ²))` for Hermitian `M`, through the spectrum of `M`.
pub fn spectral_trace(m: &ComplexMatrix, cfg: &ActionConfig) -> Result<f64, ActionError> {
    cfg.check_dim(m.dim())?;
    let eig = eigh(m, DEFAULT_TOL)?;
    let lambda_sq = cfg.lambda * cfg.lambda;
    let mut total = 0.0;
    for (k, &mu) in eig.eigenvalues.iter().enumerate() {
        let weight = match &cfg.physical_projector {
            None => 1.0,
            Some(p) => linalg::norm_sqr(&p.apply(&eig.vector(k))?),
        };
        total += weight * cfg.cutoff.eval_unchecked(mu * mu / lambda_sq);
    }
    Ok(total)
}

/// `Tr f(D²/Λ²)`.
pub fn bosonic_action(t: &FiniteSpectralTriple, cfg: &ActionConfig) -> Result<f64, ActionError> {
    spectral_trace(t.d(), cfg)
}

/// `⟨ψ|Dψ⟩` for the unnormalized state.
pub fn fermionic_action(t: &FiniteSpectralTriple, psi: &FermionState) -> Result<f64, ActionError> {
    expectation(t.d(), psi.psi())
}

/// Real expectation `⟨ψ|Mψ⟩`; rejects an imaginary part above
/// `1e−10·‖ψ‖²·‖M‖`.
pub fn expectation(m: &ComplexMatrix, psi: &[Complex64]) -> Result<f64, ActionError> {
    if psi.len() != m.dim() {
        return Err(ActionError::DimensionMismatch { expected: m.dim(), found: psi.len() });
    }
    let z = linalg::inner(psi, &m.apply(psi)?);
    let bound = 1e-10 * linalg::norm_sqr(psi) * m.frobenius_norm().max(f64::MIN_POSITIVE);
    if z.im.abs() > bound {
        return Err(ActionError::NonRealExpectation(z.im));
    }
    Ok(z.re)
}

/// `Tr f((D + P_ψ)²/Λ²)`, projected onto the physical subspace when one is
/// configured. The zero state reduces to [`bosonic_action`].
pub fn extended_action(t: &FiniteSpectralTriple, psi: &FermionState, cfg: &ActionConfig) -> Result<f64, ActionError> {
    psi.check_dim(t.hilbert_dim())?;
    if psi.is_zero() {
        return bosonic_action(t, cfg);
    }
    let p = state_projector(psi)?;
    spectral_trace(&(t.d() + &p), cfg)
}

/// Quadratic cross term `Tr(DP + PD)²` against two closed forms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CrossTermReport {
    /// `Tr((DP+PD)²)` from explicit matrix products.
    pub lhs: f64,
    /// `3⟨ψ|Dψ⟩² + ⟨ψ|D²ψ⟩`.
    pub reference_rhs: f64,
    /// `2⟨ψ|Dψ⟩² + 2⟨ψ|D²ψ⟩`, from expanding the trace term by term.
    pub derived_rhs: f64,
    pub lhs_minus_reference: f64,
    pub lhs_minus_derived: f64,
    /// `⟨ψ|Dψ⟩`
    pub expectation_d: f64,
    /// `⟨ψ|D²ψ⟩`
    pub expectation_d2: f64,
}

/// Evaluates `Tr(DP + PD)²` for the normalized projector onto `ψ`.
///
/// With `P = |ψ⟩⟨ψ|` the four terms of the square give
/// `Tr DPDP = Tr PDPD = ⟨D⟩²` and `Tr DPPD = Tr PDDP = ⟨D²⟩`.
pub fn cross_term_quadratic(t: &FiniteSpectralTriple, psi: &FermionState) -> Result<CrossTermReport, ActionError> {
    psi.check_dim(t.hilbert_dim())?;
    let unit = psi.normalized()?;
    let d = t.d();
    let p = ComplexMatrix::outer(unit.psi(), unit.psi());
    let s = &(d * &p) + &(&p * d);
    let lhs = (&s * &s).trace().re;

    let expectation_d = expectation(d, unit.psi())?;
    let expectation_d2 = expectation(&(d * d), unit.psi())?;
    let reference_rhs = 3.0 * expectation_d * expectation_d + expectation_d2;
    let derived_rhs = 2.0 * expectation_d * expectation_d + 2.0 * expectation_d2;
    Ok(CrossTermReport {
        lhs,
        reference_rhs,
        derived_rhs,
        lhs_minus_reference: lhs - reference_rhs,
        lhs_minus_derived: lhs - derived_rhs,
        expectation_d,
        expectation_d2,
    })
}

/// Taylor coefficients `c₀..c_order` of `s(ε) = Tr f((D + εP_ψ)²/Λ²)` at
/// `ε = 0`, traced over the physical subspace when configured.
///
/// Polynomial cutoffs are expanded exactly as matrix polynomials in `ε`.
/// The Gaussian cutoff is handled by sampling the entire function `s` on a
/// circle in the complex `ε` plane and taking its discrete Fourier
/// coefficients. `c₀` is always the bosonic action.
pub fn perturbative_expansion(
    t: &FiniteSpectralTriple,
    psi: &FermionState,
    cfg: &ActionConfig,
    order: usize,
) -> Result<Vec<f64>, ActionError> {
    if order > MAX_EXPANSION_ORDER {
        return Err(ActionError::OrderTooHigh(order));
    }
    psi.check_dim(t.hilbert_dim())?;
    cfg.check_dim(t.hilbert_dim())?;
    if order >= 1 {
        match cfg.cutoff {
            CutoffFunction::Sharp => return Err(ActionError::NonSmoothCutoff("sharp")),
            CutoffFunction::PolynomialDecay { .. } => return Err(ActionError::NonSmoothCutoff("polynomial-decay")),
            _ => {}
        }
    }

    let mut coeffs = vec![0.0; order + 1];
    coeffs[0] = bosonic_action(t, cfg)?;
    if order == 0 || psi.is_zero() {
        return Ok(coeffs);
    }
    let p = state_projector(psi)?;
    let higher = match &cfg.cutoff {
        CutoffFunction::Polynomial { coefficients } => polynomial_coefficients(t.d(), &p, cfg, coefficients, order),
        CutoffFunction::Gaussian => gaussian_coefficients(t.d(), &p, cfg, order),
        _ => unreachable!("rejected above"),
    };
    coeffs[1..].copy_from_slice(&higher[1..]);
    Ok(coeffs)
}

fn projected_trace(m: &DMatrix<Complex64>, cfg: &ActionConfig) -> Complex64 {
    match &cfg.physical_projector {
        None => m.trace(),
        Some(p) => (p.as_dmatrix() * m).trace(),
    }
}

/// Exact coefficients for `f(x) = Σ aₘ xᵐ`: `X(ε) = (D² + ε(DP+PD) + ε²P)/Λ²`
/// is raised to each power as a polynomial in `ε` truncated at `order`.
fn polynomial_coefficients(
    d: &ComplexMatrix,
    p: &ComplexMatrix,
    cfg: &ActionConfig,
    poly: &[f64],
    order: usize,
) -> Vec<f64> {
    let n = d.dim();
    let inv = 1.0 / (cfg.lambda * cfg.lambda);
    let d = d.as_dmatrix();
    let p = p.as_dmatrix();
    let x_terms = [
        (d * d) * Complex64::new(inv, 0.0),
        (d * p + p * d) * Complex64::new(inv, 0.0),
        (p * p) * Complex64::new(inv, 0.0),
    ];

    let mut power: Vec<DMatrix<Complex64>> = vec![DMatrix::zeros(n, n); order + 1];
    power[0] = DMatrix::identity(n, n);
    let mut coeffs = vec![0.0; order + 1];
    for (m, &a) in poly.iter().enumerate() {
        if m > 0 {
            let mut next = vec![DMatrix::zeros(n, n); order + 1];
            for (i, pi) in power.iter().enumerate() {
                for (k, xk) in x_terms.iter().enumerate() {
                    if i + k <= order {
                        next[i + k] += pi * xk;
                    }
                }
            }
            power = next;
        }
        for (k, pk) in power.iter().enumerate() {
            coeffs[k] += a * projected_trace(pk, cfg).re;
        }
    }
    coeffs
}

/// Cauchy-integral coefficients of `s(ε) = Tr exp(−(D + εP)²/Λ²)`.
fn gaussian_coefficients(d: &ComplexMatrix, p: &ComplexMatrix, cfg: &ActionConfig, order: usize) -> Vec<f64> {
    let inv = 1.0 / (cfg.lambda * cfg.lambda);
    let d_norm = d.frobenius_norm();
    // keep |ε|·‖DP+PD‖/Λ² of order one so exp stays well scaled on the circle
    let radius = 1.0 / (1.0 + 2.0 * d_norm * inv);
    let d = d.as_dmatrix();
    let p = p.as_dmatrix();

    let samples: Vec<Complex64> = (0..CONTOUR_POINTS)
        .map(|j| {
            let theta = 2.0 * std::f64::consts::PI * j as f64 / CONTOUR_POINTS as f64;
            let eps = Complex64::from_polar(radius, theta);
            let m = d + p * eps;
            let x = (&m * &m) * Complex64::new(-inv, 0.0);
            projected_trace(&x.exp(), cfg)
        })
        .collect();

    (0..=order)
        .map(|k| {
            let sum: Complex64 = samples
                .iter()
                .enumerate()
                .map(|(j, s)| {
                    let theta = 2.0 * std::f64::consts::PI * (j * k) as f64 / CONTOUR_POINTS as f64;
                    s * Complex64::from_polar(1.0, -theta)
                })
                .sum();
            sum.re / (CONTOUR_POINTS as f64 * radius.powi(k as i32))
        })
        .collect()
}

/// Number of spectrum entries with `|λ| ≤ lambda`.
pub fn weyl_count(spectrum: &[f64], lambda: f64) -> usize {
    spectrum.iter().filter(|x| x.abs() <= lambda).count()
}

/// Dirac spectrum of the circle with the antiperiodic spin structure,
/// `λₙ = n + ½` for `n_min ≤ n ≤ n_max`.
pub fn circle_spectrum(n_min: i64, n_max: i64) -> Vec<f64> {
    (n_min..=n_max).map(|n| n as f64 + 0.5).collect()
}

/// `(Λ, count)` on an evenly spaced grid of `steps` points, endpoints included.
pub fn weyl_scan(spectrum: &[f64], lambda_min: f64, lambda_max: f64, steps: usize) -> Vec<(f64, usize)> {
    let grid: Vec<f64> = match steps {
        0 => vec![],
        1 => vec![lambda_min],
        _ => (0..steps).map(|i| lambda_min + (lambda_max - lambda_min) * i as f64 / (steps - 1) as f64).collect(),
    };
    grid.into_iter().map(|l| (l, weyl_count(spectrum, l))).collect()
}

/// Ordinary least-squares slope of `y` against `x`.
pub fn least_squares_slope(points: &[(f64, f64)]) -> Option<f64> {
    if points.len() < 2 {
        return None;
    }
    let n = points.len() as f64;
    let mean_x = points.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mean_x).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mean_x) * (p.1 - mean_y)).sum();
    if sxx == 0.0 {
        None
    } else {
        Some(sxy / sxx)
    }
}
