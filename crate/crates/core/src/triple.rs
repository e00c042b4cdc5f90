//! Finite spectral triples: sign conventions, axiom checks and inner
//! fluctuations of the Dirac operator.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{AntiUnitaryOp, ComplexMatrix, LinalgError, DEFAULT_TOL};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TripleError {
    #[error("unsupported KO-dimension {0}: only even KO-dimensions are handled")]
    UnsupportedKODimension(i64),
    #[error("{what}: dimension {found}, Hilbert space has dimension {expected}")]
    DimensionMismatch { what: String, expected: usize, found: usize },
    #[error("fluctuation is not Hermitian: residual {residual:.3e} exceeds {tol:.3e}")]
    NotHermitian { residual: f64, tol: f64 },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn as_i8(self) -> i8 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Plus => "+1",
            Sign::Minus => "-1",
        })
    }
}

/// Commutation signs of the real structure: `J² = ε`, `JD = ε′DJ`, `Jγ = ε″γJ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignTable {
    pub eps: Sign,
    pub eps_prime: Sign,
    pub eps_dprime: Sign,
}

impl SignTable {
    pub const fn new(eps: Sign, eps_prime: Sign, eps_dprime: Sign) -> Self {
        Self { eps, eps_prime, eps_dprime }
    }
}

/// Default sign table for an even KO-dimension (taken mod 8).
pub fn sign_table(ko_dim: i64) -> Result<SignTable, TripleError> {
    use Sign::{Minus, Plus};
    match ko_dim.rem_euclid(8) {
        0 => Ok(SignTable::new(Plus, Plus, Plus)),
        2 => Ok(SignTable::new(Minus, Plus, Minus)),
        4 => Ok(SignTable::new(Minus, Plus, Plus)),
        6 => Ok(SignTable::new(Plus, Plus, Minus)),
        _ => Err(TripleError::UnsupportedKODimension(ko_dim)),
    }
}

/// Even real finite spectral triple given by its represented data.
#[derive(Debug, Clone)]
pub struct FiniteSpectralTriple {
    algebra_gens: Vec<ComplexMatrix>,
    d: ComplexMatrix,
    gamma: ComplexMatrix,
    j: AntiUnitaryOp,
    ko_dim: u8,
    signs: SignTable,
}

impl FiniteSpectralTriple {
    /// Assembles a triple, checking only that all dimensions agree. Axioms are
    /// left to [`check_axioms`] so that deliberately broken triples can be
    /// represented.
    pub fn new(
        algebra_gens: Vec<ComplexMatrix>,
        d: ComplexMatrix,
        gamma: ComplexMatrix,
        j: AntiUnitaryOp,
        ko_dim: i64,
    ) -> Result<Self, TripleError> {
        let signs = sign_table(ko_dim)?;
        let n = d.dim();
        let check = |what: &str, found: usize| {
            if found == n {
                Ok(())
            } else {
                Err(TripleError::DimensionMismatch { what: what.to_string(), expected: n, found })
            }
        };
        check("grading", gamma.dim())?;
        check("real structure", j.dim())?;
        for (k, a) in algebra_gens.iter().enumerate() {
            check(&format!("algebra generator {k}"), a.dim())?;
        }
        Ok(Self { algebra_gens, d, gamma, j, ko_dim: ko_dim.rem_euclid(8) as u8, signs })
    }

    /// Replaces the default sign table for the KO-dimension.
    pub fn with_signs(mut self, signs: SignTable) -> Self {
        self.signs = signs;
        self
    }

    pub fn with_d(&self, d: ComplexMatrix) -> Result<Self, TripleError> {
        Self::new(self.algebra_gens.clone(), d, self.gamma.clone(), self.j.clone(), self.ko_dim.into())
            .map(|t| t.with_signs(self.signs))
    }

    pub fn with_gamma(&self, gamma: ComplexMatrix) -> Result<Self, TripleError> {
        Self::new(self.algebra_gens.clone(), self.d.clone(), gamma, self.j.clone(), self.ko_dim.into())
            .map(|t| t.with_signs(self.signs))
    }

    pub fn with_j(&self, j: AntiUnitaryOp) -> Result<Self, TripleError> {
        Self::new(self.algebra_gens.clone(), self.d.clone(), self.gamma.clone(), j, self.ko_dim.into())
            .map(|t| t.with_signs(self.signs))
    }

    pub fn hilbert_dim(&self) -> usize {
        self.d.dim()
    }

    pub fn algebra_gens(&self) -> &[ComplexMatrix] {
        &self.algebra_gens
    }

    pub fn d(&self) -> &ComplexMatrix {
        &self.d
    }

    pub fn gamma(&self) -> &ComplexMatrix {
        &self.gamma
    }

    pub fn j(&self) -> &AntiUnitaryOp {
        &self.j
    }

    pub fn ko_dim(&self) -> u8 {
        self.ko_dim
    }

    pub fn signs(&self) -> SignTable {
        self.signs
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axiom {
    /// `D = D†`
    SelfAdjoint,
    /// `γ = γ†`, `γ² = 1`
    GradingInvolution,
    /// `γD = −Dγ`
    GradingAnticommutesD,
    /// `[γ, a] = 0`
    GradingCommutesAlgebra,
    /// `J² = ε`
    RealStructureSquare,
    /// `JD = ε′DJ`
    RealStructureD,
    /// `Jγ = ε″γJ`
    RealStructureGrading,
    /// `[a, Jb*J⁻¹] = 0`
    OrderZero,
    /// `[[D, a], Jb*J⁻¹] = 0`
    OrderOne,
}

impl Axiom {
    pub const ALL: [Axiom; 9] = [
        Axiom::SelfAdjoint,
        Axiom::GradingInvolution,
        Axiom::GradingAnticommutesD,
        Axiom::GradingCommutesAlgebra,
        Axiom::RealStructureSquare,
        Axiom::RealStructureD,
        Axiom::RealStructureGrading,
        Axiom::OrderZero,
        Axiom::OrderOne,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Axiom::SelfAdjoint => "self_adjoint",
            Axiom::GradingInvolution => "grading_involution",
            Axiom::GradingAnticommutesD => "grading_anticommutes_d",
            Axiom::GradingCommutesAlgebra => "grading_commutes_algebra",
            Axiom::RealStructureSquare => "real_structure_square",
            Axiom::RealStructureD => "real_structure_d",
            Axiom::RealStructureGrading => "real_structure_grading",
            Axiom::OrderZero => "order_zero",
            Axiom::OrderOne => "order_one",
        }
    }

    /// Whether the axiom involves the real structure `J`.
    pub fn involves_real_structure(self) -> bool {
        matches!(
            self,
            Axiom::RealStructureSquare
                | Axiom::RealStructureD
                | Axiom::RealStructureGrading
                | Axiom::OrderZero
                | Axiom::OrderOne
        )
    }
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AxiomResult {
    pub axiom: Axiom,
    /// Max-norm residual over all checked elements.
    pub residual: f64,
    pub passed: bool,
    /// Where the largest residual occurred.
    pub worst: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AxiomReport {
    pub tol: f64,
    pub results: Vec<AxiomResult>,
}

impl AxiomReport {
    pub fn passed(&self) -> bool {
        self.results.iter().all(|r| r.passed)
    }

    pub fn get(&self, axiom: Axiom) -> &AxiomResult {
        self.results.iter().find(|r| r.axiom == axiom).expect("every axiom is reported")
    }

    pub fn failed(&self) -> Vec<Axiom> {
        self.results.iter().filter(|r| !r.passed).map(|r| r.axiom).collect()
    }

    /// Result with the largest residual.
    pub fn worst(&self) -> &AxiomResult {
        self.results.iter().max_by(|a, b| a.residual.total_cmp(&b.residual)).expect("report is never empty")
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxiomOptions {
    pub tol: f64,
    /// 1 checks generators only, 2 adds all pairwise products, and so on.
    pub product_depth: usize,
}

impl Default for AxiomOptions {
    fn default() -> Self {
        Self { tol: DEFAULT_TOL, product_depth: 2 }
    }
}

/// Checks the even real spectral triple axioms with products of generators
/// up to depth 2.
pub fn check_axioms(t: &FiniteSpectralTriple, tol: f64) -> AxiomReport {
    check_axioms_with(t, &AxiomOptions { tol, ..AxiomOptions::default() })
}

pub fn check_axioms_with(t: &FiniteSpectralTriple, opts: &AxiomOptions) -> AxiomReport {
    let n = t.hilbert_dim();
    let id = ComplexMatrix::identity(n);
    let d = t.d();
    let gamma = t.gamma();
    let j = t.j();
    let signs = t.signs();
    let elements = algebra_elements(t.algebra_gens(), opts.product_depth);

    let mut results = Vec::with_capacity(Axiom::ALL.len());
    let mut push = |axiom: Axiom, residual: f64, worst: String| {
        results.push(AxiomResult { axiom, residual, passed: residual <= opts.tol, worst });
    };

    let (r, w) = entrywise(&(d - &d.adjoint()));
    push(Axiom::SelfAdjoint, r, w);

    let (r_sq, w_sq) = entrywise(&(&(gamma * gamma) - &id));
    let (r_adj, w_adj) = entrywise(&(gamma - &gamma.adjoint()));
    if r_sq >= r_adj {
        push(Axiom::GradingInvolution, r_sq, format!("gamma^2 - 1 {w_sq}"));
    } else {
        push(Axiom::GradingInvolution, r_adj, format!("gamma - gamma^dagger {w_adj}"));
    }

    let (r, w) = entrywise(&gamma.anticommutator(d));
    push(Axiom::GradingAnticommutesD, r, w);

    let (r, w) = over_elements(&elements, |a| gamma.commutator(a).max_abs());
    push(Axiom::GradingCommutesAlgebra, r, w);

    let (r, w) = entrywise(&(&j.square() - &id.scale(signs.eps.value())));
    push(Axiom::RealStructureSquare, r, w);

    let (r, w) = entrywise(&(&j.conjugate_operator(d) - &d.scale(signs.eps_prime.value())));
    push(Axiom::RealStructureD, r, w);

    let (r, w) = entrywise(&(&j.conjugate_operator(gamma) - &gamma.scale(signs.eps_dprime.value())));
    push(Axiom::RealStructureGrading, r, w);

    // J b* J^-1 for every element b
    let opposite: Vec<ComplexMatrix> = elements.iter().map(|(_, b)| j.conjugate_operator(&b.adjoint())).collect();

    let (r, w) = over_pairs(&elements, &opposite, |a, b_op| a.commutator(b_op).max_abs());
    push(Axiom::OrderZero, r, w);

    let d_commutators: Vec<(String, ComplexMatrix)> =
        elements.iter().map(|(label, a)| (label.clone(), d.commutator(a))).collect();
    let (r, w) = over_pairs(&d_commutators, &opposite, |da, b_op| da.commutator(b_op).max_abs());
    push(Axiom::OrderOne, r, w);

    AxiomReport { tol: opts.tol, results }
}

/// Generators and their products up to `depth` factors, with labels.
fn algebra_elements(gens: &[ComplexMatrix], depth: usize) -> Vec<(String, ComplexMatrix)> {
    let mut all: Vec<(String, ComplexMatrix)> =
        gens.iter().enumerate().map(|(k, g)| (format!("a{k}"), g.clone())).collect();
    let mut frontier = all.clone();
    for _ in 1..depth {
        let mut next = Vec::new();
        for (label, m) in &frontier {
            for (k, g) in gens.iter().enumerate() {
                next.push((format!("{label}*a{k}"), m * g));
            }
        }
        all.extend(next.iter().cloned());
        frontier = next;
    }
    all
}

fn entrywise(m: &ComplexMatrix) -> (f64, String) {
    let (i, j, r) = m.argmax_abs();
    (r, format!("entry ({i}, {j})"))
}

fn over_elements(elements: &[(String, ComplexMatrix)], f: impl Fn(&ComplexMatrix) -> f64) -> (f64, String) {
    let mut best = (0.0, String::from("none"));
    for (label, a) in elements {
        let r = f(a);
        if r > best.0 {
            best = (r, label.clone());
        }
    }
    best
}

fn over_pairs(
    left: &[(String, ComplexMatrix)],
    right: &[ComplexMatrix],
    f: impl Fn(&ComplexMatrix, &ComplexMatrix) -> f64,
) -> (f64, String) {
    let mut best = (0.0, String::from("none"));
    for (label_a, a) in left {
        for (k, b) in right.iter().enumerate() {
            let r = f(a, b);
            if r > best.0 {
                best = (r, format!("({label_a}, element {k})"));
            }
        }
    }
    best
}

/// Inner fluctuation `D ↦ D + A + ε′·JAJ⁻¹`.
pub fn fluctuate(t: &FiniteSpectralTriple, a: &ComplexMatrix) -> Result<FiniteSpectralTriple, TripleError> {
    fluctuate_tol(t, a, DEFAULT_TOL)
}

pub fn fluctuate_tol(
    t: &FiniteSpectralTriple,
    a: &ComplexMatrix,
    tol: f64,
) -> Result<FiniteSpectralTriple, TripleError> {
    if a.dim() != t.hilbert_dim() {
        return Err(TripleError::DimensionMismatch {
            what: "fluctuation".into(),
            expected: t.hilbert_dim(),
            found: a.dim(),
        });
    }
    let residual = a.hermiticity_residual();
    if residual > tol {
        return Err(TripleError::NotHermitian { residual, tol });
    }
    let mirrored = t.j().conjugate_operator(a).scale(t.signs().eps_prime.value());
    let d = &(t.d() + a) + &mirrored;
    t.with_d(d)
}
