//! Numerical toolkit for finite spectral triples and spectral actions.
//!
//! - [`linalg`]: dense complex matrices, Hermitian eigendecomposition,
//!   matrix functions and antiunitary operators.
//! - [`triple`]: finite spectral triples, their axioms and inner fluctuations.
//! - [`action`]: bosonic, fermionic and extended spectral actions, the
//!   expansion in the state projector, and eigenvalue counting.
//! - [`model`]: a one-generation lepton model with an optional sterile state.

pub mod action;
pub mod linalg;
pub mod model;
pub mod triple;

pub use action::{
    bosonic_action, cross_term_quadratic, cutoff_eval, extended_action, fermionic_action, perturbative_expansion,
    state_projector, weyl_count, ActionConfig, ActionError, CrossTermReport, CutoffFunction, FermionState,
};
pub use linalg::{
    apply_antiunitary, eigh, matrix_function, AntiUnitaryOp, ComplexMatrix, EigenDecomposition, LinalgError,
    MatrixLiteral,
};
pub use model::{
    build_lepton_triple, check_intertwine, gauge_transform, invariant_term, majorana_term, neutrino_mass_estimate,
    sample_su2, weinberg_term, GaugeElement, HiggsDoublet, LeptonDoublet, LeptonModelParams, ModelError,
};
pub use triple::{
    check_axioms, fluctuate, sign_table, Axiom, AxiomReport, FiniteSpectralTriple, SignTable, TripleError,
};
