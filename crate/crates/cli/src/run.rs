//! Scenario dispatch: one function per subcommand, each filling a
//! [`RunReport`].

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spectral_lab::action::{circle_spectrum, least_squares_slope, weyl_scan, MAX_EXPANSION_ORDER};
use spectral_lab::linalg::eigvalsh;
use spectral_lab::model::{self, light_neutrino_mass, physical_projector, sample_su2_with};
use spectral_lab::triple::{check_axioms_with, AxiomOptions};
use spectral_lab::{
    bosonic_action, build_lepton_triple, check_intertwine, cross_term_quadratic, extended_action, fermionic_action,
    gauge_transform, invariant_term, neutrino_mass_estimate, perturbative_expansion, weinberg_term, ActionConfig,
    AntiUnitaryOp, Axiom, ComplexMatrix, FermionState, FiniteSpectralTriple, HiggsDoublet, LeptonDoublet,
};

use crate::config::{ProjectorSpec, ScenarioConfig, SpectrumSpec};
use crate::error::CliError;
use crate::report::{RunReport, Table, Value};

/// Threshold for the bilinear invariant and the `σ₂` intertwining residual.
pub const INVARIANCE_TOL: f64 = 1e-12;
/// Relative threshold for the modulus of the Weinberg term.
pub const WEINBERG_TOL: f64 = 1e-10;

const DEFAULT_SAMPLES: usize = 1000;
const DEFAULT_ORDER: usize = 2;
const DEFAULT_LAMBDA_MIN: f64 = 10.0;
const DEFAULT_LAMBDA_MAX: f64 = 40.0;
const DEFAULT_STEPS: usize = 31;
const DEFAULT_CIRCLE_N: i64 = 5000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    CheckAxioms,
    BosonicAction,
    FermionicAction,
    ExtendedAction,
    Expand,
    VerifyIdentity,
    GaugeInvariance,
    MassEstimate,
    WeylScan,
}

impl Command {
    pub const ALL: [Command; 9] = [
        Command::CheckAxioms,
        Command::BosonicAction,
        Command::FermionicAction,
        Command::ExtendedAction,
        Command::Expand,
        Command::VerifyIdentity,
        Command::GaugeInvariance,
        Command::MassEstimate,
        Command::WeylScan,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::CheckAxioms => "check-axioms",
            Command::BosonicAction => "bosonic-action",
            Command::FermionicAction => "fermionic-action",
            Command::ExtendedAction => "extended-action",
            Command::Expand => "expand",
            Command::VerifyIdentity => "verify-identity",
            Command::GaugeInvariance => "gauge-invariance",
            Command::MassEstimate => "mass-estimate",
            Command::WeylScan => "weyl-scan",
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Command {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Command::ALL.into_iter().find(|c| c.name() == s).ok_or_else(|| format!("unknown command `{s}`"))
    }
}

/// Runs one scenario and stamps the wall-clock duration.
pub fn run_scenario(command: Command, cfg: &ScenarioConfig) -> Result<RunReport, CliError> {
    let start = Instant::now();
    let mut report = RunReport::new(command.name());
    let tol = cfg.tolerance()?;
    report.input("tol", tol);
    match command {
        Command::CheckAxioms => check_axioms_cmd(cfg, tol, &mut report)?,
        Command::BosonicAction => bosonic_cmd(cfg, &mut report)?,
        Command::FermionicAction => fermionic_cmd(cfg, &mut report)?,
        Command::ExtendedAction => extended_cmd(cfg, &mut report)?,
        Command::Expand => expand_cmd(cfg, &mut report)?,
        Command::VerifyIdentity => identity_cmd(cfg, tol, &mut report)?,
        Command::GaugeInvariance => gauge_cmd(cfg, &mut report)?,
        Command::MassEstimate => mass_cmd(cfg, &mut report)?,
        Command::WeylScan => weyl_cmd(cfg, &mut report)?,
    }
    report.set_duration_ms(start.elapsed().as_secs_f64() * 1e3);
    Ok(report)
}

enum TripleSource {
    Lepton,
    Inline,
}

fn literal(what: &str, lit: &spectral_lab::MatrixLiteral) -> Result<ComplexMatrix, CliError> {
    ComplexMatrix::try_from(lit.clone()).map_err(|e| CliError::Validation(format!("{what}: {e}")))
}

fn build_triple(
    cfg: &ScenarioConfig,
    report: &mut RunReport,
) -> Result<(FiniteSpectralTriple, TripleSource), CliError> {
    let section = cfg.triple.as_ref().ok_or_else(|| CliError::Validation("a [triple] section is required".into()))?;
    let (triple, source) = match (&section.builtin, section.has_inline()) {
        (Some(_), true) => {
            return Err(CliError::Validation("triple: `builtin` and inline matrices are mutually exclusive".into()))
        }
        (Some(name), false) if name == "lepton" => {
            let p = cfg.model.params();
            report.input("model.y_e", p.y_e);
            report.input("model.y_nu", p.y_nu);
            report.input("model.v_gev", p.v);
            report.input("model.include_sterile", p.include_sterile);
            report.input("model.m_r_gev", p.m_r);
            (build_lepton_triple(&p)?, TripleSource::Lepton)
        }
        (Some(name), false) => return Err(CliError::Validation(format!("triple.builtin: unknown builtin `{name}`"))),
        (None, false) => return Err(CliError::Validation("triple: give either `builtin` or inline matrices".into())),
        (None, true) => {
            let d = literal(
                "triple.d",
                section
                    .d
                    .as_ref()
                    .ok_or_else(|| CliError::Validation("triple.d: required for an inline triple".into()))?,
            )?;
            let n = d.dim();
            let gamma = match &section.gamma {
                Some(g) => literal("triple.gamma", g)?,
                None => ComplexMatrix::identity(n),
            };
            let j = match &section.j_unitary {
                Some(u) => AntiUnitaryOp::new(literal("triple.j_unitary", u)?)
                    .map_err(|e| CliError::Validation(format!("triple.j_unitary: {e}")))?,
                None => AntiUnitaryOp::conjugation(n),
            };
            let gens = section
                .generators
                .iter()
                .flatten()
                .enumerate()
                .map(|(k, g)| literal(&format!("triple.generators[{k}]"), g))
                .collect::<Result<Vec<_>, _>>()?;
            let ko = section.ko_dim.unwrap_or(0);
            (FiniteSpectralTriple::new(gens, d, gamma, j, ko)?, TripleSource::Inline)
        }
    };
    report.input(
        "triple",
        match source {
            TripleSource::Lepton => "lepton",
            TripleSource::Inline => "inline",
        },
    );
    report.input("hilbert_dim", triple.hilbert_dim());
    report.input("ko_dim", triple.ko_dim() as i64);
    Ok((triple, source))
}

fn action_config(
    cfg: &ScenarioConfig,
    triple: &FiniteSpectralTriple,
    source: &TripleSource,
    report: &mut RunReport,
) -> Result<ActionConfig, CliError> {
    let section = cfg.action.as_ref().ok_or_else(|| CliError::Validation("an [action] section is required".into()))?;
    let mut ac = ActionConfig::new(section.lambda, section.cutoff.clone())?;
    report.input("lambda", section.lambda);
    report.input("cutoff", section.cutoff.kind());
    if let spectral_lab::CutoffFunction::Polynomial { coefficients } = &section.cutoff {
        report.input("cutoff_degree", coefficients.len().saturating_sub(1));
    }
    if let spectral_lab::CutoffFunction::PolynomialDecay { exponent } = &section.cutoff {
        report.input("cutoff_exponent", *exponent);
    }
    let projector = match &section.physical_projector {
        None => None,
        Some(ProjectorSpec::Named(name)) if name == "sterile-excluded" => match source {
            TripleSource::Lepton => Some((physical_projector(&cfg.model.params()), name.clone())),
            TripleSource::Inline => {
                return Err(CliError::Validation(
                    "action.physical_projector: `sterile-excluded` needs the builtin lepton triple".into(),
                ))
            }
        },
        Some(ProjectorSpec::Named(name)) => {
            return Err(CliError::Validation(format!("action.physical_projector: unknown projector `{name}`")))
        }
        Some(ProjectorSpec::Matrix(lit)) => Some((literal("action.physical_projector", lit)?, "matrix".into())),
    };
    if let Some((p, label)) = projector {
        if p.dim() != triple.hilbert_dim() {
            return Err(CliError::Validation(format!(
                "action.physical_projector: dimension {} does not match the Hilbert space ({})",
                p.dim(),
                triple.hilbert_dim()
            )));
        }
        ac = ac.with_physical_projector(p)?;
        report.input("physical_projector", label);
    }
    Ok(ac)
}

fn fermion_state(cfg: &ScenarioConfig, dim: usize, report: &mut RunReport) -> Result<FermionState, CliError> {
    let section = cfg.state.as_ref().ok_or_else(|| CliError::Validation("a [state] section is required".into()))?;
    let state = match (&section.psi, section.zero) {
        (Some(_), true) => {
            return Err(CliError::Validation("state: `psi` and `zero = true` are mutually exclusive".into()))
        }
        (None, true) => FermionState::zero(dim),
        (None, false) => return Err(CliError::Validation("state: give `psi` or `zero = true`".into())),
        (Some(psi), false) => {
            if psi.len() != dim {
                return Err(CliError::Validation(format!(
                    "state.psi: {} components, Hilbert space has dimension {dim}",
                    psi.len()
                )));
            }
            if psi.iter().flatten().any(|x| !x.is_finite()) {
                return Err(CliError::Validation("state.psi: non-finite component".into()));
            }
            FermionState::new(psi.iter().map(|[re, im]| Complex64::new(*re, *im)).collect())
        }
    };
    report.input("state_norm_sqr", state.norm_sqr());
    Ok(state)
}

fn check_axioms_cmd(cfg: &ScenarioConfig, tol: f64, report: &mut RunReport) -> Result<(), CliError> {
    let (t, _) = build_triple(cfg, report)?;
    let depth = cfg.options.product_depth.unwrap_or(AxiomOptions::default().product_depth);
    if depth == 0 {
        return Err(CliError::Validation("options.product_depth: must be at least 1".into()));
    }
    report.input("product_depth", depth);
    let axioms = check_axioms_with(&t, &AxiomOptions { tol, product_depth: depth });
    for r in &axioms.results {
        report.residual(r.axiom.name(), r.residual);
        report.check(r.axiom.name(), r.passed);
    }
    report.result("failed_count", axioms.failed().len());
    report.result("worst_axiom", axioms.worst().axiom.name());
    report.result("failed", axioms.failed().iter().map(|a: &Axiom| a.name()).collect::<Vec<_>>().join(" "));
    Ok(())
}

fn bosonic_cmd(cfg: &ScenarioConfig, report: &mut RunReport) -> Result<(), CliError> {
    let (t, source) = build_triple(cfg, report)?;
    let ac = action_config(cfg, &t, &source, report)?;
    report.result("bosonic_action", bosonic_action(&t, &ac)?);
    Ok(())
}

fn fermionic_cmd(cfg: &ScenarioConfig, report: &mut RunReport) -> Result<(), CliError> {
    let (t, _) = build_triple(cfg, report)?;
    let psi = fermion_state(cfg, t.hilbert_dim(), report)?;
    report.result("fermionic_action", fermionic_action(&t, &psi)?);
    Ok(())
}

fn extended_cmd(cfg: &ScenarioConfig, report: &mut RunReport) -> Result<(), CliError> {
    let (t, source) = build_triple(cfg, report)?;
    let ac = action_config(cfg, &t, &source, report)?;
    let psi = fermion_state(cfg, t.hilbert_dim(), report)?;
    let extended = extended_action(&t, &psi, &ac)?;
    let bosonic = bosonic_action(&t, &ac)?;
    report.result("extended_action", extended);
    report.result("bosonic_action", bosonic);
    report.result("difference", extended - bosonic);
    Ok(())
}

fn expand_cmd(cfg: &ScenarioConfig, report: &mut RunReport) -> Result<(), CliError> {
    let (t, source) = build_triple(cfg, report)?;
    let ac = action_config(cfg, &t, &source, report)?;
    let psi = fermion_state(cfg, t.hilbert_dim(), report)?;
    let order = cfg.options.order.unwrap_or(DEFAULT_ORDER);
    if order > MAX_EXPANSION_ORDER {
        return Err(CliError::Validation(format!(
            "options.order: {order} exceeds the maximum of {MAX_EXPANSION_ORDER}"
        )));
    }
    report.input("order", order);
    let coeffs = perturbative_expansion(&t, &psi, &ac, order)?;
    for (k, c) in coeffs.iter().enumerate() {
        report.result(&format!("c{k}"), *c);
    }
    let partial: f64 = coeffs.iter().sum();
    let extended = extended_action(&t, &psi, &ac)?;
    report.result("partial_sum", partial);
    report.result("extended_action", extended);
    report.residual("partial_sum_vs_extended", (partial - extended).abs());
    Ok(())
}

fn identity_cmd(cfg: &ScenarioConfig, tol: f64, report: &mut RunReport) -> Result<(), CliError> {
    let (t, _) = build_triple(cfg, report)?;
    let psi = fermion_state(cfg, t.hilbert_dim(), report)?;
    let r = cross_term_quadratic(&t, &psi)?;
    report.result("lhs", r.lhs);
    report.result("reference_rhs", r.reference_rhs);
    report.result("derived_rhs", r.derived_rhs);
    report.result("lhs_minus_reference", r.lhs_minus_reference);
    report.result("lhs_minus_derived", r.lhs_minus_derived);
    report.result("expectation_d", r.expectation_d);
    report.result("expectation_d2", r.expectation_d2);
    let residual = r.lhs_minus_derived.abs();
    report.residual("derived_identity", residual);
    report.check("derived_identity", residual <= tol * r.lhs.abs().max(1.0));
    Ok(())
}

fn seed(cfg: &ScenarioConfig, report: &mut RunReport) -> u64 {
    let seed = cfg.options.seed.unwrap_or(0);
    report.input("seed", seed);
    seed
}

fn uniform_complex(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
}

fn gauge_cmd(cfg: &ScenarioConfig, report: &mut RunReport) -> Result<(), CliError> {
    let samples = cfg.options.samples.unwrap_or(DEFAULT_SAMPLES);
    if samples == 0 {
        return Err(CliError::Validation("options.samples: must be at least 1".into()));
    }
    let params = cfg.model.params();
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed(cfg, report));
    report.input("samples", samples);
    report.input("kappa", params.kappa);
    report.input("invariance_tol", INVARIANCE_TOL);
    report.input("weinberg_tol", WEINBERG_TOL);

    let c = AntiUnitaryOp::conjugation(1);
    let (mut inv, mut modulus, mut intertwine, mut weinberg) = (0.0_f64, 0.0_f64, 0.0_f64, 0.0_f64);
    for _ in 0..samples {
        let g = sample_su2_with(&mut rng);
        let l = LeptonDoublet::new(uniform_complex(&mut rng), uniform_complex(&mut rng));
        let h = HiggsDoublet::new(uniform_complex(&mut rng), uniform_complex(&mut rng));
        let n = uniform_complex(&mut rng);
        let (l2, h2) = gauge_transform(&l, &h, &g);

        let before = invariant_term(&h, &l, Some(n));
        let after = invariant_term(&h2, &l2, Some(n));
        inv = inv.max((before - after).norm());
        modulus = modulus.max((before.norm() - after.norm()).abs());
        intertwine = intertwine.max(check_intertwine(g.h())?);

        let w0 = weinberg_term(&params, &l, &h, &c)?.norm();
        let w1 = weinberg_term(&params, &l2, &h2, &c)?.norm();
        weinberg = weinberg.max((w0 - w1).abs() / w0.max(1.0));
    }
    report.residual("invariant_term", inv);
    report.residual("invariant_modulus", modulus);
    report.residual("intertwine", intertwine);
    report.residual("weinberg_modulus", weinberg);
    report.check("invariant_term", inv <= INVARIANCE_TOL);
    report.check("invariant_modulus", modulus <= INVARIANCE_TOL);
    report.check("intertwine", intertwine <= INVARIANCE_TOL);
    report.check("weinberg_modulus", weinberg <= WEINBERG_TOL);
    Ok(())
}

fn mass_cmd(cfg: &ScenarioConfig, report: &mut RunReport) -> Result<(), CliError> {
    let m = &cfg.model;
    report.input("kappa", m.kappa);
    report.input("v_gev", m.v_gev);
    report.input("lambda_gev", m.lambda_gev);
    let ev = neutrino_mass_estimate(m.kappa, m.v_gev, m.lambda_gev).map_err(|e| match e {
        model::ModelError::NonPositiveInput(name) => CliError::Validation(match name {
            "v" => "model.v_gev: must be positive and finite".to_string(),
            "lambda" => "model.lambda_gev: must be positive and finite".to_string(),
            "kappa" => "model.kappa: must be finite and nonnegative".to_string(),
            other => format!("{other}: must be positive"),
        }),
        other => other.into(),
    })?;
    report.result("mass_ev", ev);
    report.result("mass_gev", ev / model::GEV_TO_EV);

    let params = m.params();
    if params.include_sterile && params.m_r > 0.0 {
        let light = light_neutrino_mass(&params)?;
        let m_d = params.dirac_mass();
        let estimate = m_d * m_d / params.m_r;
        report.input("y_nu", params.y_nu);
        report.input("m_r_gev", params.m_r);
        report.result("dirac_mass_gev", m_d);
        report.result("seesaw_light_mass_gev", light);
        report.result("seesaw_estimate_gev", estimate);
        if estimate > 0.0 {
            report.residual("seesaw_relative", ((light - estimate) / estimate).abs());
        }
    }
    Ok(())
}

fn weyl_cmd(cfg: &ScenarioConfig, report: &mut RunReport) -> Result<(), CliError> {
    let o = &cfg.options;
    let spectrum = match (&o.spectrum, &cfg.triple) {
        (Some(SpectrumSpec::Circle { n_min, n_max }), _) => {
            if n_min > n_max {
                return Err(CliError::Validation("options.spectrum: n_min exceeds n_max".into()));
            }
            report.input("spectrum", "circle");
            report.input("spectrum_n_min", *n_min);
            report.input("spectrum_n_max", *n_max);
            circle_spectrum(*n_min, *n_max)
        }
        (Some(SpectrumSpec::Values { values }), _) => {
            report.input("spectrum", "values");
            values.clone()
        }
        (None, Some(_)) => {
            let (t, _) = build_triple(cfg, report)?;
            report.input("spectrum", "dirac");
            eigvalsh(t.d(), spectral_lab::linalg::DEFAULT_TOL)?
        }
        (None, None) => {
            report.input("spectrum", "circle");
            report.input("spectrum_n_min", -DEFAULT_CIRCLE_N);
            report.input("spectrum_n_max", DEFAULT_CIRCLE_N);
            circle_spectrum(-DEFAULT_CIRCLE_N, DEFAULT_CIRCLE_N)
        }
    };
    if spectrum.iter().any(|x| !x.is_finite()) {
        return Err(CliError::Validation("options.spectrum: non-finite value".into()));
    }
    let lo = o.lambda_min.unwrap_or(DEFAULT_LAMBDA_MIN);
    let hi = o.lambda_max.unwrap_or(DEFAULT_LAMBDA_MAX);
    let steps = o.steps.unwrap_or(DEFAULT_STEPS);
    if !(lo.is_finite() && hi.is_finite() && lo >= 0.0 && lo <= hi) {
        return Err(CliError::Validation(format!(
            "options.lambda_min/lambda_max: need 0 <= min <= max, got [{lo}, {hi}]"
        )));
    }
    if steps == 0 {
        return Err(CliError::Validation("options.steps: must be at least 1".into()));
    }
    report.input("spectrum_len", spectrum.len());
    report.input("lambda_min", lo);
    report.input("lambda_max", hi);
    report.input("steps", steps);

    let scan = weyl_scan(&spectrum, lo, hi, steps);
    let points: Vec<(f64, f64)> = scan.iter().map(|&(l, c)| (l, c as f64)).collect();
    report.result("points", scan.len());
    match least_squares_slope(&points) {
        Some(slope) => report.result("slope", slope),
        None => report.result("slope", "undefined"),
    }
    report.set_table(Table {
        columns: vec!["lambda".into(), "count".into()],
        rows: scan.into_iter().map(|(l, c)| vec![Value::Num(l), Value::from(c)]).collect(),
    });
    Ok(())
}
