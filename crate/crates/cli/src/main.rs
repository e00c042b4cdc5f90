use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use spectral_lab_cli::report::Format;
use spectral_lab_cli::{run_batch, run_scenario, BatchFile, CliError, Command, RunReport, ScenarioConfig};

#[derive(Parser)]
#[command(name = "spectral-lab", version, about = "Finite spectral triple and spectral action scenarios")]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Args, Clone)]
struct Common {
    /// Scenario file (TOML).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override a config value on a dotted path, e.g. `model.kappa=0.5`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Seed for sampled scenarios; overrides `options.seed`.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Sub {
    /// Check the axioms of a finite spectral triple.
    CheckAxioms(Common),
    /// Bosonic spectral action Tr f(D²/Λ²).
    BosonicAction(Common),
    /// Fermionic action ⟨ψ|Dψ⟩.
    FermionicAction(Common),
    /// Spectral action of D plus the state projector.
    ExtendedAction(Common),
    /// Coefficients of the expansion in the state projector.
    Expand(Common),
    /// Quadratic cross-term identity against both closed forms.
    VerifyIdentity(Common),
    /// Gauge invariance of the Yukawa and Weinberg terms over Haar samples.
    GaugeInvariance(Common),
    /// Neutrino mass scale κv²/Λ and the see-saw light mass.
    MassEstimate(Common),
    /// Eigenvalue counting function over a range of cutoffs.
    WeylScan {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        lambda_min: Option<f64>,
        #[arg(long)]
        lambda_max: Option<f64>,
        #[arg(long)]
        steps: Option<usize>,
    },
    /// Run the scenarios listed in a batch file.
    Batch {
        /// Batch file with `[[scenario]]` entries.
        #[arg(long)]
        config: PathBuf,
        /// Override applied to every scenario.
        #[arg(long = "set", value_name = "KEY=VALUE")]
        set: Vec<String>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        /// Scenarios evaluated in parallel.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
}

fn exit_for(report: &RunReport) -> u8 {
    if report.all_checks_passed() {
        0
    } else {
        1
    }
}

fn fail(e: &CliError) -> u8 {
    eprintln!("spectral-lab: {e}");
    e.exit_code() as u8
}

fn emit(text: &str) {
    let mut out = std::io::stdout().lock();
    // a closed pipe is not worth a panic
    let _ = out.write_all(text.as_bytes());
    let _ = out.flush();
}

fn single(command: Command, common: Common, extra: Vec<String>) -> u8 {
    let mut sets = common.set;
    if let Some(seed) = common.seed {
        sets.push(format!("options.seed={seed}"));
    }
    sets.extend(extra);
    let result = ScenarioConfig::load(common.config.as_deref(), &sets).and_then(|cfg| run_scenario(command, &cfg));
    match result {
        Ok(report) => {
            emit(&report.render(common.format));
            let code = exit_for(&report);
            if code != 0 {
                eprintln!("spectral-lab: {command}: one or more checks failed");
            }
            code
        }
        Err(e) => fail(&e),
    }
}

fn batch(path: PathBuf, sets: Vec<String>, format: Format, jobs: usize) -> u8 {
    let file = match BatchFile::load(&path) {
        Ok(f) => f,
        Err(e) => return fail(&e),
    };
    let base = path.parent().map(|p| p.to_path_buf()).unwrap_or_default();
    let results = run_batch(&file, &base, &sets, jobs);
    let mut code = 0u8;
    let mut rendered = Vec::new();
    for (i, r) in results.iter().enumerate() {
        match r {
            Ok(report) => {
                code = code.max(exit_for(report));
                rendered.push(report.render(format));
            }
            Err(e) => {
                eprintln!("spectral-lab: scenario {i} ({}): {e}", file.scenario[i].command);
                code = code.max(e.exit_code() as u8);
            }
        }
    }
    let out = match format {
        Format::Json => format!("[\n{}]\n", rendered.join(",\n")),
        Format::Csv | Format::Text => rendered.join("\n"),
    };
    emit(&out);
    code
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Sub::CheckAxioms(c) => single(Command::CheckAxioms, c, vec![]),
        Sub::BosonicAction(c) => single(Command::BosonicAction, c, vec![]),
        Sub::FermionicAction(c) => single(Command::FermionicAction, c, vec![]),
        Sub::ExtendedAction(c) => single(Command::ExtendedAction, c, vec![]),
        Sub::Expand(c) => single(Command::Expand, c, vec![]),
        Sub::VerifyIdentity(c) => single(Command::VerifyIdentity, c, vec![]),
        Sub::GaugeInvariance(c) => single(Command::GaugeInvariance, c, vec![]),
        Sub::MassEstimate(c) => single(Command::MassEstimate, c, vec![]),
        Sub::WeylScan { common, lambda_min, lambda_max, steps } => {
            let mut extra = Vec::new();
            if let Some(x) = lambda_min {
                extra.push(format!("options.lambda_min={x:?}"));
            }
            if let Some(x) = lambda_max {
                extra.push(format!("options.lambda_max={x:?}"));
            }
            if let Some(s) = steps {
                extra.push(format!("options.steps={s}"));
            }
            single(Command::WeylScan, common, extra)
        }
        Sub::Batch { config, set, format, jobs } => batch(config, set, format, jobs),
    };
    ExitCode::from(code)
}
