//! `qjunta`: run the tester, certify distances, inspect spectra and execute
//! seeded experiments. Machine-readable JSON goes to stdout, diagnostics to
//! stderr.
//!
//! Exit codes: 0 success, 2 validation, 3 certification failure, 4 resource cap.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use qjunta::distribution::distance_to_k_junta;
use qjunta::harness::{self, ExperimentConfig, FarFamily};
use qjunta::tester::{run_tester, Variant};
use qjunta::{BitString, BooleanFunction, Cube, Distribution, Error, Ledger, MembershipOracle, SampleOracle};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "qjunta", version, about = "Quantum distribution-free junta tester (exact simulation)")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum VariantArg {
    Classical,
    Amplified,
}

impl From<VariantArg> for Variant {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::Classical => Variant::Classical,
            VariantArg::Amplified => Variant::Amplified,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    Junta,
    Parity,
    RandomFunction,
    Planted,
}

#[derive(Clone, Copy, ValueEnum)]
enum DistKind {
    Uniform,
    Sparse,
}

#[derive(Subcommand)]
enum Command {
    /// Run the tester once on a function and distribution.
    Run {
        #[arg(long)]
        function: PathBuf,
        #[arg(long)]
        dist: PathBuf,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        seed: u64,
        #[arg(long, value_enum, default_value = "classical")]
        variant: VariantArg,
        /// Write the per-iteration trace as JSON lines.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Execute a seeded Monte Carlo experiment described by a JSON config.
    Experiment {
        #[arg(long)]
        config: PathBuf,
        /// Override the config's trial count.
        #[arg(long)]
        trials: Option<u64>,
        /// Write per-trial rows as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Exact distance to the nearest k-junta under the distribution.
    Distance {
        #[arg(long)]
        function: PathBuf,
        #[arg(long)]
        dist: PathBuf,
        #[arg(long)]
        k: usize,
    },
    /// Fourier coefficients of the function restricted to a cube.
    Spectrum {
        #[arg(long)]
        function: PathBuf,
        #[arg(long = "cube-x")]
        cube_x: String,
        #[arg(long = "cube-y")]
        cube_y: String,
    },
    /// Generate fixture files.
    Gen {
        #[arg(long, value_enum)]
        family: Family,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        /// Required distance for far families.
        #[arg(long, default_value_t = 0.1)]
        eps: f64,
        #[arg(long)]
        seed: u64,
        /// Distribution for the junta family.
        #[arg(long, value_enum, default_value = "uniform")]
        dist_kind: DistKind,
        #[arg(long)]
        function: PathBuf,
        #[arg(long)]
        dist: PathBuf,
    },
}

struct CliError {
    code: u8,
    message: String,
}

impl From<Error> for CliError {
    fn from(err: Error) -> Self {
        let code = match err {
            Error::CertificationFailed { .. } => 3,
            Error::WorkCapExceeded { .. } | Error::CubeTooLarge(_) => 4,
            _ => 2,
        };
        CliError { code, message: err.to_string() }
    }
}

fn validation(message: impl Into<String>) -> CliError {
    CliError { code: 2, message: message.into() }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = fs::read_to_string(path).map_err(|e| validation(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| validation(format!("{}: {e}", path.display())))
}

fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let text = serde_json::to_string(value).map_err(|e| validation(e.to_string()))?;
    fs::write(path, text).map_err(|e| validation(format!("{}: {e}", path.display())))
}

fn check_dims(f: &BooleanFunction, d: &Distribution) -> Result<(), CliError> {
    if f.n() != d.n() {
        return Err(validation(format!("function has n = {} but distribution has n = {}", f.n(), d.n())));
    }
    Ok(())
}

fn cmd_run(
    function: &Path,
    dist: &Path,
    k: usize,
    eps: f64,
    seed: u64,
    variant: Variant,
    trace: Option<&Path>,
) -> Result<Value, CliError> {
    let f: BooleanFunction = read_json(function)?;
    let d: Distribution = read_json(dist)?;
    check_dims(&f, &d)?;
    let ledger = Ledger::new();
    let oracle = MembershipOracle::new(&f, &ledger);
    let sampler = SampleOracle::new(&d, &ledger);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let verdict = run_tester(&oracle, &sampler, k, eps, variant, &mut rng)?;
    if let Some(path) = trace {
        let mut out = fs::File::create(path).map_err(|e| validation(format!("{}: {e}", path.display())))?;
        for rec in verdict.final_state.trace() {
            let line = serde_json::to_string(rec).map_err(|e| validation(e.to_string()))?;
            writeln!(out, "{line}").map_err(|e| validation(e.to_string()))?;
        }
    }
    Ok(json!({
        "decision": verdict.decision,
        "ledger": verdict.ledger,
        "total": verdict.ledger.total(),
        "iterations": verdict.final_state.iteration(),
        "selected": verdict.final_state.selected(),
        "cubes": verdict.final_state.cube_count(),
    }))
}

fn cmd_experiment(config: &Path, trials: Option<u64>, csv: Option<&Path>) -> Result<Value, CliError> {
    let mut cfg: ExperimentConfig = read_json(config)?;
    if let Some(t) = trials {
        cfg.trials = t;
    }
    let report = harness::run_trials(&cfg)?;
    if let Some(path) = csv {
        let file = fs::File::create(path).map_err(|e| validation(format!("{}: {e}", path.display())))?;
        report.write_csv(file)?;
    }
    serde_json::to_value(&report).map_err(|e| validation(e.to_string()))
}

fn cmd_distance(function: &Path, dist: &Path, k: usize) -> Result<Value, CliError> {
    let f: BooleanFunction = read_json(function)?;
    let d: Distribution = read_json(dist)?;
    check_dims(&f, &d)?;
    let cert = distance_to_k_junta(&f, &d, k)?;
    serde_json::to_value(&cert).map_err(|e| validation(e.to_string()))
}

fn cmd_spectrum(function: &Path, cube_x: &str, cube_y: &str) -> Result<Value, CliError> {
    let f: BooleanFunction = read_json(function)?;
    let x: BitString = cube_x.parse()?;
    let y: BitString = cube_y.parse()?;
    let cube = Cube::new(x, y)?;
    let spectrum = f.restricted_spectrum(&cube)?;
    let coefficients: serde_json::Map<String, Value> = spectrum
        .iter()
        .filter(|(_, c)| *c != 0.0)
        .map(|(s, c)| (s.to_string(), json!(c)))
        .collect();
    Ok(json!({
        "cube": cube,
        "free": cube.disagreement(),
        "coefficients": coefficients,
        "squared_sum": spectrum.norm_squared(),
    }))
}

#[allow(clippy::too_many_arguments)]
fn cmd_gen(
    family: Family,
    n: usize,
    k: usize,
    eps: f64,
    seed: u64,
    dist_kind: DistKind,
    function: &Path,
    dist: &Path,
) -> Result<Value, CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let far = |family| harness::gen_far_fixture(n, k, eps, family, &mut ChaCha8Rng::seed_from_u64(seed));
    let (f, d, distance) = match family {
        Family::Junta => {
            let f = harness::gen_random_junta(n, k, &mut rng)?;
            let d = match dist_kind {
                DistKind::Uniform => Distribution::uniform(n)?,
                DistKind::Sparse => harness::gen_sparse_distribution(n, 32, &mut rng)?,
            };
            (f, d, None)
        }
        Family::Parity | Family::RandomFunction | Family::Planted => {
            let fam = match family {
                Family::Parity => FarFamily::Parity,
                Family::RandomFunction => FarFamily::RandomFunction,
                _ => FarFamily::Planted,
            };
            let fx = far(fam)?;
            let distance = fx.certificate.map(|c| c.distance);
            (fx.function, fx.distribution, distance)
        }
    };
    write_json(function, &f)?;
    write_json(dist, &d)?;
    Ok(json!({
        "function": function,
        "dist": dist,
        "n": n,
        "relevant": f.relevant_variables(),
        "certified_distance": distance,
    }))
}

fn dispatch(cli: Cli) -> Result<Value, CliError> {
    match cli.command {
        Command::Run { function, dist, k, eps, seed, variant, trace } => {
            cmd_run(&function, &dist, k, eps, seed, variant.into(), trace.as_deref())
        }
        Command::Experiment { config, trials, csv } => cmd_experiment(&config, trials, csv.as_deref()),
        Command::Distance { function, dist, k } => cmd_distance(&function, &dist, k),
        Command::Spectrum { function, cube_x, cube_y } => cmd_spectrum(&function, &cube_x, &cube_y),
        Command::Gen { family, n, k, eps, seed, dist_kind, function, dist } => {
            cmd_gen(family, n, k, eps, seed, dist_kind, &function, &dist)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(value) => {
            let text = serde_json::to_string_pretty(&value).expect("json value");
            let _ = writeln!(std::io::stdout().lock(), "{text}");
            ExitCode::SUCCESS
        }
        Err(err) => {
            eprintln!("qjunta: {}", err.message);
            ExitCode::from(err.code)
        }
    }
}
