//! Command-line front end.
//!
//! Each subcommand reads repo-format JSON inputs, runs one estimator and
//! writes a JSON document with the estimate, its uncertainty (for sampled
//! runs), an echo of the configuration, the library version and a timestamp.
//!
//! Exit codes: 0 success, 2 usage error, 3 unreadable or malformed input
//! file, 4 invariant violation, 5 optimizer did not converge (the result is
//! still written).

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::channels::{
    channel_tomography, distillability_operator_test, is_bistochastic, two_way_capacity_positive,
    KrausChannel,
};
use crate::error::Error;
use crate::interferometer::overlap;
use crate::json::{density_from_json, MatrixJson};
use crate::linalg::{ComplexMatrix, DensityOperator};
use crate::observables::{expectation_estimate, Observable};
use crate::spectral::{bloch_length, extremal_eigen, purity_estimate, Extremum, OptimizerConfig};
use crate::tomography::tomography;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_BAD_INPUT: i32 = 3;
pub const EXIT_INVARIANT: i32 = 4;
pub const EXIT_NOT_CONVERGED: i32 = 5;

/// Environment variable supplying the default seed.
pub const SEED_ENV: &str = "SWAPSCOPE_SEED";

#[derive(Debug, Parser)]
#[command(name = "swapscope", version, about = "Controlled-SWAP interferometric estimator")]
pub struct Cli {
    /// Seed for the shot-noise generator.
    #[arg(long, global = true, env = SEED_ENV, default_value_t = 0)]
    pub seed: u64,

    /// Write the result document here instead of standard output.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,

    /// Render a human-readable table instead of JSON.
    #[arg(long, global = true)]
    pub pretty: bool,

    /// Tolerance used when validating input states.
    #[arg(long, global = true, default_value_t = crate::linalg::DENSITY_TOL)]
    pub tol: f64,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args, Serialize)]
pub struct Shots {
    /// Shots per interferometer setting; 0 selects exact probabilities.
    #[arg(long, default_value_t = 0)]
    pub shots: u64,
}

#[derive(Debug, Args, Serialize)]
pub struct OptimizerArgs {
    #[arg(long, default_value_t = 5)]
    pub restarts: usize,
    #[arg(long, default_value_t = 2000)]
    pub max_iters: usize,
    #[arg(long, default_value_t = 0.5)]
    pub step_size: f64,
    #[arg(long, default_value_t = 1e-8)]
    pub grad_tol: f64,
    #[arg(long, default_value_t = 1e-12)]
    pub value_tol: f64,
}

impl OptimizerArgs {
    fn config(&self, shots: u64, seed: u64) -> OptimizerConfig {
        OptimizerConfig {
            max_iters: self.max_iters,
            step_size: self.step_size,
            grad_tol: self.grad_tol,
            value_tol: self.value_tol,
            restarts: self.restarts,
            seed,
            shots_per_eval: shots,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Which {
    Min,
    Max,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// SWAP-test overlap tr(ϱa ϱb).
    Overlap {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        #[command(flatten)]
        shots: Shots,
    },
    /// Reconstruct a state from probe overlaps.
    Tomography {
        #[arg(long)]
        state: PathBuf,
        #[command(flatten)]
        shots: Shots,
    },
    /// Purity tr ϱ² from two copies.
    Purity {
        #[arg(long)]
        state: PathBuf,
        #[command(flatten)]
        shots: Shots,
    },
    /// Bloch-vector length of a qubit from its purity.
    Bloch {
        #[arg(long)]
        state: PathBuf,
        #[command(flatten)]
        shots: Shots,
    },
    /// Expectation value of a Hermitian observable.
    Expectation {
        #[arg(long)]
        observable: PathBuf,
        #[arg(long)]
        state: PathBuf,
        #[command(flatten)]
        shots: Shots,
    },
    /// Extremal eigenvalue search over pure probes.
    Eigen {
        #[arg(long)]
        state: PathBuf,
        #[arg(long, value_enum, default_value_t = Which::Max)]
        which: Which,
        #[command(flatten)]
        shots: Shots,
        #[command(flatten)]
        opt: OptimizerArgs,
    },
    /// Tomography of a channel's Choi state.
    ChannelTomography {
        #[arg(long)]
        channel: PathBuf,
        #[command(flatten)]
        shots: Shots,
    },
    /// Two-way capacity test of a qubit channel.
    CapacityTest {
        #[arg(long)]
        channel: PathBuf,
        #[command(flatten)]
        shots: Shots,
        #[command(flatten)]
        opt: OptimizerArgs,
    },
    /// Two-way distillability test of a two-qubit state.
    DistillTest {
        #[arg(long)]
        state: PathBuf,
    },
}

#[derive(Debug)]
enum CliError {
    Input { path: PathBuf, message: String },
    Invariant(Error),
    Output(std::io::Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Invariant(e)
    }
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Input { .. } | CliError::Output(_) => EXIT_BAD_INPUT,
            CliError::Invariant(_) => EXIT_INVARIANT,
        }
    }

    fn message(&self) -> String {
        match self {
            CliError::Input { path, message } => format!("{}: {message}", path.display()),
            CliError::Invariant(e) => e.to_string(),
            CliError::Output(e) => format!("cannot write output: {e}"),
        }
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Input {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    serde_json::from_str(&text).map_err(|e| CliError::Input {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

fn read_matrix(path: &Path) -> Result<ComplexMatrix, CliError> {
    let j: MatrixJson = read_json(path)?;
    ComplexMatrix::try_from(j).map_err(|e| CliError::Input {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

fn read_density(path: &Path, tol: f64) -> Result<DensityOperator, CliError> {
    let j: MatrixJson = read_json(path)?;
    // shape problems are malformed input, state invariants are physics violations
    let probe = j.clone();
    ComplexMatrix::try_from(probe).map_err(|e| CliError::Input {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    Ok(density_from_json(j, tol)?)
}

#[derive(serde::Deserialize)]
struct RawChannel {
    dim: usize,
    kraus: Vec<MatrixJson>,
}

fn read_channel(path: &Path) -> Result<KrausChannel, CliError> {
    let raw: RawChannel = read_json(path)?;
    let kraus = raw
        .kraus
        .into_iter()
        .map(ComplexMatrix::try_from)
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| CliError::Input {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
    let ch = KrausChannel::new(kraus)?;
    if ch.dim() != raw.dim {
        return Err(CliError::Input {
            path: path.to_path_buf(),
            message: format!("declared dim {} does not match Kraus operators", raw.dim),
        });
    }
    Ok(ch)
}

fn to_value<T: Serialize>(t: &T) -> Value {
    serde_json::to_value(t).expect("result types serialize")
}

struct Outcome {
    result: Map<String, Value>,
    config: Value,
    converged: bool,
}

fn outcome(result: Value, config: Value) -> Outcome {
    let Value::Object(result) = result else {
        unreachable!("results are JSON objects")
    };
    Outcome {
        result,
        config,
        converged: true,
    }
}

fn execute(cli: &Cli) -> Result<(&'static str, Outcome), CliError> {
    let seed = cli.seed;
    let tol = cli.tol;
    Ok(match &cli.command {
        Command::Overlap { a, b, shots } => {
            let ra = read_density(a, tol)?;
            let rb = read_density(b, tol)?;
            let est = overlap(&ra, &rb, shots.shots, seed)?;
            (
                "overlap",
                outcome(
                    json!({
                        "v": est.v,
                        "p0": est.p0,
                        "shots_used": est.shots_used,
                        "stderr_p0": est.stderr_p0,
                        "stderr": est.stderr_v(),
                    }),
                    json!({"a": a, "b": b, "shots": shots.shots, "seed": seed}),
                ),
            )
        }
        Command::Tomography { state, shots } => {
            let rho = read_density(state, tol)?;
            let report = tomography(&rho, shots.shots, seed)?;
            (
                "tomography",
                outcome(to_value(&report), json!({"state": state, "shots": shots.shots, "seed": seed})),
            )
        }
        Command::Purity { state, shots } => {
            let rho = read_density(state, tol)?;
            let est = purity_estimate(&rho, shots.shots, seed)?;
            (
                "purity",
                outcome(
                    json!({"v": est.v, "p0": est.p0, "shots_used": est.shots_used, "stderr": est.stderr_v()}),
                    json!({"state": state, "shots": shots.shots, "seed": seed}),
                ),
            )
        }
        Command::Bloch { state, shots } => {
            let rho = read_density(state, tol)?;
            if rho.dim() != 2 {
                return Err(CliError::Invariant(Error::DimensionMismatch {
                    expected: "qubit state".into(),
                    found: format!("dimension {}", rho.dim()),
                }));
            }
            let est = purity_estimate(&rho, shots.shots, seed)?;
            let b = bloch_length(est.v)?;
            let se_v = est.stderr_v();
            // delta method away from the origin, √(2·se) bound at it
            let stderr = if b.length > 0.0 {
                (se_v / b.length).min(1.0)
            } else {
                (2.0 * se_v).sqrt()
            };
            (
                "bloch",
                outcome(
                    json!({
                        "length": b.length,
                        "clamped": b.clamped,
                        "purity": est.v,
                        "stderr_purity": se_v,
                        "stderr": stderr,
                        "shots_used": est.shots_used,
                    }),
                    json!({"state": state, "shots": shots.shots, "seed": seed}),
                ),
            )
        }
        Command::Expectation {
            observable,
            state,
            shots,
        } => {
            let a = read_matrix(observable)?;
            let a = Observable::new(a)?;
            let rho = read_density(state, tol)?;
            let est = expectation_estimate(&a, &rho, shots.shots, seed)?;
            (
                "expectation",
                outcome(
                    to_value(&est),
                    json!({"observable": observable, "state": state, "shots": shots.shots, "seed": seed}),
                ),
            )
        }
        Command::Eigen {
            state,
            which,
            shots,
            opt,
        } => {
            let rho = read_density(state, tol)?;
            let cfg = opt.config(shots.shots, seed);
            let which = match which {
                Which::Min => Extremum::Min,
                Which::Max => Extremum::Max,
            };
            let res = extremal_eigen(&rho, which, &cfg)?;
            let converged = res.converged;
            let mut o = outcome(to_value(&res), json!({"state": state, "optimizer": cfg}));
            o.converged = converged;
            ("eigen", o)
        }
        Command::ChannelTomography { channel, shots } => {
            let ch = read_channel(channel)?;
            let report = channel_tomography(&ch, shots.shots, seed)?;
            let choi = report.choi();
            let mut value = to_value(&report);
            value["choi"] = to_value(&choi);
            value["bistochastic"] = json!(is_bistochastic(&choi, 1e-9));
            (
                "channel-tomography",
                outcome(value, json!({"channel": channel, "shots": shots.shots, "seed": seed})),
            )
        }
        Command::CapacityTest { channel, shots, opt } => {
            let ch = read_channel(channel)?;
            let cfg = opt.config(shots.shots, seed);
            let verdict = two_way_capacity_positive(&ch.choi_state(), &cfg)?;
            let converged = verdict.converged;
            let mut o = outcome(to_value(&verdict), json!({"channel": channel, "optimizer": cfg}));
            o.result.insert("verdict".into(), json!(verdict.positive));
            o.converged = converged;
            ("capacity-test", o)
        }
        Command::DistillTest { state } => {
            let rho = read_density(state, tol)?;
            let v = distillability_operator_test(&rho)?;
            (
                "distill-test",
                outcome(
                    json!({"verdict": v.distillable, "distillable": v.distillable, "min_eig": v.min_eig}),
                    json!({"state": state}),
                ),
            )
        }
    })
}

fn render_pretty(doc: &Map<String, Value>) -> String {
    let width = doc.keys().map(|k| k.len()).max().unwrap_or(0);
    let mut out = String::new();
    for (k, v) in doc {
        let shown = match v {
            Value::String(s) => s.clone(),
            other => other.to_string(),
        };
        out.push_str(&format!("{k:<width$}  {shown}\n"));
    }
    out
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match run_cli(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {}", e.message());
            e.exit_code()
        }
    }
}

fn run_cli(cli: &Cli) -> Result<i32, CliError> {
    let (command, out) = execute(cli)?;
    let mut doc = Map::new();
    doc.insert("command".into(), json!(command));
    doc.extend(out.result);
    doc.insert("converged".into(), json!(out.converged));
    doc.insert("config".into(), out.config);
    doc.insert("version".into(), json!(env!("CARGO_PKG_VERSION")));
    let ts = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    doc.insert("timestamp".into(), json!(ts));

    let text = if cli.pretty {
        render_pretty(&doc)
    } else {
        let mut s = serde_json::to_string(&Value::Object(doc)).expect("serializable");
        s.push('\n');
        s
    };
    match &cli.output {
        Some(path) => fs::write(path, text).map_err(CliError::Output)?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes()).map_err(CliError::Output)?;
        }
    }
    Ok(if out.converged { EXIT_OK } else { EXIT_NOT_CONVERGED })
}
