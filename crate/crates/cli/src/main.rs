//! `totell`: reproducible experiments on totally elliptic representations.

mod parse;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use parse::List;
use serde::Serialize;
use serde_json::{json, Value};

use totally_elliptic::chains::{
    build_chain, construct_dt, dt_feasible_betas, dt_orientation, toledo_dt, Orientation,
};
use totally_elliptic::complexify::{build_reducible_example, default_phases, default_z};
use totally_elliptic::moebius::DEFAULT_TOL;
use totally_elliptic::rep::{
    certify_totally_elliptic, run_orbit, sample_relative, CertifyStatus, Representation, SampleConfig,
    SampleOutcome,
};
use totally_elliptic::surface::{SccBudget, SurfacePresentation};
use totally_elliptic::verdict::{classify, classify_complex};
use totally_elliptic::VERSION;

const EXIT_INCONCLUSIVE: u8 = 2;
const EXIT_INPUT: u8 = 3;

#[derive(Parser, Debug)]
#[command(name = "totell", version, about = "Experiments on totally elliptic surface group representations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Classification tolerance.
    #[arg(long, global = true, env = "TOTELL_TOL", default_value_t = DEFAULT_TOL)]
    tol: f64,
    /// Output path; standard output when absent.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = SccBudget::default().max_curves)]
    max_curves: usize,
    #[arg(long, global = true, default_value_t = SccBudget::default().max_twist_depth)]
    max_twist_depth: usize,
    #[arg(long, global = true, default_value_t = SccBudget::default().max_word_length)]
    max_word_length: usize,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Classify a representation read from JSON.
    Classify {
        #[arg(long, short)]
        input: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Construct a DT representation of a punctured sphere.
    BuildDt {
        #[command(flatten)]
        surface: Sphere,
        #[arg(long, value_parser = parse::angles)]
        alpha: List<f64>,
        #[arg(long, value_parser = parse::angles)]
        beta: Option<List<f64>>,
        #[arg(long)]
        seed: u64,
    },
    /// Search the relative representation space of a punctured sphere.
    Sample {
        #[command(flatten)]
        surface: Sphere,
        #[arg(long, value_parser = parse::angles)]
        alpha: List<f64>,
        #[arg(long, value_parser = parse::count, default_value = "10000")]
        attempts: u64,
        #[arg(long)]
        seed: u64,
    },
    /// Scan enumerated curves for a non-elliptic image.
    Certify {
        #[arg(long, short)]
        input: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Random twist orbit with per-iterate trace table.
    Orbit {
        #[arg(long, short)]
        input: PathBuf,
        #[arg(long, value_parser = parse::count)]
        steps: u64,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 2.0)]
        threshold: f64,
        /// Where to write the trace table when the output format is json.
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Reducible upper-triangular representation of a punctured sphere.
    ComplexExample {
        #[command(flatten)]
        surface: Sphere,
        /// Phases of λ(c1..c_{n-1}); defaults to 2π·frac(√p) over the primes.
        #[arg(long, value_parser = parse::angles)]
        theta: Option<List<f64>>,
        /// Cocycle values z(c1..c_{n-1}); defaults to (0, 1, 0, ...).
        #[arg(long, value_parser = parse::complexes)]
        z: Option<List<Complex64>>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Feasible pants angles for a coherent chain.
    FeasibleBetas {
        #[arg(long, value_parser = parse::angles)]
        alpha: List<f64>,
        #[arg(long, value_enum)]
        orientation: Option<OrientationArg>,
    },
}

#[derive(Args, Debug, Clone, Copy)]
struct Sphere {
    #[arg(long, default_value_t = 0)]
    genus: u32,
    #[arg(long)]
    punctures: u32,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Json,
    Csv,
}

#[derive(ValueEnum, Debug, Clone, Copy, Serialize)]
#[serde(rename_all = "lowercase")]
enum OrientationArg {
    Ccw,
    Cw,
}

/// Echo of the validated invocation, embedded in every artifact. Output
/// paths are left out so that identical runs give identical bytes.
#[derive(Serialize, Default)]
struct RunConfig {
    command: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    genus: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    punctures: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    alpha: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    beta: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    theta: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    z: Option<Vec<[f64; 2]>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    budget: Option<SccBudget>,
    tol: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    attempts: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    steps: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    threshold: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    orientation: Option<OrientationArg>,
    #[serde(skip_serializing_if = "Option::is_none")]
    format: Option<Format>,
    #[serde(skip_serializing_if = "Option::is_none")]
    input: Option<String>,
}

struct InputError(String);

impl<E: std::fmt::Display> From<E> for InputError {
    fn from(e: E) -> Self {
        InputError(e.to_string())
    }
}

type Outcome = Result<u8, InputError>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(InputError(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_INPUT)
        }
    }
}

fn run(cli: Cli) -> Outcome {
    let common = cli.common;
    if !(common.tol.is_finite() && common.tol > 0.0) {
        return Err(InputError(format!("tolerance must be positive, got {}", common.tol)));
    }
    if common.max_curves == 0 || common.max_word_length == 0 {
        return Err(InputError("budget limits must be positive".into()));
    }
    let budget = SccBudget {
        max_curves: common.max_curves,
        max_twist_depth: common.max_twist_depth,
        max_word_length: common.max_word_length,
    };
    let mut config = RunConfig {
        tol: common.tol,
        ..RunConfig::default()
    };
    let out = common.output.as_deref();
    match cli.command {
        Command::Classify { input, seed } => {
            config.command = "classify";
            config.budget = Some(budget);
            config.seed = Some(seed);
            config.input = Some(input.display().to_string());
            let r = read_representation(&input, common.tol)?;
            let verdict = classify(&r, budget, seed)?;
            emit(out, &config, "verdict", &verdict)?;
            Ok(verdict.exit_code() as u8)
        }
        Command::BuildDt {
            surface,
            alpha,
            beta,
            seed,
        } => {
            let (alpha, beta) = (alpha.0, beta.map(|b| b.0));
            config.command = "build-dt";
            let p = sphere(surface, &mut config)?;
            check_len(&alpha, p.punctures() as usize, "alpha")?;
            config.alpha = Some(alpha.clone());
            config.beta = beta.clone();
            config.seed = Some(seed);
            let r = construct_dt(&alpha, beta.as_deref(), seed, common.tol)?;
            let chain = build_chain(&r)?;
            let body = json!({
                "representation": r,
                "chain": chain,
                "relation_residual": r.relation_residual(),
                "toledo": toledo_dt(&alpha)?,
            });
            emit(out, &config, "result", &body)?;
            Ok(0)
        }
        Command::Sample {
            surface,
            alpha,
            attempts,
            seed,
        } => {
            let alpha = alpha.0;
            config.command = "sample";
            let p = sphere(surface, &mut config)?;
            config.alpha = Some(alpha.clone());
            config.attempts = Some(attempts);
            config.seed = Some(seed);
            let sample_config = SampleConfig {
                attempts,
                seed,
                tol: common.tol,
                ..SampleConfig::default()
            };
            let body = match sample_relative(&p, &alpha, &sample_config)? {
                SampleOutcome::Accepted {
                    representation,
                    attempts_used,
                } => json!({
                    "status": "Accepted",
                    "representation": representation,
                    "attempts_used": attempts_used,
                    "acceptance_rate": 1.0 / attempts_used as f64,
                    "relation_residual": representation.relation_residual(),
                }),
                SampleOutcome::Empty(report) => {
                    let mut v = serde_json::to_value(&report)?;
                    v["status"] = json!("Empty");
                    v["advisory"] = json!(!report.proven_empty);
                    v
                }
            };
            emit(out, &config, "result", &body)?;
            Ok(0)
        }
        Command::Certify { input, seed } => {
            config.command = "certify";
            config.budget = Some(budget);
            config.seed = Some(seed);
            config.input = Some(input.display().to_string());
            let r = read_representation(&input, common.tol)?;
            let report = certify_totally_elliptic(&r, budget, seed)?;
            emit(out, &config, "report", &report)?;
            Ok(match report.status {
                CertifyStatus::InconclusiveCurve { .. } => EXIT_INCONCLUSIVE,
                _ => 0,
            })
        }
        Command::Orbit {
            input,
            steps,
            seed,
            threshold,
            csv,
            format,
        } => {
            config.command = "orbit";
            config.seed = Some(seed);
            config.steps = Some(steps);
            config.threshold = Some(threshold);
            config.format = Some(format);
            config.input = Some(input.display().to_string());
            let r = read_representation(&input, common.tol)?;
            let run = run_orbit(&r, steps as usize, seed, threshold)?;
            if format == Format::Csv {
                write_atomic(out, run.to_csv().as_bytes())?;
                return Ok(0);
            }
            if let Some(path) = &csv {
                write_atomic(Some(path), run.to_csv().as_bytes())?;
            }
            let body = json!({
                "columns": run.columns,
                "iterates": run.rows.len(),
                "sup_abs_trace": run.sup_abs_trace,
                "bounded_below_threshold": run.first_exceeding.is_none(),
                "first_exceeding": run.first_exceeding,
                "threshold": run.threshold,
                "normalization": run.normalization,
            });
            emit(out, &config, "summary", &body)?;
            Ok(0)
        }
        Command::ComplexExample {
            surface,
            theta,
            z,
            seed,
        } => {
            config.command = "complex-example";
            let p = sphere(surface, &mut config)?;
            let k = p.punctures() as usize - 1;
            let theta = theta.map(|t| t.0).unwrap_or_else(|| default_phases(k));
            let z = z.map(|z| z.0).unwrap_or_else(|| default_z(k));
            config.theta = Some(theta.clone());
            config.z = Some(z.iter().map(|c| [c.re, c.im]).collect());
            config.budget = Some(budget);
            config.seed = Some(seed);
            let (data, rep) = build_reducible_example(p.punctures(), &theta, &z, common.tol)?;
            let verdict = classify_complex(&rep, budget, seed)?;
            let body = json!({ "data": data, "representation": rep, "verdict": verdict });
            emit(out, &config, "result", &body)?;
            Ok(verdict.exit_code() as u8)
        }
        Command::FeasibleBetas { alpha, orientation } => {
            let alpha = alpha.0;
            config.command = "feasible-betas";
            config.alpha = Some(alpha.clone());
            config.orientation = orientation;
            let o = match orientation {
                Some(OrientationArg::Ccw) => Orientation::AntiClockwise,
                Some(OrientationArg::Cw) => Orientation::Clockwise,
                None => dt_orientation(&alpha)
                    .ok_or_else(|| InputError("angle sum is outside both DT bands".into()))?,
            };
            let betas = dt_feasible_betas(&alpha, o)?;
            emit(out, &config, "result", &betas)?;
            Ok(0)
        }
    }
}

fn sphere(s: Sphere, config: &mut RunConfig) -> Result<SurfacePresentation, InputError> {
    if s.genus != 0 {
        return Err(InputError(format!("this command needs genus 0, got {}", s.genus)));
    }
    if s.punctures < 3 {
        return Err(InputError(format!("at least 3 punctures needed, got {}", s.punctures)));
    }
    config.genus = Some(s.genus);
    config.punctures = Some(s.punctures);
    Ok(SurfacePresentation::sphere(s.punctures)?)
}

fn check_len(v: &[f64], n: usize, name: &str) -> Result<(), InputError> {
    if v.len() == n {
        Ok(())
    } else {
        Err(InputError(format!("{name} needs {n} values, got {}", v.len())))
    }
}

/// Reads a representation, either bare or inside an artifact that carries
/// it under `result.representation` or `representation`.
fn read_representation(path: &Path, tol: f64) -> Result<Representation, InputError> {
    let text = fs::read_to_string(path).map_err(|e| InputError(format!("{}: {e}", path.display())))?;
    let value: Value = serde_json::from_str(&text)?;
    let inner = value
        .pointer("/result/representation")
        .or_else(|| value.get("representation"))
        .cloned()
        .unwrap_or(value);
    let mut inner = inner;
    if inner.get("tol").is_none() {
        if let Some(obj) = inner.as_object_mut() {
            obj.insert("tol".into(), json!(tol));
        }
    }
    let r: Representation = serde_json::from_value(inner)?;
    Ok(r)
}

fn emit<T: Serialize>(out: Option<&Path>, config: &RunConfig, key: &str, body: &T) -> Result<(), InputError> {
    let mut doc = serde_json::Map::new();
    doc.insert("version".into(), json!(VERSION));
    doc.insert("config".into(), serde_json::to_value(config)?);
    doc.insert(key.into(), serde_json::to_value(body)?);
    let mut text = serde_json::to_string_pretty(&Value::Object(doc))?;
    text.push('\n');
    write_atomic(out, text.as_bytes())
}

fn write_atomic(out: Option<&Path>, bytes: &[u8]) -> Result<(), InputError> {
    let Some(path) = out else {
        std::io::stdout().write_all(bytes)?;
        return Ok(());
    };
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| InputError(e.to_string()))?;
    Ok(())
}
