//! `crowdobj` — simulate crowd responses, run inference, verify objective
//! properties, and emit objective surfaces.
//!
//! Exit codes: 0 on success, 2 on invalid input, 3 when a requested
//! check/witness/probe assertion does not hold. All randomized subcommands
//! take an explicit seed; there is no ambient entropy. Every JSON number is
//! written with 17 significant digits so reports re-parse bit-exactly.

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crowdobj_core as core;
use crowdobj_core::{
    ModelFamily, ModelHandle, PropertyReport, ResponseMatrix, SimConfig,
};

#[derive(Parser)]
#[command(name = "crowdobj", version, about = "Crowdsourcing objective toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ModelArgs {
    /// Model family name (dawid_skene, additive_noise, minimax_restricted,
    /// glad_restricted, convex_pl).
    #[arg(long, conflicts_with = "config")]
    model: Option<String>,
    /// JSON model config: {"family": ..., "W_max": ..., "n": ..., "noise_cdf": ...}.
    #[arg(long)]
    config: Option<PathBuf>,
}

impl ModelArgs {
    fn resolve(&self, default: Option<ModelFamily>) -> Result<ModelHandle, String> {
        if let Some(path) = &self.config {
            let text = fs::read_to_string(path)
                .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
            return ModelHandle::from_json(&text).map_err(|e| e.to_string());
        }
        if let Some(name) = &self.model {
            return Ok(ModelHandle::new(
                ModelFamily::parse(name).map_err(|e| e.to_string())?,
            ));
        }
        match default {
            Some(f) => Ok(ModelHandle::new(f)),
            None => Err("one of --model or --config is required".into()),
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Alternating,
    Subgradient,
    Epigraph,
}

#[derive(Clone, Copy, ValueEnum)]
enum CheckTarget {
    P1,
    P2,
    P3,
    Axiom1,
    Axiom2,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic instance; writes responses.json and truth.json.
    Simulate {
        /// Simulation config JSON (k, d, ability_spec, assignment, seed).
        #[arg(long)]
        config: PathBuf,
        /// Override the seed recorded in the config.
        #[arg(long)]
        seed: Option<u64>,
        /// Output directory; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Minimize a model objective over a response file.
    Infer {
        #[command(flatten)]
        model: ModelArgs,
        /// Solver; defaults per family (alternating for dawid_skene,
        /// epigraph for convex_pl, subgradient otherwise).
        #[arg(long)]
        method: Option<Method>,
        /// Random answer initializations for the alternating solver.
        #[arg(long, default_value_t = 10)]
        restarts: u32,
        /// Seed for randomized solvers (required by alternating).
        #[arg(long)]
        seed: Option<u64>,
        /// Iteration budget for the subgradient solver.
        #[arg(long, default_value_t = 100_000)]
        steps: u64,
        /// Initial step size for the subgradient solver.
        #[arg(long, default_value_t = 0.5)]
        step: f64,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Response file in the standard JSON format.
        responses: PathBuf,
    },
    /// Run property/axiom checks; exit 3 if any requested check fails.
    Check {
        #[command(flatten)]
        model: ModelArgs,
        /// Run the full battery (default when no targets are given).
        #[arg(long)]
        all: bool,
        /// Comma-separated subset: p1,p2,p3,axiom1,axiom2.
        #[arg(long, value_delimiter = ',')]
        targets: Vec<CheckTarget>,
        /// Axiom 1 radius; derived from --delta when omitted.
        #[arg(long)]
        eps: Option<f64>,
        /// Crossing-function argument for the derived radius.
        #[arg(long, default_value_t = 0.2)]
        delta: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate the constructive three-point witness; exit 3 when it does
    /// not violate convexity.
    Witness {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Search for a random Jensen violation; exit 3 when none is found.
    Probe {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, default_value_t = 1_000_000)]
        trials: u64,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Tabulate a reduced objective as CSV (`x,w,L`).
    Surface {
        #[command(flatten)]
        model: ModelArgs,
        /// Observed response the surface conditions on.
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u8).range(0..=1))]
        y: u8,
        /// Grid step on both axes.
        #[arg(long, default_value_t = 0.01)]
        step: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// JSON formatter writing every float with 17 significant digits.
struct FullPrecision;

impl serde_json::ser::Formatter for FullPrecision {
    fn write_f64<W>(&mut self, writer: &mut W, value: f64) -> io::Result<()>
    where
        W: ?Sized + io::Write,
    {
        if value.is_finite() {
            write!(writer, "{value:.16e}")
        } else {
            writer.write_all(b"null")
        }
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, FullPrecision);
    value
        .serialize(&mut ser)
        .expect("report serialization cannot fail");
    let mut text = String::from_utf8(out).expect("json is utf-8");
    text.push('\n');
    text
}

fn emit(out: &Option<PathBuf>, content: &str) -> Result<(), String> {
    match out {
        Some(path) => {
            fs::write(path, content).map_err(|e| format!("cannot write {}: {e}", path.display()))
        }
        None => io::stdout()
            .write_all(content.as_bytes())
            .map_err(|e| format!("cannot write to stdout: {e}")),
    }
}

fn load_responses(path: &PathBuf) -> Result<ResponseMatrix, String> {
    let text =
        fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    ResponseMatrix::from_json(&text).map_err(|e| e.to_string())
}

#[derive(Serialize)]
struct CheckOutput {
    model: String,
    delta: f64,
    eps: f64,
    reports: Vec<PropertyReport>,
    all_passed: bool,
}

#[derive(Serialize)]
struct ProbeOutput {
    model: String,
    trials: u64,
    seed: u64,
    violation: Option<core::WitnessReport>,
}

#[derive(Serialize)]
struct SimulateOutput {
    truth: core::GroundTruth,
    responses: core::RawResponses,
}

fn run(cli: Cli) -> Result<ExitCode, String> {
    match cli.command {
        Command::Simulate { config, seed, out } => {
            let text = fs::read_to_string(&config)
                .map_err(|e| format!("cannot read {}: {e}", config.display()))?;
            let mut cfg = SimConfig::from_json(&text).map_err(|e| e.to_string())?;
            if let Some(seed) = seed {
                cfg.seed = seed;
            }
            let (truth, responses) = core::generate(&cfg).map_err(|e| e.to_string())?;
            match out {
                Some(dir) => {
                    fs::create_dir_all(&dir)
                        .map_err(|e| format!("cannot create {}: {e}", dir.display()))?;
                    fs::write(dir.join("responses.json"), responses.to_json() + "\n")
                        .map_err(|e| e.to_string())?;
                    fs::write(dir.join("truth.json"), to_json(&truth))
                        .map_err(|e| e.to_string())?;
                }
                None => {
                    let output = SimulateOutput {
                        truth,
                        responses: responses.to_raw(),
                    };
                    emit(&None, &to_json(&output))?;
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Infer {
            model,
            method,
            restarts,
            seed,
            steps,
            step,
            out,
            responses,
        } => {
            let m = model.resolve(Some(ModelFamily::DawidSkene))?;
            let y = load_responses(&responses)?;
            let method = method.unwrap_or(match m.family {
                ModelFamily::DawidSkene => Method::Alternating,
                ModelFamily::ConvexPl => Method::Epigraph,
                _ => Method::Subgradient,
            });
            let result = match method {
                Method::Alternating => {
                    let seed = seed.ok_or("--seed is required for the alternating solver")?;
                    core::infer_alternating(&m, &y, restarts, seed).map_err(|e| e.to_string())?
                }
                Method::Subgradient => {
                    core::infer_subgradient(&m, &y, steps, step).map_err(|e| e.to_string())?
                }
                Method::Epigraph => {
                    if m.family != ModelFamily::ConvexPl {
                        return Err("the epigraph solver applies to convex_pl only".into());
                    }
                    core::solve_convex(&y)
                }
            };
            emit(&out, &to_json(&result))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Check {
            model,
            all,
            targets,
            eps,
            delta,
            out,
        } => {
            let m = model.resolve(None)?;
            let eps = match eps {
                Some(e) => e,
                None => core::find_axiom1_eps(&m, delta).map_err(|e| e.to_string())?,
            };
            let requested: Vec<CheckTarget> = if targets.is_empty() || all {
                vec![
                    CheckTarget::P1,
                    CheckTarget::P2,
                    CheckTarget::P3,
                    CheckTarget::Axiom1,
                ]
            } else {
                targets
            };
            let mut reports = Vec::new();
            for t in requested {
                let report = match t {
                    CheckTarget::P1 => core::check_p1(&m),
                    CheckTarget::P2 => core::check_p2(&m),
                    CheckTarget::P3 => core::check_p3(&m),
                    CheckTarget::Axiom1 => {
                        core::check_axiom1(&m, eps).map_err(|e| e.to_string())?
                    }
                    CheckTarget::Axiom2 => core::check_axiom2(&m),
                };
                reports.push(report);
            }
            let all_passed = reports.iter().all(|r| r.passed);
            let output = CheckOutput {
                model: m.family.name().to_string(),
                delta,
                eps,
                reports,
                all_passed,
            };
            emit(&out, &to_json(&output))?;
            Ok(if all_passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(3)
            })
        }
        Command::Witness { model, eps, out } => {
            let m = model.resolve(None)?;
            let report = core::constructive_witness(&m, eps).map_err(|e| e.to_string())?;
            let violated = report.violated;
            emit(&out, &to_json(&report))?;
            Ok(if violated {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(3)
            })
        }
        Command::Probe {
            model,
            trials,
            seed,
            out,
        } => {
            let m = model.resolve(None)?;
            let violation = core::jensen_probe(&m, trials, seed).map_err(|e| e.to_string())?;
            let found = violation.is_some();
            let output = ProbeOutput {
                model: m.family.name().to_string(),
                trials,
                seed,
                violation,
            };
            emit(&out, &to_json(&output))?;
            Ok(if found {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(3)
            })
        }
        Command::Surface { model, y, step, out } => {
            let m = model.resolve(None)?;
            let grid = core::emit_surface(&m, y == 1, step).map_err(|e| e.to_string())?;
            emit(&out, &grid.to_csv())?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}
