//! Command-line front door: parse input files, dispatch computations, and
//! persist JSON reports.
//!
//! Every run writes a single report object with a fixed schema: tool and
//! version identifiers, the subcommand and its resolved parameters, the
//! SHA-256 of every input file, the seed (when randomness is involved),
//! and the result. Reports for the same invocation and seed are
//! byte-identical except for the `timestamp_unix` field.
//!
//! Exit codes: 0 success, 2 validation/usage/domain errors, 3 violated
//! numerical invariants (internal cross-checks that disagree).

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::Deserialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::error::{EngineError, Result};
use crate::expansion;
use crate::gaussian::{self, McEstimate};
use crate::geometry;
use crate::lie_rep::RepBasis;
use crate::signature;
use crate::spectral::{self, CurrentPath, CurrentVector, SpectralModel};
use crate::topology;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Parser, Debug)]
#[command(
    name = "wilsonline",
    version,
    about = "Loop currents, graded holonomy, spectral Gaussian models, and two-loop expansions"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Write the JSON report to this file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Linking number of two loops: double integral plus, for polyline
    /// pairs, the signed-crossing count.
    Link {
        /// JSON file with the first loop.
        #[arg(long)]
        loop1: PathBuf,
        /// JSON file with the second loop.
        #[arg(long)]
        loop2: PathBuf,
        /// Quadrature points per loop.
        #[arg(long, default_value_t = 512)]
        grid: usize,
    },
    /// Graded holonomy of a driving path from a JSON file.
    Holonomy {
        /// JSON file with the grid and increment streams.
        #[arg(long)]
        path: PathBuf,
        /// Grading truncation order.
        #[arg(long, default_value_t = 4)]
        order: usize,
    },
    /// Truncated large-level series against its closed form.
    Expand {
        /// Cross-pairing value between the two loops.
        #[arg(long = "L")]
        linking: f64,
        /// Level k > 0.
        #[arg(long = "k")]
        level: f64,
        /// Number of grouped series terms.
        #[arg(long = "N", default_value_t = 6)]
        terms: usize,
    },
    /// Monte Carlo estimate of the expected product of loop traces.
    Mc {
        /// JSON file with the spectral model (required unless --preset).
        #[arg(long)]
        spectrum: Option<PathBuf>,
        /// JSON file with per-loop current paths (required unless --preset).
        #[arg(long)]
        currents: Option<PathBuf>,
        /// Built-in configuration; the only value is "two-loop-unit".
        #[arg(long)]
        preset: Option<String>,
        /// Level k for the preset model.
        #[arg(long, default_value_t = 5.0)]
        k: f64,
        /// Grid intervals for the preset currents.
        #[arg(long, default_value_t = 16)]
        intervals: usize,
        /// Grading truncation order.
        #[arg(long, default_value_t = 4)]
        order: usize,
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Lie algebra basis; only the built-in "su2" is available here.
        #[arg(long, default_value = "su2")]
        basis: String,
    },
    /// Check the closed-form normalizer against oscillatory quadrature;
    /// exits 3 if the two routes disagree.
    FresnelCheck {
        /// JSON file with a finite-regulator spectral model.
        #[arg(long)]
        spectrum: PathBuf,
    },
    /// Spectrum diagnostics: gap, summability, rescaling coefficients.
    SpectrumInfo {
        /// JSON file with the spectral model.
        #[arg(long)]
        spectrum: PathBuf,
    },
}

struct InputFile {
    path: String,
    sha256: String,
    text: String,
}

fn load_input(path: &Path) -> Result<InputFile> {
    let bytes = std::fs::read(path)?;
    let mut hasher = Sha256::new();
    hasher.update(&bytes);
    let sha256 = hasher
        .finalize()
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect::<String>();
    let text = String::from_utf8(bytes).map_err(|_| {
        EngineError::Validation(format!("input {} is not valid UTF-8", path.display()))
    })?;
    Ok(InputFile { path: path.display().to_string(), sha256, text })
}

#[derive(Deserialize)]
struct CurrentsFile {
    loops: Vec<LoopCurrents>,
}

#[derive(Deserialize)]
struct LoopCurrents {
    currents: Vec<CurrentEntry>,
}

#[derive(Deserialize)]
struct CurrentEntry {
    lie_index: usize,
    times: Vec<f64>,
    /// One coefficient vector (length = number of modes) per grid time.
    coeffs: Vec<Vec<f64>>,
}

fn parse_currents(text: &str) -> Result<Vec<Vec<CurrentPath>>> {
    let file: CurrentsFile = serde_json::from_str(text)?;
    let mut loops = Vec::with_capacity(file.loops.len());
    for entry in file.loops {
        let mut paths = Vec::with_capacity(entry.currents.len());
        for c in entry.currents {
            let values = c.coeffs.into_iter().map(CurrentVector::unlifted).collect();
            paths.push(CurrentPath::new(c.lie_index, c.times, values)?);
        }
        loops.push(paths);
    }
    Ok(loops)
}

fn pair(z: crate::cmat::C64) -> Value {
    json!([z.re, z.im])
}

struct RunOutput {
    command: &'static str,
    params: Value,
    seed: Option<u64>,
    inputs: Vec<InputFile>,
    result: Value,
}

fn execute(cli: &Cli) -> Result<RunOutput> {
    match &cli.command {
        Command::Link { loop1, loop2, grid } => {
            let f1 = load_input(loop1)?;
            let f2 = load_input(loop2)?;
            let a = geometry::loop_from_json_str(&f1.text)?;
            let b = geometry::loop_from_json_str(&f2.text)?;
            let res = topology::link_pair(&a, &b, *grid)?;
            Ok(RunOutput {
                command: "link",
                params: json!({"grid": grid}),
                seed: None,
                inputs: vec![f1, f2],
                result: serde_json::to_value(&res)?,
            })
        }
        Command::Holonomy { path, order } => {
            let f = load_input(path)?;
            let driving = signature::path_from_json_str(&f.text)?;
            let (tv_det, tv_sto) = driving.total_variations();
            let graded = signature::holonomy_graded(&driving, *order)?;
            let full = signature::holonomy_full(&driving);
            let slices: Vec<Value> = graded.trace_slices().iter().map(|z| pair(*z)).collect();
            let result = json!({
                "dim": driving.dim(),
                "intervals": driving.intervals(),
                "order": order,
                "total_variation_deterministic": tv_det,
                "total_variation_stochastic": tv_sto,
                "tail_bound": graded.truncation_tail_bound(),
                "trace_slices": slices,
                "trace_graded_sum": pair(graded.sum().trace()),
                "trace_full": pair(full.trace()),
            });
            Ok(RunOutput {
                command: "holonomy",
                params: json!({"order": order}),
                seed: None,
                inputs: vec![f],
                result,
            })
        }
        Command::Expand { linking, level, terms } => {
            let report = expansion::expansion_report(*linking, *level, *terms)?;
            Ok(RunOutput {
                command: "expand",
                params: json!({"L": linking, "k": level, "N": terms}),
                seed: None,
                inputs: vec![],
                result: serde_json::to_value(&report)?,
            })
        }
        Command::Mc { spectrum, currents, preset, k, intervals, order, samples, seed, basis } => {
            if basis != "su2" {
                return Err(EngineError::Unsupported(format!(
                    "basis {basis:?} is not available on the command line; only \"su2\" is built in"
                )));
            }
            let rep = RepBasis::su2();
            let mut inputs = Vec::new();
            let (model, loops, reference): (SpectralModel, Vec<Vec<CurrentPath>>, Option<Value>) =
                match preset {
                    Some(name) => {
                        if spectrum.is_some() || currents.is_some() {
                            return Err(EngineError::Validation(
                                "--preset conflicts with --spectrum/--currents".into(),
                            ));
                        }
                        if name != "two-loop-unit" {
                            return Err(EngineError::Validation(format!(
                                "unknown preset {name:?}; the only preset is \"two-loop-unit\""
                            )));
                        }
                        let cfg = gaussian::two_loop_unit_linking(*k, *intervals)?;
                        // Analytic truncated expectation for the preset: the
                        // grouped partial sum through pairing count order/2.
                        let series =
                            expansion::series_su2(cfg.linking, *k, order / 2 + 1)?;
                        let partial: crate::cmat::C64 = series.iter().sum();
                        let reference = json!({
                            "linking": cfg.linking,
                            "analytic_partial_sum": pair(partial),
                        });
                        (cfg.model, cfg.loops, Some(reference))
                    }
                    None => {
                        let (spath, cpath) = match (spectrum, currents) {
                            (Some(s), Some(c)) => (s, c),
                            _ => {
                                return Err(EngineError::Validation(
                                    "mc needs either --preset or both --spectrum and --currents"
                                        .into(),
                                ))
                            }
                        };
                        let sf = load_input(spath)?;
                        let cf = load_input(cpath)?;
                        let model = SpectralModel::from_json_str(&sf.text)?;
                        let loops = parse_currents(&cf.text)?;
                        inputs.push(sf);
                        inputs.push(cf);
                        (model, loops, None)
                    }
                };
            let estimate: McEstimate =
                gaussian::mc_wilson(&model, &rep, &loops, *order, *samples, *seed)?;
            let result = json!({
                "estimate": serde_json::to_value(&estimate)?,
                "order": order,
                "loops": loops.len(),
                "modes": model.modes(),
                "level": model.level(),
                "reference": reference,
            });
            Ok(RunOutput {
                command: "mc",
                params: json!({
                    "preset": preset,
                    "k": k,
                    "intervals": intervals,
                    "order": order,
                    "samples": samples,
                    "basis": basis,
                }),
                seed: Some(*seed),
                inputs,
                result,
            })
        }
        Command::FresnelCheck { spectrum } => {
            let f = load_input(spectrum)?;
            let model = SpectralModel::from_json_str(&f.text)?;
            let closed = spectral::z_normalizer(&model)?;
            let quadrature = spectral::z_normalizer_quadrature(&model)?;
            let difference = (closed - quadrature).norm();
            let tolerance = 1e-6;
            let result = json!({
                "closed_form": pair(closed),
                "quadrature": pair(quadrature),
                "difference": difference,
                "tolerance": tolerance,
            });
            if difference > tolerance {
                return Err(EngineError::InvariantViolation(format!(
                    "normalizer routes disagree by {difference:.3e} (tolerance {tolerance:.1e})"
                )));
            }
            Ok(RunOutput {
                command: "fresnel-check",
                params: json!({}),
                seed: None,
                inputs: vec![f],
                result,
            })
        }
        Command::SpectrumInfo { spectrum } => {
            let f = load_input(spectrum)?;
            let model = SpectralModel::from_json_str(&f.text)?;
            let rk = spectral::rk_coefficients(&model);
            // Largest violation of the modulus bound
            // |r_j|^2 (1+lambda_j^2)^(-p) <= 1/(2 k |lambda_j|); positive
            // excess would indicate a branch or formula error.
            let mut max_excess = f64::NEG_INFINITY;
            for (j, l) in model.eigenvalues().iter().enumerate() {
                let lhs = rk[j].norm_sqr() / model.p_factor(j);
                let rhs = 1.0 / (2.0 * model.level() * l.abs());
                max_excess = max_excess.max(lhs - rhs);
            }
            let result = json!({
                "modes": model.modes(),
                "eigenvalues": model.eigenvalues(),
                "weight_p": model.weight(),
                "level_k": model.level(),
                "regulator_n": serde_json::to_value(model.regulator())?,
                "spectral_gap": model.rho(),
                "summability": model.summability(),
                "rescaling_coefficients": rk.iter().map(|z| pair(*z)).collect::<Vec<_>>(),
                "modulus_bound_max_excess": max_excess,
            });
            Ok(RunOutput {
                command: "spectrum-info",
                params: json!({}),
                seed: None,
                inputs: vec![f],
                result,
            })
        }
    }
}

fn render_report(out: RunOutput) -> Result<String> {
    // Field order is fixed by construction; serde_json maps are sorted, so
    // the rendering is deterministic.
    let mut report = serde_json::Map::new();
    report.insert("schema_version".into(), json!(SCHEMA_VERSION));
    report.insert("tool".into(), json!("wilsonline"));
    report.insert("version".into(), json!(env!("CARGO_PKG_VERSION")));
    report.insert("command".into(), json!(out.command));
    report.insert("params".into(), out.params);
    report.insert("seed".into(), json!(out.seed));
    report.insert(
        "inputs".into(),
        Value::Array(
            out.inputs
                .iter()
                .map(|f| json!({"path": f.path, "sha256": f.sha256}))
                .collect(),
        ),
    );
    let stamp = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    report.insert("timestamp_unix".into(), json!(stamp));
    report.insert("result".into(), out.result);
    let mut text = serde_json::to_string_pretty(&Value::Object(report))?;
    text.push('\n');
    Ok(text)
}

/// Run the CLI against explicit arguments and return the report text.
/// Exposed for tests; [`run`] is the binary entry point.
pub fn run_with_args<I, S>(args: I) -> Result<String>
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::try_parse_from(args)
        .map_err(|e| EngineError::Validation(e.to_string()))?;
    let output = execute(&cli)?;
    render_report(output)
}

/// Parse `std::env::args`, execute, and return the process exit code.
pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            // Help/version exit 0; usage errors exit 2 (clap's own codes).
            let _ = e.print();
            return e.exit_code();
        }
    };
    match execute(&cli).and_then(render_report) {
        Ok(text) => match &cli.out {
            Some(path) => {
                if let Err(e) = std::fs::write(path, text.as_bytes()) {
                    eprintln!("error: cannot write report to {}: {e}", path.display());
                    return 2;
                }
                0
            }
            None => {
                print!("{text}");
                0
            }
        },
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn strip_timestamp(report: &str) -> String {
        report
            .lines()
            .filter(|l| !l.trim_start().starts_with("\"timestamp_unix\""))
            .collect::<Vec<_>>()
            .join("\n")
    }

    #[test]
    fn expand_report_is_deterministic_modulo_timestamp() {
        let args = ["wilsonline", "expand", "--L", "1", "--k", "10", "--N", "4"];
        let a = run_with_args(args).unwrap();
        let b = run_with_args(args).unwrap();
        assert_eq!(strip_timestamp(&a), strip_timestamp(&b));
        let v: Value = serde_json::from_str(&a).unwrap();
        assert_eq!(v["schema_version"], 1);
        assert_eq!(v["command"], "expand");
        assert_eq!(v["result"]["closed_form"].as_array().unwrap().len(), 2);
    }

    #[test]
    fn mc_preset_flags() {
        let report = run_with_args([
            "wilsonline", "mc", "--preset", "two-loop-unit", "--samples", "50", "--order", "2",
        ])
        .unwrap();
        let v: Value = serde_json::from_str(&report).unwrap();
        assert_eq!(v["seed"], 1);
        assert!(v["result"]["estimate"]["mean_re"].is_f64());
        assert!(v["result"]["reference"]["linking"].is_f64());

        assert!(run_with_args(["wilsonline", "mc"]).is_err());
        assert!(run_with_args([
            "wilsonline", "mc", "--preset", "two-loop-unit", "--spectrum", "x.json"
        ])
        .is_err());
        assert!(run_with_args(["wilsonline", "mc", "--preset", "nope"]).is_err());
        assert!(run_with_args([
            "wilsonline", "mc", "--preset", "two-loop-unit", "--basis", "su3"
        ])
        .is_err());
    }

    #[test]
    fn currents_file_round_trip() {
        let text = r#"{
            "loops": [
                {"currents": [
                    {"lie_index": 0, "times": [0.0, 0.5, 1.0],
                     "coeffs": [[0.0, 0.0], [0.5, -0.5], [1.0, -1.0]]}
                ]}
            ]
        }"#;
        let loops = parse_currents(text).unwrap();
        assert_eq!(loops.len(), 1);
        assert_eq!(loops[0][0].dim(), 2);
        assert_eq!(loops[0][0].value(2).coeffs(), &[1.0, -1.0]);
        assert!(parse_currents(r#"{"loops": [{"currents": [{"lie_index": 0, "times": [0.0], "coeffs": [[1.0]]}]}]}"#).is_err());
    }

    #[test]
    fn file_commands_validate_before_compute() {
        assert!(run_with_args(["wilsonline", "link", "--loop1", "/nonexistent-a.json", "--loop2", "/nonexistent-b.json"]).is_err());

        let dir = tempfile::tempdir().unwrap();
        let spectrum = dir.path().join("model.json");
        let mut f = std::fs::File::create(&spectrum).unwrap();
        write!(f, r#"{{"eigenvalues": [1.0, -2.0], "p": 1, "k": 2.0, "n": 4.0}}"#).unwrap();
        let report = run_with_args([
            "wilsonline",
            "fresnel-check",
            "--spectrum",
            spectrum.to_str().unwrap(),
        ])
        .unwrap();
        let v: Value = serde_json::from_str(&report).unwrap();
        assert!(v["result"]["difference"].as_f64().unwrap() < 1e-6);
        assert_eq!(v["inputs"][0]["sha256"].as_str().unwrap().len(), 64);

        let info = run_with_args([
            "wilsonline",
            "spectrum-info",
            "--spectrum",
            spectrum.to_str().unwrap(),
        ])
        .unwrap();
        let v: Value = serde_json::from_str(&info).unwrap();
        assert_eq!(v["result"]["modes"], 2);
        assert!(v["result"]["modulus_bound_max_excess"].as_f64().unwrap() <= 1e-12);
    }
}
