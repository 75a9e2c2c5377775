//! `tubecut`: command-line front end for the tube-body cut-volume laboratory.
//!
//! Every subcommand prints JSON lines to standard output (`--pretty` switches
//! to an aligned key/value listing) and writes files only where `--out` or
//! `--report` is given. Exit codes: 0 on success, 1 on computation failure,
//! 2 on usage errors.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{Value, json};

use tubecut_core::algebra::{self, FitTarget, PhiModel, PolynomialModel};
use tubecut_core::body::{
    BodySpec, Hyperplane, NormalForm, Side, reduce_to_normal_form, total_volume,
};
use tubecut_core::certify::{self, SuiteConfig, VolumeSample};
use tubecut_core::classify::{DEFAULT_DISCRIMINANT_TOL, DomainLabel, classify_normal_form};
use tubecut_core::monodromy::{LeafSet, LoopSpec, loop_to_perm, transport_leaf};
use tubecut_core::oracle::mc_cut_volume;
use tubecut_core::quadrature::cut_volume;
use tubecut_core::{Error, Method};

#[derive(Parser)]
#[command(
    name = "tubecut",
    about = "Cut volumes, domain classification, S/P surface fits and monodromy for spherical tube bodies",
    version
)]
struct Cli {
    /// Human-readable table output instead of JSON lines.
    #[arg(long, global = true)]
    pretty: bool,
    /// Cap the worker threads (results do not depend on this).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct SpecArgs {
    /// x-block dimension (odd, ≥ 3).
    #[arg(long, default_value_t = 3)]
    n: u32,
    /// y-block dimension (even, ≥ 2).
    #[arg(long, default_value_t = 2)]
    m: u32,
    /// Tube radius in (0, 1).
    #[arg(long, default_value_t = 0.5)]
    eps: f64,
}

impl SpecArgs {
    fn spec(&self) -> Result<BodySpec, CliError> {
        BodySpec::new(self.n, self.m, self.eps).map_err(CliError::usage)
    }
}

#[derive(Args)]
struct PlaneArgs {
    /// Slope of the normal form x₁ = a·y₁ + c.
    #[arg(long, allow_hyphen_values = true)]
    a: Option<f64>,
    /// Offset of the normal form.
    #[arg(long, allow_hyphen_values = true)]
    c: Option<f64>,
    /// Full-coordinate plane a1,..,an,g1,..,gm,b (alternative to --a/--c;
    /// zero alphas give the degenerate family y₁ = c).
    #[arg(long, value_name = "COEFFS", allow_hyphen_values = true)]
    plane: Option<String>,
}

impl PlaneArgs {
    fn normal_form(&self, spec: &BodySpec) -> Result<NormalForm, CliError> {
        match (&self.plane, self.a, self.c) {
            (Some(text), None, None) => {
                let coeffs = parse_numbers(text)?;
                if coeffs.len() != spec.dim() + 1 {
                    return Err(CliError::Usage(format!(
                        "--plane needs n+m+1 = {} numbers, got {}",
                        spec.dim() + 1,
                        coeffs.len()
                    )));
                }
                let (alpha, rest) = coeffs.split_at(spec.n() as usize);
                let (gamma, beta) = rest.split_at(spec.m() as usize);
                let h = Hyperplane::new(alpha.to_vec(), gamma.to_vec(), beta[0])
                    .map_err(CliError::usage)?;
                Ok(reduce_to_normal_form(&h))
            }
            (None, Some(a), Some(c)) => NormalForm::new(a, c).map_err(CliError::usage),
            _ => Err(CliError::Usage(
                "give either --a and --c, or --plane".into(),
            )),
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form total volume C₀ of the body.
    Total(SpecArgs),
    /// Cut volume of a plane, by quadrature or Monte Carlo (--mc).
    Volume {
        #[command(flatten)]
        spec: SpecArgs,
        #[command(flatten)]
        plane: PlaneArgs,
        #[arg(long, default_value = "geq")]
        side: String,
        /// Absolute quadrature tolerance.
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        /// Use the tube Monte Carlo sampler instead of quadrature.
        #[arg(long)]
        mc: bool,
        #[arg(long, default_value_t = 1_000_000)]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Domain label of a plane: 1, 2l, 2r, 3, 4 or near-discriminant.
    Classify {
        #[command(flatten)]
        spec: SpecArgs,
        #[command(flatten)]
        plane: PlaneArgs,
        #[arg(long, default_value_t = DEFAULT_DISCRIMINANT_TOL)]
        tol: f64,
    },
    /// Sample cut volumes over an (a, c) grid filtered to one domain.
    Sample {
        #[command(flatten)]
        spec: SpecArgs,
        /// Target domain: 1, 2l, 2r, 3 or 4.
        #[arg(long)]
        domain: String,
        /// Grid size as NxM (N slopes × M offsets).
        #[arg(long, default_value = "10x10")]
        grid: String,
        /// Slope range lo:hi.
        #[arg(long, value_name = "LO:HI", default_value = "0:1.5", allow_hyphen_values = true)]
        a_range: String,
        /// Offset range lo:hi.
        #[arg(long, value_name = "LO:HI", default_value = "-2:2", allow_hyphen_values = true)]
        c_range: String,
        #[arg(long, default_value = "geq")]
        side: String,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        /// CSV output path; without it rows go to stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Fit the S or P surface from a sample CSV.
    Fit {
        /// Sample CSV (from `sample`).
        #[arg(long)]
        input: PathBuf,
        /// S or P.
        #[arg(long)]
        target: String,
        #[arg(long)]
        deg_a: u32,
        #[arg(long)]
        deg_c: u32,
        /// Fitted S model JSON (required for --target P).
        #[arg(long)]
        s_model: Option<PathBuf>,
        /// Model JSON output path.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Candidate volumes at (a, c) from fitted S and P models.
    Predict {
        /// Comma-separated S and P model paths.
        #[arg(long, value_name = "S.json,P.json")]
        models: String,
        #[arg(long, allow_hyphen_values = true)]
        a: f64,
        #[arg(long, allow_hyphen_values = true)]
        c: f64,
        #[arg(long, default_value_t = DEFAULT_DISCRIMINANT_TOL)]
        tol: f64,
    },
    /// Run the verification suite and write a JSON report.
    Certify {
        /// Suite configuration JSON (defaults apply to missing fields).
        #[arg(long)]
        config: Option<PathBuf>,
        /// Report output path.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Monodromy image of a loop and optional leaf transport.
    Monodromy {
        /// Linking numbers lk3,lk4 with the two asymptotic strata.
        #[arg(long = "loop", value_name = "LK3,LK4", allow_hyphen_values = true)]
        loop_spec: String,
        /// Leaf to transport, e.g. L-,R-.
        #[arg(long)]
        leaf: Option<String>,
    },
}

enum CliError {
    Usage(String),
    Computation(String),
}

impl CliError {
    fn usage(e: impl std::fmt::Display) -> CliError {
        CliError::Usage(e.to_string())
    }

    fn computation(e: impl std::fmt::Display) -> CliError {
        CliError::Computation(e.to_string())
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidSpec(_)
            | Error::InvalidArgument(_)
            | Error::DegenerateHyperplane
            | Error::Csv { .. } => CliError::Usage(e.to_string()),
            other => CliError::Computation(other.to_string()),
        }
    }
}

fn parse_numbers(text: &str) -> Result<Vec<f64>, CliError> {
    text.split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(|p| {
            p.parse::<f64>()
                .map_err(|e| CliError::Usage(format!("bad number `{p}`: {e}")))
        })
        .collect()
}

fn parse_range(text: &str) -> Result<(f64, f64), CliError> {
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() != 2 {
        return Err(CliError::Usage(format!("range must be lo:hi, got `{text}`")));
    }
    let lo = parts[0]
        .trim()
        .parse::<f64>()
        .map_err(|e| CliError::Usage(format!("bad range bound `{}`: {e}", parts[0])))?;
    let hi = parts[1]
        .trim()
        .parse::<f64>()
        .map_err(|e| CliError::Usage(format!("bad range bound `{}`: {e}", parts[1])))?;
    let range_ok = lo < hi; // also rejects NaN bounds
    if !range_ok {
        return Err(CliError::Usage(format!("empty range `{text}`")));
    }
    Ok((lo, hi))
}

fn parse_grid(text: &str) -> Result<(usize, usize), CliError> {
    let parts: Vec<&str> = text.split(['x', 'X']).collect();
    if parts.len() != 2 {
        return Err(CliError::Usage(format!("grid must be NxM, got `{text}`")));
    }
    let parse = |p: &str| {
        p.trim()
            .parse::<usize>()
            .map_err(|e| CliError::Usage(format!("bad grid size `{p}`: {e}")))
    };
    let (na, nc) = (parse(parts[0])?, parse(parts[1])?);
    if na == 0 || nc == 0 {
        return Err(CliError::Usage("grid sizes must be positive".into()));
    }
    Ok((na, nc))
}

fn emit(value: &Value, pretty: bool) {
    if pretty {
        match value.as_object() {
            Some(map) => {
                let width = map.keys().map(String::len).max().unwrap_or(0);
                for (k, v) in map {
                    println!("{k:<width$}  {v}");
                }
            }
            None => println!("{value}"),
        }
    } else {
        println!("{value}");
    }
}

fn volume_row_json(s: &VolumeSample) -> Value {
    json!({
        "a": s.a,
        "c": s.c,
        "side": s.side.to_string(),
        "domain": s.domain.to_string(),
        "volume": s.volume,
        "stderr": s.stderr,
        "method": s.method.to_string(),
    })
}

fn load_model(path: &PathBuf) -> Result<PolynomialModel, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

fn run(cli: Cli) -> Result<(), CliError> {
    let pretty = cli.pretty;
    match cli.command {
        Command::Total(spec_args) => {
            let spec = spec_args.spec()?;
            emit(&json!({ "C0": total_volume(&spec) }), pretty);
        }
        Command::Volume {
            spec,
            plane,
            side,
            tol,
            mc,
            samples,
            seed,
        } => {
            let spec = spec.spec()?;
            let nf = plane.normal_form(&spec)?;
            let side: Side = side.parse().map_err(CliError::usage)?;
            let result = if mc {
                mc_cut_volume(&spec, &nf, side, samples, seed).map_err(CliError::computation)?
            } else {
                cut_volume(&spec, &nf, side, tol).map_err(CliError::computation)?
            };
            emit(
                &json!({
                    "a": nf.a,
                    "c": nf.c,
                    "degenerate": nf.degenerate,
                    "side": side.to_string(),
                    "domain": classify_normal_form(&nf, &spec, DEFAULT_DISCRIMINANT_TOL).to_string(),
                    "value": result.value,
                    "error": result.error_estimate,
                    "method": result.method.to_string(),
                }),
                pretty,
            );
        }
        Command::Classify { spec, plane, tol } => {
            let spec = spec.spec()?;
            let nf = plane.normal_form(&spec)?;
            let label = classify_normal_form(&nf, &spec, tol);
            emit(
                &json!({
                    "a": nf.a,
                    "c": nf.c,
                    "degenerate": nf.degenerate,
                    "domain": label.to_string(),
                }),
                pretty,
            );
        }
        Command::Sample {
            spec,
            domain,
            grid,
            a_range,
            c_range,
            side,
            tol,
            out,
        } => {
            let spec = spec.spec()?;
            let domain: DomainLabel = domain.parse().map_err(CliError::usage)?;
            let (na, nc) = parse_grid(&grid)?;
            let (a_lo, a_hi) = parse_range(&a_range)?;
            let (c_lo, c_hi) = parse_range(&c_range)?;
            let side: Side = side.parse().map_err(CliError::usage)?;
            let mut points = Vec::new();
            for ia in 0..na {
                let a = if na == 1 {
                    0.5 * (a_lo + a_hi)
                } else {
                    a_lo + (a_hi - a_lo) * ia as f64 / (na - 1) as f64
                };
                for ic in 0..nc {
                    let c = if nc == 1 {
                        0.5 * (c_lo + c_hi)
                    } else {
                        c_lo + (c_hi - c_lo) * ic as f64 / (nc - 1) as f64
                    };
                    if tubecut_core::classify::classify(a, c, &spec, DEFAULT_DISCRIMINANT_TOL)
                        == domain
                    {
                        points.push((a, c));
                    }
                }
            }
            let rows =
                certify::measure_grid(&spec, &points, side, tol).map_err(CliError::computation)?;
            match out {
                Some(path) => {
                    certify::write_samples(&rows, &path).map_err(CliError::computation)?;
                    emit(
                        &json!({ "written": rows.len(), "file": path.display().to_string() }),
                        pretty,
                    );
                }
                None => {
                    for row in &rows {
                        emit(&volume_row_json(row), pretty);
                    }
                }
            }
        }
        Command::Fit {
            input,
            target,
            deg_a,
            deg_c,
            s_model,
            out,
        } => {
            let target: FitTarget = target.parse().map_err(CliError::usage)?;
            let rows = certify::read_samples(&input)?;
            let first = rows
                .first()
                .ok_or_else(|| CliError::Usage("input CSV has no rows".into()))?;
            let spec = BodySpec::new(first.n, first.m, first.eps).map_err(CliError::usage)?;
            let geq_rows: Vec<VolumeSample> = rows
                .iter()
                .filter(|r| r.side == Side::Geq && r.method != Method::MonteCarlo)
                .copied()
                .collect();
            let model = match target {
                FitTarget::S => {
                    let samples: Vec<(f64, f64, f64)> = geq_rows
                        .iter()
                        .filter(|r| r.domain == DomainLabel::Separating3)
                        .map(|r| (r.a, r.c, r.volume))
                        .collect();
                    algebra::fit_s(&spec, &samples, deg_a, deg_c).map_err(CliError::computation)?
                }
                FitTarget::P => {
                    let s_path = s_model.ok_or_else(|| {
                        CliError::Usage("--target P needs --s-model MODEL.json".into())
                    })?;
                    let s = load_model(&s_path)?;
                    let samples: Vec<(f64, f64, f64)> = geq_rows
                        .iter()
                        .filter(|r| r.domain == DomainLabel::RightOnly2r)
                        .map(|r| (r.a, r.c, r.volume))
                        .collect();
                    let p_samples = algebra::derive_p_samples(&spec, &samples, &s)
                        .map_err(CliError::computation)?;
                    algebra::fit_p(&spec, &p_samples, deg_a, deg_c)
                        .map_err(CliError::computation)?
                }
            };
            if let Some(path) = &out {
                let text =
                    serde_json::to_string_pretty(&model).map_err(CliError::computation)?;
                std::fs::write(path, text + "\n").map_err(CliError::computation)?;
            }
            emit(
                &json!({
                    "target": model.target.to_string(),
                    "k": model.weight_exponent,
                    "degree_a": model.degree_a,
                    "degree_c": model.degree_c,
                    "terms": model.basis.len(),
                    "residual_rms": model.residual_rms,
                    "written": out.map(|p| p.display().to_string()),
                }),
                pretty,
            );
        }
        Command::Predict { models, a, c, tol } => {
            let paths: Vec<&str> = models.split(',').map(str::trim).collect();
            if paths.len() != 2 {
                return Err(CliError::Usage(
                    "--models needs exactly two paths: S.json,P.json".into(),
                ));
            }
            let s = load_model(&PathBuf::from(paths[0]))?;
            let p = load_model(&PathBuf::from(paths[1]))?;
            let phi = PhiModel::new(s, p).map_err(CliError::usage)?;
            let spec = phi.spec();
            let label = tubecut_core::classify::classify(a, c, &spec, tol);
            let prediction =
                algebra::predict_candidates(&phi, a, c, label).map_err(CliError::computation)?;
            let roots = algebra::phi_roots(&phi, a, c);
            emit(
                &json!({
                    "a": a,
                    "c": c,
                    "domain": label.to_string(),
                    "S": phi.s_model.evaluate(a, c),
                    "P": phi.p_model.evaluate(a, c),
                    "roots": roots.iter().map(|r| json!({"re": r.re, "im": r.im})).collect::<Vec<_>>(),
                    "candidates": prediction.candidates,
                    "complex_discarded": prediction.complex_discarded,
                }),
                pretty,
            );
        }
        Command::Certify { config, report } => {
            let cfg: SuiteConfig = match config {
                Some(path) => {
                    let text = std::fs::read_to_string(&path)
                        .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
                    serde_json::from_str(&text)
                        .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?
                }
                None => SuiteConfig::default(),
            };
            let mut outcome = certify::run_suite(&cfg).map_err(CliError::usage)?;
            outcome.timestamp = Some(
                std::time::SystemTime::now()
                    .duration_since(std::time::UNIX_EPOCH)
                    .map(|d| d.as_secs().to_string())
                    .unwrap_or_default(),
            );
            for check in &outcome.checks {
                emit(
                    &json!({
                        "check": check.name,
                        "status": format!("{:?}", check.status).to_lowercase(),
                        "measured": check.measured,
                        "target": check.target,
                        "tolerance": check.tolerance,
                    }),
                    pretty,
                );
            }
            let (pass, fail, finding, error) = outcome.counts();
            if let Some(path) = &report {
                certify::write_report(&outcome, path).map_err(CliError::computation)?;
            }
            emit(
                &json!({
                    "pass": pass,
                    "fail": fail,
                    "finding": finding,
                    "error": error,
                    "report": report.map(|p| p.display().to_string()),
                }),
                pretty,
            );
            if fail > 0 || error > 0 {
                return Err(CliError::Computation(format!(
                    "{fail} checks failed, {error} errored"
                )));
            }
        }
        Command::Monodromy { loop_spec, leaf } => {
            let numbers = parse_numbers(&loop_spec)?;
            if numbers.len() != 2 || numbers.iter().any(|v| v.fract() != 0.0) {
                return Err(CliError::Usage(
                    "--loop needs two integers lk3,lk4".into(),
                ));
            }
            let lp = LoopSpec {
                lk3: numbers[0] as i64,
                lk4: numbers[1] as i64,
            };
            let perm = loop_to_perm(lp);
            let mut out = json!({ "perm": perm.to_string() });
            if let Some(leaf_text) = leaf {
                let leaf: LeafSet = leaf_text.parse().map_err(CliError::usage)?;
                let image = transport_leaf(leaf, lp);
                out["leaf"] = json!(
                    image
                        .labels()
                        .iter()
                        .map(ToString::to_string)
                        .collect::<Vec<_>>()
                );
            }
            emit(&out, pretty);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        // Ignore failure: the pool may already be initialized in tests.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global();
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Computation(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            ExitCode::from(2)
        }
    }
}
