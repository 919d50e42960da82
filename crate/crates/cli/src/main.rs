//! `dehnfill`: command-line front end.
//!
//! Exit codes: 0 success, 1 domain failure, 2 usage or file error.

mod parse;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use dehnfill::classify::{projective_order, sigma_order, slope_action, verify_subgroup_relations};
use dehnfill::io::{
    self, matrix_dto, verdict_dto, write_manifold, write_reports, ClassifyDto, InvariantsDto, SolutionDto, SubgroupSpecFile, SymmetriesDto,
    SymmetryDto, ValidationDto, WitnessDto,
};
use dehnfill::{
    classify_pair, filling_invariants, make_sgi, make_symmetric_curve, search_equal_pvol, solve_filling, symmetry_matrices, verify_pair,
    ClassificationVerdict, Float, NZPotential, QuadraticNumber, SlopeRange,
};

#[derive(Parser, Debug)]
#[command(name = "dehnfill", version, about = "Dehn fillings, pseudo complex volumes and their classification")]
struct Cli {
    /// Working precision in bits (at least 64).
    #[arg(long, global = true, env = dehnfill::PRECISION_ENV_VAR, default_value_t = dehnfill::DEFAULT_PRECISION_BITS)]
    precision_bits: u32,
    /// Order N of the longitude series; the potential is kept through order N+1.
    #[arg(long, global = true)]
    truncation_order: Option<u32>,
    /// Matching tolerance on the pseudo-volume cylinder.
    #[arg(long, global = true, default_value = "1e-20")]
    tol: String,
    /// Worker threads for `search` (default: available parallelism).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum MakeKind {
    Sgi,
    SymmetricCurve,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check the potential axioms of a manifold file.
    Validate { manifold: PathBuf },
    /// Build a synthetic manifold.
    Make {
        #[arg(long, value_enum)]
        kind: MakeKind,
        #[arg(long, required_if_eq("kind", "sgi"))]
        curve1: Option<PathBuf>,
        #[arg(long, required_if_eq("kind", "sgi"))]
        curve2: Option<PathBuf>,
        #[arg(long, required_if_eq("kind", "symmetric-curve"), allow_hyphen_values = true)]
        tau: Option<String>,
        /// Free coefficients, `order=coeff,...`.
        #[arg(long, default_value = "")]
        seed: String,
        #[arg(long)]
        label: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve the filling equations.
    Solve {
        #[arg(long)]
        manifold: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        slopes: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Core holonomies, complex lengths, pseudo complex volume and complex volume.
    Invariants {
        #[arg(long)]
        manifold: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        slopes: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Pairs of slope tuples with equal pseudo complex volume.
    Search {
        #[arg(long)]
        manifold: PathBuf,
        #[arg(long)]
        min_norm: i64,
        #[arg(long)]
        max_norm: i64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Classify a pair of two-cusp slope tuples.
    Classify {
        #[arg(long)]
        tau1: String,
        #[arg(long)]
        tau2: String,
        /// `p1/q1,p2/q2;p1'/q1',p2'/q2'`
        #[arg(long, allow_hyphen_values = true)]
        pair: String,
        /// Expected verdict kind; a mismatch exits with 1.
        #[arg(long)]
        expect: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Symmetry matrices of a cusp shape.
    Symmetries {
        #[arg(long)]
        tau: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exact identity checklist for a subgroup specification file.
    VerifyRelations {
        #[arg(long)]
        spec: PathBuf,
        /// `p1/q1,p2/q2;p1'/q1',p2'/q2'`, overriding the file.
        #[arg(long, allow_hyphen_values = true)]
        slopes: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Full report for one pair of slope tuples.
    VerifyPair {
        #[arg(long)]
        manifold: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        slopes: String,
        #[arg(long, allow_hyphen_values = true)]
        slopes_prime: String,
        #[arg(long)]
        expect: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

enum Failure {
    /// Bad arguments or unreadable files.
    Usage(String),
    Domain(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Domain(_) => 1,
            Failure::Usage(_) => 2,
        }
    }
}

type Res<T> = Result<T, Failure>;

fn usage<E: std::fmt::Display>(e: E) -> Failure {
    Failure::Usage(e.to_string())
}

fn domain<E: std::fmt::Display>(e: E) -> Failure {
    Failure::Domain(e.to_string())
}

struct Config {
    prec: u32,
    truncation: Option<u32>,
    tol: Float,
}

fn read_file(p: &Path) -> Res<String> {
    std::fs::read_to_string(p).map_err(|e| Failure::Usage(format!("{}: {e}", p.display())))
}

fn emit(text: &str, out: Option<&Path>) -> Res<()> {
    match out {
        Some(p) => std::fs::write(p, format!("{text}\n")).map_err(|e| Failure::Usage(format!("{}: {e}", p.display()))),
        None => {
            use std::io::Write;
            match writeln!(std::io::stdout().lock(), "{text}") {
                // a closed reader (e.g. `| head`) is not an error
                Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(Failure::Usage(format!("stdout: {e}"))),
                _ => Ok(()),
            }
        }
    }
}

fn json<T: serde::Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("plain data serializes")
}

fn load_manifold(p: &Path, cfg: &Config) -> Res<NZPotential> {
    let text = read_file(p)?;
    let m = io::read_manifold(&text, Some(cfg.prec)).map_err(|e| Failure::Usage(format!("{}: {e}", p.display())))?;
    Ok(match cfg.truncation {
        Some(n) => NZPotential::new(m.label.clone(), m.phi.with_order(n + 1), m.cusp_shapes.clone(), m.base_cvol.clone(), m.sgi),
        None => m,
    })
}

fn shape(expr: &str) -> Res<QuadraticNumber> {
    QuadraticNumber::parse(expr).map_err(|e| Failure::Usage(format!("shape: {e}")))
}

fn check_expect(expect: Option<&str>, got: Option<&ClassificationVerdict>) -> Res<()> {
    if let Some(want) = expect {
        let kind = got.map_or(io::SHAPES_INEXACT, |v| v.kind());
        if !kind.eq_ignore_ascii_case(want) {
            return Err(Failure::Domain(format!("expected verdict {want}, got {kind}")));
        }
    }
    Ok(())
}

fn run(cli: Cli) -> Res<()> {
    if cli.precision_bits < dehnfill::series::MIN_PRECISION_BITS {
        return Err(Failure::Usage(format!("--precision-bits must be at least {}", dehnfill::series::MIN_PRECISION_BITS)));
    }
    if matches!(cli.truncation_order, Some(n) if n < 3) {
        return Err(Failure::Usage("--truncation-order must be at least 3".into()));
    }
    let tol = io::parse_float(&cli.tol, cli.precision_bits).map_err(|_| Failure::Usage(format!("bad --tol {:?}", cli.tol)))?;
    if tol.is_sign_negative() {
        return Err(Failure::Usage("--tol must be nonnegative".into()));
    }
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(usage)?;
    }
    let cfg = Config { prec: cli.precision_bits, truncation: cli.truncation_order, tol };

    match cli.command {
        Command::Validate { manifold } => {
            let m = load_manifold(&manifold, &cfg)?;
            let report = m.validate();
            let dto = ValidationDto { label: m.label.clone(), valid: report.is_valid(), violations: report.violations.clone() };
            emit(&json(&dto), None)?;
            if !report.is_valid() {
                return Err(Failure::Domain(format!("{} violation(s)", report.violations.len())));
            }
        }
        Command::Make { kind, curve1, curve2, tau, seed, label, out } => {
            let mut m = match kind {
                MakeKind::Sgi => {
                    let c1 = load_manifold(curve1.as_deref().expect("required"), &cfg)?;
                    let c2 = load_manifold(curve2.as_deref().expect("required"), &cfg)?;
                    if c1.n_cusps != 1 || c2.n_cusps != 1 {
                        return Err(Failure::Usage("curve files must describe one-cusp manifolds".into()));
                    }
                    let base = dehnfill::BigComplex::zero(cfg.prec);
                    let mut m = make_sgi(&c1.phi, &c2.phi, base).map_err(domain)?;
                    m.label = format!("sgi({},{})", c1.label, c2.label);
                    m.cusp_shapes = vec![c1.cusp_shapes[0].clone(), c2.cusp_shapes[0].clone()];
                    m
                }
                MakeKind::SymmetricCurve => {
                    let t = shape(tau.as_deref().expect("required"))?;
                    let sigma = symmetry_matrices(&t)
                        .map_err(domain)?
                        .into_iter()
                        .next()
                        .ok_or_else(|| Failure::Domain(format!("{t} has no symmetry matrix")))?;
                    let seeds = parse::seeds(&seed, cfg.prec).map_err(Failure::Usage)?;
                    let order = cfg.truncation.unwrap_or(dehnfill::DEFAULT_TRUNCATION_ORDER);
                    make_symmetric_curve(&t, &sigma, &seeds, order, cfg.prec).map_err(domain)?
                }
            };
            if let Some(l) = label {
                m.label = l;
            }
            let report = m.validate();
            if !report.is_valid() {
                return Err(Failure::Domain(format!("constructed manifold is invalid: {report}")));
            }
            emit(&write_manifold(&m), out.as_deref())?;
        }
        Command::Solve { manifold, slopes, out } => {
            let m = load_manifold(&manifold, &cfg)?;
            let s = parse::filling_slopes(&slopes).map_err(Failure::Usage)?;
            let sol = solve_filling(&m, &s, cfg.prec).map_err(domain)?;
            emit(&json(&SolutionDto::from_solution(&sol)), out.as_deref())?;
        }
        Command::Invariants { manifold, slopes, out } => {
            let m = load_manifold(&manifold, &cfg)?;
            let s = parse::filling_slopes(&slopes).map_err(Failure::Usage)?;
            let sol = solve_filling(&m, &s, cfg.prec).map_err(domain)?;
            let inv = filling_invariants(&m, &sol).map_err(domain)?;
            emit(&json(&InvariantsDto::new(&s, &inv)), out.as_deref())?;
        }
        Command::Search { manifold, min_norm, max_norm, out } => {
            let m = load_manifold(&manifold, &cfg)?;
            let range = SlopeRange::new(min_norm, max_norm).map_err(usage)?;
            let res = search_equal_pvol(&m, range, &cfg.tol).map_err(domain)?;
            if !res.skipped.is_empty() {
                eprintln!(
                    "skipped {} of {} slope tuples outside the trusted neighborhood",
                    res.skipped.len(),
                    res.skipped.len() + res.evaluated
                );
                for s in res.skipped.iter().take(5) {
                    let names: Vec<String> = s.slopes.iter().map(|x| x.to_string()).collect();
                    eprintln!("  ({}): {}", names.join(","), s.reason);
                }
            }
            log::info!("{} pair(s) within tolerance", res.reports.len());
            emit(&write_reports(&res.reports), out.as_deref())?;
        }
        Command::Classify { tau1, tau2, pair, expect, out } => {
            let t1 = shape(&tau1)?;
            let t2 = shape(&tau2)?;
            let (s, s2) = parse::slope_pair(&pair).map_err(Failure::Usage)?;
            let c1 = dehnfill::CuspShape::quadratic(t1, cfg.prec);
            let c2 = dehnfill::CuspShape::quadratic(t2, cfg.prec);
            let v = classify_pair(&c1, &c2, s, s2).map_err(domain)?;
            let dto = ClassifyDto {
                tau1,
                tau2,
                slopes: s.iter().map(|x| x.to_string()).collect(),
                slopes_prime: s2.iter().map(|x| x.to_string()).collect(),
                verdict: verdict_dto(&v),
            };
            emit(&json(&dto), out.as_deref())?;
            check_expect(expect.as_deref(), Some(&v))?;
        }
        Command::Symmetries { tau, out } => {
            let t = shape(&tau)?;
            let mut symmetries = Vec::new();
            for sigma in symmetry_matrices(&t).map_err(domain)? {
                let act = slope_action(&sigma).map_err(domain)?;
                symmetries.push(SymmetryDto {
                    sigma: matrix_dto(&sigma),
                    order: sigma_order(&sigma).map_err(domain)?,
                    slope_action: matrix_dto(&act),
                    slope_order: projective_order(&act),
                });
            }
            emit(&json(&SymmetriesDto { tau, symmetries }), out.as_deref())?;
        }
        Command::VerifyRelations { spec, slopes, out } => {
            let text = read_file(&spec)?;
            let file: SubgroupSpecFile = serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("{}: {e}", spec.display())))?;
            let sp = file.to_spec().map_err(usage)?;
            let (s, s2) = match slopes {
                Some(x) => parse::oriented_pair(&x).map_err(Failure::Usage)?,
                None => match (file.slopes, file.slopes_prime) {
                    (Some(a), Some(b)) => ([a[0].to_slope(), a[1].to_slope()], [b[0].to_slope(), b[1].to_slope()]),
                    _ => return Err(Failure::Usage("slopes missing: pass --slopes or put them in the spec file".into())),
                },
            };
            let hol = file.holonomy_data(cfg.prec).map_err(usage)?;
            let w = verify_subgroup_relations(&sp, &s, &s2, hol.as_ref()).map_err(usage)?;
            emit(&json(&WitnessDto::new(sp.shape, &w)), out.as_deref())?;
        }
        Command::VerifyPair { manifold, slopes, slopes_prime, expect, out } => {
            let m = load_manifold(&manifold, &cfg)?;
            let a = parse::filling_slopes(&slopes).map_err(Failure::Usage)?;
            let b = parse::filling_slopes(&slopes_prime).map_err(Failure::Usage)?;
            let r = verify_pair(&m, &a, &b).map_err(domain)?;
            emit(&write_reports(std::slice::from_ref(&r)), out.as_deref())?;
            check_expect(expect.as_deref(), r.verdict.as_ref())?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            let (Failure::Usage(m) | Failure::Domain(m)) = &f;
            eprintln!("dehnfill: {m}");
            ExitCode::from(f.code())
        }
    }
}
