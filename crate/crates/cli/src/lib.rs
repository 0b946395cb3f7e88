//! `hclab` command-line front end.
//!
//! Exit codes: 0 success, 2 usage error, 3 numerical failure, 4 precondition
//! failure (including I/O).

pub mod grammar;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use hclab::enumerate::{canonical_samples, standard_candidates};
use hclab::report::{write_scan_csv, Report};
use hclab::{
    adjoint_nonhc_probe, check_hypotheses, check_kernel_range_disjoint, eigenvector,
    hypercyclic_vector, kernel_isomorphism, kernel_isomorphism_inverse, orbit_density_probe,
    periodic_point, probe_adjoint, spectrum_scan, verify_eigen, verify_periodic, ErrorClass,
    OperatorPair, PairDescriptor, PairSpec, Space, Transform, Vector,
};
use serde_json::json;

use grammar::{parse_complex, parse_grid, parse_space, parse_transform, parse_vector, SpaceArg, TransformArg};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;
pub const EXIT_PRECONDITION: i32 = 4;

const GRAMMAR: &str = "\
usage: hclab <subcommand> --pair <family> [--w re[+imi]] [--space lp:<p>|c0|poly] [--a R --b R]
             [--transform power:<n>|multiple:<lambda>|swap]... [--tol R] [--n-max N]
             [--out PATH] [--format json|csv] [--no-timestamp]
subcommands: check, periodic, eigen, iso, hypercyclic, scan, orbit, nonhc, kernel-range
subcommand flags: --N, --n, --lambda, --seed, --grid re0:re1:step,im0:im1:step, --targets PATH, --K, --budget";

#[derive(Parser, Debug)]
#[command(name = "hclab", version, about = "Periodic points, eigenvectors and hypercyclic vectors from right inverses")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Family {
    BoundedShift,
    UnboundedShift,
    #[value(alias = "differentiation")]
    Diff,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Role {
    A,
    B,
}

#[derive(Args, Debug, Clone)]
struct PairArgs {
    #[arg(long, value_enum)]
    pair: Family,
    /// Shift weight, |w| > 1.
    #[arg(long, default_value = "2", allow_hyphen_values = true)]
    w: String,
    #[arg(long, default_value = "lp:2")]
    space: String,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    a: f64,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    b: f64,
    /// Applied left to right.
    #[arg(long = "transform", allow_hyphen_values = true)]
    transforms: Vec<String>,
}

#[derive(Args, Debug, Clone)]
struct Common {
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    #[arg(long = "n-max", default_value_t = 64)]
    n_max: usize,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[arg(long = "no-timestamp")]
    no_timestamp: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check A B f = f and classify the decay of the iterates.
    Check {
        #[command(flatten)]
        pair: PairArgs,
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 20)]
        samples: usize,
    },
    /// Build a periodic point of period N.
    Periodic {
        #[command(flatten)]
        pair: PairArgs,
        #[command(flatten)]
        common: Common,
        #[arg(long = "N")]
        big_n: usize,
        #[arg(long, default_value = "1", allow_hyphen_values = true)]
        seed: String,
    },
    /// Build an eigenvector of A^n for lambda.
    Eigen {
        #[command(flatten)]
        pair: PairArgs,
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        n: usize,
        #[arg(long, allow_hyphen_values = true)]
        lambda: String,
        #[arg(long, default_value = "1", allow_hyphen_values = true)]
        seed: String,
    },
    /// Map a kernel vector of A^n into ker(A^n - lambda) and back.
    Iso {
        #[command(flatten)]
        pair: PairArgs,
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        n: usize,
        #[arg(long, allow_hyphen_values = true)]
        lambda: String,
        #[arg(long, default_value = "1", allow_hyphen_values = true)]
        seed: String,
    },
    /// Greedy hypercyclic vector over the canonical dense sequence.
    Hypercyclic {
        #[command(flatten)]
        pair: PairArgs,
        #[command(flatten)]
        common: Common,
        #[arg(long = "K")]
        big_k: usize,
        #[arg(long, default_value_t = 10_000)]
        budget: usize,
    },
    /// Attempt eigenvector constructions over a lambda grid.
    Scan {
        #[command(flatten)]
        pair: PairArgs,
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 1)]
        n: usize,
        #[arg(long, allow_hyphen_values = true)]
        grid: String,
        #[arg(long, default_value = "1", allow_hyphen_values = true)]
        seed: String,
    },
    /// Closest approach of an orbit to a list of targets.
    Orbit {
        #[command(flatten)]
        pair: PairArgs,
        #[command(flatten)]
        common: Common,
        #[arg(long, allow_hyphen_values = true)]
        seed: String,
        /// One vector per line; defaults to the first 10 canonical vectors.
        #[arg(long)]
        targets: Option<PathBuf>,
    },
    /// Adjoint orbit and eigenvalue probe.
    Nonhc {
        #[command(flatten)]
        pair: PairArgs,
        #[command(flatten)]
        common: Common,
        /// Probe the adjoint of A, or of B promoted to the main operator.
        #[arg(long, value_enum, default_value_t = Role::A)]
        operator: Role,
        /// Candidate dual vector; defaults to the standard candidate set.
        #[arg(long, allow_hyphen_values = true)]
        seed: Option<String>,
    },
    /// Check that ker A^n meets the range of B^n only in 0.
    KernelRange {
        #[command(flatten)]
        pair: PairArgs,
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        n: usize,
        #[arg(long = "support-cap", default_value_t = 12)]
        support_cap: usize,
    },
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Core(hclab::Error, String),
    Io(String),
}

impl Failure {
    fn exit_code(&self) -> i32 {
        match self {
            Failure::Usage(_) => EXIT_USAGE,
            Failure::Core(e, _) => exit_code_for(e),
            Failure::Io(_) => EXIT_PRECONDITION,
        }
    }
}

/// Exit code of a library error.
pub fn exit_code_for(e: &hclab::Error) -> i32 {
    match e.class() {
        ErrorClass::Numerical => EXIT_NUMERICAL,
        ErrorClass::Precondition => EXIT_PRECONDITION,
    }
}

type Step<T> = Result<T, Failure>;

fn usage<T>(msg: impl Into<String>) -> Step<T> {
    Err(Failure::Usage(msg.into()))
}

struct Context {
    spec: PairSpec,
    pair: OperatorPair,
    params: Vec<(String, serde_json::Value)>,
}

impl Context {
    fn core<T>(&self, r: hclab::Result<T>) -> Step<T> {
        r.map_err(|e| Failure::Core(e, self.param_summary()))
    }

    fn param_summary(&self) -> String {
        self.params
            .iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect::<Vec<_>>()
            .join(" ")
    }

    fn param(&mut self, key: &str, value: impl serde::Serialize) {
        let v = serde_json::to_value(value).unwrap_or(serde_json::Value::Null);
        self.params.push((key.to_string(), v));
    }

    fn vector(&self, s: &str) -> Step<Vector> {
        parse_vector(s, self.pair.space()).or_else(|e| usage(format!("bad vector '{s}': {e}")))
    }
}

fn build_context(args: &PairArgs) -> Step<Context> {
    let w = parse_complex(&args.w).or_else(|e| usage(format!("--w: {e}")))?;
    let space = parse_space(&args.space).or_else(|e| usage(format!("--space: {e}")))?;
    let descriptor = match args.pair {
        Family::Diff => PairDescriptor::Differentiation { a: args.a, b: args.b },
        family => {
            let space = match space {
                SpaceArg::Sequence(s) => s,
                SpaceArg::Poly => {
                    let e = hclab::Error::Param("shifts act on l_p or c0, not poly".into());
                    return Err(Failure::Core(e, format!("space={}", args.space)));
                }
            };
            if family == Family::BoundedShift {
                PairDescriptor::BoundedShift { w, space }
            } else {
                PairDescriptor::UnboundedShift { w, space }
            }
        }
    };
    let mut spec = PairSpec::Family(descriptor);
    for t in &args.transforms {
        let t = parse_transform(t).or_else(|e| usage(format!("--transform: {e}")))?;
        let base = Box::new(spec);
        spec = PairSpec::Transform(match t {
            TransformArg::Power(n) => Transform::Power { n, base },
            TransformArg::Multiple(lambda) => Transform::Multiple { lambda, base },
            TransformArg::Swap => Transform::Swap { base },
        });
    }
    let pair = spec
        .build()
        .map_err(|e| Failure::Core(e, format!("pair={}", serde_json::to_string(&spec).unwrap_or_default())))?;
    Ok(Context {
        spec,
        pair,
        params: Vec::new(),
    })
}

fn check_common(common: &Common) -> Step<()> {
    if !(common.tol > 0.0 && common.tol.is_finite()) {
        return usage(format!("--tol must be positive, got {}", common.tol));
    }
    if common.n_max == 0 {
        return usage("--n-max must be positive");
    }
    Ok(())
}

fn read_targets(path: &Path, space: Space) -> Step<Vec<Vector>> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
    let mut out = Vec::new();
    for line in text.lines().map(str::trim) {
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        out.push(parse_vector(line, space).or_else(|e| usage(format!("target '{line}': {e}")))?);
    }
    if out.is_empty() {
        return usage(format!("{} lists no targets", path.display()));
    }
    Ok(out)
}

enum Output {
    Json(Report),
    Csv(Vec<u8>),
}

fn execute(command: Command) -> Step<(Output, Option<PathBuf>)> {
    let (name, pair_args, common) = match &command {
        Command::Check { pair, common, .. } => ("check", pair, common),
        Command::Periodic { pair, common, .. } => ("periodic", pair, common),
        Command::Eigen { pair, common, .. } => ("eigen", pair, common),
        Command::Iso { pair, common, .. } => ("iso", pair, common),
        Command::Hypercyclic { pair, common, .. } => ("hypercyclic", pair, common),
        Command::Scan { pair, common, .. } => ("scan", pair, common),
        Command::Orbit { pair, common, .. } => ("orbit", pair, common),
        Command::Nonhc { pair, common, .. } => ("nonhc", pair, common),
        Command::KernelRange { pair, common, .. } => ("kernel-range", pair, common),
    };
    let common = common.clone();
    check_common(&common)?;
    if common.format == Format::Csv && name != "scan" {
        return usage("--format csv is only available for scan");
    }
    let mut ctx = build_context(pair_args)?;
    ctx.param("tol", common.tol);
    ctx.param("n_max", common.n_max);
    let p = ctx.pair.clone();
    let mut notes: Vec<String> = Vec::new();

    let result = match command {
        Command::Check { samples, .. } => {
            ctx.param("samples", samples);
            let v = ctx.core(check_hypotheses(&p, samples, common.n_max))?;
            json!(v)
        }
        Command::Periodic { big_n, seed, .. } => {
            ctx.param("N", big_n);
            ctx.param("seed", &seed);
            let f = ctx.vector(&seed)?;
            let mut r = ctx.core(periodic_point(&p, &f, big_n, common.tol))?;
            if r.converged {
                ctx.core(verify_periodic(&p, &mut r, big_n))?;
            }
            json!(r)
        }
        Command::Eigen { n, lambda, seed, .. } => {
            let lambda = parse_complex(&lambda).or_else(|e| usage(format!("--lambda: {e}")))?;
            ctx.param("n", n);
            ctx.param("lambda", lambda);
            ctx.param("seed", &seed);
            let f = ctx.vector(&seed)?;
            let mut r = ctx.core(eigenvector(&p, &f, n, lambda, common.tol))?;
            if r.converged {
                ctx.core(verify_eigen(&p, &mut r, n, lambda))?;
            }
            json!(r)
        }
        Command::Iso { n, lambda, seed, .. } => {
            let lambda = parse_complex(&lambda).or_else(|e| usage(format!("--lambda: {e}")))?;
            ctx.param("n", n);
            ctx.param("lambda", lambda);
            ctx.param("seed", &seed);
            let f0 = ctx.vector(&seed)?;
            let image = ctx.core(kernel_isomorphism(&p, n, lambda, &f0, common.tol))?;
            let residual = if image.is_zero() {
                0.0
            } else {
                let d = ctx.core(p.apply_a_pow(&image, n).and_then(|v| v.sub(&image.scale(lambda)?)))?;
                ctx.core(d.norm())? / (1.0 + ctx.core(image.norm())?)
            };
            let back = ctx.core(kernel_isomorphism_inverse(&p, n, lambda, &image))?;
            let round_trip = ctx.core(back.distance(&f0))?;
            json!({"vector": image, "residual": residual, "round_trip_error": round_trip})
        }
        Command::Hypercyclic { big_k, budget, .. } => {
            ctx.param("K", big_k);
            ctx.param("budget", budget);
            let (r, s) = ctx.core(hypercyclic_vector(&p, big_k, budget))?;
            json!({"series": r, "schedule": s})
        }
        Command::Scan { n, grid, seed, .. } => {
            let points = parse_grid(&grid).or_else(|e| usage(format!("--grid: {e}")))?;
            ctx.param("n", n);
            ctx.param("grid", &grid);
            ctx.param("seed", &seed);
            let f = ctx.vector(&seed)?;
            let cells = ctx.core(spectrum_scan(&p, n, &points, common.tol, &f))?;
            if common.format == Format::Csv {
                let mut buf = Vec::new();
                ctx.core(write_scan_csv(&cells, &mut buf))?;
                return Ok((Output::Csv(buf), common.out));
            }
            json!({"cells": cells})
        }
        Command::Orbit { seed, targets, .. } => {
            ctx.param("seed", &seed);
            let f = ctx.vector(&seed)?;
            let targets = match &targets {
                Some(path) => {
                    ctx.param("targets", path.display().to_string());
                    read_targets(path, p.space())?
                }
                None => canonical_samples(p.space(), 10),
            };
            let probe = ctx.core(orbit_density_probe(&p, &f, &targets, common.n_max))?;
            json!(probe)
        }
        Command::Nonhc { operator, seed, .. } => {
            let candidates = match &seed {
                Some(s) => vec![ctx.vector(s)?],
                None => standard_candidates(p.space()),
            };
            ctx.param("operator", if operator == Role::A { "a" } else { "b" });
            ctx.param("seed", &seed);
            let r = match operator {
                Role::A => ctx.core(adjoint_nonhc_probe(&p, &candidates, common.n_max))?,
                Role::B => {
                    let view = ctx.core(p.right_inverse_adjoint_view())?;
                    ctx.core(probe_adjoint(&view, &candidates, common.n_max))?
                }
            };
            json!(r)
        }
        Command::KernelRange { n, support_cap, .. } => {
            ctx.param("n", n);
            ctx.param("support_cap", support_cap);
            let disjoint = ctx.core(check_kernel_range_disjoint(&p, n, support_cap))?;
            json!({"disjoint": disjoint})
        }
    };
    if name == "check" && matches!(p.spec(), PairSpec::Family(PairDescriptor::Differentiation { .. })) && common.n_max < 128 {
        notes.push("differentiation needs --n-max 128 or more to resolve the vanishing rate below 0.05".into());
    }
    let mut report = Report::new(name, Some(ctx.spec.clone()), result);
    for (k, v) in &ctx.params {
        report = report.param(k, v);
    }
    for n in notes {
        report = report.note(n);
    }
    if !common.no_timestamp {
        report.timestamp = SystemTime::now().duration_since(UNIX_EPOCH).ok().map(|d| d.as_secs());
    }
    Ok((Output::Json(report), common.out))
}

fn write_atomic(path: &Path, bytes: &[u8]) -> Step<()> {
    let io = |e: std::io::Error| Failure::Io(format!("{}: {e}", path.display()));
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(bytes).map_err(io)?;
    tmp.flush().map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

fn emit(output: Output, out: Option<PathBuf>) -> Step<()> {
    let bytes = match output {
        Output::Json(r) => r.to_json().into_bytes(),
        Output::Csv(b) => b,
    };
    match out {
        Some(path) => write_atomic(&path, &bytes),
        None => std::io::stdout()
            .write_all(&bytes)
            .map_err(|e| Failure::Io(format!("stdout: {e}"))),
    }
}

/// Parses `argv` (program name first), runs the subcommand and returns the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            if code == EXIT_USAGE {
                eprintln!("{GRAMMAR}");
            }
            return code;
        }
    };
    let outcome = execute(cli.command).and_then(|(output, out)| emit(output, out));
    match outcome {
        Ok(()) => EXIT_OK,
        Err(f) => {
            match &f {
                Failure::Usage(msg) => eprintln!("error: {msg}\n{GRAMMAR}"),
                Failure::Core(e, params) => eprintln!("error: {}: {e} [{params}]", e.name()),
                Failure::Io(msg) => eprintln!("error: {msg}"),
            }
            f.exit_code()
        }
    }
}
