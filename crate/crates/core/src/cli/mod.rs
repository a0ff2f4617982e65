//! The `plap` command line: eigenvalue solves, curvature norms, verification
//! suites and parameter sweeps, all reported as CSV.

mod config;
mod output;
mod suites;

pub use config::{CurvatureSpec, ProfileSpec};
pub use output::{config_hash, render, Row, COLUMNS};
pub use suites::{plan, tally, Params, Suite, Target};

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use crate::radial_eigensolver::DEFAULT_TOL;
use crate::rearrangement_isoperimetry::{CONSERVATION_TOL, NODAL_TOL};

/// Environment variable naming the default report directory.
pub const OUTPUT_DIR_ENV: &str = "PLAP_OUTPUT_DIR";

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATED: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "plap", version, about = "First p-Laplacian eigenvalues and comparison checks on warped products")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// First Dirichlet eigenvalue of a model-space ball.
    ModelEigen {
        #[command(flatten)]
        params: ParamArgs,
        #[command(flatten)]
        run: RunArgs,
    },
    /// First Dirichlet eigenvalue of a pole ball, or the radial Neumann eigenvalue.
    WarpedEigen {
        #[command(flatten)]
        params: ParamArgs,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Integral Ricci curvature norms of a profile.
    Curvature {
        #[command(flatten)]
        params: ParamArgs,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Runs a verification suite.
    Verify {
        suite: Suite,
        #[command(flatten)]
        params: ParamArgs,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Repeats a command over values of one parameter.
    Sweep {
        /// Parameter to vary.
        #[arg(long)]
        axis: Axis,
        /// Comma-separated values.
        #[arg(long, value_delimiter = ',', required = true, allow_hyphen_values = true)]
        values: Vec<f64>,
        /// What to run at each value: a suite name, `model-eigen`, `warped-eigen` or `curvature`.
        #[arg(long, default_value = "model-eigen")]
        target: String,
        #[command(flatten)]
        params: ParamArgs,
        #[command(flatten)]
        run: RunArgs,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Axis {
    /// Perturbation amplitude of a `perturbed-sphere` profile.
    A,
    P,
    Q,
    K,
    #[value(alias = "r")]
    Radius,
    N,
    Alpha,
}

#[derive(Debug, Clone, Args)]
struct ParamArgs {
    /// sphere[:k], flat[:R], hyperbolic[:R], perturbed-sphere:a,m or table:<path>.
    #[arg(long)]
    profile: Option<String>,
    #[arg(long, default_value_t = 2)]
    n: usize,
    #[arg(long, default_value_t = 2.0, allow_hyphen_values = true)]
    p: f64,
    /// Curvature exponent(s); defaults to n.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    q: Vec<f64>,
    /// Comparison curvature, or `auto-min` for the largest K with Ric >= (n-1)K.
    #[arg(long = "K", allow_hyphen_values = true)]
    k: Option<String>,
    #[arg(long, visible_alias = "r", allow_hyphen_values = true)]
    radius: Option<f64>,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    alpha: f64,
    /// Sobolev constant, reported with the Lichnerowicz suite.
    #[arg(long = "c-s", allow_hyphen_values = true)]
    c_s: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
    /// Solve the radial Neumann problem of a closed profile (warped-eigen).
    #[arg(long)]
    neumann: bool,
}

#[derive(Debug, Clone, Args)]
struct RunArgs {
    /// Worker threads; defaults to the number of logical cores.
    #[arg(long)]
    jobs: Option<usize>,
    /// Report path; defaults to $PLAP_OUTPUT_DIR/<command>.csv, else stdout.
    #[arg(long)]
    output: Option<PathBuf>,
}

impl ParamArgs {
    fn parse(&self, errors: &mut Vec<String>) -> Params {
        let profile = self.profile.as_deref().and_then(|s| match s.parse::<ProfileSpec>() {
            Ok(p) => Some(p),
            Err(e) => {
                errors.push(e);
                None
            }
        });
        let k = self.k.as_deref().and_then(|s| match s.parse::<CurvatureSpec>() {
            Ok(k) => Some(k),
            Err(e) => {
                errors.push(e);
                None
            }
        });
        Params {
            profile,
            n: self.n,
            p: self.p,
            q: self.q.clone(),
            k,
            radius: self.radius,
            alpha: self.alpha,
            c_s: self.c_s,
            tol: self.tol,
            neumann: self.neumann,
        }
    }
}

fn parse_target(s: &str) -> Result<Target, String> {
    match s {
        "model-eigen" => Ok(Target::ModelEigen),
        "warped-eigen" => Ok(Target::WarpedEigen),
        "curvature" => Ok(Target::Curvature),
        other => Suite::from_str(other, false)
            .map(Target::Verify)
            .map_err(|_| format!("unknown sweep target `{other}`")),
    }
}

fn with_axis(base: &Params, axis: Axis, value: f64) -> Result<Params, String> {
    let mut p = base.clone();
    match axis {
        Axis::A => {
            let spec = base.profile.as_ref().and_then(|s| s.with_amplitude(value));
            p.profile = Some(spec.ok_or("axis `a` needs a perturbed-sphere profile")?);
        }
        Axis::P => p.p = value,
        Axis::Q => p.q = vec![value],
        Axis::K => p.k = Some(CurvatureSpec::Value(value)),
        Axis::Radius => p.radius = Some(value),
        Axis::N => {
            if !(value >= 2.0 && value.fract() == 0.0) {
                return Err(format!("axis `n` needs integers >= 2, got {value}"));
            }
            p.n = value as usize;
        }
        Axis::Alpha => p.alpha = value,
    }
    Ok(p)
}

/// Everything needed to compute and write one report.
struct Plan {
    name: String,
    canonical: String,
    jobs: Vec<suites::Job>,
}

fn build_plan(command: &Command) -> Result<(Plan, RunArgs), String> {
    let mut errors = Vec::new();
    let (target, params, run, sweep) = match command {
        Command::ModelEigen { params, run } => (Target::ModelEigen, params, run, None),
        Command::WarpedEigen { params, run } => (Target::WarpedEigen, params, run, None),
        Command::Curvature { params, run } => (Target::Curvature, params, run, None),
        Command::Verify { suite, params, run } => (Target::Verify(*suite), params, run, None),
        Command::Sweep { axis, values, target, params, run } => match parse_target(target) {
            Ok(t) => (t, params, run, Some((*axis, values.clone()))),
            Err(e) => {
                errors.push(e);
                (Target::ModelEigen, params, run, Some((*axis, values.clone())))
            }
        },
    };
    let base = params.parse(&mut errors);
    if let Some(0) = run.jobs {
        errors.push("--jobs must be at least 1".into());
    }

    let mut jobs = Vec::new();
    let (name, canonical) = match &sweep {
        None => {
            match plan(target, &base, "") {
                Ok(j) => jobs = j,
                Err(e) => errors.extend(e),
            }
            let name = match target {
                Target::Verify(s) => format!("verify-{s}"),
                t => t.to_string(),
            };
            (name.clone(), format!("command={name};{}", base.canonical()))
        }
        Some((axis, values)) => {
            let axis_name = axis.to_possible_value().expect("no skipped variants").get_name().to_string();
            if axis == &Axis::A && !matches!(base.profile, Some(ProfileSpec::PerturbedSphere { .. })) {
                errors.push("axis `a` needs a perturbed-sphere profile".into());
            }
            if errors.is_empty() {
                for &v in values {
                    let label = format!("{axis_name}={}", output::num(v));
                    // failures at one value are recorded in-row; the sweep continues
                    let planned = with_axis(&base, *axis, v).and_then(|p| plan(target, &p, &label).map_err(|e| e.join("; ")));
                    match planned {
                        Ok(j) => jobs.extend(j),
                        Err(e) => {
                            let inputs = crate::comparison_suite::CheckInputs::new("-", base.n);
                            let row = Row::failed(&target.to_string(), &label, &inputs, &e);
                            jobs.push(Box::new(move || vec![row.clone()]));
                        }
                    }
                }
            }
            let vals: Vec<String> = values.iter().map(|&v| output::num(v)).collect();
            let name = format!("sweep-{target}-{axis_name}");
            let canonical = format!("command=sweep;target={target};axis={axis_name};values={};{}", vals.join(","), base.canonical());
            (name, canonical)
        }
    };
    if !errors.is_empty() {
        return Err(format!("invalid configuration:\n  - {}", errors.join("\n  - ")));
    }
    Ok((Plan { name, canonical, jobs }, run.clone()))
}

fn tolerances(tol: f64) -> String {
    format!(
        "tol={};band=max(1e-8,100*bracket);conservation={};nodal={};bochner_exact={};bochner_extrapolated={};fd_order>={};coarea_order>={}",
        output::num(tol),
        output::num(CONSERVATION_TOL),
        output::num(NODAL_TOL),
        output::num(suites::BOCHNER_EXACT_TOL),
        output::num(suites::BOCHNER_EXTRAPOLATED_TOL),
        output::num(suites::BOCHNER_MIN_ORDER),
        output::num(suites::COAREA_MIN_ORDER)
    )
}

fn output_path(run: &RunArgs, name: &str) -> Option<PathBuf> {
    run.output
        .clone()
        .or_else(|| std::env::var_os(OUTPUT_DIR_ENV).map(|dir| PathBuf::from(dir).join(format!("{name}.csv"))))
}

/// Runs the command line and returns the process exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    let tol = match &cli.command {
        Command::ModelEigen { params, .. }
        | Command::WarpedEigen { params, .. }
        | Command::Curvature { params, .. }
        | Command::Verify { params, .. }
        | Command::Sweep { params, .. } => params.tol,
    };
    let (plan, run) = match build_plan(&cli.command) {
        Ok(p) => p,
        Err(msg) => {
            eprintln!("{msg}");
            return EXIT_CONFIG;
        }
    };

    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(j) = run.jobs {
        builder = builder.num_threads(j);
    }
    let pool = match builder.build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("cannot start worker pool: {e}");
            return EXIT_CONFIG;
        }
    };
    let rows: Vec<Row> = pool.install(|| plan.jobs.par_iter().map(|job| job()).collect::<Vec<_>>()).concat();
    let text = render(&plan.canonical, &tolerances(tol), &rows);

    match output_path(&run, &plan.name) {
        Some(path) => {
            if let Err(e) = output::write_report(&path, &text) {
                eprintln!("cannot write {}: {e}", path.display());
                return EXIT_CONFIG;
            }
        }
        None => {
            let _ = std::io::stdout().write_all(text.as_bytes());
        }
    }
    let counts: Vec<String> = tally(&rows).iter().map(|(k, v)| format!("{v} {k}")).collect();
    let failed = rows.iter().any(Row::is_failure);
    eprintln!("{}: {} rows ({}){}", plan.name, rows.len(), counts.join(", "), if failed { " FAILED" } else { "" });
    if failed {
        EXIT_VIOLATED
    } else {
        EXIT_OK
    }
}
