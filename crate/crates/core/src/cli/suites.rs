//! Row producers for every command and verification suite.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::sync::Arc;

use clap::ValueEnum;

use crate::comparison_suite::{
    cheng_gap_check, laplace_comparison_norm_check, lichnerowicz_empirical_check, p_bochner_residual,
    p_bochner_residual_fd, p_laplace_comparison_check, sobolev_threshold, volume_doubling_check, BoundReport,
    CheckInputs, RadialFunction, Verdict,
};
use crate::error::Result;
use crate::model_geometry::ModelSpace;
use crate::radial_eigensolver::{
    solve_first_dirichlet_ball, solve_first_dirichlet_model, solve_first_neumann_radial, EigenResult,
};
use crate::rearrangement_isoperimetry::{
    coarea_audit, coarea_derivative_defect, faber_krahn_check, isoperimetric_check, obata_check, DensityFn,
    RadialSamples,
};
use crate::warped_manifold::WarpedProfile;

use super::config::{CurvatureSpec, ProfileSpec, Violations};
use super::output::{num, Row};

/// Residual bound for the p-Bochner identity with exact derivatives.
pub const BOCHNER_EXACT_TOL: f64 = 1e-8;
/// Residual bound when the outer derivatives are extrapolated differences.
pub const BOCHNER_EXTRAPOLATED_TOL: f64 = 1e-6;
/// Smallest accepted convergence order of the plain difference residual.
pub const BOCHNER_MIN_ORDER: f64 = 1.9;
/// Smallest accepted order of the co-area difference defect.
pub const COAREA_MIN_ORDER: f64 = 0.9;
/// Level steps of the co-area difference defect, as fractions of `f(0)`.
pub const COAREA_STEPS: [f64; 3] = [0.01, 0.005, 0.0025];
/// Defects below this are roundoff and carry no order.
pub const COAREA_EXACT_DEFECT: f64 = 1e-5;
/// Slack allowed on the Hölder bound per level, relative to the level area.
const HOLDER_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Bochner,
    PComparison,
    Doubling,
    LaplaceNorm,
    Cheng,
    Lichnerowicz,
    FaberKrahn,
    Obata,
    Isoperimetric,
    Coarea,
    /// Every suite above on the same configuration.
    All,
}

impl Suite {
    pub const EACH: [Suite; 10] = [
        Suite::Bochner,
        Suite::PComparison,
        Suite::Doubling,
        Suite::LaplaceNorm,
        Suite::Cheng,
        Suite::Lichnerowicz,
        Suite::FaberKrahn,
        Suite::Obata,
        Suite::Isoperimetric,
        Suite::Coarea,
    ];

    fn members(self) -> Vec<Suite> {
        match self {
            Suite::All => Suite::EACH.to_vec(),
            s => vec![s],
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.to_possible_value().expect("no skipped variants").get_name())
    }
}

/// Target of a parameter sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Target {
    ModelEigen,
    WarpedEigen,
    Curvature,
    Verify(Suite),
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Target::ModelEigen => f.write_str("model-eigen"),
            Target::WarpedEigen => f.write_str("warped-eigen"),
            Target::Curvature => f.write_str("curvature"),
            Target::Verify(s) => write!(f, "{s}"),
        }
    }
}

/// Fully parsed parameters; `None` means "not given".
#[derive(Debug, Clone, PartialEq)]
pub struct Params {
    pub profile: Option<ProfileSpec>,
    pub n: usize,
    pub p: f64,
    pub q: Vec<f64>,
    pub k: Option<CurvatureSpec>,
    pub radius: Option<f64>,
    pub alpha: f64,
    pub c_s: Option<f64>,
    pub tol: f64,
    pub neumann: bool,
}

impl Params {
    /// Stable text form used for the report header and its hash.
    pub fn canonical(&self) -> String {
        let opt = |v: Option<String>| v.unwrap_or_else(|| "-".into());
        let q: Vec<String> = self.q.iter().map(|&v| num(v)).collect();
        format!(
            "profile={};n={};p={};q={};K={};radius={};alpha={};c_s={};tol={};neumann={}",
            opt(self.profile.as_ref().map(ToString::to_string)),
            self.n,
            num(self.p),
            if q.is_empty() { "-".into() } else { q.join(",") },
            opt(self.k.map(|k| k.to_string())),
            opt(self.radius.map(num)),
            num(self.alpha),
            opt(self.c_s.map(num)),
            num(self.tol),
            self.neumann
        )
    }

    /// The single curvature exponent, defaulting to `q = n`.
    fn q1(&self) -> f64 {
        self.q.first().copied().unwrap_or(self.n as f64)
    }
}

/// Parameters after building the profile and resolving `K`.
#[derive(Clone)]
struct Context {
    params: Params,
    profile: Option<WarpedProfile>,
    k: Option<f64>,
}

impl Context {
    fn profile(&self) -> &WarpedProfile {
        self.profile.as_ref().expect("validated")
    }

    fn k(&self) -> f64 {
        self.k.expect("validated")
    }

    fn radius(&self) -> f64 {
        self.params.radius.expect("validated")
    }

    fn inputs(&self) -> CheckInputs {
        let (label, n) = match &self.profile {
            Some(p) => (p.label().to_string(), p.dim()),
            None => ("-".to_string(), self.params.n),
        };
        CheckInputs::new(&label, n)
    }
}

#[derive(Default, Clone, Copy)]
struct Needs {
    profile: bool,
    closed: bool,
    k: bool,
    k_positive: bool,
    radius: bool,
    radius_below_model_diameter: bool,
    q: bool,
    p_at_least_two: bool,
}

fn needs(target: Target) -> Needs {
    let base = Needs { profile: true, ..Needs::default() };
    match target {
        Target::ModelEigen => Needs { k: true, radius: true, radius_below_model_diameter: true, ..Needs::default() },
        Target::WarpedEigen => base,
        Target::Curvature => Needs { k: true, q: true, ..base },
        Target::Verify(s) => match s {
            Suite::Bochner => base,
            Suite::PComparison => Needs { k: true, ..base },
            Suite::Doubling | Suite::LaplaceNorm => {
                Needs { k: true, q: true, radius: true, radius_below_model_diameter: true, ..base }
            }
            Suite::Cheng => Needs { k: true, q: true, radius: true, radius_below_model_diameter: true, ..base },
            Suite::Lichnerowicz => Needs { closed: true, k: true, k_positive: true, q: true, p_at_least_two: true, ..base },
            Suite::FaberKrahn | Suite::Isoperimetric => {
                Needs { closed: true, k: true, k_positive: true, q: true, radius: true, ..base }
            }
            Suite::Obata => Needs { closed: true, k: true, k_positive: true, q: true, ..base },
            Suite::Coarea => Needs { radius: true, ..base },
            Suite::All => Suite::EACH.iter().fold(base, |acc, &s| {
                let n = needs(Target::Verify(s));
                Needs {
                    profile: acc.profile | n.profile,
                    closed: acc.closed | n.closed,
                    k: acc.k | n.k,
                    k_positive: acc.k_positive | n.k_positive,
                    radius: acc.radius | n.radius,
                    radius_below_model_diameter: acc.radius_below_model_diameter | n.radius_below_model_diameter,
                    q: acc.q | n.q,
                    p_at_least_two: acc.p_at_least_two | n.p_at_least_two,
                }
            }),
        },
    }
}

/// Checks every precondition of `target` and builds the context, or returns
/// one message listing all violations.
fn prepare(target: Target, params: &Params) -> std::result::Result<Context, Vec<String>> {
    let need = needs(target);
    let mut v = Violations::default();
    v.check(params.n >= 2, || format!("--n must be at least 2, got {}", params.n));
    v.check(params.p > 1.0 && params.p.is_finite(), || format!("--p must exceed 1, got {}", params.p));
    if need.p_at_least_two {
        v.check(params.p >= 2.0, || format!("{target} needs --p >= 2, got {}", params.p));
    }
    v.check(params.tol > 0.0 && params.tol <= 1e-2, || format!("--tol must lie in (0, 1e-2], got {}", params.tol));
    v.check(params.alpha > 0.0 && params.alpha.is_finite(), || format!("--alpha must be positive, got {}", params.alpha));
    if let Some(c) = params.c_s {
        v.check(c > 0.0, || format!("--c-s must be positive, got {c}"));
    }
    if target != Target::Curvature {
        v.check(params.q.len() <= 1, || format!("{target} takes a single --q, got {}", params.q.len()));
    }
    if need.q {
        for &q in params.q.iter().chain(params.q.is_empty().then_some(&(params.n as f64))) {
            v.check(q > params.n as f64 / 2.0, || format!("--q must exceed n/2 = {}, got {q}", params.n as f64 / 2.0));
        }
    }
    if let Some(r) = params.radius {
        v.check(r > 0.0 && r.is_finite(), || format!("--radius must be positive, got {r}"));
    } else if need.radius {
        v.push(format!("{target} needs --radius"));
    }

    let mut profile = None;
    if need.profile {
        match &params.profile {
            None => v.push(format!("{target} needs --profile")),
            Some(spec) => match spec.build(params.n) {
                Ok(p) => profile = Some(p),
                Err(e) => v.push(format!("--profile {spec}: {e}")),
            },
        }
    }
    if let Some(prof) = &profile {
        if need.closed {
            v.check(prof.is_closed(), || format!("{target} needs a closed profile, `{}` is open", prof.label()));
        }
        if target == Target::WarpedEigen {
            if params.neumann {
                v.check(prof.is_closed(), || format!("--neumann needs a closed profile, `{}` is open", prof.label()));
            } else if params.radius.is_none() {
                v.push("warped-eigen needs --radius or --neumann".into());
            }
        }
        if let Some(r) = params.radius.filter(|&r| r > 0.0) {
            let limit_ok = if prof.is_closed() { r < prof.end() } else { r <= prof.end() };
            v.check(limit_ok, || format!("--radius {r} must stay inside the profile (end {})", prof.end()));
        }
    }

    let mut k = None;
    match params.k {
        Some(CurvatureSpec::Value(val)) => {
            v.check(val.is_finite(), || format!("--K must be finite, got {val}"));
            k = Some(val);
        }
        Some(CurvatureSpec::AutoMin) => match &profile {
            Some(prof) => match CurvatureSpec::AutoMin.resolve(prof) {
                Ok(val) => k = Some(val),
                Err(e) => v.push(format!("--K auto-min: {e}")),
            },
            None => v.push("--K auto-min needs a profile".into()),
        },
        None if need.k => v.push(format!("{target} needs --K")),
        None => {}
    }
    if let Some(val) = k {
        if need.k_positive {
            v.check(val > 0.0, || format!("{target} needs K > 0, got {val}"));
        }
        if need.radius_below_model_diameter && val > 0.0 {
            if let Some(r) = params.radius {
                let d = PI / val.sqrt();
                v.check(r < d, || format!("--radius {r} must stay below the model diameter π/√K = {d}"));
            }
        }
    }
    v.into_result()?;
    Ok(Context { params: params.clone(), profile, k })
}

/// A unit of work producing rows in a fixed order.
pub type Job = Box<dyn Fn() -> Vec<Row> + Send + Sync>;

type RowProducer = Box<dyn Fn(&Context, &str) -> Vec<Row> + Send + Sync>;

/// Validates `params` for `target` and returns its jobs in report order.
pub fn plan(target: Target, params: &Params, case_prefix: &str) -> std::result::Result<Vec<Job>, Vec<String>> {
    let ctx = Arc::new(prepare(target, params)?);
    let prefix = case_prefix.to_string();
    let mut jobs: Vec<Job> = Vec::new();
    let mut push = |f: RowProducer| {
        let ctx = ctx.clone();
        let prefix = prefix.clone();
        jobs.push(Box::new(move || f(&ctx, &prefix)));
    };
    match target {
        Target::ModelEigen => push(Box::new(model_eigen_rows)),
        Target::WarpedEigen => push(Box::new(warped_eigen_rows)),
        Target::Curvature => push(Box::new(curvature_rows)),
        Target::Verify(suite) => {
            for s in suite.members() {
                match s {
                    Suite::Bochner => {
                        for f in bochner_functions(ctx.profile().end()) {
                            push(Box::new(move |c, pre| bochner_rows(c, pre, &f)));
                        }
                    }
                    Suite::PComparison => {
                        for f in comparison_functions(ctx.profile().end()) {
                            push(Box::new(move |c, pre| p_comparison_rows(c, pre, &f)));
                        }
                    }
                    Suite::Doubling => {
                        for frac in [0.25, 0.5, 0.75] {
                            push(Box::new(move |c, pre| vec![doubling_row(c, pre, frac)]));
                        }
                    }
                    Suite::LaplaceNorm => push(Box::new(|c, pre| {
                        single(c, pre, "laplace-norm", |c| {
                            laplace_comparison_norm_check(c.profile(), c.k(), c.params.q1(), c.radius())
                        })
                    })),
                    Suite::Cheng => push(Box::new(|c, pre| {
                        single(c, pre, "cheng", |c| {
                            cheng_gap_check(c.profile(), c.k(), c.params.p, c.params.q1(), c.radius(), c.params.tol)
                        })
                    })),
                    Suite::Lichnerowicz => push(Box::new(lichnerowicz_rows)),
                    Suite::FaberKrahn => push(Box::new(|c, pre| {
                        single(c, pre, "faber-krahn", |c| {
                            faber_krahn_check(
                                c.profile(),
                                c.k(),
                                c.params.p,
                                c.params.q1(),
                                c.radius(),
                                c.params.alpha,
                                c.params.tol,
                            )
                        })
                    })),
                    Suite::Obata => push(Box::new(|c, pre| {
                        single(c, pre, "obata", |c| {
                            obata_check(c.profile(), c.k(), c.params.p, c.params.q1(), c.params.alpha, c.params.tol)
                        })
                    })),
                    Suite::Isoperimetric => push(Box::new(|c, pre| {
                        single(c, pre, "isoperimetric", |c| {
                            isoperimetric_check(c.profile(), c.k(), c.params.q1(), c.radius(), c.params.alpha)
                        })
                    })),
                    Suite::Coarea => push(Box::new(coarea_rows)),
                    Suite::All => unreachable!("expanded by members()"),
                }
            }
        }
    }
    Ok(jobs)
}

fn case(prefix: &str, case: &str) -> String {
    match (prefix.is_empty(), case.is_empty()) {
        (true, _) => case.to_string(),
        (false, true) => prefix.to_string(),
        (false, false) => format!("{prefix}|{case}"),
    }
}

fn with_params(inputs: CheckInputs, ctx: &Context) -> CheckInputs {
    let mut i = inputs;
    if i.p.is_nan() {
        i.p = ctx.params.p;
    }
    i
}

fn single<F>(ctx: &Context, prefix: &str, suite: &str, run: F) -> Vec<Row>
where
    F: Fn(&Context) -> Result<BoundReport>,
{
    let label = case(prefix, "");
    match run(ctx) {
        Ok(rep) => vec![Row::from_report(&label, &rep)],
        Err(e) => vec![Row::failed(suite, &label, &failure_inputs(ctx), &e.to_string())],
    }
}

fn failure_inputs(ctx: &Context) -> CheckInputs {
    let mut i = with_params(ctx.inputs(), ctx).q(ctx.params.q1());
    if let Some(k) = ctx.k {
        i = i.k(k);
    }
    if let Some(r) = ctx.params.radius {
        i = i.r(r);
    }
    i
}

fn eigen_row(suite: &str, label: &str, inputs: CheckInputs, res: &EigenResult) -> Row {
    let mut row = Row::blank(suite, label, &inputs);
    row.lhs = res.lambda;
    row.detail("lambda", res.lambda)
        .detail("residual", res.residual)
        .detail("bracket_width", res.bracket_width)
        .detail("zero_count", res.zero_count as f64)
        .detail("nodal_radius", res.nodal_radius.unwrap_or(f64::NAN))
        .detail("shots", res.shots as f64)
}

fn model_eigen_rows(ctx: &Context, prefix: &str) -> Vec<Row> {
    let (k, r, p) = (ctx.k(), ctx.radius(), ctx.params.p);
    let inputs = CheckInputs::new(&format!("model:{k}"), ctx.params.n).p(p).k(k).r(r);
    let label = case(prefix, "");
    let res = ModelSpace::new(ctx.params.n, k).and_then(|m| solve_first_dirichlet_model(&m, r, p, ctx.params.tol));
    match res {
        Ok(res) => vec![eigen_row("model-eigen", &label, inputs, &res)],
        Err(e) => vec![Row::failed("model-eigen", &label, &inputs, &e.to_string())],
    }
}

fn warped_eigen_rows(ctx: &Context, prefix: &str) -> Vec<Row> {
    let prof = ctx.profile();
    let p = ctx.params.p;
    let mut inputs = ctx.inputs().p(p);
    let (label, res) = if ctx.params.neumann {
        (case(prefix, "neumann"), solve_first_neumann_radial(prof, p, ctx.params.tol))
    } else {
        inputs = inputs.r(ctx.radius());
        (case(prefix, "dirichlet"), solve_first_dirichlet_ball(prof, ctx.radius(), p, ctx.params.tol))
    };
    match res {
        Ok(res) => vec![eigen_row("warped-eigen", &label, inputs, &res)],
        Err(e) => vec![Row::failed("warped-eigen", &label, &inputs, &e.to_string())],
    }
}

fn curvature_rows(ctx: &Context, prefix: &str) -> Vec<Row> {
    let prof = ctx.profile();
    let k = ctx.k();
    let radius = ctx.params.radius;
    let qs = if ctx.params.q.is_empty() { vec![ctx.params.n as f64] } else { ctx.params.q.clone() };
    let rho_min = prof.min_ricci();
    qs.iter()
        .map(|&q| {
            let mut inputs = ctx.inputs().q(q).k(k);
            if let Some(r) = radius {
                inputs = inputs.r(r);
            }
            let label = case(prefix, &format!("q={q}"));
            let norm = match prof.integral_curvature_norm(k, q, radius) {
                Ok(v) => v,
                Err(e) => return Row::failed("curvature", &label, &inputs, &e.to_string()),
            };
            let psi = prof.psi_norm(k, 2.0 * q, radius.unwrap_or(prof.end())).unwrap_or(f64::NAN);
            let mut row = Row::blank("curvature", &label, &inputs);
            row.lhs = norm;
            row.measured_norm = norm;
            row.detail("ric_minus_norm", norm)
                .detail("psi_norm_2q", psi)
                .detail("rho_min", rho_min.clone().unwrap_or(f64::NAN))
        })
        .collect()
}

/// Test functions with nonvanishing derivative inside `(0, end)`.
fn bochner_functions(end: f64) -> Vec<RadialFunction> {
    vec![
        RadialFunction::Cosine { omega: PI / end },
        RadialFunction::Polynomial(vec![1.0, 0.0, -1.0]),
        RadialFunction::Exponential { rate: 1.0 },
    ]
}

/// Nonincreasing test functions on `[0, end]`.
fn comparison_functions(end: f64) -> Vec<RadialFunction> {
    vec![
        RadialFunction::Cosine { omega: FRAC_PI_2 / end },
        RadialFunction::Polynomial(vec![1.0, 0.0, -1.0]),
        RadialFunction::Exponential { rate: 1.0 },
    ]
}

const SAMPLE_FRACTIONS: [f64; 5] = [0.15, 0.35, 0.5, 0.65, 0.85];

fn bochner_rows(ctx: &Context, prefix: &str, f: &RadialFunction) -> Vec<Row> {
    let prof = ctx.profile();
    let p = ctx.params.p;
    let (tol, method) =
        if p == 2.0 { (BOCHNER_EXACT_TOL, "exact") } else { (BOCHNER_EXTRAPOLATED_TOL, "extrapolated") };
    let mut rows = Vec::new();
    for frac in SAMPLE_FRACTIONS {
        let t = frac * prof.end();
        let inputs = ctx.inputs().p(p).r(t);
        let label = case(prefix, &format!("{}@t={t:.6}", f.label()));
        rows.push(match p_bochner_residual(prof, p, f, t) {
            Ok(res) => {
                let rep = BoundReport::decided("bochner", inputs, res.abs(), tol, tol - res.abs(), 0.0)
                    .with_detail("residual", res);
                Row::from_report(&label, &rep).note("method", method)
            }
            Err(e) => Row::failed("bochner", &label, &inputs, &e.to_string()),
        });
    }
    // convergence order of plain central differences at the midpoint
    let t = 0.5 * prof.end();
    let inputs = ctx.inputs().p(p).r(t);
    let label = case(prefix, &format!("{}@t={t:.6}:order", f.label()));
    let steps = [1e-2, 5e-3, 2.5e-3];
    let residuals: Result<Vec<f64>> =
        steps.iter().map(|&h| p_bochner_residual_fd(prof, p, f, t, h).map(f64::abs)).collect();
    rows.push(match residuals {
        Ok(r) => {
            let order = (r[0] / r[1]).log2().min((r[1] / r[2]).log2());
            // differences of low-degree polynomials are exact; nothing to measure
            let rep = if r[2] < 1e-11 {
                BoundReport::report_only("bochner", inputs, r[2], BOCHNER_MIN_ORDER)
            } else {
                BoundReport::decided("bochner", inputs, order, BOCHNER_MIN_ORDER, order - BOCHNER_MIN_ORDER, 0.0)
            };
            Row::from_report(&label, &rep.with_detail("residual_h", r[0]).with_detail("residual_h2", r[1]).with_detail("residual_h4", r[2]))
                .note("method", "central-difference")
        }
        Err(e) => Row::failed("bochner", &label, &inputs, &e.to_string()),
    });
    rows
}

fn p_comparison_rows(ctx: &Context, prefix: &str, f: &RadialFunction) -> Vec<Row> {
    let prof = ctx.profile();
    let (k, p) = (ctx.k(), ctx.params.p);
    let limit = prof.end().min(ModelSpace::new(prof.dim(), k).map(|m| m.diameter()).unwrap_or(f64::INFINITY));
    (1..10)
        .map(|i| {
            let t = limit * i as f64 / 10.0;
            let label = case(prefix, &format!("{}@t={t:.6}", f.label()));
            match p_laplace_comparison_check(prof, k, p, f, t) {
                Ok(rep) => Row::from_report(&label, &rep),
                Err(e) => Row::failed("p-comparison", &label, &ctx.inputs().p(p).k(k).r(t), &e.to_string()),
            }
        })
        .collect()
}

fn doubling_row(ctx: &Context, prefix: &str, frac: f64) -> Row {
    let r = ctx.radius();
    let r0 = frac * r;
    let label = case(prefix, &format!("r0={r0:.6}"));
    match volume_doubling_check(ctx.profile(), ctx.k(), ctx.params.q1(), r, r0) {
        Ok(rep) => Row::from_report(&label, &rep),
        Err(e) => Row::failed("doubling", &label, &failure_inputs(ctx), &e.to_string()),
    }
}

fn lichnerowicz_rows(ctx: &Context, prefix: &str) -> Vec<Row> {
    let label = case(prefix, "");
    let run = || -> Result<BoundReport> {
        let mut rep = lichnerowicz_empirical_check(ctx.profile(), ctx.k(), ctx.params.p, ctx.params.q1(), ctx.params.tol)?;
        if let Some(c_s) = ctx.params.c_s {
            rep = rep.with_detail("sobolev_threshold", sobolev_threshold(ctx.params.p, c_s)?);
        }
        Ok(rep)
    };
    match run() {
        Ok(rep) => vec![Row::from_report(&label, &rep)],
        Err(e) => vec![Row::failed("lichnerowicz", &label, &failure_inputs(ctx), &e.to_string())],
    }
}

fn coarea_rows(ctx: &Context, prefix: &str) -> Vec<Row> {
    let prof = ctx.profile();
    let (p, r) = (ctx.params.p, ctx.radius());
    let inputs = ctx.inputs().p(p).r(r);
    let res = match solve_first_dirichlet_ball(prof, r, p, ctx.params.tol) {
        Ok(res) => res,
        Err(e) => return vec![Row::failed("coarea", &case(prefix, ""), &inputs, &e.to_string())],
    };
    let owned = prof.clone();
    let density: Arc<DensityFn> = Arc::new(move |t| owned.area_density(t));
    let samples = RadialSamples::new(
        res.t.clone(),
        res.f.iter().map(|v| v.abs()).collect(),
        Some(res.fprime.clone()),
    );
    let samples = match samples {
        Ok(s) => s,
        Err(e) => return vec![Row::failed("coarea", &case(prefix, ""), &inputs, &e.to_string())],
    };
    let audit = match coarea_audit(&samples, density.clone(), p, None) {
        Ok(a) => a,
        Err(e) => return vec![Row::failed("coarea", &case(prefix, ""), &inputs, &e.to_string())],
    };
    let mut rows = Vec::with_capacity(audit.len() + 1);
    for j in 0..audit.len() {
        let tau = audit.thresholds[j];
        let label = case(prefix, &format!("level={tau:.6e}"));
        let area = audit.boundary_areas[j];
        let rep = if audit.critical[j] {
            BoundReport::report_only("coarea", inputs.clone(), area, f64::NAN).with_detail("critical", 1.0)
        } else {
            let bound = area + audit.holder_slack[j];
            BoundReport::decided("coarea", inputs.clone(), area, bound, audit.holder_slack[j], HOLDER_TOL * area)
                .with_detail("critical", 0.0)
        };
        let rep = rep
            .with_detail("superlevel_volume", audit.superlevel_volumes[j])
            .with_detail("gradient_coarea", audit.gradient_coarea[j])
            .with_detail("gradient_flux", audit.gradient_flux[j]);
        rows.push(Row::from_report(&label, &rep));
    }

    // first-order consistency of the co-area derivative at the median level
    let tau = audit.thresholds[audit.len() / 2];
    let top = res.f[0].abs();
    let label = case(prefix, &format!("level={tau:.6e}:order"));
    let defects: Result<Vec<f64>> = COAREA_STEPS
        .iter()
        .map(|&d| coarea_derivative_defect(&samples, density.clone(), tau, d * top))
        .collect();
    rows.push(match defects {
        Ok(d) => {
            let order = (d[0] / d[1]).log2().min((d[1] / d[2]).log2());
            // volume linear in the level: the difference quotient is exact
            let rep = if d[0] < COAREA_EXACT_DEFECT {
                BoundReport::report_only("coarea", inputs.clone(), order, COAREA_MIN_ORDER)
            } else {
                BoundReport::decided("coarea", inputs.clone(), order, COAREA_MIN_ORDER, order - COAREA_MIN_ORDER, 0.0)
            };
            let rep = rep
                .with_detail("defect_h", d[0])
                .with_detail("defect_h2", d[1])
                .with_detail("defect_h4", d[2]);
            Row::from_report(&label, &rep)
        }
        Err(e) => Row::failed("coarea", &label, &inputs, &e.to_string()),
    });
    rows
}

/// Number of rows by verdict text, in a fixed order.
pub fn tally(rows: &[Row]) -> Vec<(&'static str, usize)> {
    let count = |v: &str| rows.iter().filter(|r| r.verdict == v).count();
    vec![
        ("holds", count(&Verdict::Holds.to_string())),
        ("violated", count(&Verdict::Violated.to_string())),
        ("inconclusive", count(&Verdict::Inconclusive.to_string())),
        ("error", count("error")),
    ]
}
