use std::f64::consts::E;

use clap::{Args, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use invsub::asymptotics::{derive_constants, lil_limsup_constants, local_time_lil_constants};
use invsub::experiments::{bochner_check, lil_experiment, local_time_check, modulus_experiment};
use invsub::integral_tests::{self as it, classify, classify_numeric, consistency_check, NumericRule, TestFunctionSpec};
use invsub::mittag_leffler::{ml_neg, overlap_discrepancy, MLConfig};
use invsub::path::{compose_z, CompositionSpec};
use invsub::rng::RngStream;
use invsub::smallball::{mc_smallball_levels, smallball_z_series_scaled, SmallBallSeriesConfig};
use invsub::stable::{StableParams, SubordinatorParams};
use invsub::stats::mc_mean_ci;

use crate::output::{num, Format, Report};
use crate::Failure;

pub struct Context {
    pub seed: u64,
    pub level: f64,
    pub emit_tests: bool,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Mittag-Leffler function E_beta(-z). CSV: z,value
    Ml(MlArgs),
    /// Small-ball probabilities P(sup_[0,1] |Z| <= u).
    /// CSV: u,analytic,mc_estimate,ci_halfwidth,grid,paths,seed,grid_sup_estimate,grid_sup_refined,mc_estimate_refined
    Smallball(SmallballArgs),
    /// Sample paths of E and Z on a uniform grid. CSV: path,time,e,z
    Paths(PathsArgs),
    /// Laplace transform and law of the composed subordinator against a direct
    /// stable sampler. CSV: s,estimate,half_width,exact,within
    BochnerCheck(BochnerArgs),
    /// Closed-form constants (JSON by default). CSV: name,value
    Constants(ConstantsArgs),
    /// Per-path large-time LIL statistic. CSV: path,statistic
    Lil(LilArgs),
    /// Per-path modulus statistic of the running supremum. CSV: path,statistic
    Modulus(ModulusArgs),
    /// Convergence verdict of an integral test (JSON by default). CSV: which,family,verdict,basis
    IntegralTest(IntegralArgs),
    /// Brownian local time at zero against the inverse-subordinator clock.
    /// CSV: statistic,p_value,rho,median_oracle,median_clock
    LocalTimeCheck(LocalTimeArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct DriverArgs {
    /// Driver index in (1, 2].
    #[arg(long, default_value_t = 2.0)]
    alpha: f64,
    /// Driver skewness in [-1, 1].
    #[arg(long, default_value_t = 0.0)]
    nu: f64,
    /// Driver scale.
    #[arg(long, default_value_t = 2.0)]
    chi: f64,
}

impl DriverArgs {
    fn params(&self) -> Result<StableParams, Failure> {
        let p = StableParams::new(self.alpha, self.nu, self.chi)?;
        p.check_driver()?;
        Ok(p)
    }
}

#[derive(Debug, Args, Serialize)]
pub struct MlArgs {
    #[arg(long)]
    beta: f64,
    /// Comma-separated arguments z >= 0.
    #[arg(long, value_delimiter = ',', required = true)]
    z: Vec<f64>,
}

#[derive(Debug, Args, Serialize)]
pub struct SmallballArgs {
    #[arg(long)]
    beta: f64,
    /// Comma-separated levels.
    #[arg(long, value_delimiter = ',', required = true)]
    u: Vec<f64>,
    #[command(flatten)]
    driver: DriverArgs,
    /// Skip the Monte Carlo estimate.
    #[arg(long)]
    analytic_only: bool,
    #[arg(long, default_value_t = 10_000)]
    paths: usize,
    /// Outer grid intervals on [0, 1].
    #[arg(long, default_value_t = 1024)]
    grid: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct PathsArgs {
    #[arg(long)]
    beta: f64,
    #[command(flatten)]
    driver: DriverArgs,
    #[arg(long, default_value_t = 1.0)]
    horizon: f64,
    /// Outer grid intervals.
    #[arg(long, default_value_t = 1024)]
    grid: usize,
    #[arg(long, default_value_t = 1)]
    n_paths: usize,
    /// Lattice spacing of the subordinator; defaults to E[E(horizon)] / grid.
    #[arg(long)]
    step: Option<f64>,
}

#[derive(Debug, Args, Serialize)]
pub struct BochnerArgs {
    #[arg(long, default_value_t = 2.0)]
    alpha: f64,
    #[arg(long, default_value_t = 0.5)]
    beta: f64,
    #[arg(long, default_value_t = 1.0)]
    chi: f64,
    #[arg(long, value_delimiter = ',', default_value = "0.5,1,2")]
    s: Vec<f64>,
    #[arg(long, default_value_t = 10_000)]
    n: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct ConstantsArgs {
    #[arg(long)]
    alpha: f64,
    #[arg(long)]
    beta: f64,
    #[arg(long)]
    chi: f64,
    /// Index of a stable process whose local time at zero is the clock.
    #[arg(long)]
    gamma: Option<f64>,
    /// Skewness of that process.
    #[arg(long, default_value_t = 0.0)]
    nu: f64,
}

#[derive(Debug, Args, Serialize)]
pub struct LilArgs {
    #[arg(long, default_value_t = 0.5)]
    beta: f64,
    #[command(flatten)]
    driver: DriverArgs,
    #[arg(long, default_value_t = 200)]
    paths: usize,
    #[arg(long, default_value_t = E * E)]
    t_lo: f64,
    #[arg(long, default_value_t = 1048576.0)]
    t_hi: f64,
    /// Lattice spacing of the subordinator.
    #[arg(long, default_value_t = 1e-3)]
    step: f64,
}

#[derive(Debug, Args, Serialize)]
pub struct ModulusArgs {
    #[arg(long, default_value_t = 0.5)]
    beta: f64,
    #[arg(long, default_value_t = 2.0)]
    alpha: f64,
    #[arg(long, default_value_t = 0.0)]
    nu: f64,
    #[arg(long, default_value_t = 1.0)]
    chi: f64,
    #[arg(long, default_value_t = 50)]
    paths: usize,
    /// The grid on [0, 1] has 2^grid_log2 intervals.
    #[arg(long, default_value_t = 16)]
    grid_log2: u32,
    /// Smallest increment is 2^-h_finest.
    #[arg(long, default_value_t = 16)]
    h_finest: u32,
    /// Largest increment is 2^-h_coarsest.
    #[arg(long, default_value_t = 4)]
    h_coarsest: u32,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum WhichArg {
    Kolmogorov,
    Breiman,
    Hirsch,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyArg {
    /// params: a
    Loglog,
    /// params: a,b
    LoglogPlusLogloglog,
    /// params: p
    Power,
    /// params: p,q
    PowerOverLog,
    /// params: c
    Constant,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum HorizonArg {
    Large,
    Small,
}

#[derive(Debug, Args, Serialize)]
pub struct IntegralArgs {
    #[arg(long, value_enum)]
    which: WhichArg,
    #[arg(long, value_enum)]
    family: FamilyArg,
    /// Comma-separated family parameters.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
    params: Vec<f64>,
    #[arg(long)]
    alpha: f64,
    #[arg(long)]
    beta: f64,
    #[arg(long, default_value_t = 1.0)]
    chi: f64,
    #[arg(long, value_enum, default_value_t = HorizonArg::Large)]
    horizon: HorizonArg,
    /// Use the doubling-horizon heuristic instead of the closed-form verdict.
    #[arg(long)]
    numeric: bool,
}

#[derive(Debug, Args, Serialize)]
pub struct LocalTimeArgs {
    /// Scale of the Brownian motion whose local time is compared.
    #[arg(long, default_value_t = 2.0)]
    chi: f64,
    #[arg(long, default_value_t = 0.0)]
    nu: f64,
    #[arg(long, default_value_t = 10_000)]
    n: usize,
    #[arg(long, default_value_t = 1.0)]
    horizon: f64,
    /// Grid points of the Brownian path used for the oracle.
    #[arg(long, default_value_t = 4097)]
    oracle_grid: usize,
    /// Lattice spacing of the subordinator.
    #[arg(long, default_value_t = 1e-3)]
    step: f64,
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("serializable")
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Ml(_) => "ml",
            Command::Smallball(_) => "smallball",
            Command::Paths(_) => "paths",
            Command::BochnerCheck(_) => "bochner-check",
            Command::Constants(_) => "constants",
            Command::Lil(_) => "lil",
            Command::Modulus(_) => "modulus",
            Command::IntegralTest(_) => "integral-test",
            Command::LocalTimeCheck(_) => "local-time-check",
        }
    }

    pub fn default_format(&self) -> Format {
        match self {
            Command::Constants(_) | Command::IntegralTest(_) | Command::BochnerCheck(_) | Command::LocalTimeCheck(_) => {
                Format::Json
            }
            _ => Format::Csv,
        }
    }

    pub fn execute(&self, ctx: &Context) -> Result<Report, Failure> {
        match self {
            Command::Ml(a) => ml(a, ctx),
            Command::Smallball(a) => smallball(a, ctx),
            Command::Paths(a) => paths(a, ctx),
            Command::BochnerCheck(a) => bochner(a, ctx),
            Command::Constants(a) => constants(a),
            Command::Lil(a) => lil(a, ctx),
            Command::Modulus(a) => modulus(a, ctx),
            Command::IntegralTest(a) => integral(a, ctx),
            Command::LocalTimeCheck(a) => local_time(a, ctx),
        }
    }
}

fn ml(a: &MlArgs, ctx: &Context) -> Result<Report, Failure> {
    let cfg = MLConfig::default();
    let values = a.z.iter().map(|&z| ml_neg(a.beta, z, &cfg)).collect::<invsub::Result<Vec<_>>>()?;
    let results = a.z.iter().zip(&values).map(|(z, v)| json!({"z": z, "value": v})).collect();
    let rows = a.z.iter().zip(&values).map(|(z, v)| vec![num(*z), num(*v)]).collect();
    let mut r = Report::new(Value::Array(results), vec!["z", "value"], rows);
    if ctx.emit_tests {
        r.diagnostics = Some(json!({
            "crossover": cfg.crossover(a.beta),
            "series_vs_integral_at_crossover": overlap_discrepancy(a.beta, &cfg)?,
        }));
    }
    Ok(r)
}

fn smallball(a: &SmallballArgs, ctx: &Context) -> Result<Report, Failure> {
    let driver = a.driver.params()?;
    let cfg = SmallBallSeriesConfig::default();
    let analytic = a
        .u
        .iter()
        .map(|&u| {
            if driver.is_gaussian() {
                smallball_z_series_scaled(a.beta, u, driver.chi(), &cfg).map(Some)
            } else {
                Ok(None)
            }
        })
        .collect::<invsub::Result<Vec<_>>>()?;
    let mc = if a.analytic_only {
        None
    } else {
        let spec = CompositionSpec::new(driver, SubordinatorParams::standard(a.beta)?, 1.0, a.grid + 1)?;
        Some(mc_smallball_levels(&spec, &a.u, a.paths, ctx.seed, ctx.level)?)
    };
    let mut rows = Vec::new();
    let mut results = Vec::new();
    let mut checks = Vec::new();
    for (i, &u) in a.u.iter().enumerate() {
        let exact = analytic[i];
        let m = mc.as_ref().map(|m| m[i]);
        let best = m.map(|m| m.best());
        rows.push(vec![
            num(u),
            exact.map(num).unwrap_or_default(),
            best.map(|b| num(b.mean)).unwrap_or_default(),
            best.map(|b| num(b.half_width)).unwrap_or_default(),
            if m.is_some() { a.grid.to_string() } else { String::new() },
            if m.is_some() { a.paths.to_string() } else { String::new() },
            if m.is_some() { ctx.seed.to_string() } else { String::new() },
            m.map(|m| num(m.estimate.mean)).unwrap_or_default(),
            m.map(|m| num(m.refined.mean)).unwrap_or_default(),
            m.map(|m| num(m.best_refined().mean)).unwrap_or_default(),
        ]);
        results.push(json!({"u": u, "analytic": exact, "mc": m}));
        if let (Some(x), Some(m)) = (exact, m) {
            let b = m.best();
            checks.push(json!({
                "u": u,
                "abs_error": (b.mean - x).abs(),
                "tolerance": b.half_width.max(0.02 * x),
                "within": (b.mean - x).abs() <= b.half_width.max(0.02 * x),
                "grid_doubling_change": (b.mean - m.best_refined().mean) / x,
            }));
        }
    }
    let mut r = Report::new(
        Value::Array(results),
        vec![
            "u",
            "analytic",
            "mc_estimate",
            "ci_halfwidth",
            "grid",
            "paths",
            "seed",
            "grid_sup_estimate",
            "grid_sup_refined",
            "mc_estimate_refined",
        ],
        rows,
    );
    if ctx.emit_tests {
        r.diagnostics = Some(Value::Array(checks));
    }
    Ok(r)
}

fn paths(a: &PathsArgs, ctx: &Context) -> Result<Report, Failure> {
    use rayon::prelude::*;
    let driver = a.driver.params()?;
    let inner = SubordinatorParams::standard(a.beta)?;
    let mut spec = CompositionSpec::new(driver, inner, a.horizon, a.grid + 1)?;
    if let Some(step) = a.step {
        spec = spec.with_intrinsic_step(step)?;
    }
    let composed = (0..a.n_paths)
        .into_par_iter()
        .map(|i| compose_z(&spec, RngStream::for_path(ctx.seed, i)))
        .collect::<invsub::Result<Vec<_>>>()?;
    let mut rows = Vec::new();
    for (i, c) in composed.iter().enumerate() {
        for ((t, e), z) in c.z.times().iter().zip(c.e.values()).zip(c.z.values()) {
            rows.push(vec![i.to_string(), num(*t), num(*e), num(*z)]);
        }
    }
    let results = composed
        .iter()
        .enumerate()
        .map(|(i, c)| json!({"path": i, "e": c.e, "z": c.z}))
        .collect();
    let mut r = Report::new(Value::Array(results), vec!["path", "time", "e", "z"], rows);
    if ctx.emit_tests && a.n_paths >= 2 {
        let xs: Vec<f64> = composed.iter().map(|c| (-c.e.last_value()).exp()).collect();
        let est = mc_mean_ci(&xs, ctx.level)?.with_seed(ctx.seed);
        let exact = ml_neg(a.beta, a.horizon.powf(a.beta), &MLConfig::default())?;
        r.diagnostics = Some(json!({
            "laplace_of_e_at_horizon": {"estimate": est, "exact": exact, "within": est.contains(exact)},
        }));
    }
    Ok(r)
}

fn bochner(a: &BochnerArgs, ctx: &Context) -> Result<Report, Failure> {
    let rep = bochner_check(a.alpha, a.beta, a.chi, &a.s, a.n, ctx.seed)?;
    let rows = rep
        .laplace
        .iter()
        .map(|c| vec![num(c.s), num(c.estimate.mean), num(c.estimate.half_width), num(c.exact), c.within.to_string()])
        .collect();
    let mut r = Report::new(to_value(&rep), vec!["s", "estimate", "half_width", "exact", "within"], rows);
    r.verified = rep.passes();
    r.diagnostics = Some(json!({"passes": rep.passes(), "ks": rep.ks}));
    Ok(r)
}

fn constants(a: &ConstantsArgs) -> Result<Report, Failure> {
    let dc = derive_constants(a.alpha, a.beta, a.chi)?;
    let lil = lil_limsup_constants(&dc);
    let consistency = consistency_check(a.alpha, a.beta, a.chi)?;
    let local = a
        .gamma
        .map(|g| local_time_lil_constants(g, a.chi, a.nu, 2.0))
        .transpose()?;
    let mut rows: Vec<Vec<String>> = match to_value(&dc) {
        Value::Object(m) => m.into_iter().map(|(k, v)| vec![k, v.to_string()]).collect(),
        _ => unreachable!(),
    };
    rows.push(vec!["lil_paper".into(), num(lil.paper)]);
    rows.push(vec!["lil_breiman_consistent".into(), num(lil.breiman_consistent)]);
    let results = json!({
        "constants": dc,
        "lil": {"paper": lil.paper, "breiman-consistent": lil.breiman_consistent},
        "consistency": consistency,
        "local_time": local,
    });
    Ok(Report::new(results, vec!["name", "value"], rows))
}

fn lil(a: &LilArgs, ctx: &Context) -> Result<Report, Failure> {
    let rep = lil_experiment(a.driver.params()?, a.beta, a.t_lo, a.t_hi, a.paths, a.step, ctx.seed)?;
    let rows = rep.summary.stats.iter().enumerate().map(|(i, s)| vec![i.to_string(), num(*s)]).collect();
    let mut r = Report::new(to_value(&rep), vec!["path", "statistic"], rows);
    if ctx.emit_tests {
        r.diagnostics = Some(json!({
            "kappa_paper": rep.kappa_paper,
            "kappa_breiman_consistent": rep.kappa_consistent,
            "fraction_reaching_half_consistent": rep.fraction_reaching_half,
            "fraction_exceeding_1.5_max": rep.fraction_exceeding,
            "favors": rep.favors,
            "median": rep.summary.median,
        }));
    }
    Ok(r)
}

fn modulus(a: &ModulusArgs, ctx: &Context) -> Result<Report, Failure> {
    let driver = StableParams::new(a.alpha, a.nu, a.chi)?;
    driver.check_driver()?;
    if a.h_finest > a.grid_log2 {
        return Err(usage("--h-finest cannot exceed --grid-log2"));
    }
    let rep = modulus_experiment(driver, a.beta, a.grid_log2, (a.h_coarsest, a.h_finest), a.paths, ctx.seed)?;
    let rows = rep.summary.stats.iter().enumerate().map(|(i, s)| vec![i.to_string(), num(*s)]).collect();
    let mut r = Report::new(to_value(&rep), vec!["path", "statistic"], rows);
    if ctx.emit_tests {
        r.diagnostics = Some(json!({"d": rep.d, "median": rep.summary.median, "median_over_d": rep.ratio}));
    }
    Ok(r)
}

fn family(a: &IntegralArgs) -> Result<TestFunctionSpec, Failure> {
    let p = &a.params;
    let need = |n: usize| {
        if p.len() == n {
            Ok(())
        } else {
            Err(usage(format!("family {:?} takes {n} parameter(s), got {}", a.family, p.len())))
        }
    };
    let f = match a.family {
        FamilyArg::Loglog => {
            need(1)?;
            TestFunctionSpec::LogLogPower { a: p[0] }
        }
        FamilyArg::LoglogPlusLogloglog => {
            need(2)?;
            TestFunctionSpec::LogLogPlusLogLogLog { a: p[0], b: p[1] }
        }
        FamilyArg::Power => {
            need(1)?;
            TestFunctionSpec::PurePower { p: p[0] }
        }
        FamilyArg::PowerOverLog => {
            need(2)?;
            TestFunctionSpec::PowerOverLogPower { p: p[0], q: p[1] }
        }
        FamilyArg::Constant => {
            need(1)?;
            TestFunctionSpec::Constant { c: p[0] }
        }
    };
    f.validate()?;
    Ok(f)
}

fn integral(a: &IntegralArgs, ctx: &Context) -> Result<Report, Failure> {
    let f = family(a)?;
    let which = match a.which {
        WhichArg::Kolmogorov => it::Which::Kolmogorov,
        WhichArg::Breiman => it::Which::Breiman,
        WhichArg::Hirsch => it::Which::Hirsch,
    };
    let horizon = match a.horizon {
        HorizonArg::Large => it::Horizon::Large,
        HorizonArg::Small => it::Horizon::Small,
    };
    derive_constants(a.alpha, a.beta, a.chi)?;
    let trace = if a.numeric || ctx.emit_tests {
        Some(classify_numeric(which, &f, a.alpha, a.beta, a.chi, horizon, &NumericRule::default())?)
    } else {
        None
    };
    let verdict = if a.numeric {
        it::Verdict {
            verdict: trace.as_ref().expect("numeric trace").verdict,
            basis: it::Basis::Numeric,
        }
    } else {
        classify(which, &f, a.alpha, a.beta, a.chi, horizon)
    };
    let row = vec![
        to_value(&a.which).as_str().unwrap_or_default().to_string(),
        to_value(&a.family).as_str().unwrap_or_default().to_string(),
        format!("{:?}", verdict.verdict),
        format!("{:?}", verdict.basis),
    ];
    let mut r = Report::new(json!({"function": f, "verdict": verdict}), vec!["which", "family", "verdict", "basis"], vec![row]);
    r.diagnostics = trace.map(|t| to_value(&t));
    Ok(r)
}

fn local_time(a: &LocalTimeArgs, ctx: &Context) -> Result<Report, Failure> {
    let rep = local_time_check(a.chi, a.nu, a.horizon, a.n, a.oracle_grid, a.step, ctx.seed)?;
    let rows = vec![vec![
        num(rep.ks.statistic),
        num(rep.ks.p_value),
        num(rep.rho),
        num(rep.median_oracle),
        num(rep.median_clock),
    ]];
    let mut r = Report::new(
        to_value(&rep),
        vec!["statistic", "p_value", "rho", "median_oracle", "median_clock"],
        rows,
    );
    r.verified = rep.passes();
    r.diagnostics = Some(json!({"passes": rep.passes(), "rho_matching_medians": rep.rho_matching_medians}));
    Ok(r)
}
