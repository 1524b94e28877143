//! Rate sweeps over `n`, log-log slope fits, saturation plateaus and the
//! lower-bound chain `error >= sqrt(aᵀQ_κa) - ‖f - P_{2^κ-1} f‖`.

use serde::Serialize;

use crate::activation::{build_table, ActivationOrder};
use crate::approximation::{
    assemble_gram, best_approx_error, default_center, exact_quadratic_form, make_sobolev_target_with_margin,
    GramKernel, ZonalTarget, DEFAULT_DELTA, DEFAULT_RCOND, DEFAULT_TARGET_DEGREE,
};
use crate::cutoff::BlockSymbol;
use crate::error::{Error, Result};
use crate::kernel::{degree_energies, dyadic_energy, find_dominant_level, ols};
use crate::points::{certify_uniformity, generate_antipodal_quasiuniform, kappa_threshold, PointSet, DEFAULT_POOL_FACTOR};
use crate::polynomials::SphereDim;

/// Version tag written into every report.
pub const FORMAT_VERSION: &str = "satlab-rate/1";
/// Default constant in `κ = min{q : 2^q >= C3 / h}`.
pub const DEFAULT_C3: f64 = 4.0;
/// Relative slack of the lower-bound chain, as a multiple of `‖f‖`.
pub const CHAIN_SLACK: f64 = 1e-8;

/// Saturation exponent `(d + 2k + 1) / (2d)`.
pub fn saturation_exponent(d: SphereDim, k: ActivationOrder) -> f64 {
    (d.get() as f64 + 2.0 * k.get() as f64 + 1.0) / (2.0 * d.get() as f64)
}

/// Sobolev threshold `(d + 2k + 1) / 2` above which the rate saturates.
pub fn smoothness_threshold(d: SphereDim, k: ActivationOrder) -> f64 {
    (d.get() as f64 + 2.0 * k.get() as f64 + 1.0) / 2.0
}

/// Configuration of a sweep.
#[derive(Debug, Clone, Serialize)]
pub struct RateConfig {
    pub d: SphereDim,
    pub k: ActivationOrder,
    pub r: f64,
    pub delta: f64,
    pub n_list: Vec<usize>,
    pub seeds: Vec<u64>,
    pub restrict: bool,
    pub fit_skip: usize,
    pub rcond: f64,
    pub target_degree: usize,
    pub pool_factor: usize,
    /// Mesh samples per point used when certifying each set.
    pub mesh_factor: usize,
    /// Fallback `C3` when no dominant level is found.
    pub c3: f64,
}

impl RateConfig {
    pub fn new(d: SphereDim, k: ActivationOrder, r: f64, n_list: Vec<usize>) -> Self {
        RateConfig {
            d,
            k,
            r,
            delta: DEFAULT_DELTA,
            n_list,
            seeds: vec![1],
            restrict: true,
            fit_skip: 2,
            rcond: DEFAULT_RCOND,
            target_degree: DEFAULT_TARGET_DEGREE,
            pool_factor: DEFAULT_POOL_FACTOR,
            mesh_factor: 100,
            c3: DEFAULT_C3,
        }
    }
}

/// Both sides of the lower-bound chain for one run.
#[derive(Debug, Clone, Serialize)]
pub struct LowerBound {
    pub kappa: u32,
    pub lhs: f64,
    pub rhs: f64,
    /// `aᵀ Q_κ a`.
    pub q_kappa_quadform: f64,
    /// `aᵀ Q_{κ+1} a`, whose degrees all lie at or above `2^κ`.
    pub q_next_quadform: f64,
    /// `sqrt(aᵀQ_{κ+1}a) - ‖f - P_{2^κ-1} f‖`, a bound that holds without slack.
    pub rhs_next: f64,
    /// `‖f_n - P_{2^κ-1} f_n‖^2`.
    pub high_energy: f64,
    pub low_energy: f64,
    pub fn_norm_sq: f64,
    /// `‖f - P_{2^κ-1} f‖`.
    pub target_tail: f64,
    /// `lhs - rhs`.
    pub slack: f64,
    pub holds: bool,
    /// `rhs > 0`.
    pub informative: bool,
}

/// Evaluates the chain for a computed optimum `a` at level `κ`.
pub fn certified_lower_bound(
    ps: &PointSet<f64>,
    k: ActivationOrder,
    target: &ZonalTarget<f64>,
    a: &[f64],
    error: f64,
    kappa: u32,
) -> Result<LowerBound> {
    let d = ps.dim();
    let cut = 1usize << kappa;
    let symbol = BlockSymbol::new(kappa, d, k);
    let next = BlockSymbol::new(kappa + 1, d, k);
    let top = next.required_degree();
    let table = build_table::<f64>(d, k, top.max(k.get() + 2))?;
    let energies = degree_energies(ps, a, top);
    let low: f64 = (0..cut).map(|m| table.sigma_hat(m).powi(2) * energies[m]).sum();
    let total = exact_quadratic_form(ps, k, a);
    let qf = dyadic_energy(&energies, &symbol)?;
    let qn = dyadic_energy(&energies, &next)?;
    let tail = target.tail_norm_sq(cut).max(0.0).sqrt();
    let rhs = qf.max(0.0).sqrt() - tail;
    let norm_f = target.norm_sq().sqrt();
    Ok(LowerBound {
        kappa,
        lhs: error,
        rhs,
        q_kappa_quadform: qf,
        q_next_quadform: qn,
        rhs_next: qn.max(0.0).sqrt() - tail,
        high_energy: total - low,
        low_energy: low,
        fn_norm_sq: total,
        target_tail: tail,
        slack: error - rhs,
        holds: error - rhs >= -CHAIN_SLACK * norm_f,
        informative: rhs > 0.0,
    })
}

/// One `(n, seed)` run.
#[derive(Debug, Clone, Serialize)]
pub struct RunRecord {
    pub n: usize,
    pub seed: u64,
    pub separation: f64,
    pub mesh_ratio: f64,
    /// First dominant dyadic level, if found.
    pub q_star: Option<u32>,
    pub kappa: u32,
    pub error: f64,
    pub norm_f: f64,
    pub dropped_modes: usize,
    pub ill_conditioned: bool,
    pub clamp: f64,
    pub coef_norm_sq: f64,
    pub lower_bound: LowerBound,
    pub notes: Vec<String>,
}

/// Generates, certifies, solves and checks the chain for one `(n, seed)`.
pub fn run_single(cfg: &RateConfig, n: usize, seed: u64) -> Result<RunRecord> {
    let (d, k) = (cfg.d, cfg.k);
    let mut notes = Vec::new();
    let ps = generate_antipodal_quasiuniform::<f64>(d, n, seed, cfg.pool_factor)?;
    let report = certify_uniformity(&ps, cfg.mesh_factor * n, seed)?;
    let h = report.separation;
    let q_cap = kappa_threshold(&report, 1.0)? + 8;
    let search = find_dominant_level(&ps, k, h, q_cap)?;
    let kappa = match search.q_star {
        Some(q) => q,
        None => {
            notes.push(format!("no dominant level up to q = {q_cap}; using C3 = {}", cfg.c3));
            kappa_threshold(&report, cfg.c3)?
        }
    };
    let table_degree = cfg.target_degree.max(k.get() + 2);
    let table = build_table::<f64>(d, k, table_degree)?;
    let target = make_sobolev_target_with_margin(d, k, cfg.r, cfg.delta, cfg.target_degree, default_center(d), cfg.restrict)?;
    let sys = assemble_gram(&ps, &table, &target, GramKernel::Exact)?;
    let sol = best_approx_error(&sys, cfg.rcond)?;
    if sol.ill_conditioned {
        notes.push(format!("{} of {n} modes dropped", sol.dropped_modes));
    }
    let lb = certified_lower_bound(&ps, k, &target, &sol.a, sol.error, kappa)?;
    Ok(RunRecord {
        n,
        seed,
        separation: h,
        mesh_ratio: report.mesh_ratio,
        q_star: search.q_star,
        kappa,
        error: sol.error,
        norm_f: sys.norm_sq_f.sqrt(),
        dropped_modes: sol.dropped_modes,
        ill_conditioned: sol.ill_conditioned,
        clamp: sol.clamp,
        coef_norm_sq: sol.a.iter().map(|x| x * x).sum(),
        lower_bound: lb,
        notes,
    })
}

/// Seed-aggregated row of a [`RateReport`].
#[derive(Debug, Clone, Serialize)]
pub struct RateRow {
    pub n: usize,
    /// Geometric mean over seeds.
    pub h_underline: f64,
    /// Largest `κ` over seeds.
    pub kappa: u32,
    /// Geometric mean over seeds.
    pub error: f64,
    pub err_scaled_saturation: f64,
    pub err_scaled_sobolev: f64,
    /// Smallest chain right-hand side over seeds.
    pub lower_bound_rhs: f64,
    pub seeds_ok: usize,
    pub failures: Vec<String>,
}

/// Least-squares slope of `log2 error` against `log2 n`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateFit {
    pub slope: f64,
    pub stderr: f64,
    pub intercept: f64,
    pub points: usize,
    pub excluded: usize,
}

/// OLS on `(log2 n, log2 error)`; nonpositive or non-finite errors are
/// excluded and counted.
pub fn fit_rate(rows: &[(usize, f64)]) -> Result<RateFit> {
    let usable: Vec<(f64, f64)> = rows
        .iter()
        .filter(|&&(n, e)| n > 0 && e > 0.0 && e.is_finite())
        .map(|&(n, e)| ((n as f64).log2(), e.log2()))
        .collect();
    let excluded = rows.len() - usable.len();
    let (xs, ys): (Vec<f64>, Vec<f64>) = usable.into_iter().unzip();
    let (a, b, se) = ols(&xs, &ys)?;
    Ok(RateFit { slope: b, stderr: se, intercept: a, points: xs.len(), excluded })
}

/// Per-`n` rates plus fit and plateau statistics.
#[derive(Debug, Clone, Serialize)]
pub struct RateReport {
    pub format_version: String,
    pub config: RateConfig,
    pub saturation_exponent: f64,
    pub sobolev_exponent: f64,
    pub super_critical: bool,
    pub rows: Vec<RateRow>,
    pub runs: Vec<RunRecord>,
    /// `n` values used by the fit.
    pub fit_window: Vec<usize>,
    pub fit: Option<RateFit>,
    /// max/min of the saturation-scaled error over the fit window.
    pub plateau_ratio: Option<f64>,
    /// max/min of the Sobolev-scaled error over the fit window.
    pub plateau_ratio_sobolev: Option<f64>,
    pub chain_holds: bool,
    pub insufficient_data: bool,
    pub notes: Vec<String>,
}

fn geo_mean(xs: &[f64]) -> f64 {
    (xs.iter().map(|x| x.ln()).sum::<f64>() / xs.len() as f64).exp()
}

fn spread(xs: &[f64]) -> Option<f64> {
    if xs.is_empty() || xs.iter().any(|x| !(x.is_finite() && *x > 0.0)) {
        return None;
    }
    let hi = xs.iter().cloned().fold(f64::MIN, f64::max);
    let lo = xs.iter().cloned().fold(f64::MAX, f64::min);
    Some(hi / lo)
}

/// Runs every `(n, seed)`; per-run failures are recorded and the sweep continues.
pub fn run_rate_sweep(cfg: &RateConfig) -> Result<RateReport> {
    validate(cfg)?;
    let sat = saturation_exponent(cfg.d, cfg.k);
    let sob = cfg.r / cfg.d.get() as f64;
    let mut runs = Vec::new();
    let mut rows = Vec::new();
    for &n in &cfg.n_list {
        let mut ok = Vec::new();
        let mut failures = Vec::new();
        for &seed in &cfg.seeds {
            match run_single(cfg, n, seed) {
                Ok(rec) => ok.push(rec),
                Err(e) => failures.push(format!("seed {seed}: {e}")),
            }
        }
        let row = if ok.is_empty() {
            RateRow {
                n,
                h_underline: f64::NAN,
                kappa: 0,
                error: f64::NAN,
                err_scaled_saturation: f64::NAN,
                err_scaled_sobolev: f64::NAN,
                lower_bound_rhs: f64::NAN,
                seeds_ok: 0,
                failures,
            }
        } else {
            let err = geo_mean(&ok.iter().map(|r| r.error).collect::<Vec<_>>());
            let nf = n as f64;
            RateRow {
                n,
                h_underline: geo_mean(&ok.iter().map(|r| r.separation).collect::<Vec<_>>()),
                kappa: ok.iter().map(|r| r.kappa).max().unwrap_or(0),
                error: err,
                err_scaled_saturation: err * nf.powf(sat),
                err_scaled_sobolev: err * nf.powf(sob),
                lower_bound_rhs: ok.iter().map(|r| r.lower_bound.rhs).fold(f64::INFINITY, f64::min),
                seeds_ok: ok.len(),
                failures,
            }
        };
        rows.push(row);
        runs.extend(ok);
    }
    let window: Vec<&RateRow> = rows.iter().skip(cfg.fit_skip).filter(|r| r.seeds_ok > 0).collect();
    let mut notes = Vec::new();
    let fit = match fit_rate(&window.iter().map(|r| (r.n, r.error)).collect::<Vec<_>>()) {
        Ok(f) => Some(f),
        Err(e) => {
            notes.push(format!("slope undefined: {e}"));
            None
        }
    };
    if let Some(f) = &fit {
        if f.excluded > 0 {
            notes.push(format!("{} rows with zero error excluded from the fit", f.excluded));
        }
    }
    let super_critical = cfg.r > smoothness_threshold(cfg.d, cfg.k);
    if !super_critical {
        notes.push("sub-critical smoothness: the lower-bound chain is not expected to be informative".into());
    }
    Ok(RateReport {
        format_version: FORMAT_VERSION.into(),
        config: cfg.clone(),
        saturation_exponent: sat,
        sobolev_exponent: sob,
        super_critical,
        fit_window: window.iter().map(|r| r.n).collect(),
        plateau_ratio: spread(&window.iter().map(|r| r.err_scaled_saturation).collect::<Vec<_>>()),
        plateau_ratio_sobolev: spread(&window.iter().map(|r| r.err_scaled_sobolev).collect::<Vec<_>>()),
        chain_holds: runs.iter().all(|r| r.lower_bound.holds),
        insufficient_data: fit.is_none(),
        fit,
        rows,
        runs,
        notes,
    })
}

fn validate(cfg: &RateConfig) -> Result<()> {
    if cfg.n_list.is_empty() {
        return Err(Error::InsufficientData("empty n list".into()));
    }
    if cfg.seeds.is_empty() {
        return Err(Error::InvalidParameter("at least one seed is required".into()));
    }
    if cfg.n_list.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter("n list must be strictly increasing".into()));
    }
    let min = cfg.d.get() + 2;
    if let Some(&n) = cfg.n_list.iter().find(|&&n| n < min) {
        return Err(Error::TooFewPoints { n, min });
    }
    Ok(())
}

fn fmt(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.12e}")
    } else {
        "nan".into()
    }
}

impl RateReport {
    /// CSV with `#` comment lines echoing the version and configuration.
    pub fn to_csv(&self, config_echo: &[(String, String)]) -> String {
        let mut s = String::new();
        s.push_str(&format!("# format_version = {}\n", self.format_version));
        for (k, v) in config_echo {
            s.push_str(&format!("# {k} = {v}\n"));
        }
        s.push_str("n,h_underline,kappa,error,err_scaled_saturation,err_scaled_sobolev,lower_bound_rhs\n");
        for r in &self.rows {
            s.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                r.n,
                fmt(r.h_underline),
                r.kappa,
                fmt(r.error),
                fmt(r.err_scaled_saturation),
                fmt(r.err_scaled_sobolev),
                fmt(r.lower_bound_rhs)
            ));
        }
        s
    }
}
