//! Subcommand drivers: resolve settings, validate, run, write artifacts.

use std::path::{Path, PathBuf};
use std::time::Instant;

use serde_json::json;

use satlab::activation::{build_table, coeff_closed_form, coeff_quadrature, index_set_member, xi_eval};
use satlab::cutoff::{zeta_eval, BlockSymbol};
use satlab::experiments::{run_rate_sweep, run_single, FORMAT_VERSION as RATE_FORMAT_VERSION};
use satlab::kernel::{assemble_dyadic_block, certify_dominance, fit_localization, localization_profile, uniform_grid};
use satlab::points::{certify_uniformity, generate_antipodal_quasiuniform, DEFAULT_POOL_FACTOR};
use satlab::polynomials::DEFAULT_DEGREE_CAP;
use satlab::verify::{run_suite, SUITES};
use satlab::{ActivationOrder, RateConfig, SphereDim};

use crate::config::Settings;
use crate::error::CliError;
use crate::output::{csv, emit, json, num, FORMAT_VERSION};
use crate::{Cli, Command};

/// Highest dyadic level whose kernel stays within the default degree cap.
const MAX_LEVEL: u32 = 11;

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Validation(msg.into())
}

fn sphere(d: usize) -> Result<SphereDim, CliError> {
    SphereDim::new(d).map_err(|_| invalid("d must be ≥ 2"))
}

fn check_n(n: usize, d: SphereDim) -> Result<(), CliError> {
    let min = d.get() + 2;
    if n < min {
        return Err(invalid(format!("n must be ≥ d+2 = {min}, got {n}")));
    }
    Ok(())
}

fn check_rcond(rcond: f64) -> Result<(), CliError> {
    if !(rcond > 0.0 && rcond < 1.0) {
        return Err(invalid(format!("rcond must lie in (0, 1), got {rcond}")));
    }
    Ok(())
}

fn check_r(r: f64) -> Result<(), CliError> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(invalid(format!("r must be positive, got {r}")));
    }
    Ok(())
}

fn check_level(name: &str, q: u32) -> Result<(), CliError> {
    if q > MAX_LEVEL {
        return Err(invalid(format!("{name} must be ≤ {MAX_LEVEL}, got {q}")));
    }
    Ok(())
}

fn check_target_degree(m: usize, k: ActivationOrder) -> Result<(), CliError> {
    if m < k.get() + 2 || m > DEFAULT_DEGREE_CAP {
        return Err(invalid(format!("target-degree must lie in [k+2, {DEFAULT_DEGREE_CAP}], got {m}")));
    }
    Ok(())
}

fn out_path(s: &mut Settings, key: &str, flag: &Option<PathBuf>) -> Result<Option<PathBuf>, CliError> {
    s.optional(key, flag.as_ref().map(|p| p.display().to_string()))
        .map(|v| v.map(PathBuf::from))
}

pub fn run(cli: &Cli) -> Result<(), CliError> {
    let start = Instant::now();
    let config = cli.config.as_deref();
    let result = match &cli.command {
        Command::Coeffs(a) => coeffs(a, config, cli.verbose),
        Command::Cutoff(a) => cutoff(a, config, cli.verbose),
        Command::Points(a) => points(a, config, cli.verbose),
        Command::Qmat(a) => qmat(a, config, cli.verbose),
        Command::Localize(a) => localize(a, config, cli.verbose),
        Command::Approx(a) => approx(a, config, cli.verbose),
        Command::Rate(a) => rate(a, config, cli.verbose),
        Command::Verify(a) => verify(a, config, cli.verbose),
    };
    if cli.verbose {
        eprintln!("elapsed {:.3} s", start.elapsed().as_secs_f64());
    }
    result
}

fn finish(s: Settings, verbose: bool) -> Result<Vec<(String, String)>, CliError> {
    let echo = s.finish()?;
    if verbose {
        for (k, v) in &echo {
            eprintln!("{k} = {v}");
        }
    }
    Ok(echo)
}

fn coeffs(a: &crate::CoeffsArgs, config: Option<&Path>, verbose: bool) -> Result<(), CliError> {
    let mut s = Settings::new("coeffs", config)?;
    let d = sphere(s.get("d", a.d, 2)?)?;
    let k = ActivationOrder::new(s.get("k", a.k, 1)?);
    let max_degree = s.get("max_degree", a.max_degree, 100)?;
    let out = out_path(&mut s, "out", &a.out)?;
    let echo = finish(s, verbose)?;
    check_target_degree(max_degree, k).map_err(|_| {
        invalid(format!("max-degree must lie in [k+2, {DEFAULT_DEGREE_CAP}], got {max_degree}"))
    })?;

    let table = build_table::<f64>(d, k, max_degree)?;
    let mut rows = Vec::with_capacity(max_degree + 1);
    for m in 0..=max_degree {
        let member = index_set_member(k, m);
        let (xi, gap) = if m <= k.get() {
            (f64::NAN, f64::NAN)
        } else if !member {
            (xi_eval(d, k, m as f64)?, 0.0)
        } else {
            let c: f64 = coeff_closed_form(d, k, m)?;
            let q: f64 = coeff_quadrature(d, k, m);
            (xi_eval(d, k, m as f64)?, (c - q).abs() / q.abs())
        };
        rows.push(vec![m.to_string(), member.to_string(), num(table.sigma_hat(m)), num(xi), num(gap)]);
    }
    let header = ["m", "in_index_set", "sigma_hat", "xi", "abs_rel_gap_closedform_vs_quadrature"];
    emit(out.as_deref(), &csv(FORMAT_VERSION, &echo, &header, rows))
}

fn cutoff(a: &crate::CutoffArgs, config: Option<&Path>, verbose: bool) -> Result<(), CliError> {
    let mut s = Settings::new("cutoff", config)?;
    let d = sphere(s.get("d", a.d, 2)?)?;
    let k = ActivationOrder::new(s.get("k", a.k, 1)?);
    let q = s.get("q", a.q, 4)?;
    let samples = s.get("samples", a.samples, 401)?;
    let out = out_path(&mut s, "out", &a.out)?;
    let echo = finish(s, verbose)?;
    check_level("q", q)?;
    if samples < 2 {
        return Err(invalid("samples must be ≥ 2"));
    }
    let symbol = BlockSymbol::new(q, d, k);
    let rows = (0..samples).map(|i| {
        let t = 2.0 * i as f64 / (samples - 1) as f64;
        vec![num(t), num(zeta_eval(t)), num(symbol.eval(t))]
    });
    emit(out.as_deref(), &csv(FORMAT_VERSION, &echo, &["t", "zeta", "phi_q"], rows))
}

fn points(a: &crate::PointsArgs, config: Option<&Path>, verbose: bool) -> Result<(), CliError> {
    let mut s = Settings::new("points", config)?;
    let d = sphere(s.get("d", a.d, 2)?)?;
    let n = s.require("n", a.n)?;
    let seed = s.get("seed", a.seed, 1)?;
    let pool_factor = s.get("pool_factor", a.pool_factor, DEFAULT_POOL_FACTOR)?;
    let mesh_samples = s.get("mesh_samples", a.mesh_samples, 100 * n)?;
    let out = out_path(&mut s, "out", &a.out)?;
    let report_path = out_path(&mut s, "report", &a.report)?;
    let echo = finish(s, verbose)?;
    check_n(n, d)?;
    if pool_factor == 0 || mesh_samples == 0 {
        return Err(invalid("pool-factor and mesh-samples must be positive"));
    }

    let ps = generate_antipodal_quasiuniform::<f64>(d, n, seed, pool_factor)?;
    let report = certify_uniformity(&ps, mesh_samples, seed)?;
    let header: Vec<String> = (0..d.ambient()).map(|i| format!("x{i}")).collect();
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    let rows = ps.iter().map(|p| p.iter().map(|&x| num(x)).collect());
    emit(out.as_deref(), &csv(FORMAT_VERSION, &echo, &header, rows))?;
    let text = json(FORMAT_VERSION, &echo, json!({ "uniformity": report }))?;
    match (&report_path, &out) {
        (Some(p), _) => emit(Some(p), &text),
        (None, Some(_)) => emit(None, &text),
        (None, None) => {
            eprint!("{text}");
            Ok(())
        }
    }
}

fn qmat(a: &crate::QmatArgs, config: Option<&Path>, verbose: bool) -> Result<(), CliError> {
    let mut s = Settings::new("qmat", config)?;
    let d = sphere(s.get("d", a.d, 2)?)?;
    let k = ActivationOrder::new(s.get("k", a.k, 1)?);
    let n = s.require("n", a.n)?;
    let seed = s.get("seed", a.seed, 1)?;
    let q_min = s.get("q_min", a.q_min, 3)?;
    let q_max = s.get("q_max", a.q_max, 9)?;
    let out = out_path(&mut s, "out", &a.out)?;
    let dump = out_path(&mut s, "dump_dir", &a.dump_dir)?;
    let echo = finish(s, verbose)?;
    check_n(n, d)?;
    check_level("q-max", q_max)?;
    if q_min > q_max {
        return Err(invalid(format!("q-min ({q_min}) must not exceed q-max ({q_max})")));
    }
    if let Some(dir) = &dump {
        std::fs::create_dir_all(dir)?;
    }

    let ps = generate_antipodal_quasiuniform::<f64>(d, n, seed, DEFAULT_POOL_FACTOR)?;
    let report = certify_uniformity(&ps, 100 * n, seed)?;
    let mut certs = Vec::new();
    for q in q_min..=q_max {
        let block = assemble_dyadic_block(&ps, q, k);
        certs.push(certify_dominance(&block)?);
        if let Some(dir) = &dump {
            let header: Vec<String> = (0..n).map(|j| format!("c{j}")).collect();
            let header: Vec<&str> = header.iter().map(String::as_str).collect();
            let mut block_echo = echo.clone();
            block_echo.push(("block_q".into(), q.to_string()));
            let rows = (0..n).map(|i| block.matrix.row(i).iter().map(|&x| num(x)).collect());
            emit(Some(&dir.join(format!("q{q}.csv"))), &csv(FORMAT_VERSION, &block_echo, &header, rows))?;
        }
    }
    let q_star = certs.iter().find(|c| c.dominant).map(|c| c.q);
    let text = json(
        FORMAT_VERSION,
        &echo,
        json!({ "n": n, "separation": report.separation, "q_star": q_star, "certificates": certs }),
    )?;
    emit(out.as_deref(), &text)
}

fn localize(a: &crate::LocalizeArgs, config: Option<&Path>, verbose: bool) -> Result<(), CliError> {
    let mut s = Settings::new("localize", config)?;
    let q = s.get("q", a.q, 8)?;
    let d = sphere(s.get("d", a.d, 2)?)?;
    let k = ActivationOrder::new(s.get("k", a.k, 1)?);
    let grid_size = s.get("grid_size", a.grid_size, 4096)?;
    let out = out_path(&mut s, "out", &a.out)?;
    let mut echo = finish(s, verbose)?;
    check_level("q", q)?;
    if grid_size < 16 {
        return Err(invalid("grid-size must be ≥ 16"));
    }

    let profile = localization_profile::<f64>(q, d, k, &uniform_grid(grid_size))?;
    let fit = fit_localization(q, d, k, &profile).ok();
    match &fit {
        Some(f) => {
            echo.push(("fit_slope".into(), num(f.slope)));
            echo.push(("fit_slope_stderr".into(), num(f.slope_stderr)));
            echo.push(("equator_ratio".into(), num(f.equator_ratio)));
        }
        None => eprintln!("satlab: fit window too small at q = {q}; envelope column is nan"),
    }
    let scale = 2f64.powi(q as i32);
    let rows = profile.iter().map(|&(theta, v)| {
        let env = fit
            .as_ref()
            .map_or(f64::NAN, |f| f.amplitude * f.diag * (1.0 + scale * theta.sin()).powf(f.slope));
        vec![num(theta), num(v), num(env)]
    });
    emit(out.as_deref(), &csv(FORMAT_VERSION, &echo, &["theta", "abs_lq", "envelope_fit"], rows))
}

fn approx(a: &crate::ApproxArgs, config: Option<&Path>, verbose: bool) -> Result<(), CliError> {
    let mut s = Settings::new("approx", config)?;
    let d = sphere(s.get("d", a.d, 2)?)?;
    let k = ActivationOrder::new(s.get("k", a.k, 1)?);
    let r = s.require("r", a.r)?;
    let n = s.require("n", a.n)?;
    let seed = s.get("seed", a.seed, 1)?;
    let rcond = s.get("rcond", a.rcond, satlab::approximation::DEFAULT_RCOND)?;
    let restrict = s.get("restrict_index_set", a.restrict_index_set, true)?;
    let target_degree = s.get("target_degree", a.target_degree, satlab::approximation::DEFAULT_TARGET_DEGREE)?;
    let out = out_path(&mut s, "out", &a.out)?;
    let echo = finish(s, verbose)?;
    check_n(n, d)?;
    check_r(r)?;
    check_rcond(rcond)?;
    check_target_degree(target_degree, k)?;

    let mut cfg = RateConfig::new(d, k, r, vec![n]);
    cfg.rcond = rcond;
    cfg.restrict = restrict;
    cfg.target_degree = target_degree;
    let rec = run_single(&cfg, n, seed)?;
    let lb = &rec.lower_bound;
    let text = json(
        FORMAT_VERSION,
        &echo,
        json!({
            "n": rec.n,
            "error": rec.error,
            "norm_f": rec.norm_f,
            "dropped_modes": rec.dropped_modes,
            "low_energy": lb.low_energy,
            "high_energy": lb.high_energy,
            "q_kappa_quadform": lb.q_kappa_quadform,
            "kappa": rec.kappa,
            "separation": rec.separation,
            "lower_bound": lb,
            "notes": rec.notes,
        }),
    )?;
    emit(out.as_deref(), &text)?;
    if rec.ill_conditioned {
        return Err(CliError::Numerical(format!("Gram matrix ill-conditioned: {} of {n} modes dropped", rec.dropped_modes)));
    }
    Ok(())
}

fn n_list(n_min: usize, n_max: usize, factor: usize) -> Result<Vec<usize>, CliError> {
    if factor < 2 {
        return Err(invalid("n-factor must be ≥ 2"));
    }
    if n_max < n_min {
        return Err(invalid(format!("n-max ({n_max}) must be ≥ n-min ({n_min})")));
    }
    let mut v = Vec::new();
    let mut n = n_min;
    while n <= n_max {
        v.push(n);
        n = n.checked_mul(factor).ok_or_else(|| invalid("n range overflows"))?;
    }
    Ok(v)
}

fn rate(a: &crate::RateArgs, config: Option<&Path>, verbose: bool) -> Result<(), CliError> {
    let mut s = Settings::new("rate", config)?;
    let d = sphere(s.get("d", a.d, 2)?)?;
    let k = ActivationOrder::new(s.get("k", a.k, 1)?);
    let r = s.require("r", a.r)?;
    let n_min = s.get("n_min", a.n_min, 32)?;
    let n_max = s.get("n_max", a.n_max, 1024)?;
    let n_factor = s.get("n_factor", a.n_factor, 2)?;
    let seeds = s.get("seeds", a.seeds, 1)?;
    let restrict = s.get("restrict_index_set", a.restrict_index_set, true)?;
    let fit_skip = s.get("fit_skip", a.fit_skip, 2)?;
    let rcond = s.get("rcond", a.rcond, satlab::approximation::DEFAULT_RCOND)?;
    let target_degree = s.get("target_degree", a.target_degree, satlab::approximation::DEFAULT_TARGET_DEGREE)?;
    let out = out_path(&mut s, "out", &a.out)?;
    let json_path = out_path(&mut s, "json", &a.json)?;
    let echo = finish(s, verbose)?;
    check_n(n_min, d)?;
    check_r(r)?;
    check_rcond(rcond)?;
    check_target_degree(target_degree, k)?;
    if seeds == 0 {
        return Err(invalid("seeds must be ≥ 1"));
    }

    let mut cfg = RateConfig::new(d, k, r, n_list(n_min, n_max, n_factor)?);
    cfg.seeds = (1..=seeds).collect();
    cfg.restrict = restrict;
    cfg.fit_skip = fit_skip;
    cfg.rcond = rcond;
    cfg.target_degree = target_degree;
    let report = run_rate_sweep(&cfg)?;
    emit(out.as_deref(), &report.to_csv(&echo))?;
    if let Some(p) = &json_path {
        emit(Some(p), &json(RATE_FORMAT_VERSION, &echo, json!({ "report": report }))?)?;
    }
    if verbose {
        if let Some(f) = &report.fit {
            eprintln!("slope {:.4} ± {:.4}", f.slope, f.stderr);
        }
        for note in &report.notes {
            eprintln!("note: {note}");
        }
    }
    let failed: Vec<String> = report.rows.iter().flat_map(|r| r.failures.iter().map(move |f| format!("n = {}: {f}", r.n))).collect();
    if !failed.is_empty() {
        return Err(CliError::Numerical(failed.join("; ")));
    }
    if let Some(run) = report.runs.iter().find(|r| r.ill_conditioned) {
        return Err(CliError::Numerical(format!("Gram matrix ill-conditioned at n = {}, seed {}", run.n, run.seed)));
    }
    Ok(())
}

fn verify(a: &crate::VerifyArgs, config: Option<&Path>, verbose: bool) -> Result<(), CliError> {
    let mut s = Settings::new("verify", config)?;
    let suite = s.get("suite", a.suite.clone(), "all".to_string())?;
    finish(s, verbose)?;
    if suite != "all" && !SUITES.contains(&suite.as_str()) {
        return Err(invalid(format!("unknown suite '{suite}'; expected all or one of {}", SUITES.join(", "))));
    }
    let results = run_suite(&suite)?;
    let width = results.iter().map(|r| r.suite.len() + r.name.len() + 2).max().unwrap_or(0);
    let mut failed = 0;
    for r in &results {
        let label = format!("{}: {}", r.suite, r.name);
        let tag = if r.passed { "PASS" } else { "FAIL" };
        failed += usize::from(!r.passed);
        println!("{label:<width$}  {tag}  {}", r.detail);
    }
    println!("{} of {} checks passed", results.len() - failed, results.len());
    if failed > 0 {
        return Err(CliError::Numerical(format!("{failed} invariant checks failed")));
    }
    Ok(())
}
