//! Fast invariant suites, one per module, for self-checks from the command line.

use serde::Serialize;

use crate::activation::{build_table, coeff_closed_form, coeff_quadrature, index_set_member, xi_eval, ActivationOrder};
use crate::approximation::{
    antipodal_reconstruction, assemble_gram, best_approx_error, default_center, make_sobolev_target, power_target,
    residual_norm, sphere_nodes, GramKernel,
};
use crate::cutoff::{partition_check, zeta_eval, BlockSymbol};
use crate::error::{Error, Result};
use crate::kernel::{assemble_dyadic_block, certify_dominance, fit_localization, localization_profile, uniform_grid};
use crate::linalg::symmetric_eigenvalues;
use crate::points::{certify_uniformity, generate_antipodal_quasiuniform, kappa_threshold};
use crate::polynomials::{gauss_rule, harmonic_dim, legendre_eval, legendre_norm_sq, poly_space_dim, SphereDim};

pub const SUITES: [&str; 6] = ["polynomials", "activation", "cutoff", "points", "kernel", "approximation"];

#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub suite: String,
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

fn check(suite: &str, name: &str, passed: bool, detail: String) -> CheckResult {
    CheckResult { suite: suite.into(), name: name.into(), passed, detail }
}

fn dim(d: usize) -> SphereDim {
    SphereDim::new(d).expect("d >= 2")
}

/// Runs one suite by name, or every suite for `"all"`.
pub fn run_suite(name: &str) -> Result<Vec<CheckResult>> {
    match name {
        "all" => {
            let mut out = Vec::new();
            for s in SUITES {
                out.extend(run_suite(s)?);
            }
            Ok(out)
        }
        "polynomials" => polynomials(),
        "activation" => activation(),
        "cutoff" => cutoff(),
        "points" => points(),
        "kernel" => kernel(),
        "approximation" => approximation(),
        other => Err(Error::InvalidParameter(format!("unknown suite '{other}'"))),
    }
}

fn polynomials() -> Result<Vec<CheckResult>> {
    const S: &str = "polynomials";
    let mut out = Vec::new();
    let mut worst = 0.0f64;
    for d in 2..6 {
        for m in 0..200 {
            let v: f64 = legendre_eval(dim(d), m, 1.0)?;
            let n = harmonic_dim(dim(d), m)? as f64;
            worst = worst.max((v - n).abs() / n);
        }
    }
    out.push(check(S, "value at one equals N(m)", worst <= 1e-10, format!("max rel {worst:.2e}")));

    let mut ok = true;
    for d in 2..6 {
        let mut acc = 0;
        for m in 0..=100 {
            acc += harmonic_dim(dim(d), m)?;
            ok &= poly_space_dim(dim(d), m)? == acc;
        }
    }
    out.push(check(S, "telescoping dimension", ok, "m <= 100, d = 2..5".into()));

    let mut worst = 0.0f64;
    for d in [2usize, 3, 4] {
        let q = gauss_rule::<f64>(dim(d), 64)?;
        for m in 0..=60usize {
            for j in 0..m {
                let ip = q.integrate(|t| legendre_eval(dim(d), m, t).unwrap() * legendre_eval(dim(d), j, t).unwrap());
                let s = (legendre_norm_sq::<f64>(dim(d), m) * legendre_norm_sq::<f64>(dim(d), j)).sqrt();
                worst = worst.max(ip.abs() / s);
            }
        }
    }
    out.push(check(S, "orthogonality", worst <= 1e-10, format!("max rel {worst:.2e}")));
    Ok(out)
}

fn activation() -> Result<Vec<CheckResult>> {
    const S: &str = "activation";
    let mut out = Vec::new();
    let mut worst = 0.0f64;
    let mut worst_xi = 0.0f64;
    let mut signs = true;
    for d in 2..=4 {
        for k in 0..=2 {
            let k = ActivationOrder::new(k);
            for m in (k.get() + 1..=60).filter(|&m| index_set_member(k, m)) {
                let c: f64 = coeff_closed_form(dim(d), k, m)?;
                let q: f64 = coeff_quadrature(dim(d), k, m);
                worst = worst.max((c - q).abs() / q.abs());
                let x: f64 = xi_eval(dim(d), k, m as f64)?;
                worst_xi = worst_xi.max((x - c * c).abs() / (c * c));
                let want = if ((m - k.get() - 1) / 2) % 2 == 0 { 1.0 } else { -1.0 };
                signs &= c.signum() == want;
            }
        }
    }
    out.push(check(S, "closed form vs quadrature", worst <= 1e-8, format!("max rel {worst:.2e}")));
    out.push(check(S, "xi identity", worst_xi <= 1e-10, format!("max rel {worst_xi:.2e}")));
    out.push(check(S, "sign pattern", signs, String::new()));
    let t = build_table::<f64>(dim(2), ActivationOrder::new(1), 512)?;
    let ratio = t.tail / t.trace();
    out.push(check(S, "trace tail", ratio < 1e-6, format!("tail/trace {ratio:.2e}")));
    Ok(out)
}

fn cutoff() -> Result<Vec<CheckResult>> {
    const S: &str = "cutoff";
    let mut out = Vec::new();
    let mut worst = 0.0f64;
    for m in 1..=10_000u64 {
        worst = worst.max((partition_check::<f64>(m, 40)? - 1.0).abs());
    }
    out.push(check(S, "partition of unity", worst <= 1e-12, format!("max dev {worst:.2e}")));
    let mut ok = true;
    for i in 0..=2000 {
        let t = 0.5 + 0.5 * i as f64 / 2000.0;
        ok &= (zeta_eval(t) + zeta_eval(2.0 * t) - 1.0).abs() <= 1e-14;
    }
    out.push(check(S, "two-scale identity", ok, String::new()));
    let d = dim(2);
    let mut worst = 0.0f64;
    for k in 0..3 {
        let k = ActivationOrder::new(k);
        for j in (k.get() + 1..3000).filter(|j| j % 2 == k.parity_offset()) {
            let s: f64 = (0..14).map(|q| BlockSymbol::new(q, d, k).degree_weight::<f64>(j)).sum();
            let x: f64 = xi_eval(d, k, j as f64)?;
            worst = worst.max((s - x).abs() / x);
        }
    }
    out.push(check(S, "dyadic consistency", worst <= 1e-12, format!("max rel {worst:.2e}")));
    Ok(out)
}

fn points() -> Result<Vec<CheckResult>> {
    const S: &str = "points";
    let mut out = Vec::new();
    let a = generate_antipodal_quasiuniform::<f64>(dim(2), 256, 1, 50)?;
    let b = generate_antipodal_quasiuniform::<f64>(dim(2), 256, 1, 50)?;
    out.push(check(S, "determinism", a == b, String::new()));
    let r = certify_uniformity(&a, 25_600, 1)?;
    out.push(check(
        S,
        "ordering and mesh ratio",
        r.separation > 0.0 && r.separation <= r.separation_geo && r.mesh_ratio <= 4.0,
        format!("h = {:.4}, mesh ratio {:.3}", r.separation, r.mesh_ratio),
    ));
    let closed = a.prefix(8).antipodal_closure();
    let rc = certify_uniformity(&closed, 1600, 1)?;
    out.push(check(
        S,
        "antipodal degeneracy detected",
        rc.separation == 0.0 && kappa_threshold(&rc, 4.0).is_err(),
        String::new(),
    ));
    Ok(out)
}

fn kernel() -> Result<Vec<CheckResult>> {
    const S: &str = "kernel";
    let mut out = Vec::new();
    let ps = generate_antipodal_quasiuniform::<f64>(dim(2), 100, 1, 50)?;
    let mut gersh = true;
    let mut psd = true;
    for q in 3..9 {
        let c = certify_dominance(&assemble_dyadic_block(&ps, q, ActivationOrder::new(1)))?;
        gersh &= c.gershgorin_consistent;
    }
    for m in [1usize, 4, 9] {
        let p = crate::kernel::assemble_degree_block(&ps, m);
        let l = symmetric_eigenvalues(&p.matrix)?[0];
        psd &= l >= -1e-8 * harmonic_dim(dim(2), m)? as f64;
    }
    out.push(check(S, "Gershgorin consistency", gersh, "q = 3..8".into()));
    out.push(check(S, "degree blocks PSD", psd, String::new()));
    let k = ActivationOrder::new(1);
    let prof = localization_profile(8, dim(2), k, &uniform_grid(4096))?;
    let fit = fit_localization(8, dim(2), k, &prof)?;
    out.push(check(
        S,
        "localization envelope",
        fit.equator_ratio <= 1e-3 && fit.slope <= -2.0,
        format!("ratio {:.2e}, slope {:.2}", fit.equator_ratio, fit.slope),
    ));
    Ok(out)
}

fn approximation() -> Result<Vec<CheckResult>> {
    const S: &str = "approximation";
    let mut out = Vec::new();
    let d = dim(2);
    let k = ActivationOrder::new(1);
    let ps = generate_antipodal_quasiuniform::<f64>(d, 64, 1, 50)?;
    let table = build_table::<f64>(d, k, 512)?;
    let t = make_sobolev_target(d, k, 3.5, 512, default_center(d), true)?;
    let sys = assemble_gram(&ps, &table, &t, GramKernel::Exact)?;
    let sol = best_approx_error(&sys, 1e-12)?;
    let ratio = sol.projection / sys.norm_sq_f;
    out.push(check(S, "projection bounded by norm", (0.0..=1.0 + 1e-10).contains(&ratio), format!("ratio {ratio:.6}")));
    let closed = ps.prefix(12).antipodal_closure();
    let mut worst = 0.0f64;
    for kk in 0..3 {
        let k = ActivationOrder::new(kk);
        let target = power_target(d, k, closed.point(0).to_vec())?;
        let a = antipodal_reconstruction::<f64>(closed.len(), 0, k);
        let r = residual_norm(&target, &closed, k, &a, &sphere_nodes(d, 40, 1));
        worst = worst.max(r / target.norm_sq().sqrt());
    }
    out.push(check(S, "antipodal reconstruction", worst <= 1e-10, format!("max rel {worst:.2e}")));
    Ok(out)
}
