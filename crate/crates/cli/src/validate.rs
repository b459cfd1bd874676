use std::f64::consts::{FRAC_PI_4, PI};

use clap::ValueEnum;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::Serialize;

use rindler_core::core_math::quadrature::panels;
use rindler_core::core_math::{hk_residual, integrate_over, psi_closed, psi_quadrature, PsiParams};
use rindler_core::freefield::{
    rindler_autocorr, rindler_autocorr_regularized, rindler_wigner, rindler_wigner_planck, rindler_wigner_regularized,
    windowed_from_autocorr,
};
use rindler_core::grid::linspace;
use rindler_core::mirror::{abc_coefficients, correction_r, mirror_autocorr};
use rindler_core::montecarlo::estimate_wigner;
use rindler_core::trajectories::{proper_time_defect, stationarity_defect};
use rindler_core::{EstimatorConfig, MirrorScene, QuadratureConfig, SourceSpectrum, TrajectorySpec};

use crate::config::RunConfig;
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    PsiOracle,
    FourierConsistency,
    Hk,
    Stationarity,
    MontecarloPlanck,
    MirrorOracle,
}

#[derive(Debug, Clone, Serialize)]
struct Check {
    name: String,
    value: f64,
    /// "<=", ">=" or "in".
    relation: &'static str,
    threshold: Vec<f64>,
    pass: bool,
}

fn at_most(name: impl Into<String>, value: f64, limit: f64) -> Check {
    Check { name: name.into(), value, relation: "<=", threshold: vec![limit], pass: value <= limit }
}

fn at_least(name: impl Into<String>, value: f64, limit: f64) -> Check {
    Check { name: name.into(), value, relation: ">=", threshold: vec![limit], pass: value >= limit }
}

fn within(name: impl Into<String>, value: f64, lo: f64, hi: f64) -> Check {
    Check { name: name.into(), value, relation: "in", threshold: vec![lo, hi], pass: (lo..=hi).contains(&value) }
}

#[derive(Serialize)]
struct Report {
    suite: Suite,
    pass: bool,
    checks: Vec<Check>,
}

fn rel(x: f64, y: f64) -> f64 {
    (x - y).abs() / y.abs()
}

pub fn run(suite: Suite, cfg: &RunConfig, write_file: bool) -> Result<(), CliError> {
    let checks = match suite {
        Suite::PsiOracle => psi_oracle(cfg.estimator.seed)?,
        Suite::FourierConsistency => fourier_consistency()?,
        Suite::Hk => hk(cfg.estimator.seed)?,
        Suite::Stationarity => stationarity()?,
        Suite::MontecarloPlanck => montecarlo_planck(cfg)?,
        Suite::MirrorOracle => mirror_oracle()?,
    };
    let report = Report { suite, pass: checks.iter().all(|c| c.pass), checks };
    eprintln!("{:<48} {:>12} {:>5} {:>22}  result", "check", "value", "", "threshold");
    for c in &report.checks {
        let t = c.threshold.iter().map(|x| format!("{x:e}")).collect::<Vec<_>>().join(", ");
        eprintln!("{:<48} {:>12.4e} {:>5} {:>22}  {}", c.name, c.value, c.relation, t, if c.pass { "PASS" } else { "FAIL" });
    }
    let text = serde_json::to_string_pretty(&report).map_err(|e| CliError::Config(e.to_string()))?;
    crate::emit(&text);
    if write_file {
        std::fs::create_dir_all(&cfg.output.directory)?;
        let name = format!("{}_validate_{}.json", cfg.output.prefix, suite.to_possible_value().unwrap().get_name());
        std::fs::write(cfg.output.directory.join(name), text + "\n")?;
    }
    if report.pass {
        Ok(())
    } else {
        let failed: Vec<&str> = report.checks.iter().filter(|c| !c.pass).map(|c| c.name.as_str()).collect();
        Err(CliError::Failed(failed.join(", ")))
    }
}

/// 220 tuples stratified over the closed-form branches and the sign of b.
fn psi_oracle(seed: u64) -> Result<Vec<Check>, CliError> {
    let q = QuadratureConfig::with_tolerance(1e-14, 1e-12);
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let per = 44;
    let mut worst = 0.0f64;
    let mut worst_imag = 0.0f64;
    for stratum in 0..5 {
        for k in 0..per {
            let v = 0.1 + 5.9 * (k as f64 + rng.random::<f64>()) / per as f64;
            let c = -1.0 - 5.0 * rng.random::<f64>();
            let a = if stratum < 2 { 0.0 } else { 0.02 + 0.93 * rng.random::<f64>() };
            let mag = (-c - a) * (0.05 + 0.9 * rng.random::<f64>());
            let b = match stratum {
                0 | 2 => -mag,
                1 | 3 => mag,
                _ => 0.0,
            };
            let p = PsiParams::new(a, b, c)?;
            let quad = psi_quadrature(v, &p, &q)?;
            worst = worst.max(rel(psi_closed(v, &p)?.value(), quad.value));
            worst_imag = worst_imag.max(quad.imag.abs());
        }
    }
    Ok(vec![
        at_most("max relative error over 220 tuples", worst, 1e-7),
        at_most("max |imaginary part| of quadrature", worst_imag, 1e-9),
    ])
}

/// 2∫₀^∞ C_ε(0, τ′) cos(ντ′) dτ′ with breakpoints at the ε scale.
fn regularized_transform(eps: f64, nu: f64, q: &QuadratureConfig) -> Result<f64, CliError> {
    let c = |x: f64| rindler_autocorr_regularized(1.0, 1.0, eps, 0.0, x, 1.0).unwrap_or(f64::NAN) * (nu * x).cos();
    let mut pts = vec![0.0];
    let mut x = 0.1 * eps;
    while x < 1.0 {
        pts.push(x);
        x *= 2.0;
    }
    pts.extend(panels(1.0, 60.0, (PI / nu).min(1.0)));
    Ok(2.0 * integrate_over(c, &pts, q)?.value)
}

fn fourier_consistency() -> Result<Vec<Check>, CliError> {
    let q = QuadratureConfig::default();
    let eps = 1e-3;
    let (mut vs_reg, mut vs_planck) = (0.0f64, 0.0f64);
    for nu in linspace(0.1, 5.0, 50) {
        let num = regularized_transform(eps, nu, &q)?;
        vs_reg = vs_reg.max(rel(num, rindler_wigner_regularized(1.0, 1.0, eps, 0.0, nu, 1.0)?));
        vs_planck = vs_planck.max(rel(num, rindler_wigner(1.0, 1.0, nu, 1.0)));
    }
    let mut forms = 0.0f64;
    for k in 0..=200 {
        let nu = 1e-3 * 2e4f64.powf(k as f64 / 200.0);
        forms = forms.max(rel(rindler_wigner(1.0, 1.0, nu, 1.0), rindler_wigner_planck(1.0, 1.0, nu, 1.0)));
    }
    Ok(vec![
        at_most("transform (eps=1e-3) vs regularized form", vs_reg, 1e-8),
        at_most("transform (eps=1e-3) vs Planck form", vs_planck, 1e-4),
        at_most("tanh form vs Planck form", forms, 1e-12),
    ])
}

fn hk(seed: u64) -> Result<Vec<Check>, CliError> {
    let x1 = [0.3, -0.2, 0.1];
    let x2 = [0.9, 0.6, 0.1];
    let sizes = [25.0, 50.0, 100.0, 200.0];
    let mut res = Vec::new();
    for &l in &sizes {
        res.push(hk_residual(2.0 * PI, &x1, &x2, l, 100_000, 1.0, seed)?);
    }
    let xs: Vec<f64> = sizes.iter().map(|s| s.ln()).collect();
    let ys: Vec<f64> = res.iter().map(|r| r.ln()).collect();
    let (mx, my) = (xs.iter().sum::<f64>() / 4.0, ys.iter().sum::<f64>() / 4.0);
    let slope = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum::<f64>()
        / xs.iter().map(|x| (x - mx).powi(2)).sum::<f64>();
    Ok(vec![
        at_most("residual at L = 200 |x1 - x2|", res[3], 2e-2),
        within("log-log slope over L = 25..200", slope, -1.4, -0.6),
    ])
}

fn stationarity() -> Result<Vec<Check>, CliError> {
    let taus = linspace(-3.0, 3.0, 61);
    let lags = linspace(0.05, 4.0, 80);
    let cases = [
        ("rindler", TrajectorySpec::Rindler { xi: 1.0 }),
        ("circular", TrajectorySpec::Circular { gamma: 1.4, p: 2.0 }),
        ("helicoid_constant", TrajectorySpec::HelicoidConstant { gamma: 1.3, p: 1.5, alpha_mix: 0.6 }),
        ("helicoid_accelerated", TrajectorySpec::HelicoidAccelerated { a: 0.5, xi: 1.0, p: 3.0 }),
        ("inertial", TrajectorySpec::Inertial { v: 0.6 }),
        ("stationary", TrajectorySpec::Stationary { position: [0.3, -1.0, 2.0] }),
    ];
    let mut checks = Vec::new();
    let mut pt = 0.0f64;
    for (name, spec) in &cases {
        checks.push(at_most(format!("stationarity defect: {name}"), stationarity_defect(spec, &taus, &lags, 1.0)?, 1e-10));
        pt = pt.max(proper_time_defect(spec, &taus, 1.0)?);
    }
    pt = pt.max(proper_time_defect(&TrajectorySpec::ObliqueRindler { xi: 1.0, xi0: 0.4, alpha: 0.7 }, &taus, 1.0)?);
    let control = stationarity_defect(&TrajectorySpec::TestQuadratic { beta: 0.3 }, &taus, &lags, 1.0)?;
    checks.push(at_least("stationarity defect: quadratic control", control, 1e-3));
    checks.push(at_most("proper-time defect (all analytic variants)", pt, 1e-8));
    Ok(checks)
}

/// Windowed Monte-Carlo spectrum of a Rindler observer against the windowed
/// regularized Planck form; N, M, seed and window come from the config.
fn montecarlo_planck(cfg: &RunConfig) -> Result<Vec<Check>, CliError> {
    let eps = if cfg.spectrum.eps > 0.0 { cfg.spectrum.eps } else { 0.05 };
    let s = SourceSpectrum::lorentz_invariant(cfg.spectrum.f0, eps)?;
    let window = cfg.window();
    let taus = vec![-1.0, 0.0, 1.0];
    let omegas = linspace(0.5, 3.0, 11);
    let est_cfg = EstimatorConfig {
        realizations: cfg.estimator.m,
        taus: taus.clone(),
        tau_primes: (-240..=240).map(|k| 0.025 * k as f64).collect(),
        omegas: omegas.clone(),
        window,
        seed: cfg.estimator.seed,
    };
    let est = estimate_wigner(&s, &TrajectorySpec::Rindler { xi: 1.0 }, &est_cfg, cfg.estimator.n, false, 1.0)?;
    let q = QuadratureConfig::default();
    let (mut inside, mut total, mut flat) = (0, 0, 0.0f64);
    for (i, &tau) in taus.iter().enumerate() {
        for (j, &om) in omegas.iter().enumerate() {
            let c = |t: f64| rindler_autocorr_regularized(1.0, s.f0, eps, tau, t, 1.0).unwrap_or(f64::NAN);
            let target = windowed_from_autocorr(&c, &window, om, eps, &q)?;
            inside += usize::from((est.mean.get(i, j) - target).abs() <= 3.0 * est.stderr.get(i, j));
            total += 1;
            if tau != est.reference_tau {
                flat = flat.max(est.flat_diff.get(i, j).abs() / est.flat_stderr.get(i, j));
            }
        }
    }
    Ok(vec![
        at_least("fraction of points within 3 SE", inside as f64 / total as f64, 0.95),
        at_most("max tau-flatness deviation in SE", flat, 3.0),
    ])
}

/// W₀ + 2∫₀^∞ [C_mirror − C_free] cos(ντ′) dτ′ with principal values at the
/// image light-cone crossings.
fn mirror_transform(s: &MirrorScene, eta: f64, nu: f64, q: &QuadratureConfig) -> Result<f64, CliError> {
    let image = |x: f64| {
        let m = mirror_autocorr(s, 1.0, eta, x).unwrap_or(f64::NAN);
        (m - rindler_autocorr(1.0, 1.0, x, 1.0).unwrap_or(f64::NAN)) * (nu * x).cos()
    };
    let abc = abc_coefficients(s, eta)?;
    let roots = if abc.a > 0.0 {
        let disc = (abc.b * abc.b - 4.0 * abc.a * abc.c).sqrt();
        vec![(-abc.b + disc) / (2.0 * abc.a), (-abc.b - disc) / (2.0 * abc.a)]
    } else {
        vec![-abc.c / abc.b]
    };
    let mut poles: Vec<f64> = roots.into_iter().filter(|r| *r > 1.0).map(|r| 2.0 * r.acosh()).collect();
    poles.sort_by(f64::total_cmp);
    let width = (PI / nu).min(1.0);
    let mut total = 0.0;
    let mut start = 1e-9;
    for &x0 in &poles {
        let d = 0.5 * (x0 - start).min(1.0);
        total += integrate_over(image, &panels(start, x0 - d, width), q)?.value;
        total += integrate_over(|t| image(x0 + t) + image(x0 - t), &[0.0, d], q)?.value;
        start = x0 + d;
    }
    total += integrate_over(image, &panels(start, 120.0, width), q)?.value;
    Ok(rindler_wigner(1.0, 1.0, nu, 1.0) + 2.0 * total)
}

fn mirror_oracle() -> Result<Vec<Check>, CliError> {
    let q = QuadratureConfig::default();
    let mut worst = 0.0f64;
    let mut points = 0;
    for &alpha in &[0.0, FRAC_PI_4, 1.2] {
        for &a0 in &[-0.9, -0.5, 0.3, 2.0] {
            let Ok(s) = MirrorScene::normalized(alpha, a0) else { continue };
            for &eta in &[-1.0, 0.0, 1.0] {
                for &nu in &[0.1, 0.5, 1.0, 2.0, 3.0] {
                    let w0 = rindler_wigner(1.0, 1.0, nu, 1.0);
                    let r = correction_r(&s, eta, nu)?.value;
                    worst = worst.max((w0 * (1.0 - r) - mirror_transform(&s, eta, nu, &q)?).abs() / w0);
                    points += 1;
                }
            }
        }
    }
    Ok(vec![
        at_most("max |W0(1-R) - transform| / W0", worst, 1e-3),
        at_least("admissible points checked", points as f64, 1.0),
    ])
}
