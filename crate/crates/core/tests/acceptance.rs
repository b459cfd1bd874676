//! End-to-end acceptance run: one PASS/FAIL line per criterion.
//!
//! Oracles are computed here from first principles (direct quadrature,
//! published limits) and compared against the library.

use std::f64::consts::{FRAC_PI_4, PI};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};

use rindler_core::core_math::quadrature::panels;
use rindler_core::core_math::{hk_residual, integrate_over, psi_closed, psi_quadrature, PsiParams};
use rindler_core::freefield::{
    circular_w_gamma, inertial_wigner, inertial_wigner_quadrature, rindler_autocorr, rindler_autocorr_regularized,
    rindler_wigner, rindler_wigner_planck, rindler_wigner_regularized, windowed_wigner, CircularMode,
};
use rindler_core::grid::linspace;
use rindler_core::localize::fit_scene;
use rindler_core::mirror::{abc_coefficients, correction_grid, correction_r, mirror_autocorr, near_wall_limit};
use rindler_core::montecarlo::estimate_wigner;
use rindler_core::trajectories::{proper_time_defect, stationarity_defect};
use rindler_core::{
    EstimatorConfig, FitConfig, MirrorScene, QuadratureConfig, SourceSpectrum, TrajectorySpec, Window, WindowKind,
};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn rel(x: f64, y: f64) -> f64 {
    (x - y).abs() / y.abs()
}

fn main() {
    let suite: [(&str, fn() -> Outcome); 11] = [
        ("psi closed form vs quadrature", psi_oracle),
        ("planck spectrum from regularized autocorrelation", planck_transform),
        ("monte-carlo unruh spectrum", montecarlo_unruh),
        ("mirror correction vs transform of two-point function", mirror_master),
        ("near-wall limits", near_wall),
        ("circular small-gamma expansion", circular_small_gamma),
        ("stationarity suite", stationarity),
        ("helmholtz-kirchhoff identity", helmholtz_kirchhoff),
        ("inverse localization", localization),
        ("inertial invariance of |omega| spectra", inertial_invariance),
        ("wall through the horizon apex", rovelli_scene),
    ];
    // Optional criterion numbers on the command line select a subset.
    let only: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = 0;
    let mut ran = 0;
    for (i, (name, run)) in suite.iter().enumerate() {
        if !only.is_empty() && !only.contains(&(i + 1)) {
            continue;
        }
        ran += 1;
        let t = Instant::now();
        let o = run();
        let tag = if o.pass { "PASS" } else { "FAIL" };
        println!("{tag} [{:>2}] {name}: {} ({:.1} s)", i + 1, o.detail, t.elapsed().as_secs_f64());
        failed += usize::from(!o.pass);
    }
    println!("acceptance: {}/{ran} criteria passed", ran - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}

/// Stratified over the three closed-form branches and both signs of b.
fn psi_oracle() -> Outcome {
    let t = Instant::now();
    let q = QuadratureConfig::with_tolerance(1e-14, 1e-12);
    let mut rng = ChaCha20Rng::seed_from_u64(11);
    let per = 44;
    let mut worst = (0.0f64, String::new());
    let mut count = 0;
    for stratum in 0..5 {
        for k in 0..per {
            let v = 0.1 + 5.9 * (k as f64 + rng.random::<f64>()) / per as f64;
            let c = -1.0 - 5.0 * rng.random::<f64>();
            let a = match stratum {
                0 | 1 => 0.0,
                _ => 0.02 + 0.93 * rng.random::<f64>(),
            };
            let room = -c - a;
            let mag = room * (0.05 + 0.9 * rng.random::<f64>());
            let b = match stratum {
                0 | 2 => -mag,
                1 | 3 => mag,
                _ => 0.0,
            };
            let p = PsiParams::new(a, b, c).unwrap();
            let closed = psi_closed(v, &p).unwrap().value();
            let quad = psi_quadrature(v, &p, &q).unwrap();
            let e = rel(closed, quad.value);
            if e > worst.0 {
                worst = (e, format!("v={v:.3} a={a:.3} b={b:.3} c={c:.3}"));
            }
            count += 1;
        }
    }
    let secs = t.elapsed().as_secs_f64();
    outcome(
        worst.0 <= 1e-7 && secs < 10.0 && count >= 200,
        format!("{count} tuples, max rel err {:.2e} at {}, {secs:.2} s", worst.0, worst.1),
    )
}

/// 2∫₀^∞ C_ε(0, τ′) cos(ντ′) dτ′ with breakpoints resolving the ε-wide peak.
fn regularized_transform(eps: f64, nu: f64, q: &QuadratureConfig) -> f64 {
    let c = |x: f64| rindler_autocorr_regularized(1.0, 1.0, eps, 0.0, x, 1.0).unwrap() * (nu * x).cos();
    let mut pts = vec![0.0];
    let mut x = 0.1 * eps;
    while x < 1.0 {
        pts.push(x);
        x *= 2.0;
    }
    let width = (PI / nu).min(1.0);
    pts.extend(panels(1.0, 60.0, width));
    2.0 * integrate_over(c, &pts, q).unwrap().value
}

fn planck_transform() -> Outcome {
    let q = QuadratureConfig::default();
    let eps = 1e-3;
    let mut worst_exact = (0.0f64, 0.0);
    let mut worst_reg = 0.0f64;
    for nu in linspace(0.1, 5.0, 50) {
        let num = regularized_transform(eps, nu, &q);
        let e = rel(num, rindler_wigner(1.0, 1.0, nu, 1.0));
        if e > worst_exact.0 {
            worst_exact = (e, nu);
        }
        worst_reg = worst_reg.max(rel(num, rindler_wigner_regularized(1.0, 1.0, eps, 0.0, nu, 1.0).unwrap()));
    }
    let mut worst_forms = 0.0f64;
    for k in 0..=200 {
        let nu = 1e-3 * 2e4f64.powf(k as f64 / 200.0);
        worst_forms = worst_forms.max(rel(rindler_wigner(1.0, 1.0, nu, 1.0), rindler_wigner_planck(1.0, 1.0, nu, 1.0)));
    }
    outcome(
        worst_exact.0 <= 1e-4 && worst_forms <= 1e-12,
        format!(
            "transform vs unregularized form max rel {:.2e} (at nu={:.2}); vs regularized form {:.2e}; printed forms {:.2e}",
            worst_exact.0, worst_exact.1, worst_reg, worst_forms
        ),
    )
}

fn montecarlo_unruh() -> Outcome {
    let eps = 0.05;
    let s = SourceSpectrum::lorentz_invariant(1.0, eps).unwrap();
    let window = Window::new(WindowKind::Gaussian, 1.5).unwrap();
    let taus = vec![-1.0, 0.0, 1.0];
    let omegas = linspace(0.5, 3.0, 11);
    let cfg = EstimatorConfig {
        realizations: 2000,
        taus: taus.clone(),
        tau_primes: (-240..=240).map(|k| 0.025 * k as f64).collect(),
        omegas: omegas.clone(),
        window,
        seed: 2718,
    };
    let t = Instant::now();
    let est = estimate_wigner(&s, &TrajectorySpec::Rindler { xi: 1.0 }, &cfg, 4096, false, 1.0).unwrap();
    let secs = t.elapsed().as_secs_f64();
    let q = QuadratureConfig::default();
    let (mut inside, mut total, mut flat_ok, mut flat_total) = (0, 0, 0, 0);
    let mut worst_z = 0.0f64;
    let mut worst_flat = 0.0f64;
    for (i, &tau) in taus.iter().enumerate() {
        let w = |om: f64| rindler_wigner_regularized(1.0, 1.0, eps, tau, om, 1.0).unwrap();
        let target = windowed_wigner(&w, &window, &omegas, &q).unwrap();
        for j in 0..omegas.len() {
            let z = (est.mean.get(i, j) - target[j]).abs() / est.stderr.get(i, j);
            worst_z = worst_z.max(z);
            inside += usize::from(z <= 3.0);
            total += 1;
            if tau != est.reference_tau {
                let zf = est.flat_diff.get(i, j).abs() / est.flat_stderr.get(i, j);
                worst_flat = worst_flat.max(zf);
                flat_ok += usize::from(zf <= 3.0);
                flat_total += 1;
            }
        }
    }
    let frac = inside as f64 / total as f64;
    outcome(
        frac >= 0.95 && flat_ok == flat_total && secs <= 600.0,
        format!(
            "{inside}/{total} within 3 SE (max {worst_z:.2} SE); flatness {flat_ok}/{flat_total} within 3 SE (max {worst_flat:.2}); estimator {secs:.0} s"
        ),
    )
}

/// W₀ + 2∫₀^∞ [C_mirror − C_free] cos(ντ′) dτ′; the image term has real poles
/// where the lag crosses the image light cone, integrated as principal values.
fn mirror_transform(s: &MirrorScene, eta: f64, nu: f64, q: &QuadratureConfig) -> f64 {
    let image = |x: f64| {
        (mirror_autocorr(s, 1.0, eta, x).unwrap() - rindler_autocorr(1.0, 1.0, x, 1.0).unwrap()) * (nu * x).cos()
    };
    // Poles: A ch² + B ch + C = 0 with ch = cosh(τ′/2) > 1.
    let abc = abc_coefficients(s, eta).unwrap();
    let roots = if abc.a > 0.0 {
        let disc = (abc.b * abc.b - 4.0 * abc.a * abc.c).sqrt();
        vec![(-abc.b + disc) / (2.0 * abc.a), (-abc.b - disc) / (2.0 * abc.a)]
    } else {
        vec![-abc.c / abc.b]
    };
    let mut poles: Vec<f64> = roots.into_iter().filter(|r| *r > 1.0).map(|r| 2.0 * r.acosh()).collect();
    poles.sort_by(f64::total_cmp);
    let width = (PI / nu).min(1.0);
    let lo = 1e-9;
    let mut total = 0.0;
    let mut start = lo;
    for &x0 in &poles {
        let d = 0.5 * (x0 - start).min(1.0);
        total += integrate_over(image, &panels(start, x0 - d, width), q).unwrap().value;
        total += integrate_over(|t| image(x0 + t) + image(x0 - t), &[0.0, d], q).unwrap().value;
        start = x0 + d;
    }
    total += integrate_over(image, &panels(start, 120.0, width), q).unwrap().value;
    rindler_wigner(1.0, 1.0, nu, 1.0) + 2.0 * total
}

fn mirror_master() -> Outcome {
    let q = QuadratureConfig::default();
    let (mut worst, mut at) = (0.0f64, String::new());
    let (mut checked, mut skipped) = (0, 0);
    for &alpha in &[0.0, FRAC_PI_4, 1.2] {
        for &a0 in &[-0.9, -0.5, 0.3, 2.0] {
            let Ok(s) = MirrorScene::normalized(alpha, a0) else {
                skipped += 1;
                continue;
            };
            for &eta in &[-1.0, 0.0, 1.0] {
                for &nu in &[0.1, 0.5, 1.0, 2.0, 3.0] {
                    let w0 = rindler_wigner(1.0, 1.0, nu, 1.0);
                    let r = correction_r(&s, eta, nu).unwrap().value;
                    let e = (w0 * (1.0 - r) - mirror_transform(&s, eta, nu, &q)).abs() / w0;
                    if e > worst {
                        worst = e;
                        at = format!("alpha={alpha:.3} a0={a0} eta={eta} nu={nu}");
                    }
                    checked += 1;
                }
            }
        }
    }
    outcome(
        worst <= 1e-3,
        format!("{checked} points, {skipped} inadmissible scenes skipped, max err/W0 {worst:.2e} at {at}"),
    )
}

fn near_wall() -> Outcome {
    let nus = linspace(0.0, 3.0, 31);
    let normal = MirrorScene::normalized(0.0, -0.999).unwrap();
    let mut worst_normal = 0.0f64;
    for &nu in &nus {
        let r = correction_r(&normal, 0.0, nu).unwrap().value;
        let limit = 1.0 - 0.5 / (PI * nu).cosh().powi(2);
        worst_normal = worst_normal.max(rel(r, limit));
    }
    let alpha = FRAC_PI_4;
    let oblique = MirrorScene::normalized(alpha, -alpha.cos() + 1e-4).unwrap();
    let mut worst_oblique = 0.0f64;
    for &nu in &nus {
        let r = correction_r(&oblique, 0.0, nu).unwrap().value;
        worst_oblique = worst_oblique.max(rel(r, near_wall_limit(alpha, nu).unwrap()));
    }
    outcome(
        worst_normal <= 1e-2 && worst_oblique <= 2e-2,
        format!("normal max rel {worst_normal:.2e}; oblique (pi/4) max rel {worst_oblique:.2e}; nu in [0, 3]"),
    )
}

fn circular_small_gamma() -> Outcome {
    let q = QuadratureConfig::default();
    let gamma = (1.0f64 + 1e-3).sqrt();
    let scale = circular_w_gamma(gamma, 0.0, CircularMode::SmallGamma, &q).unwrap();
    let mut worst = 0.0f64;
    for w in linspace(-0.9, 0.9, 37) {
        let num = circular_w_gamma(gamma, w, CircularMode::Quadrature, &q).unwrap();
        let approx = circular_w_gamma(gamma, w, CircularMode::SmallGamma, &q).unwrap();
        worst = worst.max((num - approx).abs() / scale);
    }
    outcome(worst <= 2e-2, format!("max |numeric - expansion| / expansion(0) = {worst:.2e}"))
}

fn stationarity() -> Outcome {
    let taus = linspace(-3.0, 3.0, 61);
    let lags = linspace(0.05, 4.0, 80);
    let stationary = [
        ("rindler", TrajectorySpec::Rindler { xi: 1.0 }),
        ("circular", TrajectorySpec::Circular { gamma: 1.4, p: 2.0 }),
        ("helicoid-constant", TrajectorySpec::HelicoidConstant { gamma: 1.3, p: 1.5, alpha_mix: 0.6 }),
        ("helicoid-accelerated", TrajectorySpec::HelicoidAccelerated { a: 0.5, xi: 1.0, p: 3.0 }),
        ("inertial", TrajectorySpec::Inertial { v: 0.6 }),
        ("stationary", TrajectorySpec::Stationary { position: [0.3, -1.0, 2.0] }),
    ];
    let mut ok = true;
    let mut parts = Vec::new();
    let mut worst_pt = 0.0f64;
    for (name, spec) in &stationary {
        let d = stationarity_defect(spec, &taus, &lags, 1.0).unwrap();
        ok &= d <= 1e-10;
        parts.push(format!("{name} {d:.1e}"));
        worst_pt = worst_pt.max(proper_time_defect(spec, &taus, 1.0).unwrap());
    }
    let oblique = TrajectorySpec::ObliqueRindler { xi: 1.0, xi0: 0.4, alpha: 0.7 };
    worst_pt = worst_pt.max(proper_time_defect(&oblique, &taus, 1.0).unwrap());
    let control = stationarity_defect(&TrajectorySpec::TestQuadratic { beta: 0.3 }, &taus, &lags, 1.0).unwrap();
    ok &= control >= 1e-3 && worst_pt <= 1e-8;
    outcome(
        ok,
        format!("defects: {}; quadratic control {control:.2e}; proper-time defect max {worst_pt:.1e}", parts.join(", ")),
    )
}

fn helmholtz_kirchhoff() -> Outcome {
    let x1 = [0.3, -0.2, 0.1];
    let x2 = [0.9, 0.6, 0.1];
    let sep = 1.0;
    let omega = 2.0 * PI;
    let sizes = [25.0, 50.0, 100.0, 200.0];
    let res: Vec<f64> = sizes
        .iter()
        .map(|&m| hk_residual(omega, &x1, &x2, m * sep, 100_000, 1.0, 17).unwrap())
        .collect();
    let xs: Vec<f64> = sizes.iter().map(|s| s.ln()).collect();
    let ys: Vec<f64> = res.iter().map(|r| r.ln()).collect();
    let (mx, my) = (xs.iter().sum::<f64>() / 4.0, ys.iter().sum::<f64>() / 4.0);
    let slope = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum::<f64>()
        / xs.iter().map(|x| (x - mx).powi(2)).sum::<f64>();
    let at_200 = res[3];
    outcome(
        at_200 <= 2e-2 && (-1.4..=-0.6).contains(&slope),
        format!(
            "residual at L=200: {at_200:.2e}; residuals {:?}; log-log slope {slope:.2}",
            res.iter().map(|r| format!("{r:.1e}")).collect::<Vec<_>>()
        ),
    )
}

fn localization() -> Outcome {
    let scenes = [(0.0, -0.9), (0.0, 0.5), (FRAC_PI_4, -0.5), (1.2, 2.0)];
    let etas = linspace(-3.0, 3.0, 25);
    let nus = linspace(0.2, 4.0, 40);
    let cfg = FitConfig::default();
    let mut ok = true;
    let mut worst_clean = 0.0f64;
    let mut worst_noisy = 0.0f64;
    let mut slowest = 0.0f64;
    for (k, &(alpha, a0)) in scenes.iter().enumerate() {
        let s = MirrorScene::normalized(alpha, a0).unwrap();
        let clean = correction_grid(&s, etas.clone(), nus.clone()).unwrap();
        let t = Instant::now();
        let r = fit_scene(&clean, None, &cfg).unwrap();
        slowest = slowest.max(t.elapsed().as_secs_f64());
        let e = (r.alpha.abs() - alpha).abs().max((r.alpha0 - a0).abs());
        worst_clean = worst_clean.max(e);
        ok &= e <= 1e-3;
        for seed in 0..10u64 {
            let mut rng = ChaCha20Rng::seed_from_u64(1000 * k as u64 + seed);
            let mut noisy = clean.clone();
            for v in noisy.values.iter_mut() {
                let z: f64 = StandardNormal.sample(&mut rng);
                *v *= 1.0 + 0.01 * z;
            }
            // The observation carries its own 1% uncertainty. R is even in α, so
            // near α = 0 an unweighted fit lets the large-|R| nodes push |α| up
            // like √noise; inverse-variance weights remove that.
            let mut se = noisy.clone();
            se.values.iter_mut().for_each(|v| *v = 0.01 * v.abs());
            let t = Instant::now();
            let r = fit_scene(&noisy, Some(&se), &cfg).unwrap();
            slowest = slowest.max(t.elapsed().as_secs_f64());
            let e = (r.alpha.abs() - alpha).abs().max((r.alpha0 - a0).abs());
            worst_noisy = worst_noisy.max(e);
            ok &= e <= 5e-2;
        }
    }
    ok &= slowest <= 60.0;
    outcome(
        ok,
        format!("noiseless max err {worst_clean:.1e}; 1% noise (10 seeds x 4 scenes) max err {worst_noisy:.1e}; slowest fit {slowest:.1} s"),
    )
}

fn inertial_invariance() -> Outcome {
    let s = SourceSpectrum::new(1.0, 0.7, 0.0).unwrap();
    let mut worst = 0.0f64;
    for omega in linspace(0.1, 5.0, 50) {
        let rest = inertial_wigner(0.0, &s, omega, 1.0).unwrap();
        for &v in &[0.3, 0.9] {
            worst = worst.max(rel(inertial_wigner(v, &s, omega, 1.0).unwrap(), rest));
        }
    }
    let q = QuadratureConfig::default();
    let sq = |w: f64| w * w;
    let mut least = f64::INFINITY;
    for omega in linspace(0.1, 5.0, 50) {
        let rest = inertial_wigner_quadrature(0.0, &sq, omega, 1.0, &q).unwrap();
        let moving = inertial_wigner_quadrature(0.5, &sq, omega, 1.0, &q).unwrap();
        least = least.min(rel(moving, rest));
    }
    outcome(
        worst <= 1e-12 && least >= 1e-2,
        format!("f0|w| + f1/|w| max rel spread {worst:.1e}; w^2 spectrum min rel shift {least:.2}"),
    )
}

fn rovelli_scene() -> Outcome {
    let s = MirrorScene::normalized(0.0, 0.0).unwrap();
    let mut nonzero = 0;
    let mut flagged = true;
    let mut n = 0;
    for eta in linspace(-3.0, 3.0, 13) {
        for k in 0..=100 {
            let nu = 1e-3 * 1e4f64.powf(k as f64 / 100.0);
            let r = correction_r(&s, eta, nu).unwrap();
            nonzero += usize::from(r.value != 0.0);
            flagged &= r.delta;
            n += 1;
        }
    }
    outcome(nonzero == 0 && flagged, format!("{n} points, {nonzero} nonzero, delta flag set everywhere: {flagged}"))
}
