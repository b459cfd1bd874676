//! Random-wave synthesis of the ambient field and Monte-Carlo estimators of
//! the recorded autocorrelation and windowed local spectrum.
//!
//! A realization is N plane waves with wave vectors drawn from the source
//! spectrum and independent complex Gaussian amplitudes; the field is
//! u = 2 Re Σ a_j e^{i(k_j·x − c₀|k_j|t)}. In the half-space each mode is
//! paired with its mirror image, which enforces u = 0 on z = 0.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::core_math::Vec3;
use crate::error::{invalid, Error, Result};
use crate::freefield::{point_covariance, SourceSpectrum, Window};
use crate::grid::{Grid, GridKind};
use crate::trajectories::{evaluate, SpacetimeEvent, TrajectorySpec};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlaneWave {
    pub k: Vec3,
    /// Ω = c₀|k|.
    pub omega: f64,
    pub amp: Complex64,
}

/// One realization of the random field. With exact sampling of the radial
/// law every wave carries the same weight, so no stratum volumes are stored.
#[derive(Debug, Clone, PartialEq)]
pub struct PlaneWaveEnsemble {
    pub waves: Vec<PlaneWave>,
    pub half_space: bool,
    pub c0: f64,
}

impl PlaneWaveEnsemble {
    /// Superposes two ensembles of the same kind.
    pub fn concat(mut self, other: PlaneWaveEnsemble) -> Result<Self> {
        if self.half_space != other.half_space || self.c0 != other.c0 {
            return Err(invalid("cannot concatenate ensembles of different kinds"));
        }
        self.waves.extend(other.waves);
        Ok(self)
    }
}

/// E|a_j|² so that the total single-point variance is f₀/(4π²ε²); halved for
/// image-paired modes, whose norm is doubled.
fn amplitude_variance(s: &SourceSpectrum, n: usize, half_space: bool) -> f64 {
    let v = s.f0 / (8.0 * PI * PI * s.eps * s.eps * n as f64);
    if half_space {
        0.5 * v
    } else {
        v
    }
}

fn check_spectrum(s: &SourceSpectrum) -> Result<()> {
    s.validate()?;
    if !(s.eps > 0.0) || s.f1 > 0.0 || !(s.f0 > 0.0) {
        return Err(Error::UnsupportedSpectrum(
            "sampling needs f0 > 0, eps > 0 and f1 = 0 (finite total power)".into(),
        ));
    }
    Ok(())
}

fn draw(s: &SourceSpectrum, n: usize, half_space: bool, c0: f64, rng: &mut ChaCha20Rng) -> Result<PlaneWaveEnsemble> {
    // Radial density ∝ k e^{−εc₀k}: Gamma(2, 1/(εc₀)).
    let radial = Gamma::new(2.0, 1.0 / (s.eps * c0)).map_err(|e| invalid(e.to_string()))?;
    let sd = (0.5 * amplitude_variance(s, n, half_space)).sqrt();
    let waves = (0..n)
        .map(|_| {
            let k = radial.sample(rng);
            let z: f64 = 2.0 * rng.random::<f64>() - 1.0;
            let phi = 2.0 * PI * rng.random::<f64>();
            let rho = (1.0 - z * z).max(0.0).sqrt();
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            PlaneWave {
                k: [k * rho * phi.cos(), k * rho * phi.sin(), k * z],
                omega: c0 * k,
                amp: Complex64::new(sd * re, sd * im),
            }
        })
        .collect();
    Ok(PlaneWaveEnsemble { waves, half_space, c0 })
}

/// One ensemble, deterministic in (seed, N).
pub fn sample_ensemble(s: &SourceSpectrum, n: usize, seed: u64, half_space: bool, c0: f64) -> Result<PlaneWaveEnsemble> {
    check_spectrum(s)?;
    if n == 0 {
        return Err(invalid("need at least one wave"));
    }
    draw(s, n, half_space, c0, &mut ChaCha20Rng::seed_from_u64(seed))
}

/// Realization r of a run with master seed `master`: stream r of the master
/// ChaCha key, so any realization can be regenerated on its own.
pub fn sample_realization(
    s: &SourceSpectrum,
    n: usize,
    master: u64,
    r: u64,
    half_space: bool,
    c0: f64,
) -> Result<PlaneWaveEnsemble> {
    check_spectrum(s)?;
    if n == 0 {
        return Err(invalid("need at least one wave"));
    }
    let mut rng = ChaCha20Rng::seed_from_u64(master);
    rng.set_stream(r);
    draw(s, n, half_space, c0, &mut rng)
}

/// u at a spacetime event.
pub fn field_at(e: &PlaneWaveEnsemble, ev: &SpacetimeEvent) -> f64 {
    let x = ev.position();
    let mut acc = 0.0;
    for w in &e.waves {
        let kx = w.k[0] * x[0] + w.k[1] * x[1];
        let (s1, c1) = (kx + w.k[2] * x[2] - w.omega * ev.t).sin_cos();
        acc += w.amp.re * c1 - w.amp.im * s1;
        if e.half_space {
            let (s2, c2) = (kx - w.k[2] * x[2] - w.omega * ev.t).sin_cos();
            acc -= w.amp.re * c2 - w.amp.im * s2;
        }
    }
    2.0 * acc
}

/// Relative deviation of the Monte-Carlo covariance of (e1, e2) from the
/// analytic target, normalized by the single-point variance f₀/(4π²ε²).
///
/// The estimator averages over the uniform mode phases analytically
/// (2 Σ |a_j|² Re[φ_j(e1) conj φ_j(e2)] per realization), leaving the
/// sampling of wave vectors and amplitude moduli as the Monte-Carlo part.
pub fn covariance_residual(
    s: &SourceSpectrum,
    n: usize,
    m: usize,
    e1: &SpacetimeEvent,
    e2: &SpacetimeEvent,
    half_space: bool,
    seed: u64,
    c0: f64,
) -> Result<f64> {
    check_spectrum(s)?;
    if m == 0 {
        return Err(invalid("need at least one realization"));
    }
    let (x1, x2) = (e1.position(), e2.position());
    let dt = e1.t - e2.t;
    let mirror = |x: Vec3| [x[0], x[1], -x[2]];
    let per: Vec<f64> = (0..m as u64)
        .into_par_iter()
        .map(|r| {
            let e = sample_realization(s, n, seed, r, half_space, c0)?;
            let mut acc = 0.0;
            for w in &e.waves {
                let phase = |x: Vec3| Complex64::from_polar(1.0, w.k[0] * x[0] + w.k[1] * x[1] + w.k[2] * x[2]);
                let (mut p1, mut p2) = (phase(x1), phase(x2));
                if half_space {
                    p1 -= phase(mirror(x1));
                    p2 -= phase(mirror(x2));
                }
                acc += w.amp.norm_sqr() * (p1 * p2.conj() * Complex64::from_polar(1.0, -w.omega * dt)).re;
            }
            Ok(2.0 * acc)
        })
        .collect::<Result<_>>()?;
    let mc = per.iter().sum::<f64>() / m as f64;
    let dist = |a: Vec3, b: Vec3| ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt();
    let mut target = point_covariance(s.f0, s.eps, dist(x1, x2) / c0, dt);
    if half_space {
        target -= point_covariance(s.f0, s.eps, dist(x1, mirror(x2)) / c0, dt);
    }
    let var = s.f0 / (4.0 * PI * PI * s.eps * s.eps);
    Ok((mc - target).abs() / var)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimatorConfig {
    /// Realization count M.
    pub realizations: usize,
    pub taus: Vec<f64>,
    pub tau_primes: Vec<f64>,
    /// Angular frequencies for the windowed spectrum.
    #[serde(default)]
    pub omegas: Vec<f64>,
    pub window: Window,
    pub seed: u64,
}

impl EstimatorConfig {
    pub fn validate(&self) -> Result<()> {
        let sorted = |v: &[f64]| v.windows(2).all(|w| w[0] < w[1]) && v.iter().all(|x| x.is_finite());
        if self.realizations == 0 {
            return Err(invalid("need at least one realization"));
        }
        if self.taus.is_empty() || self.tau_primes.is_empty() {
            return Err(invalid("tau and tau' grids must be non-empty"));
        }
        if !sorted(&self.taus) || !sorted(&self.tau_primes) || !sorted(&self.omegas) {
            return Err(invalid("grids must be strictly increasing and finite"));
        }
        if !(self.window.tc > 0.0) {
            return Err(invalid("window duration must be positive"));
        }
        Ok(())
    }
}

/// Pointwise mean and standard error over realizations.
#[derive(Debug, Clone, PartialEq)]
pub struct Estimate {
    pub mean: Grid,
    pub stderr: Grid,
}

/// Windowed spectrum estimate plus the τ-flatness test: for each τ row and ω,
/// the mean of per-realization differences W(τ) − W(τ_ref) and its standard
/// error, where τ_ref is the grid τ closest to 0.
#[derive(Debug, Clone, PartialEq)]
pub struct WignerEstimate {
    pub mean: Grid,
    pub stderr: Grid,
    pub flat_diff: Grid,
    pub flat_stderr: Grid,
    pub reference_tau: f64,
}

/// Unique sorted times (merged within a relative 1e-12) and, for every input,
/// the index of its representative.
fn dedup_times(values: &[f64]) -> (Vec<f64>, Vec<usize>) {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut unique: Vec<f64> = Vec::new();
    let mut index = vec![0; values.len()];
    for &i in &order {
        let v = values[i];
        match unique.last() {
            Some(&u) if (v - u).abs() <= 1e-12 * (1.0 + u.abs()) => {}
            _ => unique.push(v),
        }
        index[i] = unique.len() - 1;
    }
    (unique, index)
}

/// Recording plan: the distinct proper times to sample and, for each
/// (τ, τ′) node, the indices of τ + τ′/2 and τ − τ′/2.
struct Plan {
    events: Vec<SpacetimeEvent>,
    plus: Vec<usize>,
    minus: Vec<usize>,
}

fn plan(traj: &TrajectorySpec, cfg: &EstimatorConfig, half_space: bool, c0: f64) -> Result<Plan> {
    let mut times = Vec::with_capacity(2 * cfg.taus.len() * cfg.tau_primes.len());
    for &t in &cfg.taus {
        for &tp in &cfg.tau_primes {
            times.push(t + 0.5 * tp);
            times.push(t - 0.5 * tp);
        }
    }
    let (unique, index) = dedup_times(&times);
    let events: Vec<SpacetimeEvent> = unique.iter().map(|&t| evaluate(traj, t, c0)).collect();
    if half_space {
        if let Some((i, _)) = events.iter().enumerate().find(|(_, e)| !(e.z > 0.0)) {
            return Err(Error::ExitsDomain { tau: unique[i] });
        }
    }
    let plus = index.iter().step_by(2).copied().collect();
    let minus = index.iter().skip(1).step_by(2).copied().collect();
    Ok(Plan { events, plus, minus })
}

/// Field of one realization at every planned event.
fn record(e: &PlaneWaveEnsemble, events: &[SpacetimeEvent]) -> Vec<f64> {
    events.iter().map(|ev| field_at(e, ev)).collect()
}

/// Order-preserving streaming mean/variance (Welford). Realizations are
/// pushed in index order, so the result does not depend on thread count.
struct Moments {
    n: usize,
    mean: Vec<f64>,
    m2: Vec<f64>,
}

impl Moments {
    fn new(len: usize) -> Self {
        Self { n: 0, mean: vec![0.0; len], m2: vec![0.0; len] }
    }

    fn push(&mut self, x: &[f64]) {
        self.n += 1;
        let n = self.n as f64;
        for ((m, s), &v) in self.mean.iter_mut().zip(self.m2.iter_mut()).zip(x) {
            let d = v - *m;
            *m += d / n;
            *s += d * (v - *m);
        }
    }

    fn stderr(&self) -> Vec<f64> {
        let n = self.n as f64;
        if self.n < 2 {
            return vec![f64::NAN; self.mean.len()];
        }
        self.m2.iter().map(|s| (s / (n - 1.0) / n).sqrt()).collect()
    }
}

/// Runs `per_realization` for r = 0..M in parallel chunks and reduces the
/// outputs sequentially in realization order.
fn run<F>(m: usize, len: usize, per_realization: F) -> Result<Moments>
where
    F: Fn(u64) -> Result<Vec<f64>> + Sync,
{
    const CHUNK: usize = 64;
    let mut acc = Moments::new(len);
    let mut start = 0;
    while start < m {
        let end = (start + CHUNK).min(m);
        let outs = (start..end)
            .into_par_iter()
            .map(|r| per_realization(r as u64))
            .collect::<Result<Vec<_>>>()?;
        for o in &outs {
            acc.push(o);
        }
        start = end;
    }
    Ok(acc)
}

/// Estimated ⟨U(τ + τ′/2) U(τ − τ′/2)⟩ on the (τ, τ′) grid.
pub fn estimate_autocorr(
    s: &SourceSpectrum,
    traj: &TrajectorySpec,
    cfg: &EstimatorConfig,
    n: usize,
    half_space: bool,
    c0: f64,
) -> Result<Estimate> {
    check_spectrum(s)?;
    cfg.validate()?;
    traj.validate(c0)?;
    let p = plan(traj, cfg, half_space, c0)?;
    let moments = run(cfg.realizations, p.plus.len(), |r| {
        let e = sample_realization(s, n, cfg.seed, r, half_space, c0)?;
        let u = record(&e, &p.events);
        Ok(p.plus.iter().zip(&p.minus).map(|(&a, &b)| u[a] * u[b]).collect())
    })?;
    let stderr = moments.stderr();
    let grid = |v| Grid::new(GridKind::Correlation, cfg.taus.clone(), cfg.tau_primes.clone(), v);
    Ok(Estimate { mean: grid(moments.mean)?, stderr: grid(stderr)? })
}

/// Trapezoid weights of a sorted grid.
fn trapezoid(x: &[f64]) -> Vec<f64> {
    let n = x.len();
    if n < 2 {
        return vec![0.0; n];
    }
    (0..n)
        .map(|i| {
            let left = if i > 0 { x[i] - x[i - 1] } else { 0.0 };
            let right = if i + 1 < n { x[i + 1] - x[i] } else { 0.0 };
            0.5 * (left + right)
        })
        .collect()
}

/// Windowed local spectrum Σ_j w_j χ(τ′_j) U(τ+τ′_j/2)U(τ−τ′_j/2) cos(ωτ′_j)
/// per realization, over the (τ, ω) grid; rows are τ, columns ω.
pub fn estimate_wigner(
    s: &SourceSpectrum,
    traj: &TrajectorySpec,
    cfg: &EstimatorConfig,
    n: usize,
    half_space: bool,
    c0: f64,
) -> Result<WignerEstimate> {
    check_spectrum(s)?;
    cfg.validate()?;
    traj.validate(c0)?;
    if cfg.omegas.is_empty() {
        return Err(invalid("estimate_wigner needs a non-empty omega grid"));
    }
    let p = plan(traj, cfg, half_space, c0)?;
    let (nt, nl, nw) = (cfg.taus.len(), cfg.tau_primes.len(), cfg.omegas.len());
    let weights: Vec<f64> = trapezoid(&cfg.tau_primes)
        .iter()
        .zip(&cfg.tau_primes)
        .map(|(w, &tp)| w * cfg.window.weight(tp))
        .collect();
    // kernel[j][l] = w_l χ(τ′_l) cos(ω_j τ′_l)
    let kernel: Vec<f64> = cfg
        .omegas
        .iter()
        .flat_map(|&om| cfg.tau_primes.iter().zip(&weights).map(move |(&tp, &w)| w * (om * tp).cos()))
        .collect();
    let reference = (0..nt)
        .min_by(|&a, &b| cfg.taus[a].abs().total_cmp(&cfg.taus[b].abs()))
        .unwrap();
    let moments = run(cfg.realizations, 2 * nt * nw, |r| {
        let e = sample_realization(s, n, cfg.seed, r, half_space, c0)?;
        let u = record(&e, &p.events);
        let mut out = vec![0.0; 2 * nt * nw];
        for i in 0..nt {
            let prods: Vec<f64> = (0..nl).map(|l| u[p.plus[i * nl + l]] * u[p.minus[i * nl + l]]).collect();
            for j in 0..nw {
                let row = &kernel[j * nl..(j + 1) * nl];
                out[i * nw + j] = row.iter().zip(&prods).map(|(k, v)| k * v).sum();
            }
        }
        for i in 0..nt {
            for j in 0..nw {
                out[nt * nw + i * nw + j] = out[i * nw + j] - out[reference * nw + j];
            }
        }
        Ok(out)
    })?;
    let se = moments.stderr();
    let half = nt * nw;
    let label = cfg.window.label();
    let grid = |v: &[f64]| {
        Grid::new(GridKind::Wigner, cfg.taus.clone(), cfg.omegas.clone(), v.to_vec()).map(|g| g.with_window(label.clone()))
    };
    Ok(WignerEstimate {
        mean: grid(&moments.mean[..half])?,
        stderr: grid(&se[..half])?,
        flat_diff: grid(&moments.mean[half..])?,
        flat_stderr: grid(&se[half..])?,
        reference_tau: cfg.taus[reference],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::freefield::{rindler_autocorr_regularized, WindowKind};
    use crate::grid::linspace;

    fn spectrum() -> SourceSpectrum {
        SourceSpectrum::lorentz_invariant(1.0, 0.05).unwrap()
    }

    #[test]
    fn rejects_unsampleable_spectra() {
        let s = SourceSpectrum::new(1.0, 0.0, 0.0).unwrap();
        assert!(matches!(sample_ensemble(&s, 4, 0, false, 1.0), Err(Error::UnsupportedSpectrum(_))));
        let s = SourceSpectrum::new(1.0, 0.1, 0.05).unwrap();
        assert!(matches!(sample_ensemble(&s, 4, 0, false, 1.0), Err(Error::UnsupportedSpectrum(_))));
    }

    #[test]
    fn radial_law_is_gamma_two() {
        let n = 100_000;
        let (eps, c0) = (0.05, 2.0);
        let s = SourceSpectrum::lorentz_invariant(1.0, eps).unwrap();
        let e = sample_ensemble(&s, n, 42, false, c0).unwrap();
        let mut k: Vec<f64> = e.waves.iter().map(|w| w.k.iter().map(|c| c * c).sum::<f64>().sqrt()).collect();
        k.sort_by(f64::total_cmp);
        let theta = 1.0 / (eps * c0);
        let cdf = |x: f64| 1.0 - (-x / theta).exp() * (1.0 + x / theta);
        let d = k
            .iter()
            .enumerate()
            .map(|(i, &x)| {
                let f = cdf(x);
                (f - i as f64 / n as f64).abs().max(((i + 1) as f64 / n as f64 - f).abs())
            })
            .fold(0.0, f64::max);
        assert!(d < 1.63 / (n as f64).sqrt(), "KS statistic {d}");
        assert!(e.waves.iter().all(|w| (w.omega - c0 * w.k.iter().map(|c| c * c).sum::<f64>().sqrt()).abs() < 1e-9 * w.omega));
    }

    #[test]
    fn amplitudes_have_zero_mean() {
        let n = 10_000;
        let s = spectrum();
        let e = sample_ensemble(&s, n, 7, false, 1.0).unwrap();
        let sigma = (0.5 * amplitude_variance(&s, n, false)).sqrt();
        let (re, im) = e.waves.iter().fold((0.0, 0.0), |(a, b), w| (a + w.amp.re, b + w.amp.im));
        let bound = 3.0 * sigma / (n as f64).sqrt();
        assert!((re / n as f64).abs() <= bound && (im / n as f64).abs() <= bound);
    }

    #[test]
    fn total_power_matches_analytic_variance() {
        let s = spectrum();
        let ev = SpacetimeEvent::new(0.3, [0.1, -0.2, 0.5]);
        let (n, m) = (1024, 400);
        let r = covariance_residual(&s, n, m, &ev, &ev, false, 9, 1.0).unwrap();
        assert!(r <= 3.0 / ((n * m) as f64).sqrt(), "{r}");
        // Raw field samples: ⟨u²⟩ within 4 standard errors (u² has relative SD √2).
        let var = 1.0 / (4.0 * PI * PI * 0.0025);
        let mean_sq = (0..m as u64)
            .map(|r| field_at(&sample_realization(&s, 256, 3, r, false, 1.0).unwrap(), &ev).powi(2))
            .sum::<f64>()
            / m as f64;
        assert!((mean_sq / var - 1.0).abs() < 4.0 * (2.0 / m as f64).sqrt());
    }

    #[test]
    fn generic_pair_covariance() {
        let s = spectrum();
        let e1 = SpacetimeEvent::new(0.0, [0.0, 0.0, 1.0]);
        let e2 = SpacetimeEvent::new(0.04, [0.03, 0.0, 1.02]);
        let r = covariance_residual(&s, 4096, 500, &e1, &e2, false, 1, 1.0).unwrap();
        assert!(r <= 0.05, "{r}");
        let h = covariance_residual(&s, 4096, 500, &e1, &e2, true, 1, 1.0).unwrap();
        assert!(h <= 0.05, "{h}");
        let w1 = SpacetimeEvent::new(0.0, [0.2, 0.1, 0.0]);
        let zero = covariance_residual(&s, 256, 10, &w1, &w1, true, 1, 1.0).unwrap();
        assert_eq!(zero, 0.0);
    }

    #[test]
    fn covariance_depends_only_on_separation() {
        // Same interval, rotated and translated pair: residuals track the same target.
        let s = spectrum();
        let a = covariance_residual(&s, 2048, 200, &SpacetimeEvent::new(0.0, [0.0; 3]), &SpacetimeEvent::new(0.05, [0.1, 0.0, 0.0]), false, 4, 1.0).unwrap();
        let b = covariance_residual(&s, 2048, 200, &SpacetimeEvent::new(1.0, [5.0, 1.0, 2.0]), &SpacetimeEvent::new(1.05, [5.0, 1.1, 2.0]), false, 4, 1.0).unwrap();
        assert!(a < 0.02 && b < 0.02, "{a} {b}");
    }

    #[test]
    fn image_pairing_reproduces_free_minus_image() {
        // Direction average of Re[(e^{ik·x} − e^{ik·xˢ}) conj(e^{ik·y} − e^{ik·yˢ})]
        // equals 2 sinc(k|x−y|) − 2 sinc(k|x−yˢ|): the cross terms coincide because
        // |x − yˢ| = |xˢ − y| and |xˢ − yˢ| = |x − y|.
        let (x, y) = ([0.2, -0.1, 0.4], [0.5, 0.3, 0.9]);
        let mir = |v: Vec3| [v[0], v[1], -v[2]];
        let k = 3.0;
        let n = 200_000;
        let golden = 0.5 * (1.0 + 5f64.sqrt());
        let mut acc = 0.0;
        for i in 0..n {
            let z = 1.0 - 2.0 * (i as f64 + 0.5) / n as f64;
            let rho = (1.0 - z * z).sqrt();
            let phi = 2.0 * PI * (i as f64 / golden).fract();
            let d = [k * rho * phi.cos(), k * rho * phi.sin(), k * z];
            let ph = |v: Vec3| Complex64::from_polar(1.0, d[0] * v[0] + d[1] * v[1] + d[2] * v[2]);
            acc += ((ph(x) - ph(mir(x))) * (ph(y) - ph(mir(y))).conj()).re;
        }
        let sinc = crate::core_math::sinc;
        let dist = |a: Vec3, b: Vec3| ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt();
        let expected = 2.0 * sinc(k * dist(x, y)) - 2.0 * sinc(k * dist(x, mir(y)));
        assert!((acc / n as f64 - expected).abs() < 1e-6, "{} {expected}", acc / n as f64);
    }

    #[test]
    fn field_definition_checks() {
        let single = PlaneWaveEnsemble {
            waves: vec![PlaneWave { k: [1.0, 2.0, 0.5], omega: 2.0, amp: Complex64::new(1.0, 0.0) }],
            half_space: false,
            c0: 1.0,
        };
        let ev = SpacetimeEvent::new(0.7, [0.3, -0.2, 1.1]);
        let phase = 0.3 - 0.4 + 0.55 - 1.4;
        assert!((field_at(&single, &ev) - 2.0 * f64::cos(phase)).abs() < 1e-14);

        let s = spectrum();
        let a = sample_ensemble(&s, 50, 1, true, 1.0).unwrap();
        let b = sample_ensemble(&s, 70, 2, true, 1.0).unwrap();
        let ev = SpacetimeEvent::new(0.2, [0.4, 0.1, 0.3]);
        let sum = field_at(&a, &ev) + field_at(&b, &ev);
        let both = field_at(&a.clone().concat(b).unwrap(), &ev);
        assert!((sum - both).abs() < 1e-12 * sum.abs().max(1.0));
        assert_eq!(field_at(&a, &SpacetimeEvent::new(0.9, [1.0, -2.0, 0.0])), 0.0);
    }

    fn small_config(window: Window) -> EstimatorConfig {
        let h = 0.05;
        EstimatorConfig {
            realizations: 150,
            taus: vec![-1.0, 0.0, 1.0],
            tau_primes: (-40..=40).map(|j| j as f64 * h).collect(),
            omegas: linspace(0.5, 3.0, 6),
            window,
            seed: 2024,
        }
    }

    #[test]
    fn rindler_autocorr_estimate_within_noise() {
        let s = spectrum();
        let traj = TrajectorySpec::Rindler { xi: 1.0 };
        let cfg = small_config(Window::new(WindowKind::Gaussian, 1.5).unwrap());
        let est = estimate_autocorr(&s, &traj, &cfg, 512, false, 1.0).unwrap();
        let mut inside = 0;
        for (i, &tau) in cfg.taus.iter().enumerate() {
            for (j, &tp) in cfg.tau_primes.iter().enumerate() {
                let target = rindler_autocorr_regularized(1.0, 1.0, 0.05, tau, tp, 1.0).unwrap();
                if (est.mean.get(i, j) - target).abs() <= 3.0 * est.stderr.get(i, j) {
                    inside += 1;
                }
            }
        }
        let frac = inside as f64 / (cfg.taus.len() * cfg.tau_primes.len()) as f64;
        assert!(frac >= 0.95, "{frac}");
    }

    #[test]
    fn estimates_are_thread_count_independent() {
        let s = spectrum();
        let traj = TrajectorySpec::Circular { gamma: 1.3, p: 2.0 };
        let mut cfg = small_config(Window::new(WindowKind::Hann, 2.0).unwrap());
        cfg.realizations = 70;
        let run_with = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| estimate_wigner(&s, &traj, &cfg, 64, false, 1.0).unwrap())
        };
        let (a, b) = (run_with(1), run_with(3));
        assert!(a.mean.values.iter().zip(&b.mean.values).all(|(x, y)| x.to_bits() == y.to_bits()));
        assert!(a.stderr.values.iter().zip(&b.stderr.values).all(|(x, y)| x.to_bits() == y.to_bits()));
    }

    #[test]
    fn stationary_observer_is_tau_independent() {
        let s = spectrum();
        let traj = TrajectorySpec::Stationary { position: [0.0, 0.0, 1.0] };
        let cfg = small_config(Window::new(WindowKind::Gaussian, 1.0).unwrap());
        let est = estimate_wigner(&s, &traj, &cfg, 256, false, 1.0).unwrap();
        for (d, se) in est.flat_diff.values.iter().zip(&est.flat_stderr.values) {
            assert!(d.abs() <= 4.0 * se + 1e-12, "{d} {se}");
        }
        assert_eq!(est.reference_tau, 0.0);
    }

    #[test]
    fn half_space_rejects_trajectories_through_the_wall() {
        let s = spectrum();
        let traj = TrajectorySpec::Stationary { position: [0.0, 0.0, -0.5] };
        let cfg = small_config(Window::new(WindowKind::Gaussian, 1.0).unwrap());
        assert!(matches!(estimate_autocorr(&s, &traj, &cfg, 8, true, 1.0), Err(Error::ExitsDomain { .. })));
    }

    #[test]
    fn dedup_merges_rounding_twins() {
        let (u, idx) = dedup_times(&[1.0 + 0.0125 * 3.0, 0.0125 * 83.0, 0.5, -0.2]);
        assert_eq!(u.len(), 3);
        assert_eq!(idx[0], idx[1]);
    }
}
