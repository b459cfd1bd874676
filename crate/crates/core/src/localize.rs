//! Obstacle localization: least-squares fit of the scene pose (|α|, α₀) to an
//! observed correction grid R(η, ν), and the wall distance seen by a
//! stationary observer.

use std::f64::consts::{FRAC_PI_2, PI};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::grid::{Grid, GridKind};
use crate::mirror::{correction_r, stationary_mirror_spectrum, MirrorScene};

/// Standard errors below this are clamped before inverse-variance weighting.
const STDERR_FLOOR: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightMode {
    Uniform,
    InverseVariance,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FitConfig {
    pub alpha_points: usize,
    pub alpha0_points: usize,
    pub alpha0_max: f64,
    /// Simplex stops when the spread of its objective values drops below this.
    pub tolerance: f64,
    pub max_evaluations: usize,
    /// None: inverse-variance when a stderr grid is supplied, uniform otherwise.
    pub weights: Option<WeightMode>,
    /// Mean weighted squared misfit below which a boundary fit counts as
    /// "no obstacle".
    pub no_obstacle_threshold: f64,
}

impl Default for FitConfig {
    fn default() -> Self {
        Self {
            alpha_points: 60,
            alpha0_points: 60,
            alpha0_max: 10.0,
            tolerance: 1e-18,
            max_evaluations: 4000,
            weights: None,
            no_obstacle_threshold: 1e-4,
        }
    }
}

impl FitConfig {
    pub fn validate(&self) -> Result<()> {
        if self.alpha_points < 2 || self.alpha0_points < 2 {
            return Err(invalid("coarse grid needs at least 2 points per axis"));
        }
        if !(self.alpha0_max > 0.0 && self.tolerance >= 0.0 && self.no_obstacle_threshold >= 0.0) {
            return Err(invalid("alpha0_max must be positive and tolerances non-negative"));
        }
        if self.max_evaluations == 0 {
            return Err(invalid("evaluation budget must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TracePoint {
    pub alpha: f64,
    pub alpha0: f64,
    pub objective: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalizationResult {
    /// Non-negative representative; R cannot distinguish α from −α.
    pub alpha: f64,
    pub alpha0: f64,
    /// Objective at the optimum divided by the number of grid points.
    pub residual: f64,
    pub objective: f64,
    pub evaluations: usize,
    pub budget_exhausted: bool,
    pub at_boundary: bool,
    pub no_obstacle: bool,
    pub sign_ambiguity: String,
    pub trace: Vec<TracePoint>,
}

/// Σ w·(R_obs − R(α, α₀))² over the grid.
pub fn objective(
    r_obs: &Grid,
    stderr: Option<&Grid>,
    alpha: f64,
    alpha0: f64,
    weights: WeightMode,
) -> Result<f64> {
    check_grids(r_obs, stderr)?;
    let scene = MirrorScene::normalized(alpha, alpha0)?;
    let w = weight_vector(r_obs, stderr, weights)?;
    misfit(r_obs, &w, &scene)
}

fn check_grids(r_obs: &Grid, stderr: Option<&Grid>) -> Result<()> {
    if r_obs.kind != GridKind::Correction {
        return Err(invalid("localization needs a correction grid"));
    }
    if let Some(se) = stderr {
        if !se.same_axes(r_obs) {
            return Err(invalid("stderr grid axes differ from the observation grid"));
        }
    }
    Ok(())
}

fn weight_vector(r_obs: &Grid, stderr: Option<&Grid>, mode: WeightMode) -> Result<Vec<f64>> {
    match (mode, stderr) {
        (WeightMode::Uniform, _) => Ok(vec![1.0; r_obs.values.len()]),
        (WeightMode::InverseVariance, Some(se)) => {
            Ok(se.values.iter().map(|s| 1.0 / s.abs().max(STDERR_FLOOR).powi(2)).collect())
        }
        (WeightMode::InverseVariance, None) => Err(invalid("inverse-variance weights need a stderr grid")),
    }
}

fn misfit(r_obs: &Grid, w: &[f64], scene: &MirrorScene) -> Result<f64> {
    misfit_pair(r_obs, w, scene).map(|(weighted, _)| weighted)
}

/// Weighted and unweighted sums of squared residuals in one pass.
fn misfit_pair(r_obs: &Grid, w: &[f64], scene: &MirrorScene) -> Result<(f64, f64)> {
    let nc = r_obs.cols.len();
    let (mut weighted, mut plain) = (0.0, 0.0);
    for (i, &eta) in r_obs.rows.iter().enumerate() {
        for (j, &nu) in r_obs.cols.iter().enumerate() {
            let k = i * nc + j;
            let d = r_obs.values[k] - correction_r(scene, eta, nu)?.value;
            weighted += w[k] * d * d;
            plain += d * d;
        }
    }
    Ok((weighted, plain))
}

/// Feasible-set projection used during the search: α is folded to |α| and
/// kept below π/2, α₀ clipped to (−cos α, α₀_max]. Returns the projected point
/// and the squared distance moved (for the penalty).
fn project(alpha: f64, alpha0: f64, alpha0_max: f64) -> (f64, f64, f64) {
    let a = alpha.abs().min(FRAC_PI_2 - 1e-9);
    let lo = -a.cos() + 1e-9 * (1.0 + a.cos());
    let b = alpha0.clamp(lo, alpha0_max);
    let moved = (a - alpha.abs()).powi(2) + (b - alpha0).powi(2);
    (a, b, moved)
}

/// Coarse (α, α₀) grid followed by Nelder–Mead refinement.
pub fn fit_scene(r_obs: &Grid, stderr: Option<&Grid>, cfg: &FitConfig) -> Result<LocalizationResult> {
    cfg.validate()?;
    check_grids(r_obs, stderr)?;
    let mode = cfg.weights.unwrap_or(if stderr.is_some() {
        WeightMode::InverseVariance
    } else {
        WeightMode::Uniform
    });
    let w = weight_vector(r_obs, stderr, mode)?;
    let npts = r_obs.values.len() as f64;
    let amax = cfg.alpha0_max;

    // Penalized objectives (weighted, unweighted) on the projected point.
    let eval_pair = |alpha: f64, alpha0: f64| -> (f64, f64) {
        let (a, b, moved) = project(alpha, alpha0, amax);
        let pen = |v: f64| v + 1e3 * moved * (1.0 + v);
        match MirrorScene::normalized(a, b).and_then(|s| misfit_pair(r_obs, &w, &s)) {
            Ok((v, u)) => (pen(v), pen(u)),
            Err(_) => (f64::INFINITY, f64::INFINITY),
        }
    };
    let eval = |alpha: f64, alpha0: f64| eval_pair(alpha, alpha0).0;
    let eval_plain = |alpha: f64, alpha0: f64| eval_pair(alpha, alpha0).1;

    // α from 0 toward π/2; α₀ on a grid quadratically refined toward the wall.
    let (na, nb) = (cfg.alpha_points, cfg.alpha0_points);
    let nodes: Vec<(f64, f64)> = (0..na)
        .flat_map(|i| {
            let alpha = FRAC_PI_2 * i as f64 / na as f64;
            let lo = -alpha.cos();
            (0..nb).map(move |j| {
                let u = ((j + 1) as f64 / nb as f64).powi(2);
                (alpha, lo + (amax - lo) * u)
            })
        })
        .collect();
    let pairs: Vec<(f64, f64)> = nodes.par_iter().map(|&(a, b)| eval_pair(a, b)).collect();
    let values: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    let plain: Vec<f64> = pairs.iter().map(|p| p.1).collect();
    let mut evaluations = values.len();
    if values.iter().all(|v| !v.is_finite()) {
        return Err(Error::NoAdmissiblePoint);
    }

    // Refine from the best few well-separated grid minima. Small standard
    // errors make the weighted basin too narrow for the coarse grid to hit,
    // so with inverse-variance weights the unweighted minima seed the search
    // too: they are first refined without weights, then with them.
    let (da, db) = (FRAC_PI_2 / na as f64, (amax + 1.0) / nb as f64);
    let best_nodes = |v: &[f64]| {
        let mut order: Vec<usize> = (0..nodes.len()).filter(|&k| v[k].is_finite()).collect();
        order.sort_by(|&x, &y| v[x].total_cmp(&v[y]));
        let mut picked: Vec<usize> = Vec::new();
        for &k in &order {
            let far = picked.iter().all(|&s| {
                (nodes[s].0 - nodes[k].0).abs() > 2.5 * da || (nodes[s].1 - nodes[k].1).abs() > 2.5 * db
            });
            if far {
                picked.push(k);
            }
            if picked.len() == 4 {
                break;
            }
        }
        picked
    };
    let mut starts: Vec<(usize, bool)> = best_nodes(&values).into_iter().map(|k| (k, false)).collect();
    if mode == WeightMode::InverseVariance {
        starts.extend(best_nodes(&plain).into_iter().map(|k| (k, true)));
    }

    let per_start = (cfg.max_evaluations / starts.len()).max(10);
    let mut best: Option<(f64, f64, f64, Vec<TracePoint>, bool)> = None;
    for &(k, via_plain) in &starts {
        let (mut a0, mut b0) = nodes[k];
        let step = |a: f64, b: f64| [0.5 * da.max(1e-3), (0.5 * db).min(0.5 * (b + a.cos())).max(1e-3)];
        let mut budget = per_start;
        if via_plain {
            let pre = nelder_mead(|p| eval_plain(p[0], p[1]), [a0, b0], step(a0, b0), 0.0, per_start / 2);
            evaluations += pre.evaluations;
            budget -= pre.evaluations.min(budget / 2);
            let (a, b, _) = project(pre.point[0], pre.point[1], amax);
            (a0, b0) = (a, b);
        }
        let nm = nelder_mead(|p| eval(p[0], p[1]), [a0, b0], step(a0, b0), cfg.tolerance, budget);
        evaluations += nm.evaluations;
        let mut trace = vec![TracePoint { alpha: a0, alpha0: b0, objective: eval(a0, b0) }];
        trace.extend(nm.trace.iter().map(|&(p, f)| {
            let (a, b, _) = project(p[0], p[1], amax);
            TracePoint { alpha: a, alpha0: b, objective: f }
        }));
        if best.as_ref().is_none_or(|b| nm.value < b.2) {
            best = Some((nm.point[0], nm.point[1], nm.value, trace, nm.exhausted));
        }
    }
    let (pa, pb, value, trace, exhausted) = best.expect("at least one start");
    let (alpha, alpha0, _) = project(pa, pb, amax);
    let objective = value;
    let residual = objective / npts;
    let at_boundary = alpha0 >= amax * (1.0 - 1e-6);
    Ok(LocalizationResult {
        alpha,
        alpha0,
        residual,
        objective,
        evaluations,
        budget_exhausted: exhausted,
        at_boundary,
        no_obstacle: at_boundary && residual < cfg.no_obstacle_threshold,
        sign_ambiguity: format!("R is even in alpha: (-{alpha}, {alpha0}) fits equally well"),
        trace,
    })
}

struct NmResult {
    point: [f64; 2],
    value: f64,
    evaluations: usize,
    exhausted: bool,
    /// Best vertex after each iteration (non-increasing objective).
    trace: Vec<([f64; 2], f64)>,
}

/// Nelder–Mead on R² with standard coefficients (1, 2, ½, ½).
fn nelder_mead<F: Fn([f64; 2]) -> f64>(f: F, x0: [f64; 2], step: [f64; 2], tol: f64, budget: usize) -> NmResult {
    let mut simplex = [x0, [x0[0] + step[0], x0[1]], [x0[0], x0[1] + step[1]]];
    let mut fv = simplex.map(&f);
    let mut evals = 3;
    let mut trace = Vec::new();
    let lin = |a: [f64; 2], b: [f64; 2], t: f64| [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])];
    loop {
        let mut idx = [0, 1, 2];
        idx.sort_by(|&i, &j| fv[i].total_cmp(&fv[j]));
        simplex = idx.map(|i| simplex[i]);
        fv = idx.map(|i| fv[i]);
        trace.push((simplex[0], fv[0]));
        if fv[2] - fv[0] <= tol {
            return NmResult { point: simplex[0], value: fv[0], evaluations: evals, exhausted: false, trace };
        }
        if evals + 2 > budget {
            return NmResult { point: simplex[0], value: fv[0], evaluations: evals, exhausted: true, trace };
        }
        let centroid = lin(simplex[0], simplex[1], 0.5);
        let xr = lin(simplex[2], centroid, 2.0);
        let fr = f(xr);
        evals += 1;
        if fr < fv[0] {
            let xe = lin(simplex[2], centroid, 3.0);
            let fe = f(xe);
            evals += 1;
            (simplex[2], fv[2]) = if fe < fr { (xe, fe) } else { (xr, fr) };
        } else if fr < fv[1] {
            (simplex[2], fv[2]) = (xr, fr);
        } else {
            let (xc, fc) = if fr < fv[2] {
                let x = lin(centroid, xr, 0.5);
                (x, f(x))
            } else {
                let x = lin(centroid, simplex[2], 0.5);
                (x, f(x))
            };
            evals += 1;
            if fc < fv[2].min(fr) {
                (simplex[2], fv[2]) = (xc, fc);
            } else {
                for i in 1..3 {
                    simplex[i] = lin(simplex[0], simplex[i], 0.5);
                    fv[i] = f(simplex[i]);
                }
                evals += 2;
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DistanceFit {
    pub d: f64,
    pub residual: f64,
    /// The optimum sits on the edge of the searchable range (for a flat
    /// spectrum: no wall within reach).
    pub at_boundary: bool,
}

/// Least-squares wall distance from a sampled stationary spectrum
/// W(ω) = (f₀|ω|/4π)(1 − sinc(2ωd/c₀)).
pub fn fit_distance_stationary(obs: &[(f64, f64)], f0: f64, c0: f64) -> Result<DistanceFit> {
    if obs.len() < 8 {
        return Err(Error::BandTooNarrow("need at least 8 spectral samples".into()));
    }
    let mut pts: Vec<(f64, f64)> = obs.iter().map(|&(w, v)| (w.abs(), v)).collect();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    let w_max = pts.last().unwrap().0;
    let spacing = pts.windows(2).map(|p| p[1].0 - p[0].0).fold(0.0, f64::max);
    if !(w_max > 0.0 && spacing > 0.0) {
        return Err(Error::BandTooNarrow("degenerate frequency samples".into()));
    }
    // ≥ 4 samples per period πc₀/d of the sinc ripple in ω.
    let (d_lo, d_hi) = (0.05 * c0 / w_max, PI * c0 / (4.0 * spacing));
    if d_lo >= d_hi {
        return Err(Error::BandTooNarrow(format!("resolvable distances [{d_lo}, {d_hi}] are empty")));
    }
    let cost = |d: f64| -> f64 {
        pts.iter()
            .map(|&(w, v)| (v - stationary_mirror_spectrum(d, f0, w, c0).unwrap_or(f64::NAN)).powi(2))
            .sum()
    };
    let n = 4000;
    let (l0, l1) = (d_lo.ln(), d_hi.ln());
    let grid: Vec<f64> = (0..n).map(|i| (l0 + (l1 - l0) * i as f64 / (n - 1) as f64).exp()).collect();
    let costs: Vec<f64> = grid.par_iter().map(|&d| cost(d)).collect();
    let k = (0..n).min_by(|&a, &b| costs[a].total_cmp(&costs[b])).unwrap();
    let (mut a, mut b) = (grid[k.saturating_sub(1)], grid[(k + 1).min(n - 1)]);
    // Golden-section refinement on the bracketing cell.
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let (mut x1, mut x2) = (b - g * (b - a), a + g * (b - a));
    let (mut f1, mut f2) = (cost(x1), cost(x2));
    while b - a > 1e-13 * b {
        if f1 < f2 {
            b = x2;
            (x2, f2) = (x1, f1);
            x1 = b - g * (b - a);
            f1 = cost(x1);
        } else {
            a = x1;
            (x1, f1) = (x2, f2);
            x2 = a + g * (b - a);
            f2 = cost(x2);
        }
    }
    let d = 0.5 * (a + b);
    let d = if cost(d) <= costs[k] { d } else { grid[k] };
    let norm: f64 = pts.iter().map(|&(w, _)| (f0 * w / (4.0 * PI)).powi(2)).sum();
    Ok(DistanceFit { d, residual: cost(d) / norm.max(f64::MIN_POSITIVE), at_boundary: k == 0 || k == n - 1 })
}
