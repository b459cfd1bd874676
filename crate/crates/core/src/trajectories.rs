//! Observer world-lines parameterized by proper time.

use serde::{Deserialize, Serialize};

use crate::core_math::Vec3;
use crate::error::{invalid, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpacetimeEvent {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl SpacetimeEvent {
    pub fn new(t: f64, position: Vec3) -> Self {
        Self { t, x: position[0], y: position[1], z: position[2] }
    }

    pub fn position(&self) -> Vec3 {
        [self.x, self.y, self.z]
    }
}

/// World-line families. Serialized as `{"kind": "rindler", "xi": 1.0}` etc.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum TrajectorySpec {
    Stationary { position: Vec3 },
    /// Uniform motion along z with speed `v`.
    Inertial { v: f64 },
    /// Constant proper acceleration c₀²/ξ along z, closest approach z = ξ at τ = 0.
    Rindler { xi: f64 },
    /// Rindler hyperbola with axis tilted by `alpha` in the x–z plane and
    /// apex shifted to z = ξ₀.
    ObliqueRindler { xi: f64, xi0: f64, alpha: f64 },
    Circular { gamma: f64, p: f64 },
    /// Circular motion of weight `alpha_mix` combined with uniform drift along z.
    HelicoidConstant { gamma: f64, p: f64, alpha_mix: f64 },
    /// Rotation in the x–y plane on top of uniform acceleration along z.
    HelicoidAccelerated {
        #[serde(rename = "A")]
        a: f64,
        xi: f64,
        p: f64,
    },
    /// z = βτ²: deliberately non-stationary.
    TestQuadratic { beta: f64 },
}

impl TrajectorySpec {
    pub fn validate(&self, c0: f64) -> Result<()> {
        if !(c0 > 0.0 && c0.is_finite()) {
            return Err(invalid("c0 must be positive"));
        }
        let ok = match *self {
            TrajectorySpec::Stationary { position } => position.iter().all(|c| c.is_finite()),
            TrajectorySpec::Inertial { v } => v.abs() < c0,
            TrajectorySpec::Rindler { xi } => xi > 0.0 && xi.is_finite(),
            TrajectorySpec::ObliqueRindler { xi, xi0, alpha } => {
                xi > 0.0 && alpha.abs() < std::f64::consts::FRAC_PI_2 && xi0 > -xi * alpha.cos()
            }
            TrajectorySpec::Circular { gamma, p } => gamma > 1.0 && p.is_finite() && p != 0.0,
            TrajectorySpec::HelicoidConstant { gamma, p, alpha_mix } => {
                gamma > 1.0 && p.is_finite() && p != 0.0 && (0.0..=1.0).contains(&alpha_mix)
            }
            TrajectorySpec::HelicoidAccelerated { a, xi, p } => {
                a.is_finite() && xi > 0.0 && p.is_finite() && p != 0.0
            }
            TrajectorySpec::TestQuadratic { beta } => beta.is_finite(),
        };
        if ok {
            Ok(())
        } else {
            Err(invalid(format!("trajectory parameters out of range: {self:?}")))
        }
    }

    /// Characteristic proper-time scale, used to size finite-difference steps.
    fn time_scale(&self, c0: f64) -> f64 {
        match *self {
            TrajectorySpec::Rindler { xi }
            | TrajectorySpec::ObliqueRindler { xi, .. }
            | TrajectorySpec::HelicoidAccelerated { xi, .. } => xi / c0,
            TrajectorySpec::Circular { p, .. } | TrajectorySpec::HelicoidConstant { p, .. } => 1.0 / p.abs(),
            _ => 1.0,
        }
    }
}

/// Position and laboratory time at proper time τ. Assumes a valid spec.
pub fn evaluate(spec: &TrajectorySpec, tau: f64, c0: f64) -> SpacetimeEvent {
    match *spec {
        TrajectorySpec::Stationary { position } => SpacetimeEvent::new(tau, position),
        TrajectorySpec::Inertial { v } => {
            let g = lorentz(v / c0);
            SpacetimeEvent::new(g * tau, [0.0, 0.0, g * v * tau])
        }
        TrajectorySpec::Rindler { xi } => {
            let eta = c0 * tau / xi;
            SpacetimeEvent::new(xi / c0 * eta.sinh(), [0.0, 0.0, xi * eta.cosh()])
        }
        TrajectorySpec::ObliqueRindler { xi, xi0, alpha } => {
            let eta = c0 * tau / xi;
            let r = xi * eta.cosh();
            SpacetimeEvent::new(xi / c0 * eta.sinh(), [r * alpha.sin(), 0.0, xi0 + r * alpha.cos()])
        }
        TrajectorySpec::Circular { gamma, p } => {
            let r = c0 * (gamma * gamma - 1.0).sqrt() / p;
            let ph = p * tau;
            SpacetimeEvent::new(gamma * tau, [r * ph.cos(), r * ph.sin(), 0.0])
        }
        TrajectorySpec::HelicoidConstant { gamma, p, alpha_mix } => {
            let u = c0 * (gamma * gamma - 1.0).sqrt();
            let r = u * alpha_mix.sqrt() / p;
            let ph = p * tau;
            SpacetimeEvent::new(gamma * tau, [r * ph.cos(), r * ph.sin(), u * (1.0 - alpha_mix).sqrt() * tau])
        }
        TrajectorySpec::HelicoidAccelerated { a, xi, p } => {
            let r = c0 * a / p;
            let ph = p * tau;
            let eta = c0 * tau / xi;
            let w = (a * a + 1.0).sqrt();
            SpacetimeEvent::new(w * xi / c0 * eta.sinh(), [r * ph.cos(), r * ph.sin(), xi * w * eta.cosh()])
        }
        TrajectorySpec::TestQuadratic { beta } => {
            SpacetimeEvent::new(quadratic_time(beta, tau, c0), [0.0, 0.0, beta * tau * tau])
        }
    }
}

fn lorentz(beta: f64) -> f64 {
    1.0 / ((1.0 - beta) * (1.0 + beta)).sqrt()
}

/// t(τ) = ∫₀^τ √(1 + ż²/c₀²) ds by fixed-step RK4 (10⁴ steps).
fn quadratic_time(beta: f64, tau: f64, c0: f64) -> f64 {
    const STEPS: usize = 10_000;
    let rate = |s: f64| (1.0 + (2.0 * beta * s / c0).powi(2)).sqrt();
    let h = tau / STEPS as f64;
    let mut t = 0.0;
    for i in 0..STEPS {
        let s = i as f64 * h;
        // The right-hand side does not depend on t, so RK4 reduces to Simpson.
        t += h / 6.0 * (rate(s) + 4.0 * rate(s + 0.5 * h) + rate(s + h));
    }
    t
}

/// Laboratory separation (Δt, Δx) between the events at τ ± τ′/2, using
/// product formulas where the trajectory is analytic so that large |τ| does
/// not lose precision.
pub fn separation(spec: &TrajectorySpec, tau: f64, tau_p: f64, c0: f64) -> (f64, Vec3) {
    let half = 0.5 * tau_p;
    match *spec {
        TrajectorySpec::Stationary { .. } => (tau_p, [0.0; 3]),
        TrajectorySpec::Inertial { v } => {
            let g = lorentz(v / c0);
            (g * tau_p, [0.0, 0.0, g * v * tau_p])
        }
        TrajectorySpec::Rindler { xi } => {
            let (eta, s) = (c0 * tau / xi, (c0 * half / xi).sinh());
            (2.0 * xi / c0 * eta.cosh() * s, [0.0, 0.0, 2.0 * xi * eta.sinh() * s])
        }
        TrajectorySpec::ObliqueRindler { xi, alpha, .. } => {
            let (eta, s) = (c0 * tau / xi, (c0 * half / xi).sinh());
            let d = 2.0 * xi * eta.sinh() * s;
            (2.0 * xi / c0 * eta.cosh() * s, [d * alpha.sin(), 0.0, d * alpha.cos()])
        }
        TrajectorySpec::Circular { gamma, p } => {
            let r = c0 * (gamma * gamma - 1.0).sqrt() / p;
            let (ph, s) = (p * tau, 2.0 * r * (p * half).sin());
            (gamma * tau_p, [-s * ph.sin(), s * ph.cos(), 0.0])
        }
        TrajectorySpec::HelicoidConstant { gamma, p, alpha_mix } => {
            let u = c0 * (gamma * gamma - 1.0).sqrt();
            let r = u * alpha_mix.sqrt() / p;
            let (ph, s) = (p * tau, 2.0 * r * (p * half).sin());
            (gamma * tau_p, [-s * ph.sin(), s * ph.cos(), u * (1.0 - alpha_mix).sqrt() * tau_p])
        }
        TrajectorySpec::HelicoidAccelerated { a, xi, p } => {
            let r = c0 * a / p;
            let (ph, s) = (p * tau, 2.0 * r * (p * half).sin());
            let (eta, sh) = (c0 * tau / xi, (c0 * half / xi).sinh());
            let w = (a * a + 1.0).sqrt();
            (
                2.0 * w * xi / c0 * eta.cosh() * sh,
                [-s * ph.sin(), s * ph.cos(), 2.0 * w * xi * eta.sinh() * sh],
            )
        }
        TrajectorySpec::TestQuadratic { beta } => {
            let e1 = evaluate(spec, tau + half, c0);
            let e0 = evaluate(spec, tau - half, c0);
            (e1.t - e0.t, [0.0, 0.0, 2.0 * beta * tau * tau_p])
        }
    }
}

/// D(τ, τ′) = |Δx|²/c₀² − Δt² between the events at τ ± τ′/2.
pub fn interval_function(spec: &TrajectorySpec, tau: f64, tau_p: f64, c0: f64) -> f64 {
    let (dt, dx) = separation(spec, tau, tau_p, c0);
    (dx[0] * dx[0] + dx[1] * dx[1] + dx[2] * dx[2]) / (c0 * c0) - dt * dt
}

/// max over τ′ of the spread of D(·, τ′) across the τ grid, normalized by max |D|.
pub fn stationarity_defect(spec: &TrajectorySpec, tau_grid: &[f64], tau_p_grid: &[f64], c0: f64) -> Result<f64> {
    if tau_grid.is_empty() || tau_p_grid.is_empty() {
        return Err(invalid("stationarity_defect needs non-empty grids"));
    }
    let mut worst = 0.0f64;
    let mut scale = 0.0f64;
    for &tp in tau_p_grid {
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for &t in tau_grid {
            let d = interval_function(spec, t, tp, c0);
            lo = lo.min(d);
            hi = hi.max(d);
            scale = scale.max(d.abs());
        }
        worst = worst.max(hi - lo);
    }
    Ok(if scale > 0.0 { worst / scale } else { 0.0 })
}

/// max over the grid of |ṫ² − |ẋ|²/c₀² − 1|, by central differences with
/// step 10⁻⁵ × grid span.
pub fn proper_time_defect(spec: &TrajectorySpec, tau_grid: &[f64], c0: f64) -> Result<f64> {
    if tau_grid.is_empty() {
        return Err(invalid("proper_time_defect needs a non-empty grid"));
    }
    let (lo, hi) = tau_grid.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &t| (l.min(t), h.max(t)));
    let span = if hi > lo { hi - lo } else { spec.time_scale(c0) };
    let h = 1e-5 * span;
    let mut worst = 0.0f64;
    for &tau in tau_grid {
        let (dt, dx) = separation(spec, tau, 2.0 * h, c0);
        let (tdot, xdot) = (dt / (2.0 * h), dx.map(|d| d / (2.0 * h)));
        let v2 = (xdot[0] * xdot[0] + xdot[1] * xdot[1] + xdot[2] * xdot[2]) / (c0 * c0);
        worst = worst.max((tdot * tdot - v2 - 1.0).abs());
    }
    Ok(worst)
}

/// |V̇|² − (V·V̇)²/(1 + |V|²) with V = ẋ/c₀; constant along the known
/// stationary trajectories.
pub fn acceleration_invariant(spec: &TrajectorySpec, tau: f64, c0: f64) -> f64 {
    let h = 1e-3 * spec.time_scale(c0);
    let x = |k: f64| evaluate(spec, tau + k * h, c0).position();
    let (m2, m1, z0, p1, p2) = (x(-2.0), x(-1.0), x(0.0), x(1.0), x(2.0));
    let mut v = [0.0; 3];
    let mut a = [0.0; 3];
    for i in 0..3 {
        v[i] = (m2[i] - 8.0 * m1[i] + 8.0 * p1[i] - p2[i]) / (12.0 * h * c0);
        a[i] = (-m2[i] + 16.0 * m1[i] - 30.0 * z0[i] + 16.0 * p1[i] - p2[i]) / (12.0 * h * h * c0);
    }
    let dot = |u: &[f64; 3], w: &[f64; 3]| u[0] * w[0] + u[1] * w[1] + u[2] * w[2];
    dot(&a, &a) - dot(&v, &a).powi(2) / (1.0 + dot(&v, &v))
}
