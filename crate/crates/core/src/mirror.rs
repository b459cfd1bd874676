//! Rindler observer next to a Dirichlet half-space z < 0: image geometry,
//! perturbed autocorrelation and the relative spectral correction R(η, ν).

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::core_math::{argcosh, psi_closed, sinc, PsiParams, Vec3};
use crate::error::{invalid, Error, Result};
use crate::freefield::{point_covariance, rindler_autocorr_regularized, rindler_wigner};
use crate::grid::{Grid, GridKind, WignerGrid};
use crate::trajectories::{evaluate, SpacetimeEvent, TrajectorySpec};

/// Below this |α| the normal-incidence closed form is used (C± = O(1/A)).
pub const ALPHA_SWITCH: f64 = 1e-4;

/// Observer X(τ) = (ξ cosh η sin α, 0, ξ₀ + ξ cosh η cos α), t = (ξ/c₀) sinh η,
/// in front of the wall z = 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawScene")]
pub struct MirrorScene {
    pub xi: f64,
    pub xi0: f64,
    pub alpha: f64,
    pub c0: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScene {
    xi: f64,
    xi0: f64,
    alpha: f64,
    #[serde(default = "unit")]
    c0: f64,
}

fn unit() -> f64 {
    1.0
}

impl TryFrom<RawScene> for MirrorScene {
    type Error = Error;
    fn try_from(r: RawScene) -> Result<Self> {
        MirrorScene::new(r.xi, r.xi0, r.alpha, r.c0)
    }
}

impl MirrorScene {
    pub fn new(xi: f64, xi0: f64, alpha: f64, c0: f64) -> Result<Self> {
        if !(xi > 0.0 && xi.is_finite() && c0 > 0.0 && c0.is_finite() && xi0.is_finite()) {
            return Err(invalid("scene needs xi > 0, c0 > 0 and finite xi0"));
        }
        if !(alpha.abs() < FRAC_PI_2) {
            return Err(invalid(format!("alpha = {alpha} must lie in (-pi/2, pi/2)")));
        }
        if !(xi0 > -xi * alpha.cos()) {
            return Err(invalid(format!(
                "xi0 = {xi0} puts the trajectory inside the obstacle (need xi0 > -xi cos alpha)"
            )));
        }
        Ok(Self { xi, xi0, alpha, c0 })
    }

    /// Dimensionless scene with ξ = c₀ = 1.
    pub fn normalized(alpha: f64, alpha0: f64) -> Result<Self> {
        Self::new(1.0, alpha0, alpha, 1.0)
    }

    pub fn alpha0(&self) -> f64 {
        self.xi0 / self.xi
    }

    pub fn trajectory(&self) -> TrajectorySpec {
        TrajectorySpec::ObliqueRindler { xi: self.xi, xi0: self.xi0, alpha: self.alpha }
    }

    pub fn observer(&self, tau: f64) -> SpacetimeEvent {
        evaluate(&self.trajectory(), tau, self.c0)
    }
}

/// Mirror image of X(τ) across z = 0.
pub fn image_point(scene: &MirrorScene, tau: f64) -> Vec3 {
    let r = scene.xi * (scene.c0 * tau / scene.xi).cosh();
    [r * scene.alpha.sin(), 0.0, -scene.xi0 - r * scene.alpha.cos()]
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AbcCoefficients {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

/// A = sin²α, B = −2α₀ cos α cosh η, C = −1 − α₀² − cos²α sinh²η.
///
/// A + C + |B| = −(cos α cosh η − |α₀|)² ≤ 0, with equality only where the
/// observer would touch the wall.
pub fn abc_coefficients(scene: &MirrorScene, eta: f64) -> Result<AbcCoefficients> {
    let (sa, ca) = scene.alpha.sin_cos();
    let a0 = scene.alpha0();
    let a = sa * sa;
    let b = -2.0 * a0 * ca * eta.cosh();
    let c = -1.0 - a0 * a0 - (ca * eta.sinh()).powi(2);
    let scale = 1.0 + a0 * a0 + (ca * eta.cosh()).powi(2);
    if !(a < 1.0 && c <= -1.0 && a + c + b.abs() <= 1e-12 * scale) {
        return Err(Error::Admissibility(format!("A={a}, B={b}, C={c} at eta={eta}")));
    }
    Ok(AbcCoefficients { a, b, c })
}

/// Two-point function with the wall:
/// −K/sinh²(η′/2) + K/(A cosh²(η′/2) + B cosh(η′/2) + C), K = c₀²f₀/(16π²ξ²).
pub fn mirror_autocorr(scene: &MirrorScene, f0: f64, tau: f64, tau_p: f64) -> Result<f64> {
    if tau_p == 0.0 {
        return Err(Error::ZeroLag);
    }
    let (xi, c0) = (scene.xi, scene.c0);
    let k = c0 * c0 * f0 / (16.0 * PI * PI * xi * xi);
    let hp = 0.5 * c0 * tau_p / xi;
    Ok(-k / hp.sinh().powi(2) + image_term(scene, k, c0 * tau / xi, hp)?)
}

fn image_term(scene: &MirrorScene, k: f64, eta: f64, half_eta_p: f64) -> Result<f64> {
    let AbcCoefficients { a, b, c } = abc_coefficients(scene, eta)?;
    let ch = half_eta_p.cosh();
    Ok(k / ((a * ch + b) * ch + c))
}

/// The same two-point function for F̂ = f₀|ω|e^{−ε|ω|}: the regularized
/// free Rindler term minus the regularized image covariance.
pub fn mirror_autocorr_regularized(scene: &MirrorScene, f0: f64, eps: f64, tau: f64, tau_p: f64) -> Result<f64> {
    let (xi, c0) = (scene.xi, scene.c0);
    let free = rindler_autocorr_regularized(xi, f0, eps, tau, tau_p, c0)?;
    let e1 = scene.observer(tau + 0.5 * tau_p);
    let e0 = scene.observer(tau - 0.5 * tau_p);
    let img = image_point(scene, tau - 0.5 * tau_p);
    let p = e1.position();
    let d = ((p[0] - img[0]).powi(2) + (p[1] - img[1]).powi(2) + (p[2] - img[2]).powi(2)).sqrt();
    Ok(free - point_covariance(f0, eps, d / c0, e1.t - e0.t))
}

/// Value of R together with a flag marking the degenerate scene (α = α₀ = 0)
/// whose correction is a pure δ(ν).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Correction {
    pub value: f64,
    pub delta: bool,
}

/// Relative correction R(η, ν) with W = W₀(1 − R).
pub fn correction_r(scene: &MirrorScene, eta: f64, nu: f64) -> Result<Correction> {
    let alpha = scene.alpha;
    let a0 = scene.alpha0();
    let nu = nu.abs();
    if alpha == 0.0 && a0 == 0.0 {
        return Ok(Correction { value: 0.0, delta: true });
    }
    if alpha.abs() < ALPHA_SWITCH && a0 != 0.0 {
        return Ok(Correction { value: normal_incidence(a0, eta, nu), delta: false });
    }
    let AbcCoefficients { a, b, c } = abc_coefficients(scene, eta)?;
    let p = PsiParams::new(a, b, c)?;
    let psi = psi_closed(2.0 * nu, &p)?.value();
    let x = PI * nu;
    // tanh(πν)/(2πν)
    let pref = if x < 1e-6 { 0.5 * (1.0 - x * x / 3.0) } else { x.tanh() / (2.0 * x) };
    Ok(Correction { value: -pref * psi, delta: false })
}

/// Normal incidence in logarithmic form, L = |ln(cosh η/|α₀|)|:
/// α₀ < 0: (1 − 1/(2cosh²πν))·sin(2νL)/(ν(cosh²η − α₀²)),
/// α₀ > 0: (1/(2cosh²πν))·sin(2νL′)/(ν(α₀² − cosh²η)), L′ = ln(α₀/cosh η).
fn normal_incidence(a0: f64, eta: f64, nu: f64) -> f64 {
    let ch = eta.cosh();
    let half_sech2 = 0.5 / (PI * nu).cosh().powi(2);
    // sin(2νL)/(ν·base·(e^{2L} − 1)) = 2L·sinc(2νL)/(base·expm1(2L))
    let ratio = |l: f64, base: f64| {
        let g = if l.abs() < 1e-12 { 1.0 } else { 2.0 * l / (2.0 * l).exp_m1() };
        g * sinc(2.0 * nu * l) / base
    };
    if a0 < 0.0 {
        let l = (ch / -a0).ln();
        (1.0 - half_sech2) * ratio(l, a0 * a0)
    } else {
        let l = (a0 / ch).ln();
        half_sech2 * ratio(l, ch * ch)
    }
}

/// W₀(ω)·(1 − R(c₀τ/ξ, ξω/c₀)).
pub fn mirror_wigner(scene: &MirrorScene, f0: f64, tau: f64, omega: f64) -> Result<f64> {
    let (xi, c0) = (scene.xi, scene.c0);
    let r = correction_r(scene, c0 * tau / xi, xi * omega / c0)?;
    Ok(rindler_wigner(xi, f0, omega, c0) * (1.0 - r.value))
}

/// R over an (η, ν) lattice.
pub fn correction_grid(scene: &MirrorScene, etas: Vec<f64>, nus: Vec<f64>) -> Result<WignerGrid> {
    Grid::fill(GridKind::Correction, etas, nus, |e, n| correction_r(scene, e, n).map(|r| r.value))
}

/// W₀(1 − R) over an (η, ν) lattice, in units of f₀ with ξ, c₀ from the scene.
pub fn mirror_wigner_grid(scene: &MirrorScene, f0: f64, etas: Vec<f64>, nus: Vec<f64>) -> Result<WignerGrid> {
    let (xi, c0) = (scene.xi, scene.c0);
    Grid::fill(GridKind::Wigner, etas, nus, |e, n| {
        let r = correction_r(scene, e, n)?;
        Ok(rindler_wigner(xi, f0, n * c0 / xi, c0) * (1.0 - r.value))
    })
}

/// R at closest approach when the trajectory grazes the wall (α₀ → −cos α):
/// 1 − (1/(2cosh²πν))·(1 − sin[2ν argcosh(1 + 2/tan²α)]/(4ν√(1/tan²α + 1/tan⁴α))).
pub fn near_wall_limit(alpha: f64, nu: f64) -> Result<f64> {
    if !(alpha.abs() < FRAC_PI_2) {
        return Err(invalid("alpha must lie in (-pi/2, pi/2)"));
    }
    let half_sech2 = 0.5 / (PI * nu).cosh().powi(2);
    let t2 = alpha.tan().powi(2);
    let oblique = if t2 == 0.0 {
        0.0
    } else {
        // sin(2νy)/(4ν) · t²/√(1 + t²), y = argcosh(1 + 2/t²)
        let y = argcosh(1.0 + 2.0 / t2);
        0.5 * y * sinc(2.0 * nu * y) * t2 / (1.0 + t2).sqrt()
    };
    Ok(1.0 - half_sech2 * (1.0 - oblique))
}

/// Stationary observer at distance d from the wall:
/// (f₀|ω|/4π)(1 − sinc(2ωd/c₀)).
pub fn stationary_mirror_spectrum(d: f64, f0: f64, omega: f64, c0: f64) -> Result<f64> {
    if !(d > 0.0) {
        return Err(invalid("distance must be positive"));
    }
    let x = 2.0 * omega * d / c0;
    // 1 − sinc(x) without cancellation near 0.
    let one_m = if x.abs() < 1e-3 {
        let x2 = x * x;
        x2 / 6.0 * (1.0 - x2 / 20.0)
    } else {
        1.0 - sinc(x)
    };
    Ok(f0 * omega.abs() / (4.0 * PI) * one_m)
}
