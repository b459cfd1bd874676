//! Autocorrelations and local spectra seen by observers in the obstacle-free
//! medium.
//!
//! Conventions: C(τ′) = ⟨U(τ+τ′/2)U(τ−τ′/2)⟩ and W(ω) = ∫ C(τ′) e^{iωτ′} dτ′.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::core_math::quadrature::panels;
use crate::core_math::{integrate_over, sinc, x_coth, QuadratureConfig};
use crate::error::{invalid, Error, Result};
use crate::trajectories::{separation, TrajectorySpec};

/// F̂(ω) = f₀|ω|e^{−ε|ω|} + f₁/|ω|.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SourceSpectrum {
    pub f0: f64,
    #[serde(default)]
    pub f1: f64,
    #[serde(default)]
    pub eps: f64,
}

impl SourceSpectrum {
    pub fn new(f0: f64, f1: f64, eps: f64) -> Result<Self> {
        let s = Self { f0, f1, eps };
        s.validate()?;
        Ok(s)
    }

    /// The Lorentz-invariant spectrum f₀|ω| regularized at time scale ε.
    pub fn lorentz_invariant(f0: f64, eps: f64) -> Result<Self> {
        Self::new(f0, 0.0, eps)
    }

    pub fn validate(&self) -> Result<()> {
        let finite = self.f0.is_finite() && self.f1.is_finite() && self.eps.is_finite();
        if !finite || self.f0 < 0.0 || self.f1 < 0.0 || self.eps < 0.0 || self.f0 + self.f1 <= 0.0 {
            return Err(invalid(format!("invalid source spectrum {self:?}")));
        }
        Ok(())
    }

    pub fn density(&self, omega: f64) -> f64 {
        let w = omega.abs();
        let mut d = self.f0 * w * (-self.eps * w).exp();
        if self.f1 > 0.0 {
            d += self.f1 / w;
        }
        d
    }
}

/// Eq.-(13) covariance along a trajectory by direct ω quadrature:
/// (1/4π²) ∫₀^∞ F̂(ω) sinc(ω|ΔX|/c₀) cos(ωΔT) dω.
///
/// The f₁ term is integrated from `ir_cutoff` and damped by the same
/// e^{−εω} as the f₀ term so the oscillatory tail converges.
pub fn autocorr_general(
    spec: &TrajectorySpec,
    s: &SourceSpectrum,
    tau: f64,
    tau_p: f64,
    q: &QuadratureConfig,
    c0: f64,
    ir_cutoff: Option<f64>,
) -> Result<f64> {
    s.validate()?;
    spec.validate(c0)?;
    if !(s.eps > 0.0) {
        return Err(invalid("autocorr_general needs eps > 0 for integrability"));
    }
    let lo = if s.f1 > 0.0 {
        match ir_cutoff {
            Some(w) if w > 0.0 => w,
            _ => return Err(Error::MissingCutoff),
        }
    } else {
        0.0
    };
    let (dt, dx) = separation(spec, tau, tau_p, c0);
    let r = (dx[0] * dx[0] + dx[1] * dx[1] + dx[2] * dx[2]).sqrt() / c0;
    let eps = s.eps;
    let hi = q.truncation / eps;
    let integrand = |w: f64| {
        let mut f = s.f0 * w;
        if s.f1 > 0.0 {
            f += s.f1 / w;
        }
        f * (-eps * w).exp() * sinc(w * r) * (w * dt).cos()
    };
    let freq = r + dt.abs();
    let width = if freq > 0.0 { (PI / freq).min(1.0 / eps) } else { 1.0 / eps };
    let mut pts = panels(lo, hi, width);
    // Resolve the e^{−εω} and 1/ω scales near the origin.
    if lo > 0.0 {
        let mut w = lo;
        let mut head = Vec::new();
        while w < pts[1] {
            head.push(w);
            w *= 4.0;
        }
        pts.splice(0..1, head);
    }
    let r = integrate_over(integrand, &pts, q)?;
    Ok(r.value / (4.0 * PI * PI))
}

/// Covariance of the free field between two events a distance r = |Δx|/c₀
/// (in seconds) and Δt apart, for F̂ = f₀|ω|e^{−ε|ω|}:
/// f₀/(8π²r)·[(r+Δt)/((r+Δt)²+ε²) + (r−Δt)/((r−Δt)²+ε²)].
/// For ε = 0 and r ≠ |Δt| this is f₀/(4π²(r² − Δt²)).
pub fn point_covariance(f0: f64, eps: f64, r: f64, dt: f64) -> f64 {
    let e2 = eps * eps;
    if r <= 1e-8 * eps.max(dt.abs()) {
        let t2 = dt * dt;
        return f0 * (e2 - t2) / (4.0 * PI * PI * (e2 + t2).powi(2));
    }
    let (p, m) = (r + dt, r - dt);
    f0 / (8.0 * PI * PI * r) * (p / (p * p + e2) + m / (m * m + e2))
}

/// −c₀²f₀/(16π²ξ²) / sinh²(c₀τ′/(2ξ)).
pub fn rindler_autocorr(xi: f64, f0: f64, tau_p: f64, c0: f64) -> Result<f64> {
    if tau_p == 0.0 {
        return Err(Error::ZeroLag);
    }
    let s = (c0 * tau_p / (2.0 * xi)).sinh();
    Ok(-c0 * c0 * f0 / (16.0 * PI * PI * xi * xi * s * s))
}

/// Rindler autocorrelation for F̂ = f₀|ω|e^{−ε|ω|}.
///
/// The two-term expression f₀/(8π² sinh η)·[e^η/(s e^{2η}+ε²) − e^{−η}/(s e^{−2η}+ε²)],
/// s = (2ξ/c₀)² sinh²(η′/2), is evaluated in its equivalent combined form
/// f₀(ε² − s)/(4π²(s² + ε⁴ + 2sε² cosh 2η)), which has no 0/0 at η = 0.
pub fn rindler_autocorr_regularized(xi: f64, f0: f64, eps: f64, tau: f64, tau_p: f64, c0: f64) -> Result<f64> {
    if !(eps > 0.0) {
        return Err(invalid("regularized autocorrelation needs eps > 0"));
    }
    let eta = c0 * tau / xi;
    let s = (2.0 * xi / c0 * (c0 * tau_p / (2.0 * xi)).sinh()).powi(2);
    let e2 = eps * eps;
    Ok(f0 * (e2 - s) / (4.0 * PI * PI * (s * s + e2 * e2 + 2.0 * s * e2 * (2.0 * eta).cosh())))
}

/// (f₀/4π)·ω/tanh(πξω/c₀).
pub fn rindler_wigner(xi: f64, f0: f64, omega: f64, c0: f64) -> f64 {
    let x = PI * xi * omega / c0;
    f0 * c0 / (4.0 * PI * PI * xi) * x_coth(x)
}

/// The same spectrum in Planck form: (f₀|ω|/4π)(1 + 2/(e^{2πξ|ω|/c₀} − 1)).
pub fn rindler_wigner_planck(xi: f64, f0: f64, omega: f64, c0: f64) -> f64 {
    let w = omega.abs();
    let x = 2.0 * PI * xi * w / c0;
    if x < 1e-8 {
        return f0 * c0 / (4.0 * PI * PI * xi) * (1.0 + x * x / 12.0);
    }
    f0 * w / (4.0 * PI) * (1.0 + 2.0 / x.exp_m1())
}

/// Rindler local spectrum for F̂ = f₀|ω|e^{−ε|ω|}; depends on τ through
/// e^{±c₀τ/ξ}.
///
/// With κ = c₀ε/(2ξ) and a, b = κe^{∓η} the printed two-term form equals
/// −(c₀f₀/(8πξ))·(Q(b) − Q(a))/(b − a),
/// Q(x) = sinh(ν(π − 2 asin x)) / (sinh(νπ)√(1 − x²)),
/// which is evaluated directly to avoid cancelling two O(1/ε) terms.
pub fn rindler_wigner_regularized(xi: f64, f0: f64, eps: f64, tau: f64, omega: f64, c0: f64) -> Result<f64> {
    if eps < 0.0 {
        return Err(invalid("eps must be non-negative"));
    }
    if eps == 0.0 {
        return Ok(rindler_wigner(xi, f0, omega, c0));
    }
    let nu = (xi * omega / c0).abs();
    let eta = c0 * tau / xi;
    let kappa = c0 * eps / (2.0 * xi);
    let (a, b) = (kappa * (-eta).exp(), kappa * eta.exp());
    if a.max(b) >= 1.0 {
        return Err(Error::Domain(format!(
            "eps = {eps} is too large at eta = {eta}: arccos argument leaves [-1, 1]"
        )));
    }
    let slope = if (b - a).abs() < 1e-4 * kappa {
        q_derivative(nu, 0.5 * (a + b))
    } else {
        (q_fn(nu, b) - q_fn(nu, a)) / (b - a)
    };
    Ok(-c0 * f0 / (8.0 * PI * xi) * slope)
}

/// sinh(νψ)/sinh(νπ) for ψ ∈ [0, π], ν ≥ 0.
fn sinh_ratio(nu: f64, psi: f64) -> f64 {
    if nu == 0.0 {
        return psi / PI;
    }
    (nu * (psi - PI)).exp() * (-2.0 * nu * psi).exp_m1() / (-2.0 * nu * PI).exp_m1()
}

/// ν cosh(νψ)/sinh(νπ) for ψ ∈ [0, π], ν ≥ 0.
fn cosh_ratio(nu: f64, psi: f64) -> f64 {
    if nu == 0.0 {
        return 1.0 / PI;
    }
    nu * (nu * (psi - PI)).exp() * (1.0 + (-2.0 * nu * psi).exp()) / -(-2.0 * nu * PI).exp_m1()
}

fn q_fn(nu: f64, x: f64) -> f64 {
    let psi = PI - 2.0 * x.asin();
    sinh_ratio(nu, psi) / ((1.0 - x) * (1.0 + x)).sqrt()
}

fn q_derivative(nu: f64, x: f64) -> f64 {
    let psi = PI - 2.0 * x.asin();
    let one_m = (1.0 - x) * (1.0 + x);
    let root = one_m.sqrt();
    -2.0 * cosh_ratio(nu, psi) / one_m + sinh_ratio(nu, psi) * x / (one_m * root)
}

/// Local spectrum of an inertial observer moving at speed v, for the
/// two-term spectrum model:
/// (1/(8πγβ)) ∫ F̂(ω′)/ω′ dω′ over [ω/(γ(1+β)), ω/(γ(1−β))].
pub fn inertial_wigner(v: f64, s: &SourceSpectrum, omega: f64, c0: f64) -> Result<f64> {
    s.validate()?;
    let w = omega.abs();
    if w == 0.0 {
        return Err(invalid("inertial_wigner needs omega != 0"));
    }
    let beta = (v / c0).abs();
    if beta >= 1.0 {
        return Err(invalid("|v| must be below c0"));
    }
    if beta == 0.0 {
        return Ok(s.density(w) / (4.0 * PI));
    }
    let gamma = 1.0 / ((1.0 - beta) * (1.0 + beta)).sqrt();
    let lo = w / (gamma * (1.0 + beta));
    let hi = w / (gamma * (1.0 - beta));
    let f0_part = if s.eps > 0.0 {
        (-s.eps * lo).exp() * -(-s.eps * (hi - lo)).exp_m1() / s.eps
    } else {
        hi - lo
    };
    let f1_part = 1.0 / lo - 1.0 / hi;
    Ok((s.f0 * f0_part + s.f1 * f1_part) / (8.0 * PI * gamma * beta))
}

/// The same Doppler average for an arbitrary spectral density, by quadrature.
pub fn inertial_wigner_quadrature(
    v: f64,
    density: &dyn Fn(f64) -> f64,
    omega: f64,
    c0: f64,
    q: &QuadratureConfig,
) -> Result<f64> {
    let w = omega.abs();
    let beta = (v / c0).abs();
    if beta >= 1.0 || w == 0.0 {
        return Err(invalid("need |v| < c0 and omega != 0"));
    }
    if beta == 0.0 {
        return Ok(density(w) / (4.0 * PI));
    }
    let gamma = 1.0 / ((1.0 - beta) * (1.0 + beta)).sqrt();
    let lo = w / (gamma * (1.0 + beta));
    let hi = w / (gamma * (1.0 - beta));
    let r = integrate_over(|x| density(x) / x, &[lo, hi], q)?;
    Ok(r.value / (8.0 * PI * gamma * beta))
}

/// (f₀/4π²) / (4((γ²−1)/p²) sin²(pτ′/2) − γ²τ′²).
pub fn circular_autocorr(gamma: f64, p: f64, f0: f64, tau_p: f64, _c0: f64) -> Result<f64> {
    if tau_p == 0.0 {
        return Err(Error::ZeroLag);
    }
    let d = 4.0 * (gamma * gamma - 1.0) / (p * p) * (0.5 * p * tau_p).sin().powi(2) - gamma * gamma * tau_p * tau_p;
    Ok(f0 / (4.0 * PI * PI * d))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CircularMode {
    Quadrature,
    /// Leading order in γ² − 1: (γ²−1)/(6π)·(1 − |w|)₊³.
    SmallGamma,
}

/// Perturbation W_γ(w) of the circular-motion spectrum.
pub fn circular_w_gamma(gamma: f64, w: f64, mode: CircularMode, q: &QuadratureConfig) -> Result<f64> {
    if !(gamma > 1.0) {
        return Err(invalid("circular motion needs gamma > 1"));
    }
    let g2m1 = (gamma - 1.0) * (gamma + 1.0);
    let w = w.abs();
    if mode == CircularMode::SmallGamma {
        return Ok(g2m1 / (6.0 * PI) * (1.0 - w).max(0.0).powi(3));
    }
    let g2 = gamma * gamma;
    // k(s) = (s² − sin²s)/(s²(s² + (γ²−1)(s² − sin²s))), minus its tail
    // 1/(γ²(1 + s²)) whose cosine transform is (π/2)e^{−2w}/γ².
    let k = |s: f64| {
        let d = s_minus_sin(s) * (s + s.sin());
        let core = if s < 1e-3 {
            (d / s.powi(4)) / (1.0 + g2m1 * d / (s * s))
        } else {
            d / (s * s * (s * s + g2m1 * d))
        };
        (core - 1.0 / (g2 * (1.0 + s * s))) * (2.0 * w * s).cos()
    };
    let upper = 400.0;
    let width = if w > 0.0 { (PI / (2.0 * w)).min(2.0) } else { 2.0 };
    let r = integrate_over(k, &panels(0.0, upper, width), q)?;
    let integral = 2.0 * (r.value + 0.5 * PI * (-2.0 * w).exp() / g2);
    Ok(g2m1 / (4.0 * PI * PI) * integral)
}

/// s − sin s without cancellation near 0.
fn s_minus_sin(s: f64) -> f64 {
    if s.abs() < 0.1 {
        let s2 = s * s;
        s * s2 / 6.0 * (1.0 - s2 / 20.0 * (1.0 - s2 / 42.0 * (1.0 - s2 / 72.0)))
    } else {
        s - s.sin()
    }
}

/// f₀|ω|/4π + (f₀p/4π)·W_γ(ω/p).
pub fn circular_wigner(gamma: f64, p: f64, f0: f64, omega: f64, mode: CircularMode, q: &QuadratureConfig) -> Result<f64> {
    let wg = circular_w_gamma(gamma, omega / p, mode, q)?;
    Ok(f0 * omega.abs() / (4.0 * PI) + f0 * p.abs() / (4.0 * PI) * wg)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum WindowKind {
    Rectangular,
    Hann,
    #[default]
    Gaussian,
}

/// Lag window χ(τ′) of duration scale T_c, normalized to χ(0) = 1.
/// Gaussian: exp(−τ′²/(2T_c²)); Hann and rectangular: support |τ′| ≤ T_c/2.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub kind: WindowKind,
    pub tc: f64,
}

impl Window {
    pub fn new(kind: WindowKind, tc: f64) -> Result<Self> {
        if !(tc > 0.0 && tc.is_finite()) {
            return Err(invalid("window duration T_c must be positive"));
        }
        Ok(Self { kind, tc })
    }

    pub fn weight(&self, tau_p: f64) -> f64 {
        let t = tau_p.abs();
        match self.kind {
            WindowKind::Gaussian => (-0.5 * (t / self.tc).powi(2)).exp(),
            WindowKind::Hann if t <= 0.5 * self.tc => (PI * t / self.tc).cos().powi(2),
            WindowKind::Rectangular if t <= 0.5 * self.tc => 1.0,
            _ => 0.0,
        }
    }

    /// Largest |τ′| where the window is non-negligible (10 σ for Gaussian).
    pub fn support(&self) -> f64 {
        match self.kind {
            WindowKind::Gaussian => 10.0 * self.tc,
            _ => 0.5 * self.tc,
        }
    }

    /// χ̂(ω) = (1/2π) ∫ χ(τ′) e^{−iωτ′} dτ′, unit mass.
    pub fn kernel(&self, omega: f64) -> f64 {
        let t = self.tc;
        match self.kind {
            WindowKind::Gaussian => t / (2.0 * PI).sqrt() * (-0.5 * (t * omega).powi(2)).exp(),
            WindowKind::Rectangular => t / (2.0 * PI) * sinc(0.5 * omega * t),
            WindowKind::Hann => {
                let x = 0.5 * omega * t;
                t / (4.0 * PI) * (sinc(x) + 0.5 * (sinc(x + PI) + sinc(x - PI)))
            }
        }
    }

    pub fn label(&self) -> String {
        let k = match self.kind {
            WindowKind::Gaussian => "gaussian",
            WindowKind::Hann => "hann",
            WindowKind::Rectangular => "rectangular",
        };
        format!("{k}:{}", self.tc)
    }
}

/// W_χ(ω) = ∫ W(ω − ω′) χ̂(ω′) dω′ for each requested ω.
///
/// The rectangular kernel decays like 1/ω′ and its convolution with a
/// spectrum growing like |ω| has no limit, so only Gaussian and Hann windows
/// are accepted here; rectangular windows are handled in the lag domain by
/// [`windowed_from_autocorr`].
pub fn windowed_wigner(w: &dyn Fn(f64) -> f64, window: &Window, omegas: &[f64], q: &QuadratureConfig) -> Result<Vec<f64>> {
    let (reach, width) = match window.kind {
        WindowKind::Gaussian => (12.0 / window.tc, 0.5 / window.tc),
        WindowKind::Hann => (800.0 * PI / window.tc, PI / window.tc),
        WindowKind::Rectangular => {
            return Err(Error::UnsupportedWindow(
                "rectangular kernels do not converge against |omega|-growing spectra".into(),
            ))
        }
    };
    let pts = panels(-reach, reach, width);
    omegas
        .iter()
        .map(|&om| integrate_over(|x| w(om - x) * window.kernel(x), &pts, q).map(|r| r.value))
        .collect()
}

/// W_χ(ω) = 2 ∫₀^∞ χ(τ′) C(τ′) cos(ωτ′) dτ′ for an even, integrable C.
/// `scale` is the narrowest feature of C (e.g. ε), used to place breakpoints.
pub fn windowed_from_autocorr(
    c: &dyn Fn(f64) -> f64,
    window: &Window,
    omega: f64,
    scale: f64,
    q: &QuadratureConfig,
) -> Result<f64> {
    let top = window.support();
    let mut pts = vec![0.0];
    let mut x = scale;
    while x < top {
        pts.push(x);
        x *= 3.0;
    }
    let width = if omega.abs() > 0.0 { (PI / omega.abs()).min(top / 8.0) } else { top / 8.0 };
    let last = *pts.last().unwrap();
    pts.extend(panels(last, top, width).into_iter().skip(1));
    let r = integrate_over(|t| window.weight(t) * c(t) * (omega * t).cos(), &pts, q)?;
    Ok(2.0 * r.value)
}
