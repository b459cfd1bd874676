//! Special functions, the Ψ oscillatory integral, adaptive quadrature and the
//! homogeneous Green's function.

mod green;
mod psi;
pub mod quadrature;

pub use green::{green_hom, hk_residual, Vec3};
pub use psi::{psi_closed, psi_quadrature, PsiParams, PsiQuadrature, PsiValue};
pub use quadrature::{integrate, integrate_over, Integral, QuadratureConfig};

use std::f64::consts::PI;

/// sin(x)/x with the removable singularity filled.
pub fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        let x2 = x * x;
        1.0 - x2 / 6.0 * (1.0 - x2 / 20.0)
    } else {
        x.sin() / x
    }
}

/// Inverse hyperbolic cosine on [1, ∞). Arguments that rounding pushed just
/// below 1 are clamped to 1.
pub fn argcosh(x: f64) -> f64 {
    if x <= 1.0 {
        return 0.0;
    }
    if x < 2.0 {
        let t = x - 1.0;
        (t + (t * (t + 2.0)).sqrt()).ln_1p()
    } else if x < 1e8 {
        (x + (x * x - 1.0).sqrt()).ln()
    } else {
        (2.0 * x).ln() - 0.25 / (x * x)
    }
}

/// sin(v·argcosh x)/√(x² − 1), continuous at x = 1 where it tends to v.
pub(crate) fn sin_ach_over_root(v: f64, x: f64) -> f64 {
    let y = argcosh(x);
    if y < 1e-7 {
        // sin(vy)/sinh(y) = v (1 − (v² + 1) y²/6 + …)
        return v * (1.0 - (v * v + 1.0) * y * y / 6.0);
    }
    let root = if x < 1e8 {
        ((x - 1.0) * (x + 1.0)).sqrt()
    } else {
        x * (1.0 - 1.0 / (x * x)).sqrt()
    };
    (v * y).sin() / root
}

/// argcosh(x)/√(x² − 1), continuous at x = 1 where it tends to 1.
pub(crate) fn ach_over_root(x: f64) -> f64 {
    let y = argcosh(x);
    if y < 1e-7 {
        return 1.0 - y * y / 6.0;
    }
    y / y.sinh()
}

/// sin(v·argcosh x) / (√(x² − 1)·tanh(κv)), including v → 0.
pub(crate) fn sin_ach_tanh(v: f64, x: f64, kappa: f64) -> f64 {
    if v.abs() < 1e-6 {
        let y = argcosh(x);
        let v2 = v * v;
        return ach_over_root(x) / kappa * (1.0 - v2 * y * y / 6.0 + kappa * kappa * v2 / 3.0);
    }
    sin_ach_over_root(v, x) / (kappa * v).tanh()
}

/// sin(v·argcosh x) / (√(x² − 1)·sinh(κv)), including v → 0.
pub(crate) fn sin_ach_sinh(v: f64, x: f64, kappa: f64) -> f64 {
    if v.abs() < 1e-6 {
        let y = argcosh(x);
        let v2 = v * v;
        return ach_over_root(x) / kappa * (1.0 - v2 * y * y / 6.0 - kappa * kappa * v2 / 6.0);
    }
    sin_ach_over_root(v, x) / (kappa * v).sinh()
}

/// x/tanh(x), continuous at 0.
pub(crate) fn x_coth(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        1.0 + x * x / 3.0
    } else {
        x / x.tanh()
    }
}

pub(crate) const TWO_PI: f64 = 2.0 * PI;
