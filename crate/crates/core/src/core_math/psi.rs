//! Ψ(v; a, b, c) = p.v. ∫ e^{ivs} / (a cosh²s + b cosh s + c) ds over ℝ.
//!
//! The denominator is a quadratic in x = cosh s. Whenever it has a root with
//! x > 1 the integral is taken in the principal-value sense.

use std::f64::consts::PI;

use super::quadrature::{integrate, QuadratureConfig};
use super::{sin_ach_sinh, sin_ach_tanh, TWO_PI};
use crate::error::{invalid, Result};

const ZERO_A: f64 = 1e-10;
const ZERO_B: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PsiParams {
    a: f64,
    b: f64,
    c: f64,
}

impl PsiParams {
    /// Requires a ∈ [0, 1), c ≤ −1 and a + c + |b| < 0. The boundary
    /// a − b + c = 0 with b < 0 is accepted: there the root sits at
    /// cosh s = −1, off the real line, and the closed form is continuous.
    pub fn new(a: f64, b: f64, c: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && c.is_finite()) {
            return Err(invalid("Psi coefficients must be finite"));
        }
        if !(0.0..1.0).contains(&a) {
            return Err(invalid(format!("Psi requires a in [0, 1), got {a}")));
        }
        if c > -1.0 {
            return Err(invalid(format!("Psi requires c <= -1, got {c}")));
        }
        let scale = a.abs() + b.abs() + c.abs();
        if a + b + c >= 0.0 || a - b + c > 1e-12 * scale {
            return Err(invalid(format!(
                "Psi requires a + c + |b| < 0, got a={a}, b={b}, c={c}"
            )));
        }
        Ok(Self { a, b, c })
    }

    pub fn a(&self) -> f64 {
        self.a
    }
    pub fn b(&self) -> f64 {
        self.b
    }
    pub fn c(&self) -> f64 {
        self.c
    }

    fn denominator(&self, s: f64) -> f64 {
        let x = s.cosh();
        (self.a * x + self.b) * x + self.c
    }
}

/// Closed-form value of Ψ. When a = b = 0 the integral is (2π/c)·δ(v); that
/// case is reported as [`PsiValue::Delta`] rather than as a number.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PsiValue {
    Finite(f64),
    Delta { weight: f64 },
}

impl PsiValue {
    /// Pointwise value; zero away from the origin in the delta case.
    pub fn value(&self) -> f64 {
        match *self {
            PsiValue::Finite(v) => v,
            PsiValue::Delta { .. } => 0.0,
        }
    }

    pub fn is_delta(&self) -> bool {
        matches!(self, PsiValue::Delta { .. })
    }
}

pub fn psi_closed(v: f64, p: &PsiParams) -> Result<PsiValue> {
    let v = v.abs();
    let PsiParams { a, b, c } = *p;
    let a_zero = a < ZERO_A;
    let b_zero = b.abs() < ZERO_B;

    let value = match (a_zero, b_zero) {
        (true, true) => {
            if v == 0.0 {
                return Err(invalid("Psi(0; 0, 0, c) is a delta function"));
            }
            return Ok(PsiValue::Delta { weight: TWO_PI / c });
        }
        (true, false) => {
            let x = (c / b).abs();
            let shape = if b < 0.0 {
                sin_ach_sinh(v, x, PI)
            } else {
                sin_ach_tanh(v, x, PI)
            };
            -TWO_PI * shape / b.abs()
        }
        (false, true) => {
            let x = (-c / a).sqrt();
            -PI * sin_ach_tanh(v, x, 0.5 * PI) / (a * x)
        }
        (false, false) => {
            let sq = (b * b - 4.0 * a * c).sqrt();
            // Cancellation-free roots of a x² + b x + c.
            let q = -0.5 * (b + b.signum() * sq);
            let (r1, r2) = (q / a, c / q);
            let (plus, minus) = if r1 > r2 { (r1, r2) } else { (r2, r1) };
            let t = sin_ach_tanh(v, plus, PI) + sin_ach_sinh(v, minus.abs(), PI);
            -TWO_PI * t / sq
        }
    };
    Ok(PsiValue::Finite(value))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PsiQuadrature {
    pub value: f64,
    /// Imaginary part of the full-line integral; zero up to quadrature error.
    pub imag: f64,
    pub error: f64,
}

/// Direct principal-value quadrature of the defining integral.
///
/// The real pole (if any) is located by bisection on the denominator and the
/// integrand is folded symmetrically around it, so nothing here depends on the
/// closed-form roots.
pub fn psi_quadrature(v: f64, p: &PsiParams, q: &QuadratureConfig) -> Result<PsiQuadrature> {
    q.validate()?;
    let s_max = q.truncation;
    let d_end = p.denominator(s_max).abs();
    let rate = if p.a > 0.0 { 2.0 } else { 1.0 };
    let tail = 2.0 / (d_end * rate);
    if !(tail < 0.1 * q.abs_tol) {
        return Err(invalid(format!(
            "truncation S = {s_max} leaves a tail of {tail:e}, above the tolerance"
        )));
    }
    let pole = find_pole(p, s_max);

    let re = |s: f64| (v * s).cos();
    let im = |s: f64| (v * s).sin();

    // Each half-line is integrated separately so that the imaginary parts on
    // [−S, 0] and [0, S] are computed independently of each other.
    let sub = QuadratureConfig {
        abs_tol: q.abs_tol / 8.0,
        ..*q
    };
    let half_line = |f: &dyn Fn(f64) -> f64, sign: f64| -> Result<(f64, f64)> {
        let g = |s: f64| f(sign * s) / p.denominator(s);
        match pole {
            None => integrate(g, 0.0, s_max, &sub).map(|r| (r.value, r.error)),
            Some(s0) => {
                let delta = 0.5 * s0.min(1.0).min(s_max - s0);
                let left = integrate(&g, 0.0, s0 - delta, &sub)?;
                // D(s) = (cosh s − cosh s₀)(a(cosh s + cosh s₀) + b) up to the
                // rounding residue D(s₀), evaluated without cancellation.
                let near = |s: f64| {
                    let dx = 2.0 * (0.5 * (s + s0)).sinh() * (0.5 * (s - s0)).sinh();
                    dx * (p.a * (s.cosh() + s0.cosh()) + p.b)
                };
                let folded = integrate(
                    |t| {
                        if s0 + t == s0 {
                            return 0.0;
                        }
                        let (up, dn) = (s0 + t, s0 - t);
                        f(sign * up) / near(up) + f(sign * dn) / near(dn)
                    },
                    0.0,
                    delta,
                    &sub,
                )?;
                let right = integrate(&g, s0 + delta, s_max, &sub)?;
                Ok((
                    left.value + folded.value + right.value,
                    left.error + folded.error + right.error,
                ))
            }
        }
    };
    let (re_pos, e1) = half_line(&re, 1.0)?;
    let (re_neg, e2) = half_line(&re, -1.0)?;
    let (im_pos, e3) = half_line(&im, 1.0)?;
    let (im_neg, e4) = half_line(&im, -1.0)?;
    Ok(PsiQuadrature {
        value: re_pos + re_neg,
        imag: im_pos + im_neg,
        error: e1 + e2 + e3 + e4,
    })
}

fn find_pole(p: &PsiParams, s_max: f64) -> Option<f64> {
    // D(0) = a + b + c < 0; D is monotone in cosh s beyond any sign change.
    if p.denominator(s_max) <= 0.0 {
        return None;
    }
    let (mut lo, mut hi) = (0.0_f64, s_max);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if p.denominator(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}
