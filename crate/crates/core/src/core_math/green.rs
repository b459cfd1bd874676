use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

pub type Vec3 = [f64; 3];

pub(crate) fn dist(x: &Vec3, y: &Vec3) -> f64 {
    let d = [x[0] - y[0], x[1] - y[1], x[2] - y[2]];
    (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt()
}

/// Outgoing free-space Green's function e^{i(ω/c₀)r}/(4πr).
pub fn green_hom(omega: f64, x: &Vec3, y: &Vec3, c0: f64) -> Result<Complex64> {
    let r = dist(x, y);
    if r == 0.0 {
        return Err(Error::CoincidentPoints);
    }
    Ok(Complex64::from_polar(1.0 / (4.0 * PI * r), omega / c0 * r))
}

/// Relative mismatch in the Helmholtz–Kirchhoff identity
/// Im Ĝ(x₁, x₂) = (ω/c₀) ∮_{|y|=L} conj Ĝ(x₁, y) Ĝ(x₂, y) dσ(y).
///
/// The sphere is sampled by a Fibonacci lattice with a seeded random offset
/// and rotation, so the estimate is unbiased over seeds yet converges much
/// faster than independent uniform nodes.
pub fn hk_residual(omega: f64, x1: &Vec3, x2: &Vec3, radius: f64, nodes: usize, c0: f64, seed: u64) -> Result<f64> {
    if nodes == 0 || !(radius > 0.0) {
        return Err(Error::InvalidParameter("need nodes > 0 and L > 0".into()));
    }
    let k = omega / c0;
    let lhs = if x1 == x2 {
        k / (4.0 * PI)
    } else {
        green_hom(omega, x1, x2, c0)?.im
    };

    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let rot = random_rotation(&mut rng);
    let offset: f64 = rng.random();
    let twist: f64 = rng.random();
    let golden = 0.5 * (1.0 + 5f64.sqrt());

    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..nodes {
        let z = 1.0 - 2.0 * (i as f64 + offset) / nodes as f64;
        let rho = (1.0 - z * z).max(0.0).sqrt();
        let phi = 2.0 * PI * ((i as f64 / golden + twist) % 1.0);
        let u = [rho * phi.cos(), rho * phi.sin(), z];
        let y = apply(&rot, &u).map(|c| c * radius);
        let g1 = green_hom(omega, x1, &y, c0)?;
        let g2 = green_hom(omega, x2, &y, c0)?;
        acc += g1.conj() * g2;
    }
    let area = 4.0 * PI * radius * radius;
    let rhs = k * acc * (area / nodes as f64);
    let scale = if lhs.abs() > 1e-12 * k.abs() / (4.0 * PI) {
        lhs.abs()
    } else {
        k.abs() / (4.0 * PI)
    };
    Ok((rhs - lhs).norm() / scale)
}

fn random_rotation(rng: &mut ChaCha20Rng) -> [[f64; 3]; 3] {
    let mut q = [0.0f64; 4];
    for c in q.iter_mut() {
        *c = rng.sample(StandardNormal);
    }
    let n = q.iter().map(|c| c * c).sum::<f64>().sqrt();
    let [w, x, y, z] = q.map(|c| c / n);
    [
        [1.0 - 2.0 * (y * y + z * z), 2.0 * (x * y - w * z), 2.0 * (x * z + w * y)],
        [2.0 * (x * y + w * z), 1.0 - 2.0 * (x * x + z * z), 2.0 * (y * z - w * x)],
        [2.0 * (x * z - w * y), 2.0 * (y * z + w * x), 1.0 - 2.0 * (x * x + y * y)],
    ]
}

fn apply(m: &[[f64; 3]; 3], u: &Vec3) -> Vec3 {
    [0, 1, 2].map(|r| m[r][0] * u[0] + m[r][1] * u[1] + m[r][2] * u[2])
}
