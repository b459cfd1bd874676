//! Shared fixtures for the criterion benchmarks.

use rindler_core::grid::linspace;
use rindler_core::mirror::correction_grid;
use rindler_core::{Grid, MirrorScene, Result};

/// Scene with ξ = 1 and the (η, ν) axes the fits are timed on.
pub fn scene(alpha: f64, alpha0: f64) -> Result<MirrorScene> {
    MirrorScene::normalized(alpha, alpha0)
}

pub fn axes() -> (Vec<f64>, Vec<f64>) {
    (linspace(-2.0, 2.0, 9), linspace(0.2, 3.0, 15))
}

/// Noise-free R grid for a scene on [`axes`].
pub fn correction_fixture(alpha: f64, alpha0: f64) -> Result<Grid> {
    let (etas, nus) = axes();
    correction_grid(&scene(alpha, alpha0)?, etas, nus)
}
