//! Numerics for observers moving through ambient wave noise.
//!
//! A uniformly accelerated observer recording a field driven by noise with the
//! Lorentz-invariant spectrum f₀|ω| perceives a Planck-shaped local spectrum.
//! A plane mirror deforms that spectrum in a way that encodes the mirror's
//! distance and orientation, which [`localize`] inverts.

pub mod core_math;
pub mod error;
pub mod freefield;
pub mod grid;
pub mod localize;
pub mod mirror;
pub mod montecarlo;
pub mod trajectories;

pub use error::{Error, Result};
pub use core_math::{QuadratureConfig, Vec3};
pub use freefield::{SourceSpectrum, Window, WindowKind};
pub use grid::{CorrelationGrid, Grid, GridKind, WignerGrid};
pub use localize::{FitConfig, LocalizationResult};
pub use mirror::MirrorScene;
pub use montecarlo::{EstimatorConfig, PlaneWaveEnsemble};
pub use trajectories::{SpacetimeEvent, TrajectorySpec};
