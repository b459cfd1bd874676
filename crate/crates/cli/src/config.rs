use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use rindler_core::grid::linspace;
use rindler_core::{FitConfig, MirrorScene, SourceSpectrum, TrajectorySpec, Window, WindowKind};

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Units {
    pub c0: f64,
}

impl Default for Units {
    fn default() -> Self {
        Self { c0: 1.0 }
    }
}

/// `[min, max, n]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Axis(pub f64, pub f64, pub usize);

impl Axis {
    pub fn points(&self) -> Vec<f64> {
        linspace(self.0, self.1, self.2)
    }

    fn check(&self, name: &str) -> Result<(), CliError> {
        if !(self.0.is_finite() && self.1.is_finite()) || self.2 == 0 || (self.2 > 1 && self.0 >= self.1) {
            return Err(CliError::Config(format!("grids.{name} must be [min, max, n] with min < max and n >= 1")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Grids {
    pub eta: Axis,
    pub nu: Axis,
    pub tau_prime: Axis,
}

impl Default for Grids {
    fn default() -> Self {
        Self { eta: Axis(-3.0, 3.0, 25), nu: Axis(0.2, 4.0, 40), tau_prime: Axis(-6.0, 6.0, 481) }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Estimator {
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "M")]
    pub m: usize,
    pub seed: u64,
    pub window: WindowKind,
    #[serde(rename = "Tc")]
    pub tc: f64,
}

impl Default for Estimator {
    fn default() -> Self {
        Self { n: 4096, m: 2000, seed: 0, window: WindowKind::Gaussian, tc: 1.5 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Output {
    pub directory: PathBuf,
    pub prefix: String,
}

impl Default for Output {
    fn default() -> Self {
        Self { directory: PathBuf::from("."), prefix: "rindler".into() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub units: Units,
    #[serde(default = "default_spectrum")]
    pub spectrum: SourceSpectrum,
    #[serde(default)]
    pub trajectory: Option<TrajectorySpec>,
    #[serde(default)]
    pub scene: Option<MirrorScene>,
    #[serde(default)]
    pub grids: Grids,
    #[serde(default)]
    pub estimator: Estimator,
    #[serde(default)]
    pub fit: FitConfig,
    #[serde(default)]
    pub output: Output,
}

fn default_spectrum() -> SourceSpectrum {
    SourceSpectrum { f0: 1.0, f1: 0.0, eps: 0.0 }
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            units: Units::default(),
            spectrum: default_spectrum(),
            trajectory: None,
            scene: None,
            grids: Grids::default(),
            estimator: Estimator::default(),
            fit: FitConfig::default(),
            output: Output::default(),
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| match e {
            CliError::Config(m) => CliError::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let cfg: RunConfig = serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let c0 = self.units.c0;
        if !(c0 > 0.0 && c0.is_finite()) {
            return Err(CliError::Config("units.c0 must be positive".into()));
        }
        self.spectrum.validate()?;
        if let Some(t) = &self.trajectory {
            t.validate(c0)?;
        }
        if let Some(s) = &self.scene {
            if s.c0 != c0 {
                return Err(CliError::Config(format!("scene.c0 = {} differs from units.c0 = {c0}", s.c0)));
            }
            if self.trajectory.is_some() {
                return Err(CliError::Config(
                    "give either a trajectory or a scene; a scene fixes the trajectory".into(),
                ));
            }
        }
        self.grids.eta.check("eta")?;
        self.grids.nu.check("nu")?;
        self.grids.tau_prime.check("tau_prime")?;
        if self.estimator.n == 0 || self.estimator.m == 0 {
            return Err(CliError::Config("estimator.N and estimator.M must be positive".into()));
        }
        Window::new(self.estimator.window, self.estimator.tc)?;
        self.fit.validate()?;
        if self.output.prefix.is_empty() || self.output.prefix.contains(['/', '\\']) {
            return Err(CliError::Config("output.prefix must be a plain file-name stem".into()));
        }
        Ok(())
    }

    /// The trajectory being recorded: the scene's oblique hyperbola, the
    /// explicit trajectory, or a unit Rindler observer.
    pub fn effective_trajectory(&self) -> TrajectorySpec {
        match (&self.scene, &self.trajectory) {
            (Some(s), _) => s.trajectory(),
            (None, Some(t)) => *t,
            (None, None) => TrajectorySpec::Rindler { xi: 1.0 },
        }
    }

    /// Length ξ that converts η = c₀τ/ξ and ν = ξω/c₀; 1 for trajectories
    /// without an acceleration length.
    pub fn length_scale(&self) -> f64 {
        match self.effective_trajectory() {
            TrajectorySpec::Rindler { xi }
            | TrajectorySpec::ObliqueRindler { xi, .. }
            | TrajectorySpec::HelicoidAccelerated { xi, .. } => xi,
            _ => 1.0,
        }
    }

    pub fn window(&self) -> Window {
        Window { kind: self.estimator.window, tc: self.estimator.tc }
    }
}
