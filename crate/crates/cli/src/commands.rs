use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Value};

use rindler_core::freefield::{
    circular_wigner, inertial_wigner, point_covariance, rindler_wigner, rindler_wigner_regularized, CircularMode,
};
use rindler_core::localize::{fit_distance_stationary, fit_scene};
use rindler_core::mirror::{correction_grid, mirror_autocorr_regularized};
use rindler_core::montecarlo::estimate_wigner;
use rindler_core::trajectories::separation;
use rindler_core::{EstimatorConfig, Grid, GridKind, QuadratureConfig, SourceSpectrum, TrajectorySpec};

use crate::config::RunConfig;
use crate::CliError;

struct Writer {
    dir: PathBuf,
    prefix: String,
    files: Vec<String>,
}

impl Writer {
    fn new(cfg: &RunConfig) -> Result<Self, CliError> {
        std::fs::create_dir_all(&cfg.output.directory)?;
        Ok(Self { dir: cfg.output.directory.clone(), prefix: cfg.output.prefix.clone(), files: Vec::new() })
    }

    fn path(&mut self, suffix: &str) -> PathBuf {
        let name = format!("{}_{suffix}", self.prefix);
        self.files.push(name.clone());
        self.dir.join(name)
    }

    fn grid(&mut self, suffix: &str, g: &Grid) -> Result<(), CliError> {
        let p = self.path(&format!("{suffix}.csv"));
        g.write_csv(&p)?;
        eprintln!("wrote {}", p.display());
        Ok(())
    }

    fn json(&mut self, suffix: &str, v: &impl Serialize) -> Result<(), CliError> {
        let p = self.path(&format!("{suffix}.json"));
        let text = serde_json::to_string_pretty(v).map_err(|e| CliError::Config(e.to_string()))? + "\n";
        std::fs::write(&p, text)?;
        eprintln!("wrote {}", p.display());
        Ok(())
    }

    /// Run metadata; the output location is left out so that reruns into
    /// different directories produce identical bytes.
    fn meta(&mut self, command: &str, cfg: &RunConfig, extra: Value) -> Result<(), CliError> {
        let mut config = serde_json::to_value(cfg).map_err(|e| CliError::Config(e.to_string()))?;
        if let Value::Object(m) = &mut config {
            m.remove("output");
        }
        let mut files = self.files.clone();
        files.push(format!("{}_meta.json", self.prefix));
        let meta = json!({
            "command": command,
            "version": env!("CARGO_PKG_VERSION"),
            "config": config,
            "files": files,
            "summary": extra,
        });
        self.json("meta", &meta)
    }
}

/// Analytic local spectrum of the free field along `traj`.
fn free_wigner(traj: &TrajectorySpec, s: &SourceSpectrum, tau: f64, omega: f64, c0: f64, q: &QuadratureConfig) -> Result<f64, CliError> {
    let needs_f0_only = |what: &str| {
        if s.f1 != 0.0 {
            Err(CliError::Config(format!("the {what} spectrum is tabulated for f1 = 0 only")))
        } else {
            Ok(())
        }
    };
    Ok(match *traj {
        TrajectorySpec::Rindler { xi } | TrajectorySpec::ObliqueRindler { xi, .. } => {
            needs_f0_only("Rindler")?;
            if s.eps > 0.0 {
                rindler_wigner_regularized(xi, s.f0, s.eps, tau, omega, c0)?
            } else {
                rindler_wigner(xi, s.f0, omega, c0)
            }
        }
        TrajectorySpec::Inertial { v } => inertial_wigner(v, s, omega, c0)?,
        TrajectorySpec::Stationary { .. } => inertial_wigner(0.0, s, omega, c0)?,
        TrajectorySpec::Circular { gamma, p } => {
            needs_f0_only("circular")?;
            circular_wigner(gamma, p, s.f0, omega, CircularMode::Quadrature, q)?
        }
        other => {
            return Err(CliError::Config(format!("no analytic spectrum is available for trajectory {other:?}")));
        }
    })
}

pub fn spectrum(cfg: &RunConfig) -> Result<(), CliError> {
    let c0 = cfg.units.c0;
    let xi = cfg.length_scale();
    let traj = cfg.effective_trajectory();
    let q = QuadratureConfig::default();
    let (etas, nus) = (cfg.grids.eta.points(), cfg.grids.nu.points());
    let free = Grid::fill(GridKind::Wigner, etas.clone(), nus.clone(), |e, n| {
        free_wigner(&traj, &cfg.spectrum, e * xi / c0, n * c0 / xi, c0, &q).map_err(|e| match e {
            CliError::Config(m) | CliError::Failed(m) => rindler_core::Error::InvalidParameter(m),
        })
    })?;
    let mut out = Writer::new(cfg)?;
    out.grid("free", &free)?;
    let mut summary = json!({ "length_scale": xi });
    if let Some(scene) = &cfg.scene {
        let r = correction_grid(scene, etas, nus)?;
        let values = free.values.iter().zip(&r.values).map(|(w, r)| w * (1.0 - r)).collect();
        let mirror = Grid::new(GridKind::Wigner, free.rows.clone(), free.cols.clone(), values)?;
        out.grid("mirror", &mirror)?;
        out.grid("correction", &r)?;
        let delta = scene.alpha == 0.0 && scene.alpha0() == 0.0;
        summary = json!({
            "length_scale": xi,
            "alpha": scene.alpha,
            "alpha0": scene.alpha0(),
            "max_abs_correction": r.max_abs(),
            "delta_at_zero_frequency": delta,
        });
    }
    out.meta("spectrum", cfg, summary)
}

fn trapezoid(x: &[f64]) -> Vec<f64> {
    let n = x.len();
    (0..n)
        .map(|i| {
            let left = if i > 0 { x[i] - x[i - 1] } else { 0.0 };
            let right = if i + 1 < n { x[i + 1] - x[i] } else { 0.0 };
            0.5 * (left + right)
        })
        .collect()
}

pub fn simulate(cfg: &RunConfig) -> Result<(), CliError> {
    let c0 = cfg.units.c0;
    let xi = cfg.length_scale();
    let s = cfg.spectrum;
    let traj = cfg.effective_trajectory();
    let window = cfg.window();
    let (etas, nus) = (cfg.grids.eta.points(), cfg.grids.nu.points());
    let taus: Vec<f64> = etas.iter().map(|e| e * xi / c0).collect();
    let omegas: Vec<f64> = nus.iter().map(|n| n * c0 / xi).collect();
    let tau_primes = cfg.grids.tau_prime.points();
    let est_cfg = EstimatorConfig {
        realizations: cfg.estimator.m,
        taus: taus.clone(),
        tau_primes: tau_primes.clone(),
        omegas: omegas.clone(),
        window,
        seed: cfg.estimator.seed,
    };
    let est = estimate_wigner(&s, &traj, &est_cfg, cfg.estimator.n, cfg.scene.is_some(), c0)?;
    let label = window.label();
    let relabel = |kind, g: &Grid| -> Result<Grid, CliError> {
        Ok(Grid::new(kind, etas.clone(), nus.clone(), g.values.clone())?.with_window(label.clone()))
    };

    // Expected value of the estimator: the same lag sum over the exact
    // regularized covariance.
    let weights: Vec<f64> = trapezoid(&tau_primes).iter().zip(&tau_primes).map(|(w, &t)| w * window.weight(t)).collect();
    let free_cov = |tau: f64, tp: f64| {
        let (dt, dx) = separation(&traj, tau, tp, c0);
        point_covariance(s.f0, s.eps, (dx[0] * dx[0] + dx[1] * dx[1] + dx[2] * dx[2]).sqrt() / c0, dt)
    };
    let lag_sum = |cov: &dyn Fn(f64, f64) -> Result<f64, rindler_core::Error>, tau: f64, om: f64| {
        let mut acc = 0.0;
        for (w, &tp) in weights.iter().zip(&tau_primes) {
            if *w != 0.0 {
                acc += w * cov(tau, tp)? * (om * tp).cos();
            }
        }
        Ok::<f64, rindler_core::Error>(acc)
    };
    let free_expected = Grid::fill(GridKind::Wigner, taus.clone(), omegas.clone(), |t, om| {
        lag_sum(&|t, tp| Ok(free_cov(t, tp)), t, om)
    })?;
    let expected = match &cfg.scene {
        Some(scene) => Grid::fill(GridKind::Wigner, taus.clone(), omegas.clone(), |t, om| {
            lag_sum(&|t, tp| mirror_autocorr_regularized(scene, s.f0, s.eps, t, tp), t, om)
        })?,
        None => free_expected.clone(),
    };

    let mut out = Writer::new(cfg)?;
    out.grid("wigner", &relabel(GridKind::Wigner, &est.mean)?)?;
    out.grid("wigner_stderr", &relabel(GridKind::Wigner, &est.stderr)?)?;
    out.grid("flatness", &relabel(GridKind::Wigner, &est.flat_diff)?)?;
    out.grid("flatness_stderr", &relabel(GridKind::Wigner, &est.flat_stderr)?)?;
    out.grid("expected", &relabel(GridKind::Wigner, &expected)?)?;

    let n = est.mean.values.len();
    let inside = (0..n)
        .filter(|&k| (est.mean.values[k] - expected.values[k]).abs() <= 3.0 * est.stderr.values[k])
        .count();
    let ref_row = est.mean.rows.iter().position(|&t| t == est.reference_tau).unwrap_or(0);
    let nc = nus.len();
    let flat_z = (0..n)
        .filter(|k| k / nc != ref_row)
        .map(|k| est.flat_diff.values[k].abs() / est.flat_stderr.values[k])
        .fold(0.0f64, f64::max);
    let mut summary = json!({
        "length_scale": xi,
        "reference_eta": est.reference_tau * c0 / xi,
        "fraction_within_3se_of_expected": inside as f64 / n as f64,
        "flatness_max_z": flat_z,
        "flat_within_3se": flat_z <= 3.0,
    });
    if cfg.scene.is_some() {
        let r: Vec<f64> = est.mean.values.iter().zip(&free_expected.values).map(|(w, f)| 1.0 - w / f).collect();
        let r_se: Vec<f64> = est.stderr.values.iter().zip(&free_expected.values).map(|(e, f)| e / f.abs()).collect();
        let rg = Grid::new(GridKind::Correction, etas.clone(), nus.clone(), r)?.with_window(label.clone());
        let rs = Grid::new(GridKind::Correction, etas.clone(), nus.clone(), r_se)?.with_window(label.clone());
        out.grid("correction", &rg)?;
        out.grid("correction_stderr", &rs)?;
        summary["max_abs_correction"] = json!(rg.max_abs());
    }
    out.meta("simulate", cfg, summary)
}

/// `omega,W` pairs; blank lines, `#` lines and a non-numeric header are skipped.
fn read_pairs(path: &Path) -> Result<Vec<(f64, f64)>, CliError> {
    let text = std::fs::read_to_string(path)?;
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        let parsed = match fields.as_slice() {
            [a, b] => a.parse::<f64>().ok().zip(b.parse::<f64>().ok()),
            _ => None,
        };
        match parsed {
            Some(p) => out.push(p),
            None if out.is_empty() && i == 0 => {}
            None => {
                return Err(CliError::Config(format!("{}: line {}: expected 'omega,W'", path.display(), i + 1)));
            }
        }
    }
    Ok(out)
}

fn sibling_stderr(input: &Path) -> Option<PathBuf> {
    let stem = input.file_stem()?.to_str()?;
    let p = input.with_file_name(format!("{stem}_stderr.csv"));
    p.exists().then_some(p)
}

pub fn localize(cfg: &RunConfig, input: &Path, stderr: Option<&Path>, stationary: bool) -> Result<(), CliError> {
    let mut out = Writer::new(cfg)?;
    if stationary {
        let obs = read_pairs(input)?;
        let fit = fit_distance_stationary(&obs, cfg.spectrum.f0, cfg.units.c0)?;
        crate::emit(&serde_json::to_string(&fit).map_err(|e| CliError::Config(e.to_string()))?);
        return out.json("distance", &fit);
    }
    let r = Grid::read_csv(input).map_err(|e| CliError::Config(format!("{}: {e}", input.display())))?;
    if r.kind != GridKind::Correction {
        return Err(CliError::Config(format!("{}: expected a correction grid", input.display())));
    }
    let se_path = stderr.map(Path::to_path_buf).or_else(|| sibling_stderr(input));
    let se = se_path
        .map(|p| Grid::read_csv(&p).map_err(|e| CliError::Config(format!("{}: {e}", p.display()))))
        .transpose()?;
    let fit = fit_scene(&r, se.as_ref(), &cfg.fit)?;
    let xi = cfg.length_scale();
    let brief = json!({
        "alpha": fit.alpha,
        "alpha0": fit.alpha0,
        "xi0": fit.alpha0 * xi,
        "residual": fit.residual,
        "at_boundary": fit.at_boundary,
        "no_obstacle": fit.no_obstacle,
    });
    crate::emit(&brief.to_string());
    let report = json!({ "result": fit, "xi": xi, "xi0": fit.alpha0 * xi });
    out.json("localization", &report)
}
