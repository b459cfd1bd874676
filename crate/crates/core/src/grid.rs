//! Sampled (η, ν) and (τ, τ′) grids and their CSV form.
//!
//! ```text
//! # kind=wigner
//! # eta_grid=-3:3:25
//! # nu_grid=0.2:4:40
//! # window=analytic
//! # eta/nu,0.2,0.297...,...
//! -3,0.081...,...
//! ```
//! Numbers use the shortest representation that parses back to the same f64.

use std::fmt::Write as _;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::core_math::QuadratureConfig;
use crate::error::{Error, Result};
use crate::freefield::{windowed_wigner, Window};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GridKind {
    /// W over (η, ν).
    Wigner,
    /// Relative correction R over (η, ν).
    Correction,
    /// Covariance over (τ, τ′).
    Correlation,
}

impl GridKind {
    fn as_str(self) -> &'static str {
        match self {
            GridKind::Wigner => "wigner",
            GridKind::Correction => "correction",
            GridKind::Correlation => "correlation",
        }
    }

    fn parse(s: &str) -> Result<Self> {
        match s {
            "wigner" => Ok(GridKind::Wigner),
            "correction" => Ok(GridKind::Correction),
            "correlation" => Ok(GridKind::Correlation),
            other => Err(Error::Format(format!("unknown grid kind '{other}'"))),
        }
    }

    fn header(self) -> &'static str {
        match self {
            GridKind::Correlation => "tau/tau_prime",
            _ => "eta/nu",
        }
    }
}

/// Row-major matrix over `rows × cols`; rows are η (or τ), columns ν (or τ′).
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    pub kind: GridKind,
    pub rows: Vec<f64>,
    pub cols: Vec<f64>,
    pub values: Vec<f64>,
    /// "analytic", or a window label such as "gaussian:1.5".
    pub window: String,
}

pub type WignerGrid = Grid;
pub type CorrelationGrid = Grid;

/// n points from lo to hi inclusive (n = 1 gives lo).
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n)
            .map(|i| if i == n - 1 { hi } else { lo + (hi - lo) * i as f64 / (n - 1) as f64 })
            .collect(),
    }
}

impl Grid {
    pub fn new(kind: GridKind, rows: Vec<f64>, cols: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if rows.is_empty() || cols.is_empty() || values.len() != rows.len() * cols.len() {
            return Err(Error::InvalidParameter(format!(
                "grid shape {}x{} does not match {} values",
                rows.len(),
                cols.len(),
                values.len()
            )));
        }
        Ok(Self { kind, rows, cols, values, window: "analytic".into() })
    }

    /// Evaluates `f(row, col)` at every node in parallel; the result does not
    /// depend on scheduling.
    pub fn fill<F>(kind: GridKind, rows: Vec<f64>, cols: Vec<f64>, f: F) -> Result<Self>
    where
        F: Fn(f64, f64) -> Result<f64> + Sync,
    {
        let nc = cols.len();
        let values = (0..rows.len() * nc)
            .into_par_iter()
            .map(|k| f(rows[k / nc], cols[k % nc]))
            .collect::<Result<Vec<_>>>()?;
        Self::new(kind, rows, cols, values)
    }

    pub fn with_window(mut self, label: impl Into<String>) -> Self {
        self.window = label.into();
        self
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.cols.len() + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let n = self.cols.len();
        &self.values[i * n..(i + 1) * n]
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn same_axes(&self, other: &Grid) -> bool {
        self.rows == other.rows && self.cols == other.cols
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        let axis = |v: &[f64]| format!("{}:{}:{}", v[0], v[v.len() - 1], v.len());
        let _ = writeln!(s, "# kind={}", self.kind.as_str());
        let _ = writeln!(s, "# eta_grid={}", axis(&self.rows));
        let _ = writeln!(s, "# nu_grid={}", axis(&self.cols));
        let _ = writeln!(s, "# window={}", self.window);
        s.push_str("# ");
        s.push_str(self.kind.header());
        for c in &self.cols {
            let _ = write!(s, ",{c}");
        }
        s.push('\n');
        for (i, r) in self.rows.iter().enumerate() {
            let _ = write!(s, "{r}");
            for v in self.row(i) {
                let _ = write!(s, ",{v}");
            }
            s.push('\n');
        }
        s
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut kind = GridKind::Wigner;
        let mut window = "analytic".to_string();
        let mut cols: Option<Vec<f64>> = None;
        let mut rows = Vec::new();
        let mut values = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(meta) = line.strip_prefix('#') {
                let meta = meta.trim();
                if let Some(rest) = meta.strip_prefix("eta/nu").or_else(|| meta.strip_prefix("tau/tau_prime")) {
                    cols = Some(parse_list(rest.trim_start_matches(','), lineno)?);
                } else if let Some((k, v)) = meta.split_once('=') {
                    match k.trim() {
                        "kind" => kind = GridKind::parse(v.trim())?,
                        "window" => window = v.trim().to_string(),
                        _ => {}
                    }
                }
                continue;
            }
            let ncols = cols
                .as_ref()
                .ok_or_else(|| Error::Format("data row before the '# eta/nu' header".into()))?
                .len();
            let nums = parse_list(line, lineno)?;
            if nums.len() != ncols + 1 {
                return Err(Error::Format(format!(
                    "line {}: expected {} fields, found {}",
                    lineno + 1,
                    ncols + 1,
                    nums.len()
                )));
            }
            rows.push(nums[0]);
            values.extend_from_slice(&nums[1..]);
        }
        let cols = cols.ok_or_else(|| Error::Format("missing '# eta/nu' header".into()))?;
        Ok(Self::new(kind, rows, cols, values)?.with_window(window))
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv())?;
        Ok(())
    }

    pub fn read_csv(path: &Path) -> Result<Self> {
        Self::from_csv(&std::fs::read_to_string(path)?)
    }
}

fn parse_list(s: &str, lineno: usize) -> Result<Vec<f64>> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|e| Error::Format(format!("line {}: '{}': {e}", lineno + 1, t.trim())))
        })
        .collect()
}

/// Piecewise-linear W(ν) through one grid row, extended evenly to ν < 0 when
/// the row starts at ν ≥ 0 and linearly past both ends.
fn row_interpolant<'a>(nu: &'a [f64], w: &'a [f64]) -> impl Fn(f64) -> f64 + 'a {
    let even = nu[0] >= 0.0;
    move |x: f64| {
        let x = if even { x.abs() } else { x };
        let n = nu.len();
        if n == 1 {
            return w[0];
        }
        let k = match nu.partition_point(|&v| v <= x) {
            0 => 1,
            k if k >= n => n - 1,
            k => k,
        };
        let t = (x - nu[k - 1]) / (nu[k] - nu[k - 1]);
        w[k - 1] + t * (w[k] - w[k - 1])
    }
}

/// Windowed spectrum of a sampled (η, ν) grid: each η row is interpolated in ν
/// and convolved with the window kernel (T_c in seconds, so ω = c₀ν/ξ).
pub fn windowed_wigner_grid(
    grid: &WignerGrid,
    window: &Window,
    xi: f64,
    c0: f64,
    q: &QuadratureConfig,
) -> Result<WignerGrid> {
    if grid.kind == GridKind::Correlation {
        return Err(Error::InvalidParameter("windowing needs an (eta, nu) grid".into()));
    }
    let omegas: Vec<f64> = grid.cols.iter().map(|n| n * c0 / xi).collect();
    let rows = (0..grid.rows.len())
        .into_par_iter()
        .map(|i| {
            let f = row_interpolant(&grid.cols, grid.row(i));
            windowed_wigner(&|om| f(om * xi / c0), window, &omegas, q)
        })
        .collect::<Result<Vec<_>>>()?;
    let values = rows.into_iter().flatten().collect();
    Ok(Grid::new(grid.kind, grid.rows.clone(), grid.cols.clone(), values)?.with_window(window.label()))
}
