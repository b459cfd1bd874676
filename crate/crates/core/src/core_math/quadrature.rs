//! Globally adaptive Gauss–Kronrod (10/21) quadrature.
//!
//! Every interval handed to the integrator is bisected on the segment with the
//! largest error estimate until the summed error meets the tolerance.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Half-width at which infinite ranges are truncated.
    pub truncation: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            abs_tol: 1e-13,
            rel_tol: 1e-11,
            truncation: 40.0,
            max_subdivisions: 200_000,
        }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0 && self.rel_tol > 0.0) {
            return Err(Error::InvalidParameter("tolerances must be positive".into()));
        }
        if !(self.truncation > 0.0) {
            return Err(Error::InvalidParameter("truncation must be positive".into()));
        }
        if self.max_subdivisions == 0 {
            return Err(Error::InvalidParameter("max_subdivisions must be positive".into()));
        }
        Ok(())
    }

    pub fn with_tolerance(abs_tol: f64, rel_tol: f64) -> Self {
        Self {
            abs_tol,
            rel_tol,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689,
    0.973_906_528_517_171_720_077_964_012_084,
    0.930_157_491_355_708_226_001_207_180_060,
    0.865_063_366_688_984_510_732_096_688_423,
    0.780_817_726_586_416_897_063_717_578_345,
    0.679_409_568_299_024_406_234_327_365_115,
    0.562_757_134_668_604_683_339_000_099_273,
    0.433_395_394_129_247_190_799_265_943_166,
    0.294_392_862_701_460_198_131_126_603_104,
    0.148_874_338_981_631_210_884_826_001_130,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062,
    0.032_558_162_307_964_727_478_818_972_459,
    0.054_755_896_574_351_996_031_381_300_245,
    0.075_039_674_810_919_952_767_043_140_916,
    0.093_125_454_583_697_605_535_065_465_083,
    0.109_387_158_802_297_641_899_210_590_326,
    0.123_491_976_262_065_851_077_508_125_361,
    0.134_709_217_311_473_325_928_054_001_772,
    0.142_775_938_577_060_080_797_094_273_139,
    0.147_739_104_901_338_491_374_841_515_972,
    0.149_445_554_002_916_905_664_936_468_390,
];

// Gauss weights for the odd-indexed Kronrod nodes.
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893,
    0.149_451_349_150_580_593_145_776_339_658,
    0.219_086_362_515_982_043_995_534_934_228,
    0.269_266_719_309_996_355_091_226_921_569,
    0.295_524_224_714_752_870_173_892_994_651,
];

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    floor: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.excess() == other.excess()
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.excess().total_cmp(&other.excess())
    }
}

impl Segment {
    fn excess(&self) -> f64 {
        self.error - self.floor
    }
}

fn gk21<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Segment {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut lo = [0.0; 10];
    let mut hi = [0.0; 10];
    let mut kronrod = fc * WGK[10];
    let mut gauss = 0.0;
    for j in 0..10 {
        let dx = half * XGK[j];
        lo[j] = f(center - dx);
        hi[j] = f(center + dx);
        let pair = lo[j] + hi[j];
        kronrod += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    let value = kronrod * half;
    let mut error = ((kronrod - gauss) * half).abs();
    // QUADPACK's error scaling: less pessimistic for smooth integrands.
    if error > 0.0 {
        let mean = 0.5 * kronrod;
        let mut asc = WGK[10] * (fc - mean).abs();
        for j in 0..10 {
            asc += WGK[j] * ((lo[j] - mean).abs() + (hi[j] - mean).abs());
        }
        let asc = asc * half.abs();
        if asc > 0.0 {
            error = asc * (200.0 * error / asc).powf(1.5).min(1.0);
        }
    }
    let mut resabs = WGK[10] * fc.abs();
    for j in 0..10 {
        resabs += WGK[j] * (lo[j].abs() + hi[j].abs());
    }
    let floor = 50.0 * f64::EPSILON * resabs * half.abs();
    error = error.max(floor);
    Segment { a, b, value, error, floor }
}

/// Integrates `f` over `[a, b]`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, cfg: &QuadratureConfig) -> Result<Integral> {
    integrate_over(f, &[a, b], cfg)
}

/// Integrates `f` over the union of consecutive intervals delimited by `points`
/// (sorted; singularities and kinks belong on the breakpoints).
pub fn integrate_over<F: Fn(f64) -> f64>(f: F, points: &[f64], cfg: &QuadratureConfig) -> Result<Integral> {
    cfg.validate()?;
    if points.len() < 2 {
        return Ok(Integral { value: 0.0, error: 0.0, evaluations: 0 });
    }
    let mut heap = BinaryHeap::with_capacity(points.len() * 2);
    let mut evaluations = 0usize;
    for w in points.windows(2) {
        if w[1] == w[0] {
            continue;
        }
        heap.push(gk21(&f, w[0], w[1]));
        evaluations += 21;
    }
    let budget = cfg.max_subdivisions.max(heap.len());
    let (mut value, mut error, mut floor) = totals(&heap);
    let mut steps = 0usize;
    loop {
        if !value.is_finite() {
            return Err(Error::Domain("integrand produced a non-finite value".into()));
        }
        let target = cfg.abs_tol.max(cfg.rel_tol * value.abs());
        // Rounding noise cannot be reduced by bisection; only the excess counts.
        if error - floor <= target {
            let (value, error, _) = totals(&heap);
            return Ok(Integral { value, error, evaluations });
        }
        if heap.len() >= budget {
            return Err(Error::NonConvergence { value, error, subdivisions: heap.len() });
        }
        let worst = heap.pop().expect("non-empty heap");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a.min(worst.b) || mid >= worst.a.max(worst.b) || worst.error <= worst.floor {
            // Nothing left to gain on this segment.
            error -= worst.error - worst.floor;
            heap.push(Segment { error: worst.floor, ..worst });
            continue;
        }
        let left = gk21(&f, worst.a, mid);
        let right = gk21(&f, mid, worst.b);
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        floor += left.floor + right.floor - worst.floor;
        heap.push(left);
        heap.push(right);
        evaluations += 42;
        steps += 1;
        if steps % 4096 == 0 {
            (value, error, floor) = totals(&heap);
        }
    }
}

fn totals(heap: &BinaryHeap<Segment>) -> (f64, f64, f64) {
    heap.iter()
        .fold((0.0, 0.0, 0.0), |(v, e, r), s| (v + s.value, e + s.error, r + s.floor))
}

/// Breakpoints splitting `[a, b]` into panels no wider than `width`.
pub fn panels(a: f64, b: f64, width: f64) -> Vec<f64> {
    let n = (((b - a) / width).ceil() as usize).max(1);
    let h = (b - a) / n as f64;
    let mut pts: Vec<f64> = (0..n).map(|i| a + i as f64 * h).collect();
    pts.push(b);
    pts
}
