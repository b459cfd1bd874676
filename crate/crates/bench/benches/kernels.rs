use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use rindler_bench::{axes, correction_fixture, scene};
use rindler_core::core_math::{psi_closed, PsiParams};
use rindler_core::localize::{fit_distance_stationary, fit_scene};
use rindler_core::mirror::{correction_grid, correction_r, stationary_mirror_spectrum};
use rindler_core::montecarlo::{field_at, sample_ensemble};
use rindler_core::{FitConfig, SourceSpectrum, SpacetimeEvent};

fn psi(c: &mut Criterion) {
    let general = PsiParams::new(0.3, -0.2, -1.5).unwrap();
    let pure = PsiParams::new(0.0, 0.0, -2.0).unwrap();
    c.bench_function("psi_closed/general", |b| b.iter(|| psi_closed(black_box(1.7), &general).unwrap()));
    c.bench_function("psi_closed/a=b=0", |b| b.iter(|| psi_closed(black_box(1.7), &pure).unwrap()));
}

fn correction(c: &mut Criterion) {
    let s = scene(0.4, 0.8).unwrap();
    let normal = scene(0.0, 0.8).unwrap();
    c.bench_function("correction_r/oblique", |b| b.iter(|| correction_r(&s, black_box(0.3), black_box(1.2)).unwrap()));
    c.bench_function("correction_r/normal", |b| b.iter(|| correction_r(&normal, black_box(0.3), black_box(1.2)).unwrap()));
    let (etas, nus) = axes();
    c.bench_function("correction_grid/9x15", |b| {
        b.iter(|| correction_grid(&s, etas.clone(), nus.clone()).unwrap())
    });
}

fn field(c: &mut Criterion) {
    let spectrum = SourceSpectrum { f0: 1.0, f1: 0.0, eps: 0.05 };
    let e = sample_ensemble(&spectrum, 4096, 1, false, 1.0).unwrap();
    let ev = SpacetimeEvent::new(0.4, [1.1, 0.2, -0.3]);
    c.bench_function("field_at/N=4096", |b| b.iter(|| field_at(&e, black_box(&ev))));
    c.bench_function("sample_ensemble/N=4096", |b| {
        b.iter(|| sample_ensemble(&spectrum, 4096, black_box(2), false, 1.0).unwrap())
    });
}

fn fits(c: &mut Criterion) {
    let r = correction_fixture(0.4, 0.8).unwrap();
    let cfg = FitConfig::default();
    let mut g = c.benchmark_group("fits");
    g.sample_size(10);
    g.bench_function("fit_scene/9x15", |b| b.iter(|| fit_scene(&r, None, &cfg).unwrap()));
    let obs: Vec<(f64, f64)> = (1..=60)
        .map(|k| {
            let w = 0.1 * k as f64;
            (w, stationary_mirror_spectrum(0.7, 1.0, w, 1.0).unwrap())
        })
        .collect();
    g.bench_function("fit_distance_stationary/60", |b| b.iter(|| fit_distance_stationary(&obs, 1.0, 1.0).unwrap()));
    g.finish();
}

criterion_group!(benches, psi, correction, field, fits);
criterion_main!(benches);
