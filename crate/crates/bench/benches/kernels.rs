use criterion::{criterion_group, criterion_main, Criterion};
use diraclab_core::family::{chern_number, qwz_lower_projector, BaseGrid, ProjectorFamily};
use diraclab_core::heat1d::{erfc, halfline_density, halfline_oracle, HalfLineCondition};
use diraclab_core::index::{aps_density, heat_traces};
use diraclab_core::spectrum::make_twisted_torus;
use diraclab_core::{cylinder_index, ApsPairing, BoundaryCondition, CylinderProblem, OracleConfig};
use std::hint::black_box;

fn closed_forms(c: &mut Criterion) {
    c.bench_function("erfc", |b| b.iter(|| erfc(black_box(1.7))));
    c.bench_function("robin density", |b| {
        b.iter(|| halfline_density(black_box(0.05), black_box(0.1), HalfLineCondition::Robin(-2.0), 4.0))
    });
    let spec = make_twisted_torus(3, 2.0 * std::f64::consts::PI, 40.0).unwrap();
    c.bench_function("heat traces, cutoff 40", |b| b.iter(|| heat_traces(&spec, black_box(0.05), 1e-8).unwrap()));
    c.bench_function("aps density, adjoint", |b| {
        b.iter(|| aps_density(&spec, black_box(0.01), black_box(0.1), ApsPairing::Adjoint).unwrap())
    });
}

fn oracles(c: &mut Criterion) {
    c.bench_function("half-line oracle, 2000 modes", |b| {
        b.iter(|| halfline_oracle(black_box(0.05), 0.1, 0.1, HalfLineCondition::Robin(-1.0), 20.0, 2000).unwrap())
    });
    let spec = make_twisted_torus(3, 2.0 * std::f64::consts::PI, 40.0).unwrap();
    let problem = CylinderProblem::new(spec, 1.0, BoundaryCondition::Aps, BoundaryCondition::Minus).unwrap();
    c.bench_function("cylinder index", |b| b.iter(|| cylinder_index(&problem, OracleConfig::default()).unwrap()));
}

fn chern(c: &mut Criterion) {
    for n in [32, 64] {
        let grid = BaseGrid::new(n).unwrap();
        let projectors = (0..grid.vertex_count())
            .map(|v| {
                let (k1, k2) = grid.coordinates(v);
                qwz_lower_projector(k1, k2, 1.0)
            })
            .collect();
        let family = ProjectorFamily::new(grid, projectors).unwrap();
        c.bench_function(&format!("chern number, n = {n}"), |b| b.iter(|| chern_number(&family).unwrap()));
    }
}

criterion_group!(benches, closed_forms, oracles, chern);
criterion_main!(benches);
