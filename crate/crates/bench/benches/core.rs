use std::hint::black_box;
use std::sync::Arc;

use criterion::{criterion_group, criterion_main, Criterion};
use kcocycle::{
    cocycle_residual, collect_factorisations, geodesic_path, ktheory_2graph, residual_gradient,
    smith_normal_form, EnumerationOptions, IntMatrix, Skeleton, UnitaryCocycle,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn snf(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let rows: Vec<Vec<i64>> = (0..8).map(|_| (0..8).map(|_| rng.random_range(-9..=9)).collect()).collect();
    let a = IntMatrix::from_rows(&rows).unwrap();
    c.bench_function("smith_normal_form 8x8", |b| b.iter(|| smith_normal_form(black_box(&a))));
    let m1 = IntMatrix::from_rows(&[vec![2i64, 1], vec![1, 2]]).unwrap();
    let m2 = IntMatrix::from_rows(&[vec![1i64, 3], vec![3, 1]]).unwrap();
    c.bench_function("ktheory_2graph 2 vertices", |b| b.iter(|| ktheory_2graph(black_box(&m1), black_box(&m2))));
}

fn residual(c: &mut Criterion) {
    let s = Arc::new(Skeleton::bouquet(&[2, 3, 2, 2]));
    let u = UnitaryCocycle::random(s, &mut ChaCha8Rng::seed_from_u64(2));
    c.bench_function("residual (2,3,2,2)", |b| b.iter(|| cocycle_residual(black_box(&u))));
    c.bench_function("gradient (2,3,2,2)", |b| b.iter(|| residual_gradient(black_box(&u))));
}

fn enumeration(c: &mut Criterion) {
    let s = Skeleton::bouquet(&[2, 2, 2]);
    let mut group = c.benchmark_group("enumeration");
    group.sample_size(10);
    group.bench_function("(2,2,2)", |b| {
        b.iter(|| collect_factorisations(black_box(&s), EnumerationOptions::default()).unwrap())
    });
    group.finish();
}

fn geodesic(c: &mut Criterion) {
    let s = Arc::new(Skeleton::bouquet(&[3, 3]));
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let u0 = UnitaryCocycle::random(s.clone(), &mut rng);
    let u1 = UnitaryCocycle::random(s, &mut rng);
    c.bench_function("geodesic 64 samples", |b| b.iter(|| geodesic_path(&u0, &u1, black_box(64)).unwrap()));
}

criterion_group!(benches, snf, residual, enumeration, geodesic);
criterion_main!(benches);
