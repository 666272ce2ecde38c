use criterion::{black_box, criterion_group, criterion_main, Criterion};
use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use spherefib_core::fibrations::{bounded_search, construct_large_k, construct_n4, AttachingMap, SearchBounds, StableModel};
use spherefib_core::forms::{random_form, SeedForm};
use spherefib_core::homotopy::{random_expr, Expr, Normalizer, SphereTable, Strategy};
use spherefib_core::tensorlie::verify_factorization;

fn series(c: &mut Criterion) {
    c.bench_function("factorization n=8 k=6 order 30", |b| b.iter(|| verify_factorization(6, black_box(8), 30).unwrap()));
}

fn normalize(c: &mut Criterion) {
    let t = SphereTable::builtin("n4", None).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let exprs: Vec<Expr> = (0..50).map(|_| random_expr(&mut rng, &t, 3)).collect();
    c.bench_function("normalize 50 random n4 expressions", |b| {
        b.iter(|| {
            let mut nz = Normalizer::new(&t, 3, Strategy::First);
            for e in &exprs {
                black_box(nz.normalize(e).unwrap());
            }
        })
    });
}

fn pipelines(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let g = random_form(&mut rng, SeedForm::Identity, 4);
    let l: Vec<BigInt> = (0..4).map(|_| BigInt::from(rng.gen_range(0..12))).collect();
    let m4 = AttachingMap::new(4, g).unwrap().with_torsion(l).unwrap();
    c.bench_function("construct_n4 odd rank 4", |b| b.iter(|| construct_n4(black_box(&m4)).unwrap()));

    let model = StableModel::new(vec![5, 35]).unwrap();
    let stable = (0..4).map(|_| vec![BigInt::from(rng.gen_range(0..5)), BigInt::from(rng.gen_range(0..35))]).collect();
    let mk = AttachingMap::new(12, random_form(&mut rng, SeedForm::Hyperbolic, 4)).unwrap().with_stable(stable).unwrap();
    c.bench_function("construct_large_k r=2 k=4", |b| b.iter(|| construct_large_k(black_box(&mk), &model).unwrap()));
}

fn search(c: &mut Criterion) {
    let t = SphereTable::builtin("n8", Some("minus")).unwrap();
    let l = Expr::parse("a1.sigma - a2.sigma").unwrap();
    let mut g = c.benchmark_group("search");
    g.sample_size(10);
    g.bench_function("n8 pair search bound 3", |b| b.iter(|| bounded_search(&t, &l, SearchBounds { mu: 3, delta: 2 }).unwrap()));
    g.finish();
}

criterion_group!(benches, series, normalize, pipelines, search);
criterion_main!(benches);
