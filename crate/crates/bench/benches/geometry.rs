use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use toricmorph::fan::face_fan;
use toricmorph::laurent::parse;
use toricmorph::subdivision::maximal_crepant_refinement;
use toricmorph_bench::inputs;

fn polytopes(c: &mut Criterion) {
    let inp = inputs();
    c.bench_function("dual delta_star_wp", |b| {
        b.iter(|| black_box(&inp.delta_star_wp).dual().unwrap())
    });
    c.bench_function("lattice points nabla", |b| {
        b.iter(|| black_box(&inp.nabla).lattice_points())
    });
    c.bench_function("face fan nabla", |b| b.iter(|| face_fan(black_box(&inp.nabla)).unwrap()));
}

fn subdivisions(c: &mut Criterion) {
    let inp = inputs();
    let mut g = c.benchmark_group("subdivision");
    g.sample_size(10);
    g.bench_function("maximal crepant refinement", |b| {
        b.iter(|| maximal_crepant_refinement(black_box(&inp.sigma_wp), &inp.delta_star_wp).unwrap())
    });
    g.finish();
}

fn laurent(c: &mut Criterion) {
    let vars: Vec<String> = ["x", "y", "z", "w"].iter().map(|s| s.to_string()).collect();
    let f = parse("x + y + z + w + b*(x*y*z*w)^-1", &vars).unwrap();
    c.bench_function("laurent fifth power", |b| b.iter(|| black_box(&f).pow(5).unwrap()));
}

criterion_group!(benches, polytopes, subdivisions, laurent);
criterion_main!(benches);
