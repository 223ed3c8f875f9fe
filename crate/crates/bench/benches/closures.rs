use closurelab::cg::{full_mask, separate_cg};
use closurelab::hull::row_integer_hull;
use closurelab::instance::{gen_family, gen_market_split, gen_random_general, Family};
use closurelab::lp::solve_lp;
use closurelab::mip::solve_mip;
use closurelab::rational::q;
use criterion::{criterion_group, criterion_main, Criterion};

fn simplex(c: &mut Criterion) {
    let inst = gen_random_general(10, 3);
    c.bench_function("lp random general n=10", |b| b.iter(|| solve_lp(&inst, &[])));
    let ms = gen_market_split(2, 0);
    c.bench_function("mip market split m=2", |b| b.iter(|| solve_mip(&ms, &[]).unwrap()));
}

fn separation(c: &mut Criterion) {
    for (f, p) in [(Family::CoveringTight, 10), (Family::PackingTight, 100)] {
        let inst = gen_family(f, p).unwrap();
        let x = solve_lp(&inst, &[]).point.unwrap();
        let mask = full_mask(&inst);
        c.bench_function(&format!("cg separation {}({p})", f.name()), |b| {
            b.iter(|| separate_cg(&inst.rows, &inst.upper, &x, &mask, &q(1, 100)).unwrap())
        });
    }
}

fn hull(c: &mut Criterion) {
    let inst = gen_family(Family::PackingTight, 100).unwrap();
    let class = inst.classify().unwrap();
    c.bench_function("row hull packing_tight(100)", |b| {
        b.iter(|| row_integer_hull(&inst.rows[0], &inst.upper, class).unwrap())
    });
    let g = gen_random_general(10, 3);
    let gc = g.classify().unwrap();
    c.bench_function("row hull random general n=10", |b| {
        b.iter(|| row_integer_hull(&g.rows[0], &g.upper, gc).unwrap())
    });
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(10);
    targets = simplex, separation, hull
}
criterion_main!(benches);
