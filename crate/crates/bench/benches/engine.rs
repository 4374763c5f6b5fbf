use criterion::{black_box, criterion_group, criterion_main, Criterion};
use foliage::baire::CompactCode;
use foliage::graft::hybrid_build;
use foliage::laws::default_compacts;
use foliage::laws::instances::{families, hosts};
use foliage::pipeline::{pipeline_run, PiHybrid, Trunc};

fn hybrids(c: &mut Criterion) {
    let fams: Vec<_> = hosts(4).iter().flat_map(|h| families(h, 2)).collect();
    c.bench_function("hybrid_build/hosts<=4", |b| {
        b.iter(|| {
            for f in &fams {
                black_box(hybrid_build(f).unwrap());
            }
        })
    });
}

fn pipeline(c: &mut Criterion) {
    let compacts = default_compacts();
    let trunc = Trunc::new(4, 4, 2);
    c.bench_function("pipeline_run/3 stages", |b| {
        b.iter(|| pipeline_run(black_box(&compacts), 3, trunc).unwrap())
    });
    let state = pipeline_run(&[CompactCode::zero()], 1, trunc).unwrap().state;
    let h = PiHybrid::new(&state);
    c.bench_function("materialize/5x4", |b| b.iter(|| h.materialize(black_box(5), 4).unwrap()));
}

criterion_group!(benches, hybrids, pipeline);
criterion_main!(benches);
