use criterion::{criterion_group, criterion_main, BatchSize, Criterion};

use retrocap::eigen::eig_hermitian;
use retrocap::estimators::retro_mc::{holevo_sample, RetroMcOptions};
use retrocap::protocols::{run_fig2_with, ProtocolOptions};
use retrocap::random::{haar_unitary, RandomStream};
use retrocap::RetroChannelSpec;

fn kernels(c: &mut Criterion) {
    let mut rng = RandomStream::new(1);
    c.bench_function("haar unitary d=4", |b| b.iter(|| haar_unitary(4, &mut rng)));

    let h = {
        let u = haar_unitary(8, &mut RandomStream::new(2));
        let m = u.matrix();
        m + &m.adjoint()
    };
    c.bench_function("jacobi eigensolver 8x8", |b| {
        b.iter(|| eig_hermitian(&h).unwrap())
    });

    let spec = RetroChannelSpec::standard(2, 2).unwrap();
    let opts = RetroMcOptions::default();
    let mut rng = RandomStream::new(3);
    c.bench_function("holevo sample R22", |b| {
        b.iter(|| holevo_sample(&spec, &opts, &mut rng).unwrap())
    });

    let single = ProtocolOptions {
        workers: Some(1),
        keep_traces: 0,
        ..Default::default()
    };
    c.bench_function("fig2 x100 d=2", |b| {
        b.iter_batched(
            || 7u64,
            |seed| run_fig2_with(&spec, 100, seed, &single).unwrap(),
            BatchSize::SmallInput,
        )
    });
}

criterion_group!(benches, kernels);
criterion_main!(benches);
