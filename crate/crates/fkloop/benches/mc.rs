//! First-hit campaign throughput: the worker pool against a plain loop over
//! the same chunks. Both paths must produce the same histogram.

use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};

use fkloop::analytics::ModelParams;
use fkloop::par;
use fkloop::walks::{run_walk, BackwardStream, BlockReader, Caps, Histogram, Target};

const CHUNK: u64 = 512;

fn chunk(p: f64, seed: u64, k: u64) -> Histogram {
    let caps = Caps { letters: 1_000_000, ..Caps::default() };
    let mut h = Histogram::new(seed);
    for run in k * CHUNK..(k + 1) * CHUNK {
        let s = BackwardStream::new(seed, run, p).unwrap();
        let mut r = BlockReader::new(s, caps.letters);
        let rec = run_walk(&mut r, Target::FirstHit, caps, None);
        match rec.first() {
            Some(_) => h.add(rec.blocks),
            None => h.add_censored(),
        }
    }
    h
}

fn merge(parts: Vec<Histogram>) -> Histogram {
    parts.into_iter().fold(Histogram::new(0), |mut a, b| {
        a.merge(&b);
        a
    })
}

fn campaigns(c: &mut Criterion) {
    let mut g = c.benchmark_group("first_hit");
    g.sample_size(10);
    for q in [1.0, 2.0] {
        let p = ModelParams::from_q(q).unwrap().p;
        let chunks = 16u64;
        g.throughput(Throughput::Elements(chunks * CHUNK));
        assert_eq!(
            merge(par::map((0..chunks).collect(), |k| chunk(p, 1, k))),
            merge(par::map_sequential((0..chunks).collect(), |k| chunk(p, 1, k)))
        );
        g.bench_with_input(BenchmarkId::new("pool", q), &p, |b, &p| {
            b.iter(|| merge(par::map((0..chunks).collect(), |k| chunk(black_box(p), 1, k))))
        });
        g.bench_with_input(BenchmarkId::new("sequential", q), &p, |b, &p| {
            b.iter(|| merge(par::map_sequential((0..chunks).collect(), |k| chunk(black_box(p), 1, k))))
        });
    }
    g.finish();
}

criterion_group!(benches, campaigns);
criterion_main!(benches);
