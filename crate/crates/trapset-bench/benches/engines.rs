//! Benchmarks of the search engines on the built-in Tanner code and on
//! small random degree-3 codes.

use std::sync::Arc;

use criterion::{criterion_group, criterion_main, Criterion};

use trapset_core::codes::{random_regular, tanner_155, tanner_155_symmetry};
use trapset_core::nets::{search_nets, NetsOptions};
use trapset_core::oracle::OracleCensus;
use trapset_core::search::{
    search_etsl, search_lets, shortest_cycle_count, LevelAction, SearchOptions,
};
use trapset_core::stopping::{stopping_lower, LowerOptions};
use trapset_core::{ClassLedger, TannerGraph};

fn lets(graph: &TannerGraph, opts: &SearchOptions) -> ClassLedger {
    search_lets(graph, opts, |_, _| LevelAction::Continue)
        .expect("search succeeds")
        .0
}

fn bench_cycles(c: &mut Criterion) {
    let graph = tanner_155();
    c.bench_function("cycles/tanner155", |b| {
        b.iter(|| shortest_cycle_count(&graph).expect("counting succeeds"))
    });
}

fn bench_lets(c: &mut Criterion) {
    let graph = tanner_155();
    let sym = Arc::new(tanner_155_symmetry());
    let reduced = SearchOptions::new(8, 9).with_symmetry(sym);
    c.bench_function("lets/tanner155/a8/orbits", |b| {
        b.iter(|| lets(&graph, &reduced))
    });

    let small = random_regular(96, 48, 3, 11).expect("construction succeeds");
    let plain = SearchOptions::new(8, 9);
    c.bench_function("lets/random96/a8", |b| b.iter(|| lets(&small, &plain)));
}

fn bench_etsl(c: &mut Criterion) {
    let graph = tanner_155();
    let sym = Arc::new(tanner_155_symmetry());
    let opts = SearchOptions::new(8, 9).with_symmetry(sym);
    let seeds = lets(&graph, &opts);
    c.bench_function("etsl/tanner155/a8/orbits", |b| {
        b.iter(|| search_etsl(&graph, &seeds, &opts).expect("search succeeds"))
    });
}

fn bench_nets(c: &mut Criterion) {
    let graph = tanner_155();
    let sym = Arc::new(tanner_155_symmetry());
    let opts = SearchOptions::new(8, 9).with_symmetry(sym.clone());
    let mut seeds = lets(&graph, &opts);
    let (etsl, _) = search_etsl(&graph, &seeds, &opts).expect("search succeeds");
    seeds.merge(&etsl);
    let mut nopts = NetsOptions::new(8, 4, 9);
    nopts.symmetry = Some(sym);
    c.bench_function("nets/tanner155/a8/orbits", |b| {
        b.iter(|| search_nets(&graph, &seeds, &nopts).expect("search succeeds"))
    });
}

fn bench_stopping_lower(c: &mut Criterion) {
    let graph = random_regular(24, 18, 3, 0).expect("construction succeeds");
    c.bench_function("stopping_lower/random24", |b| {
        b.iter(|| stopping_lower(&graph, &LowerOptions::default()).expect("driver succeeds"))
    });
}

fn bench_oracle(c: &mut Criterion) {
    let graph = random_regular(20, 15, 3, 7).expect("construction succeeds");
    c.bench_function("oracle/random20/a6", |b| {
        b.iter(|| OracleCensus::build(&graph, 6, u64::MAX).expect("census succeeds"))
    });
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(10);
    targets = bench_cycles, bench_lets, bench_etsl, bench_nets, bench_stopping_lower, bench_oracle
}
criterion_main!(benches);
