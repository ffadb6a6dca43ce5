//! Decision throughput over a ~100-PolicySet store: single requests,
//! a sequential sweep, and the batch API (rayon-parallel under the
//! default `parallel` feature, sequential without it). Run both modes
//! to compare:
//!
//! ```text
//! cargo bench -p prbac-core
//! cargo bench -p prbac-core --no-default-features
//! ```

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion, Throughput};

use prbac_core::batch::decide_batch;
use prbac_core::compiler::{access_request, compile_model, NamingScheme};
use prbac_core::ir::RequestCtx;
use prbac_core::model::ParamBinding;
use prbac_core::pdp::{decide, PolicyStore};
use prbac_core::sample::synthetic_model;

fn store_and_requests() -> (PolicyStore, Vec<RequestCtx>) {
    let doc = synthetic_model(40);
    let store = compile_model(&doc).expect("synthetic model compiles");
    assert!(store.len() >= 100, "want a 100-set store, got {}", store.len());
    let scheme = NamingScheme::default();
    let requests: Vec<RequestCtx> = doc
        .ua
        .iter()
        .flat_map(|ua| {
            let ri = &ua.role_instance;
            [
                access_request(&scheme, ri, "svc0", "read", &[]),
                access_request(&scheme, ri, "svc1", "write", &[]),
                access_request(
                    &scheme,
                    ri,
                    "svc2",
                    "read",
                    &[ParamBinding::new("q0", "v0")],
                ),
            ]
        })
        .collect();
    (store, requests)
}

fn bench_decide(c: &mut Criterion) {
    let (store, requests) = store_and_requests();

    c.bench_function("decide/single", |b| {
        b.iter(|| black_box(decide(&store, &requests[0])))
    });

    let mut group = c.benchmark_group("decide/batch");
    group.throughput(Throughput::Elements(requests.len() as u64));
    group.bench_function("sequential_loop", |b| {
        b.iter(|| {
            let out: Vec<_> = requests.iter().map(|req| decide(&store, req)).collect();
            black_box(out)
        })
    });
    let label = if cfg!(feature = "parallel") {
        "batch_api_parallel"
    } else {
        "batch_api_sequential"
    };
    group.bench_function(label, |b| {
        b.iter(|| black_box(decide_batch(&store, &requests)))
    });
    group.finish();
}

criterion_group!(benches, bench_decide);
criterion_main!(benches);
