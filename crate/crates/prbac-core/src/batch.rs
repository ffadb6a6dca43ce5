//! Data-parallel helpers for the bulk surfaces: batch request
//! evaluation and per-instance compilation. With the default
//! `parallel` feature these fan out over rayon; without it they run
//! sequentially with identical results, since evaluation is pure over
//! an immutable store.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::ir::{RequestCtx, ResponseCtx};
use crate::pdp::{decide, PolicyStore};

/// Evaluates many requests against one store snapshot. Output order
/// matches input order.
#[cfg(feature = "parallel")]
pub fn decide_batch(store: &PolicyStore, requests: &[RequestCtx]) -> Vec<ResponseCtx> {
    requests.par_iter().map(|req| decide(store, req)).collect()
}

/// Evaluates many requests against one store snapshot. Output order
/// matches input order.
#[cfg(not(feature = "parallel"))]
pub fn decide_batch(store: &PolicyStore, requests: &[RequestCtx]) -> Vec<ResponseCtx> {
    requests.iter().map(|req| decide(store, req)).collect()
}

/// Order-preserving map over a slice, parallel when the `parallel`
/// feature is enabled.
#[cfg(feature = "parallel")]
pub fn map_collect<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    items.par_iter().map(f).collect()
}

/// Order-preserving map over a slice, parallel when the `parallel`
/// feature is enabled.
#[cfg(not(feature = "parallel"))]
pub fn map_collect<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    items.iter().map(f).collect()
}
