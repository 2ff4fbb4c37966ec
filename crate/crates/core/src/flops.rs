//! Flop accounting for complexity scaling reports.
//!
//! Cost model: 2 flops per multiply-add in dense/1D tensor contractions and
//! in CSR matrix-vector products; triangular solves cost 2 flops per stored
//! nonzero per sweep; small dense block solves cost 2 m^2. The constants are
//! fixed and documented so counter values are exactly reproducible; they feed
//! the scaling plots only, never control flow.

use std::sync::atomic::{AtomicU64, Ordering};

#[derive(Debug, Default)]
pub struct FlopCounter(AtomicU64);

impl FlopCounter {
    pub fn new() -> Self {
        FlopCounter(AtomicU64::new(0))
    }

    #[inline]
    pub fn add(&self, flops: u64) {
        self.0.fetch_add(flops, Ordering::Relaxed);
    }

    /// 2 m n k flops for a contraction of an (m x n) table with n x k data.
    #[inline]
    pub fn contraction(&self, m: usize, n: usize, k: usize) {
        self.add(2 * (m as u64) * (n as u64) * (k as u64));
    }

    /// 2 nnz flops for a sparse matrix-vector product.
    #[inline]
    pub fn spmv(&self, nnz: usize) {
        self.add(2 * nnz as u64);
    }

    pub fn get(&self) -> u64 {
        self.0.load(Ordering::Relaxed)
    }

    pub fn reset(&self) {
        self.0.store(0, Ordering::Relaxed);
    }
}
