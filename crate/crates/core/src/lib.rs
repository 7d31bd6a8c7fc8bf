#![no_std]
#![doc = include_str!("../README.md")]

extern crate alloc;
#[cfg(any(test, feature = "std"))]
extern crate std;

pub mod f2;
pub mod fat;
pub mod graph;
pub mod linalg;
pub mod metric;
pub mod morse;
pub mod ops;
pub mod solver;

use alloc::vec::Vec;

/// Maps `f` over `0..n`, in parallel when the `parallel` feature is enabled.
/// Results are always returned in index order.
#[cfg(feature = "parallel")]
pub(crate) fn par_map<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    use rayon::prelude::*;
    (0..n).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn par_map<T, F>(n: usize, f: F) -> Vec<T>
where
    F: Fn(usize) -> T,
{
    (0..n).map(f).collect()
}
