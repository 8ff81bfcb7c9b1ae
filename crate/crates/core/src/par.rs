//! Data-parallel helpers with a sequential fallback.
//!
//! With the `parallel` feature the [`Execution::Parallel`] mode runs on the
//! rayon pool; without it both modes run the same sequential loops. Work is
//! always split into fixed-size blocks and reduced in block order, so the
//! output is bit-identical across modes and thread counts.

use std::ops::Range;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Execution {
    Sequential,
    Parallel,
}

impl Default for Execution {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Execution::Parallel
        } else {
            Execution::Sequential
        }
    }
}

/// `out[i] = f(i)` for every index.
pub(crate) fn fill_indexed<T, F>(out: &mut [T], exec: Execution, f: F)
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    match exec {
        #[cfg(feature = "parallel")]
        Execution::Parallel => {
            use rayon::prelude::*;
            out.par_iter_mut().enumerate().for_each(|(i, v)| *v = f(i));
        }
        _ => {
            for (i, v) in out.iter_mut().enumerate() {
                *v = f(i);
            }
        }
    }
}

/// Splits `0..len` into consecutive blocks of `block` items and maps each,
/// returning results in block order.
pub(crate) fn map_blocks<R, F>(len: usize, block: usize, exec: Execution, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(Range<usize>) -> R + Sync + Send,
{
    let block = block.max(1);
    let n_blocks = len.div_ceil(block);
    let range = move |b: usize| b * block..((b + 1) * block).min(len);
    match exec {
        #[cfg(feature = "parallel")]
        Execution::Parallel => {
            use rayon::prelude::*;
            (0..n_blocks).into_par_iter().map(|b| f(range(b))).collect()
        }
        _ => (0..n_blocks).map(|b| f(range(b))).collect(),
    }
}
