//! Data-parallel map helpers with a sequential fallback.
//!
//! Verification sweeps, transfer evaluations at independent spectral
//! points and multi-start root searches are all embarrassingly parallel.
//! With the `parallel` feature (default) they run on the rayon pool;
//! without it the same API degrades to a plain sequential loop. The
//! criterion bench suite compares the two modes on the same workloads.

/// Execution mode for a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Parallelism {
    #[cfg_attr(not(feature = "parallel"), default)]
    Sequential,
    #[cfg(feature = "parallel")]
    #[cfg_attr(feature = "parallel", default)]
    Rayon,
}

/// Map `f` over `0..n`, preserving index order in the output.
///
/// Results are ordered, so a run is deterministic regardless of mode
/// as long as `f(i)` depends only on `i`.
pub fn map_indexed<R, F>(mode: Parallelism, n: usize, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync + Send,
{
    match mode {
        Parallelism::Sequential => (0..n).map(f).collect(),
        #[cfg(feature = "parallel")]
        Parallelism::Rayon => {
            use rayon::prelude::*;
            (0..n).into_par_iter().map(f).collect()
        }
    }
}

/// Map `f` over a slice, preserving order.
pub fn map_slice<T, R, F>(mode: Parallelism, items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    match mode {
        Parallelism::Sequential => items.iter().map(f).collect(),
        #[cfg(feature = "parallel")]
        Parallelism::Rayon => {
            use rayon::prelude::*;
            items.par_iter().map(f).collect()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn modes_agree() {
        let seq = map_indexed(Parallelism::Sequential, 100, |i| i * i);
        #[cfg(feature = "parallel")]
        {
            let par = map_indexed(Parallelism::Rayon, 100, |i| i * i);
            assert_eq!(seq, par);
        }
        assert_eq!(seq[7], 49);
    }
}
