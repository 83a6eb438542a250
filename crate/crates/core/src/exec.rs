//! Per-node map helpers. With the `parallel` feature the nodes are spread over
//! the rayon pool; each node's value is still computed by one sequential
//! reduction, so the output does not depend on the thread count.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Below this many nodes the rayon dispatch costs more than it saves.
#[cfg(feature = "parallel")]
const PAR_THRESHOLD: usize = 32;

pub(crate) fn map_nodes<F>(n: usize, f: F) -> Vec<f64>
where
    F: Fn(usize) -> f64 + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        if n >= PAR_THRESHOLD {
            return (0..n).into_par_iter().map(f).collect();
        }
    }
    (0..n).map(f).collect()
}

pub(crate) fn map_items<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        if items.len() > 1 {
            return items.par_iter().map(f).collect();
        }
    }
    items.iter().map(f).collect()
}

pub(crate) fn try_map_nodes<F>(n: usize, f: F) -> crate::Result<Vec<f64>>
where
    F: Fn(usize) -> crate::Result<f64> + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        if n >= PAR_THRESHOLD {
            return (0..n).into_par_iter().map(f).collect();
        }
    }
    (0..n).map(f).collect()
}
