//! Execution-mode dispatch for the data-parallel inner loops (sweep rows,
//! stencil application, grid sampling). The `parallel` feature backs
//! [`ExecMode::Parallel`] with rayon; without it only the sequential path
//! exists. Results are collected in index order either way, so outputs are
//! identical across modes and thread counts.

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExecMode {
    Sequential,
    #[cfg(feature = "parallel")]
    Parallel,
}

impl Default for ExecMode {
    /// Parallel when the `parallel` feature is enabled, sequential otherwise.
    fn default() -> Self {
        #[cfg(feature = "parallel")]
        {
            ExecMode::Parallel
        }
        #[cfg(not(feature = "parallel"))]
        {
            ExecMode::Sequential
        }
    }
}

/// Maps `f` over `0..n`, preserving index order in the output.
pub fn map_indexed<T, F>(mode: ExecMode, n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    match mode {
        ExecMode::Sequential => (0..n).map(f).collect(),
        #[cfg(feature = "parallel")]
        ExecMode::Parallel => {
            use rayon::prelude::*;
            (0..n).into_par_iter().map(f).collect()
        }
    }
}

/// In-place variant over a mutable slice: `out[i] = f(i)`.
pub fn fill_indexed<T, F>(mode: ExecMode, out: &mut [T], f: F)
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    match mode {
        ExecMode::Sequential => {
            for (i, slot) in out.iter_mut().enumerate() {
                *slot = f(i);
            }
        }
        #[cfg(feature = "parallel")]
        ExecMode::Parallel => {
            use rayon::prelude::*;
            out.par_iter_mut().enumerate().for_each(|(i, slot)| {
                *slot = f(i);
            });
        }
    }
}
