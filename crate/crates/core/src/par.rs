//! Data-parallel helpers with a sequential fallback.
//!
//! With the `parallel` feature (default) index maps and suite fan-out run on
//! the rayon pool; without it everything runs on the calling thread.

/// Below this many outputs an index map always runs sequentially.
pub const PAR_THRESHOLD: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    Sequential,
    #[default]
    Parallel,
}

impl Execution {
    /// `Parallel` only when the crate was built with the `parallel` feature.
    pub fn effective(self) -> Execution {
        if cfg!(feature = "parallel") {
            self
        } else {
            Execution::Sequential
        }
    }
}

/// `(0..len).map(f).collect()`, in parallel for long outputs.
pub fn map_indices<T, F>(len: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    if len >= PAR_THRESHOLD {
        map_with(Execution::Parallel, len, f)
    } else {
        (0..len).map(f).collect()
    }
}

/// Order-preserving map over `0..len` under an explicit execution policy.
pub fn map_with<T, F>(exec: Execution, len: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    match exec.effective() {
        #[cfg(feature = "parallel")]
        Execution::Parallel => {
            use rayon::prelude::*;
            (0..len).into_par_iter().map(f).collect()
        }
        _ => (0..len).map(f).collect(),
    }
}
