//! Execution-mode switch between the rayon data-parallel path and the
//! sequential fallback.
//!
//! Every data-parallel loop in this crate is written twice: a sequential
//! version that always compiles, and a rayon version gated on the `parallel`
//! feature. The two produce bit-identical results because all randomness is
//! derived per work item (e.g. per tree) rather than from a shared stream.
//! Benchmarks compare both paths explicitly; library callers normally use
//! [`ExecMode::default`].

/// Which loop implementation to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExecMode {
    /// Plain sequential iteration.
    Sequential,
    /// Rayon work-stealing iteration. Only available with the `parallel`
    /// feature.
    #[cfg(feature = "parallel")]
    Parallel,
}

impl Default for ExecMode {
    #[cfg(feature = "parallel")]
    fn default() -> Self {
        ExecMode::Parallel
    }

    #[cfg(not(feature = "parallel"))]
    fn default() -> Self {
        ExecMode::Sequential
    }
}

/// Map `f` over `0..n`, collecting results in index order.
///
/// The closure must be deterministic per index for the two modes to agree.
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

/// Map `f` over a slice, collecting results in input order.
pub fn map_slice<'a, I, T, F>(mode: ExecMode, items: &'a [I], f: F) -> Vec<T>
where
    I: Sync,
    T: Send,
    F: Fn(&'a I) -> T + Sync + Send,
{
    match mode {
        ExecMode::Sequential => items.iter().map(f).collect(),
        #[cfg(feature = "parallel")]
        ExecMode::Parallel => {
            use rayon::prelude::*;
            items.par_iter().map(f).collect()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn map_indexed_preserves_order() {
        let out = map_indexed(ExecMode::Sequential, 5, |i| i * 2);
        assert_eq!(out, vec![0, 2, 4, 6, 8]);
        #[cfg(feature = "parallel")]
        {
            let par = map_indexed(ExecMode::Parallel, 5, |i| i * 2);
            assert_eq!(par, out);
        }
    }

    #[test]
    fn map_slice_modes_agree() {
        let items: Vec<u32> = (0..100).collect();
        let seq = map_slice(ExecMode::Sequential, &items, |x| x + 1);
        #[cfg(feature = "parallel")]
        {
            let par = map_slice(ExecMode::Parallel, &items, |x| x + 1);
            assert_eq!(seq, par);
        }
        assert_eq!(seq.len(), 100);
    }
}
