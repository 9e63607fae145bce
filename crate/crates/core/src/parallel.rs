//! Sample-parallel map with a deterministic, index-ordered reduction.
//!
//! Every harness in this crate draws its samples through [`map_indexed`]:
//! sample `i` gets its own generator derived from `(seed, i)`, and results
//! come back in index order. The output is therefore bit-identical whether
//! the `parallel` feature is on or off, and independent of thread count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// How a harness runs its per-sample work.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Exec {
    /// Use the rayon pool when the `parallel` feature is compiled in.
    #[default]
    Parallel,
    Sequential,
}

impl Exec {
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Exec::Parallel
    }
}

/// Generator for sample `index` of a run seeded with `seed`.
pub fn sample_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Evaluates `f(i, rng_i)` for `i in 0..count` and returns the results in
/// index order.
pub fn map_indexed<T, F>(exec: Exec, count: usize, seed: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize, &mut ChaCha8Rng) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        use rayon::prelude::*;
        return (0..count)
            .into_par_iter()
            .map(|i| f(i, &mut sample_rng(seed, i as u64)))
            .collect();
    }
    let _ = exec;
    (0..count)
        .map(|i| f(i, &mut sample_rng(seed, i as u64)))
        .collect()
}
