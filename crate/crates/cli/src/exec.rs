//! Static-partition parallel map with per-task seeded generators.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// Generator for task `index`: seed `master ^ index`.
pub fn task_rng(master: u64, index: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(master ^ index as u64)
}

/// `tasks.map(f)` on `jobs` threads; output order follows input order.
pub fn par_map<T, R, F>(jobs: usize, tasks: Vec<T>, f: F) -> Vec<R>
where
    T: Send,
    R: Send,
    F: Fn(usize, T) -> R + Sync + Send,
{
    if jobs <= 1 {
        return tasks.into_iter().enumerate().map(|(i, t)| f(i, t)).collect();
    }
    let pool = rayon::ThreadPoolBuilder::new().num_threads(jobs).build().expect("thread pool");
    pool.install(|| tasks.into_par_iter().enumerate().map(|(i, t)| f(i, t)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn order_and_seeds_do_not_depend_on_jobs() {
        let run = |jobs| par_map(jobs, (0..40).collect(), |i, x: u32| (x, task_rng(7, i).random::<u64>()));
        assert_eq!(run(1), run(3));
        assert_ne!(task_rng(7, 0).random::<u64>(), task_rng(7, 1).random::<u64>());
    }
}
