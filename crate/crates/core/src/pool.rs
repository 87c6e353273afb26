//! Bounded work pool for independent grid evaluations.
//!
//! Results always come back in input order, whatever order the workers
//! finish in. `RABI_SPT_THREADS` caps the number of workers; unset or
//! unparsable values fall back to the machine's parallelism.

/// Environment variable limiting the worker count.
pub const THREADS_ENV: &str = "RABI_SPT_THREADS";

/// Worker count taken from [`THREADS_ENV`], if set to a positive integer.
pub fn configured_threads() -> Option<usize> {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
}

/// Maps `f` over `items` on the pool, preserving order.
#[cfg(feature = "parallel")]
pub fn par_map<T, R, F>(items: Vec<T>, f: F) -> Vec<R>
where
    T: Send,
    R: Send,
    F: Fn(T) -> R + Sync + Send,
{
    use rayon::prelude::*;
    let run = || items.into_par_iter().map(&f).collect::<Vec<R>>();
    match configured_threads() {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(run),
            Err(_) => run(),
        },
        None => run(),
    }
}

#[cfg(not(feature = "parallel"))]
pub fn par_map<T, R, F>(items: Vec<T>, f: F) -> Vec<R>
where
    F: Fn(T) -> R,
{
    items.into_iter().map(f).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_is_preserved() {
        let out = par_map((0..200).collect(), |i: usize| {
            // Uneven work so completion order differs from input order.
            let spin = (200 - i) * 50;
            (0..spin).fold(i, |acc, _| std::hint::black_box(acc))
        });
        assert_eq!(out, (0..200).collect::<Vec<_>>());
    }
}
