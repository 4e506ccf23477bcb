//! Deterministic reductions.
//!
//! Per-node work may run on the rayon pool, but results are always collected
//! in node order and reduced with a fixed pairwise tree, so sums do not depend
//! on the thread count.

use rayon::prelude::*;

const LEAF: usize = 8;

/// Pairwise (tree) summation with a fixed schedule.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= LEAF {
        let mut s = 0.0;
        for &x in xs {
            s += x;
        }
        return s;
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

/// Maps `f` over `0..count`, returning results in index order.
pub fn map_nodes<R, F>(count: usize, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync + Send,
{
    if count < 512 || rayon::current_num_threads() == 1 {
        (0..count).map(f).collect()
    } else {
        (0..count).into_par_iter().with_min_len(128).map(f).collect()
    }
}

/// Like [`map_nodes`] but stops at the first error (lowest index wins).
pub fn try_map_nodes<R, E, F>(count: usize, f: F) -> Result<Vec<R>, E>
where
    R: Send,
    E: Send,
    F: Fn(usize) -> Result<R, E> + Sync + Send,
{
    map_nodes(count, f).into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pairwise_matches_exact_integers() {
        let xs: Vec<f64> = (1..=1000).map(|i| i as f64).collect();
        assert_eq!(pairwise_sum(&xs), 500_500.0);
        assert_eq!(pairwise_sum(&[]), 0.0);
    }

    #[test]
    fn map_preserves_order() {
        let v = map_nodes(2000, |i| i * 2);
        assert!(v.iter().enumerate().all(|(i, &x)| x == 2 * i));
        let r: Result<Vec<usize>, usize> = try_map_nodes(2000, |i| if i % 700 == 699 { Err(i) } else { Ok(i) });
        assert_eq!(r, Err(699));
    }
}
