//! Data-parallel helpers. With the `parallel` feature (default) the subset
//! loops fan out over rayon; without it they run sequentially. Every helper
//! is gather-shaped or reduces in a fixed order, so results are bit-identical
//! across thread counts and between the two modes.

/// Chunk length for fixed-order partial sums; reductions sum per-chunk
/// partials in index order so float results do not depend on scheduling.
pub const CHUNK: usize = 1024;

#[cfg(feature = "parallel")]
pub fn map_range<T, F>(len: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    use rayon::prelude::*;
    (0..len).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn map_range<T, F>(len: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    (0..len).map(f).collect()
}

/// Sequential twin of [`map_range`], kept unconditionally for benchmarks.
pub fn map_range_seq<T, F>(len: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    (0..len).map(f).collect()
}

/// Minimum over `0..len` of `f`, compared by the given total order.
/// Ties resolve to the smallest index because every chunk scans ascending
/// and chunk partials merge in index order.
pub fn min_by_index<T, F, C>(len: usize, f: F, better: C) -> Option<(usize, T)>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
    C: Fn(&T, &T) -> bool + Sync + Send,
{
    if len == 0 {
        return None;
    }
    let n_chunks = len.div_ceil(CHUNK);
    let partials = map_range(n_chunks, |c| {
        let lo = c * CHUNK;
        let hi = (lo + CHUNK).min(len);
        let mut best = (lo, f(lo));
        for i in lo + 1..hi {
            let v = f(i);
            if better(&v, &best.1) {
                best = (i, v);
            }
        }
        best
    });
    let mut iter = partials.into_iter();
    let mut best = iter.next().expect("n_chunks >= 1");
    for cand in iter {
        if better(&cand.1, &best.1) {
            best = cand;
        }
    }
    Some(best)
}

/// Fixed-tree sum of `f(i)` for `i in 0..len`: per-chunk sequential sums,
/// then an in-order fold of the chunk partials.
pub fn sum_range<F>(len: usize, f: F) -> f64
where
    F: Fn(usize) -> f64 + Sync + Send,
{
    let n_chunks = len.div_ceil(CHUNK);
    let partials = map_range(n_chunks, |c| {
        let lo = c * CHUNK;
        let hi = (lo + CHUNK).min(len);
        let mut acc = 0.0;
        for i in lo..hi {
            acc += f(i);
        }
        acc
    });
    partials.into_iter().sum()
}

/// Elementwise accumulation of vector-valued terms in fixed chunk order.
/// Each term is a coefficient vector of length `width`.
pub fn sum_vectors<F>(len: usize, width: usize, f: F) -> Vec<f64>
where
    F: Fn(usize) -> Vec<f64> + Sync + Send,
{
    let n_chunks = len.div_ceil(CHUNK);
    let partials = map_range(n_chunks, |c| {
        let lo = c * CHUNK;
        let hi = (lo + CHUNK).min(len);
        let mut acc = vec![0.0; width];
        for i in lo..hi {
            let term = f(i);
            debug_assert_eq!(term.len(), width);
            for (a, t) in acc.iter_mut().zip(&term) {
                *a += t;
            }
        }
        acc
    });
    let mut acc = vec![0.0; width];
    for part in partials {
        for (a, p) in acc.iter_mut().zip(&part) {
            *a += p;
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn map_matches_seq() {
        let a = map_range(1000, |i| i * i);
        let b = map_range_seq(1000, |i| i * i);
        assert_eq!(a, b);
    }

    #[test]
    fn min_prefers_smallest_index_on_ties() {
        let vals = [3.0, 1.0, 2.0, 1.0, 5.0];
        let (idx, v) =
            min_by_index(vals.len(), |i| vals[i], |x, y| x < y).unwrap();
        assert_eq!(idx, 1);
        assert_eq!(v, 1.0);
    }

    #[test]
    fn sums_are_deterministic() {
        let s1 = sum_range(10_000, |i| (i as f64).sqrt());
        let s2 = sum_range(10_000, |i| (i as f64).sqrt());
        assert_eq!(s1.to_bits(), s2.to_bits());
        let v = sum_vectors(5000, 3, |i| vec![i as f64, 1.0, -(i as f64)]);
        assert_eq!(v[1], 5000.0);
        assert_eq!(v[0], -v[2]);
    }
}
