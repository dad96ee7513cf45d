//! Small numeric helpers shared across the crate.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

pub type C64 = Complex64;
pub type Matrix = DMatrix<C64>;

/// Block length used by [`det_sum`]. Fixed so reductions never depend on the
/// number of worker threads.
const SUM_CHUNK: usize = 4096;

/// Deterministic parallel sum: fixed-size chunks are summed sequentially on
/// the worker pool, then the chunk partials are combined by a pairwise tree.
pub fn det_sum<T, F>(len: usize, term: F) -> T
where
    T: Copy + Send + Sync + std::ops::Add<Output = T> + Default,
    F: Fn(usize) -> T + Sync,
{
    if len == 0 {
        return T::default();
    }
    let partials: Vec<T> = (0..len.div_ceil(SUM_CHUNK))
        .into_par_iter()
        .map(|chunk| {
            let start = chunk * SUM_CHUNK;
            let end = (start + SUM_CHUNK).min(len);
            (start..end).fold(T::default(), |acc, i| acc + term(i))
        })
        .collect();
    pairwise(&partials)
}

/// Sequential pairwise summation of a slice.
pub fn pairwise<T>(values: &[T]) -> T
where
    T: Copy + std::ops::Add<Output = T> + Default,
{
    match values.len() {
        0 => T::default(),
        1 => values[0],
        n => {
            let (lo, hi) = values.split_at(n / 2);
            pairwise(lo) + pairwise(hi)
        }
    }
}

/// Largest absolute entry of `U U^† - I`.
pub fn unitarity_deviation(u: &Matrix) -> f64 {
    if u.nrows() != u.ncols() {
        return f64::INFINITY;
    }
    let prod = u * u.adjoint();
    let mut worst = 0.0f64;
    for i in 0..u.nrows() {
        for j in 0..u.ncols() {
            let target = if i == j { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) };
            worst = worst.max((prod[(i, j)] - target).norm());
        }
    }
    worst
}

/// Largest absolute entry of `A - B`.
pub fn max_abs_diff(a: &Matrix, b: &Matrix) -> f64 {
    assert_eq!(a.shape(), b.shape());
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Binomial coefficient as `u128`, `None` on overflow.
pub fn binomial(n: u64, k: u64) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.checked_mul((n - i) as u128)? / (i as u128 + 1);
    }
    Some(acc)
}

/// `ln(n!)` by direct summation for small `n`.
pub fn ln_factorial(n: usize) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}
