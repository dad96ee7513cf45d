use crate::error::{Error, Result};
use crate::numeric::{Matrix, C64};

/// Largest matrix accepted by [`hafnian`].
pub const HAFNIAN_LIMIT: usize = 20;

/// Complex symmetric matrix (`A = Aᵀ` to within `1e-12`).
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricComplexMatrix(Matrix);

impl SymmetricComplexMatrix {
    pub const TOLERANCE: f64 = 1e-12;

    pub fn new(entries: Matrix) -> Result<Self> {
        if entries.nrows() != entries.ncols() {
            return Err(Error::DimensionMismatch(format!("{}x{} matrix is not square", entries.nrows(), entries.ncols())));
        }
        let deviation = crate::numeric::max_abs_diff(&entries, &entries.transpose());
        if !(deviation <= Self::TOLERANCE) {
            return Err(Error::NotSymmetric { deviation });
        }
        Ok(Self(entries))
    }

    pub fn size(&self) -> usize {
        self.0.nrows()
    }

    pub fn entries(&self) -> &Matrix {
        &self.0
    }

    /// Principal submatrix on `indices` (kept in the given order).
    pub fn submatrix(&self, indices: &[usize]) -> Self {
        Self(Matrix::from_fn(indices.len(), indices.len(), |i, j| self.0[(indices[i], indices[j])]))
    }
}

/// Sum over perfect matchings of the product of matched entries.
///
/// Dynamic programme over vertex subsets: `h[S] = Σ_{j∈S} A_{ij} h[S∖{i,j}]`
/// with `i = min S`, filled in increasing subset order so every lookup is
/// already final. Odd sizes give zero; the empty matrix gives one.
pub fn hafnian(a: &SymmetricComplexMatrix) -> Result<C64> {
    let n = a.size();
    if n > HAFNIAN_LIMIT {
        return Err(Error::HafnianTooLarge { size: n, limit: HAFNIAN_LIMIT });
    }
    if n % 2 == 1 {
        return Ok(C64::new(0.0, 0.0));
    }
    if n == 0 {
        return Ok(C64::new(1.0, 0.0));
    }
    let m = a.entries();
    let full = (1usize << n) - 1;
    let mut h = vec![C64::new(0.0, 0.0); 1 << n];
    h[0] = C64::new(1.0, 0.0);
    for set in 1..=full {
        if set.count_ones() % 2 == 1 {
            continue;
        }
        let i = set.trailing_zeros() as usize;
        let rest = set & !(1 << i);
        let mut acc = C64::new(0.0, 0.0);
        let mut bits = rest;
        while bits != 0 {
            let j = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            acc += m[(i, j)] * h[rest & !(1 << j)];
        }
        h[set] = acc;
    }
    Ok(h[full])
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sym(n: usize, f: impl Fn(usize, usize) -> C64) -> SymmetricComplexMatrix {
        SymmetricComplexMatrix::new(Matrix::from_fn(n, n, |i, j| if i <= j { f(i, j) } else { f(j, i) })).unwrap()
    }

    fn entry(seed: u64, i: usize, j: usize) -> C64 {
        let x = ((seed.wrapping_mul(6364136223846793005).wrapping_add((i * 31 + j * 7) as u64) >> 11) % 1000) as f64;
        C64::new(x / 500.0 - 1.0, (x * 0.37).sin())
    }

    // brute-force oracle: recursive enumeration of matchings
    fn matchings(a: &Matrix, rest: &[usize]) -> C64 {
        if rest.is_empty() {
            return C64::new(1.0, 0.0);
        }
        let i = rest[0];
        let mut acc = C64::new(0.0, 0.0);
        for k in 1..rest.len() {
            let j = rest[k];
            let remaining: Vec<usize> = rest.iter().copied().filter(|&x| x != i && x != j).collect();
            acc += a[(i, j)] * matchings(a, &remaining);
        }
        acc
    }

    #[test]
    fn small_cases() {
        assert_eq!(hafnian(&sym(0, |_, _| C64::new(0.0, 0.0))).unwrap(), C64::new(1.0, 0.0));
        let b = C64::new(0.3, -1.2);
        let m = sym(2, |i, j| if i == j { C64::new(5.0, 0.0) } else { b });
        assert_eq!(hafnian(&m).unwrap(), b);
        let a = sym(4, |i, j| entry(3, i, j));
        let e = a.entries();
        let expected = e[(0, 1)] * e[(2, 3)] + e[(0, 2)] * e[(1, 3)] + e[(0, 3)] * e[(1, 2)];
        assert!((hafnian(&a).unwrap() - expected).norm() < 1e-14);
        assert_eq!(hafnian(&sym(3, |i, j| entry(1, i, j))).unwrap(), C64::new(0.0, 0.0));
    }

    #[test]
    fn all_ones_counts_matchings() {
        // (2k-1)!! perfect matchings of K_{2k}
        let mut double_factorial = 1.0;
        for k in 1..=6 {
            double_factorial *= (2 * k - 1) as f64;
            let h = hafnian(&sym(2 * k, |_, _| C64::new(1.0, 0.0))).unwrap();
            assert_eq!(h, C64::new(double_factorial, 0.0));
        }
    }

    #[test]
    fn limits_and_validation() {
        let big = sym(22, |_, _| C64::new(0.0, 0.0));
        assert!(matches!(hafnian(&big), Err(Error::HafnianTooLarge { size: 22, limit: 20 })));
        let mut m = Matrix::zeros(2, 2);
        m[(0, 1)] = C64::new(1.0, 0.0);
        assert!(SymmetricComplexMatrix::new(m).is_err());
    }

    #[test]
    fn block_diagonal_factorises() {
        for (p, q) in [(2, 2), (2, 4)] {
            let a = sym(p, |i, j| entry(11, i, j));
            let b = sym(q, |i, j| entry(12, i, j));
            let joint = sym(p + q, |i, j| {
                if i < p && j < p {
                    a.entries()[(i, j)]
                } else if i >= p && j >= p {
                    b.entries()[(i - p, j - p)]
                } else {
                    C64::new(0.0, 0.0)
                }
            });
            let lhs = hafnian(&joint).unwrap();
            let rhs = hafnian(&a).unwrap() * hafnian(&b).unwrap();
            assert!((lhs - rhs).norm() < 1e-13);
        }
    }

    proptest! {
        #[test]
        fn agrees_with_matching_enumeration(seed in any::<u64>(), half in 1usize..=4) {
            let n = 2 * half;
            let a = sym(n, |i, j| entry(seed, i, j));
            let oracle = matchings(a.entries(), &(0..n).collect::<Vec<_>>());
            prop_assert!((hafnian(&a).unwrap() - oracle).norm() < 1e-11 * (1.0 + oracle.norm()));
        }
    }
}
