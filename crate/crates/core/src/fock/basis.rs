use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::binomial;

/// Bases larger than this are rejected by [`enumerate_basis`].
pub const DEFAULT_MAX_DIMENSION: usize = 5_000_000;

/// Photon counts per mode, `(s_1, ..., s_M)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct OccupationVector(Vec<u32>);

impl OccupationVector {
    pub fn new(occupations: Vec<u32>) -> Self {
        Self(occupations)
    }

    pub fn vacuum(modes: usize) -> Self {
        Self(vec![0; modes])
    }

    /// `1^n 0^(modes - n)`: one photon in each of the first `n` modes.
    pub fn leading_ones(n: usize, modes: usize) -> Self {
        Self((0..modes).map(|i| u32::from(i < n)).collect())
    }

    pub fn modes(&self) -> usize {
        self.0.len()
    }

    pub fn total_photons(&self) -> usize {
        self.0.iter().map(|&s| s as usize).sum()
    }

    pub fn collision_free(&self) -> bool {
        self.0.iter().all(|&s| s <= 1)
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<u32> {
        self.0
    }
}

impl From<Vec<u32>> for OccupationVector {
    fn from(v: Vec<u32>) -> Self {
        Self(v)
    }
}

impl From<&[u32]> for OccupationVector {
    fn from(v: &[u32]) -> Self {
        Self(v.to_vec())
    }
}

impl std::ops::Index<usize> for OccupationVector {
    type Output = u32;

    fn index(&self, i: usize) -> &u32 {
        &self.0[i]
    }
}

impl fmt::Display for OccupationVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, s) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{s}")?;
        }
        write!(f, ")")
    }
}

/// Every occupation pattern of `modes` modes with at most `cutoff` photons,
/// together with an arithmetic ranking that maps patterns back to indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FockBasis {
    modes: usize,
    cutoff: usize,
    // row-major, `dimension * modes` entries
    occupations: Vec<u32>,
    // leq[m][r] = number of m-mode patterns with at most r photons = C(r + m, m)
    leq: Vec<Vec<usize>>,
}

/// Enumerate the truncated basis with the default size limit.
pub fn enumerate_basis(modes: usize, cutoff: usize) -> Result<Arc<FockBasis>> {
    enumerate_basis_with_limit(modes, cutoff, DEFAULT_MAX_DIMENSION)
}

pub fn enumerate_basis_with_limit(modes: usize, cutoff: usize, limit: usize) -> Result<Arc<FockBasis>> {
    FockBasis::new(modes, cutoff, limit).map(Arc::new)
}

impl FockBasis {
    fn new(modes: usize, cutoff: usize, limit: usize) -> Result<Self> {
        if modes == 0 {
            return Err(Error::InvalidParameter("a Fock basis needs at least one mode".into()));
        }
        let dimension = binomial((modes + cutoff) as u64, cutoff as u64).unwrap_or(u128::MAX);
        if dimension > limit as u128 {
            return Err(Error::BasisTooLarge { modes, cutoff, dimension, limit });
        }
        let dimension = dimension as usize;

        let leq = (0..=modes)
            .map(|m| {
                (0..=cutoff)
                    .map(|r| binomial((r + m) as u64, m as u64).expect("bounded by dimension") as usize)
                    .collect()
            })
            .collect();

        let mut occupations = Vec::with_capacity(dimension * modes);
        let mut current = vec![0u32; modes];
        for total in 0..=cutoff {
            push_compositions(&mut occupations, &mut current, 0, total);
        }
        debug_assert_eq!(occupations.len(), dimension * modes);

        Ok(Self { modes, cutoff, occupations, leq })
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn dimension(&self) -> usize {
        self.occupations.len() / self.modes
    }

    /// Occupation pattern of basis element `index`.
    pub fn occupation(&self, index: usize) -> &[u32] {
        &self.occupations[index * self.modes..(index + 1) * self.modes]
    }

    pub fn state_of(&self, index: usize) -> OccupationVector {
        OccupationVector::from(self.occupation(index))
    }

    /// Number of basis elements with at most `photons` photons. Because of
    /// the graded ordering these are exactly the leading elements.
    pub fn prefix_len(&self, photons: usize) -> usize {
        self.leq[self.modes][photons.min(self.cutoff)]
    }

    /// Index range of the sector with exactly `photons` photons.
    pub fn sector_range(&self, photons: usize) -> std::ops::Range<usize> {
        assert!(photons <= self.cutoff);
        let start = if photons == 0 { 0 } else { self.leq[self.modes][photons - 1] };
        start..self.leq[self.modes][photons]
    }

    /// Dense index of an occupation pattern, if it is retained by the cutoff.
    pub fn index_of(&self, occupation: &[u32]) -> Option<usize> {
        if occupation.len() != self.modes {
            return None;
        }
        let total: usize = occupation.iter().map(|&s| s as usize).sum();
        if total > self.cutoff {
            return None;
        }
        Some(self.rank_unchecked(occupation, total))
    }

    /// Rank of a pattern known to be retained, with its total precomputed.
    pub(crate) fn rank_unchecked(&self, occupation: &[u32], total: usize) -> usize {
        let mut index = if total == 0 { 0 } else { self.leq[self.modes][total - 1] };
        let mut remaining = total;
        for (i, &s) in occupation.iter().enumerate() {
            let s = s as usize;
            if s > 0 {
                let rest = self.modes - 1 - i;
                index += self.leq[rest][remaining] - self.leq[rest][remaining - s];
            }
            remaining -= s;
        }
        index
    }
}

// Appends every composition of `total` into the modes `pos..` in ascending
// lexicographic order.
fn push_compositions(out: &mut Vec<u32>, current: &mut [u32], pos: usize, total: usize) {
    let modes = current.len();
    if pos == modes - 1 {
        current[pos] = total as u32;
        out.extend_from_slice(current);
        return;
    }
    for first in 0..=total {
        current[pos] = first as u32;
        push_compositions(out, current, pos + 1, total - first);
    }
    current[pos] = 0;
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_mode_enumeration() {
        let b = enumerate_basis(1, 3).unwrap();
        assert_eq!(b.dimension(), 4);
        let states: Vec<_> = (0..4).map(|i| b.occupation(i)[0]).collect();
        assert_eq!(states, vec![0, 1, 2, 3]);
    }

    #[test]
    fn two_modes_two_photons() {
        let b = enumerate_basis(2, 2).unwrap();
        assert_eq!(b.dimension(), 6);
        let listed: Vec<Vec<u32>> = (0..6).map(|i| b.occupation(i).to_vec()).collect();
        assert_eq!(
            listed,
            vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![0, 2], vec![1, 1], vec![2, 0]]
        );
    }

    #[test]
    fn four_modes_four_photons_matches_direct_count() {
        // oracle: count every vector in {0..=4}^4 with total <= 4
        let mut count = 0;
        for a in 0..=4u32 {
            for b in 0..=4u32 {
                for c in 0..=4u32 {
                    for d in 0..=4u32 {
                        if a + b + c + d <= 4 {
                            count += 1;
                        }
                    }
                }
            }
        }
        assert_eq!(count, 70);
        assert_eq!(enumerate_basis(4, 4).unwrap().dimension(), count);
    }

    #[test]
    fn index_round_trip() {
        let b = enumerate_basis(4, 6).unwrap();
        for i in 0..b.dimension() {
            assert_eq!(b.index_of(b.occupation(i)), Some(i));
        }
        assert_eq!(b.index_of(&[7, 0, 0, 0]), None);
        assert_eq!(b.index_of(&[1, 0, 0]), None);
    }

    #[test]
    fn oversized_basis_names_dimension() {
        match enumerate_basis_with_limit(10, 20, 1000).unwrap_err() {
            Error::BasisTooLarge { dimension, .. } => assert_eq!(dimension, 30_045_015),
            other => panic!("unexpected {other:?}"),
        }
        let msg = enumerate_basis_with_limit(3, 10, 5).unwrap_err().to_string();
        assert!(msg.contains("286"), "{msg}");
    }

    #[test]
    fn sector_ranges_partition_the_basis() {
        let b = enumerate_basis(3, 5).unwrap();
        let mut next = 0;
        for n in 0..=5 {
            let r = b.sector_range(n);
            assert_eq!(r.start, next);
            for i in r.clone() {
                assert_eq!(b.state_of(i).total_photons(), n);
            }
            next = r.end;
        }
        assert_eq!(next, b.dimension());
    }

    #[test]
    fn occupation_vector_predicates() {
        let s = OccupationVector::new(vec![1, 0, 1]);
        assert_eq!(s.total_photons(), 2);
        assert!(s.collision_free());
        assert!(!OccupationVector::new(vec![2, 0]).collision_free());
        assert_eq!(OccupationVector::leading_ones(2, 4).as_slice(), &[1, 1, 0, 0]);
        assert_eq!(s.to_string(), "(1,0,1)");
    }
}
