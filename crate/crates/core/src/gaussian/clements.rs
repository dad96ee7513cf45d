use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{unitarity_deviation, Matrix, C64};

/// Unitarity tolerance accepted by the decomposition.
pub const UNITARITY_TOLERANCE: f64 = 1e-10;

/// Two-mode element `T_{m,n}(θ, φ)`: a phase `φ` on mode `m` followed by a
/// real rotation by `θ` between modes `m` and `n`. On the mode operators it
/// acts through the block `[[e^{iφ} cos θ, -sin θ], [e^{iφ} sin θ, cos θ]]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rotation {
    pub modes: (usize, usize),
    pub theta: f64,
    pub phi: f64,
}

impl Rotation {
    /// The 2x2 mode-transfer block in `(m, n)` order.
    pub fn block(&self) -> [[C64; 2]; 2] {
        let (s, c) = self.theta.sin_cos();
        let e = C64::from_polar(1.0, self.phi);
        [[e * c, C64::new(-s, 0.0)], [e * s, C64::new(c, 0.0)]]
    }

    fn embed(&self, size: usize) -> Matrix {
        let mut t = Matrix::identity(size, size);
        let b = self.block();
        let (m, n) = self.modes;
        t[(m, m)] = b[0][0];
        t[(m, n)] = b[0][1];
        t[(n, m)] = b[1][0];
        t[(n, n)] = b[1][1];
        t
    }
}

/// Rectangular-mesh factorisation `U = diag(e^{iφ_k}) · T_last ··· T_first`.
/// `rotations` are listed in the order they act on a state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InterferometerDecomposition {
    pub size: usize,
    pub rotations: Vec<Rotation>,
    pub phases: Vec<f64>,
}

impl InterferometerDecomposition {
    pub fn recompose(&self) -> Matrix {
        let mut u = Matrix::identity(self.size, self.size);
        for rot in &self.rotations {
            u = rot.embed(self.size) * u;
        }
        for (i, &p) in self.phases.iter().enumerate() {
            let e = C64::from_polar(1.0, p);
            for j in 0..self.size {
                u[(i, j)] *= e;
            }
        }
        u
    }
}

/// Decompose a unitary into `M(M-1)/2` nearest-neighbour rotations arranged
/// as a rectangular mesh, plus output phases.
pub fn clements_decompose(u: &Matrix) -> Result<InterferometerDecomposition> {
    let deviation = unitarity_deviation(u);
    if !(deviation <= UNITARITY_TOLERANCE) {
        return Err(Error::NotUnitary { deviation, tolerance: UNITARITY_TOLERANCE });
    }
    let size = u.nrows();
    let mut v = u.clone();
    let mut right = Vec::new();
    let mut left = Vec::new();

    for (k, i) in (0..size.saturating_sub(1)).rev().enumerate() {
        if k % 2 == 0 {
            for j in (0..size - 1 - i).rev() {
                // null v[i+j+1, j] by mixing columns j and j+1 from the right
                let (row, col) = (i + j + 1, j);
                let (a, b) = (v[(row, col)], v[(row, col + 1)]);
                let rot = Rotation {
                    modes: (col, col + 1),
                    theta: a.norm().atan2(b.norm()),
                    phi: phase_of(a * b.conj()),
                };
                mix_columns_with_inverse(&mut v, &rot);
                right.push(rot);
            }
        } else {
            for j in 0..size - 1 - i {
                // null v[i+j+1, j] by mixing rows i+j and i+j+1 from the left
                let (row, col) = (i + j + 1, j);
                let (a, b) = (v[(row, col)], v[(row - 1, col)]);
                let rot = Rotation {
                    modes: (row - 1, row),
                    theta: a.norm().atan2(b.norm()),
                    phi: phase_of(-a * b.conj()),
                };
                mix_rows(&mut v, &rot);
                left.push(rot);
            }
        }
    }

    // U = L_1^† ··· L_p^† D T_{R_q} ··· T_{R_1}; push D to the far left.
    let mut diag: Vec<C64> = (0..size).map(|i| v[(i, i)]).collect();
    let mut rotations = right;
    for l in left.iter().rev() {
        let (m, n) = l.modes;
        let (dm, dn) = (diag[m], diag[n]);
        rotations.push(Rotation { modes: (m, n), theta: l.theta, phi: phase_of(-dm / dn) });
        diag[m] = -C64::from_polar(1.0, -l.phi) * dn;
    }
    Ok(InterferometerDecomposition {
        size,
        rotations,
        phases: diag.iter().map(|d| d.arg()).collect(),
    })
}

fn phase_of(z: C64) -> f64 {
    if z.norm() == 0.0 {
        0.0
    } else {
        z.arg()
    }
}

// v <- v · T^†
fn mix_columns_with_inverse(v: &mut Matrix, rot: &Rotation) {
    let b = rot.block();
    let (m, n) = rot.modes;
    for r in 0..v.nrows() {
        let (x, y) = (v[(r, m)], v[(r, n)]);
        v[(r, m)] = x * b[0][0].conj() + y * b[0][1].conj();
        v[(r, n)] = x * b[1][0].conj() + y * b[1][1].conj();
    }
}

// v <- T · v
fn mix_rows(v: &mut Matrix, rot: &Rotation) {
    let b = rot.block();
    let (m, n) = rot.modes;
    for c in 0..v.ncols() {
        let (x, y) = (v[(m, c)], v[(n, c)]);
        v[(m, c)] = b[0][0] * x + b[0][1] * y;
        v[(n, c)] = b[1][0] * x + b[1][1] * y;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::haar_unitary;
    use crate::numeric::max_abs_diff;

    #[test]
    fn identity_has_zero_angles() {
        let d = clements_decompose(&Matrix::identity(5, 5)).unwrap();
        assert_eq!(d.rotations.len(), 10);
        assert!(d.rotations.iter().all(|r| r.theta == 0.0));
        assert!(max_abs_diff(&d.recompose(), &Matrix::identity(5, 5)) < 1e-14);
    }

    #[test]
    fn diagonal_phases_need_no_rotation() {
        let phases = [0.3, -1.2, 2.5, 0.0];
        let u = Matrix::from_fn(4, 4, |i, j| if i == j { C64::from_polar(1.0, phases[i]) } else { C64::new(0.0, 0.0) });
        let d = clements_decompose(&u).unwrap();
        assert!(d.rotations.iter().all(|r| r.theta == 0.0));
        assert!(max_abs_diff(&d.recompose(), &u) < 1e-14);
    }

    #[test]
    fn haar_unitaries_recompose() {
        for size in 1..=7 {
            for seed in 0..5 {
                let u = haar_unitary(size, seed);
                let d = clements_decompose(&u).unwrap();
                assert_eq!(d.rotations.len(), size * (size - 1) / 2);
                let err = max_abs_diff(&d.recompose(), &u);
                assert!(err <= 1e-9, "size {size} seed {seed}: {err:e}");
            }
        }
    }

    #[test]
    fn rotations_are_nearest_neighbour() {
        let d = clements_decompose(&haar_unitary(6, 3)).unwrap();
        assert!(d.rotations.iter().all(|r| r.modes.1 == r.modes.0 + 1));
    }

    #[test]
    fn non_unitary_input_is_rejected() {
        let mut u = Matrix::identity(3, 3);
        u[(0, 1)] = C64::new(0.1, 0.0);
        assert!(matches!(clements_decompose(&u), Err(Error::NotUnitary { .. })));
    }
}
