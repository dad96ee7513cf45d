use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::numeric::{Matrix, C64};

/// Haar-random `M x M` unitary: QR of a complex Ginibre matrix with the
/// phases of `R`'s diagonal moved into `Q`. Deterministic in `seed`.
pub fn haar_unitary(modes: usize, seed: u64) -> Matrix {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    haar_unitary_with(modes, &mut rng)
}

pub fn haar_unitary_with<R: rand::Rng + ?Sized>(modes: usize, rng: &mut R) -> Matrix {
    assert!(modes >= 1, "haar_unitary needs at least one mode");
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    let ginibre = DMatrix::from_fn(modes, modes, |_, _| {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        C64::new(re * scale, im * scale)
    });
    let qr = ginibre.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..modes {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { C64::new(1.0, 0.0) };
        for i in 0..modes {
            q[(i, j)] *= phase;
        }
    }
    q
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::unitarity_deviation;

    #[test]
    fn single_mode_is_a_phase() {
        for seed in 0..5 {
            let u = haar_unitary(1, seed);
            assert!((u[(0, 0)].norm() - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn three_modes_seed_seven_is_unitary() {
        assert!(unitarity_deviation(&haar_unitary(3, 7)) <= 1e-12);
    }

    #[test]
    fn deterministic_in_seed() {
        assert_eq!(haar_unitary(4, 99), haar_unitary(4, 99));
        assert_ne!(haar_unitary(4, 99), haar_unitary(4, 100));
    }

    // |U_11|^2 of a 2x2 Haar unitary is uniform on [0, 1].
    #[test]
    fn two_mode_marginal_is_uniform() {
        let n = 10_000;
        let mut rng = ChaCha20Rng::seed_from_u64(2024);
        let mut xs: Vec<f64> = (0..n).map(|_| haar_unitary_with(2, &mut rng)[(0, 0)].norm_sqr()).collect();
        xs.sort_by(f64::total_cmp);
        let d = xs
            .iter()
            .enumerate()
            .map(|(i, &x)| {
                let lo = x - i as f64 / n as f64;
                let hi = (i + 1) as f64 / n as f64 - x;
                lo.max(hi)
            })
            .fold(0.0, f64::max);
        let p = kolmogorov_p_value(d, n);
        assert!(p > 0.01, "KS statistic {d}, p = {p}");
    }

    fn kolmogorov_p_value(d: f64, n: usize) -> f64 {
        let sn = (n as f64).sqrt();
        let lambda = (sn + 0.12 + 0.11 / sn) * d;
        let mut sum = 0.0;
        for k in 1..=100 {
            let k = k as f64;
            let sign = if k as u64 % 2 == 1 { 1.0 } else { -1.0 };
            sum += sign * (-2.0 * k * k * lambda * lambda).exp();
        }
        (2.0 * sum).clamp(0.0, 1.0)
    }
}
