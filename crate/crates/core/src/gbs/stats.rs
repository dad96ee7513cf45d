use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Probability of `n` photon pairs from `K` equal single-mode squeezers:
/// `binom(K/2 + n - 1, n) sech^K(r) tanh^{2n}(r)`, with the generalized
/// binomial evaluated as the product `Π_{i=1..n} (K/2 + i - 1) / i`.
pub fn pair_distribution(k: usize, r: f64, n: usize) -> f64 {
    let t2 = r.tanh().powi(2);
    let half = k as f64 / 2.0;
    let mut p = r.cosh().powi(-(k as i32));
    for i in 1..=n {
        p *= (half + i as f64 - 1.0) / i as f64 * t2;
    }
    p
}

/// Pair probabilities `p_0..p_{len-1}` by the ratio recursion
/// `p_{n+1} = p_n (K/2 + n) / (n + 1) tanh²(r)`.
pub fn pair_distribution_table(k: usize, r: f64, len: usize) -> Vec<f64> {
    let t2 = r.tanh().powi(2);
    let half = k as f64 / 2.0;
    let mut out = Vec::with_capacity(len);
    let mut p = r.cosh().powi(-(k as i32));
    for n in 0..len {
        out.push(p);
        p *= (half + n as f64) / (n + 1) as f64 * t2;
    }
    out
}

/// Exact `P(N' > n_star)` for the total photon number `N' = 2n`, summed
/// from the far tail inwards.
pub fn exact_photon_tail(k: usize, r: f64, n_star: f64) -> f64 {
    if k == 0 || r == 0.0 {
        return 0.0;
    }
    let first = if n_star < 0.0 { 0 } else { (n_star / 2.0).floor() as usize + 1 };
    let t2 = r.tanh().powi(2);
    let half = k as f64 / 2.0;
    let mut p = pair_distribution(k, r, first);
    let mut terms = Vec::new();
    let mut n = first;
    // the ratio tends to tanh² < 1; stop once terms are negligible and shrinking
    while p > 0.0 && n < first + 1_000_000 {
        terms.push(p);
        let ratio = (half + n as f64) / (n + 1) as f64 * t2;
        p *= ratio;
        n += 1;
        if ratio < 1.0 && p < 1e-300_f64.max(terms[0] * 1e-20) {
            break;
        }
    }
    terms.iter().rev().sum()
}

/// The β-parametrised Chernoff bound `(1-β)^{-K/2} (1 + β/sinh²r)^{-N*/2}`.
pub fn chernoff_bound(k: usize, r: f64, n_star: f64, beta: f64) -> f64 {
    let s2 = r.sinh().powi(2);
    (1.0 - beta).powf(-(k as f64) / 2.0) * (1.0 + beta / s2).powf(-n_star / 2.0)
}

/// Photon and energy cutoffs guaranteeing a tail below `exp(-c N log N)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChernoffCutoffs {
    pub n_star: f64,
    pub j_max: u64,
    pub tail_bound: f64,
    /// Whether `N²(N+2) > N*`, the condition under which `J_max` is justified.
    pub regime_ok: bool,
}

/// `N* = (4 sinh² r + 2)(log 2 / 2 · K + c N log N)` and `J_max = N⁴ (N+2)²`.
pub fn chernoff_cutoffs(k: usize, r: f64, n: usize, c: f64) -> ChernoffCutoffs {
    let nf = n as f64;
    let n_star = (4.0 * r.sinh().powi(2) + 2.0) * (std::f64::consts::LN_2 / 2.0 * k as f64 + c * nf * nf.ln());
    let n64 = n as u64;
    ChernoffCutoffs {
        n_star,
        j_max: n64.pow(4) * (n64 + 2).pow(2),
        tail_bound: (-c * nf * nf.ln()).exp(),
        regime_ok: (n64 * n64 * (n64 + 2)) as f64 > n_star,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChernoffReport {
    pub k: usize,
    pub r: f64,
    pub n_star: f64,
    pub exact_tail: f64,
    pub bound: f64,
    pub holds: bool,
}

/// Compare the exact photon tail with the β = 1/2 Chernoff expression.
pub fn chernoff_check(k: usize, r: f64, n_star: f64) -> Result<ChernoffReport> {
    if !r.is_finite() || !n_star.is_finite() || r.tanh().powi(2) >= 1.0 {
        return Err(Error::InvalidParameter(format!("Chernoff check needs tanh²(r) < 1, got r = {r}")));
    }
    let exact_tail = exact_photon_tail(k, r, n_star);
    let bound = chernoff_bound(k, r, n_star, 0.5);
    Ok(ChernoffReport { k, r, n_star, exact_tail, bound, holds: exact_tail <= bound })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use statrs::function::gamma::ln_gamma;

    #[test]
    fn closed_forms() {
        let r: f64 = 0.7;
        for k in 1..=4 {
            assert!((pair_distribution(k, r, 0) - r.cosh().powi(-(k as i32))).abs() < 1e-16);
        }
        for n in 0..20 {
            let expected = r.cosh().powi(-2) * r.tanh().powi(2 * n as i32);
            assert!((pair_distribution(2, r, n) - expected).abs() < 1e-16);
        }
        assert!((pair_distribution(1, r, 1) - 0.5 / r.cosh() * r.tanh().powi(2)).abs() < 1e-16);
    }

    #[test]
    fn normalised() {
        let total: f64 = (0..=50).map(|n| pair_distribution(2, 0.5, n)).sum();
        assert!((total - 1.0).abs() < 1e-12);
        for k in 1..=5 {
            let total: f64 = pair_distribution_table(k, 0.8, 400).iter().sum();
            assert!((total - 1.0).abs() < 1e-12, "K = {k}");
        }
    }

    #[test]
    fn gamma_binomials_agree() {
        for k in 1..=5usize {
            for n in 0..30usize {
                let a = k as f64 / 2.0 + n as f64 - 1.0;
                let ln_binom = ln_gamma(a + 1.0) - ln_gamma(n as f64 + 1.0) - ln_gamma(a - n as f64 + 1.0);
                let r: f64 = 0.6;
                let via_gamma = (ln_binom - k as f64 * r.cosh().ln() + 2.0 * n as f64 * r.tanh().ln()).exp();
                let p = pair_distribution(k, r, n);
                assert!((p - via_gamma).abs() <= 1e-12 * via_gamma.max(1e-300), "K={k} n={n}");
            }
        }
    }

    #[test]
    fn table_matches_pointwise() {
        let t = pair_distribution_table(3, 0.4, 30);
        for (n, &p) in t.iter().enumerate() {
            assert!((p - pair_distribution(3, 0.4, n)).abs() <= 1e-15 * p);
        }
    }

    #[test]
    fn moment_generating_function() {
        for k in 1..=3 {
            let r: f64 = 0.5;
            let t2 = r.tanh().powi(2);
            for x in [0.3, 1.0, 1.5, 0.9 / t2] {
                // x^n p_n by its own ratio recursion, avoiding overflow of x^n
                let mut term = r.cosh().powi(-(k as i32));
                let mut series = 0.0;
                for n in 0..2000 {
                    series += term;
                    term *= (k as f64 / 2.0 + n as f64) / (n + 1) as f64 * t2 * x;
                }
                let closed = (1.0 / r.cosh() / (1.0 - x * t2).sqrt()).powi(k as i32);
                assert!((series - closed).abs() < 1e-10 * closed, "K={k} x={x}");
            }
        }
    }

    #[test]
    fn cutoffs() {
        assert_eq!(chernoff_cutoffs(3, 0.4, 2, 1.0).j_max, 256);
        assert_eq!(chernoff_cutoffs(3, 0.4, 3, 1.0).j_max, 2025);
        let c = chernoff_cutoffs(2, 1.0, 2, 1.0);
        let expected = (4.0 * 1f64.sinh().powi(2) + 2.0) * (2f64.ln() + 2.0 * 2f64.ln());
        assert!((c.n_star - expected).abs() < 1e-12);
        assert!((c.tail_bound - 0.25).abs() < 1e-15);
        let c = chernoff_cutoffs(3, 0.4, 2, 1.0);
        assert!(c.regime_ok);
        assert!((c.n_star - 6.48935).abs() < 1e-4);
        assert!(!chernoff_cutoffs(3, 1.5, 2, 1.0).regime_ok);
    }

    #[test]
    fn chernoff_examples() {
        for (k, r, n_star) in [(2, 0.5, 10.0), (1, 0.3, 6.0), (3, 0.9, 400.0)] {
            let rep = chernoff_check(k, r, n_star).unwrap();
            assert!(rep.holds, "{rep:?}");
        }
        let far = chernoff_check(2, 0.5, 2000.0).unwrap();
        assert!(far.exact_tail < 1e-200 && far.bound < 1e-100);
    }

    #[test]
    fn exact_tail_matches_complement() {
        let k = 3;
        let r = 0.9;
        let head: f64 = (0..=5).map(|n| pair_distribution(k, r, n)).sum();
        assert!((exact_photon_tail(k, r, 10.5) - (1.0 - head)).abs() < 1e-12);
        assert!((exact_photon_tail(k, r, 11.0) - (1.0 - head)).abs() < 1e-12);
        assert_eq!(exact_photon_tail(k, 0.0, 3.0), 0.0);
    }

    proptest! {
        #[test]
        fn chernoff_never_violated(k in 1usize..=6, r in 0.05f64..2.0, n_star in 0.0f64..300.0) {
            let rep = chernoff_check(k, r, n_star).unwrap();
            prop_assert!(rep.holds, "{:?}", rep);
        }
    }
}
