//! Frozen reference values. Closed forms are checked directly; numerical
//! references were produced by an independent brute-force implementation
//! (recursive hafnians over all outcomes, dense `expm` in a single mode,
//! 40-digit mpmath series) on the explicitly specified instances below.

use std::f64::consts::PI;

use approx::assert_relative_eq;
use gpnl_core::fock::{enumerate_basis, OccupationVector};
use gpnl_core::gbs::{
    chernoff_bound, chernoff_cutoffs, exact_photon_tail, fock_probability, gbs_probability, pair_distribution,
};
use gpnl_core::hadamard::{
    cat_components, recover_amplitude, run_hadamard, HadamardCoefficients, DEFAULT_CONDITIONING_MARGIN,
};
use gpnl_core::kerr::{energy, lemma1_hamiltonian, lemma1_target, spectrum};
use gpnl_core::reduction::{amplitude, reconstruct, AmplitudeSeries};
use gpnl_core::{DiagonalHamiltonian, GaussianSpec, GbsInstance, Gpnl1Instance, HadamardInstance, Matrix, NumberConservingOp, C64};

fn dft(m: usize) -> Matrix {
    let norm = (m as f64).sqrt().recip();
    Matrix::from_fn(m, m, |i, j| C64::from_polar(norm, 2.0 * PI * (i * j) as f64 / m as f64))
}

fn occ(v: &[u32]) -> OccupationVector {
    OccupationVector::new(v.to_vec())
}

#[test]
fn gbs_probabilities_on_the_fourier_interferometer() {
    let inst = GbsInstance::new(dft(4), 0.4, 3).unwrap();
    let cases: [(&[u32], f64); 4] = [
        (&[1, 1, 0, 0], 0.007141118454022212),
        (&[0, 1, 1, 0], 0.007141118454022205),
        (&[1, 0, 1, 0], 0.007141118454022208),
        (&[1, 1, 1, 1], 6.443128304754678e-05),
    ];
    for (s, want) in cases {
        let s = occ(s);
        assert_relative_eq!(gbs_probability(&inst, &s).unwrap(), want, max_relative = 1e-12);
        assert_relative_eq!(fock_probability(&inst, &s).unwrap(), want, max_relative = 1e-10);
    }
}

fn fourier_instance(cutoff: usize) -> Gpnl1Instance {
    let gbs = GbsInstance::new(dft(4), 0.2, 3).unwrap();
    Gpnl1Instance::lemma1(gbs, 2, cutoff, false).unwrap()
}

#[test]
fn amplitudes_on_the_fourier_interferometer() {
    // reference truncated at 14 photons, like the simulation
    let inst = fourier_instance(14);
    for (t, re, im) in [(0.3, 0.9432804913907468, -0.0066655675171268716), (1.7, 0.923484278128456, -0.027173508094708865)] {
        let a = amplitude(&inst, t).unwrap().value;
        assert!((a - C64::new(re, im)).norm() < 1e-12, "t = {t}: {a}");
    }
    let spec = inst.spectrum().unwrap();
    assert_relative_eq!(spec.weight(10.0), 0.0022939287828142732, max_relative = 1e-10);
    assert_relative_eq!(spec.total_weight(), 0.9999999999825989, max_relative = 1e-12);
}

#[test]
fn target_energy_and_hamiltonian_coefficients() {
    // j* = N(N² + 1), coefficient N² on the first N modes, N²(N+2) on the rest
    let h = lemma1_hamiltonian(2, 3).unwrap();
    assert_eq!(h.mu, vec![4.0, 4.0, 16.0]);
    assert_eq!(h.eta, vec![1.0, 1.0, 0.0]);
    assert_eq!(energy(&occ(&[1, 1, 0]), &h).unwrap(), 10.0);
    assert_eq!(energy(&occ(&[0, 0, 1]), &h).unwrap(), 16.0);
    let h = lemma1_hamiltonian(1, 2).unwrap();
    assert_eq!((h.mu.clone(), h.eta.clone()), (vec![1.0, 3.0], vec![1.0, 0.0]));
    assert_eq!(lemma1_target(1, 2).1, 2);
    assert_eq!(lemma1_target(3, 5).1, 30);
    let b = enumerate_basis(3, 3).unwrap();
    let target = gpnl_core::StateVector::basis_state(b, &[1, 1, 0]).unwrap();
    let s = spectrum(&target, &lemma1_hamiltonian(2, 3).unwrap()).unwrap();
    assert_eq!(s.support(), vec![(10.0, 1.0)]);
}

#[test]
fn pair_distribution_closed_forms() {
    for r in [0.2, 0.5, 1.0_f64] {
        let (sech, tanh) = (1.0 / r.cosh(), r.tanh());
        for n in 0..8 {
            assert_relative_eq!(pair_distribution(2, r, n), sech.powi(2) * tanh.powi(2 * n as i32), max_relative = 1e-13);
        }
        assert_relative_eq!(pair_distribution(1, r, 1), 0.5 * sech * tanh * tanh, max_relative = 1e-14);
        assert_relative_eq!(pair_distribution(3, r, 0), sech.powi(3), max_relative = 1e-14);
    }
}

#[test]
fn chernoff_reference_point() {
    let c = chernoff_cutoffs(3, 0.4, 2, 1.0);
    assert_relative_eq!(c.n_star, 6.489274835494814, max_relative = 1e-13);
    assert_eq!(c.j_max, 256);
    assert_eq!(chernoff_cutoffs(3, 0.4, 3, 1.0).j_max, 2025);
    assert_relative_eq!(exact_photon_tail(3, 0.4, c.n_star), 0.0010051161643099793, max_relative = 1e-12);
    assert_relative_eq!(chernoff_bound(3, 0.4, c.n_star, 0.5), 0.03243275058577919, max_relative = 1e-12);
}

#[test]
fn aliasing_identity() {
    let series = AmplitudeSeries::from_spectrum(&[(10, 0.6), (266, 0.1)], 256);
    assert!((reconstruct(&series, 10).unwrap().q - 0.7).abs() < 1e-13);
}

#[test]
fn cat_overlaps() {
    for alpha in [C64::new(0.8, 0.0), C64::new(0.3, -0.6)] {
        let x = alpha.norm_sqr();
        let cat = cat_components(alpha, 30).unwrap();
        let coh = gpnl_core::gaussian::coherent_coefficients(alpha, 30);
        let full = gpnl_core::StateVector::new(cat.plus.basis().clone(), coh).unwrap();
        let plus = gpnl_core::fock::inner_product(&full, &cat.plus).unwrap();
        let minus = gpnl_core::fock::inner_product(&full, &cat.minus).unwrap();
        assert!((plus - (-x).exp() * x.cosh()).norm() < 1e-14);
        assert!((minus - (-x).exp() * x.sinh()).norm() < 1e-14);
    }
}

#[test]
fn single_mode_hadamard_reference() {
    let spec = GaussianSpec::new(vec![0.3], Matrix::identity(1, 1), vec![C64::new(0.2, 0.1)]).unwrap();
    let prime = GaussianSpec::new(vec![0.2], Matrix::identity(1, 1), vec![C64::new(0.0, -0.1)]).unwrap();
    let h = DiagonalHamiltonian::new(vec![0.5], vec![0.7], None, false).unwrap();
    let v = NumberConservingOp::Kerr { h, t: 0.9, sign: -1.0 };
    let inst = HadamardInstance::new(spec, prime, v, C64::new(0.8, 0.0), None).unwrap();
    let rep = run_hadamard(&inst, DEFAULT_CONDITIONING_MARGIN).unwrap();
    assert!((rep.p_real - 0.9313181314064578).abs() < 1e-10, "{rep:?}");
    assert!((rep.p_imag - 0.25334543506608936).abs() < 1e-10, "{rep:?}");
    assert!((rep.direct_re - 0.9275969579370655).abs() < 1e-10);
    assert!((rep.direct_im - 0.022778970513574366).abs() < 1e-10);
    assert!((rep.recovered_re - 0.9275969579370655).abs() < 1e-8);
    assert!((rep.recovered_im - 0.022778970513574366).abs() < 1e-8);
    assert_eq!(rep.controlled_phase_calls, 2);
}

#[test]
fn recovery_coefficients() {
    // c1 = e^{-2x} ch², c2 = e^{-2x} sh², c3 = 2 e^{-2x} ch sh at x = 0.64
    let c = HadamardCoefficients::real(C64::new(0.8, 0.0));
    let (d, ch, sh) = ((-1.28f64).exp(), 0.64f64.cosh(), 0.64f64.sinh());
    assert_relative_eq!(c.c1, d * ch * ch, max_relative = 1e-15);
    assert_relative_eq!(c.c2, d * sh * sh, max_relative = 1e-15);
    assert_relative_eq!(c.c3, 2.0 * d * ch * sh, max_relative = 1e-15);
    let rec = recover_amplitude(0.5, 0.3, C64::new(0.9, 0.0), 0.4, C64::new(0.8, 0.0), DEFAULT_CONDITIONING_MARGIN).unwrap();
    assert_relative_eq!(rec.conditioning_real, (1.28f64).exp() / (2.0 * ch * sh), max_relative = 1e-15);
}
