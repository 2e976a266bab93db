use num_complex::Complex64;
use proptest::prelude::*;

use brownflow::ensembles::{sample_ginibre, sample_gue, sample_unitary_bm, BmKind, BmPathSpec};
use brownflow::spectra::{eigenvalues, histogram_1d, resolvent_trace, s_function_matrix, uniform_edges};
use brownflow::RngHandle;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn resolvent_trace_is_x_derivative(
        n in 2usize..=50,
        seed in any::<u64>(),
        re in -1.5f64..1.5,
        im in -1.5f64..1.5,
        x in 0.05f64..2.0,
    ) {
        let a = sample_ginibre(n, RngHandle::new(seed, 1)).unwrap();
        let lambda = Complex64::new(re, im);
        let h = 1e-5 * x;
        let fd = (s_function_matrix(&a, lambda, x + h).unwrap() - s_function_matrix(&a, lambda, x - h).unwrap()) / (2.0 * h);
        let tr = resolvent_trace(&a, lambda, x).unwrap();
        prop_assert!((fd - tr).abs() <= 1e-6 * tr.abs().max(1.0), "{} vs {}", fd, tr);
    }

    #[test]
    fn s_increasing_in_x(n in 2usize..=30, seed in any::<u64>(), x in 0.01f64..3.0, dx in 0.01f64..1.0) {
        let a = sample_ginibre(n, RngHandle::new(seed, 2)).unwrap();
        let lambda = Complex64::new(0.3, -0.2);
        prop_assert!(s_function_matrix(&a, lambda, x + dx).unwrap() > s_function_matrix(&a, lambda, x).unwrap());
    }

    #[test]
    fn histogram_conserves_in_range_mass(values in proptest::collection::vec(-2.0f64..2.0, 1..200), bins in 1usize..40) {
        let h = histogram_1d(&values, uniform_edges(-2.0, 2.0, bins)).unwrap();
        let total: f64 = h.masses.iter().sum();
        prop_assert!((total - 1.0).abs() < 1e-12);
    }
}

#[test]
fn samplers_are_deterministic() {
    let a = sample_gue(20, RngHandle::new(5, 3)).unwrap();
    let b = sample_gue(20, RngHandle::new(5, 3)).unwrap();
    let c = sample_gue(20, RngHandle::new(5, 4)).unwrap();
    assert_eq!(a, b);
    assert_ne!(a, c);
}

#[test]
fn unitary_path_stays_on_circle() {
    let spec = BmPathSpec::new(BmKind::Unitary, 200, 1.0, 100);
    let u = sample_unitary_bm(&spec, RngHandle::new(11, 0)).unwrap();
    let spec_eigs = eigenvalues(&u).unwrap();
    let worst = spec_eigs.eigenvalues.iter().map(|z| (z.norm() - 1.0).abs()).fold(0.0, f64::max);
    assert!(worst < 1e-10, "max ||z| - 1| = {worst}");
}

#[test]
fn gue_trace_has_zero_mean() {
    // tr(X)/n for n x n GUE with E|X_ij|^2 = 1/n has variance 1/n^2.
    let n = 40;
    let mean: f64 = (0..200)
        .map(|j| {
            let m = sample_gue(n, RngHandle::new(9, 0).sample(j)).unwrap();
            m.trace().re / n as f64
        })
        .sum::<f64>()
        / 200.0;
    assert!(mean.abs() < 5.0 / (n as f64 * 200f64.sqrt()));
}
