use num_complex::Complex64;
use proptest::prelude::*;

use brownflow::hj_engine::{
    hj_value_along, mult_S_formula, mult_initial_state, mult_lifetime, mult_psi, mult_trajectory, HamiltonianId,
};

fn fd_gradient(y: &[f64; 6], h: f64) -> [f64; 6] {
    let id = HamiltonianId::Multiplicative;
    let mut g = [0.0; 6];
    for i in 0..6 {
        let (mut p, mut m) = (*y, *y);
        p[i] += h;
        m[i] -= h;
        g[i] = (id.value(&p) - id.value(&m)) / (2.0 * h);
    }
    g
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn partials_match_finite_differences(
        y in proptest::array::uniform6(-2.0f64..2.0),
    ) {
        let id = HamiltonianId::Multiplicative;
        let mut dq = [0.0; 3];
        let mut dp = [0.0; 3];
        id.gradient(&y, &mut dq, &mut dp);
        let analytic = [dq[0], dq[1], dq[2], dp[0], dp[1], dp[2]];
        let numeric = fd_gradient(&y, 1e-6);
        for i in 0..6 {
            let scale = analytic[i].abs().max(1.0);
            prop_assert!((analytic[i] - numeric[i]).abs() <= 1e-6 * scale,
                "component {}: {} vs {}", i, analytic[i], numeric[i]);
        }
    }

    #[test]
    fn closed_form_matches_action_integral(
        r in 0.3f64..1.8,
        theta in -3.0f64..3.0,
        x0 in 0.1f64..1.0,
        frac in 0.1f64..0.7,
    ) {
        let lambda0 = Complex64::from_polar(r, theta);
        let life = mult_lifetime(lambda0, x0, 1e-6).unwrap();
        prop_assume!(life.found);
        let traj = mult_trajectory(lambda0, x0, frac * life.estimate, 1e-12).unwrap();
        prop_assert!(traj.is_complete());
        let s0 = ((lambda0 - 1.0).norm_sqr() + x0).ln();
        let along = hj_value_along(&traj, s0).unwrap();
        let formula = mult_S_formula(&traj).unwrap();
        prop_assert!((along - formula).abs() <= 1e-7, "{} vs {}", along, formula);
    }

    #[test]
    fn energy_and_psi_conserved(
        r in 0.3f64..1.8,
        theta in -3.0f64..3.0,
        x0 in 0.1f64..1.0,
    ) {
        let lambda0 = Complex64::from_polar(r, theta);
        let tol = 1e-10;
        let traj = mult_trajectory(lambda0, x0, 0.3, tol).unwrap();
        prop_assume!(traj.is_complete());
        let h0 = traj.hamiltonian_at(0);
        let psi0 = mult_psi(&traj.mult_state(0));
        prop_assert!(traj.hamiltonian_drift() <= 10.0 * tol * (1.0 + h0.abs()));
        prop_assert!(traj.psi_drift() <= 10.0 * tol * (1.0 + psi0.abs()));
    }
}

#[test]
fn lifetime_examples() {
    let i = mult_lifetime(Complex64::new(0.0, 1.0), 1e-6, 1e-7).unwrap();
    assert!(i.found && (i.estimate - 2.0).abs() < 0.01);
    let m = mult_lifetime(Complex64::new(-1.0, 0.0), 1e-6, 1e-7).unwrap();
    assert!(m.found && (m.estimate - 4.0).abs() < 0.02);
}

#[test]
fn outside_limit_is_log_distance() {
    // Outside Sigma_t the characteristic with x0 -> 0 keeps lambda fixed to
    // leading order and S tends to log|lambda - 1|^2.
    let lambda = Complex64::new(-1.5, 0.4);
    let t = 1.0;
    let traj = mult_trajectory(lambda, 1e-9, t, 1e-12).unwrap();
    let s = mult_S_formula(&traj).unwrap();
    assert!((s - (lambda - 1.0).norm_sqr().ln()).abs() < 1e-6);
}

#[test]
fn initial_state_examples() {
    let s = mult_initial_state(Complex64::new(0.0, 1.0), 1.0).unwrap();
    assert!((s.p_x - 1.0 / 3.0).abs() < 1e-15);
}
