//! Characteristics of the multiplicative Hamiltonian
//!
//! ```text
//! H(a, b, x, p_a, p_b, p_x) = -x p_x (1 + (a^2 + b^2) p_x - x p_x - a p_a - b p_b)
//! ```
//!
//! started from `S(0, lambda, x) = log(|lambda - 1|^2 + x)`. Besides `H`, the
//! flow conserves `Psi = x p_x + (a p_a + b p_b)/2`.
//!
//! With `Q = 1 + (a^2 + b^2) p_x - x p_x - a p_a - b p_b` the partials are
//!
//! ```text
//! dH/da   = -x p_x (2 a p_x - p_a)        dH/dp_a = a x p_x
//! dH/db   = -x p_x (2 b p_x - p_b)        dH/dp_b = b x p_x
//! dH/dx   = -p_x Q + x p_x^2              dH/dp_x = -x Q - x p_x (a^2 + b^2 - x)
//! ```

#![allow(non_snake_case)]

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{integrate_hamilton, integrator, HamiltonianId, Trajectory};
use crate::brown_analytic::t_lambda;
use crate::error::{require_positive, Error, Result};

/// Phase-space point of the multiplicative system, `lambda = a + ib`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MultState {
    pub time: f64,
    pub a: f64,
    pub b: f64,
    pub x: f64,
    pub p_a: f64,
    pub p_b: f64,
    pub p_x: f64,
}

impl MultState {
    /// Layout used by the integrator: positions then momenta.
    pub fn to_array(&self) -> [f64; 6] {
        [self.a, self.b, self.x, self.p_a, self.p_b, self.p_x]
    }

    pub fn from_slice(time: f64, y: &[f64]) -> Self {
        Self {
            time,
            a: y[0],
            b: y[1],
            x: y[2],
            p_a: y[3],
            p_b: y[4],
            p_x: y[5],
        }
    }

    pub fn lambda(&self) -> Complex64 {
        Complex64::new(self.a, self.b)
    }
}

/// Initial momenta are the gradient of `log(|lambda - 1|^2 + x)` at
/// `(lambda0, x0)`.
pub fn mult_initial_state(lambda0: Complex64, x0: f64) -> Result<MultState> {
    require_positive("x0", x0)?;
    let d = (lambda0 - 1.0).norm_sqr() + x0;
    Ok(MultState {
        time: 0.0,
        a: lambda0.re,
        b: lambda0.im,
        x: x0,
        p_a: 2.0 * (lambda0.re - 1.0) / d,
        p_b: 2.0 * lambda0.im / d,
        p_x: 1.0 / d,
    })
}

pub(crate) fn hamiltonian_raw(y: &[f64]) -> f64 {
    let [a, b, x, pa, pb, px] = [y[0], y[1], y[2], y[3], y[4], y[5]];
    -x * px * (1.0 + (a * a + b * b) * px - x * px - a * pa - b * pb)
}

pub(crate) fn gradient_raw(y: &[f64], dh_dq: &mut [f64], dh_dp: &mut [f64]) {
    let [a, b, x, pa, pb, px] = [y[0], y[1], y[2], y[3], y[4], y[5]];
    let r2 = a * a + b * b;
    let q = 1.0 + r2 * px - x * px - a * pa - b * pb;
    let xpx = x * px;
    dh_dq[0] = -xpx * (2.0 * a * px - pa);
    dh_dq[1] = -xpx * (2.0 * b * px - pb);
    dh_dq[2] = -px * q + x * px * px;
    dh_dp[0] = a * xpx;
    dh_dp[1] = b * xpx;
    dh_dp[2] = -x * q - xpx * (r2 - x);
}

pub fn mult_hamiltonian(s: &MultState) -> f64 {
    hamiltonian_raw(&s.to_array())
}

pub fn mult_psi(s: &MultState) -> f64 {
    s.x * s.p_x + 0.5 * (s.a * s.p_a + s.b * s.p_b)
}

/// Integrates the multiplicative characteristic from `(lambda0, x0)`.
pub fn mult_trajectory(lambda0: Complex64, x0: f64, t_final: f64, tol: f64) -> Result<Trajectory> {
    let init = mult_initial_state(lambda0, x0)?;
    integrate_hamilton(HamiltonianId::Multiplicative, &init.to_array(), t_final, tol)
}

impl Trajectory {
    pub fn mult_state(&self, k: usize) -> MultState {
        MultState::from_slice(self.solution.times[k], &self.solution.states[k])
    }

    pub fn mult_final(&self) -> MultState {
        MultState::from_slice(self.t_end(), self.final_state())
    }

    /// Largest `|Psi(s) - Psi(0)|` over accepted states.
    pub fn psi_drift(&self) -> f64 {
        let psi0 = mult_psi(&self.mult_state(0));
        (0..self.solution.states.len())
            .map(|k| (mult_psi(&self.mult_state(k)) - psi0).abs())
            .fold(0.0, f64::max)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Lifetime {
    pub estimate: f64,
    /// False when no blow-up occurred before `horizon`.
    pub found: bool,
    pub horizon: f64,
}

/// Blow-up time of the characteristic from `(lambda0, x0)`. The integrator's
/// early termination gives a first estimate, which is then bracketed and
/// bisected on the final time until the bracket is narrower than `tol`.
pub fn mult_lifetime(lambda0: Complex64, x0: f64, tol: f64) -> Result<Lifetime> {
    require_positive("tol", tol)?;
    let t_lim = t_lambda(lambda0);
    let horizon = if t_lim.is_finite() { 10.0 * t_lim + 10.0 } else { 1e3 };
    let ode_tol = 1e-10;
    let traj = mult_trajectory(lambda0, x0, horizon, ode_tol)?;
    if !traj.blew_up() {
        return Ok(Lifetime {
            estimate: horizon,
            found: false,
            horizon,
        });
    }
    let sol = &traj.solution;
    let n = sol.times.len();
    // Restart from the last state that is still well inside the solution.
    let k = n.saturating_sub(2);
    let (t_lo, y_lo) = (sol.times[k], sol.states[k].clone());
    let mut lo = t_lo;
    let mut hi = sol.t_end() + (sol.t_end() - t_lo).max(tol);
    let survives = |t: f64| -> Result<bool> {
        let s = integrator::integrate(
            &HamiltonianId::Multiplicative,
            t_lo,
            &y_lo,
            t,
            integrator::Tolerance::uniform(ode_tol),
        )?;
        Ok(s.is_complete())
    };
    while survives(hi)? {
        lo = hi;
        hi += 2.0 * (hi - t_lo);
        if hi > horizon {
            return Ok(Lifetime {
                estimate: horizon,
                found: false,
                horizon,
            });
        }
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if survives(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(Lifetime {
        estimate: 0.5 * (lo + hi),
        found: true,
        horizon,
    })
}

/// Closed-form value of `S` at the end of a complete multiplicative
/// characteristic:
/// `log(|l0 - 1|^2 + x0) - x0 t/(|l0 - 1|^2 + x0)^2 + log|l(t)| - log|l0|`.
pub fn mult_S_formula(traj: &Trajectory) -> Result<f64> {
    if traj.hamiltonian != HamiltonianId::Multiplicative {
        return Err(Error::Domain {
            what: "trajectory",
            detail: "not a multiplicative characteristic".into(),
        });
    }
    if !traj.is_complete() {
        return Err(Error::IncompleteTrajectory {
            reached: traj.t_end(),
            requested: traj.solution.t_requested,
        });
    }
    let start = traj.mult_state(0);
    let end = traj.mult_final();
    let (l0, lt) = (start.lambda(), end.lambda());
    if l0.norm() == 0.0 || lt.norm() == 0.0 {
        return Err(Error::Domain {
            what: "lambda",
            detail: format!("endpoints {l0} and {lt} must be nonzero"),
        });
    }
    let d = (l0 - 1.0).norm_sqr() + start.x;
    let t = traj.t_end();
    Ok(d.ln() - start.x * t / (d * d) + lt.norm().ln() - l0.norm().ln())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn initial_momenta() {
        let s = mult_initial_state(c(1.0, 0.0), 0.25).unwrap();
        assert_eq!((s.p_a, s.p_b, s.p_x), (0.0, 0.0, 4.0));
        let s = mult_initial_state(c(0.0, 0.0), 1.0).unwrap();
        assert_eq!((s.p_a, s.p_b, s.p_x), (-1.0, 0.0, 0.5));
        let s = mult_initial_state(c(0.0, 1.0), 1.0).unwrap();
        assert!((s.p_x - 1.0 / 3.0).abs() < 1e-15);
        assert!((s.p_a + 2.0 / 3.0).abs() < 1e-15);
        assert!((s.p_b - 2.0 / 3.0).abs() < 1e-15);
        assert!(mult_initial_state(c(0.0, 1.0), 0.0).is_err());
    }

    #[test]
    fn hamiltonian_and_psi_values() {
        let mut s = MultState {
            time: 0.0,
            a: 0.3,
            b: -1.2,
            x: 0.7,
            p_a: 0.4,
            p_b: 2.0,
            p_x: 0.0,
        };
        assert_eq!(mult_hamiltonian(&s), 0.0);
        s.p_x = 1.5;
        s.x = 0.0;
        assert_eq!(mult_hamiltonian(&s), 0.0);
        assert!((mult_psi(&s) - 0.5 * (0.3 * 0.4 - 1.2 * 2.0)).abs() < 1e-15);
        let s = MultState::from_slice(0.0, &[1.0, 0.0, 1.0, 0.0, 0.0, 0.5]);
        assert!((mult_hamiltonian(&s) + 0.5).abs() < 1e-15);
    }

    #[test]
    fn formula_at_time_zero() {
        let l0 = c(0.4, 0.9);
        let traj = mult_trajectory(l0, 0.3, 0.0, 1e-10).unwrap();
        let got = mult_S_formula(&traj).unwrap();
        assert!((got - ((l0 - 1.0).norm_sqr() + 0.3).ln()).abs() < 1e-15);
    }
}
