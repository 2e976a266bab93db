//! Hamilton–Jacobi machinery for the regularized log-determinant PDEs.
//!
//! The PDE `dS/dt = -H(x, grad S)` is solved along characteristics
//! `(x(t), p(t))` of Hamilton's equations started at `p0 = grad S(0, x0)`:
//!
//! ```text
//! S(t, x(t)) = S(0, x0) - H(x0, p0) t + int_0^t p . dx/ds ds,   grad S(t, x(t)) = p(t).
//! ```
//!
//! Two Hamiltonians are provided. The circular one, `H = -x p^2`, has closed
//! form characteristics ([`circular`]). The multiplicative one acts on
//! `(a, b, x; p_a, p_b, p_x)` with `lambda = a + ib` ([`multiplicative`]) and
//! is integrated numerically; [`shooting`] solves for initial data that hit a
//! prescribed `(lambda, x)` at time `t`.

pub mod circular;
pub mod integrator;
pub mod multiplicative;
pub mod shooting;

use serde::{Deserialize, Serialize};

pub use circular::{circ_S_along, circ_S_at, circ_S_limit, circ_p_of_t, circ_x_of_t, CircCharacteristic};
pub use integrator::{Solution, Tolerance};
pub use multiplicative::{
    mult_S_formula, mult_hamiltonian, mult_initial_state, mult_lifetime, mult_psi, mult_trajectory, Lifetime,
    MultState,
};
pub use shooting::{ds_drho_extrapolated, shoot_inside, shoot_inside_from, DsDrhoEstimate, ShootingResult};

use crate::error::{Error, Result};
use integrator::OdeSystem;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum HamiltonianId {
    /// `H(x, p) = -x p^2` on `(x; p)`.
    Circular,
    /// `H = -x p_x (1 + (a^2 + b^2) p_x - x p_x - a p_a - b p_b)` on
    /// `(a, b, x; p_a, p_b, p_x)`.
    Multiplicative,
}

impl HamiltonianId {
    /// Number of position coordinates; the phase-space dimension is twice this.
    pub fn positions(self) -> usize {
        match self {
            HamiltonianId::Circular => 1,
            HamiltonianId::Multiplicative => 3,
        }
    }

    pub fn value(self, y: &[f64]) -> f64 {
        match self {
            HamiltonianId::Circular => -y[0] * y[1] * y[1],
            HamiltonianId::Multiplicative => multiplicative::hamiltonian_raw(y),
        }
    }

    /// `dH/dp` (the position velocities) and `dH/dq`.
    pub fn gradient(self, y: &[f64], dh_dq: &mut [f64], dh_dp: &mut [f64]) {
        match self {
            HamiltonianId::Circular => {
                let (x, p) = (y[0], y[1]);
                dh_dq[0] = -p * p;
                dh_dp[0] = -2.0 * x * p;
            }
            HamiltonianId::Multiplicative => multiplicative::gradient_raw(y, dh_dq, dh_dp),
        }
    }
}

impl OdeSystem for HamiltonianId {
    fn dim(&self) -> usize {
        2 * self.positions()
    }

    fn rhs(&self, y: &[f64], dy: &mut [f64]) {
        let m = self.positions();
        let (dq, dp) = dy.split_at_mut(m);
        let mut dh_dq = [0.0; 3];
        let mut dh_dp = [0.0; 3];
        self.gradient(y, &mut dh_dq[..m], &mut dh_dp[..m]);
        for i in 0..m {
            dq[i] = dh_dp[i];
            dp[i] = -dh_dq[i];
        }
    }
}

/// A characteristic curve: Hamilton's equations integrated from `t = 0`.
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub hamiltonian: HamiltonianId,
    pub solution: Solution,
}

impl Trajectory {
    pub fn initial(&self) -> &[f64] {
        &self.solution.states[0]
    }

    pub fn final_state(&self) -> &[f64] {
        self.solution.final_state()
    }

    pub fn t_end(&self) -> f64 {
        self.solution.t_end()
    }

    pub fn blew_up(&self) -> bool {
        self.solution.blew_up
    }

    pub fn is_complete(&self) -> bool {
        self.solution.is_complete()
    }

    pub fn hamiltonian_at(&self, k: usize) -> f64 {
        self.hamiltonian.value(&self.solution.states[k])
    }

    /// Largest `|H(s) - H(0)|` over accepted states.
    pub fn hamiltonian_drift(&self) -> f64 {
        let h0 = self.hamiltonian_at(0);
        self.solution
            .states
            .iter()
            .map(|y| (self.hamiltonian.value(y) - h0).abs())
            .fold(0.0, f64::max)
    }
}

/// Integrates Hamilton's equations for `id` from `init` (positions then
/// momenta) over `[0, t_final]`. Blow-up yields a partial trajectory with
/// `blew_up() == true`.
pub fn integrate_hamilton(id: HamiltonianId, init: &[f64], t_final: f64, tol: f64) -> Result<Trajectory> {
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter {
            name: "tol",
            value: tol,
            reason: "must be positive",
        });
    }
    let solution = integrator::integrate(&id, 0.0, init, t_final, Tolerance::uniform(tol))?;
    Ok(Trajectory {
        hamiltonian: id,
        solution,
    })
}

/// `S(t, x(t)) = S0 - H0 t + int_0^t p . dH/dp ds`, with the integral by
/// composite Simpson over the dense output of each accepted step.
pub fn hj_value_along(traj: &Trajectory, s0: f64) -> Result<f64> {
    if !traj.is_complete() {
        return Err(Error::IncompleteTrajectory {
            reached: traj.t_end(),
            requested: traj.solution.t_requested,
        });
    }
    let id = traj.hamiltonian;
    let m = id.positions();
    let h0 = id.value(traj.initial());
    let action = traj.solution.integrate_along(
        |y| {
            let mut dh_dq = [0.0; 3];
            let mut dh_dp = [0.0; 3];
            id.gradient(y, &mut dh_dq[..m], &mut dh_dp[..m]);
            (0..m).map(|i| y[m + i] * dh_dp[i]).sum()
        },
        8,
    );
    Ok(s0 - h0 * traj.t_end() + action)
}
