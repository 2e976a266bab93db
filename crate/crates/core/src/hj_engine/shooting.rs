//! Shooting for characteristics that end inside `Sigma_t`: find
//! `(lambda0, x0)` with `lambda(t) = lambda` and `x(t) = eps`.
//!
//! Near the target `x(t)` vanishes quadratically in the distance to the
//! characteristic's lifetime, so Newton works on `sqrt(x(t)) - sqrt(eps)`,
//! which has a simple root. `x0` is carried as `log x0` to stay positive.

use num_complex::Complex64;
use serde::Serialize;

use super::multiplicative::{mult_trajectory, MultState};
use super::Trajectory;
use crate::brown_analytic::{in_sigma, t_lambda};
use crate::error::{require_positive, Error, Result};
use crate::quadrature::neville_at_zero;

/// Default regularization of the target `x(t)`.
pub const DEFAULT_EPSILON: f64 = 1e-6;
const ODE_TOL: f64 = 1e-12;
const MAX_ITERATIONS: usize = 60;

#[derive(Clone, Debug, Serialize)]
pub struct ShootingResult {
    pub t: f64,
    pub lambda0: Complex64,
    pub x0: f64,
    pub lambda_t: Complex64,
    pub x_t: f64,
    pub residual: f64,
    pub converged: bool,
    pub iterations: usize,
    /// Endpoint state; its momenta are `grad S` at `(t, lambda_t, x_t)`.
    pub end: MultState,
}

impl ShootingResult {
    /// `a p_a + b p_b` at the endpoint, which is `dS/drho` there.
    pub fn ds_drho(&self) -> f64 {
        self.end.a * self.end.p_a + self.end.b * self.end.p_b
    }
}

struct Target {
    a: f64,
    b: f64,
    sqrt_eps: f64,
}

fn flow(v: [f64; 3], t: f64) -> Result<Option<Trajectory>> {
    let traj = mult_trajectory(Complex64::new(v[0], v[1]), v[2].exp(), t, ODE_TOL)?;
    Ok(traj.is_complete().then_some(traj))
}

fn residual(traj: &Trajectory, target: &Target) -> [f64; 3] {
    let end = traj.mult_final();
    [
        end.a - target.a,
        end.b - target.b,
        end.x.max(0.0).sqrt() - target.sqrt_eps,
    ]
}

fn norm(r: &[f64; 3]) -> f64 {
    r.iter().map(|v| v * v).sum::<f64>().sqrt()
}

fn solve3(m: [[f64; 3]; 3], rhs: [f64; 3]) -> Option<[f64; 3]> {
    let det = |m: &[[f64; 3]; 3]| {
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    };
    let d = det(&m);
    if d == 0.0 || !d.is_finite() {
        return None;
    }
    let mut out = [0.0; 3];
    for (col, o) in out.iter_mut().enumerate() {
        let mut mc = m;
        for row in 0..3 {
            mc[row][col] = rhs[row];
        }
        *o = det(&mc) / d;
    }
    Some(out)
}

/// Seed used when no warm start is supplied: `lambda0 = lambda` and `x0`
/// slightly above `t - T(lambda)`, where the circular analogue would place
/// the characteristic exactly at the edge of its lifetime.
pub fn default_seed(t: f64, lambda: Complex64) -> (Complex64, f64) {
    let gap = (t - t_lambda(lambda)).max(0.0);
    (lambda, gap + 0.1 * t)
}

/// Newton iteration on `(a0, b0, log x0)` with a finite-difference Jacobian
/// of the flow map and backtracking. Residual norm is measured on
/// `(a(t) - Re lambda, b(t) - Im lambda, x(t) - eps)`.
pub fn shoot_inside(t: f64, lambda_target: Complex64, x_target_epsilon: f64, tol: f64) -> Result<ShootingResult> {
    let (l0, x0) = default_seed(t, lambda_target);
    shoot_inside_from(t, lambda_target, x_target_epsilon, tol, l0, x0)
}

pub fn shoot_inside_from(
    t: f64,
    lambda_target: Complex64,
    eps: f64,
    tol: f64,
    seed_lambda0: Complex64,
    seed_x0: f64,
) -> Result<ShootingResult> {
    require_positive("t", t)?;
    require_positive("x_target_epsilon", eps)?;
    require_positive("tol", tol)?;
    require_positive("seed_x0", seed_x0)?;
    if !in_sigma(t, lambda_target) {
        return Err(Error::Domain {
            what: "shooting target",
            detail: format!("{lambda_target} is not in Sigma_{t}"),
        });
    }
    let target = Target {
        a: lambda_target.re,
        b: lambda_target.im,
        sqrt_eps: eps.sqrt(),
    };
    let true_residual = |traj: &Trajectory| {
        let e = traj.mult_final();
        norm(&[e.a - target.a, e.b - target.b, e.x - eps])
    };

    let mut v = [seed_lambda0.re, seed_lambda0.im, seed_x0.ln()];
    let mut traj = match flow(v, t)? {
        Some(tr) => tr,
        None => {
            // Push x0 up until the characteristic survives to time t.
            let mut found = None;
            for _ in 0..40 {
                v[2] += 0.5;
                if let Some(tr) = flow(v, t)? {
                    found = Some(tr);
                    break;
                }
            }
            found.ok_or_else(|| Error::Infeasible(format!("no surviving seed for {lambda_target}")))?
        }
    };
    let mut r = residual(&traj, &target);
    let mut iterations = 0;
    while iterations < MAX_ITERATIONS && true_residual(&traj) > tol {
        iterations += 1;
        let mut jac = [[0.0; 3]; 3];
        let mut ok = true;
        for j in 0..3 {
            let h = 1e-6 * (1.0 + v[j].abs());
            let mut vp = v;
            let mut vm = v;
            vp[j] += h;
            vm[j] -= h;
            match (flow(vp, t)?, flow(vm, t)?) {
                (Some(tp), Some(tm)) => {
                    let (rp, rm) = (residual(&tp, &target), residual(&tm, &target));
                    for i in 0..3 {
                        jac[i][j] = (rp[i] - rm[i]) / (2.0 * h);
                    }
                }
                (Some(tp), None) => {
                    let rp = residual(&tp, &target);
                    for i in 0..3 {
                        jac[i][j] = (rp[i] - r[i]) / h;
                    }
                }
                (None, Some(tm)) => {
                    let rm = residual(&tm, &target);
                    for i in 0..3 {
                        jac[i][j] = (r[i] - rm[i]) / h;
                    }
                }
                (None, None) => ok = false,
            }
        }
        let step = if ok {
            solve3(jac, [-r[0], -r[1], -r[2]])
        } else {
            None
        };
        let Some(step) = step else { break };

        let r_norm = norm(&r);
        let mut scale = 1.0;
        let mut accepted = false;
        for _ in 0..40 {
            let trial = [v[0] + scale * step[0], v[1] + scale * step[1], v[2] + scale * step[2]];
            if let Some(tr) = flow(trial, t)? {
                let rt = residual(&tr, &target);
                if norm(&rt) < r_norm {
                    v = trial;
                    traj = tr;
                    r = rt;
                    accepted = true;
                    break;
                }
            }
            scale *= 0.5;
        }
        if !accepted {
            break;
        }
    }

    let end = traj.mult_final();
    let res = true_residual(&traj);
    Ok(ShootingResult {
        t,
        lambda0: Complex64::new(v[0], v[1]),
        x0: v[2].exp(),
        lambda_t: end.lambda(),
        x_t: end.x,
        residual: res,
        converged: res <= tol,
        iterations,
        end,
    })
}

/// `ds/drho` inside `Sigma_t` from shots at several `eps`, extrapolated to
/// `eps -> 0` by a polynomial in `sqrt(eps)` (the endpoint term `x p_x`
/// decays like `sqrt(eps)`).
#[derive(Clone, Debug, Serialize)]
pub struct DsDrhoEstimate {
    pub lambda: Complex64,
    pub t: f64,
    pub epsilons: Vec<f64>,
    pub raw: Vec<f64>,
    pub extrapolated: f64,
    pub shots: Vec<ShootingResult>,
}

pub fn ds_drho_extrapolated(t: f64, lambda: Complex64, epsilons: &[f64], tol: f64) -> Result<DsDrhoEstimate> {
    if epsilons.is_empty() {
        return Err(Error::InvalidParameter {
            name: "epsilons",
            value: 0.0,
            reason: "need at least one regularization level",
        });
    }
    let mut shots: Vec<ShootingResult> = Vec::with_capacity(epsilons.len());
    for &eps in epsilons {
        let shot = match shots.last() {
            Some(prev) => shoot_inside_from(t, lambda, eps, tol, prev.lambda0, prev.x0)?,
            None => shoot_inside(t, lambda, eps, tol)?,
        };
        if !shot.converged {
            return Err(Error::Infeasible(format!(
                "shooting to {lambda} at eps = {eps} stalled with residual {:e}",
                shot.residual
            )));
        }
        shots.push(shot);
    }
    let raw: Vec<f64> = shots.iter().map(ShootingResult::ds_drho).collect();
    let nodes: Vec<f64> = epsilons.iter().map(|e| e.sqrt()).collect();
    Ok(DsDrhoEstimate {
        lambda,
        t,
        epsilons: epsilons.to_vec(),
        extrapolated: neville_at_zero(&nodes, &raw),
        raw,
        shots,
    })
}
