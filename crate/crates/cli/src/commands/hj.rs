//! Characteristics, lifetime scans and shooting runs.

use std::f64::consts::PI;

use brownflow::brown_analytic::{ds_drho, SigmaDomain};
use brownflow::hj_engine::{
    circ_p_of_t, circ_x_of_t, ds_drho_extrapolated, integrate_hamilton, mult_lifetime, mult_trajectory,
    CircCharacteristic, HamiltonianId,
};
use num_complex::Complex64;
use serde_json::json;

use crate::config::{HjTask, RunConfig};
use crate::error::CliError;
use crate::output::Output;

const ODE_TOL: f64 = 1e-12;

pub fn run(cfg: &mut RunConfig) -> Result<Output, CliError> {
    match RunConfig::get_or(&mut cfg.task, HjTask::MultTrajectory) {
        HjTask::LifetimeScan => lifetime_scan(cfg),
        HjTask::MultTrajectory => mult(cfg),
        HjTask::CircTrajectory => circ(cfg),
        HjTask::Shoot => shoot(cfg),
    }
}

fn start(cfg: &mut RunConfig) -> Complex64 {
    Complex64::new(RunConfig::get_or(&mut cfg.re, 0.5), RunConfig::get_or(&mut cfg.im, 0.5))
}

/// Lifetimes from `lambda0 = e^{i theta}` with small `x0`, against
/// `T(e^{i theta}) = 2 - 2 cos theta`.
fn lifetime_scan(cfg: &mut RunConfig) -> Result<Output, CliError> {
    let res = RunConfig::get_or(&mut cfg.theta_resolution, 64);
    let x0 = RunConfig::get_or(&mut cfg.x0, 1e-6);
    let mut out = Output::new(&["theta", "lifetime", "expected", "abs_error", "found"]);
    let mut worst = 0.0f64;
    for j in 0..res {
        let theta = -PI + (j as f64 + 0.5) * 2.0 * PI / res as f64;
        let life = mult_lifetime(Complex64::from_polar(1.0, theta), x0, 1e-8)?;
        let expected = 2.0 - 2.0 * theta.cos();
        let err = (life.estimate - expected).abs();
        worst = worst.max(err);
        out.push(vec![theta.into(), life.estimate.into(), expected.into(), err.into(), life.found.into()]);
    }
    out.field("max_abs_error", json!(worst));
    Ok(out)
}

fn mult(cfg: &mut RunConfig) -> Result<Output, CliError> {
    let lambda0 = start(cfg);
    let x0 = RunConfig::get_or(&mut cfg.x0, 0.5);
    let t = RunConfig::get_or(&mut cfg.t, 1.0);
    let traj = mult_trajectory(lambda0, x0, t, ODE_TOL)?;
    if !traj.is_complete() {
        eprintln!("warning: characteristic blew up at t = {} before t = {t}", traj.t_end());
    }
    let mut out = Output::new(&["t", "a", "b", "x", "p_a", "p_b", "p_x", "h", "psi"]);
    for k in 0..traj.solution.states.len() {
        let s = traj.mult_state(k);
        let h = traj.hamiltonian_at(k);
        let psi = brownflow::hj_engine::mult_psi(&s);
        out.push(
            [s.time, s.a, s.b, s.x, s.p_a, s.p_b, s.p_x, h, psi]
                .into_iter()
                .map(Into::into)
                .collect(),
        );
    }
    out.field("hamiltonian_drift", json!(traj.hamiltonian_drift()));
    out.field("psi_drift", json!(traj.psi_drift()));
    out.field("complete", json!(traj.is_complete()));
    Ok(out)
}

/// Numerically integrated circular characteristic beside its closed form,
/// at `theta_resolution` equally spaced times before the lifetime.
fn circ(cfg: &mut RunConfig) -> Result<Output, CliError> {
    let lambda = start(cfg);
    let x0 = RunConfig::get_or(&mut cfg.x0, 0.5);
    let c = CircCharacteristic::new(lambda, x0)?;
    let t = RunConfig::get_or(&mut cfg.t, 0.9 * c.lifetime).min(0.99 * c.lifetime);
    let points = RunConfig::get_or(&mut cfg.theta_resolution, 64);
    let traj = integrate_hamilton(HamiltonianId::Circular, &c.initial_state(), t, ODE_TOL)?;
    let mut out = Output::new(&["t", "x", "p", "x_closed", "p_closed", "h"]);
    let mut worst = 0.0f64;
    for j in 0..=points {
        let s = t * j as f64 / points as f64;
        let y = traj.solution.state_at(s)?;
        let (xc, pc) = (circ_x_of_t(&c, s)?, circ_p_of_t(&c, s)?);
        worst = worst.max((y[0] - xc).abs()).max((y[1] - pc).abs() / pc.abs().max(1.0));
        out.push(vec![s.into(), y[0].into(), y[1].into(), xc.into(), pc.into(), HamiltonianId::Circular.value(&y).into()]);
    }
    out.field("max_deviation", json!(worst));
    Ok(out)
}

/// `ds/drho` inside `Sigma_t` by shooting, against the closed form, at
/// targets halfway (in log radius) along each ray. Failed targets are
/// reported and the scan continues.
fn shoot(cfg: &mut RunConfig) -> Result<Output, CliError> {
    let t = RunConfig::get_or(&mut cfg.t, 1.0);
    let targets = RunConfig::get_or(&mut cfg.theta_resolution, 16);
    let dom = SigmaDomain::new(t)?;
    let mut out = Output::new(&["theta", "re", "im", "ds_drho_shooting", "ds_drho_analytic", "abs_error", "status"]);
    let extent = dom.theta_extent.min(PI);
    for j in 0..targets {
        let theta = -extent + (j as f64 + 0.5) * 2.0 * extent / targets as f64;
        let ro = dom.r_outer(theta)?;
        let lambda = Complex64::from_polar(ro.sqrt(), theta);
        let analytic = ds_drho(t, lambda)?;
        let (value, status) = match ds_drho_extrapolated(t, lambda, &[1e-4, 1e-5, 1e-6], 1e-10) {
            Ok(est) if est.shots.iter().all(|s| s.converged) => (est.extrapolated, "ok".to_owned()),
            Ok(est) => (est.extrapolated, "not-converged".to_owned()),
            Err(e) => (f64::NAN, format!("failed: {e}")),
        };
        if status != "ok" {
            eprintln!("warning: target theta = {theta}: {status}");
        }
        out.push(vec![
            theta.into(),
            lambda.re.into(),
            lambda.im.into(),
            value.into(),
            analytic.into(),
            (value - analytic).abs().into(),
            status.as_str().into(),
        ]);
    }
    Ok(out)
}
