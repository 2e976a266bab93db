//! Closed-form Brown-measure targets.
//!
//! * Additive case: semicircle and circular laws, and the limit
//!   `s_t(lambda) = lim_{x -> 0} S(t, lambda, x)` for circular Brownian motion.
//! * Multiplicative case: the domain `Sigma_t = {T(lambda) < t}` with
//!   `T(lambda) = |lambda - 1|^2 log(|lambda|^2) / (|lambda|^2 - 1)`, the density
//!   `W_t(r, theta) = w_t(theta) / r^2` on it, and the maps `f_t`, `Phi_t`
//!   onto the support of the free unitary Brownian motion.

mod density;
mod domain;

pub use density::{
    biane_pushforward_histogram, integrate_density, mult_brown_density, phi_t, w_t, w_t_via_derivative,
    DensityKind, DensitySpec, PushforwardHistogram,
};
pub use domain::{build_sigma_domain, ProfileRow, SigmaDomain, Topology};

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{require_positive, Error, Result};

/// Semicircle density `sqrt(4 - x^2) / (2 pi)` on `[-2, 2]`.
pub fn semicircle_density(x: f64) -> f64 {
    if x.abs() >= 2.0 {
        0.0
    } else {
        (4.0 - x * x).sqrt() / (2.0 * PI)
    }
}

/// CDF of the semicircle law.
pub fn semicircle_cdf(x: f64) -> f64 {
    if x <= -2.0 {
        0.0
    } else if x >= 2.0 {
        1.0
    } else {
        0.5 + (x * (4.0 - x * x).sqrt() / 4.0 + (x / 2.0).asin()) / PI
    }
}

/// `lim_{x -> 0} S(t, lambda, x)` for circular Brownian motion:
/// `log|lambda|^2` outside the disk of radius `sqrt(t)`, and
/// `log t - 1 + |lambda|^2 / t` inside.
pub fn circular_s(t: f64, lambda: Complex64) -> Result<f64> {
    require_positive("t", t)?;
    let r2 = lambda.norm_sqr();
    Ok(if r2 >= t { r2.ln() } else { t.ln() - 1.0 + r2 / t })
}

/// Radial derivative of [`circular_s`]: `2/r` outside, `2r/t` inside.
pub fn circular_s_radial_derivative(t: f64, r: f64) -> Result<f64> {
    require_positive("t", t)?;
    Ok(if r * r >= t { 2.0 / r } else { 2.0 * r / t })
}

/// Uniform density `1/(pi t)` on the open disk of radius `sqrt(t)`.
pub fn circular_brown_density(t: f64, lambda: Complex64) -> Result<f64> {
    require_positive("t", t)?;
    Ok(if lambda.norm_sqr() < t { 1.0 / (PI * t) } else { 0.0 })
}

/// `log(1 + u) / u`, with the removable singularity at `u = 0` filled in.
fn log_ratio(u: f64) -> f64 {
    if u.abs() < 1e-5 {
        1.0 - u / 2.0 + u * u / 3.0 - u * u * u / 4.0
    } else {
        u.ln_1p() / u
    }
}

/// `T(lambda)`; `+inf` at `lambda = 0`.
pub fn t_lambda(lambda: Complex64) -> f64 {
    let r2 = lambda.norm_sqr();
    if r2 == 0.0 {
        return f64::INFINITY;
    }
    (lambda - 1.0).norm_sqr() * log_ratio(r2 - 1.0)
}

/// `T(r e^{i theta})` written along a ray.
pub(crate) fn t_on_ray(r: f64, theta: f64) -> f64 {
    if r <= 0.0 {
        return f64::INFINITY;
    }
    (r * r + 1.0 - 2.0 * r * theta.cos()) * log_ratio(r * r - 1.0)
}

/// Strict membership `T(lambda) < t`.
pub fn in_sigma(t: f64, lambda: Complex64) -> bool {
    t_lambda(lambda) < t
}

/// Support of the free unitary Brownian motion's law: `|theta| <= theta_max`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BianeSupport {
    pub t: f64,
    pub theta_max: f64,
}

pub fn biane_support(t: f64) -> Result<BianeSupport> {
    require_positive("t", t)?;
    let theta_max = if t >= 4.0 {
        PI
    } else {
        0.5 * (t * (4.0 - t)).sqrt() + (1.0 - t / 2.0).acos()
    };
    Ok(BianeSupport { t, theta_max })
}

const SERIES_WINDOW: f64 = 1e-2;

/// `h(r) = r log(r^2)/(r^2 - 1)`, `alpha = r^2 + 1 - 2 r h`,
/// `beta = (r^2 + 1) h - 2 r`.
///
/// `alpha` and `beta` vanish to second order at `r = 1`; within 1e-2 of
/// `r = 1` all three come from Taylor series in `u = r - 1` instead.
pub fn h_alpha_beta(r: f64) -> Result<(f64, f64, f64)> {
    require_positive("r", r)?;
    let u = r - 1.0;
    if u.abs() < SERIES_WINDOW {
        let (a2, b2) = alpha_beta_over_u2(u);
        Ok((h_series(u), a2 * u * u, b2 * u * u))
    } else {
        let h = r * (r * r).ln() / (r * r - 1.0);
        Ok((h, r * r + 1.0 - 2.0 * r * h, (r * r + 1.0) * h - 2.0 * r))
    }
}

fn horner(coeffs: &[f64], u: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, c| acc * u + c)
}

fn h_series(u: f64) -> f64 {
    horner(
        &[
            1.0,
            0.0,
            -1.0 / 6.0,
            1.0 / 6.0,
            -2.0 / 15.0,
            1.0 / 10.0,
            -31.0 / 420.0,
            23.0 / 420.0,
            -13.0 / 315.0,
        ],
        u,
    )
}

/// `(alpha / u^2, beta / u^2)` near `u = r - 1 = 0`.
fn alpha_beta_over_u2(u: f64) -> (f64, f64) {
    let a = horner(
        &[4.0 / 3.0, 0.0, -1.0 / 15.0, 1.0 / 15.0, -11.0 / 210.0, 4.0 / 105.0, -17.0 / 630.0],
        u,
    );
    let b = horner(
        &[2.0 / 3.0, 0.0, -1.0 / 10.0, 1.0 / 10.0, -17.0 / 210.0, 13.0 / 210.0, -59.0 / 1260.0],
        u,
    );
    (a, b)
}

/// `omega(r, theta) = 1 + h (alpha cos(theta) + beta) / (beta cos(theta) + alpha)`.
pub fn omega(r: f64, theta: f64) -> Result<f64> {
    require_positive("r", r)?;
    let c = theta.cos();
    let u = r - 1.0;
    let (h, num, den) = if u.abs() < SERIES_WINDOW {
        // The u^2 factors cancel in the ratio.
        let (a, b) = alpha_beta_over_u2(u);
        (h_series(u), a * c + b, b * c + a)
    } else {
        let (h, a, b) = h_alpha_beta(r)?;
        (h, a * c + b, b * c + a)
    };
    if !(den.abs() > 1e-300) || !den.is_finite() {
        return Err(Error::OmegaSingular { r, theta });
    }
    Ok(1.0 + h * num / den)
}

/// `f_t(lambda) = lambda exp((t/2)(1 + lambda)/(1 - lambda))`.
pub fn f_t(t: f64, lambda: Complex64) -> Result<Complex64> {
    if lambda == Complex64::new(1.0, 0.0) {
        return Err(Error::Pole(lambda));
    }
    Ok(lambda * ((0.5 * t) * (1.0 + lambda) / (1.0 - lambda)).exp())
}

/// `ds_t/drho = 2 rho / t + 1` at `lambda = e^{rho + i theta}` in `Sigma_t`.
pub fn ds_drho(t: f64, lambda: Complex64) -> Result<f64> {
    require_positive("t", t)?;
    if !in_sigma(t, lambda) {
        return Err(Error::Domain {
            what: "ds/drho",
            detail: format!("{lambda} is outside Sigma_{t}"),
        });
    }
    Ok(2.0 * lambda.norm().ln() / t + 1.0)
}

/// Angular derivative of `log|lambda - 1|^2`:
/// `2 r sin(theta) / (r^2 + 1 - 2 r cos(theta))`.
pub fn ds_dtheta_boundary(r: f64, theta: f64) -> Result<f64> {
    let den = r * r + 1.0 - 2.0 * r * theta.cos();
    if !(den > 0.0) {
        return Err(Error::Domain {
            what: "ds/dtheta",
            detail: format!("undefined at lambda = 1 (r = {r}, theta = {theta})"),
        });
    }
    Ok(2.0 * r * theta.sin() / den)
}
