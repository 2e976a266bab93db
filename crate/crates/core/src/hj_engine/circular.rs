//! Closed-form characteristics of `H(x, p) = -x p^2` with initial data
//! `S(0, lambda, x) = log(|lambda|^2 + x)`.

#![allow(non_snake_case)]

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{require_positive, Error, Result};
use crate::quadrature::neville_at_zero;

/// Characteristic started at `(x0, p0)` with `p0 = 1/(|lambda|^2 + x0)`.
/// It exists on `0 <= t < |lambda|^2 + x0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CircCharacteristic {
    pub lambda: Complex64,
    pub x0: f64,
    pub p0: f64,
    pub lifetime: f64,
}

impl CircCharacteristic {
    pub fn new(lambda: Complex64, x0: f64) -> Result<Self> {
        require_positive("x0", x0)?;
        let a = lambda.norm_sqr() + x0;
        Ok(Self {
            lambda,
            x0,
            p0: 1.0 / a,
            lifetime: a,
        })
    }

    /// Phase-space initial state `(x0, p0)`.
    pub fn initial_state(&self) -> [f64; 2] {
        [self.x0, self.p0]
    }

    pub fn hamiltonian(&self) -> f64 {
        -self.x0 * self.p0 * self.p0
    }

    fn check(&self, t: f64, inclusive: bool) -> Result<()> {
        let ok = t >= 0.0 && if inclusive { t <= self.lifetime } else { t < self.lifetime };
        if ok {
            Ok(())
        } else {
            Err(Error::LifetimeExceeded {
                t,
                lifetime: self.lifetime,
            })
        }
    }
}

/// `x(t) = x0 (1 - t/(|lambda|^2 + x0))^2`; the value at the end of the
/// lifetime is the limit 0.
pub fn circ_x_of_t(c: &CircCharacteristic, t: f64) -> Result<f64> {
    c.check(t, true)?;
    Ok(c.x0 * (1.0 - t / c.lifetime).powi(2))
}

/// `p(t) = p0 / (1 - p0 t)`, which blows up at `t = 1/p0`.
pub fn circ_p_of_t(c: &CircCharacteristic, t: f64) -> Result<f64> {
    c.check(t, false)?;
    Ok(c.p0 / (1.0 - c.p0 * t))
}

/// `S(t, x(t)) = log(|lambda|^2 + x0) - x0 t / (|lambda|^2 + x0)^2`.
pub fn circ_S_along(c: &CircCharacteristic, t: f64) -> Result<f64> {
    c.check(t, true)?;
    Ok(c.lifetime.ln() - c.x0 * t / (c.lifetime * c.lifetime))
}

/// The `x0` whose characteristic reaches `x` at time `t`: the root of
/// `x0 (1 - t/(|lambda|^2 + x0))^2 = x` with `|lambda|^2 + x0 > t`.
pub fn circ_x0_for(t: f64, lambda: Complex64, x: f64) -> Result<f64> {
    require_positive("t", t)?;
    require_positive("x", x)?;
    let l2 = lambda.norm_sqr();
    let reach = |x0: f64| x0 * (1.0 - t / (l2 + x0)).powi(2);
    // On (max(0, t - |lambda|^2), inf) the map starts at 0 and increases.
    let mut lo = (t - l2).max(0.0);
    let mut hi = lo + x.max(t).max(1.0);
    while reach(hi) < x {
        hi *= 2.0;
        if !hi.is_finite() {
            return Err(Error::Infeasible(format!("no x0 reaches x = {x} at t = {t}")));
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if reach(mid) < x {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    // Newton polish on the bracketed root.
    let mut x0 = 0.5 * (lo + hi);
    for _ in 0..3 {
        let a = l2 + x0;
        let q = 1.0 - t / a;
        let f = x0 * q * q - x;
        let df = q * q + 2.0 * x0 * q * t / (a * a);
        if !(df > 0.0) {
            return Err(Error::Infeasible(format!(
                "x0 -> x(t) is not increasing at x0 = {x0} (t = {t}, lambda = {lambda})"
            )));
        }
        let next = x0 - f / df;
        if next > (t - l2).max(0.0) {
            x0 = next;
        }
    }
    Ok(x0)
}

/// `S(t, lambda, x)` for the circular PDE, by following the characteristic
/// that ends at `x`.
pub fn circ_S_at(t: f64, lambda: Complex64, x: f64) -> Result<f64> {
    let x0 = circ_x0_for(t, lambda, x)?;
    let c = CircCharacteristic::new(lambda, x0)?;
    circ_S_along(&c, t)
}

/// `lim_{x -> 0} S(t, lambda, x)` from [`circ_S_at`] at the regularizations
/// `xs`, extrapolated by a polynomial in `sqrt(x)`. Inside the disk
/// `|lambda| < sqrt(t)` the leading correction is of order `sqrt(x)`.
pub fn circ_S_limit(t: f64, lambda: Complex64, xs: &[f64]) -> Result<f64> {
    if xs.is_empty() {
        return Err(Error::InvalidParameter {
            name: "xs",
            value: 0.0,
            reason: "need at least one regularization level",
        });
    }
    let values = xs.iter().map(|&x| circ_S_at(t, lambda, x)).collect::<Result<Vec<_>>>()?;
    let nodes: Vec<f64> = xs.iter().map(|x| x.sqrt()).collect();
    Ok(neville_at_zero(&nodes, &values))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn initial_values() {
        let ch = CircCharacteristic::new(c(0.5, 0.0), 0.75).unwrap();
        assert_eq!(ch.lifetime, 1.0);
        assert_eq!(circ_x_of_t(&ch, 0.0).unwrap(), 0.75);
        assert_eq!(circ_p_of_t(&ch, 0.0).unwrap(), 1.0);
        assert_eq!(circ_S_along(&ch, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn x_vanishes_at_lifetime() {
        let ch = CircCharacteristic::new(c(0.0, 0.0), 1.0).unwrap();
        assert_eq!(circ_x_of_t(&ch, 1.0).unwrap(), 0.0);
        assert!(matches!(circ_p_of_t(&ch, 1.0), Err(Error::LifetimeExceeded { .. })));
        assert!(circ_x_of_t(&ch, 1.5).is_err());
    }

    #[test]
    fn p_doubles_halfway() {
        // lambda = 0, x0 = 2: p0 = 1/2, so p(1) = 0.5/(1 - 0.5) = 1.
        let ch = CircCharacteristic::new(c(0.0, 0.0), 2.0).unwrap();
        assert!((circ_p_of_t(&ch, 1.0).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(1.0 / ch.p0, ch.lifetime);
        for t in [0.1, 0.9, 1.7] {
            let p = circ_p_of_t(&ch, t).unwrap();
            assert!((p * (1.0 - ch.p0 * t) - ch.p0).abs() < 1e-15);
        }
    }

    #[test]
    fn s_along_worked_value() {
        let ch = CircCharacteristic::new(c(1.0, 0.0), 1.0).unwrap();
        let s = circ_S_along(&ch, 1.0).unwrap();
        assert!((s - (2f64.ln() - 0.25)).abs() < 1e-15);
    }

    #[test]
    fn s_at_inverts_the_characteristic() {
        let l = c(0.5, -0.2);
        for &(t, x) in &[(0.3, 0.1), (1.0, 1e-4), (2.0, 5.0)] {
            let x0 = circ_x0_for(t, l, x).unwrap();
            let ch = CircCharacteristic::new(l, x0).unwrap();
            assert!(t < ch.lifetime);
            assert!((circ_x_of_t(&ch, t).unwrap() - x).abs() < 1e-13 * (1.0 + x));
        }
    }

    #[test]
    fn s_at_small_time() {
        let l = c(0.7, 0.1);
        let x = 0.3;
        let s = circ_S_at(1e-10, l, x).unwrap();
        assert!((s - (l.norm_sqr() + x).ln()).abs() < 1e-9);
        assert!(circ_S_at(0.0, l, x).is_err());
        assert!(circ_S_at(1.0, l, 0.0).is_err());
    }

    #[test]
    fn limit_at_origin() {
        // s_t(0) = log t - 1
        let got = circ_S_limit(1.0, c(0.0, 0.0), &[1e-2, 1e-3, 1e-4]).unwrap();
        assert!((got + 1.0).abs() < 1e-4);
        assert!(circ_S_limit(1.0, c(0.0, 0.0), &[]).is_err());
    }
}
