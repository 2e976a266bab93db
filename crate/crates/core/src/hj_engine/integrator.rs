//! Adaptive Dormand–Prince 5(4) integration with Hairer's continuous
//! extension, and early termination on blow-up.

use serde::Serialize;

use crate::error::{Error, Result};

/// State norm beyond which a trajectory is declared to have blown up.
pub const BLOW_UP_NORM: f64 = 1e12;
/// Step size below which a trajectory is declared to have blown up.
pub const MIN_STEP: f64 = 1e-14;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

/// Autonomous first-order system `y' = f(y)`.
pub trait OdeSystem {
    fn dim(&self) -> usize;
    fn rhs(&self, y: &[f64], dy: &mut [f64]);
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
}

impl Tolerance {
    pub fn uniform(tol: f64) -> Self {
        Self { abs: tol, rel: tol }
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Self::uniform(1e-10)
    }
}

/// One accepted step with its interpolation coefficients.
#[derive(Clone, Debug)]
struct DenseStep {
    t0: f64,
    h: f64,
    coeffs: [Vec<f64>; 5],
}

impl DenseStep {
    fn eval(&self, t: f64, out: &mut [f64]) {
        let th = (t - self.t0) / self.h;
        let th1 = 1.0 - th;
        let [r1, r2, r3, r4, r5] = &self.coeffs;
        for i in 0..out.len() {
            out[i] = r1[i] + th * (r2[i] + th1 * (r3[i] + th * (r4[i] + th1 * r5[i])));
        }
    }
}

/// Accepted states of an integration with dense output between them.
#[derive(Clone, Debug)]
pub struct Solution {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    steps: Vec<DenseStep>,
    pub t_requested: f64,
    pub blew_up: bool,
}

impl Solution {
    pub fn t_start(&self) -> f64 {
        self.times[0]
    }

    pub fn t_end(&self) -> f64 {
        *self.times.last().expect("nonempty")
    }

    pub fn final_state(&self) -> &[f64] {
        self.states.last().expect("nonempty")
    }

    pub fn is_complete(&self) -> bool {
        !self.blew_up && self.t_end() == self.t_requested
    }

    /// Dense-output state at any `t` in `[t_start, t_end]`.
    pub fn state_at(&self, t: f64) -> Result<Vec<f64>> {
        if !(t >= self.t_start() && t <= self.t_end()) {
            return Err(Error::Domain {
                what: "trajectory time",
                detail: format!("{t} not in [{}, {}]", self.t_start(), self.t_end()),
            });
        }
        if self.steps.is_empty() {
            return Ok(self.states[0].clone());
        }
        let k = self
            .times
            .partition_point(|&s| s <= t)
            .saturating_sub(1)
            .min(self.steps.len() - 1);
        let mut out = vec![0.0; self.states[0].len()];
        self.steps[k].eval(t, &mut out);
        Ok(out)
    }

    /// Composite Simpson rule of `g(state)` over every accepted step, with
    /// `sub` dense-output subintervals per step (`sub` even).
    pub fn integrate_along(&self, g: impl Fn(&[f64]) -> f64, sub: usize) -> f64 {
        let sub = sub.max(2) + sub % 2;
        let mut total = 0.0;
        let mut buf = vec![0.0; self.states[0].len()];
        for (k, step) in self.steps.iter().enumerate() {
            let hs = step.h / sub as f64;
            let mut acc = g(&self.states[k]) + g(&self.states[k + 1]);
            for j in 1..sub {
                step.eval(step.t0 + j as f64 * hs, &mut buf);
                acc += if j % 2 == 1 { 4.0 } else { 2.0 } * g(&buf);
            }
            total += acc * hs / 3.0;
        }
        total
    }
}

fn max_abs(y: &[f64]) -> f64 {
    y.iter().fold(0.0, |m, v| m.max(v.abs()))
}

/// Integrates `sys` from `(t0, y0)` to `t1 > t0`. Blow-up (state norm above
/// [`BLOW_UP_NORM`], step below [`MIN_STEP`], or non-finite values) stops
/// the integration and is reported through `Solution::blew_up`, not as an
/// error.
pub fn integrate(sys: &impl OdeSystem, t0: f64, y0: &[f64], t1: f64, tol: Tolerance) -> Result<Solution> {
    let d = sys.dim();
    if y0.len() != d || y0.iter().any(|v| !v.is_finite()) {
        return Err(Error::Domain {
            what: "initial state",
            detail: format!("{y0:?}"),
        });
    }
    if !(tol.abs > 0.0 && tol.rel >= 0.0) {
        return Err(Error::InvalidParameter {
            name: "tol",
            value: tol.abs,
            reason: "must be positive",
        });
    }
    let mut sol = Solution {
        times: vec![t0],
        states: vec![y0.to_vec()],
        steps: Vec::new(),
        t_requested: t1,
        blew_up: false,
    };
    if t1 <= t0 {
        return Ok(sol);
    }

    let mut k = vec![vec![0.0; d]; 7];
    let mut tmp = vec![0.0; d];
    let mut y = y0.to_vec();
    let mut ynew = vec![0.0; d];
    let mut t = t0;
    sys.rhs(&y, &mut k[0]);

    // Initial step guess from the derivative scale.
    let scale0 = max_abs(&k[0]) / (tol.abs + tol.rel * max_abs(&y));
    let mut h = if scale0 > 0.0 { 0.01 / scale0.max(1e-12) } else { 1e-3 };
    h = h.min(t1 - t0).max(MIN_STEP);

    let stage = |y: &[f64], k: &[Vec<f64>], coeffs: &[(usize, f64)], h: f64, out: &mut [f64]| {
        for i in 0..y.len() {
            let mut acc = 0.0;
            for &(j, a) in coeffs {
                acc += a * k[j][i];
            }
            out[i] = y[i] + h * acc;
        }
    };

    loop {
        let last = t + h >= t1;
        if last {
            h = t1 - t;
        }
        stage(&y, &k, &[(0, A21)], h, &mut tmp);
        sys.rhs(&tmp, &mut k[1]);
        stage(&y, &k, &[(0, A31), (1, A32)], h, &mut tmp);
        sys.rhs(&tmp, &mut k[2]);
        stage(&y, &k, &[(0, A41), (1, A42), (2, A43)], h, &mut tmp);
        sys.rhs(&tmp, &mut k[3]);
        stage(&y, &k, &[(0, A51), (1, A52), (2, A53), (3, A54)], h, &mut tmp);
        sys.rhs(&tmp, &mut k[4]);
        stage(&y, &k, &[(0, A61), (1, A62), (2, A63), (3, A64), (4, A65)], h, &mut tmp);
        sys.rhs(&tmp, &mut k[5]);
        stage(&y, &k, &[(0, A71), (2, A73), (3, A74), (4, A75), (5, A76)], h, &mut ynew);
        sys.rhs(&ynew, &mut k[6]);

        let mut err = 0.0;
        let mut finite = true;
        for i in 0..d {
            let e = h * (E1 * k[0][i] + E3 * k[2][i] + E4 * k[3][i] + E5 * k[4][i] + E6 * k[5][i] + E7 * k[6][i]);
            let sc = tol.abs + tol.rel * y[i].abs().max(ynew[i].abs());
            err += (e / sc).powi(2);
            finite &= ynew[i].is_finite() && k[6][i].is_finite();
        }
        let err = (err / d as f64).sqrt();

        if finite && err <= 1.0 {
            let ydiff: Vec<f64> = (0..d).map(|i| ynew[i] - y[i]).collect();
            let bspl: Vec<f64> = (0..d).map(|i| h * k[0][i] - ydiff[i]).collect();
            let r4: Vec<f64> = (0..d).map(|i| ydiff[i] - h * k[6][i] - bspl[i]).collect();
            let r5: Vec<f64> = (0..d)
                .map(|i| {
                    h * (D1 * k[0][i] + D3 * k[2][i] + D4 * k[3][i] + D5 * k[4][i] + D6 * k[5][i] + D7 * k[6][i])
                })
                .collect();
            sol.steps.push(DenseStep {
                t0: t,
                h,
                coeffs: [y.clone(), ydiff, bspl, r4, r5],
            });
            t = if last { t1 } else { t + h };
            y.copy_from_slice(&ynew);
            sol.times.push(t);
            sol.states.push(y.clone());
            k.swap(0, 6);
            if max_abs(&y) > BLOW_UP_NORM {
                sol.blew_up = true;
                return Ok(sol);
            }
            if last {
                return Ok(sol);
            }
        }
        let fac = if !finite {
            0.2
        } else if err == 0.0 {
            5.0
        } else {
            (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
        };
        h *= fac;
        if h < MIN_STEP {
            sol.blew_up = true;
            return Ok(sol);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Oscillator;
    impl OdeSystem for Oscillator {
        fn dim(&self) -> usize {
            2
        }
        fn rhs(&self, y: &[f64], dy: &mut [f64]) {
            dy[0] = y[1];
            dy[1] = -y[0];
        }
    }

    /// y' = y^2 blows up at t = 1/y0.
    struct Riccati;
    impl OdeSystem for Riccati {
        fn dim(&self) -> usize {
            1
        }
        fn rhs(&self, y: &[f64], dy: &mut [f64]) {
            dy[0] = y[0] * y[0];
        }
    }

    #[test]
    fn oscillator_accuracy_and_dense_output() {
        let sol = integrate(&Oscillator, 0.0, &[1.0, 0.0], 10.0, Tolerance::uniform(1e-11)).unwrap();
        assert!(sol.is_complete());
        let y = sol.final_state();
        assert!((y[0] - 10f64.cos()).abs() < 1e-9);
        assert!((y[1] + 10f64.sin()).abs() < 1e-9);
        for t in [0.0, 0.37, 3.3, 7.77, 10.0] {
            let s = sol.state_at(t).unwrap();
            assert!((s[0] - t.cos()).abs() < 1e-9, "t = {t}");
        }
        assert!(sol.state_at(10.5).is_err());
        // integral of cos^2 over [0, 10]
        let q = sol.integrate_along(|y| y[0] * y[0], 4);
        assert!((q - (5.0 + 20f64.sin() / 4.0)).abs() < 1e-9);
    }

    #[test]
    fn riccati_blow_up_detected() {
        let sol = integrate(&Riccati, 0.0, &[2.0], 5.0, Tolerance::default()).unwrap();
        assert!(sol.blew_up);
        assert!(!sol.is_complete());
        assert!((sol.t_end() - 0.5).abs() < 1e-9, "{}", sol.t_end());
    }

    #[test]
    fn rejects_bad_input() {
        assert!(integrate(&Riccati, 0.0, &[f64::NAN], 1.0, Tolerance::default()).is_err());
        assert!(integrate(&Riccati, 0.0, &[1.0, 2.0], 1.0, Tolerance::default()).is_err());
    }
}
