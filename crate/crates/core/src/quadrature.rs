//! One-dimensional quadrature: fixed 8-point Gauss–Legendre and adaptive
//! Gauss–Kronrod (7/15).

use crate::error::{Error, Result};

const GL8_NODES: [f64; 4] = [
    0.183_434_642_495_649_8,
    0.525_532_409_916_329,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_3,
];
const GL8_WEIGHTS: [f64; 4] = [
    0.362_683_783_378_362,
    0.313_706_645_877_887_3,
    0.222_381_034_453_374_5,
    0.101_228_536_290_376_3,
];

/// 8-point Gauss–Legendre rule on `[a, b]`.
pub fn gauss_legendre_8(f: impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut acc = 0.0;
    for (x, w) in GL8_NODES.iter().zip(GL8_WEIGHTS) {
        acc += w * (f(mid - half * x) + f(mid + half * x));
    }
    acc * half
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        kronrod += WGK[j] * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    (kronrod * h, ((kronrod - gauss) * h).abs())
}

#[derive(Clone, Copy, Debug)]
pub struct QuadratureResult {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

/// Globally adaptive Gauss–Kronrod integration: repeatedly bisects the
/// interval with the largest error estimate until the summed estimate is
/// within `max(abs_tol, rel_tol * |I|)`.
pub fn integrate_adaptive(
    f: impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
    max_intervals: usize,
) -> Result<QuadratureResult> {
    if a == b {
        return Ok(QuadratureResult {
            value: 0.0,
            error: 0.0,
            evaluations: 0,
        });
    }
    let (v, e) = gk15(&f, a, b);
    let mut intervals = vec![(a, b, v, e)];
    let mut evaluations = 15;
    loop {
        let value: f64 = intervals.iter().map(|iv| iv.2).sum();
        let error: f64 = intervals.iter().map(|iv| iv.3).sum();
        if !value.is_finite() {
            return Err(Error::Quadrature {
                estimate: value,
                error,
            });
        }
        if error <= abs_tol.max(rel_tol * value.abs()) {
            return Ok(QuadratureResult {
                value,
                error,
                evaluations,
            });
        }
        if intervals.len() >= max_intervals {
            return Err(Error::Quadrature {
                estimate: value,
                error,
            });
        }
        let (worst, _) = intervals
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .expect("nonempty");
        let (lo, hi, _, _) = intervals.swap_remove(worst);
        let mid = 0.5 * (lo + hi);
        let (v1, e1) = gk15(&f, lo, mid);
        let (v2, e2) = gk15(&f, mid, hi);
        evaluations += 30;
        intervals.push((lo, mid, v1, e1));
        intervals.push((mid, hi, v2, e2));
    }
}

/// Value at 0 of the interpolating polynomial through `(xs[i], ys[i])`.
pub fn neville_at_zero(xs: &[f64], ys: &[f64]) -> f64 {
    let mut p = ys.to_vec();
    let n = xs.len();
    for m in 1..n {
        for i in 0..n - m {
            p[i] = (xs[i + m] * p[i] - xs[i] * p[i + 1]) / (xs[i + m] - xs[i]);
        }
    }
    p[0]
}
