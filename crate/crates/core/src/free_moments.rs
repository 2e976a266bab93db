//! Free-probability oracles: the moment hierarchy of a shifted circular
//! Brownian motion, the log-series for `S`, and mixed moments of two freely
//! independent elements.

use std::collections::HashMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hj_engine::integrator::{integrate, OdeSystem, Tolerance};

/// `m[k] = tau[((c_t - lambda)^* (c_t - lambda))^k]` for `k = 0..=order`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MomentVector {
    pub lambda: Complex64,
    pub t: f64,
    pub order: usize,
    pub m: Vec<f64>,
}

/// `dm_n/dt = n sum_{j<n} m_j m_{n-1-j}` for `y_n = m_n / R^n`, which keeps
/// the state bounded by 1 when `R` dominates `||c_t - lambda||^2`.
struct Hierarchy {
    order: usize,
    scale: f64,
}

impl OdeSystem for Hierarchy {
    fn dim(&self) -> usize {
        self.order
    }

    fn rhs(&self, y: &[f64], dy: &mut [f64]) {
        // y[k] holds y_{k+1}; y_0 = 1.
        let get = |k: usize| if k == 0 { 1.0 } else { y[k - 1] };
        for n in 1..=self.order {
            let s: f64 = (0..n).map(|j| get(j) * get(n - 1 - j)).sum();
            dy[n - 1] = n as f64 * s / self.scale;
        }
    }
}

pub fn circ_moment_odes(lambda: Complex64, t: f64, order: usize, tol: f64) -> Result<MomentVector> {
    if order < 1 {
        return Err(Error::InvalidParameter {
            name: "order",
            value: order as f64,
            reason: "must be at least 1",
        });
    }
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::InvalidParameter {
            name: "t",
            value: t,
            reason: "must be nonnegative and finite",
        });
    }
    crate::error::require_positive("tol", tol)?;
    let scale = (lambda.norm() + 2.0 * t.sqrt()).powi(2).max(1.0);
    let l2 = lambda.norm_sqr() / scale;
    let y0: Vec<f64> = (1..=order).map(|n| l2.powi(n as i32)).collect();
    let sys = Hierarchy { order, scale };
    let sol = integrate(
        &sys,
        0.0,
        &y0,
        t,
        Tolerance {
            abs: tol * 1e-3,
            rel: tol,
        },
    )?;
    if !sol.is_complete() {
        return Err(Error::IncompleteTrajectory {
            reached: sol.t_end(),
            requested: t,
        });
    }
    let mut m = Vec::with_capacity(order + 1);
    m.push(1.0);
    m.extend(
        sol.final_state()
            .iter()
            .enumerate()
            .map(|(k, y)| y * scale.powi(k as i32 + 1)),
    );
    Ok(MomentVector { lambda, t, order, m })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SeriesValue {
    pub value: f64,
    /// Magnitude of the last retained term.
    pub truncation_bound: f64,
}

/// `log x + sum_{n=1}^{M} (-1)^{n-1} m_n(t) / (n x^n)`, truncated at `order`.
///
/// Requires `x > 4 m_M^{1/(2M)}`, a heuristic proxy for exceeding four times
/// the operator norm of `c_t - lambda`.
#[allow(non_snake_case)]
pub fn S_series(lambda: Complex64, x: f64, t: f64, order: usize) -> Result<SeriesValue> {
    crate::error::require_positive("x", x)?;
    let mv = circ_moment_odes(lambda, t, order, 1e-12)?;
    series_from_moments(&mv, x)
}

/// As [`S_series`] with precomputed moments.
pub fn series_from_moments(mv: &MomentVector, x: f64) -> Result<SeriesValue> {
    let order = mv.order;
    let bound = 4.0 * mv.m[order].max(0.0).powf(0.5 / order as f64);
    if !(x > bound) {
        return Err(Error::SeriesGuard { x, bound });
    }
    let mut value = x.ln();
    let mut last = 0.0;
    for n in 1..=order {
        // m_n / x^n computed as a product to avoid overflow in x^n.
        let term = mv.m[n] / x.powi(n as i32) / n as f64;
        last = term.abs();
        value += if n % 2 == 1 { term } else { -term };
    }
    Ok(SeriesValue {
        value,
        truncation_bound: last,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Letter {
    A,
    B,
}

/// A word `x_1^{k_1} x_2^{k_2} ...` in two letters, adjacent letters
/// distinct.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FreeWord {
    blocks: Vec<(Letter, u32)>,
}

pub const MAX_WORD_BLOCKS: usize = 8;

impl FreeWord {
    pub fn new(blocks: Vec<(Letter, u32)>) -> Result<Self> {
        if blocks.len() > MAX_WORD_BLOCKS {
            return Err(Error::WordTooLong(blocks.len(), MAX_WORD_BLOCKS));
        }
        if blocks.iter().any(|&(_, k)| k == 0) {
            return Err(Error::InvalidParameter {
                name: "exponent",
                value: 0.0,
                reason: "exponents must be positive",
            });
        }
        if blocks.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::Domain {
                what: "word",
                detail: "adjacent blocks must use different letters".into(),
            });
        }
        Ok(Self { blocks })
    }

    /// Parses a string over `{a, b}`, e.g. `"aabab"`; runs become powers.
    pub fn parse(s: &str) -> Result<Self> {
        let mut blocks: Vec<(Letter, u32)> = Vec::new();
        for ch in s.chars() {
            let l = match ch {
                'a' => Letter::A,
                'b' => Letter::B,
                _ => {
                    return Err(Error::Domain {
                        what: "word",
                        detail: format!("unexpected character {ch:?}"),
                    })
                }
            };
            match blocks.last_mut() {
                Some((last, k)) if *last == l => *k += 1,
                _ => blocks.push((l, 1)),
            }
        }
        Self::new(blocks)
    }

    pub fn blocks(&self) -> &[(Letter, u32)] {
        &self.blocks
    }

    /// Total exponent of `letter`.
    pub fn degree(&self, letter: Letter) -> u32 {
        self.blocks.iter().filter(|b| b.0 == letter).map(|b| b.1).sum()
    }
}

/// `tau(word)` for `a`, `b` free with the given moments
/// (`moments[k] = tau(x^k)`, `moments[0] = 1`).
///
/// Writing each block as `(x_i - c_i) + c_i` with `c_i = tau(x_i)` and using
/// that alternating products of centered elements have zero trace gives
/// `tau(x_1 ... x_n) = -sum_{S proper} prod_{i not in S} (-c_i) tau(prod_{i in S} x_i)`,
/// where the shorter words are merged and evaluated recursively.
pub fn free_word_moment(word: &FreeWord, moments_a: &[f64], moments_b: &[f64]) -> Result<f64> {
    for (name, moments, letter) in [("moments_a", moments_a, Letter::A), ("moments_b", moments_b, Letter::B)] {
        if moments.first() != Some(&1.0) {
            return Err(Error::InvalidParameter {
                name,
                value: moments.first().copied().unwrap_or(f64::NAN),
                reason: "moments[0] must be 1",
            });
        }
        if moments.len() <= word.degree(letter) as usize {
            return Err(Error::InvalidParameter {
                name,
                value: moments.len() as f64,
                reason: "too few moments for this word",
            });
        }
    }
    let mut memo = HashMap::new();
    Ok(word_moment(&word.blocks, moments_a, moments_b, &mut memo))
}

fn word_moment(
    blocks: &[(Letter, u32)],
    ma: &[f64],
    mb: &[f64],
    memo: &mut HashMap<Vec<(Letter, u32)>, f64>,
) -> f64 {
    let single = |&(l, k): &(Letter, u32)| match l {
        Letter::A => ma[k as usize],
        Letter::B => mb[k as usize],
    };
    match blocks.len() {
        0 => return 1.0,
        1 => return single(&blocks[0]),
        _ => {}
    }
    if let Some(v) = memo.get(blocks) {
        return *v;
    }
    let n = blocks.len();
    let full = (1u32 << n) - 1;
    let mut total = 0.0;
    for subset in 0..full {
        let mut coeff = 1.0;
        let mut merged: Vec<(Letter, u32)> = Vec::with_capacity(n);
        for (i, b) in blocks.iter().enumerate() {
            if subset >> i & 1 == 1 {
                match merged.last_mut() {
                    Some((l, k)) if *l == b.0 => *k += b.1,
                    _ => merged.push(*b),
                }
            } else {
                coeff *= -single(b);
            }
        }
        total -= coeff * word_moment(&merged, ma, mb, memo);
    }
    memo.insert(blocks.to_vec(), total);
    total
}
