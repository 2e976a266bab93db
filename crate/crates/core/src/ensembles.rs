//! Reproducible samplers for the matrix models: GUE, Ginibre, Ginibre
//! Brownian motion, Brownian motion on U(N) and GL(N; C), and the
//! nilpotent-plus-noise instability example.
//!
//! All entry variances are normalized by `1/n`, so the limiting spectra live
//! on O(1) sets: the semicircle on [-2, 2] for GUE and the unit disk for
//! Ginibre.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{require_positive, Error, Result};
use crate::matrix::ComplexMatrix;
use crate::rng::{GaussianStream, RngHandle};

/// Default number of product steps per unit time for group Brownian motions.
pub const DEFAULT_STEPS_PER_UNIT_TIME: usize = 100;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BmKind {
    AdditiveGinibre,
    Unitary,
    GeneralLinear,
}

/// Brownian-path request: matrix size, final time and number of steps.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BmPathSpec {
    pub kind: BmKind,
    pub n: usize,
    pub t_final: f64,
    pub steps: usize,
}

impl BmPathSpec {
    pub fn new(kind: BmKind, n: usize, t_final: f64, steps: usize) -> Self {
        Self {
            kind,
            n,
            t_final,
            steps,
        }
    }

    /// Uses `DEFAULT_STEPS_PER_UNIT_TIME`, with at least one step.
    pub fn with_default_steps(kind: BmKind, n: usize, t_final: f64) -> Self {
        let steps = ((t_final * DEFAULT_STEPS_PER_UNIT_TIME as f64).ceil() as usize).max(1);
        Self::new(kind, n, t_final, steps)
    }

    /// `t_final = 0` is accepted and yields the starting point of the path.
    pub fn validate(&self) -> Result<()> {
        check_dim(self.n, 1)?;
        if !(self.t_final >= 0.0 && self.t_final.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "t_final",
                value: self.t_final,
                reason: "must be nonnegative and finite",
            });
        }
        if self.steps == 0 {
            return Err(Error::InvalidParameter {
                name: "steps",
                value: 0.0,
                reason: "must be at least 1",
            });
        }
        Ok(())
    }

    pub fn step_length(&self) -> f64 {
        self.t_final / self.steps as f64
    }
}

/// Result of a GL(N) Brownian motion sample.
#[derive(Clone, Debug)]
pub struct GlSample {
    pub matrix: ComplexMatrix,
    /// Set when the product looks singular at working precision; callers
    /// should resample rather than trust the spectrum.
    pub resample_warning: bool,
}

fn check_dim(n: usize, min: usize) -> Result<()> {
    if n < min {
        Err(Error::InvalidDimension(n, min))
    } else {
        Ok(())
    }
}

fn fill_gue(n: usize, stream: &mut GaussianStream, variance_scale: f64) -> ComplexMatrix {
    let v = variance_scale / n as f64;
    // Draw the upper triangle row by row, then mirror.
    let mut upper = vec![Complex64::new(0.0, 0.0); n * n];
    for i in 0..n {
        upper[i * n + i] = Complex64::new(stream.real(v), 0.0);
        for j in i + 1..n {
            upper[i * n + j] = stream.complex(v);
        }
    }
    ComplexMatrix::from_fn(n, |i, j| {
        if i <= j {
            upper[i * n + j]
        } else {
            upper[j * n + i].conj()
        }
    })
}

fn fill_ginibre(n: usize, stream: &mut GaussianStream, variance_scale: f64) -> ComplexMatrix {
    let v = variance_scale / n as f64;
    let mut entries = vec![Complex64::new(0.0, 0.0); n * n];
    for z in entries.iter_mut() {
        *z = stream.complex(v);
    }
    ComplexMatrix::from_fn(n, |i, j| entries[i * n + j])
}

/// GUE: Hermitian, diagonal `N(0, 1/n)`, off-diagonal complex `N(0, 1/n)`.
pub fn sample_gue(n: usize, rng: RngHandle) -> Result<ComplexMatrix> {
    check_dim(n, 1)?;
    Ok(fill_gue(n, &mut rng.stream(), 1.0))
}

/// Ginibre: all entries independent complex Gaussians of variance `1/n`.
pub fn sample_ginibre(n: usize, rng: RngHandle) -> Result<ComplexMatrix> {
    check_dim(n, 1)?;
    Ok(fill_ginibre(n, &mut rng.stream(), 1.0))
}

/// Ginibre Brownian motion sampled at times `j * t_final / steps`,
/// `j = 1..=steps`, as a running sum of independent increments.
pub fn sample_ginibre_bm(spec: &BmPathSpec, rng: RngHandle) -> Result<Vec<ComplexMatrix>> {
    spec.validate()?;
    let n = spec.n;
    let dt = spec.step_length();
    let mut stream = rng.stream();
    let mut current = ComplexMatrix::zeros(n);
    let mut path = Vec::with_capacity(spec.steps);
    for _ in 0..spec.steps {
        if dt > 0.0 {
            current = current.add(&fill_ginibre(n, &mut stream, dt));
        }
        path.push(current.clone());
    }
    Ok(path)
}

/// Brownian motion on U(n) at time `t_final`: an ordered product of
/// `exp(i sqrt(dt) X_j)` with independent GUE `X_j`.
pub fn sample_unitary_bm(spec: &BmPathSpec, rng: RngHandle) -> Result<ComplexMatrix> {
    spec.validate()?;
    let n = spec.n;
    let dt = spec.step_length();
    if dt == 0.0 {
        return Ok(ComplexMatrix::identity(n));
    }
    let mut stream = rng.stream();
    let mut u = ComplexMatrix::identity(n);
    for _ in 0..spec.steps {
        // sqrt(dt) * GUE has entry variance dt/n.
        let h = fill_gue(n, &mut stream, dt);
        u = u.matmul(&h.exp_i_hermitian()?);
    }
    Ok(u)
}

/// Brownian motion on GL(n; C) at time `t_final`: an ordered product of
/// `exp(sqrt(dt) Z_j)` with independent Ginibre `Z_j`.
pub fn sample_gl_bm(spec: &BmPathSpec, rng: RngHandle) -> Result<GlSample> {
    let mut out = sample_gl_bm_snapshots(spec, &[spec.steps], rng)?;
    Ok(out.pop().expect("one snapshot"))
}

/// The GL(n; C) path of [`sample_gl_bm`] recorded after each step count in
/// `at_steps` (nondecreasing, at most `spec.steps`). Snapshot `j` is a
/// sample at time `at_steps[j] * dt`; the last requested snapshot ends the
/// path, so equal requests share one set of increments.
pub fn sample_gl_bm_snapshots(spec: &BmPathSpec, at_steps: &[usize], rng: RngHandle) -> Result<Vec<GlSample>> {
    spec.validate()?;
    if at_steps.windows(2).any(|w| w[0] > w[1]) || at_steps.iter().any(|&k| k > spec.steps) {
        return Err(Error::InvalidParameter {
            name: "at_steps",
            value: at_steps.last().copied().unwrap_or(0) as f64,
            reason: "snapshots must be nondecreasing and within the path",
        });
    }
    let n = spec.n;
    let dt = spec.step_length();
    let mut stream = rng.stream();
    let mut b = ComplexMatrix::identity(n);
    let mut done = 0;
    let mut out = Vec::with_capacity(at_steps.len());
    for &k in at_steps {
        if dt > 0.0 {
            while done < k {
                let z = fill_ginibre(n, &mut stream, dt);
                b = b.matmul(&z.expm());
                done += 1;
            }
        }
        let resample_warning = !b.is_finite() || looks_singular(&b);
        out.push(GlSample {
            matrix: b.clone(),
            resample_warning,
        });
    }
    Ok(out)
}

/// A product of matrix exponentials has determinant `exp(sum of traces)`,
/// so singularity can only come from roundoff. Flag it when the smallest
/// eigenvalue of `B* B` is lost relative to the largest.
fn looks_singular(b: &ComplexMatrix) -> bool {
    let gram = b.adjoint().matmul(b);
    match gram.hermitian_eigenvalues() {
        Ok(s) => {
            let max = s.iter().cloned().fold(0.0, f64::max);
            let min = s.iter().cloned().fold(f64::INFINITY, f64::min);
            !(min > max * 1e-28)
        }
        Err(_) => true,
    }
}

/// `nil_n + epsilon * Ginibre`, where `nil_n` has ones on the superdiagonal.
pub fn nilpotent_plus_noise(n: usize, epsilon: f64, rng: RngHandle) -> Result<ComplexMatrix> {
    check_dim(n, 2)?;
    if !(epsilon >= 0.0 && epsilon.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "epsilon",
            value: epsilon,
            reason: "must be nonnegative and finite",
        });
    }
    let nil = ComplexMatrix::nilpotent(n);
    if epsilon == 0.0 {
        return Ok(nil);
    }
    let noise = fill_ginibre(n, &mut rng.stream(), epsilon * epsilon);
    Ok(nil.add(&noise))
}

/// Convenience for the additive model at a single time: `sqrt(t)` Ginibre.
pub fn sample_scaled_ginibre(n: usize, t: f64, rng: RngHandle) -> Result<ComplexMatrix> {
    check_dim(n, 1)?;
    require_positive("t", t)?;
    Ok(fill_ginibre(n, &mut rng.stream(), t))
}
