//! Eigenvalues, empirical eigenvalue distributions, the finite-n regularized
//! log-determinant and resolvent trace, and distances between empirical and
//! analytic measures.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::ensembles::{self, BmKind, BmPathSpec};
use crate::error::{require_positive, Error, Result};
use crate::matrix::ComplexMatrix;
use crate::quadrature::gauss_legendre_8;
use crate::rng::RngHandle;

/// Eigenvalues with algebraic multiplicity.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub n: usize,
    pub eigenvalues: Vec<Complex64>,
}

impl Spectrum {
    pub fn sum(&self) -> Complex64 {
        self.eigenvalues.iter().sum()
    }
}

/// Dense eigensolve. Exactly Hermitian input goes through the self-adjoint
/// solver; everything else through the general complex Schur route.
pub fn eigenvalues(m: &ComplexMatrix) -> Result<Spectrum> {
    eigenvalues_labeled(m, "unlabeled")
}

/// As [`eigenvalues`], tagging failures with `id` (e.g. the seed/stream).
pub fn eigenvalues_labeled(m: &ComplexMatrix, id: &str) -> Result<Spectrum> {
    let n = m.n();
    if !m.is_finite() {
        return Err(Error::Domain {
            what: "matrix",
            detail: format!("`{id}` has non-finite entries"),
        });
    }
    let hermitian = (0..n).all(|i| (i..n).all(|j| m.get(i, j) == m.get(j, i).conj()));
    let eigenvalues: Vec<Complex64> = if hermitian {
        m.hermitian_eigenvalues()
            .map_err(|_| Error::EigenNonConvergence { id: id.to_string() })?
            .into_iter()
            .map(|x| Complex64::new(x, 0.0))
            .collect()
    } else {
        m.as_faer()
            .eigenvalues()
            .map_err(|_| Error::EigenNonConvergence { id: id.to_string() })?
    };
    let spectrum = Spectrum { n, eigenvalues };
    let trace = m.trace();
    let residual = (spectrum.sum() - trace).norm();
    if residual > 1e-8 * (1.0 + trace.norm()) {
        return Err(Error::Domain {
            what: "spectrum",
            detail: format!("eigenvalue sum misses trace by {residual:e} for `{id}`"),
        });
    }
    Ok(spectrum)
}

/// Eigenvalues `sigma_i >= 0` of `(A - lambda)^* (A - lambda)`.
#[derive(Clone, Debug)]
pub struct ShiftedGram {
    pub sigma: Vec<f64>,
}

impl ShiftedGram {
    pub fn new(a: &ComplexMatrix, lambda: Complex64) -> Result<Self> {
        let shifted = a.shift(lambda);
        let gram = shifted.adjoint().matmul(&shifted);
        let mut sigma = gram.hermitian_eigenvalues()?;
        let top = sigma.iter().cloned().fold(0.0, f64::max);
        let floor = -1e-12 * top.max(f64::MIN_POSITIVE);
        for s in sigma.iter_mut() {
            if *s < 0.0 {
                if *s < floor {
                    return Err(Error::Domain {
                        what: "Gram eigenvalue",
                        detail: format!("{s:e} is negative beyond roundoff (floor {floor:e})"),
                    });
                }
                *s = 0.0;
            }
        }
        Ok(Self { sigma })
    }

    /// `(1/n) tr log(G + x)`.
    pub fn log_det(&self, x: f64) -> Result<f64> {
        require_positive("x", x)?;
        Ok(self.sigma.iter().map(|s| (s + x).ln()).sum::<f64>() / self.sigma.len() as f64)
    }

    /// `(1/n) tr (G + x)^{-1}`.
    pub fn resolvent_trace(&self, x: f64) -> Result<f64> {
        require_positive("x", x)?;
        Ok(self.sigma.iter().map(|s| 1.0 / (s + x)).sum::<f64>() / self.sigma.len() as f64)
    }
}

/// `(1/n) tr log((A - lambda)^*(A - lambda) + x)`.
pub fn s_function_matrix(a: &ComplexMatrix, lambda: Complex64, x: f64) -> Result<f64> {
    require_positive("x", x)?;
    ShiftedGram::new(a, lambda)?.log_det(x)
}

/// `(1/n) tr ((A - lambda)^*(A - lambda) + x)^{-1}`, the x-derivative of
/// [`s_function_matrix`].
pub fn resolvent_trace(a: &ComplexMatrix, lambda: Complex64, x: f64) -> Result<f64> {
    require_positive("x", x)?;
    ShiftedGram::new(a, lambda)?.resolvent_trace(x)
}

/// Streaming mean/variance (Welford), mergeable across threads.
#[derive(Clone, Copy, Debug, Default)]
pub struct Moments {
    pub count: u64,
    pub mean: f64,
    m2: f64,
}

impl Moments {
    pub fn push(&mut self, v: f64) {
        self.count += 1;
        let d = v - self.mean;
        self.mean += d / self.count as f64;
        self.m2 += d * (v - self.mean);
    }

    pub fn merge(self, other: Self) -> Self {
        if self.count == 0 {
            return other;
        }
        if other.count == 0 {
            return self;
        }
        let count = self.count + other.count;
        let d = other.mean - self.mean;
        let mean = self.mean + d * other.count as f64 / count as f64;
        let m2 = self.m2 + other.m2 + d * d * (self.count as f64 * other.count as f64) / count as f64;
        Self { count, mean, m2 }
    }

    /// Unbiased sample variance.
    pub fn variance(&self) -> f64 {
        if self.count < 2 {
            0.0
        } else {
            (self.m2 / (self.count - 1) as f64).max(0.0)
        }
    }

    pub fn standard_error(&self) -> f64 {
        (self.variance() / self.count as f64).sqrt()
    }
}

impl FromIterator<f64> for Moments {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut m = Moments::default();
        for v in iter {
            m.push(v);
        }
        m
    }
}

/// Monte Carlo estimate of the regularized log-determinant and the
/// resolvent trace at one `(t, lambda, x)`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RegularizedLogDet {
    pub t: f64,
    pub lambda: Complex64,
    pub x: f64,
    pub s_mean: f64,
    pub s_var: f64,
    pub resolvent_trace_mean: f64,
    pub resolvent_trace_var: f64,
    pub samples: usize,
}

/// Terminal matrix of the requested Brownian motion.
pub fn sample_endpoint(spec: &BmPathSpec, rng: RngHandle) -> Result<ComplexMatrix> {
    match spec.kind {
        BmKind::AdditiveGinibre => Ok(ensembles::sample_ginibre_bm(spec, rng)?
            .pop()
            .expect("at least one step")),
        BmKind::Unitary => ensembles::sample_unitary_bm(spec, rng),
        BmKind::GeneralLinear => Ok(ensembles::sample_gl_bm(spec, rng)?.matrix),
    }
}

#[allow(non_snake_case)]
pub fn monte_carlo_S(
    spec: &BmPathSpec,
    lambda: Complex64,
    x: f64,
    samples: usize,
    rng: RngHandle,
) -> Result<RegularizedLogDet> {
    require_positive("x", x)?;
    spec.validate()?;
    if samples < 2 {
        return Err(Error::InvalidParameter {
            name: "samples",
            value: samples as f64,
            reason: "need at least 2 samples",
        });
    }
    let per_sample: Vec<(f64, f64)> = (0..samples as u64)
        .into_par_iter()
        .map(|j| {
            let m = sample_endpoint(spec, rng.sample(j))?;
            let g = ShiftedGram::new(&m, lambda)?;
            Ok((g.log_det(x)?, g.resolvent_trace(x)?))
        })
        .collect::<Result<_>>()?;
    let s: Moments = per_sample.iter().map(|p| p.0).collect();
    let r: Moments = per_sample.iter().map(|p| p.1).collect();
    Ok(RegularizedLogDet {
        t: spec.t_final,
        lambda,
        x,
        s_mean: s.mean,
        s_var: s.variance(),
        resolvent_trace_mean: r.mean,
        resolvent_trace_var: r.variance(),
        samples,
    })
}

/// Probability measure with mass `1/len` on each point.
#[derive(Clone, Debug, PartialEq)]
pub struct EmpiricalMeasure {
    pub points: Vec<Complex64>,
}

impl EmpiricalMeasure {
    pub fn weight(&self) -> f64 {
        1.0 / self.points.len() as f64
    }

    pub fn total_mass(&self) -> f64 {
        self.weight() * self.points.len() as f64
    }

    /// Distinct points with their accumulated masses.
    pub fn atoms(&self) -> Vec<(Complex64, f64)> {
        let mut out: Vec<(Complex64, f64)> = Vec::new();
        for p in &self.points {
            match out.iter_mut().find(|(q, _)| q == p) {
                Some(a) => a.1 += self.weight(),
                None => out.push((*p, self.weight())),
            }
        }
        out
    }
}

pub fn empirical_measure(s: &Spectrum) -> Result<EmpiricalMeasure> {
    empirical_from_points(s.eigenvalues.clone())
}

pub fn empirical_from_points(points: Vec<Complex64>) -> Result<EmpiricalMeasure> {
    if points.is_empty() {
        return Err(Error::EmptySpectrum);
    }
    Ok(EmpiricalMeasure { points })
}

/// Masses over strictly increasing bin edges; mass outside `[first, last)`
/// is counted separately.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Histogram1d {
    pub edges: Vec<f64>,
    pub masses: Vec<f64>,
    pub outside: f64,
}

fn check_edges(edges: &[f64]) -> Result<()> {
    if edges.len() < 2 || edges.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Bins("edges must be strictly increasing with at least one bin".into()));
    }
    Ok(())
}

pub fn uniform_edges(lo: f64, hi: f64, bins: usize) -> Vec<f64> {
    (0..=bins)
        .map(|i| lo + (hi - lo) * i as f64 / bins as f64)
        .collect()
}

fn bin_index(edges: &[f64], v: f64) -> Option<usize> {
    if !(v >= edges[0] && v < edges[edges.len() - 1]) {
        return None;
    }
    // partition_point gives the first edge > v.
    Some(edges.partition_point(|&e| e <= v) - 1)
}

pub fn histogram_1d(values: &[f64], edges: Vec<f64>) -> Result<Histogram1d> {
    check_edges(&edges)?;
    if values.is_empty() {
        return Err(Error::EmptySpectrum);
    }
    let w = 1.0 / values.len() as f64;
    let mut masses = vec![0.0; edges.len() - 1];
    let mut outside = 0.0;
    for &v in values {
        match bin_index(&edges, v) {
            Some(i) => masses[i] += w,
            None => outside += w,
        }
    }
    Ok(Histogram1d {
        edges,
        masses,
        outside,
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Histogram2d {
    pub x_edges: Vec<f64>,
    pub y_edges: Vec<f64>,
    /// Row-major in x: `masses[ix * ny + iy]`.
    pub masses: Vec<f64>,
    pub outside: f64,
}

impl Histogram2d {
    pub fn mass(&self, ix: usize, iy: usize) -> f64 {
        self.masses[ix * (self.y_edges.len() - 1) + iy]
    }
}

pub fn histogram_2d(points: &[Complex64], x_edges: Vec<f64>, y_edges: Vec<f64>) -> Result<Histogram2d> {
    check_edges(&x_edges)?;
    check_edges(&y_edges)?;
    if points.is_empty() {
        return Err(Error::EmptySpectrum);
    }
    let ny = y_edges.len() - 1;
    let w = 1.0 / points.len() as f64;
    let mut masses = vec![0.0; (x_edges.len() - 1) * ny];
    let mut outside = 0.0;
    for p in points {
        match (bin_index(&x_edges, p.re), bin_index(&y_edges, p.im)) {
            (Some(i), Some(j)) => masses[i * ny + j] += w,
            _ => outside += w,
        }
    }
    Ok(Histogram2d {
        x_edges,
        y_edges,
        masses,
        outside,
    })
}

/// 2D histogram over the bounding box padded by 5% on each side.
pub fn histogram_2d_auto(points: &[Complex64], bins_x: usize, bins_y: usize) -> Result<Histogram2d> {
    if points.is_empty() {
        return Err(Error::EmptySpectrum);
    }
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for p in points {
        x0 = x0.min(p.re);
        x1 = x1.max(p.re);
        y0 = y0.min(p.im);
        y1 = y1.max(p.im);
    }
    let pad = |lo: f64, hi: f64| {
        let w = (hi - lo).max(1e-12);
        (lo - 0.05 * w, hi + 0.05 * w)
    };
    let (x0, x1) = pad(x0, x1);
    let (y0, y1) = pad(y0, y1);
    histogram_2d(points, uniform_edges(x0, x1, bins_x), uniform_edges(y0, y1, bins_y))
}

/// Right-continuous empirical CDF of a finite sample.
#[derive(Clone, Debug)]
pub struct StepCdf {
    sorted: Vec<f64>,
}

impl StepCdf {
    pub fn from_values(mut values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptySpectrum);
        }
        values.sort_by(f64::total_cmp);
        Ok(Self { sorted: values })
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.sorted.partition_point(|&v| v <= x) as f64 / self.sorted.len() as f64
    }

    pub fn values(&self) -> &[f64] {
        &self.sorted
    }
}

/// CDF of `|z - center|` under the empirical measure.
pub fn radial_cdf(em: &EmpiricalMeasure, center: Complex64) -> Result<StepCdf> {
    StepCdf::from_values(em.points.iter().map(|z| (z - center).norm()).collect())
}

/// Image of every point under `map`.
pub fn angular_pushforward(em: &EmpiricalMeasure, map: impl Fn(Complex64) -> f64) -> Vec<f64> {
    em.points.iter().map(|&z| map(z)).collect()
}

/// Kolmogorov–Smirnov distance between an empirical CDF and an analytic one.
pub fn distance_sup_cdf(empirical: &StepCdf, analytic: impl Fn(f64) -> f64) -> f64 {
    let xs = empirical.values();
    let n = xs.len() as f64;
    let mut d: f64 = 0.0;
    let mut i = 0;
    while i < xs.len() {
        // Group ties so the jump is taken in one step.
        let mut j = i;
        while j + 1 < xs.len() && xs[j + 1] == xs[i] {
            j += 1;
        }
        // Left limits are compared with left limits, which matters when the
        // analytic CDF has atoms.
        let f_left = analytic(xs[i].next_down());
        let f = analytic(xs[i]);
        d = d.max((f_left - i as f64 / n).abs()).max((f - (j + 1) as f64 / n).abs());
        i = j + 1;
    }
    d
}

/// Sum over bins of `|bin mass - integral of density over the bin|`, each
/// integral by 8-point Gauss–Legendre.
pub fn distance_l1_bins(hist: &Histogram1d, density: impl Fn(f64) -> f64) -> Result<f64> {
    check_edges(&hist.edges)?;
    if hist.masses.len() + 1 != hist.edges.len() {
        return Err(Error::Bins(format!(
            "{} masses for {} edges",
            hist.masses.len(),
            hist.edges.len()
        )));
    }
    Ok(hist
        .edges
        .windows(2)
        .zip(&hist.masses)
        .map(|(w, m)| (m - gauss_legendre_8(&density, w[0], w[1])).abs())
        .sum())
}

/// 2D analogue of [`distance_l1_bins`] with an 8x8 tensor rule per cell.
pub fn distance_l1_bins_2d(hist: &Histogram2d, density: impl Fn(Complex64) -> f64) -> Result<f64> {
    check_edges(&hist.x_edges)?;
    check_edges(&hist.y_edges)?;
    let nx = hist.x_edges.len() - 1;
    let ny = hist.y_edges.len() - 1;
    if hist.masses.len() != nx * ny {
        return Err(Error::Bins("mass grid does not match edges".into()));
    }
    let mut total = 0.0;
    for ix in 0..nx {
        for iy in 0..ny {
            let (x0, x1) = (hist.x_edges[ix], hist.x_edges[ix + 1]);
            let (y0, y1) = (hist.y_edges[iy], hist.y_edges[iy + 1]);
            let cell = gauss_legendre_8(
                |x| gauss_legendre_8(|y| density(Complex64::new(x, y)), y0, y1),
                x0,
                x1,
            );
            total += (hist.mass(ix, iy) - cell).abs();
        }
    }
    Ok(total)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ChiSquareReport {
    pub statistic: f64,
    pub degrees_of_freedom: usize,
    pub p_value: f64,
    pub counts: Vec<Vec<usize>>,
}

/// Chi-square test that, within each slice, the unit positions `u` are
/// uniform over `bands` equal bands of `[0, 1]`. Positions outside `[0, 1]`
/// are clipped into the end bands; slices with fewer than `5 * bands`
/// points are dropped.
pub fn band_occupancy_chi2(
    positions: &[(usize, f64)],
    slices: usize,
    bands: usize,
) -> Result<ChiSquareReport> {
    if bands < 2 || slices == 0 {
        return Err(Error::Bins("need at least two bands and one slice".into()));
    }
    let mut counts = vec![vec![0usize; bands]; slices];
    for &(s, u) in positions {
        if s >= slices {
            return Err(Error::Bins(format!("slice {s} out of range")));
        }
        let b = ((u.clamp(0.0, 1.0) * bands as f64) as usize).min(bands - 1);
        counts[s][b] += 1;
    }
    let mut statistic = 0.0;
    let mut df = 0;
    for row in &counts {
        let total: usize = row.iter().sum();
        if total < 5 * bands {
            continue;
        }
        let expected = total as f64 / bands as f64;
        statistic += row
            .iter()
            .map(|&c| (c as f64 - expected).powi(2) / expected)
            .sum::<f64>();
        df += bands - 1;
    }
    if df == 0 {
        return Err(Error::Bins("no slice has enough points".into()));
    }
    let dist = ChiSquared::new(df as f64).map_err(|e| Error::Bins(e.to_string()))?;
    Ok(ChiSquareReport {
        statistic,
        degrees_of_freedom: df,
        p_value: 1.0 - dist.cdf(statistic),
        counts,
    })
}
