//! Empirical spectra against the analytic predictions.

use std::f64::consts::PI;

use brownflow::brown_analytic::{biane_support, semicircle_density, t_lambda, SigmaDomain};
use brownflow::spectra::{
    band_occupancy_chi2, distance_l1_bins, distance_sup_cdf, empirical_from_points, histogram_1d, radial_cdf,
    uniform_edges,
};
use brownflow::RngHandle;
use num_complex::Complex64;
use serde_json::json;

use crate::commands::sample::point_cloud;
use crate::config::{CheckName, Ensemble, RunConfig};
use crate::error::CliError;
use crate::output::Output;

/// One measured quantity and its pass condition.
struct Check {
    name: &'static str,
    value: f64,
    threshold: f64,
    /// True when the value must stay below the threshold.
    upper: bool,
}

impl Check {
    fn below(name: &'static str, value: f64, threshold: f64) -> Self {
        Self { name, value, threshold, upper: true }
    }

    fn above(name: &'static str, value: f64, threshold: f64) -> Self {
        Self { name, value, threshold, upper: false }
    }

    fn pass(&self) -> bool {
        if self.upper {
            self.value < self.threshold
        } else {
            self.value >= self.threshold
        }
    }
}

fn fraction(points: &[Complex64], pred: impl Fn(Complex64) -> bool) -> f64 {
    points.iter().filter(|&&z| pred(z)).count() as f64 / points.len() as f64
}

/// Runs the configured comparison; the second value is the number of
/// failed checks.
pub fn run(cfg: &mut RunConfig) -> Result<(Output, usize), CliError> {
    let check = cfg
        .check
        .ok_or_else(|| CliError::Usage("compare needs a check (semicircle, circular, multiplicative, horizontal)".into()))?;
    let rng = RngHandle::new(cfg.seed(), 1);
    let checks = match check {
        CheckName::Semicircle => semicircle(cfg, rng)?,
        CheckName::Circular => circular(cfg, rng)?,
        CheckName::Multiplicative => multiplicative(cfg, rng)?,
        CheckName::Horizontal => horizontal(cfg, rng)?,
    };
    let mut out = Output::new(&["check", "value", "threshold", "relation", "pass"]);
    for c in &checks {
        out.push(vec![
            c.name.into(),
            c.value.into(),
            c.threshold.into(),
            (if c.upper { "<" } else { ">=" }).into(),
            c.pass().into(),
        ]);
    }
    let failed = checks.iter().filter(|c| !c.pass()).count();
    out.field("pass", json!(failed == 0));
    Ok((out, failed))
}

fn semicircle(cfg: &mut RunConfig, rng: RngHandle) -> Result<Vec<Check>, CliError> {
    cfg.ensemble = Some(Ensemble::Gue);
    RunConfig::get_or(&mut cfg.samples, 10);
    let bins = RunConfig::get_or(&mut cfg.bins, 40);
    let tol = RunConfig::get_or(&mut cfg.tolerance, 0.08);
    let reals: Vec<f64> = point_cloud(cfg, rng)?.iter().map(|z| z.re).collect();
    let hist = histogram_1d(&reals, uniform_edges(-2.2, 2.2, bins))?;
    Ok(vec![Check::below("l1_bins", distance_l1_bins(&hist, semicircle_density)?, tol)])
}

fn circular(cfg: &mut RunConfig, rng: RngHandle) -> Result<Vec<Check>, CliError> {
    cfg.ensemble = Some(Ensemble::Ginibre);
    let t = RunConfig::get_or(&mut cfg.t, 1.0);
    let tol = RunConfig::get_or(&mut cfg.tolerance, 0.05);
    let pts = point_cloud(cfg, rng)?;
    let radius = t.sqrt();
    let inside = fraction(&pts, |z| z.norm() <= 1.02 * radius);
    let em = empirical_from_points(pts)?;
    let ks = distance_sup_cdf(&radial_cdf(&em, Complex64::new(0.0, 0.0))?, |r| (r * r / t).min(1.0));
    Ok(vec![
        Check::above("fraction_in_disk_1.02", inside, 0.97),
        Check::below("radial_ks", ks, tol),
    ])
}

fn multiplicative(cfg: &mut RunConfig, rng: RngHandle) -> Result<Vec<Check>, CliError> {
    cfg.ensemble = Some(Ensemble::GlBm);
    let t = RunConfig::get_or(&mut cfg.t, 1.0);
    let pts = point_cloud(cfg, rng)?;
    let near = fraction(&pts, |z| t_lambda(z) < 1.2 * t);
    let dom = SigmaDomain::new(t)?;
    let support = biane_support(t)?.theta_max;
    let angles = pts.iter().map(|&z| dom.circle_angle(z)).collect::<Result<Vec<_>, _>>()?;
    let within = angles.iter().filter(|a| a.abs() <= support + 0.1).count() as f64 / angles.len() as f64;
    let mut checks = vec![
        Check::above("fraction_t_lambda_below_1.2t", near, 0.95),
        Check::above("fraction_angles_in_support", within, 0.95),
    ];
    if t >= 4.0 {
        // The support is the whole circle; the pushed-forward angles reach pi.
        let widest = angles.iter().fold(0.0f64, |m, a| m.max(a.abs()));
        checks.push(Check::above("max_abs_angle", widest, PI - 0.1));
    }
    Ok(checks)
}

/// Horizontal uniformity of log-eigenvalues: within each angular slice the
/// normalized position across the segment of `Sigma_t` is uniform.
fn horizontal(cfg: &mut RunConfig, rng: RngHandle) -> Result<Vec<Check>, CliError> {
    cfg.ensemble = Some(Ensemble::GlBm);
    let t = RunConfig::get_or(&mut cfg.t, 4.1);
    let slices = RunConfig::get_or(&mut cfg.bins, 8);
    let tol = RunConfig::get_or(&mut cfg.tolerance, 0.01);
    let pts = point_cloud(cfg, rng)?;
    let dom = SigmaDomain::new(t)?;
    let mut positions = Vec::with_capacity(pts.len());
    for z in pts {
        let theta = z.arg();
        if !dom.ray_hits(theta) {
            continue;
        }
        let (ri, ro) = dom.ray(theta)?;
        if ro <= ri {
            continue;
        }
        let u = (z.norm() / ri).ln() / (ro / ri).ln();
        let slice = (((theta + PI) / (2.0 * PI)) * slices as f64) as usize;
        positions.push((slice.min(slices - 1), u));
    }
    let report = band_occupancy_chi2(&positions, slices, 4)?;
    Ok(vec![Check::above("band_chi2_p_value", report.p_value, tol)])
}
