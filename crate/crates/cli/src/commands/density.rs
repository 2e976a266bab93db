//! Analytic density tables.

use brownflow::brown_analytic::{
    build_sigma_domain, circular_brown_density, integrate_density, semicircle_cdf, semicircle_density, DensitySpec,
};
use num_complex::Complex64;
use serde_json::json;

use crate::config::{DensityName, RunConfig};
use crate::error::CliError;
use crate::output::Output;

const DEFAULT_RESOLUTION: usize = 256;

pub fn run(cfg: &mut RunConfig) -> Result<Output, CliError> {
    match RunConfig::get_or(&mut cfg.density, DensityName::Multiplicative) {
        DensityName::Semicircle => semicircle(cfg),
        DensityName::Circular => circular(cfg),
        DensityName::Multiplicative => {
            let t = RunConfig::get_or(&mut cfg.t, 1.0);
            let res = RunConfig::get_or(&mut cfg.theta_resolution, DEFAULT_RESOLUTION);
            let mut out = Output::new(&MULT_COLUMNS);
            let mass = multiplicative_rows(&mut out, t, res)?;
            out.field("total_mass", json!(mass));
            Ok(out)
        }
    }
}

fn grid(lo: f64, hi: f64, points: usize) -> impl Iterator<Item = f64> {
    let h = (hi - lo) / (points - 1).max(1) as f64;
    (0..points).map(move |i| lo + i as f64 * h)
}

fn semicircle(cfg: &mut RunConfig) -> Result<Output, CliError> {
    let res = RunConfig::get_or(&mut cfg.theta_resolution, DEFAULT_RESOLUTION);
    let mut out = Output::new(&["x", "density"]);
    for x in grid(-2.2, 2.2, res) {
        out.push(vec![x.into(), semicircle_density(x).into()]);
    }
    out.field("total_mass", json!(semicircle_cdf(2.0) - semicircle_cdf(-2.0)));
    Ok(out)
}

/// Radial profile; the density is rotation invariant.
fn circular(cfg: &mut RunConfig) -> Result<Output, CliError> {
    let t = RunConfig::get_or(&mut cfg.t, 1.0);
    let res = RunConfig::get_or(&mut cfg.theta_resolution, DEFAULT_RESOLUTION);
    let mut out = Output::new(&["r", "density"]);
    for r in grid(0.0, 1.5 * t.sqrt(), res) {
        out.push(vec![r.into(), circular_brown_density(t, Complex64::new(r, 0.0))?.into()]);
    }
    out.field("total_mass", json!(integrate_density(&DensitySpec::circular(t)?)?));
    Ok(out)
}

pub(crate) const MULT_COLUMNS: [&str; 5] = ["t", "theta", "r_inner", "r_outer", "w_t"];

/// Appends the profile of `Sigma_t` and `w_t` at `res` angles; returns the
/// total mass of the density.
pub(crate) fn multiplicative_rows(out: &mut Output, t: f64, res: usize) -> Result<f64, CliError> {
    let dom = build_sigma_domain(t, res)?;
    for row in &dom.profile {
        out.push(vec![
            t.into(),
            row.theta.into(),
            row.r_inner.into(),
            row.r_outer.into(),
            dom.w_t(row.theta)?.into(),
        ]);
    }
    Ok(dom.total_mass()?)
}
