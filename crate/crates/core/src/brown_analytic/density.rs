//! Brown-measure densities and the boundary map onto the unit circle.

use std::cell::RefCell;
use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64;
use serde::Serialize;

use super::domain::{normalize_angle, SigmaDomain, Topology};
use super::{circular_brown_density, ds_dtheta_boundary, f_t, omega, t_lambda};
use crate::error::{require_positive, Error, Result};
use crate::quadrature::integrate_adaptive;

const STENCIL_STEP: f64 = 1e-4;

impl SigmaDomain {
    /// `w_t(theta) = omega(r_t(theta), theta) / (2 pi t)`.
    pub fn w_t(&self, theta: f64) -> Result<f64> {
        let r = self.r_outer(theta)?;
        Ok(omega(r, theta)? / (2.0 * PI * self.t))
    }

    /// `(2/t + d/dtheta [2 r sin(theta)/(r^2 + 1 - 2 r cos(theta))]) / (4 pi)`
    /// at `r = r_t(theta)`, with a five-point central difference.
    pub fn w_t_via_derivative(&self, theta: f64) -> Result<f64> {
        let h = STENCIL_STEP;
        let g = |th: f64| -> Result<f64> { ds_dtheta_boundary(self.r_outer(th)?, th) };
        let d = (-g(theta + 2.0 * h)? + 8.0 * g(theta + h)? - 8.0 * g(theta - h)? + g(theta - 2.0 * h)?) / (12.0 * h);
        Ok((2.0 / self.t + d) / (4.0 * PI))
    }

    /// `w_t(theta) / r^2` on `Sigma_t`, zero elsewhere.
    pub fn mult_density(&self, lambda: Complex64) -> Result<f64> {
        if t_lambda(lambda) >= self.t {
            return Ok(0.0);
        }
        Ok(self.w_t(lambda.arg())? / lambda.norm_sqr())
    }

    /// `f_t` at the outer boundary point on the ray through `lambda`, which
    /// must lie in the closure of `Sigma_t`.
    pub fn phi(&self, lambda: Complex64) -> Result<Complex64> {
        let t = self.t;
        if !(t_lambda(lambda) <= t * (1.0 + 1e-12)) {
            return Err(Error::Domain {
                what: "phi_t argument",
                detail: format!("{lambda} is outside the closure of Sigma_{t}"),
            });
        }
        let theta = lambda.arg();
        let edge = if self.ray_hits(theta) {
            Complex64::from_polar(self.r_outer(theta)?, theta)
        } else {
            // Tip of the domain: lambda is itself a boundary point.
            lambda
        };
        f_t(t, edge)
    }

    /// Angle on the unit circle assigned to an arbitrary point: `arg Phi_t`
    /// on rays that meet `Sigma_t`, and `arg f_t(e^{i theta})` on rays that
    /// miss it (those points of the unit circle lie outside the closure and
    /// map into the gap of the support).
    pub fn circle_angle(&self, lambda: Complex64) -> Result<f64> {
        let theta = lambda.arg();
        let edge = if self.ray_hits(theta) {
            Complex64::from_polar(self.r_outer(theta)?, theta)
        } else {
            Complex64::from_polar(1.0, theta)
        };
        Ok(f_t(self.t, edge)?.arg())
    }

    /// `ds/dtheta` anywhere on the segment at angle `theta`: its boundary
    /// value at the outer radius.
    pub fn ds_dtheta_inside(&self, theta: f64) -> Result<f64> {
        ds_dtheta_boundary(self.r_outer(theta)?, theta)
    }

    /// `int w_t(theta) log(r_outer / r_inner) dtheta` over the extent.
    pub fn total_mass(&self) -> Result<f64> {
        let err = RefCell::new(None);
        let integrand = |theta: f64| match self
            .ray(theta)
            .and_then(|(ri, ro)| Ok(self.w_t(theta)? * (ro / ri).ln()))
        {
            Ok(v) => v,
            Err(e) => {
                err.borrow_mut().get_or_insert(e);
                f64::NAN
            }
        };
        let e = self.theta_extent;
        let res = integrate_adaptive(integrand, -e, e, 1e-9, 1e-9, 4000);
        if let Some(e) = err.into_inner() {
            return Err(e);
        }
        Ok(res?.value)
    }
}

pub fn w_t(t: f64, theta: f64) -> Result<f64> {
    SigmaDomain::new(t)?.w_t(theta)
}

pub fn w_t_via_derivative(t: f64, theta: f64) -> Result<f64> {
    SigmaDomain::new(t)?.w_t_via_derivative(theta)
}

pub fn mult_brown_density(t: f64, lambda: Complex64) -> Result<f64> {
    require_positive("t", t)?;
    if t_lambda(lambda) >= t {
        return Ok(0.0);
    }
    SigmaDomain::new(t)?.mult_density(lambda)
}

pub fn phi_t(t: f64, lambda: Complex64) -> Result<Complex64> {
    SigmaDomain::new(t)?.phi(lambda)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum DensityKind {
    Circular { t: f64 },
    Multiplicative { t: f64 },
}

/// A Brown-measure density with its total mass computed once on demand.
#[derive(Debug)]
pub struct DensitySpec {
    pub kind: DensityKind,
    domain: Option<SigmaDomain>,
    mass: OnceLock<f64>,
}

impl DensitySpec {
    pub fn circular(t: f64) -> Result<Self> {
        require_positive("t", t)?;
        Ok(Self {
            kind: DensityKind::Circular { t },
            domain: None,
            mass: OnceLock::new(),
        })
    }

    pub fn multiplicative(t: f64) -> Result<Self> {
        Ok(Self {
            kind: DensityKind::Multiplicative { t },
            domain: Some(SigmaDomain::new(t)?),
            mass: OnceLock::new(),
        })
    }

    pub fn t(&self) -> f64 {
        match self.kind {
            DensityKind::Circular { t } | DensityKind::Multiplicative { t } => t,
        }
    }

    /// The multiplicative case's domain.
    pub fn domain(&self) -> Option<&SigmaDomain> {
        self.domain.as_ref()
    }

    pub fn eval(&self, lambda: Complex64) -> Result<f64> {
        match (&self.kind, &self.domain) {
            (DensityKind::Circular { t }, _) => circular_brown_density(*t, lambda),
            (DensityKind::Multiplicative { .. }, Some(d)) => d.mult_density(lambda),
            (DensityKind::Multiplicative { t }, None) => mult_brown_density(*t, lambda),
        }
    }

    pub fn total_mass(&self) -> Result<f64> {
        if let Some(m) = self.mass.get() {
            return Ok(*m);
        }
        let m = integrate_density(self)?;
        Ok(*self.mass.get_or_init(|| m))
    }
}

/// Total mass of the density. The circular case integrates the radial
/// profile numerically; the multiplicative case integrates
/// `w_t(theta) log(r_outer/r_inner)` over the angular extent, the radial
/// integral of `r^-2 r dr` being exact.
pub fn integrate_density(spec: &DensitySpec) -> Result<f64> {
    match (&spec.kind, &spec.domain) {
        (DensityKind::Circular { t }, _) => {
            let t = *t;
            let radial = |r: f64| 2.0 * PI * r / (PI * t);
            Ok(integrate_adaptive(radial, 0.0, t.sqrt(), 1e-13, 1e-13, 100)?.value)
        }
        (DensityKind::Multiplicative { .. }, Some(d)) => d.total_mass(),
        (DensityKind::Multiplicative { t }, None) => SigmaDomain::new(*t)?.total_mass(),
    }
}

/// The Brown measure pushed through `Phi_t` to angles on the unit circle,
/// binned on `[-pi, pi]`.
#[derive(Clone, Debug, Serialize)]
pub struct PushforwardHistogram {
    pub t: f64,
    pub edges: Vec<f64>,
    pub masses: Vec<f64>,
    /// Largest `|arg Phi_t|` over the sampled segments.
    pub max_abs_angle: f64,
    /// Largest `||Phi_t| - 1|` over the sampled segments.
    pub max_modulus_defect: f64,
}

/// Transports the mass of each radial segment (midpoint rule over
/// `segments` angular cells) to `arg Phi_t` of that segment.
pub fn biane_pushforward_histogram(t: f64, segments: usize, bins: usize) -> Result<PushforwardHistogram> {
    if segments == 0 || bins == 0 {
        return Err(Error::Bins("segments and bins must be positive".into()));
    }
    let dom = SigmaDomain::new(t)?;
    let e = dom.theta_extent;
    let dth = 2.0 * e / segments as f64;
    let edges: Vec<f64> = (0..=bins).map(|k| -PI + 2.0 * PI * k as f64 / bins as f64).collect();
    let mut masses = vec![0.0; bins];
    let mut max_abs_angle: f64 = 0.0;
    let mut max_modulus_defect: f64 = 0.0;
    for j in 0..segments {
        let theta = -e + (j as f64 + 0.5) * dth;
        let (ri, ro) = dom.ray(theta)?;
        let mass = dom.w_t(theta)? * (ro / ri).ln() * dth;
        let image = f_t(t, Complex64::from_polar(ro, theta))?;
        max_modulus_defect = max_modulus_defect.max((image.norm() - 1.0).abs());
        let ang = normalize_angle(image.arg());
        max_abs_angle = max_abs_angle.max(ang.abs());
        let k = (((ang + PI) / (2.0 * PI)) * bins as f64).floor() as usize;
        masses[k.min(bins - 1)] += mass;
    }
    if dom.topology == Topology::SimplyConnected {
        // The domain's tips sit on the unit circle and map to the ends of the
        // support.
        let tip = f_t(t, Complex64::from_polar(1.0, e))?;
        max_abs_angle = max_abs_angle.max(tip.arg().abs());
    }
    Ok(PushforwardHistogram {
        t,
        edges,
        masses,
        max_abs_angle,
        max_modulus_defect,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::brown_analytic::biane_support;

    #[test]
    fn two_forms_of_w_agree() {
        for t in [1.0, 2.0, 3.9, 4.1, 7.0] {
            let d = SigmaDomain::new(t).unwrap();
            let e = d.theta_extent;
            for k in 0..9 {
                let theta = -0.95 * e + 1.9 * e * k as f64 / 8.0;
                let a = d.w_t(theta).unwrap();
                let b = d.w_t_via_derivative(theta).unwrap();
                assert!(a > 0.0);
                assert!(((a - b) / a).abs() < 1e-4, "t = {t}, theta = {theta}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn w_even_and_outside_rejected() {
        let d = SigmaDomain::new(2.0).unwrap();
        assert!((d.w_t(0.7).unwrap() - d.w_t(-0.7).unwrap()).abs() < 1e-13);
        assert!(d.w_t(3.0).is_err());
        let r = d.r_outer(0.0).unwrap();
        assert!((d.w_t(0.0).unwrap() - omega(r, 0.0).unwrap() / (2.0 * PI * 2.0)).abs() < 1e-15);
    }

    #[test]
    fn density_radial_form() {
        let d = SigmaDomain::new(1.0).unwrap();
        let (ri, ro) = d.ray(0.2).unwrap();
        let (r1, r2) = (0.7 * ri + 0.3 * ro, 0.2 * ri + 0.8 * ro);
        let w1 = d.mult_density(Complex64::from_polar(r1, 0.2)).unwrap();
        let w2 = d.mult_density(Complex64::from_polar(r2, 0.2)).unwrap();
        assert!((w1 / w2 - (r2 / r1).powi(2)).abs() < 1e-12);
        assert_eq!(d.mult_density(Complex64::new(-1.0, 0.0)).unwrap(), 0.0);
        assert_eq!(mult_brown_density(1.0, Complex64::new(0.0, 0.0)).unwrap(), 0.0);
    }

    #[test]
    fn boundary_maps_to_circle() {
        for t in [1.0, 4.1] {
            let d = SigmaDomain::new(t).unwrap();
            for theta in [0.0, 0.3, -0.5] {
                let (ri, ro) = d.ray(theta).unwrap();
                let fo = f_t(t, Complex64::from_polar(ro, theta)).unwrap();
                let fi = f_t(t, Complex64::from_polar(ri, theta)).unwrap();
                assert!((fo.norm() - 1.0).abs() < 1e-8);
                assert!((fo - fi).norm() < 1e-6);
            }
        }
        let p = phi_t(1.0, Complex64::new(1.1, 0.0)).unwrap();
        assert!(p.arg().abs() < 1e-12);
        assert!(phi_t(1.0, Complex64::new(-1.0, 0.0)).is_err());
    }

    #[test]
    fn phi_conjugation() {
        let d = SigmaDomain::new(2.0).unwrap();
        let z = Complex64::new(0.9, 0.4);
        assert!((d.phi(z.conj()).unwrap() - d.phi(z).unwrap().conj()).norm() < 1e-12);
    }

    #[test]
    fn masses_are_one() {
        assert!((integrate_density(&DensitySpec::circular(1.0).unwrap()).unwrap() - 1.0).abs() < 1e-12);
        for t in [1.0, 7.0] {
            let spec = DensitySpec::multiplicative(t).unwrap();
            let m = spec.total_mass().unwrap();
            assert!((m - 1.0).abs() < 1e-3, "t = {t}: {m}");
            assert_eq!(spec.total_mass().unwrap(), m);
        }
    }

    #[test]
    fn pushforward_inside_biane_support() {
        for t in [1.0, 2.0, 4.1] {
            let h = biane_pushforward_histogram(t, 400, 64).unwrap();
            let bound = biane_support(t).unwrap().theta_max;
            assert!(h.max_abs_angle <= bound + 1e-3, "t = {t}");
            assert!(h.max_modulus_defect < 1e-8);
            let total: f64 = h.masses.iter().sum();
            assert!((total - 1.0).abs() < 1e-2);
        }
        let h = biane_pushforward_histogram(1.0, 400, 64).unwrap();
        assert!((h.max_abs_angle - biane_support(1.0).unwrap().theta_max).abs() < 1e-3);
    }
}
