//! The domain `Sigma_t = {T < t}` in polar form.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use super::t_on_ray;
use crate::error::{require_positive, Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Topology {
    SimplyConnected,
    DoublyConnected,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ProfileRow {
    pub theta: f64,
    pub r_inner: f64,
    pub r_outer: f64,
}

/// `Sigma_t` for one `t`: its topology, angular extent and (optionally) a
/// tabulated radial profile. Ray roots requested away from the table are
/// solved directly.
#[derive(Clone, Debug, Serialize)]
pub struct SigmaDomain {
    pub t: f64,
    pub topology: Topology,
    /// Largest `|theta|` reached by `Sigma_t`; `pi` when `t >= 4`.
    pub theta_extent: f64,
    pub profile: Vec<ProfileRow>,
    #[serde(skip)]
    grid: Vec<f64>,
}

/// Grid spacing in `log r` for the sign-change scan.
const LOG_STEP: f64 = 0.025;

impl SigmaDomain {
    /// Topology and extent only, with an empty profile table.
    pub fn new(t: f64) -> Result<Self> {
        require_positive("t", t)?;
        // T grows like 2 log r along every ray, and T(r) = T(1/r).
        let log_max = (1e3f64).ln().max(0.5 * t + 3.0);
        let half = (log_max / LOG_STEP).ceil() as i64;
        let grid = (-half..=half).map(|k| (k as f64 * LOG_STEP).exp()).collect();
        let mut dom = Self {
            t,
            topology: if t > 4.0 {
                Topology::DoublyConnected
            } else {
                Topology::SimplyConnected
            },
            theta_extent: PI,
            profile: Vec::new(),
            grid,
        };
        if t < 4.0 {
            dom.theta_extent = dom.find_extent();
        }
        Ok(dom)
    }

    fn g(&self, r: f64, theta: f64) -> f64 {
        t_on_ray(r, theta) - self.t
    }

    /// `min_r T(r e^{i theta}) - t`: grid minimum refined by golden section
    /// in `log r`.
    pub fn ray_min_gap(&self, theta: f64) -> f64 {
        let (k, _) = self
            .grid
            .iter()
            .enumerate()
            .map(|(k, &r)| (k, self.g(r, theta)))
            .fold((0, f64::INFINITY), |best, cur| if cur.1 < best.1 { cur } else { best });
        let lo_k = k.saturating_sub(1);
        let hi_k = (k + 1).min(self.grid.len() - 1);
        let (mut a, mut b) = (self.grid[lo_k].ln(), self.grid[hi_k].ln());
        let phi = 0.5 * (5f64.sqrt() - 1.0);
        let f = |s: f64| self.g(s.exp(), theta);
        let mut c = b - phi * (b - a);
        let mut d = a + phi * (b - a);
        let (mut fc, mut fd) = (f(c), f(d));
        for _ in 0..80 {
            if fc < fd {
                b = d;
                d = c;
                fd = fc;
                c = b - phi * (b - a);
                fc = f(c);
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + phi * (b - a);
                fd = f(d);
            }
        }
        fc.min(fd).min(self.g(self.grid[k], theta))
    }

    fn find_extent(&self) -> f64 {
        // The gap is negative at theta = 0 (T(1) = 0) and 4 - t > 0 at pi.
        let (mut lo, mut hi) = (0.0, PI);
        while hi - lo > 1e-15 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.ray_min_gap(mid) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo
    }

    /// Whether the ray at angle `theta` meets `Sigma_t`.
    pub fn ray_hits(&self, theta: f64) -> bool {
        let th = normalize_angle(theta);
        match self.topology {
            Topology::DoublyConnected => true,
            Topology::SimplyConnected => th.abs() < self.theta_extent,
        }
    }

    /// Inner and outer radii where the ray at `theta` crosses `T = t`.
    pub fn ray(&self, theta: f64) -> Result<(f64, f64)> {
        let th = normalize_angle(theta);
        let outside = || Error::Domain {
            what: "theta",
            detail: format!("ray at theta = {theta} misses Sigma_{}", self.t),
        };
        if !self.ray_hits(th) {
            return Err(outside());
        }
        let vals: Vec<f64> = self.grid.iter().map(|&r| self.g(r, th)).collect();
        let down = (1..vals.len()).find(|&k| vals[k - 1] >= 0.0 && vals[k] < 0.0);
        let up = (1..vals.len()).rev().find(|&k| vals[k - 1] < 0.0 && vals[k] >= 0.0);
        match (down, up) {
            (Some(i), Some(o)) => Ok((
                self.bisect(th, self.grid[i - 1], self.grid[i]),
                self.bisect(th, self.grid[o - 1], self.grid[o]),
            )),
            // Within rounding of the extent the segment has collapsed onto
            // the unit circle.
            _ if self.theta_extent - th.abs() < 1e-9 => Ok((1.0, 1.0)),
            _ => Err(outside()),
        }
    }

    pub fn r_outer(&self, theta: f64) -> Result<f64> {
        self.ray(theta).map(|(_, o)| o)
    }

    pub fn r_inner(&self, theta: f64) -> Result<f64> {
        self.ray(theta).map(|(i, _)| i)
    }

    /// Bisection to the last representable bracket; `g` changes sign on
    /// `[lo, hi]`.
    fn bisect(&self, theta: f64, mut lo: f64, mut hi: f64) -> f64 {
        let g_lo_neg = self.g(lo, theta) < 0.0;
        loop {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi || hi - lo <= 1e-15 * hi {
                return mid;
            }
            if (self.g(mid, theta) < 0.0) == g_lo_neg {
                lo = mid;
            } else {
                hi = mid;
            }
        }
    }

    /// Linear interpolation in the profile table; `None` outside its span.
    pub fn interpolate(&self, theta: f64) -> Option<(f64, f64)> {
        let th = normalize_angle(theta);
        let p = &self.profile;
        let k = p.partition_point(|row| row.theta < th);
        if k == 0 || k == p.len() {
            return p.iter().find(|row| row.theta == th).map(|row| (row.r_inner, row.r_outer));
        }
        let (a, b) = (p[k - 1], p[k]);
        let s = (th - a.theta) / (b.theta - a.theta);
        Some((
            a.r_inner + s * (b.r_inner - a.r_inner),
            a.r_outer + s * (b.r_outer - a.r_outer),
        ))
    }

    /// Tabulation angles: the closed circle when every ray hits, otherwise
    /// cell midpoints of the open extent.
    fn table_angles(&self, resolution: usize) -> Vec<f64> {
        match self.topology {
            Topology::DoublyConnected => (0..=resolution)
                .map(|j| -PI + 2.0 * PI * j as f64 / resolution as f64)
                .collect(),
            Topology::SimplyConnected => {
                let e = self.theta_extent;
                (0..resolution)
                    .map(|j| -e + (j as f64 + 0.5) * 2.0 * e / resolution as f64)
                    .collect()
            }
        }
    }
}

/// Angle in `(-pi, pi]`.
pub(crate) fn normalize_angle(theta: f64) -> f64 {
    let mut th = theta % (2.0 * PI);
    if th > PI {
        th -= 2.0 * PI;
    } else if th <= -PI {
        th += 2.0 * PI;
    }
    th
}

/// Builds `Sigma_t` with a radial profile tabulated at `theta_resolution`
/// angles.
pub fn build_sigma_domain(t: f64, theta_resolution: usize) -> Result<SigmaDomain> {
    if theta_resolution < 16 {
        return Err(Error::InvalidParameter {
            name: "theta_resolution",
            value: theta_resolution as f64,
            reason: "must be at least 16",
        });
    }
    let mut dom = SigmaDomain::new(t)?;
    let angles = dom.table_angles(theta_resolution);
    let profile = angles
        .par_iter()
        .map(|&theta| {
            // The table keeps the unnormalized endpoint -pi.
            dom.ray(theta).map(|(r_inner, r_outer)| ProfileRow {
                theta,
                r_inner,
                r_outer,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    dom.profile = profile;
    Ok(dom)
}
