//! Eigenvalue point clouds.

use brownflow::ensembles::{
    nilpotent_plus_noise, sample_gl_bm, sample_gue, sample_scaled_ginibre, sample_unitary_bm, BmKind, BmPathSpec,
};
use brownflow::spectra::eigenvalues;
use brownflow::{ComplexMatrix, RngHandle};
use num_complex::Complex64;

use crate::config::{Ensemble, RunConfig};
use crate::error::CliError;
use crate::output::Output;

pub(crate) fn default_steps(t: f64) -> usize {
    BmPathSpec::with_default_steps(BmKind::GeneralLinear, 1, t).steps
}

/// Pooled eigenvalues of `samples` independent draws; draw `j` uses
/// sub-stream `j` of `rng`.
pub fn point_cloud(cfg: &mut RunConfig, rng: RngHandle) -> Result<Vec<Complex64>, CliError> {
    let ensemble = RunConfig::get_or(&mut cfg.ensemble, Ensemble::Gue);
    let n = RunConfig::get_or(&mut cfg.n, 1000);
    let samples = RunConfig::get_or(&mut cfg.samples, 1);
    let draw: Box<dyn Fn(RngHandle) -> Result<ComplexMatrix, CliError>> = match ensemble {
        Ensemble::Gue => Box::new(move |r| Ok(sample_gue(n, r)?)),
        Ensemble::Ginibre => {
            let t = RunConfig::get_or(&mut cfg.t, 1.0);
            Box::new(move |r| Ok(sample_scaled_ginibre(n, t, r)?))
        }
        Ensemble::UnitaryBm | Ensemble::GlBm => {
            let t = RunConfig::get_or(&mut cfg.t, 1.0);
            let k = RunConfig::get_or(&mut cfg.k, default_steps(t));
            if ensemble == Ensemble::UnitaryBm {
                let spec = BmPathSpec::new(BmKind::Unitary, n, t, k);
                Box::new(move |r| Ok(sample_unitary_bm(&spec, r)?))
            } else {
                let spec = BmPathSpec::new(BmKind::GeneralLinear, n, t, k);
                Box::new(move |r| {
                    let s = sample_gl_bm(&spec, r)?;
                    if s.resample_warning {
                        eprintln!("warning: GL sample looks singular at working precision; consider another seed");
                    }
                    Ok(s.matrix)
                })
            }
        }
        Ensemble::NilpotentDemo => {
            let eps = RunConfig::get_or(&mut cfg.epsilon, 1e-5);
            Box::new(move |r| Ok(nilpotent_plus_noise(n, eps, r)?))
        }
    };
    let mut pts = Vec::new();
    for j in 0..samples as u64 {
        pts.extend(eigenvalues(&draw(rng.sample(j))?)?.eigenvalues);
    }
    Ok(pts)
}

pub fn run(cfg: &mut RunConfig) -> Result<Output, CliError> {
    let pts = point_cloud(cfg, RngHandle::new(cfg.seed(), 0))?;
    let mut out = Output::new(&["re", "im"]);
    for z in pts {
        out.push(vec![z.re.into(), z.im.into()]);
    }
    Ok(out)
}
