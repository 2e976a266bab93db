//! Named runs with pinned parameters, one per plot.

use clap::ValueEnum;
use serde_json::json;

use crate::commands::density::{multiplicative_rows, MULT_COLUMNS};
use crate::config::{CheckName, CommandName, DensityName, Ensemble, RunConfig};
use crate::error::CliError;
use crate::output::Output;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Preset {
    /// GUE eigenvalues, n = 2000.
    FigGuehist,
    /// Ginibre eigenvalues, n = 2000.
    FigGinibre,
    /// GL(n) Brownian motion eigenvalues at t = 0.1.
    FigT01,
    FigT2,
    FigT39,
    FigT4,
    FigT41,
    /// Nilpotent Jordan block plus 1e-5 Ginibre noise.
    FigPerturb1,
    /// `w_t` tables at t = 2, 3.5, 4 and 7.
    FigWtplots,
    /// Profile of `Sigma_1` and `w_1`.
    FigW3d,
    /// Log-eigenvalue horizontal uniformity at t = 4.1.
    FigEvalsandlogs,
    /// GL eigenvalues pushed to the circle against Biane's support at t = 2.
    FigBianeevals,
}

pub const WTPLOT_TIMES: [f64; 4] = [2.0, 3.5, 4.0, 7.0];

impl Preset {
    pub fn name(self) -> String {
        self.to_possible_value().expect("no skipped variants").get_name().to_owned()
    }

    /// The pinned part of the run config.
    pub fn config(self) -> RunConfig {
        let base = RunConfig {
            preset: Some(self.name()),
            n: Some(2000),
            ..RunConfig::empty()
        };
        let sample = |ensemble, t: Option<f64>| RunConfig {
            command: Some(CommandName::Sample),
            ensemble: Some(ensemble),
            t,
            ..base.clone()
        };
        match self {
            Preset::FigGuehist => sample(Ensemble::Gue, None),
            Preset::FigGinibre => sample(Ensemble::Ginibre, None),
            Preset::FigT01 => sample(Ensemble::GlBm, Some(0.1)),
            Preset::FigT2 => sample(Ensemble::GlBm, Some(2.0)),
            Preset::FigT39 => sample(Ensemble::GlBm, Some(3.9)),
            Preset::FigT4 => sample(Ensemble::GlBm, Some(4.0)),
            Preset::FigT41 => sample(Ensemble::GlBm, Some(4.1)),
            Preset::FigPerturb1 => RunConfig {
                epsilon: Some(1e-5),
                ..sample(Ensemble::NilpotentDemo, None)
            },
            Preset::FigWtplots => RunConfig {
                command: Some(CommandName::Density),
                density: Some(DensityName::Multiplicative),
                n: None,
                ..base
            },
            Preset::FigW3d => RunConfig {
                command: Some(CommandName::Density),
                density: Some(DensityName::Multiplicative),
                t: Some(1.0),
                n: None,
                ..base
            },
            Preset::FigEvalsandlogs => RunConfig {
                command: Some(CommandName::Compare),
                check: Some(CheckName::Horizontal),
                t: Some(4.1),
                ..base
            },
            Preset::FigBianeevals => RunConfig {
                command: Some(CommandName::Compare),
                check: Some(CheckName::Multiplicative),
                t: Some(2.0),
                ..base
            },
        }
    }
}

/// The four-time `w_t` table, one block of rows per time.
pub fn wtplots(cfg: &mut RunConfig) -> Result<Output, CliError> {
    let res = RunConfig::get_or(&mut cfg.theta_resolution, 256);
    let mut out = Output::new(&MULT_COLUMNS);
    let mut masses = Vec::new();
    for t in WTPLOT_TIMES {
        masses.push(json!({ "t": t, "total_mass": multiplicative_rows(&mut out, t, res)? }));
    }
    out.field("total_mass", json!(masses));
    Ok(out)
}
