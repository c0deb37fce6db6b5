//! Canonical figure runs shipped with the crate.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;
use serde::Deserialize;

use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::quadrature::QuadratureSettings;
use crate::sweep::SweepTable;
use crate::table::write_csv_file;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Figure {
    /// Lifetime versus atom height.
    Fig2,
    /// Screening factor versus film thickness.
    Fig3,
    /// Lifetime versus temperature.
    Fig4,
    /// Lifetime across the transition versus `T/Tc`.
    Fig5,
}

impl Figure {
    pub const ALL: [Figure; 4] = [Figure::Fig2, Figure::Fig3, Figure::Fig4, Figure::Fig5];

    pub fn name(self) -> &'static str {
        match self {
            Figure::Fig2 => "fig2",
            Figure::Fig3 => "fig3",
            Figure::Fig4 => "fig4",
            Figure::Fig5 => "fig5",
        }
    }

    fn source(self) -> &'static str {
        match self {
            Figure::Fig2 => include_str!("../figures/fig2.json"),
            Figure::Fig3 => include_str!("../figures/fig3.json"),
            Figure::Fig4 => include_str!("../figures/fig4.json"),
            Figure::Fig5 => include_str!("../figures/fig5.json"),
        }
    }

    pub fn definition(self) -> Result<FigureDefinition> {
        let def: FigureDefinition = serde_json::from_str(self.source())
            .map_err(|e| Error::Config(format!("{}: {e}", self.name())))?;
        for c in &def.curves {
            c.config.validate()?;
            if c.config.sweep.is_none() {
                return Err(Error::Config(format!(
                    "{}/{} has no sweep",
                    self.name(),
                    c.name
                )));
            }
        }
        Ok(def)
    }
}

impl FromStr for Figure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Figure::ALL
            .into_iter()
            .find(|f| f.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| {
                Error::Config(format!(
                    "unknown figure {s:?}; expected fig2, fig3, fig4 or fig5"
                ))
            })
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FigureDefinition {
    pub figure: String,
    pub title: String,
    pub curves: Vec<Curve>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Curve {
    pub name: String,
    pub config: RunConfig,
}

/// Run every curve of `fig`, optionally overriding the quadrature settings.
pub fn run_figure(
    fig: Figure,
    quadrature: Option<QuadratureSettings>,
) -> Result<Vec<(String, SweepTable)>> {
    let def = fig.definition()?;
    def.curves
        .par_iter()
        .map(|c| {
            let mut cfg = c.config.clone();
            if let Some(q) = quadrature {
                cfg.quadrature = q;
            }
            let mut table = cfg.run_sweep()?;
            table
                .metadata
                .insert(0, ("curve".into(), format!("{}/{}", def.figure, c.name)));
            Ok((c.name.clone(), table))
        })
        .collect()
}

/// Write one CSV per curve of `fig` into `out_dir` as `<fig>_<curve>.csv`.
pub fn reproduce(
    fig: Figure,
    out_dir: &Path,
    quadrature: Option<QuadratureSettings>,
) -> Result<Vec<PathBuf>> {
    run_figure(fig, quadrature)?
        .into_iter()
        .map(|(name, table)| {
            let path = out_dir.join(format!("{}_{}.csv", fig.name(), name));
            write_csv_file(&table, &path)?;
            Ok(path)
        })
        .collect()
}
