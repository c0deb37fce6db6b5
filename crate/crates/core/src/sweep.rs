//! Parameter sweeps and the screening factor.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::constants::TransitionSpec;
use crate::error::{Error, Result};
use crate::materials::Regime;
use crate::quadrature::QuadratureSettings;
use crate::rates::{gamma, RatePath, RateResult};
use crate::stratified::LayerStack;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    DistanceZ,
    ThicknessD,
    #[serde(rename = "temperature_T")]
    TemperatureT,
    #[serde(rename = "reduced_T_over_Tc")]
    ReducedTOverTc,
}

impl SweepAxis {
    /// Unit-annotated CSV column name.
    pub fn column(self) -> &'static str {
        match self {
            SweepAxis::DistanceZ => "z_m",
            SweepAxis::ThicknessD => "d_m",
            SweepAxis::TemperatureT => "T_K",
            SweepAxis::ReducedTOverTc => "T_over_Tc",
        }
    }

    pub fn from_column(name: &str) -> Option<Self> {
        [
            SweepAxis::DistanceZ,
            SweepAxis::ThicknessD,
            SweepAxis::TemperatureT,
            SweepAxis::ReducedTOverTc,
        ]
        .into_iter()
        .find(|a| a.column() == name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Spacing {
    #[default]
    Linear,
    Log,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepRange {
    pub min: f64,
    pub max: f64,
    pub points: usize,
    #[serde(default)]
    pub spacing: Spacing,
}

impl SweepRange {
    pub fn validate(&self) -> Result<()> {
        if !(self.min.is_finite() && self.max.is_finite() && self.min < self.max) {
            return Err(Error::Config(format!(
                "sweep range needs min < max, got [{}, {}]",
                self.min, self.max
            )));
        }
        if self.points < 2 {
            return Err(Error::Config(format!(
                "sweep needs at least 2 points, got {}",
                self.points
            )));
        }
        if self.spacing == Spacing::Log && self.min <= 0.0 {
            return Err(Error::Config("log spacing requires min > 0".into()));
        }
        Ok(())
    }

    /// Grid values; the endpoints are exactly `min` and `max`.
    pub fn values(&self) -> Vec<f64> {
        let n = self.points;
        let last = (n - 1) as f64;
        (0..n)
            .map(|i| {
                if i == 0 {
                    return self.min;
                }
                if i == n - 1 {
                    return self.max;
                }
                let t = i as f64 / last;
                match self.spacing {
                    Spacing::Linear => self.min + t * (self.max - self.min),
                    Spacing::Log => (self.min.ln() + t * (self.max.ln() - self.min.ln())).exp(),
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub axis: SweepAxis,
    #[serde(flatten)]
    pub range: SweepRange,
}

impl SweepSpec {
    pub fn new(axis: SweepAxis, min: f64, max: f64, points: usize, spacing: Spacing) -> Self {
        SweepSpec {
            axis,
            range: SweepRange {
                min,
                max,
                points,
                spacing,
            },
        }
    }
}

/// Everything a single rate evaluation needs; the sweep varies one field.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSetup {
    pub stack: LayerStack,
    /// Atom height above the top interface, m.
    pub z: f64,
    pub transition: TransitionSpec,
    pub path: RatePath,
    pub settings: QuadratureSettings,
}

impl RunSetup {
    pub fn new(stack: LayerStack, z: f64) -> Self {
        RunSetup {
            stack,
            z,
            transition: TransitionSpec::rb87(),
            path: RatePath::Auto,
            settings: QuadratureSettings::default(),
        }
    }

    pub fn rate(&self) -> Result<RateResult> {
        gamma(
            &self.stack,
            self.z,
            &self.transition,
            self.path,
            &self.settings,
        )
    }

    /// Transition temperature of the film (or of the substrate for a bare stack).
    pub fn film_tc(&self) -> Option<f64> {
        self.stack
            .film()
            .map_or_else(|| self.stack.substrate().tc(), |l| l.material.tc())
    }

    fn regime(&self) -> Regime {
        let t = self.stack.temperature;
        match self.stack.film() {
            Some(l) => l.material.regime(t),
            None => self.stack.substrate().regime(t),
        }
    }

    fn at(&self, axis: SweepAxis, x: f64) -> Result<RunSetup> {
        let mut s = self.clone();
        match axis {
            SweepAxis::DistanceZ => s.z = x,
            SweepAxis::ThicknessD => s.stack = self.stack.with_film_thickness(x)?,
            SweepAxis::TemperatureT => s.stack = self.stack.with_temperature(x)?,
            SweepAxis::ReducedTOverTc => {
                let tc = self.film_tc().ok_or_else(|| {
                    Error::Config("reduced temperature sweep needs a superconducting film".into())
                })?;
                s.stack = self.stack.with_temperature(x * tc)?;
            }
        }
        Ok(s)
    }
}

/// `S(d) = (tau(d) - tau(0)) / tau(0)` with `tau(0)` the same stack at zero
/// film thickness, evaluated with the same rate formula.
pub fn screening_factor(
    stack_with_d: &LayerStack,
    z: f64,
    transition: &TransitionSpec,
    path: RatePath,
    settings: &QuadratureSettings,
) -> Result<f64> {
    let tau_d = gamma(stack_with_d, z, transition, path, settings)?.tau;
    let bare = stack_with_d.with_film_thickness(0.0)?;
    let tau_0 = gamma(
        &bare,
        z,
        transition,
        path.resolve(stack_with_d, transition),
        settings,
    )?
    .tau;
    Ok((tau_d - tau_0) / tau_0)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum RowStatus {
    Ok,
    Error(String),
}

impl RowStatus {
    pub fn is_ok(&self) -> bool {
        matches!(self, RowStatus::Ok)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub x: f64,
    pub gamma_field: f64,
    pub n_th: f64,
    pub gamma_total: f64,
    pub tau: f64,
    /// Present for thickness sweeps only.
    pub screening: Option<f64>,
    /// `superconducting`, `normal` or `vacuum`.
    pub regime: String,
    pub status: RowStatus,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub axis: SweepAxis,
    pub rows: Vec<SweepRow>,
    /// Input echo, written as `#` comment lines.
    pub metadata: Vec<(String, String)>,
}

impl SweepTable {
    pub fn has_screening(&self) -> bool {
        self.axis == SweepAxis::ThicknessD
    }

    pub fn column(&self, f: impl Fn(&SweepRow) -> f64) -> Vec<f64> {
        self.rows.iter().map(f).collect()
    }
}

fn regime_name(r: Regime) -> &'static str {
    match r {
        Regime::Vacuum => "vacuum",
        Regime::Normal => "normal",
        Regime::Superconducting => "superconducting",
    }
}

fn evaluate_row(setup: &RunSetup, axis: SweepAxis, x: f64, tau_0: Option<f64>) -> SweepRow {
    let point = setup.at(axis, x);
    let regime = point
        .as_ref()
        .map_or("n/a", |p| regime_name(p.regime()))
        .to_string();
    match point.and_then(|p| p.rate()) {
        Ok(r) => SweepRow {
            x,
            gamma_field: r.gamma_field,
            n_th: r.n_th,
            gamma_total: r.gamma_total,
            tau: r.tau,
            screening: tau_0.map(|t0| (r.tau - t0) / t0),
            regime,
            status: RowStatus::Ok,
        },
        Err(e) => SweepRow {
            x,
            gamma_field: f64::NAN,
            n_th: f64::NAN,
            gamma_total: f64::NAN,
            tau: f64::NAN,
            screening: tau_0.map(|_| f64::NAN),
            regime,
            status: RowStatus::Error(e.to_string()),
        },
    }
}

/// Evaluate every grid point. Rows are independent and computed in parallel;
/// a failing row is recorded in its status and the sweep continues.
pub fn run_sweep(spec: &SweepSpec, setup: &RunSetup) -> Result<SweepTable> {
    spec.range.validate()?;
    setup.stack.validate()?;
    let mut setup = setup.clone();
    // fix the formula once so that every row (and tau(0)) uses the same one
    setup.path = setup.path.resolve(&setup.stack, &setup.transition);

    let tau_0 = if spec.axis == SweepAxis::ThicknessD {
        Some(setup.at(SweepAxis::ThicknessD, 0.0)?.rate()?.tau)
    } else {
        None
    };
    let grid = spec.range.values();
    let rows: Vec<SweepRow> = grid
        .par_iter()
        .map(|&x| evaluate_row(&setup, spec.axis, x, tau_0))
        .collect();
    if rows.iter().all(|r| !r.status.is_ok()) {
        let RowStatus::Error(first) = &rows[0].status else {
            unreachable!()
        };
        return Err(Error::Config(format!(
            "every sweep row failed; first error: {first}"
        )));
    }

    let metadata = vec![
        ("axis".into(), spec.axis.column().into()),
        ("range".into(), format!("{:?}", spec.range)),
        ("atom_height_m".into(), format!("{:e}", setup.z)),
        (
            "temperature_K".into(),
            format!("{:e}", setup.stack.temperature),
        ),
        (
            "film_thickness_m".into(),
            format!("{:e}", setup.stack.film_thickness()),
        ),
        (
            "layers".into(),
            setup
                .stack
                .layers()
                .iter()
                .map(|l| l.material.label.as_str())
                .collect::<Vec<_>>()
                .join(" / "),
        ),
        ("rate_path".into(), format!("{:?}", setup.path)),
        (
            "transition".into(),
            format!(
                "{} Hz ({})",
                setup.transition.frequency, setup.transition.label
            ),
        ),
        ("quadrature".into(), format!("{:?}", setup.settings)),
    ];
    Ok(SweepTable {
        axis: spec.axis,
        rows,
        metadata,
    })
}
