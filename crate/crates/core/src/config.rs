//! JSON run configuration.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::constants::TransitionSpec;
use crate::error::{Error, Result};
use crate::materials::{self, MaterialModel};
use crate::quadrature::QuadratureSettings;
use crate::rates::{RatePath, SpinOrientation};
use crate::stratified::{Layer, LayerStack};
use crate::sweep::{run_sweep, RunSetup, SweepSpec, SweepTable};

/// Printed next to configuration errors.
pub const SCHEMA_HELP: &str = r#"Run configuration (JSON object):
  stack         array of 1 or 2 layers below the vacuum half-space, top first.
                Each entry is {"material": <label>, "thickness": <m>}; the last
                entry is the substrate and takes no thickness.
  atom_height   atom-to-surface distance z, m (> 0)
  temperature   equilibrium temperature T, K (>= 0)
  materials     optional array of material definitions; a label that matches a
                preset replaces it. Fields: "label", "variant" (one of
                "vacuum", "drude_metal", "isotropic_sc", "uniaxial_sc") and
                the variant parameters:
                  drude_metal:  "sigma" (S/m)
                  isotropic_sc: "lambda0" (m), "tc" (K), "sigma_normal" (S/m), "alpha"
                  uniaxial_sc:  "transverse" and "longitudinal", each an
                                isotropic_sc parameter object with equal "tc"
                optional "validity": {"first_critical_field" (T),
                "critical_field_temperature" (K), "gap_frequency" (Hz)}
  transition    optional {"frequency": <Hz>, "label": <text>, "coupling":
                "rb87_preset" | {"matrix_elements": [[re, im], [re, im], [re, im]]}}
                default: Rb87 |2,2> -> |2,1> at 560 kHz
  rate_path     optional "auto" (default), "isotropic", "anisotropic" or "general"
  orientation   optional "random" (default), "parallel" or "perpendicular";
                used by the general path
  quadrature    optional {"rel_tol", "abs_floor", "max_refinements", "tail_threshold"}
  sweep         optional {"axis": "distance_z" | "thickness_d" | "temperature_T" |
                "reduced_T_over_Tc", "min", "max", "points", "spacing": "linear" | "log"}
  output        optional CSV path for sweep results
Presets: vacuum, copper, niobium, bscco."#;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PathChoice {
    #[default]
    Auto,
    Isotropic,
    Anisotropic,
    General,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LayerConfig {
    pub material: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub thickness: Option<f64>,
}

impl LayerConfig {
    pub fn new(material: &str, thickness: Option<f64>) -> Self {
        LayerConfig {
            material: material.to_string(),
            thickness,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub materials: Vec<MaterialModel>,
    pub stack: Vec<LayerConfig>,
    pub atom_height: f64,
    pub temperature: f64,
    #[serde(default)]
    pub transition: TransitionSpec,
    #[serde(default)]
    pub rate_path: PathChoice,
    #[serde(default)]
    pub orientation: SpinOrientation,
    #[serde(default)]
    pub quadrature: QuadratureSettings,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

impl RunConfig {
    /// Vacuum / film / substrate with preset or inline materials.
    pub fn film_on_substrate(
        film: &str,
        d: f64,
        substrate: &str,
        z: f64,
        temperature: f64,
    ) -> Self {
        RunConfig {
            materials: Vec::new(),
            stack: vec![
                LayerConfig::new(film, Some(d)),
                LayerConfig::new(substrate, None),
            ],
            atom_height: z,
            temperature,
            transition: TransitionSpec::rb87(),
            rate_path: PathChoice::Auto,
            orientation: SpinOrientation::Random,
            quadrature: QuadratureSettings::default(),
            sweep: None,
            output: None,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: RunConfig =
            serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        RunConfig::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("configuration is always serializable")
    }

    /// Look up a material by label: inline definitions first, then presets.
    pub fn material(&self, label: &str) -> Result<MaterialModel> {
        if let Some(m) = self
            .materials
            .iter()
            .find(|m| m.label.eq_ignore_ascii_case(label))
        {
            return Ok(m.clone());
        }
        materials::preset(label)
    }

    pub fn path(&self) -> RatePath {
        match self.rate_path {
            PathChoice::Auto => RatePath::Auto,
            PathChoice::Isotropic => RatePath::Isotropic,
            PathChoice::Anisotropic => RatePath::Anisotropic,
            PathChoice::General => RatePath::General(self.orientation),
        }
    }

    pub fn stack(&self) -> Result<LayerStack> {
        let (substrate, films) = self
            .stack
            .split_last()
            .ok_or_else(|| Error::Config("stack needs at least a substrate".into()))?;
        if films.len() > 1 {
            return Err(Error::Config(format!(
                "at most one film over the substrate is supported, got {}",
                films.len()
            )));
        }
        if substrate.thickness.is_some() {
            return Err(Error::Config(
                "the substrate (last stack entry) takes no thickness".into(),
            ));
        }
        let mut layers = vec![Layer::half_space(MaterialModel::vacuum())];
        for f in films {
            let d = f
                .thickness
                .ok_or_else(|| Error::Config(format!("film {:?} needs a thickness", f.material)))?;
            layers.push(Layer::film(self.material(&f.material)?, d));
        }
        layers.push(Layer::half_space(self.material(&substrate.material)?));
        LayerStack::new(layers, self.temperature).map_err(|e| Error::Config(e.to_string()))
    }

    /// Check everything that can be checked without computing a rate.
    pub fn validate(&self) -> Result<()> {
        let as_config = |e: Error| match e {
            Error::Config(_) | Error::UnknownMaterial(_) => e,
            other => Error::Config(other.to_string()),
        };
        for m in &self.materials {
            if m.label.trim().is_empty() {
                return Err(Error::Config("material definitions need a label".into()));
            }
            m.validate().map_err(as_config)?;
        }
        self.stack()?;
        if !(self.atom_height > 0.0 && self.atom_height.is_finite()) {
            return Err(Error::Config(format!(
                "atom_height must be positive, got {}",
                self.atom_height
            )));
        }
        self.transition.validate().map_err(as_config)?;
        self.quadrature.validate()?;
        if let Some(s) = &self.sweep {
            s.range.validate()?;
        }
        Ok(())
    }

    pub fn setup(&self) -> Result<RunSetup> {
        self.validate()?;
        Ok(RunSetup {
            stack: self.stack()?,
            z: self.atom_height,
            transition: self.transition.clone(),
            path: self.path(),
            settings: self.quadrature,
        })
    }

    /// Run the configured sweep, echoing this configuration into the metadata.
    pub fn run_sweep(&self) -> Result<SweepTable> {
        let spec = self
            .sweep
            .ok_or_else(|| Error::Config("configuration has no \"sweep\" section".into()))?;
        let mut table = run_sweep(&spec, &self.setup()?)?;
        table.metadata.push(("config".into(), self.to_json()));
        Ok(table)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::materials::MaterialVariant;
    use crate::sweep::SweepAxis;

    const FULL: &str = r#"{
        "materials": [
            {"label": "dirty_nb", "variant": "isotropic_sc",
             "lambda0": 5e-8, "tc": 8.3, "sigma_normal": 2e6, "alpha": 4},
            {"label": "copper", "variant": "drude_metal", "sigma": 3e7}
        ],
        "stack": [{"material": "dirty_nb", "thickness": 1e-6}, {"material": "copper"}],
        "atom_height": 1e-5,
        "temperature": 4.2,
        "rate_path": "general",
        "orientation": "parallel",
        "quadrature": {"rel_tol": 1e-6},
        "sweep": {"axis": "temperature_T", "min": 1, "max": 10, "points": 4, "spacing": "log"},
        "output": "out.csv"
    }"#;

    #[test]
    fn parses_full_config() {
        let cfg = RunConfig::from_json(FULL).unwrap();
        let stack = cfg.stack().unwrap();
        assert_eq!(stack.film().unwrap().material.label, "dirty_nb");
        // inline definition overrides the copper preset
        assert_eq!(
            stack.substrate().variant,
            MaterialVariant::DrudeMetal(crate::DrudeMetalParams { sigma: 3e7 })
        );
        assert_eq!(cfg.path(), RatePath::General(SpinOrientation::Parallel));
        assert_eq!(cfg.quadrature.rel_tol, 1e-6);
        assert_eq!(
            cfg.quadrature.max_refinements,
            QuadratureSettings::default().max_refinements
        );
        assert_eq!(cfg.sweep.unwrap().axis, SweepAxis::TemperatureT);
        assert_eq!(cfg.transition, TransitionSpec::rb87());
    }

    #[test]
    fn json_round_trip() {
        let cfg = RunConfig::from_json(FULL).unwrap();
        assert_eq!(RunConfig::from_json(&cfg.to_json()).unwrap(), cfg);
    }

    #[test]
    fn rejects_bad_configs() {
        let cases = [
            // unknown top-level key
            r#"{"stack": [{"material": "copper"}], "atom_height": 1e-5, "temperature": 4.2, "extra": 1}"#,
            // missing atom height
            r#"{"stack": [{"material": "copper"}], "temperature": 4.2}"#,
            // unknown material
            r#"{"stack": [{"material": "unobtainium"}], "atom_height": 1e-5, "temperature": 4.2}"#,
            // film without thickness
            r#"{"stack": [{"material": "niobium"}, {"material": "copper"}], "atom_height": 1e-5, "temperature": 4.2}"#,
            // substrate with thickness
            r#"{"stack": [{"material": "copper", "thickness": 1e-6}], "atom_height": 1e-5, "temperature": 4.2}"#,
            // negative values
            r#"{"stack": [{"material": "copper"}], "atom_height": -1e-5, "temperature": 4.2}"#,
            r#"{"stack": [{"material": "copper"}], "atom_height": 1e-5, "temperature": -1}"#,
            // bad material parameter
            r#"{"materials": [{"label": "x", "variant": "drude_metal", "sigma": -1}],
                "stack": [{"material": "x"}], "atom_height": 1e-5, "temperature": 4.2}"#,
            // unknown material parameter
            r#"{"materials": [{"label": "x", "variant": "drude_metal", "sigma": 1, "mu": 2}],
                "stack": [{"material": "x"}], "atom_height": 1e-5, "temperature": 4.2}"#,
            // degenerate sweep
            r#"{"stack": [{"material": "copper"}], "atom_height": 1e-5, "temperature": 4.2,
                "sweep": {"axis": "distance_z", "min": 1, "max": 1, "points": 3}}"#,
            r#"{"stack": [], "atom_height": 1e-5, "temperature": 4.2}"#,
        ];
        for c in cases {
            let err = RunConfig::from_json(c).expect_err(c);
            assert!(
                matches!(err, Error::Config(_) | Error::UnknownMaterial(_)),
                "{c}: {err:?}"
            );
        }
    }

    #[test]
    fn sweep_echoes_config() {
        let mut cfg = RunConfig::film_on_substrate("niobium", 1e-6, "copper", 1e-5, 4.2);
        cfg.sweep = Some(SweepSpec::new(
            SweepAxis::DistanceZ,
            1e-5,
            2e-5,
            2,
            crate::Spacing::Linear,
        ));
        let table = cfg.run_sweep().unwrap();
        let echo = &table
            .metadata
            .iter()
            .find(|(k, _)| k == "config")
            .unwrap()
            .1;
        assert_eq!(&RunConfig::from_json(echo).unwrap(), &cfg);
    }

    #[test]
    fn matrix_element_coupling_parses() {
        let text = r#"{"stack": [{"material": "copper"}], "atom_height": 1e-5, "temperature": 4.2,
            "transition": {"frequency": 1e6, "coupling": {"matrix_elements": [[0.5, 0], [0, 0.5], [0, 0]]}}}"#;
        let cfg = RunConfig::from_json(text).unwrap();
        assert_eq!(cfg.transition.coupling.component_weights(), (0.5, 0.0));
    }
}
