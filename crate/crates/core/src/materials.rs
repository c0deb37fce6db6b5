//! Relative permittivities of the layer materials.
//!
//! Superconductors follow the two-fluid model: a lossless superfluid with
//! penetration depth `lambda(T)` and a normal fluid with conductivity
//! `sigma_n(T)`, giving
//!
//! ```text
//! eps = 1 - 1 / (k lambda)^2 + 2 i / (k delta)^2,    k = omega / c,
//! ```
//!
//! where `delta = sqrt(2 / (omega mu0 sigma_n))` is the normal-fluid skin depth.
//! Normal metals keep only the loss term. Permittivities are relative
//! (dimensionless) everywhere in the crate.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::constants::Constants;
use crate::error::{Error, Result};

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!(
            "{name} must be positive and finite, got {v}"
        )))
    }
}

/// Penetration depth `lambda0 [1 - (T/Tc)^alpha]^{-1/2}`.
///
/// Undefined at and above `Tc`; callers switch to the normal-state model there.
pub fn lambda_of_t(lambda0: f64, temperature: f64, tc: f64, alpha: f64) -> Result<f64> {
    positive("lambda0", lambda0)?;
    positive("Tc", tc)?;
    positive("alpha", alpha)?;
    if !(temperature >= 0.0) {
        return Err(Error::domain(format!(
            "temperature must be >= 0, got {temperature}"
        )));
    }
    if temperature >= tc {
        return Err(Error::domain(format!(
            "penetration depth undefined for T = {temperature} K >= Tc = {tc} K"
        )));
    }
    let superfluid = 1.0 - (temperature / tc).powf(alpha);
    Ok(lambda0 / superfluid.sqrt())
}

/// Normal-fluid conductivity `sigma (T/Tc)^alpha` below `Tc`, `sigma` above.
pub fn sigma_n_of_t(sigma_normal: f64, temperature: f64, tc: f64, alpha: f64) -> Result<f64> {
    positive("sigma_normal", sigma_normal)?;
    positive("Tc", tc)?;
    positive("alpha", alpha)?;
    if !(temperature >= 0.0) {
        return Err(Error::domain(format!(
            "temperature must be >= 0, got {temperature}"
        )));
    }
    if temperature >= tc {
        return Ok(sigma_normal);
    }
    Ok(sigma_normal * (temperature / tc).powf(alpha))
}

/// Skin depth `sqrt(2 / (omega mu0 sigma))`.
pub fn skin_depth(omega: f64, sigma: f64) -> Result<f64> {
    positive("omega", omega)?;
    positive("sigma", sigma)?;
    Ok((2.0 / (omega * Constants::SI.mu0 * sigma)).sqrt())
}

/// Loss term `2 i / (k delta)^2 = i sigma / (eps0 omega)` of a conductor.
fn conduction_term(omega: f64, sigma: f64) -> f64 {
    if sigma == 0.0 {
        0.0
    } else {
        sigma / (Constants::SI.eps0 * omega)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DrudeMetalParams {
    /// DC conductivity, S/m.
    pub sigma: f64,
}

impl DrudeMetalParams {
    pub fn validate(&self) -> Result<()> {
        positive("sigma", self.sigma)
    }

    pub fn permittivity(&self, omega: f64) -> Result<Complex64> {
        self.validate()?;
        positive("omega", omega)?;
        Ok(Complex64::new(0.0, conduction_term(omega, self.sigma)))
    }
}

/// Two-fluid superconductor parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TwoFluidParams {
    /// Zero-temperature penetration depth, m.
    pub lambda0: f64,
    /// Transition temperature, K.
    pub tc: f64,
    /// Normal-state conductivity just above `Tc`, S/m.
    pub sigma_normal: f64,
    /// Exponent of the temperature law: 4 for s-wave, 1 for d-wave.
    pub alpha: f64,
}

impl TwoFluidParams {
    pub fn validate(&self) -> Result<()> {
        positive("lambda0", self.lambda0)?;
        positive("Tc", self.tc)?;
        positive("sigma_normal", self.sigma_normal)?;
        positive("alpha", self.alpha)
    }

    /// Scalar permittivity at `omega`, `T`. At and above `Tc` this is the
    /// Drude value of `sigma_normal`.
    pub fn permittivity(&self, omega: f64, temperature: f64) -> Result<Complex64> {
        self.validate()?;
        positive("omega", omega)?;
        if !(temperature >= 0.0) {
            return Err(Error::domain(format!(
                "temperature must be >= 0, got {temperature}"
            )));
        }
        if temperature >= self.tc {
            return DrudeMetalParams {
                sigma: self.sigma_normal,
            }
            .permittivity(omega);
        }
        let k = omega / Constants::SI.c;
        let lambda = lambda_of_t(self.lambda0, temperature, self.tc, self.alpha)?;
        let sigma_n = sigma_n_of_t(self.sigma_normal, temperature, self.tc, self.alpha)?;
        let re = 1.0 - 1.0 / (k * k * lambda * lambda);
        Ok(Complex64::new(re, conduction_term(omega, sigma_n)))
    }

    /// Complex optical conductivity `2/(omega mu0 delta^2) + i/(omega mu0 lambda^2)`, S/m.
    pub fn optical_conductivity(&self, omega: f64, temperature: f64) -> Result<Complex64> {
        self.validate()?;
        positive("omega", omega)?;
        let mu0 = Constants::SI.mu0;
        let sigma_n = sigma_n_of_t(self.sigma_normal, temperature, self.tc, self.alpha)?;
        let re = if sigma_n > 0.0 {
            let delta = skin_depth(omega, sigma_n)?;
            2.0 / (omega * mu0 * delta * delta)
        } else {
            0.0
        };
        let im = if temperature < self.tc {
            let lambda = lambda_of_t(self.lambda0, temperature, self.tc, self.alpha)?;
            1.0 / (omega * mu0 * lambda * lambda)
        } else {
            0.0
        };
        Ok(Complex64::new(re, im))
    }
}

/// Uniaxial (layered) superconductor: in-plane parameters govern `eps_t`,
/// out-of-plane parameters govern `eps_z`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UniaxialParams {
    pub transverse: TwoFluidParams,
    pub longitudinal: TwoFluidParams,
}

impl UniaxialParams {
    pub fn validate(&self) -> Result<()> {
        self.transverse.validate()?;
        self.longitudinal.validate()?;
        if self.transverse.tc != self.longitudinal.tc {
            return Err(Error::domain(format!(
                "uniaxial parameter sets must share Tc ({} K vs {} K)",
                self.transverse.tc, self.longitudinal.tc
            )));
        }
        Ok(())
    }
}

/// Diagonal permittivity `eps_t (xx + yy) + eps_z zz`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PermittivityTensor {
    pub eps_t: Complex64,
    pub eps_z: Complex64,
}

impl PermittivityTensor {
    pub fn isotropic(eps: Complex64) -> Self {
        PermittivityTensor {
            eps_t: eps,
            eps_z: eps,
        }
    }

    pub fn is_isotropic(&self) -> bool {
        self.eps_t == self.eps_z
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case")]
pub enum MaterialVariant {
    Vacuum,
    DrudeMetal(DrudeMetalParams),
    IsotropicSc(TwoFluidParams),
    UniaxialSc(UniaxialParams),
}

/// Conduction regime of a material at a given temperature.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    Vacuum,
    Normal,
    Superconducting,
}

/// Metadata attached to presets. Only used for validity notes, never in a
/// computation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ValidityMeta {
    /// First critical field, T.
    pub first_critical_field: f64,
    /// Temperature at which the critical field is quoted, K.
    pub critical_field_temperature: f64,
    /// Gap frequency, Hz.
    pub gap_frequency: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaterialModel {
    pub label: String,
    #[serde(flatten)]
    pub variant: MaterialVariant,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub validity: Option<ValidityMeta>,
}

impl MaterialModel {
    pub fn new(label: impl Into<String>, variant: MaterialVariant) -> Self {
        MaterialModel {
            label: label.into(),
            variant,
            validity: None,
        }
    }

    pub fn vacuum() -> Self {
        MaterialModel::new("vacuum", MaterialVariant::Vacuum)
    }

    pub fn drude(label: impl Into<String>, sigma: f64) -> Self {
        MaterialModel::new(
            label,
            MaterialVariant::DrudeMetal(DrudeMetalParams { sigma }),
        )
    }

    pub fn validate(&self) -> Result<()> {
        match &self.variant {
            MaterialVariant::Vacuum => Ok(()),
            MaterialVariant::DrudeMetal(p) => p.validate(),
            MaterialVariant::IsotropicSc(p) => p.validate(),
            MaterialVariant::UniaxialSc(p) => p.validate(),
        }
    }

    pub fn permittivity(&self, omega: f64, temperature: f64) -> Result<PermittivityTensor> {
        positive("omega", omega)?;
        if !(temperature >= 0.0 && temperature.is_finite()) {
            return Err(Error::domain(format!(
                "temperature must be >= 0, got {temperature}"
            )));
        }
        Ok(match &self.variant {
            MaterialVariant::Vacuum => PermittivityTensor::isotropic(Complex64::new(1.0, 0.0)),
            MaterialVariant::DrudeMetal(p) => PermittivityTensor::isotropic(p.permittivity(omega)?),
            MaterialVariant::IsotropicSc(p) => {
                PermittivityTensor::isotropic(p.permittivity(omega, temperature)?)
            }
            MaterialVariant::UniaxialSc(p) => {
                p.validate()?;
                PermittivityTensor {
                    eps_t: p.transverse.permittivity(omega, temperature)?,
                    eps_z: p.longitudinal.permittivity(omega, temperature)?,
                }
            }
        })
    }

    /// Transition temperature, if the material is a superconductor.
    pub fn tc(&self) -> Option<f64> {
        match &self.variant {
            MaterialVariant::IsotropicSc(p) => Some(p.tc),
            MaterialVariant::UniaxialSc(p) => Some(p.transverse.tc),
            _ => None,
        }
    }

    pub fn regime(&self, temperature: f64) -> Regime {
        match (&self.variant, self.tc()) {
            (MaterialVariant::Vacuum, _) => Regime::Vacuum,
            (_, Some(tc)) if temperature < tc => Regime::Superconducting,
            _ => Regime::Normal,
        }
    }

    pub fn is_uniaxial(&self) -> bool {
        matches!(self.variant, MaterialVariant::UniaxialSc(_))
    }

    /// Normal-state stand-in used above `Tc`: a Drude metal with the
    /// normal-state conductivity (in-plane and out-of-plane kept separate for
    /// uniaxial films).
    pub fn normal_state(&self) -> MaterialModel {
        let variant = match &self.variant {
            MaterialVariant::IsotropicSc(p) => MaterialVariant::DrudeMetal(DrudeMetalParams {
                sigma: p.sigma_normal,
            }),
            other => other.clone(),
        };
        MaterialModel {
            label: self.label.clone(),
            variant,
            validity: self.validity.clone(),
        }
    }
}

impl MaterialModel {
    /// Copy with the normal-state conductivity replaced. Uniaxial films keep
    /// their out-of-plane to in-plane ratio; vacuum is returned unchanged.
    pub fn with_sigma_normal(&self, sigma: f64) -> MaterialModel {
        let mut m = self.clone();
        match &mut m.variant {
            MaterialVariant::Vacuum => {}
            MaterialVariant::DrudeMetal(p) => p.sigma = sigma,
            MaterialVariant::IsotropicSc(p) => p.sigma_normal = sigma,
            MaterialVariant::UniaxialSc(p) => {
                let ratio = p.longitudinal.sigma_normal / p.transverse.sigma_normal;
                p.transverse.sigma_normal = sigma;
                p.longitudinal.sigma_normal = sigma * ratio;
            }
        }
        m
    }

    /// In-plane normal-state conductivity, if any.
    pub fn sigma_normal(&self) -> Option<f64> {
        match &self.variant {
            MaterialVariant::Vacuum => None,
            MaterialVariant::DrudeMetal(p) => Some(p.sigma),
            MaterialVariant::IsotropicSc(p) => Some(p.sigma_normal),
            MaterialVariant::UniaxialSc(p) => Some(p.transverse.sigma_normal),
        }
    }
}

/// Copper conductivity, S/m.
pub const COPPER_SIGMA: f64 = 5.8e7;
/// Niobium thin-film normal-state conductivity, S/m.
pub const NIOBIUM_SIGMA_NORMAL: f64 = 1.0e7;
/// BSCCO in-plane normal-state conductivity, S/m.
pub const BSCCO_SIGMA_PARALLEL: f64 = 5.0e5;
/// Out-of-plane to in-plane conductivity ratio used for BSCCO.
pub const BSCCO_SIGMA_ANISOTROPY: f64 = 1.0e-3;

pub fn niobium() -> MaterialModel {
    MaterialModel {
        label: "niobium".into(),
        variant: MaterialVariant::IsotropicSc(TwoFluidParams {
            lambda0: 35e-9,
            tc: 8.3,
            sigma_normal: NIOBIUM_SIGMA_NORMAL,
            alpha: 4.0,
        }),
        validity: Some(ValidityMeta {
            first_critical_field: 0.140,
            critical_field_temperature: 4.2,
            gap_frequency: 700e9,
        }),
    }
}

pub fn bscco() -> MaterialModel {
    let transverse = TwoFluidParams {
        lambda0: 300e-9,
        tc: 90.0,
        sigma_normal: BSCCO_SIGMA_PARALLEL,
        alpha: 1.0,
    };
    let longitudinal = TwoFluidParams {
        lambda0: 100e-6,
        sigma_normal: BSCCO_SIGMA_PARALLEL * BSCCO_SIGMA_ANISOTROPY,
        ..transverse
    };
    MaterialModel {
        label: "bscco".into(),
        variant: MaterialVariant::UniaxialSc(UniaxialParams {
            transverse,
            longitudinal,
        }),
        validity: Some(ValidityMeta {
            first_critical_field: 0.013,
            critical_field_temperature: 4.2,
            gap_frequency: 7.5e12,
        }),
    }
}

pub fn copper() -> MaterialModel {
    MaterialModel::drude("copper", COPPER_SIGMA)
}

/// Built-in materials: niobium film, BSCCO, copper, vacuum.
pub fn material_presets() -> Vec<MaterialModel> {
    vec![niobium(), bscco(), copper(), MaterialModel::vacuum()]
}

/// Look up a preset by label (case-insensitive).
pub fn preset(name: &str) -> Result<MaterialModel> {
    material_presets()
        .into_iter()
        .find(|m| m.label.eq_ignore_ascii_case(name))
        .ok_or_else(|| Error::UnknownMaterial(name.to_string()))
}
