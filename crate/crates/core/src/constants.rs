//! SI constants, the spin-flip rate prefactor, thermal occupation and
//! transition presets.
//!
//! Everything in the crate is strict SI: metres, seconds, kelvin, hertz,
//! siemens per metre. Angular frequencies are always named `omega`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Physical constants (CODATA 2018, SI).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Constants {
    /// Vacuum permeability, H/m.
    pub mu0: f64,
    /// Vacuum permittivity, F/m.
    pub eps0: f64,
    /// Reduced Planck constant, J s.
    pub hbar: f64,
    /// Planck constant, J s.
    pub h: f64,
    /// Boltzmann constant, J/K.
    pub kb: f64,
    /// Speed of light, m/s.
    pub c: f64,
    /// Bohr magneton, J/T.
    pub mu_b: f64,
    /// Electron g-factor, fixed to 2.
    pub g_s: f64,
}

impl Constants {
    pub const SI: Constants = Constants {
        mu0: 1.256_637_062_12e-6,
        eps0: 8.854_187_812_8e-12,
        hbar: 1.054_571_817e-34,
        h: 6.626_070_15e-34,
        kb: 1.380_649e-23,
        c: 299_792_458.0,
        mu_b: 9.274_010_078_3e-24,
        g_s: 2.0,
    };

    /// `mu0 (mu_B g_S)^2 / (8 hbar)`, in m^3/s.
    pub fn rate_prefactor(&self) -> f64 {
        let m = self.mu_b * self.g_s;
        self.mu0 * m * m / (8.0 * self.hbar)
    }
}

impl Default for Constants {
    fn default() -> Self {
        Constants::SI
    }
}

/// Prefactor of the multilayer spin-flip rate integrals, `mu0 (mu_B g_S)^2 / (8 hbar)`.
pub fn rate_prefactor() -> f64 {
    Constants::SI.rate_prefactor()
}

/// Mean thermal photon number `1 / (exp(h f / k_B T) - 1)`.
///
/// `T = 0` gives exactly zero. The denominator is evaluated with `expm1` so
/// the Rayleigh-Jeans regime `h f << k_B T` keeps full relative precision.
pub fn thermal_photon_number(frequency: f64, temperature: f64) -> Result<f64> {
    if !(frequency > 0.0 && frequency.is_finite()) {
        return Err(Error::domain(format!(
            "frequency must be positive, got {frequency}"
        )));
    }
    if !(temperature >= 0.0 && temperature.is_finite()) {
        return Err(Error::domain(format!(
            "temperature must be >= 0, got {temperature}"
        )));
    }
    if temperature == 0.0 {
        return Ok(0.0);
    }
    let c = Constants::SI;
    let x = c.h * frequency / (c.kb * temperature);
    Ok(1.0 / x.exp_m1())
}

/// How the spin couples to the field fluctuations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpinCoupling {
    /// The Rb-87 `|2,2> -> |2,1>` matrix elements already folded into the
    /// isotropic-stack rate formula.
    Rb87Preset,
    /// Explicit `<f|S_j|i>` for `j = x, y, z`, in units of hbar.
    MatrixElements([Complex64; 3]),
}

impl SpinCoupling {
    /// Weight of the in-plane (`rr`) and out-of-plane (`zz`) components of the
    /// double-curl tensor in the general contraction.
    ///
    /// For explicit matrix elements the tensor is diagonal at the atom's
    /// position with `xx = yy = rr`, so the in-plane weight is
    /// `|S_x|^2 + |S_y|^2` and the out-of-plane weight `|S_z|^2`.
    ///
    /// The preset weights are equal and chosen so that the full contraction
    /// reproduces the isotropic-stack rate in the near-field limit:
    /// `16 w * 3 / (8 pi) = 1 / (8 pi^2)`, hence `w = 1 / (48 pi)`.
    pub fn component_weights(&self) -> (f64, f64) {
        match self {
            SpinCoupling::Rb87Preset => {
                let w = 1.0 / (48.0 * PI);
                (w, w)
            }
            SpinCoupling::MatrixElements(m) => (m[0].norm_sqr() + m[1].norm_sqr(), m[2].norm_sqr()),
        }
    }
}

/// An atomic transition driven by the magnetic field noise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransitionSpec {
    /// Transition frequency, Hz.
    pub frequency: f64,
    #[serde(default)]
    pub label: String,
    #[serde(default = "default_coupling")]
    pub coupling: SpinCoupling,
}

fn default_coupling() -> SpinCoupling {
    SpinCoupling::Rb87Preset
}

impl TransitionSpec {
    /// Rb-87 ground-state `|2,2> -> |2,1>` at 560 kHz.
    pub fn rb87() -> Self {
        TransitionSpec {
            frequency: 560e3,
            label: "Rb87 |2,2> -> |2,1>".into(),
            coupling: SpinCoupling::Rb87Preset,
        }
    }

    pub fn with_frequency(mut self, frequency: f64) -> Self {
        self.frequency = frequency;
        self
    }

    pub fn angular_frequency(&self) -> f64 {
        2.0 * PI * self.frequency
    }

    /// Free-space wavelength, m.
    pub fn wavelength(&self) -> f64 {
        Constants::SI.c / self.frequency
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.frequency > 0.0 && self.frequency.is_finite()) {
            return Err(Error::domain(format!(
                "transition frequency must be positive, got {}",
                self.frequency
            )));
        }
        Ok(())
    }
}

impl Default for TransitionSpec {
    fn default() -> Self {
        TransitionSpec::rb87()
    }
}
