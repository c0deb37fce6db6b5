//! Thermally induced magnetic near-field noise and atomic spin-flip lifetimes
//! above planar vacuum / superconductor / metal stacks.
//!
//! The crate is organised bottom-up:
//!
//! - [`constants`]: SI constants, the rate prefactor, Planck occupation and
//!   transition presets.
//! - [`materials`]: vacuum, Drude metal and two-fluid (isotropic or uniaxial)
//!   superconductor permittivities.
//! - [`stratified`]: z-wavenumbers, Fresnel and generalized reflection
//!   coefficients and the film scattering coefficients.
//! - [`quadrature`]: adaptive Gauss-Kronrod integration over `[0, ∞)` for
//!   exponentially decaying integrands.
//! - [`rates`]: isotropic, anisotropic and orientation-resolved spin-flip rates.
//! - [`sweep`], [`config`], [`table`], [`figures`], [`fit`]: parameter sweeps,
//!   the screening factor, JSON run configuration, CSV output and the canonical
//!   figure runs.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod config;
pub mod constants;
mod error;
pub mod figures;
pub mod fit;
pub mod materials;
pub mod quadrature;
pub mod rates;
pub mod stratified;
pub mod sweep;
pub mod table;

pub use num_complex::Complex64;

pub use crate::constants::{
    rate_prefactor, thermal_photon_number, Constants, SpinCoupling, TransitionSpec,
};
pub use crate::error::{Error, Result};
pub use crate::materials::{
    material_presets, preset, DrudeMetalParams, MaterialModel, MaterialVariant, PermittivityTensor,
    Regime, TwoFluidParams, UniaxialParams,
};
pub use crate::quadrature::{
    integrate_semi_infinite, integrate_semi_infinite_from, QuadratureDiagnostics,
    QuadratureSettings,
};
pub use crate::rates::{
    gamma, gamma_anisotropic, gamma_general, gamma_isotropic, RatePath, RateResult, SpinOrientation,
};
pub use crate::stratified::{Layer, LayerStack, LayerWavevectors, ScatteringCoefficients};
pub use crate::sweep::{
    run_sweep, screening_factor, RowStatus, RunSetup, Spacing, SweepAxis, SweepRange, SweepRow,
    SweepSpec, SweepTable,
};

/// Version string echoed into CSV metadata.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
