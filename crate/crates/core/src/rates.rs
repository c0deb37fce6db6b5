//! Spin-flip rates above a planar stack.
//!
//! Three routes to the same quantity:
//!
//! - [`gamma_isotropic`]: the TE-reflection formula for isotropic layers,
//!   `P ∫ K^2 dK/(2 pi)^2 · e^{-2Kz}/2 · Im r~_TE`;
//! - [`gamma_anisotropic`]: the scattering-coefficient formula that admits a
//!   uniaxial film, `P ∫ dη e^{-2ηz}/(8 pi) · Im[3η^2 B_M + k_1^2 B_N]`;
//! - [`gamma_general`]: the double-curl Green tensor contracted with spin
//!   matrix elements, resolved into in-plane and out-of-plane parts.
//!
//! `P` is [`rate_prefactor`]. Each field rate is multiplied by `n_th + 1`.
//!
//! The interface coefficients in [`crate::stratified`] are oriented as
//! `R = (h_{f+1} - h_f)/(h_{f+1} + h_f)`, the negative of the field
//! reflection amplitude, so the scattering-coefficient bracket is the negative
//! of the absorptive response; the anisotropic and general rates take `-Im` of
//! it. On isotropic stacks the two normalizations then differ by the constant
//! [`NEAR_FIELD_CALIBRATION`] `= 3 pi`, which is reported and never applied.
//!
//! Both quasi-static formulas integrate over the evanescent sector
//! `η > ω/c` only; the propagating sector is `O((ωz/c)^3)` of the total.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::constants::{rate_prefactor, thermal_photon_number, Constants, TransitionSpec};
use crate::error::{Error, Result};
use crate::quadrature::{integrate_semi_infinite_from, QuadratureDiagnostics, QuadratureSettings};
use crate::stratified::{decaying_sqrt, LayerStack, ScatteringCoefficients, StackOptics};

/// `Γ_anisotropic / Γ_isotropic` on isotropic stacks in the near field.
pub const NEAR_FIELD_CALIBRATION: f64 = 3.0 * PI;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateResult {
    /// Rate before the thermal factor, 1/s.
    pub gamma_field: f64,
    pub n_th: f64,
    /// `gamma_field (n_th + 1)`, 1/s.
    pub gamma_total: f64,
    /// `1 / gamma_total`, s.
    pub tau: f64,
    pub diagnostics: QuadratureDiagnostics,
    /// Validity notes (not errors).
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

impl RateResult {
    fn new(
        gamma_field: f64,
        frequency: f64,
        temperature: f64,
        diagnostics: QuadratureDiagnostics,
    ) -> Result<Self> {
        let n_th = thermal_photon_number(frequency, temperature)?;
        let gamma_total = gamma_field * (n_th + 1.0);
        Ok(RateResult {
            gamma_field,
            n_th,
            gamma_total,
            tau: 1.0 / gamma_total,
            diagnostics,
            warnings: Vec::new(),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpinOrientation {
    /// Sum of the parallel and perpendicular contributions.
    #[default]
    Random,
    /// Couples to the in-plane (`rr`) component.
    Parallel,
    /// Couples to the out-of-plane (`zz`) component.
    Perpendicular,
}

/// Which rate formula to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "path", content = "orientation")]
pub enum RatePath {
    /// Anisotropic formula when any layer is uniaxial, isotropic otherwise;
    /// explicit matrix elements select the general contraction.
    #[default]
    Auto,
    Isotropic,
    Anisotropic,
    General(SpinOrientation),
}

impl RatePath {
    pub fn resolve(self, stack: &LayerStack, transition: &TransitionSpec) -> RatePath {
        match self {
            RatePath::Auto => match transition.coupling {
                crate::constants::SpinCoupling::MatrixElements(_) => {
                    RatePath::General(SpinOrientation::Random)
                }
                _ if stack.has_uniaxial_layer() => RatePath::Anisotropic,
                _ => RatePath::Isotropic,
            },
            other => other,
        }
    }
}

fn check_inputs(z: f64, transition: &TransitionSpec) -> Result<()> {
    transition.validate()?;
    if !(z > 0.0 && z.is_finite()) {
        return Err(Error::domain(format!(
            "atom height must be positive, got {z}"
        )));
    }
    Ok(())
}

fn quasi_static_warnings(z: f64, transition: &TransitionSpec) -> Vec<String> {
    let wavelength = transition.wavelength();
    if z > wavelength / 100.0 {
        vec![format!(
            "atom height {z:e} m exceeds 1% of the transition wavelength {wavelength:e} m; \
             the quasi-static formulas lose accuracy"
        )]
    } else {
        Vec::new()
    }
}

/// Integrate over the evanescent sector `eta > k0`.
fn integrate_evanescent<F>(
    f: F,
    k0: f64,
    z: f64,
    settings: &QuadratureSettings,
) -> Result<(f64, QuadratureDiagnostics)>
where
    F: Fn(f64) -> Result<f64>,
{
    integrate_semi_infinite_from(f, k0, z, settings)
}

/// Isotropic-layer rate from the generalized TE reflection coefficient.
pub fn gamma_isotropic(
    stack: &LayerStack,
    z: f64,
    transition: &TransitionSpec,
    settings: &QuadratureSettings,
) -> Result<RateResult> {
    check_inputs(z, transition)?;
    let omega = transition.angular_frequency();
    let optics = StackOptics::new(stack, omega)?;
    if !optics.is_isotropic() {
        return Err(Error::Geometry(
            "isotropic rate requires eps_t = eps_z in every layer".into(),
        ));
    }
    let k0 = omega / Constants::SI.c;
    let measure = 1.0 / (4.0 * PI * PI);
    let integrand = |eta: f64| -> Result<f64> {
        let r = optics.r_te(eta)?;
        Ok(eta * eta * measure * (-2.0 * eta * z).exp() / 2.0 * r.im)
    };
    let (integral, diag) = integrate_evanescent(integrand, k0, z, settings)?;
    let mut result = RateResult::new(
        rate_prefactor() * integral,
        transition.frequency,
        stack.temperature,
        diag,
    )?;
    result.warnings = quasi_static_warnings(z, transition);
    Ok(result)
}

/// Near-field integrand `e^{-2ηz}/(8 pi) [3η^2 B~_M + k_1^2 B~_N]`.
pub fn near_field_integrand(
    coeffs: &ScatteringCoefficients,
    eta: f64,
    z: f64,
    k1: f64,
) -> Complex64 {
    (-2.0 * eta * z).exp() / (8.0 * PI) * (3.0 * eta * eta * coeffs.b_m + k1 * k1 * coeffs.b_n)
}

/// Rate from the film scattering coefficients; admits a uniaxial film.
pub fn gamma_anisotropic(
    stack: &LayerStack,
    z: f64,
    transition: &TransitionSpec,
    settings: &QuadratureSettings,
) -> Result<RateResult> {
    check_inputs(z, transition)?;
    let omega = transition.angular_frequency();
    let optics = StackOptics::new(stack, omega)?;
    let k0 = omega / Constants::SI.c;
    let integrand = |eta: f64| -> Result<f64> {
        let b = optics.scattering(eta)?;
        Ok(-near_field_integrand(&b, eta, z, k0).im)
    };
    let (integral, diag) = integrate_evanescent(integrand, k0, z, settings)?;
    let mut result = RateResult::new(
        rate_prefactor() * integral,
        transition.frequency,
        stack.temperature,
        diag,
    )?;
    result.warnings = quasi_static_warnings(z, transition);
    Ok(result)
}

/// In-plane (`rr`) and out-of-plane (`zz`) parts of the double-curl
/// scattering integrand.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurlComponents {
    pub rr: Complex64,
    pub zz: Complex64,
}

impl CurlComponents {
    pub fn total(&self) -> Complex64 {
        self.rr + self.zz
    }
}

/// Full-retardation double-curl integrand from given coefficients:
///
/// ```text
/// zz = i e^{2ihz}/(4 pi) · B~_M η^3/h
/// rr = i e^{2ihz}/(4 pi) · [-B~_M hη/2 + B~_N ηk^2/(2h)]
/// ```
///
/// with `h = sqrt(k^2 - η^2)` in the vacuum layer. `B~_N` already carries the
/// minus sign of the N family, which is why it enters with `+`.
pub fn curl_components(
    coeffs: &ScatteringCoefficients,
    eta: f64,
    z: f64,
    k: f64,
) -> Result<CurlComponents> {
    let h = decaying_sqrt(Complex64::new(k * k - eta * eta, 0.0));
    if h == Complex64::new(0.0, 0.0) {
        return Err(Error::GrazingSingularity { eta });
    }
    let pre = Complex64::i() * (Complex64::i() * 2.0 * h * z).exp() / (4.0 * PI);
    let zz = pre * coeffs.b_m * eta.powi(3) / h;
    let rr = pre * (-coeffs.b_m * h * eta / 2.0 + coeffs.b_n * eta * k * k / (2.0 * h));
    Ok(CurlComponents { rr, zz })
}

/// Double-curl scattering integrand for a stack at `eta`.
pub fn double_curl_integrand(
    stack: &LayerStack,
    eta: f64,
    z: f64,
    omega: f64,
) -> Result<Complex64> {
    if !(z > 0.0) {
        return Err(Error::domain(format!(
            "atom height must be positive, got {z}"
        )));
    }
    let coeffs = StackOptics::new(stack, omega)?.scattering(eta)?;
    Ok(curl_components(&coeffs, eta, z, omega / Constants::SI.c)?.total())
}

/// Rate from the double-curl tensor contracted with the spin matrix elements:
/// `2 mu0 (mu_B g_S)^2 / hbar · Σ w_c (-Im D_c)` over the components selected
/// by `orientation`.
pub fn gamma_general(
    stack: &LayerStack,
    z: f64,
    transition: &TransitionSpec,
    orientation: SpinOrientation,
    settings: &QuadratureSettings,
) -> Result<RateResult> {
    check_inputs(z, transition)?;
    let omega = transition.angular_frequency();
    let optics = StackOptics::new(stack, omega)?;
    let k0 = omega / Constants::SI.c;
    let (w_par, w_perp) = transition.coupling.component_weights();
    let (w_par, w_perp) = match orientation {
        SpinOrientation::Random => (w_par, w_perp),
        SpinOrientation::Parallel => (w_par, 0.0),
        SpinOrientation::Perpendicular => (0.0, w_perp),
    };
    let (integral, diag) = if w_par == 0.0 && w_perp == 0.0 {
        (0.0, QuadratureDiagnostics::default())
    } else {
        let integrand = |eta: f64| -> Result<f64> {
            let b = optics.scattering(eta)?;
            let d = curl_components(&b, eta, z, k0)?;
            Ok(-(w_par * d.rr.im + w_perp * d.zz.im))
        };
        integrate_evanescent(integrand, k0, z, settings)?
    };
    let mut result = RateResult::new(
        16.0 * rate_prefactor() * integral,
        transition.frequency,
        stack.temperature,
        diag,
    )?;
    result.warnings = quasi_static_warnings(z, transition);
    Ok(result)
}

/// Dispatch to the formula selected by `path`.
pub fn gamma(
    stack: &LayerStack,
    z: f64,
    transition: &TransitionSpec,
    path: RatePath,
    settings: &QuadratureSettings,
) -> Result<RateResult> {
    match path.resolve(stack, transition) {
        RatePath::Isotropic => gamma_isotropic(stack, z, transition, settings),
        RatePath::Anisotropic => gamma_anisotropic(stack, z, transition, settings),
        RatePath::General(o) => gamma_general(stack, z, transition, o, settings),
        RatePath::Auto => unreachable!("resolve never returns Auto"),
    }
}

/// Measured `Γ_anisotropic / Γ_isotropic` for an isotropic stack.
pub fn isotropic_calibration(
    stack: &LayerStack,
    z: f64,
    transition: &TransitionSpec,
    settings: &QuadratureSettings,
) -> Result<f64> {
    let iso = gamma_isotropic(stack, z, transition, settings)?;
    let ani = gamma_anisotropic(stack, z, transition, settings)?;
    Ok(ani.gamma_field / iso.gamma_field)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::materials::{self, MaterialModel, MaterialVariant, TwoFluidParams};
    use crate::stratified::Layer;
    use approx::assert_relative_eq;

    fn nb_on_cu(d: f64) -> LayerStack {
        LayerStack::film_on_substrate(materials::niobium(), d, materials::copper(), 4.2).unwrap()
    }

    #[test]
    fn lossless_stack_gives_zero() {
        let sc = MaterialModel::new(
            "sc",
            MaterialVariant::IsotropicSc(TwoFluidParams {
                lambda0: 5e-8,
                tc: 9.0,
                sigma_normal: 1e7,
                alpha: 4.0,
            }),
        );
        let stack = LayerStack::film_on_substrate(sc.clone(), 1e-7, sc, 0.0).unwrap();
        let s = QuadratureSettings::default();
        let t = TransitionSpec::rb87();
        assert_eq!(
            gamma_isotropic(&stack, 1e-5, &t, &s).unwrap().gamma_field,
            0.0
        );
        assert_eq!(
            gamma_anisotropic(&stack, 1e-5, &t, &s).unwrap().gamma_field,
            0.0
        );
        let r = gamma_general(&stack, 1e-5, &t, SpinOrientation::Random, &s).unwrap();
        assert_eq!(r.gamma_field, 0.0);
        assert!(r.tau.is_infinite());
    }

    #[test]
    fn thermal_factor_applied() {
        let s = QuadratureSettings::default();
        let r = gamma_isotropic(&nb_on_cu(1e-6), 1e-5, &TransitionSpec::rb87(), &s).unwrap();
        assert_relative_eq!(
            r.gamma_total / r.gamma_field,
            r.n_th + 1.0,
            max_relative = 1e-12
        );
        assert_relative_eq!(r.tau * r.gamma_total, 1.0, max_relative = 1e-12);
        assert!(r.warnings.is_empty());
    }

    #[test]
    fn isotropic_path_rejects_uniaxial_film() {
        let stack =
            LayerStack::film_on_substrate(materials::bscco(), 1e-6, materials::copper(), 4.2)
                .unwrap();
        assert!(
            gamma_isotropic(&stack, 1e-5, &TransitionSpec::rb87(), &Default::default()).is_err()
        );
        assert_eq!(
            RatePath::Auto.resolve(&stack, &TransitionSpec::rb87()),
            RatePath::Anisotropic
        );
    }

    #[test]
    fn calibration_is_three_pi() {
        let stack = nb_on_cu(1e-7);
        let ratio =
            isotropic_calibration(&stack, 1e-5, &TransitionSpec::rb87(), &Default::default())
                .unwrap();
        assert_relative_eq!(ratio, NEAR_FIELD_CALIBRATION, max_relative = 1e-6);
    }

    #[test]
    fn near_field_reduction() {
        let stack = nb_on_cu(1e-6);
        let t = TransitionSpec::rb87();
        let omega = t.angular_frequency();
        let k = omega / Constants::SI.c;
        let z = 1e-5;
        let optics = StackOptics::new(&stack, omega).unwrap();
        for (ratio, tol) in [(10.0, 1e-2), (100.0, 1e-4), (1000.0, 1e-6)] {
            let eta = ratio * k;
            let b = optics.scattering(eta).unwrap();
            let full = double_curl_integrand(&stack, eta, z, omega).unwrap();
            let near = near_field_integrand(&b, eta, z, k);
            let rel = (full - near).norm() / near.norm();
            assert!(rel < tol, "eta/k = {ratio}: {rel}");
            // error scales like (k/eta)^2
            assert!(rel > 0.1 / (ratio * ratio), "eta/k = {ratio}: {rel}");
        }
    }

    #[test]
    fn zero_coefficients_give_zero_integrand() {
        let zero = ScatteringCoefficients {
            b_m: Complex64::new(0.0, 0.0),
            b_n: Complex64::new(0.0, 0.0),
        };
        let c = curl_components(&zero, 1e5, 1e-5, 0.01).unwrap();
        assert_eq!(c.total(), Complex64::new(0.0, 0.0));
        assert!(matches!(
            curl_components(&zero, 0.01, 1e-5, 0.01),
            Err(Error::GrazingSingularity { .. })
        ));
    }

    #[test]
    fn orientation_split() {
        let s = QuadratureSettings::default();
        let t = TransitionSpec::rb87();
        let stack = nb_on_cu(1e-6);
        let par = gamma_general(&stack, 1e-5, &t, SpinOrientation::Parallel, &s).unwrap();
        let perp = gamma_general(&stack, 1e-5, &t, SpinOrientation::Perpendicular, &s).unwrap();
        let all = gamma_general(&stack, 1e-5, &t, SpinOrientation::Random, &s).unwrap();
        assert_relative_eq!(par.tau / perp.tau, 2.0, max_relative = 1e-6);
        assert_relative_eq!(
            par.gamma_field + perp.gamma_field,
            all.gamma_field,
            max_relative = 1e-8
        );
        let iso = gamma_isotropic(&stack, 1e-5, &t, &s).unwrap();
        assert_relative_eq!(all.gamma_field, iso.gamma_field, max_relative = 1e-6);
    }

    #[test]
    fn zero_matrix_elements_give_zero_rate() {
        let t = TransitionSpec {
            coupling: crate::constants::SpinCoupling::MatrixElements([Complex64::new(0.0, 0.0); 3]),
            ..TransitionSpec::rb87()
        };
        let r = gamma(
            &nb_on_cu(1e-6),
            1e-5,
            &t,
            RatePath::Auto,
            &Default::default(),
        )
        .unwrap();
        assert_eq!(r.gamma_field, 0.0);
    }

    #[test]
    fn bare_substrate_equals_zero_thickness_film() {
        let s = QuadratureSettings::default();
        let t = TransitionSpec::rb87();
        let bare = LayerStack::bare(materials::copper(), 4.2).unwrap();
        let a = gamma_isotropic(&bare, 1e-5, &t, &s).unwrap();
        let b = gamma_isotropic(&nb_on_cu(0.0), 1e-5, &t, &s).unwrap();
        assert_relative_eq!(a.gamma_field, b.gamma_field, max_relative = 1e-10);
    }

    #[test]
    fn quasi_static_warning() {
        let stack = LayerStack::new(
            vec![
                Layer::half_space(MaterialModel::vacuum()),
                Layer::half_space(materials::copper()),
            ],
            300.0,
        )
        .unwrap();
        let t = TransitionSpec::rb87().with_frequency(1e12);
        let r = gamma_isotropic(&stack, 1e-3, &t, &Default::default()).unwrap();
        assert_eq!(r.warnings.len(), 1);
    }
}
