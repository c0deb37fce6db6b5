//! Planar stack geometry and the reflection coefficients built on it.
//!
//! Layers are numbered from the atom side: layer 1 is the vacuum half-space
//! holding the atom, layer 2 the film of thickness `d`, layer 3 the substrate.
//! The atom height `z` is measured from the top interface.
//!
//! Conventions:
//!
//! - every z-wavenumber is the branch of `sqrt` with `Im >= 0` (and `Re >= 0`
//!   on the real axis), i.e. outgoing or decaying away from the interface;
//! - `fresnel_te` is the field reflection amplitude `(k1z - k2z)/(k1z + k2z)`;
//! - the interface coefficients `R^H`, `R^V` are oriented the other way round,
//!   `R^H = (h_{f+1} - h_f)/(h_{f+1} + h_f) = -r^TE`;
//! - the film scattering coefficients are phase-referenced to the top
//!   interface: `B~ = B exp(2 i h_1 d)`, which keeps every integrand
//!   manifestly decaying for evanescent waves.

use num_complex::Complex64;

use crate::constants::Constants;
use crate::error::{Error, Result};
use crate::materials::{MaterialModel, PermittivityTensor};

/// Below this the multiple-reflection denominator is treated as a resonance.
pub const RESONANCE_FLOOR: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq)]
pub struct Layer {
    pub material: MaterialModel,
    /// Thickness in m; `f64::INFINITY` for the two half-spaces.
    pub thickness: f64,
}

impl Layer {
    pub fn half_space(material: MaterialModel) -> Self {
        Layer {
            material,
            thickness: f64::INFINITY,
        }
    }

    pub fn film(material: MaterialModel, thickness: f64) -> Self {
        Layer {
            material,
            thickness,
        }
    }
}

/// Ordered layers from the atom side (vacuum) to the substrate, all at one
/// equilibrium temperature.
#[derive(Debug, Clone, PartialEq)]
pub struct LayerStack {
    layers: Vec<Layer>,
    /// K.
    pub temperature: f64,
}

impl LayerStack {
    pub fn new(layers: Vec<Layer>, temperature: f64) -> Result<Self> {
        let stack = LayerStack {
            layers,
            temperature,
        };
        stack.validate()?;
        Ok(stack)
    }

    /// Vacuum over a bare substrate.
    pub fn bare(substrate: MaterialModel, temperature: f64) -> Result<Self> {
        LayerStack::new(
            vec![
                Layer::half_space(MaterialModel::vacuum()),
                Layer::half_space(substrate),
            ],
            temperature,
        )
    }

    /// Vacuum / film of thickness `d` / substrate.
    pub fn film_on_substrate(
        film: MaterialModel,
        d: f64,
        substrate: MaterialModel,
        temperature: f64,
    ) -> Result<Self> {
        LayerStack::new(
            vec![
                Layer::half_space(MaterialModel::vacuum()),
                Layer::film(film, d),
                Layer::half_space(substrate),
            ],
            temperature,
        )
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.layers.len();
        if !(2..=3).contains(&n) {
            return Err(Error::Geometry(format!(
                "stack must have 2 or 3 layers, got {n}"
            )));
        }
        if !matches!(
            self.layers[0].material.variant,
            crate::materials::MaterialVariant::Vacuum
        ) {
            return Err(Error::Geometry("layer 1 (atom side) must be vacuum".into()));
        }
        if n == 3 {
            let d = self.layers[1].thickness;
            if !(d >= 0.0 && d.is_finite()) {
                return Err(Error::Geometry(format!(
                    "film thickness must be finite and >= 0, got {d}"
                )));
            }
        }
        if !(self.temperature >= 0.0 && self.temperature.is_finite()) {
            return Err(Error::Geometry(format!(
                "temperature must be >= 0, got {}",
                self.temperature
            )));
        }
        for layer in &self.layers {
            layer.material.validate()?;
        }
        Ok(())
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    /// The interior film, if any.
    pub fn film(&self) -> Option<&Layer> {
        (self.layers.len() == 3).then(|| &self.layers[1])
    }

    pub fn substrate(&self) -> &MaterialModel {
        &self.layers[self.layers.len() - 1].material
    }

    /// Film thickness; zero for a two-layer stack.
    pub fn film_thickness(&self) -> f64 {
        self.film().map_or(0.0, |l| l.thickness)
    }

    pub fn with_temperature(&self, temperature: f64) -> Result<Self> {
        LayerStack::new(self.layers.clone(), temperature)
    }

    /// Replace the film thickness. Errors on a two-layer stack.
    pub fn with_film_thickness(&self, d: f64) -> Result<Self> {
        if self.layers.len() != 3 {
            return Err(Error::Geometry("stack has no interior film".into()));
        }
        let mut layers = self.layers.clone();
        layers[1].thickness = d;
        LayerStack::new(layers, self.temperature)
    }

    /// Replace the film material. Errors on a two-layer stack.
    pub fn with_film_material(&self, material: MaterialModel) -> Result<Self> {
        if self.layers.len() != 3 {
            return Err(Error::Geometry("stack has no interior film".into()));
        }
        let mut layers = self.layers.clone();
        layers[1].material = material;
        LayerStack::new(layers, self.temperature)
    }

    /// The same substrate with the film removed.
    pub fn without_film(&self) -> Self {
        LayerStack {
            layers: vec![
                self.layers[0].clone(),
                self.layers[self.layers.len() - 1].clone(),
            ],
            temperature: self.temperature,
        }
    }

    pub fn has_uniaxial_layer(&self) -> bool {
        self.layers.iter().any(|l| l.material.is_uniaxial())
    }
}

/// Principal square root computed without the polar form, so that the small
/// component of a nearly real or nearly imaginary root keeps full relative
/// precision.
fn principal_sqrt(w: Complex64) -> Complex64 {
    let (x, y) = (w.re, w.im);
    if x == 0.0 && y == 0.0 {
        return Complex64::new(0.0, y);
    }
    let t = ((x.abs() + x.hypot(y)) / 2.0).sqrt();
    if x >= 0.0 {
        Complex64::new(t, y / (2.0 * t))
    } else {
        Complex64::new(y.abs() / (2.0 * t), t.copysign(y))
    }
}

/// Principal square root moved onto the `Im >= 0` sheet (`Re >= 0` when real).
pub fn decaying_sqrt(w: Complex64) -> Complex64 {
    let s = principal_sqrt(w);
    if s.im < 0.0 || (s.im == 0.0 && s.re < 0.0) {
        -s
    } else {
        s
    }
}

/// Ordinary (`h1`) and extraordinary (`h2`) z-wavenumbers in one layer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LayerWavevectors {
    pub h1: Complex64,
    pub h2: Complex64,
    /// `k_1^2 = (omega/c)^2 eps_t`.
    pub k1_sq: Complex64,
    /// `k_2^2 = eta^2 (1 - eps_t/eps_z) + (omega/c)^2 eps_t`.
    pub k2_sq: Complex64,
}

pub fn layer_wavevectors(
    eta: f64,
    omega: f64,
    eps: &PermittivityTensor,
) -> Result<LayerWavevectors> {
    if !(eta >= 0.0) {
        return Err(Error::domain(format!("eta must be >= 0, got {eta}")));
    }
    if !(omega > 0.0) {
        return Err(Error::domain(format!(
            "omega must be positive, got {omega}"
        )));
    }
    if eps.eps_z == Complex64::new(0.0, 0.0) {
        return Err(Error::SingularMaterial("eps_z = 0".into()));
    }
    let k0 = omega / Constants::SI.c;
    let eta_sq = eta * eta;
    let k1_sq = k0 * k0 * eps.eps_t;
    let k2_sq = if eps.is_isotropic() {
        k1_sq
    } else {
        eta_sq * (1.0 - eps.eps_t / eps.eps_z) + k1_sq
    };
    Ok(LayerWavevectors {
        h1: decaying_sqrt(k1_sq - eta_sq),
        h2: decaying_sqrt(k2_sq - eta_sq),
        k1_sq,
        k2_sq,
    })
}

fn quotient(num: Complex64, den: Complex64, what: &str) -> Result<Complex64> {
    if den == Complex64::new(0.0, 0.0) {
        return Err(Error::DegenerateInterface(format!(
            "{what}: vanishing denominator"
        )));
    }
    Ok(num / den)
}

/// TE Fresnel reflection amplitude `(k1z - k2z)/(k1z + k2z)`.
pub fn fresnel_te(k1z: Complex64, k2z: Complex64) -> Result<Complex64> {
    quotient(k1z - k2z, k1z + k2z, "fresnel_te")
}

/// Film reflection `(r12 + r23 e) / (1 - r21 r23 e)` with `e = exp(2 i k2z d)`
/// and `r21 = -r12`.
pub fn generalized_r_te(
    r12: Complex64,
    r23: Complex64,
    k2z: Complex64,
    d: f64,
) -> Result<Complex64> {
    if !(d >= 0.0) {
        return Err(Error::Geometry(format!(
            "film thickness must be >= 0, got {d}"
        )));
    }
    let phase = (Complex64::i() * 2.0 * k2z * d).exp();
    let r21 = -r12;
    let den = 1.0 - r21 * r23 * phase;
    if den.norm() < RESONANCE_FLOOR {
        return Err(Error::Resonance {
            magnitude: den.norm(),
            eta: f64::NAN,
        });
    }
    Ok((r12 + r23 * phase) / den)
}

/// `R^H_f = (h_{f+1} - h_f)/(h_{f+1} + h_f)`.
pub fn interface_rh(h_f: Complex64, h_f1: Complex64) -> Result<Complex64> {
    quotient(h_f1 - h_f, h_f1 + h_f, "interface_rh")
}

/// `R^V_f` with both weighting coefficients equal to one:
/// `(h_f k_{f+1}^2 - h_{f+1} k_f^2) / (h_f k_{f+1}^2 + h_{f+1} k_f^2)`.
pub fn interface_rv(
    h_f: Complex64,
    h_f1: Complex64,
    k_f_sq: Complex64,
    k_f1_sq: Complex64,
) -> Result<Complex64> {
    let a = h_f * k_f1_sq;
    let b = h_f1 * k_f_sq;
    quotient(a - b, a + b, "interface_rv")
}

/// `R^V_f` with general weights, in the ratio form `(q - 1)/(q + 1)` with
/// `q = h_f [(w1 - w2) h_{f+1}^2 + w2 k_{f+1}^2] / (h_{f+1} [(w1 - w2) h_f^2 + w2 k_f^2])`.
///
/// Kept to check [`interface_rv`] against; rates always use the reduced form.
pub fn interface_rv_weighted(
    h_f: Complex64,
    h_f1: Complex64,
    k_f_sq: Complex64,
    k_f1_sq: Complex64,
    w1: f64,
    w2: f64,
) -> Result<Complex64> {
    let num = h_f * ((w1 - w2) * h_f1 * h_f1 + w2 * k_f1_sq);
    let den = h_f1 * ((w1 - w2) * h_f * h_f + w2 * k_f_sq);
    let q = quotient(num, den, "interface_rv_weighted")?;
    quotient(q - 1.0, q + 1.0, "interface_rv_weighted")
}

/// Phase-referenced film scattering coefficients `B~_M` (TE/H family) and
/// `B~_N` (TM/V family).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScatteringCoefficients {
    pub b_m: Complex64,
    pub b_n: Complex64,
}

/// Permittivities of a three-layer view of a stack at one frequency and
/// temperature. Two-layer stacks appear as a zero-thickness film made of the
/// substrate material.
#[derive(Debug, Clone, Copy)]
pub struct StackOptics {
    pub omega: f64,
    pub eps: [PermittivityTensor; 3],
    pub d: f64,
}

impl StackOptics {
    pub fn new(stack: &LayerStack, omega: f64) -> Result<Self> {
        stack.validate()?;
        let t = stack.temperature;
        let layers = stack.layers();
        let top = layers[0].material.permittivity(omega, t)?;
        let sub = stack.substrate().permittivity(omega, t)?;
        let (film, d) = match stack.film() {
            Some(l) => (l.material.permittivity(omega, t)?, l.thickness),
            None => (sub, 0.0),
        };
        Ok(StackOptics {
            omega,
            eps: [top, film, sub],
            d,
        })
    }

    pub fn is_isotropic(&self) -> bool {
        self.eps.iter().all(PermittivityTensor::is_isotropic)
    }

    pub fn wavevectors(&self, eta: f64) -> Result<[LayerWavevectors; 3]> {
        Ok([
            layer_wavevectors(eta, self.omega, &self.eps[0])?,
            layer_wavevectors(eta, self.omega, &self.eps[1])?,
            layer_wavevectors(eta, self.omega, &self.eps[2])?,
        ])
    }

    /// Generalized TE reflection of the film on its substrate, seen from the vacuum.
    pub fn r_te(&self, eta: f64) -> Result<Complex64> {
        Ok(-self.scattering(eta)?.b_m)
    }

    /// Generalized TM reflection in the field convention, built from the `R^V`
    /// interface coefficients.
    pub fn r_tm(&self, eta: f64) -> Result<Complex64> {
        Ok(-self.scattering(eta)?.b_n)
    }

    /// Film scattering coefficients.
    ///
    /// `(R1 + R2 e)/(1 + R1 R2 e)` is evaluated through the input admittance of
    /// film plus substrate, `B = (Y_in - Y_1)/(Y_in + Y_1)`, with `Y = h` for the
    /// M family and `Y = k^2/h` for the N family. Deep in the evanescent sector
    /// the vacuum admittance is purely imaginary and `Im B` follows the sign of
    /// `Re Y_in` exactly, which the direct form loses to cancellation when a
    /// lossy film sits on a nearly lossless substrate.
    pub fn scattering(&self, eta: f64) -> Result<ScatteringCoefficients> {
        let [l1, l2, l3] = self.wavevectors(eta)?;
        // M family: ordinary wavenumbers
        let b_m = film_coefficient(l1.h1, l2.h1, l3.h1, l2.h1, self.d, eta)?;
        // N family: extraordinary wavenumbers weighted by the eps_t wavenumbers
        let y = |l: &LayerWavevectors| quotient(l.k1_sq, l.h2, "TM admittance");
        let b_n = -film_coefficient(y(&l1)?, y(&l2)?, y(&l3)?, l2.h2, self.d, eta)?;
        Ok(ScatteringCoefficients { b_m, b_n })
    }
}

/// `exp(w) - 1` without cancellation for small `|w|`.
fn expm1(w: Complex64) -> Complex64 {
    let half = (w.im / 2.0).sin();
    Complex64::new(
        w.re.exp_m1() * w.im.cos() - 2.0 * half * half,
        w.re.exp() * w.im.sin(),
    )
}

/// `(Y_in - y1)/(Y_in + y1)` for a film of admittance `y2`, z-wavenumber `h2`
/// and thickness `d` on a substrate of admittance `y3`.
fn film_coefficient(
    y1: Complex64,
    y2: Complex64,
    y3: Complex64,
    h2: Complex64,
    d: f64,
    eta: f64,
) -> Result<Complex64> {
    let y_in = if d == 0.0 {
        y3
    } else {
        // t = (1 - e)/(1 + e), e = exp(2 i h2 d)
        let m = expm1(Complex64::i() * 2.0 * h2 * d);
        let t = -m / (2.0 + m);
        let den = y2 + y3 * t;
        if den == Complex64::new(0.0, 0.0) {
            // infinite input admittance: perfectly reflecting
            return Ok(Complex64::new(1.0, 0.0));
        }
        let e = 1.0 + m;
        if e.norm() < 0.5 {
            // thick film: keep y2 exact and add the substrate correction, since
            // rounding in a quotient near 1 would swamp a small Re y2
            y2 + y2 * (y3 - y2) * (2.0 * e / (2.0 + m)) / den
        } else {
            y2 * (y3 + y2 * t) / den
        }
    };
    let sum = y1 + y_in;
    if sum.norm() < RESONANCE_FLOOR * (y1.norm() + y_in.norm()) {
        return Err(Error::Resonance {
            magnitude: sum.norm() / (y1.norm() + y_in.norm()),
            eta,
        });
    }
    Ok(1.0 - 2.0 * y1 / sum)
}

/// Phase-referenced `B~_M = +(R1^H + R2^H e)/(1 + R1^H R2^H e)` and
/// `B~_N = -(R1^V + R2^V e)/(1 + R1^V R2^V e)`, with `R1` the vacuum/film and
/// `R2` the film/substrate interface.
pub fn scattering_coefficients(
    stack: &LayerStack,
    eta: f64,
    omega: f64,
) -> Result<ScatteringCoefficients> {
    StackOptics::new(stack, omega)?.scattering(eta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::materials::{self, MaterialVariant, TwoFluidParams, UniaxialParams};
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    const OMEGA: f64 = 2.0 * PI * 560e3;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol * a.norm().max(b.norm()).max(1e-300)
    }

    #[test]
    fn branch_selection() {
        let k0 = OMEGA / Constants::SI.c;
        let vac = PermittivityTensor::isotropic(c(1.0, 0.0));
        let w = layer_wavevectors(0.0, OMEGA, &vac).unwrap();
        assert_relative_eq!(w.h1.re, k0, max_relative = 1e-15);
        assert_eq!(w.h1.im, 0.0);
        let eta = 1e5;
        let w = layer_wavevectors(eta, OMEGA, &vac).unwrap();
        assert_eq!(w.h1.re, 0.0);
        assert!(w.h1.im > 0.0);
        assert_relative_eq!(w.h1.im, (eta * eta - k0 * k0).sqrt(), max_relative = 1e-14);
        assert_eq!(w.h1, w.h2);
        let bad = PermittivityTensor {
            eps_t: c(1.0, 0.0),
            eps_z: c(0.0, 0.0),
        };
        assert!(matches!(
            layer_wavevectors(1.0, OMEGA, &bad),
            Err(Error::SingularMaterial(_))
        ));
    }

    #[test]
    fn fresnel_limits() {
        let a = c(0.0, 3.0);
        assert_eq!(fresnel_te(a, a).unwrap(), c(0.0, 0.0));
        let r = fresnel_te(a, c(1e12, 1e12)).unwrap();
        assert!(close(r, c(-1.0, 0.0), 1e-10));
        let b = c(0.3, 2.0);
        assert!(close(
            fresnel_te(a, b).unwrap(),
            -fresnel_te(b, a).unwrap(),
            1e-15
        ));
        assert!(matches!(
            fresnel_te(a, -a),
            Err(Error::DegenerateInterface(_))
        ));
    }

    #[test]
    fn generalized_limits() {
        let (k1, k2, k3) = (c(0.0, 1e5), c(1e3, 2e5), c(4e4, 3e4));
        let r12 = fresnel_te(k1, k2).unwrap();
        let r23 = fresnel_te(k2, k3).unwrap();
        let r13 = fresnel_te(k1, k3).unwrap();
        assert!(close(
            generalized_r_te(r12, r23, k2, 0.0).unwrap(),
            r13,
            1e-12
        ));
        assert!(close(
            generalized_r_te(r12, r23, k2, 1.0).unwrap(),
            r12,
            1e-14
        ));
        assert_eq!(generalized_r_te(r12, c(0.0, 0.0), k2, 3e-6).unwrap(), r12);
        assert!(generalized_r_te(r12, r23, k2, -1.0).is_err());
    }

    #[test]
    fn resonance_is_flagged() {
        // r21 r23 = 1 at d = 0
        let r = generalized_r_te(c(-1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), 0.0);
        assert!(matches!(r, Err(Error::Resonance { .. })));
    }

    #[test]
    fn interface_coefficients() {
        let (a, b) = (c(0.5, 2.0), c(-0.1, 7.0));
        assert_eq!(interface_rh(a, a).unwrap(), c(0.0, 0.0));
        assert!(close(
            interface_rh(a, b).unwrap(),
            -interface_rh(b, a).unwrap(),
            1e-15
        ));
        assert!(close(
            interface_rh(a, b).unwrap(),
            -fresnel_te(a, b).unwrap(),
            1e-15
        ));
        let k = c(3.0, 1.0);
        assert_eq!(interface_rv(a, a, k, k).unwrap(), c(0.0, 0.0));
        let rv = interface_rv(a, b, k, c(1e15, 1e15)).unwrap();
        assert!(close(rv, c(1.0, 0.0), 1e-12));
    }

    #[test]
    fn isotropic_film_matches_fresnel_path() {
        let stack =
            LayerStack::film_on_substrate(materials::niobium(), 1e-7, materials::copper(), 4.2)
                .unwrap();
        let optics = StackOptics::new(&stack, OMEGA).unwrap();
        for eta in [1e2, 1e4, 1e5, 1e6, 1e7, 1e8] {
            let b = optics.scattering(eta).unwrap();
            assert!(close(b.b_m, -optics.r_te(eta).unwrap(), 1e-12));
            assert!(close(b.b_n, -optics.r_tm(eta).unwrap(), 1e-12));
        }
    }

    #[test]
    fn lossy_film_on_superconductor_stays_passive() {
        let k0 = OMEGA / 299_792_458.0;
        let film = MaterialModel::drude("film", 1e6);
        for d in [1e-10, 1e-8, 1e-6] {
            let stack =
                LayerStack::film_on_substrate(film.clone(), d, materials::niobium(), 1.0).unwrap();
            let optics = StackOptics::new(&stack, OMEGA).unwrap();
            for i in 0..60 {
                let eta = k0 * 10f64.powf(0.01 + 0.2 * i as f64);
                let r = optics.r_te(eta).unwrap();
                assert!(
                    r.im > 0.0,
                    "Im r = {:e} at d = {d:e}, eta/k0 = {:e}",
                    r.im,
                    eta / k0
                );
            }
        }
    }

    #[test]
    fn thick_superconducting_film_is_smooth() {
        // Im r is ~1e-21 here; rounding noise would show up as jitter between neighbours
        let stack =
            LayerStack::film_on_substrate(materials::niobium(), 1e-6, materials::copper(), 0.2)
                .unwrap();
        let optics = StackOptics::new(&stack, OMEGA).unwrap();
        let k0 = OMEGA / 299_792_458.0;
        for i in 0..30 {
            let eta = k0 * 10f64.powf(2.0 + 0.2 * i as f64);
            let a = optics.r_te(eta).unwrap().im;
            let b = optics.r_te(eta * (1.0 + 1e-9)).unwrap().im;
            assert!(a > 0.0);
            assert!(
                ((b - a) / a).abs() < 1e-8,
                "jitter {:e} at eta/k0 = {:e}",
                (b - a) / a,
                eta / k0
            );
        }
    }

    #[test]
    fn sqrt_keeps_small_component() {
        // (1e-9 + i)^2 = -1 + 1e-18 + 2e-9 i
        let s = decaying_sqrt(c(-1.0, 2e-9));
        assert_relative_eq!(s.re, 1e-9, max_relative = 1e-15);
        assert_relative_eq!(s.im, 1.0, max_relative = 1e-15);
        // principal root (2, -2.5e-13) lies below the real axis and is flipped
        let s = decaying_sqrt(c(4.0, -1e-12));
        assert_relative_eq!(s.re, -2.0, max_relative = 1e-15);
        assert_relative_eq!(s.im, 2.5e-13, max_relative = 1e-15);
        assert_eq!(decaying_sqrt(c(-4.0, 0.0)), c(0.0, 2.0));
        assert_eq!(decaying_sqrt(c(-4.0, -0.0)), c(0.0, 2.0));
        assert_eq!(decaying_sqrt(c(0.0, 0.0)), c(0.0, 0.0));
    }

    #[test]
    fn single_interface_limit() {
        // film identical to substrate: R2 = 0 so B~_M = R1
        let stack =
            LayerStack::film_on_substrate(materials::copper(), 2e-6, materials::copper(), 4.2)
                .unwrap();
        let optics = StackOptics::new(&stack, OMEGA).unwrap();
        let eta = 3e4;
        let [l1, l2, _] = optics.wavevectors(eta).unwrap();
        let r1 = interface_rh(l1.h1, l2.h1).unwrap();
        assert!(close(optics.scattering(eta).unwrap().b_m, r1, 1e-14));
    }

    #[test]
    fn zero_thickness_reduces_to_bare_substrate() {
        let bscco = materials::bscco();
        let three = LayerStack::film_on_substrate(bscco, 0.0, materials::copper(), 4.2).unwrap();
        let two = three.without_film();
        let a = StackOptics::new(&three, OMEGA).unwrap();
        let b = StackOptics::new(&two, OMEGA).unwrap();
        for eta in [1.0, 1e3, 1e5, 1e7] {
            let (sa, sb) = (a.scattering(eta).unwrap(), b.scattering(eta).unwrap());
            assert!(close(sa.b_m, sb.b_m, 1e-12), "{eta}");
            assert!(close(sa.b_n, sb.b_n, 1e-12), "{eta}");
            assert!(close(a.r_te(eta).unwrap(), b.r_te(eta).unwrap(), 1e-12));
        }
    }

    #[test]
    fn stack_validation() {
        assert!(LayerStack::new(vec![Layer::half_space(materials::copper())], 1.0).is_err());
        assert!(LayerStack::bare(materials::copper(), -1.0).is_err());
        let not_vacuum = vec![
            Layer::half_space(materials::copper()),
            Layer::half_space(materials::copper()),
        ];
        assert!(LayerStack::new(not_vacuum, 1.0).is_err());
        assert!(LayerStack::film_on_substrate(
            materials::niobium(),
            -1e-9,
            materials::copper(),
            1.0
        )
        .is_err());
        let four = vec![
            Layer::half_space(MaterialModel::vacuum()),
            Layer::film(materials::niobium(), 1e-6),
            Layer::film(materials::copper(), 1e-6),
            Layer::half_space(materials::copper()),
        ];
        assert!(LayerStack::new(four, 1.0).is_err());
    }

    fn passive_eps() -> impl Strategy<Value = Complex64> {
        (-1e18f64..1e3, 0.0f64..1e13, 0usize..3).prop_map(|(re, im, kind)| match kind {
            0 => c(re, im),
            1 => c(0.0, im),
            _ => c(1.0 + re.abs() * 1e-15, im * 1e-12),
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn rv_reduced_matches_weighted(ar in -1e6f64..1e6, ai in 0.0f64..1e6, br in -1e6f64..1e6, bi in 0.0f64..1e6,
                                       kr in -1e3f64..1e3, ki in 0.0f64..1e3, lr in -1e3f64..1e3, li in 0.0f64..1e3) {
            let (a, b, k, l) = (c(ar, ai), c(br, bi), c(kr, ki), c(lr, li));
            if let (Ok(x), Ok(y)) = (interface_rv(a, b, k, l), interface_rv_weighted(a, b, k, l, 1.0, 1.0)) {
                prop_assume!(x.norm() < 1e6);
                prop_assert!((x - y).norm() <= 1e-12 * x.norm().max(1.0), "{x} vs {y}");
            }
        }

        #[test]
        fn composition_identity(e2 in passive_eps(), e3 in passive_eps(), eta in 0.0f64..1e8) {
            let k0 = OMEGA / Constants::SI.c;
            let kz = |e: Complex64| decaying_sqrt(k0 * k0 * e - eta * eta);
            let (k1, k2, k3) = (kz(c(1.0, 0.0)), kz(e2), kz(e3));
            let r12 = fresnel_te(k1, k2).unwrap();
            let r23 = fresnel_te(k2, k3).unwrap();
            let r13 = fresnel_te(k1, k3).unwrap();
            let g = generalized_r_te(r12, r23, k2, 0.0).unwrap();
            // the identity loses digits in proportion to the wavenumber contrast
            let norms = [k1.norm(), k2.norm(), k3.norm()];
            let contrast = norms.iter().cloned().fold(0.0, f64::max) / norms.iter().cloned().fold(f64::INFINITY, f64::min);
            let tol = 1e-12 + 16.0 * f64::EPSILON * contrast;
            let scale = r12.norm() + r23.norm() + r13.norm();
            prop_assert!((g - r13).norm() <= tol * scale, "{} > {}", (g - r13).norm(), tol * scale);
        }

        #[test]
        fn passive_reflection(e2 in passive_eps(), e3 in passive_eps(), d in 0.0f64..1e-4, x in 1.0f64..1e10) {
            // evanescent sector only: for propagating waves Im r has no fixed sign
            let k0 = OMEGA / Constants::SI.c;
            let eta = k0 * x;
            let kz = |e: Complex64| decaying_sqrt(k0 * k0 * e - eta * eta);
            prop_assert!(kz(e2).im >= 0.0);
            let (k1, k2, k3) = (kz(c(1.0, 0.0)), kz(e2), kz(e3));
            let r = generalized_r_te(fresnel_te(k1, k2).unwrap(), fresnel_te(k2, k3).unwrap(), k2, d).unwrap();
            prop_assert!(r.im >= -1e-12 * r.norm(), "Im r = {}", r.im);
        }

        #[test]
        fn isotropic_degeneracy(lambda0 in 1e-8f64..1e-5, sigma in 1e4f64..1e8, sub in 1e5f64..1e8,
                                d in 0.0f64..1e-5, t in 0.0f64..10.0, eta in 1e2f64..1e8) {
            let p = TwoFluidParams { lambda0, tc: 10.0, sigma_normal: sigma, alpha: 4.0 };
            let film = MaterialModel::new("f", MaterialVariant::UniaxialSc(UniaxialParams { transverse: p, longitudinal: p }));
            let stack = LayerStack::film_on_substrate(film, d, MaterialModel::drude("s", sub), t).unwrap();
            let optics = StackOptics::new(&stack, OMEGA).unwrap();
            let b = optics.scattering(eta).unwrap();
            prop_assert!(close(b.b_m, -optics.r_te(eta).unwrap(), 1e-10));
            prop_assert!(close(b.b_n, -optics.r_tm(eta).unwrap(), 1e-10));
        }
    }
}
