//! Shared stacks for the benchmarks.

use spinflip_core::materials::{bscco, copper, niobium};
use spinflip_core::LayerStack;

/// Atom height used throughout, m.
pub const Z: f64 = 1e-5;

pub fn niobium_on_copper(d: f64, temperature: f64) -> LayerStack {
    LayerStack::film_on_substrate(niobium(), d, copper(), temperature).expect("valid stack")
}

pub fn bscco_on_copper(d: f64, temperature: f64) -> LayerStack {
    LayerStack::film_on_substrate(bscco(), d, copper(), temperature).expect("valid stack")
}

pub fn bare_copper(temperature: f64) -> LayerStack {
    LayerStack::bare(copper(), temperature).expect("valid stack")
}
