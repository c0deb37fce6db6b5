//! One-parameter fit of a film's normal-state conductivity to a target lifetime.

use crate::error::{Error, Result};
use crate::sweep::RunSetup;

/// Search range used by the reproduction runs, S/m.
pub const SIGMA_RANGE: (f64, f64) = (1e4, 1e9);

const GRID_POINTS: usize = 26;
const GOLDEN_ITERATIONS: usize = 60;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SigmaFit {
    pub sigma: f64,
    pub tau: f64,
    pub target_tau: f64,
    /// `max(tau / target, target / tau)`, 1 for an exact match.
    pub factor: f64,
}

impl SigmaFit {
    pub fn within(&self, factor: f64) -> bool {
        self.factor <= factor
    }
}

/// Minimize `|ln tau(sigma) - ln target|` over `ln sigma` in `[lo, hi]` with a
/// coarse grid followed by golden-section refinement around the best point.
pub fn fit_log_scalar<F>(tau_of: F, target_tau: f64, lo: f64, hi: f64) -> Result<SigmaFit>
where
    F: Fn(f64) -> Result<f64>,
{
    if !(target_tau > 0.0 && lo > 0.0 && lo < hi) {
        return Err(Error::domain(format!(
            "bad fit setup: target {target_tau}, range [{lo}, {hi}]"
        )));
    }
    let target = target_tau.ln();
    let cost = |ls: f64| -> Result<f64> { Ok((tau_of(ls.exp())?.ln() - target).abs()) };

    let (a, b) = (lo.ln(), hi.ln());
    let step = (b - a) / (GRID_POINTS - 1) as f64;
    let mut best = (f64::INFINITY, a);
    for i in 0..GRID_POINTS {
        let ls = a + step * i as f64;
        let c = cost(ls)?;
        if c < best.0 {
            best = (c, ls);
        }
    }

    let (mut x0, mut x3) = ((best.1 - step).max(a), (best.1 + step).min(b));
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = x3 - g * (x3 - x0);
    let mut x2 = x0 + g * (x3 - x0);
    let (mut c1, mut c2) = (cost(x1)?, cost(x2)?);
    for _ in 0..GOLDEN_ITERATIONS {
        if c1 < c2 {
            x3 = x2;
            x2 = x1;
            c2 = c1;
            x1 = x3 - g * (x3 - x0);
            c1 = cost(x1)?;
        } else {
            x0 = x1;
            x1 = x2;
            c1 = c2;
            x2 = x0 + g * (x3 - x0);
            c2 = cost(x2)?;
        }
    }
    let ls = if c1 < best.0.min(c2) {
        x1
    } else if c2 < best.0 {
        x2
    } else {
        best.1
    };
    let sigma = ls.exp();
    let tau = tau_of(sigma)?;
    Ok(SigmaFit {
        sigma,
        tau,
        target_tau,
        factor: (tau / target_tau).max(target_tau / tau),
    })
}

/// Fit the film's normal-state conductivity so that the lifetime of `setup`
/// matches `target_tau`. Substrate and all other parameters stay fixed.
pub fn fit_film_sigma(setup: &RunSetup, target_tau: f64, lo: f64, hi: f64) -> Result<SigmaFit> {
    let film = setup
        .stack
        .film()
        .ok_or_else(|| Error::Config("conductivity fit needs a film".into()))?
        .material
        .clone();
    fit_log_scalar(
        |sigma| {
            let stack = setup
                .stack
                .with_film_material(film.with_sigma_normal(sigma))?;
            Ok(RunSetup {
                stack,
                ..setup.clone()
            }
            .rate()?
            .tau)
        },
        target_tau,
        lo,
        hi,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_power_law_root() {
        // tau = sigma^2 / 1e6 reaches 1e4 at sigma = 1e5
        let fit = fit_log_scalar(|s| Ok(s * s / 1e6), 1e4, 1e3, 1e8).unwrap();
        assert!((fit.sigma / 1e5 - 1.0).abs() < 1e-8, "{fit:?}");
        assert!(fit.factor < 1.0 + 1e-8);
    }

    #[test]
    fn clamps_to_range_edge() {
        let fit = fit_log_scalar(Ok, 1e12, 1e3, 1e8).unwrap();
        assert!((fit.sigma / 1e8 - 1.0).abs() < 1e-6);
        assert!((fit.factor / 1e4 - 1.0).abs() < 1e-5);
        assert!(!fit.within(30.0));
    }

    #[test]
    fn rejects_bad_setup() {
        assert!(fit_log_scalar(Ok, -1.0, 1.0, 2.0).is_err());
        assert!(fit_log_scalar(Ok, 1.0, 2.0, 1.0).is_err());
    }
}
