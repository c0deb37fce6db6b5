use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// An argument outside the domain of a physical law.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("singular material: {0}")]
    SingularMaterial(String),

    /// `a + b = 0` in a two-wavenumber quotient.
    #[error("degenerate interface: {0}")]
    DegenerateInterface(String),

    /// Multiple-reflection denominator vanished (guided-mode resonance or a
    /// branch error upstream).
    #[error("resonance: |denominator| = {magnitude:e} at eta = {eta:e} 1/m")]
    Resonance { magnitude: f64, eta: f64 },

    /// `h = 0` exactly (grazing wave) in the full double-curl integrand.
    #[error("grazing singularity at eta = {eta:e} 1/m")]
    GrazingSingularity { eta: f64 },

    #[error(
        "quadrature did not converge after {refinements} refinements \
         (partial value {partial:e}, relative error estimate {rel_error:e})"
    )]
    NonConvergence {
        partial: f64,
        rel_error: f64,
        refinements: usize,
    },

    #[error("invalid geometry: {0}")]
    Geometry(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("unknown material '{0}'")]
    UnknownMaterial(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv: {0}")]
    Csv(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
