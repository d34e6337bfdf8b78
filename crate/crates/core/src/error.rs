//! Error types shared across the crate.

use thiserror::Error;

#[derive(Error, Debug)]
pub enum Error {
    /// Exponent pair (s, p) outside the admissible window, or a structural
    /// inequality such as `k0 > |s| + 3` violated.
    #[error("admissibility: {0}")]
    Admissibility(String),

    /// A scalar parameter outside its legal range.
    #[error("range: {0}")]
    Range(String),

    /// Point outside the valid toroidal chart (rho >= 1/nu). Non-fatal for
    /// diagnostics; fatal where a singular factor would be evaluated.
    #[error("chart: rho = {rho} outside valid chart (1/nu = {nu_inv})")]
    Chart { rho: f64, nu_inv: f64 },

    /// Cylindrical frame requested on the symmetry axis r = 0.
    #[error("axis: cylindrical frame undefined at r = 0")]
    Axis,

    /// Evaluation at a singular point of a formula (rho = 0 or r = 0).
    #[error("domain: {0}")]
    Domain(String),

    /// Derivative order beyond what the jet machinery was asked to carry.
    #[error("order: requested derivative order {requested} exceeds capacity {available}")]
    Order { requested: i32, available: i32 },

    /// Grid does not resolve the support (fewer nodes than required per 1/mu).
    #[error("resolution: {0}")]
    Resolution(String),

    /// Sampled field touches the periodic box boundary.
    #[error("support: {0}")]
    Support(String),

    /// Spectrum not decayed at the grid cutoff; norms would be aliased.
    #[error("alias: high-frequency tail holds {tail_fraction:.3e} of total energy (limit {limit:.1e})")]
    Alias { tail_fraction: f64, limit: f64 },

    /// Characteristic integrator cannot reach the phase tolerance.
    #[error("step: {0}")]
    Step(String),

    /// Solver magnitude guard tripped.
    #[error("blowup: |u|_inf = {max} exceeded {limit} at t = {time}")]
    Blowup { max: f64, limit: f64, time: f64 },

    #[error("config: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
