//! Boundary statistics of random waves on planar Dirichlet domains.
//!
//! A random wave is a Gaussian combination Φ = Σ aⱼφⱼ of Dirichlet
//! eigenfunctions with eigenvalues λⱼ² drawn from a spectral window, either
//! long ([0, λ]) or short ([λ, λ+1]). Its nodal set meets the boundary ∂Ω
//! exactly where the boundary trace V(θ) = ∂_ν Φ(q(θ)) of the normal
//! derivative vanishes, so the expected number of boundary intersections is
//! the expected zero count of the Gaussian process V on the circle of length
//! ℓ(∂Ω). This crate computes that count three independent ways and checks
//! them against each other:
//!
//! * direct Monte Carlo: sample coefficients, scan V for sign changes,
//!   refine the roots ([`montecarlo`], [`zerocount`]);
//! * Kac-Rice quadrature: integrate the zero density built from the spectral
//!   sums c₁₁, c₁₂, c₂₂ of trace values and their θ-derivatives ([`kacrice`]);
//! * closed-form asymptotics: ℓλ/(√6π) (long) and ℓλ/(2π) (short), the
//!   large-λ limits implied by pointwise Weyl asymptotics of the cᵢⱼ.
//!
//! Explicit domains: the disk (Bessel spectrum, [`specfun`]) and the
//! rectangle (product sines, corners make it diagnostic only). Everything is
//! deterministic given a master seed; trial-level parallelism cannot change
//! any reported number.

pub mod domain;
pub mod ensemble;
pub mod kacrice;
pub mod montecarlo;
pub mod specfun;
pub mod zerocount;

use thiserror::Error;

/// Unified error type; variants map onto the failure modes of the numerical
/// layers (range/pre-condition violations, iteration failures, degenerate
/// covariance data, unstable zero counts, experiment bookkeeping).
#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside an operation's supported range.
    #[error("out of range: {0}")]
    Range(String),

    /// An iterative method exhausted its budget without meeting its tolerance.
    #[error("failed to converge: {0}")]
    Convergence(String),

    /// A spectral window containing no eigenmodes where modes are required.
    #[error("spectral window [{lo}, {hi}] contains no modes")]
    EmptyWindow { lo: f64, hi: f64 },

    /// The trace variance c₁₁ vanished (relative to the window scale) at a
    /// grid point, so the zero density is undefined there.
    #[error("degenerate trace variance c11 at grid index {index}")]
    DegenerateC11 { index: usize },

    /// Sign-change counts failed to stabilize under grid doubling.
    #[error("zero count did not stabilize under grid refinement (counts {counts:?})")]
    UnresolvedZeros { counts: Vec<usize> },

    /// More than the tolerated fraction of Monte Carlo trials was excluded.
    #[error("{excluded} of {trials} trials excluded, above the 1% quota")]
    ExcludedQuota { excluded: usize, trials: usize },

    /// A configuration that fails validation before any computation starts.
    #[error("invalid configuration: {0}")]
    Config(String),

    /// An internal consistency check failed; indicates a bug, not bad input.
    #[error("internal consistency violation: {0}")]
    Inconsistent(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Round `x` to `sig` significant decimal digits. Reported numbers pass
/// through this so that serialized output carries a stable 12-digit form.
pub fn round_sig(x: f64, sig: u32) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    let magnitude = x.abs().log10().floor();
    let shift = sig as i32 - 1 - magnitude as i32;
    let factor = 10f64.powi(shift);
    (x * factor).round() / factor
}
