//! Gaussian random waves: i.i.d. standard normal coefficients over a
//! spectral window, with pure evaluators for the boundary trace
//! V_a(θ) = Σ a_j v_j(θ), its θ-derivative, and interior values.
//!
//! Sampling is counter-based: one ChaCha12 stream per (master seed, trial),
//! with an explicit Box-Muller transform. A trial's coefficients never
//! depend on how trials are scheduled across threads, which is what makes
//! every report byte-reproducible. The stream cipher name and transform
//! name are exported so reports can record them.

use crate::domain::{DomainSpec, EigenMode, Parity, SpectralWindow};
use crate::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

/// Recorded in report manifests alongside [`GAUSSIAN_TRANSFORM`].
pub const RNG_ALGORITHM: &str = "chacha12";
pub const GAUSSIAN_TRANSFORM: &str = "box_muller";

/// Standard normal coefficients for one trial, tagged with their provenance
/// so any consumer can regenerate them.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientVector {
    pub values: Vec<f64>,
    pub master_seed: u64,
    pub trial: u64,
}

/// n i.i.d. N(0,1) deviates from the (master_seed, trial) stream.
///
/// The ChaCha12 key is the master seed repeated across the 256-bit key; the
/// trial index selects the stream. Box-Muller maps uniform pairs (u1, u2) to
/// r·(cos, sin)(2π u2) with r = sqrt(−2 ln(1−u1)), so u1 = 0 is safe.
pub fn sample_coefficients(n: usize, master_seed: u64, trial: u64) -> CoefficientVector {
    let mut key = [0u8; 32];
    for chunk in key.chunks_exact_mut(8) {
        chunk.copy_from_slice(&master_seed.to_le_bytes());
    }
    let mut rng = ChaCha12Rng::from_seed(key);
    rng.set_stream(trial);
    let mut values = Vec::with_capacity(n);
    while values.len() < n {
        let u1: f64 = rng.gen();
        let u2: f64 = rng.gen();
        let r = (-2.0 * (1.0 - u1).ln()).sqrt();
        let (s, c) = (std::f64::consts::TAU * u2).sin_cos();
        values.push(r * c);
        if values.len() < n {
            values.push(r * s);
        }
    }
    CoefficientVector { values, master_seed, trial }
}

/// One realization Φ_a = Σ a_j φ_j over a window's modes. Immutable; all
/// evaluation is pure. On the disk the per-mode amplitudes are folded into
/// one Fourier series per parity at construction, so a trace evaluation
/// costs O(max m) regardless of how many (m, k) pairs share each order.
#[derive(Debug, Clone)]
pub struct RandomWave<'a> {
    pub domain: DomainSpec,
    pub window: SpectralWindow,
    pub modes: &'a [EigenMode],
    pub coefficients: CoefficientVector,
    fourier: Option<FourierAggregate>,
}

/// Σ_m cos_amp[m]·cos(mθ/R) + sin_amp[m]·sin(mθ/R) and its θ-derivative,
/// evaluated with the angle-addition recurrence (one sin_cos per call).
/// Crate-internal building block; the correspondence check reuses it for
/// interior offset-circle profiles.
#[derive(Debug, Clone)]
pub(crate) struct FourierAggregate {
    pub(crate) inv_radius: f64,
    pub(crate) cos_amp: Vec<f64>,
    pub(crate) sin_amp: Vec<f64>,
}

impl FourierAggregate {
    fn build(radius: f64, modes: &[EigenMode], coeffs: &[f64]) -> Self {
        let max_m = modes
            .iter()
            .filter_map(|m| m.disk_harmonic().map(|(order, _, _)| order))
            .max()
            .unwrap_or(0) as usize;
        let mut cos_amp = vec![0.0; max_m + 1];
        let mut sin_amp = vec![0.0; max_m + 1];
        for (mode, &a) in modes.iter().zip(coeffs) {
            let (m, parity, amp) = mode.disk_harmonic().expect("disk aggregate over disk modes");
            match parity {
                Parity::Cos => cos_amp[m as usize] += a * amp,
                Parity::Sin => sin_amp[m as usize] += a * amp,
            }
        }
        FourierAggregate { inv_radius: 1.0 / radius, cos_amp, sin_amp }
    }

    pub(crate) fn value(&self, theta: f64) -> f64 {
        let u = theta * self.inv_radius;
        let (su, cu) = u.sin_cos();
        let (mut c, mut s) = (1.0, 0.0);
        let mut acc = self.cos_amp[0];
        for m in 1..self.cos_amp.len() {
            let next_c = c * cu - s * su;
            s = s * cu + c * su;
            c = next_c;
            acc += self.cos_amp[m] * c + self.sin_amp[m] * s;
        }
        acc
    }

    fn derivative(&self, theta: f64) -> f64 {
        let u = theta * self.inv_radius;
        let (su, cu) = u.sin_cos();
        let (mut c, mut s) = (1.0, 0.0);
        let mut acc = 0.0;
        for m in 1..self.cos_amp.len() {
            let next_c = c * cu - s * su;
            s = s * cu + c * su;
            c = next_c;
            acc += m as f64 * self.inv_radius * (self.sin_amp[m] * c - self.cos_amp[m] * s);
        }
        acc
    }
}

/// Random combination of the synthetic family {cos mθ, sin mθ : m ∈ ms} on
/// a circle of length 2π, unit amplitudes. This basis has no domain behind
/// it; it exists so the Kac-Rice machinery can be exercised against closed
/// forms (c11 ≡ |ms|, c22 ≡ Σm²). Coefficients interleave as
/// (cos m₀, sin m₀, cos m₁, ...).
#[derive(Debug, Clone)]
pub struct SyntheticWave {
    pub ms: Vec<u32>,
    pub coefficients: CoefficientVector,
    fourier: FourierAggregate,
}

impl SyntheticWave {
    pub fn new(ms: Vec<u32>, coefficients: CoefficientVector) -> Result<Self> {
        if ms.is_empty() || ms.iter().any(|&m| m == 0) {
            return Err(Error::Config("synthetic frequencies must be nonempty and >= 1".into()));
        }
        if coefficients.values.len() != 2 * ms.len() {
            return Err(Error::Config(format!(
                "synthetic basis with {} frequencies needs {} coefficients, got {}",
                ms.len(),
                2 * ms.len(),
                coefficients.values.len()
            )));
        }
        let max_m = *ms.iter().max().unwrap() as usize;
        let mut cos_amp = vec![0.0; max_m + 1];
        let mut sin_amp = vec![0.0; max_m + 1];
        for (i, &m) in ms.iter().enumerate() {
            cos_amp[m as usize] += coefficients.values[2 * i];
            sin_amp[m as usize] += coefficients.values[2 * i + 1];
        }
        let fourier = FourierAggregate { inv_radius: 1.0, cos_amp, sin_amp };
        Ok(SyntheticWave { ms, coefficients, fourier })
    }

    pub fn trace_at(&self, theta: f64) -> f64 {
        self.fourier.value(theta.rem_euclid(std::f64::consts::TAU))
    }

    pub fn trace_derivative_at(&self, theta: f64) -> f64 {
        self.fourier.derivative(theta.rem_euclid(std::f64::consts::TAU))
    }
}

impl<'a> RandomWave<'a> {
    pub fn new(
        domain: DomainSpec,
        window: SpectralWindow,
        modes: &'a [EigenMode],
        coefficients: CoefficientVector,
    ) -> Result<Self> {
        if modes.len() != coefficients.values.len() {
            return Err(Error::Config(format!(
                "coefficient vector length {} does not match mode count {}",
                coefficients.values.len(),
                modes.len()
            )));
        }
        let fourier = match domain {
            DomainSpec::Disk { radius } if !modes.is_empty() => {
                Some(FourierAggregate::build(radius, modes, &coefficients.values))
            }
            _ => None,
        };
        Ok(RandomWave { domain, window, modes, coefficients, fourier })
    }

    /// V_a(θ) = Σ a_j v_j(θ), θ reduced mod ℓ(∂Ω).
    pub fn trace_at(&self, theta: f64) -> f64 {
        let theta = theta.rem_euclid(self.domain.boundary_length());
        match &self.fourier {
            Some(f) => f.value(theta),
            None => self
                .modes
                .iter()
                .zip(&self.coefficients.values)
                .map(|(m, &a)| a * m.trace_value(&self.domain, theta))
                .sum(),
        }
    }

    /// ∂_θ V_a(θ); one-sided at rectangle corners like the per-mode traces.
    pub fn trace_derivative_at(&self, theta: f64) -> f64 {
        let theta = theta.rem_euclid(self.domain.boundary_length());
        match &self.fourier {
            Some(f) => f.derivative(theta),
            None => self
                .modes
                .iter()
                .zip(&self.coefficients.values)
                .map(|(m, &a)| a * m.trace_derivative(&self.domain, theta))
                .sum(),
        }
    }

    /// Interior value Φ_a(x, y) = Σ a_j φ_j(x, y). This is the plain sum;
    /// callers that sweep many points at a fixed radius should cache the
    /// radial factors instead (see the correspondence check in zerocount).
    pub fn interior_value(&self, x: f64, y: f64) -> Result<f64> {
        let mut acc = 0.0;
        for (mode, &a) in self.modes.iter().zip(&self.coefficients.values) {
            acc += a * mode.eigenfunction_value(&self.domain, x, y)?;
        }
        Ok(acc)
    }
}
