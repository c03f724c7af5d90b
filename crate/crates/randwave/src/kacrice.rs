//! The deterministic side of the boundary-intersection count: spectral
//! covariance profiles c_ij(θ), the Kac-Rice density and its integral, the
//! ε-regularized density, Weyl-constant convergence diagnostics, and the
//! closed-form asymptotic predictions.
//!
//! For a Gaussian field V(θ) = Σ a_j v_j(θ) the three covariances
//!
//! ```text
//! c11(θ) = Σ v_j(θ)²      = E[V(θ)²]
//! c12(θ) = Σ v_j(θ)v_j′(θ) = E[V(θ)V′(θ)]
//! c22(θ) = Σ v_j′(θ)²     = E[V′(θ)²]
//! ```
//!
//! determine the expected zero density K(θ) = (1/π)·sqrt(c22/c11 − (c12/c11)²)
//! and the expected count Z = ∫₀^ℓ K dθ. The asymptotic predictions are
//! ℓλ/(√6π) for the cumulative window and ℓλ/(2π) for the unit band, and the
//! Weyl diagnostics track how fast the finite-λ covariances approach the
//! constants behind those limits.
//!
//! Two basis kinds feed this machinery: eigenmode windows on a domain, and a
//! synthetic trigonometric family with known closed forms used to validate
//! the pipeline end to end.

use crate::domain::{self, DomainSpec, EigenMode, SpectralWindow, WindowKind};
use crate::ensemble::{CoefficientVector, RandomWave, SyntheticWave};
use crate::{Error, Result};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Default θ-grid cells for covariance profiles and quadrature.
pub const DEFAULT_GRID_N: usize = 2048;

/// What spans the random field: a spectral window of true eigenmodes, or the
/// synthetic family {cos mθ, sin mθ} on a 2π circle with unit amplitudes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TraceBasis {
    Window { domain: DomainSpec, window: SpectralWindow },
    SyntheticTrig { ms: Vec<u32> },
}

impl TraceBasis {
    /// Enumerate modes and validate; the result is immutable and shared.
    pub fn prepare(&self) -> Result<PreparedBasis> {
        match self {
            TraceBasis::Window { domain, window } => {
                let modes = domain::enumerate_modes(domain, window)?;
                let max_freq = match domain {
                    DomainSpec::Disk { radius } => {
                        modes
                            .iter()
                            .filter_map(|m| m.disk_harmonic().map(|(order, _, _)| order as f64))
                            .fold(0.0f64, f64::max)
                            / radius
                    }
                    // traces on each side oscillate at most at the window frequency
                    DomainSpec::Rectangle { .. } => window.bounds().1,
                };
                Ok(PreparedBasis {
                    spec: self.clone(),
                    modes,
                    ell: domain.boundary_length(),
                    max_freq,
                })
            }
            TraceBasis::SyntheticTrig { ms } => {
                if ms.is_empty() || ms.iter().any(|&m| m == 0) {
                    return Err(Error::Config(
                        "synthetic frequencies must be nonempty and >= 1".into(),
                    ));
                }
                Ok(PreparedBasis {
                    spec: self.clone(),
                    modes: Vec::new(),
                    ell: std::f64::consts::TAU,
                    max_freq: *ms.iter().max().unwrap() as f64,
                })
            }
        }
    }
}

/// A basis ready for evaluation: enumerated modes (empty for the synthetic
/// family), boundary length, and the largest angular frequency any trace
/// carries (which bounds how fine zero-counting grids must be).
#[derive(Debug, Clone)]
pub struct PreparedBasis {
    spec: TraceBasis,
    pub modes: Vec<EigenMode>,
    ell: f64,
    max_freq: f64,
}

impl PreparedBasis {
    pub fn spec(&self) -> &TraceBasis {
        &self.spec
    }

    /// Number of independent Gaussian coefficients a realization needs.
    pub fn dimension(&self) -> usize {
        match &self.spec {
            TraceBasis::Window { .. } => self.modes.len(),
            TraceBasis::SyntheticTrig { ms } => 2 * ms.len(),
        }
    }

    pub fn boundary_length(&self) -> f64 {
        self.ell
    }

    pub fn max_frequency(&self) -> f64 {
        self.max_freq
    }

    pub fn is_empty(&self) -> bool {
        self.dimension() == 0
    }

    fn empty_window_error(&self) -> Error {
        match &self.spec {
            TraceBasis::Window { window, .. } => {
                let (lo, hi) = window.bounds();
                Error::EmptyWindow { lo, hi }
            }
            TraceBasis::SyntheticTrig { .. } => Error::EmptyWindow { lo: 0.0, hi: 0.0 },
        }
    }

    /// (c11, c12, c22) at one boundary point, by direct summation.
    pub fn cij_at(&self, theta: f64) -> (f64, f64, f64) {
        match &self.spec {
            TraceBasis::Window { domain, .. } => match *domain {
                DomainSpec::Disk { radius } => {
                    let mut c11 = 0.0;
                    let mut c12 = 0.0;
                    let mut c22 = 0.0;
                    for mode in &self.modes {
                        let (m, parity, amp) = mode.disk_harmonic().expect("disk mode");
                        let freq = m as f64 / radius;
                        let (s, c) = (freq * theta).sin_cos();
                        let (v, d) = match parity {
                            domain::Parity::Cos => (amp * c, -amp * freq * s),
                            domain::Parity::Sin => (amp * s, amp * freq * c),
                        };
                        c11 += v * v;
                        c12 += v * d;
                        c22 += d * d;
                    }
                    (c11, c12, c22)
                }
                _ => {
                    let mut c11 = 0.0;
                    let mut c12 = 0.0;
                    let mut c22 = 0.0;
                    for mode in &self.modes {
                        let v = mode.trace_value(domain, theta);
                        let d = mode.trace_derivative(domain, theta);
                        c11 += v * v;
                        c12 += v * d;
                        c22 += d * d;
                    }
                    (c11, c12, c22)
                }
            },
            TraceBasis::SyntheticTrig { ms } => {
                let mut c11 = 0.0;
                let mut c12 = 0.0;
                let mut c22 = 0.0;
                for &m in ms {
                    let mf = m as f64;
                    let (s, c) = (mf * theta).sin_cos();
                    // cos branch: v = cos, d = -m sin; sin branch: v = sin, d = m cos
                    c11 += c * c + s * s;
                    c12 += c * (-mf * s) + s * (mf * c);
                    c22 += mf * mf * (s * s + c * c);
                }
                (c11, c12, c22)
            }
        }
    }

    /// Bind one coefficient vector to this basis, yielding an evaluable
    /// realization of the random field.
    pub fn realize(&self, coefficients: CoefficientVector) -> Result<FieldRealization<'_>> {
        match &self.spec {
            TraceBasis::Window { domain, window } => Ok(FieldRealization::Modes(RandomWave::new(
                *domain,
                *window,
                &self.modes,
                coefficients,
            )?)),
            TraceBasis::SyntheticTrig { ms } => {
                Ok(FieldRealization::Synthetic(SyntheticWave::new(ms.clone(), coefficients)?))
            }
        }
    }
}

/// One sampled field V(θ) with a θ-derivative, whichever basis spans it.
#[derive(Debug, Clone)]
pub enum FieldRealization<'a> {
    Modes(RandomWave<'a>),
    Synthetic(SyntheticWave),
}

impl FieldRealization<'_> {
    pub fn value(&self, theta: f64) -> f64 {
        match self {
            FieldRealization::Modes(w) => w.trace_at(theta),
            FieldRealization::Synthetic(w) => w.trace_at(theta),
        }
    }

    pub fn derivative(&self, theta: f64) -> f64 {
        match self {
            FieldRealization::Modes(w) => w.trace_derivative_at(theta),
            FieldRealization::Synthetic(w) => w.trace_derivative_at(theta),
        }
    }

    /// Period of the arclength parameter: the boundary length, or 2π for the
    /// synthetic family.
    pub fn period(&self) -> f64 {
        match self {
            FieldRealization::Modes(w) => w.domain.boundary_length(),
            FieldRealization::Synthetic(_) => std::f64::consts::TAU,
        }
    }

    /// Upper bound on the angular frequency content of V(θ): the window's
    /// upper edge (disk traces oscillate at m/R < λ, rectangle sides at
    /// πp/a, πq/b ≤ λ), or max m for the synthetic family.
    pub fn max_frequency(&self) -> f64 {
        match self {
            FieldRealization::Modes(w) => w.window.bounds().1,
            FieldRealization::Synthetic(w) => {
                w.ms.iter().copied().max().unwrap_or(1) as f64
            }
        }
    }
}

/// Covariance profile over a midpoint θ-grid: nodes, quadrature weights,
/// the three covariance sequences, and the Gram determinant
/// c11·c22 − c12², clipped at zero (tiny negative values are floating-point
/// Cauchy-Schwarz violations; anything beyond −1e-9 of scale is treated as
/// an internal error at construction).
#[derive(Debug, Clone)]
pub struct CijProfile {
    pub thetas: Vec<f64>,
    pub weights: Vec<f64>,
    pub c11: Vec<f64>,
    pub c12: Vec<f64>,
    pub c22: Vec<f64>,
    pub gram_det: Vec<f64>,
    pub ell: f64,
}

impl CijProfile {
    /// Evaluate the covariances of a basis over a `grid_n`-cell midpoint
    /// grid. Cells are mapped in parallel; the result does not depend on the
    /// partitioning.
    pub fn compute(basis: &PreparedBasis, grid_n: usize) -> Result<Self> {
        if basis.is_empty() {
            return Err(basis.empty_window_error());
        }
        let grid = match &basis.spec {
            TraceBasis::Window { domain, .. } => domain.midpoint_grid(grid_n),
            TraceBasis::SyntheticTrig { .. } => {
                let h = std::f64::consts::TAU / grid_n as f64;
                (0..grid_n).map(|i| ((i as f64 + 0.5) * h, h)).collect()
            }
        };
        let cij: Vec<(f64, f64, f64)> =
            grid.par_iter().map(|&(theta, _)| basis.cij_at(theta)).collect();
        let mut profile = CijProfile {
            thetas: grid.iter().map(|&(t, _)| t).collect(),
            weights: grid.iter().map(|&(_, w)| w).collect(),
            c11: cij.iter().map(|c| c.0).collect(),
            c12: cij.iter().map(|c| c.1).collect(),
            c22: cij.iter().map(|c| c.2).collect(),
            gram_det: Vec::new(),
            ell: basis.boundary_length(),
        };
        profile.gram_det = profile
            .c11
            .iter()
            .zip(&profile.c12)
            .zip(&profile.c22)
            .map(|((&a, &b), &c)| a * c - b * b)
            .collect();
        for (i, &g) in profile.gram_det.iter().enumerate() {
            let scale = (profile.c11[i] * profile.c22[i]).max(f64::MIN_POSITIVE);
            if g < -1e-9 * scale {
                return Err(Error::Inconsistent(format!(
                    "Gram determinant {g:.3e} below the Cauchy-Schwarz floor at grid index {i}"
                )));
            }
        }
        Ok(profile)
    }

    /// Covariances for a spectral window on a domain.
    pub fn for_window(
        domain: &DomainSpec,
        window: &SpectralWindow,
        grid_n: usize,
    ) -> Result<Self> {
        let basis = TraceBasis::Window { domain: *domain, window: *window }.prepare()?;
        Self::compute(&basis, grid_n)
    }

    pub fn len(&self) -> usize {
        self.thetas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.thetas.is_empty()
    }

    /// θ-averages (∫c_ij dθ / ℓ) of the three covariances.
    pub fn averages(&self) -> (f64, f64, f64) {
        let mut a = 0.0;
        let mut b = 0.0;
        let mut c = 0.0;
        for i in 0..self.len() {
            a += self.weights[i] * self.c11[i];
            b += self.weights[i] * self.c12[i];
            c += self.weights[i] * self.c22[i];
        }
        (a / self.ell, b / self.ell, c / self.ell)
    }

    fn c11_floor(&self) -> f64 {
        let max = self.c11.iter().fold(0.0f64, |acc, &v| acc.max(v));
        1e-14 * max
    }
}

/// Expected zero density K(θᵢ) = (1/π)·sqrt(max(0, det)/c11²) at one grid
/// index. Errors with DegenerateC11 when every trace vanishes at the node.
pub fn density(profile: &CijProfile, index: usize) -> Result<f64> {
    let c11 = profile.c11[index];
    if !(c11 > profile.c11_floor()) {
        return Err(Error::DegenerateC11 { index });
    }
    let det = profile.gram_det[index].max(0.0);
    Ok(det.sqrt() / (std::f64::consts::PI * c11))
}

/// Result of a Kac-Rice quadrature: the expected count, the density samples
/// on the grid, and the rule that produced them.
#[derive(Debug, Clone, Serialize)]
pub struct KacRiceResult {
    pub z: f64,
    pub density: Vec<f64>,
    pub rule: &'static str,
    pub grid_n: usize,
}

/// Z = ∫₀^ℓ K(θ) dθ over the basis' boundary, by the periodic midpoint rule
/// (composite per side on the rectangle). For smooth periodic integrands
/// the midpoint rule is spectrally accurate, so doubling `grid_n` moves disk
/// results by well under 1e-6 relative.
pub fn expected_zero_count(basis: &PreparedBasis, grid_n: usize) -> Result<KacRiceResult> {
    let profile = CijProfile::compute(basis, grid_n)?;
    let mut z = 0.0;
    let mut samples = Vec::with_capacity(profile.len());
    for i in 0..profile.len() {
        let k = density(&profile, i)?;
        samples.push(k);
        z += profile.weights[i] * k;
    }
    let rule = match &basis.spec {
        TraceBasis::Window { domain: DomainSpec::Rectangle { .. }, .. } => "midpoint_per_side",
        _ => "midpoint_periodic",
    };
    Ok(KacRiceResult { z, density: samples, rule, grid_n: profile.len() })
}

/// Convenience wrapper of [`expected_zero_count`] for a spectral window.
pub fn expected_zero_count_window(
    domain: &DomainSpec,
    window: &SpectralWindow,
    grid_n: usize,
) -> Result<KacRiceResult> {
    let basis = TraceBasis::Window { domain: *domain, window: *window }.prepare()?;
    expected_zero_count(&basis, grid_n)
}

/// ε-regularized density K_ε(θᵢ): the exact Gaussian expectation
/// (1/2ε)·E[1{|V| ≤ ε}·|V′|], evaluated as a 2D integral over
/// v₁ ∈ [−ε, ε], v₂ ∈ ℝ by nested adaptive Simpson quadrature, the inner
/// range truncated at 12·sqrt(c22) and split at the |v₂| kink. K_ε → K with
/// an O(ε²) error on smooth profiles.
pub fn density_regularized(profile: &CijProfile, index: usize, eps: f64) -> Result<f64> {
    if !(eps > 0.0) || !eps.is_finite() {
        return Err(Error::Range(format!("regularization width must be positive: {eps}")));
    }
    let c11 = profile.c11[index];
    if !(c11 > profile.c11_floor()) {
        return Err(Error::DegenerateC11 { index });
    }
    let c12 = profile.c12[index];
    let c22 = profile.c22[index];
    // conditional law of V' given V = v1: mean slope·v1, variance s2
    let slope = c12 / c11;
    let s2 = (c22 - c12 * c12 / c11).max(0.0);
    let tol = 1e-10 * (c22 / c11).sqrt().max(1e-300);
    let phi = |v1: f64| (-0.5 * v1 * v1 / c11).exp() / (std::f64::consts::TAU * c11).sqrt();
    let expected_abs = |v1: f64| -> f64 {
        let mu = slope * v1;
        if s2 <= 1e-30 * c22.max(1.0) {
            return mu.abs();
        }
        let s = s2.sqrt();
        let cut = 12.0 * c22.sqrt();
        let dens = |v2: f64| {
            let d = v2 - mu;
            v2.abs() * (-0.5 * d * d / s2).exp() / (std::f64::consts::TAU * s2).sqrt() / s.max(1e-300) * s
        };
        // |v2| has a kink at 0: integrate the two halves separately
        adaptive_simpson(&dens, -cut, 0.0, tol, 40) + adaptive_simpson(&dens, 0.0, cut, tol, 40)
    };
    // (v1, v2) -> (-v1, -v2) symmetry halves the outer range
    let integrand = |v1: f64| phi(v1) * expected_abs(v1);
    let outer = 2.0 * adaptive_simpson(&integrand, 0.0, eps, tol * eps, 40);
    Ok(outer / (2.0 * eps))
}

/// Recursive adaptive Simpson with Richardson error control.
fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64, depth: u32) -> f64 {
    let m = 0.5 * (a + b);
    let fa = f(a);
    let fm = f(m);
    let fb = f(b);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_step(f, a, b, fa, fm, fb, whole, tol, depth)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        left + right + delta / 15.0
    } else {
        simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
            + simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
    }
}

/// Closed-form asymptotic expected count: ℓλ/(√6π) for the cumulative
/// window, ℓλ/(2π) for the unit band.
pub fn asymptotic_prediction(domain: &DomainSpec, window: &SpectralWindow) -> f64 {
    let ell = domain.boundary_length();
    match window.kind {
        WindowKind::Long => ell * window.lambda / (6.0f64.sqrt() * std::f64::consts::PI),
        WindowKind::Short => ell * window.lambda / (2.0 * std::f64::consts::PI),
    }
}

/// One Weyl-convergence diagnostic: a θ-averaged covariance against its
/// λ-power, next to the limiting constant it should approach.
#[derive(Debug, Clone, Serialize)]
pub struct WeylRow {
    pub lambda: f64,
    pub window: WindowKind,
    pub ratio_name: &'static str,
    pub value: f64,
    pub target: f64,
}

/// Number of band placements averaged for the short-window diagnostics.
pub const SHORT_PLACEMENTS: usize = 8;

/// Convergence table toward the Weyl constants: for each λ, the θ-averaged
/// ratios c11/λ⁴, c22/λ⁶, |c12|/λ⁵ (cumulative window) and c11/λ³, c22/λ⁵,
/// |c12|/λ⁴ (unit band). Unit-band rows are additionally averaged over
/// [`SHORT_PLACEMENTS`] placements λ′ ∈ [λ, λ+1], because a single band
/// holds too few modes for stable ratios.
pub fn weyl_diagnostics(
    domain: &DomainSpec,
    lambdas: &[f64],
    grid_n: usize,
) -> Result<Vec<WeylRow>> {
    let mut rows = Vec::new();
    for &lambda in lambdas {
        let profile = CijProfile::for_window(domain, &SpectralWindow::long(lambda), grid_n)?;
        let (a11, a12, a22) = profile.averages();
        let l = lambda;
        rows.push(WeylRow {
            lambda,
            window: WindowKind::Long,
            ratio_name: "c11_over_lambda4",
            value: a11 / l.powi(4),
            target: 1.0 / (8.0 * std::f64::consts::PI),
        });
        rows.push(WeylRow {
            lambda,
            window: WindowKind::Long,
            ratio_name: "c22_over_lambda6",
            value: a22 / l.powi(6),
            target: 1.0 / (48.0 * std::f64::consts::PI),
        });
        rows.push(WeylRow {
            lambda,
            window: WindowKind::Long,
            ratio_name: "abs_c12_over_lambda5",
            value: a12.abs() / l.powi(5),
            target: 0.0,
        });

        let mut r11 = 0.0;
        let mut r12 = 0.0;
        let mut r22 = 0.0;
        for i in 0..SHORT_PLACEMENTS {
            let lp = lambda + (i as f64 + 0.5) / SHORT_PLACEMENTS as f64;
            let profile = CijProfile::for_window(domain, &SpectralWindow::short(lp), grid_n)?;
            let (a11, a12, a22) = profile.averages();
            r11 += a11 / lp.powi(3);
            r12 += a12.abs() / lp.powi(4);
            r22 += a22 / lp.powi(5);
        }
        let n = SHORT_PLACEMENTS as f64;
        rows.push(WeylRow {
            lambda,
            window: WindowKind::Short,
            ratio_name: "c11_over_lambda3",
            value: r11 / n,
            target: 1.0 / (2.0 * std::f64::consts::PI),
        });
        rows.push(WeylRow {
            lambda,
            window: WindowKind::Short,
            ratio_name: "c22_over_lambda5",
            value: r22 / n,
            target: 1.0 / (8.0 * std::f64::consts::PI),
        });
        rows.push(WeylRow {
            lambda,
            window: WindowKind::Short,
            ratio_name: "abs_c12_over_lambda4",
            value: r12 / n,
            target: 0.0,
        });
    }
    Ok(rows)
}

/// Diagnostics table as CSV: `lambda,window,ratio_name,value,target`.
pub fn weyl_table_csv(rows: &[WeylRow]) -> String {
    let mut out = String::from("lambda,window,ratio_name,value,target\n");
    for row in rows {
        let window = match row.window {
            WindowKind::Long => "long",
            WindowKind::Short => "short",
        };
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            row.lambda, window, row.ratio_name, row.value, row.target
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pair_basis(m: u32) -> PreparedBasis {
        TraceBasis::SyntheticTrig { ms: vec![m] }.prepare().unwrap()
    }

    #[test]
    fn pure_pair_has_pythagorean_covariances() {
        let basis = pair_basis(5);
        let profile = CijProfile::compute(&basis, 64).unwrap();
        for i in 0..profile.len() {
            assert!((profile.c11[i] - 1.0).abs() < 1e-12);
            assert!(profile.c12[i].abs() < 1e-12);
            assert!((profile.c22[i] - 25.0).abs() < 1e-10);
            assert!((density(&profile, i).unwrap() - 5.0 / std::f64::consts::PI).abs() < 1e-12);
        }
    }

    #[test]
    fn pair_zero_count_is_twice_the_frequency() {
        let result = expected_zero_count(&pair_basis(5), 128).unwrap();
        assert!((result.z - 10.0).abs() < 1e-9, "Z = {}", result.z);
        assert_eq!(result.rule, "midpoint_periodic");
    }

    #[test]
    fn ten_frequency_family_matches_the_closed_form() {
        let basis = TraceBasis::SyntheticTrig { ms: (1..=10).collect() }.prepare().unwrap();
        let result = expected_zero_count(&basis, 256).unwrap();
        let expect = 2.0 * 38.5f64.sqrt();
        assert!((result.z - expect).abs() < 1e-9, "Z = {} vs {expect}", result.z);
    }

    #[test]
    fn single_radial_mode_has_zero_density() {
        let disk = DomainSpec::unit_disk();
        let window = SpectralWindow::long(2.5);
        let result = expected_zero_count_window(&disk, &window, 64).unwrap();
        assert_eq!(result.z, 0.0);
        assert!(result.density.iter().all(|&k| k == 0.0));
    }

    #[test]
    fn empty_window_is_reported() {
        let disk = DomainSpec::unit_disk();
        match CijProfile::for_window(&disk, &SpectralWindow::long(0.5), 64) {
            Err(Error::EmptyWindow { lo, hi }) => {
                assert_eq!(lo, 0.0);
                assert_eq!(hi, 0.5);
            }
            other => panic!("expected EmptyWindow, got {other:?}"),
        }
    }

    #[test]
    fn degenerate_c11_is_reported_with_its_index() {
        // hand-built profile: c11 collapses at index 1
        let profile = CijProfile {
            thetas: vec![0.1, 0.2, 0.3],
            weights: vec![0.1, 0.1, 0.1],
            c11: vec![1.0, 1e-20, 1.0],
            c12: vec![0.0, 0.0, 0.0],
            c22: vec![4.0, 4.0, 4.0],
            gram_det: vec![4.0, 4e-20, 4.0],
            ell: 0.3,
        };
        match density(&profile, 1) {
            Err(Error::DegenerateC11 { index }) => assert_eq!(index, 1),
            other => panic!("expected DegenerateC11, got {other:?}"),
        }
        assert!(density(&profile, 0).is_ok());
    }

    #[test]
    fn clipped_gram_gives_zero_density() {
        let profile = CijProfile {
            thetas: vec![0.0],
            weights: vec![1.0],
            c11: vec![2.0],
            c12: vec![0.0],
            c22: vec![0.0],
            gram_det: vec![-1e-18],
            ell: 1.0,
        };
        assert_eq!(density(&profile, 0).unwrap(), 0.0);
    }

    #[test]
    fn predictions_match_the_stated_constants() {
        let disk = DomainSpec::unit_disk();
        let short = asymptotic_prediction(&disk, &SpectralWindow::short(60.0));
        assert!((short - 60.0).abs() < 1e-12);
        let long = asymptotic_prediction(&disk, &SpectralWindow::long(60.0));
        assert!((long - 48.98979485566356).abs() < 1e-10);
        let double = DomainSpec::Disk { radius: 2.0 };
        assert!(
            (asymptotic_prediction(&double, &SpectralWindow::long(60.0)) - 2.0 * long).abs() < 1e-10
        );
    }

    #[test]
    fn regularized_density_converges_quadratically_on_a_pair() {
        let basis = pair_basis(5);
        let profile = CijProfile::compute(&basis, 16).unwrap();
        let exact = 5.0 / std::f64::consts::PI;
        let mut last_err = f64::INFINITY;
        for eps in [1e-1, 1e-2, 1e-3] {
            let k = density_regularized(&profile, 3, eps).unwrap();
            let err = (k - exact).abs();
            assert!(err < last_err.max(1e-12), "eps {eps}: err {err} vs {last_err}");
            // O(eps^2) envelope with a generous constant
            assert!(err <= 5.0 * eps * eps * exact + 1e-10, "eps {eps}: err {err}");
            last_err = err;
        }
    }

    #[test]
    fn regularized_density_respects_the_variance_ratio_bound() {
        let basis = TraceBasis::SyntheticTrig { ms: vec![2, 9, 17] }.prepare().unwrap();
        let profile = CijProfile::compute(&basis, 32).unwrap();
        for i in [0usize, 7, 19] {
            let bound = 1.2 * (profile.c22[i] / profile.c11[i]).sqrt();
            for eps in [1e-1, 1e-2, 1e-3, 1e-4] {
                let k = density_regularized(&profile, i, eps).unwrap();
                assert!(k <= bound, "K_eps {k} above bound {bound}");
            }
        }
    }

    #[test]
    fn regularized_density_of_constant_trace_vanishes() {
        let disk = DomainSpec::unit_disk();
        let profile = CijProfile::for_window(&disk, &SpectralWindow::long(2.5), 16).unwrap();
        let k = density_regularized(&profile, 0, 1e-3).unwrap();
        assert_eq!(k, 0.0);
    }
}
