//! Planar Dirichlet domains with explicit spectra: the disk (where the
//! boundary-intersection theory applies) and the rectangle (diagnostic; its
//! corners break the smoothness hypotheses).
//!
//! Everything downstream consumes three things from here: the eigenmode
//! enumeration for a spectral window, closed-form boundary traces
//! v_j(θ) = ∂_ν φ_j(q(θ)) with their exact θ-derivatives, and the arclength
//! parametrization q(θ) of the boundary. Mode normalizations are precomputed
//! from closed forms at enumeration time so trace evaluation never touches
//! Bessel routines again.
//!
//! Conventions fixed here and relied on everywhere else:
//!
//! * θ is arclength, reduced mod ℓ(∂Ω); the disk starts at (R, 0) and runs
//!   counterclockwise, the rectangle starts at the origin corner and runs
//!   bottom, right, top, left;
//! * ν is the outward normal;
//! * spectral windows are closed on both ends: Long selects λ_j ∈ [0, λ],
//!   Short selects λ_j ∈ [λ, λ+1];
//! * modes are sorted by (λ_j, first quantum number, second, parity) and ids
//!   are assigned after sorting, so enumeration is deterministic.

use crate::specfun::{self, BesselZeroTable};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// Largest window frequency the enumeration accepts.
pub const LAMBDA_MAX: f64 = 200.0;

/// Domain geometry. The disk is the fully validated geometry; rectangle
/// traces exist for Kac-Rice-vs-counting cross checks only.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case")]
pub enum DomainSpec {
    Disk { radius: f64 },
    Rectangle { a: f64, b: f64 },
}

impl DomainSpec {
    pub fn unit_disk() -> Self {
        DomainSpec::Disk { radius: 1.0 }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            DomainSpec::Disk { radius } => radius.is_finite() && radius > 0.0,
            DomainSpec::Rectangle { a, b } => a.is_finite() && b.is_finite() && a > 0.0 && b > 0.0,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Config(format!("domain dimensions must be finite and positive: {self:?}")))
        }
    }

    pub fn boundary_length(&self) -> f64 {
        match *self {
            DomainSpec::Disk { radius } => 2.0 * std::f64::consts::PI * radius,
            DomainSpec::Rectangle { a, b } => 2.0 * (a + b),
        }
    }

    pub fn area(&self) -> f64 {
        match *self {
            DomainSpec::Disk { radius } => std::f64::consts::PI * radius * radius,
            DomainSpec::Rectangle { a, b } => a * b,
        }
    }

    /// Radius of the largest inscribed disk.
    pub fn inradius(&self) -> f64 {
        match *self {
            DomainSpec::Disk { radius } => radius,
            DomainSpec::Rectangle { a, b } => 0.5 * a.min(b),
        }
    }

    /// Arclength parametrization q(θ); θ is reduced mod ℓ(∂Ω).
    pub fn boundary_point(&self, theta: f64) -> (f64, f64) {
        let theta = theta.rem_euclid(self.boundary_length());
        match *self {
            DomainSpec::Disk { radius } => {
                let ang = theta / radius;
                (radius * ang.cos(), radius * ang.sin())
            }
            DomainSpec::Rectangle { a, b } => match RectSide::locate(a, b, theta) {
                (RectSide::Bottom, s) => (s, 0.0),
                (RectSide::Right, s) => (a, s),
                (RectSide::Top, s) => (a - s, b),
                (RectSide::Left, s) => (0.0, b - s),
            },
        }
    }

    /// Midpoint quadrature cells (θ_i, w_i) with Σw_i = ℓ(∂Ω). Cells never
    /// straddle a rectangle corner and no node lands on one: each side gets
    /// its own midpoint rule, with the count split proportionally to side
    /// length. The disk gets exactly `n` uniform cells; the rectangle may
    /// round the per-side counts up.
    pub fn midpoint_grid(&self, n: usize) -> Vec<(f64, f64)> {
        assert!(n >= 4, "midpoint grid needs at least 4 cells");
        match *self {
            DomainSpec::Disk { .. } => {
                let ell = self.boundary_length();
                let h = ell / n as f64;
                (0..n).map(|i| ((i as f64 + 0.5) * h, h)).collect()
            }
            DomainSpec::Rectangle { a, b } => {
                let ell = self.boundary_length();
                let mut grid = Vec::with_capacity(n + 4);
                let mut start = 0.0;
                for len in [a, b, a, b] {
                    let cells = ((n as f64 * len / ell).ceil() as usize).max(1);
                    let h = len / cells as f64;
                    grid.extend((0..cells).map(|i| (start + (i as f64 + 0.5) * h, h)));
                    start += len;
                }
                grid
            }
        }
    }
}

/// Which rectangle side an arclength value falls on, with the distance
/// traveled along that side. Sides are half-open going counterclockwise, so
/// corners belong to the side they begin.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum RectSide {
    Bottom,
    Right,
    Top,
    Left,
}

impl RectSide {
    fn locate(a: f64, b: f64, theta: f64) -> (RectSide, f64) {
        if theta < a {
            (RectSide::Bottom, theta)
        } else if theta < a + b {
            (RectSide::Right, theta - a)
        } else if theta < 2.0 * a + b {
            (RectSide::Top, theta - a - b)
        } else {
            (RectSide::Left, theta - 2.0 * a - b)
        }
    }
}

/// Long = cumulative spectrum [0, λ], Short = unit band [λ, λ+1]. Both ends
/// closed; a mode with λ_j exactly λ belongs to both windows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WindowKind {
    Long,
    Short,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralWindow {
    pub kind: WindowKind,
    pub lambda: f64,
}

impl SpectralWindow {
    pub fn long(lambda: f64) -> Self {
        SpectralWindow { kind: WindowKind::Long, lambda }
    }

    pub fn short(lambda: f64) -> Self {
        SpectralWindow { kind: WindowKind::Short, lambda }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.lambda.is_finite() || self.lambda <= 0.0 {
            return Err(Error::Range(format!("window frequency must be positive: {}", self.lambda)));
        }
        if self.lambda > LAMBDA_MAX {
            return Err(Error::Range(format!(
                "window frequency {} exceeds the supported maximum {LAMBDA_MAX}",
                self.lambda
            )));
        }
        Ok(())
    }

    /// Closed selection interval [lo, hi] for λ_j.
    pub fn bounds(&self) -> (f64, f64) {
        match self.kind {
            WindowKind::Long => (0.0, self.lambda),
            WindowKind::Short => (self.lambda, self.lambda + 1.0),
        }
    }
}

/// Angular dependence of a disk mode. Cos sorts before Sin; m = 0 only has
/// the cos branch (the sin branch is the zero function).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Parity {
    Cos,
    Sin,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ModeNumbers {
    Disk { m: u32, k: u32, parity: Parity },
    Rectangle { p: u32, q: u32 },
}

impl ModeNumbers {
    /// (first, second, parity rank) sort key, shared by both shapes.
    fn sort_key(&self) -> (u32, u32, u8) {
        match *self {
            ModeNumbers::Disk { m, k, parity } => (m, k, parity as u8),
            ModeNumbers::Rectangle { p, q } => (p, q, 0),
        }
    }
}

/// One Dirichlet eigenmode: frequency λ_j (square root of the Laplace
/// eigenvalue), quantum numbers, and the L²(Ω)-unit normalization. The
/// signed boundary trace amplitude is cached at construction for the disk,
/// where the trace is `amp · cos(mθ/R)` (or sin); rectangle traces are
/// evaluated per side from the quantum numbers directly.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EigenMode {
    pub id: u32,
    pub lambda: f64,
    pub numbers: ModeNumbers,
    pub normalization: f64,
    trace_amp: f64,
}

impl EigenMode {
    /// For a disk mode: (m, parity, signed trace amplitude), the closed form
    /// v(θ) = amp · {cos, sin}(mθ/R). The hot paths aggregate over these.
    pub fn disk_harmonic(&self) -> Option<(u32, Parity, f64)> {
        match self.numbers {
            ModeNumbers::Disk { m, parity, .. } => Some((m, parity, self.trace_amp)),
            ModeNumbers::Rectangle { .. } => None,
        }
    }

    /// Boundary trace v_j(θ) = ∂_ν φ_j(q(θ)), outward normal, closed form.
    pub fn trace_value(&self, domain: &DomainSpec, theta: f64) -> f64 {
        let theta = theta.rem_euclid(domain.boundary_length());
        match (self.numbers, domain) {
            (ModeNumbers::Disk { m, parity, .. }, DomainSpec::Disk { radius }) => {
                let ang = m as f64 * theta / radius;
                match parity {
                    Parity::Cos => self.trace_amp * ang.cos(),
                    Parity::Sin => self.trace_amp * ang.sin(),
                }
            }
            (ModeNumbers::Rectangle { p, q }, &DomainSpec::Rectangle { a, b }) => {
                let norm = self.normalization;
                let (fp, fq) = (p as f64 * std::f64::consts::PI / a, q as f64 * std::f64::consts::PI / b);
                match RectSide::locate(a, b, theta) {
                    (RectSide::Bottom, x) => -norm * fq * (fp * x).sin(),
                    (RectSide::Right, y) => norm * fp * sign_pow(p) * (fq * y).sin(),
                    (RectSide::Top, s) => norm * fq * sign_pow(q) * (fp * (a - s)).sin(),
                    (RectSide::Left, s) => -norm * fp * (fq * (b - s)).sin(),
                }
            }
            _ => panic!("mode evaluated on a mismatched domain"),
        }
    }

    /// Exact ∂_θ of [`trace_value`]; one-sided at rectangle corners (the side
    /// owning the corner provides the value).
    pub fn trace_derivative(&self, domain: &DomainSpec, theta: f64) -> f64 {
        let theta = theta.rem_euclid(domain.boundary_length());
        match (self.numbers, domain) {
            (ModeNumbers::Disk { m, parity, .. }, DomainSpec::Disk { radius }) => {
                let freq = m as f64 / radius;
                let ang = freq * theta;
                match parity {
                    Parity::Cos => -self.trace_amp * freq * ang.sin(),
                    Parity::Sin => self.trace_amp * freq * ang.cos(),
                }
            }
            (ModeNumbers::Rectangle { p, q }, &DomainSpec::Rectangle { a, b }) => {
                let norm = self.normalization;
                let (fp, fq) = (p as f64 * std::f64::consts::PI / a, q as f64 * std::f64::consts::PI / b);
                // chain rule: x or y runs backward along the top and left sides
                match RectSide::locate(a, b, theta) {
                    (RectSide::Bottom, x) => -norm * fq * fp * (fp * x).cos(),
                    (RectSide::Right, y) => norm * fp * sign_pow(p) * fq * (fq * y).cos(),
                    (RectSide::Top, s) => -norm * fq * sign_pow(q) * fp * (fp * (a - s)).cos(),
                    (RectSide::Left, s) => norm * fp * fq * (fq * (b - s)).cos(),
                }
            }
            _ => panic!("mode evaluated on a mismatched domain"),
        }
    }

    /// Interior value φ_j(x, y). Pure closed form except for the disk's
    /// radial Bessel factor, which can reject points far outside the domain.
    pub fn eigenfunction_value(&self, domain: &DomainSpec, x: f64, y: f64) -> Result<f64> {
        match (self.numbers, domain) {
            (ModeNumbers::Disk { m, parity, .. }, DomainSpec::Disk { .. }) => {
                let r = x.hypot(y);
                let radial = specfun::bessel_j(m, self.lambda * r)?;
                let ang = m as f64 * y.atan2(x);
                let angular = match parity {
                    Parity::Cos => ang.cos(),
                    Parity::Sin => ang.sin(),
                };
                Ok(self.normalization * radial * angular)
            }
            (ModeNumbers::Rectangle { p, q }, &DomainSpec::Rectangle { a, b }) => {
                let fp = p as f64 * std::f64::consts::PI / a;
                let fq = q as f64 * std::f64::consts::PI / b;
                Ok(self.normalization * (fp * x).sin() * (fq * y).sin())
            }
            _ => Err(Error::Config("mode evaluated on a mismatched domain".into())),
        }
    }
}

/// (−1)^n as a float factor.
fn sign_pow(n: u32) -> f64 {
    if n % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// All eigenmodes with λ_j in the window, sorted by (λ_j, quantum numbers,
/// parity), ids assigned in that order. Each disk (m ≥ 1, k) pair yields a
/// cos and a sin mode with identical λ and amplitude. An empty window yields
/// an empty sequence, not an error.
pub fn enumerate_modes(domain: &DomainSpec, window: &SpectralWindow) -> Result<Vec<EigenMode>> {
    domain.validate()?;
    window.validate()?;
    let (lo, hi) = window.bounds();
    let mut modes = match *domain {
        DomainSpec::Disk { radius } => disk_modes(radius, lo, hi)?,
        DomainSpec::Rectangle { a, b } => rectangle_modes(a, b, lo, hi),
    };
    modes.sort_by(|x, y| {
        x.lambda
            .total_cmp(&y.lambda)
            .then_with(|| x.numbers.sort_key().cmp(&y.numbers.sort_key()))
    });
    for (i, mode) in modes.iter_mut().enumerate() {
        mode.id = i as u32;
    }
    Ok(modes)
}

/// Number of modes in the window (the length of [`enumerate_modes`]).
pub fn mode_count(domain: &DomainSpec, window: &SpectralWindow) -> Result<usize> {
    Ok(enumerate_modes(domain, window)?.len())
}

fn disk_modes(radius: f64, lo: f64, hi: f64) -> Result<Vec<EigenMode>> {
    let cap = hi * radius;
    if cap > specfun::MAX_ORDER as f64 {
        return Err(Error::Range(format!(
            "window needs Bessel zeros up to {cap:.1}, beyond the supported order range"
        )));
    }
    let table = BesselZeroTable::up_to(cap)?;
    let mut modes = Vec::new();
    for (m, k, j) in table.rows() {
        let lambda = j / radius;
        if lambda < lo || lambda > hi {
            continue;
        }
        // J_m'(j) = -J_{m+1}(j) at a zero of J_m; both the L2 norm and the
        // trace amplitude hang off that single value
        let j_next = bessel_next_order(m, j)?;
        let angular_l2 = if m == 0 { std::f64::consts::PI.sqrt() } else { (0.5 * std::f64::consts::PI).sqrt() };
        let normalization = 1.0 / (angular_l2 * radius * j_next.abs());
        let trace_amp = -normalization * j_next * j / radius;
        for parity in [Parity::Cos, Parity::Sin] {
            if m == 0 && parity == Parity::Sin {
                continue;
            }
            modes.push(EigenMode {
                id: 0,
                lambda,
                numbers: ModeNumbers::Disk { m, k, parity },
                normalization,
                trace_amp,
            });
        }
    }
    Ok(modes)
}

/// J_{m+1}(x) without tripping the public order cap at m+1.
fn bessel_next_order(m: u32, x: f64) -> Result<f64> {
    if m < specfun::MAX_ORDER {
        specfun::bessel_j(m + 1, x)
    } else {
        // recurrence from the two highest supported orders
        let jm = specfun::bessel_j(m, x)?;
        let jm1 = specfun::bessel_j(m - 1, x)?;
        Ok(2.0 * m as f64 / x * jm - jm1)
    }
}

fn rectangle_modes(a: f64, b: f64, lo: f64, hi: f64) -> Vec<EigenMode> {
    let normalization = 2.0 / (a * b).sqrt();
    let mut modes = Vec::new();
    let p_max = (hi * a / std::f64::consts::PI).floor() as u32;
    for p in 1..=p_max.max(0) {
        let fp = p as f64 * std::f64::consts::PI / a;
        if fp > hi {
            break;
        }
        let q_cap = (hi * hi - fp * fp).max(0.0).sqrt() * b / std::f64::consts::PI;
        for q in 1..=(q_cap.floor() as u32).max(0) {
            let fq = q as f64 * std::f64::consts::PI / b;
            let lambda = (fp * fp + fq * fq).sqrt();
            if lambda < lo || lambda > hi {
                continue;
            }
            modes.push(EigenMode {
                id: 0,
                lambda,
                numbers: ModeNumbers::Rectangle { p, q },
                normalization,
                trace_amp: normalization,
            });
        }
    }
    modes
}

/// Mode table as CSV: `id,lambda,m_or_p,k_or_q,parity,normalization`, one
/// row per mode in id order. Floats use the shortest round-trip form.
pub fn mode_table_csv(modes: &[EigenMode]) -> String {
    let mut out = String::from("id,lambda,m_or_p,k_or_q,parity,normalization\n");
    for mode in modes {
        let (first, second, parity) = match mode.numbers {
            ModeNumbers::Disk { m, k, parity } => {
                (m, k, if parity == Parity::Cos { "cos" } else { "sin" })
            }
            ModeNumbers::Rectangle { p, q } => (p, q, "none"),
        };
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            mode.id, mode.lambda, first, second, parity, mode.normalization
        ));
    }
    out
}
