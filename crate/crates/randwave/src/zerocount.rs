//! Zero counting for boundary traces: sign-change scans with bisection
//! refinement and grid-doubling verification, an exactly evaluated
//! regularized count, and the boundary/interior correspondence check on the
//! disk.
//!
//! The counting contract is conservative: a count is only reported when two
//! consecutive grid resolutions agree, and a bracket whose refined root has
//! a near-vanishing derivative is re-scanned at 16x resolution before it is
//! trusted. Counts that fail to stabilize surface as
//! [`Error::UnresolvedZeros`] so callers can exclude the trial explicitly
//! rather than ship a number nobody verified.

use std::f64::consts::TAU;

use serde::Serialize;

use crate::domain::{DomainSpec, Parity};
use crate::ensemble::{FourierAggregate, RandomWave};
use crate::kacrice::FieldRealization;
use crate::specfun;
use crate::{Error, Result};

/// Default root refinement tolerance, relative to the period.
pub const DEFAULT_REFINE_TOL_REL: f64 = 1e-12;

/// A refined root whose derivative magnitude is below this fraction of the
/// derivative scale sup|V|·max_freq is suspicious (possible near-double
/// zero); its bracket gets a local re-scan at 16x resolution.
pub const SUSPICIOUS_REL: f64 = 1e-10;

const LOCAL_REFINE: usize = 16;

/// Refined zeros of one realization over its period.
#[derive(Debug, Clone, Serialize)]
pub struct ZeroSet {
    pub count: usize,
    /// Sorted, strictly increasing, in [0, period).
    pub locations: Vec<f64>,
    /// Per-zero condition number |∂_θV(θ_i)| / sup|V|.
    pub flags: Vec<f64>,
    /// Signed ∂_θV at each zero; `flags` are these over `sup_abs`.
    pub derivs: Vec<f64>,
    /// Grid estimate of sup|V| from the accepted scan.
    pub sup_abs: f64,
    /// Some bracket tripped the near-double-zero test and was locally
    /// re-scanned. The reported roots are still refined to tolerance.
    pub suspicious: bool,
}

/// Smallest admissible scan grid for frequency content up to `max_freq` over
/// a period `ell`: eight points per shortest oscillation.
pub fn minimum_grid(max_freq: f64, ell: f64) -> usize {
    ((8.0 * max_freq * ell / TAU).ceil() as usize).max(4)
}

/// Count and locate the zeros of V by sign-change scanning on a midpoint
/// grid, bisecting each bracket to `refine_tol` (default 1e-12 of the
/// period). The scan is repeated on doubled grids until two consecutive
/// counts agree; disagreement after two doublings is an
/// [`Error::UnresolvedZeros`].
///
/// `grid_n` must resolve the field's frequency content ([`minimum_grid`]).
/// The midpoint offset keeps rectangle corners, where every trace vanishes
/// identically, off the grid; a corner zero is then found by bisection only
/// when the signs across the corner actually differ.
pub fn count_zeros(
    field: &FieldRealization<'_>,
    grid_n: usize,
    refine_tol: Option<f64>,
) -> Result<ZeroSet> {
    let ell = field.period();
    let floor = minimum_grid(field.max_frequency(), ell);
    if grid_n < floor {
        return Err(Error::Range(format!(
            "grid_n = {grid_n} under-resolves frequency {:.3}; need at least {floor}",
            field.max_frequency()
        )));
    }
    let tol = refine_tol.unwrap_or(DEFAULT_REFINE_TOL_REL * ell);
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::Range(format!("refine_tol must be positive and finite: {tol}")));
    }

    // midpoint grids at n and 2n share no points, so a tight zero pair can
    // be visible at n, hidden at 2n, and visible again at 4n; the finest
    // scan is accepted once it agrees with either earlier one
    let s1 = scan(field, ell, grid_n);
    let s2 = scan(field, ell, grid_n * 2);
    if s2.brackets.len() == s1.brackets.len() {
        return resolve(field, ell, &s2, tol);
    }
    let s3 = scan(field, ell, grid_n * 4);
    if s3.brackets.len() == s2.brackets.len() || s3.brackets.len() == s1.brackets.len() {
        return resolve(field, ell, &s3, tol);
    }
    Err(Error::UnresolvedZeros {
        counts: vec![s1.brackets.len(), s2.brackets.len(), s3.brackets.len()],
    })
}

/// Sign brackets of V on the midpoint grid θ_i = (i + 1/2)·ell/n. An exact
/// grid-point zero becomes a degenerate bracket.
struct Scan {
    sup: f64,
    /// (a, b, V(a)) with sign(V(a)) ≠ sign(V(b)), or a == b for an exact hit.
    brackets: Vec<(f64, f64, f64)>,
}

fn scan(field: &FieldRealization<'_>, ell: f64, n: usize) -> Scan {
    let step = ell / n as f64;
    let vals: Vec<f64> = (0..n).map(|i| field.value((i as f64 + 0.5) * step)).collect();
    let sup = vals.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mut brackets = Vec::new();
    for i in 0..n {
        let a = (i as f64 + 0.5) * step;
        let va = vals[i];
        if va == 0.0 {
            brackets.push((a, a, 0.0));
            continue;
        }
        let vb = vals[(i + 1) % n];
        if va * vb < 0.0 {
            brackets.push((a, a + step, va));
        }
    }
    Scan { sup, brackets }
}

fn resolve(field: &FieldRealization<'_>, ell: f64, scan: &Scan, tol: f64) -> Result<ZeroSet> {
    let sup = scan.sup;
    if sup == 0.0 {
        return Err(Error::Inconsistent("trace vanished on the whole scan grid".into()));
    }
    let deriv_scale = sup * field.max_frequency();
    let mut suspicious = false;
    let mut locations = Vec::with_capacity(scan.brackets.len());
    for &(a, b, va) in &scan.brackets {
        if a == b {
            locations.push(a.rem_euclid(ell));
            continue;
        }
        let root = bisect(field, a, b, va, tol);
        if field.derivative(root).abs() < SUSPICIOUS_REL * deriv_scale {
            suspicious = true;
            let fine = rescan_bracket(field, a, b, tol);
            if fine.is_empty() {
                locations.push(root.rem_euclid(ell));
            } else {
                locations.extend(fine.into_iter().map(|r| r.rem_euclid(ell)));
            }
        } else {
            locations.push(root.rem_euclid(ell));
        }
    }
    locations.sort_by(f64::total_cmp);
    debug_assert!(locations.windows(2).all(|w| w[1] > w[0]));
    let derivs: Vec<f64> = locations.iter().map(|&r| field.derivative(r)).collect();
    let flags: Vec<f64> = derivs.iter().map(|d| d.abs() / sup).collect();
    Ok(ZeroSet { count: locations.len(), locations, flags, derivs, sup_abs: sup, suspicious })
}

fn bisect(field: &FieldRealization<'_>, mut a: f64, mut b: f64, mut va: f64, tol: f64) -> f64 {
    while b - a > tol {
        let mid = 0.5 * (a + b);
        let vm = field.value(mid);
        if vm == 0.0 {
            return mid;
        }
        if (vm > 0.0) == (va > 0.0) {
            a = mid;
            va = vm;
        } else {
            b = mid;
        }
    }
    0.5 * (a + b)
}

/// Re-scan one suspicious bracket at 16x resolution and refine whatever
/// sign changes show up (possibly more than one).
fn rescan_bracket(field: &FieldRealization<'_>, a: f64, b: f64, tol: f64) -> Vec<f64> {
    let h = (b - a) / LOCAL_REFINE as f64;
    let vals: Vec<f64> = (0..=LOCAL_REFINE).map(|k| field.value(a + k as f64 * h)).collect();
    let mut roots = Vec::new();
    for k in 0..LOCAL_REFINE {
        let (p, vp) = (a + k as f64 * h, vals[k]);
        if vp == 0.0 {
            roots.push(p);
            continue;
        }
        if vp * vals[k + 1] < 0.0 {
            roots.push(bisect(field, p, p + h, vp, tol));
        }
    }
    if vals[LOCAL_REFINE] == 0.0 {
        roots.push(b);
    }
    roots
}

/// Count sign changes of a periodic function on a midpoint grid, accepting
/// the count only once two consecutive grid doublings agree.
pub fn stable_sign_changes(f: &dyn Fn(f64) -> f64, period: f64, base_n: usize) -> Result<usize> {
    if base_n < 4 {
        return Err(Error::Range(format!("sign-change grid too small: {base_n}")));
    }
    let c1 = grid_sign_changes(f, period, base_n);
    let c2 = grid_sign_changes(f, period, base_n * 2);
    if c2 == c1 {
        return Ok(c2);
    }
    let c3 = grid_sign_changes(f, period, base_n * 4);
    if c3 == c2 || c3 == c1 {
        return Ok(c3);
    }
    Err(Error::UnresolvedZeros { counts: vec![c1, c2, c3] })
}

fn grid_sign_changes(f: &dyn Fn(f64) -> f64, period: f64, n: usize) -> usize {
    let step = period / n as f64;
    let vals: Vec<f64> = (0..n).map(|i| f((i as f64 + 0.5) * step)).collect();
    let mut count = 0;
    for i in 0..n {
        let va = vals[i];
        if va == 0.0 || va * vals[(i + 1) % n] < 0.0 {
            count += 1;
        }
    }
    count
}

/// Regularized zero count (1/2ε)·∫ 1[|V| ≤ ε]·|∂_θV| dθ over one period.
///
/// The integral is evaluated in closed form: `quad_n` uniform panels (split
/// additionally at rectangle corners, where ∂_θV jumps) are cut into
/// monotone pieces by bisecting sign changes of ∂_θV, and on a monotone
/// piece the integral is the overlap |clamp(V(q)) − clamp(V(p))| of the
/// value range with [−ε, ε]. Every simple crossing of the band edges ±ε is
/// thereby bracketed exactly, so V = sin θ yields exactly 2 for any
/// ε ∈ (0, 1) and a nonvanishing constant trace yields exactly 0.
///
/// The functional counts tangential zeros, which [`count_zeros`] does not: a
/// same-sign dip to zero has band variation 2ε, indistinguishable from a
/// crossing. Rectangle traces dip that way at all four corners, so their
/// regularized counts sit close to sign-change count + 4.
pub fn regularized_count(field: &FieldRealization<'_>, eps: f64, quad_n: usize) -> Result<f64> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::Range(format!("band half-width must be positive and finite: {eps}")));
    }
    if quad_n < 4 {
        return Err(Error::Range(format!("quad_n too small: {quad_n}")));
    }
    let ell = field.period();
    let mut edges: Vec<f64> = (0..=quad_n).map(|i| i as f64 * ell / quad_n as f64).collect();
    if let FieldRealization::Modes(w) = field {
        if let DomainSpec::Rectangle { a, b } = w.domain {
            edges.extend_from_slice(&[a, a + b, 2.0 * a + b]);
            edges.sort_by(f64::total_cmp);
            edges.dedup();
        }
    }
    let mut total = 0.0;
    for pair in edges.windows(2) {
        let (p, q) = (pair[0], pair[1]);
        if q <= p {
            continue;
        }
        let (vp, vq) = (field.value(p), field.value(q));
        let (dp, dq) = (field.derivative(p), field.derivative(q));
        total += band_variation(field, eps, p, q, vp, vq, dp, dq, 0);
    }
    Ok(total / (2.0 * eps))
}

/// ∫_p^q 1[|V| ≤ ε]·|∂_θV| over a panel. Derivative endpoint signs decide
/// monotonicity; a sign change is split at its bisected extremum, and a
/// shallow midpoint probe catches a hidden extremum pair.
#[allow(clippy::too_many_arguments)]
fn band_variation(
    field: &FieldRealization<'_>,
    eps: f64,
    p: f64,
    q: f64,
    vp: f64,
    vq: f64,
    dp: f64,
    dq: f64,
    depth: u32,
) -> f64 {
    let clamp = |v: f64| v.clamp(-eps, eps);
    if dp != 0.0 && dq != 0.0 && (dp > 0.0) != (dq > 0.0) {
        let x = bisect_extremum(field, p, q, dp);
        let vx = field.value(x);
        return band_variation(field, eps, p, x, vp, vx, dp, 0.0, depth + 1)
            + band_variation(field, eps, x, q, vx, vq, 0.0, dq, depth + 1);
    }
    if depth < 2 {
        let mid = 0.5 * (p + q);
        let dm = field.derivative(mid);
        let dref = if dp != 0.0 { dp } else { dq };
        if dm != 0.0 && dref != 0.0 && (dm > 0.0) != (dref > 0.0) {
            let vm = field.value(mid);
            return band_variation(field, eps, p, mid, vp, vm, dp, dm, depth + 1)
                + band_variation(field, eps, mid, q, vm, vq, dm, dq, depth + 1);
        }
    }
    (clamp(vq) - clamp(vp)).abs()
}

fn bisect_extremum(field: &FieldRealization<'_>, mut p: f64, mut q: f64, mut dp: f64) -> f64 {
    for _ in 0..60 {
        let mid = 0.5 * (p + q);
        let dm = field.derivative(mid);
        if dm == 0.0 {
            return mid;
        }
        if (dm > 0.0) == (dp > 0.0) {
            p = mid;
            dp = dm;
        } else {
            q = mid;
        }
    }
    0.5 * (p + q)
}

/// Outcome of the boundary/interior correspondence check: zeros of the
/// boundary trace versus sign changes of Φ on the inward offset circle.
/// Equality is the discrete footprint of nodal lines meeting the boundary
/// transversally.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct HopfCheck {
    pub boundary_count: usize,
    pub interior_count: usize,
    pub matches: bool,
}

/// Compare the trace zero count with the sign changes of Φ on the circle of
/// radius R − δ. Disk only; δ must lie in (0, inradius/100]. The interior
/// profile is a single Fourier series whose coefficients fold each mode's
/// radial factor J_m(λ_j (R − δ)) once, so the angular sweep costs the same
/// as a boundary sweep.
pub fn hopf_check(wave: &RandomWave<'_>, delta: f64, grid_n: usize) -> Result<HopfCheck> {
    let DomainSpec::Disk { radius } = wave.domain else {
        return Err(Error::Config(
            "boundary/interior correspondence is only defined on the disk".into(),
        ));
    };
    let cap = 0.01 * wave.domain.inradius();
    if !(delta > 0.0 && delta <= cap) {
        return Err(Error::Range(format!("offset delta must lie in (0, {cap}]: {delta}")));
    }

    let field = FieldRealization::Modes(wave.clone());
    let boundary = count_zeros(&field, grid_n, None)?;

    let r0 = radius - delta;
    let max_m = wave
        .modes
        .iter()
        .filter_map(|m| m.disk_harmonic().map(|(order, _, _)| order))
        .max()
        .unwrap_or(0) as usize;
    let mut cos_amp = vec![0.0; max_m + 1];
    let mut sin_amp = vec![0.0; max_m + 1];
    for (mode, &a) in wave.modes.iter().zip(&wave.coefficients.values) {
        let Some((m, parity, _)) = mode.disk_harmonic() else {
            return Err(Error::Inconsistent("disk wave holds a non-disk mode".into()));
        };
        let radial = mode.normalization * specfun::bessel_j(m, mode.lambda * r0)?;
        match parity {
            Parity::Cos => cos_amp[m as usize] += a * radial,
            Parity::Sin => sin_amp[m as usize] += a * radial,
        }
    }
    let offset = FourierAggregate { inv_radius: 1.0, cos_amp, sin_amp };
    let interior = stable_sign_changes(&|phi| offset.value(phi), TAU, grid_n)?;
    Ok(HopfCheck {
        boundary_count: boundary.count,
        interior_count: interior,
        matches: boundary.count == interior,
    })
}

pub const ZERO_DUMP_HEADER: &str = "trial,root_index,theta,deriv_at_root";

/// CSV rows (no header) for one trial's zero dump.
pub fn zero_dump_rows(trial: u64, set: &ZeroSet) -> String {
    let mut out = String::new();
    for (i, (&theta, &deriv)) in set.locations.iter().zip(&set.derivs).enumerate() {
        out.push_str(&format!(
            "{trial},{i},{},{}\n",
            crate::round_sig(theta, 12),
            crate::round_sig(deriv, 12)
        ));
    }
    out
}
