//! Hand-rolled oracles shared by the integration suites. Everything here is
//! deliberately independent of the library internals: plain uncompensated
//! series, plain bisection, textbook Gauss-Legendre nodes.
#![allow(dead_code)]

/// Ascending-series Jₘ(x), summed term by term with a fixed 600-term cap.
/// Valid wherever the largest term stays within ~1e4 of the result (x ≲ 14),
/// giving at least ~1e-12 absolute accuracy there.
pub fn series_j(m: u32, x: f64) -> f64 {
    let half = 0.5 * x;
    let mut term = 1.0f64;
    for i in 1..=m {
        term *= half / i as f64;
    }
    let mut sum = term;
    for k in 1..600u32 {
        term *= -half * half / (k as f64 * (m + k) as f64);
        sum += term;
        if term.abs() < 1e-22 {
            break;
        }
    }
    sum
}

/// Plain bisection on a sign change, run to 200 halvings.
pub fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let flo = f(lo);
    assert!(flo * f(hi) < 0.0, "bisect needs a sign change on [{lo}, {hi}]");
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        if f(mid) * flo > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Gauss-Legendre nodes and weights on [-1, 1], by Newton iteration on Pₙ
/// from the Chebyshev initial guess.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    assert!(n >= 2);
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_deriv(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        out.push((x, w));
    }
    out.sort_by(|a, b| a.0.total_cmp(&b.0));
    out
}

fn legendre_with_deriv(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0f64;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Integrate f over [a, b] with a fixed-order Gauss-Legendre rule.
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, nodes: &[(f64, f64)]) -> f64 {
    let mid = 0.5 * (a + b);
    let halfw = 0.5 * (b - a);
    nodes.iter().map(|&(x, w)| w * f(mid + halfw * x)).sum::<f64>() * halfw
}

/// erf by its ascending series, accurate to ~1e-15 for |x| <= 1. The
/// regularized-density comparisons only need tiny arguments.
pub fn erf_small(x: f64) -> f64 {
    assert!(x.abs() <= 1.0);
    let mut term = x;
    let mut sum = x;
    for n in 1..60 {
        term *= -x * x / n as f64;
        sum += term / (2.0 * n as f64 + 1.0);
        if term.abs() < 1e-20 {
            break;
        }
    }
    sum * 2.0 / std::f64::consts::PI.sqrt()
}

/// Golden Bessel zeros (m, k, j_mk), 15 significant digits from a
/// high-precision reference implementation.
pub fn bessel_zero_fixture() -> Vec<(u32, u32, f64)> {
    let text = include_str!("../fixtures/bessel_zeros.csv");
    text.lines()
        .skip(1)
        .map(|line| {
            let mut parts = line.split(',');
            let m = parts.next().unwrap().parse().unwrap();
            let k = parts.next().unwrap().parse().unwrap();
            let j = parts.next().unwrap().parse().unwrap();
            (m, k, j)
        })
        .collect()
}
