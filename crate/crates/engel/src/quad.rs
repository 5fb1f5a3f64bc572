//! Quadrature building blocks shared by the measure routines.
//!
//! Smooth integrands go through nested midpoint refinement with Richardson
//! stopping. All reductions use fixed-order pairwise summation so results
//! are bit-stable regardless of how the cell work is scheduled.

use crate::error::{EngelError, Result};
use rayon::prelude::*;

/// Fixed-order pairwise sum; deterministic for a given slice order.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    match xs.len() {
        0 => 0.0,
        n if n <= 8 => xs.iter().sum(),
        n => {
            let (a, b) = xs.split_at(n / 2);
            pairwise_sum(a) + pairwise_sum(b)
        }
    }
}

/// Tolerances and caps for an adaptive quadrature run.
#[derive(Debug, Clone, Copy)]
pub struct QuadSpec {
    pub rel_tol: f64,
    pub max_cells: usize,
}

impl Default for QuadSpec {
    fn default() -> Self {
        QuadSpec {
            rel_tol: 1e-6,
            max_cells: 1 << 22,
        }
    }
}

/// Composite midpoint value of `f` over `[a, b]` with `n` cells.
fn midpoint_1d<F: Fn(f64) -> f64 + Sync>(f: &F, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let vals: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|i| f(a + (i as f64 + 0.5) * h))
        .collect();
    pairwise_sum(&vals) * h
}

fn midpoint_2d<F: Fn([f64; 2]) -> f64 + Sync>(
    f: &F,
    lo: [f64; 2],
    hi: [f64; 2],
    n: usize,
) -> f64 {
    let h0 = (hi[0] - lo[0]) / n as f64;
    let h1 = (hi[1] - lo[1]) / n as f64;
    let rows: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|i| {
            let u0 = lo[0] + (i as f64 + 0.5) * h0;
            let vals: Vec<f64> = (0..n)
                .map(|j| f([u0, lo[1] + (j as f64 + 0.5) * h1]))
                .collect();
            pairwise_sum(&vals)
        })
        .collect();
    pairwise_sum(&rows) * h0 * h1
}

/// Nested midpoint refinement with Richardson stopping for a smooth 1-D
/// integrand. Doubles the cell count until two successive Richardson
/// extrapolants agree to the relative tolerance.
pub fn integrate_1d<F: Fn(f64) -> f64 + Sync>(
    f: &F,
    a: f64,
    b: f64,
    spec: &QuadSpec,
) -> Result<f64> {
    let mut n = 8usize;
    let mut coarse = midpoint_1d(f, a, b, n);
    let mut prev_rich: Option<f64> = None;
    while n <= spec.max_cells {
        n *= 2;
        let fine = midpoint_1d(f, a, b, n);
        // Midpoint error is O(h^2); one Richardson step removes it.
        let rich = (4.0 * fine - coarse) / 3.0;
        if let Some(p) = prev_rich {
            if (rich - p).abs() <= spec.rel_tol * rich.abs().max(f64::MIN_POSITIVE) {
                return Ok(rich);
            }
        }
        prev_rich = Some(rich);
        coarse = fine;
    }
    let est = prev_rich.unwrap_or(coarse);
    Err(EngelError::ToleranceNotMet {
        estimate: est,
        lo: est,
        hi: est,
        requested: spec.rel_tol,
    })
}

/// 2-D analogue of [`integrate_1d`] over an axis-aligned box.
pub fn integrate_2d<F: Fn([f64; 2]) -> f64 + Sync>(
    f: &F,
    lo: [f64; 2],
    hi: [f64; 2],
    spec: &QuadSpec,
) -> Result<f64> {
    let mut n = 8usize;
    let mut coarse = midpoint_2d(f, lo, hi, n);
    let mut prev_rich: Option<f64> = None;
    while n * n <= spec.max_cells {
        n *= 2;
        let fine = midpoint_2d(f, lo, hi, n);
        let rich = (4.0 * fine - coarse) / 3.0;
        if let Some(p) = prev_rich {
            if (rich - p).abs() <= spec.rel_tol * rich.abs().max(f64::MIN_POSITIVE) {
                return Ok(rich);
            }
        }
        prev_rich = Some(rich);
        coarse = fine;
    }
    let est = prev_rich.unwrap_or(coarse);
    Err(EngelError::ToleranceNotMet {
        estimate: est,
        lo: est,
        hi: est,
        requested: spec.rel_tol,
    })
}

/// Nodes and weights of the 3-point Gauss-Legendre rule on [-1, 1].
pub const GL3_NODES: [f64; 3] = [-0.7745966692414834, 0.0, 0.7745966692414834];
pub const GL3_WEIGHTS: [f64; 3] = [
    0.5555555555555556,
    0.8888888888888888,
    0.5555555555555556,
];

/// 3-point Gauss-Legendre integral of `f` over `[a, b]`.
pub fn gl3_1d<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> f64 {
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut acc = 0.0;
    for (x, w) in GL3_NODES.iter().zip(GL3_WEIGHTS) {
        acc += w * f(mid + half * x);
    }
    acc * half
}

/// Tensor 3x3 Gauss-Legendre integral of `f` over a 2-D box.
pub fn gl3_2d<F: Fn([f64; 2]) -> f64>(f: &F, lo: [f64; 2], hi: [f64; 2]) -> f64 {
    let mid = [0.5 * (lo[0] + hi[0]), 0.5 * (lo[1] + hi[1])];
    let half = [0.5 * (hi[0] - lo[0]), 0.5 * (hi[1] - lo[1])];
    let mut acc = 0.0;
    for (x0, w0) in GL3_NODES.iter().zip(GL3_WEIGHTS) {
        for (x1, w1) in GL3_NODES.iter().zip(GL3_WEIGHTS) {
            acc += w0 * w1 * f([mid[0] + half[0] * x0, mid[1] + half[1] * x1]);
        }
    }
    acc * half[0] * half[1]
}

/// Ordinary least-squares slope of `ys` against `xs`.
pub fn ols_slope(xs: &[f64], ys: &[f64]) -> f64 {
    assert_eq!(xs.len(), ys.len());
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

/// Slope of `log y` against `log x`; inputs must be positive.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    ols_slope(&lx, &ly)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pairwise_matches_naive() {
        let xs: Vec<f64> = (0..1000).map(|i| (i as f64).sin()).collect();
        let naive: f64 = xs.iter().sum();
        assert!((pairwise_sum(&xs) - naive).abs() < 1e-9);
        assert_eq!(pairwise_sum(&[]), 0.0);
    }

    #[test]
    fn integrates_polynomials_exactly_enough() {
        let spec = QuadSpec::default();
        let v = integrate_1d(&|t: f64| t * t, 0.0, 1.0, &spec).unwrap();
        assert!((v - 1.0 / 3.0).abs() < 1e-9);
        let w = integrate_2d(&|u: [f64; 2]| 0.5 * u[0] * u[0], [-1.0, -1.0], [1.0, 1.0], &spec)
            .unwrap();
        assert!((w - 2.0 / 3.0).abs() < 1e-9);
    }

    #[test]
    fn integrates_kinked_absolute_value() {
        let spec = QuadSpec::default();
        let v = integrate_1d(&|t: f64| t.abs(), -1.0, 1.0, &spec).unwrap();
        assert!((v - 1.0).abs() < 1e-6);
    }

    #[test]
    fn gl3_exact_on_quintics() {
        let v = gl3_1d(&|t: f64| t.powi(5) + t.powi(2), 0.0, 2.0);
        assert!((v - (64.0 / 6.0 + 8.0 / 3.0)).abs() < 1e-12);
    }

    #[test]
    fn slope_fit_recovers_exponent() {
        let xs: Vec<f64> = (1..=8).map(|k| 2.0f64.powi(-k)).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 3.5 * x.powf(1.5)).collect();
        assert!((loglog_slope(&xs, &ys) - 1.5).abs() < 1e-12);
    }
}
