//! Independent brute-force certification of the core algebra and Monte
//! Carlo cross-checks of the measure quadrature.
//!
//! These oracles ship with the library (not only the tests) so binary
//! users can re-certify the numerical claims on their own platform; the
//! CLI exposes them under the `certify` subcommand.

use crate::error::{EngelError, Result};
use crate::group::{frame_at, GroupPoint};
use crate::quad::pairwise_sum;
use crate::submanifold::Submanifold;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Residual thresholds for the group-law certification.
pub const ALGEBRAIC_RESIDUAL_MAX: f64 = 1e-12;
pub const FINITE_DIFFERENCE_RESIDUAL_MAX: f64 = 1e-6;
/// Step for the finite-difference push-forward of coordinate directions.
pub const FD_STEP: f64 = 1e-4;

/// Max residuals observed over the sampled checks.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct CertificationReport {
    pub samples: usize,
    pub seed: u64,
    /// `(x y) z` against `x (y z)`, relative.
    pub associativity: f64,
    /// `x x^-1` and `x^-1 x` against the identity.
    pub inverse: f64,
    /// `delta_r(x) delta_r(y)` against `delta_r(x y)`, relative.
    pub dilation_automorphism: f64,
    /// Finite-difference left-translation differential against the frame.
    pub frame_invariance: f64,
    pub passed: bool,
}

impl CertificationReport {
    pub fn max_algebraic(&self) -> f64 {
        self.associativity
            .max(self.inverse)
            .max(self.dilation_automorphism)
    }
}

/// Certify an arbitrary candidate (law, inverse, dilation) triple against
/// the frame fields; the public entry point passes the shipped operations,
/// tests pass perturbed ones as negative controls.
pub fn certify_law(
    law: &dyn Fn(&GroupPoint, &GroupPoint) -> GroupPoint,
    inverse: &dyn Fn(&GroupPoint) -> GroupPoint,
    dilation: &dyn Fn(f64, &GroupPoint) -> GroupPoint,
    samples: usize,
    seed: u64,
) -> Result<CertificationReport> {
    if samples < 1000 {
        return Err(EngelError::Domain(
            "certification needs at least 10^3 samples".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rand_point = |range: f64| -> GroupPoint {
        GroupPoint::new(
            rng.random_range(-range..range),
            rng.random_range(-range..range),
            rng.random_range(-range..range),
            rng.random_range(-range..range),
        )
    };

    let mut worst_assoc = 0.0f64;
    let mut worst_inv = 0.0f64;
    let mut worst_dil = 0.0f64;
    let mut worst_frame = 0.0f64;

    for k in 0..samples {
        let x = rand_point(2.0);
        let y = rand_point(2.0);
        let z = rand_point(2.0);

        let lhs = law(&law(&x, &y), &z);
        let rhs = law(&x, &law(&y, &z));
        for (l, r) in lhs.coords().iter().zip(rhs.coords()) {
            let scale = 1.0f64.max(l.abs()).max(r.abs());
            worst_assoc = worst_assoc.max((l - r).abs() / scale);
        }

        let e1 = law(&x, &inverse(&x));
        let e2 = law(&inverse(&x), &x);
        let scale = 1.0f64.max(x.coords().iter().fold(0.0f64, |m, c| m.max(c.abs())).powi(3));
        for e in [e1, e2] {
            for c in e.coords() {
                worst_inv = worst_inv.max(c.abs() / scale);
            }
        }

        let r = 0.25 + 3.75 * (k % 17) as f64 / 16.0;
        let lhs = law(&dilation(r, &x), &dilation(r, &y));
        let rhs = dilation(r, &law(&x, &y));
        for (l, rr) in lhs.coords().iter().zip(rhs.coords()) {
            let scale = 1.0f64.max(rr.abs());
            worst_dil = worst_dil.max((l - rr).abs() / scale);
        }

        // Differential of the left translation by x at the identity,
        // against the closed-form frame columns.
        let cols = frame_at(&x);
        for (i, col) in cols.iter().enumerate() {
            let mut plus = [0.0; 4];
            plus[i] = FD_STEP;
            let mut minus = [0.0; 4];
            minus[i] = -FD_STEP;
            let p = law(&x, &GroupPoint::from(plus));
            let m = law(&x, &GroupPoint::from(minus));
            for ((pk, mk), ck) in p.coords().iter().zip(m.coords()).zip(col) {
                let fd = (pk - mk) / (2.0 * FD_STEP);
                worst_frame = worst_frame.max((fd - ck).abs());
            }
        }
    }

    let passed = worst_assoc < ALGEBRAIC_RESIDUAL_MAX
        && worst_inv < ALGEBRAIC_RESIDUAL_MAX
        && worst_dil < ALGEBRAIC_RESIDUAL_MAX
        && worst_frame < FINITE_DIFFERENCE_RESIDUAL_MAX;

    Ok(CertificationReport {
        samples,
        seed,
        associativity: worst_assoc,
        inverse: worst_inv,
        dilation_automorphism: worst_dil,
        frame_invariance: worst_frame,
        passed,
    })
}

/// Certify the shipped group law. Returns `Err(Certification)` if any
/// residual exceeds its threshold.
pub fn certify_group_law(samples: usize, seed: u64) -> Result<CertificationReport> {
    let report = certify_law(
        &|a, b| a.mul(b),
        &|a| a.inv(),
        &|r, a| a.dilate(r).expect("positive factor"),
        samples,
        seed,
    )?;
    if !report.passed {
        return Err(EngelError::Certification(format!(
            "residuals assoc {:.3e}, inverse {:.3e}, dilation {:.3e}, frame {:.3e}",
            report.associativity,
            report.inverse,
            report.dilation_automorphism,
            report.frame_invariance
        )));
    }
    Ok(report)
}

/// Monte Carlo estimate of a ball-intersection measure.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct McEstimate {
    pub value: f64,
    pub stderr: f64,
    pub samples: usize,
    pub hits: usize,
    pub seed: u64,
    /// No sample landed in the ball: the estimate carries no information
    /// at this radius.
    pub undersampled: bool,
}

/// Unbiased uniform-parameter-domain estimator of
/// `integral of J_phi * 1[dist(x, phi(u)) <= r]`.
pub fn mc_measure(
    sigma: &Submanifold,
    x: &GroupPoint,
    r: f64,
    samples: usize,
    seed: u64,
) -> Result<McEstimate> {
    if samples < 10_000 {
        return Err(EngelError::Domain(
            "Monte Carlo measure needs at least 10^4 samples".into(),
        ));
    }
    if !r.is_finite() || r <= 0.0 {
        return Err(EngelError::Domain(format!("radius must be positive, got {r}")));
    }
    let domain = sigma.domain();
    let volume: f64 = domain.iter().map(|iv| iv[1] - iv[0]).product();
    let inv_x = x.inv();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut values: Vec<f64> = Vec::with_capacity(samples);
    let mut hits = 0usize;
    let mut u = vec![0.0f64; domain.len()];
    for _ in 0..samples {
        for (slot, iv) in u.iter_mut().zip(&domain) {
            *slot = rng.random_range(iv[0]..iv[1]);
        }
        let inside = crate::group::ball_contains(&inv_x, r, &sigma.point(&u));
        if inside {
            hits += 1;
            values.push(sigma.riemannian_jacobian(&u));
        } else {
            values.push(0.0);
        }
    }
    let mean = pairwise_sum(&values) / samples as f64;
    let sq: Vec<f64> = values.iter().map(|v| (v - mean) * (v - mean)).collect();
    let var = pairwise_sum(&sq) / (samples as f64 - 1.0);
    let stderr = volume * (var / samples as f64).sqrt();
    Ok(McEstimate {
        value: volume * mean,
        stderr,
        samples,
        hits,
        seed,
        undersampled: hits == 0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::measure::{ball_measure_anchored, BallQuadSpec};

    #[test]
    fn shipped_law_certifies() {
        let report = certify_group_law(10_000, 0).unwrap();
        assert!(report.passed);
        assert!(report.max_algebraic() < ALGEBRAIC_RESIDUAL_MAX);
        assert!(report.frame_invariance < FINITE_DIFFERENCE_RESIDUAL_MAX);
        // Verdict does not depend on the seed: the checks are identities.
        let other = certify_group_law(10_000, 42).unwrap();
        assert!(other.passed);
    }

    #[test]
    fn perturbed_law_fails_certification() {
        let good_law = |a: &GroupPoint, b: &GroupPoint| a.mul(b);
        let good_inv = |a: &GroupPoint| a.inv();
        let good_dil = |r: f64, a: &GroupPoint| a.dilate(r).unwrap();

        // Wrong sign on the second-layer twist.
        let bad_law = |a: &GroupPoint, b: &GroupPoint| GroupPoint {
            x1: a.x1 + b.x1,
            x2: a.x2 + b.x2,
            x3: a.x3 + b.x3 - a.x1 * b.x2,
            x4: a.x4 + b.x4 + a.x1 * b.x3 + 0.5 * a.x1 * a.x1 * b.x2,
        };
        let report = certify_law(&bad_law, &good_inv, &good_dil, 2_000, 0).unwrap();
        assert!(!report.passed);

        // Abelian-style inverse that forgets the polynomial corrections.
        let bad_inv = |a: &GroupPoint| GroupPoint {
            x1: -a.x1,
            x2: -a.x2,
            x3: -a.x3,
            x4: -a.x4,
        };
        let report = certify_law(&good_law, &bad_inv, &good_dil, 2_000, 0).unwrap();
        assert!(!report.passed);

        // Wrong weight table: top layer dilated with weight 2 instead of 3.
        let bad_dil = |r: f64, a: &GroupPoint| GroupPoint {
            x1: r * a.x1,
            x2: r * a.x2,
            x3: r * r * a.x3,
            x4: r * r * a.x4,
        };
        let report = certify_law(&good_law, &good_inv, &bad_dil, 2_000, 0).unwrap();
        assert!(!report.passed);
    }

    #[test]
    fn mc_matches_closed_form_on_plane() {
        let plane = catalog::plane();
        let r = 0.1;
        let est = mc_measure(&plane, &GroupPoint::IDENTITY, r, 1_000_000, 0).unwrap();
        let exact = 4.0 * r * r + 2.0 * r.powi(4) / 3.0;
        assert!(!est.undersampled);
        assert!(
            (est.value - exact).abs() <= 3.0 * est.stderr,
            "MC {} +- {} vs exact {exact}",
            est.value,
            est.stderr
        );
    }

    #[test]
    fn mc_agrees_with_quadrature_on_canonical_surfaces() {
        let spec = BallQuadSpec::default();
        let cases = [
            (catalog::plane(), vec![0.0, 0.0], 0.1),
            (catalog::ruled_x1x3(), vec![0.0, 0.0], 0.1),
            (catalog::graph_deg3(), vec![0.5, 0.5], 0.1),
        ];
        for (sigma, u0, r) in cases {
            let x = sigma.point(&u0);
            let quad = ball_measure_anchored(&sigma, &x, r, &u0, &spec).unwrap();
            let mc = mc_measure(&sigma, &x, r, 1_000_000, 0).unwrap();
            assert!(
                (quad.value - mc.value).abs() <= 3.0 * mc.stderr.max(1e-12),
                "{}: quad {} vs mc {} +- {}",
                sigma.name(),
                quad.value,
                mc.value,
                mc.stderr
            );
        }
    }

    #[test]
    fn huge_radius_recovers_full_riemannian_area() {
        let plane = catalog::plane();
        let est = mc_measure(&plane, &GroupPoint::IDENTITY, 50.0, 200_000, 0).unwrap();
        let full = 4.0 + 2.0 / 3.0;
        assert_eq!(est.hits, est.samples);
        assert!((est.value - full).abs() <= 3.0 * est.stderr.max(1e-6));
    }

    #[test]
    fn tiny_radius_reports_undersampled() {
        let plane = catalog::plane();
        let est = mc_measure(&plane, &GroupPoint::IDENTITY, 1e-6, 10_000, 0).unwrap();
        assert!(est.undersampled);
        assert_eq!(est.value, 0.0);
    }
}
