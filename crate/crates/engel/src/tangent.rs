//! Frame decompositions of tangent vectors and 2-vectors, and their
//! pointwise degree.
//!
//! The degree of a frame direction is its layer weight: X1, X2 carry
//! weight 1, X3 weight 2 and X4 weight 3. A 2-vector coefficient on
//! `Xi ^ Xj` carries weight `di + dj`, giving the table (2, 3, 3, 4, 4, 5)
//! for the components (c12, c13, c23, c14, c24, c34). The degree of a
//! (multi)vector is the largest weight carried by a coefficient that is
//! distinguishable from zero at the stored tolerance.
//!
//! Only vectors (curve tangents) and 2-vectors (surface tangents) are
//! classified here. Hypersurfaces are out of scope: a C^1 hypersurface in
//! this group cannot be tangent to the horizontal distribution on any open
//! set, so its 3-vector degree is always 6 and carries no stratification.

use crate::error::{EngelError, Result};
use crate::group::{coord_to_frame, GroupPoint};
use serde::{Deserialize, Serialize};

/// Tangent vector expressed in the left-invariant frame X1..X4.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrameVector {
    pub a1: f64,
    pub a2: f64,
    pub a3: f64,
    pub a4: f64,
}

/// Tangent 2-vector expressed in the basis `Xi ^ Xj`, `i < j`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Frame2Vector {
    pub c12: f64,
    pub c13: f64,
    pub c23: f64,
    pub c14: f64,
    pub c24: f64,
    pub c34: f64,
}

/// Weights of (c12, c13, c23, c14, c24, c34).
pub const BIVECTOR_WEIGHTS: [u8; 6] = [2, 3, 3, 4, 4, 5];

/// Result of a degree classification.
///
/// `margin` is the largest coefficient magnitude at the decisive weight
/// level, i.e. the evidence that produced `value`; classifications with
/// `margin < 10 * zero_tolerance` should be treated as borderline.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DegreeValue {
    pub value: u8,
    pub margin: f64,
    pub zero_tolerance: f64,
}

impl DegreeValue {
    pub fn is_borderline(&self) -> bool {
        self.margin < 10.0 * self.zero_tolerance
    }
}

/// Default absolute tolerance for zero tests on frame coefficients,
/// assuming inputs of order one.
pub const DEFAULT_ZERO_TOL: f64 = 1e-9;

impl FrameVector {
    pub fn coeffs(&self) -> [f64; 4] {
        [self.a1, self.a2, self.a3, self.a4]
    }

    /// Riemannian norm; the frame is orthonormal for the fixed metric.
    pub fn norm(&self) -> f64 {
        self.coeffs().iter().map(|c| c * c).sum::<f64>().sqrt()
    }

    /// Norm of the sub-tuple of coefficients of weight exactly `d`.
    pub fn component_norm(&self, d: u8) -> f64 {
        self.coeffs()
            .iter()
            .zip(crate::group::VECTOR_WEIGHTS)
            .filter(|(_, w)| *w == d)
            .map(|(c, _)| c * c)
            .sum::<f64>()
            .sqrt()
    }
}

impl Frame2Vector {
    pub fn coeffs(&self) -> [f64; 6] {
        [self.c12, self.c13, self.c23, self.c14, self.c24, self.c34]
    }

    pub fn norm(&self) -> f64 {
        self.coeffs().iter().map(|c| c * c).sum::<f64>().sqrt()
    }

    pub fn component_norm(&self, d: u8) -> f64 {
        self.coeffs()
            .iter()
            .zip(BIVECTOR_WEIGHTS)
            .filter(|(_, w)| *w == d)
            .map(|(c, _)| c * c)
            .sum::<f64>()
            .sqrt()
    }
}

/// Wedge of two coordinate tangent vectors at `x`, expanded in the frame.
///
/// Computed as the antisymmetric product of the frame decompositions of
/// `v` and `w`; [`wedge_via_minors`] is the independent closed-form route
/// through the 2x2 coordinate minors, and the two must agree.
pub fn wedge_in_frame(x: &GroupPoint, v: [f64; 4], w: [f64; 4]) -> Frame2Vector {
    let a = coord_to_frame(x, v);
    let b = coord_to_frame(x, w);
    Frame2Vector {
        c12: a.a1 * b.a2 - a.a2 * b.a1,
        c13: a.a1 * b.a3 - a.a3 * b.a1,
        c23: a.a2 * b.a3 - a.a3 * b.a2,
        c14: a.a1 * b.a4 - a.a4 * b.a1,
        c24: a.a2 * b.a4 - a.a4 * b.a2,
        c34: a.a3 * b.a4 - a.a4 * b.a3,
    }
}

/// 2x2 minors `det [[v_i, w_i], [v_j, w_j]]` for `i < j`, ordered
/// (12, 13, 23, 14, 24, 34).
pub fn coordinate_minors(v: [f64; 4], w: [f64; 4]) -> [f64; 6] {
    let m = |i: usize, j: usize| v[i] * w[j] - v[j] * w[i];
    [m(0, 1), m(0, 2), m(1, 2), m(0, 3), m(1, 3), m(2, 3)]
}

/// Closed-form wedge expansion from the coordinate minors and the first
/// coordinate `x1` of the base point.
pub fn wedge_via_minors(x1: f64, v: [f64; 4], w: [f64; 4]) -> Frame2Vector {
    let [m12, m13, m23, m14, m24, m34] = coordinate_minors(v, w);
    let half_sq = 0.5 * x1 * x1;
    Frame2Vector {
        c12: m12,
        c13: m13 - x1 * m12,
        c23: m23,
        c14: m14 - x1 * m13 + half_sq * m12,
        c24: m24 - x1 * m23,
        c34: m34 + half_sq * m23 - x1 * m24,
    }
}

fn classify(coeffs: &[f64], weights: &[u8], tol: f64, what: &str) -> Result<DegreeValue> {
    if !tol.is_finite() || tol <= 0.0 {
        return Err(EngelError::Domain(format!(
            "zero tolerance must be positive, got {tol}"
        )));
    }
    let mut best: Option<u8> = None;
    for (c, &w) in coeffs.iter().zip(weights) {
        if c.abs() > tol && best.is_none_or(|b| w > b) {
            best = Some(w);
        }
    }
    let Some(value) = best else {
        return Err(EngelError::DegenerateInput(format!(
            "all {what} coefficients are below tolerance {tol}"
        )));
    };
    let margin = coeffs
        .iter()
        .zip(weights)
        .filter(|(_, &w)| w == value)
        .map(|(c, _)| c.abs())
        .fold(0.0f64, f64::max);
    Ok(DegreeValue {
        value,
        margin,
        zero_tolerance: tol,
    })
}

/// Degree of a frame vector: the largest weight with a coefficient above
/// the tolerance. Vectors with all coefficients below tolerance are not
/// tangents of an immersion and are rejected.
pub fn vector_degree(a: &FrameVector, tol: f64) -> Result<DegreeValue> {
    classify(&a.coeffs(), &crate::group::VECTOR_WEIGHTS, tol, "vector")
}

/// Degree of a frame 2-vector under the weight table (2, 3, 3, 4, 4, 5).
pub fn bivector_degree(c: &Frame2Vector, tol: f64) -> Result<DegreeValue> {
    classify(&c.coeffs(), &BIVECTOR_WEIGHTS, tol, "2-vector")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::dilate_tangent;
    use proptest::prelude::*;
    use rand::Rng;
    use rand::SeedableRng;

    fn pt(c: [f64; 4]) -> GroupPoint {
        GroupPoint::from(c)
    }

    #[test]
    fn wedge_at_origin_of_horizontal_pair() {
        let c = wedge_in_frame(&GroupPoint::IDENTITY, [1.0, 0.0, 0.0, 0.0], [0.0, 1.0, 0.0, 0.0]);
        assert_eq!(c.coeffs(), [1.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn wedge_of_plane_tangents_off_axis() {
        // Tangents of (u1, u2, 0, 0) at the point with x1 = 1.
        let c = wedge_in_frame(&pt([1.0, 0.0, 0.0, 0.0]), [1.0, 0.0, 0.0, 0.0], [0.0, 1.0, 0.0, 0.0]);
        assert_eq!(c.coeffs(), [1.0, -1.0, 0.0, 0.5, 0.0, 0.0]);
        assert_eq!(bivector_degree(&c, DEFAULT_ZERO_TOL).unwrap().value, 4);
    }

    #[test]
    fn wedge_routes_agree_on_random_inputs() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..10_000 {
            let x = pt([
                rng.random_range(-2.0..2.0),
                rng.random_range(-2.0..2.0),
                rng.random_range(-2.0..2.0),
                rng.random_range(-2.0..2.0),
            ]);
            let mut v = [0.0; 4];
            let mut w = [0.0; 4];
            for k in 0..4 {
                v[k] = rng.random_range(-2.0..2.0);
                w[k] = rng.random_range(-2.0..2.0);
            }
            let frame_route = wedge_in_frame(&x, v, w);
            let minor_route = wedge_via_minors(x.x1, v, w);
            for (a, b) in frame_route.coeffs().iter().zip(minor_route.coeffs()) {
                assert!((a - b).abs() < 1e-10, "routes diverge: {a} vs {b}");
            }
        }
    }

    #[test]
    fn vector_degrees() {
        let tol = DEFAULT_ZERO_TOL;
        let d = |c: [f64; 4]| {
            vector_degree(
                &FrameVector {
                    a1: c[0],
                    a2: c[1],
                    a3: c[2],
                    a4: c[3],
                },
                tol,
            )
        };
        assert_eq!(d([1.0, 0.0, 0.0, 0.0]).unwrap().value, 1);
        assert_eq!(d([0.0, 1.0, -1.0, 0.5]).unwrap().value, 3);
        assert_eq!(d([0.0, 0.0, 1.0, 0.0]).unwrap().value, 2);
        assert!(matches!(
            d([0.0, 0.0, 0.0, 0.0]),
            Err(EngelError::DegenerateInput(_))
        ));
    }

    #[test]
    fn bivector_degrees() {
        let tol = DEFAULT_ZERO_TOL;
        let d = |c: [f64; 6]| {
            bivector_degree(
                &Frame2Vector {
                    c12: c[0],
                    c13: c[1],
                    c23: c[2],
                    c14: c[3],
                    c24: c[4],
                    c34: c[5],
                },
                tol,
            )
        };
        assert_eq!(d([1.0, -1.0, 0.0, 0.5, 0.0, 0.0]).unwrap().value, 4);
        assert_eq!(d([0.0, 0.0, 0.0, 0.0, 0.0, 1.0]).unwrap().value, 5);
        assert_eq!(d([1.0, 0.0, 0.0, 0.0, 0.0, 0.0]).unwrap().value, 2);
        assert!(d([0.0; 6]).is_err());
    }

    #[test]
    fn component_norms() {
        let c = Frame2Vector {
            c12: 1.0,
            c13: -1.0,
            c23: 0.0,
            c14: 0.5,
            c24: 0.0,
            c34: 0.0,
        };
        assert_eq!(c.component_norm(4), 0.5);
        assert_eq!(c.component_norm(5), 0.0);
        let c2 = Frame2Vector {
            c12: 0.0,
            c13: 1.0,
            c23: 1.0,
            c14: 0.0,
            c24: 0.0,
            c34: 0.0,
        };
        assert!((c2.component_norm(3) - 2.0f64.sqrt()).abs() < 1e-15);
        let a = FrameVector {
            a1: 3.0,
            a2: 4.0,
            a3: 2.0,
            a4: 7.0,
        };
        assert_eq!(a.component_norm(1), 5.0);
        assert_eq!(a.component_norm(2), 2.0);
        assert_eq!(a.component_norm(3), 7.0);
    }

    fn arb_point() -> impl Strategy<Value = GroupPoint> {
        (-3.0f64..3.0, -3.0f64..3.0, -3.0f64..3.0, -3.0f64..3.0)
            .prop_map(|(a, b, c, d)| GroupPoint::new(a, b, c, d))
    }

    fn arb_vec() -> impl Strategy<Value = [f64; 4]> {
        [-3.0f64..3.0, -3.0f64..3.0, -3.0f64..3.0, -3.0f64..3.0]
    }

    proptest! {
        #[test]
        fn wedge_antisymmetry(x in arb_point(), v in arb_vec(), w in arb_vec()) {
            let a = wedge_in_frame(&x, v, w);
            let b = wedge_in_frame(&x, w, v);
            for (p, q) in a.coeffs().iter().zip(b.coeffs()) {
                prop_assert_eq!(*p, -q);
            }
        }

        #[test]
        fn wedge_dilation_covariance(x in arb_point(), v in arb_vec(), w in arb_vec(), r in 0.2f64..3.0) {
            let base = wedge_in_frame(&x, v, w);
            let scaled = wedge_in_frame(
                &x.dilate(r).unwrap(),
                dilate_tangent(r, v),
                dilate_tangent(r, w),
            );
            for ((c0, c1), wgt) in base.coeffs().iter().zip(scaled.coeffs()).zip(BIVECTOR_WEIGHTS) {
                let expect = r.powi(wgt as i32) * c0;
                prop_assert!((c1 - expect).abs() <= 1e-10 * (1.0 + expect.abs()));
            }
        }

        #[test]
        fn degree_monotone_in_tolerance(x in arb_point(), v in arb_vec(), w in arb_vec(), t1 in 1e-9f64..1e-2, t2 in 1e-9f64..1e-2) {
            let (lo, hi) = if t1 <= t2 { (t1, t2) } else { (t2, t1) };
            let c = wedge_in_frame(&x, v, w);
            if let (Ok(dl), Ok(dh)) = (bivector_degree(&c, lo), bivector_degree(&c, hi)) {
                prop_assert!(dh.value <= dl.value);
            }
        }
    }
}
