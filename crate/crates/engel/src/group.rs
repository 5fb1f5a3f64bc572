//! Arithmetic of the Engel group.
//!
//! The group is modelled on R^4 with coordinates of weights (1, 1, 2, 3) and
//! the left-invariant frame
//!
//! ```text
//! X1 = d1,  X2 = d2 + x1 d3 + (x1^2/2) d4,  X3 = d3 + x1 d4,  X4 = d4.
//! ```
//!
//! The product below is the unique polynomial law whose left translations
//! have exactly this frame as their differential at the identity; it is
//! certified at run time by [`crate::oracle::certify_group_law`].
//!
//! Distances come from a symmetrized box-type gauge. It is homogeneous of
//! degree one under the dilations and symmetric under inversion, but only
//! satisfies a quasi-triangle inequality; the empirical quasi-triangle
//! constant is measured by [`HomGauge::certify`] and carried in reports.

use crate::error::{EngelError, Result};
use crate::tangent::FrameVector;
use serde::{Deserialize, Serialize};

/// A point of the Engel group in exponential coordinates.
///
/// Coordinate weights are (1, 1, 2, 3): `x1`, `x2` span the horizontal
/// layer, `x3` the second layer and `x4` the third.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GroupPoint {
    pub x1: f64,
    pub x2: f64,
    pub x3: f64,
    pub x4: f64,
}

/// Weights of the frame directions X1..X4.
pub const VECTOR_WEIGHTS: [u8; 4] = [1, 1, 2, 3];

impl GroupPoint {
    pub const IDENTITY: GroupPoint = GroupPoint {
        x1: 0.0,
        x2: 0.0,
        x3: 0.0,
        x4: 0.0,
    };

    pub fn new(x1: f64, x2: f64, x3: f64, x4: f64) -> Self {
        debug_assert!(
            x1.is_finite() && x2.is_finite() && x3.is_finite() && x4.is_finite(),
            "group point coordinates must be finite"
        );
        GroupPoint { x1, x2, x3, x4 }
    }

    pub fn coords(&self) -> [f64; 4] {
        [self.x1, self.x2, self.x3, self.x4]
    }

    /// Group product.
    pub fn mul(&self, y: &GroupPoint) -> GroupPoint {
        GroupPoint {
            x1: self.x1 + y.x1,
            x2: self.x2 + y.x2,
            x3: self.x3 + y.x3 + self.x1 * y.x2,
            x4: self.x4 + y.x4 + self.x1 * y.x3 + 0.5 * self.x1 * self.x1 * y.x2,
        }
    }

    /// Group inverse: `x.mul(&x.inv())` is the identity.
    pub fn inv(&self) -> GroupPoint {
        GroupPoint {
            x1: -self.x1,
            x2: -self.x2,
            x3: -self.x3 + self.x1 * self.x2,
            x4: -self.x4 + self.x1 * self.x3 - 0.5 * self.x1 * self.x1 * self.x2,
        }
    }

    /// Intrinsic dilation `(r x1, r x2, r^2 x3, r^3 x4)`, `r > 0`.
    pub fn dilate(&self, r: f64) -> Result<GroupPoint> {
        if !r.is_finite() || r <= 0.0 {
            return Err(EngelError::Domain(format!(
                "dilation factor must be positive, got {r}"
            )));
        }
        Ok(self.dilate_unchecked(r))
    }

    pub(crate) fn dilate_unchecked(&self, r: f64) -> GroupPoint {
        GroupPoint {
            x1: r * self.x1,
            x2: r * self.x2,
            x3: r * r * self.x3,
            x4: r * r * r * self.x4,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.coords().iter().all(|c| c.is_finite())
    }
}

impl From<[f64; 4]> for GroupPoint {
    fn from(c: [f64; 4]) -> Self {
        GroupPoint::new(c[0], c[1], c[2], c[3])
    }
}

/// The four frame fields at `x`, as columns in coordinate basis.
///
/// Column `i` is `X_{i+1}` evaluated at `x`; it equals the differential of
/// the left translation by `x` applied to the coordinate direction `e_{i+1}`
/// at the identity.
pub fn frame_at(x: &GroupPoint) -> [[f64; 4]; 4] {
    [
        [1.0, 0.0, 0.0, 0.0],
        [0.0, 1.0, x.x1, 0.5 * x.x1 * x.x1],
        [0.0, 0.0, 1.0, x.x1],
        [0.0, 0.0, 0.0, 1.0],
    ]
}

/// Decompose a coordinate tangent vector at `x` in the frame X1..X4.
///
/// Inverse of multiplying by the `frame_at` columns; in particular at the
/// identity the coefficients equal the coordinates.
pub fn coord_to_frame(x: &GroupPoint, v: [f64; 4]) -> FrameVector {
    let a3 = v[2] - x.x1 * v[1];
    FrameVector {
        a1: v[0],
        a2: v[1],
        a3,
        a4: v[3] - x.x1 * v[2] + 0.5 * x.x1 * x.x1 * v[1],
    }
}

/// Rebuild coordinate components from frame coefficients at `x`.
pub fn frame_to_coord(x: &GroupPoint, a: &FrameVector) -> [f64; 4] {
    let cols = frame_at(x);
    let mut v = [0.0; 4];
    let coeffs = [a.a1, a.a2, a.a3, a.a4];
    for (col, coeff) in cols.iter().zip(coeffs) {
        for (vi, ci) in v.iter_mut().zip(col) {
            *vi += coeff * ci;
        }
    }
    v
}

/// Differential of the dilation applied to a coordinate tangent vector.
pub fn dilate_tangent(r: f64, v: [f64; 4]) -> [f64; 4] {
    [r * v[0], r * v[1], r * r * v[2], r * r * r * v[3]]
}

/// Raw box gauge `max(|x1|, |x2|, |x3|^(1/2), |x4|^(1/3))`.
///
/// Its unit ball at the identity is exactly the box
/// `[-r,r]^2 x [-r^2,r^2] x [-r^3,r^3]`.
pub fn gauge_raw(x: &GroupPoint) -> f64 {
    x.x1.abs()
        .max(x.x2.abs())
        .max(x.x3.abs().sqrt())
        .max(x.x4.abs().cbrt())
}

/// Symmetrized box gauge `max(n(x), n(x^-1))`; homogeneous of degree one
/// and invariant under inversion.
pub fn gauge(x: &GroupPoint) -> f64 {
    gauge_raw(x).max(gauge_raw(&x.inv()))
}

/// Left-invariant quasi-distance induced by the symmetrized gauge.
pub fn dist(x: &GroupPoint, y: &GroupPoint) -> f64 {
    gauge(&x.inv().mul(y))
}

/// Closed ball test against the symmetrized gauge, written without roots.
///
/// `inv_center` must be `center.inv()`; it is taken precomputed because the
/// measure routines evaluate millions of membership tests per ball.
pub fn ball_contains(inv_center: &GroupPoint, r: f64, y: &GroupPoint) -> bool {
    let z = inv_center.mul(y);
    let r2 = r * r;
    let r3 = r2 * r;
    if z.x1.abs() > r || z.x2.abs() > r || z.x3.abs() > r2 || z.x4.abs() > r3 {
        return false;
    }
    let zi = z.inv();
    zi.x3.abs() <= r2 && zi.x4.abs() <= r3
}

/// Kind of homogeneous gauge in use. Only the symmetrized box gauge is
/// implemented; the exact Carnot-Caratheodory distance is out of scope.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GaugeKind {
    SymBox,
}

/// A homogeneous gauge together with its empirically certified
/// quasi-triangle constant and box-inclusion constant.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct HomGauge {
    pub kind: GaugeKind,
    /// Max of `dist(x,z) / (dist(x,y) + dist(y,z))` observed over random
    /// triples; a true metric would have constant <= 1.
    pub quasi_triangle_constant: f64,
    /// Largest lambda with `Box(lambda r)` inside the gauge ball of radius
    /// `r` (the ball sits inside `Box(r)` by construction). For the raw,
    /// unsymmetrized gauge the constant is exactly 1.
    pub box_inclusion_lambda: f64,
}

impl HomGauge {
    /// Measure the quasi-triangle constant on `samples` random triples and
    /// the box-inclusion constant over the unit box.
    pub fn certify(samples: usize, seed: u64) -> HomGauge {
        use rand::Rng;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut worst: f64 = 1.0;
        for _ in 0..samples {
            let mut p = [GroupPoint::IDENTITY; 3];
            for q in p.iter_mut() {
                *q = GroupPoint::new(
                    rng.random_range(-1.0..1.0),
                    rng.random_range(-1.0..1.0),
                    rng.random_range(-1.0..1.0),
                    rng.random_range(-1.0..1.0),
                );
            }
            let through = dist(&p[0], &p[1]) + dist(&p[1], &p[2]);
            if through > 0.0 {
                worst = worst.max(dist(&p[0], &p[2]) / through);
            }
        }

        // By homogeneity, Box(lambda r) is inside the ball of radius r for
        // lambda = 1 / max of the gauge over the unit box. The maximum is
        // attained at a corner, but random samples are kept as a guard.
        let mut gauge_max = 0.0f64;
        for mask in 0..16u32 {
            let sgn = |b: u32| if b == 0 { -1.0 } else { 1.0 };
            let corner = GroupPoint::new(
                sgn(mask & 1),
                sgn(mask & 2),
                sgn(mask & 4),
                sgn(mask & 8),
            );
            gauge_max = gauge_max.max(gauge(&corner));
        }
        for _ in 0..samples.min(10_000) {
            let p = GroupPoint::new(
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
            );
            gauge_max = gauge_max.max(gauge(&p));
        }

        HomGauge {
            kind: GaugeKind::SymBox,
            quasi_triangle_constant: worst,
            box_inclusion_lambda: 1.0 / gauge_max,
        }
    }
}
