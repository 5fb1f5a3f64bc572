//! Parametrized curves and surfaces in the Engel group: pointwise and
//! global degree, Riemannian Jacobians, the degree-3 differential
//! constraints for graph surfaces, and intrinsic-measure integration.

use crate::error::{EngelError, Result};
use crate::group::{coord_to_frame, GroupPoint};
use crate::poly::Poly;
use crate::quad::{integrate_1d, integrate_2d, QuadSpec};
use crate::tangent::{
    bivector_degree, vector_degree, wedge_in_frame, DegreeValue, Frame2Vector, FrameVector,
};
use rayon::prelude::*;
use std::sync::Arc;

/// Finite-difference step for derivatives of opaque callables.
pub const CALLABLE_FD_STEP: f64 = 1e-6;

type CurveMap = Arc<dyn Fn(f64) -> [f64; 4] + Send + Sync>;
type SurfaceMap = Arc<dyn Fn([f64; 2]) -> [f64; 4] + Send + Sync>;

#[derive(Clone)]
enum CurveRep {
    /// Coordinate polynomials plus their exact derivatives.
    Poly {
        coords: Box<[Poly<1>; 4]>,
        velocity: Box<[Poly<1>; 4]>,
    },
    /// Opaque map; derivatives by central differences at [`CALLABLE_FD_STEP`].
    Callable(CurveMap),
}

#[derive(Clone)]
enum SurfaceRep {
    Poly {
        coords: Box<[Poly<2>; 4]>,
        partials: Box<[[Poly<2>; 4]; 2]>,
    },
    Callable(SurfaceMap),
}

/// A parametrized curve over an interval.
#[derive(Clone)]
pub struct ParamCurve {
    pub name: String,
    pub domain: [f64; 2],
    rep: CurveRep,
}

/// A parametrized surface over an axis-aligned parameter box.
#[derive(Clone)]
pub struct ParamSurface {
    pub name: String,
    pub domain: [[f64; 2]; 2],
    rep: SurfaceRep,
}

impl ParamCurve {
    pub fn from_polys(name: impl Into<String>, domain: [f64; 2], coords: [Poly<1>; 4]) -> Self {
        let velocity = [
            coords[0].partial(0),
            coords[1].partial(0),
            coords[2].partial(0),
            coords[3].partial(0),
        ];
        ParamCurve {
            name: name.into(),
            domain,
            rep: CurveRep::Poly {
                coords: Box::new(coords),
                velocity: Box::new(velocity),
            },
        }
    }

    pub fn from_callable(
        name: impl Into<String>,
        domain: [f64; 2],
        map: impl Fn(f64) -> [f64; 4] + Send + Sync + 'static,
    ) -> Self {
        ParamCurve {
            name: name.into(),
            domain,
            rep: CurveRep::Callable(Arc::new(map)),
        }
    }

    pub fn point(&self, t: f64) -> GroupPoint {
        match &self.rep {
            CurveRep::Poly { coords, .. } => GroupPoint::new(
                coords[0].eval([t]),
                coords[1].eval([t]),
                coords[2].eval([t]),
                coords[3].eval([t]),
            ),
            CurveRep::Callable(f) => GroupPoint::from(f(t)),
        }
    }

    pub fn velocity(&self, t: f64) -> [f64; 4] {
        match &self.rep {
            CurveRep::Poly { velocity, .. } => [
                velocity[0].eval([t]),
                velocity[1].eval([t]),
                velocity[2].eval([t]),
                velocity[3].eval([t]),
            ],
            CurveRep::Callable(f) => {
                let h = CALLABLE_FD_STEP;
                let p = f(t + h);
                let m = f(t - h);
                [
                    (p[0] - m[0]) / (2.0 * h),
                    (p[1] - m[1]) / (2.0 * h),
                    (p[2] - m[2]) / (2.0 * h),
                    (p[3] - m[3]) / (2.0 * h),
                ]
            }
        }
    }

    /// Velocity decomposed in the frame at the curve point.
    pub fn tangent_frame(&self, t: f64) -> FrameVector {
        coord_to_frame(&self.point(t), self.velocity(t))
    }

    fn poly_coords(&self) -> Option<&[Poly<1>; 4]> {
        match &self.rep {
            CurveRep::Poly { coords, .. } => Some(coords.as_ref()),
            CurveRep::Callable(_) => None,
        }
    }
}

impl ParamSurface {
    pub fn from_polys(
        name: impl Into<String>,
        domain: [[f64; 2]; 2],
        coords: [Poly<2>; 4],
    ) -> Self {
        let partials = [
            [
                coords[0].partial(0),
                coords[1].partial(0),
                coords[2].partial(0),
                coords[3].partial(0),
            ],
            [
                coords[0].partial(1),
                coords[1].partial(1),
                coords[2].partial(1),
                coords[3].partial(1),
            ],
        ];
        ParamSurface {
            name: name.into(),
            domain,
            rep: SurfaceRep::Poly {
                coords: Box::new(coords),
                partials: Box::new(partials),
            },
        }
    }

    pub fn from_callable(
        name: impl Into<String>,
        domain: [[f64; 2]; 2],
        map: impl Fn([f64; 2]) -> [f64; 4] + Send + Sync + 'static,
    ) -> Self {
        ParamSurface {
            name: name.into(),
            domain,
            rep: SurfaceRep::Callable(Arc::new(map)),
        }
    }

    pub fn point(&self, u: [f64; 2]) -> GroupPoint {
        match &self.rep {
            SurfaceRep::Poly { coords, .. } => GroupPoint::new(
                coords[0].eval(u),
                coords[1].eval(u),
                coords[2].eval(u),
                coords[3].eval(u),
            ),
            SurfaceRep::Callable(f) => GroupPoint::from(f(u)),
        }
    }

    /// The two coordinate partials of the map at `u`.
    pub fn partials(&self, u: [f64; 2]) -> [[f64; 4]; 2] {
        match &self.rep {
            SurfaceRep::Poly { partials, .. } => [
                [
                    partials[0][0].eval(u),
                    partials[0][1].eval(u),
                    partials[0][2].eval(u),
                    partials[0][3].eval(u),
                ],
                [
                    partials[1][0].eval(u),
                    partials[1][1].eval(u),
                    partials[1][2].eval(u),
                    partials[1][3].eval(u),
                ],
            ],
            SurfaceRep::Callable(f) => {
                let h = CALLABLE_FD_STEP;
                let mut out = [[0.0; 4]; 2];
                for axis in 0..2 {
                    let mut up = u;
                    up[axis] += h;
                    let mut um = u;
                    um[axis] -= h;
                    let p = f(up);
                    let m = f(um);
                    for k in 0..4 {
                        out[axis][k] = (p[k] - m[k]) / (2.0 * h);
                    }
                }
                out
            }
        }
    }

    /// Wedge of the two partials at `u`, in the frame at the surface point.
    pub fn tangent_wedge(&self, u: [f64; 2]) -> Frame2Vector {
        let [pu, pv] = self.partials(u);
        wedge_in_frame(&self.point(u), pu, pv)
    }

    fn poly_coords(&self) -> Option<&[Poly<2>; 4]> {
        match &self.rep {
            SurfaceRep::Poly { coords, .. } => Some(coords.as_ref()),
            SurfaceRep::Callable(_) => None,
        }
    }
}

/// A 1- or 2-dimensional parametrized submanifold.
#[derive(Clone)]
pub enum Submanifold {
    Curve(ParamCurve),
    Surface(ParamSurface),
}

/// Per-sample degree map of a submanifold over a parameter lattice.
///
/// Samples sit at the lattice corners (resolution + 1 per axis), so
/// measure-zero strata lying on grid lines are detected.
#[derive(Debug, Clone)]
pub struct StratificationReport {
    pub resolution: usize,
    pub zero_tolerance: f64,
    pub global_degree: u8,
    /// (degree, sample count) entries, ascending by degree.
    pub degree_counts: Vec<(u8, usize)>,
    /// Sampled parameter points with degree below the global degree.
    pub low_degree_samples: Vec<(Vec<f64>, u8)>,
    /// Samples whose classification margin is below ten times the tolerance.
    pub borderline_count: usize,
}

impl StratificationReport {
    pub fn low_degree_count(&self) -> usize {
        self.degree_counts
            .iter()
            .filter(|(d, _)| *d < self.global_degree)
            .map(|(_, n)| n)
            .sum()
    }
}

impl Submanifold {
    pub fn name(&self) -> &str {
        match self {
            Submanifold::Curve(c) => &c.name,
            Submanifold::Surface(s) => &s.name,
        }
    }

    /// Topological dimension of the parameter domain (1 or 2).
    pub fn dim(&self) -> usize {
        match self {
            Submanifold::Curve(_) => 1,
            Submanifold::Surface(_) => 2,
        }
    }

    /// Domain as per-axis intervals.
    pub fn domain(&self) -> Vec<[f64; 2]> {
        match self {
            Submanifold::Curve(c) => vec![c.domain],
            Submanifold::Surface(s) => s.domain.to_vec(),
        }
    }

    pub fn contains_param(&self, u: &[f64]) -> bool {
        self.domain()
            .iter()
            .zip(u)
            .all(|(iv, x)| *x >= iv[0] - 1e-12 && *x <= iv[1] + 1e-12)
    }

    pub fn point(&self, u: &[f64]) -> GroupPoint {
        match self {
            Submanifold::Curve(c) => c.point(u[0]),
            Submanifold::Surface(s) => s.point([u[0], u[1]]),
        }
    }

    /// Replace the parameter domain. Polynomial maps are global, so any box
    /// is a valid restriction or extension; for callables the caller must
    /// guarantee the map is defined there.
    pub fn with_domain(&self, domain: &[[f64; 2]]) -> Result<Submanifold> {
        match self {
            Submanifold::Curve(c) => {
                if domain.len() != 1 {
                    return Err(EngelError::Shape("curve domain needs one interval".into()));
                }
                let mut c2 = c.clone();
                c2.domain = domain[0];
                Ok(Submanifold::Curve(c2))
            }
            Submanifold::Surface(s) => {
                if domain.len() != 2 {
                    return Err(EngelError::Shape(
                        "surface domain needs two intervals".into(),
                    ));
                }
                let mut s2 = s.clone();
                s2.domain = [domain[0], domain[1]];
                Ok(Submanifold::Surface(s2))
            }
        }
    }

    /// Pointwise degree at parameter `u`.
    pub fn pointwise_degree(&self, u: &[f64], tol: f64) -> Result<DegreeValue> {
        if !self.contains_param(u) {
            return Err(EngelError::Domain(format!(
                "parameter {u:?} outside domain {:?}",
                self.domain()
            )));
        }
        self.degree_unchecked(u, tol)
    }

    fn degree_unchecked(&self, u: &[f64], tol: f64) -> Result<DegreeValue> {
        let res = match self {
            Submanifold::Curve(c) => vector_degree(&c.tangent_frame(u[0]), tol),
            Submanifold::Surface(s) => bivector_degree(&s.tangent_wedge([u[0], u[1]]), tol),
        };
        res.map_err(|e| match e {
            EngelError::DegenerateInput(msg) => EngelError::ImmersionViolation {
                param: u.to_vec(),
                detail: msg,
            },
            other => other,
        })
    }

    /// Riemannian Jacobian of the parametrization at `u`: the norm of the
    /// tangent (2-)vector in the orthonormal frame.
    pub fn riemannian_jacobian(&self, u: &[f64]) -> f64 {
        match self {
            Submanifold::Curve(c) => c.tangent_frame(u[0]).norm(),
            Submanifold::Surface(s) => s.tangent_wedge([u[0], u[1]]).norm(),
        }
    }

    /// Degree stratification over a corner lattice with `resolution` cells
    /// per axis. The global degree is the maximum sampled degree and must
    /// land in the range allowed for the dimension (1..=3 for curves,
    /// 3..=5 for surfaces).
    pub fn global_degree(&self, resolution: usize, tol: f64) -> Result<StratificationReport> {
        if resolution < 2 {
            return Err(EngelError::Domain(
                "stratification needs at least 2 cells per axis".into(),
            ));
        }
        let domain = self.domain();
        let axes: Vec<Vec<f64>> = domain
            .iter()
            .map(|iv| {
                (0..=resolution)
                    .map(|k| iv[0] + (iv[1] - iv[0]) * k as f64 / resolution as f64)
                    .collect()
            })
            .collect();

        let samples: Vec<Vec<f64>> = if axes.len() == 1 {
            axes[0].iter().map(|&t| vec![t]).collect()
        } else {
            axes[0]
                .iter()
                .flat_map(|&a| axes[1].iter().map(move |&b| vec![a, b]))
                .collect()
        };

        let degrees: Vec<Result<DegreeValue>> = samples
            .par_iter()
            .map(|u| self.degree_unchecked(u, tol))
            .collect();

        let mut counts = std::collections::BTreeMap::new();
        let mut borderline = 0usize;
        let mut per_sample = Vec::with_capacity(samples.len());
        for (u, d) in samples.iter().zip(degrees) {
            let d = d.map_err(|e| match e {
                EngelError::ImmersionViolation { detail, .. } => EngelError::ImmersionViolation {
                    param: u.clone(),
                    detail,
                },
                other => other,
            })?;
            *counts.entry(d.value).or_insert(0usize) += 1;
            if d.is_borderline() {
                borderline += 1;
            }
            per_sample.push(d.value);
        }
        let global = *counts.keys().max().expect("nonempty lattice");
        let legal = match self {
            Submanifold::Curve(_) => (1..=3).contains(&global),
            Submanifold::Surface(_) => (3..=5).contains(&global),
        };
        if !legal {
            return Err(EngelError::Precondition(format!(
                "global degree {global} outside the admissible range for dimension {}",
                self.dim()
            )));
        }
        let low: Vec<(Vec<f64>, u8)> = samples
            .into_iter()
            .zip(per_sample)
            .filter(|(_, d)| *d < global)
            .collect();
        Ok(StratificationReport {
            resolution,
            zero_tolerance: tol,
            global_degree: global,
            degree_counts: counts.into_iter().collect(),
            low_degree_samples: low,
            borderline_count: borderline,
        })
    }

    /// Intrinsic measure of degree `d`: the integral over the parameter
    /// domain of the weight-`d` component norm of the tangent (2-)vector.
    pub fn intrinsic_measure(&self, d: u8, spec: &QuadSpec) -> Result<f64> {
        match self {
            Submanifold::Curve(c) => integrate_1d(
                &|t: f64| c.tangent_frame(t).component_norm(d),
                c.domain[0],
                c.domain[1],
                spec,
            ),
            Submanifold::Surface(s) => integrate_2d(
                &|u: [f64; 2]| s.tangent_wedge(u).component_norm(d),
                [s.domain[0][0], s.domain[1][0]],
                [s.domain[0][1], s.domain[1][1]],
                spec,
            ),
        }
    }

    /// Compose with the left translation by `x` (exact for polynomials).
    pub fn translate(&self, x: &GroupPoint) -> Submanifold {
        match self {
            Submanifold::Curve(c) => Submanifold::Curve(match c.poly_coords() {
                Some(coords) => ParamCurve::from_polys(
                    c.name.clone(),
                    c.domain,
                    translate_coords(x, coords),
                ),
                None => {
                    let x = *x;
                    let inner = c.clone();
                    ParamCurve::from_callable(c.name.clone(), c.domain, move |t| {
                        x.mul(&inner.point(t)).coords()
                    })
                }
            }),
            Submanifold::Surface(s) => Submanifold::Surface(match s.poly_coords() {
                Some(coords) => ParamSurface::from_polys(
                    s.name.clone(),
                    s.domain,
                    translate_coords(x, coords),
                ),
                None => {
                    let x = *x;
                    let inner = s.clone();
                    ParamSurface::from_callable(s.name.clone(), s.domain, move |u| {
                        x.mul(&inner.point(u)).coords()
                    })
                }
            }),
        }
    }

    /// Compose with the intrinsic dilation by `r > 0` (parameters unchanged).
    pub fn dilated(&self, r: f64) -> Result<Submanifold> {
        if !r.is_finite() || r <= 0.0 {
            return Err(EngelError::Domain(format!(
                "dilation factor must be positive, got {r}"
            )));
        }
        let weights = [r, r, r * r, r * r * r];
        Ok(match self {
            Submanifold::Curve(c) => Submanifold::Curve(match c.poly_coords() {
                Some(coords) => {
                    let scaled = [
                        coords[0].scaled(weights[0]),
                        coords[1].scaled(weights[1]),
                        coords[2].scaled(weights[2]),
                        coords[3].scaled(weights[3]),
                    ];
                    ParamCurve::from_polys(c.name.clone(), c.domain, scaled)
                }
                None => {
                    let inner = c.clone();
                    ParamCurve::from_callable(c.name.clone(), c.domain, move |t| {
                        inner.point(t).dilate_unchecked(r).coords()
                    })
                }
            }),
            Submanifold::Surface(s) => Submanifold::Surface(match s.poly_coords() {
                Some(coords) => {
                    let scaled = [
                        coords[0].scaled(weights[0]),
                        coords[1].scaled(weights[1]),
                        coords[2].scaled(weights[2]),
                        coords[3].scaled(weights[3]),
                    ];
                    ParamSurface::from_polys(s.name.clone(), s.domain, scaled)
                }
                None => {
                    let inner = s.clone();
                    ParamSurface::from_callable(s.name.clone(), s.domain, move |u| {
                        inner.point(u).dilate_unchecked(r).coords()
                    })
                }
            }),
        })
    }

    pub fn as_surface(&self) -> Option<&ParamSurface> {
        match self {
            Submanifold::Surface(s) => Some(s),
            Submanifold::Curve(_) => None,
        }
    }

    pub fn as_curve(&self) -> Option<&ParamCurve> {
        match self {
            Submanifold::Curve(c) => Some(c),
            Submanifold::Surface(_) => None,
        }
    }
}

fn translate_coords<const N: usize>(x: &GroupPoint, coords: &[Poly<N>; 4]) -> [Poly<N>; 4] {
    // Product with a constant left factor is affine in the moving point.
    let p1 = coords[0].add_constant(x.x1);
    let p2 = coords[1].add_constant(x.x2);
    let p3 = coords[2].add(&coords[1].scaled(x.x1)).add_constant(x.x3);
    let p4 = coords[3]
        .add(&coords[2].scaled(x.x1))
        .add(&coords[1].scaled(0.5 * x.x1 * x.x1))
        .add_constant(x.x4);
    [p1, p2, p3, p4]
}

/// The three degree-3 constraints for a graph surface
/// `(u1, u2, phi3(u), phi4(u))`: the weight-4 and weight-5 wedge
/// coefficients written in minor form. All three vanish at `u` exactly when
/// the pointwise degree there is at most 3.
pub fn deg3_pde_residual(surface: &ParamSurface, u: [f64; 2]) -> Result<[f64; 3]> {
    let coords = surface.poly_coords().ok_or_else(|| {
        EngelError::Shape("degree-3 constraint check needs a polynomial graph surface".into())
    })?;
    let graph = coords[0] == Poly::var(0) && coords[1] == Poly::var(1);
    if !graph {
        return Err(EngelError::Shape(
            "surface is not in graph form (u1, u2, phi3, phi4)".into(),
        ));
    }
    let [pu, pv] = surface.partials(u);
    let minors = crate::tangent::coordinate_minors(pu, pv);
    let [m12, m13, m23, m14, m24, m34] = minors;
    let x1 = u[0];
    let half_sq = 0.5 * x1 * x1;
    Ok([
        m14 - x1 * m13 + half_sq * m12,
        m24 - x1 * m23,
        m34 + half_sq * m23 - x1 * m24,
    ])
}

/// Maximum absolute degree-3 residual over a corner lattice.
pub fn deg3_pde_residual_max(surface: &ParamSurface, resolution: usize) -> Result<f64> {
    let axes: Vec<Vec<f64>> = surface
        .domain
        .iter()
        .map(|iv| {
            (0..=resolution)
                .map(|k| iv[0] + (iv[1] - iv[0]) * k as f64 / resolution as f64)
                .collect()
        })
        .collect();
    let rows: Vec<f64> = axes[0]
        .par_iter()
        .map(|&a| {
            let mut worst = 0.0f64;
            for &b in &axes[1] {
                let r = match deg3_pde_residual(surface, [a, b]) {
                    Ok(r) => r,
                    Err(_) => return f64::NAN,
                };
                for v in r {
                    worst = worst.max(v.abs());
                }
            }
            worst
        })
        .collect();
    if rows.iter().any(|v| v.is_nan()) {
        return Err(EngelError::Shape(
            "surface is not in graph form (u1, u2, phi3, phi4)".into(),
        ));
    }
    Ok(rows.into_iter().fold(0.0, f64::max))
}

/// Riemannian area/length of the whole parametrized patch.
pub fn riemannian_measure(sigma: &Submanifold, spec: &QuadSpec) -> Result<f64> {
    match sigma {
        Submanifold::Curve(c) => integrate_1d(
            &|t: f64| c.tangent_frame(t).norm(),
            c.domain[0],
            c.domain[1],
            spec,
        ),
        Submanifold::Surface(s) => integrate_2d(
            &|u: [f64; 2]| s.tangent_wedge(u).norm(),
            [s.domain[0][0], s.domain[1][0]],
            [s.domain[0][1], s.domain[1][1]],
            spec,
        ),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::tangent::DEFAULT_ZERO_TOL;
    use rand::Rng;
    use rand::SeedableRng;

    const TOL: f64 = DEFAULT_ZERO_TOL;

    #[test]
    fn plane_pointwise_degrees() {
        let plane = catalog::plane();
        assert_eq!(plane.pointwise_degree(&[0.0, 0.0], TOL).unwrap().value, 2);
        assert_eq!(plane.pointwise_degree(&[1.0, 0.0], TOL).unwrap().value, 4);
    }

    #[test]
    fn ruled_surface_pointwise_degrees() {
        let s = catalog::ruled_x1x3();
        assert_eq!(s.pointwise_degree(&[0.0, 0.5], TOL).unwrap().value, 3);
        assert_eq!(s.pointwise_degree(&[0.0, -0.7], TOL).unwrap().value, 3);
        assert_eq!(s.pointwise_degree(&[1.0, 0.5], TOL).unwrap().value, 4);
        assert_eq!(s.pointwise_degree(&[1.0, 0.0], TOL).unwrap().value, 4);
    }

    #[test]
    fn parabola_curve_pointwise_degrees() {
        let c = catalog::parabola_x1x4();
        assert_eq!(c.pointwise_degree(&[0.0], TOL).unwrap().value, 1);
        assert_eq!(c.pointwise_degree(&[1.0], TOL).unwrap().value, 3);
        // Frame coefficients are (1, 0, 0, 2t).
        let fr = c.as_curve().unwrap().tangent_frame(0.7);
        assert!((fr.a1 - 1.0).abs() < 1e-14);
        assert!(fr.a2.abs() < 1e-14 && fr.a3.abs() < 1e-14);
        assert!((fr.a4 - 1.4).abs() < 1e-14);
    }

    #[test]
    fn global_degrees_of_builtins() {
        let expected: &[(&str, u8)] = &[
            ("plane", 4),
            ("ruled-x1x3", 4),
            ("graph-deg3", 3),
            ("line-x1", 1),
            ("line-x3", 2),
            ("line-x4", 3),
            ("parabola-x1x4", 3),
            ("parabola-x3x4", 3),
        ];
        for (id, deg) in expected {
            let sigma = catalog::builtin(id).unwrap();
            let report = sigma.global_degree(64, TOL).unwrap();
            assert_eq!(report.global_degree, *deg, "submanifold {id}");
        }
    }

    #[test]
    fn plane_low_degree_stratum_is_the_axis_line() {
        let report = catalog::plane().global_degree(64, TOL).unwrap();
        assert_eq!(report.global_degree, 4);
        assert!(!report.low_degree_samples.is_empty());
        for (u, d) in &report.low_degree_samples {
            assert_eq!(*d, 2);
            assert!(u[0].abs() < 1e-12, "low-degree sample off the line: {u:?}");
        }
    }

    #[test]
    fn graph_deg3_low_degree_stratum_is_bottom_edge() {
        let report = catalog::graph_deg3().global_degree(64, TOL).unwrap();
        assert_eq!(report.global_degree, 3);
        for (u, d) in &report.low_degree_samples {
            assert_eq!(*d, 2);
            assert!(u[1].abs() < 1e-12);
        }
    }

    #[test]
    fn degenerate_curve_is_rejected() {
        let c = ParamCurve::from_polys(
            "stationary",
            [-1.0, 1.0],
            [
                Poly::constant(1.0),
                Poly::zero(),
                Poly::zero(),
                Poly::zero(),
            ],
        );
        let err = Submanifold::Curve(c)
            .pointwise_degree(&[0.0], TOL)
            .unwrap_err();
        assert!(matches!(err, EngelError::ImmersionViolation { .. }));
    }

    #[test]
    fn jacobian_closed_forms() {
        let plane = catalog::plane();
        for u1 in [-0.8, 0.0, 0.3, 1.0] {
            let j = plane.riemannian_jacobian(&[u1, 0.2]);
            assert!((j - (1.0 + 0.5 * u1 * u1)).abs() < 1e-12);
        }
        let vertical = catalog::line_x4();
        assert!((vertical.riemannian_jacobian(&[0.3]) - 1.0).abs() < 1e-15);
        let horizontal = catalog::line_x1();
        assert!((horizontal.riemannian_jacobian(&[0.3]) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn exact_jacobians_match_finite_differences() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        let h = 1e-5;
        for sigma in catalog::all_builtins() {
            for _ in 0..50 {
                match &sigma {
                    Submanifold::Surface(s) => {
                        let u = [
                            rng.random_range(s.domain[0][0] + 0.01..s.domain[0][1] - 0.01),
                            rng.random_range(s.domain[1][0] + 0.01..s.domain[1][1] - 0.01),
                        ];
                        let exact = s.partials(u);
                        for axis in 0..2 {
                            let mut up = u;
                            up[axis] += h;
                            let mut um = u;
                            um[axis] -= h;
                            let p = s.point(up).coords();
                            let m = s.point(um).coords();
                            for k in 0..4 {
                                let fd = (p[k] - m[k]) / (2.0 * h);
                                assert!((fd - exact[axis][k]).abs() < 1e-6);
                            }
                        }
                    }
                    Submanifold::Curve(c) => {
                        let t = rng.random_range(c.domain[0] + 0.01..c.domain[1] - 0.01);
                        let exact = c.velocity(t);
                        let p = c.point(t + h).coords();
                        let m = c.point(t - h).coords();
                        for k in 0..4 {
                            let fd = (p[k] - m[k]) / (2.0 * h);
                            assert!((fd - exact[k]).abs() < 1e-6);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn degree_invariant_under_left_translation() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(23);
        for sigma in catalog::all_builtins() {
            for _ in 0..20 {
                let x = GroupPoint::new(
                    rng.random_range(-2.0..2.0),
                    rng.random_range(-2.0..2.0),
                    rng.random_range(-2.0..2.0),
                    rng.random_range(-2.0..2.0),
                );
                let moved = sigma.translate(&x);
                let u: Vec<f64> = sigma
                    .domain()
                    .iter()
                    .map(|iv| rng.random_range(iv[0]..iv[1]))
                    .collect();
                let d0 = sigma.pointwise_degree(&u, TOL);
                let d1 = moved.pointwise_degree(&u, TOL);
                match (d0, d1) {
                    (Ok(a), Ok(b)) => assert_eq!(a.value, b.value, "translation changed degree"),
                    (a, b) => panic!("degree evaluation failed: {a:?} {b:?}"),
                }
            }
        }
    }

    #[test]
    fn translated_points_match_group_product() {
        let sigma = catalog::graph_deg3();
        let x = GroupPoint::new(0.4, -1.1, 0.2, 0.9);
        let moved = sigma.translate(&x);
        for u in [[0.1, 0.9], [0.5, 0.5], [0.95, 0.05]] {
            let want = x.mul(&sigma.point(&u));
            let got = moved.point(&u);
            for (a, b) in got.coords().iter().zip(want.coords()) {
                assert!((a - b).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn pde_residuals_vanish_exactly_on_the_integrable_graph() {
        let s = catalog::graph_deg3();
        let s = s.as_surface().unwrap();
        let worst = deg3_pde_residual_max(s, 64).unwrap();
        assert!(worst < 1e-12, "residual {worst}");
    }

    #[test]
    fn pde_residuals_detect_degree_four() {
        let plane = catalog::plane();
        let r = deg3_pde_residual(plane.as_surface().unwrap(), [1.0, 0.0]).unwrap();
        assert!((r[0] - 0.5).abs() < 1e-14);
        assert!(r[1].abs() < 1e-14 && r[2].abs() < 1e-14);
        // Residuals vanish at the degree-2 points of the plane.
        let r0 = deg3_pde_residual(plane.as_surface().unwrap(), [0.0, 0.4]).unwrap();
        for v in r0 {
            assert!(v.abs() < 1e-14);
        }
    }

    #[test]
    fn pde_residuals_reject_non_graph_input() {
        let s = catalog::ruled_x1x3();
        let err = deg3_pde_residual(s.as_surface().unwrap(), [0.0, 0.0]).unwrap_err();
        assert!(matches!(err, EngelError::Shape(_)));
    }

    #[test]
    fn pde_zero_iff_degree_at_most_three() {
        // Forward direction on the integrable graph, reverse on the plane.
        let g = catalog::graph_deg3();
        let strat = g.global_degree(32, TOL).unwrap();
        assert!(strat.global_degree <= 3);
        assert!(deg3_pde_residual_max(g.as_surface().unwrap(), 32).unwrap() < 1e-12);

        let plane = catalog::plane();
        let strat = plane.global_degree(32, TOL).unwrap();
        assert!(strat.global_degree > 3);
        assert!(deg3_pde_residual_max(plane.as_surface().unwrap(), 32).unwrap() > 0.1);
    }

    #[test]
    fn intrinsic_measures_match_closed_forms() {
        let spec = QuadSpec::default();
        let v = catalog::plane().intrinsic_measure(4, &spec).unwrap();
        assert!((v - 2.0 / 3.0).abs() < 1e-6, "plane: {v}");
        let w = catalog::graph_deg3().intrinsic_measure(3, &spec).unwrap();
        assert!((w - 0.5).abs() < 1e-6, "graph: {w}");
        let l = catalog::line_x4().intrinsic_measure(3, &spec).unwrap();
        assert!((l - 1.0).abs() < 1e-6, "vertical curve: {l}");
    }

    #[test]
    fn intrinsic_measure_reports_nonconvergence() {
        let stingy = QuadSpec {
            rel_tol: 1e-18,
            max_cells: 64,
        };
        let err = catalog::plane().intrinsic_measure(4, &stingy).unwrap_err();
        match err {
            EngelError::ToleranceNotMet { estimate, .. } => {
                // The achieved estimate still travels with the error.
                assert!((estimate - 2.0 / 3.0).abs() < 0.05, "estimate {estimate}");
            }
            other => panic!("wrong error {other:?}"),
        }
    }

    #[test]
    fn dilation_rejects_nonpositive_factors() {
        assert!(catalog::plane().dilated(0.0).is_err());
        assert!(catalog::line_x4().dilated(-2.0).is_err());
    }

    #[test]
    fn stratification_rejects_trivial_resolution() {
        assert!(catalog::plane().global_degree(1, 1e-9).is_err());
    }

    #[test]
    fn intrinsic_measure_is_dilation_homogeneous() {
        let spec = QuadSpec::default();
        let cases: [(Submanifold, u8); 3] = [
            (catalog::plane(), 4),
            (catalog::graph_deg3(), 3),
            (catalog::line_x4(), 3),
        ];
        for (sigma, d) in cases {
            let base = sigma.intrinsic_measure(d, &spec).unwrap();
            for r in [0.5, 2.0] {
                let scaled = sigma.dilated(r).unwrap().intrinsic_measure(d, &spec).unwrap();
                let want = r.powi(d as i32) * base;
                assert!(
                    (scaled - want).abs() <= 1e-6 * want.max(1.0),
                    "{}: {scaled} vs {want}",
                    sigma.name()
                );
            }
        }
    }

    #[test]
    fn callable_representation_agrees_with_polynomials() {
        let poly = catalog::graph_deg3();
        let call = Submanifold::Surface(ParamSurface::from_callable(
            "graph-callable",
            [[0.0, 1.0], [0.0, 1.0]],
            |u| [u[0], u[1], u[0] * u[1], 0.5 * u[0] * u[0] * u[1]],
        ));
        for u in [[0.25, 0.75], [0.6, 0.4]] {
            let a = poly.riemannian_jacobian(&u);
            let b = call.riemannian_jacobian(&u);
            assert!((a - b).abs() < 1e-6);
            assert_eq!(
                poly.pointwise_degree(&u, 1e-6).unwrap().value,
                call.pointwise_degree(&u, 1e-6).unwrap().value
            );
        }
    }
}
