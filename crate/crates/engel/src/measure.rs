//! Numerical measure theory on the Engel group: ball-intersection
//! measures with error brackets, blow-up ratio sequences, greedy covering
//! counts, dimension estimates, negligibility decay and comparability of
//! spherical premeasures with the intrinsic measure.
//!
//! Balls are taken in the symmetrized box gauge. Exponents fitted here are
//! bi-Lipschitz invariants of the gauge, so the particular homogeneous
//! gauge only moves constants, not slopes.

use crate::error::{EngelError, Result};
use crate::group::{ball_contains, GroupPoint};
use crate::quad::{gl3_1d, gl3_2d, loglog_slope, pairwise_sum, QuadSpec};
use crate::submanifold::{ParamCurve, ParamSurface, Submanifold};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// A gauge ball with its inverse center precomputed.
#[derive(Debug, Clone, Copy)]
struct Ball {
    inv_center: GroupPoint,
    r: f64,
}

impl Ball {
    fn new(center: &GroupPoint, r: f64) -> Ball {
        Ball {
            inv_center: center.inv(),
            r,
        }
    }

    #[inline]
    fn contains(&self, p: &GroupPoint) -> bool {
        ball_contains(&self.inv_center, self.r, p)
    }
}

/// Options for the indicator quadrature behind ball measures.
#[derive(Debug, Clone, Copy)]
pub struct BallQuadSpec {
    /// Target bracket width relative to the estimate.
    pub rel_tol: f64,
    /// Cap on processed cells before giving up.
    pub max_cells: usize,
    /// How close the base point must be to the parametrized patch.
    pub on_sigma_tol: f64,
    /// Multiplies the gauge: scale `s` means membership `dist <= r / s`.
    /// Used by robustness experiments; 1.0 otherwise.
    pub gauge_scale: f64,
}

impl Default for BallQuadSpec {
    fn default() -> Self {
        BallQuadSpec {
            rel_tol: 1e-4,
            max_cells: 1 << 22,
            on_sigma_tol: 1e-6,
            gauge_scale: 1.0,
        }
    }
}

/// A measure value with its indicator bracket.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct MeasureBracket {
    pub value: f64,
    pub lo: f64,
    pub hi: f64,
    pub cells: usize,
}

#[derive(Clone, Copy)]
enum CellClass {
    Inside,
    Outside,
    /// Number of test points inside (out of the lattice size).
    Boundary(u32),
}

fn classify_curve_cell(
    curve: &ParamCurve,
    ball: &Ball,
    lo: f64,
    hi: f64,
    anchor: Option<f64>,
) -> CellClass {
    const POINTS: usize = 5;
    let mut inside = 0u32;
    for k in 0..POINTS {
        let t = lo + (hi - lo) * k as f64 / (POINTS - 1) as f64;
        if ball.contains(&curve.point(t)) {
            inside += 1;
        }
    }
    if inside == POINTS as u32 {
        CellClass::Inside
    } else if inside == 0 {
        match anchor {
            Some(a) if a >= lo && a <= hi => CellClass::Boundary(0),
            _ => CellClass::Outside,
        }
    } else {
        CellClass::Boundary(inside)
    }
}

/// Classification of a surface cell against the ball on a 3x3 lattice,
/// remembering along which axes the membership pattern varies. The varying
/// axes are the ones whose bisection separates inside from outside.
#[derive(Clone, Copy)]
struct SurfaceCellClass {
    inside: u32,
    vary0: bool,
    vary1: bool,
    anchor_forced: bool,
}

impl SurfaceCellClass {
    fn is_inside(&self) -> bool {
        self.inside == 9
    }
    fn is_outside(&self) -> bool {
        self.inside == 0 && !self.anchor_forced
    }
}

fn classify_surface_cell(
    surface: &ParamSurface,
    ball: &Ball,
    lo: [f64; 2],
    hi: [f64; 2],
    anchor: Option<[f64; 2]>,
) -> SurfaceCellClass {
    let mut p = [[false; 3]; 3];
    let mut inside = 0u32;
    for (i, row) in p.iter_mut().enumerate() {
        for (j, hit) in row.iter_mut().enumerate() {
            let u = [
                lo[0] + (hi[0] - lo[0]) * i as f64 / 2.0,
                lo[1] + (hi[1] - lo[1]) * j as f64 / 2.0,
            ];
            *hit = ball.contains(&surface.point(u));
            if *hit {
                inside += 1;
            }
        }
    }
    let vary0 = (0..3).any(|j| p[0][j] != p[1][j] || p[1][j] != p[2][j]);
    let vary1 = (0..3).any(|i| p[i][0] != p[i][1] || p[i][1] != p[i][2]);
    let anchor_forced = inside == 0
        && matches!(
            anchor,
            Some(a) if a[0] >= lo[0] && a[0] <= hi[0] && a[1] >= lo[1] && a[1] <= hi[1]
        );
    SurfaceCellClass {
        inside,
        vary0,
        vary1,
        anchor_forced,
    }
}

/// Jacobian integral over a curve cell: Gauss-Legendre for cells that are
/// large relative to the ball, one midpoint sample below that.
fn jint_curve(curve: &ParamCurve, lo: f64, hi: f64, fine_below: f64) -> f64 {
    if hi - lo >= fine_below {
        gl3_1d(&|t| curve.tangent_frame(t).norm(), lo, hi)
    } else {
        (hi - lo) * curve.tangent_frame(0.5 * (lo + hi)).norm()
    }
}

fn jint_surface(surface: &ParamSurface, lo: [f64; 2], hi: [f64; 2], fine_below: f64) -> f64 {
    let h = (hi[0] - lo[0]).max(hi[1] - lo[1]);
    if h >= fine_below {
        gl3_2d(&|u| surface.tangent_wedge(u).norm(), lo, hi)
    } else {
        (hi[0] - lo[0])
            * (hi[1] - lo[1])
            * surface
                .tangent_wedge([0.5 * (lo[0] + hi[0]), 0.5 * (lo[1] + hi[1])])
                .norm()
    }
}

const MAX_LEVELS: usize = 160;

fn ball_measure_curve(
    curve: &ParamCurve,
    ball: &Ball,
    anchor: Option<f64>,
    spec: &BallQuadSpec,
) -> Result<MeasureBracket> {
    let fine_below = ball.r * 0.125;
    let mut inner_parts: Vec<f64> = Vec::new();
    let mut boundary: Vec<(f64, f64)> = vec![(curve.domain[0], curve.domain[1])];
    // Treat the root like a fresh child so a fully inside/outside domain
    // resolves immediately.
    let mut first = true;
    let mut cells = 0usize;
    for _ in 0..MAX_LEVELS {
        let work: Vec<(f64, f64)> = if first {
            first = false;
            std::mem::take(&mut boundary)
        } else {
            std::mem::take(&mut boundary)
                .into_iter()
                .flat_map(|(lo, hi)| {
                    let mid = 0.5 * (lo + hi);
                    [(lo, mid), (mid, hi)]
                })
                .collect()
        };
        cells += work.len();
        let classified: Vec<(CellClass, (f64, f64))> = work
            .par_iter()
            .map(|&(lo, hi)| (classify_curve_cell(curve, ball, lo, hi, anchor), (lo, hi)))
            .collect();
        let mut frac_parts: Vec<f64> = Vec::new();
        let mut outer_parts: Vec<f64> = Vec::new();
        for (class, (lo, hi)) in classified {
            match class {
                CellClass::Inside => inner_parts.push(jint_curve(curve, lo, hi, fine_below)),
                CellClass::Outside => {}
                CellClass::Boundary(k) => {
                    let j = jint_curve(curve, lo, hi, fine_below);
                    outer_parts.push(j);
                    frac_parts.push(j * k as f64 / 5.0);
                    boundary.push((lo, hi));
                }
            }
        }
        let inner = pairwise_sum(&inner_parts);
        let outer = inner + pairwise_sum(&outer_parts);
        let estimate = inner + pairwise_sum(&frac_parts);
        if boundary.is_empty()
            || (outer - inner) <= spec.rel_tol * outer.max(f64::MIN_POSITIVE)
        {
            return Ok(MeasureBracket {
                value: estimate,
                lo: inner,
                hi: outer,
                cells,
            });
        }
        if cells > spec.max_cells {
            return Err(EngelError::ToleranceNotMet {
                estimate,
                lo: inner,
                hi: outer,
                requested: spec.rel_tol,
            });
        }
    }
    let inner = pairwise_sum(&inner_parts);
    Err(EngelError::ToleranceNotMet {
        estimate: inner,
        lo: inner,
        hi: inner,
        requested: spec.rel_tol,
    })
}

fn ball_measure_surface(
    surface: &ParamSurface,
    ball: &Ball,
    anchor: Option<[f64; 2]>,
    spec: &BallQuadSpec,
) -> Result<MeasureBracket> {
    type Cell = ([f64; 2], [f64; 2]);
    let fine_below = ball.r * 0.125;
    let mut inner_parts: Vec<f64> = Vec::new();
    let lo0 = [surface.domain[0][0], surface.domain[1][0]];
    let hi0 = [surface.domain[0][1], surface.domain[1][1]];
    let mut cells = 1usize;
    let root = classify_surface_cell(surface, ball, lo0, hi0, anchor);
    let mut boundary: Vec<(Cell, SurfaceCellClass)> = Vec::new();
    if root.is_inside() {
        let v = jint_surface(surface, lo0, hi0, fine_below);
        return Ok(MeasureBracket {
            value: v,
            lo: v,
            hi: v,
            cells,
        });
    } else if root.is_outside() {
        return Ok(MeasureBracket {
            value: 0.0,
            lo: 0.0,
            hi: 0.0,
            cells,
        });
    }
    boundary.push(((lo0, hi0), root));

    for _ in 0..MAX_LEVELS {
        // Bisect each boundary cell along the axes where its membership
        // pattern varies: those are the directions that separate inside
        // from outside. Anchor-forced cells with a flat pattern are still
        // hunting a trace smaller than the lattice; there the axis with
        // the larger gauge span is split so cells stay gauge-balanced.
        let work: Vec<Cell> = std::mem::take(&mut boundary)
            .into_par_iter()
            .flat_map_iter(|((lo, hi), class)| {
                let mid = [0.5 * (lo[0] + hi[0]), 0.5 * (lo[1] + hi[1])];
                let (split0, split1) = if class.vary0 || class.vary1 {
                    (class.vary0, class.vary1)
                } else {
                    let span0 = crate::group::dist(
                        &surface.point([lo[0], mid[1]]),
                        &surface.point([hi[0], mid[1]]),
                    );
                    let span1 = crate::group::dist(
                        &surface.point([mid[0], lo[1]]),
                        &surface.point([mid[0], hi[1]]),
                    );
                    if span0 > 2.0 * span1 {
                        (true, false)
                    } else if span1 > 2.0 * span0 {
                        (false, true)
                    } else {
                        (true, true)
                    }
                };
                match (split0, split1) {
                    (true, true) => vec![
                        (lo, mid),
                        ([mid[0], lo[1]], [hi[0], mid[1]]),
                        ([lo[0], mid[1]], [mid[0], hi[1]]),
                        (mid, hi),
                    ],
                    (true, false) => {
                        vec![(lo, [mid[0], hi[1]]), ([mid[0], lo[1]], hi)]
                    }
                    (false, true) => {
                        vec![(lo, [hi[0], mid[1]]), ([lo[0], mid[1]], hi)]
                    }
                    (false, false) => unreachable!("some axis always splits"),
                }
            })
            .collect();
        cells += work.len();
        let classified: Vec<(SurfaceCellClass, Cell)> = work
            .par_iter()
            .map(|&(lo, hi)| {
                (
                    classify_surface_cell(surface, ball, lo, hi, anchor),
                    (lo, hi),
                )
            })
            .collect();
        let mut frac_parts: Vec<f64> = Vec::new();
        let mut outer_parts: Vec<f64> = Vec::new();
        for (class, (lo, hi)) in classified {
            if class.is_inside() {
                inner_parts.push(jint_surface(surface, lo, hi, fine_below));
            } else if !class.is_outside() {
                let j = jint_surface(surface, lo, hi, fine_below);
                outer_parts.push(j);
                frac_parts.push(j * class.inside as f64 / 9.0);
                boundary.push(((lo, hi), class));
            }
        }
        let inner = pairwise_sum(&inner_parts);
        let outer = inner + pairwise_sum(&outer_parts);
        let estimate = inner + pairwise_sum(&frac_parts);
        if boundary.is_empty()
            || (outer - inner) <= spec.rel_tol * outer.max(f64::MIN_POSITIVE)
        {
            return Ok(MeasureBracket {
                value: estimate,
                lo: inner,
                hi: outer,
                cells,
            });
        }
        if cells > spec.max_cells {
            return Err(EngelError::ToleranceNotMet {
                estimate,
                lo: inner,
                hi: outer,
                requested: spec.rel_tol,
            });
        }
    }
    let inner = pairwise_sum(&inner_parts);
    Err(EngelError::ToleranceNotMet {
        estimate: inner,
        lo: inner,
        hi: inner,
        requested: spec.rel_tol,
    })
}

/// Multigrid descent of `dist(x, phi(u))` over the parameter domain.
/// Returns the best parameter found; reliable when the distance has a
/// single basin at the probed scales, which holds for the catalog.
fn find_anchor(sigma: &Submanifold, x: &GroupPoint) -> Vec<f64> {
    let inv_x = x.inv();
    let gauge_to = |p: &GroupPoint| crate::group::gauge(&inv_x.mul(p));
    let mut boxes: Vec<[f64; 2]> = sigma.domain();
    let mut best: Vec<f64> = boxes.iter().map(|iv| 0.5 * (iv[0] + iv[1])).collect();
    let mut best_d = f64::INFINITY;
    const K: usize = 16;
    for _ in 0..50 {
        let axes: Vec<Vec<f64>> = boxes
            .iter()
            .map(|iv| {
                (0..=K)
                    .map(|k| iv[0] + (iv[1] - iv[0]) * k as f64 / K as f64)
                    .collect()
            })
            .collect();
        let candidates: Vec<Vec<f64>> = if axes.len() == 1 {
            axes[0].iter().map(|&t| vec![t]).collect()
        } else {
            axes[0]
                .iter()
                .flat_map(|&a| axes[1].iter().map(move |&b| vec![a, b]))
                .collect()
        };
        let mut improved = false;
        for u in candidates {
            let d = gauge_to(&sigma.point(&u));
            if d < best_d {
                best_d = d;
                best = u;
                improved = true;
            }
        }
        let domain = sigma.domain();
        let mut small = true;
        for (axis, iv) in boxes.iter_mut().enumerate() {
            let h = (iv[1] - iv[0]) / K as f64;
            iv[0] = (best[axis] - 1.5 * h).max(domain[axis][0]);
            iv[1] = (best[axis] + 1.5 * h).min(domain[axis][1]);
            if iv[1] - iv[0] > 1e-14 {
                small = false;
            }
        }
        if (small && !improved) || best_d == 0.0 {
            break;
        }
    }
    best
}

/// Measure of the intersection of the patch with the closed gauge ball
/// `D(x, r)`, with refinement driven from a known in-ball parameter.
pub fn ball_measure_anchored(
    sigma: &Submanifold,
    x: &GroupPoint,
    r: f64,
    anchor: &[f64],
    spec: &BallQuadSpec,
) -> Result<MeasureBracket> {
    if !r.is_finite() || r <= 0.0 {
        return Err(EngelError::Domain(format!("radius must be positive, got {r}")));
    }
    let r_eff = r / spec.gauge_scale;
    let ball = Ball::new(x, r_eff);
    let anchored = ball.contains(&sigma.point(anchor));
    match sigma {
        Submanifold::Curve(c) => {
            ball_measure_curve(c, &ball, anchored.then(|| anchor[0]), spec)
        }
        Submanifold::Surface(s) => ball_measure_surface(
            s,
            &ball,
            anchored.then(|| [anchor[0], anchor[1]]),
            spec,
        ),
    }
}

/// Measure of `Sigma` inside the closed ball `D(x, r)`. The base point must
/// lie on the parametrized patch (within `spec.on_sigma_tol`).
pub fn ball_intersection_measure(
    sigma: &Submanifold,
    x: &GroupPoint,
    r: f64,
    spec: &BallQuadSpec,
) -> Result<MeasureBracket> {
    let anchor = find_anchor(sigma, x);
    let gap = crate::group::dist(x, &sigma.point(&anchor));
    if gap > spec.on_sigma_tol {
        return Err(EngelError::Precondition(format!(
            "base point is {gap:.3e} from the patch in gauge distance (tol {:.1e})",
            spec.on_sigma_tol
        )));
    }
    ball_measure_anchored(sigma, x, r, &anchor, spec)
}

/// Which conclusion a blow-up sequence is checked against.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum BlowupMode {
    /// Base point has degree below the global degree: the ratio
    /// `mu / r^{d(Sigma)}` must diverge. Carries the lower-bound exponent
    /// for the measure when one of the five proved cases applies.
    Divergence { bound_exponent: Option<f64> },
    /// Base point already has maximal degree; the ratio must stay bounded.
    /// Not a failure, reported as a notice.
    Boundedness,
}

/// Pass/fail style observations attached to a blow-up run.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct BlowupChecks {
    pub measures_nondecreasing_in_r: bool,
    /// `slope <= bound + 0.1`, when a proved bound applies to the case.
    pub slope_within_bound: Option<bool>,
    /// `slope < d(Sigma) - 0.1`, divergence mode only.
    pub slope_below_global: Option<bool>,
    /// Ratio strictly increasing as r decreases, divergence mode only.
    pub ratio_strictly_increasing: Option<bool>,
    /// max/min of the ratio sequence, boundedness mode only.
    pub ratio_spread: Option<f64>,
}

/// Full record of one blow-up experiment.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BlowupReport {
    pub submanifold: String,
    pub base_param: Vec<f64>,
    pub base_point: GroupPoint,
    pub base_degree: u8,
    pub global_degree: u8,
    /// Strictly decreasing.
    pub radii: Vec<f64>,
    pub measures: Vec<f64>,
    pub brackets: Vec<(f64, f64)>,
    /// `mu / r^{d(Sigma)}` per radius.
    pub ratios: Vec<f64>,
    /// OLS slope of `log mu` against `log r`.
    pub slope: f64,
    pub mode: BlowupMode,
    pub checks: BlowupChecks,
}

/// Options for blow-up sequences.
#[derive(Debug, Clone, Copy)]
pub struct BlowupSpec {
    pub ball: BallQuadSpec,
    pub zero_tol: f64,
    pub strat_resolution: usize,
}

impl Default for BlowupSpec {
    fn default() -> Self {
        BlowupSpec {
            ball: BallQuadSpec::default(),
            zero_tol: crate::tangent::DEFAULT_ZERO_TOL,
            strat_resolution: 64,
        }
    }
}

/// The measure lower-bound exponent proved for the given
/// (dimension, global degree, pointwise degree) combination, if any.
pub fn proved_bound_exponent(dim: usize, d_global: u8, d_point: u8) -> Option<f64> {
    match (dim, d_global, d_point) {
        (2, g, 2) if g >= 4 => Some(3.0),
        (2, g, 3) if g >= 4 => Some(3.5),
        (2, 3, 2) => Some(2.0),
        (1, g, 1) if g >= 2 => Some(1.5),
        (1, 3, 2) => Some(2.0),
        _ => None,
    }
}

/// Run ball measures over a decreasing radius sequence at `phi(u0)`, fit
/// the growth exponent and compare against the proved rate for the case.
pub fn blowup_sequence(
    sigma: &Submanifold,
    u0: &[f64],
    radii: &[f64],
    spec: &BlowupSpec,
) -> Result<BlowupReport> {
    if radii.len() < 4 {
        return Err(EngelError::Domain(
            "blow-up needs at least 4 radii".into(),
        ));
    }
    if !radii.windows(2).all(|w| w[0] > w[1]) || !radii.iter().all(|&r| r > 0.0) {
        return Err(EngelError::Domain(
            "radii must be positive and strictly decreasing".into(),
        ));
    }
    if !sigma.contains_param(u0) {
        return Err(EngelError::Domain(format!(
            "base parameter {u0:?} outside the domain"
        )));
    }
    let x = sigma.point(u0);
    let base_degree = sigma.pointwise_degree(u0, spec.zero_tol)?.value;
    let global_degree = sigma
        .global_degree(spec.strat_resolution, spec.zero_tol)?
        .global_degree;

    let results: Vec<Result<MeasureBracket>> = radii
        .par_iter()
        .map(|&r| ball_measure_anchored(sigma, &x, r, u0, &spec.ball))
        .collect();
    let mut measures = Vec::with_capacity(radii.len());
    let mut brackets = Vec::with_capacity(radii.len());
    for res in results {
        let m = res?;
        measures.push(m.value);
        brackets.push((m.lo, m.hi));
    }

    let d = global_degree as f64;
    let ratios: Vec<f64> = radii
        .iter()
        .zip(&measures)
        .map(|(r, m)| m / r.powf(d))
        .collect();
    let slope = loglog_slope(radii, &measures);

    // Radii are decreasing, so measures must be nonincreasing along the list.
    let measures_nondecreasing_in_r = measures
        .windows(2)
        .all(|w| w[1] <= w[0] * (1.0 + 1e-9))
        && measures.iter().all(|&m| m >= 0.0);

    let (mode, checks) = if base_degree < global_degree {
        let bound = proved_bound_exponent(sigma.dim(), global_degree, base_degree);
        let checks = BlowupChecks {
            measures_nondecreasing_in_r,
            slope_within_bound: bound.map(|b| slope <= b + 0.1),
            slope_below_global: Some(slope < d - 0.1),
            ratio_strictly_increasing: Some(ratios.windows(2).all(|w| w[1] > w[0])),
            ratio_spread: None,
        };
        (
            BlowupMode::Divergence {
                bound_exponent: bound,
            },
            checks,
        )
    } else {
        let max = ratios.iter().cloned().fold(f64::MIN, f64::max);
        let min = ratios.iter().cloned().fold(f64::MAX, f64::min);
        let checks = BlowupChecks {
            measures_nondecreasing_in_r,
            slope_within_bound: None,
            slope_below_global: None,
            ratio_strictly_increasing: None,
            ratio_spread: Some(max / min),
        };
        (BlowupMode::Boundedness, checks)
    };

    Ok(BlowupReport {
        submanifold: sigma.name().to_string(),
        base_param: u0.to_vec(),
        base_point: x,
        base_degree,
        global_degree,
        radii: radii.to_vec(),
        measures,
        brackets,
        ratios,
        slope,
        mode,
        checks,
    })
}

// ---------------------------------------------------------------------------
// Greedy coverings
// ---------------------------------------------------------------------------

/// Options for greedy covering runs.
#[derive(Debug, Clone)]
pub struct CoverSpec {
    /// Adjacent grid samples must be within `step_fraction * delta` of each
    /// other in gauge distance when the grid is chosen automatically.
    pub step_fraction: f64,
    /// Explicit cell counts per axis; overrides the automatic choice.
    pub grid: Option<Vec<usize>>,
    /// Guard on the total automatic sample count.
    pub max_samples: usize,
}

impl Default for CoverSpec {
    fn default() -> Self {
        CoverSpec {
            step_fraction: 0.25,
            grid: None,
            max_samples: 1 << 26,
        }
    }
}

/// Result of one greedy covering run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CoverRun {
    pub delta: f64,
    pub count: usize,
    /// Cells per axis of the sample grid actually used.
    pub grid: Vec<usize>,
    /// Balls that covered only their own center sample.
    pub isolated: usize,
}

struct BitGrid {
    bits: Vec<u64>,
}

impl BitGrid {
    fn new(n: usize) -> BitGrid {
        BitGrid {
            bits: vec![0; n.div_ceil(64)],
        }
    }
    #[inline]
    fn get(&self, i: usize) -> bool {
        self.bits[i >> 6] & (1u64 << (i & 63)) != 0
    }
    #[inline]
    fn set(&mut self, i: usize) {
        self.bits[i >> 6] |= 1u64 << (i & 63);
    }
}

/// Pick per-axis cell counts so adjacent samples sit within
/// `delta * frac` of each other in gauge distance.
fn auto_grid(
    point: &dyn Fn(&[f64]) -> GroupPoint,
    domain: &[[f64; 2]],
    delta: f64,
    frac: f64,
    max_samples: usize,
) -> Result<Vec<usize>> {
    let target = delta * frac;
    let dim = domain.len();
    let mut cells = vec![1usize; dim];
    for axis in 0..dim {
        // Probe the worst-case gauge step over a coarse set of positions.
        let probes: Vec<Vec<f64>> = {
            let quantiles = [0.0, 0.25, 0.5, 0.75, 1.0];
            let mut out = Vec::new();
            if dim == 1 {
                for q in quantiles {
                    out.push(vec![domain[0][0] + q * (domain[0][1] - domain[0][0])]);
                }
            } else {
                for qa in quantiles {
                    for qb in quantiles {
                        out.push(vec![
                            domain[0][0] + qa * (domain[0][1] - domain[0][0]),
                            domain[1][0] + qb * (domain[1][1] - domain[1][0]),
                        ]);
                    }
                }
            }
            out
        };
        let len = domain[axis][1] - domain[axis][0];
        let mut n = 1usize;
        loop {
            let h = len / n as f64;
            let worst = probes
                .iter()
                .map(|u| {
                    let mut v = u.clone();
                    v[axis] = (v[axis] + h).min(domain[axis][1]);
                    let mut w = v.clone();
                    w[axis] -= h;
                    crate::group::dist(&point(&w), &point(&v))
                })
                .fold(0.0f64, f64::max);
            if worst <= target {
                break;
            }
            n *= 2;
            let total: usize = cells
                .iter()
                .enumerate()
                .map(|(a, &c)| if a == axis { n + 1 } else { c + 1 })
                .product();
            if total > max_samples {
                return Err(EngelError::Resolution(format!(
                    "automatic grid for delta {delta} exceeds {max_samples} samples"
                )));
            }
        }
        cells[axis] = n;
    }
    Ok(cells)
}

fn greedy_cover_1d(
    point: &dyn Fn(f64) -> GroupPoint,
    lo: f64,
    hi: f64,
    n: usize,
    delta: f64,
) -> (usize, usize) {
    let coord = |i: usize| lo + (hi - lo) * i as f64 / n as f64;
    let mut covered = BitGrid::new(n + 1);
    let mut count = 0usize;
    let mut isolated = 0usize;
    for i in 0..=n {
        if covered.get(i) {
            continue;
        }
        count += 1;
        // Advance the center until the frontier sample sits on the ball
        // edge, so each ball covers a full 2*delta of new ground. The
        // gauge is symmetric, so the advanced ball still covers sample i.
        let frontier = Ball::new(&point(coord(i)), delta);
        let mut c = i;
        while c < n && frontier.contains(&point(coord(c + 1))) {
            c += 1;
        }
        let ball = Ball::new(&point(coord(c)), delta);
        covered.set(i);
        let mut marked = 1usize;
        for j in (i + 1)..=n {
            if ball.contains(&point(coord(j))) {
                if !covered.get(j) {
                    covered.set(j);
                    marked += 1;
                }
            } else if j > c {
                break;
            }
        }
        if marked == 1 {
            isolated += 1;
        }
    }
    (count, isolated)
}

fn greedy_cover_2d(
    point: &dyn Fn(f64, f64) -> GroupPoint,
    domain: &[[f64; 2]],
    cells: &[usize],
    delta: f64,
) -> (usize, usize) {
    let (n0, n1) = (cells[0], cells[1]);
    let c0 = |a: usize| domain[0][0] + (domain[0][1] - domain[0][0]) * a as f64 / n0 as f64;
    let c1 = |b: usize| domain[1][0] + (domain[1][1] - domain[1][0]) * b as f64 / n1 as f64;
    let idx = |a: usize, b: usize| a * (n1 + 1) + b;
    let mut covered = BitGrid::new((n0 + 1) * (n1 + 1));
    let mut count = 0usize;
    let mut isolated = 0usize;

    // Scan a contiguous in-ball run of rows in one column, expanding from a
    // seed row. Returns the run and marks it. Cross-sections of gauge balls
    // along the catalog parametrizations are intervals; a missed fragment
    // only costs an extra ball later, never an invalid cover.
    let run_in_column = |a: usize,
                             seed: usize,
                             probe_halfwidth: usize,
                             ball: &Ball,
                             covered: &mut BitGrid,
                             marked: &mut usize|
     -> Option<(usize, usize)> {
        let u0 = c0(a);
        let hit = if ball.contains(&point(u0, c1(seed))) {
            Some(seed)
        } else {
            let mut found = None;
            for off in 1..=probe_halfwidth {
                if seed + off <= n1 && ball.contains(&point(u0, c1(seed + off))) {
                    found = Some(seed + off);
                    break;
                }
                if seed >= off && ball.contains(&point(u0, c1(seed - off))) {
                    found = Some(seed - off);
                    break;
                }
            }
            found
        }?;
        let mut blo = hit;
        while blo > 0 && ball.contains(&point(u0, c1(blo - 1))) {
            blo -= 1;
        }
        let mut bhi = hit;
        while bhi < n1 && ball.contains(&point(u0, c1(bhi + 1))) {
            bhi += 1;
        }
        for b in blo..=bhi {
            let k = idx(a, b);
            if !covered.get(k) {
                covered.set(k);
                *marked += 1;
            }
        }
        Some((blo, bhi))
    };

    for a in 0..=n0 {
        for b in 0..=n1 {
            if covered.get(idx(a, b)) {
                continue;
            }
            count += 1;
            // Advance the center up the inner axis so the frontier sample
            // sits on the ball edge (sound: the gauge is symmetric).
            let frontier = Ball::new(&point(c0(a), c1(b)), delta);
            let mut c = b;
            while c < n1 && frontier.contains(&point(c0(a), c1(c + 1))) {
                c += 1;
            }
            let ball = Ball::new(&point(c0(a), c1(c)), delta);
            let mut marked = 1usize;
            // Center column: rows below b are already covered.
            covered.set(idx(a, b));
            let mut bhi = c;
            for j in (b + 1)..=n1 {
                if ball.contains(&point(c0(a), c1(j))) {
                    bhi = bhi.max(j);
                    let k = idx(a, j);
                    if !covered.get(k) {
                        covered.set(k);
                        marked += 1;
                    }
                } else if j > c {
                    break;
                }
            }
            let mut prev = (b, bhi);
            for a2 in (a + 1)..=n0 {
                let width = prev.1 - prev.0;
                let seed = (prev.0 + width / 2).min(n1);
                match run_in_column(a2, seed, width + 8, &ball, &mut covered, &mut marked) {
                    Some(run) => prev = run,
                    None => break,
                }
            }
            if marked == 1 {
                isolated += 1;
            }
        }
    }
    (count, isolated)
}

/// Greedy covering count of the patch at scale `delta`: an upper estimate
/// of the number of closed gauge balls of radius `delta` needed to cover it.
pub fn covering_count(sigma: &Submanifold, delta: f64, spec: &CoverSpec) -> Result<CoverRun> {
    if !delta.is_finite() || delta <= 0.0 {
        return Err(EngelError::Domain(format!(
            "covering scale must be positive, got {delta}"
        )));
    }
    let domain = sigma.domain();
    let cells = match &spec.grid {
        Some(g) => {
            if g.len() != domain.len() || g.contains(&0) {
                return Err(EngelError::Domain(
                    "explicit covering grid must give a positive cell count per axis".into(),
                ));
            }
            g.clone()
        }
        None => auto_grid(
            &|u: &[f64]| sigma.point(u),
            &domain,
            delta,
            spec.step_fraction,
            spec.max_samples,
        )?,
    };
    let (count, isolated) = match sigma {
        Submanifold::Curve(c) => greedy_cover_1d(
            &|t| c.point(t),
            domain[0][0],
            domain[0][1],
            cells[0],
            delta,
        ),
        Submanifold::Surface(s) => {
            greedy_cover_2d(&|a, b| s.point([a, b]), &domain, &cells, delta)
        }
    };
    if count > 4 && isolated * 5 > count {
        return Err(EngelError::Resolution(format!(
            "{isolated} of {count} balls covered only their center sample; \
             grid too coarse for delta {delta}"
        )));
    }
    Ok(CoverRun {
        delta,
        count,
        grid: cells,
        isolated,
    })
}

/// Covering counts across scales with premeasures and the fitted dimension.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CoveringReport {
    pub submanifold: String,
    /// Strictly decreasing scales.
    pub scales: Vec<f64>,
    pub counts: Vec<usize>,
    /// Exponent used for the premeasure sums (the global degree).
    pub exponent: u8,
    /// `N(delta) * delta^exponent` per scale.
    pub premeasures: Vec<f64>,
    /// Slope of `log N` against `log(1/delta)`.
    pub fitted_dimension: f64,
    pub counts_monotone: bool,
}

/// Estimate the metric dimension of the patch by covering-count scaling.
pub fn dimension_estimate(
    sigma: &Submanifold,
    scales: &[f64],
    spec: &CoverSpec,
    zero_tol: f64,
) -> Result<CoveringReport> {
    if scales.len() < 4 {
        return Err(EngelError::Domain(
            "dimension estimate needs at least 4 scales".into(),
        ));
    }
    if !scales.windows(2).all(|w| w[0] > w[1]) {
        return Err(EngelError::Domain("scales must be strictly decreasing".into()));
    }
    let exponent = sigma.global_degree(64, zero_tol)?.global_degree;
    let mut counts = Vec::with_capacity(scales.len());
    for &d in scales {
        counts.push(covering_count(sigma, d, spec)?.count.max(1));
    }
    let inv: Vec<f64> = scales.iter().map(|d| 1.0 / d).collect();
    let nf: Vec<f64> = counts.iter().map(|&n| n as f64).collect();
    let fitted_dimension = loglog_slope(&inv, &nf);
    let premeasures: Vec<f64> = scales
        .iter()
        .zip(&counts)
        .map(|(d, &n)| n as f64 * d.powi(exponent as i32))
        .collect();
    let counts_monotone = counts.windows(2).all(|w| w[1] >= w[0]);
    Ok(CoveringReport {
        submanifold: sigma.name().to_string(),
        scales: scales.to_vec(),
        counts,
        exponent,
        premeasures,
        fitted_dimension,
        counts_monotone,
    })
}

/// A low-degree locus given as a slice of the parameter domain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Stratum {
    /// Fix `axis` to `value`; the other surface parameter runs over `range`.
    AxisSlice {
        axis: usize,
        value: f64,
        range: [f64; 2],
    },
    /// A single parameter point (curve strata).
    Point(Vec<f64>),
}

/// Covering premeasures of a low-degree stratum across scales.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DecayTable {
    pub submanifold: String,
    pub exponent: u8,
    pub scales: Vec<f64>,
    pub counts: Vec<usize>,
    /// `N(delta) * delta^exponent`.
    pub premeasures: Vec<f64>,
    /// Slope of `log premeasure` against `log delta`.
    pub fitted_decay_exponent: f64,
    pub monotone_decreasing: bool,
    /// First premeasure divided by the last (scales are decreasing).
    pub decay_factor: f64,
}

/// Cover the stratum with balls of each scale and record how the spherical
/// premeasure `N * delta^d` decays.
pub fn negligibility_decay(
    sigma: &Submanifold,
    stratum: &Stratum,
    d: u8,
    scales: &[f64],
    spec: &CoverSpec,
) -> Result<DecayTable> {
    if scales.len() < 2 || !scales.windows(2).all(|w| w[0] > w[1]) {
        return Err(EngelError::Domain(
            "negligibility needs at least 2 strictly decreasing scales".into(),
        ));
    }
    let surface_point = |axis: usize, value: f64, s: f64| -> GroupPoint {
        let u = if axis == 0 { [value, s] } else { [s, value] };
        sigma.point(&u)
    };
    let mut counts = Vec::with_capacity(scales.len());
    for &delta in scales {
        let count = match stratum {
            Stratum::Point(u) => {
                if !sigma.contains_param(u) {
                    return Err(EngelError::Domain(format!(
                        "stratum point {u:?} outside the domain"
                    )));
                }
                1
            }
            Stratum::AxisSlice { axis, value, range } => {
                if sigma.dim() != 2 || *axis > 1 {
                    return Err(EngelError::Shape(
                        "axis slices apply to surface parameters 0 or 1".into(),
                    ));
                }
                let slice_domain = [[range[0], range[1]]];
                let cells = auto_grid(
                    &|s: &[f64]| surface_point(*axis, *value, s[0]),
                    &slice_domain,
                    delta,
                    spec.step_fraction,
                    spec.max_samples,
                )?;
                greedy_cover_1d(
                    &|s| surface_point(*axis, *value, s),
                    range[0],
                    range[1],
                    cells[0],
                    delta,
                )
                .0
            }
        };
        counts.push(count.max(1));
    }
    let premeasures: Vec<f64> = scales
        .iter()
        .zip(&counts)
        .map(|(delta, &n)| n as f64 * delta.powi(d as i32))
        .collect();
    let fitted_decay_exponent = loglog_slope(scales, &premeasures);
    let monotone_decreasing = premeasures.windows(2).all(|w| w[1] < w[0]);
    let decay_factor = premeasures[0] / premeasures[premeasures.len() - 1];
    Ok(DecayTable {
        submanifold: sigma.name().to_string(),
        exponent: d,
        scales: scales.to_vec(),
        counts,
        premeasures,
        fitted_decay_exponent,
        monotone_decreasing,
        decay_factor,
    })
}

/// Spherical covering premeasure against the intrinsic measure on a patch
/// of constant degree.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ComparabilityTable {
    pub submanifold: String,
    pub degree: u8,
    pub intrinsic: f64,
    pub scales: Vec<f64>,
    pub counts: Vec<usize>,
    pub premeasures: Vec<f64>,
    /// premeasure / intrinsic per scale.
    pub ratios: Vec<f64>,
    /// Successive ratios within a factor 2 of each other.
    pub stabilizes: bool,
    /// All ratios inside [0.05, 20].
    pub within_band: bool,
}

/// Compare `N(delta) * delta^d` against the intrinsic measure on a patch
/// whose pointwise degree is constant (verified first).
pub fn hausdorff_vs_intrinsic(
    sigma: &Submanifold,
    scales: &[f64],
    cover_spec: &CoverSpec,
    quad_spec: &QuadSpec,
    zero_tol: f64,
) -> Result<ComparabilityTable> {
    if scales.len() < 2 || !scales.windows(2).all(|w| w[0] > w[1]) {
        return Err(EngelError::Domain(
            "comparability needs at least 2 strictly decreasing scales".into(),
        ));
    }
    let strat = sigma.global_degree(64, zero_tol)?;
    if strat.low_degree_count() > 0 {
        return Err(EngelError::Precondition(format!(
            "patch has {} samples of degree below {}; comparability needs a \
             constant-degree patch",
            strat.low_degree_count(),
            strat.global_degree
        )));
    }
    let d = strat.global_degree;
    let intrinsic = sigma.intrinsic_measure(d, quad_spec)?;
    let mut counts = Vec::new();
    for &delta in scales {
        counts.push(covering_count(sigma, delta, cover_spec)?.count.max(1));
    }
    let premeasures: Vec<f64> = scales
        .iter()
        .zip(&counts)
        .map(|(delta, &n)| n as f64 * delta.powi(d as i32))
        .collect();
    let ratios: Vec<f64> = premeasures.iter().map(|p| p / intrinsic).collect();
    let stabilizes = ratios
        .windows(2)
        .all(|w| w[1] / w[0] <= 2.0 && w[0] / w[1] <= 2.0);
    let within_band = ratios.iter().all(|&r| (0.05..=20.0).contains(&r));
    Ok(ComparabilityTable {
        submanifold: sigma.name().to_string(),
        degree: d,
        intrinsic,
        scales: scales.to_vec(),
        counts,
        premeasures,
        ratios,
        stabilizes,
        within_band,
    })
}

/// Geometric radius sequence `base * 2^{-k}` for `k` in `0..count`.
pub fn geometric_radii(base: f64, count: usize) -> Vec<f64> {
    (0..count).map(|k| base * 2.0f64.powi(-(k as i32))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    #[test]
    fn plane_ball_measure_matches_closed_form() {
        let plane = catalog::plane();
        let spec = BallQuadSpec::default();
        let r = 0.1;
        let m = ball_intersection_measure(&plane, &GroupPoint::IDENTITY, r, &spec).unwrap();
        let exact = 4.0 * r * r + 2.0 * r.powi(4) / 3.0;
        assert!(m.lo <= exact && exact <= m.hi, "bracket misses exact value");
        assert!(m.lo <= m.value && m.value <= m.hi);
        assert!((m.value - exact).abs() < 1e-4 * exact, "{} vs {exact}", m.value);
    }

    #[test]
    fn vertical_curve_ball_measure() {
        let c = catalog::line_x4();
        let spec = BallQuadSpec::default();
        let u0 = [0.5];
        let x = c.point(&u0);
        for r in [0.1, 0.05] {
            let m = ball_measure_anchored(&c, &x, r, &u0, &spec).unwrap();
            let exact = 2.0 * r.powi(3);
            assert!((m.value - exact).abs() < 1e-3 * exact, "{} vs {exact}", m.value);
            assert!(m.lo <= exact && exact <= m.hi);
        }
    }

    #[test]
    fn measure_monotone_in_radius_and_vanishing() {
        let s = catalog::ruled_x1x3();
        let spec = BallQuadSpec::default();
        let u0 = [0.0, 0.0];
        let x = s.point(&u0);
        let radii = geometric_radii(0.25, 6);
        let ms: Vec<f64> = radii
            .iter()
            .map(|&r| ball_measure_anchored(&s, &x, r, &u0, &spec).unwrap().value)
            .collect();
        for w in ms.windows(2) {
            assert!(w[1] < w[0]);
        }
        assert!(ms.last().unwrap() < &1e-3);
    }

    #[test]
    fn off_patch_base_point_is_rejected() {
        let plane = catalog::plane();
        let x = GroupPoint::new(0.0, 0.0, 0.5, 0.0);
        let err =
            ball_intersection_measure(&plane, &x, 0.1, &BallQuadSpec::default()).unwrap_err();
        assert!(matches!(err, EngelError::Precondition(_)));
    }

    #[test]
    fn big_radius_gives_full_patch_measure() {
        let plane = catalog::plane();
        let m = ball_intersection_measure(&plane, &GroupPoint::IDENTITY, 10.0,
            &BallQuadSpec::default())
        .unwrap();
        let full = 4.0 + 2.0 / 3.0; // integral of 1 + u1^2/2 over [-1,1]^2
        assert!((m.value - full).abs() < 1e-6);
        assert_eq!(m.lo, m.hi);
    }

    #[test]
    fn blowup_at_plane_origin_has_slope_two() {
        let report = blowup_sequence(
            &catalog::plane(),
            &[0.0, 0.0],
            &geometric_radii(0.125, 8),
            &BlowupSpec::default(),
        )
        .unwrap();
        assert_eq!(report.base_degree, 2);
        assert_eq!(report.global_degree, 4);
        assert!((report.slope - 2.0).abs() < 0.05, "slope {}", report.slope);
        assert!(matches!(
            report.mode,
            BlowupMode::Divergence {
                bound_exponent: Some(b)
            } if b == 3.0
        ));
        assert!(report.checks.measures_nondecreasing_in_r);
        assert_eq!(report.checks.ratio_strictly_increasing, Some(true));
        assert_eq!(report.checks.slope_within_bound, Some(true));
        assert_eq!(report.checks.slope_below_global, Some(true));
    }

    #[test]
    fn blowup_at_max_degree_point_is_bounded() {
        let report = blowup_sequence(
            &catalog::line_x3(),
            &[0.0],
            &geometric_radii(0.125, 6),
            &BlowupSpec::default(),
        )
        .unwrap();
        assert_eq!(report.mode, BlowupMode::Boundedness);
        let spread = report.checks.ratio_spread.unwrap();
        assert!(spread < 1.5, "spread {spread}");
    }

    #[test]
    fn blowup_rejects_bad_radius_lists() {
        let sigma = catalog::line_x4();
        let spec = BlowupSpec::default();
        assert!(blowup_sequence(&sigma, &[0.5], &[0.1, 0.05, 0.02], &spec).is_err());
        assert!(blowup_sequence(&sigma, &[0.5], &[0.1, 0.1, 0.05, 0.02], &spec).is_err());
    }

    #[test]
    fn gauge_rescaling_barely_moves_the_slope() {
        let radii = geometric_radii(0.125, 8);
        let sigma = catalog::parabola_x1x4();
        let base = blowup_sequence(&sigma, &[0.0], &radii, &BlowupSpec::default()).unwrap();
        let mut spec = BlowupSpec::default();
        spec.ball.gauge_scale = 2.0;
        let doubled = blowup_sequence(&sigma, &[0.0], &radii, &spec).unwrap();
        assert!(
            (base.slope - doubled.slope).abs() < 0.05,
            "slopes {} vs {}",
            base.slope,
            doubled.slope
        );
    }

    #[test]
    fn horizontal_segment_covering_count() {
        let line = catalog::line_x1();
        for delta in [0.05, 0.025, 0.0125] {
            let run = covering_count(&line, delta, &CoverSpec::default()).unwrap();
            let ideal = 1.0 / (2.0 * delta);
            assert!(
                (run.count as f64 - ideal).abs() <= 1.0 + 1e-9,
                "N({delta}) = {} vs {ideal}",
                run.count
            );
        }
    }

    #[test]
    fn whole_patch_in_one_ball() {
        let line = catalog::line_x1();
        let run = covering_count(&line, 3.0, &CoverSpec::default()).unwrap();
        assert_eq!(run.count, 1);
    }

    #[test]
    fn plane_patch_covering_scales_like_fourth_power() {
        let patch = catalog::plane()
            .with_domain(&[[1.0, 2.0], [0.0, 1.0]])
            .unwrap();
        let spec = CoverSpec::default();
        let n1 = covering_count(&patch, 0.25, &spec).unwrap().count;
        let n2 = covering_count(&patch, 0.125, &spec).unwrap().count;
        let ratio = n2 as f64 / n1 as f64;
        assert!(
            (11.0..=23.0).contains(&ratio),
            "halving the scale multiplied N by {ratio} ({n1} -> {n2})"
        );
    }

    #[test]
    fn coarse_explicit_grid_triggers_resolution_error() {
        let line = catalog::line_x4();
        let spec = CoverSpec {
            grid: Some(vec![16]),
            ..CoverSpec::default()
        };
        let err = covering_count(&line, 0.05, &spec).unwrap_err();
        assert!(matches!(err, EngelError::Resolution(_)));
    }

    #[test]
    fn dimension_of_straight_lines() {
        let spec = CoverSpec::default();
        let tol = crate::tangent::DEFAULT_ZERO_TOL;
        let scales: Vec<f64> = (3..=7).map(|k| 2.0f64.powi(-k)).collect();
        let rep = dimension_estimate(&catalog::line_x1(), &scales, &spec, tol).unwrap();
        assert!((rep.fitted_dimension - 1.0).abs() < 0.1, "{}", rep.fitted_dimension);
        assert!(rep.counts_monotone);

        let scales: Vec<f64> = (2..=5).map(|k| 2.0f64.powi(-k)).collect();
        let rep = dimension_estimate(&catalog::line_x4(), &scales, &spec, tol).unwrap();
        assert!((rep.fitted_dimension - 3.0).abs() < 0.3, "{}", rep.fitted_dimension);
    }

    #[test]
    fn plane_stratum_premeasure_decays_cubically() {
        let scales: Vec<f64> = (1..=5).map(|k| 2.0f64.powi(-k)).collect();
        let table = negligibility_decay(
            &catalog::plane(),
            &Stratum::AxisSlice {
                axis: 0,
                value: 0.0,
                range: [-1.0, 1.0],
            },
            4,
            &scales,
            &CoverSpec::default(),
        )
        .unwrap();
        assert!(table.monotone_decreasing);
        assert!(table.decay_factor >= 4.0);
        assert!(
            (table.fitted_decay_exponent - 3.0).abs() < 0.5,
            "decay exponent {}",
            table.fitted_decay_exponent
        );
    }

    #[test]
    fn point_stratum_premeasure_is_delta_cubed() {
        let scales: Vec<f64> = (1..=5).map(|k| 2.0f64.powi(-k)).collect();
        let table = negligibility_decay(
            &catalog::parabola_x3x4(),
            &Stratum::Point(vec![0.0]),
            3,
            &scales,
            &CoverSpec::default(),
        )
        .unwrap();
        for (delta, p) in table.scales.iter().zip(&table.premeasures) {
            assert!((p - delta.powi(3)).abs() < 1e-15);
        }
        assert!(table.monotone_decreasing && table.decay_factor >= 4.0);
    }

    #[test]
    fn comparability_needs_constant_degree() {
        let err = hausdorff_vs_intrinsic(
            &catalog::plane(),
            &[0.25, 0.125],
            &CoverSpec::default(),
            &QuadSpec::default(),
            crate::tangent::DEFAULT_ZERO_TOL,
        )
        .unwrap_err();
        assert!(matches!(err, EngelError::Precondition(_)));
    }

    #[test]
    fn comparability_on_clean_plane_patch() {
        let patch = catalog::plane()
            .with_domain(&[[1.0, 2.0], [0.0, 1.0]])
            .unwrap();
        let table = hausdorff_vs_intrinsic(
            &patch,
            &[0.25, 0.177, 0.125],
            &CoverSpec::default(),
            &QuadSpec::default(),
            crate::tangent::DEFAULT_ZERO_TOL,
        )
        .unwrap();
        assert_eq!(table.degree, 4);
        assert!((table.intrinsic - 7.0 / 6.0).abs() < 1e-6);
        assert!(table.stabilizes, "ratios {:?}", table.ratios);
        assert!(table.within_band, "ratios {:?}", table.ratios);
    }

    #[test]
    fn comparability_ratio_invariant_under_dilation() {
        // Dilating by 2 scales coordinates by powers of two, so covering
        // membership tests are bitwise identical at doubled scales and
        // both premeasure and intrinsic measure pick up the factor 2^4.
        let patch = catalog::plane()
            .with_domain(&[[1.0, 2.0], [0.0, 1.0]])
            .unwrap();
        let scales = [0.25, 0.177, 0.125];
        let base = hausdorff_vs_intrinsic(
            &patch,
            &scales,
            &CoverSpec::default(),
            &QuadSpec::default(),
            crate::tangent::DEFAULT_ZERO_TOL,
        )
        .unwrap();
        let doubled_scales: Vec<f64> = scales.iter().map(|d| 2.0 * d).collect();
        let dilated = hausdorff_vs_intrinsic(
            &patch.dilated(2.0).unwrap(),
            &doubled_scales,
            &CoverSpec::default(),
            &QuadSpec::default(),
            crate::tangent::DEFAULT_ZERO_TOL,
        )
        .unwrap();
        assert_eq!(base.counts, dilated.counts);
        for (a, b) in base.ratios.iter().zip(&dilated.ratios) {
            assert!((a - b).abs() < 1e-3 * a.abs(), "{a} vs {b}");
        }
    }
}
