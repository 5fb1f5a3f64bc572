//! Built-in submanifolds used by the scenario suite and the tests.
//!
//! Each entry has a slug id plus a tuple-style alias, and a canonical
//! parameter domain chosen so that the whole scenario suite (degrees,
//! measures, blow-ups, coverings) runs on it unchanged.

use crate::error::{EngelError, Result};
use crate::poly::Poly;
use crate::submanifold::{ParamCurve, ParamSurface, Submanifold};

fn p2(terms: &[([u32; 2], f64)]) -> Poly<2> {
    Poly::new(terms.to_vec())
}

fn p1(terms: &[([u32; 1], f64)]) -> Poly<1> {
    Poly::new(terms.to_vec())
}

/// `(u1, u2, 0, 0)` on `[-1,1]^2`; degree 4 with a degree-2 line `{u1=0}`.
pub fn plane() -> Submanifold {
    Submanifold::Surface(ParamSurface::from_polys(
        "plane",
        [[-1.0, 1.0], [-1.0, 1.0]],
        [
            p2(&[([1, 0], 1.0)]),
            p2(&[([0, 1], 1.0)]),
            Poly::zero(),
            Poly::zero(),
        ],
    ))
}

/// `(u1, 0, u3, 0)` on `[-1,1]^2`; degree 4 with a degree-3 line `{u1=0}`.
pub fn ruled_x1x3() -> Submanifold {
    Submanifold::Surface(ParamSurface::from_polys(
        "ruled-x1x3",
        [[-1.0, 1.0], [-1.0, 1.0]],
        [
            p2(&[([1, 0], 1.0)]),
            Poly::zero(),
            p2(&[([0, 1], 1.0)]),
            Poly::zero(),
        ],
    ))
}

/// `(u1, u2, u1 u2, u1^2 u2 / 2)` on `[0,1]^2`; degree 3 with a degree-2
/// edge `{u2=0}`. The third and fourth coordinates integrate the degree-3
/// constraint system, so its residuals vanish identically.
pub fn graph_deg3() -> Submanifold {
    Submanifold::Surface(ParamSurface::from_polys(
        "graph-deg3",
        [[0.0, 1.0], [0.0, 1.0]],
        [
            p2(&[([1, 0], 1.0)]),
            p2(&[([0, 1], 1.0)]),
            p2(&[([1, 1], 1.0)]),
            p2(&[([2, 1], 0.5)]),
        ],
    ))
}

/// Horizontal segment `(t, 0, 0, 0)` on `[0,1]`; degree 1.
pub fn line_x1() -> Submanifold {
    Submanifold::Curve(ParamCurve::from_polys(
        "line-x1",
        [0.0, 1.0],
        [p1(&[([1], 1.0)]), Poly::zero(), Poly::zero(), Poly::zero()],
    ))
}

/// `(0, 0, t, 0)` on `[-1,1]`; degree 2 everywhere.
pub fn line_x3() -> Submanifold {
    Submanifold::Curve(ParamCurve::from_polys(
        "line-x3",
        [-1.0, 1.0],
        [Poly::zero(), Poly::zero(), p1(&[([1], 1.0)]), Poly::zero()],
    ))
}

/// Vertical unit segment `(0, 0, 0, t)` on `[0,1]`; degree 3 everywhere.
pub fn line_x4() -> Submanifold {
    Submanifold::Curve(ParamCurve::from_polys(
        "line-x4",
        [0.0, 1.0],
        [Poly::zero(), Poly::zero(), Poly::zero(), p1(&[([1], 1.0)])],
    ))
}

/// `(t, 0, 0, t^2)` on `[-1,1]`; degree 3 with a degree-1 point at `t=0`.
pub fn parabola_x1x4() -> Submanifold {
    Submanifold::Curve(ParamCurve::from_polys(
        "parabola-x1x4",
        [-1.0, 1.0],
        [p1(&[([1], 1.0)]), Poly::zero(), Poly::zero(), p1(&[([2], 1.0)])],
    ))
}

/// `(0, 0, t, t^2)` on `[-1,1]`; degree 3 with a degree-2 point at `t=0`.
pub fn parabola_x3x4() -> Submanifold {
    Submanifold::Curve(ParamCurve::from_polys(
        "parabola-x3x4",
        [-1.0, 1.0],
        [Poly::zero(), Poly::zero(), p1(&[([1], 1.0)]), p1(&[([2], 1.0)])],
    ))
}

/// Ids (and tuple aliases) of all built-in submanifolds, in catalog order.
pub const BUILTIN_IDS: [(&str, &str); 8] = [
    ("plane", "(u1,u2,0,0)"),
    ("ruled-x1x3", "(u1,0,u3,0)"),
    ("graph-deg3", "(u1,u2,u1u2,u1^2u2/2)"),
    ("line-x1", "(t,0,0,0)"),
    ("line-x3", "(0,0,t,0)"),
    ("line-x4", "(0,0,0,t)"),
    ("parabola-x1x4", "(t,0,0,t^2)"),
    ("parabola-x3x4", "(0,0,t,t^2)"),
];

/// Look up a built-in by id or tuple alias.
pub fn builtin(id: &str) -> Result<Submanifold> {
    match id {
        "plane" | "(u1,u2,0,0)" => Ok(plane()),
        "ruled-x1x3" | "(u1,0,u3,0)" => Ok(ruled_x1x3()),
        "graph-deg3" | "(u1,u2,u1u2,u1^2u2/2)" => Ok(graph_deg3()),
        "line-x1" | "(t,0,0,0)" => Ok(line_x1()),
        "line-x3" | "(0,0,t,0)" => Ok(line_x3()),
        "line-x4" | "(0,0,0,t)" => Ok(line_x4()),
        "parabola-x1x4" | "(t,0,0,t^2)" => Ok(parabola_x1x4()),
        "parabola-x3x4" | "(0,0,t,t^2)" => Ok(parabola_x3x4()),
        other => Err(EngelError::UnknownId(other.to_string())),
    }
}

pub fn all_builtins() -> Vec<Submanifold> {
    BUILTIN_IDS
        .iter()
        .map(|(id, _)| builtin(id).expect("builtin ids resolve"))
        .collect()
}
