//! Human-readable definition files: submanifolds as per-coordinate
//! polynomial coefficient tables, and scenario run configurations.
//!
//! The format is TOML. A polynomial is a list of
//! `[[exponents...], coefficient]` pairs, one exponent per parameter, e.g.
//! `x4 = [[[2, 1], 0.5]]` is `u1^2 u2 / 2`. The same schema is accepted
//! inline in a run configuration (under `[[submanifolds]]`) and as a
//! standalone single-submanifold file.

use crate::catalog;
use crate::error::{EngelError, Result};
use crate::measure::Stratum;
use crate::poly::Poly;
use crate::scenario::{Expectations, Scenario, ScenarioOp};
use crate::submanifold::{ParamCurve, ParamSurface, Submanifold};
use serde::Deserialize;
use std::collections::BTreeMap;
use std::path::Path;

/// One polynomial term: exponent tuple and coefficient.
type Term = (Vec<u32>, f64);

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SubmanifoldDef {
    pub id: String,
    pub dim: usize,
    pub domain: Vec<[f64; 2]>,
    #[serde(default)]
    pub x1: Vec<Term>,
    #[serde(default)]
    pub x2: Vec<Term>,
    #[serde(default)]
    pub x3: Vec<Term>,
    #[serde(default)]
    pub x4: Vec<Term>,
}

impl SubmanifoldDef {
    pub fn build(&self) -> Result<Submanifold> {
        if self.domain.len() != self.dim {
            return Err(EngelError::Parse {
                location: self.id.clone(),
                detail: format!(
                    "domain has {} intervals for dimension {}",
                    self.domain.len(),
                    self.dim
                ),
            });
        }
        for iv in &self.domain {
            if !iv[0].is_finite() || !iv[1].is_finite() || iv[0] >= iv[1] {
                return Err(EngelError::Parse {
                    location: self.id.clone(),
                    detail: format!("bad domain interval {iv:?}"),
                });
            }
        }
        let coords = [&self.x1, &self.x2, &self.x3, &self.x4];
        for (k, terms) in coords.iter().enumerate() {
            for (e, c) in terms.iter() {
                if e.len() != self.dim {
                    return Err(EngelError::Parse {
                        location: self.id.clone(),
                        detail: format!(
                            "coordinate x{} has a term with {} exponents for dimension {}",
                            k + 1,
                            e.len(),
                            self.dim
                        ),
                    });
                }
                if !c.is_finite() {
                    return Err(EngelError::Parse {
                        location: self.id.clone(),
                        detail: format!("non-finite coefficient in x{}", k + 1),
                    });
                }
            }
        }
        match self.dim {
            1 => {
                let build = |terms: &Vec<Term>| -> Poly<1> {
                    Poly::new(terms.iter().map(|(e, c)| ([e[0]], *c)).collect())
                };
                Ok(Submanifold::Curve(ParamCurve::from_polys(
                    self.id.clone(),
                    [self.domain[0][0], self.domain[0][1]],
                    [
                        build(&self.x1),
                        build(&self.x2),
                        build(&self.x3),
                        build(&self.x4),
                    ],
                )))
            }
            2 => {
                let build = |terms: &Vec<Term>| -> Poly<2> {
                    Poly::new(terms.iter().map(|(e, c)| ([e[0], e[1]], *c)).collect())
                };
                Ok(Submanifold::Surface(ParamSurface::from_polys(
                    self.id.clone(),
                    [
                        [self.domain[0][0], self.domain[0][1]],
                        [self.domain[1][0], self.domain[1][1]],
                    ],
                    [
                        build(&self.x1),
                        build(&self.x2),
                        build(&self.x3),
                        build(&self.x4),
                    ],
                )))
            }
            d => Err(EngelError::Parse {
                location: self.id.clone(),
                detail: format!("dimension must be 1 or 2, got {d}"),
            }),
        }
    }
}

/// Resolves submanifold references: built-in ids and aliases, entries
/// defined in the run configuration, and definition-file paths.
#[derive(Default)]
pub struct SubmanifoldSet {
    defined: BTreeMap<String, Submanifold>,
}

impl SubmanifoldSet {
    pub fn insert(&mut self, def: &SubmanifoldDef) -> Result<()> {
        let sigma = def.build()?;
        self.defined.insert(def.id.clone(), sigma);
        Ok(())
    }

    pub fn resolve(&self, reference: &str) -> Result<Submanifold> {
        if let Some(s) = self.defined.get(reference) {
            return Ok(s.clone());
        }
        if let Ok(s) = catalog::builtin(reference) {
            return Ok(s);
        }
        let path = Path::new(reference);
        if path.exists() {
            return load_submanifold_file(path);
        }
        Err(EngelError::UnknownId(reference.to_string()))
    }
}

/// Load a standalone submanifold definition file.
pub fn load_submanifold_file(path: &Path) -> Result<Submanifold> {
    let text = std::fs::read_to_string(path).map_err(|e| EngelError::Parse {
        location: path.display().to_string(),
        detail: e.to_string(),
    })?;
    let def: SubmanifoldDef = toml::from_str(&text).map_err(|e| EngelError::Parse {
        location: path.display().to_string(),
        detail: e.to_string(),
    })?;
    def.build()
}

/// Powers-of-two scale sequence: `2^-k` for `k` in `from..=to`.
#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Pow2Range {
    pub from: i32,
    pub to: i32,
}

impl Pow2Range {
    pub fn values(&self) -> Vec<f64> {
        (self.from..=self.to).map(|k| 2.0f64.powi(-k)).collect()
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    id: String,
    kind: String,
    submanifold: Option<String>,
    patch: Option<Vec<[f64; 2]>>,
    point: Option<Vec<f64>>,
    radii: Option<Vec<f64>>,
    radii_pow2: Option<Pow2Range>,
    scales: Option<Vec<f64>>,
    scales_pow2: Option<Pow2Range>,
    resolution: Option<usize>,
    degree: Option<u8>,
    samples: Option<usize>,
    expected_degree: Option<u8>,
    expected_slope: Option<f64>,
    slope_tol: Option<f64>,
    expected_value: Option<f64>,
    value_tol: Option<f64>,
    expected_dimension: Option<f64>,
    dimension_tol: Option<f64>,
    expected_exponent: Option<f64>,
    exponent_tol: Option<f64>,
    expect_below: Option<f64>,
    expect_above: Option<f64>,
    max_ratio_spread: Option<f64>,
    stratum_axis: Option<usize>,
    stratum_value: Option<f64>,
    stratum_range: Option<[f64; 2]>,
    stratum_point: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    seed: Option<u64>,
    out_dir: Option<String>,
    #[serde(default)]
    submanifolds: Vec<SubmanifoldDef>,
    #[serde(default)]
    scenarios: Vec<RawScenario>,
}

/// A parsed run configuration.
pub struct RunConfig {
    pub seed: Option<u64>,
    pub out_dir: Option<String>,
    pub set: SubmanifoldSet,
    pub scenarios: Vec<Scenario>,
}

fn missing(id: &str, field: &str) -> EngelError {
    EngelError::Parse {
        location: format!("scenario '{id}'"),
        detail: format!("missing required field '{field}'"),
    }
}

fn convert(raw: RawScenario) -> Result<Scenario> {
    let id = raw.id.clone();
    let need_sub = |r: &RawScenario| -> Result<String> {
        r.submanifold.clone().ok_or_else(|| missing(&r.id, "submanifold"))
    };
    let radii = |r: &RawScenario| -> Result<Vec<f64>> {
        r.radii
            .clone()
            .or_else(|| r.radii_pow2.map(|p| p.values()))
            .ok_or_else(|| missing(&r.id, "radii"))
    };
    let scales = |r: &RawScenario| -> Result<Vec<f64>> {
        r.scales
            .clone()
            .or_else(|| r.scales_pow2.map(|p| p.values()))
            .ok_or_else(|| missing(&r.id, "scales"))
    };
    let expectations = Expectations {
        degree: raw.expected_degree,
        slope: raw.expected_slope,
        slope_tol: raw.slope_tol.unwrap_or(0.1),
        value: raw.expected_value,
        value_tol: raw.value_tol.unwrap_or(1e-6),
        dimension: raw.expected_dimension,
        dimension_tol: raw.dimension_tol.unwrap_or(0.3),
        exponent: raw.expected_exponent,
        exponent_tol: raw.exponent_tol.unwrap_or(0.5),
        max_ratio_spread: raw.max_ratio_spread.unwrap_or(3.0),
    };
    let op = match raw.kind.as_str() {
        "certify" => ScenarioOp::Certify {
            samples: raw.samples.unwrap_or(10_000),
        },
        "degree" => ScenarioOp::Degree {
            submanifold: need_sub(&raw)?,
            resolution: raw.resolution.unwrap_or(256),
        },
        "pde-residual" => ScenarioOp::PdeResidual {
            submanifold: need_sub(&raw)?,
            resolution: raw.resolution.unwrap_or(256),
            point: raw.point.clone(),
            expect_below: raw.expect_below,
            expect_above: raw.expect_above,
        },
        "intrinsic" => ScenarioOp::Intrinsic {
            submanifold: need_sub(&raw)?,
            degree: raw.degree.ok_or_else(|| missing(&raw.id, "degree"))?,
        },
        "blowup" => ScenarioOp::Blowup {
            submanifold: need_sub(&raw)?,
            point: raw.point.clone().ok_or_else(|| missing(&raw.id, "point"))?,
            radii: radii(&raw)?,
        },
        "dimension" => ScenarioOp::Dimension {
            submanifold: need_sub(&raw)?,
            scales: scales(&raw)?,
        },
        "negligibility" => {
            let stratum = if let Some(p) = raw.stratum_point.clone() {
                Stratum::Point(p)
            } else {
                Stratum::AxisSlice {
                    axis: raw
                        .stratum_axis
                        .ok_or_else(|| missing(&raw.id, "stratum_axis or stratum_point"))?,
                    value: raw
                        .stratum_value
                        .ok_or_else(|| missing(&raw.id, "stratum_value"))?,
                    range: raw
                        .stratum_range
                        .ok_or_else(|| missing(&raw.id, "stratum_range"))?,
                }
            };
            ScenarioOp::Negligibility {
                submanifold: need_sub(&raw)?,
                stratum,
                degree: raw.degree.ok_or_else(|| missing(&raw.id, "degree"))?,
                scales: scales(&raw)?,
            }
        }
        "mc-check" => ScenarioOp::McCheck {
            submanifold: need_sub(&raw)?,
            point: raw.point.clone().ok_or_else(|| missing(&raw.id, "point"))?,
            radii: radii(&raw)?,
            samples: raw.samples.unwrap_or(1_000_000),
        },
        "comparability" => ScenarioOp::Comparability {
            submanifold: need_sub(&raw)?,
            scales: scales(&raw)?,
        },
        other => {
            return Err(EngelError::Parse {
                location: format!("scenario '{id}'"),
                detail: format!("unknown kind '{other}'"),
            })
        }
    };
    Ok(Scenario {
        id,
        patch: raw.patch,
        op,
        expect: expectations,
    })
}

/// Parse a run configuration file.
pub fn load_config(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| EngelError::Parse {
        location: path.display().to_string(),
        detail: e.to_string(),
    })?;
    parse_config(&text, &path.display().to_string())
}

/// Parse a run configuration from a string (location used in errors).
pub fn parse_config(text: &str, location: &str) -> Result<RunConfig> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| EngelError::Parse {
        location: location.to_string(),
        detail: e.to_string(),
    })?;
    let mut set = SubmanifoldSet::default();
    for def in &raw.submanifolds {
        set.insert(def)?;
    }
    let mut scenarios = Vec::with_capacity(raw.scenarios.len());
    for s in raw.scenarios {
        let scenario = convert(s)?;
        // Fail fast on dangling references so `run` can exit before any work.
        if let Some(reference) = scenario.op.submanifold_ref() {
            set.resolve(reference)?;
        }
        scenarios.push(scenario);
    }
    Ok(RunConfig {
        seed: raw.seed,
        out_dir: raw.out_dir,
        set,
        scenarios,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn submanifold_definition_round_trip() {
        let text = r#"
            id = "witness"
            dim = 2
            domain = [[0.0, 1.0], [0.0, 1.0]]
            x1 = [[[1, 0], 1.0]]
            x2 = [[[0, 1], 1.0]]
            x3 = [[[1, 1], 1.0]]
            x4 = [[[2, 1], 0.5]]
        "#;
        let def: SubmanifoldDef = toml::from_str(text).unwrap();
        let sigma = def.build().unwrap();
        assert_eq!(sigma.dim(), 2);
        let p = sigma.point(&[0.5, 0.5]);
        assert_eq!(p.coords(), [0.5, 0.5, 0.25, 0.0625]);
    }

    #[test]
    fn bad_exponent_arity_is_a_parse_error() {
        let text = r#"
            id = "broken"
            dim = 1
            domain = [[0.0, 1.0]]
            x1 = [[[1, 0], 1.0]]
        "#;
        let def: SubmanifoldDef = toml::from_str(text).unwrap();
        assert!(matches!(def.build(), Err(EngelError::Parse { .. })));
    }

    #[test]
    fn config_with_scenarios_parses() {
        let text = r#"
            seed = 3

            [[submanifolds]]
            id = "my-curve"
            dim = 1
            domain = [[-1.0, 1.0]]
            x1 = [[[1], 1.0]]
            x4 = [[[2], 1.0]]

            [[scenarios]]
            id = "my-blowup"
            kind = "blowup"
            submanifold = "my-curve"
            point = [0.0]
            radii_pow2 = { from = 3, to = 8 }
            expected_slope = 1.5
        "#;
        let config = parse_config(text, "inline").unwrap();
        assert_eq!(config.seed, Some(3));
        assert_eq!(config.scenarios.len(), 1);
        let sigma = config.set.resolve("my-curve").unwrap();
        assert_eq!(sigma.dim(), 1);
        match &config.scenarios[0].op {
            ScenarioOp::Blowup { radii, .. } => {
                assert_eq!(radii.len(), 6);
                assert_eq!(radii[0], 0.125);
            }
            other => panic!("wrong op {other:?}"),
        }
    }

    #[test]
    fn unknown_kind_and_dangling_reference_fail() {
        let text = r#"
            [[scenarios]]
            id = "x"
            kind = "frobnicate"
            submanifold = "plane"
        "#;
        assert!(matches!(
            parse_config(text, "inline"),
            Err(EngelError::Parse { .. })
        ));

        let text = r#"
            [[scenarios]]
            id = "x"
            kind = "degree"
            submanifold = "no-such-surface"
        "#;
        assert!(matches!(
            parse_config(text, "inline"),
            Err(EngelError::UnknownId(_))
        ));
    }

    #[test]
    fn builtin_aliases_resolve_through_the_set() {
        let set = SubmanifoldSet::default();
        assert!(set.resolve("(0,0,0,t)").is_ok());
        assert!(set.resolve("plane").is_ok());
        assert!(set.resolve("bogus").is_err());
    }
}
