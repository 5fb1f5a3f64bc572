//! Scenario definitions, the built-in experiment suite, and the runner
//! that turns scenarios into CSV rows plus a plain-text summary.
//!
//! CSV schema (one row per scenario and sequence element):
//!
//! ```text
//! scenario,name,kind,param,value,bracket_lo,bracket_hi,slope,expected,pass,seed
//! ```
//!
//! Floats are serialized with 17 significant digits, so identical runs are
//! byte-identical. Scenarios execute in parallel; rows are assembled in
//! catalog order by a single writer at the end.

use crate::catalog;
use crate::config::SubmanifoldSet;
use crate::error::{EngelError, Result};
use crate::group::HomGauge;
use crate::measure::{
    blowup_sequence, dimension_estimate, hausdorff_vs_intrinsic, negligibility_decay,
    BlowupMode, BlowupSpec, CoverSpec, Stratum,
};
use crate::oracle::{
    certify_group_law, mc_measure, ALGEBRAIC_RESIDUAL_MAX, FINITE_DIFFERENCE_RESIDUAL_MAX,
};
use crate::quad::QuadSpec;
use crate::submanifold::{deg3_pde_residual, deg3_pde_residual_max, Submanifold};
use crate::tangent::DEFAULT_ZERO_TOL;
use rayon::prelude::*;
use std::fmt::Write as _;
use std::path::Path;

/// Expected values and tolerances attached to a scenario.
#[derive(Debug, Clone, Copy)]
pub struct Expectations {
    pub degree: Option<u8>,
    pub slope: Option<f64>,
    pub slope_tol: f64,
    pub value: Option<f64>,
    pub value_tol: f64,
    pub dimension: Option<f64>,
    pub dimension_tol: f64,
    pub exponent: Option<f64>,
    pub exponent_tol: f64,
    /// Allowed max/min ratio spread at max-degree base points.
    pub max_ratio_spread: f64,
}

impl Default for Expectations {
    fn default() -> Self {
        Expectations {
            degree: None,
            slope: None,
            slope_tol: 0.1,
            value: None,
            value_tol: 1e-6,
            dimension: None,
            dimension_tol: 0.3,
            exponent: None,
            exponent_tol: 0.5,
            max_ratio_spread: 3.0,
        }
    }
}

/// The operation a scenario runs.
#[derive(Debug, Clone)]
pub enum ScenarioOp {
    Certify {
        samples: usize,
    },
    Degree {
        submanifold: String,
        resolution: usize,
    },
    PdeResidual {
        submanifold: String,
        resolution: usize,
        point: Option<Vec<f64>>,
        expect_below: Option<f64>,
        expect_above: Option<f64>,
    },
    Intrinsic {
        submanifold: String,
        degree: u8,
    },
    Blowup {
        submanifold: String,
        point: Vec<f64>,
        radii: Vec<f64>,
    },
    Dimension {
        submanifold: String,
        scales: Vec<f64>,
    },
    Negligibility {
        submanifold: String,
        stratum: Stratum,
        degree: u8,
        scales: Vec<f64>,
    },
    McCheck {
        submanifold: String,
        point: Vec<f64>,
        radii: Vec<f64>,
        samples: usize,
    },
    Comparability {
        submanifold: String,
        scales: Vec<f64>,
    },
}

impl ScenarioOp {
    pub fn kind_name(&self) -> &'static str {
        match self {
            ScenarioOp::Certify { .. } => "certify",
            ScenarioOp::Degree { .. } => "degree",
            ScenarioOp::PdeResidual { .. } => "pde-residual",
            ScenarioOp::Intrinsic { .. } => "intrinsic",
            ScenarioOp::Blowup { .. } => "blowup",
            ScenarioOp::Dimension { .. } => "dimension",
            ScenarioOp::Negligibility { .. } => "negligibility",
            ScenarioOp::McCheck { .. } => "mc-check",
            ScenarioOp::Comparability { .. } => "comparability",
        }
    }

    pub fn submanifold_ref(&self) -> Option<&str> {
        match self {
            ScenarioOp::Certify { .. } => None,
            ScenarioOp::Degree { submanifold, .. }
            | ScenarioOp::PdeResidual { submanifold, .. }
            | ScenarioOp::Intrinsic { submanifold, .. }
            | ScenarioOp::Blowup { submanifold, .. }
            | ScenarioOp::Dimension { submanifold, .. }
            | ScenarioOp::Negligibility { submanifold, .. }
            | ScenarioOp::McCheck { submanifold, .. }
            | ScenarioOp::Comparability { submanifold, .. } => Some(submanifold),
        }
    }
}

/// One runnable experiment.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub id: String,
    /// Optional domain override for patch experiments.
    pub patch: Option<Vec<[f64; 2]>>,
    pub op: ScenarioOp,
    pub expect: Expectations,
}

/// Tolerance overrides applied uniformly on top of scenario expectations.
#[derive(Debug, Clone, Copy, Default)]
pub struct ToleranceOverrides {
    pub slope_tol: Option<f64>,
    pub value_tol: Option<f64>,
    pub dimension_tol: Option<f64>,
    pub exponent_tol: Option<f64>,
}

impl ToleranceOverrides {
    /// Parse `key=value` items: slope, value, dimension, exponent.
    pub fn parse(items: &[String]) -> Result<ToleranceOverrides> {
        let mut out = ToleranceOverrides::default();
        for item in items {
            let (key, val) = item.split_once('=').ok_or_else(|| EngelError::Parse {
                location: "tolerance override".into(),
                detail: format!("expected key=value, got '{item}'"),
            })?;
            let parsed: f64 = val.trim().parse().map_err(|_| EngelError::Parse {
                location: "tolerance override".into(),
                detail: format!("bad number '{val}'"),
            })?;
            match key.trim() {
                "slope" => out.slope_tol = Some(parsed),
                "value" => out.value_tol = Some(parsed),
                "dimension" => out.dimension_tol = Some(parsed),
                "exponent" => out.exponent_tol = Some(parsed),
                other => {
                    return Err(EngelError::Parse {
                        location: "tolerance override".into(),
                        detail: format!("unknown key '{other}'"),
                    })
                }
            }
        }
        Ok(out)
    }

    fn apply(&self, e: &Expectations) -> Expectations {
        Expectations {
            slope_tol: self.slope_tol.unwrap_or(e.slope_tol),
            value_tol: self.value_tol.unwrap_or(e.value_tol),
            dimension_tol: self.dimension_tol.unwrap_or(e.dimension_tol),
            exponent_tol: self.exponent_tol.unwrap_or(e.exponent_tol),
            ..*e
        }
    }
}

/// Runner options.
#[derive(Debug, Clone, Copy, Default)]
pub struct RunOptions {
    pub seed: u64,
    pub overrides: ToleranceOverrides,
}


/// One CSV row.
#[derive(Debug, Clone)]
pub struct CsvRow {
    pub scenario: String,
    pub name: String,
    pub kind: &'static str,
    pub param: String,
    pub value: Option<f64>,
    pub bracket_lo: Option<f64>,
    pub bracket_hi: Option<f64>,
    pub slope: Option<f64>,
    pub expected: Option<f64>,
    pub pass: bool,
}

/// Scenario verdict plus a one-line diagnostic.
#[derive(Debug, Clone)]
pub struct ScenarioOutcome {
    pub id: String,
    pub kind: &'static str,
    pub pass: bool,
    pub detail: String,
}

/// All rows and verdicts of a run.
#[derive(Debug, Clone)]
pub struct SuiteResult {
    pub seed: u64,
    pub quasi_triangle_constant: f64,
    pub box_inclusion_lambda: f64,
    pub rows: Vec<CsvRow>,
    pub outcomes: Vec<ScenarioOutcome>,
}

/// 17 significant digits; enough to round-trip an f64 bit pattern.
pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

impl SuiteResult {
    pub fn all_passed(&self) -> bool {
        self.outcomes.iter().all(|o| o.pass)
    }

    pub fn csv_string(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record([
            "scenario",
            "name",
            "kind",
            "param",
            "value",
            "bracket_lo",
            "bracket_hi",
            "slope",
            "expected",
            "pass",
            "seed",
        ])
        .expect("csv header");
        let opt = |v: Option<f64>| v.map(format_float).unwrap_or_default();
        for row in &self.rows {
            w.write_record([
                row.scenario.clone(),
                row.name.clone(),
                row.kind.to_string(),
                row.param.clone(),
                opt(row.value),
                opt(row.bracket_lo),
                opt(row.bracket_hi),
                opt(row.slope),
                opt(row.expected),
                row.pass.to_string(),
                self.seed.to_string(),
            ])
            .expect("csv row");
        }
        String::from_utf8(w.into_inner().expect("csv flush")).expect("csv utf8")
    }

    pub fn summary_string(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "seed: {}", self.seed);
        let _ = writeln!(
            s,
            "gauge: symmetrized box, quasi-triangle constant {:.6} (measured), \
             box inclusion lambda {:.6} (measured; 1 for the raw gauge)",
            self.quasi_triangle_constant, self.box_inclusion_lambda
        );
        let _ = writeln!(
            s,
            "covering counts are greedy upper estimates, not optimal covers"
        );
        let _ = writeln!(s, "scenarios: {}", self.outcomes.len());
        for o in &self.outcomes {
            let verdict = if o.pass { "PASS" } else { "FAIL" };
            let _ = writeln!(s, "[{verdict}] {} ({}): {}", o.id, o.kind, o.detail);
        }
        let _ = writeln!(
            s,
            "result: {}",
            if self.all_passed() { "ALL PASS" } else { "FAILURES" }
        );
        s
    }

    /// Write `results.csv` and `summary.txt` into `out_dir`.
    pub fn write_outputs(&self, out_dir: &Path) -> std::io::Result<()> {
        std::fs::create_dir_all(out_dir)?;
        std::fs::write(out_dir.join("results.csv"), self.csv_string())?;
        std::fs::write(out_dir.join("summary.txt"), self.summary_string())?;
        Ok(())
    }
}

fn resolve_patched(
    set: &SubmanifoldSet,
    reference: &str,
    patch: &Option<Vec<[f64; 2]>>,
) -> Result<Submanifold> {
    let sigma = set.resolve(reference)?;
    match patch {
        Some(p) => sigma.with_domain(p),
        None => Ok(sigma),
    }
}

fn run_scenario(
    scenario: &Scenario,
    set: &SubmanifoldSet,
    opts: &RunOptions,
) -> (Vec<CsvRow>, ScenarioOutcome) {
    let expect = opts.overrides.apply(&scenario.expect);
    let kind = scenario.op.kind_name();
    let mk_row = |param: String| CsvRow {
        scenario: scenario.id.clone(),
        name: scenario.op.submanifold_ref().unwrap_or("-").to_string(),
        kind,
        param,
        value: None,
        bracket_lo: None,
        bracket_hi: None,
        slope: None,
        expected: None,
        pass: false,
    };
    match run_scenario_inner(scenario, set, opts, &expect, &mk_row) {
        Ok((rows, pass, detail)) => (
            rows,
            ScenarioOutcome {
                id: scenario.id.clone(),
                kind,
                pass,
                detail,
            },
        ),
        Err(e) => {
            let mut row = mk_row("error".into());
            row.pass = false;
            (
                vec![row],
                ScenarioOutcome {
                    id: scenario.id.clone(),
                    kind,
                    pass: false,
                    detail: format!("error: {e}"),
                },
            )
        }
    }
}

type ScenarioRun = (Vec<CsvRow>, bool, String);

fn run_scenario_inner(
    scenario: &Scenario,
    set: &SubmanifoldSet,
    opts: &RunOptions,
    expect: &Expectations,
    mk_row: &dyn Fn(String) -> CsvRow,
) -> Result<ScenarioRun> {
    match &scenario.op {
        ScenarioOp::Certify { samples } => {
            let report = certify_group_law(*samples, opts.seed)?;
            let entries = [
                ("associativity", report.associativity, ALGEBRAIC_RESIDUAL_MAX),
                ("inverse", report.inverse, ALGEBRAIC_RESIDUAL_MAX),
                (
                    "dilation",
                    report.dilation_automorphism,
                    ALGEBRAIC_RESIDUAL_MAX,
                ),
                (
                    "frame-fd",
                    report.frame_invariance,
                    FINITE_DIFFERENCE_RESIDUAL_MAX,
                ),
            ];
            let rows: Vec<CsvRow> = entries
                .iter()
                .map(|(label, value, threshold)| {
                    let mut row = mk_row(label.to_string());
                    row.value = Some(*value);
                    row.expected = Some(*threshold);
                    row.pass = value < threshold;
                    row
                })
                .collect();
            let detail = format!(
                "max algebraic residual {:.2e}, frame fd residual {:.2e} over {} samples",
                report.max_algebraic(),
                report.frame_invariance,
                report.samples
            );
            Ok((rows, report.passed, detail))
        }

        ScenarioOp::Degree {
            submanifold,
            resolution,
        } => {
            let sigma = resolve_patched(set, submanifold, &scenario.patch)?;
            let strat = sigma.global_degree(*resolution, DEFAULT_ZERO_TOL)?;
            let pass = expect.degree.is_none_or(|d| d == strat.global_degree);
            let mut row = mk_row(format!("grid={resolution}"));
            row.value = Some(strat.global_degree as f64);
            row.expected = expect.degree.map(|d| d as f64);
            row.pass = pass;
            let detail = format!(
                "global degree {} ({} low-degree samples, {} borderline)",
                strat.global_degree,
                strat.low_degree_count(),
                strat.borderline_count
            );
            Ok((vec![row], pass, detail))
        }

        ScenarioOp::PdeResidual {
            submanifold,
            resolution,
            point,
            expect_below,
            expect_above,
        } => {
            let sigma = resolve_patched(set, submanifold, &scenario.patch)?;
            let surface = sigma.as_surface().ok_or_else(|| {
                EngelError::Shape("degree-3 constraints apply to surfaces".into())
            })?;
            let (param, value) = match point {
                Some(u) => {
                    let r = deg3_pde_residual(surface, [u[0], u[1]])?;
                    (
                        format!("point=({},{})", u[0], u[1]),
                        r.iter().fold(0.0f64, |m, v| m.max(v.abs())),
                    )
                }
                None => (
                    format!("grid={resolution}"),
                    deg3_pde_residual_max(surface, *resolution)?,
                ),
            };
            let mut pass = true;
            if let Some(b) = expect_below {
                pass &= value < *b;
            }
            if let Some(a) = expect_above {
                pass &= value > *a;
            }
            let mut row = mk_row(param);
            row.value = Some(value);
            row.expected = expect_below.or(*expect_above);
            row.pass = pass;
            let detail = format!("max residual {value:.3e}");
            Ok((vec![row], pass, detail))
        }

        ScenarioOp::Intrinsic { submanifold, degree } => {
            let sigma = resolve_patched(set, submanifold, &scenario.patch)?;
            let value = sigma.intrinsic_measure(*degree, &QuadSpec::default())?;
            let pass = expect
                .value
                .is_none_or(|v| (value - v).abs() <= expect.value_tol);
            let mut row = mk_row(format!("d={degree}"));
            row.value = Some(value);
            row.expected = expect.value;
            row.pass = pass;
            let detail = match expect.value {
                Some(v) => format!("measure {value:.9} vs expected {v:.9}"),
                None => format!("measure {value:.9}"),
            };
            Ok((vec![row], pass, detail))
        }

        ScenarioOp::Blowup {
            submanifold,
            point,
            radii,
        } => {
            let sigma = resolve_patched(set, submanifold, &scenario.patch)?;
            let report = blowup_sequence(&sigma, point, radii, &BlowupSpec::default())?;
            let (mode_pass, mode_note) = match report.mode {
                BlowupMode::Divergence { bound_exponent } => {
                    let c = &report.checks;
                    let ok = c.measures_nondecreasing_in_r
                        && c.ratio_strictly_increasing == Some(true)
                        && c.slope_below_global == Some(true)
                        && c.slope_within_bound.unwrap_or(true);
                    let note = match bound_exponent {
                        Some(b) => format!("divergent, bound exponent {b}"),
                        None => "divergent, no proved bound for this case".into(),
                    };
                    (ok, note)
                }
                BlowupMode::Boundedness => {
                    let spread = report.checks.ratio_spread.unwrap_or(f64::INFINITY);
                    (
                        report.checks.measures_nondecreasing_in_r
                            && spread <= expect.max_ratio_spread,
                        format!("max-degree point, ratio spread {spread:.3}"),
                    )
                }
            };
            let slope_pass = expect
                .slope
                .is_none_or(|s| (report.slope - s).abs() <= expect.slope_tol);
            let pass = mode_pass && slope_pass;
            let rows: Vec<CsvRow> = report
                .radii
                .iter()
                .zip(&report.measures)
                .zip(&report.brackets)
                .map(|((r, m), (lo, hi))| {
                    let mut row = mk_row(format_float(*r));
                    row.value = Some(*m);
                    row.bracket_lo = Some(*lo);
                    row.bracket_hi = Some(*hi);
                    row.slope = Some(report.slope);
                    row.expected = expect.slope;
                    row.pass = pass;
                    row
                })
                .collect();
            let detail = format!(
                "deg {} at point vs global {}; slope {:.4}; {}",
                report.base_degree, report.global_degree, report.slope, mode_note
            );
            Ok((rows, pass, detail))
        }

        ScenarioOp::Dimension { submanifold, scales } => {
            let sigma = resolve_patched(set, submanifold, &scenario.patch)?;
            let report =
                dimension_estimate(&sigma, scales, &CoverSpec::default(), DEFAULT_ZERO_TOL)?;
            let pass = report.counts_monotone
                && expect.dimension.is_none_or(|d| {
                    (report.fitted_dimension - d).abs() <= expect.dimension_tol
                });
            let rows: Vec<CsvRow> = report
                .scales
                .iter()
                .zip(&report.counts)
                .map(|(delta, n)| {
                    let mut row = mk_row(format_float(*delta));
                    row.value = Some(*n as f64);
                    row.slope = Some(report.fitted_dimension);
                    row.expected = expect.dimension;
                    row.pass = pass;
                    row
                })
                .collect();
            let detail = format!(
                "fitted dimension {:.3} over {} scales (global degree {})",
                report.fitted_dimension,
                report.scales.len(),
                report.exponent
            );
            Ok((rows, pass, detail))
        }

        ScenarioOp::Negligibility {
            submanifold,
            stratum,
            degree,
            scales,
        } => {
            let sigma = resolve_patched(set, submanifold, &scenario.patch)?;
            let table =
                negligibility_decay(&sigma, stratum, *degree, scales, &CoverSpec::default())?;
            let pass = table.monotone_decreasing
                && table.decay_factor >= 4.0
                && expect.exponent.is_none_or(|e| {
                    (table.fitted_decay_exponent - e).abs() <= expect.exponent_tol
                });
            let rows: Vec<CsvRow> = table
                .scales
                .iter()
                .zip(&table.premeasures)
                .map(|(delta, p)| {
                    let mut row = mk_row(format_float(*delta));
                    row.value = Some(*p);
                    row.slope = Some(table.fitted_decay_exponent);
                    row.expected = expect.exponent;
                    row.pass = pass;
                    row
                })
                .collect();
            let detail = format!(
                "premeasure decay {:.1}x over the scale span, exponent {:.3}",
                table.decay_factor, table.fitted_decay_exponent
            );
            Ok((rows, pass, detail))
        }

        ScenarioOp::McCheck {
            submanifold,
            point,
            radii,
            samples,
        } => {
            let sigma = resolve_patched(set, submanifold, &scenario.patch)?;
            let x = sigma.point(point);
            let spec = crate::measure::BallQuadSpec::default();
            let mut rows = Vec::new();
            let mut pass = true;
            let mut worst_sigmas = 0.0f64;
            for (k, &r) in radii.iter().enumerate() {
                let quad = crate::measure::ball_measure_anchored(&sigma, &x, r, point, &spec)?;
                let mc = mc_measure(&sigma, &x, r, *samples, opts.seed + k as u64)?;
                let gap = (quad.value - mc.value).abs();
                let ok = !mc.undersampled && gap <= 3.0 * mc.stderr.max(1e-15);
                if mc.stderr > 0.0 {
                    worst_sigmas = worst_sigmas.max(gap / mc.stderr);
                }
                pass &= ok;
                let mut row = mk_row(format_float(r));
                row.value = Some(mc.value);
                row.bracket_lo = Some(mc.value - 3.0 * mc.stderr);
                row.bracket_hi = Some(mc.value + 3.0 * mc.stderr);
                row.expected = Some(quad.value);
                row.pass = ok;
                rows.push(row);
            }
            let detail = format!(
                "Monte Carlo vs quadrature within {worst_sigmas:.2} standard errors at {samples} samples"
            );
            Ok((rows, pass, detail))
        }

        ScenarioOp::Comparability { submanifold, scales } => {
            let sigma = resolve_patched(set, submanifold, &scenario.patch)?;
            let table = hausdorff_vs_intrinsic(
                &sigma,
                scales,
                &CoverSpec::default(),
                &QuadSpec::default(),
                DEFAULT_ZERO_TOL,
            )?;
            let pass = table.stabilizes && table.within_band;
            let rows: Vec<CsvRow> = table
                .scales
                .iter()
                .zip(&table.ratios)
                .map(|(delta, ratio)| {
                    let mut row = mk_row(format_float(*delta));
                    row.value = Some(*ratio);
                    row.pass = pass;
                    row
                })
                .collect();
            let detail = format!(
                "spherical premeasure / intrinsic measure ratios {:?} (degree {})",
                table
                    .ratios
                    .iter()
                    .map(|r| (r * 1000.0).round() / 1000.0)
                    .collect::<Vec<_>>(),
                table.degree
            );
            Ok((rows, pass, detail))
        }
    }
}

/// Execute scenarios (in parallel) and assemble the suite result.
pub fn run_suite(
    scenarios: &[Scenario],
    set: &SubmanifoldSet,
    opts: &RunOptions,
) -> SuiteResult {
    let gauge = HomGauge::certify(100_000, opts.seed);
    let results: Vec<(Vec<CsvRow>, ScenarioOutcome)> = scenarios
        .par_iter()
        .map(|s| run_scenario(s, set, opts))
        .collect();
    let mut rows = Vec::new();
    let mut outcomes = Vec::new();
    for (r, o) in results {
        rows.extend(r);
        outcomes.push(o);
    }
    SuiteResult {
        seed: opts.seed,
        quasi_triangle_constant: gauge.quasi_triangle_constant,
        box_inclusion_lambda: gauge.box_inclusion_lambda,
        rows,
        outcomes,
    }
}

fn half_octaves(from: f64, steps: usize) -> Vec<f64> {
    (0..steps)
        .map(|k| from * 2.0f64.powf(-(k as f64) / 2.0))
        .collect()
}

/// The built-in suite: certification, the degree table, the degree-3
/// constraint checks, intrinsic measures, the five proved blow-up cases,
/// boundedness at max-degree points, dimension estimates, negligibility
/// decay, Monte Carlo agreement and the comparability experiment.
pub fn builtin_suite() -> Vec<Scenario> {
    let mut suite = Vec::new();
    let radii: Vec<f64> = (3..=10).map(|k| 2.0f64.powi(-k)).collect();

    suite.push(Scenario {
        id: "certify-group-law".into(),
        patch: None,
        op: ScenarioOp::Certify { samples: 10_000 },
        expect: Expectations::default(),
    });

    for (id, degree) in [
        ("plane", 4u8),
        ("ruled-x1x3", 4),
        ("graph-deg3", 3),
        ("line-x1", 1),
        ("line-x3", 2),
        ("line-x4", 3),
        ("parabola-x1x4", 3),
        ("parabola-x3x4", 3),
    ] {
        suite.push(Scenario {
            id: format!("degree-{id}"),
            patch: None,
            op: ScenarioOp::Degree {
                submanifold: id.into(),
                resolution: 256,
            },
            expect: Expectations {
                degree: Some(degree),
                ..Expectations::default()
            },
        });
    }

    suite.push(Scenario {
        id: "pde-deg3-graph".into(),
        patch: None,
        op: ScenarioOp::PdeResidual {
            submanifold: "graph-deg3".into(),
            resolution: 256,
            point: None,
            expect_below: Some(1e-12),
            expect_above: None,
        },
        expect: Expectations::default(),
    });
    suite.push(Scenario {
        id: "pde-deg4-plane".into(),
        patch: None,
        op: ScenarioOp::PdeResidual {
            submanifold: "plane".into(),
            resolution: 256,
            point: Some(vec![1.0, 0.0]),
            expect_below: None,
            expect_above: Some(0.1),
        },
        expect: Expectations::default(),
    });

    for (id, sub, degree, value) in [
        ("intrinsic-plane", "plane", 4u8, 2.0 / 3.0),
        ("intrinsic-graph-deg3", "graph-deg3", 3, 0.5),
        ("intrinsic-line-x4", "line-x4", 3, 1.0),
    ] {
        suite.push(Scenario {
            id: id.into(),
            patch: None,
            op: ScenarioOp::Intrinsic {
                submanifold: sub.into(),
                degree,
            },
            expect: Expectations {
                value: Some(value),
                value_tol: 1e-6,
                ..Expectations::default()
            },
        });
    }

    for (id, sub, point, slope) in [
        ("prop-deg45deg2", "plane", vec![0.0, 0.0], 2.0),
        ("prop-deg45deg3", "ruled-x1x3", vec![0.0, 0.0], 3.0),
        ("prop-deg3deg2", "graph-deg3", vec![0.0, 0.0], 2.0),
        ("prop-deg23deg1", "parabola-x1x4", vec![0.0], 1.5),
        ("prop-deg3deg2curve", "parabola-x3x4", vec![0.0], 2.0),
    ] {
        suite.push(Scenario {
            id: id.into(),
            patch: None,
            op: ScenarioOp::Blowup {
                submanifold: sub.into(),
                point,
                radii: radii.clone(),
            },
            expect: Expectations {
                slope: Some(slope),
                slope_tol: 0.1,
                ..Expectations::default()
            },
        });
    }

    for (id, sub, point) in [
        ("bounded-plane", "plane", vec![0.5, 0.0]),
        ("bounded-ruled-x1x3", "ruled-x1x3", vec![0.5, 0.0]),
        ("bounded-graph-deg3", "graph-deg3", vec![0.5, 0.5]),
        ("bounded-line-x1", "line-x1", vec![0.5]),
        ("bounded-line-x3", "line-x3", vec![0.0]),
        ("bounded-line-x4", "line-x4", vec![0.5]),
        ("bounded-parabola-x1x4", "parabola-x1x4", vec![0.5]),
        ("bounded-parabola-x3x4", "parabola-x3x4", vec![0.5]),
    ] {
        suite.push(Scenario {
            id: id.into(),
            patch: None,
            op: ScenarioOp::Blowup {
                submanifold: sub.into(),
                point,
                radii: radii.clone(),
            },
            expect: Expectations {
                max_ratio_spread: 3.0,
                ..Expectations::default()
            },
        });
    }

    suite.push(Scenario {
        id: "dim-plane-patch".into(),
        patch: Some(vec![[1.0, 2.0], [0.0, 1.0]]),
        op: ScenarioOp::Dimension {
            submanifold: "plane".into(),
            scales: half_octaves(0.25, 5),
        },
        expect: Expectations {
            dimension: Some(4.0),
            dimension_tol: 0.3,
            ..Expectations::default()
        },
    });
    suite.push(Scenario {
        id: "dim-line-x4".into(),
        patch: None,
        op: ScenarioOp::Dimension {
            submanifold: "line-x4".into(),
            scales: half_octaves(0.25, 5),
        },
        expect: Expectations {
            dimension: Some(3.0),
            dimension_tol: 0.3,
            ..Expectations::default()
        },
    });
    suite.push(Scenario {
        id: "dim-line-x1".into(),
        patch: None,
        op: ScenarioOp::Dimension {
            submanifold: "line-x1".into(),
            scales: (3..=7).map(|k| 2.0f64.powi(-k)).collect(),
        },
        expect: Expectations {
            dimension: Some(1.0),
            dimension_tol: 0.1,
            ..Expectations::default()
        },
    });

    let negl_scales: Vec<f64> = (1..=5).map(|k| 2.0f64.powi(-k)).collect();
    suite.push(Scenario {
        id: "negl-plane-line".into(),
        patch: None,
        op: ScenarioOp::Negligibility {
            submanifold: "plane".into(),
            stratum: Stratum::AxisSlice {
                axis: 0,
                value: 0.0,
                range: [-1.0, 1.0],
            },
            degree: 4,
            scales: negl_scales.clone(),
        },
        expect: Expectations {
            exponent: Some(3.0),
            exponent_tol: 0.5,
            ..Expectations::default()
        },
    });
    suite.push(Scenario {
        id: "negl-graph-deg3-edge".into(),
        patch: None,
        op: ScenarioOp::Negligibility {
            submanifold: "graph-deg3".into(),
            stratum: Stratum::AxisSlice {
                axis: 1,
                value: 0.0,
                range: [0.0, 1.0],
            },
            degree: 3,
            scales: negl_scales.clone(),
        },
        expect: Expectations {
            exponent: Some(2.0),
            exponent_tol: 0.5,
            ..Expectations::default()
        },
    });
    suite.push(Scenario {
        id: "negl-parabola-x3x4-point".into(),
        patch: None,
        op: ScenarioOp::Negligibility {
            submanifold: "parabola-x3x4".into(),
            stratum: Stratum::Point(vec![0.0]),
            degree: 3,
            scales: negl_scales,
        },
        expect: Expectations {
            exponent: Some(3.0),
            exponent_tol: 0.5,
            ..Expectations::default()
        },
    });

    let mc_radii: Vec<f64> = (3..=5).map(|k| 2.0f64.powi(-k)).collect();
    for (id, sub, point) in [
        ("mc-prop-deg45deg2", "plane", vec![0.0, 0.0]),
        ("mc-prop-deg45deg3", "ruled-x1x3", vec![0.0, 0.0]),
        ("mc-prop-deg3deg2", "graph-deg3", vec![0.0, 0.0]),
        ("mc-prop-deg23deg1", "parabola-x1x4", vec![0.0]),
        ("mc-prop-deg3deg2curve", "parabola-x3x4", vec![0.0]),
    ] {
        suite.push(Scenario {
            id: id.into(),
            patch: None,
            op: ScenarioOp::McCheck {
                submanifold: sub.into(),
                point,
                radii: mc_radii.clone(),
                samples: 1_000_000,
            },
            expect: Expectations::default(),
        });
    }

    suite.push(Scenario {
        id: "compare-plane-patch".into(),
        patch: Some(vec![[1.0, 2.0], [0.0, 1.0]]),
        op: ScenarioOp::Comparability {
            submanifold: "plane".into(),
            scales: half_octaves(0.25, 3),
        },
        expect: Expectations::default(),
    });

    suite
}

/// Text description of a submanifold: domain, global degree, stratification
/// summary and the degree-3 residual when the surface is a graph.
pub fn describe(reference: &str, set: &SubmanifoldSet) -> Result<String> {
    let sigma = set.resolve(reference)?;
    let strat = sigma.global_degree(256, DEFAULT_ZERO_TOL)?;
    let mut s = String::new();
    let _ = writeln!(s, "submanifold: {}", sigma.name());
    let _ = writeln!(s, "dimension: {}", sigma.dim());
    let _ = writeln!(s, "domain: {:?}", sigma.domain());
    let _ = writeln!(s, "global degree: {}", strat.global_degree);
    for (d, n) in &strat.degree_counts {
        let _ = writeln!(s, "  degree {d}: {n} samples");
    }
    if strat.low_degree_samples.is_empty() {
        let _ = writeln!(s, "degree {} everywhere", strat.global_degree);
    } else {
        let _ = writeln!(s, "{}", locus_summary(&strat, sigma.dim()));
    }
    if strat.borderline_count > 0 {
        let _ = writeln!(s, "borderline samples: {}", strat.borderline_count);
    }
    if let Some(surface) = sigma.as_surface() {
        if let Ok(worst) = deg3_pde_residual_max(surface, 128) {
            let _ = writeln!(s, "max degree-3 residual: {worst:.3e}");
        }
    }
    Ok(s)
}

fn locus_summary(strat: &crate::submanifold::StratificationReport, dim: usize) -> String {
    use std::collections::BTreeMap;
    let mut by_degree: BTreeMap<u8, Vec<&Vec<f64>>> = BTreeMap::new();
    for (u, d) in &strat.low_degree_samples {
        by_degree.entry(*d).or_default().push(u);
    }
    let mut out = Vec::new();
    for (d, samples) in by_degree {
        let locus = if samples.len() == 1 {
            let u = samples[0];
            if dim == 1 {
                format!("{{t={}}}", u[0])
            } else {
                format!("{{u=({}, {})}}", u[0], u[1])
            }
        } else if dim == 2 {
            let first = samples[0];
            if samples.iter().all(|u| u[0] == first[0]) {
                format!("{{u1={}}}", first[0])
            } else if samples.iter().all(|u| u[1] == first[1]) {
                format!("{{u2={}}}", first[1])
            } else {
                format!("{} samples", samples.len())
            }
        } else {
            let first = samples[0];
            if samples.iter().all(|u| u[0] == first[0]) {
                format!("{{t={}}}", first[0])
            } else {
                format!("{} samples", samples.len())
            }
        };
        out.push(format!("degree-{d} locus: {locus}"));
    }
    out.join("\n")
}

/// Catalog listing for the CLI.
pub fn list_text() -> String {
    let mut s = String::new();
    let _ = writeln!(s, "built-in submanifolds:");
    for (id, alias) in catalog::BUILTIN_IDS {
        let sigma = catalog::builtin(id).expect("builtin");
        let _ = writeln!(
            s,
            "  {id}  alias {alias}  dim {} domain {:?}",
            sigma.dim(),
            sigma.domain()
        );
    }
    let _ = writeln!(s, "built-in scenarios:");
    for sc in builtin_suite() {
        let _ = writeln!(s, "  {}  kind {}", sc.id, sc.op.kind_name());
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_suite_yields_header_only_csv() {
        let set = SubmanifoldSet::default();
        let result = run_suite(&[], &set, &RunOptions::default());
        assert!(result.all_passed());
        let csv = result.csv_string();
        assert_eq!(
            csv.trim(),
            "scenario,name,kind,param,value,bracket_lo,bracket_hi,slope,expected,pass,seed"
        );
    }

    #[test]
    fn float_formatting_has_17_significant_digits() {
        assert_eq!(format_float(2.0 / 3.0), "6.6666666666666663e-1");
        assert_eq!(format_float(1.0), "1.0000000000000000e0");
    }

    #[test]
    fn names_with_commas_are_quoted() {
        let set = SubmanifoldSet::default();
        let scenario = Scenario {
            id: "alias-degree".into(),
            patch: None,
            op: ScenarioOp::Degree {
                submanifold: "(0,0,0,t)".into(),
                resolution: 16,
            },
            expect: Expectations {
                degree: Some(3),
                ..Expectations::default()
            },
        };
        let result = run_suite(&[scenario], &set, &RunOptions::default());
        assert!(result.all_passed());
        let csv = result.csv_string();
        assert!(csv.contains("\"(0,0,0,t)\""), "csv: {csv}");
    }

    #[test]
    fn failing_expectation_is_reported() {
        let set = SubmanifoldSet::default();
        let scenario = Scenario {
            id: "wrong-degree".into(),
            patch: None,
            op: ScenarioOp::Degree {
                submanifold: "plane".into(),
                resolution: 16,
            },
            expect: Expectations {
                degree: Some(5),
                ..Expectations::default()
            },
        };
        let result = run_suite(&[scenario], &set, &RunOptions::default());
        assert!(!result.all_passed());
        assert!(result.summary_string().contains("[FAIL] wrong-degree"));
    }

    #[test]
    fn error_paths_become_failed_outcomes() {
        let set = SubmanifoldSet::default();
        let scenario = Scenario {
            id: "off-domain".into(),
            patch: None,
            op: ScenarioOp::Blowup {
                submanifold: "plane".into(),
                point: vec![5.0, 5.0],
                radii: vec![0.1, 0.05, 0.025, 0.0125],
            },
            expect: Expectations::default(),
        };
        let result = run_suite(&[scenario], &set, &RunOptions::default());
        assert!(!result.all_passed());
        assert!(result.outcomes[0].detail.contains("error"));
    }

    #[test]
    fn describe_builtins() {
        let set = SubmanifoldSet::default();
        let text = describe("plane", &set).unwrap();
        assert!(text.contains("global degree: 4"), "{text}");
        assert!(text.contains("degree-2 locus: {u1=0}"), "{text}");
        let text = describe("(0,0,0,t)", &set).unwrap();
        assert!(text.contains("global degree: 3"), "{text}");
        assert!(text.contains("degree 3 everywhere"), "{text}");
        assert!(describe("malformed-id", &set).is_err());
    }

    #[test]
    fn tolerance_override_parsing() {
        let o = ToleranceOverrides::parse(&["slope=0.2".into(), "value=1e-5".into()]).unwrap();
        assert_eq!(o.slope_tol, Some(0.2));
        assert_eq!(o.value_tol, Some(1e-5));
        assert!(ToleranceOverrides::parse(&["bogus".into()]).is_err());
        assert!(ToleranceOverrides::parse(&["slope=abc".into()]).is_err());
    }

    #[test]
    fn builtin_suite_is_well_formed() {
        let set = SubmanifoldSet::default();
        let suite = builtin_suite();
        assert!(suite.len() > 30);
        let mut ids = std::collections::HashSet::new();
        for s in &suite {
            assert!(ids.insert(s.id.clone()), "duplicate id {}", s.id);
            if let Some(r) = s.op.submanifold_ref() {
                set.resolve(r).unwrap();
            }
        }
    }
}
