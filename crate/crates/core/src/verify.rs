//! Property suite over a grid of ratios, producing a machine-readable report.
//!
//! Every check has one row per `m` (and per square index where relevant).
//! A row passes when its residual is below the check's tolerance; the
//! tolerances live in [`CHECKS`] and nowhere else.

use serde::Serialize;

use crate::diagonals::compute_report;
use crate::error::{Result, SpiralError};
use crate::geom::{slope, Point};
use crate::spiral::{
    center_offset_from_pole, pole_closed, pole_forms, pole_iterative, square_center_closed,
    square_center_recursive, SpiralSpec, DEFAULT_SQUARE_CAP, DEFAULT_TOL,
};
use crate::PHI;

/// The nine ratios exercised by default: near one, the p-Fibonacci values for
/// p = 6, 4, 3, 1, then 2, 5 and 60.
pub const DEFAULT_GRID: [f64; 9] = [
    1.01,
    1.1,
    1.2851990332,
    1.3247179572,
    1.4655712318,
    PHI,
    2.0,
    5.0,
    60.0,
];

pub const DEFAULT_MAX_I: usize = 30;

/// Ratios used for the two limit checks.
pub const LIMIT_NEAR_ONE: f64 = 1.0 + 1e-6;
pub const LIMIT_LARGE: f64 = 1e6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Check {
    /// `|closed − recursive| / L` for square centres.
    CenterClosedVsRecursive,
    /// `|iterative − closed| / L` for the pole.
    PoleIterativeVsClosed,
    /// Relative disagreement between the upper-right and lower-right forms.
    PoleFormsAgree,
    /// Relative error of the slope from the lower-right corner to the pole against `m`.
    PoleSlopeFromLowerRight,
    /// `|pole − lower-right| / L` at `m = 1 + 1e-6`.
    PoleLimitNearOne,
    /// `|pole − upper-right| / L` at `m = 1e6`.
    PoleLimitLarge,
    /// `|dist²(pole, c_i)·2m^(2i)/L² − 1|`.
    CircumcircleThroughPole,
    /// `|dist²(pole, c_0) − L²/2| / L²`.
    PoleOnFirstCircumcircle,
    /// `|d1·d2| / (‖d1‖‖d2‖)`.
    DiagonalOrthogonality,
    /// Same for the pole direction from the lower-right corner and its normal.
    EyeVectorOrthogonality,
    /// `|AC ∩ BD − pole| / L`.
    DiagonalIntersectionAtPole,
    /// `|‖d1‖/‖d2‖ − m| / m`.
    DiagonalLengthRatio,
    /// Largest relative error of the slopes of AC and BD against `−1/m` and `m`.
    DiagonalSlopes,
    /// Building the `SpiralSpec` itself; fails for invalid grid entries.
    SpecValid,
}

pub struct CheckSpec {
    pub check: Check,
    pub name: &'static str,
    pub tolerance: f64,
    pub per_square: bool,
}

/// The tolerance table.
pub const CHECKS: [CheckSpec; 14] = [
    CheckSpec {
        check: Check::CenterClosedVsRecursive,
        name: "center_closed_vs_recursive",
        tolerance: 1e-11,
        per_square: true,
    },
    CheckSpec {
        check: Check::PoleIterativeVsClosed,
        name: "pole_iterative_vs_closed",
        tolerance: 1e-11,
        per_square: false,
    },
    CheckSpec {
        check: Check::PoleFormsAgree,
        name: "pole_forms_agree",
        tolerance: 1e-14,
        per_square: false,
    },
    CheckSpec {
        check: Check::PoleSlopeFromLowerRight,
        name: "pole_slope_from_lower_right",
        tolerance: 1e-12,
        per_square: false,
    },
    CheckSpec {
        check: Check::PoleLimitNearOne,
        name: "pole_limit_near_one",
        tolerance: 1e-5,
        per_square: false,
    },
    CheckSpec {
        check: Check::PoleLimitLarge,
        name: "pole_limit_large",
        tolerance: 1e-5,
        per_square: false,
    },
    CheckSpec {
        check: Check::CircumcircleThroughPole,
        name: "circumcircle_through_pole",
        tolerance: 1e-10,
        per_square: true,
    },
    CheckSpec {
        check: Check::PoleOnFirstCircumcircle,
        name: "pole_on_first_circumcircle",
        tolerance: 1e-12,
        per_square: false,
    },
    CheckSpec {
        check: Check::DiagonalOrthogonality,
        name: "diagonal_orthogonality",
        tolerance: 1e-12,
        per_square: false,
    },
    CheckSpec {
        check: Check::EyeVectorOrthogonality,
        name: "eye_vector_orthogonality",
        tolerance: 1e-12,
        per_square: false,
    },
    CheckSpec {
        check: Check::DiagonalIntersectionAtPole,
        name: "diagonal_intersection_at_pole",
        tolerance: 1e-12,
        per_square: false,
    },
    CheckSpec {
        check: Check::DiagonalLengthRatio,
        name: "diagonal_length_ratio",
        tolerance: 1e-12,
        per_square: false,
    },
    CheckSpec {
        check: Check::DiagonalSlopes,
        name: "diagonal_slopes",
        tolerance: 1e-12,
        per_square: false,
    },
    CheckSpec {
        check: Check::SpecValid,
        name: "spec_valid",
        tolerance: 0.0,
        per_square: false,
    },
];

impl Check {
    pub fn spec(self) -> &'static CheckSpec {
        CHECKS
            .iter()
            .find(|c| c.check == self)
            .expect("every check has a table entry")
    }

    pub fn name(self) -> &'static str {
        self.spec().name
    }

    pub fn tolerance(self) -> f64 {
        self.spec().tolerance
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckRow {
    pub name: &'static str,
    pub m: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub i: Option<usize>,
    /// Absent when the check could not be evaluated.
    pub residual: Option<f64>,
    pub tolerance: f64,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl CheckRow {
    fn measured(check: Check, m: f64, i: Option<usize>, residual: f64) -> Self {
        let tolerance = check.tolerance();
        CheckRow {
            name: check.name(),
            m,
            i,
            residual: Some(residual),
            tolerance,
            pass: residual < tolerance,
            error: None,
        }
    }

    fn failed(check: Check, m: f64, err: &SpiralError) -> Self {
        CheckRow {
            name: check.name(),
            m,
            i: None,
            residual: None,
            tolerance: check.tolerance(),
            pass: false,
            error: Some(err.to_string()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub max_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub grid: Vec<f64>,
    pub checks: Vec<CheckRow>,
    pub summary: Summary,
}

impl VerificationReport {
    pub fn all_passed(&self) -> bool {
        self.summary.passed == self.summary.total
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialises")
    }
}

fn rel(value: f64, expect: f64) -> f64 {
    ((value - expect) / expect).abs()
}

fn rows_for_ratio(m: f64, side: f64, max_i: usize) -> Vec<CheckRow> {
    let spec = match SpiralSpec::new(m, side, Point::origin()) {
        Ok(s) => s,
        Err(e) => return vec![CheckRow::failed(Check::SpecValid, m, &e)],
    };
    let mut rows = Vec::new();

    for i in 0..=max_i {
        let a = square_center_closed(&spec, i);
        let b = square_center_recursive(&spec, i);
        rows.push(CheckRow::measured(
            Check::CenterClosedVsRecursive,
            m,
            Some(i),
            a.distance(b) / side,
        ));

        // Measured from the pole-relative form: subtracting two absolute
        // positions would lose every digit once the square is tiny.
        let d2 = center_offset_from_pole(&spec, i).norm_squared();
        let scaled = d2 * 2.0 / (side * side) * m.powi(2 * i as i32);
        rows.push(CheckRow::measured(
            Check::CircumcircleThroughPole,
            m,
            Some(i),
            (scaled - 1.0).abs(),
        ));
    }

    let pole = pole_closed(&spec).point;
    match pole_iterative(&spec, DEFAULT_TOL) {
        Ok(it) => rows.push(CheckRow::measured(
            Check::PoleIterativeVsClosed,
            m,
            None,
            it.point.distance(pole) / side,
        )),
        Err(e) => rows.push(CheckRow::failed(Check::PoleIterativeVsClosed, m, &e)),
    }
    rows.push(CheckRow::measured(
        Check::PoleFormsAgree,
        m,
        None,
        pole_forms(&spec).relative_disagreement(),
    ));
    rows.push(CheckRow::measured(
        Check::PoleSlopeFromLowerRight,
        m,
        None,
        rel(slope(spec.lower_right(), pole), m),
    ));
    let d2 = (pole - spec.center0()).norm_squared();
    rows.push(CheckRow::measured(
        Check::PoleOnFirstCircumcircle,
        m,
        None,
        (d2 - side * side / 2.0).abs() / (side * side),
    ));

    match compute_report(&spec) {
        Ok(r) => {
            rows.push(CheckRow::measured(
                Check::DiagonalOrthogonality,
                m,
                None,
                r.orthogonality_residual,
            ));
            rows.push(CheckRow::measured(
                Check::EyeVectorOrthogonality,
                m,
                None,
                r.eye_orthogonality_residual,
            ));
            rows.push(CheckRow::measured(
                Check::DiagonalIntersectionAtPole,
                m,
                None,
                r.pole_distance / side,
            ));
            rows.push(CheckRow::measured(
                Check::DiagonalLengthRatio,
                m,
                None,
                rel(r.length_ratio, m),
            ));
            rows.push(CheckRow::measured(
                Check::DiagonalSlopes,
                m,
                None,
                rel(r.slopes.0, -1.0 / m).max(rel(r.slopes.1, m)),
            ));
        }
        Err(e) => {
            for c in [
                Check::DiagonalOrthogonality,
                Check::EyeVectorOrthogonality,
                Check::DiagonalIntersectionAtPole,
                Check::DiagonalLengthRatio,
                Check::DiagonalSlopes,
            ] {
                rows.push(CheckRow::failed(c, m, &e));
            }
        }
    }
    rows
}

fn limit_rows(side: f64) -> Vec<CheckRow> {
    let mut rows = Vec::new();
    for (check, m) in [
        (Check::PoleLimitNearOne, LIMIT_NEAR_ONE),
        (Check::PoleLimitLarge, LIMIT_LARGE),
    ] {
        match SpiralSpec::new(m, side, Point::origin()) {
            Ok(spec) => {
                let target = if check == Check::PoleLimitNearOne {
                    spec.lower_right()
                } else {
                    spec.upper_right()
                };
                let d = pole_closed(&spec).point.distance(target) / side;
                rows.push(CheckRow::measured(check, m, None, d));
            }
            Err(e) => rows.push(CheckRow::failed(check, m, &e)),
        }
    }
    rows
}

/// Runs every check for each `m` in `grid` with first-square side `side`
/// and square indices `0..=max_i`.
///
/// Invalid grid entries give a failed `spec_valid` row and do not stop the
/// suite. The two limit checks run at their own fixed ratios whenever the
/// grid is non-empty.
pub fn run_suite(grid: &[f64], side: f64, max_i: usize) -> Result<VerificationReport> {
    if max_i > DEFAULT_SQUARE_CAP {
        return Err(SpiralError::CapExceeded {
            requested: max_i,
            cap: DEFAULT_SQUARE_CAP,
        });
    }
    if !(side.is_finite() && side > 0.0) {
        return Err(SpiralError::BadSide { side });
    }
    let mut checks: Vec<CheckRow> = grid
        .iter()
        .flat_map(|&m| rows_for_ratio(m, side, max_i))
        .collect();
    if !grid.is_empty() {
        checks.extend(limit_rows(side));
    }
    checks.sort_by(|a, b| {
        a.name
            .cmp(b.name)
            .then(a.m.total_cmp(&b.m))
            .then(a.i.cmp(&b.i))
    });

    let passed = checks.iter().filter(|r| r.pass).count();
    let max_residual = checks.iter().filter_map(|r| r.residual).fold(0.0, f64::max);
    Ok(VerificationReport {
        grid: grid.to_vec(),
        summary: Summary {
            total: checks.len(),
            passed,
            max_residual,
        },
        checks,
    })
}
