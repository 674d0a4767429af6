use mspiral::verify::{run_suite, Check, VerificationReport, CHECKS, DEFAULT_GRID, DEFAULT_MAX_I};

/// Each stated property of the construction, with the checks that cover it.
const COVERAGE: [(&str, &[Check]); 10] = [
    (
        "closed-form square centres",
        &[Check::CenterClosedVsRecursive],
    ),
    (
        "pole closed form and iteration",
        &[Check::PoleIterativeVsClosed, Check::PoleFormsAgree],
    ),
    (
        "pole slope from the lower-right corner",
        &[Check::PoleSlopeFromLowerRight],
    ),
    (
        "pole limits",
        &[Check::PoleLimitNearOne, Check::PoleLimitLarge],
    ),
    (
        "circumscribed circles through the pole",
        &[Check::CircumcircleThroughPole],
    ),
    (
        "poles on the first circumscribed circle",
        &[Check::PoleOnFirstCircumcircle],
    ),
    (
        "orthogonal diagonals",
        &[Check::DiagonalOrthogonality, Check::EyeVectorOrthogonality],
    ),
    (
        "diagonals cross at the pole",
        &[Check::DiagonalIntersectionAtPole],
    ),
    ("diagonal length ratio", &[Check::DiagonalLengthRatio]),
    ("diagonal slopes", &[Check::DiagonalSlopes]),
];

fn default_report() -> VerificationReport {
    run_suite(&DEFAULT_GRID, 1.0, DEFAULT_MAX_I).unwrap()
}

#[test]
fn every_property_has_a_passing_row() {
    let r = default_report();
    for (property, checks) in COVERAGE {
        for c in checks {
            assert!(
                r.checks.iter().any(|row| row.name == c.name() && row.pass),
                "{property}: no passing {} row",
                c.name()
            );
        }
    }
}

#[test]
fn every_table_entry_is_covered() {
    for spec in &CHECKS {
        let listed = COVERAGE.iter().any(|(_, cs)| cs.contains(&spec.check));
        assert!(
            listed || spec.check == Check::SpecValid,
            "{} unmapped",
            spec.name
        );
    }
}

#[test]
fn default_report_passes_and_is_reproducible() {
    let a = default_report();
    assert!(a.all_passed());
    assert!(a.summary.max_residual < 1e-5);
    let b = default_report();
    assert_eq!(a, b);
    assert_eq!(a.to_json(), b.to_json());
}

#[test]
fn per_square_checks_have_an_index() {
    let r = run_suite(&[2.0], 1.0, 7).unwrap();
    for row in &r.checks {
        let spec = CHECKS.iter().find(|c| c.name == row.name).unwrap();
        assert_eq!(row.i.is_some(), spec.per_square, "{}", row.name);
    }
    let circ = r
        .checks
        .iter()
        .filter(|c| c.name == "circumcircle_through_pole")
        .count();
    assert_eq!(circ, 8);
}

#[test]
fn other_side_lengths_pass_too() {
    for side in [1e-3, 0.5, 7.0, 1e3] {
        let r = run_suite(&DEFAULT_GRID, side, DEFAULT_MAX_I).unwrap();
        let bad: Vec<_> = r.checks.iter().filter(|c| !c.pass).collect();
        assert!(bad.is_empty(), "L={side}: {bad:#?}");
    }
}

#[test]
fn json_round_trips_through_a_parser() {
    let r = run_suite(&[1.0, 2.0], 1.0, 2).unwrap();
    let v: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
    assert_eq!(v["summary"]["total"], r.summary.total);
    let bad = &v["checks"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["pass"] == false)
        .unwrap();
    assert_eq!(bad["name"], "spec_valid");
    assert!(bad["residual"].is_null());
    assert!(bad["error"].as_str().unwrap().contains("ratio"));
}
