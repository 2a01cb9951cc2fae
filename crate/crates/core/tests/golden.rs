use qtorsion::corpus::{all_golden_checks, golden, Status};

#[test]
fn golden_table_reproduced() {
    let checks = all_golden_checks(1e-9).unwrap();
    let failed: Vec<_> = checks.iter().filter(|c| c.status == Status::Fail).map(|c| c.name.clone()).collect();
    assert!(failed.is_empty(), "{failed:#?}");
}

#[test]
fn misprints_are_exactly_the_recorded_ones() {
    let checks = all_golden_checks(1e-9).unwrap();
    let recorded = golden().models.iter().map(|m| m.forms.iter().filter(|f| f.printed.is_some()).count() + m.printed_label.is_some() as usize).sum::<usize>()
        + golden().conformal.iter().map(|c| c.forms.iter().filter(|f| f.printed.is_some()).count()).sum::<usize>();
    assert!(recorded > 0);
    for c in checks.iter().filter(|c| c.status == Status::Misprint) {
        assert!(c.printed_residual.unwrap() > 1e-6, "{}", c.name);
    }
}

#[test]
fn each_example_has_expectations() {
    for e in qtorsion::corpus::EXAMPLES {
        assert!(golden().models.iter().any(|m| m.name == e.name), "{}", e.name);
    }
}
