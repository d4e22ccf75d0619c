use diffeo_core::verify::{reproduce, run_check, run_suite, suite_passes, CheckName, CheckParams, CheckSpec, Fault, Status};

fn params(max_n: usize) -> CheckParams {
    CheckParams { max_n, order: 6, trials: 4, ..CheckParams::default() }
}

#[test]
fn perturbed_a2_is_caught_at_n3() {
    let spec = CheckSpec::new(CheckName::Bn, params(5)).with_fault(Fault::PerturbDiffeoCoefficient { index: 2 });
    let report = run_check(&spec);
    assert_eq!(report.status, Status::Fail);
    let w = report.witness.expect("failing report carries a witness");
    assert_eq!(w.n, Some(3));
    let residual = reproduce(&spec, &w).unwrap();
    assert_eq!(residual.to_string(), w.residual);
    assert_ne!(w.residual, "0");
}

#[test]
fn perturbed_expectation_names_its_n() {
    let spec = CheckSpec::new(CheckName::SmatrixFree, params(5)).with_fault(Fault::PerturbExpected { n: 4 });
    let w = run_check(&spec).witness.unwrap();
    assert_eq!(w.n, Some(4));
    assert!(!reproduce(&spec, &w).unwrap().to_string().is_empty());
}

#[test]
fn reports_are_deterministic() {
    let specs = vec![
        CheckSpec::new(CheckName::Kinematics, CheckParams { seed: 99, ..params(4) }),
        CheckSpec::new(CheckName::Series, CheckParams { seed: 99, ..params(4) }),
        CheckSpec::new(CheckName::Bn, params(4)).with_fault(Fault::PerturbDiffeoCoefficient { index: 1 }),
    ];
    let once = serde_json::to_string(&run_suite(&specs)).unwrap();
    let twice = serde_json::to_string(&run_suite(&specs)).unwrap();
    assert_eq!(once, twice);
}

#[test]
fn suite_status_is_a_conjunction() {
    assert!(run_suite(&[]).is_empty());
    assert!(suite_passes(&[]));
    let good = CheckSpec::new(CheckName::Bn, params(4));
    let bad = good.clone().with_fault(Fault::PerturbExpected { n: 2 });
    let reports = run_suite(&[good.clone(), bad]);
    assert_eq!(reports[0].status, Status::Pass);
    assert!(!suite_passes(&reports));
    assert!(suite_passes(&run_suite(&[good])));
}

#[test]
fn out_of_range_parameters_fail_with_a_reason() {
    let report = run_check(&CheckSpec::new(CheckName::Interaction, CheckParams { s: 2, ..params(5) }));
    assert_eq!(report.status, Status::Fail);
    assert!(report.witness.unwrap().residual.contains("s = 2"));
    let fault = CheckSpec::new(CheckName::Bn, params(4)).with_fault(Fault::PerturbDiffeoCoefficient { index: 0 });
    assert!(fault.validate().is_err());
}

#[test]
fn check_names_round_trip() {
    for c in CheckName::ALL {
        assert_eq!(c.as_str().parse::<CheckName>().unwrap(), c);
    }
    assert!("bogus".parse::<CheckName>().unwrap_err().contains("bn"));
}
