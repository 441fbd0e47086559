use tfp_core::harness::verify::{run_suite, VerifyOptions};
use tfp_core::process::Fault;

#[test]
fn quick_suite_passes() {
    let results = run_suite(VerifyOptions {
        quick: true,
        fault: None,
    });
    for r in &results {
        assert!(r.passed, "{}: {}", r.name, r.detail);
    }
}

#[test]
fn skipped_decrement_is_caught_by_name() {
    let results = run_suite(VerifyOptions {
        quick: true,
        fault: Some(Fault::SkipYDecrement),
    });
    let failed: Vec<&str> = results.iter().filter(|r| !r.passed).map(|r| r.name).collect();
    assert!(failed.contains(&"oracle equivalence"), "{failed:?}");
    assert!(failed.contains(&"identity dQ = -(Y_e + 1)"), "{failed:?}");
    assert!(failed.contains(&"identity dYbb = X_e - 2 sum Y_f"), "{failed:?}");
    let q = results.iter().find(|r| r.name == "identity dQ = -(Y_e + 1)").unwrap();
    assert!(q.detail.contains("dQ = -(Y_e + 1) fails"), "{}", q.detail);
}
