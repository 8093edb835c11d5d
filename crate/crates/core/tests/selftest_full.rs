use chabauty::selftest::{run, Tier, DEFAULT_SEED};

#[test]
fn full_suite_passes_and_repeats() {
    let a = run(Tier::Full, DEFAULT_SEED);
    for c in &a.criteria {
        assert!(c.passed, "{}: {:?}", c.id, c.checks);
    }
    let b = run(Tier::Full, DEFAULT_SEED);
    assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
}
