use helfrich_core::suites::{run_suite, Suite};

fn assert_passes(s: Suite) {
    let r = run_suite(s, 7);
    let failed: Vec<_> = r
        .failures()
        .map(|c| format!("{} = {} ({:?} {})", c.name, c.value, c.relation, c.expected))
        .collect();
    assert!(failed.is_empty(), "{s}: {failed:#?}");
    assert!(!r.checks.is_empty());
}

#[test]
fn profiles() {
    assert_passes(Suite::Profiles);
}

#[test]
fn curvature() {
    assert_passes(Suite::Curvature);
}

#[test]
fn gauss_bonnet() {
    assert_passes(Suite::GaussBonnet);
}

#[test]
fn mueller_roeger() {
    assert_passes(Suite::MuellerRoeger);
}

#[test]
fn li_yau() {
    assert_passes(Suite::LiYau);
}

#[test]
fn convergence() {
    assert_passes(Suite::Convergence);
}

#[test]
fn decay() {
    assert_passes(Suite::Decay);
}

#[test]
fn divergence() {
    assert_passes(Suite::Divergence);
}

#[test]
fn reports_serialize_identically() {
    let a = run_suite(Suite::Decay, 1).to_json().unwrap();
    assert_eq!(a, run_suite(Suite::Decay, 1).to_json().unwrap());
    let v: serde_json::Value = serde_json::from_str(&a).unwrap();
    assert_eq!(v["suite"], "decay");
    assert_eq!(v["seed"], 1);
}
