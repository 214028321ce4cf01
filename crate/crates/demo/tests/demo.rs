use morrey_demo::{growth_json, profile, range_json};
use serde_json::Value;

#[test]
fn range_of_the_classical_case() {
    let v: Value = serde_json::from_str(&range_json(2.0, 0.5, 0.0, 1, 0.0).unwrap()).unwrap();
    assert_eq!(v["lo"], -0.5);
    assert_eq!(v["hi"], 1.5);
    assert_eq!(v["lo_closed"], true);
    assert_eq!(v["verdict"], "Bounded");
}

#[test]
fn invalid_parameters_are_errors() {
    assert!(range_json(0.5, 0.5, 0.0, 1, 0.0).is_err());
    assert!(growth_json(2.0, 0.5, 0.0, 0.0, "nothing", 1024).is_err());
}

#[test]
fn profile_dominates_the_indicator() {
    let v = profile(0.0, 1.0, 4.0, 128).unwrap();
    assert_eq!(v.len(), 3 * 128);
    for c in v.chunks(3) {
        assert!(c[2] >= c[1] * (1.0 - 1e-12), "{c:?}");
        if c[0].abs() < 1.0 {
            assert!((c[2] - 1.0).abs() < 1e-12);
        }
    }
}

#[test]
fn growth_classes_follow_the_range() {
    let inside: Value = serde_json::from_str(&growth_json(2.0, 0.5, 0.0, 0.0, "char-ball", 2048).unwrap()).unwrap();
    assert_eq!(inside["class"], "bounded");
    assert_eq!(inside["output"].as_array().unwrap().len(), 9);
    let outside: Value =
        serde_json::from_str(&growth_json(2.0, 0.5, 0.0, -0.75, "singular-power", 2048).unwrap()).unwrap();
    assert_ne!(outside["class"], "bounded");
}
