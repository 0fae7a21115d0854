use fwps_demo::{classify, classify_value, invariants, invariants_value, weight_counts_value};
use serde_json::Value;

#[test]
fn invariants_of_the_z3_plane() {
    let v = invariants_value("1,1,1;0,1,2@3");
    assert_eq!(v["picard_index"], "3");
    assert_eq!(v["gorenstein_index"], "1");
    assert_eq!(v["gorenstein"], true);
    assert_eq!(v["failing_column"], Value::Null);
}

#[test]
fn invariants_report_errors_and_failing_columns() {
    assert!(invariants_value("1,x").get("error").is_some());
    let v = invariants_value("1,1;1,0@2");
    assert!(v["failing_column"].is_u64(), "{v}");
    let parsed: Value = serde_json::from_str(&invariants("1,1,1")).unwrap();
    assert_eq!(parsed["l"], "1");
}

#[test]
fn classification_counts() {
    for (dim, count) in [(1, 1), (2, 5), (3, 48)] {
        let v = classify_value(dim);
        assert_eq!(v["records"].as_array().unwrap().len(), count);
    }
    let parsed: Value = serde_json::from_str(&classify(4)).unwrap();
    assert!(parsed.get("error").is_some());
}

#[test]
fn weight_counts() {
    let v = weight_counts_value(4);
    let counts: Vec<u64> = v["counts"].as_array().unwrap().iter().map(|c| c["count"].as_u64().unwrap()).collect();
    assert_eq!(counts, [1, 3, 14, 147]);
    assert!(weight_counts_value(0).get("error").is_some());
}
