//! The binding layer compiles to plain functions off-wasm, so its JSON
//! contracts can be checked on the host.

use taumc_wasm::app::{
    coupled_pair, default_model, describe_model, poisson_histogram, simulate_trajectories,
    variance_scaling,
};

#[test]
fn default_model_describes_cleanly() {
    let text = default_model();
    let summary: serde_json::Value = serde_json::from_str(&describe_model(&text).unwrap()).unwrap();
    assert_eq!(summary["species"], serde_json::json!(["A", "B"]));
    assert_eq!(summary["system_size"], 1e6);
    assert_eq!(summary["gamma"], 0.0);
    assert_eq!(summary["scaled_initial"], serde_json::json!([0.2, 0.2]));
}

#[test]
fn trajectories_are_recorded_for_both_methods() {
    let text = default_model();
    for method in ["exact", "tau"] {
        let reply: serde_json::Value =
            serde_json::from_str(&simulate_trajectories(&text, method, 0.003, 0.3, 3, 0).unwrap())
                .unwrap();
        let paths = reply["paths"].as_array().unwrap();
        assert_eq!(paths.len(), 3);
        let times = paths[0]["times"].as_array().unwrap();
        assert!(times.len() > 100, "{method}: only {} samples", times.len());
        assert_eq!(paths[0]["series"].as_array().unwrap().len(), 2);
    }
    assert!(simulate_trajectories(&text, "nonsense", 0.1, 0.3, 1, 0).is_err());
}

#[test]
fn coupled_pair_reports_both_legs_and_difference() {
    let text = default_model();
    for kind in ["tau-tau", "exact-tau"] {
        let reply: serde_json::Value =
            serde_json::from_str(&coupled_pair(&text, kind, 3, 3, 0.3, 7).unwrap()).unwrap();
        let fine_times = reply["fine"]["times"].as_array().unwrap();
        let diff = reply["difference"].as_array().unwrap();
        assert_eq!(fine_times.len(), diff.len());
        assert!((reply["h"].as_f64().unwrap() - 0.3 / 27.0).abs() < 1e-12);
    }
}

#[test]
fn variance_panel_returns_rows_and_fit() {
    let text = default_model();
    let reply: serde_json::Value = serde_json::from_str(
        &variance_scaling(&text, "tau-tau", "1e3,1e4", "0.01,0.003", 120, 0.3, 0).unwrap(),
    )
    .unwrap();
    assert_eq!(reply["rows"].as_array().unwrap().len(), 4);
    let fit = &reply["fit"];
    assert!(fit["a"].as_f64().unwrap() < 0.0);
    assert!(fit["b"].as_f64().unwrap() > 0.0);
}

#[test]
fn poisson_panel_histogram_is_centered() {
    let reply: serde_json::Value =
        serde_json::from_str(&poisson_histogram(40.0, 10_000, 0).unwrap()).unwrap();
    let k0 = reply["k0"].as_u64().unwrap();
    let observed = reply["observed"].as_array().unwrap();
    assert!(k0 < 40 && k0 + observed.len() as u64 > 40);
    let total: f64 = observed.iter().map(|v| v.as_f64().unwrap()).sum();
    assert_eq!(total, 10_000.0);
}
