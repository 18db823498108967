use std::process::{Command, Output};

use serde_json::Value;

use lagrange_weyl::group::enumerate_subgroups;
use lagrange_weyl::{Convention, PhaseSpace};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lagrange-weyl"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(args: &[&str]) -> Value {
    let o = run(args);
    assert!(o.status.success(), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_slice(&o.stdout).unwrap()
}

#[test]
fn describe_reports_order_and_phase_space() {
    let o = run(&["describe", "--group", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("order: 9"), "{text}");
    assert!(text.contains("phase space: yes"), "{text}");

    let v = json(&["describe", "--group", "2x2", "--json"]);
    assert_eq!(v["order"], 16);
    assert_eq!(v["is_phase_space"], true);
    assert_eq!(v["schema"], 1);
}

#[test]
fn invalid_group_is_an_input_error() {
    let o = run(&["describe", "--group", "0"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("position 0"));
    assert_eq!(run(&["describe", "--group", "2x"]).status.code(), Some(2));
    assert_eq!(
        run(&["describe", "--group", "2", "--multiplier", "bogus"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        run(&["algebra", "--group", "2", "--subgroup", "9"]).status.code(),
        Some(2)
    );
}

#[test]
fn lagrangian_counts() {
    assert_eq!(
        json(&["lagrangians", "--group", "2", "--json"])["lagrangians"]
            .as_array()
            .unwrap()
            .len(),
        3
    );
    assert_eq!(
        json(&["lagrangians", "--group", "3", "--json"])["lagrangians"]
            .as_array()
            .unwrap()
            .len(),
        4
    );
}

/// Order-4 subgroups of `(Z2×Z2) × dual` on which `σ` is trivial, found
/// from the multiplier table alone.
#[test]
fn lagrangians_of_klein_match_brute_force() {
    let ps = PhaseSpace::standard(&"2x2".parse().unwrap(), Convention::Standard).unwrap();
    let mut brute: Vec<Vec<Vec<u64>>> = enumerate_subgroups(ps.xi(), Some(4))
        .unwrap()
        .into_iter()
        .filter(|h| {
            let hs = h.indices();
            hs.iter().all(|&a| hs.iter().all(|&b| ps.m(a, b) == ps.m(b, a)))
        })
        .map(|h| h.elements().iter().map(|e| e.coords.clone()).collect())
        .collect();
    brute.sort();

    let v = json(&["lagrangians", "--group", "2x2", "--json"]);
    let list = v["lagrangians"].as_array().unwrap();
    let mut found: Vec<Vec<Vec<u64>>> = list
        .iter()
        .map(|l| {
            assert_eq!(l["quotient_size"], 4);
            serde_json::from_value(l["elements"].clone()).unwrap()
        })
        .collect();
    found.sort();
    assert_eq!(found, brute);
    assert_eq!(found.len(), 15);
}

#[test]
fn algebra_forms_and_spectra() {
    let lags = json(&["lagrangians", "--group", "2", "--json"]);
    let index_of = |elems: Value| {
        lags["lagrangians"]
            .as_array()
            .unwrap()
            .iter()
            .position(|l| l["elements"] == elems)
            .unwrap()
            .to_string()
    };
    let h1 = index_of(serde_json::json!([[0, 0], [1, 0]]));
    let v = json(&["algebra", "--group", "2", "--subgroup", &h1, "--json"]);
    assert_eq!(v["form"], "[[a,b],[b,a]]");
    let mut values: Vec<String> = v["spectrum"]
        .as_array()
        .unwrap()
        .iter()
        .map(|p| p["value"].as_str().unwrap().to_string())
        .collect();
    values.sort();
    assert_eq!(values, ["a+b", "a-b"]);

    let v = json(&["algebra", "--group", "2", "--subgroup", "1,1", "--json"]);
    assert_eq!(v["form"], "[[a,b],[-b,a]]");

    let v = json(&["algebra", "--group", "3", "--subgroup", "0,1", "--json"]);
    assert_eq!(v["form"], "[[a,0,0],[0,b,0],[0,0,c]]");
    let points = v["spectrum"].as_array().unwrap();
    assert_eq!(points.len(), 3);
    assert!(points.iter().all(|p| p["coset"].is_array()));
}

#[test]
fn dump_phi_emits_one_exponent_per_element() {
    let v = json(&["algebra", "--group", "3", "--subgroup", "1,1", "--dump-phi", "--json"]);
    let phi = v["phi"].as_object().unwrap();
    assert_eq!(phi.len(), 9);
    assert!(phi.values().all(|e| e.as_array().is_some_and(|p| p.len() == 2)));
}

#[test]
fn multiplier_file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m.json");
    let g = "2".parse().unwrap();
    let m = lagrange_weyl::Multiplier::standard(&g, Convention::Conjugate);
    std::fs::write(&path, serde_json::to_string(&m.to_triples()).unwrap()).unwrap();
    let spec = format!("file:{}", path.display());
    let v = json(&["describe", "--group", "2", "--multiplier", &spec, "--json"]);
    assert_eq!(v["is_phase_space"], true);
    let o = run(&["verify", "2", "--multiplier", &spec, "--samples", "3"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));

    std::fs::write(&path, "[[0, 1, [1, 2]]]").unwrap();
    let v = json(&["describe", "--group", "2", "--multiplier", &spec, "--json"]);
    assert_eq!(v["is_phase_space"], false);
    assert!(!v["violations"].as_array().unwrap().is_empty());
}

#[test]
fn verify_is_deterministic_and_covers_tensor_dimensions() {
    let args = ["verify", "3", "--seed", "7", "--tensor-k", "2", "--json"];
    let (a, b) = (run(&args), run(&args));
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let v: Value = serde_json::from_slice(&a.stdout).unwrap();
    let dims: Vec<&Value> = v["cases"]
        .as_array()
        .unwrap()
        .iter()
        .flat_map(|c| c["checks"].as_array().unwrap())
        .filter(|k| k["name"] == "algebra.tensor_dimension")
        .collect();
    // 4 Lagrangians under each of the two conventions
    assert_eq!(dims.len(), 8);
    assert!(dims.iter().all(|k| k["status"] == "pass" && k["expected"] == "12"));
}
