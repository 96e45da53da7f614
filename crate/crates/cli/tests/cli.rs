use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn data(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data").join(rel)
}

fn coarse(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_coarse"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout)
        .unwrap_or_else(|e| panic!("bad json ({e}): {}", String::from_utf8_lossy(&o.stdout)))
}

fn p(rel: &str) -> String {
    data(rel).to_string_lossy().into_owned()
}

#[test]
fn build_sizes() {
    for (file, size, triples) in [
        ("groups/s3.json", 18, None),
        ("groups/z2.json", 3, Some(13)),
        ("groups/empty_generators.json", 1, Some(1)),
    ] {
        let o = coarse(&["build", &p(file)]);
        assert_eq!(code(&o), 0, "{file}");
        let v = json(&o);
        assert_eq!(v["size"], size, "{file}");
        if let Some(t) = triples {
            assert_eq!(v["triples"].as_array().unwrap().len(), t);
        }
    }
}

#[test]
fn build_output_is_a_valid_exchange_file_and_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("s3.coarse.json");
    let out_s = out.to_string_lossy().into_owned();
    assert_eq!(code(&coarse(&["build", &p("groups/s3.json"), "-o", &out_s])), 0);
    let first = std::fs::read(&out).unwrap();
    assert_eq!(code(&coarse(&["build", &p("groups/s3.json"), "-o", &out_s])), 0);
    assert_eq!(first, std::fs::read(&out).unwrap());

    let v: Value = serde_json::from_slice(&first).unwrap();
    let triples: Vec<Vec<u64>> = serde_json::from_value(v["triples"].clone()).unwrap();
    let mut sorted = triples.clone();
    sorted.sort();
    assert_eq!(triples, sorted);

    let o = coarse(&["check", &out_s]);
    assert_eq!(code(&o), 0);
    let reports = json(&o)["result"].as_array().unwrap().clone();
    assert_eq!(reports.len(), 14);
    assert!(reports.iter().all(|r| r["holds"] == true));
}

#[test]
fn check_output_records_seed_and_is_byte_identical() {
    let args = ["check", &p("groups/s3.json"), "--seed", "17"];
    let a = coarse(&args);
    let b = coarse(&args);
    assert_eq!(a.stdout, b.stdout);
    let v = json(&a);
    assert_eq!(v["config"]["seed"], 17);
    assert_eq!(v["command"], "check");
}

#[test]
fn mutated_file_fails_with_witness() {
    let dir = tempfile::tempdir().unwrap();
    let built = coarse(&["build", &p("groups/z2.json")]);
    let mut v = json(&built);
    let triples = v["triples"].as_array_mut().unwrap();
    // drop R(e, e, e): the identity coset loses its own product
    let pos = triples.iter().position(|t| t[0] == t[1] && t[1] == t[2]).unwrap();
    triples.remove(pos);
    let path = dir.path().join("mutated.json");
    std::fs::write(&path, serde_json::to_string(&v).unwrap()).unwrap();
    let o = coarse(&["check", &path.to_string_lossy()]);
    assert_eq!(code(&o), 1);
    let reports = json(&o)["result"].as_array().unwrap().clone();
    let failed: Vec<&Value> = reports.iter().filter(|r| r["holds"] == false).collect();
    assert!(!failed.is_empty());
    assert!(failed
        .iter()
        .all(|r| r["witness"].is_array() && r["clause"].is_string()));
}

#[test]
fn profinite_flag_on_z8_tower() {
    let o = coarse(&["check", &p("towers/z8.json"), "--checker", "profinite"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(v["result"][0]["axiom_id"], "profinite");
    assert_eq!(v["result"][0]["holds"], true);
}

#[test]
fn unknown_checker_is_an_input_error() {
    assert_eq!(code(&coarse(&["check", &p("groups/s3.json"), "--checker", "nope"])), 2);
}

#[test]
fn reconstruct_group_and_tower() {
    for file in ["groups/s3.json", "groups/trivial.json", "groups/q8.json"] {
        let o = coarse(&["reconstruct", &p(file)]);
        assert_eq!(code(&o), 0, "{file}");
        let v = json(&o);
        assert_eq!(v["result"]["report"]["holds"], true);
        let order = v["result"]["report"]["group_order"].as_u64().unwrap() as usize;
        assert_eq!(v["result"]["filter_group"]["table"].as_array().unwrap().len(), order);
    }
    let o = coarse(&["reconstruct", &p("towers/z8.json")]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(v["result"]["quotient_orders"], serde_json::json!([2, 4, 8]));
    assert_eq!(v["result"]["report"]["filter_group_order"], 8);
}

#[test]
fn kns_d4_q8_and_relabeled_s3() {
    let o = coarse(&["kns", &p("groups/d4.json"), &p("groups/q8.json")]);
    assert_eq!(code(&o), 0);
    let r = &json(&o)["result"];
    assert_eq!(r["groups_isomorphic"], false);
    assert_eq!(r["structures_isomorphic"], false);

    let o = coarse(&["kns", &p("groups/s3.json"), &p("groups/s3_relabeled.json")]);
    let r = &json(&o)["result"];
    assert_eq!(r["groups_isomorphic"], true);
    assert_eq!(r["structures_isomorphic"], true);
    assert!(r["group_witness"].is_array());
}

#[test]
fn iso_identical_input_gives_identity() {
    let o = coarse(&["iso", &p("groups/d4.json"), &p("groups/d4.json")]);
    assert_eq!(code(&o), 0);
    let r = &json(&o)["result"];
    assert_eq!(r["isomorphic"], true);
    let w: Vec<usize> = serde_json::from_value(r["witness"].clone()).unwrap();
    assert!(w.iter().enumerate().all(|(i, &x)| i == x));
    assert_eq!(r["fingerprints"][0], r["fingerprints"][1]);

    let o = coarse(&["iso", &p("groups/z4.json"), &p("groups/v4.json")]);
    assert_eq!(code(&o), 0);
    assert_eq!(json(&o)["result"]["isomorphic"], false);
}

#[test]
fn conjugacy_of_transpositions() {
    let o = coarse(&[
        "conjugacy",
        &p("groups/transposition_01.json"),
        &p("groups/transposition_02.json"),
    ]);
    assert_eq!(code(&o), 0);
    let r = &json(&o)["result"]["report"];
    assert_eq!(r["conjugate"], true);
    assert_eq!(r["witness"], serde_json::json!([0, 2, 1]));
    assert_eq!(r["checked"], 6);
    let o = coarse(&["conjugacy", &p("groups/z2.json"), &p("groups/z3.json")]);
    assert_eq!(code(&o), 2);
}

#[test]
fn stone_files_and_seeded_random() {
    for file in ["trees/full3.json", "trees/single_branch.json", "trees/pruned.json"] {
        let o = coarse(&["stone", &p(file)]);
        assert_eq!(code(&o), 0, "{file}");
        assert_eq!(json(&o)["result"][0]["report"]["holds"], true);
    }
    let args = ["stone", "--random", "5", "--seed", "3", "--depth", "4"];
    let a = coarse(&args);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, coarse(&args).stdout);
    assert_eq!(json(&a)["result"].as_array().unwrap().len(), 5);
    assert_eq!(code(&coarse(&["stone", "--depth", "9"])), 3);
}

#[test]
fn oligo_small_supports() {
    let o = coarse(&["oligo", "--support", ""]);
    assert_eq!(code(&o), 0);
    assert_eq!(json(&o)["result"]["elements"], 1);

    let o = coarse(&["oligo", "--support", "0,1"]);
    assert_eq!(code(&o), 0);
    let r = &json(&o)["result"];
    assert_eq!(r["elements"], 6);
    assert_eq!(r["subgroups"].as_array().unwrap().len(), 4);
    assert!(r["identity_failures"].as_array().unwrap().is_empty());

    let o = coarse(&["oligo", "--support", "0,1/2,1", "--k-max", "3"]);
    assert_eq!(code(&o), 0);
    for s in json(&o)["result"]["subgroups"].as_array().unwrap() {
        assert_eq!(s["delta"]["holds"], true);
        for c in s["oligomorphic"].as_array().unwrap() {
            assert_eq!(c["family"], c["order_types"]);
        }
    }
}

#[test]
fn exit_codes_for_bad_input_and_bounds() {
    assert_eq!(code(&coarse(&["build", "/definitely/not/here.json"])), 2);
    assert_eq!(code(&coarse(&["build", &p("trees/full3.json")])), 2);
    assert_eq!(
        code(&coarse(&["build", &p("groups/s4.json"), "--max-group-order", "12"])),
        3
    );
    assert_eq!(code(&coarse(&["oligo", "--support", "0,1,2,3,4,5,6"])), 3);
    assert_eq!(code(&coarse(&["oligo", "--support", "a"])), 2);
    assert_eq!(code(&coarse(&["build", &p("groups/s3.json"), "--arity", "0"])), 2);
    assert_eq!(code(&coarse(&["no-such-command"])), 2);

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"name":"x","degree":2,"generators":[[0,0]]}"#).unwrap();
    assert_eq!(code(&coarse(&["build", &bad.to_string_lossy()])), 2);
}

#[test]
fn dot_and_text_formats() {
    let o = coarse(&["build", &p("groups/z2.json"), "--format", "dot"]);
    assert_eq!(code(&o), 0);
    let s = String::from_utf8(o.stdout).unwrap();
    assert!(s.starts_with("digraph"));
    assert_eq!(s.matches("->").count(), 2);

    let o = coarse(&["check", &p("groups/z2.json"), "--format", "text"]);
    assert!(String::from_utf8(o.stdout).unwrap().contains("seed: 0"));
    assert_eq!(
        code(&coarse(&[
            "kns",
            &p("groups/z2.json"),
            &p("groups/z2.json"),
            "--format",
            "dot"
        ])),
        2
    );
}
