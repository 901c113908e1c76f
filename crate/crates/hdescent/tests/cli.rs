use std::path::PathBuf;
use std::process::Command;

use hdescent::cli::{Report, Status};
use serde_json::Value;

fn data(rel: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data").join(rel).display().to_string()
}

fn hd_env(args: &[&str], env: &[(&str, &str)]) -> (String, i32) {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_hd"));
    cmd.args(args).env_remove("HD_SEED");
    for (k, v) in env {
        cmd.env(k, v);
    }
    let out = cmd.output().expect("hd runs");
    (String::from_utf8(out.stdout).unwrap(), out.status.code().unwrap())
}

fn hd(args: &[&str]) -> (String, i32) {
    hd_env(args, &[])
}

fn json_report(args: &[&str]) -> (Report, i32) {
    let mut a = args.to_vec();
    a.extend(["--format", "json"]);
    let (out, code) = hd(&a);
    (serde_json::from_str(&out).unwrap_or_else(|e| panic!("{e}: {out}")), code)
}

fn temp(name: &str, text: &str) -> String {
    let p = std::env::temp_dir().join(format!("hd-cli-{}-{name}", std::process::id()));
    std::fs::write(&p, text).unwrap();
    p.display().to_string()
}

fn without_timing(s: &str) -> Value {
    let mut v: Value = serde_json::from_str(s).unwrap();
    v.as_object_mut().unwrap().remove("timing_ms");
    v
}

#[test]
fn valid_groupoid_passes() {
    let (r, code) = json_report(&["groupoid", "check", &data("groupoids/bz3.json")]);
    assert_eq!((r.status, code), (Status::Pass, 0));
}

#[test]
fn tetrahedron_eighths_has_exponent_one_half() {
    let (r, code) = json_report(&["holonomy", "oriented", &data("surfaces/tetrahedron.json"), &data("forms/tetrahedron_eighths.json")]);
    assert_eq!(code, 0);
    assert_eq!(r.finding("holonomy").unwrap().witness["exponent"], "1/2");
}

#[test]
fn twisted_rp2_orientifold_has_exponent_one_half() {
    let (r, _) = json_report(&["holonomy", "jandl", &data("orientifolds/rp2_twisted.json")]);
    assert_eq!(r.finding("holonomy").unwrap().witness["exponent"], "1/2");
    assert!(r.finding("domain_independence").unwrap().passed);
    let (r, _) = json_report(&["holonomy", "jandl", &data("orientifolds/rp2_plain.json")]);
    assert_eq!(r.finding("holonomy").unwrap().witness["exponent"], "0");
}

#[test]
fn validation_exit_codes() {
    let (r, code) = json_report(&["validate", &data("invalid/empty.json")]);
    assert_eq!((r.status, code), (Status::Error, 2));
    let (r, code) = json_report(&["validate", &data("invalid/duplicate_label.json")]);
    assert_eq!((r.status, code), (Status::Fail, 1));
    assert!(r.findings[0].detail.contains('*'));
    let (r, code) = json_report(&["validate", &data("invalid/syntax.json")]);
    assert_eq!(code, 2);
    assert_eq!(r.findings[0].witness["line"], 3);
    let (_, code) = json_report(&["validate", &data("invalid/missing_field.json")]);
    assert_eq!(code, 2);
    for f in ["groupoids/interval.json", "functors/point_to_interval.json", "covers/split_two.json", "surfaces/klein.json", "orientifolds/rp2_twisted.json", "descent/pair_object.json", "sets/two.json", "forms/torus_tenths.json"] {
        assert_eq!(hd(&["validate", &data(f)]).1, 0, "{f}");
    }
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(hd(&["groupoid", "check", &data("groupoids/bz2.json"), "--bogus"]).1, 2);
    assert_eq!(hd(&["groupoid", "check", "/nonexistent/file.json"]).1, 2);
    assert_eq!(hd(&["prestack", "eval", "Nope_Z2", &data("sets/two.json")]).1, 2);
    let (out, code) = hd(&["frobnicate", "--format", "json"]);
    assert_eq!(code, 2);
    assert_eq!(serde_json::from_str::<Report>(&out).unwrap().status, Status::Error);
}

#[test]
fn reports_are_deterministic() {
    for args in [
        vec!["equiv", "check", &data("functors/interval_to_point.json")],
        vec!["plus", "groupoid", "Grbtriv_Z2", &data("groupoids/bz2.json")],
        vec!["descent", "objects", "Bun_Z2", &data("covers/pair_of_point.json")],
    ] {
        let mut a: Vec<&str> = args.iter().map(|s| s.as_ref()).collect();
        a.extend(["--format", "json"]);
        let (x, _) = hd(&a);
        let (y, _) = hd(&a);
        assert_eq!(without_timing(&x), without_timing(&y));
    }
}

#[test]
fn non_fully_faithful_functor_fails_with_witness() {
    let (r, code) = json_report(&["equiv", "check", &data("functors/bz2_to_point.json")]);
    assert_eq!((r.status, code), (Status::Fail, 1));
    let w = &r.finding("fully_faithful").unwrap().witness;
    assert_eq!((w["domain_count"].as_u64(), w["codomain_count"].as_u64()), (Some(2), Some(1)));
}

#[test]
fn equivalence_witness_round_trip() {
    let f = data("functors/interval_to_point.json");
    let (out, code) = hd(&["equiv", "check", &f, "--format", "json"]);
    assert_eq!(code, 0);
    let saved = temp("equiv.json", &out);
    assert_eq!(hd(&["equiv", "check", &f, "--verify-witness", &saved]).1, 0);

    let mut v: Value = serde_json::from_str(&out).unwrap();
    let findings = v["findings"].as_array_mut().unwrap();
    let se = findings.iter_mut().find(|x| x["name"] == "strong_equivalence").unwrap();
    // send the quasi-inverse's only object to the wrong end of the interval
    let f0 = se["witness"]["quasi_inverse"]["f0"].as_array_mut().unwrap();
    f0[0] = Value::from(1 - f0[0].as_u64().unwrap());
    let tampered = temp("equiv-bad.json", &v.to_string());
    let (r, code) = json_report(&["equiv", "check", &f, "--verify-witness", &tampered]);
    assert_eq!((r.status, code), (Status::Fail, 1));
}

#[test]
fn seeded_witnesses_still_verify() {
    let f = data("functors/free_z2_to_point.json");
    let run = |seed: &str| hd_env(&["equiv", "check", &f, "--format", "json"], &[("HD_SEED", seed)]);
    let (a, _) = run("7");
    let (b, _) = run("7");
    assert_eq!(without_timing(&a), without_timing(&b));
    assert_eq!(serde_json::from_str::<Value>(&a).unwrap()["seed"], 7);
    for seed in ["1", "2", "3"] {
        let (out, code) = run(seed);
        assert_eq!(code, 0);
        let saved = temp(&format!("seed{seed}.json"), &out);
        assert_eq!(hd(&["equiv", "check", &f, "--verify-witness", &saved]).1, 0);
    }
    assert_eq!(hd_env(&["groupoid", "check", &data("groupoids/bz2.json")], &[("HD_SEED", "x")]).1, 2);
}

#[test]
fn harness_and_morita_witnesses_verify() {
    let f = data("functors/point_to_interval.json");
    let (out, code) = hd(&["equivariant", "pullback", &f, "--mode", "stack", "--format", "json"]);
    assert_eq!(code, 0);
    let saved = temp("pullback.json", &out);
    assert_eq!(hd(&["equivariant", "pullback", &f, "--verify-witness", &saved]).1, 0);

    let (a, b) = (data("groupoids/interval.json"), data("groupoids/point.json"));
    let (out, code) = hd(&["equiv", "morita", &a, &b, "--format", "json"]);
    assert_eq!(code, 0);
    let saved = temp("morita.json", &out);
    assert_eq!(hd(&["equiv", "morita", &a, &b, "--verify-witness", &saved]).1, 0);
    assert_eq!(hd(&["equiv", "morita", &data("groupoids/bz2.json"), &data("groupoids/bz3.json")]).1, 1);
}

#[test]
fn descent_commands() {
    let (r, code) = json_report(&["descent", "objects", "Grbtriv_Z2", &data("covers/pair_of_point.json")]);
    assert_eq!(code, 0);
    assert_eq!(r.finding("counts").unwrap().witness["objects"], 2);
    assert_eq!(hd(&["descent", "check", &data("descent/pair_object.json")]).1, 0);
    let mut obj: Value = serde_json::from_str(&std::fs::read_to_string(data("descent/pair_object.json")).unwrap()).unwrap();
    let mu = obj["mu"].as_array_mut().unwrap();
    let i = mu.len() - 1;
    mu[i] = Value::from(1 - mu[i].as_u64().unwrap());
    let bad = temp("object.json", &obj.to_string());
    assert_eq!(hd(&["descent", "check", &bad]).1, 1);
    assert_eq!(hd(&["descent", "equivalent", &data("functors/interval_to_point.json")]).1, 0);
    assert_eq!(hd(&["descent", "equivalent", &data("functors/bz2_to_point.json")]).1, 1);
}

#[test]
fn plus_and_equivariant_commands() {
    assert_eq!(hd(&["plus", "objects", "Grbtriv_Z2", &data("sets/point.json"), "--bound", "1"]).1, 0);
    assert_eq!(hd(&["plus", "verify-stack", "Grbtriv_Z2", &data("covers/split_two.json"), "--bound", "1"]).1, 0);
    assert_eq!(hd(&["equivariant", "eval", "Bun_Z3", &data("groupoids/bz3.json")]).1, 0);
    assert_eq!(hd(&["equivariant", "descent", &data("functors/free_z2_to_point.json"), "--mode", "prestack"]).1, 0);
    assert_eq!(hd(&["equivariant", "descent", &data("functors/point_to_interval.json")]).1, 2);
    assert_eq!(hd(&["holonomy", "doublecover", &data("surfaces/rp2.json")]).1, 0);
}
