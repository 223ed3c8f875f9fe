use std::path::Path;
use std::process::{Command, Output};

fn closurelab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_closurelab"))
        .args(args)
        .output()
        .expect("run closurelab")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn gen_family(dir: &Path, name: &str, param: &str) -> String {
    let path = dir.join(format!("{name}-{param}.json"));
    let p = path.to_str().unwrap().to_string();
    let o = closurelab(&["gen", "family", name, param, "--out", &p]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    p
}

/// Value of `column` in the single data row of a solve CSV.
fn column(csv_text: &str, column: &str) -> String {
    let mut r = csv::Reader::from_reader(csv_text.as_bytes());
    let idx = r.headers().unwrap().iter().position(|h| h == column).unwrap();
    let rec = r.records().next().unwrap().unwrap();
    rec[idx].to_string()
}

#[test]
fn solve_packing_tight_100() {
    let dir = tempfile::tempdir().unwrap();
    let p = gen_family(dir.path(), "packing_tight", "100");
    let o = closurelab(&["solve", &p, "--closures", "CG,CG1ROW,AGG1ROW"]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert_eq!(column(&out, "z_agg1"), "200/101");
    assert_eq!(column(&out, "z_cg"), "1");
    assert_eq!(column(&out, "z_lp"), "");
}

#[test]
fn solve_cg_vs_kc_8() {
    let dir = tempfile::tempdir().unwrap();
    let p = gen_family(dir.path(), "cg_vs_kc", "8");
    let o = closurelab(&["solve", &p, "--closures", "CG,KC", "--row-only-cg"]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert_eq!(column(&out, "z_cg"), "1/8");
    assert_eq!(column(&out, "z_kc"), "1");
    // the bound rows lift the CG closure to the integer optimum
    let o = closurelab(&["solve", &p, "--closures", "CG,KC"]);
    assert_eq!(column(&stdout(&o), "z_cg"), "1");
}

#[test]
fn solve_json_output() {
    let dir = tempfile::tempdir().unwrap();
    let p = gen_family(dir.path(), "covering_tight", "10");
    let o = closurelab(&["solve", &p, "--closures", "cg,cg1row", "--format", "json"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["values"]["CG"], "2");
    assert_eq!(v["values"]["CG1ROW"], "20/19");
    assert_eq!(v["ratio"], "19/10");
}

#[test]
fn usage_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let p = gen_family(dir.path(), "packing_tight", "3");
    let o = closurelab(&["solve", &p, "--closures", "CG,NOPE"]);
    assert_eq!(o.status.code(), Some(2));
    let err: serde_json::Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(err["error"], "validation");
    assert_eq!(closurelab(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(closurelab(&["verify", "families", "--eps", "3/2"]).status.code(), Some(2));
    assert_eq!(closurelab(&["gen", "family", "nosuch", "3"]).status.code(), Some(2));
    let missing = dir.path().join("missing.json");
    assert_eq!(closurelab(&["solve", missing.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn resource_cap_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let p = gen_family(dir.path(), "packing_tight", "100");
    let o = Command::new(env!("CARGO_BIN_EXE_closurelab"))
        .args(["solve", &p, "--closures", "AGG1ROW"])
        .env("CLOSURELAB_CAP", "10")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn gen_is_deterministic() {
    let a = stdout(&closurelab(&["gen", "random", "--n", "10", "--seed", "4"]));
    let b = stdout(&closurelab(&["gen", "random", "--n", "10", "--seed", "4"]));
    assert_eq!(a, b);
    let c = stdout(&closurelab(&["gen", "random", "--n", "10", "--seed", "5"]));
    assert_ne!(a, c);
    let ms = stdout(&closurelab(&["gen", "market-split", "--m", "2", "--seed", "1"]));
    assert!(ms.contains("market-split"));
}

#[test]
fn verify_families_passes() {
    let o = closurelab(&["verify", "families", "--eps", "1/10"]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert_eq!(out.lines().filter(|l| l.starts_with("PASS")).count(), 11);
    assert!(out.contains("packing_tight(20)"));
    assert!(out.contains("covering_tight(10)"));
    assert!(out.contains("noncover(22)"));
    assert!(out.contains("cg_vs_kc(10)"));
}

#[test]
fn verify_chains_and_rank() {
    let o = closurelab(&["verify", "chains", "--count", "2", "--seed", "0"]);
    assert!(o.status.success(), "{}", stdout(&o));
    assert!(!stdout(&o).contains("FAIL"));
    let o = closurelab(&["verify", "rank", "--family", "fstab", "--param", "16"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("rank >= 3"));
    // general data: no rank bound applies
    let o = closurelab(&["verify", "rank", "--family", "noncover", "--param", "3"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn clique_certificate() {
    let o = closurelab(&["clique-cert", "--n", "17"]);
    assert!(o.status.success());
    assert!(stdout(&o).starts_with("clique on K_17: 4 rounds"));
    assert_eq!(closurelab(&["clique-cert", "--n", "2"]).status.code(), Some(2));
}

#[test]
fn fig3_empty_and_small() {
    let o = closurelab(&["experiment", "fig3", "--count", "0"]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.starts_with("instance,seed,class,n,m,z_lp,z_lpstar,z_kc,z_cg,z_cg1,z_agg1,agg_lo,agg_hi,z_ip,ratio,flags,ms\n"));
    assert_eq!(out.lines().filter(|l| !l.starts_with('#')).count(), 1);

    let dir = tempfile::tempdir().unwrap();
    let csv_path = dir.path().join("fig3.csv");
    let args = ["experiment", "fig3", "--count", "3", "--seed", "20", "--out", csv_path.to_str().unwrap()];
    assert!(closurelab(&args).status.success());
    let first = std::fs::read_to_string(&csv_path).unwrap();
    assert!(first.contains("# arithmetic mean ratio"));
    assert!(first.contains("# geometric mean ratio"));
    let svg = std::fs::read_to_string(csv_path.with_extension("svg")).unwrap();
    assert!(svg.starts_with("<svg"));
    // byte-identical reruns
    assert!(closurelab(&args).status.success());
    assert_eq!(std::fs::read_to_string(&csv_path).unwrap(), first);
}

#[test]
fn market_split_small() {
    let o = closurelab(&["experiment", "market-split", "--count", "2", "--seed", "0"]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.contains("# 1-row CG,CG,IP,instances"));
    assert!(!out.contains("# infeasible,feasible,"));
    assert!(!out.contains(",infeasible,feasible,"));
}
