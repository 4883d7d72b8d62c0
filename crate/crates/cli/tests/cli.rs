use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn tro(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tro")).args(args).output().unwrap()
}

fn tro_env(args: &[&str], key: &str, value: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tro")).args(args).env(key, value).output().unwrap()
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_string()
}

fn rows(csv_text: &[u8]) -> Vec<csv::StringRecord> {
    csv::Reader::from_reader(csv_text).records().map(|r| r.unwrap()).collect()
}

const ABLATION: &str = "i,j,value\n0,1,0.2\n0,2,0.4\n";

#[test]
fn to_reports_a_feasible_solution() {
    let v = json(&tro(&["to", "--gen", "full-mesh:16:32", "--traffic", "gravity:1000:seed=7"]));
    assert_eq!(v["feasible"], true);
    assert!(v["mlu"].as_f64().unwrap() > 0.0);
    assert!(v["total_links"].as_u64().unwrap() > 0);
    assert!(v["iterations"].as_u64().unwrap() >= 1);
}

#[test]
fn to_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let mut outputs = Vec::new();
    for name in ["a.csv", "b.csv"] {
        let path = dir.path().join(name);
        let v = json(&tro(&[
            "to",
            "--gen",
            "full-mesh:16:32",
            "--traffic",
            "gravity:1000:seed=7",
            "--out-topology",
            path.to_str().unwrap(),
        ]));
        outputs.push((v["mlu"].as_f64().unwrap(), v["total_links"].as_u64().unwrap(), std::fs::read(&path).unwrap()));
    }
    assert_eq!(outputs[0], outputs[1]);
}

#[test]
fn to_is_fast_on_the_largest_mesh() {
    let v = json(&tro(&["to", "--gen", "full-mesh:128:256", "--traffic", "gravity:1000:seed=7"]));
    assert!(v["wall_time"].as_f64().unwrap() < 0.1);
}

#[test]
fn refinement_lowers_mlu_on_the_ablation_instance() {
    let dir = tempfile::tempdir().unwrap();
    let tm = format!("csv:{}", write(dir.path(), "tm.csv", ABLATION));
    let with = json(&tro(&["atro", "--gen", "full-mesh:3:4", "--traffic", &tm]));
    let without = json(&tro(&["atro", "--gen", "full-mesh:3:4", "--traffic", &tm, "--no-refine"]));
    let (a, b) = (with["mlu"].as_f64().unwrap(), without["mlu"].as_f64().unwrap());
    assert!(a < b - 1e-6, "{a} vs {b}");
}

#[test]
fn atro_trajectory_is_non_increasing() {
    let v = json(&tro(&["atro", "--gen", "full-mesh:8:12", "--traffic", "mixed:6:10:0.2:seed=3"]));
    let t: Vec<f64> = v["mlu_trajectory"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
    assert!(t.len() >= 2);
    assert!(t.windows(2).all(|w| w[1] <= w[0]));
    assert_eq!(*t.last().unwrap(), v["mlu"].as_f64().unwrap());
}

#[test]
fn infeasible_seed_topology_has_its_own_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    let tm = format!("csv:{}", write(dir.path(), "tm.csv", ABLATION));
    let topo = write(dir.path(), "t.csv", "i,j,value\n0,1,3\n1,0,3\n0,2,3\n2,0,3\n");
    let out = tro(&["atro", "--gen", "full-mesh:3:4", "--traffic", &tm, "--seed-topology", &topo]);
    assert_eq!(out.status.code(), Some(6));
}

#[test]
fn hot_start_from_written_solution() {
    let dir = tempfile::tempdir().unwrap();
    let topo = dir.path().join("topo.csv");
    let routing = dir.path().join("routing.csv");
    let spec = ["--gen", "full-mesh:6:10", "--traffic", "gravity:300:seed=2"];
    let mut args = vec!["atro"];
    args.extend(spec);
    args.extend(["--out-topology", topo.to_str().unwrap(), "--out-routing", routing.to_str().unwrap()]);
    let first = json(&tro(&args));
    let mut args = vec!["atro"];
    args.extend(spec);
    args.extend(["--seed-topology", topo.to_str().unwrap(), "--seed-routing", routing.to_str().unwrap()]);
    let again = json(&tro(&args));
    assert_eq!(again["mlu_trajectory"][0], first["mlu"]);
    assert!(again["mlu"].as_f64().unwrap() <= first["mlu"].as_f64().unwrap());
}

#[test]
fn generated_files_feed_back_in() {
    let dir = tempfile::tempdir().unwrap();
    let tm = dir.path().join("tm.csv");
    let topo = dir.path().join("topo.csv");
    let out = tro(&["gen-traffic", "--gen", "full-mesh:6:10", "--traffic", "ai:4:5:seed=1", "--out", tm.to_str().unwrap()]);
    assert!(out.status.success());
    let out = tro(&["gen-topo", "--gen", "full-mesh:6:10", "--out", topo.to_str().unwrap()]);
    assert!(out.status.success());
    assert_eq!(rows(&std::fs::read(&topo).unwrap()).len(), 30);

    let from_csv = json(&tro(&["to", "--gen", "full-mesh:6:10", "--traffic", &format!("csv:{}", tm.display())]));
    let direct = json(&tro(&["to", "--gen", "full-mesh:6:10", "--traffic", "ai:4:5:seed=1"]));
    assert_eq!(from_csv["mlu"], direct["mlu"]);

    let seeded = json(&tro(&[
        "atro",
        "--gen",
        "full-mesh:6:10",
        "--traffic",
        "ai:4:5:seed=1",
        "--seed-topology",
        topo.to_str().unwrap(),
    ]));
    assert!(seeded["mlu"].as_f64().unwrap() <= seeded["mlu_trajectory"][0].as_f64().unwrap());
}

#[test]
fn bench_with_brute_force_agrees_with_absm() {
    let dir = tempfile::tempdir().unwrap();
    let hist = dir.path().join("hist.csv");
    let out = tro(&[
        "bench",
        "--methods",
        "absm,atro,brute",
        "--gen",
        "full-mesh:4:6",
        "--traffic",
        "gravity:100",
        "--seeds",
        "20",
        "--allow-brute",
        "--histogram",
        hist.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let table = rows(&out.stdout);
    assert_eq!(table.len(), 60);
    for inst in table.chunks(3) {
        let get = |m: &str| inst.iter().find(|r| &r[4] == m).unwrap();
        let (a, b, t) = (get("absm"), get("brute"), get("atro"));
        let (am, bm): (f64, f64) = (a[5].parse().unwrap(), b[5].parse().unwrap());
        assert!((am - bm).abs() <= 1e-6 * bm.max(1.0), "{am} vs {bm}");
        assert_eq!(t[6].parse::<f64>().unwrap(), 1.0);
        let (al, bl): (u64, u64) = (a[8].parse().unwrap(), b[8].parse().unwrap());
        assert!(al <= bl);
        assert!(!t[9].is_empty() && a[9].is_empty());
    }
    let h = rows(&std::fs::read(&hist).unwrap());
    assert_eq!(h.iter().map(|r| r[1].parse::<usize>().unwrap()).sum::<usize>(), 20);
}

#[test]
fn bench_rows_do_not_depend_on_worker_count() {
    let args = [
        "bench", "--methods", "absm,atro,bvn,mcf", "--gen", "full-mesh:5:8", "--gen", "full-mesh:6:8",
        "--traffic", "gravity:50", "--traffic", "ai:3:4", "--seeds", "3",
    ];
    let strip = |out: &Output| -> Vec<Vec<String>> {
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        rows(&out.stdout)
            .iter()
            .map(|r| r.iter().enumerate().filter(|(i, _)| *i != 7).map(|(_, v)| v.to_string()).collect())
            .collect()
    };
    let one = strip(&tro_env(&args, "TRO_WORKERS", "1"));
    let four = strip(&tro_env(&args, "TRO_WORKERS", "4"));
    assert_eq!(one.len(), 2 * 2 * 3 * 4);
    assert_eq!(one, four);
    assert_eq!(tro_env(&args, "TRO_WORKERS", "zero").status.code(), Some(2));
}

#[test]
fn bench_errors_have_distinct_exit_codes() {
    let base = ["bench", "--gen", "full-mesh:4:6", "--traffic", "gravity:100"];
    let code = |extra: &[&str]| {
        let mut a = base.to_vec();
        a.extend_from_slice(extra);
        tro(&a).status.code()
    };
    assert_eq!(code(&["--methods", "brute"]), Some(2));
    assert_eq!(code(&["--methods", "milp"]), Some(2));
    let out = tro(&["bench", "--gen", "full-mesh:5:6", "--traffic", "gravity:100", "--methods", "brute", "--allow-brute"]);
    assert_eq!(out.status.code(), Some(7));
}

#[test]
fn input_errors_map_to_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = format!("csv:{}", write(dir.path(), "bad.csv", "i,j,value\n0,0,1\n"));
    assert_eq!(tro(&["to", "--gen", "full-mesh:3:4", "--traffic", &bad]).status.code(), Some(3));
    assert_eq!(tro(&["to", "--gen", "ring:3", "--traffic", "gravity:1"]).status.code(), Some(2));
    assert_eq!(tro(&["to", "--gen", "full-mesh:4:2", "--traffic", "gravity:100"]).status.code(), Some(4));
    let missing = format!("csv:{}", dir.path().join("nope.csv").display());
    assert_eq!(tro(&["to", "--gen", "full-mesh:3:4", "--traffic", &missing]).status.code(), Some(3));
}
