use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn netpred(args: &[&str], workers: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_netpred"));
    cmd.args(args);
    if let Some(w) = workers {
        cmd.env("NETPRED_WORKERS", w);
    }
    cmd.output().expect("binary runs")
}

fn ok(args: &[&str]) -> Output {
    let out = netpred(args, None);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    out
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

/// Every file under `dir` except the metadata sidecar.
fn snapshot(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    let mut out = BTreeMap::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for entry in fs::read_dir(&d).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                stack.push(path);
            } else if path.file_name().unwrap() != "meta.json" {
                out.insert(path.strip_prefix(dir).unwrap().display().to_string(), fs::read(&path).unwrap());
            }
        }
    }
    out
}

fn generate(dir: &Path, problem: &str, family: &str, seed: &str) {
    ok(&["gen", "--family", family, "--problem", problem, "--vertices", "7", "--requests", "5", "--seed", seed, "--out", p(dir)]);
}

fn run_args<'a>(g: &'a Path, out: &'a Path, problem: &'a str) -> Vec<&'a str> {
    let inst = g.join("instance.json");
    let req = g.join("requests.json");
    let (inst, req) = (Box::leak(Box::new(inst)), Box::leak(Box::new(req)));
    vec![
        "run", "--problem", problem, "--instance", p(inst), "--requests", p(req), "--drop-rates", "0,0.4", "--add-rates",
        "0,0.5", "--radii", "0,3", "--repetitions", "2", "--seed", "11", "--out", p(out),
    ]
}

#[test]
fn runs_are_byte_identical_across_repeats_and_worker_counts() {
    let tmp = tempfile::tempdir().unwrap();
    let g = tmp.path().join("g");
    generate(&g, "st", "random", "4");
    let out = tmp.path().join("run");
    let args = run_args(&g, &out, "st");
    let first = netpred(&args, Some("1"));
    assert!(first.status.success(), "{}", String::from_utf8_lossy(&first.stderr));
    let a = snapshot(&out);
    fs::remove_dir_all(&out).unwrap();
    assert!(netpred(&args, Some("3")).status.success());
    let b = snapshot(&out);
    assert_eq!(a.keys().collect::<Vec<_>>(), b.keys().collect::<Vec<_>>());
    assert!(a == b, "outputs differ between runs");
    assert!(a.contains_key("runs.csv") && a.contains_key("config.json"));
    assert!(out.join("meta.json").is_file());
}

#[test]
fn generation_is_deterministic() {
    let tmp = tempfile::tempdir().unwrap();
    for family in ["random", "geometric", "star", "path"] {
        let (a, b) = (tmp.path().join(format!("{family}-a")), tmp.path().join(format!("{family}-b")));
        generate(&a, "fl", family, "9");
        generate(&b, "fl", family, "9");
        assert_eq!(snapshot(&a), snapshot(&b), "{family}");
    }
}

#[test]
fn engine_only_matches_empty_prediction_framework() {
    let tmp = tempfile::tempdir().unwrap();
    for (problem, seed) in [("st", "1"), ("sf", "2"), ("fl", "3"), ("cfl", "4"), ("psf", "5")] {
        let g = tmp.path().join(problem);
        generate(&g, problem, "random", seed);
        let out = tmp.path().join(format!("{problem}-run"));
        ok(&[
            "run",
            "--problem",
            problem,
            "--instance",
            p(&g.join("instance.json")),
            "--requests",
            p(&g.join("requests.json")),
            "--out",
            p(&out),
        ]);
        let runs = fs::read_to_string(out.join("runs.csv")).unwrap();
        let mut rd = csv::Reader::from_reader(runs.as_bytes());
        let h = rd.headers().unwrap().clone();
        let col = |n: &str| h.iter().position(|x| x == n).unwrap();
        let rec = rd.records().next().unwrap().unwrap();
        assert_eq!(&rec[col("source")], "none");
        assert_eq!(rec[col("framework_cost")], rec[col("engine_cost")], "{problem}");
    }
}

#[test]
fn zero_perturbation_reproduces_the_requests() {
    let tmp = tempfile::tempdir().unwrap();
    let g = tmp.path().join("g");
    generate(&g, "sf", "random", "6");
    let preds = tmp.path().join("p.json");
    ok(&["perturb", "--instance", p(&g.join("instance.json")), "--requests", p(&g.join("requests.json")), "--out", p(&preds)]);
    let reqs: Vec<serde_json::Value> = serde_json::from_str(&fs::read_to_string(g.join("requests.json")).unwrap()).unwrap();
    let set: serde_json::Value = serde_json::from_str(&fs::read_to_string(&preds).unwrap()).unwrap();
    let mut demands: Vec<String> = reqs
        .into_iter()
        .map(|mut r| {
            r.as_object_mut().unwrap().remove("arrival_index");
            r.to_string()
        })
        .collect();
    let mut items: Vec<String> = set.as_array().unwrap().iter().map(|v| v.to_string()).collect();
    demands.sort();
    items.sort();
    assert_eq!(demands, items);
}

#[test]
fn disjoint_sets_have_one_unmatched_point() {
    let tmp = tempfile::tempdir().unwrap();
    let g = tmp.path().join("g");
    ok(&["gen", "--family", "path", "--problem", "st", "--vertices", "6", "--requests", "0", "--out", p(&g)]);
    let req = tmp.path().join("r.json");
    let pred = tmp.path().join("p.json");
    fs::write(&req, r#"[{"arrival_index":0,"terminal":1},{"arrival_index":1,"terminal":2}]"#).unwrap();
    fs::write(&pred, r#"[{"terminal":4},{"terminal":5},{"terminal":3}]"#).unwrap();
    let out = ok(&["error", "--instance", p(&g.join("instance.json")), "--requests", p(&req), "--predictions", p(&pred)]);
    let text = String::from_utf8(out.stdout).unwrap();
    let unmatched: Vec<&str> = text.lines().filter(|l| l.ends_with(",0")).collect();
    assert_eq!(unmatched.len(), 1, "{text}");
    assert!(unmatched[0].starts_with("5,0"), "{text}");
}

#[test]
fn malformed_files_fail_with_line_anchored_diagnostics() {
    let tmp = tempfile::tempdir().unwrap();
    let g = tmp.path().join("g");
    generate(&g, "st", "random", "1");
    let bad = tmp.path().join("bad.json");
    fs::write(&bad, "[\n  {\"arrival_index\": 0,\n    \"terminal\": }\n]\n").unwrap();
    let out = netpred(&["perturb", "--instance", p(&g.join("instance.json")), "--requests", p(&bad), "--out", p(&tmp.path().join("x.json"))], None);
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains(&format!("{}:3:", bad.display())), "{err}");
}

#[test]
fn verify_selects_modules_and_rejects_unknown_names() {
    let out = ok(&["verify", "graph-core"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().filter(|l| l.contains(" PASS ")).count(), 4, "{text}");
    let bad = netpred(&["verify", "no-such-suite"], None);
    assert!(!bad.status.success());
}

#[test]
fn report_writes_aggregate_and_plots() {
    let tmp = tempfile::tempdir().unwrap();
    let g = tmp.path().join("g");
    generate(&g, "fl", "random", "8");
    let out = tmp.path().join("run");
    ok(&run_args(&g, &out, "fl"));
    ok(&["report", p(&out)]);
    for f in ["aggregate.csv", "ratio_vs_delta.svg", "ratio_vs_d.svg", "frontier.svg"] {
        assert!(out.join("report").join(f).is_file(), "{f}");
    }
    let agg = fs::read_to_string(out.join("report/aggregate.csv")).unwrap();
    // 2 x 2 x 2 perturbation groups
    assert_eq!(agg.lines().count(), 9, "{agg}");
}

#[test]
fn adversary_families_generate() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path().join("d");
    ok(&["gen", "--family", "diamond", "--problem", "st", "--depth", "2", "--out", p(&d)]);
    let reqs: Vec<serde_json::Value> = serde_json::from_str(&fs::read_to_string(d.join("requests.json")).unwrap()).unwrap();
    assert_eq!(reqs.len(), 4);
    assert!(d.join("transcript.csv").is_file());
    let f = tmp.path().join("f");
    ok(&["gen", "--family", "fotakis", "--problem", "fl", "--m", "2", "--out", p(&f)]);
    let n = tmp.path().join("n");
    ok(&["gen", "--family", "nk-delta", "--problem", "st", "--out", p(&n)]);
    assert!(n.join("predictions.json").is_file());
    let wrong = netpred(&["gen", "--family", "diamond", "--problem", "fl", "--out", p(&tmp.path().join("w"))], None);
    assert!(!wrong.status.success());
}
