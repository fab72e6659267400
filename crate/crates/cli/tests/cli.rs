use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use metriclat_core::generators::divisor_lattice;
use serde_json::Value;
use tempfile::TempDir;

struct Files {
    dir: TempDir,
}

impl Files {
    fn new() -> Self {
        Files { dir: TempDir::new().unwrap() }
    }

    fn put(&self, name: &str, body: &str) -> PathBuf {
        let path = self.dir.path().join(name);
        std::fs::write(&path, body).unwrap();
        path
    }
}

fn run(args: &[&dyn AsRef<std::ffi::OsStr>]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_metriclat")).args(args.iter().map(|a| a.as_ref())).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap()
}

const SETS: &str = r#"{"kind":"subsets","ground":[1,2,3],"generators":[[2],[3]],"include_ground":true}"#;
const KAPPA: &str = r#"{"kind":"ultravaluation","kappa":{"1":"1","2":"2","3":"3"}}"#;
const GRID_SUB: &str = r#"{"kind":"sublattice","of":{"kind":"grid","heights":[3,2]},
    "elements":["(0,0)","(1,0)","(0,1)","(1,1)","(2,2)"]}"#;
const SUP: &str = r#"{"kind":"builtin","name":"sup"}"#;

fn strings(v: &Value) -> Vec<String> {
    v.as_array().unwrap().iter().map(|s| s.as_str().unwrap().to_string()).collect()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

#[test]
fn validate_reports_distributivity() {
    let f = Files::new();
    let o = run(&[&"validate", &f.put("s.json", SETS)]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).starts_with("lattice: ok, distributive: yes, 5 elements\n"));
    let m3 = f.put("m3.json", r#"{"kind":"explicit","n":5,"leq":[[0,1],[0,2],[0,3],[1,4],[2,4],[3,4]]}"#);
    let o = run(&[&"validate", &m3]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("distributive: no"));
}

#[test]
fn exit_codes() {
    let f = Files::new();
    let malformed = run(&[&"validate", &f.put("bad.json", "{\"kind\": \"divisors\",\n  \"n\": }")]);
    assert_eq!(code(&malformed), 1);
    assert!(String::from_utf8_lossy(&malformed.stderr).contains("bad.json:2:"));
    let unknown = run(&[&"validate", &f.put("u.json", r#"{"kind":"divisors","n":12,"m":1}"#)]);
    assert_eq!(code(&unknown), 1);
    let float =
        run(&[&"validate", &f.put("f.json", r#"{"kind":"lipschitz","points":["a"],"dist":[[0]],"step":0.5,"max":1}"#)]);
    assert_eq!(code(&float), 1);
    let vee = f.put("vee.json", r#"{"kind":"explicit","n":3,"leq":[[0,1],[0,2]]}"#);
    assert_eq!(code(&run(&[&"validate", &vee])), 2);
    let div = f.put("d.json", r#"{"kind":"divisors","n":12}"#);
    let short = f.put("v.json", r#"{"kind":"valuation","values":["0","1"]}"#);
    assert_eq!(code(&run(&[&"analyze", &div, &short])), 3);
    assert_eq!(code(&run(&[&"analyze", &div, &f.put("k.json", KAPPA)])), 3);
    assert_eq!(code(&run(&[&"nonsense"])), 1);
}

#[test]
fn analyze_finds_the_non_irreducible_top() {
    let f = Files::new();
    let o = run(&[&"--json", &"analyze", &f.put("s.json", SETS), &f.put("k.json", KAPPA)]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(strings(&v["mli"]), ["{}", "{2}", "{3}"]);
    let top = v["elements"].as_array().unwrap().iter().find(|e| e["element"] == "{1,2,3}").unwrap();
    assert_eq!(top["join_irreducible"], true);
    assert_eq!(top["d_irreducible"], false);
    assert_eq!(strings(&top["witness"]), ["{2}", "{3}"]);
}

#[test]
fn analyze_grid_sublattice_under_sup() {
    let f = Files::new();
    let o = run(&[&"--json", &"analyze", &f.put("g.json", GRID_SUB), &f.put("m.json", SUP)]);
    assert_eq!(strings(&json(&o)["mli"]), ["(0,0)", "(0,1)", "(1,0)"]);
}

#[test]
fn discrete_metric_irreducibles_are_join_irreducibles() {
    let f = Files::new();
    let disc = f.put("m.json", r#"{"kind":"builtin","name":"discrete"}"#);
    for n in [12u64, 30, 36] {
        let l = f.put("d.json", &format!(r#"{{"kind":"divisors","n":{n}}}"#));
        let got: BTreeSet<String> =
            strings(&json(&run(&[&"--json", &"analyze", &l, &disc]))["mli"]).into_iter().collect();
        let dl = divisor_lattice(n).unwrap();
        let lat = dl.lattice();
        let expected: BTreeSet<String> = lat
            .elements()
            .filter(|&p| lat.elements().all(|a| lat.elements().all(|b| lat.join(a, b) != p || a == p || b == p)))
            .map(|p| lat.label(p).to_string())
            .collect();
        assert_eq!(got, expected, "n = {n}");
    }
}

#[test]
fn check_exit_status_follows_the_laws() {
    let f = Files::new();
    let div = f.put("d.json", r#"{"kind":"divisors","n":12}"#);
    let omega = f.put("o.json", r#"{"kind":"valuation","values":{"1":0,"2":1,"3":1,"4":2,"6":2,"12":3}}"#);
    let o = run(&[&"check", &div, &omega]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert!(stdout(&o).contains("all laws hold"));

    let chain = f.put("c.json", r#"{"kind":"explicit","n":3,"leq":[[0,1],[1,2]],"labels":["a","b","c"]}"#);
    let bad = f.put("b.json", r#"{"kind":"metric","d":[[0,2,1],[2,0,3],[1,3,0]]}"#);
    let o = run(&[&"check", &chain, &bad]);
    assert_eq!(code(&o), 4);
    assert!(stdout(&o).contains("left cut law fails at f=c g=a h=b"));

    let two = f.put(
        "t.json",
        r#"{"kind":"lipschitz","points":["a","b"],"dist":[[0,3],[3,0]],"step":1,"max":3,"basepoint":"a"}"#,
    );
    let lc = f.put("lc.json", r#"{"kind":"builtin","name":"lipschitz-constant"}"#);
    let o = run(&[&"--json", &"check", &two, &lc]);
    assert_eq!(code(&o), 4);
    let checks = json(&o)["checks"].as_array().unwrap().clone();
    let rep = checks.iter().find(|c| c["check"] == "intervaluation representation").unwrap();
    assert_eq!(rep["status"], "fail");
    for name in ["sup", "peak", "l1"] {
        let m = f.put("m.json", &format!(r#"{{"kind":"builtin","name":"{name}"}}"#));
        assert_eq!(code(&run(&[&"check", &two, &m])), 0, "{name}");
    }
}

#[test]
fn bases() {
    let f = Files::new();
    let o = run(&[&"--json", &"bases", &f.put("g.json", GRID_SUB), &f.put("m.json", SUP), &"--r", &"0"]);
    assert!(strings(&json(&o)["base"]).contains(&"(2,2)".to_string()));

    let chain = f.put("c.json", r#"{"kind":"explicit","n":4,"leq":[[0,1],[1,2],[2,3]]}"#);
    let o = run(&[&"--json", &"bases", &chain, &f.put("x.json", r#"{"kind":"builtin","name":"discrete"}"#)]);
    assert_eq!(strings(&json(&o)["base"]), ["0", "1", "2", "3"]);

    // on a path a-b-c every function is the join of the cones under it
    let lip = f.put(
        "l.json",
        r#"{"kind":"lipschitz","points":["a","b","c"],"dist":[[0,1,2],[1,0,1],[2,1,0]],"step":1,"max":2}"#,
    );
    let o = run(&[&"--json", &"bases", &lip, &f.put("m.json", SUP)]);
    let v = json(&o);
    assert_eq!(v["covered"], true);
    assert_eq!(strings(&v["base"]), ["(0,0,0)", "(0,0,1)", "(0,1,0)", "(1,0,0)", "(0,1,2)", "(2,1,0)", "(1,2,1)"]);
    assert_eq!(code(&run(&[&"bases", &lip, &f.put("m.json", SUP), &"--r", &"-1"])), 1);
}

#[test]
fn puzzle_table() {
    let f = Files::new();
    let o = run(&[&"--json", &"puzzle", &f.put("s.json", SETS)]);
    let v = json(&o);
    assert_eq!(v["agreement"], 5);
    let rows = v["rows"].as_array().unwrap();
    let top = rows.iter().find(|r| r["member"] == "{1,2,3}").unwrap();
    assert_eq!((top["criterion"].clone(), top["brute_force"].clone()), (false.into(), false.into()));
    for r in rows.iter().filter(|r| r["member"] == "{2}" || r["member"] == "{3}") {
        assert_eq!((r["criterion"].clone(), r["brute_force"].clone()), (true.into(), true.into()));
    }
    let named = f.put("n.json", r#"{"kind":"subsets","ground":["x","y"],"generators":[["x"]],"include_ground":true}"#);
    assert_eq!(code(&run(&[&"puzzle", &named])), 3);
    assert_eq!(code(&run(&[&"puzzle", &f.put("d.json", r#"{"kind":"divisors","n":12}"#)])), 3);
}

#[test]
fn output_is_deterministic() {
    let f = Files::new();
    let (l, m) = (f.put("g.json", GRID_SUB), f.put("m.json", SUP));
    for args in [vec!["analyze"], vec!["--json", "analyze"], vec!["check"]] {
        let go = |threads: &str| {
            let mut a: Vec<&dyn AsRef<std::ffi::OsStr>> =
                args.iter().map(|s| s as &dyn AsRef<std::ffi::OsStr>).collect();
            a.extend([&"--threads" as &dyn AsRef<std::ffi::OsStr>, &threads, &l as &dyn AsRef<std::ffi::OsStr>, &m]);
            run(&a).stdout
        };
        assert_eq!(go("1"), go("3"));
    }
    let a = run(&[&"crosscheck", &"--count", &"15", &"--seed", &"9"]);
    let b = run(&[&"crosscheck", &"--count", &"15", &"--seed", &"9"]);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn shipped_data_files_parse() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data");
    let mut seen = 0;
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        let text = std::fs::read_to_string(&path).unwrap();
        let v: Value = serde_json::from_str(&text).unwrap();
        assert!(v["kind"].is_string(), "{}", path.display());
        seen += 1;
    }
    assert!(seen > 0);
}
