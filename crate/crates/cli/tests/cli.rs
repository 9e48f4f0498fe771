use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_oscbound"))
}

fn config(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn pair_on_sum_of_squares() {
    let c = config("sum_of_squares5.toml");
    let o = run(&["pair", c.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(stdout(&o).trim(), "(1, 2)");
}

#[test]
fn missing_config_is_a_usage_error() {
    let o = run(&["classify", "/nonexistent/problem.toml"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["sweep"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["no-such-command"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn malformed_config_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("bad.toml");
    std::fs::write(&p, "polynomial = \"x1^2\"\nn = 1\n").unwrap();
    assert_eq!(run(&["classify", p.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn classify_reports_case_two() {
    let c = config("quadric_case2.toml");
    let o = run(&["classify", c.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["report"]["case_label"], "CaseII");
    assert_eq!(v["pair"], serde_json::json!([1, 2]));
    assert!(v["report"]["m0"].as_f64().unwrap() > 1.3);
}

#[test]
fn not_applicable_point_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("flat.toml");
    // G for the pair (1, 2) of x1 x2 x3 vanishes identically
    std::fs::write(
        &p,
        "polynomial = \"x1*x2*x3\"\nn = 3\ndim_v_star = 1\npair = [1, 2]\nx0 = [0.3, 0.4, 0.5]\ndelta = 0.05\n[weight]\ndelta0 = 0.04\n",
    )
    .unwrap();
    assert_eq!(run(&["classify", p.to_str().unwrap()]).status.code(), Some(1));
}

#[test]
fn certificate_and_morse_checks_pass() {
    for name in ["quadric_case2.toml", "cross_case1.toml"] {
        let c = config(name);
        let o = run(&["certify-ift", c.to_str().unwrap(), "--pairs", "200", "--targets", "20"]);
        assert_eq!(o.status.code(), Some(0), "{name}");
        let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
        assert_eq!(v["report"].as_array().unwrap().len(), 2);
        let o = run(&["morse-check", c.to_str().unwrap(), "--samples", "200"]);
        assert_eq!(o.status.code(), Some(0), "{name}");
        let o = run(&["critpoint", c.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0));
        assert!(stdout(&o).contains("Found"));
    }
}

#[test]
fn critpoint_with_explicit_t() {
    let c = config("quadric_case2.toml");
    let o = run(&["critpoint", c.to_str().unwrap(), "--tau", "10", "--t", "-1e3,2e3"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let o = run(&["critpoint", c.to_str().unwrap(), "--tau", "10"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn vdc_and_fresnel_commands() {
    let c = config("quadric_case2.toml");
    let o = run(&["vdc-check", c.to_str().unwrap(), "--trials", "20", "--seed", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["report"]["violations_i"], 0);
    let o = run(&["fresnel", c.to_str().unwrap(), "--tau", "10:1e3:log5"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let slope = v["report"]["slope"].as_f64().unwrap();
    assert!((slope + 0.5).abs() < 0.05, "{slope}");
}

#[test]
fn sweep_writes_report_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("quadric.json");
    let c = config("quadric_case2.toml");
    let args = [
        "sweep",
        c.to_str().unwrap(),
        "--tau",
        "1:1e3:log8",
        "--tmax-mult",
        "10",
        "--out",
        out.to_str().unwrap(),
    ];
    let o = run(&args);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&out).unwrap();
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert!(v["c_hat"].as_f64().unwrap() > 0.0);
    let tally: u64 = v["branch_tally"].as_object().unwrap().values().map(|x| x.as_u64().unwrap()).sum();
    assert_eq!(tally, 8 * 81);
    let csv = std::fs::read_to_string(dir.path().join("quadric.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "tau,t1,t2,t3,re,im,abs,ratio,branch");
    assert_eq!(lines.count(), 8 * 81);
    // same config and seed give byte-identical output
    let out2 = dir.path().join("again.json");
    let mut args2 = args;
    args2[7] = out2.to_str().unwrap();
    assert_eq!(run(&args2).status.code(), Some(0));
    assert_eq!(std::fs::read(&out).unwrap(), std::fs::read(&out2).unwrap());
}
