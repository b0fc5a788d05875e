use std::path::PathBuf;
use std::process::{Command, Output};

fn mathbench(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mathbench")).args(args).output().expect("binary runs")
}

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures").join(name)
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn convert_emits_parallel_markup() {
    let o = mathbench(&["convert", r"\zeta(s)=0"]);
    assert!(o.status.success());
    let xml = stdout(&o);
    assert!(xml.starts_with("<math"));
    assert!(xml.contains("annotation-xml") && xml.contains("Q187235"));

    let o = mathbench(&["convert", "--no-content", "x^2"]);
    assert!(o.status.success());
    assert!(!stdout(&o).contains("annotation-xml"));
}

#[test]
fn convert_rejects_bad_input() {
    let o = mathbench(&["convert", ""]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("empty input"));
    assert_eq!(mathbench(&["convert", "{x"]).status.code(), Some(2));
    assert!(!mathbench(&["convert", "x", "--refine", "bogus"]).status.success());
}

#[test]
fn convert_uses_context() {
    let dir = tempfile::tempdir().unwrap();
    let ctx = dir.path().join("ctx.txt");
    std::fs::write(&ctx, "Let $g(t)$ be the function describing the growth.").unwrap();
    let with = stdout(&mathbench(&["convert", "g(t)", "--context", ctx.to_str().unwrap()]));
    let without = stdout(&mathbench(&["convert", "g(t)"]));
    assert_ne!(with, without);
    assert!(without.contains("<times "));
    assert!(!with.contains("<times "));
}

#[test]
fn eval_then_report() {
    let dir = tempfile::tempdir().unwrap();
    let results = dir.path().join("results.jsonl");
    let gold = fixture("gold.jsonl");
    let o = mathbench(&["eval", "--gold", gold.to_str().unwrap(), "--out", results.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let lines = std::fs::read_to_string(&results).unwrap();
    assert_eq!(lines.lines().count(), 48);

    let out = dir.path().join("report");
    let o = mathbench(&["report", results.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    let summary = stdout(&o);
    assert!(summary.contains("gold,24,24,0.000000,0.000000,24"), "{summary}");
    assert_eq!(std::fs::read_to_string(out.join("summary.csv")).unwrap(), summary);
    assert!(out.join("plot.csv").exists() && out.join("timing.csv").exists());
}

#[test]
fn eval_with_adapters() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("adapters.toml");
    std::fs::write(&cfg, "[[adapter]]\nname = \"broken\"\ncommand = [\"sh\", \"-c\", \"exit 1\"]\n").unwrap();
    let gold = fixture("functions.jsonl");
    let o = mathbench(&["eval", "--gold", gold.to_str().unwrap(), "--adapters", cfg.to_str().unwrap()]);
    assert!(o.status.success());
    let text = stdout(&o);
    let broken: Vec<&str> = text.lines().filter(|l| l.contains("\"broken\"")).collect();
    assert_eq!(broken.len(), 10);
    assert!(broken.iter().all(|l| l.contains("\"success\":false")));
}
