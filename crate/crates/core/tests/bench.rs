mod common;

use std::collections::BTreeSet;

use mathbench::bench::{
    parse_adapters, parse_gold, read_results, report, run_eval, write_report, write_results, AdapterConfig,
    BenchError, Converter, EvalResult, FormulaType, GoldEcho, InputMode, InternalConverter, Missing, Score,
    SubprocessAdapter, FUNCTIONS_FIXTURE, GOLD_FIXTURE,
};
use mathbench::latex::{parse_latex, print, MacroRegistry};
use mathbench::mathml::{emit, parse_mathml};
use mathbench::metrics::CostModel;
use mathbench::pipeline::ConvertOptions;

fn adapter(name: &str, script: &str, timeout: f64) -> Box<dyn Converter> {
    Box::new(SubprocessAdapter::new(AdapterConfig {
        name: name.into(),
        command: vec!["sh".into(), "-c".into(), script.into()],
        input_mode: InputMode::Stdin,
        timeout,
    }))
}

fn result(converter: &str, id: u32, p: Score, c: Score) -> EvalResult {
    EvalResult {
        entry_id: id,
        converter: converter.into(),
        presentation_distance: p,
        content_distance: c,
        wall_time: 0.25,
        success: p.value().is_some(),
        error: None,
    }
}

#[test]
fn bundled_fixtures_load() {
    let gold = parse_gold(GOLD_FIXTURE).unwrap();
    assert!(gold.len() >= 20);
    let types: BTreeSet<FormulaType> = gold.iter().map(|e| e.record.formula_type).collect();
    assert_eq!(types.len(), 4);
    assert!(gold.windows(2).all(|w| w[0].id() < w[1].id()));
    let functions = parse_gold(FUNCTIONS_FIXTURE).unwrap();
    assert!(functions.iter().filter(|e| e.record.context.is_some()).count() >= functions.len() - 1);
}

#[test]
fn fixture_tex_and_markup_round_trip() {
    let reg = MacroRegistry::standard();
    for e in parse_gold(GOLD_FIXTURE).unwrap().into_iter().chain(parse_gold(FUNCTIONS_FIXTURE).unwrap()) {
        for tex in [&e.record.original_tex, &e.record.corrected_tex, &e.record.semantic_tex] {
            let t = parse_latex(tex, &reg).unwrap();
            assert_eq!(parse_latex(&print(&t, &reg), &reg).unwrap(), t, "entry {}: {tex}", e.id());
        }
        let xml = emit(&e.gold);
        assert_eq!(parse_mathml(&xml).unwrap(), e.gold, "entry {}", e.id());
        assert_eq!(&xml, e.record.gold_mathml.as_ref().unwrap());
    }
}

#[test]
fn gold_file_errors() {
    assert!(parse_gold("").unwrap().is_empty());
    assert!(parse_gold("\n\n").unwrap().is_empty());
    let line = GOLD_FIXTURE.lines().next().unwrap();
    let mut rec: serde_json::Value = serde_json::from_str(line).unwrap();
    rec["gold_mathml"] = "<html/>".into();
    let id = rec["id"].as_u64().unwrap() as u32;
    match parse_gold(&rec.to_string()) {
        Err(BenchError::Parse { id: got, .. }) => assert_eq!(got, id),
        other => panic!("{other:?}"),
    }
    let dup = format!("{line}\n{line}\n");
    assert!(matches!(parse_gold(&dup), Err(BenchError::DuplicateId(_))));
    assert!(matches!(parse_gold("{\"id\": 1}"), Err(BenchError::Schema { line: 1, .. })));
    rec["surprise"] = 1.into();
    assert!(matches!(parse_gold(&rec.to_string()), Err(BenchError::Schema { .. })));
}

#[test]
fn gold_echo_scores_zero_and_runs_are_deterministic() {
    let gold = parse_gold(GOLD_FIXTURE).unwrap();
    let convs: Vec<Box<dyn Converter>> =
        vec![Box::new(InternalConverter::new("internal", ConvertOptions::default())), Box::new(GoldEcho)];
    let cm = CostModel::parse("1,1,0").unwrap();
    let a = run_eval(&gold, &convs, &cm, &[], 4).unwrap();
    let b = run_eval(&gold, &convs, &cm, &[], 1).unwrap();
    assert_eq!(a.len(), 2 * gold.len());
    assert_eq!(a[0].converter, "gold");
    for r in a.iter().filter(|r| r.converter == "gold") {
        assert!(r.success);
        assert_eq!(r.presentation_distance, Score::Value(0.0));
        assert_eq!(r.content_distance, Score::Value(0.0));
    }
    let strip = |rs: &[EvalResult]| rs.iter().map(|r| (r.entry_id, r.converter.clone(), r.content_distance)).collect::<Vec<_>>();
    assert_eq!(strip(&a), strip(&b));
    assert_eq!(report(&a).unwrap().summary_csv().unwrap(), report(&b).unwrap().summary_csv().unwrap());
}

#[test]
fn crashing_and_hanging_adapters_fail_cleanly() {
    let gold = parse_gold(GOLD_FIXTURE).unwrap();
    let few = &gold[..3];
    let convs = vec![adapter("crash", "exit 3", 5.0), adapter("sleepy", "sleep 5", 0.5), adapter("junk", "echo '<p/>'", 5.0)];
    let started = std::time::Instant::now();
    let res = run_eval(few, &convs, &CostModel::default(), &[], 3).unwrap();
    assert!(started.elapsed().as_secs_f64() < 4.0);
    assert_eq!(res.len(), 9);
    for r in &res {
        assert!(!r.success, "{r:?}");
        assert_eq!(r.content_distance, Score::Missing(Missing::Failure));
        assert!(r.error.is_some());
    }
    let rep = report(&res).unwrap();
    assert!(rep.rows.iter().all(|row| row.successes == 0 && row.mean_presentation.is_none()));
}

#[test]
fn echo_adapter_reads_stdin() {
    let gold = parse_gold(GOLD_FIXTURE).unwrap();
    let e = &gold[0];
    let xml = emit(&e.gold).replace('\'', "'\\''");
    let conv = adapter("cat", &format!("cat >/dev/null; printf '%s' '{xml}'"), 5.0);
    let res = run_eval(std::slice::from_ref(e), &[conv], &CostModel::default(), &[], 1).unwrap();
    assert!(res[0].success, "{:?}", res[0].error);
    assert_eq!(res[0].presentation_distance, Score::Value(0.0));
    let arg = SubprocessAdapter::new(AdapterConfig {
        name: "arg".into(),
        command: vec!["printf".into(), "<math><mi>%s</mi></math>".into()],
        input_mode: InputMode::Arg,
        timeout: 5.0,
    });
    assert_eq!(arg.run("x").unwrap(), "<math><mi>x</mi></math>");
}

#[test]
fn report_means_and_files() {
    let v = Score::Value;
    let absent = Score::Missing(Missing::Absent);
    let fail = Score::Missing(Missing::Failure);
    let results = vec![
        result("b", 1, v(0.0), v(0.0)),
        result("b", 2, v(2.0), absent),
        result("b", 3, v(4.0), v(3.0)),
        result("a", 1, fail, fail),
        result("a", 2, v(1.0), v(1.0)),
    ];
    let rep = report(&results).unwrap();
    assert_eq!(rep.rows.iter().map(|r| r.converter.as_str()).collect::<Vec<_>>(), ["a", "b"]);
    let b = &rep.rows[1];
    assert_eq!(b.mean_presentation, Some(2.0));
    assert_eq!(b.mean_content, Some(1.5));
    assert_eq!(b.content_scored, 2);
    assert!((b.total_wall_time - 0.75).abs() < 1e-12);
    assert_eq!(rep.rows[0].successes, 1);
    assert_eq!(rep.rows[0].mean_presentation, Some(1.0));

    let csv = rep.summary_csv().unwrap();
    assert!(csv.starts_with("converter,entries,successes,"));
    assert!(csv.contains("b,3,3,2.000000,1.500000,2"));
    assert!(matches!(report(&[]), Err(BenchError::EmptyResults)));

    let dir = tempfile::tempdir().unwrap();
    write_report(&results, dir.path()).unwrap();
    for f in ["summary.csv", "timing.csv", "plot.csv"] {
        assert!(dir.path().join(f).exists());
    }
    let timing = std::fs::read_to_string(dir.path().join("timing.csv")).unwrap();
    assert!(timing.contains("b,0.750000,0.250000"));

    let text = write_results(&results).unwrap();
    assert!(text.contains("\"failure\"") && text.contains("\"absent\""));
    assert_eq!(read_results(&text).unwrap(), results);
}

#[test]
fn adapter_files_are_validated() {
    let ok = parse_adapters(
        r#"
[[adapter]]
name = "tool"
command = ["tool", "--mathml"]

[[adapter]]
name = "other"
command = ["other", "{tex}"]
input_mode = "arg"
timeout = 2.5
"#,
    )
    .unwrap();
    assert_eq!(ok.len(), 2);
    assert_eq!(ok[0].timeout, 30.0);
    assert_eq!(ok[1].input_mode, InputMode::Arg);
    assert!(parse_adapters("").unwrap().is_empty());
    for bad in [
        "[[adapter]]\nname = \"a\"\ncommand = []\n",
        "[[adapter]]\nname = \"a\"\ncommand = [\"x\"]\ntimeout = 0\n",
        "[[adapter]]\nname = \"a\"\ncommand = [\"x\"]\n[[adapter]]\nname = \"a\"\ncommand = [\"y\"]\n",
        "[[adapter]]\nname = \"a\"\ncommand = [\"x\"]\ncolour = 1\n",
        "[[adapter]]\nname = \"a\"\ncommand = [\"x\"]\ninput_mode = \"pipe\"\n",
    ] {
        assert!(matches!(parse_adapters(bad), Err(BenchError::Adapter(_))), "{bad}");
    }
}
