//! Acceptance suite: one PASS/FAIL line per criterion. Runs without the
//! libtest harness so the lines are always printed.

mod common;

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use mathbench::bench::{
    parse_gold, report, run_eval, AdapterConfig, Converter, EvalResult, GoldEcho, GoldEntry, InputMode,
    InternalConverter, Score, SubprocessAdapter, FUNCTIONS_FIXTURE, GOLD_FIXTURE,
};
use mathbench::content::{contentize, Annotations, RefinementConfig};
use mathbench::latex::{parse_latex, print, MacroRegistry};
use mathbench::mathml::{emit, parse_mathml};
use mathbench::metrics::{equivalence_rules, equivalence_zero_check, fraction_rules, ted, CostModel};
use mathbench::pipeline::{convert, ConvertOptions};
use mathbench::semantics::Lexicon;
use mathbench::ExprTree;
use rand::{Rng, SeedableRng};

const EQ1: &str = r"\zeta(s) = 0 \Rightarrow \Re s = \frac12 \lor \Im s = 0";

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(cond: bool, what: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(what())
    }
}

fn within(elapsed: Duration, limit: f64) -> Result<(), String> {
    check(elapsed.as_secs_f64() < limit, || format!("took {:.2}s, limit {limit}s", elapsed.as_secs_f64()))
}

fn content_of(tex: &str) -> Result<ExprTree, String> {
    let p = parse_latex(tex, &MacroRegistry::standard()).map_err(|e| e.to_string())?;
    let ann = Annotations::from_lexicon(&p, &Lexicon::bundled());
    contentize(&p, &ann, RefinementConfig::default()).map_err(|e| e.to_string())
}

fn gold(src: &str) -> Result<Vec<GoldEntry>, String> {
    parse_gold(src).map_err(|e| e.to_string())
}

fn eval_costs() -> CostModel {
    CostModel::parse("1,1,0").expect("valid cost model")
}

fn mean_content(results: &[EvalResult], converter: &str) -> Option<f64> {
    report(results).ok()?.rows.into_iter().find(|r| r.converter == converter)?.mean_content
}

fn token_accounting() -> Outcome {
    let started = Instant::now();
    let p = parse_latex(EQ1, &MacroRegistry::standard()).map_err(|e| e.to_string())?;
    let c = content_of(EQ1)?;
    let got = (p.token_count(), p.depth(), c.size(), c.height());
    within(started.elapsed(), 1.0)?;
    check(got == (18, 2, 16, 5), || format!("tokens/depth/content nodes/depth = {got:?}"))?;
    Ok("presentation 18 tokens depth 2, content 16 nodes depth 5".into())
}

fn shortcut_pricing() -> Outcome {
    let a = ExprTree::parse_term("Fraction(a, b)").map_err(|e| e.to_string())?;
    let b = ExprTree::parse_term("Times(a, Power(b, Minus(1)))").map_err(|e| e.to_string())?;
    let cm = CostModel::default();
    let plain = ted(&a, &b, &cm, &[]).map_err(|e| e.to_string())?;
    let short = ted(&a, &b, &cm, &fraction_rules()).map_err(|e| e.to_string())?;
    let expected = 3.0 * cm.insert + cm.rename;
    check((plain - expected).abs() <= 1e-9, || format!("without rules {plain}, expected {expected}"))?;
    check((short - cm.shortcut).abs() <= 1e-9, || format!("with rules {short}, expected {}", cm.shortcut))?;
    check(cm.shortcut < cm.rename && cm.rename < cm.insert, || "e<r<i violated".into())?;
    Ok(format!("3i+r = {plain}, shortcut = {short}"))
}

fn metric_axioms() -> Outcome {
    let started = Instant::now();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x7ed);
    let (ins, ren) = (1.0, 0.75);
    let cm = CostModel::new(ins, ins, ren, 0.5).map_err(|e| e.to_string())?;
    let d = |x: &ExprTree, y: &ExprTree| ted(x, y, &cm, &[]).expect("valid cost model");
    let pairs = 1200;
    for i in 0..pairs {
        let mut tree = || {
            let n = rng.gen_range(1..=6);
            common::random_tree(&mut rng, n)
        };
        let (a, b, c) = (tree(), tree(), tree());
        let ab = d(&a, &b);
        let oracle = common::oracle_ted(&a, &b, ins, ins, ren);
        check((ab - oracle).abs() <= 1e-9, || format!("pair {i}: {a} vs {b}: ted {ab}, oracle {oracle}"))?;
        check((ab - d(&b, &a)).abs() <= 1e-9, || format!("pair {i}: not symmetric"))?;
        check(ab <= d(&a, &c) + d(&c, &b) + 1e-9, || format!("pair {i}: triangle inequality fails"))?;
    }
    within(started.elapsed(), 60.0)?;
    Ok(format!("{pairs} random pairs agree with the brute-force oracle"))
}

fn structural_protocol() -> Outcome {
    let entries = gold(GOLD_FIXTURE)?;
    let refined = InternalConverter::new("refined", ConvertOptions::default());
    let plain = InternalConverter::new(
        "plain",
        ConvertOptions { refine: RefinementConfig::none(), ..Default::default() },
    );
    let convs: Vec<Box<dyn Converter>> = vec![Box::new(GoldEcho), Box::new(plain), Box::new(refined)];
    let results = run_eval(&entries, &convs, &eval_costs(), &[], 4).map_err(|e| e.to_string())?;
    let echo_zero = results
        .iter()
        .filter(|r| r.converter == "gold")
        .all(|r| r.presentation_distance == Score::Value(0.0) && r.content_distance == Score::Value(0.0));
    check(echo_zero, || "gold-vs-gold distance is not zero everywhere".into())?;
    let before = mean_content(&results, "plain").ok_or("no content scores without refinements")?;
    let after = mean_content(&results, "refined").ok_or("no content scores with refinements")?;
    check(before > 0.0, || format!("mean content distance without refinements is {before}"))?;
    check(after < before, || format!("refinements do not help: {before} -> {after}"))?;
    Ok(format!("{} entries; gold 0; mean content distance {before:.3} -> {after:.3}", entries.len()))
}

fn function_application() -> Outcome {
    let started = Instant::now();
    let entries = gold(FUNCTIONS_FIXTURE)?;
    check(entries.len() == 10, || format!("{} entries", entries.len()))?;
    let conv: Vec<Box<dyn Converter>> = vec![Box::new(InternalConverter::new("internal", ConvertOptions::default()))];
    let mut zero = BTreeSet::new();
    for cm in [eval_costs(), CostModel::default()] {
        let results = run_eval(&entries, &conv, &cm, &[], 4).map_err(|e| e.to_string())?;
        zero = results.iter().filter(|r| r.content_distance == Score::Value(0.0)).map(|r| r.entry_id).collect();
        check(zero == BTreeSet::from([1, 2, 3, 4]), || format!("entries at distance 0: {zero:?}"))?;
    }
    within(started.elapsed(), 10.0)?;
    Ok(format!("entries at content distance 0: {zero:?}"))
}

fn round_trips() -> Outcome {
    let reg = MacroRegistry::standard();
    let mut entries = gold(GOLD_FIXTURE)?;
    entries.extend(gold(FUNCTIONS_FIXTURE)?);
    let mut markups: Vec<String> = entries.iter().map(|e| emit(&e.gold)).collect();
    let listing = std::fs::read_to_string(common::fixture("riemann.xml")).map_err(|e| e.to_string())?;
    markups.push(listing.trim().to_string());
    for xml in &markups {
        let pm = parse_mathml(xml).map_err(|e| e.to_string())?;
        let first = emit(&pm);
        let again = parse_mathml(&first).map_err(|e| e.to_string())?;
        check(again == pm && emit(&again) == first, || format!("markup does not round-trip: {xml}"))?;
    }
    let mut sources = 0;
    for e in &entries {
        for tex in [&e.record.original_tex, &e.record.corrected_tex, &e.record.semantic_tex] {
            let t = parse_latex(tex, &reg).map_err(|err| format!("{tex}: {err}"))?;
            let printed = print(&t, &reg);
            let back = parse_latex(&printed, &reg).map_err(|err| format!("{printed}: {err}"))?;
            check(back == t && print(&back, &reg) == printed, || format!("{tex} is not a fixed point"))?;
            sources += 1;
        }
    }
    Ok(format!("{} markups, {sources} TeX sources", markups.len()))
}

fn equivalence_shortcut() -> Outcome {
    let a = content_of(r"a \left(\frac{b}{c} + \frac{d}{c}\right)")?;
    let b = content_of(r"\frac{a(b+d)}{c}")?;
    check(equivalence_zero_check(&a, &b, &equivalence_rules()), || format!("{a} and {b} are not at distance 0"))?;
    check(!equivalence_zero_check(&a, &b, &[]), || "distance 0 even without rules".into())?;
    Ok(format!("{a} ~ {b}"))
}

fn table_semantics() -> Outcome {
    let opts = ConvertOptions { tex_annotation: false, ..Default::default() };
    let cases = [
        (r"\commutator{a}{b}", "commutator", "Q2989763"),
        (r"\tensor{T}{i}{j}", "tensor", "Q188524"),
        (r"\adjoint{A}", "adjoint", "Q2051983"),
        (r"\transformation{x}", "transformation", "Q12202238"),
        (r"\degree{x}", "degree", "Q28390"),
        (r"\contraction{g}{3}", "contraction", "Q5165685"),
    ];
    let content = |tex: &str| -> Result<ExprTree, String> {
        convert(tex, None, &opts).map_err(|e| e.to_string())?.content.ok_or_else(|| format!("{tex}: no content"))
    };
    for (tex, head, qid) in cases {
        let c = content(tex)?;
        check(c.label == head && c.attr("symbol") == Some(qid), || format!("{tex} gives {c} ({:?})", c.attr("symbol")))?;
    }
    let heads: Vec<String> =
        [r"\commutator{a}{b}", r"\anticommutator{a}{b}", "[a,b]"].iter().map(|t| content(t).map(|c| c.label)).collect::<Result<_, _>>()?;
    check(heads == ["commutator", "anticommutator", "interval"], || format!("bracket heads {heads:?}"))?;
    Ok("six macros carry their items; commutator/anticommutator/interval distinct".into())
}

fn harness_robustness() -> Outcome {
    let entries = gold(GOLD_FIXTURE)?;
    let sh = |name: &str, script: &str, timeout: f64| -> Box<dyn Converter> {
        Box::new(SubprocessAdapter::new(AdapterConfig {
            name: name.into(),
            command: vec!["sh".into(), "-c".into(), script.into()],
            input_mode: InputMode::Stdin,
            timeout,
        }))
    };
    let run = || -> Result<(Vec<EvalResult>, String), String> {
        let convs = vec![sh("crash", "exit 3", 5.0), sh("sleepy", "sleep 5", 0.5), Box::new(GoldEcho) as Box<dyn Converter>];
        let results = run_eval(&entries[..4], &convs, &eval_costs(), &[], 8).map_err(|e| e.to_string())?;
        let summary = report(&results).and_then(|r| r.summary_csv()).map_err(|e| e.to_string())?;
        Ok((results, summary))
    };
    let started = Instant::now();
    let (first, summary) = run()?;
    let (second, summary_again) = run()?;
    check(first.len() == 12, || format!("{} rows", first.len()))?;
    let failed = first.iter().filter(|r| r.converter != "gold").all(|r| !r.success && r.error.is_some());
    check(failed, || "an adapter row is marked successful".into())?;
    check(first.iter().filter(|r| r.converter == "gold").all(|r| r.success), || "gold rows failed".into())?;
    let key = |rs: &[EvalResult]| rs.iter().map(|r| (r.converter.clone(), r.entry_id, r.success)).collect::<Vec<_>>();
    check(key(&first) == key(&second) && summary == summary_again, || "reports differ between runs".into())?;
    within(started.elapsed(), 10.0)?;
    Ok("crashing and sleeping adapters recorded as failures; report stable".into())
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("token accounting", token_accounting),
        ("shortcut pricing", shortcut_pricing),
        ("metric axioms", metric_axioms),
        ("structural protocol", structural_protocol),
        ("function application", function_application),
        ("round trips", round_trips),
        ("equivalence shortcut", equivalence_shortcut),
        ("semantic macros", table_semantics),
        ("harness robustness", harness_robustness),
    ];
    let mut failures = 0;
    for (n, (name, run)) in criteria.iter().enumerate() {
        let started = Instant::now();
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        let ms = started.elapsed().as_secs_f64() * 1e3;
        match outcome {
            Ok(detail) => println!("PASS criterion {} ({name}): {detail} [{ms:.0} ms]", n + 1),
            Err(why) => {
                failures += 1;
                println!("FAIL criterion {} ({name}): {why} [{ms:.0} ms]", n + 1);
            }
        }
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures > 0 {
        std::process::exit(1);
    }
}
