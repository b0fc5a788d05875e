use mathbench::latex::MacroRegistry;
use mathbench::mathml::{emit, normalize_presentation, parse_mathml};
use mathbench::pipeline::{convert, ConvertOptions};

/// (macro call, spelled-out presentation, head, Wikidata item)
const TABLE: &[(&str, &str, &str, &str)] = &[
    (r"\commutator{A}{B}", "[A,B]", "commutator", "Q2989763"),
    (r"\tensor{T}{i}{j}", "{T}^{i}_{j}", "tensor", "Q188524"),
    (r"\adjoint{A}", r"{A}^{\dagger}", "adjoint", "Q2051983"),
    (r"\transformation{x}", "{x}'", "transformation", "Q12202238"),
    (r"\degree{x}", r"{x}^{\circ}", "degree", "Q28390"),
    (r"\contraction{g}{3}", "{g}^{(3)}", "contraction", "Q5165685"),
];

fn content_only() -> ConvertOptions {
    ConvertOptions { tex_annotation: false, ..Default::default() }
}

#[test]
fn every_macro_is_registered() {
    let reg = MacroRegistry::standard();
    for (call, ..) in TABLE {
        let name = call.split('{').next().unwrap();
        assert!(reg.get(name).is_some(), "{name}");
    }
}

#[test]
fn macros_carry_their_meaning_into_content() {
    for (call, _, head, qid) in TABLE {
        let pm = convert(call, None, &content_only()).unwrap();
        let c = pm.content.as_ref().unwrap();
        assert_eq!(c.attr("symbol"), Some(*qid), "{call}: {c}");
        assert!(c.to_string().starts_with(&format!("{head}(")), "{call}: {c}");
        let xml = emit(&pm);
        assert!(xml.contains(qid), "{xml}");
        assert_eq!(parse_mathml(&xml).unwrap(), pm);
    }
}

#[test]
fn macros_render_like_their_templates() {
    let opts = ConvertOptions { content: false, tex_annotation: false, ..Default::default() };
    for (call, spelled, ..) in TABLE {
        let a = convert(call, None, &opts).unwrap();
        let b = convert(spelled, None, &opts).unwrap();
        assert_eq!(
            normalize_presentation(&a.presentation).to_string(),
            normalize_presentation(&b.presentation).to_string(),
            "{call} vs {spelled}"
        );
    }
}

#[test]
fn bracket_pairs_stay_distinct() {
    let term = |tex: &str| convert(tex, None, &content_only()).unwrap().content.unwrap().to_string();
    let readings = [term(r"\commutator{a}{b}"), term(r"\anticommutator{a}{b}"), term("[a,b]")];
    assert_eq!(readings[0], "commutator(a, b)");
    assert_eq!(readings[1], "anticommutator(a, b)");
    assert_eq!(readings[2], "interval(a, b)");
}
