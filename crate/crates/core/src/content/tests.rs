use super::*;
use crate::latex::parse_latex;
use crate::semantics::Role;

const EQ1: &str = r"\zeta(s) = 0 \Rightarrow \Re s = \frac12 \lor \Im s = 0";

fn pres(src: &str) -> ExprTree {
    parse_latex(src, &MacroRegistry::standard()).unwrap()
}

fn content(src: &str, cfg: RefinementConfig) -> ExprTree {
    let p = pres(src);
    let ann = Annotations::from_lexicon(&p, &Lexicon::bundled());
    contentize(&p, &ann, cfg).unwrap()
}

fn term(src: &str) -> String {
    content(src, RefinementConfig::default()).to_string()
}

/// Annotations marking every leaf spelled `lexeme` with `role`.
fn with_role(p: &ExprTree, lexeme: &str, role: Role) -> Annotations {
    let mut ann = Annotations::new();
    for (id, n) in p.preorder().enumerate() {
        if n.is_leaf() && lexeme_of(n) == lexeme {
            ann.set(id, None, role);
        }
    }
    ann
}

#[test]
fn riemann_hypothesis_shape() {
    let c = content(EQ1, RefinementConfig::default());
    assert_eq!(c.size(), 16);
    assert_eq!(c.height(), 5);
    assert_eq!(c.label, "implies");
    assert_eq!(
        c.to_string(),
        "implies(eq(ζ(s), 0), or(eq(ℜ(s), rational(1, 2)), eq(ℑ(s), 0)))"
    );
    let zeta = &c.children[0].children[0];
    assert_eq!(zeta.attr("symbol"), Some("Q187235"));
    assert_eq!(zeta.attr("cd"), Some("wikidata"));
}

#[test]
fn single_identifier() {
    assert_eq!(term("x"), "x");
    assert!(content("x", RefinementConfig::default()).is_leaf());
}

#[test]
fn function_versus_identifier_reading() {
    let p = pres("f(x+y)");
    let as_fn = contentize(&p, &with_role(&p, "f", Role::Function), RefinementConfig::default()).unwrap();
    assert_eq!(as_fn.to_string(), "f(plus(x, y))");
    let as_id = contentize(&p, &with_role(&p, "f", Role::Identifier), RefinementConfig::default()).unwrap();
    assert_eq!(as_id.to_string(), "times(f, plus(x, y))");
}

#[test]
fn power_and_subscript_rules() {
    assert_eq!(term("x^2"), "power(x, 2)");
    assert_eq!(term("p_i"), "p(i)");
    assert_eq!(term(r"x_\text{max}"), "x_max");
    assert_eq!(term(r"x_\mathrm{max}"), "x_max");
    let off = RefinementConfig { power_rule: false, subscript_rule: false, ..Default::default() };
    assert_eq!(content("x^2", off).to_string(), "superscript(x, 2)");
    assert_eq!(content("p_i", off).to_string(), "subscript(p, i)");
}

#[test]
fn contraction_is_not_a_power() {
    let c = content(r"\contraction{g}{3}", RefinementConfig::default());
    assert_eq!(c.to_string(), "contraction(g, 3)");
    assert_eq!(c.attr("symbol"), Some("Q5165685"));
}

#[test]
fn special_heads() {
    let c = content(r"\commutator{a}{b}", RefinementConfig::default());
    assert_eq!(c.to_string(), "commutator(a, b)");
    assert_eq!(c.attr("symbol"), Some("Q2989763"));
    assert_eq!(term("[a,b]"), "interval(a, b)");
    assert_eq!(term(r"E = mc^2 \tag{2}"), "eq(E, times(m, power(c, 2)))");
    assert_eq!(term(r"x^\circ"), "degree(x)");
    assert_eq!(term(r"\degree{x}"), "degree(x)");
    assert_eq!(term(r"A^\dagger"), "adjoint(A)");
}

#[test]
fn cases_become_piecewise() {
    let c = term(r"|x| = \begin{cases} x & x \geq 0 \\ -x & \text{otherwise} \end{cases}");
    assert_eq!(c, "eq(abs(x), piecewise(piece(x, geq(x, 0)), otherwise(minus(x))))");
}

#[test]
fn precedence_and_grouping() {
    assert_eq!(term("a + b c = d"), "eq(plus(a, times(b, c)), d)");
    assert_eq!(term("a - b - c"), "minus(minus(a, b), c)");
    assert_eq!(term("a + b + c"), "plus(a, b, c)");
    assert_eq!(term("(a + b) + c"), "plus(plus(a, b), c)");
    assert_eq!(term("a < b < c"), "lt(a, b, c)");
    assert_eq!(term("a < b = c"), "eq(lt(a, b), c)");
    assert_eq!(term("-x^2"), "minus(power(x, 2))");
    assert_eq!(term("n!"), "factorial(n)");
    assert_eq!(term(r"\frac{a}{b}"), "divide(a, b)");
}

#[test]
fn lists_keep_the_first_equation() {
    assert_eq!(term("a = 1, b = 2"), "eq(a, 1)");
    assert_eq!(term("a, b"), "list(a, b)");
}

#[test]
fn constraints_go_to_the_root() {
    let c = content(r"a \equiv b \pmod{n}", RefinementConfig::default());
    assert_eq!(c.to_string(), "equivalent(a, b)");
    assert_eq!(c.attr(CONSTRAINT), Some("mod(n)"));
}

#[test]
fn dlmf_macros_and_explicit_application() {
    assert_eq!(term(r"\BesselJ{\nu}@{z}"), "BesselJ(ν, z)");
    assert_eq!(term(r"\fapply{f}@{x,y}"), "f(x, y)");
    assert_eq!(term(r"\sin x"), "sin(x)");
    assert_eq!(term(r"\sin\cos x"), "sin(cos(x))");
}

#[test]
fn einstein_pairs() {
    let p = pres("x^a y_a");
    let ids = detect_einstein(&p);
    let labels: Vec<_> = ids.iter().map(|&i| p.get(i).unwrap().label.as_str()).collect();
    assert_eq!(labels, ["a", "a"]);
    assert!(detect_einstein(&pres("x^2")).is_empty());
    assert!(detect_einstein(&pres("x^a y_b")).is_empty());
    assert!(detect_einstein(&pres("x^a + y_a")).is_empty());
    assert_eq!(term("x^a y_a"), "times(superscript(x, a), y(a))");
    let off = RefinementConfig { einstein_detection: false, ..Default::default() };
    assert_eq!(content("x^a y_a", off).to_string(), "times(power(x, a), y(a))");
}

#[test]
fn invisible_operators() {
    let p = pres(r"\Re s");
    let ann = Annotations::from_lexicon(&p, &Lexicon::bundled());
    let d = disambiguate_invisible(&p, &ann);
    assert_eq!(d.children[1].label, INVISIBLE_APPLY);
    let d = disambiguate_invisible(&pres("2x"), &Annotations::new());
    assert_eq!(d.children[1].label, INVISIBLE_TIMES);
    let d = disambiguate_invisible(&pres("F a"), &Annotations::new());
    assert_eq!(d.children[1].label, INVISIBLE_TIMES);
}

#[test]
fn ambiguity_needs_all_rules_off() {
    let p = pres(r"\Delta u");
    let ann = Annotations::from_lexicon(&p, &Lexicon::bundled());
    assert!(ann.iter().any(|(_, i)| i.is_ambiguous()));
    assert!(matches!(
        contentize(&p, &ann, RefinementConfig::none()),
        Err(ContentError::AmbiguityUnresolved { .. })
    ));
    assert!(contentize(&p, &ann, RefinementConfig::default()).is_ok());
}

#[test]
fn sources_point_back_to_presentation() {
    let p = pres(EQ1);
    let c = content(EQ1, RefinementConfig::default());
    for n in c.preorder() {
        if let Some(id) = n.attr(SRC).and_then(|s| s.parse::<usize>().ok()) {
            assert!(p.get(id).is_some());
        }
    }
    let implies_src: usize = c.attr(SRC).unwrap().parse().unwrap();
    assert_eq!(p.get(implies_src).unwrap().label, "⇒");
}
