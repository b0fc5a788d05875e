mod common;

use common::{arb_tree, oracle_ted};
use mathbench::metrics::{
    fraction_rules, match_depth, query_coverage, structural_ted, ted, CostModel, ShortcutRule,
};
use mathbench::ExprTree;
use proptest::prelude::*;

fn cm(i: f64, d: f64, r: f64) -> CostModel {
    CostModel::new(i, d, r, 0.0).unwrap()
}

#[test]
fn leaf_versus_chain() {
    let leaf = ExprTree::leaf("a");
    let chain = ExprTree::parse_term("a(b)").unwrap();
    assert_eq!(structural_ted(&leaf, &chain), 1.0);
    assert_eq!(oracle_ted(&leaf, &chain, 1.0, 1.0, 0.0), 1.0);
}

#[test]
fn one_deleted_node_of_eq1() {
    let reg = mathbench::latex::MacroRegistry::standard();
    let p = mathbench::latex::parse_latex(r"\zeta(s) = 0 \Rightarrow \Re s = \frac12 \lor \Im s = 0", &reg).unwrap();
    let mut q = p.clone();
    q.children.remove(3);
    assert_eq!(structural_ted(&p, &q), 1.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn matches_oracle(a in arb_tree(6), b in arb_tree(6), r in 0.1f64..2.5, i in 0.5f64..2.0, d in 0.5f64..2.0) {
        let got = ted(&a, &b, &cm(i, d, r), &[]).unwrap();
        let want = oracle_ted(&a, &b, i, d, r);
        prop_assert!((got - want).abs() < 1e-9, "{a} / {b}: {got} vs {want}");
    }

    #[test]
    fn metric_axioms(a in arb_tree(6), b in arb_tree(6), c in arb_tree(6), r in 0.1f64..2.0) {
        let m = cm(1.0, 1.0, r);
        let ab = ted(&a, &b, &m, &[]).unwrap();
        let ba = ted(&b, &a, &m, &[]).unwrap();
        let bc = ted(&b, &c, &m, &[]).unwrap();
        let ac = ted(&a, &c, &m, &[]).unwrap();
        prop_assert!(ab >= 0.0);
        prop_assert!((ab - ba).abs() < 1e-9);
        prop_assert!(ac <= ab + bc + 1e-9);
        prop_assert_eq!(ab == 0.0, a == b);
    }

    #[test]
    fn structural_is_a_lower_bound(a in arb_tree(8), b in arb_tree(8), r in 0.0f64..2.0) {
        prop_assert!(structural_ted(&a, &b) <= ted(&a, &b, &cm(1.0, 1.0, r), &[]).unwrap() + 1e-9);
    }

    #[test]
    fn shortcuts_never_increase(a in arb_tree(8), b in arb_tree(8)) {
        let m = CostModel::default();
        let extra = ShortcutRule::parse_line("a(?x, ?y) <=> b(?y, c(?x))").unwrap();
        let without = ted(&a, &b, &m, &fraction_rules()).unwrap();
        let mut rules = fraction_rules();
        rules.push(extra);
        let with = ted(&a, &b, &m, &rules).unwrap();
        prop_assert!(with <= without + 1e-9);
        prop_assert!(without <= ted(&a, &b, &m, &[]).unwrap() + 1e-9);
    }

    #[test]
    fn coverage_ignores_child_order(a in arb_tree(8), b in arb_tree(8)) {
        let mut rev = b.clone();
        rev.children.reverse();
        let x = query_coverage(&a, &b).unwrap();
        prop_assert!((0.0..=1.0).contains(&x));
        prop_assert_eq!(x, query_coverage(&a, &rev).unwrap());
        prop_assert_eq!(query_coverage(&a, &a).unwrap(), 1.0);
    }

    #[test]
    fn depth_weight_is_antitone(t in arb_tree(10)) {
        for id in 0..t.size() {
            let w = match_depth(id, &t).unwrap();
            let d = t.node_depth(id).unwrap();
            prop_assert!(w > 0.0 && w <= 1.0);
            prop_assert_eq!(w, 0.5f64.powi(d as i32));
        }
    }
}
