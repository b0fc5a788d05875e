//! Zhang–Shasha ordered tree edit distance, extended with priced
//! rewrites of whole subtree pairs.

use super::shortcut::ShortcutRule;
use super::CostModel;
use crate::tree::ExprTree;

/// Postorder view of a tree: 0-based indices, leftmost-leaf table and
/// keyroots as in the original algorithm.
struct Indexed<'a> {
    nodes: Vec<&'a ExprTree>,
    lml: Vec<usize>,
    keyroots: Vec<usize>,
}

impl<'a> Indexed<'a> {
    fn new(t: &'a ExprTree) -> Self {
        fn walk<'a>(t: &'a ExprTree, nodes: &mut Vec<&'a ExprTree>, lml: &mut Vec<usize>) -> usize {
            let mut leftmost = None;
            for c in &t.children {
                let l = walk(c, nodes, lml);
                leftmost.get_or_insert(l);
            }
            let me = nodes.len();
            nodes.push(t);
            let l = leftmost.unwrap_or(me);
            lml.push(l);
            l
        }
        let mut nodes = Vec::new();
        let mut lml = Vec::new();
        walk(t, &mut nodes, &mut lml);
        // a keyroot is the highest node with a given leftmost leaf
        let mut keyroots: Vec<usize> = (0..nodes.len())
            .filter(|&i| !(i + 1..nodes.len()).any(|k| lml[k] == lml[i]))
            .collect();
        keyroots.sort_unstable();
        Indexed { nodes, lml, keyroots }
    }
}

pub(crate) fn distance(a: &ExprTree, b: &ExprTree, cm: &CostModel, rules: &[ShortcutRule]) -> f64 {
    let ia = Indexed::new(a);
    let ib = Indexed::new(b);
    let (n, m) = (ia.nodes.len(), ib.nodes.len());
    let mut td = vec![vec![0.0f64; m]; n];
    // forest distance table, offset by one for the empty forest
    let mut fd = vec![vec![0.0f64; m + 1]; n + 1];

    for &i in &ia.keyroots {
        for &j in &ib.keyroots {
            let (li, lj) = (ia.lml[i], ib.lml[j]);
            fd[li][lj] = 0.0;
            for x in li..=i {
                fd[x + 1][lj] = fd[x][lj] + cm.delete;
            }
            for y in lj..=j {
                fd[li][y + 1] = fd[li][y] + cm.insert;
            }
            for x in li..=i {
                for y in lj..=j {
                    let del = fd[x][y + 1] + cm.delete;
                    let ins = fd[x + 1][y] + cm.insert;
                    if ia.lml[x] == li && ib.lml[y] == lj {
                        let (na, nb) = (ia.nodes[x], ib.nodes[y]);
                        let rename = if na.label == nb.label { 0.0 } else { cm.rename };
                        let mut best = del.min(ins).min(fd[x][y] + rename);
                        // a rule replaces both subtrees outright
                        if let Some(s) = shortcut(na, nb, cm, rules) {
                            best = best.min(s);
                        }
                        fd[x + 1][y + 1] = best;
                        td[x][y] = best;
                    } else {
                        let sub = fd[ia.lml[x]][ib.lml[y]] + td[x][y];
                        fd[x + 1][y + 1] = del.min(ins).min(sub);
                    }
                }
            }
        }
    }
    td[n - 1][m - 1]
}

/// Cheapest rule rewriting `a` into `b` as a whole; bound subtrees that
/// differ are edited on top of the rule price.
fn shortcut(a: &ExprTree, b: &ExprTree, cm: &CostModel, rules: &[ShortcutRule]) -> Option<f64> {
    let mut best: Option<f64> = None;
    for rule in rules {
        for (from, to) in rule.directions() {
            let (Some(ba), Some(bb)) = (from.bind(a), to.bind(b)) else {
                continue;
            };
            let mut cost = rule.cost.unwrap_or(cm.shortcut);
            for (var, sa) in &ba {
                cost += distance(sa, bb[*var], cm, rules);
            }
            best = Some(best.map_or(cost, |c: f64| c.min(cost)));
        }
    }
    best
}
