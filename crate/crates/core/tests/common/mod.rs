//! Shared helpers: fixture access, random trees and a brute-force edit
//! distance used as an oracle.
#![allow(dead_code)]

use std::path::PathBuf;

use mathbench::ExprTree;
use proptest::prelude::*;

type Pair = (usize, usize);
use rand::Rng;

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

pub const LABELS: &[&str] = &["a", "b", "c"];

/// Random tree with exactly `n` nodes over a small label alphabet.
pub fn random_tree(rng: &mut impl Rng, n: usize) -> ExprTree {
    assert!(n >= 1);
    let label = LABELS[rng.gen_range(0..LABELS.len())];
    let mut rest = n - 1;
    let mut children = Vec::new();
    while rest > 0 {
        let k = rng.gen_range(1..=rest);
        children.push(random_tree(rng, k));
        rest -= k;
    }
    ExprTree::node(label, children)
}

pub fn arb_tree(max_nodes: usize) -> impl Strategy<Value = ExprTree> {
    let leaf = prop::sample::select(LABELS).prop_map(ExprTree::leaf);
    leaf.prop_recursive(4, max_nodes as u32, 3, |inner| {
        (prop::sample::select(LABELS), prop::collection::vec(inner, 0..3))
            .prop_map(|(l, cs)| ExprTree::node(l, cs))
    })
    .prop_filter("size bound", move |t| t.size() <= max_nodes)
}

struct Flat {
    labels: Vec<String>,
    /// preorder index of the last descendant
    end: Vec<usize>,
    /// postorder rank
    post: Vec<usize>,
}

fn flatten(t: &ExprTree) -> Flat {
    fn walk(t: &ExprTree, f: &mut Flat, counter: &mut usize) -> usize {
        let me = f.labels.len();
        f.labels.push(t.label.clone());
        f.end.push(me);
        f.post.push(0);
        let mut last = me;
        for c in &t.children {
            last = walk(c, f, counter);
        }
        f.end[me] = last;
        f.post[me] = *counter;
        *counter += 1;
        last
    }
    let mut f = Flat { labels: Vec::new(), end: Vec::new(), post: Vec::new() };
    walk(t, &mut f, &mut 0);
    f
}

/// Minimum cost over all Tai mappings (one-to-one, ancestor- and
/// order-preserving node pairings): renames for mapped pairs, deletions
/// and insertions for the rest. Exponential; for tiny trees only.
pub fn oracle_ted(a: &ExprTree, b: &ExprTree, ins: f64, del: f64, ren: f64) -> f64 {
    let (fa, fb) = (flatten(a), flatten(b));
    let is_anc = |f: &Flat, x: usize, y: usize| x < y && y <= f.end[x];
    let consistent = |pairs: &[(usize, usize)], i: usize, j: usize| {
        pairs.iter().all(|&(p, q)| {
            p != i
                && q != j
                && is_anc(&fa, p, i) == is_anc(&fb, q, j)
                && is_anc(&fa, i, p) == is_anc(&fb, j, q)
                && (fa.post[p] < fa.post[i]) == (fb.post[q] < fb.post[j])
                && (p < i) == (q < j)
        })
    };
    fn search(
        i: usize,
        n: usize,
        m: usize,
        pairs: &mut Vec<(usize, usize)>,
        best: &mut f64,
        cost: &dyn Fn(&[Pair]) -> f64,
        ok: &dyn Fn(&[Pair], usize, usize) -> bool,
    ) {
        if i == n {
            *best = best.min(cost(pairs));
            return;
        }
        search(i + 1, n, m, pairs, best, cost, ok);
        for j in 0..m {
            if ok(pairs, i, j) {
                pairs.push((i, j));
                search(i + 1, n, m, pairs, best, cost, ok);
                pairs.pop();
            }
        }
    }
    let (n, m) = (fa.labels.len(), fb.labels.len());
    let cost = |pairs: &[(usize, usize)]| {
        let renames: f64 = pairs.iter().map(|&(i, j)| if fa.labels[i] == fb.labels[j] { 0.0 } else { ren }).sum();
        renames + del * (n - pairs.len()) as f64 + ins * (m - pairs.len()) as f64
    };
    let mut best = f64::INFINITY;
    search(0, n, m, &mut Vec::new(), &mut best, &cost, &consistent);
    best
}
