#![allow(dead_code)]

use std::collections::BTreeSet;

use msolearn::graph::{CwExpression, IndexedGraph, LabeledGraph};
use msolearn::logic::{eval_formula, free_var_names, Assignment, Formula};
use msolearn::types::{compute_type_indexed, TypeId, TypeStore};
use rand::Rng;

pub fn vocab(names: &[&str]) -> BTreeSet<String> {
    names.iter().map(|s| s.to_string()).collect()
}

/// Random graph on `n` vertices `p0..`, with every label of `labels`
/// declared and each vertex carrying each label with probability 1/2.
pub fn random_graph<R: Rng>(rng: &mut R, prefix: &str, n: usize, labels: &[&str]) -> LabeledGraph {
    let mut g = LabeledGraph::new();
    let ids: Vec<String> = (0..n).map(|i| format!("{prefix}{i}")).collect();
    for v in &ids {
        g.add_vertex(v);
    }
    for l in labels {
        g.declare_label(l);
    }
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen_bool(0.5) {
                g.add_edge(&ids[i], &ids[j]).unwrap();
            }
        }
        for l in labels {
            if rng.gen_bool(0.5) {
                g.add_label(l, &ids[i]).unwrap();
            }
        }
    }
    g
}

/// All tuples of `n` indices of length `len`, in lexicographic order.
pub fn tuples(n: usize, len: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|t| {
                (0..n).map(move |v| {
                    let mut t = t.clone();
                    t.push(v);
                    t
                })
            })
            .collect();
    }
    out
}

pub fn distinct<T: Clone + PartialEq>(xs: &[T]) -> Vec<T> {
    let mut out: Vec<T> = Vec::new();
    for x in xs {
        if !out.contains(x) {
            out.push(x.clone());
        }
    }
    out
}

/// `{ (tp(e·w))_e : w ∈ V^ell }` by direct type computation.
pub fn brute_table(
    store: &TypeStore,
    expr: &CwExpression,
    examples: &[Vec<String>],
    q: usize,
    ell: usize,
    budget: usize,
) -> BTreeSet<Vec<TypeId>> {
    let g = IndexedGraph::new(&expr.eval().unwrap()).unwrap();
    let ex = distinct(examples);
    tuples(g.n(), ell)
        .into_iter()
        .map(|w| {
            ex.iter()
                .map(|e| {
                    let mut t: Vec<usize> = e.iter().map(|v| g.index_of(v).unwrap()).collect();
                    t.extend(&w);
                    compute_type_indexed(store, &g, &t, &[], q, budget)
                })
                .collect()
        })
        .collect()
}

pub fn assignment(k: usize, tuple: &[String], params: &[String]) -> Assignment {
    let names = free_var_names(k, params.len());
    let mut a = Assignment::new();
    for (name, v) in names.iter().zip(tuple.iter().chain(params)) {
        a = a.with(name, v);
    }
    a
}

/// Whether `params` make `phi` agree with every label.
pub fn agrees(g: &LabeledGraph, phi: &Formula, examples: &[Vec<String>], labels: &[bool], params: &[String]) -> bool {
    examples.iter().zip(labels).all(|(e, &want)| {
        eval_formula(g, phi, &assignment(e.len(), e, params)).unwrap() == want
    })
}

/// The least parameter tuple (by sorted vertex order) that agrees, if any.
pub fn brute_consistent(
    g: &LabeledGraph,
    phi: &Formula,
    examples: &[Vec<String>],
    labels: &[bool],
    ell: usize,
) -> Option<Vec<String>> {
    let verts: Vec<String> = g.vertices().map(String::from).collect();
    tuples(verts.len(), ell).into_iter().find_map(|w| {
        let params: Vec<String> = w.iter().map(|&i| verts[i].clone()).collect();
        agrees(g, phi, examples, labels, &params).then_some(params)
    })
}
