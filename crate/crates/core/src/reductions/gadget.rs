use std::collections::BTreeSet;

use crate::graph::{mark_vertices, CwExpression, GraphError, LabeledGraph, Node};

pub const W1: &str = "w1";
pub const W2: &str = "w2";

pub fn copy_id(i: usize, v: &str) -> String {
    format!("{i}.{v}")
}

/// Two tagged copies of `g` plus `w1`, `w2`, where `w_i` is adjacent to all
/// of copy `i`; label `c` marks copy 1 of `c1` and copy 2 of `c2`.
pub fn two_copy_gadget(
    g: &LabeledGraph,
    c1: &BTreeSet<String>,
    c2: &BTreeSet<String>,
    c: &str,
) -> Result<LabeledGraph, GraphError> {
    if g.label_names().contains(c) {
        return Err(GraphError::LabelInUse(c.to_string()));
    }
    let mut out = LabeledGraph::new();
    for l in g.label_names() {
        out.declare_label(&l);
    }
    out.declare_label(c);
    for (i, w, marked) in [(1, W1, c1), (2, W2, c2)] {
        out.add_vertex(w);
        for v in g.vertices() {
            let id = copy_id(i, v);
            out.add_vertex(&id);
            out.add_edge(w, &id)?;
            for l in g.labels_of(v) {
                out.add_label(&l, &id)?;
            }
        }
        for (a, b) in g.edges() {
            out.add_edge(&copy_id(i, a), &copy_id(i, b))?;
        }
        for v in marked {
            if !g.contains(v) {
                return Err(GraphError::UnknownVertex(v.clone()));
            }
            out.add_label(c, &copy_id(i, v))?;
        }
    }
    Ok(out)
}

fn fresh(taken: &BTreeSet<String>, prefix: &str) -> String {
    (0..).map(|i| format!("{prefix}{i}")).find(|l| !taken.contains(l)).expect("unbounded")
}

/// The same gadget as an expression built from an expression of `g`: each
/// copy gets a helper label on every vertex, is joined to its apex, and the
/// helpers are deleted.
pub fn two_copy_expression(
    expr: &CwExpression,
    c1: &BTreeSet<String>,
    c2: &BTreeSet<String>,
    c: &str,
) -> Result<CwExpression, GraphError> {
    let mut taken = expr.labels_used();
    taken.insert(c.to_string());
    let k = fresh(&taken, "_k");
    taken.insert(k.clone());
    let w = fresh(&taken, "_w");
    let copy = |i: usize, apex: &str| {
        let mut e = expr.clone();
        for node in e.nodes_mut().iter_mut() {
            if let Node::Base { vertex, labels } = node {
                *vertex = copy_id(i, vertex);
                labels.insert(k.clone());
            }
        }
        e.union(CwExpression::base(apex, [w.as_str()])).eta(&k, &w).delta(&k).delta(&w)
    };
    let joined = copy(1, W1).union(copy(2, W2));
    if expr.labels_used().contains(c) {
        return Err(GraphError::LabelInUse(c.to_string()));
    }
    let marked: Vec<String> =
        c1.iter().map(|v| copy_id(1, v)).chain(c2.iter().map(|v| copy_id(2, v))).collect();
    if marked.is_empty() {
        return Ok(joined);
    }
    mark_vertices(&joined, &marked, c)
}
