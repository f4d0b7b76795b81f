use crate::graph::{IndexedGraph, LabeledGraph};

use super::store::{Bits, Layout, TypeId, TypeNode, TypeStore};
use super::TypeError;

/// Rank-`q` type of `tuple` with set arguments `sets` (vertex masks), by
/// direct recursion over all extensions. Exponential; a test oracle.
pub fn compute_type_indexed(
    store: &TypeStore,
    g: &IndexedGraph,
    tuple: &[usize],
    sets: &[u64],
    q: usize,
    budget: usize,
) -> TypeId {
    let labels = store.label_set(&g.label_names);
    let mut tuple = tuple.to_vec();
    let mut sets = sets.to_vec();
    rec(store, g, labels, &mut tuple, &mut sets, q, budget.min(q))
}

fn rec(
    store: &TypeStore,
    g: &IndexedGraph,
    labels: super::store::LabelSetId,
    tuple: &mut Vec<usize>,
    sets: &mut Vec<u64>,
    q: usize,
    budget: usize,
) -> TypeId {
    let layout = Layout { k: tuple.len(), s: sets.len(), nl: g.label_names.len() };
    let mut bits = Bits::new(&layout);
    for j in 0..tuple.len() {
        for i in 0..j {
            bits.set(layout.eq(i, j), tuple[i] == tuple[j]);
            bits.set(layout.edge(i, j), g.has_edge(tuple[i], tuple[j]));
        }
    }
    for (i, &v) in tuple.iter().enumerate() {
        for l in 0..layout.nl {
            bits.set(layout.label(i, l), g.has_label(l, v));
        }
        for (j, &m) in sets.iter().enumerate() {
            bits.set(layout.member(i, j), m >> v & 1 == 1);
        }
    }
    let mut vext = Vec::new();
    let mut sext = Vec::new();
    if q > 0 {
        for u in 0..g.n() {
            tuple.push(u);
            vext.push(rec(store, g, labels, tuple, sets, q - 1, budget.min(q - 1)));
            tuple.pop();
        }
        if budget > 0 {
            let full = g.full();
            let mut mask = 0u64;
            loop {
                sets.push(mask);
                sext.push(rec(store, g, labels, tuple, sets, q - 1, (budget - 1).min(q - 1)));
                sets.pop();
                if mask == full {
                    break;
                }
                mask += 1;
            }
        }
    }
    vext.sort_unstable();
    vext.dedup();
    sext.sort_unstable();
    sext.dedup();
    store.intern(TypeNode {
        rank: q as u8,
        budget: budget as u8,
        k: layout.k as u8,
        s: layout.s as u8,
        labels,
        atoms: bits.0.into(),
        vext: vext.into(),
        sext: sext.into(),
    })
}

/// Brute-force type of a vertex tuple and set tuple given by ids.
pub fn compute_type(
    store: &TypeStore,
    g: &LabeledGraph,
    tuple: &[&str],
    sets: &[Vec<&str>],
    q: usize,
    budget: usize,
) -> Result<TypeId, TypeError> {
    let ig = IndexedGraph::new(g)?;
    let idx = |v: &str| ig.index_of(v).ok_or_else(|| TypeError::UnknownVertex(v.to_string()));
    let t = tuple.iter().map(|v| idx(v)).collect::<Result<Vec<_>, _>>()?;
    let mut masks = Vec::new();
    for s in sets {
        let mut m = 0u64;
        for v in s {
            m |= 1 << idx(v)?;
        }
        masks.push(m);
    }
    Ok(compute_type_indexed(store, &ig, &t, &masks, q, budget))
}
