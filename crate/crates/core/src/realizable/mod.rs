//! Realizable type tuples over a clique-width expression, consistency of a
//! fixed formula, and the counting tools around VC dimension.

mod dp;
mod vc;

pub use dp::{realizable_tuples, DpConfig, DpError, RealizableTable, Row};
pub use vc::{
    count_diagnostics, distinct_column_symbol, sauer_shelah_bound, shatter_count, vc_dimension, CountReport,
    MatrixError,
};

use rustc_hash::FxHashMap;

use crate::graph::CwExpression;
use crate::logic::{free_var_names, Formula};
use crate::types::{type_satisfies, SlotMap, TypeError, TypeId, TypeStore};

/// Checks every example's type in `row` against `phi`; `memo` caches
/// verdicts per type.
pub fn row_agrees(
    store: &TypeStore,
    table: &RealizableTable,
    row: &Row,
    phi: &Formula,
    labels: &[bool],
    slots: &SlotMap,
    memo: &mut FxHashMap<TypeId, bool>,
) -> Result<bool, TypeError> {
    for (i, &want) in labels.iter().enumerate() {
        let t = table.type_of(row, i);
        let got = match memo.get(&t) {
            Some(&b) => b,
            None => {
                let b = type_satisfies(store, t, phi, slots)?;
                memo.insert(t, b);
                b
            }
        };
        if got != want {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Slot map for `x1..xk, y1..yl`.
pub fn standard_slots(k: usize, ell: usize) -> SlotMap {
    SlotMap::from_vars(&free_var_names(k, ell))
}

/// The least row of `table` (by witness) on which `phi` labels every example
/// as required.
pub fn first_consistent_row<'t>(
    store: &TypeStore,
    table: &'t RealizableTable,
    phi: &Formula,
    labels: &[bool],
    k: usize,
) -> Result<Option<&'t Row>, TypeError> {
    let slots = standard_slots(k, table.config.ell);
    let mut memo = FxHashMap::default();
    for row in &table.rows {
        if row_agrees(store, table, row, phi, labels, &slots, &mut memo)? {
            return Ok(Some(row));
        }
    }
    Ok(None)
}

/// Whether some parameter tuple makes `phi(x1..xk; y1..yl)` agree with the
/// labels on every example. Returns that tuple's least representative.
pub fn phi_consistent(
    store: &TypeStore,
    expr: &CwExpression,
    examples: &[Vec<String>],
    labels: &[bool],
    phi: &Formula,
    cfg: DpConfig,
) -> Result<Option<Vec<String>>, DpError> {
    assert_eq!(examples.len(), labels.len(), "one label per example");
    check_rank(phi, cfg)?;
    let k = examples.first().map_or(0, Vec::len);
    let table = realizable_tuples(store, expr, examples, cfg)?;
    Ok(first_consistent_row(store, &table, phi, labels, k)?.map(|r| table.witness_ids(r)))
}

pub fn check_rank(phi: &Formula, cfg: DpConfig) -> Result<(), TypeError> {
    let (qr, sd) = (phi.quantifier_rank(), phi.set_depth());
    if qr > cfg.q {
        return Err(TypeError::RankExceeded { formula: qr, ty: cfg.q });
    }
    if sd > cfg.budget.min(cfg.q) {
        return Err(TypeError::BudgetExceeded { formula: sd, ty: cfg.budget });
    }
    Ok(())
}

/// `tupleIndex: typeDigest,...` per root row.
pub fn emit_table(store: &TypeStore, table: &RealizableTable) -> String {
    let mut lines: Vec<String> = table
        .rows
        .iter()
        .map(|r| r.types.iter().map(|&t| store.digest_hex(t)).collect::<Vec<_>>().join(","))
        .collect();
    lines.sort();
    let mut out = String::new();
    for (i, l) in lines.iter().enumerate() {
        out.push_str(&format!("{i}: {l}\n"));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{random_expression, IndexedGraph};
    use crate::logic::{eval_formula, parse_formula, Assignment};
    use crate::types::compute_type_indexed;
    use std::collections::BTreeSet;

    fn brute(store: &TypeStore, expr: &CwExpression, ex: &[Vec<String>], cfg: DpConfig) -> BTreeSet<Vec<TypeId>> {
        let g = IndexedGraph::new(&expr.eval().unwrap()).unwrap();
        let mut distinct: Vec<&Vec<String>> = Vec::new();
        for e in ex {
            if !distinct.contains(&e) {
                distinct.push(e);
            }
        }
        let n = g.n();
        let mut out = BTreeSet::new();
        for code in 0..n.pow(cfg.ell as u32) {
            let w: Vec<usize> = (0..cfg.ell).map(|j| code / n.pow(j as u32) % n).collect();
            out.insert(
                distinct
                    .iter()
                    .map(|e| {
                        let mut t: Vec<usize> = e.iter().map(|v| g.index_of(v).unwrap()).collect();
                        t.extend(&w);
                        compute_type_indexed(store, &g, &t, &[], cfg.q, cfg.budget)
                    })
                    .collect(),
            );
        }
        out
    }

    fn fig1() -> CwExpression {
        CwExpression::parse_cwx(include_str!("../../tests/data/fig1.cwx")).unwrap()
    }

    fn ids(v: &[&str]) -> Vec<Vec<String>> {
        v.iter().map(|s| vec![s.to_string()]).collect()
    }

    #[test]
    fn empty_sequence_has_one_row() {
        let store = TypeStore::new();
        let t = realizable_tuples(&store, &fig1(), &[], DpConfig::new(2, 0, 0)).unwrap();
        assert_eq!(t.rows.len(), 1);
        assert_eq!(t.visits, fig1().size());
        let r = count_diagnostics(&t, 0, 0, 0, 1);
        assert!(r.flagged.is_empty());
        assert_eq!(r.per_node.len(), fig1().size());
    }

    #[test]
    fn fig1_matches_brute_force() {
        let store = TypeStore::new();
        let ex = ids(&["v1", "v3", "v4", "v5"]);
        let cfg = DpConfig::new(3, 1, 1);
        let t = realizable_tuples(&store, &fig1(), &ex, cfg).unwrap();
        let got: BTreeSet<Vec<TypeId>> = t.rows.iter().map(|r| r.types.to_vec()).collect();
        assert_eq!(got, brute(&store, &fig1(), &ex, cfg));
    }

    #[test]
    fn random_expressions_match_brute_force() {
        let store = TypeStore::new();
        for seed in 0..30u64 {
            let n = 2 + seed as usize % 5;
            let e = random_expression(n, seed).unwrap();
            let verts: Vec<String> = e.base_vertices().iter().map(|s| s.to_string()).collect();
            let ex: Vec<Vec<String>> = (0..3)
                .map(|i| vec![verts[(seed as usize + i) % n].clone(), verts[(i * 3) % n].clone()])
                .collect();
            for (q, ell, b) in [(1, 1, 0), (2, 1, 1), (1, 2, 1)] {
                let cfg = DpConfig { jobs: 1 + (seed % 3) as usize, ..DpConfig::new(q, ell, b) };
                let t = realizable_tuples(&store, &e, &ex, cfg).unwrap();
                let got: BTreeSet<Vec<TypeId>> = t.rows.iter().map(|r| r.types.to_vec()).collect();
                assert_eq!(got, brute(&store, &e, &ex, cfg), "seed {seed} cfg {cfg:?}");
            }
        }
    }

    #[test]
    fn example_formula_consistent_on_fig1() {
        let store = TypeStore::new();
        let phi = parse_formula(include_str!("../../tests/data/bipartite_side.mso"), &BTreeSet::new()).unwrap();
        let ex = ids(&["v1", "v3", "v4", "v5"]);
        let w = phi_consistent(&store, &fig1(), &ex, &[true, true, false, false], &phi, DpConfig::new(3, 1, 1))
            .unwrap()
            .expect("consistent");
        let g = fig1().eval().unwrap();
        for (v, want) in [("v1", true), ("v3", true), ("v4", false), ("v5", false)] {
            let a = Assignment::new().with("x1", v).with("y1", &w[0]);
            assert_eq!(eval_formula(&g, &phi, &a).unwrap(), want);
        }
        let none = phi_consistent(&store, &fig1(), &ids(&["v1", "v1"]), &[true, false], &phi, DpConfig::new(3, 1, 1))
            .unwrap();
        assert!(none.is_none());
    }

    #[test]
    fn rank_is_checked() {
        let store = TypeStore::new();
        let phi = parse_formula("ex a. ex b. E(a,b)", &BTreeSet::new()).unwrap();
        assert!(phi_consistent(&store, &fig1(), &[], &[], &phi, DpConfig::new(1, 0, 0)).is_err());
    }

    #[test]
    fn vc_on_star() {
        let mut g = crate::graph::LabeledGraph::new();
        for v in ["c", "a", "b", "d"] {
            g.add_vertex(v);
        }
        for v in ["a", "b", "d"] {
            g.add_edge("c", v).unwrap();
        }
        let edge = parse_formula("E(x1,y1)", &BTreeSet::new()).unwrap();
        assert_eq!(vc_dimension(&g, &edge, 1, 1, 4).unwrap(), 1);
        let tru = parse_formula("true", &BTreeSet::new()).unwrap();
        assert_eq!(vc_dimension(&g, &tru, 1, 1, 4).unwrap(), 0);
        assert_eq!(shatter_count(&g, &tru, &[vec!["a".into()]], 1).unwrap(), 1);
        assert_eq!(shatter_count(&g, &edge, &[], 1).unwrap(), 1);
    }

    #[test]
    fn matrix_symbol() {
        assert!(distinct_column_symbol(&[vec![0, 1]], 2).unwrap().is_some());
        assert_eq!(distinct_column_symbol(&[vec![0, 0]], 2), Err(MatrixError::DuplicateColumns(0, 1)));
        assert_eq!(sauer_shelah_bound(4, 2), 11);
        assert_eq!(sauer_shelah_bound(3, 5), 8);
    }
}
