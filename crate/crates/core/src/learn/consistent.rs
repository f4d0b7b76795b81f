use std::collections::BTreeSet;

use rustc_hash::FxHashMap;

use crate::graph::{encode_training_labels, mark_vertex, CwExpression, LabeledGraph, LEFT_MARK, RIGHT_MARK};
use crate::logic::{encode_examples_formula, eval_formula, free_var_names, parse_formula, Assignment, Formula};
use crate::realizable::{check_rank, realizable_tuples, row_agrees, standard_slots, DpConfig, RealizableTable, Row};
use crate::types::{type_satisfies, SlotMap, TypeId, TypeStore};

use super::{Hypothesis, LearnError, TrainingSequence};

/// Labels `prefix1, prefix2, ...` unused by `expr` and `avoid`.
fn fresh_labels(expr: &CwExpression, avoid: &BTreeSet<String>, prefix: &str, count: usize) -> Vec<String> {
    let taken = expr.labels_used();
    (1..)
        .map(|i| format!("{prefix}{i}"))
        .filter(|l| !taken.contains(l) && !avoid.contains(l))
        .take(count)
        .collect()
}

pub(crate) type Accept<'a> = dyn FnMut(&TypeStore, &RealizableTable, &Row) -> Result<bool, LearnError> + 'a;

/// Fixes the parameters one at a time: parameter `j` is pinned to the first
/// vertex (in id order) that carries a fresh label and still admits a row
/// accepted by `accept` with the pinned slots on their labels. The result is
/// the least accepted parameter tuple.
pub fn pinning_loop(
    store: &TypeStore,
    expr: &CwExpression,
    examples: &[Vec<String>],
    cfg: DpConfig,
    avoid: &BTreeSet<String>,
    accept: &mut Accept<'_>,
) -> Result<Option<Vec<String>>, LearnError> {
    let ell = cfg.ell;
    if ell == 0 {
        let table = realizable_tuples(store, expr, examples, cfg)?;
        for row in &table.rows {
            if accept(store, &table, row)? {
                return Ok(Some(Vec::new()));
            }
        }
        return Ok(None);
    }
    let pins = fresh_labels(expr, avoid, "Pin", ell);
    let mut ext = examples.to_vec();
    ext.push(Vec::new());
    let pin_slot = examples.len();
    let slots = SlotMap::from_vars(&free_var_names(0, ell));
    let mut vertices: Vec<String> = expr.base_vertices().iter().map(|s| s.to_string()).collect();
    vertices.sort();
    let mut cur = expr.clone();
    let mut chosen = Vec::with_capacity(ell);
    for j in 0..ell {
        let pinned = Formula::and_all((0..=j).map(|i| Formula::label(&pins[i], &format!("y{}", i + 1))));
        let mut next = None;
        for v in &vertices {
            let e = mark_vertex(&cur, v, &pins[j])?;
            let table = realizable_tuples(store, &e, &ext, cfg)?;
            let mut hit = false;
            for row in &table.rows {
                if type_satisfies(store, table.type_of(row, pin_slot), &pinned, &slots)? && accept(store, &table, row)? {
                    hit = true;
                    break;
                }
            }
            if hit {
                next = Some((v.clone(), e));
                break;
            }
        }
        match next {
            Some((v, e)) => {
                chosen.push(v);
                cur = e;
            }
            None => return Ok(None),
        }
    }
    Ok(Some(chosen))
}

fn check_arity(s: &TrainingSequence, k: usize) -> Result<(), LearnError> {
    if !s.is_empty() && s.k() != k {
        return Err(LearnError::Arity(format!("examples have arity {}, expected {k}", s.k())));
    }
    Ok(())
}

/// Per-example `phi` agreement, via `eval_formula`.
pub fn verify_witness(g: &LabeledGraph, phi: &Formula, s: &TrainingSequence, w: &[String]) -> Result<bool, LearnError> {
    let vars = free_var_names(s.k(), w.len());
    for (t, want) in &s.examples {
        let mut a = Assignment::new();
        for (var, v) in vars.iter().zip(t.iter().chain(w)) {
            a = a.with(var, v);
        }
        if eval_formula(g, phi, &a)? != *want {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The least parameter tuple making `phi` consistent with `s`, or `None`.
pub fn learn_hd_consistent(
    store: &TypeStore,
    expr: &CwExpression,
    s: &TrainingSequence,
    phi: &Formula,
    cfg: DpConfig,
) -> Result<Option<Vec<String>>, LearnError> {
    check_rank(phi, cfg)?;
    let k = s.k();
    let (tuples, labels) = (s.tuples(), s.labels());
    let slots = standard_slots(k, cfg.ell);
    let table = realizable_tuples(store, expr, &tuples, cfg)?;
    let mut memo = FxHashMap::default();
    let mut least = None;
    for row in &table.rows {
        if row_agrees(store, &table, row, phi, &labels, &slots, &mut memo)? {
            least = Some(table.witness_ids(row));
            break;
        }
    }
    let Some(least) = least else { return Ok(None) };
    let mut accept = |st: &TypeStore, t: &RealizableTable, r: &Row| {
        let mut memo = FxHashMap::default();
        Ok(row_agrees(st, t, r, phi, &labels, &slots, &mut memo)?)
    };
    let w = pinning_loop(store, expr, &tuples, cfg, &phi.labels(), &mut accept)?;
    debug_assert_eq!(w.as_ref(), Some(&least), "pinning agrees with the table's least witness");
    Ok(w)
}

/// Whether equal types in `row` always carry equal labels.
pub(crate) fn separates(table: &RealizableTable, row: &Row, labels: &[bool]) -> bool {
    let mut seen: FxHashMap<TypeId, bool> = FxHashMap::default();
    labels
        .iter()
        .enumerate()
        .all(|(i, &l)| *seen.entry(table.type_of(row, i)).or_insert(l) == l)
}

/// Rank-q types of the tuples `t ++ params`, one per tuple.
pub(crate) fn joint_types(
    store: &TypeStore,
    expr: &CwExpression,
    tuples: &[Vec<String>],
    params: &[String],
    cfg: DpConfig,
) -> Result<Vec<TypeId>, LearnError> {
    let ex: Vec<Vec<String>> = tuples.iter().map(|t| t.iter().chain(params).cloned().collect()).collect();
    let table = realizable_tuples(store, expr, &ex, DpConfig { ell: 0, ..cfg })?;
    let row = &table.rows[0];
    Ok((0..ex.len()).map(|i| table.type_of(row, i)).collect())
}

pub(crate) fn hypothesis_from(
    store: &TypeStore,
    expr: &CwExpression,
    s: &TrainingSequence,
    params: Vec<String>,
    positive: impl Fn(usize) -> bool,
    cfg: DpConfig,
) -> Result<Hypothesis, LearnError> {
    let types = joint_types(store, expr, &s.tuples(), &params, cfg)?;
    Ok(Hypothesis {
        q: cfg.q,
        ell: cfg.ell,
        set_budget: cfg.budget,
        k: s.k(),
        params,
        positive_types: types
            .iter()
            .enumerate()
            .filter(|&(i, _)| positive(i))
            .map(|(_, &t)| store.digest_hex(t))
            .collect(),
        formula: None,
        expr_digest: expr.digest(),
    })
}

/// A type-based hypothesis consistent with `s`, if the rank-q class with
/// `cfg.ell` parameters contains one.
pub fn synthesize_hypothesis(
    store: &TypeStore,
    expr: &CwExpression,
    s: &TrainingSequence,
    cfg: DpConfig,
) -> Result<Option<Hypothesis>, LearnError> {
    let (tuples, labels) = (s.tuples(), s.labels());
    let table = realizable_tuples(store, expr, &tuples, cfg)?;
    if !table.rows.iter().any(|r| separates(&table, r, &labels)) {
        return Ok(None);
    }
    let mut accept = |_: &TypeStore, t: &RealizableTable, r: &Row| Ok(separates(t, r, &labels));
    let w = pinning_loop(store, expr, &tuples, cfg, &BTreeSet::new(), &mut accept)?.expect("a separating row exists");
    Ok(Some(hypothesis_from(store, expr, s, w, |i| labels[i], cfg)?))
}

/// One-dimensional consistent learning. Without a bank the result is the
/// type-based hypothesis; with a bank it is the first bank formula that is
/// consistent for some parameter choice.
pub fn learn_1d(
    store: &TypeStore,
    expr: &CwExpression,
    s: &TrainingSequence,
    cfg: DpConfig,
    bank: Option<&[Formula]>,
) -> Result<Option<Hypothesis>, LearnError> {
    check_arity(s, 1)?;
    let Some(bank) = bank else {
        return synthesize_hypothesis(store, expr, s, cfg);
    };
    for phi in bank {
        check_rank(phi, cfg)?;
    }
    let mut avoid: BTreeSet<String> = bank.iter().flat_map(|f| f.labels()).collect();
    let pn = fresh_labels(expr, &avoid, "Train", 2);
    avoid.extend(pn.iter().cloned());
    let marks: Vec<(String, bool)> = s.examples.iter().map(|(t, l)| (t[0].clone(), *l)).collect();
    let labeled = encode_training_labels(expr, &marks, &pn[0], &pn[1])?;
    let lifted = DpConfig { q: cfg.q + 1, ..cfg };
    let empty = vec![Vec::new()];
    let table = realizable_tuples(store, &labeled, &empty, lifted)?;
    let slots = standard_slots(0, cfg.ell);
    for phi in bank {
        let enc = encode_examples_formula(phi, "x1", &pn[0], &pn[1])?;
        let mut hit = false;
        for row in &table.rows {
            if type_satisfies(store, row.types[0], &enc, &slots)? {
                hit = true;
                break;
            }
        }
        if !hit {
            continue;
        }
        let mut accept = |st: &TypeStore, t: &RealizableTable, r: &Row| Ok(type_satisfies(st, t.type_of(r, 0), &enc, &slots)?);
        let w = pinning_loop(store, &labeled, &empty, lifted, &avoid, &mut accept)?.expect("a realizable row exists");
        // Positive types over all vertices.
        let mut all: Vec<String> = expr.base_vertices().iter().map(|v| v.to_string()).collect();
        all.sort();
        let everyone = TrainingSequence::new(all.iter().map(|v| (vec![v.clone()], true)).collect())?;
        let types = joint_types(store, expr, &everyone.tuples(), &w, cfg)?;
        let full = standard_slots(1, cfg.ell);
        let mut positive = BTreeSet::new();
        for &t in &types {
            if type_satisfies(store, t, phi, &full)? {
                positive.insert(store.digest_hex(t));
            }
        }
        return Ok(Some(Hypothesis {
            q: cfg.q,
            ell: cfg.ell,
            set_budget: cfg.budget,
            k: 1,
            params: w,
            positive_types: positive,
            formula: Some(phi.to_string()),
            expr_digest: expr.digest(),
        }));
    }
    Ok(None)
}

/// Classifies many tuples at once with one DP run.
pub fn classify_many(
    store: &TypeStore,
    expr: &CwExpression,
    h: &Hypothesis,
    tuples: &[Vec<String>],
    jobs: usize,
) -> Result<Vec<bool>, LearnError> {
    let digest = expr.digest();
    if digest != h.expr_digest {
        return Err(LearnError::ExpressionMismatch { expected: h.expr_digest.clone(), found: digest });
    }
    if let Some(t) = tuples.iter().find(|t| t.len() != h.k) {
        return Err(LearnError::Arity(format!("tuple {t:?} has arity {}, hypothesis has {}", t.len(), h.k)));
    }
    if tuples.is_empty() {
        return Ok(Vec::new());
    }
    let cfg = DpConfig { jobs, ..DpConfig::new(h.q, h.ell, h.set_budget) };
    let types = joint_types(store, expr, tuples, &h.params, cfg)?;
    match &h.formula {
        Some(text) => {
            let mut vocab = expr.labels_used();
            vocab.extend([LEFT_MARK.to_string(), RIGHT_MARK.to_string()]);
            let phi = parse_formula(text, &vocab).map_err(|e| LearnError::Parse { line: 0, msg: e.to_string() })?;
            let slots = standard_slots(h.k, h.ell);
            types.iter().map(|&t| Ok(type_satisfies(store, t, &phi, &slots)?)).collect()
        }
        None => Ok(types.iter().map(|&t| h.positive_types.contains(&store.digest_hex(t))).collect()),
    }
}

pub fn classify(store: &TypeStore, expr: &CwExpression, h: &Hypothesis, tuple: &[String]) -> Result<bool, LearnError> {
    Ok(classify_many(store, expr, h, &[tuple.to_vec()], 1)?[0])
}
