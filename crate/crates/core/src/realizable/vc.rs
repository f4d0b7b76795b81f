use std::collections::BTreeSet;

use crate::graph::{GraphError, IndexedGraph, LabeledGraph};
use crate::logic::{eval_indexed, free_var_names, Assignment, Formula};

use super::RealizableTable;

/// Label patterns `{ X ∩ [[phi(·, w)]] : w }` over all parameter tuples.
fn patterns(g: &IndexedGraph, phi: &Formula, points: &[Vec<usize>], k: usize, ell: usize) -> BTreeSet<Vec<bool>> {
    let vars = free_var_names(k, ell);
    let n = g.n();
    let mut out = BTreeSet::new();
    let mut w = vec![0usize; ell];
    loop {
        let row: Vec<bool> = points
            .iter()
            .map(|p| {
                let mut a = Assignment::new();
                for (var, &v) in vars.iter().zip(p.iter().chain(w.iter())) {
                    a = a.with(var, &g.ids[v]);
                }
                eval_indexed(g, phi, &a).expect("formula fits the graph")
            })
            .collect();
        out.insert(row);
        if !odometer(&mut w, n) {
            return out;
        }
    }
}

fn odometer(w: &mut [usize], n: usize) -> bool {
    for d in w.iter_mut().rev() {
        *d += 1;
        if *d < n {
            return true;
        }
        *d = 0;
    }
    false
}

/// Number of distinct subsets of `x` cut out by `phi` as the parameters vary.
pub fn shatter_count(g: &LabeledGraph, phi: &Formula, x: &[Vec<String>], ell: usize) -> Result<usize, GraphError> {
    let ig = IndexedGraph::new(g)?;
    let k = x.first().map_or(0, Vec::len);
    let points = x
        .iter()
        .map(|t| t.iter().map(|v| ig.index_of(v).ok_or_else(|| GraphError::UnknownVertex(v.clone()))).collect())
        .collect::<Result<Vec<Vec<usize>>, _>>()?;
    Ok(patterns(&ig, phi, &points, k, ell).len())
}

/// Largest `d ≤ maxd` such that some `d` tuples of `V^k` are shattered.
pub fn vc_dimension(g: &LabeledGraph, phi: &Formula, k: usize, ell: usize, maxd: usize) -> Result<usize, GraphError> {
    let ig = IndexedGraph::new(g)?;
    let n = ig.n();
    let mut domain = Vec::new();
    let mut t = vec![0usize; k];
    loop {
        domain.push(t.clone());
        if !odometer(&mut t, n) {
            break;
        }
    }
    // Each concept as its member set, one per parameter tuple.
    let concepts = patterns(&ig, phi, &domain, k, ell);
    let shattered = |xs: &[usize]| {
        let hit: BTreeSet<Vec<bool>> = concepts.iter().map(|c| xs.iter().map(|&i| c[i]).collect()).collect();
        hit.len() == 1 << xs.len()
    };
    // Shattering is hereditary, so grow from shattered sets of one size less.
    let mut level: Vec<Vec<usize>> = vec![Vec::new()];
    if !shattered(&[]) {
        return Ok(0);
    }
    let mut d = 0;
    while d < maxd {
        let mut next = Vec::new();
        for s in &level {
            let start = s.last().map_or(0, |&l| l + 1);
            for i in start..domain.len() {
                let mut c = s.clone();
                c.push(i);
                if shattered(&c) {
                    next.push(c);
                }
            }
        }
        if next.is_empty() {
            break;
        }
        level = next;
        d += 1;
    }
    Ok(d)
}

#[derive(Debug, PartialEq, Eq, thiserror::Error)]
pub enum MatrixError {
    #[error("columns {0} and {1} are equal")]
    DuplicateColumns(usize, usize),
    #[error("rows have different lengths")]
    Ragged,
}

/// Given a matrix with pairwise distinct columns (`rows[i][j]` is row `i`,
/// column `j`), finds a symbol whose indicator matrix has at least `c`
/// distinct columns. Symbols are tried in increasing order.
pub fn distinct_column_symbol<T: Ord + Clone>(rows: &[Vec<T>], c: usize) -> Result<Option<T>, MatrixError> {
    let n = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != n) {
        return Err(MatrixError::Ragged);
    }
    let column = |j: usize| rows.iter().map(|r| r[j].clone()).collect::<Vec<T>>();
    let mut seen = std::collections::BTreeMap::new();
    for j in 0..n {
        if let Some(&i) = seen.get(&column(j)) {
            return Err(MatrixError::DuplicateColumns(i, j));
        }
        seen.insert(column(j), j);
    }
    let symbols: BTreeSet<T> = rows.iter().flatten().cloned().collect();
    for s in symbols {
        let cols: BTreeSet<Vec<bool>> = (0..n).map(|j| rows.iter().map(|r| r[j] == s).collect()).collect();
        if cols.len() >= c {
            return Ok(Some(s));
        }
    }
    Ok(None)
}

/// `Σ_{i≤d} C(m,i)`, saturating.
pub fn sauer_shelah_bound(m: usize, d: usize) -> u128 {
    let mut sum: u128 = 0;
    let mut binom: u128 = 1;
    for i in 0..=d.min(m) {
        if i > 0 {
            binom = binom.saturating_mul((m - i + 1) as u128) / i as u128;
        }
        sum = sum.saturating_add(binom);
    }
    sum
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CountReport {
    /// Largest stored tuple count per node.
    pub per_node: Vec<usize>,
    pub max: usize,
    pub bound: u128,
    /// Nodes whose count exceeds the bound. Informational only.
    pub flagged: Vec<usize>,
}

/// Compares the DP's per-node counts with `(k+1)·(Σ_{i≤d} C(m,i))^t`.
pub fn count_diagnostics(table: &RealizableTable, d: usize, m: usize, k: usize, t: usize) -> CountReport {
    let g = sauer_shelah_bound(m, d);
    let mut bound = (k as u128 + 1).max(1);
    for _ in 0..t {
        bound = bound.saturating_mul(g);
    }
    let per_node: Vec<usize> = table.node_counts.iter().map(|c| c.iter().copied().max().unwrap_or(0)).collect();
    let flagged = per_node.iter().enumerate().filter(|(_, &c)| c as u128 > bound).map(|(i, _)| i).collect();
    CountReport { max: per_node.iter().copied().max().unwrap_or(0), per_node, bound, flagged }
}
