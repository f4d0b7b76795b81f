use std::collections::{BTreeMap, BTreeSet};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use rayon::prelude::*;
use rustc_hash::FxHashMap;

use crate::graph::{CwExpression, GraphError, IndexedGraph, LabeledGraph, Node};
use crate::types::{compute_type_indexed, TypeError, TypeId, TypeStore};

/// Parameters of one DP run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DpConfig {
    pub q: usize,
    pub ell: usize,
    pub budget: usize,
    /// Worker threads; 0 or 1 runs sequentially.
    pub jobs: usize,
    /// Abort once the store holds more interned types than this.
    pub max_types: Option<usize>,
}

impl DpConfig {
    pub fn new(q: usize, ell: usize, budget: usize) -> Self {
        DpConfig { q, ell, budget, jobs: 1, max_types: None }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum DpError {
    #[error("example vertex `{0}` is not a base vertex of the expression")]
    UnknownVertex(String),
    #[error("at most 63 slots per type are supported, got {0}")]
    TooManySlots(usize),
    #[error("type store exceeded the cap of {cap} interned types")]
    Cap { cap: usize },
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Type(#[from] TypeError),
}

/// One realizable tuple: a type per distinct example, plus the
/// lexicographically least parameter tuple (global vertex indices)
/// realizing it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Row {
    pub types: Box<[TypeId]>,
    pub witness: Box<[u32]>,
}

/// Root table of the DP: every type tuple realized over the examples by
/// some parameter tuple.
#[derive(Clone, Debug)]
pub struct RealizableTable {
    pub config: DpConfig,
    /// All vertex ids, sorted; witnesses index into this list.
    pub vertex_ids: Vec<String>,
    /// Distinct example tuples; `Row::types` follows this order.
    pub distinct: Vec<Vec<String>>,
    /// For each input example, its index in `distinct`.
    pub example_class: Vec<usize>,
    /// Rows sorted by witness.
    pub rows: Vec<Row>,
    /// Per node (arena order) and parameter count: number of stored tuples.
    pub node_counts: Vec<Vec<usize>>,
    /// Number of expression nodes processed.
    pub visits: usize,
}

impl RealizableTable {
    pub fn type_of(&self, row: &Row, example: usize) -> TypeId {
        row.types[self.example_class[example]]
    }

    pub fn witness_ids(&self, row: &Row) -> Vec<String> {
        row.witness.iter().map(|&i| self.vertex_ids[i as usize].clone()).collect()
    }

    pub fn max_node_count(&self) -> usize {
        self.node_counts.iter().flatten().copied().max().unwrap_or(0)
    }
}

/// Composition memo size above which the memo is dropped.
const COMPOSE_MEMO_LIMIT: usize = 1 << 22;

type Table = FxHashMap<Box<[TypeId]>, Box<[u32]>>;

/// Per node: the tables for 0..=ell parameters.
struct NodeTables(Vec<Table>);

/// Class structure of one node: examples restricted to the node's vertices,
/// grouped by the resulting vertex sequence.
struct NodeClasses {
    /// Class index per distinct example.
    of: Vec<usize>,
    /// Number of example slots per class.
    arity: Vec<usize>,
    /// Example positions present in this subtree, per distinct example.
    masks: Vec<u64>,
}

fn insert_min(table: &mut Table, key: Box<[TypeId]>, witness: Box<[u32]>) {
    match table.get_mut(&key) {
        Some(w) if witness < *w => *w = witness,
        Some(_) => {}
        None => {
            table.insert(key, witness);
        }
    }
}

struct Plan<'a> {
    expr: &'a CwExpression,
    store: &'a TypeStore,
    cfg: DpConfig,
    /// Global vertex index per base node.
    base_vertex: Vec<Option<u32>>,
    /// Distinct example tuples as global vertex indices.
    distinct: Vec<Vec<u32>>,
    classes: Vec<NodeClasses>,
    label_sets: Vec<BTreeSet<String>>,
    visits: AtomicUsize,
}

/// Runs the DP bottom-up and returns the root table for `cfg.ell` parameters.
pub fn realizable_tuples(
    store: &TypeStore,
    expr: &CwExpression,
    examples: &[Vec<String>],
    cfg: DpConfig,
) -> Result<RealizableTable, DpError> {
    let diags = expr.check_wellformed();
    if !diags.is_empty() {
        return Err(GraphError::Malformed(diags).into());
    }
    let mut vertex_ids: Vec<String> = expr.base_vertices().iter().map(|s| s.to_string()).collect();
    vertex_ids.sort();
    let index = |v: &str| vertex_ids.binary_search_by(|x| x.as_str().cmp(v)).ok();
    let mut distinct: Vec<Vec<String>> = Vec::new();
    let mut seen: BTreeMap<Vec<String>, usize> = BTreeMap::new();
    let mut example_class = Vec::with_capacity(examples.len());
    for e in examples {
        for v in e {
            if index(v).is_none() {
                return Err(DpError::UnknownVertex(v.clone()));
            }
        }
        let c = *seen.entry(e.clone()).or_insert_with(|| {
            distinct.push(e.clone());
            distinct.len() - 1
        });
        example_class.push(c);
    }
    let widest = distinct.iter().map(Vec::len).max().unwrap_or(0) + cfg.ell;
    if widest > 63 {
        return Err(DpError::TooManySlots(widest));
    }
    let distinct_idx: Vec<Vec<u32>> = distinct
        .iter()
        .map(|e| e.iter().map(|v| index(v).unwrap() as u32).collect())
        .collect();
    let base_vertex = expr
        .nodes()
        .iter()
        .map(|n| match n {
            Node::Base { vertex, .. } => index(vertex).map(|i| i as u32),
            _ => None,
        })
        .collect::<Vec<_>>();
    let classes = build_classes(expr, &base_vertex, &distinct_idx);
    let plan = Plan {
        expr,
        store,
        cfg,
        base_vertex,
        distinct: distinct_idx,
        classes,
        label_sets: expr.label_sets(),
        visits: AtomicUsize::new(0),
    };
    let (root, node_counts) = plan.run()?;
    let mut rows: Vec<Row> = root
        .0
        .into_iter()
        .nth(cfg.ell)
        .unwrap_or_default()
        .into_iter()
        .map(|(types, witness)| Row { types, witness })
        .collect();
    rows.sort_by(|a, b| a.witness.cmp(&b.witness));
    Ok(RealizableTable {
        config: cfg,
        vertex_ids,
        distinct,
        example_class,
        rows,
        node_counts,
        visits: plan.visits.load(Ordering::Relaxed),
    })
}

fn build_classes(expr: &CwExpression, base_vertex: &[Option<u32>], distinct: &[Vec<u32>]) -> Vec<NodeClasses> {
    let mut out: Vec<NodeClasses> = Vec::with_capacity(expr.size());
    for (i, n) in expr.nodes().iter().enumerate() {
        let masks: Vec<u64> = match n {
            Node::Base { .. } => {
                let v = base_vertex[i].expect("base vertex indexed");
                distinct
                    .iter()
                    .map(|e| e.iter().enumerate().filter(|(_, &x)| x == v).fold(0u64, |m, (p, _)| m | 1 << p))
                    .collect()
            }
            Node::Union(a, b) | Node::OrderedUnion(a, b) => {
                out[*a].masks.iter().zip(&out[*b].masks).map(|(x, y)| x | y).collect()
            }
            Node::Eta(_, _, c) | Node::Rho(_, _, c) | Node::Delta(_, c) => out[*c].masks.clone(),
        };
        let mut keys: BTreeMap<Vec<u32>, usize> = BTreeMap::new();
        let mut of = Vec::with_capacity(distinct.len());
        let mut arity = Vec::new();
        for (e, &m) in distinct.iter().zip(&masks) {
            let seq: Vec<u32> = (0..e.len()).filter(|p| m >> p & 1 == 1).map(|p| e[p]).collect();
            let next = keys.len();
            let c = *keys.entry(seq.clone()).or_insert(next);
            if c == arity.len() {
                arity.push(seq.len());
            }
            of.push(c);
        }
        out.push(NodeClasses { of, arity, masks });
    }
    out
}

impl Plan<'_> {
    fn run(&self) -> Result<(NodeTables, Vec<Vec<usize>>), DpError> {
        let nodes = self.expr.nodes();
        let slots: Vec<Mutex<Option<NodeTables>>> = (0..nodes.len()).map(|_| Mutex::new(None)).collect();
        let counts: Vec<Mutex<Vec<usize>>> = (0..nodes.len()).map(|_| Mutex::new(Vec::new())).collect();
        let compute = |i: usize| -> Result<(), DpError> {
            let t = self.node(i, &slots)?;
            *counts[i].lock().unwrap() = t.0.iter().map(|x| x.len()).collect();
            *slots[i].lock().unwrap() = Some(t);
            Ok(())
        };
        if self.cfg.jobs <= 1 {
            for i in 0..nodes.len() {
                compute(i)?;
            }
        } else {
            // Nodes of equal height are independent.
            let mut height = vec![0usize; nodes.len()];
            for (i, n) in nodes.iter().enumerate() {
                height[i] = n.children().iter().map(|&c| height[c] + 1).max().unwrap_or(0);
            }
            let top = height.iter().copied().max().unwrap_or(0);
            let mut levels: Vec<Vec<usize>> = vec![Vec::new(); top + 1];
            for (i, &h) in height.iter().enumerate() {
                levels[h].push(i);
            }
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(self.cfg.jobs)
                .build()
                .expect("thread pool");
            pool.install(|| {
                for level in &levels {
                    level.par_iter().try_for_each(|&i| compute(i))?;
                }
                Ok::<(), DpError>(())
            })?;
        }
        let root = slots[nodes.len() - 1].lock().unwrap().take().expect("root computed");
        let counts = counts.into_iter().map(|c| c.into_inner().unwrap()).collect();
        Ok((root, counts))
    }

    fn check_cap(&self) -> Result<(), DpError> {
        match self.cfg.max_types {
            Some(cap) if self.store.len() > cap => Err(DpError::Cap { cap }),
            _ => Ok(()),
        }
    }

    fn take(&self, slots: &[Mutex<Option<NodeTables>>], i: usize) -> NodeTables {
        slots[i].lock().unwrap().take().expect("child computed before parent")
    }

    fn node(&self, i: usize, slots: &[Mutex<Option<NodeTables>>]) -> Result<NodeTables, DpError> {
        self.visits.fetch_add(1, Ordering::Relaxed);
        self.check_cap()?;
        let store = self.store;
        let ell = self.cfg.ell;
        Ok(match &self.expr.nodes()[i] {
            Node::Base { labels, .. } => self.base(i, labels),
            Node::Eta(p, q, c) | Node::Rho(p, q, c) => {
                let child = self.take(slots, *c);
                let names: Vec<&String> = self.label_sets[*c].iter().collect();
                let col = |l: &String| names.binary_search(&l).expect("well-formed");
                let (cp, cq) = (col(p), col(q));
                let eta = matches!(self.expr.nodes()[i], Node::Eta(..));
                self.map_unary(child, |t| if eta { store.eta_cols(t, cp, cq) } else { store.rho_cols(t, cp, cq) })
            }
            Node::Delta(p, c) => {
                let child = self.take(slots, *c);
                let names: Vec<&String> = self.label_sets[*c].iter().collect();
                let cp = names.binary_search(&p).expect("well-formed");
                self.map_unary(child, |t| store.delta_col(t, cp))
            }
            Node::Union(a, b) | Node::OrderedUnion(a, b) => {
                let marked = matches!(self.expr.nodes()[i], Node::OrderedUnion(..));
                let left = self.take(slots, *a);
                let right = self.take(slots, *b);
                let cls = &self.classes[i];
                let (lc, rc) = (&self.classes[*a], &self.classes[*b]);
                // For every class: left class, right class, example side bits.
                let mut shape: Vec<Option<(usize, usize, u64, usize)>> = vec![None; cls.arity.len()];
                for (e, &c) in cls.of.iter().enumerate() {
                    if shape[c].is_some() {
                        continue;
                    }
                    let (m, mr) = (cls.masks[e], rc.masks[e]);
                    let mut sides = 0u64;
                    let mut slot = 0;
                    for p in 0..self.distinct[e].len() {
                        if m >> p & 1 == 1 {
                            if mr >> p & 1 == 1 {
                                sides |= 1 << slot;
                            }
                            slot += 1;
                        }
                    }
                    shape[c] = Some((lc.of[e], rc.of[e], sides, slot));
                }
                let shape: Vec<(usize, usize, u64, usize)> = shape.into_iter().map(|s| s.expect("class seen")).collect();
                let mut out = Vec::with_capacity(ell + 1);
                for lp in 0..=ell {
                    let mut table = Table::default();
                    for l1 in 0u64..(1 << lp) {
                        let na = l1.count_ones() as usize;
                        let nb = lp - na;
                        let (ta, tb) = (&left.0[na], &right.0[nb]);
                        if ta.is_empty() || tb.is_empty() {
                            continue;
                        }
                        // Parameter j goes right when bit j of l1 is clear.
                        let param_right: u64 = !l1 & ((1u64 << lp) - 1);
                        let sides: Vec<u64> = shape.iter().map(|&(_, _, s, k)| s | param_right << k).collect();
                        let mut ra: Vec<(&Box<[TypeId]>, &Box<[u32]>)> = ta.iter().collect();
                        let mut rb: Vec<(&Box<[TypeId]>, &Box<[u32]>)> = tb.iter().collect();
                        ra.sort_by(|x, y| x.1.cmp(y.1));
                        rb.sort_by(|x, y| x.1.cmp(y.1));
                        for (ka, wa) in &ra {
                            self.check_cap()?;
                            store.trim_compose_memo(COMPOSE_MEMO_LIMIT);
                            for (kb, wb) in &rb {
                                let mut key = Vec::with_capacity(shape.len());
                                for (c, &(lcl, rcl, _, _)) in shape.iter().enumerate() {
                                    key.push(store.compose(ka[lcl], kb[rcl], sides[c], marked)?);
                                }
                                let mut w = Vec::with_capacity(lp);
                                let (mut ia, mut ib) = (0, 0);
                                for j in 0..lp {
                                    if l1 >> j & 1 == 1 {
                                        w.push(wa[ia]);
                                        ia += 1;
                                    } else {
                                        w.push(wb[ib]);
                                        ib += 1;
                                    }
                                }
                                insert_min(&mut table, key.into(), w.into());
                            }
                        }
                    }
                    out.push(table);
                }
                NodeTables(out)
            }
        })
    }

    fn base(&self, i: usize, labels: &BTreeSet<String>) -> NodeTables {
        let v = self.base_vertex[i].expect("base vertex indexed");
        let mut g = LabeledGraph::new();
        g.add_vertex("v");
        for l in labels {
            g.add_label(l, "v").expect("vertex exists");
        }
        let ig = IndexedGraph::new(&g).expect("one vertex");
        let arity = &self.classes[i].arity;
        let mut out = Vec::with_capacity(self.cfg.ell + 1);
        for lp in 0..=self.cfg.ell {
            let key: Vec<TypeId> = arity
                .iter()
                .map(|&a| compute_type_indexed(self.store, &ig, &vec![0; a + lp], &[], self.cfg.q, self.cfg.budget))
                .collect();
            let mut t = Table::default();
            t.insert(key.into(), vec![v; lp].into());
            out.push(t);
        }
        NodeTables(out)
    }

    fn map_unary(&self, child: NodeTables, f: impl Fn(TypeId) -> TypeId) -> NodeTables {
        NodeTables(
            child
                .0
                .into_iter()
                .map(|table| {
                    let mut out = Table::default();
                    for (key, w) in table {
                        let k: Box<[TypeId]> = key.iter().map(|&t| f(t)).collect();
                        insert_min(&mut out, k, w);
                    }
                    out
                })
                .collect(),
        )
    }
}
