use std::collections::{BTreeMap, BTreeSet};

use crate::graph::{GraphError, IndexedGraph, LabeledGraph};

use super::Formula;

/// Values for the free variables of a formula.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Assignment {
    pub individual: BTreeMap<String, String>,
    pub sets: BTreeMap<String, BTreeSet<String>>,
}

impl Assignment {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, var: &str, vertex: &str) -> Self {
        self.individual.insert(var.to_string(), vertex.to_string());
        self
    }

    pub fn with_set<I, S>(mut self, var: &str, vertices: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.sets.insert(var.to_string(), vertices.into_iter().map(Into::into).collect());
        self
    }
}

#[derive(Debug, thiserror::Error)]
pub enum EvalError {
    #[error("free variable `{0}` has no value")]
    Uncovered(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Formula with variables resolved to environment slots.
enum Compiled {
    Const(bool),
    Eq(usize, usize),
    Edge(usize, usize),
    Label(Option<usize>, usize),
    Member(usize, usize),
    Not(Box<Compiled>),
    And(Box<Compiled>, Box<Compiled>),
    Or(Box<Compiled>, Box<Compiled>),
    Implies(Box<Compiled>, Box<Compiled>),
    Iff(Box<Compiled>, Box<Compiled>),
    Exists(usize, Box<Compiled>),
    Forall(usize, Box<Compiled>),
    ExistsSet(usize, Box<Compiled>),
    ForallSet(usize, Box<Compiled>),
}

struct Slots {
    ind: BTreeMap<String, usize>,
    sets: BTreeMap<String, usize>,
}

impl Slots {
    fn ind(&mut self, v: &str) -> usize {
        let n = self.ind.len();
        *self.ind.entry(v.to_string()).or_insert(n)
    }

    fn set(&mut self, v: &str) -> usize {
        let n = self.sets.len();
        *self.sets.entry(v.to_string()).or_insert(n)
    }
}

fn compile(f: &Formula, g: &IndexedGraph, slots: &mut Slots) -> Compiled {
    use Compiled as C;
    let bx = |f: &Formula, slots: &mut Slots| Box::new(compile(f, g, slots));
    match f {
        Formula::True => C::Const(true),
        Formula::False => C::Const(false),
        Formula::Eq(a, b) => C::Eq(slots.ind(a), slots.ind(b)),
        Formula::Edge(a, b) => C::Edge(slots.ind(a), slots.ind(b)),
        Formula::Label(l, v) => C::Label(g.label_index(l), slots.ind(v)),
        Formula::Member(s, v) => C::Member(slots.set(s), slots.ind(v)),
        Formula::Not(a) => C::Not(bx(a, slots)),
        Formula::And(a, b) => C::And(bx(a, slots), bx(b, slots)),
        Formula::Or(a, b) => C::Or(bx(a, slots), bx(b, slots)),
        Formula::Implies(a, b) => C::Implies(bx(a, slots), bx(b, slots)),
        Formula::Iff(a, b) => C::Iff(bx(a, slots), bx(b, slots)),
        Formula::Exists(v, a) => C::Exists(slots.ind(v), bx(a, slots)),
        Formula::Forall(v, a) => C::Forall(slots.ind(v), bx(a, slots)),
        Formula::ExistsSet(v, a) => C::ExistsSet(slots.set(v), bx(a, slots)),
        Formula::ForallSet(v, a) => C::ForallSet(slots.set(v), bx(a, slots)),
    }
}

struct Env<'g> {
    g: &'g IndexedGraph,
    ind: Vec<usize>,
    sets: Vec<u64>,
}

impl Env<'_> {
    fn eval(&mut self, c: &Compiled) -> bool {
        use Compiled as C;
        match c {
            C::Const(b) => *b,
            C::Eq(a, b) => self.ind[*a] == self.ind[*b],
            C::Edge(a, b) => self.g.has_edge(self.ind[*a], self.ind[*b]),
            C::Label(l, v) => l.is_some_and(|l| self.g.has_label(l, self.ind[*v])),
            C::Member(s, v) => self.sets[*s] >> self.ind[*v] & 1 == 1,
            C::Not(a) => !self.eval(a),
            C::And(a, b) => self.eval(a) && self.eval(b),
            C::Or(a, b) => self.eval(a) || self.eval(b),
            C::Implies(a, b) => !self.eval(a) || self.eval(b),
            C::Iff(a, b) => self.eval(a) == self.eval(b),
            C::Exists(v, a) | C::Forall(v, a) => {
                let want = matches!(c, C::Exists(..));
                let saved = self.ind[*v];
                let mut hit = false;
                for u in 0..self.g.n() {
                    self.ind[*v] = u;
                    if self.eval(a) == want {
                        hit = true;
                        break;
                    }
                }
                self.ind[*v] = saved;
                hit == want
            }
            C::ExistsSet(s, a) | C::ForallSet(s, a) => {
                let want = matches!(c, C::ExistsSet(..));
                let saved = self.sets[*s];
                let mut hit = false;
                // Subsets in increasing bitmask order.
                let full = self.g.full();
                let mut mask = 0u64;
                loop {
                    self.sets[*s] = mask;
                    if self.eval(a) == want {
                        hit = true;
                        break;
                    }
                    if mask == full {
                        break;
                    }
                    mask += 1;
                }
                self.sets[*s] = saved;
                hit == want
            }
        }
    }
}

/// Evaluates `phi` on an already indexed graph.
pub fn eval_indexed(g: &IndexedGraph, phi: &Formula, alpha: &Assignment) -> Result<bool, EvalError> {
    let mut slots = Slots { ind: BTreeMap::new(), sets: BTreeMap::new() };
    let fv = phi.free_vars();
    let mut ind = Vec::new();
    let mut sets = Vec::new();
    for v in &fv.individual {
        let id = alpha.individual.get(v).ok_or_else(|| EvalError::Uncovered(v.clone()))?;
        let idx = g.index_of(id).ok_or_else(|| GraphError::UnknownVertex(id.clone()))?;
        slots.ind(v);
        ind.push(idx);
    }
    for s in &fv.sets {
        let members = alpha.sets.get(s).ok_or_else(|| EvalError::Uncovered(s.clone()))?;
        let mut mask = 0u64;
        for id in members {
            let idx = g.index_of(id).ok_or_else(|| GraphError::UnknownVertex(id.clone()))?;
            mask |= 1 << idx;
        }
        slots.set(s);
        sets.push(mask);
    }
    let c = compile(phi, g, &mut slots);
    ind.resize(slots.ind.len(), 0);
    sets.resize(slots.sets.len(), 0);
    Ok(Env { g, ind, sets }.eval(&c))
}

/// Brute-force MSO semantics. Set quantifiers try subsets in increasing
/// bitmask order over the id-sorted vertex list.
pub fn eval_formula(g: &LabeledGraph, phi: &Formula, alpha: &Assignment) -> Result<bool, EvalError> {
    eval_indexed(&IndexedGraph::new(g)?, phi, alpha)
}
