use std::collections::BTreeSet;

use crate::graph::{trivial_expression, CwExpression, LabeledGraph};
use crate::learn::{learn_1d, TrainingSequence};
use crate::logic::{fresh_name, pin_vertex_formula, Formula};
use crate::realizable::DpConfig;
use crate::types::TypeStore;

use super::gadget::{two_copy_expression, W1, W2};
use super::ReductionError;

/// How the learner is asked whether two vertices differ.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OracleMode {
    /// Type-based learner: answers iff the two rank-q types differ.
    Types,
    /// Bank learner with the single query formula, asked in both directions.
    Bank,
}

#[derive(Clone, Debug)]
pub struct McConfig {
    /// Largest candidate family allowed in one round of the set loop.
    pub cap: usize,
    pub mode: OracleMode,
    pub jobs: usize,
    /// Cap on interned types for every learner call.
    pub max_types: Option<usize>,
}

impl Default for McConfig {
    fn default() -> Self {
        McConfig { cap: 4096, mode: OracleMode::Types, jobs: 1, max_types: None }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct McStats {
    pub oracle_calls: usize,
    pub max_family: usize,
}

/// `E(a,a)` is false and `a = a` true everywhere.
fn drop_trivial_atoms(f: &Formula) -> Formula {
    use Formula::*;
    let r = |g: &Formula| Box::new(drop_trivial_atoms(g));
    match f {
        Eq(a, b) if a == b => True,
        Edge(a, b) if a == b => False,
        True | False | Eq(..) | Edge(..) | Label(..) | Member(..) => f.clone(),
        Not(a) => Not(r(a)),
        And(a, b) => And(r(a), r(b)),
        Or(a, b) => Or(r(a), r(b)),
        Implies(a, b) => Implies(r(a), r(b)),
        Iff(a, b) => Iff(r(a), r(b)),
        Exists(v, a) => Exists(v.clone(), r(a)),
        Forall(v, a) => Forall(v.clone(), r(a)),
        ExistsSet(v, a) => ExistsSet(v.clone(), r(a)),
        ForallSet(v, a) => ForallSet(v.clone(), r(a)),
    }
}

/// Replaces label atoms on the free variable `x` by their truth value for a
/// vertex carrying exactly `labels`.
fn fix_labels(f: &Formula, x: &str, labels: &BTreeSet<String>) -> Formula {
    use Formula::*;
    let r = |g: &Formula| Box::new(fix_labels(g, x, labels));
    match f {
        Label(l, v) if v == x => {
            if labels.contains(l) {
                True
            } else {
                False
            }
        }
        True | False | Eq(..) | Edge(..) | Label(..) | Member(..) => f.clone(),
        Not(a) => Not(r(a)),
        And(a, b) => And(r(a), r(b)),
        Or(a, b) => Or(r(a), r(b)),
        Implies(a, b) => Implies(r(a), r(b)),
        Iff(a, b) => Iff(r(a), r(b)),
        Exists(v, _) | Forall(v, _) if v == x => f.clone(),
        Exists(v, a) => Exists(v.clone(), r(a)),
        Forall(v, a) => Forall(v.clone(), r(a)),
        ExistsSet(v, a) => ExistsSet(v.clone(), r(a)),
        ForallSet(v, a) => ForallSet(v.clone(), r(a)),
    }
}

/// Restricts every quantifier of `f` to the neighbourhood of `x`.
fn relativize(f: &Formula, x: &str, u: &str) -> Formula {
    use Formula::*;
    let inside = |z: &str| Formula::forall(u, Formula::implies(Formula::member(z, u), Formula::edge(x, u)));
    match f {
        True | False | Eq(..) | Edge(..) | Label(..) | Member(..) => f.clone(),
        Not(a) => Formula::not(relativize(a, x, u)),
        And(a, b) => Formula::and(relativize(a, x, u), relativize(b, x, u)),
        Or(a, b) => Formula::or(relativize(a, x, u), relativize(b, x, u)),
        Implies(a, b) => Formula::implies(relativize(a, x, u), relativize(b, x, u)),
        Iff(a, b) => Formula::iff(relativize(a, x, u), relativize(b, x, u)),
        Exists(v, a) => Formula::exists(v, Formula::and(Formula::edge(x, v), relativize(a, x, u))),
        Forall(v, a) => Formula::forall(v, Formula::implies(Formula::edge(x, v), relativize(a, x, u))),
        ExistsSet(v, a) => Formula::exists_set(v, Formula::and(inside(v), relativize(a, x, u))),
        ForallSet(v, a) => Formula::forall_set(v, Formula::implies(inside(v), relativize(a, x, u))),
    }
}

struct Ctx<'a> {
    store: &'a TypeStore,
    cfg: &'a McConfig,
    stats: McStats,
}

impl Ctx<'_> {
    fn config(&self, q: usize, budget: usize) -> DpConfig {
        DpConfig { jobs: self.cfg.jobs, max_types: self.cfg.max_types, ..DpConfig::new(q, 0, budget) }
    }

    /// True when the learner finds a hypothesis separating `a` (positive)
    /// from `b` (negative).
    fn separated(
        &mut self,
        expr: &CwExpression,
        a: &str,
        b: &str,
        query: &Formula,
        x: &str,
    ) -> Result<bool, ReductionError> {
        let (q, budget) = (query.quantifier_rank(), query.set_depth());
        let cfg = self.config(q, budget);
        let ask = |pos: &str, neg: &str| {
            TrainingSequence::new(vec![(vec![pos.to_string()], true), (vec![neg.to_string()], false)])
                .expect("arity one")
        };
        match self.cfg.mode {
            OracleMode::Types => {
                self.stats.oracle_calls += 1;
                Ok(learn_1d(self.store, expr, &ask(a, b), cfg, None)?.is_some())
            }
            OracleMode::Bank => {
                let bank = [query.rename_free(x, "x1")];
                for (p, n) in [(a, b), (b, a)] {
                    self.stats.oracle_calls += 1;
                    if learn_1d(self.store, expr, &ask(p, n), cfg, Some(&bank))?.is_some() {
                        return Ok(true);
                    }
                }
                Ok(false)
            }
        }
    }

    fn check(&mut self, g: &LabeledGraph, phi: &Formula) -> Result<bool, ReductionError> {
        use Formula::*;
        Ok(match phi {
            True => true,
            False => false,
            Not(a) => !self.check(g, a)?,
            And(a, b) => self.check(g, a)? && self.check(g, b)?,
            Or(a, b) => self.check(g, a)? || self.check(g, b)?,
            Implies(a, b) => !self.check(g, a)? || self.check(g, b)?,
            Iff(a, b) => self.check(g, a)? == self.check(g, b)?,
            Forall(v, a) => !self.exists_vertex(g, v, &Formula::not((**a).clone()))?,
            ForallSet(v, a) => !self.exists_set(g, v, &Formula::not((**a).clone()))?,
            Exists(v, a) => self.exists_vertex(g, v, a)?,
            ExistsSet(v, a) => self.exists_set(g, v, a)?,
            Eq(..) | Edge(..) | Label(..) | Member(..) => {
                return Err(ReductionError::NotSentence(phi.to_string()));
            }
        })
    }

    fn fresh_labels(&self, g: &LabeledGraph, psi: &Formula, prefix: &str, count: usize) -> Vec<String> {
        let mut taken: BTreeSet<String> = g.label_names();
        taken.extend(psi.labels());
        (0..).map(|i| format!("{prefix}{i}")).filter(|l| !taken.contains(l)).take(count).collect()
    }

    /// One representative per vertex class, then recursion on the pinned
    /// sentence.
    fn exists_vertex(&mut self, g: &LabeledGraph, x: &str, psi: &Formula) -> Result<bool, ReductionError> {
        let expr = trivial_expression(g)?;
        let mut reps: Vec<String> = Vec::new();
        for v in g.vertices() {
            let mut known = false;
            for r in &reps {
                if !self.separated(&expr, v, r, psi, x)? {
                    known = true;
                    break;
                }
            }
            if !known {
                reps.push(v.to_string());
            }
        }
        let names = self.fresh_labels(g, psi, "Pin", 2);
        let (i_label, n_label) = (&names[0], &names[1]);
        for r in &reps {
            // Label atoms on x are read off r, so the pinned sentence is no
            // deeper than psi.
            let pinned = pin_vertex_formula(&fix_labels(psi, x, &g.labels_of(r)), x, i_label, n_label)?;
            let mut gv = g.clone();
            gv.declare_label(n_label);
            gv.add_label(i_label, r)?;
            for u in g.neighbors(r) {
                gv.add_label(n_label, &u)?;
            }
            if self.check(&gv, &pinned)? {
                return Ok(true);
            }
        }
        Ok(false)
    }

    /// Grows candidate sets one vertex at a time, keeping one set per class
    /// of "has a superset satisfying psi"-types, then checks the survivors.
    fn exists_set(&mut self, g: &LabeledGraph, set: &str, psi: &Formula) -> Result<bool, ReductionError> {
        let base = trivial_expression(g)?;
        let c = self.fresh_labels(g, psi, "Cand", 1).remove(0);
        let mut used = psi.all_var_names();
        used.insert(set.to_string());
        let (x, u) = (fresh_name("x", &mut used), fresh_name("u", &mut used));
        let body = relativize(psi, &x, &u);
        let covers = Formula::forall(
            &u,
            Formula::implies(Formula::and(Formula::label(&c, &u), Formula::edge(&x, &u)), Formula::member(set, &u)),
        );
        let within = Formula::forall(&u, Formula::implies(Formula::member(set, &u), Formula::edge(&x, &u)));
        // X ⊆ C restricts the superset query to exactly the marked set.
        let only = Formula::forall(&u, Formula::implies(Formula::member(set, &u), Formula::label(&c, &u)));
        let superset = Formula::exists_set(set, Formula::and_all([covers.clone(), within.clone(), body.clone()]));
        let exact = Formula::exists_set(set, Formula::and_all([covers, within, only, body]));
        let vertices: Vec<String> = g.vertices().map(str::to_string).collect();
        let mut family: Vec<BTreeSet<String>> = vec![BTreeSet::new()];
        let mut all = family.clone();
        for _round in 0..vertices.len() {
            let mut cands: BTreeSet<BTreeSet<String>> = BTreeSet::new();
            for d in &family {
                for v in &vertices {
                    if !d.contains(v) {
                        let mut e = d.clone();
                        e.insert(v.clone());
                        cands.insert(e);
                    }
                }
            }
            if cands.len() > self.cfg.cap {
                return Err(ReductionError::Cap { family: cands.len(), cap: self.cfg.cap });
            }
            self.stats.max_family = self.stats.max_family.max(cands.len());
            family = self.dedupe(&base, cands.into_iter().collect(), &superset, &x, &c)?;
            all.extend(family.iter().cloned());
            if family.is_empty() {
                break;
            }
        }
        let survivors = self.dedupe(&base, all, &exact, &x, &c)?;
        let label = self.fresh_labels(g, psi, "Set", 1).remove(0);
        let sentence = drop_trivial_atoms(&psi.set_var_to_label(set, &label));
        for d in survivors {
            let mut gd = g.clone();
            gd.declare_label(&label);
            for v in &d {
                gd.add_label(&label, v)?;
            }
            if self.check(&gd, &sentence)? {
                return Ok(true);
            }
        }
        Ok(false)
    }

    /// Keeps a set only if the learner separates it from every kept set.
    fn dedupe(
        &mut self,
        base: &CwExpression,
        sets: Vec<BTreeSet<String>>,
        query: &Formula,
        x: &str,
        c: &str,
    ) -> Result<Vec<BTreeSet<String>>, ReductionError> {
        let mut kept: Vec<BTreeSet<String>> = Vec::new();
        for s in sets {
            let mut new = true;
            for k in &kept {
                let gadget = two_copy_expression(base, k, &s, c)?;
                if !self.separated(&gadget, W1, W2, query, x)? {
                    new = false;
                    break;
                }
            }
            if new {
                kept.push(s);
            }
        }
        Ok(kept)
    }
}

/// Decides `g |= phi` using only the one-dimensional learner on derived
/// graphs, plus recursion.
pub fn mc_via_learning(
    store: &TypeStore,
    g: &LabeledGraph,
    phi: &Formula,
    cfg: &McConfig,
) -> Result<(bool, McStats), ReductionError> {
    if !phi.is_sentence() {
        return Err(ReductionError::NotSentence(phi.to_string()));
    }
    let mut ctx = Ctx { store, cfg, stats: McStats::default() };
    let v = ctx.check(g, &drop_trivial_atoms(phi))?;
    Ok((v, ctx.stats))
}
