use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::cexpr::{CwExpression, Node};
use super::labeled::LabeledGraph;
use super::GraphError;

fn fresh_label(prefix: &str, taken: &BTreeSet<String>) -> String {
    (0..)
        .map(|i| format!("{prefix}{i}"))
        .find(|l| !taken.contains(l))
        .expect("unbounded supply")
}

/// An n-expression for `g`: one helper label per vertex, one η per edge,
/// then the helpers are deleted. Labels declared with an empty extension
/// are kept declared.
pub fn trivial_expression(g: &LabeledGraph) -> Result<CwExpression, GraphError> {
    let ids: Vec<&str> = g.vertices().collect();
    if ids.is_empty() {
        return Err(GraphError::Empty);
    }
    if let Some(l) = g.label_names().into_iter().find(|l| l.starts_with('@')) {
        return Err(GraphError::Format(format!("label `{l}` uses the reserved `@` prefix")));
    }
    let empty: Vec<String> = g
        .labels()
        .iter()
        .filter(|(_, s)| s.is_empty())
        .map(|(l, _)| l.clone())
        .collect();
    if ids.len() == 1 && empty.is_empty() {
        return Ok(CwExpression::base(ids[0], g.labels_of(ids[0])));
    }
    let mut taken = g.label_names();
    let helpers: Vec<String> = ids
        .iter()
        .map(|_| {
            let h = fresh_label("_h", &taken);
            taken.insert(h.clone());
            h
        })
        .collect();
    let mut expr: Option<CwExpression> = None;
    for (i, v) in ids.iter().enumerate() {
        let mut labels = g.labels_of(v);
        labels.insert(helpers[i].clone());
        if i == 0 {
            labels.extend(empty.iter().cloned());
        }
        let b = CwExpression::base(v, labels);
        expr = Some(match expr {
            None => b,
            Some(e) => e.union(b),
        });
    }
    let mut expr = expr.expect("nonempty");
    let index = |v: &str| ids.binary_search(&v).expect("edge endpoint is a vertex");
    for (a, b) in g.edges() {
        expr = expr.eta(&helpers[index(a)], &helpers[index(b)]);
    }
    for l in &empty {
        expr = expr.rho(l, &helpers[0]);
    }
    for h in &helpers {
        expr = expr.delta(h);
    }
    Ok(expr)
}

fn vertex_ids(n: usize) -> Vec<String> {
    let width = n.to_string().len();
    (0..n).map(|i| format!("v{i:0width$}")).collect()
}

/// Random cograph expression over labels {A, B}.
pub fn gen_cograph(n: usize, seed: u64) -> Result<CwExpression, GraphError> {
    if n == 0 {
        return Err(GraphError::Empty);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ids = vertex_ids(n);
    // Explicit work stack; each frame builds ids[lo..hi] with every vertex
    // labeled `a` at the end.
    enum Task {
        Build { lo: usize, hi: usize, a: bool },
        Finish { join: bool, a: bool },
    }
    let label = |a: bool| if a { "A" } else { "B" };
    let mut tasks = vec![Task::Build { lo: 0, hi: n, a: true }];
    let mut done: Vec<CwExpression> = Vec::new();
    while let Some(t) = tasks.pop() {
        match t {
            Task::Build { lo, hi, a } => {
                if hi - lo == 1 {
                    done.push(CwExpression::base(&ids[lo], [label(a)]));
                    continue;
                }
                let mid = rng.gen_range(lo + 1..hi);
                let join = rng.gen_bool(0.5);
                tasks.push(Task::Finish { join, a });
                let right = if join { !a } else { a };
                tasks.push(Task::Build { lo: mid, hi, a: right });
                tasks.push(Task::Build { lo, hi: mid, a });
            }
            Task::Finish { join, a } => {
                let right = done.pop().expect("right operand");
                let left = done.pop().expect("left operand");
                let mut e = left.union(right);
                if join {
                    e = e.eta("A", "B").rho(label(!a), label(a));
                }
                done.push(e);
            }
        }
    }
    Ok(done.pop().expect("root"))
}

/// Random expression over labels {A, B} mixing every operator, including
/// ordered unions whose marks are consumed right away.
pub fn random_expression(n: usize, seed: u64) -> Result<CwExpression, GraphError> {
    if n == 0 {
        return Err(GraphError::Empty);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pool: Vec<CwExpression> = vertex_ids(n)
        .iter()
        .map(|v| {
            let labels: Vec<&str> = ["A", "B"].into_iter().filter(|_| rng.gen_bool(0.5)).collect();
            CwExpression::base(v, labels)
        })
        .collect();
    let has = |e: &CwExpression, l: &str| e.label_sets().last().is_some_and(|s| s.contains(l));
    while pool.len() > 1 {
        let a = pool.swap_remove(rng.gen_range(0..pool.len()));
        let b = pool.swap_remove(rng.gen_range(0..pool.len()));
        let mut e = if rng.gen_bool(0.3) {
            let mut e = a.ordered_union(b);
            if rng.gen_bool(0.5) {
                e = e.eta("@L", "@R");
            }
            for (mark, target) in [("@L", "A"), ("@R", "B")] {
                e = if has(&e, target) && rng.gen_bool(0.5) { e.rho(mark, target).delta(mark) } else { e.delta(mark) };
            }
            e
        } else {
            a.union(b)
        };
        for _ in 0..rng.gen_range(0..3) {
            let (ha, hb) = (has(&e, "A"), has(&e, "B"));
            e = match rng.gen_range(0..4) {
                0 if ha && hb => e.eta("A", "B"),
                1 if ha && hb => e.rho("A", "B"),
                2 if ha && hb => e.rho("B", "A"),
                3 if ha && rng.gen_bool(0.3) => e.delta("A"),
                _ => e,
            };
        }
        pool.push(e);
    }
    Ok(pool.pop().expect("root"))
}

/// Random tree expression over labels {A, B, C}: C marks finished
/// vertices, A and B alternate as the label of the current subtree root.
pub fn gen_tree(n: usize, seed: u64) -> Result<CwExpression, GraphError> {
    if n == 0 {
        return Err(GraphError::Empty);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ids = vertex_ids(n);
    let mut children: Vec<Vec<usize>> = vec![Vec::new(); n];
    for i in 1..n {
        let p = rng.gen_range(0..i);
        children[p].push(i);
    }
    // Post-order over the rooted tree with an explicit stack.
    let mut depth = vec![0usize; n];
    let mut order = Vec::with_capacity(n);
    let mut stack = vec![0usize];
    while let Some(v) = stack.pop() {
        order.push(v);
        for &c in &children[v] {
            depth[c] = depth[v] + 1;
            stack.push(c);
        }
    }
    let root_label = |v: usize| if depth[v] % 2 == 0 { "A" } else { "B" };
    let mut built: Vec<Option<CwExpression>> = vec![None; n];
    for &v in order.iter().rev() {
        let x = root_label(v);
        let mut e = CwExpression::base(&ids[v], [x, "C"]);
        for &c in &children[v] {
            let y = root_label(c);
            let sub = built[c].take().expect("child built first");
            e = e.union(sub).eta(x, y).rho(y, "C");
        }
        built[v] = Some(e);
    }
    Ok(built[0].take().expect("root"))
}

fn add_base_label(expr: &mut CwExpression, v: &str, label: &str) -> Result<(), GraphError> {
    for node in expr.nodes_mut().iter_mut() {
        if let Node::Base { vertex, labels } = node {
            if vertex == v {
                labels.insert(label.to_string());
                return Ok(());
            }
        }
    }
    Err(GraphError::UnknownVertex(v.to_string()))
}

fn check_fresh(expr: &CwExpression, label: &str) -> Result<(), GraphError> {
    if label.starts_with('@') || expr.labels_used().contains(label) {
        return Err(GraphError::LabelInUse(label.to_string()));
    }
    Ok(())
}

/// Adds the fresh label `label` to the base node of `v`.
pub fn mark_vertex(expr: &CwExpression, v: &str, label: &str) -> Result<CwExpression, GraphError> {
    check_fresh(expr, label)?;
    let mut out = expr.clone();
    add_base_label(&mut out, v, label)?;
    Ok(out)
}

/// Adds the fresh label `label` to the base nodes of all of `vs`.
pub fn mark_vertices(expr: &CwExpression, vs: &[String], label: &str) -> Result<CwExpression, GraphError> {
    check_fresh(expr, label)?;
    let mut out = expr.clone();
    for v in vs {
        add_base_label(&mut out, v, label)?;
    }
    Ok(out)
}

/// Declares `label` with an empty extension at the root: it is placed on
/// some base vertex together with a throwaway helper, moved onto the helper
/// and the helper deleted.
fn declare_empty(expr: CwExpression, label: &str) -> CwExpression {
    let mut taken = expr.labels_used();
    taken.insert(label.to_string());
    let helper = fresh_label("_e", &taken);
    let mut out = expr;
    let first = out.base_vertices()[0].to_string();
    add_base_label(&mut out, &first, label).expect("vertex exists");
    add_base_label(&mut out, &first, &helper).expect("vertex exists");
    out.rho(label, &helper).delta(&helper)
}

/// Marks positive example vertices with `p` and negative ones with `n`.
/// Both labels are declared even when their extension is empty.
pub fn encode_training_labels(
    expr: &CwExpression,
    examples: &[(String, bool)],
    p: &str,
    n: &str,
) -> Result<CwExpression, GraphError> {
    if p == n {
        return Err(GraphError::LabelInUse(p.to_string()));
    }
    check_fresh(expr, p)?;
    check_fresh(expr, n)?;
    let mut out = expr.clone();
    for (v, positive) in examples {
        add_base_label(&mut out, v, if *positive { p } else { n })?;
    }
    for (l, sign) in [(p, true), (n, false)] {
        if !examples.iter().any(|(_, s)| *s == sign) {
            out = declare_empty(out, l);
        }
    }
    Ok(out)
}
