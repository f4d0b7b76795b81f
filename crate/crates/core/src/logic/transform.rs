use std::collections::BTreeSet;

use super::formula::{fresh_name, Formula};

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum TransformError {
    #[error("label `{0}` already occurs in the formula")]
    LabelClash(String),
    #[error("atom `{0} = {0}` on the pinned variable")]
    SelfEquality(String),
    #[error("degree formulas need k >= 1")]
    ZeroDegree,
    #[error("variable `{0}` is not an individual variable of the formula")]
    NotFree(String),
}

/// `all x. ((P(x) -> phi) & (N(x) -> !phi))`: true for a parameter choice
/// exactly when `phi` agrees with every example encoded by `P` and `N`.
pub fn encode_examples_formula(
    phi: &Formula,
    x: &str,
    p: &str,
    n: &str,
) -> Result<Formula, TransformError> {
    let used = phi.labels();
    for l in [p, n] {
        if used.contains(l) {
            return Err(TransformError::LabelClash(l.to_string()));
        }
    }
    if p == n {
        return Err(TransformError::LabelClash(p.to_string()));
    }
    Ok(Formula::forall(
        x,
        Formula::and(
            Formula::implies(Formula::label(p, x), phi.clone()),
            Formula::implies(Formula::label(n, x), Formula::not(phi.clone())),
        ),
    ))
}

/// Replaces the free individual variables `params` by free set variables
/// that must be singletons. Returns the formula and the set-variable names
/// in parameter order.
///
/// The rank is `qr(phi2) + l` when it is at least 2, else `l + 2`.
pub fn singletonize(phi2: &Formula, params: &[String]) -> (Formula, Vec<String>) {
    if params.is_empty() {
        return (phi2.clone(), Vec::new());
    }
    let mut used = phi2.all_var_names();
    used.extend(params.iter().cloned());
    let sets: Vec<String> = params.iter().map(|_| fresh_name("S", &mut used)).collect();
    let (u, v) = (fresh_name("u", &mut used), fresh_name("u", &mut used));
    let sing = |set: &str, y: &str| {
        Formula::and(
            Formula::member(set, y),
            Formula::forall(
                &u,
                Formula::forall(
                    &v,
                    Formula::implies(
                        Formula::and(Formula::member(set, &u), Formula::member(set, &v)),
                        Formula::eq(&u, &v),
                    ),
                ),
            ),
        )
    };
    let body = Formula::and(
        Formula::and_all(params.iter().zip(&sets).map(|(y, s)| sing(s, y))),
        phi2.clone(),
    );
    let out = params.iter().rev().fold(body, |acc, y| Formula::exists(y, acc));
    (out, sets)
}

/// Eliminates the free variable `x` using labels `i_label` (marks the chosen
/// vertex) and `n_label` (marks its neighbours).
///
/// Equalities and edges with `x` become label atoms. Label and membership
/// atoms on `x` itself are read off the marked vertex through one extra
/// existential quantifier.
pub fn pin_vertex_formula(
    psi: &Formula,
    x: &str,
    i_label: &str,
    n_label: &str,
) -> Result<Formula, TransformError> {
    let labels = psi.labels();
    for l in [i_label, n_label] {
        if labels.contains(l) {
            return Err(TransformError::LabelClash(l.to_string()));
        }
    }
    let mut used = psi.all_var_names();
    let z = fresh_name("z", &mut used);
    pin_rec(psi, x, i_label, n_label, &z)
}

fn pin_rec(f: &Formula, x: &str, i: &str, n: &str, z: &str) -> Result<Formula, TransformError> {
    use Formula::*;
    let at_marked = |atom: Formula| Formula::exists(z, Formula::and(Formula::label(i, z), atom));
    let rec = |g: &Formula| pin_rec(g, x, i, n, z);
    Ok(match f {
        Eq(a, b) if a == x && b == x => return Err(TransformError::SelfEquality(x.to_string())),
        Eq(a, b) if a == x => Formula::label(i, b),
        Eq(a, b) if b == x => Formula::label(i, a),
        Edge(a, b) if a == x && b == x => False,
        Edge(a, b) if a == x => Formula::label(n, b),
        Edge(a, b) if b == x => Formula::label(n, a),
        Label(l, v) if v == x => at_marked(Formula::label(l, z)),
        Member(s, v) if v == x => at_marked(Formula::member(s, z)),
        True | False | Eq(..) | Edge(..) | Label(..) | Member(..) => f.clone(),
        Not(a) => Formula::not(rec(a)?),
        And(a, b) => Formula::and(rec(a)?, rec(b)?),
        Or(a, b) => Formula::or(rec(a)?, rec(b)?),
        Implies(a, b) => Formula::implies(rec(a)?, rec(b)?),
        Iff(a, b) => Formula::iff(rec(a)?, rec(b)?),
        Exists(v, _) | Forall(v, _) if v == x => f.clone(),
        Exists(v, a) => Formula::exists(v, rec(a)?),
        Forall(v, a) => Formula::forall(v, rec(a)?),
        ExistsSet(v, a) => Formula::exists_set(v, rec(a)?),
        ForallSet(v, a) => Formula::forall_set(v, rec(a)?),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DegMode {
    AtLeast,
    Exactly,
}

/// `deg>=k(x)` or `deg=k(x)`.
pub fn deg_formula(k: usize, mode: DegMode, x: &str) -> Result<Formula, TransformError> {
    if k == 0 {
        return Err(TransformError::ZeroDegree);
    }
    let at_least = |k: usize| {
        let mut used = BTreeSet::from([x.to_string()]);
        let ys: Vec<String> = (0..k).map(|_| fresh_name("d", &mut used)).collect();
        let mut parts = Vec::new();
        for a in 0..k {
            for b in a + 1..k {
                parts.push(Formula::not(Formula::eq(&ys[a], &ys[b])));
            }
        }
        parts.extend(ys.iter().map(|y| Formula::edge(x, y)));
        ys.iter().rev().fold(Formula::and_all(parts), |acc, y| Formula::exists(y, acc))
    };
    Ok(match mode {
        DegMode::AtLeast => at_least(k),
        DegMode::Exactly => Formula::and(at_least(k), Formula::not(at_least(k + 1))),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::LabeledGraph;
    use crate::logic::{eval_formula, parse_formula, Assignment};

    fn vocab() -> BTreeSet<String> {
        ["A"].into_iter().map(String::from).collect()
    }

    #[test]
    fn encode_rank_and_clash() {
        let phi = parse_formula("ex a. ex b. ex c. (E(x,a) & A(c))", &vocab()).unwrap();
        let enc = encode_examples_formula(&phi, "x", "P", "N").unwrap();
        assert_eq!(enc.quantifier_rank(), 4);
        assert_eq!(
            encode_examples_formula(&phi, "x", "A", "N"),
            Err(TransformError::LabelClash("A".into()))
        );
    }

    #[test]
    fn singleton_shape() {
        let phi = parse_formula("E(y1,y2)", &vocab()).unwrap();
        let params = vec!["y1".to_string(), "y2".to_string()];
        let (s, sets) = singletonize(&phi, &params);
        assert_eq!(sets.len(), 2);
        assert_eq!(s.quantifier_rank(), 4);
        assert_eq!(s.free_vars().sets.len(), 2);
        assert!(s.free_vars().individual.is_empty());
        assert_eq!(singletonize(&phi, &[]).0, phi);
    }

    #[test]
    fn pin_replaces_atoms() {
        let psi = parse_formula("ex y. E(x,y)", &vocab()).unwrap();
        let pinned = pin_vertex_formula(&psi, "x", "I", "Nb").unwrap();
        assert_eq!(pinned, Formula::exists("y", Formula::label("Nb", "y")));
        let no_x = parse_formula("ex y. A(y)", &vocab()).unwrap();
        assert_eq!(pin_vertex_formula(&no_x, "x", "I", "Nb").unwrap(), no_x);
        let bad = parse_formula("x = x", &vocab()).unwrap();
        assert!(pin_vertex_formula(&bad, "x", "I", "Nb").is_err());
    }

    #[test]
    fn degree() {
        let mut star = LabeledGraph::new();
        for v in ["c", "l1", "l2", "l3", "iso"] {
            star.add_vertex(v);
        }
        for l in ["l1", "l2", "l3"] {
            star.add_edge("c", l).unwrap();
        }
        let d3 = deg_formula(3, DegMode::Exactly, "x").unwrap();
        assert_eq!(d3.quantifier_rank(), 4);
        assert!(eval_formula(&star, &d3, &Assignment::new().with("x", "c")).unwrap());
        assert!(!eval_formula(&star, &d3, &Assignment::new().with("x", "l1")).unwrap());
        let d1 = deg_formula(1, DegMode::AtLeast, "x").unwrap();
        assert!(!eval_formula(&star, &d1, &Assignment::new().with("x", "iso")).unwrap());
        assert_eq!(deg_formula(0, DegMode::AtLeast, "x"), Err(TransformError::ZeroDegree));
    }
}
