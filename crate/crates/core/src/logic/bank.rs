use std::collections::BTreeSet;

use super::Formula;

/// Free variable names by convention: `x1..xk` then `y1..yl`.
pub fn free_var_names(k: usize, ell: usize) -> Vec<String> {
    (1..=k)
        .map(|i| format!("x{i}"))
        .chain((1..=ell).map(|i| format!("y{i}")))
        .collect()
}

fn atoms(vocab: &BTreeSet<String>, vars: &[String]) -> Vec<Formula> {
    let mut out = Vec::new();
    for (i, a) in vars.iter().enumerate() {
        for b in &vars[i + 1..] {
            out.push(Formula::eq(a, b));
        }
    }
    for (i, a) in vars.iter().enumerate() {
        for b in &vars[i + 1..] {
            out.push(Formula::edge(a, b));
        }
    }
    for v in vars {
        for l in vocab {
            out.push(Formula::label(l, v));
        }
    }
    out
}

/// Atoms over `vars` that mention `z`, including unary ones on `z`.
fn atoms_with(vocab: &BTreeSet<String>, vars: &[String], z: &str) -> Vec<Formula> {
    let mut all = vars.to_vec();
    all.push(z.to_string());
    atoms(vocab, &all)
        .into_iter()
        .filter(|f| f.free_vars().individual.contains(z))
        .collect()
}

/// Small bodies mentioning `z`: single atoms, then conjunctions of two.
fn bodies(vocab: &BTreeSet<String>, vars: &[String], z: &str) -> Vec<Formula> {
    let base = atoms_with(vocab, vars, z);
    let mut out = base.clone();
    for i in 0..base.len() {
        for j in i + 1..base.len() {
            out.push(Formula::and(base[i].clone(), base[j].clone()));
        }
    }
    out
}

/// Deterministic bank of distinct formulas with rank at most `q` whose free
/// variables are among `x1..xk, y1..yl`, truncated at `budget`.
///
/// Order: atoms, negated atoms, one formula per connective and quantifier
/// kind, then quantified formulas by increasing rank, then further boolean
/// combinations of atoms.
pub fn formula_bank(vocab: &BTreeSet<String>, q: usize, k: usize, ell: usize, budget: usize) -> Vec<Formula> {
    let mut out: Vec<Formula> = Vec::new();
    let mut seen: BTreeSet<Formula> = BTreeSet::new();
    let mut push = |f: Formula, out: &mut Vec<Formula>| {
        if out.len() < budget && f.quantifier_rank() <= q && seen.insert(f.clone()) {
            out.push(f);
        }
    };
    let free = free_var_names(k, ell);
    let base = atoms(vocab, &free);
    for a in &base {
        push(a.clone(), &mut out);
    }
    for a in &base {
        push(Formula::not(a.clone()), &mut out);
    }
    let (p, r) = match base.len() {
        0 => (Formula::True, Formula::False),
        1 => (base[0].clone(), Formula::not(base[0].clone())),
        _ => (base[0].clone(), base[1].clone()),
    };
    push(Formula::True, &mut out);
    push(Formula::and(p.clone(), r.clone()), &mut out);
    push(Formula::or(p.clone(), r.clone()), &mut out);
    push(Formula::implies(p.clone(), r.clone()), &mut out);
    push(Formula::iff(p, r), &mut out);
    if q >= 1 {
        let first = |vars: &[String]| {
            bodies(vocab, vars, "z1").into_iter().next().unwrap_or(Formula::True)
        };
        push(Formula::exists("z1", first(&free)), &mut out);
        push(Formula::forall("z1", first(&free)), &mut out);
        let set_body = if q >= 2 {
            Formula::exists("z1", Formula::member("Z1", "z1"))
        } else if let Some(v) = free.first() {
            Formula::member("Z1", v)
        } else {
            Formula::True
        };
        push(Formula::exists_set("Z1", set_body.clone()), &mut out);
        push(Formula::forall_set("Z1", Formula::not(set_body)), &mut out);
    }
    // Quantified formulas, one extra nesting level per round.
    let mut vars = free.clone();
    for d in 1..=q {
        let z = format!("z{d}");
        let bs = bodies(vocab, &vars, &z);
        let wrap = |body: Formula, exists: bool| {
            let mut f = body;
            for i in (1..=d).rev() {
                let zi = format!("z{i}");
                f = if exists ^ (i % 2 == 0 && i != d) {
                    Formula::exists(&zi, f)
                } else {
                    Formula::forall(&zi, f)
                };
            }
            f
        };
        for b in &bs {
            push(wrap(b.clone(), true), &mut out);
        }
        for b in &bs {
            push(wrap(b.clone(), false), &mut out);
        }
        if d >= 2 {
            // Set quantifier over a first-order body mentioning the set;
            // the body may only use the free variables and `z`.
            let own = bodies(vocab, &free, &z);
            let first = own.get(d - 2).or(own.first()).cloned().unwrap_or(Formula::True);
            let setb = Formula::exists(&z, Formula::and(Formula::member("Z1", &z), first.clone()));
            push(Formula::exists_set("Z1", setb.clone()), &mut out);
            push(Formula::forall_set("Z1", Formula::not(setb)), &mut out);
            let defined = Formula::forall(&z, Formula::iff(Formula::member("Z1", &z), first));
            push(Formula::exists_set("Z1", defined), &mut out);
        }
        vars.push(z);
    }
    for i in 0..base.len() {
        for j in i + 1..base.len() {
            for f in [
                Formula::and(base[i].clone(), base[j].clone()),
                Formula::or(base[i].clone(), base[j].clone()),
                Formula::implies(base[i].clone(), base[j].clone()),
                Formula::iff(base[i].clone(), base[j].clone()),
                Formula::and(base[i].clone(), Formula::not(base[j].clone())),
            ] {
                push(f, &mut out);
            }
        }
    }
    out
}
