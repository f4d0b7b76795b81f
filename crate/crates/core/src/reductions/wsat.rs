use std::fmt::Write as _;

use crate::graph::CwExpression;
use crate::logic::{deg_formula, DegMode, Formula};

use super::ReductionError;

/// A literal: variable index (0-based) and polarity.
pub type Literal = (usize, bool);

/// A formula in 2-CNF over `n` variables.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cnf2 {
    pub n: usize,
    pub clauses: Vec<[Literal; 2]>,
}

impl Cnf2 {
    pub fn new(n: usize, clauses: Vec<[Literal; 2]>) -> Result<Self, ReductionError> {
        for c in &clauses {
            for &(v, _) in c {
                if v >= n {
                    return Err(ReductionError::Cnf { line: 0, msg: format!("variable {} out of range 1..={n}", v + 1) });
                }
            }
        }
        Ok(Cnf2 { n, clauses })
    }

    /// DIMACS with `c` comments, a `p cnf n m` header and clauses of
    /// exactly two literals, each terminated by `0`.
    pub fn parse_dimacs(text: &str) -> Result<Self, ReductionError> {
        let err = |line: usize, msg: &str| ReductionError::Cnf { line, msg: msg.to_string() };
        let mut header: Option<(usize, usize)> = None;
        let mut clauses = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            let no = i + 1;
            if line.is_empty() || line.starts_with('c') {
                continue;
            }
            if let Some(rest) = line.strip_prefix('p') {
                let w: Vec<&str> = rest.split_whitespace().collect();
                if header.is_some() || w.len() != 3 || w[0] != "cnf" {
                    return Err(err(no, "expected a single `p cnf n m` header"));
                }
                let n = w[1].parse().map_err(|_| err(no, "bad variable count"))?;
                let m = w[2].parse().map_err(|_| err(no, "bad clause count"))?;
                header = Some((n, m));
                continue;
            }
            let (n, _) = header.ok_or_else(|| err(no, "clause before header"))?;
            let lits: Vec<i64> = line
                .split_whitespace()
                .map(|t| t.parse::<i64>().map_err(|_| err(no, "bad literal")))
                .collect::<Result<_, _>>()?;
            if lits.len() != 3 || lits[2] != 0 || lits[0] == 0 || lits[1] == 0 {
                return Err(err(no, "a clause is exactly two nonzero literals followed by 0"));
            }
            let lit = |x: i64| -> Result<Literal, ReductionError> {
                let v = x.unsigned_abs() as usize;
                if v > n {
                    return Err(err(no, "variable out of range"));
                }
                Ok((v - 1, x > 0))
            };
            clauses.push([lit(lits[0])?, lit(lits[1])?]);
        }
        let (n, m) = header.ok_or_else(|| err(0, "missing `p cnf` header"))?;
        if m != clauses.len() {
            return Err(err(0, &format!("header announces {m} clauses, found {}", clauses.len())));
        }
        Cnf2::new(n, clauses)
    }

    pub fn to_dimacs(&self) -> String {
        let mut out = format!("p cnf {} {}\n", self.n, self.clauses.len());
        for c in &self.clauses {
            let l = |(v, pos): Literal| if pos { (v + 1) as i64 } else { -((v + 1) as i64) };
            let _ = writeln!(out, "{} {} 0", l(c[0]), l(c[1]));
        }
        out
    }

    pub fn satisfied_by(&self, assignment: &[bool]) -> bool {
        self.clauses.iter().all(|c| c.iter().any(|&(v, pos)| assignment[v] == pos))
    }
}

/// Whether some assignment of weight exactly `ell` satisfies `cnf`.
pub fn wsat_brute(cnf: &Cnf2, ell: usize) -> bool {
    if ell > cnf.n {
        return false;
    }
    (0u64..1 << cnf.n).filter(|m| m.count_ones() as usize == ell).any(|m| {
        let a: Vec<bool> = (0..cnf.n).map(|i| m >> i & 1 == 1).collect();
        cnf.satisfied_by(&a)
    })
}

/// A consistency instance produced from a 2-CNF.
#[derive(Clone, Debug)]
pub struct WsatInstance {
    pub expr: CwExpression,
    pub examples: Vec<Vec<String>>,
    pub labels: Vec<bool>,
    pub phi: Formula,
    pub ell: usize,
    pub q: usize,
}

pub fn literal_vertex((v, pos): Literal) -> String {
    if pos {
        format!("X{}", v + 1)
    } else {
        format!("nX{}", v + 1)
    }
}

/// One gadget per variable: `X` adjacent to `nX`, `Y_1`, `Y_2`, and `nX`
/// adjacent to `Z`, built with the two labels A and B.
fn component(i: usize) -> CwExpression {
    let v = |name: &str| format!("{name}{i}");
    CwExpression::base(&v("nX"), ["A"])
        .union(CwExpression::base(&v("Z"), ["B"]))
        .eta("A", "B")
        .delta("B")
        .union(CwExpression::base(&v("X"), ["B"]))
        .eta("A", "B")
        .delta("A")
        .union(CwExpression::base(&format!("Y{i}_1"), ["A"]).union(CwExpression::base(&format!("Y{i}_2"), ["A"])))
        .eta("A", "B")
        .delta("A")
        .delta("B")
}

/// The φ-consistency instance whose answer is "Φ has a satisfying
/// assignment of weight ℓ".
pub fn gen_wsat(cnf: &Cnf2, ell: usize) -> Result<WsatInstance, ReductionError> {
    if ell > cnf.n {
        return Err(ReductionError::Weight { ell, n: cnf.n });
    }
    if cnf.n == 0 {
        return Err(ReductionError::Cnf { line: 0, msg: "no variables".into() });
    }
    let mut expr = component(1);
    for i in 2..=cnf.n {
        expr = expr.union(component(i));
    }
    let ys: Vec<String> = (1..=ell).map(|j| format!("y{j}")).collect();
    let mut parts = Vec::new();
    for y in &ys {
        parts.push(deg_formula(3, DegMode::Exactly, y)?);
    }
    for (a, ya) in ys.iter().enumerate() {
        for yb in &ys[a + 1..] {
            parts.push(Formula::not(Formula::eq(ya, yb)));
        }
    }
    let mut alts = Vec::new();
    for x in ["x1", "x2"] {
        alts.push(Formula::or_all(ys.iter().map(|y| Formula::eq(x, y))));
        alts.push(Formula::and(
            deg_formula(2, DegMode::Exactly, x)?,
            Formula::and_all(ys.iter().map(|y| Formula::not(Formula::edge(y, x)))),
        ));
    }
    parts.push(Formula::or_all(alts));
    let phi = Formula::and_all(parts);
    Ok(WsatInstance {
        expr,
        examples: cnf.clauses.iter().map(|c| vec![literal_vertex(c[0]), literal_vertex(c[1])]).collect(),
        labels: vec![true; cnf.clauses.len()],
        q: phi.quantifier_rank(),
        phi,
        ell,
    })
}

/// Every 2-CNF over `n` variables with at most `max_clauses` clauses, up to
/// clause order, repetition and renaming of variables.
pub fn all_cnfs_up_to_symmetry(n: usize, max_clauses: usize) -> Vec<Cnf2> {
    let lits: Vec<Literal> = (0..n).flat_map(|v| [(v, true), (v, false)]).collect();
    let mut clauses: Vec<[Literal; 2]> = Vec::new();
    for (i, &a) in lits.iter().enumerate() {
        for &b in &lits[i..] {
            clauses.push([a, b]);
        }
    }
    let perms = permutations(n);
    let mut seen = std::collections::BTreeSet::new();
    let mut out = Vec::new();
    let mut pick: Vec<usize> = Vec::new();
    fn rec(
        start: usize,
        pick: &mut Vec<usize>,
        max: usize,
        clauses: &[[Literal; 2]],
        visit: &mut dyn FnMut(&[usize]),
    ) {
        visit(pick);
        if pick.len() == max {
            return;
        }
        for i in start..clauses.len() {
            pick.push(i);
            rec(i + 1, pick, max, clauses, visit);
            pick.pop();
        }
    }
    let canon = |set: &[[Literal; 2]], p: &[usize]| {
        let mut cs: Vec<[Literal; 2]> = set
            .iter()
            .map(|c| {
                let mut c = [(p[c[0].0], c[0].1), (p[c[1].0], c[1].1)];
                c.sort();
                c
            })
            .collect();
        cs.sort();
        cs
    };
    let mut visit = |idx: &[usize]| {
        let set: Vec<[Literal; 2]> = idx.iter().map(|&i| clauses[i]).collect();
        let key = perms.iter().map(|p| canon(&set, p)).min().expect("identity permutation");
        if seen.insert(key.clone()) {
            out.push(Cnf2 { n, clauses: key });
        }
    };
    rec(0, &mut pick, max_clauses, &clauses, &mut visit);
    out
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

/// Consistency answers for every clause set over `n` variables at weight
/// `ell`, read off one DP run whose examples are all unordered literal
/// pairs. The root table of a sub-sequence is the projection of this table,
/// so a clause set is consistent exactly when some row satisfies the
/// formula on all of its pairs; the least such row carries the same witness
/// a direct run would return. The formula is symmetric in `x1, x2`, so each
/// clause is looked up as a sorted pair.
#[derive(Clone, Debug)]
pub struct WsatBatch {
    pub n: usize,
    pub ell: usize,
    pairs: Vec<[Literal; 2]>,
    /// Per root row, sorted by witness: bit `i` set when pair `i` satisfies.
    masks: Vec<u64>,
    witnesses: Vec<Vec<String>>,
}

impl WsatBatch {
    pub fn build(
        store: &crate::types::TypeStore,
        n: usize,
        ell: usize,
        jobs: usize,
        max_types: Option<usize>,
    ) -> Result<Self, ReductionError> {
        use crate::realizable::{realizable_tuples, standard_slots, DpConfig};
        use crate::types::type_satisfies;

        let inst = gen_wsat(&Cnf2::new(n, Vec::new())?, ell)?;
        let lits: Vec<Literal> = (0..n).flat_map(|v| [(v, true), (v, false)]).collect();
        let mut pairs = Vec::new();
        for (i, &a) in lits.iter().enumerate() {
            for &b in &lits[i..] {
                pairs.push(sorted_pair([a, b]));
            }
        }
        if pairs.len() > 64 {
            return Err(ReductionError::Cnf { line: 0, msg: format!("{n} variables give more than 64 literal pairs") });
        }
        let examples: Vec<Vec<String>> = pairs.iter().map(|p| vec![literal_vertex(p[0]), literal_vertex(p[1])]).collect();
        let cfg = DpConfig { jobs, max_types, ..DpConfig::new(inst.q, ell, 0) };
        let table = realizable_tuples(store, &inst.expr, &examples, cfg)?;
        let slots = standard_slots(2, ell);
        let mut memo = rustc_hash::FxHashMap::default();
        let mut masks = Vec::with_capacity(table.rows.len());
        for row in &table.rows {
            let mut m = 0u64;
            for i in 0..pairs.len() {
                let t = table.type_of(row, i);
                let sat = match memo.get(&t) {
                    Some(&b) => b,
                    None => {
                        let b = type_satisfies(store, t, &inst.phi, &slots).map_err(crate::realizable::DpError::from)?;
                        memo.insert(t, b);
                        b
                    }
                };
                if sat {
                    m |= 1 << i;
                }
            }
            masks.push(m);
        }
        let witnesses = table.rows.iter().map(|r| table.witness_ids(r)).collect();
        Ok(WsatBatch { n, ell, pairs, masks, witnesses })
    }

    /// Number of root rows.
    pub fn rows(&self) -> usize {
        self.masks.len()
    }

    /// The least witness for `cnf`, if any.
    pub fn consistent(&self, cnf: &Cnf2) -> Option<&[String]> {
        assert_eq!(cnf.n, self.n, "variable count of the batch");
        let mut need = 0u64;
        for c in &cnf.clauses {
            let p = sorted_pair(*c);
            let i = self.pairs.iter().position(|q| *q == p).expect("every literal pair is an example");
            need |= 1 << i;
        }
        self.masks.iter().position(|m| m & need == need).map(|r| self.witnesses[r].as_slice())
    }
}

fn sorted_pair([a, b]: [Literal; 2]) -> [Literal; 2] {
    if a <= b {
        [a, b]
    } else {
        [b, a]
    }
}
