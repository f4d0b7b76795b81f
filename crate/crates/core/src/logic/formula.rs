use std::collections::BTreeSet;
use std::fmt;

/// MSO formula over graphs with unary labels.
///
/// Individual variables are lowercase identifiers, set variables are
/// uppercase-initial. Label atoms and set-membership atoms share the
/// surface syntax `Name(t)`; the parser resolves which one is meant.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    True,
    False,
    Eq(String, String),
    Edge(String, String),
    Label(String, String),
    Member(String, String),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
    Exists(String, Box<Formula>),
    Forall(String, Box<Formula>),
    ExistsSet(String, Box<Formula>),
    ForallSet(String, Box<Formula>),
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FreeVars {
    pub individual: BTreeSet<String>,
    pub sets: BTreeSet<String>,
}

impl Formula {
    pub fn eq(a: &str, b: &str) -> Self {
        Formula::Eq(a.to_string(), b.to_string())
    }

    pub fn edge(a: &str, b: &str) -> Self {
        Formula::Edge(a.to_string(), b.to_string())
    }

    pub fn label(name: &str, var: &str) -> Self {
        Formula::Label(name.to_string(), var.to_string())
    }

    pub fn member(set: &str, var: &str) -> Self {
        Formula::Member(set.to_string(), var.to_string())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Self {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Self {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Self {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Self {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn iff(a: Formula, b: Formula) -> Self {
        Formula::Iff(Box::new(a), Box::new(b))
    }

    pub fn exists(v: &str, body: Formula) -> Self {
        Formula::Exists(v.to_string(), Box::new(body))
    }

    pub fn forall(v: &str, body: Formula) -> Self {
        Formula::Forall(v.to_string(), Box::new(body))
    }

    pub fn exists_set(v: &str, body: Formula) -> Self {
        Formula::ExistsSet(v.to_string(), Box::new(body))
    }

    pub fn forall_set(v: &str, body: Formula) -> Self {
        Formula::ForallSet(v.to_string(), Box::new(body))
    }

    /// Left-nested conjunction; `true` when empty.
    pub fn and_all<I: IntoIterator<Item = Formula>>(parts: I) -> Self {
        parts
            .into_iter()
            .reduce(Formula::and)
            .unwrap_or(Formula::True)
    }

    /// Left-nested disjunction; `false` when empty.
    pub fn or_all<I: IntoIterator<Item = Formula>>(parts: I) -> Self {
        parts
            .into_iter()
            .reduce(Formula::or)
            .unwrap_or(Formula::False)
    }

    /// Nesting depth of quantifiers, individual and set alike.
    pub fn quantifier_rank(&self) -> usize {
        use Formula::*;
        match self {
            True | False | Eq(..) | Edge(..) | Label(..) | Member(..) => 0,
            Not(f) => f.quantifier_rank(),
            And(a, b) | Or(a, b) | Implies(a, b) | Iff(a, b) => {
                a.quantifier_rank().max(b.quantifier_rank())
            }
            Exists(_, f) | Forall(_, f) | ExistsSet(_, f) | ForallSet(_, f) => {
                1 + f.quantifier_rank()
            }
        }
    }

    /// Nesting depth of set quantifiers only.
    pub fn set_depth(&self) -> usize {
        use Formula::*;
        match self {
            True | False | Eq(..) | Edge(..) | Label(..) | Member(..) => 0,
            Not(f) | Exists(_, f) | Forall(_, f) => f.set_depth(),
            And(a, b) | Or(a, b) | Implies(a, b) | Iff(a, b) => a.set_depth().max(b.set_depth()),
            ExistsSet(_, f) | ForallSet(_, f) => 1 + f.set_depth(),
        }
    }

    pub fn free_vars(&self) -> FreeVars {
        let mut out = FreeVars::default();
        let mut bound_ind = Vec::new();
        let mut bound_set = Vec::new();
        self.collect_free(&mut bound_ind, &mut bound_set, &mut out);
        out
    }

    fn collect_free(
        &self,
        bound_ind: &mut Vec<String>,
        bound_set: &mut Vec<String>,
        out: &mut FreeVars,
    ) {
        use Formula::*;
        let ind = |v: &String, out: &mut FreeVars| {
            if !bound_ind.contains(v) {
                out.individual.insert(v.clone());
            }
        };
        match self {
            True | False => {}
            Eq(a, b) | Edge(a, b) => {
                ind(a, out);
                ind(b, out);
            }
            Label(_, v) => ind(v, out),
            Member(s, v) => {
                ind(v, out);
                if !bound_set.contains(s) {
                    out.sets.insert(s.clone());
                }
            }
            Not(f) => f.collect_free(bound_ind, bound_set, out),
            And(a, b) | Or(a, b) | Implies(a, b) | Iff(a, b) => {
                a.collect_free(bound_ind, bound_set, out);
                b.collect_free(bound_ind, bound_set, out);
            }
            Exists(v, f) | Forall(v, f) => {
                bound_ind.push(v.clone());
                f.collect_free(bound_ind, bound_set, out);
                bound_ind.pop();
            }
            ExistsSet(v, f) | ForallSet(v, f) => {
                bound_set.push(v.clone());
                f.collect_free(bound_ind, bound_set, out);
                bound_set.pop();
            }
        }
    }

    /// Label names occurring in label atoms.
    pub fn labels(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.visit(&mut |f| {
            if let Formula::Label(l, _) = f {
                out.insert(l.clone());
            }
        });
        out
    }

    /// Every variable name (individual or set) occurring anywhere, bound or free.
    pub fn all_var_names(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.visit(&mut |f| match f {
            Formula::Eq(a, b) | Formula::Edge(a, b) => {
                out.insert(a.clone());
                out.insert(b.clone());
            }
            Formula::Label(_, v) => {
                out.insert(v.clone());
            }
            Formula::Member(s, v) => {
                out.insert(s.clone());
                out.insert(v.clone());
            }
            Formula::Exists(v, _)
            | Formula::Forall(v, _)
            | Formula::ExistsSet(v, _)
            | Formula::ForallSet(v, _) => {
                out.insert(v.clone());
            }
            _ => {}
        });
        out
    }

    /// Pre-order traversal.
    pub fn visit<F: FnMut(&Formula)>(&self, f: &mut F) {
        use Formula::*;
        f(self);
        match self {
            Not(a) | Exists(_, a) | Forall(_, a) | ExistsSet(_, a) | ForallSet(_, a) => a.visit(f),
            And(a, b) | Or(a, b) | Implies(a, b) | Iff(a, b) => {
                a.visit(f);
                b.visit(f);
            }
            _ => {}
        }
    }

    /// Number of AST nodes.
    pub fn size(&self) -> usize {
        let mut n = 0;
        self.visit(&mut |_| n += 1);
        n
    }

    pub fn is_sentence(&self) -> bool {
        let fv = self.free_vars();
        fv.individual.is_empty() && fv.sets.is_empty()
    }

    /// Renames the free occurrences of the individual variable `from` to `to`.
    /// Binders that would capture `to` are renamed to fresh names first.
    pub fn rename_free(&self, from: &str, to: &str) -> Formula {
        if from == to {
            return self.clone();
        }
        let mut used = self.all_var_names();
        used.insert(to.to_string());
        self.rename_rec(from, to, &mut used)
    }

    fn rename_rec(&self, from: &str, to: &str, used: &mut BTreeSet<String>) -> Formula {
        use Formula::*;
        let r = |v: &String| {
            if v == from {
                to.to_string()
            } else {
                v.clone()
            }
        };
        match self {
            True => True,
            False => False,
            Eq(a, b) => Eq(r(a), r(b)),
            Edge(a, b) => Edge(r(a), r(b)),
            Label(l, v) => Label(l.clone(), r(v)),
            Member(s, v) => Member(s.clone(), r(v)),
            Not(f) => Not(Box::new(f.rename_rec(from, to, used))),
            And(a, b) => And(
                Box::new(a.rename_rec(from, to, used)),
                Box::new(b.rename_rec(from, to, used)),
            ),
            Or(a, b) => Or(
                Box::new(a.rename_rec(from, to, used)),
                Box::new(b.rename_rec(from, to, used)),
            ),
            Implies(a, b) => Implies(
                Box::new(a.rename_rec(from, to, used)),
                Box::new(b.rename_rec(from, to, used)),
            ),
            Iff(a, b) => Iff(
                Box::new(a.rename_rec(from, to, used)),
                Box::new(b.rename_rec(from, to, used)),
            ),
            Exists(v, f) | Forall(v, f) => {
                let rebuild = |v: String, body: Formula| match self {
                    Exists(..) => Exists(v, Box::new(body)),
                    _ => Forall(v, Box::new(body)),
                };
                if v == from {
                    // `from` is shadowed below this binder
                    return self.clone();
                }
                if v == to {
                    let fresh = fresh_name("v", used);
                    let body = f.rename_rec(v, &fresh, used);
                    rebuild(fresh, body.rename_rec(from, to, used))
                } else {
                    rebuild(v.clone(), f.rename_rec(from, to, used))
                }
            }
            ExistsSet(v, f) => ExistsSet(v.clone(), Box::new(f.rename_rec(from, to, used))),
            ForallSet(v, f) => ForallSet(v.clone(), Box::new(f.rename_rec(from, to, used))),
        }
    }

    /// Replaces membership atoms of the free set variable `set` by atoms of `label`.
    pub fn set_var_to_label(&self, set: &str, label: &str) -> Formula {
        use Formula::*;
        match self {
            Member(s, v) if s == set => Label(label.to_string(), v.clone()),
            True | False | Eq(..) | Edge(..) | Label(..) | Member(..) => self.clone(),
            Not(f) => Formula::not(f.set_var_to_label(set, label)),
            And(a, b) => Formula::and(a.set_var_to_label(set, label), b.set_var_to_label(set, label)),
            Or(a, b) => Formula::or(a.set_var_to_label(set, label), b.set_var_to_label(set, label)),
            Implies(a, b) => {
                Formula::implies(a.set_var_to_label(set, label), b.set_var_to_label(set, label))
            }
            Iff(a, b) => Formula::iff(a.set_var_to_label(set, label), b.set_var_to_label(set, label)),
            Exists(v, f) => Formula::exists(v, f.set_var_to_label(set, label)),
            Forall(v, f) => Formula::forall(v, f.set_var_to_label(set, label)),
            ExistsSet(v, _) | ForallSet(v, _) if v == set => self.clone(),
            ExistsSet(v, f) => Formula::exists_set(v, f.set_var_to_label(set, label)),
            ForallSet(v, f) => Formula::forall_set(v, f.set_var_to_label(set, label)),
        }
    }

    /// True when printing this formula as the left operand of a binary
    /// connective needs parentheses (its body would otherwise swallow the
    /// right operand).
    fn open_ended(&self) -> bool {
        match self {
            Formula::Exists(..)
            | Formula::Forall(..)
            | Formula::ExistsSet(..)
            | Formula::ForallSet(..) => true,
            Formula::Not(f) => f.open_ended(),
            _ => false,
        }
    }
}

/// Returns a name `{prefix}{i}` not in `used` and records it.
pub fn fresh_name(prefix: &str, used: &mut BTreeSet<String>) -> String {
    let mut i = 1usize;
    loop {
        let cand = format!("{prefix}{i}");
        if !used.contains(&cand) {
            used.insert(cand.clone());
            return cand;
        }
        i += 1;
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use Formula::*;
        let bin = |f: &mut fmt::Formatter<'_>, a: &Formula, op: &str, b: &Formula| {
            if a.open_ended() {
                write!(f, "(({a}) {op} {b})")
            } else {
                write!(f, "({a} {op} {b})")
            }
        };
        match self {
            True => write!(f, "true"),
            False => write!(f, "false"),
            Eq(a, b) => write!(f, "{a} = {b}"),
            Edge(a, b) => write!(f, "E({a},{b})"),
            Label(l, v) | Member(l, v) => write!(f, "{l}({v})"),
            Not(a) => write!(f, "!{a}"),
            And(a, b) => bin(f, a, "&", b),
            Or(a, b) => bin(f, a, "|", b),
            Implies(a, b) => bin(f, a, "->", b),
            Iff(a, b) => bin(f, a, "<->", b),
            Exists(v, b) => write!(f, "ex {v}. {b}"),
            Forall(v, b) => write!(f, "all {v}. {b}"),
            ExistsSet(v, b) => write!(f, "EX {v}. {b}"),
            ForallSet(v, b) => write!(f, "ALL {v}. {b}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_counts_both_quantifier_kinds() {
        let psi = Formula::forall(
            "z1",
            Formula::forall(
                "z2",
                Formula::implies(
                    Formula::edge("z1", "z2"),
                    Formula::not(Formula::iff(
                        Formula::member("Z", "z1"),
                        Formula::member("Z", "z2"),
                    )),
                ),
            ),
        );
        assert_eq!(psi.quantifier_rank(), 2);
        let phi = Formula::exists_set(
            "Z",
            Formula::and_all([psi, Formula::member("Z", "x"), Formula::member("Z", "y")]),
        );
        assert_eq!(phi.quantifier_rank(), 3);
        assert_eq!(phi.set_depth(), 1);
        assert_eq!(Formula::edge("x", "y").quantifier_rank(), 0);
        let fv = phi.free_vars();
        assert_eq!(fv.individual.into_iter().collect::<Vec<_>>(), ["x", "y"]);
        assert!(fv.sets.is_empty());
    }

    #[test]
    fn rename_avoids_capture() {
        // ex y. E(x,y) with x -> y must not be captured
        let f = Formula::exists("y", Formula::edge("x", "y"));
        let g = f.rename_free("x", "y");
        let fv = g.free_vars();
        assert!(fv.individual.contains("y"));
        assert_eq!(fv.individual.len(), 1);
        assert_eq!(g.quantifier_rank(), 1);
    }

    #[test]
    fn empty_connectives() {
        assert_eq!(Formula::and_all([]), Formula::True);
        assert_eq!(Formula::or_all([]), Formula::False);
    }

    #[test]
    fn printing_guards_open_left_operands() {
        let f = Formula::and(Formula::exists("z", Formula::label("P", "z")), Formula::label("Q", "x"));
        assert_eq!(f.to_string(), "((ex z. P(z)) & Q(x))");
    }
}
