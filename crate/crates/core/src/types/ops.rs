use std::sync::Arc;

use crate::graph::{LEFT_MARK, RIGHT_MARK};

use super::store::{bit, Bits, LabelSetId, Layout, Merge, TypeId, TypeNode, TypeStore, UnaryKey};
use super::TypeError;

fn sorted(mut v: Vec<TypeId>) -> Box<[TypeId]> {
    v.sort_unstable();
    v.dedup();
    v.into()
}

impl TypeStore {
    fn column(&self, id: TypeId, label: &str) -> Result<usize, TypeError> {
        let t = self.get(id);
        self.label_names(t.labels)
            .binary_search_by(|n| n.as_str().cmp(label))
            .map_err(|_| TypeError::MissingLabel(label.to_string()))
    }

    fn map_children(&self, t: &TypeNode, f: impl Fn(TypeId) -> TypeId) -> (Box<[TypeId]>, Box<[TypeId]>) {
        (
            sorted(t.vext.iter().map(|&c| f(c)).collect()),
            sorted(t.sext.iter().map(|&c| f(c)).collect()),
        )
    }

    fn memo_unary(&self, id: TypeId, key: UnaryKey, f: impl FnOnce() -> TypeId) -> TypeId {
        if let Some(r) = self.unary_memo.get(&(id, key)) {
            return *r;
        }
        let r = f();
        self.unary_memo.insert((id, key), r);
        r
    }

    /// Forward map of `eta_{P,Q}`: slots carrying P and Q become adjacent.
    pub fn apply_eta(&self, id: TypeId, p: &str, q: &str) -> Result<TypeId, TypeError> {
        if p == q {
            return Err(TypeError::SameLabel(p.to_string()));
        }
        let (cp, cq) = (self.column(id, p)?, self.column(id, q)?);
        Ok(self.eta_cols(id, cp, cq))
    }

    pub(crate) fn eta_cols(&self, id: TypeId, p: usize, q: usize) -> TypeId {
        self.memo_unary(id, UnaryKey::Eta(p as u16, q as u16), || {
            let t = self.get(id);
            let l = self.layout(id);
            let mut bits = Bits(t.atoms.to_vec());
            let has = |i: usize, c: usize| bit(&t.atoms, l.label(i, c));
            for j in 0..l.k {
                for i in 0..j {
                    let joined = (has(i, p) && has(j, q)) || (has(i, q) && has(j, p));
                    if joined && !bit(&t.atoms, l.eq(i, j)) {
                        bits.set(l.edge(i, j), true);
                    }
                }
            }
            let (vext, sext) = self.map_children(t, |c| self.eta_cols(c, p, q));
            self.intern(TypeNode { atoms: bits.0.into(), vext, sext, ..t.clone() })
        })
    }

    /// Forward map of `rho_{P,Q}`: P-slots move to Q, P becomes empty.
    pub fn apply_rho(&self, id: TypeId, p: &str, q: &str) -> Result<TypeId, TypeError> {
        if p == q {
            return Err(TypeError::SameLabel(p.to_string()));
        }
        let (cp, cq) = (self.column(id, p)?, self.column(id, q)?);
        Ok(self.rho_cols(id, cp, cq))
    }

    pub(crate) fn rho_cols(&self, id: TypeId, p: usize, q: usize) -> TypeId {
        self.memo_unary(id, UnaryKey::Rho(p as u16, q as u16), || {
            let t = self.get(id);
            let l = self.layout(id);
            let mut bits = Bits(t.atoms.to_vec());
            for i in 0..l.k {
                if bit(&t.atoms, l.label(i, p)) {
                    bits.set(l.label(i, q), true);
                    bits.set(l.label(i, p), false);
                }
            }
            let (vext, sext) = self.map_children(t, |c| self.rho_cols(c, p, q));
            self.intern(TypeNode { atoms: bits.0.into(), vext, sext, ..t.clone() })
        })
    }

    /// Forward map of `delta_P`: the P column disappears.
    pub fn apply_delta(&self, id: TypeId, p: &str) -> Result<TypeId, TypeError> {
        let cp = self.column(id, p)?;
        Ok(self.delta_col(id, cp))
    }

    pub(crate) fn delta_col(&self, id: TypeId, p: usize) -> TypeId {
        self.memo_unary(id, UnaryKey::Delta(p as u16), || {
            let t = self.get(id);
            let l = self.layout(id);
            let mut names = self.label_names(t.labels).to_vec();
            names.remove(p);
            let labels = self.label_set(&names);
            let nl = Layout { nl: l.nl - 1, ..l };
            let mut bits = Bits::new(&nl);
            for j in 0..l.k {
                for i in 0..j {
                    bits.set(nl.eq(i, j), bit(&t.atoms, l.eq(i, j)));
                    bits.set(nl.edge(i, j), bit(&t.atoms, l.edge(i, j)));
                }
            }
            for i in 0..l.k {
                for c in 0..l.nl {
                    if c != p {
                        let nc = if c > p { c - 1 } else { c };
                        bits.set(nl.label(i, nc), bit(&t.atoms, l.label(i, c)));
                    }
                }
                for s in 0..l.s {
                    bits.set(nl.member(i, s), bit(&t.atoms, l.member(i, s)));
                }
            }
            let (vext, sext) = self.map_children(t, |c| self.delta_col(c, p));
            self.intern(TypeNode { labels, atoms: bits.0.into(), vext, sext, ..t.clone() })
        })
    }

    /// The same tuple's type at a lower rank and budget.
    pub fn truncate(&self, id: TypeId, rank: usize, budget: usize) -> TypeId {
        let t = self.get(id);
        let budget = budget.min(rank);
        assert!(rank <= t.rank as usize && budget <= t.budget as usize, "truncate can only lower");
        if rank == t.rank as usize && budget == t.budget as usize {
            return id;
        }
        self.memo_unary(id, UnaryKey::Truncate(rank as u8, budget as u8), || {
            let (vext, sext) = if rank == 0 {
                (Box::default(), Box::default())
            } else {
                let vext = sorted(t.vext.iter().map(|&c| self.truncate(c, rank - 1, budget)).collect());
                let sext = if budget > 0 {
                    sorted(t.sext.iter().map(|&c| self.truncate(c, rank - 1, budget - 1)).collect())
                } else {
                    Box::default()
                };
                (vext, sext)
            };
            self.intern(TypeNode {
                rank: rank as u8,
                budget: budget as u8,
                vext,
                sext,
                ..t.clone()
            })
        })
    }

    fn merge(&self, a: LabelSetId, b: LabelSetId, marked: bool) -> Result<Arc<Merge>, TypeError> {
        if let Some(m) = self.merge_memo.get(&(a, b, marked)) {
            return Ok(m.clone());
        }
        let (la, lb) = (self.label_names(a), self.label_names(b));
        let mut names: Vec<String> = la.iter().chain(lb.iter()).cloned().collect();
        if marked {
            for m in [LEFT_MARK, RIGHT_MARK] {
                if names.iter().any(|n| n == m) {
                    return Err(TypeError::ReservedLabel(m.to_string()));
                }
                names.push(m.to_string());
            }
        }
        names.sort();
        names.dedup();
        let find = |set: &[String], n: &str| set.binary_search_by(|x| x.as_str().cmp(n)).ok();
        let merge = Arc::new(Merge {
            result: self.label_set(&names),
            left: names.iter().map(|n| find(la, n)).collect(),
            right: names.iter().map(|n| find(lb, n)).collect(),
            at_l: marked.then(|| find(&names, LEFT_MARK)).flatten(),
            at_r: marked.then(|| find(&names, RIGHT_MARK)).flatten(),
        });
        self.merge_memo.insert((a, b, marked), merge.clone());
        Ok(merge)
    }

    /// Type of the combined tuple in the (ordered, when `marked`) disjoint
    /// union. Bit `i` of `sides` says whether slot `i` of the result comes
    /// from the right operand; slots of each side keep their order. Set
    /// slots are unions of the corresponding sets on both sides.
    pub fn compose(&self, left: TypeId, right: TypeId, sides: u64, marked: bool) -> Result<TypeId, TypeError> {
        let (a, b) = (self.get(left), self.get(right));
        if a.rank != b.rank || a.budget != b.budget || a.s != b.s {
            return Err(TypeError::Signature(format!(
                "rank/budget/sets ({},{},{}) vs ({},{},{})",
                a.rank, a.budget, a.s, b.rank, b.budget, b.s
            )));
        }
        let k = (a.k + b.k) as usize;
        if k > 63 || (sides >> k) != 0 || sides.count_ones() != b.k as u32 {
            return Err(TypeError::Signature(format!("side mask {sides:b} does not split {} + {}", a.k, b.k)));
        }
        let merge = self.merge(a.labels, b.labels, marked)?;
        Ok(self.compose_rec(left, right, sides, marked, &merge))
    }

    fn compose_rec(&self, left: TypeId, right: TypeId, sides: u64, marked: bool, merge: &Merge) -> TypeId {
        let key = (left, right, sides, marked);
        if let Some(r) = self.compose_memo.get(&key) {
            return *r;
        }
        let (a, b) = (self.get(left), self.get(right));
        let (la, lb) = (self.layout(left), self.layout(right));
        let k = la.k + lb.k;
        let out = Layout { k, s: la.s, nl: merge.left.len() };
        // Local index of every result slot on its own side.
        let mut local = Vec::with_capacity(k);
        let (mut nl, mut nr) = (0, 0);
        for i in 0..k {
            if sides >> i & 1 == 1 {
                local.push((true, nr));
                nr += 1;
            } else {
                local.push((false, nl));
                nl += 1;
            }
        }
        let mut bits = Bits::new(&out);
        for j in 0..k {
            for i in 0..j {
                let ((si, li), (sj, lj)) = (local[i], local[j]);
                if si == sj {
                    let (atoms, l) = if si { (&b.atoms, &lb) } else { (&a.atoms, &la) };
                    bits.set(out.eq(i, j), bit(atoms, l.eq(li, lj)));
                    bits.set(out.edge(i, j), bit(atoms, l.edge(li, lj)));
                }
            }
        }
        for (i, &(side, li)) in local.iter().enumerate() {
            let (atoms, l, cols) = if side { (&b.atoms, &lb, &merge.right) } else { (&a.atoms, &la, &merge.left) };
            for (c, col) in cols.iter().enumerate() {
                if let Some(src) = col {
                    bits.set(out.label(i, c), bit(atoms, l.label(li, *src)));
                }
            }
            if let Some(c) = if side { merge.at_r } else { merge.at_l } {
                bits.set(out.label(i, c), true);
            }
            for s in 0..out.s {
                bits.set(out.member(i, s), bit(atoms, l.member(li, s)));
            }
        }
        let (mut vext, mut sext) = (Vec::new(), Vec::new());
        if a.rank > 0 {
            let r = a.rank as usize - 1;
            let vb = (a.budget as usize).min(r);
            let right_low = self.truncate(right, r, vb);
            let left_low = self.truncate(left, r, vb);
            for &c in a.vext.iter() {
                vext.push(self.compose_rec(c, right_low, sides, marked, merge));
            }
            for &c in b.vext.iter() {
                vext.push(self.compose_rec(left_low, c, sides | 1 << k, marked, merge));
            }
            if a.budget > 0 {
                for &c1 in a.sext.iter() {
                    for &c2 in b.sext.iter() {
                        sext.push(self.compose_rec(c1, c2, sides, marked, merge));
                    }
                }
            }
        }
        let id = self.intern(TypeNode {
            rank: a.rank,
            budget: a.budget,
            k: k as u8,
            s: a.s,
            labels: merge.result,
            atoms: bits.0.into(),
            vext: sorted(vext),
            sext: sorted(sext),
        });
        self.compose_memo.insert(key, id);
        id
    }
}
