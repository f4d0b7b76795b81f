use std::fmt::Write as _;
use std::sync::Arc;

use dashmap::DashMap;
use rustc_hash::FxBuildHasher;
use sha2::{Digest, Sha256};

/// Interned type handle. Ids are dense and issued in insertion order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TypeId(pub u32);

/// Interned, sorted label-name list.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LabelSetId(pub u32);

/// Sizes of the interner and its memo tables.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct StoreStats {
    pub types: usize,
    pub label_sets: usize,
    pub unary_memo: usize,
    pub compose_memo: usize,
    /// Total length of all extension lists.
    pub children: usize,
}

/// Bit positions of the atomic table for `k` individual slots, `s` set
/// slots and `nl` labels: equalities and edges over slot pairs `i < j`, then
/// label facts, then memberships.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Layout {
    pub k: usize,
    pub s: usize,
    pub nl: usize,
}

impl Layout {
    fn pairs(&self) -> usize {
        self.k * self.k.saturating_sub(1) / 2
    }

    fn pair(i: usize, j: usize) -> usize {
        let (i, j) = if i < j { (i, j) } else { (j, i) };
        j * (j - 1) / 2 + i
    }

    pub fn eq(&self, i: usize, j: usize) -> usize {
        Self::pair(i, j)
    }

    pub fn edge(&self, i: usize, j: usize) -> usize {
        self.pairs() + Self::pair(i, j)
    }

    pub fn label(&self, i: usize, l: usize) -> usize {
        2 * self.pairs() + i * self.nl + l
    }

    pub fn member(&self, i: usize, set: usize) -> usize {
        2 * self.pairs() + self.k * self.nl + i * self.s + set
    }

    pub fn bits(&self) -> usize {
        2 * self.pairs() + self.k * (self.nl + self.s)
    }

    pub fn words(&self) -> usize {
        self.bits().div_ceil(64)
    }
}

/// Growable bit vector used while building atomic tables.
pub(crate) struct Bits(pub Vec<u64>);

impl Bits {
    pub fn new(layout: &Layout) -> Self {
        Bits(vec![0; layout.words()])
    }

    pub fn set(&mut self, idx: usize, value: bool) {
        if value {
            self.0[idx / 64] |= 1 << (idx % 64);
        } else {
            self.0[idx / 64] &= !(1 << (idx % 64));
        }
    }
}

pub(crate) fn bit(words: &[u64], idx: usize) -> bool {
    words[idx / 64] >> (idx % 64) & 1 == 1
}

/// One rank-bounded type: the atomic table of its slots plus the sets of
/// one-step extension types.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TypeNode {
    pub rank: u8,
    /// Set-quantifier budget, normalized to at most `rank`.
    pub budget: u8,
    pub k: u8,
    pub s: u8,
    pub labels: LabelSetId,
    pub atoms: Box<[u64]>,
    /// Types after adding one individual slot (rank - 1), sorted.
    pub vext: Box<[TypeId]>,
    /// Types after adding one set slot (rank - 1), sorted.
    pub sext: Box<[TypeId]>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub(crate) enum UnaryKey {
    Eta(u16, u16),
    Rho(u16, u16),
    Delta(u16),
    Truncate(u8, u8),
}

/// Column bookkeeping for composing two label sets.
#[derive(Debug)]
pub(crate) struct Merge {
    pub result: LabelSetId,
    /// For each result column: the column in the left/right label set.
    pub left: Vec<Option<usize>>,
    pub right: Vec<Option<usize>>,
    pub at_l: Option<usize>,
    pub at_r: Option<usize>,
}

/// Hash-consing store for types together with the memo tables of every
/// type transform. Reads and inserts may happen from several threads;
/// an insert takes the lock of one index shard.
pub struct TypeStore {
    nodes: boxcar::Vec<Arc<TypeNode>>,
    index: DashMap<Arc<TypeNode>, TypeId, FxBuildHasher>,
    label_sets: boxcar::Vec<Arc<[String]>>,
    label_index: DashMap<Arc<[String]>, LabelSetId, FxBuildHasher>,
    pub(crate) unary_memo: DashMap<(TypeId, UnaryKey), TypeId, FxBuildHasher>,
    pub(crate) compose_memo: DashMap<(TypeId, TypeId, u64, bool), TypeId, FxBuildHasher>,
    pub(crate) merge_memo: DashMap<(LabelSetId, LabelSetId, bool), Arc<Merge>, FxBuildHasher>,
    digests: DashMap<TypeId, [u8; 16], FxBuildHasher>,
}

impl Default for TypeStore {
    fn default() -> Self {
        Self::new()
    }
}

impl TypeStore {
    pub fn new() -> Self {
        TypeStore {
            nodes: boxcar::Vec::new(),
            index: DashMap::with_hasher(FxBuildHasher),
            label_sets: boxcar::Vec::new(),
            label_index: DashMap::with_hasher(FxBuildHasher),
            unary_memo: DashMap::with_hasher(FxBuildHasher),
            compose_memo: DashMap::with_hasher(FxBuildHasher),
            merge_memo: DashMap::with_hasher(FxBuildHasher),
            digests: DashMap::with_hasher(FxBuildHasher),
        }
    }

    /// Number of interned types.
    pub fn len(&self) -> usize {
        self.nodes.count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn get(&self, id: TypeId) -> &TypeNode {
        self.nodes.get(id.0 as usize).expect("type id issued by this store")
    }

    pub fn intern(&self, node: TypeNode) -> TypeId {
        debug_assert!(node.vext.windows(2).all(|w| w[0] < w[1]));
        debug_assert!(node.sext.windows(2).all(|w| w[0] < w[1]));
        if let Some(id) = self.index.get(&node) {
            return *id;
        }
        let node = Arc::new(node);
        *self
            .index
            .entry(node.clone())
            .or_insert_with(|| TypeId(self.nodes.push(node) as u32))
    }

    pub fn label_set(&self, names: &[String]) -> LabelSetId {
        debug_assert!(names.windows(2).all(|w| w[0] < w[1]));
        if let Some(id) = self.label_index.get(names) {
            return *id;
        }
        let arc: Arc<[String]> = names.into();
        *self
            .label_index
            .entry(arc.clone())
            .or_insert_with(|| LabelSetId(self.label_sets.push(arc) as u32))
    }

    pub fn label_names(&self, id: LabelSetId) -> &[String] {
        self.label_sets.get(id.0 as usize).expect("label set id issued by this store")
    }

    pub fn layout(&self, id: TypeId) -> Layout {
        let t = self.get(id);
        Layout { k: t.k as usize, s: t.s as usize, nl: self.label_names(t.labels).len() }
    }

    /// Structural digest: independent of interning order, hence stable
    /// across runs and thread schedules.
    pub fn digest(&self, id: TypeId) -> [u8; 16] {
        if let Some(d) = self.digests.get(&id) {
            return *d;
        }
        let t = self.get(id);
        let mut h = Sha256::new();
        h.update([t.rank, t.budget, t.k, t.s]);
        for name in self.label_names(t.labels) {
            h.update(name.as_bytes());
            h.update([0]);
        }
        h.update([1]);
        for w in t.atoms.iter() {
            h.update(w.to_le_bytes());
        }
        for (tag, kids) in [(2u8, &t.vext), (3u8, &t.sext)] {
            let mut ds: Vec<[u8; 16]> = kids.iter().map(|&c| self.digest(c)).collect();
            ds.sort_unstable();
            h.update([tag]);
            h.update((ds.len() as u64).to_le_bytes());
            for d in ds {
                h.update(d);
            }
        }
        let full = h.finalize();
        let mut out = [0u8; 16];
        out.copy_from_slice(&full[..16]);
        self.digests.insert(id, out);
        out
    }

    pub fn digest_hex(&self, id: TypeId) -> String {
        hex(&self.digest(id))
    }

    /// Drops the composition memo once it holds more than `limit` entries.
    /// Only a cache: results stay interned.
    pub fn trim_compose_memo(&self, limit: usize) {
        if self.compose_memo.len() > limit {
            self.compose_memo.clear();
            self.compose_memo.shrink_to_fit();
        }
    }

    pub fn stats(&self) -> StoreStats {
        StoreStats {
            types: self.len(),
            label_sets: self.label_sets.count(),
            unary_memo: self.unary_memo.len(),
            compose_memo: self.compose_memo.len(),
            children: self.nodes.iter().map(|(_, t)| t.vext.len() + t.sext.len()).sum(),
        }
    }

    /// One line per interned type: `id rank (k,s) atomic-hash #vext #sext`.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for i in 0..self.len() {
            let t = self.get(TypeId(i as u32));
            let mut h = Sha256::new();
            for name in self.label_names(t.labels) {
                h.update(name.as_bytes());
                h.update([0]);
            }
            for w in t.atoms.iter() {
                h.update(w.to_le_bytes());
            }
            let ah = hex(&h.finalize()[..6]);
            let _ = writeln!(
                out,
                "{i} {} ({},{}) {ah} {} {}",
                t.rank,
                t.k,
                t.s,
                t.vext.len(),
                t.sext.len()
            );
        }
        out
    }
}

pub fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn layout_is_dense() {
        let l = Layout { k: 3, s: 2, nl: 2 };
        let mut idx = Vec::new();
        for i in 0..3 {
            for j in i + 1..3 {
                idx.push(l.eq(i, j));
                idx.push(l.edge(j, i));
            }
            for a in 0..2 {
                idx.push(l.label(i, a));
                idx.push(l.member(i, a));
            }
        }
        idx.sort();
        assert_eq!(idx, (0..l.bits()).collect::<Vec<_>>());
    }

    #[test]
    fn interning_is_structural() {
        let store = TypeStore::new();
        let ls = store.label_set(&["A".to_string()]);
        let node = |bits: u64| TypeNode {
            rank: 0,
            budget: 0,
            k: 1,
            s: 0,
            labels: ls,
            atoms: vec![bits].into(),
            vext: Box::new([]),
            sext: Box::new([]),
        };
        let a = store.intern(node(1));
        let b = store.intern(node(0));
        assert_ne!(a, b);
        assert_eq!(store.intern(node(1)), a);
        assert_eq!(store.len(), 2);
        assert_ne!(store.digest(a), store.digest(b));
        assert_eq!(store.dump().lines().count(), 2);
    }
}
