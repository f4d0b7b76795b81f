use std::collections::BTreeMap;

use crate::logic::Formula;

use super::store::{bit, TypeId, TypeStore};
use super::TypeError;

/// Which type slot each free variable of a formula refers to.
#[derive(Clone, Debug, Default)]
pub struct SlotMap {
    pub individual: BTreeMap<String, usize>,
    pub sets: BTreeMap<String, usize>,
}

impl SlotMap {
    /// Maps `vars[i]` to slot `i`.
    pub fn from_vars<S: AsRef<str>>(vars: &[S]) -> Self {
        SlotMap {
            individual: vars.iter().enumerate().map(|(i, v)| (v.as_ref().to_string(), i)).collect(),
            sets: BTreeMap::new(),
        }
    }
}

/// Decides `phi` in the type `id` by structural recursion.
pub fn type_satisfies(store: &TypeStore, id: TypeId, phi: &Formula, slots: &SlotMap) -> Result<bool, TypeError> {
    let t = store.get(id);
    let (qr, sd) = (phi.quantifier_rank(), phi.set_depth());
    if qr > t.rank as usize {
        return Err(TypeError::RankExceeded { formula: qr, ty: t.rank as usize });
    }
    if sd > t.budget as usize {
        return Err(TypeError::BudgetExceeded { formula: sd, ty: t.budget as usize });
    }
    let fv = phi.free_vars();
    for v in &fv.individual {
        match slots.individual.get(v) {
            Some(&s) if s < t.k as usize => {}
            _ => return Err(TypeError::Unmapped(v.clone())),
        }
    }
    for v in &fv.sets {
        match slots.sets.get(v) {
            Some(&s) if s < t.s as usize => {}
            _ => return Err(TypeError::Unmapped(v.clone())),
        }
    }
    let mut slots = slots.clone();
    Ok(sat(store, id, phi, &mut slots))
}

fn sat(store: &TypeStore, id: TypeId, phi: &Formula, slots: &mut SlotMap) -> bool {
    use Formula::*;
    let t = store.get(id);
    let l = store.layout(id);
    let slot = |v: &String, slots: &SlotMap| slots.individual[v];
    match phi {
        True => true,
        False => false,
        Eq(a, b) => {
            let (i, j) = (slot(a, slots), slot(b, slots));
            i == j || bit(&t.atoms, l.eq(i, j))
        }
        Edge(a, b) => {
            let (i, j) = (slot(a, slots), slot(b, slots));
            i != j && bit(&t.atoms, l.edge(i, j))
        }
        Label(name, v) => {
            let names = store.label_names(t.labels);
            match names.binary_search_by(|n| n.as_str().cmp(name)) {
                Ok(c) => bit(&t.atoms, l.label(slot(v, slots), c)),
                Err(_) => false,
            }
        }
        Member(s, v) => bit(&t.atoms, l.member(slot(v, slots), slots.sets[s])),
        Not(a) => !sat(store, id, a, slots),
        And(a, b) => sat(store, id, a, slots) && sat(store, id, b, slots),
        Or(a, b) => sat(store, id, a, slots) || sat(store, id, b, slots),
        Implies(a, b) => !sat(store, id, a, slots) || sat(store, id, b, slots),
        Iff(a, b) => sat(store, id, a, slots) == sat(store, id, b, slots),
        Exists(v, body) | Forall(v, body) => {
            let want = matches!(phi, Exists(..));
            let old = slots.individual.insert(v.clone(), t.k as usize);
            let hit = t.vext.iter().any(|&c| sat(store, c, body, slots) == want);
            restore(&mut slots.individual, v, old);
            hit == want
        }
        ExistsSet(v, body) | ForallSet(v, body) => {
            let want = matches!(phi, ExistsSet(..));
            let old = slots.sets.insert(v.clone(), t.s as usize);
            let hit = t.sext.iter().any(|&c| sat(store, c, body, slots) == want);
            restore(&mut slots.sets, v, old);
            hit == want
        }
    }
}

fn restore(map: &mut BTreeMap<String, usize>, v: &str, old: Option<usize>) {
    match old {
        Some(o) => map.insert(v.to_string(), o),
        None => map.remove(v),
    };
}
