mod common;

use common::{random_graph, tuples, vocab};
use msolearn::graph::{trivial_expression, CwExpression};
use msolearn::logic::{eval_formula, formula_bank, free_var_names};
use msolearn::types::{compute_type, type_satisfies, SlotMap, TypeStore};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn satisfaction_matches_evaluation(seed in any::<u64>(), n in 1usize..=4, q in 0usize..=2, k in 0usize..=2, ell in 0usize..=1) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_graph(&mut rng, "v", n, &["A", "B"]);
        let store = TypeStore::new();
        let bank = formula_bank(&vocab(&["A", "B"]), q, k, ell, 60);
        let names = free_var_names(k, ell);
        let slots = SlotMap::from_vars(&names);
        let verts: Vec<String> = g.vertices().map(String::from).collect();
        for t in tuples(n, k + ell) {
            let ids: Vec<&str> = t.iter().map(|&i| verts[i].as_str()).collect();
            let ty = compute_type(&store, &g, &ids, &[], q, q).unwrap();
            let mut a = msolearn::logic::Assignment::new();
            for (name, v) in names.iter().zip(&ids) {
                a = a.with(name, v);
            }
            for phi in &bank {
                prop_assert_eq!(type_satisfies(&store, ty, phi, &slots).unwrap(), eval_formula(&g, phi, &a).unwrap(), "{}", phi);
            }
        }
    }

    #[test]
    fn unary_maps_commute(seed in any::<u64>(), n in 1usize..=4, q in 0usize..=2, op in 0usize..3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_graph(&mut rng, "v", n, &["A", "B"]);
        let e = trivial_expression(&g).unwrap();
        let (h, mapped) = match op {
            0 => (e.eta("A", "B"), 0),
            1 => (e.rho("A", "B"), 1),
            _ => (e.delta("A"), 2),
        };
        let h = h.eval().unwrap();
        let store = TypeStore::new();
        let verts: Vec<String> = g.vertices().map(String::from).collect();
        for t in tuples(n, 2) {
            let ids: Vec<&str> = t.iter().map(|&i| verts[i].as_str()).collect();
            let ty = compute_type(&store, &g, &ids, &[], q, q).unwrap();
            let fwd = match mapped {
                0 => store.apply_eta(ty, "A", "B").unwrap(),
                1 => store.apply_rho(ty, "A", "B").unwrap(),
                _ => store.apply_delta(ty, "A").unwrap(),
            };
            prop_assert_eq!(fwd, compute_type(&store, &h, &ids, &[], q, q).unwrap());
        }
    }

    #[test]
    fn composition_matches_union(seed in any::<u64>(), n1 in 1usize..=3, n2 in 1usize..=2, q in 0usize..=2, marked in any::<bool>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g1 = random_graph(&mut rng, "a", n1, &["A"]);
        let g2 = random_graph(&mut rng, "b", n2, &["A", "B"]);
        let (e1, e2) = (trivial_expression(&g1).unwrap(), trivial_expression(&g2).unwrap());
        let u: CwExpression = if marked { e1.ordered_union(e2) } else { e1.union(e2) };
        let u = u.eval().unwrap();
        let store = TypeStore::new();
        let v1: Vec<String> = g1.vertices().map(String::from).collect();
        let v2: Vec<String> = g2.vertices().map(String::from).collect();
        // Slot 0 from the left, slot 1 from the right, slot 2 from the left.
        for (i, j, l) in [(0, 0, n1 - 1), (n1 - 1, n2 - 1, 0)] {
            let ta = compute_type(&store, &g1, &[&v1[i], &v1[l]], &[], q, q).unwrap();
            let tb = compute_type(&store, &g2, &[&v2[j]], &[], q, q).unwrap();
            let c = store.compose(ta, tb, 0b010, marked).unwrap();
            let direct = compute_type(&store, &u, &[&v1[i], &v2[j], &v1[l]], &[], q, q).unwrap();
            prop_assert_eq!(c, direct);
        }
    }
}
