mod common;

use std::collections::BTreeSet;

use common::{random_graph, vocab};
use msolearn::logic::{eval_formula, parse_formula, Assignment};
use msolearn::reductions::{
    copy_id, gen_wsat, literal_vertex, mc_via_learning, two_copy_gadget, Cnf2, McConfig, W1, W2,
};
use msolearn::types::TypeStore;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn arb_cnf(max_n: usize) -> impl Strategy<Value = Cnf2> {
    (1usize..=max_n).prop_flat_map(|n| {
        proptest::collection::vec(((0..n, any::<bool>()), (0..n, any::<bool>())), 0..6)
            .prop_map(move |cl| Cnf2::new(n, cl.into_iter().map(|(a, b)| [a, b]).collect()).unwrap())
    })
}

proptest! {
    #[test]
    fn wsat_degree_profile(cnf in arb_cnf(5), ell in 0usize..=5) {
        prop_assume!(ell <= cnf.n);
        let inst = gen_wsat(&cnf, ell).unwrap();
        let g = inst.expr.eval().unwrap();
        prop_assert_eq!(g.order(), 5 * cnf.n);
        for i in 1..=cnf.n {
            prop_assert_eq!(g.degree(&format!("X{i}")), 3);
            prop_assert_eq!(g.degree(&format!("nX{i}")), 2);
            for v in [format!("Y{i}_1"), format!("Y{i}_2"), format!("Z{i}")] {
                prop_assert_eq!(g.degree(&v), 1);
            }
        }
        prop_assert!(inst.expr.labels_used().len() <= 2);
        prop_assert_eq!(inst.examples.len(), cnf.clauses.len());
        prop_assert!(inst.labels.iter().all(|&l| l));
        prop_assert_eq!(inst.phi.set_depth(), 0);
    }

    #[test]
    fn dimacs_round_trips(cnf in arb_cnf(5)) {
        prop_assert_eq!(Cnf2::parse_dimacs(&cnf.to_dimacs()).unwrap(), cnf);
    }

    /// A satisfying assignment of weight ℓ read off as parameters satisfies
    /// the generated formula on every clause.
    #[test]
    fn satisfying_assignment_is_a_witness(cnf in arb_cnf(3), ell in 0usize..=3) {
        prop_assume!(ell <= cnf.n);
        let inst = gen_wsat(&cnf, ell).unwrap();
        let g = inst.expr.eval().unwrap();
        for mask in 0u32..1 << cnf.n {
            if mask.count_ones() as usize != ell {
                continue;
            }
            let a: Vec<bool> = (0..cnf.n).map(|i| mask >> i & 1 == 1).collect();
            let params: Vec<String> = (0..cnf.n).filter(|&i| a[i]).map(|i| literal_vertex((i, true))).collect();
            let ok = common::agrees(&g, &inst.phi, &inst.examples, &inst.labels, &params);
            prop_assert_eq!(ok, cnf.satisfied_by(&a));
        }
    }

    #[test]
    fn gadget_copies_are_isomorphic(seed in any::<u64>(), n in 1usize..=5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_graph(&mut rng, "v", n, &["A"]);
        let verts: Vec<String> = g.vertices().map(String::from).collect();
        let c1: BTreeSet<String> = verts.iter().filter(|_| rng.gen_bool(0.5)).cloned().collect();
        let c2: BTreeSet<String> = verts.iter().filter(|_| rng.gen_bool(0.5)).cloned().collect();
        let gg = two_copy_gadget(&g, &c1, &c2, "C").unwrap();
        prop_assert_eq!(gg.order(), 2 * n + 2);
        prop_assert_eq!(gg.label_extension("C").len(), c1.len() + c2.len());
        for (i, w) in [(1, W1), (2, W2)] {
            for a in &verts {
                prop_assert!(gg.has_edge(w, &copy_id(i, a)));
                prop_assert_eq!(gg.has_label("A", &copy_id(i, a)), g.has_label("A", a));
                for b in &verts {
                    prop_assert_eq!(gg.has_edge(&copy_id(i, a), &copy_id(i, b)), g.has_edge(a, b));
                    prop_assert!(!gg.has_edge(&copy_id(1, a), &copy_id(2, b)));
                }
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn model_checking_through_the_learner(seed in any::<u64>(), n in 1usize..=4, pick in 0usize..6) {
        let sentences = [
            "ex x. A(x)",
            "all x. (A(x) -> ex y. E(x,y))",
            "ex x. all y. (x = y | E(x,y))",
            "!(ex x. ex y. (E(x,y) & A(x) & A(y)))",
            "EX X. ex x. (X(x) & !A(x))",
            "all x. ex y. (!(x = y) & !E(x,y))",
        ];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_graph(&mut rng, "v", n, &["A"]);
        let phi = parse_formula(sentences[pick], &vocab(&["A"])).unwrap();
        let store = TypeStore::new();
        let (got, _) = mc_via_learning(&store, &g, &phi, &McConfig::default()).unwrap();
        prop_assert_eq!(got, eval_formula(&g, &phi, &Assignment::new()).unwrap());
    }
}
