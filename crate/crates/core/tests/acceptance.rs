//! One pass/fail line per acceptance criterion; the run fails if any does.

mod common;

use std::collections::{BTreeSet, HashMap, HashSet};
use std::time::{Duration, Instant};

use common::{agrees, assignment, brute_consistent, brute_table, distinct, random_graph, tuples, vocab};
use msolearn::graph::{gen_cograph, random_expression, trivial_expression, CwExpression, LabeledGraph};
use msolearn::learn::{
    classify_many, err_true, learn_1d, pac_learn, verify_witness, DistributionSpec, PacConfig, SupportEntry,
    TrainingSequence,
};
use msolearn::logic::{eval_formula, formula_bank, free_var_names, parse_formula, Assignment, Formula};
use msolearn::realizable::{
    distinct_column_symbol, phi_consistent, realizable_tuples, sauer_shelah_bound, shatter_count, vc_dimension,
    DpConfig,
};
use msolearn::reductions::{gen_wsat, mc_via_learning, wsat_brute, Cnf2, Literal, McConfig, WsatBatch};
use msolearn::types::{compute_type, type_satisfies, SlotMap, TypeStore};
use num_rational::BigRational;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const FIG1: &str = include_str!("data/fig1.cwx");
const EX11: &str = include_str!("data/ex11.txt");
const BIPARTITE_SIDE: &str = include_str!("data/bipartite_side.mso");

// Limits from the acceptance list.
const C1_LIMIT: Duration = Duration::from_secs(30);
const C2_LIMIT: Duration = Duration::from_secs(600);
const C6_LIMIT: Duration = Duration::from_secs(1200);
/// Interned-type cap per reduction table; about 4 GB of store.
const C6_TYPE_CAP: usize = 20_000_000;
const C10_MIN_SUCCESS: f64 = 0.7;
const C11_MAX_GROWTH: f64 = 25.0;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn secs(d: Duration) -> String {
    format!("{:.2}s", d.as_secs_f64())
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let expr = CwExpression::parse_cwx(FIG1).unwrap();
    let g = expr.eval().unwrap();
    let s = TrainingSequence::parse(EX11).unwrap();
    let store = TypeStore::new();
    let h = learn_1d(&store, &expr, &s, DpConfig::new(3, 1, 1), None).unwrap();
    let Some(h) = h else {
        return outcome(false, "no hypothesis".into());
    };
    let got = classify_many(&store, &expr, &h, &s.tuples(), 1).unwrap();
    let matched = got.iter().zip(s.labels()).filter(|(a, b)| **a == *b).count();
    let phi = parse_formula(BIPARTITE_SIDE, &BTreeSet::new()).unwrap();
    let witness = verify_witness(&g, &phi, &s, &["v2".to_string()]).unwrap();
    let took = start.elapsed();
    outcome(
        g.order() == 6 && g.edge_count() == 6 && matched == 4 && witness && took < C1_LIMIT,
        format!("{matched}/4 labels matched, w=(v2) verified: {witness}, {}", secs(took)),
    )
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let (mut checks, mut bad) = (0usize, 0usize);
    for graph in 0..200 {
        let n = 1 + graph % 5;
        let labels: &[&str] = match graph % 3 {
            0 => &[],
            1 => &["A"],
            _ => &["A", "B"],
        };
        let g = random_graph(&mut rng, "v", n, labels);
        let verts: Vec<String> = g.vertices().map(String::from).collect();
        let store = TypeStore::new();
        for q in 0..=2 {
            for k in 0..=3 {
                for ell in 0..=3 - k {
                    let names = free_var_names(k, ell);
                    let slots = SlotMap::from_vars(&names);
                    let bank = formula_bank(&g.label_names(), q, k, ell, 40);
                    for t in tuples(n, k + ell) {
                        let ids: Vec<&str> = t.iter().map(|&i| verts[i].as_str()).collect();
                        let ty = compute_type(&store, &g, &ids, &[], q, q).unwrap();
                        let mut a = Assignment::new();
                        for (name, v) in names.iter().zip(&ids) {
                            a = a.with(name, v);
                        }
                        for phi in &bank {
                            checks += 1;
                            if type_satisfies(&store, ty, phi, &slots).unwrap() != eval_formula(&g, phi, &a).unwrap() {
                                bad += 1;
                            }
                        }
                    }
                }
            }
        }
    }
    let took = start.elapsed();
    outcome(bad == 0 && took < C2_LIMIT, format!("{checks} checks on 200 graphs, {bad} disagreements, {}", secs(took)))
}

fn criterion_3() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut counts = [0usize; 4];
    let mut bad = 0;
    for case in 0..800 {
        let op = case % 4;
        let q = rng.gen_range(0..=2);
        let store = TypeStore::new();
        if op < 3 {
            let n = rng.gen_range(1..=5);
            let g = random_graph(&mut rng, "v", n, &["A", "B"]);
            let e = trivial_expression(&g).unwrap();
            let h = match op {
                0 => e.eta("A", "B"),
                1 => e.rho("A", "B"),
                _ => e.delta("A"),
            }
            .eval()
            .unwrap();
            let verts: Vec<String> = g.vertices().map(String::from).collect();
            let len = rng.gen_range(1..=2);
            let ids: Vec<&str> = (0..len).map(|_| verts[rng.gen_range(0..n)].as_str()).collect();
            let ty = compute_type(&store, &g, &ids, &[], q, q).unwrap();
            let fwd = match op {
                0 => store.apply_eta(ty, "A", "B"),
                1 => store.apply_rho(ty, "A", "B"),
                _ => store.apply_delta(ty, "A"),
            }
            .unwrap();
            if fwd != compute_type(&store, &h, &ids, &[], q, q).unwrap() {
                bad += 1;
            }
        } else {
            let n1 = rng.gen_range(1..=4);
            let n2 = rng.gen_range(1..=5 - n1);
            let g1 = random_graph(&mut rng, "a", n1, &["A"]);
            let g2 = random_graph(&mut rng, "b", n2, &["A", "B"]);
            let u = trivial_expression(&g1).unwrap().ordered_union(trivial_expression(&g2).unwrap()).eval().unwrap();
            let v1: Vec<String> = g1.vertices().map(String::from).collect();
            let v2: Vec<String> = g2.vertices().map(String::from).collect();
            // Random interleaving of one or two slots per side.
            let (la, lb) = (rng.gen_range(0..=2), rng.gen_range(0..=2));
            let a: Vec<&str> = (0..la).map(|_| v1[rng.gen_range(0..n1)].as_str()).collect();
            let b: Vec<&str> = (0..lb).map(|_| v2[rng.gen_range(0..n2)].as_str()).collect();
            let mut sides = 0u64;
            let mut joint = Vec::new();
            let (mut i, mut j) = (0, 0);
            while i < la || j < lb {
                if j < lb && (i == la || rng.gen_bool(0.5)) {
                    sides |= 1 << joint.len();
                    joint.push(b[j]);
                    j += 1;
                } else {
                    joint.push(a[i]);
                    i += 1;
                }
            }
            let ta = compute_type(&store, &g1, &a, &[], q, q).unwrap();
            let tb = compute_type(&store, &g2, &b, &[], q, q).unwrap();
            if store.compose(ta, tb, sides, true).unwrap() != compute_type(&store, &u, &joint, &[], q, q).unwrap() {
                bad += 1;
            }
        }
        counts[op] += 1;
    }
    outcome(
        bad == 0 && counts.iter().all(|&c| c >= 200),
        format!("eta {} / rho {} / delta {} / ordered union {} cases, {bad} mismatches", counts[0], counts[1], counts[2], counts[3]),
    )
}

struct Instance {
    expr: CwExpression,
    examples: Vec<Vec<String>>,
    k: usize,
    ell: usize,
    q: usize,
    budget: usize,
}

fn instance_pool() -> Vec<Instance> {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    (0..120u64)
        .map(|seed| {
            let n = rng.gen_range(1..=8);
            let expr = random_expression(n, 1000 + seed).unwrap();
            let verts: Vec<String> = expr.base_vertices().iter().map(|s| s.to_string()).collect();
            let (k, ell, q) = (rng.gen_range(1..=2), rng.gen_range(0..=2), rng.gen_range(0..=2));
            // Full set budget at rank 2 only on graphs up to five vertices.
            let budget = rng.gen_range(0..=if n > 5 { q.min(1) } else { q });
            let m = rng.gen_range(0..=4);
            let examples = (0..m).map(|_| (0..k).map(|_| verts[rng.gen_range(0..n)].clone()).collect()).collect();
            Instance { expr, examples, k, ell, q, budget }
        })
        .collect()
}

fn criterion_4(pool: &[Instance]) -> Outcome {
    let start = Instant::now();
    let mut bad = 0;
    for inst in pool {
        let store = TypeStore::new();
        let cfg = DpConfig::new(inst.q, inst.ell, inst.budget);
        let table = realizable_tuples(&store, &inst.expr, &inst.examples, cfg).unwrap();
        let got: BTreeSet<_> = table.rows.iter().map(|r| r.types.to_vec()).collect();
        if got != brute_table(&store, &inst.expr, &inst.examples, inst.q, inst.ell, inst.budget) {
            bad += 1;
        }
    }
    outcome(bad == 0 && pool.len() >= 100, format!("{} instances, {bad} mismatches, {}", pool.len(), secs(start.elapsed())))
}

fn criterion_5(pool: &[Instance]) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (mut bad, mut consistent) = (0, 0);
    for inst in pool {
        let g = inst.expr.eval().unwrap();
        let bank = formula_bank(&g.label_names(), inst.q, inst.k, inst.ell, 60);
        let bank: Vec<&Formula> = bank.iter().filter(|f| f.set_depth() <= inst.budget).collect();
        let phi = bank[rng.gen_range(0..bank.len())];
        let verts: Vec<String> = g.vertices().map(String::from).collect();
        // Half the label vectors come from the formula itself.
        let labels: Vec<bool> = if rng.gen_bool(0.5) {
            let w: Vec<String> = (0..inst.ell).map(|_| verts[rng.gen_range(0..verts.len())].clone()).collect();
            inst.examples.iter().map(|e| eval_formula(&g, phi, &assignment(inst.k, e, &w)).unwrap()).collect()
        } else {
            inst.examples.iter().map(|_| rng.gen_bool(0.5)).collect()
        };
        let store = TypeStore::new();
        let cfg = DpConfig::new(inst.q, inst.ell, inst.budget);
        let got = phi_consistent(&store, &inst.expr, &inst.examples, &labels, phi, cfg).unwrap();
        let want = brute_consistent(&g, phi, &inst.examples, &labels, inst.ell);
        let verified = got.as_ref().is_none_or(|w| agrees(&g, phi, &inst.examples, &labels, w));
        if got.is_some() != want.is_some() || !verified {
            bad += 1;
        }
        consistent += usize::from(got.is_some());
    }
    outcome(bad == 0, format!("{} instances ({consistent} consistent), {bad} disagreements or unverified witnesses", pool.len()))
}

fn criterion_6() -> Outcome {
    let start = Instant::now();
    let mut checked = 0usize;
    let mut bad = 0usize;
    let mut direct = 0usize;
    let mut skipped: Vec<String> = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for n in 1..=4usize {
        let lits: Vec<Literal> = (0..n).flat_map(|v| [(v, true), (v, false)]).collect();
        let mut clauses: Vec<[Literal; 2]> = Vec::new();
        for (i, &a) in lits.iter().enumerate() {
            for &b in &lits[i..] {
                clauses.push([a, b]);
            }
        }
        let mut cnfs: Vec<Cnf2> = Vec::new();
        for pick in subsets(clauses.len(), 4) {
            cnfs.push(Cnf2::new(n, pick.iter().map(|&i| clauses[i]).collect()).unwrap());
        }
        for ell in 0..=n {
            // Tables only grow with ell, so a capped ell rules out the rest.
            if skipped.iter().any(|s| s.starts_with(&format!("n={n} "))) {
                skipped.push(format!("n={n} ell={ell} (not attempted)"));
                continue;
            }
            let store = TypeStore::new();
            let batch = match WsatBatch::build(&store, n, ell, 1, Some(C6_TYPE_CAP)) {
                Ok(b) => b,
                Err(e) => {
                    skipped.push(format!("n={n} ell={ell} ({e})"));
                    continue;
                }
            };
            for f in &cnfs {
                checked += 1;
                if batch.consistent(f).is_some() != wsat_brute(f, ell) {
                    bad += 1;
                }
            }
            // The batched answers against direct runs on the generated instance.
            if n <= 3 && ell <= 2 {
                for _ in 0..6 {
                    let f = &cnfs[rng.gen_range(0..cnfs.len())];
                    let inst = gen_wsat(f, ell).unwrap();
                    let w = phi_consistent(&store, &inst.expr, &inst.examples, &inst.labels, &inst.phi, DpConfig::new(inst.q, ell, 0))
                        .unwrap();
                    direct += 1;
                    if w.as_deref() != batch.consistent(f) {
                        bad += 1;
                    }
                }
            }
        }
    }
    let took = start.elapsed();
    let mut detail = format!("{checked} (cnf, ell) pairs, {direct} direct runs, {bad} mismatches, {}", secs(took));
    if !skipped.is_empty() {
        detail.push_str(&format!("; not decided: {}", skipped.join(", ")));
    }
    outcome(bad == 0 && skipped.is_empty() && took < C6_LIMIT, detail)
}

/// Index sets of size at most `max` from `0..n`.
fn subsets(n: usize, max: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    let mut frontier = vec![Vec::new()];
    for _ in 0..max {
        let mut next = Vec::new();
        for s in &frontier {
            let from = s.last().map_or(0, |&l: &usize| l + 1);
            for i in from..n {
                let mut t = s.clone();
                t.push(i);
                next.push(t);
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

fn criterion_7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut ok = 0;
    for _ in 0..1000 {
        let s = rng.gen_range(2..=4usize);
        let c = rng.gen_range(2..=4usize);
        let n = (c - 1).pow(s as u32 - 1) + 1 + rng.gen_range(0..4);
        let mut m = 1;
        while s.pow(m as u32) < n {
            m += 1;
        }
        m += rng.gen_range(0..3);
        let mut cols: Vec<Vec<usize>> = Vec::new();
        let mut seen = HashSet::new();
        while cols.len() < n {
            let col: Vec<usize> = (0..m).map(|_| rng.gen_range(0..s)).collect();
            if seen.insert(col.clone()) {
                cols.push(col);
            }
        }
        let rows: Vec<Vec<usize>> = (0..m).map(|i| cols.iter().map(|c| c[i]).collect()).collect();
        if let Ok(Some(sym)) = distinct_column_symbol(&rows, c) {
            let ind: HashSet<Vec<bool>> = cols.iter().map(|col| col.iter().map(|&x| x == sym).collect()).collect();
            ok += usize::from(ind.len() >= c);
        }
    }
    outcome(ok == 1000, format!("{ok}/1000 matrices with a verified symbol"))
}

fn criterion_8() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let (mut ok, mut total) = (0, 0);
    for case in 0..240 {
        let n = rng.gen_range(2..=5);
        let ell = 1 + case % 2;
        let g = random_graph(&mut rng, "v", n, &["A"]);
        let bank = formula_bank(&vocab(&["A"]), 1, 1, ell, 80);
        let phi = &bank[rng.gen_range(0..bank.len())];
        let verts: Vec<String> = g.vertices().map(String::from).collect();
        let size = rng.gen_range(0..=n);
        let x: Vec<Vec<String>> = distinct(&(0..size).map(|_| vec![verts[rng.gen_range(0..n)].clone()]).collect::<Vec<_>>());
        let d = vc_dimension(&g, phi, 1, ell, n).unwrap();
        let count = shatter_count(&g, phi, &x, ell).unwrap();
        total += 1;
        ok += usize::from(count as u128 <= sauer_shelah_bound(x.len(), d));
    }
    outcome(ok == total && total >= 200, format!("{ok}/{total} samples within the bound"))
}

fn criterion_9() -> Outcome {
    let start = Instant::now();
    let v = vocab(&["A"]);
    let mut sentences: Vec<Formula> = formula_bank(&v, 2, 0, 0, 40);
    for text in [
        "ex x. all y. (x = y | E(x,y))",
        "all x. (A(x) -> ex y. E(x,y))",
        "EX X. ex x. (X(x) & !A(x))",
        "EX X. all x. (X(x) <-> A(x))",
        "all x. ex y. (!(x = y) & !E(x,y))",
        "ex x. ex y. (E(x,y) & A(x) & !A(y))",
    ] {
        sentences.push(parse_formula(text, &v).unwrap());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let graphs: Vec<LabeledGraph> = (0..12).map(|i| random_graph(&mut rng, "v", 1 + i % 6, &["A"])).collect();
    let (mut agree, mut total) = (0, 0);
    let store = TypeStore::new();
    for g in &graphs {
        for phi in &sentences {
            let (got, _) = mc_via_learning(&store, g, phi, &McConfig::default()).unwrap();
            total += 1;
            agree += usize::from(got == eval_formula(g, phi, &Assignment::new()).unwrap());
        }
    }
    outcome(
        agree == total,
        format!("{agree}/{total} ({} sentences x {} graphs), {}", sentences.len(), graphs.len(), secs(start.elapsed())),
    )
}

fn criterion_10() -> Outcome {
    let expr = gen_cograph(20, 10).unwrap();
    let g = expr.eval().unwrap();
    let verts: Vec<String> = g.vertices().map(String::from).collect();
    // Target: adjacency to a fixed vertex, a rank-0 concept with one parameter.
    let target = parse_formula("E(x1,y1)", &BTreeSet::new()).unwrap();
    let w = vec![verts[3].clone()];
    let weights: Vec<i64> = (0..verts.len() as i64).map(|i| 1 + i % 3).collect();
    let total: i64 = weights.iter().sum();
    let support: Vec<SupportEntry> = verts
        .iter()
        .zip(&weights)
        .map(|(v, &wt)| SupportEntry {
            tuple: vec![v.clone()],
            label: eval_formula(&g, &target, &assignment(1, &[v.clone()], &w)).unwrap(),
            weight: BigRational::new(wt.into(), total.into()),
        })
        .collect();
    let d = DistributionSpec::new(support).unwrap();
    let min = best_in_class(&g, &d);
    let eps = BigRational::new(1.into(), 4.into());
    let store = TypeStore::new();
    let cfg = DpConfig::new(1, 1, 0);
    let mut good = 0;
    let mut m = 0;
    for seed in 0..50 {
        let pac = PacConfig { eps: 0.25, delta: 0.2, seed, ..PacConfig::default() };
        let run = pac_learn(&store, &expr, &d, cfg, &pac).unwrap();
        m = run.m;
        let err = err_true(&store, &expr, &run.hypothesis, &d, 1).unwrap();
        good += usize::from(err <= &min + &eps);
    }
    let frac = good as f64 / 50.0;
    outcome(frac >= C10_MIN_SUCCESS, format!("{good}/50 runs within min+eps (min={min}, m={m}), fraction {frac:.2}"))
}

/// Least true error over all parameters with per-type majority labels,
/// from brute-force types.
fn best_in_class(g: &LabeledGraph, d: &DistributionSpec) -> BigRational {
    let store = TypeStore::new();
    let mut best: Option<BigRational> = None;
    for w in g.vertices() {
        let mut mass: HashMap<_, (BigRational, BigRational)> = HashMap::new();
        for e in &d.support {
            let t = compute_type(&store, g, &[e.tuple[0].as_str(), w], &[], 1, 0).unwrap();
            let c = mass.entry(t).or_insert_with(|| (BigRational::zero(), BigRational::zero()));
            if e.label {
                c.0 += &e.weight;
            } else {
                c.1 += &e.weight;
            }
        }
        let err = mass.values().fold(BigRational::zero(), |acc, (p, n)| acc + if p > n { n.clone() } else { p.clone() });
        best = Some(match best {
            Some(b) if b <= err => b,
            _ => err,
        });
    }
    best.unwrap()
}

fn criterion_11() -> Outcome {
    let mut times = Vec::new();
    let mut visits_ok = true;
    let mut parts = Vec::new();
    for (i, n) in [50usize, 100, 200].into_iter().enumerate() {
        let expr = gen_cograph(n, 11 + i as u64).unwrap();
        let verts: Vec<String> = expr.base_vertices().iter().map(|s| s.to_string()).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(n as u64);
        let examples: Vec<Vec<String>> =
            (0..4).map(|_| (0..2).map(|_| verts[rng.gen_range(0..n)].clone()).collect()).collect();
        let mut best = Duration::MAX;
        for _ in 0..3 {
            let store = TypeStore::new();
            let start = Instant::now();
            let table = realizable_tuples(&store, &expr, &examples, DpConfig::new(1, 1, 0)).unwrap();
            best = best.min(start.elapsed());
            visits_ok &= table.visits == expr.size();
        }
        parts.push(format!("n={n} |expr|={} {}", expr.size(), secs(best)));
        times.push(best.as_secs_f64());
    }
    let growth = times[2] / times[0].max(1e-6);
    outcome(
        visits_ok && growth <= C11_MAX_GROWTH,
        format!("{}, visits equal expression size: {visits_ok}, growth 50->200 {growth:.1}x", parts.join(", ")),
    )
}

#[test]
fn acceptance() {
    let pool = instance_pool();
    let runs: Vec<(usize, Box<dyn Fn() -> Outcome + '_>)> = vec![
        (1, Box::new(criterion_1)),
        (2, Box::new(criterion_2)),
        (3, Box::new(criterion_3)),
        (4, Box::new(|| criterion_4(&pool))),
        (5, Box::new(|| criterion_5(&pool))),
        (7, Box::new(criterion_7)),
        (8, Box::new(criterion_8)),
        (9, Box::new(criterion_9)),
        (10, Box::new(criterion_10)),
        (11, Box::new(criterion_11)),
        (6, Box::new(criterion_6)),
    ];
    let mut results = Vec::new();
    for (id, run) in &runs {
        let o = run();
        println!("criterion {id:>2}: {} | {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        results.push((*id, o.pass));
    }
    results.sort();
    let failed: Vec<usize> = results.iter().filter(|(_, p)| !p).map(|(i, _)| *i).collect();
    println!("acceptance: {}/{} criteria pass", results.len() - failed.len(), results.len());
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
