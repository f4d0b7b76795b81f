use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustc_hash::FxHashMap;

use crate::graph::CwExpression;
use crate::realizable::{realizable_tuples, DpConfig, RealizableTable, Row};
use crate::types::{TypeId, TypeStore};

use super::consistent::{joint_types, pinning_loop, synthesize_hypothesis};
use super::{classify_many, DistributionSpec, Hypothesis, LearnError, TrainingSequence};

/// `ceil(c·(d + ln(1/δ))/ε²)`.
pub fn sample_complexity(d: usize, eps: f64, delta: f64, c: f64) -> Result<u64, LearnError> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(LearnError::Range(format!("epsilon {eps} not in (0,1)")));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(LearnError::Range(format!("delta {delta} not in (0,1)")));
    }
    if c.is_nan() || c <= 0.0 {
        return Err(LearnError::Range(format!("constant {c} must be positive")));
    }
    Ok((c * (d as f64 + (1.0 / delta).ln()) / (eps * eps)).ceil() as u64)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ErmMode {
    /// Per-type majority labels over the realizable table.
    Types,
    /// Largest consistent subsequence, by exhaustive sweep (m ≤ 12).
    Subsequence,
}

/// Training errors of the best labeling of `row`: each type takes its
/// majority label, ties negative.
fn row_errors(table: &RealizableTable, row: &Row, labels: &[bool]) -> usize {
    let mut counts: FxHashMap<TypeId, (usize, usize)> = FxHashMap::default();
    for (i, &l) in labels.iter().enumerate() {
        let c = counts.entry(table.type_of(row, i)).or_default();
        if l {
            c.0 += 1;
        } else {
            c.1 += 1;
        }
    }
    counts.values().map(|&(p, n)| if p > n { n } else { p }).sum()
}

fn majority_positive(types: &[TypeId], labels: &[bool]) -> BTreeSet<TypeId> {
    let mut counts: FxHashMap<TypeId, (usize, usize)> = FxHashMap::default();
    for (&t, &l) in types.iter().zip(labels) {
        let c = counts.entry(t).or_default();
        if l {
            c.0 += 1;
        } else {
            c.1 += 1;
        }
    }
    counts.into_iter().filter(|(_, (p, n))| p > n).map(|(t, _)| t).collect()
}

/// Empirical risk minimization over the rank-q class with `cfg.ell`
/// parameters.
pub fn erm(
    store: &TypeStore,
    expr: &CwExpression,
    s: &TrainingSequence,
    cfg: DpConfig,
    mode: ErmMode,
) -> Result<Hypothesis, LearnError> {
    let (tuples, labels) = (s.tuples(), s.labels());
    match mode {
        ErmMode::Types => {
            let table = realizable_tuples(store, expr, &tuples, cfg)?;
            let best = table.rows.iter().map(|r| row_errors(&table, r, &labels)).min().expect("nonempty table");
            let mut accept = |_: &TypeStore, t: &RealizableTable, r: &Row| Ok(row_errors(t, r, &labels) == best);
            let w = pinning_loop(store, expr, &tuples, cfg, &BTreeSet::new(), &mut accept)?.expect("best row exists");
            let types = joint_types(store, expr, &tuples, &w, cfg)?;
            let pos = majority_positive(&types, &labels);
            Ok(Hypothesis {
                q: cfg.q,
                ell: cfg.ell,
                set_budget: cfg.budget,
                k: s.k(),
                params: w,
                positive_types: pos.iter().map(|&t| store.digest_hex(t)).collect(),
                formula: None,
                expr_digest: expr.digest(),
            })
        }
        ErmMode::Subsequence => {
            let m = s.len();
            if m > 12 {
                return Err(LearnError::SubsequenceTooLong(m));
            }
            let table = realizable_tuples(store, expr, &tuples, cfg)?;
            for size in (0..=m).rev() {
                for mask in 0u32..(1 << m) {
                    if mask.count_ones() as usize != size {
                        continue;
                    }
                    let keep: Vec<usize> = (0..m).filter(|i| mask >> i & 1 == 1).collect();
                    let ok = table.rows.iter().any(|r| {
                        let mut seen: FxHashMap<TypeId, bool> = FxHashMap::default();
                        keep.iter().all(|&i| *seen.entry(table.type_of(r, i)).or_insert(labels[i]) == labels[i])
                    });
                    if ok {
                        let sub = TrainingSequence::new(keep.iter().map(|&i| s.examples[i].clone()).collect())?;
                        let mut h = synthesize_hypothesis(store, expr, &sub, cfg)?.expect("subsequence is consistent");
                        h.k = s.k();
                        return Ok(h);
                    }
                }
            }
            unreachable!("the empty subsequence is consistent")
        }
    }
}

/// Fraction of examples of `s` that `h` misclassifies.
pub fn err_empirical(
    store: &TypeStore,
    expr: &CwExpression,
    h: &Hypothesis,
    s: &TrainingSequence,
    jobs: usize,
) -> Result<BigRational, LearnError> {
    if s.is_empty() {
        return Err(LearnError::EmptySample);
    }
    let got = classify_many(store, expr, h, &s.tuples(), jobs)?;
    let wrong = got.iter().zip(s.labels()).filter(|(g, l)| **g != *l).count();
    Ok(BigRational::new(BigInt::from(wrong), BigInt::from(s.len())))
}

/// Probability mass of the support that `h` misclassifies.
pub fn err_true(
    store: &TypeStore,
    expr: &CwExpression,
    h: &Hypothesis,
    d: &DistributionSpec,
    jobs: usize,
) -> Result<BigRational, LearnError> {
    let tuples: Vec<Vec<String>> = d.support.iter().map(|e| e.tuple.clone()).collect();
    let got = classify_many(store, expr, h, &tuples, jobs)?;
    let mut err = BigRational::zero();
    for (e, g) in d.support.iter().zip(got) {
        if g != e.label {
            err += &e.weight;
        }
    }
    Ok(err)
}

#[derive(Clone, Debug)]
pub struct PacConfig {
    pub eps: f64,
    pub delta: f64,
    /// Constant in the sample bound.
    pub c: f64,
    /// VC dimension assumed for the sample bound.
    pub vc_dim: usize,
    pub seed: u64,
    pub m_override: Option<usize>,
    pub mode: ErmMode,
}

impl Default for PacConfig {
    fn default() -> Self {
        PacConfig { eps: 0.1, delta: 0.1, c: 8.0, vc_dim: 2, seed: 0, m_override: None, mode: ErmMode::Types }
    }
}

#[derive(Clone, Debug)]
pub struct PacRun {
    pub hypothesis: Hypothesis,
    pub sample: TrainingSequence,
    pub m: usize,
}

/// Draws `m` examples i.i.d. from `d` (inverse CDF over the support in
/// file order) with a seeded generator.
pub fn draw_sample(d: &DistributionSpec, m: usize, seed: u64) -> Result<TrainingSequence, LearnError> {
    let denom = d.support.iter().fold(BigInt::from(1), |acc, e| acc.lcm(e.weight.denom()));
    let scale = denom.to_u64().ok_or_else(|| LearnError::Range("weight denominators too large".into()))?;
    let mut cum = Vec::with_capacity(d.support.len());
    let mut acc = 0u64;
    for e in &d.support {
        let w = (&e.weight * BigRational::from_integer(denom.clone())).to_integer();
        acc += w.to_u64().expect("bounded by the common denominator");
        cum.push(acc);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(m);
    for _ in 0..m {
        let r = rng.gen_range(0..scale);
        let i = cum.partition_point(|&c| c <= r);
        let e = &d.support[i];
        out.push((e.tuple.clone(), e.label));
    }
    TrainingSequence::new(out)
}

/// Agnostic PAC learning: draw a sample, then ERM.
pub fn pac_learn(
    store: &TypeStore,
    expr: &CwExpression,
    d: &DistributionSpec,
    cfg: DpConfig,
    pac: &PacConfig,
) -> Result<PacRun, LearnError> {
    let m = match pac.m_override {
        Some(m) => m,
        None => sample_complexity(pac.vc_dim, pac.eps, pac.delta, pac.c)? as usize,
    };
    let sample = draw_sample(d, m, pac.seed)?;
    let hypothesis = erm(store, expr, &sample, cfg, pac.mode)?;
    Ok(PacRun { hypothesis, sample, m })
}
