//! Brute-force cross-checks behind `--verify`.

use std::collections::BTreeMap;

use msolearn::graph::LabeledGraph;
use msolearn::learn::{verify_witness, TrainingSequence};
use msolearn::logic::Formula;
use msolearn::realizable::DpConfig;
use msolearn::types::{compute_type, TypeStore};

use crate::Failure;

/// Brute force is only attempted up to this many vertices.
const MAX_VERTICES: usize = 12;

pub fn desk_scale(n: usize) -> bool {
    n <= MAX_VERTICES
}

pub fn line(agrees: Option<bool>) -> String {
    match agrees {
        Some(true) => "verify: brute force agrees".into(),
        Some(false) => "verify: brute force DISAGREES".into(),
        None => format!("verify: skipped (more than {MAX_VERTICES} vertices)"),
    }
}

fn params(g: &LabeledGraph, ell: usize) -> Vec<Vec<String>> {
    let vs: Vec<String> = g.vertices().map(String::from).collect();
    let mut out = vec![Vec::new()];
    for _ in 0..ell {
        out = out
            .into_iter()
            .flat_map(|w: Vec<String>| {
                vs.iter().map(move |v| {
                    let mut x = w.clone();
                    x.push(v.clone());
                    x
                })
            })
            .collect();
    }
    out
}

/// Least parameter tuple under which `phi` agrees with every example.
pub fn brute_witness(
    g: &LabeledGraph,
    phi: &Formula,
    s: &TrainingSequence,
    ell: usize,
) -> Result<Option<Vec<String>>, Failure> {
    for w in params(g, ell) {
        if verify_witness(g, phi, s, &w)? {
            return Ok(Some(w));
        }
    }
    Ok(None)
}

/// Whether some parameter tuple gives no two opposite-label examples the
/// same rank-q type.
pub fn brute_separable(g: &LabeledGraph, s: &TrainingSequence, cfg: DpConfig) -> Result<bool, Failure> {
    let store = TypeStore::new();
    'w: for w in params(g, cfg.ell) {
        let mut seen = BTreeMap::new();
        for (t, label) in &s.examples {
            let tuple: Vec<&str> = t.iter().chain(&w).map(String::as_str).collect();
            let id = compute_type(&store, g, &tuple, &[], cfg.q, cfg.budget)?;
            if *seen.entry(id).or_insert(*label) != *label {
                continue 'w;
            }
        }
        return Ok(true);
    }
    Ok(false)
}
