use std::collections::BTreeSet;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::LearnError;

/// Labeled vertex tuples of a common arity.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TrainingSequence {
    pub examples: Vec<(Vec<String>, bool)>,
}

fn parse_sign(s: &str) -> Option<bool> {
    match s {
        "+" => Some(true),
        "-" | "\u{2212}" => Some(false),
        _ => None,
    }
}

impl TrainingSequence {
    pub fn new(examples: Vec<(Vec<String>, bool)>) -> Result<Self, LearnError> {
        let s = TrainingSequence { examples };
        if let Some(k) = s.examples.first().map(|e| e.0.len()) {
            if let Some((t, _)) = s.examples.iter().find(|e| e.0.len() != k) {
                return Err(LearnError::Arity(format!("tuple {t:?} has arity {}, expected {k}", t.len())));
            }
        }
        Ok(s)
    }

    /// Lines `v1 ... vk +|-`; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self, LearnError> {
        let mut examples = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let mut words: Vec<&str> = line.split_whitespace().collect();
            let sign = words.pop().and_then(parse_sign).ok_or_else(|| LearnError::Parse {
                line: i + 1,
                msg: "expected a trailing `+` or `-`".into(),
            })?;
            examples.push((words.iter().map(|w| w.to_string()).collect(), sign));
        }
        Self::new(examples).map_err(|e| match e {
            LearnError::Arity(m) => LearnError::Parse { line: 0, msg: m },
            other => other,
        })
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (t, s) in &self.examples {
            out.push_str(&t.join(" "));
            out.push_str(if *s { " +\n" } else { " -\n" });
        }
        out
    }

    pub fn k(&self) -> usize {
        self.examples.first().map_or(0, |e| e.0.len())
    }

    pub fn len(&self) -> usize {
        self.examples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.examples.is_empty()
    }

    pub fn tuples(&self) -> Vec<Vec<String>> {
        self.examples.iter().map(|e| e.0.clone()).collect()
    }

    pub fn labels(&self) -> Vec<bool> {
        self.examples.iter().map(|e| e.1).collect()
    }
}

/// A parameter tuple together with the set of accepted rank-q types,
/// identified by structural digest.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Hypothesis {
    pub q: usize,
    pub ell: usize,
    pub set_budget: usize,
    pub k: usize,
    pub params: Vec<String>,
    pub positive_types: BTreeSet<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub formula: Option<String>,
    pub expr_digest: String,
}

impl Hypothesis {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }

    pub fn from_json(text: &str) -> Result<Self, LearnError> {
        Ok(serde_json::from_str(text)?)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SupportEntry {
    pub tuple: Vec<String>,
    pub label: bool,
    pub weight: BigRational,
}

/// Finite distribution over labeled tuples with exact weights summing to 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DistributionSpec {
    pub support: Vec<SupportEntry>,
}

#[derive(Deserialize, Serialize)]
struct RawEntry {
    tuple: Vec<String>,
    label: String,
    weight: String,
}

#[derive(Deserialize, Serialize)]
struct RawSpec {
    support: Vec<RawEntry>,
}

fn parse_rational(s: &str) -> Result<BigRational, LearnError> {
    let bad = || LearnError::Distribution(format!("weight `{s}` is not a rational"));
    let s = s.trim();
    match s.split_once('/') {
        Some((a, b)) => {
            let (a, b) = (BigInt::from_str(a.trim()).map_err(|_| bad())?, BigInt::from_str(b.trim()).map_err(|_| bad())?);
            if b.is_zero() {
                return Err(bad());
            }
            Ok(BigRational::new(a, b))
        }
        None => Ok(BigRational::from_integer(BigInt::from_str(s).map_err(|_| bad())?)),
    }
}

impl DistributionSpec {
    pub fn new(support: Vec<SupportEntry>) -> Result<Self, LearnError> {
        if support.is_empty() {
            return Err(LearnError::Distribution("empty support".into()));
        }
        let k = support[0].tuple.len();
        let mut total = BigRational::zero();
        for e in &support {
            if e.weight.is_negative() {
                return Err(LearnError::Distribution(format!("negative weight {}", e.weight)));
            }
            if e.tuple.len() != k {
                return Err(LearnError::Arity(format!("support tuple {:?} is not of arity {k}", e.tuple)));
            }
            total += &e.weight;
        }
        if !total.is_one() {
            return Err(LearnError::Distribution(format!("weights sum to {total}, not 1")));
        }
        Ok(DistributionSpec { support })
    }

    pub fn from_json(text: &str) -> Result<Self, LearnError> {
        let raw: RawSpec = serde_json::from_str(text)?;
        let support = raw
            .support
            .into_iter()
            .map(|e| {
                let label = parse_sign(e.label.trim())
                    .ok_or_else(|| LearnError::Distribution(format!("label `{}` is not + or -", e.label)))?;
                Ok(SupportEntry { tuple: e.tuple, label, weight: parse_rational(&e.weight)? })
            })
            .collect::<Result<Vec<_>, LearnError>>()?;
        Self::new(support)
    }

    pub fn to_json(&self) -> String {
        let raw = RawSpec {
            support: self
                .support
                .iter()
                .map(|e| RawEntry {
                    tuple: e.tuple.clone(),
                    label: if e.label { "+" } else { "-" }.into(),
                    weight: e.weight.to_string(),
                })
                .collect(),
        };
        serde_json::to_string_pretty(&raw).expect("serializable")
    }

    pub fn k(&self) -> usize {
        self.support[0].tuple.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn training_roundtrip() {
        let s = TrainingSequence::parse("# header\nv1 +\nv3 + # trailing\n\nv4 -\nv5 \u{2212}\n").unwrap();
        assert_eq!(s.len(), 4);
        assert_eq!(s.labels(), vec![true, true, false, false]);
        assert_eq!(TrainingSequence::parse(&s.to_text()).unwrap(), s);
        assert!(TrainingSequence::parse("v1 v2 +\nv3 -\n").is_err());
        assert!(TrainingSequence::parse("v1 ?\n").is_err());
    }

    #[test]
    fn distribution_checks() {
        let d = DistributionSpec::from_json(
            r#"{"support":[{"tuple":["a"],"label":"+","weight":"3/10"},{"tuple":["b"],"label":"-","weight":"7/10"}]}"#,
        )
        .unwrap();
        assert_eq!(DistributionSpec::from_json(&d.to_json()).unwrap(), d);
        let bad = r#"{"support":[{"tuple":["a"],"label":"+","weight":"1/2"}]}"#;
        assert!(matches!(DistributionSpec::from_json(bad), Err(LearnError::Distribution(_))));
        let neg = r#"{"support":[{"tuple":["a"],"label":"+","weight":"2"},{"tuple":["b"],"label":"+","weight":"-1"}]}"#;
        assert!(DistributionSpec::from_json(neg).is_err());
    }
}
