use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::GraphError;

/// Finite undirected simple graph whose vertices carry unary labels.
///
/// Vertex ids are strings; every iteration is in lexicographic id order.
/// The label map is the declared label set: a label may be present with
/// an empty extension.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LabeledGraph {
    vertices: BTreeSet<String>,
    edges: BTreeSet<(String, String)>,
    labels: BTreeMap<String, BTreeSet<String>>,
}

impl LabeledGraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_vertex(&mut self, id: &str) {
        self.vertices.insert(id.to_string());
    }

    pub fn add_edge(&mut self, a: &str, b: &str) -> Result<(), GraphError> {
        if a == b {
            return Err(GraphError::SelfLoop(a.to_string()));
        }
        for v in [a, b] {
            if !self.vertices.contains(v) {
                return Err(GraphError::UnknownVertex(v.to_string()));
            }
        }
        self.edges.insert(ordered(a, b));
        Ok(())
    }

    /// Declares `label` (possibly with an empty extension).
    pub fn declare_label(&mut self, label: &str) {
        self.labels.entry(label.to_string()).or_default();
    }

    pub fn add_label(&mut self, label: &str, v: &str) -> Result<(), GraphError> {
        if !self.vertices.contains(v) {
            return Err(GraphError::UnknownVertex(v.to_string()));
        }
        self.labels.entry(label.to_string()).or_default().insert(v.to_string());
        Ok(())
    }

    pub fn remove_label(&mut self, label: &str) {
        self.labels.remove(label);
    }

    pub fn vertices(&self) -> impl Iterator<Item = &str> {
        self.vertices.iter().map(String::as_str)
    }

    pub fn vertex_set(&self) -> &BTreeSet<String> {
        &self.vertices
    }

    pub fn contains(&self, v: &str) -> bool {
        self.vertices.contains(v)
    }

    pub fn order(&self) -> usize {
        self.vertices.len()
    }

    pub fn edges(&self) -> impl Iterator<Item = (&str, &str)> {
        self.edges.iter().map(|(a, b)| (a.as_str(), b.as_str()))
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn has_edge(&self, a: &str, b: &str) -> bool {
        self.edges.contains(&ordered(a, b))
    }

    pub fn neighbors(&self, v: &str) -> BTreeSet<String> {
        self.edges
            .iter()
            .filter_map(|(a, b)| {
                if a == v {
                    Some(b.clone())
                } else if b == v {
                    Some(a.clone())
                } else {
                    None
                }
            })
            .collect()
    }

    pub fn degree(&self, v: &str) -> usize {
        self.edges.iter().filter(|(a, b)| a == v || b == v).count()
    }

    pub fn labels(&self) -> &BTreeMap<String, BTreeSet<String>> {
        &self.labels
    }

    pub fn label_names(&self) -> BTreeSet<String> {
        self.labels.keys().cloned().collect()
    }

    pub fn has_label(&self, label: &str, v: &str) -> bool {
        self.labels.get(label).is_some_and(|s| s.contains(v))
    }

    pub fn labels_of(&self, v: &str) -> BTreeSet<String> {
        self.labels
            .iter()
            .filter(|(_, s)| s.contains(v))
            .map(|(l, _)| l.clone())
            .collect()
    }

    /// Extension of `label`; empty when undeclared.
    pub fn label_extension(&self, label: &str) -> BTreeSet<String> {
        self.labels.get(label).cloned().unwrap_or_default()
    }

    /// Disjoint union; fails when vertex sets intersect.
    pub fn disjoint_union(&self, other: &LabeledGraph) -> Result<LabeledGraph, GraphError> {
        if let Some(v) = self.vertices.intersection(&other.vertices).next() {
            return Err(GraphError::DuplicateVertex(v.clone()));
        }
        let mut g = self.clone();
        g.vertices.extend(other.vertices.iter().cloned());
        g.edges.extend(other.edges.iter().cloned());
        for (l, s) in &other.labels {
            g.labels.entry(l.clone()).or_default().extend(s.iter().cloned());
        }
        Ok(g)
    }

    pub(crate) fn labels_mut(&mut self) -> &mut BTreeMap<String, BTreeSet<String>> {
        &mut self.labels
    }

    pub fn to_json(&self) -> String {
        let file = GraphFile {
            labels: self.labels.keys().cloned().collect(),
            vertices: self
                .vertices
                .iter()
                .map(|v| VertexEntry { id: v.clone(), labels: self.labels_of(v).into_iter().collect() })
                .collect(),
            edges: self.edges.iter().map(|(a, b)| [a.clone(), b.clone()]).collect(),
        };
        serde_json::to_string_pretty(&file).expect("graph serialization")
    }

    pub fn from_json(text: &str) -> Result<LabeledGraph, GraphError> {
        let file: GraphFile =
            serde_json::from_str(text).map_err(|e| GraphError::Format(e.to_string()))?;
        let mut g = LabeledGraph::new();
        for l in &file.labels {
            g.declare_label(l);
        }
        for v in &file.vertices {
            if g.contains(&v.id) {
                return Err(GraphError::DuplicateVertex(v.id.clone()));
            }
            g.add_vertex(&v.id);
            for l in &v.labels {
                g.add_label(l, &v.id)?;
            }
        }
        for [a, b] in &file.edges {
            g.add_edge(a, b)?;
        }
        Ok(g)
    }

    /// Stable content digest (hex) of the canonical JSON form.
    pub fn digest(&self) -> String {
        use sha2::{Digest, Sha256};
        let bytes = Sha256::digest(self.to_json().as_bytes());
        bytes.iter().take(16).map(|b| format!("{b:02x}")).collect()
    }
}

fn ordered(a: &str, b: &str) -> (String, String) {
    if a <= b {
        (a.to_string(), b.to_string())
    } else {
        (b.to_string(), a.to_string())
    }
}

#[derive(Serialize, Deserialize)]
struct GraphFile {
    #[serde(default)]
    labels: Vec<String>,
    vertices: Vec<VertexEntry>,
    #[serde(default)]
    edges: Vec<[String; 2]>,
}

#[derive(Serialize, Deserialize)]
struct VertexEntry {
    id: String,
    #[serde(default)]
    labels: Vec<String>,
}

/// Dense view of a graph with at most 64 vertices, indexed in id order.
/// Used by every brute-force routine.
#[derive(Clone, Debug)]
pub struct IndexedGraph {
    pub ids: Vec<String>,
    pub adj: Vec<u64>,
    pub label_names: Vec<String>,
    pub label_masks: Vec<u64>,
}

pub const MAX_INDEXED: usize = 64;

impl IndexedGraph {
    pub fn new(g: &LabeledGraph) -> Result<IndexedGraph, GraphError> {
        let n = g.order();
        if n > MAX_INDEXED {
            return Err(GraphError::TooLarge { n, max: MAX_INDEXED });
        }
        let ids: Vec<String> = g.vertices().map(str::to_string).collect();
        let index = |v: &str| ids.binary_search_by(|x| x.as_str().cmp(v)).unwrap();
        let mut adj = vec![0u64; n];
        for (a, b) in g.edges() {
            let (i, j) = (index(a), index(b));
            adj[i] |= 1 << j;
            adj[j] |= 1 << i;
        }
        let label_names: Vec<String> = g.labels().keys().cloned().collect();
        let label_masks = g
            .labels()
            .values()
            .map(|s| s.iter().fold(0u64, |m, v| m | (1 << index(v))))
            .collect();
        Ok(IndexedGraph { ids, adj, label_names, label_masks })
    }

    pub fn n(&self) -> usize {
        self.ids.len()
    }

    pub fn index_of(&self, v: &str) -> Option<usize> {
        self.ids.binary_search_by(|x| x.as_str().cmp(v)).ok()
    }

    pub fn label_index(&self, l: &str) -> Option<usize> {
        self.label_names.binary_search_by(|x| x.as_str().cmp(l)).ok()
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.adj[i] >> j & 1 == 1
    }

    pub fn has_label(&self, label: usize, v: usize) -> bool {
        self.label_masks[label] >> v & 1 == 1
    }

    /// Mask with all vertices.
    pub fn full(&self) -> u64 {
        if self.n() == 64 {
            u64::MAX
        } else {
            (1u64 << self.n()) - 1
        }
    }
}
