use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::labeled::LabeledGraph;
use super::GraphError;

/// Reserved label marking the left operand of an ordered union.
pub const LEFT_MARK: &str = "@L";
/// Reserved label marking the right operand of an ordered union.
pub const RIGHT_MARK: &str = "@R";

pub type NodeId = usize;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Node {
    Base { vertex: String, labels: BTreeSet<String> },
    Union(NodeId, NodeId),
    OrderedUnion(NodeId, NodeId),
    Eta(String, String, NodeId),
    Rho(String, String, NodeId),
    Delta(String, NodeId),
}

impl Node {
    pub fn children(&self) -> Vec<NodeId> {
        match self {
            Node::Base { .. } => vec![],
            Node::Union(a, b) | Node::OrderedUnion(a, b) => vec![*a, *b],
            Node::Eta(_, _, c) | Node::Rho(_, _, c) | Node::Delta(_, c) => vec![*c],
        }
    }

    fn shifted(&self, by: usize) -> Node {
        match self {
            Node::Base { .. } => self.clone(),
            Node::Union(a, b) => Node::Union(a + by, b + by),
            Node::OrderedUnion(a, b) => Node::OrderedUnion(a + by, b + by),
            Node::Eta(p, q, c) => Node::Eta(p.clone(), q.clone(), c + by),
            Node::Rho(p, q, c) => Node::Rho(p.clone(), q.clone(), c + by),
            Node::Delta(p, c) => Node::Delta(p.clone(), c + by),
        }
    }
}

/// A clique-width expression stored as an arena: every node's children have
/// smaller indices and the root is the last node.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CwExpression {
    nodes: Vec<Node>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagnostic {
    /// Child-index path from the root, e.g. `root/0/1`.
    pub path: String,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

impl CwExpression {
    pub fn base<I, S>(vertex: &str, labels: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        CwExpression {
            nodes: vec![Node::Base {
                vertex: vertex.to_string(),
                labels: labels.into_iter().map(Into::into).collect(),
            }],
        }
    }

    fn join(mut self, other: CwExpression, make: impl FnOnce(NodeId, NodeId) -> Node) -> Self {
        let left = self.root();
        let offset = self.nodes.len();
        self.nodes.extend(other.nodes.iter().map(|n| n.shifted(offset)));
        let right = self.nodes.len() - 1;
        self.nodes.push(make(left, right));
        self
    }

    pub fn union(self, other: CwExpression) -> Self {
        self.join(other, Node::Union)
    }

    pub fn ordered_union(self, other: CwExpression) -> Self {
        self.join(other, Node::OrderedUnion)
    }

    pub fn eta(mut self, p: &str, q: &str) -> Self {
        let c = self.root();
        self.nodes.push(Node::Eta(p.to_string(), q.to_string(), c));
        self
    }

    pub fn rho(mut self, p: &str, q: &str) -> Self {
        let c = self.root();
        self.nodes.push(Node::Rho(p.to_string(), q.to_string(), c));
        self
    }

    pub fn delta(mut self, p: &str) -> Self {
        let c = self.root();
        self.nodes.push(Node::Delta(p.to_string(), c));
        self
    }

    /// Builds from raw arena nodes; fails when a child index is not smaller
    /// than its parent's or a node is shared.
    pub fn from_nodes(nodes: Vec<Node>) -> Result<Self, GraphError> {
        if nodes.is_empty() {
            return Err(GraphError::Empty);
        }
        let mut used = vec![false; nodes.len()];
        for (i, n) in nodes.iter().enumerate() {
            for c in n.children() {
                if c >= i || used[c] {
                    return Err(GraphError::Format(format!("bad child index {c} at node {i}")));
                }
                used[c] = true;
            }
        }
        if used[..nodes.len() - 1].iter().any(|u| !u) {
            return Err(GraphError::Format("expression has detached nodes".into()));
        }
        Ok(CwExpression { nodes })
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn root(&self) -> NodeId {
        self.nodes.len() - 1
    }

    /// Number of nodes, |Ξ|.
    pub fn size(&self) -> usize {
        self.nodes.len()
    }

    pub fn base_vertices(&self) -> Vec<&str> {
        self.nodes
            .iter()
            .filter_map(|n| match n {
                Node::Base { vertex, .. } => Some(vertex.as_str()),
                _ => None,
            })
            .collect()
    }

    /// Every label mentioned anywhere (base labels and operator arguments).
    pub fn labels_used(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        for n in &self.nodes {
            match n {
                Node::Base { labels, .. } => out.extend(labels.iter().cloned()),
                Node::Eta(p, q, _) | Node::Rho(p, q, _) => {
                    out.insert(p.clone());
                    out.insert(q.clone());
                }
                Node::Delta(p, _) => {
                    out.insert(p.clone());
                }
                Node::OrderedUnion(..) => {
                    out.insert(LEFT_MARK.to_string());
                    out.insert(RIGHT_MARK.to_string());
                }
                Node::Union(..) => {}
            }
        }
        out
    }

    pub(crate) fn nodes_mut(&mut self) -> &mut Vec<Node> {
        &mut self.nodes
    }

    /// Child-index path of every node, e.g. `root/1/0`.
    fn paths(&self) -> Vec<String> {
        let mut paths = vec![String::new(); self.nodes.len()];
        paths[self.root()] = "root".to_string();
        for i in (0..self.nodes.len()).rev() {
            for (pos, c) in self.nodes[i].children().into_iter().enumerate() {
                paths[c] = format!("{}/{pos}", paths[i]);
            }
        }
        paths
    }

    /// Current label set of each node's graph.
    pub fn label_sets(&self) -> Vec<BTreeSet<String>> {
        let mut sets: Vec<BTreeSet<String>> = Vec::with_capacity(self.nodes.len());
        for n in &self.nodes {
            let s = match n {
                Node::Base { labels, .. } => labels.clone(),
                Node::Union(a, b) => sets[*a].union(&sets[*b]).cloned().collect(),
                Node::OrderedUnion(a, b) => {
                    let mut s: BTreeSet<String> = sets[*a].union(&sets[*b]).cloned().collect();
                    s.insert(LEFT_MARK.to_string());
                    s.insert(RIGHT_MARK.to_string());
                    s
                }
                Node::Eta(_, _, c) | Node::Rho(_, _, c) => sets[*c].clone(),
                Node::Delta(p, c) => {
                    let mut s = sets[*c].clone();
                    s.remove(p);
                    s
                }
            };
            sets.push(s);
        }
        sets
    }

    /// All well-formedness violations; empty means the expression is well-formed.
    pub fn check_wellformed(&self) -> Vec<Diagnostic> {
        let sets = self.label_sets();
        let mut problems: Vec<(NodeId, String)> = Vec::new();
        let mut seen: BTreeMap<&str, NodeId> = BTreeMap::new();
        for (i, n) in self.nodes.iter().enumerate() {
            match n {
                Node::Base { vertex, labels } => {
                    if let Some(first) = seen.insert(vertex.as_str(), i) {
                        problems.push((i, format!("vertex `{vertex}` already introduced at node {first}")));
                    }
                    for l in labels {
                        if l.starts_with('@') {
                            problems.push((i, format!("base label `{l}` uses the reserved `@` prefix")));
                        }
                    }
                }
                Node::Eta(p, q, c) | Node::Rho(p, q, c) => {
                    let op = if matches!(n, Node::Eta(..)) { "eta" } else { "rho" };
                    if p == q {
                        problems.push((i, format!("{op} needs two distinct labels, got `{p}` twice")));
                    }
                    for l in [p, q] {
                        if !sets[*c].contains(l) {
                            problems.push((i, format!("{op} label `{l}` is not in the child's label set")));
                        }
                    }
                }
                Node::Delta(p, c) => {
                    if !sets[*c].contains(p) {
                        problems.push((i, format!("del label `{p}` is not in the child's label set")));
                    }
                }
                Node::OrderedUnion(a, b) => {
                    for (side, c) in [("left", a), ("right", b)] {
                        for m in [LEFT_MARK, RIGHT_MARK] {
                            if sets[*c].contains(m) {
                                problems.push((i, format!("ordered union: {side} operand already carries `{m}`")));
                            }
                        }
                    }
                }
                Node::Union(..) => {}
            }
        }
        if problems.is_empty() {
            return Vec::new();
        }
        let paths = self.paths();
        problems
            .into_iter()
            .map(|(i, message)| Diagnostic { path: paths[i].clone(), message })
            .collect()
    }

    /// The labeled graph this expression describes.
    pub fn eval(&self) -> Result<LabeledGraph, GraphError> {
        let diags = self.check_wellformed();
        if !diags.is_empty() {
            return Err(GraphError::Malformed(diags));
        }
        let mut graphs: Vec<Option<LabeledGraph>> = vec![None; self.nodes.len()];
        for (i, n) in self.nodes.iter().enumerate() {
            let g = match n {
                Node::Base { vertex, labels } => {
                    let mut g = LabeledGraph::new();
                    g.add_vertex(vertex);
                    for l in labels {
                        g.add_label(l, vertex)?;
                    }
                    g
                }
                Node::Union(a, b) | Node::OrderedUnion(a, b) => {
                    let ga = graphs[*a].take().expect("child evaluated");
                    let gb = graphs[*b].take().expect("child evaluated");
                    let mut g = ga.disjoint_union(&gb)?;
                    if matches!(n, Node::OrderedUnion(..)) {
                        g.declare_label(LEFT_MARK);
                        g.declare_label(RIGHT_MARK);
                        for v in ga.vertices() {
                            g.add_label(LEFT_MARK, v)?;
                        }
                        for v in gb.vertices() {
                            g.add_label(RIGHT_MARK, v)?;
                        }
                    }
                    g
                }
                Node::Eta(p, q, c) => {
                    let mut g = graphs[*c].take().expect("child evaluated");
                    let ps = g.label_extension(p);
                    let qs = g.label_extension(q);
                    for v in &ps {
                        for w in &qs {
                            if v != w {
                                g.add_edge(v, w)?;
                            }
                        }
                    }
                    g
                }
                Node::Rho(p, q, c) => {
                    let mut g = graphs[*c].take().expect("child evaluated");
                    let moved = g.label_extension(p);
                    let labels = g.labels_mut();
                    labels.insert(p.clone(), BTreeSet::new());
                    labels.entry(q.clone()).or_default().extend(moved);
                    g
                }
                Node::Delta(p, c) => {
                    let mut g = graphs[*c].take().expect("child evaluated");
                    g.remove_label(p);
                    g
                }
            };
            graphs[i] = Some(g);
        }
        Ok(graphs.pop().flatten().expect("root evaluated"))
    }

    /// Canonical `.cwx` text.
    pub fn to_cwx(&self) -> String {
        let mut text: Vec<String> = Vec::with_capacity(self.nodes.len());
        for n in &self.nodes {
            let s = match n {
                Node::Base { vertex, labels } => {
                    let mut s = format!("(v {vertex}");
                    for l in labels {
                        s.push(' ');
                        s.push_str(l);
                    }
                    s.push(')');
                    s
                }
                Node::Union(a, b) => format!("(u {} {})", take(&mut text, *a), take(&mut text, *b)),
                Node::OrderedUnion(a, b) => {
                    format!("(ou {} {})", take(&mut text, *a), take(&mut text, *b))
                }
                Node::Eta(p, q, c) => format!("(eta {p} {q} {})", take(&mut text, *c)),
                Node::Rho(p, q, c) => format!("(rho {p} {q} {})", take(&mut text, *c)),
                Node::Delta(p, c) => format!("(del {p} {})", take(&mut text, *c)),
            };
            text.push(s);
        }
        text.pop().unwrap_or_default()
    }

    /// Parses `.cwx` s-expression text.
    pub fn parse_cwx(text: &str) -> Result<CwExpression, GraphError> {
        #[derive(Debug)]
        enum Arg {
            Atom(String),
            Node(NodeId),
        }
        struct Frame {
            line: usize,
            col: usize,
            args: Vec<Arg>,
        }
        let err = |line: usize, col: usize, msg: String| GraphError::Parse { line, col, msg };
        let mut nodes: Vec<Node> = Vec::new();
        let mut stack: Vec<Frame> = Vec::new();
        let mut top: Option<NodeId> = None;
        let chars: Vec<char> = text.chars().collect();
        let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
        while i < chars.len() {
            let c = chars[i];
            match c {
                '\n' => {
                    line += 1;
                    col = 1;
                    i += 1;
                    continue;
                }
                ';' => {
                    while i < chars.len() && chars[i] != '\n' {
                        i += 1;
                    }
                    continue;
                }
                c if c.is_whitespace() => {}
                '(' => {
                    if top.is_some() && stack.is_empty() {
                        return Err(err(line, col, "trailing input after expression".into()));
                    }
                    stack.push(Frame { line, col, args: Vec::new() });
                }
                ')' => {
                    let frame = stack.pop().ok_or_else(|| err(line, col, "unbalanced `)`".into()))?;
                    let (fl, fc) = (frame.line, frame.col);
                    let mut args = frame.args.into_iter();
                    let head = match args.next() {
                        Some(Arg::Atom(h)) => h,
                        _ => return Err(err(fl, fc, "expected an operator name".into())),
                    };
                    let rest: Vec<Arg> = args.collect();
                    let atom = |a: &Arg| match a {
                        Arg::Atom(s) => Ok(s.clone()),
                        Arg::Node(_) => Err(err(fl, fc, format!("`{head}` expects a label here"))),
                    };
                    let sub = |a: &Arg| match a {
                        Arg::Node(n) => Ok(*n),
                        Arg::Atom(s) => Err(err(fl, fc, format!("`{head}` expects an expression, found `{s}`"))),
                    };
                    let arity = |n: usize| {
                        if rest.len() == n {
                            Ok(())
                        } else {
                            Err(err(fl, fc, format!("`{head}` takes {n} arguments, got {}", rest.len())))
                        }
                    };
                    let node = match head.as_str() {
                        "v" => {
                            if rest.is_empty() {
                                return Err(err(fl, fc, "`v` needs a vertex id".into()));
                            }
                            let vertex = atom(&rest[0])?;
                            let labels = rest[1..].iter().map(atom).collect::<Result<_, _>>()?;
                            Node::Base { vertex, labels }
                        }
                        "u" | "ou" => {
                            arity(2)?;
                            let (a, b) = (sub(&rest[0])?, sub(&rest[1])?);
                            if head == "u" {
                                Node::Union(a, b)
                            } else {
                                Node::OrderedUnion(a, b)
                            }
                        }
                        "eta" | "rho" => {
                            arity(3)?;
                            let (p, q, c) = (atom(&rest[0])?, atom(&rest[1])?, sub(&rest[2])?);
                            if head == "eta" {
                                Node::Eta(p, q, c)
                            } else {
                                Node::Rho(p, q, c)
                            }
                        }
                        "del" => {
                            arity(2)?;
                            Node::Delta(atom(&rest[0])?, sub(&rest[1])?)
                        }
                        other => return Err(err(fl, fc, format!("unknown operator `{other}`"))),
                    };
                    nodes.push(node);
                    let id = nodes.len() - 1;
                    match stack.last_mut() {
                        Some(parent) => parent.args.push(Arg::Node(id)),
                        None => top = Some(id),
                    }
                }
                _ => {
                    let (l0, c0) = (line, col);
                    let start = i;
                    while i < chars.len()
                        && !chars[i].is_whitespace()
                        && !matches!(chars[i], '(' | ')' | ';')
                    {
                        i += 1;
                    }
                    col += i - start;
                    let tok: String = chars[start..i].iter().collect();
                    match stack.last_mut() {
                        Some(f) => f.args.push(Arg::Atom(tok)),
                        None => return Err(err(l0, c0, format!("unexpected token `{tok}` outside parentheses"))),
                    }
                    continue;
                }
            }
            i += 1;
            col += 1;
        }
        if let Some(f) = stack.last() {
            return Err(err(f.line, f.col, "unclosed `(`".into()));
        }
        match top {
            Some(_) => CwExpression::from_nodes(nodes),
            None => Err(GraphError::Empty),
        }
    }

    /// Stable digest of the canonical text.
    pub fn digest(&self) -> String {
        use sha2::{Digest, Sha256};
        let bytes = Sha256::digest(self.to_cwx().as_bytes());
        bytes.iter().take(16).map(|b| format!("{b:02x}")).collect()
    }
}

fn take(text: &mut [String], i: usize) -> String {
    std::mem::take(&mut text[i])
}

impl fmt::Display for CwExpression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_cwx())
    }
}
