//! Finite filtrations as event trees, the JSON instance format, and the
//! conditional-support hull at an atom.
//!
//! The atoms of `F_n` are the nodes at depth `n`. Probabilities are stored per
//! edge (conditional on the parent), so the measure of a leaf is the product
//! along its path.

use std::collections::{BTreeMap, HashMap};

use num_traits::{One, Signed};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::polyhedra::{conv_union, FGSet, GeometryError, TaggedSet};
use crate::rational::{format_rational, format_vector, parse_rational, Rational, Vector};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TreeError {
    #[error("invalid JSON: {0}")]
    Json(String),
    #[error("node {node}: malformed rational {text:?}")]
    MalformedRational { node: String, text: String },
    #[error("dimension must be at least 1")]
    ZeroDimension,
    #[error("duplicate node id {0}")]
    DuplicateId(String),
    #[error("node {node}: unknown parent {parent}")]
    UnknownParent { node: String, parent: String },
    #[error("expected exactly one root, found {0}")]
    RootCount(usize),
    #[error("root {0} must be at time 0")]
    RootTime(String),
    #[error("node {node}: time {time} does not follow parent time {parent_time}")]
    TimeGap {
        node: String,
        time: usize,
        parent_time: usize,
    },
    #[error("node {node}: time {time} exceeds horizon {horizon}")]
    BeyondHorizon {
        node: String,
        time: usize,
        horizon: usize,
    },
    #[error("node {0}: leaf before the horizon")]
    EarlyLeaf(String),
    #[error("node {0}: probability must be positive")]
    NonPositiveProbability(String),
    #[error("node {0}: missing probability")]
    MissingProbability(String),
    #[error("root {node}: probability must be 1, got {prob}")]
    RootProbability { node: String, prob: String },
    #[error("node {node}: children probabilities sum {sum} ≠ 1")]
    ProbabilitySum { node: String, sum: String },
    #[error("node {0}: missing set")]
    MissingSet(String),
    #[error("node {0}: empty generator list")]
    EmptyGenerators(String),
    #[error("entry for unknown node {0}")]
    UnknownNode(String),
    #[error("node {node}: expected dimension {expected}, got {got}")]
    DimensionMismatch {
        node: String,
        expected: usize,
        got: usize,
    },
    #[error("node {node}: {source}")]
    Geometry { node: String, source: GeometryError },
    #[error("time {time} outside 0..={horizon}")]
    TimeOutOfRange { time: usize, horizon: usize },
    #[error("node {0}: a child has an empty set")]
    EmptyChild(String),
    #[error("document has no {0:?} section")]
    MissingSection(&'static str),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Node {
    pub id: String,
    pub time: usize,
    pub parent: Option<String>,
    /// Probability conditional on the parent (one for the root).
    pub prob: Rational,
}

/// Nodes are stored sorted by `(time, id)`; indices into that order are
/// used throughout.
#[derive(Debug, Clone, PartialEq)]
pub struct EventTree {
    horizon: usize,
    nodes: Vec<Node>,
    index: HashMap<String, usize>,
    parent: Vec<Option<usize>>,
    children: Vec<Vec<usize>>,
}

impl EventTree {
    pub fn new(horizon: usize, mut nodes: Vec<Node>) -> Result<Self, TreeError> {
        nodes.sort_by(|a, b| (a.time, &a.id).cmp(&(b.time, &b.id)));
        let mut index = HashMap::new();
        for (i, n) in nodes.iter().enumerate() {
            if index.insert(n.id.clone(), i).is_some() {
                return Err(TreeError::DuplicateId(n.id.clone()));
            }
        }
        let mut parent = vec![None; nodes.len()];
        let mut children = vec![Vec::new(); nodes.len()];
        let mut roots = Vec::new();
        for (i, n) in nodes.iter().enumerate() {
            if n.time > horizon {
                return Err(TreeError::BeyondHorizon {
                    node: n.id.clone(),
                    time: n.time,
                    horizon,
                });
            }
            if !n.prob.is_positive() {
                return Err(TreeError::NonPositiveProbability(n.id.clone()));
            }
            match &n.parent {
                None => roots.push(i),
                Some(p) => {
                    let &pi = index.get(p).ok_or_else(|| TreeError::UnknownParent {
                        node: n.id.clone(),
                        parent: p.clone(),
                    })?;
                    if nodes[pi].time + 1 != n.time {
                        return Err(TreeError::TimeGap {
                            node: n.id.clone(),
                            time: n.time,
                            parent_time: nodes[pi].time,
                        });
                    }
                    parent[i] = Some(pi);
                    children[pi].push(i);
                }
            }
        }
        if roots.len() != 1 {
            return Err(TreeError::RootCount(roots.len()));
        }
        let root = &nodes[roots[0]];
        if root.time != 0 {
            return Err(TreeError::RootTime(root.id.clone()));
        }
        if !root.prob.is_one() {
            return Err(TreeError::RootProbability {
                node: root.id.clone(),
                prob: format_rational(&root.prob),
            });
        }
        for (i, n) in nodes.iter().enumerate() {
            if children[i].is_empty() {
                if n.time != horizon {
                    return Err(TreeError::EarlyLeaf(n.id.clone()));
                }
                continue;
            }
            let sum: Rational = children[i].iter().map(|&c| nodes[c].prob.clone()).sum();
            if !sum.is_one() {
                return Err(TreeError::ProbabilitySum {
                    node: n.id.clone(),
                    sum: format_rational(&sum),
                });
            }
        }
        Ok(EventTree {
            horizon,
            nodes,
            index,
            parent,
            children,
        })
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn node(&self, i: usize) -> &Node {
        &self.nodes[i]
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn root(&self) -> usize {
        0
    }

    pub fn parent(&self, i: usize) -> Option<usize> {
        self.parent[i]
    }

    pub fn children(&self, i: usize) -> &[usize] {
        &self.children[i]
    }

    pub fn is_leaf(&self, i: usize) -> bool {
        self.children[i].is_empty()
    }

    pub fn leaves(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(|&i| self.is_leaf(i))
    }

    /// Node indices at time `n`, sorted by id.
    pub fn level(&self, n: usize) -> Vec<usize> {
        (0..self.len())
            .filter(|&i| self.nodes[i].time == n)
            .collect()
    }

    /// Atoms of `F_n`.
    pub fn atoms_at(&self, n: usize) -> Result<Vec<&Node>, TreeError> {
        if n > self.horizon {
            return Err(TreeError::TimeOutOfRange {
                time: n,
                horizon: self.horizon,
            });
        }
        Ok(self.level(n).into_iter().map(|i| &self.nodes[i]).collect())
    }

    /// Unconditional probability of a node.
    pub fn path_prob(&self, mut i: usize) -> Rational {
        let mut p = Rational::one();
        loop {
            p *= &self.nodes[i].prob;
            match self.parent[i] {
                Some(q) => i = q,
                None => return p,
            }
        }
    }

    /// Internal nodes, deepest level first.
    pub fn internal_levels_backward(&self) -> impl Iterator<Item = Vec<usize>> + '_ {
        (0..self.horizon).rev().map(|n| {
            self.level(n)
                .into_iter()
                .filter(|&i| !self.is_leaf(i))
                .collect()
        })
    }
}

/// The finite-tree conditional support hull at `u`: the convex hull of the
/// children's sets, generators tagged by child index.
pub fn support_hull(
    tree: &EventTree,
    next: &[FGSet],
    u: usize,
) -> Result<TaggedSet<usize>, TreeError> {
    let kids = tree.children(u);
    if kids.iter().any(|&c| next[c].is_empty()) {
        return Err(TreeError::EmptyChild(tree.node(u).id.clone()));
    }
    let sets: Vec<FGSet> = kids.iter().map(|&c| next[c].clone()).collect();
    conv_union(&sets, kids).map_err(|source| TreeError::Geometry {
        node: tree.node(u).id.clone(),
        source,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub tree: EventTree,
    pub dim: usize,
    /// Generators of `cl G(u)`, indexed like the tree's nodes. The value of
    /// the set-valued map is the relative interior.
    pub sets: Vec<FGSet>,
}

impl Instance {
    pub fn new(tree: EventTree, dim: usize, sets: Vec<FGSet>) -> Result<Self, TreeError> {
        if dim == 0 {
            return Err(TreeError::ZeroDimension);
        }
        if sets.len() != tree.len() {
            let missing = tree.nodes().get(sets.len()).map(|n| n.id.clone());
            return Err(TreeError::MissingSet(missing.unwrap_or_default()));
        }
        for (n, s) in tree.nodes().iter().zip(&sets) {
            if s.dim() != dim {
                return Err(TreeError::DimensionMismatch {
                    node: n.id.clone(),
                    expected: dim,
                    got: s.dim(),
                });
            }
            if s.is_empty() {
                return Err(TreeError::EmptyGenerators(n.id.clone()));
            }
        }
        Ok(Instance { tree, dim, sets })
    }

    pub fn set(&self, id: &str) -> Option<&FGSet> {
        self.tree.index_of(id).map(|i| &self.sets[i])
    }

    pub fn to_document(&self) -> Document {
        let mut doc = Document::from_tree(&self.tree, self.dim);
        doc.sets = Some(
            self.tree
                .nodes()
                .iter()
                .zip(&self.sets)
                .map(|(n, s)| (n.id.clone(), SetDoc::from_set(s)))
                .collect(),
        );
        doc
    }

    pub fn to_json(&self) -> String {
        self.to_document().to_json()
    }
}

/// A rational as it appears in documents: `"p/q"`, an integer string, or an
/// integer literal.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RationalText {
    Text(String),
    Integer(i64),
}

impl RationalText {
    pub fn from_rational(r: &Rational) -> Self {
        RationalText::Text(format_rational(r))
    }

    pub fn parse(&self, node: &str) -> Result<Rational, TreeError> {
        match self {
            RationalText::Integer(n) => Ok(crate::rational::int(*n)),
            RationalText::Text(t) => parse_rational(t).map_err(|_| TreeError::MalformedRational {
                node: node.to_string(),
                text: t.clone(),
            }),
        }
    }
}

pub fn parse_vector(v: &[RationalText], node: &str) -> Result<Vector, TreeError> {
    v.iter().map(|x| x.parse(node)).collect()
}

pub fn vector_text(v: &[Rational]) -> Vec<RationalText> {
    format_vector(v)
        .into_iter()
        .map(RationalText::Text)
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeDoc {
    pub id: String,
    pub time: usize,
    #[serde(default)]
    pub parent: Option<String>,
    #[serde(default)]
    pub prob: Option<RationalText>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SetDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vertices: Option<Vec<Vec<RationalText>>>,
    #[serde(default)]
    pub rays: Vec<Vec<RationalText>>,
}

impl SetDoc {
    pub fn from_set(s: &FGSet) -> Self {
        SetDoc {
            vertices: Some(s.vertices().iter().map(|v| vector_text(v)).collect()),
            rays: s.rays().iter().map(|r| vector_text(r)).collect(),
        }
    }

    /// `default_vertex` is used when the document omits the vertex list.
    pub fn to_set(
        &self,
        node: &str,
        dim: usize,
        default_vertex: Option<Vector>,
    ) -> Result<FGSet, TreeError> {
        let vertices = match (&self.vertices, default_vertex) {
            (Some(vs), _) => vs
                .iter()
                .map(|v| parse_vector(v, node))
                .collect::<Result<Vec<_>, _>>()?,
            (None, Some(v)) => vec![v],
            (None, None) => Vec::new(),
        };
        if vertices.is_empty() {
            return Err(TreeError::EmptyGenerators(node.to_string()));
        }
        let rays = self
            .rays
            .iter()
            .map(|r| parse_vector(r, node))
            .collect::<Result<Vec<_>, _>>()?;
        for g in vertices.iter().chain(&rays) {
            if g.len() != dim {
                return Err(TreeError::DimensionMismatch {
                    node: node.to_string(),
                    expected: dim,
                    got: g.len(),
                });
            }
        }
        FGSet::new(dim, vertices, rays).map_err(|source| TreeError::Geometry {
            node: node.to_string(),
            source,
        })
    }
}

/// The JSON envelope shared by instances, price processes and cone models.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Document {
    pub dim: usize,
    pub horizon: usize,
    pub nodes: Vec<NodeDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sets: Option<BTreeMap<String, SetDoc>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub values: Option<BTreeMap<String, Vec<RationalText>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cones: Option<BTreeMap<String, SetDoc>>,
}

impl Document {
    pub fn parse(text: &str) -> Result<Self, TreeError> {
        serde_json::from_str(text).map_err(|e| TreeError::Json(e.to_string()))
    }

    pub fn from_tree(tree: &EventTree, dim: usize) -> Self {
        Document {
            dim,
            horizon: tree.horizon(),
            nodes: tree
                .nodes()
                .iter()
                .map(|n| NodeDoc {
                    id: n.id.clone(),
                    time: n.time,
                    parent: n.parent.clone(),
                    prob: Some(RationalText::from_rational(&n.prob)),
                })
                .collect(),
            sets: None,
            values: None,
            cones: None,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("document serializes");
        s.push('\n');
        s
    }

    pub fn tree(&self) -> Result<EventTree, TreeError> {
        if self.dim == 0 {
            return Err(TreeError::ZeroDimension);
        }
        let nodes = self
            .nodes
            .iter()
            .map(|n| {
                let prob = match (&n.prob, &n.parent) {
                    (Some(p), _) => p.parse(&n.id)?,
                    (None, None) => Rational::one(),
                    (None, Some(_)) => return Err(TreeError::MissingProbability(n.id.clone())),
                };
                Ok(Node {
                    id: n.id.clone(),
                    time: n.time,
                    parent: n.parent.clone(),
                    prob,
                })
            })
            .collect::<Result<Vec<_>, TreeError>>()?;
        EventTree::new(self.horizon, nodes)
    }

    /// Looks up a per-node section entry for every node, rejecting entries
    /// for unknown ids.
    pub fn per_node<'a, T>(
        tree: &EventTree,
        section: &'a BTreeMap<String, T>,
    ) -> Result<Vec<&'a T>, TreeError> {
        if let Some(unknown) = section.keys().find(|k| tree.index_of(k).is_none()) {
            return Err(TreeError::UnknownNode(unknown.clone()));
        }
        tree.nodes()
            .iter()
            .map(|n| {
                section
                    .get(&n.id)
                    .ok_or_else(|| TreeError::MissingSet(n.id.clone()))
            })
            .collect()
    }

    pub fn instance(&self) -> Result<Instance, TreeError> {
        let tree = self.tree()?;
        let section = self
            .sets
            .as_ref()
            .ok_or(TreeError::MissingSection("sets"))?;
        let sets = Self::per_node(&tree, section)?
            .into_iter()
            .zip(tree.nodes())
            .map(|(doc, n)| doc.to_set(&n.id, self.dim, None))
            .collect::<Result<Vec<_>, _>>()?;
        Instance::new(tree, self.dim, sets)
    }
}

pub fn parse_instance(text: &str) -> Result<Instance, TreeError> {
    Document::parse(text)?.instance()
}
