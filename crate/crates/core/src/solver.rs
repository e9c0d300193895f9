//! Backward recursion for the sets `W`, the solvability verdict, and the
//! forward construction of a selector together with an equivalent
//! martingale measure.
//!
//! Backward: `W = cl G` at the leaves; at an internal node `u` whose children
//! all have nonempty `W`, `Y(u)` is the convex hull of the children's sets and
//! `W(u) = cl(ri cl G(u) ∩ ri Y(u))`. An empty child forces `W(u) = ∅`.
//!
//! Forward: start at the relative-interior point of `W(root)` and split each
//! node's value into strictly positive one-step weights `q` and child values
//! `x_j ∈ ri W_j` with `Σ q_j x_j = x`.

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lp::{self, LpError};
use crate::polyhedra::{
    canonicalize, contains, max_step, ri_intersection_closure, ri_point, FGSet, GeometryError,
    Membership, Step, TaggedSet,
};
use crate::rational::{
    add, axpy, format_rational, format_vector, parse_rational, scale, sub, zeros, Rational, Vector,
};
use crate::tree::{support_hull, Instance, TreeError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolverError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Tree(#[from] TreeError),
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error("contract violation: {0}")]
    Contract(String),
    #[error("internal error at node {node}: {detail}")]
    Internal { node: String, detail: String },
    #[error("solution does not match the instance: {0}")]
    Schema(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "status")]
pub enum Verdict {
    Solvable,
    /// The deepest (then smallest-id) node whose `W` is empty.
    Unsolvable {
        time: usize,
        node: String,
    },
}

impl Verdict {
    pub fn is_solvable(&self) -> bool {
        matches!(self, Verdict::Solvable)
    }
}

#[derive(Debug, Clone)]
pub struct BackwardState {
    /// `W(u)` per node index; possibly empty.
    pub w: Vec<FGSet>,
    /// `Y(u)` for internal nodes whose children all have nonempty `W`.
    pub y: Vec<Option<TaggedSet<usize>>>,
    pub verdict: Verdict,
}

pub fn backward_pass(inst: &Instance) -> Result<BackwardState, SolverError> {
    let tree = &inst.tree;
    let n = tree.len();
    let mut w: Vec<FGSet> = vec![FGSet::empty(inst.dim); n];
    let mut y: Vec<Option<TaggedSet<usize>>> = vec![None; n];
    let leaves: Vec<usize> = tree.leaves().collect();
    let leaf_sets: Vec<FGSet> = leaves
        .par_iter()
        .map(|&i| canonicalize(&inst.sets[i]))
        .collect();
    for (i, s) in leaves.into_iter().zip(leaf_sets) {
        w[i] = s;
    }

    for level in tree.internal_levels_backward() {
        let results: Vec<(FGSet, Option<TaggedSet<usize>>)> = level
            .par_iter()
            .map(|&u| -> Result<_, SolverError> {
                if tree.children(u).iter().any(|&c| w[c].is_empty()) {
                    return Ok((FGSet::empty(inst.dim), None));
                }
                let hull = support_hull(tree, &w, u)?;
                let g = canonicalize(&inst.sets[u]);
                let wu = ri_intersection_closure(&g, &hull.set)?
                    .unwrap_or_else(|| FGSet::empty(inst.dim));
                Ok((wu, Some(hull)))
            })
            .collect::<Result<_, _>>()?;
        for (&u, (wu, yu)) in level.iter().zip(results) {
            w[u] = wu;
            y[u] = yu;
        }
    }

    let failing = (0..n)
        .filter(|&i| w[i].is_empty())
        .max_by(|&a, &b| tree.node(a).time.cmp(&tree.node(b).time).then(b.cmp(&a)));
    let verdict = match failing {
        None => Verdict::Solvable,
        Some(i) => Verdict::Unsolvable {
            time: tree.node(i).time,
            node: tree.node(i).id.clone(),
        },
    };
    Ok(BackwardState { w, y, verdict })
}

/// One constructive step: given `x ∈ ri Y` with `Y` the hull of the
/// children's `W`, returns `(q_j, x_j)` per child with `q_j > 0`,
/// `Σ q_j = 1`, `Σ q_j x_j = x` and `x_j ∈ ri W_j`.
///
/// `children` lists `(node index, W)`; `hull` must be tagged by those same
/// node indices.
pub fn one_step_decompose(
    x: &[Rational],
    children: &[(usize, &FGSet)],
    hull: &TaggedSet<usize>,
) -> Result<Vec<(Rational, Vector)>, SolverError> {
    let m = children.len();
    if m == 0 {
        return Err(SolverError::Contract("no children".into()));
    }
    if !contains(&hull.set, x, Membership::RelativeInterior)? {
        return Err(SolverError::Contract(
            "point is not in the relative interior of the support hull".into(),
        ));
    }
    let dim = x.len();
    let centers: Vec<Vector> = children
        .iter()
        .map(|(_, wj)| ri_point(wj))
        .collect::<Result<_, _>>()?;
    let m_rat = Rational::from_integer(m.into());
    let mut barycenter = zeros(dim);
    for c in &centers {
        barycenter = add(&barycenter, c);
    }
    barycenter = scale(&barycenter, &(Rational::one() / &m_rat));
    if barycenter.as_slice() == x {
        let q = Rational::one() / &m_rat;
        return Ok(centers.into_iter().map(|c| (q.clone(), c)).collect());
    }

    // Push x away from the barycenter, stay strictly inside Y, and split the
    // pushed point over the tagged generators.
    let dir = sub(x, &barycenter);
    // A dyadic step keeps the bit length of the pushed point growing
    // additively down the tree instead of doubling per level.
    let step = match max_step(&*hull.set.hrep()?, x, &dir)? {
        Step::Finite(t) => dyadic_floor(&(t / Rational::from_integer(2.into()))),
        Step::Unbounded => Rational::one(),
    };
    debug_assert!(step.is_positive());
    let mut pushed = x.to_vec();
    axpy(&mut pushed, &step, &dir);
    let dec = lp::represent_in_hull(&pushed, &hull.vertex_points(), &hull.ray_vectors()).map_err(
        |e| SolverError::Internal {
            node: format!("{:?}", children.iter().map(|c| c.0).collect::<Vec<_>>()),
            detail: format!("decomposition failed: {e}"),
        },
    )?;

    let position = |tag: usize| children.iter().position(|(c, _)| *c == tag);
    let mut mass = vec![Rational::zero(); m];
    let mut sums = vec![zeros(dim); m];
    for ((v, tag), lam) in hull.vertices.iter().zip(&dec.vertex_weights) {
        let j = position(*tag).ok_or_else(|| SolverError::Contract("unknown tag".into()))?;
        mass[j] += lam;
        axpy(&mut sums[j], lam, v);
    }
    for ((r, tag), mu) in hull.rays.iter().zip(&dec.ray_weights) {
        let j = position(*tag).ok_or_else(|| SolverError::Contract("unknown tag".into()))?;
        axpy(&mut sums[j], mu, r);
    }

    let denom = Rational::one() + &step;
    let mix = &step / (&denom * &m_rat);
    let inv_denom = Rational::one() / &denom;
    let mut out = Vec::with_capacity(m);
    for j in 0..m {
        let q = &mass[j] * &inv_denom + &mix;
        let mut point = scale(&sums[j], &inv_denom);
        axpy(&mut point, &mix, &centers[j]);
        let point = scale(&point, &(Rational::one() / &q));
        out.push((q, point));
    }
    Ok(out)
}

/// Largest `2^-k` (k ≥ 0) not exceeding `t`, for `t > 0`.
fn dyadic_floor(t: &Rational) -> Rational {
    let two = Rational::from_integer(2.into());
    let mut p = Rational::one();
    while &p > t {
        p /= &two;
    }
    p
}

/// Selector values and one-step measure, indexed like the tree's nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub x: Vec<Vector>,
    /// `q[v]` is the one-step probability of the edge `parent(v) -> v`; one at
    /// the root.
    pub q: Vec<Rational>,
}

pub fn forward_pass(inst: &Instance, state: &BackwardState) -> Result<Solution, SolverError> {
    if !state.verdict.is_solvable() {
        return Err(SolverError::Contract(
            "forward pass needs a solvable instance".into(),
        ));
    }
    let tree = &inst.tree;
    let n = tree.len();
    let mut x: Vec<Vector> = vec![Vec::new(); n];
    let mut q: Vec<Rational> = vec![Rational::zero(); n];
    x[tree.root()] = ri_point(&state.w[tree.root()])?;
    q[tree.root()] = Rational::one();

    for t in 0..tree.horizon() {
        let level: Vec<usize> = tree
            .level(t)
            .into_iter()
            .filter(|&u| !tree.is_leaf(u))
            .collect();
        let splits: Vec<Vec<(Rational, Vector)>> = level
            .par_iter()
            .map(|&u| {
                let hull = state.y[u].as_ref().ok_or_else(|| SolverError::Internal {
                    node: tree.node(u).id.clone(),
                    detail: "missing support hull".into(),
                })?;
                let children: Vec<(usize, &FGSet)> =
                    tree.children(u).iter().map(|&c| (c, &state.w[c])).collect();
                let parts = one_step_decompose(&x[u], &children, hull)?;
                check_step(inst, u, &x[u], &children, &parts)?;
                Ok(parts)
            })
            .collect::<Result<_, SolverError>>()?;
        for (&u, parts) in level.iter().zip(splits) {
            for (&c, (qc, xc)) in tree.children(u).iter().zip(parts) {
                q[c] = qc;
                x[c] = xc;
            }
        }
    }
    Ok(Solution { x, q })
}

fn check_step(
    inst: &Instance,
    u: usize,
    x: &[Rational],
    children: &[(usize, &FGSet)],
    parts: &[(Rational, Vector)],
) -> Result<(), SolverError> {
    let fail = |detail: &str| SolverError::Internal {
        node: inst.tree.node(u).id.clone(),
        detail: detail.to_string(),
    };
    let mut total = Rational::zero();
    let mut mean = zeros(x.len());
    for ((_, wj), (qj, xj)) in children.iter().zip(parts) {
        if !qj.is_positive() {
            return Err(fail("nonpositive weight"));
        }
        if !contains(wj, xj, Membership::RelativeInterior)? {
            return Err(fail("child value outside ri W"));
        }
        total += qj;
        axpy(&mut mean, qj, xj);
    }
    if !total.is_one() || mean.as_slice() != x {
        return Err(fail("weights do not reproduce the parent value"));
    }
    Ok(())
}

/// Backward pass, then (when solvable and requested) the forward
/// construction.
pub fn solve(
    inst: &Instance,
    construct: bool,
) -> Result<(BackwardState, Option<Solution>), SolverError> {
    let state = backward_pass(inst)?;
    let sol = if construct && state.verdict.is_solvable() {
        Some(forward_pass(inst, &state)?)
    } else {
        None
    };
    Ok((state, sol))
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeasureReport {
    /// `Q(leaf)`: product of `q` along the path.
    pub leaf_measure: Vec<(usize, Rational)>,
    /// `gamma(v) = q(v) / p(v)` on the edge into `v`; one at the root.
    pub gamma: Vec<Rational>,
    /// Density process: product of `gamma` along the path.
    pub density: Vec<Rational>,
    pub total_mass_is_one: bool,
    pub expected_density_is_one: bool,
    pub all_positive: bool,
}

pub fn assemble_measure(inst: &Instance, sol: &Solution) -> MeasureReport {
    let tree = &inst.tree;
    let n = tree.len();
    let mut gamma = vec![Rational::one(); n];
    let mut density = vec![Rational::one(); n];
    let mut path_q = vec![Rational::one(); n];
    for v in 0..n {
        if let Some(u) = tree.parent(v) {
            gamma[v] = &sol.q[v] / &tree.node(v).prob;
            density[v] = &density[u] * &gamma[v];
            path_q[v] = &path_q[u] * &sol.q[v];
        }
    }
    let leaf_measure: Vec<(usize, Rational)> =
        tree.leaves().map(|l| (l, path_q[l].clone())).collect();
    let total: Rational = leaf_measure.iter().map(|(_, m)| m.clone()).sum();
    let expected: Rational = tree.leaves().map(|l| tree.path_prob(l) * &density[l]).sum();
    MeasureReport {
        all_positive: leaf_measure.iter().all(|(_, m)| m.is_positive()),
        leaf_measure,
        gamma,
        density,
        total_mass_is_one: total.is_one(),
        expected_density_is_one: expected.is_one(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FailureKind {
    RiMembership,
    NonPositiveWeight { weight: String },
    WeightSum { sum: String },
    Martingale,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Failure {
    pub node: String,
    pub kind: FailureKind,
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match &self.kind {
            FailureKind::RiMembership => write!(f, "node {}: ri membership", self.node),
            FailureKind::NonPositiveWeight { weight } => {
                write!(f, "edge into {}: q = {weight} is not positive", self.node)
            }
            FailureKind::WeightSum { sum } => write!(f, "node {}: q sums {sum}", self.node),
            FailureKind::Martingale => write!(f, "node {}: martingale identity", self.node),
        }
    }
}

/// Exact checks: `x(u) ∈ ri cl G(u)`, `q > 0` summing to one per node, and
/// `Σ q x(child) = x(parent)`.
pub fn verify_solution(inst: &Instance, sol: &Solution) -> Result<Vec<Failure>, SolverError> {
    let tree = &inst.tree;
    if sol.x.len() != tree.len() || sol.q.len() != tree.len() {
        return Err(SolverError::Schema(
            "solution size differs from tree".into(),
        ));
    }
    if let Some(bad) = sol.x.iter().position(|x| x.len() != inst.dim) {
        return Err(SolverError::Schema(format!(
            "node {}: expected {} coordinates",
            tree.node(bad).id,
            inst.dim
        )));
    }
    let mut failures = Vec::new();
    for u in 0..tree.len() {
        let id = &tree.node(u).id;
        if !contains(&inst.sets[u], &sol.x[u], Membership::RelativeInterior)? {
            failures.push(Failure {
                node: id.clone(),
                kind: FailureKind::RiMembership,
            });
        }
        if tree.is_leaf(u) {
            continue;
        }
        let mut total = Rational::zero();
        let mut mean = zeros(inst.dim);
        for &c in tree.children(u) {
            if !sol.q[c].is_positive() {
                failures.push(Failure {
                    node: tree.node(c).id.clone(),
                    kind: FailureKind::NonPositiveWeight {
                        weight: format_rational(&sol.q[c]),
                    },
                });
            }
            total += &sol.q[c];
            axpy(&mut mean, &sol.q[c], &sol.x[c]);
        }
        if !total.is_one() {
            failures.push(Failure {
                node: id.clone(),
                kind: FailureKind::WeightSum {
                    sum: format_rational(&total),
                },
            });
        }
        if mean != sol.x[u] {
            failures.push(Failure {
                node: id.clone(),
                kind: FailureKind::Martingale,
            });
        }
    }
    Ok(failures)
}

/// Wire form of a solution. Keys are node ids and `"u->v"` edge labels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionDoc {
    pub x: BTreeMap<String, Vec<String>>,
    pub q: BTreeMap<String, String>,
    #[serde(rename = "Q")]
    pub leaf_measure: BTreeMap<String, String>,
    pub verdict: Verdict,
}

pub fn edge_label(parent: &str, child: &str) -> String {
    format!("{parent}->{child}")
}

impl SolutionDoc {
    pub fn new(inst: &Instance, sol: &Solution) -> Self {
        let tree = &inst.tree;
        let report = assemble_measure(inst, sol);
        let mut x = BTreeMap::new();
        let mut q = BTreeMap::new();
        for (v, node) in tree.nodes().iter().enumerate() {
            x.insert(node.id.clone(), format_vector(&sol.x[v]));
            if let Some(u) = tree.parent(v) {
                q.insert(
                    edge_label(&tree.node(u).id, &node.id),
                    format_rational(&sol.q[v]),
                );
            }
        }
        let leaf_measure = report
            .leaf_measure
            .iter()
            .map(|(l, m)| (tree.node(*l).id.clone(), format_rational(m)))
            .collect();
        SolutionDoc {
            x,
            q,
            leaf_measure,
            verdict: Verdict::Solvable,
        }
    }

    /// Rebuilds an indexed solution; any id mismatch with the tree is a
    /// schema error.
    pub fn to_solution(&self, inst: &Instance) -> Result<Solution, SolverError> {
        let tree = &inst.tree;
        let parse =
            |text: &str| parse_rational(text).map_err(|e| SolverError::Schema(e.to_string()));
        let mut x = vec![Vec::new(); tree.len()];
        let mut q = vec![Rational::zero(); tree.len()];
        if self.x.len() != tree.len() {
            return Err(SolverError::Schema(
                "x must list every node exactly once".into(),
            ));
        }
        for (id, coords) in &self.x {
            let v = tree
                .index_of(id)
                .ok_or_else(|| SolverError::Schema(format!("unknown node {id}")))?;
            if coords.len() != inst.dim {
                return Err(SolverError::Schema(format!(
                    "node {id}: expected {} coordinates",
                    inst.dim
                )));
            }
            x[v] = coords.iter().map(|c| parse(c)).collect::<Result<_, _>>()?;
        }
        q[tree.root()] = Rational::one();
        if self.q.len() + 1 != tree.len() {
            return Err(SolverError::Schema(
                "q must list every edge exactly once".into(),
            ));
        }
        for (label, value) in &self.q {
            let (pid, cid) = label
                .split_once("->")
                .ok_or_else(|| SolverError::Schema(format!("bad edge label {label}")))?;
            let c = tree
                .index_of(cid)
                .ok_or_else(|| SolverError::Schema(format!("unknown node {cid}")))?;
            let parent_ok = tree.parent(c).is_some_and(|p| tree.node(p).id == pid);
            if !parent_ok {
                return Err(SolverError::Schema(format!("no edge {label}")));
            }
            q[c] = parse(value)?;
        }
        Ok(Solution { x, q })
    }
}
