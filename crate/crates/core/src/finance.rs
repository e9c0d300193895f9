//! Two applications of martingale selection: equivalent martingale measures
//! for a single-valued price process, and strictly consistent price
//! processes for solvency-cone models with proportional transaction costs.

use num_traits::{One, Zero};
use thiserror::Error;

use crate::lp::{self, LinearProgram, LpResult, Sense};
use crate::polyhedra::{canonicalize, dual_cone, is_linear_subspace, FGSet, GeometryError};
use crate::rational::{is_zero_vector, sub, zeros, Rational, Vector};
use crate::solver::{solve, Solution, SolverError, Verdict};
use crate::tree::{parse_vector, Document, EventTree, Instance, SetDoc, TreeError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FinanceError {
    #[error(transparent)]
    Tree(#[from] TreeError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("node {0}: solvency cone must have its apex at the origin")]
    NotACone(String),
    #[error("node {0}: dual cone is {{0}}")]
    TrivialDualCone(String),
    #[error("node {node}: per-node criterion and recursion disagree")]
    Disagreement { node: String },
}

#[derive(Debug, Clone, PartialEq)]
pub struct PriceProcess {
    pub tree: EventTree,
    pub dim: usize,
    pub values: Vec<Vector>,
}

impl PriceProcess {
    pub fn from_document(doc: &Document) -> Result<Self, TreeError> {
        let tree = doc.tree()?;
        let section = doc
            .values
            .as_ref()
            .ok_or(TreeError::MissingSection("values"))?;
        let values = Document::per_node(&tree, section)?
            .into_iter()
            .zip(tree.nodes())
            .map(|(v, n)| {
                let v = parse_vector(v, &n.id)?;
                if v.len() != doc.dim {
                    return Err(TreeError::DimensionMismatch {
                        node: n.id.clone(),
                        expected: doc.dim,
                        got: v.len(),
                    });
                }
                Ok(v)
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(PriceProcess {
            tree,
            dim: doc.dim,
            values,
        })
    }

    pub fn to_document(&self) -> Document {
        let mut doc = Document::from_tree(&self.tree, self.dim);
        doc.values = Some(
            self.tree
                .nodes()
                .iter()
                .zip(&self.values)
                .map(|(n, v)| (n.id.clone(), crate::tree::vector_text(v)))
                .collect(),
        );
        doc
    }

    /// The martingale selection instance with singleton sets.
    pub fn instance(&self) -> Instance {
        let sets = self
            .values
            .iter()
            .map(|v| FGSet::point(v.clone()))
            .collect();
        Instance::new(self.tree.clone(), self.dim, sets).expect("values are well formed")
    }
}

#[derive(Debug, Clone)]
pub struct NaOutcome {
    pub instance: Instance,
    pub verdict: Verdict,
    pub solution: Option<Solution>,
}

impl NaOutcome {
    pub fn no_arbitrage(&self) -> bool {
        self.verdict.is_solvable()
    }
}

/// Decides existence of an equivalent martingale measure twice: through the
/// set recursion on singleton sets and node by node through strictly
/// positive barycentric weights of the successor prices.
pub fn check_na_single(p: &PriceProcess) -> Result<NaOutcome, FinanceError> {
    let instance = p.instance();
    let (state, solution) = solve(&instance, true)?;
    let tree = &p.tree;
    // With singleton sets, W(u) is nonempty exactly when every child's W is
    // and the parent value is a strictly positive combination of the
    // children's values.
    for u in (0..tree.len()).filter(|&u| !tree.is_leaf(u)) {
        let kids: Vec<Vector> = tree
            .children(u)
            .iter()
            .map(|&c| p.values[c].clone())
            .collect();
        let local = lp::strict_barycentric(&p.values[u], &kids)
            .map_err(SolverError::from)?
            .is_some();
        let expected = local && tree.children(u).iter().all(|&c| !state.w[c].is_empty());
        if expected == state.w[u].is_empty() {
            return Err(FinanceError::Disagreement {
                node: tree.node(u).id.clone(),
            });
        }
    }
    Ok(NaOutcome {
        instance,
        verdict: state.verdict,
        solution,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub enum ArbitrageVerdict {
    NoArbitrage,
    /// Holdings per internal node (node index, position) and the resulting
    /// terminal wealth per leaf.
    Arbitrage {
        strategy: Vec<(usize, Vector)>,
        leaf_wealth: Vec<(usize, Rational)>,
    },
}

/// Independent linear-programming test for a self-financing strategy whose
/// terminal gains are nonnegative everywhere and sum to at least one.
pub fn arbitrage_oracle(p: &PriceProcess) -> Result<ArbitrageVerdict, FinanceError> {
    let tree = &p.tree;
    let d = p.dim;
    let internal: Vec<usize> = (0..tree.len()).filter(|&u| !tree.is_leaf(u)).collect();
    if internal.is_empty() {
        return Ok(ArbitrageVerdict::NoArbitrage);
    }
    let slot = |u: usize| internal.binary_search(&u).expect("internal node") * d;
    let nvars = internal.len() * d;

    let leaves: Vec<usize> = tree.leaves().collect();
    let mut gains: Vec<Vector> = Vec::with_capacity(leaves.len());
    for &leaf in &leaves {
        let mut row = zeros(nvars);
        let mut v = leaf;
        while let Some(u) = tree.parent(v) {
            let inc = sub(&p.values[v], &p.values[u]);
            let base = slot(u);
            for (k, x) in inc.into_iter().enumerate() {
                row[base + k] += x;
            }
            v = u;
        }
        gains.push(row);
    }

    let mut lp = LinearProgram::new(nvars, Sense::Maximize);
    let mut total = zeros(nvars);
    for g in &gains {
        lp.add_ge(g.clone(), Rational::zero());
        for (t, x) in total.iter_mut().zip(g) {
            *t += x;
        }
    }
    if is_zero_vector(&total) && gains.iter().all(|g| is_zero_vector(g)) {
        return Ok(ArbitrageVerdict::NoArbitrage);
    }
    lp.add_ge(total, Rational::one());
    match lp::solve_lp(&lp).map_err(SolverError::from)? {
        LpResult::Infeasible { .. } => Ok(ArbitrageVerdict::NoArbitrage),
        LpResult::Optimal { point, .. } | LpResult::Unbounded { point, .. } => {
            let strategy = internal
                .iter()
                .map(|&u| (u, point[slot(u)..slot(u) + d].to_vec()))
                .collect();
            let leaf_wealth = leaves
                .iter()
                .zip(&gains)
                .map(|(&l, g)| (l, crate::rational::dot(g, &point)))
                .collect();
            Ok(ArbitrageVerdict::Arbitrage {
                strategy,
                leaf_wealth,
            })
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConeModel {
    pub tree: EventTree,
    pub dim: usize,
    /// Solvency cone per node.
    pub cones: Vec<FGSet>,
}

impl ConeModel {
    pub fn new(tree: EventTree, dim: usize, cones: Vec<FGSet>) -> Result<Self, FinanceError> {
        for (n, k) in tree.nodes().iter().zip(&cones) {
            let c = canonicalize(k);
            if c.vertices().len() != 1 || !is_zero_vector(&c.vertices()[0]) {
                return Err(FinanceError::NotACone(n.id.clone()));
            }
        }
        Ok(ConeModel { tree, dim, cones })
    }

    pub fn from_document(doc: &Document) -> Result<Self, FinanceError> {
        let tree = doc.tree()?;
        let section = doc
            .cones
            .as_ref()
            .ok_or(TreeError::MissingSection("cones"))?;
        let cones = Document::per_node(&tree, section)?
            .into_iter()
            .zip(tree.nodes())
            .map(|(c, n)| c.to_set(&n.id, doc.dim, Some(zeros(doc.dim))))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(tree, doc.dim, cones)
    }

    pub fn to_document(&self) -> Document {
        let mut doc = Document::from_tree(&self.tree, self.dim);
        doc.cones = Some(
            self.tree
                .nodes()
                .iter()
                .zip(&self.cones)
                .map(|(n, k)| (n.id.clone(), SetDoc::from_set(k)))
                .collect(),
        );
        doc
    }

    /// Martingale selection instance whose sets are the dual cones; the value
    /// at each node is the relative interior of `K*`.
    pub fn dual_instance(&self) -> Result<(Instance, Vec<String>), FinanceError> {
        let mut sets = Vec::with_capacity(self.cones.len());
        let mut subspaces = Vec::new();
        for (n, k) in self.tree.nodes().iter().zip(&self.cones) {
            let dual = dual_cone(k)?;
            if dual.rays().is_empty() {
                return Err(FinanceError::TrivialDualCone(n.id.clone()));
            }
            if is_linear_subspace(&dual) {
                subspaces.push(n.id.clone());
            }
            sets.push(dual);
        }
        let inst = Instance::new(self.tree.clone(), self.dim, sets)?;
        Ok((inst, subspaces))
    }
}

#[derive(Debug, Clone)]
pub struct CpsOutcome {
    pub instance: Instance,
    pub verdict: Verdict,
    pub solution: Option<Solution>,
    /// Nodes whose dual cone is a linear subspace (the zero process is then
    /// admissible there).
    pub subspace_nodes: Vec<String>,
}

pub fn consistent_price_system(m: &ConeModel) -> Result<CpsOutcome, FinanceError> {
    let (instance, subspace_nodes) = m.dual_instance()?;
    let (state, solution) = solve(&instance, true)?;
    Ok(CpsOutcome {
        instance,
        verdict: state.verdict,
        solution,
        subspace_nodes,
    })
}
