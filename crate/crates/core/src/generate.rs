//! Seeded random instances for testing and corpus generation.
//!
//! Output depends only on `(seed, profile)`. Trees use path ids (`r`, `r.0`,
//! `r.0.2`, ...), dimensions up to 4, horizons up to 4, at most three
//! children per node, and every input rational has a denominator of at most
//! 64.

use std::fmt;
use std::str::FromStr;

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::finance::{ConeModel, PriceProcess};
use crate::polyhedra::FGSet;
use crate::rational::{add, axpy, int, ratio, scale, sub, zeros, Rational, Vector};
use crate::tree::{Document, EventTree, Instance, Node};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Profile {
    /// Sets inflated around a planted martingale; always solvable.
    SolvableBiased,
    /// Planted sets with a random share of nodes displaced.
    Adversarial,
    /// Price processes with a mix of balanced and one-sided moves.
    SingleValued,
    /// Two-asset bid-ask solvency cones with spreads shrinking over time.
    Cones,
}

impl Profile {
    pub const ALL: [Profile; 4] = [
        Profile::SolvableBiased,
        Profile::Adversarial,
        Profile::SingleValued,
        Profile::Cones,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Profile::SolvableBiased => "solvable-biased",
            Profile::Adversarial => "adversarial",
            Profile::SingleValued => "single-valued",
            Profile::Cones => "cones",
        }
    }
}

impl fmt::Display for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error(
    "unknown profile {0:?}; expected one of solvable-biased, adversarial, single-valued, cones"
)]
pub struct UnknownProfile(pub String);

impl FromStr for Profile {
    type Err = UnknownProfile;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Profile::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| UnknownProfile(s.to_string()))
    }
}

pub fn generate(seed: u64, profile: Profile) -> Document {
    let mut s = Sampler::new(seed);
    match profile {
        Profile::SolvableBiased => s.planted_instance(0.0).to_document(),
        Profile::Adversarial => s.planted_instance(0.35).to_document(),
        Profile::SingleValued => s.price_process(3).to_document(),
        Profile::Cones => s.cone_model().to_document(),
    }
}

pub fn generate_text(seed: u64, profile: Profile) -> String {
    generate(seed, profile).to_json()
}

/// Random building blocks over a ChaCha8 stream.
pub struct Sampler {
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Sampler {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    pub fn chance(&mut self, p: f64) -> bool {
        self.rng.random_bool(p)
    }

    pub fn range(&mut self, lo: i64, hi: i64) -> i64 {
        self.rng.random_range(lo..=hi)
    }

    /// `k / den` with `k` uniform in `[lo * den, hi * den]`.
    pub fn grid(&mut self, lo: i64, hi: i64, den: i64) -> Rational {
        ratio(self.range(lo * den, hi * den), den)
    }

    pub fn grid_vector(&mut self, dim: usize, bound: i64, den: i64) -> Vector {
        (0..dim).map(|_| self.grid(-bound, bound, den)).collect()
    }

    fn nonzero_vector(&mut self, dim: usize, bound: i64) -> Vector {
        loop {
            let v = self.grid_vector(dim, bound, 1);
            if v.iter().any(|x| !x.is_zero()) {
                return v;
            }
        }
    }

    /// Random event tree with path ids and integer weights 1..=8 normalized
    /// per sibling group.
    pub fn tree(&mut self, horizon: usize) -> EventTree {
        let max_branching = if horizon <= 3 { 3 } else { 2 };
        let mut nodes = vec![Node {
            id: "r".into(),
            time: 0,
            parent: None,
            prob: Rational::one(),
        }];
        let mut frontier = vec!["r".to_string()];
        for t in 1..=horizon {
            let mut next = Vec::new();
            for parent in &frontier {
                let k = self.range(1, max_branching);
                let weights: Vec<i64> = (0..k).map(|_| self.range(1, 8)).collect();
                let total: i64 = weights.iter().sum();
                for (j, w) in weights.into_iter().enumerate() {
                    let id = format!("{parent}.{j}");
                    nodes.push(Node {
                        id: id.clone(),
                        time: t,
                        parent: Some(parent.clone()),
                        prob: ratio(w, total),
                    });
                    next.push(id);
                }
            }
            frontier = next;
        }
        EventTree::new(horizon, nodes).expect("generated tree is valid")
    }

    /// A set whose relative interior contains `x`: a simplex-like cloud with
    /// barycenter `x`, optionally shifted against a few rays (possibly a
    /// line) so that `x` stays a strictly positive combination.
    pub fn set_around(&mut self, x: &[Rational]) -> FGSet {
        let dim = x.len();
        let k = self.range(0, dim as i64) as usize;
        let offsets: Vec<Vector> = (0..k).map(|_| self.grid_vector(dim, 2, 2)).collect();
        let mut rays = Vec::new();
        if self.chance(0.3) {
            for _ in 0..self.range(1, 2) {
                rays.push(self.nonzero_vector(dim, 2));
            }
            if self.chance(0.25) {
                let r = rays[0].iter().map(|c| -c).collect();
                rays.push(r);
            }
        }
        let mut shift = zeros(dim);
        for r in &rays {
            shift = sub(&shift, r);
        }
        let base = add(x, &shift);
        let mut vertices: Vec<Vector> = offsets.iter().map(|o| add(&base, o)).collect();
        let mut last = base.clone();
        for o in &offsets {
            last = sub(&last, o);
        }
        vertices.push(last);
        FGSet::new(dim, vertices, rays).expect("generated set is valid")
    }

    /// Any nonempty finitely generated set in a box around the origin.
    pub fn fg_set(&mut self, dim: usize) -> FGSet {
        let center = self.grid_vector(dim, 3, 1);
        self.set_around(&center)
    }

    /// Cone generated by up to four random integer rays.
    pub fn cone(&mut self, dim: usize) -> FGSet {
        let n = self.range(1, 4);
        let rays = (0..n).map(|_| self.nonzero_vector(dim, 3)).collect();
        FGSet::cone(dim, rays).expect("generated cone is valid")
    }

    /// A point of the relative interior of `s` as a combination of its listed
    /// generators with random strictly positive weights.
    pub fn interior_point(&mut self, s: &FGSet) -> Vector {
        let weights: Vec<i64> = (0..s.vertices().len()).map(|_| self.range(1, 8)).collect();
        let total: i64 = weights.iter().sum();
        let mut x = zeros(s.dim());
        for (v, w) in s.vertices().iter().zip(weights) {
            axpy(&mut x, &ratio(w, total), v);
        }
        for r in s.rays() {
            let mu = ratio(self.range(1, 8), 4);
            axpy(&mut x, &mu, r);
        }
        x
    }

    fn horizon(&mut self) -> usize {
        self.range(1, 4) as usize
    }

    /// Martingale with equal one-step weights: sibling offsets sum to zero.
    fn planted_martingale(&mut self, tree: &EventTree, dim: usize) -> Vec<Vector> {
        let mut x = vec![zeros(dim); tree.len()];
        x[tree.root()] = self.grid_vector(dim, 3, 2);
        for u in 0..tree.len() {
            let kids = tree.children(u).to_vec();
            let mut total = zeros(dim);
            for (j, &c) in kids.iter().enumerate() {
                let delta = if j + 1 == kids.len() {
                    scale(&total, &int(-1))
                } else {
                    self.grid_vector(dim, 2, 2)
                };
                total = add(&total, &delta);
                x[c] = add(&x[u], &delta);
            }
        }
        x
    }

    /// Sets built around a planted martingale; each node is displaced by an
    /// integer offset with probability `displace`.
    pub fn planted_instance(&mut self, displace: f64) -> Instance {
        let dim = self.range(1, 4) as usize;
        let horizon = self.horizon();
        let tree = self.tree(horizon);
        let x = self.planted_martingale(&tree, dim);
        let sets = x
            .iter()
            .map(|xu| {
                if displace > 0.0 && self.chance(displace) {
                    let shifted = add(xu, &self.nonzero_vector(dim, 2));
                    self.set_around(&shifted)
                } else {
                    self.set_around(xu)
                }
            })
            .collect();
        Instance::new(tree, dim, sets).expect("generated instance is valid")
    }

    /// Price process in dimension at most `max_dim`. Each branching either
    /// balances its moves under random positive weights or draws them
    /// independently.
    pub fn price_process(&mut self, max_dim: usize) -> PriceProcess {
        let dim = self.range(1, max_dim as i64) as usize;
        let horizon = self.horizon();
        let tree = self.tree(horizon);
        let mut values = vec![zeros(dim); tree.len()];
        values[tree.root()] = self.grid_vector(dim, 3, 1);
        for u in 0..tree.len() {
            let kids = tree.children(u).to_vec();
            if kids.is_empty() {
                continue;
            }
            let balanced = self.chance(0.6);
            let weights: Vec<i64> = kids.iter().map(|_| self.range(1, 4)).collect();
            let mut moment = zeros(dim);
            for (j, &c) in kids.iter().enumerate() {
                let delta = if balanced && j + 1 == kids.len() {
                    scale(&moment, &ratio(-1, weights[j]))
                } else {
                    self.grid_vector(dim, 3, 1)
                };
                axpy(&mut moment, &int(weights[j]), &delta);
                values[c] = add(&values[u], &delta);
            }
        }
        PriceProcess { tree, dim, values }
    }

    /// Bid-ask model in two assets: at each node the dual cone is
    /// `cone{(1, lo), (1, hi)}` around a random mid price with a spread
    /// shrinking in time; the solvency cone is `cone{(hi, -1), (-lo, 1)}`.
    pub fn cone_model(&mut self) -> ConeModel {
        let horizon = self.horizon();
        let tree = self.tree(horizon);
        let mut mid = vec![Rational::zero(); tree.len()];
        mid[tree.root()] = self.grid(1, 4, 4);
        for u in 0..tree.len() {
            for &c in tree.children(u) {
                let m = &mid[u] + self.grid(-1, 1, 4);
                mid[c] = if m > Rational::zero() { m } else { ratio(1, 4) };
            }
        }
        let width = ratio(1, self.range(1, 4));
        let cones = (0..tree.len())
            .map(|u| {
                let w = &width / int(tree.node(u).time as i64 + 1);
                let lo = &mid[u] - &w;
                let hi = &mid[u] + &w;
                FGSet::cone(2, vec![vec![hi, int(-1)], vec![-lo, int(1)]])
                    .expect("generated cone is valid")
            })
            .collect();
        ConeModel::new(tree, 2, cones).expect("generated cones have apex 0")
    }
}
