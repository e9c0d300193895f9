//! Double description kernel: generators of `{y : a . y >= 0 for all a}`.
//!
//! Lineality directions are kept as an explicit basis; the remaining
//! generators are the extreme rays of the cone modulo that space. Adjacency
//! of ray pairs uses the combinatorial zero-set test.

use num_traits::{Signed, Zero};

use crate::rational::{axpy, dot, primitive, unit, Rational, Vector};

#[derive(Debug, Clone, PartialEq)]
pub struct ConeGenerators {
    pub lineality: Vec<Vector>,
    pub rays: Vec<Vector>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct ZeroSet(Vec<u64>);

impl ZeroSet {
    fn new(len: usize) -> Self {
        ZeroSet(vec![0; len.div_ceil(64).max(1)])
    }

    fn insert(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }

    fn intersect(&self, other: &Self) -> Self {
        ZeroSet(self.0.iter().zip(&other.0).map(|(a, b)| a & b).collect())
    }

    fn is_subset(&self, other: &Self) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a & !b == 0)
    }
}

struct Ray {
    v: Vector,
    zeros: ZeroSet,
}

pub fn cone_generators(constraints: &[Vector], dim: usize) -> ConeGenerators {
    let nc = constraints.len();
    let mut lineality: Vec<Vector> = (0..dim).map(|i| unit(dim, i)).collect();
    let mut rays: Vec<Ray> = Vec::new();

    for (ci, a) in constraints.iter().enumerate() {
        debug_assert_eq!(a.len(), dim);
        if let Some(pos) = lineality.iter().position(|l| !dot(a, l).is_zero()) {
            let mut l0 = lineality.swap_remove(pos);
            let mut s = dot(a, &l0);
            if s.is_negative() {
                l0.iter_mut().for_each(|x| *x = -x.clone());
                s = -s;
            }
            for l in lineality.iter_mut() {
                let f = dot(a, l) / &s;
                axpy(l, &(-f), &l0);
            }
            for r in rays.iter_mut() {
                let f = dot(a, &r.v) / &s;
                if !f.is_zero() {
                    axpy(&mut r.v, &(-f), &l0);
                    r.v = primitive(&r.v).expect("ray stays nonzero");
                }
                r.zeros.insert(ci);
            }
            // l0 was orthogonal to every earlier constraint
            let mut zeros = ZeroSet::new(nc);
            (0..ci).for_each(|i| zeros.insert(i));
            rays.push(Ray {
                v: primitive(&l0).expect("nonzero lineality vector"),
                zeros,
            });
            continue;
        }

        let values: Vec<Rational> = rays.iter().map(|r| dot(a, &r.v)).collect();
        let pos: Vec<usize> = (0..rays.len())
            .filter(|&i| values[i].is_positive())
            .collect();
        let neg: Vec<usize> = (0..rays.len())
            .filter(|&i| values[i].is_negative())
            .collect();
        if neg.is_empty() {
            for (r, val) in rays.iter_mut().zip(&values) {
                if val.is_zero() {
                    r.zeros.insert(ci);
                }
            }
            continue;
        }

        let mut created = Vec::new();
        for &p in &pos {
            for &n in &neg {
                let common = rays[p].zeros.intersect(&rays[n].zeros);
                let adjacent = rays
                    .iter()
                    .enumerate()
                    .all(|(k, r)| k == p || k == n || !common.is_subset(&r.zeros));
                if !adjacent {
                    continue;
                }
                // (a.p) n - (a.n) p lies on the hyperplane a . y = 0
                let mut v: Vector = rays[n].v.iter().map(|x| x * &values[p]).collect();
                axpy(&mut v, &(-values[n].clone()), &rays[p].v);
                let mut zeros = common;
                zeros.insert(ci);
                created.push(Ray {
                    v: primitive(&v).expect("adjacent rays are independent"),
                    zeros,
                });
            }
        }

        let mut kept: Vec<Ray> = rays
            .into_iter()
            .zip(values)
            .filter(|(_, val)| !val.is_negative())
            .map(|(mut r, val)| {
                if val.is_zero() {
                    r.zeros.insert(ci);
                }
                r
            })
            .collect();
        kept.extend(created);
        rays = kept;
    }

    ConeGenerators {
        lineality,
        rays: rays.into_iter().map(|r| r.v).collect(),
    }
}
