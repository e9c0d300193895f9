//! Exact dense linear algebra over the rationals: echelon forms, null spaces
//! and orthogonal projections. Matrices are row lists.

use num_traits::{One, Zero};

use crate::rational::{axpy, dot, Rational, Vector};

/// Reduced row echelon basis of the row space (pivot entries equal to one).
pub fn row_reduce(rows: &[Vector], dim: usize) -> Vec<Vector> {
    let mut m: Vec<Vector> = rows.to_vec();
    let mut rank = 0;
    for col in 0..dim {
        let Some(pivot) = (rank..m.len()).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(rank, pivot);
        let inv = Rational::one() / &m[rank][col];
        for x in m[rank].iter_mut() {
            *x *= &inv;
        }
        let pivot_row = m[rank].clone();
        for (r, row) in m.iter_mut().enumerate() {
            if r != rank && !row[col].is_zero() {
                let f = -row[col].clone();
                axpy(row, &f, &pivot_row);
            }
        }
        rank += 1;
        if rank == m.len() {
            break;
        }
    }
    m.truncate(rank);
    m
}

pub fn rank(rows: &[Vector], dim: usize) -> usize {
    row_reduce(rows, dim).len()
}

/// Pivot column of each row of a reduced echelon basis.
pub fn pivots(rref: &[Vector]) -> Vec<usize> {
    rref.iter()
        .map(|r| r.iter().position(|x| !x.is_zero()).expect("nonzero row"))
        .collect()
}

/// Basis of `{x : row . x = 0 for every row}`.
pub fn null_space(rows: &[Vector], dim: usize) -> Vec<Vector> {
    let rref = row_reduce(rows, dim);
    let piv = pivots(&rref);
    let mut basis = Vec::new();
    for free in (0..dim).filter(|c| !piv.contains(c)) {
        let mut v = vec![Rational::zero(); dim];
        v[free] = Rational::one();
        for (row, &p) in rref.iter().zip(&piv) {
            v[p] = -row[free].clone();
        }
        basis.push(v);
    }
    basis
}

/// Inverse of a square nonsingular matrix, or `None` if singular.
pub fn inverse(m: &[Vector]) -> Option<Vec<Vector>> {
    let n = m.len();
    let mut aug: Vec<Vector> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| {
                if i == j {
                    Rational::one()
                } else {
                    Rational::zero()
                }
            }));
            r
        })
        .collect();
    let red = row_reduce(&aug, n);
    if red.len() < n || pivots(&red).iter().enumerate().any(|(i, &p)| i != p) {
        return None;
    }
    // row_reduce keeps the augmented block consistent since pivots never land there
    aug = red;
    Some(aug.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// Orthogonal projection onto the complement of a subspace.
#[derive(Debug, Clone)]
pub struct ComplementProjector {
    basis: Vec<Vector>,
    gram_inv: Vec<Vector>,
}

impl ComplementProjector {
    /// `basis` must be linearly independent.
    pub fn new(basis: Vec<Vector>) -> Self {
        let gram: Vec<Vector> = basis
            .iter()
            .map(|a| basis.iter().map(|b| dot(a, b)).collect())
            .collect();
        let gram_inv = inverse(&gram).expect("independent basis");
        ComplementProjector { basis, gram_inv }
    }

    pub fn is_trivial(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn project(&self, v: &[Rational]) -> Vector {
        let mut out = v.to_vec();
        if self.basis.is_empty() {
            return out;
        }
        let rhs: Vec<Rational> = self.basis.iter().map(|b| dot(b, v)).collect();
        for (b, inv_row) in self.basis.iter().zip(&self.gram_inv) {
            let coef = dot(inv_row, &rhs);
            axpy(&mut out, &(-coef), b);
        }
        out
    }
}
