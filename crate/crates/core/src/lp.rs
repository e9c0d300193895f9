//! Exact rational linear programming.
//!
//! A dense two-phase tableau simplex with Bland's pivoting rule. Every result
//! carries a certificate that can be checked by substitution: optimal points
//! come with dual multipliers, infeasible systems with a Farkas vector and
//! unbounded problems with an improving recession ray.

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::rational::{dot, Rational, Vector};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Maximize,
    Minimize,
}

/// `objective . x` is optimized subject to `a . x = b` for every equality row
/// and `a . x <= b` for every inequality row. Variables are free unless
/// flagged in `nonnegative`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram {
    pub objective: Vector,
    pub eq_rows: Vec<(Vector, Rational)>,
    pub ineq_rows: Vec<(Vector, Rational)>,
    pub sense: Sense,
    /// Per-variable sign restriction; an empty vector means all free.
    pub nonnegative: Vec<bool>,
}

/// Row multipliers, one per equality row and one per inequality row.
#[derive(Debug, Clone, PartialEq)]
pub struct Multipliers {
    pub eq: Vector,
    pub ineq: Vector,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpResult {
    Optimal {
        point: Vector,
        value: Rational,
        duals: Multipliers,
    },
    /// `y` with `y_ineq >= 0`, `y^T A = 0` on free columns (`>= 0` on
    /// nonnegative ones) and `y^T b < 0`.
    Infeasible { farkas: Multipliers },
    /// A feasible `point` and a `ray` satisfying the homogeneous system that
    /// strictly improves the objective.
    Unbounded { point: Vector, ray: Vector },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LpError {
    #[error("linear program needs at least one variable")]
    NoVariables,
    #[error("row {row} has {got} coefficients, expected {expected}")]
    DimensionMismatch {
        row: usize,
        got: usize,
        expected: usize,
    },
    #[error("empty point list")]
    EmptyPoints,
    #[error("point is not in the generated set")]
    NotInHull { farkas: Multipliers },
}

impl LinearProgram {
    pub fn new(num_vars: usize, sense: Sense) -> Self {
        LinearProgram {
            objective: vec![Rational::zero(); num_vars],
            eq_rows: Vec::new(),
            ineq_rows: Vec::new(),
            sense,
            nonnegative: Vec::new(),
        }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn with_objective(mut self, objective: Vector) -> Self {
        self.objective = objective;
        self
    }

    pub fn add_eq(&mut self, row: Vector, rhs: Rational) -> &mut Self {
        self.eq_rows.push((row, rhs));
        self
    }

    pub fn add_le(&mut self, row: Vector, rhs: Rational) -> &mut Self {
        self.ineq_rows.push((row, rhs));
        self
    }

    pub fn add_ge(&mut self, row: Vector, rhs: Rational) -> &mut Self {
        self.ineq_rows
            .push((row.into_iter().map(|x| -x).collect(), -rhs));
        self
    }

    pub fn set_nonnegative(&mut self, var: usize) -> &mut Self {
        if self.nonnegative.is_empty() {
            self.nonnegative = vec![false; self.num_vars()];
        }
        self.nonnegative[var] = true;
        self
    }

    pub fn is_nonnegative(&self, var: usize) -> bool {
        self.nonnegative.get(var).copied().unwrap_or(false)
    }

    fn validate(&self) -> Result<(), LpError> {
        let n = self.num_vars();
        if n == 0 {
            return Err(LpError::NoVariables);
        }
        let rows = self.eq_rows.iter().chain(&self.ineq_rows);
        for (row, (a, _)) in rows.enumerate() {
            if a.len() != n {
                return Err(LpError::DimensionMismatch {
                    row,
                    got: a.len(),
                    expected: n,
                });
            }
        }
        if !self.nonnegative.is_empty() && self.nonnegative.len() != n {
            return Err(LpError::DimensionMismatch {
                row: usize::MAX,
                got: self.nonnegative.len(),
                expected: n,
            });
        }
        Ok(())
    }

    pub fn is_feasible_point(&self, x: &[Rational]) -> bool {
        x.len() == self.num_vars()
            && self.eq_rows.iter().all(|(a, b)| &dot(a, x) == b)
            && self.ineq_rows.iter().all(|(a, b)| &dot(a, x) <= b)
            && (0..x.len()).all(|j| !self.is_nonnegative(j) || !x[j].is_negative())
    }

    /// `y^T A` over all rows.
    fn combine(&self, y: &Multipliers) -> Vector {
        let mut out = vec![Rational::zero(); self.num_vars()];
        for ((a, _), w) in self
            .eq_rows
            .iter()
            .zip(&y.eq)
            .chain(self.ineq_rows.iter().zip(&y.ineq))
        {
            crate::rational::axpy(&mut out, w, a);
        }
        out
    }

    fn combine_rhs(&self, y: &Multipliers) -> Rational {
        let mut acc = Rational::zero();
        for ((_, b), w) in self
            .eq_rows
            .iter()
            .zip(&y.eq)
            .chain(self.ineq_rows.iter().zip(&y.ineq))
        {
            acc += b * w;
        }
        acc
    }

    /// Checks a result's certificate by direct substitution.
    pub fn verify(&self, result: &LpResult) -> bool {
        let shape_ok = |y: &Multipliers| {
            y.eq.len() == self.eq_rows.len() && y.ineq.len() == self.ineq_rows.len()
        };
        match result {
            LpResult::Optimal {
                point,
                value,
                duals,
            } => {
                if !self.is_feasible_point(point) || &dot(&self.objective, point) != value {
                    return false;
                }
                if !shape_ok(duals) {
                    return false;
                }
                let ya = self.combine(duals);
                let (sign_ok, col_ok): (bool, bool) = match self.sense {
                    Sense::Maximize => (
                        duals.ineq.iter().all(|w| !w.is_negative()),
                        (0..self.num_vars()).all(|j| {
                            if self.is_nonnegative(j) {
                                ya[j] >= self.objective[j]
                            } else {
                                ya[j] == self.objective[j]
                            }
                        }),
                    ),
                    Sense::Minimize => (
                        duals.ineq.iter().all(|w| !w.is_positive()),
                        (0..self.num_vars()).all(|j| {
                            if self.is_nonnegative(j) {
                                ya[j] <= self.objective[j]
                            } else {
                                ya[j] == self.objective[j]
                            }
                        }),
                    ),
                };
                sign_ok && col_ok && &self.combine_rhs(duals) == value
            }
            LpResult::Infeasible { farkas } => {
                if !shape_ok(farkas) || farkas.ineq.iter().any(|w| w.is_negative()) {
                    return false;
                }
                let ya = self.combine(farkas);
                (0..self.num_vars()).all(|j| {
                    if self.is_nonnegative(j) {
                        !ya[j].is_negative()
                    } else {
                        ya[j].is_zero()
                    }
                }) && self.combine_rhs(farkas).is_negative()
            }
            LpResult::Unbounded { point, ray } => {
                let gain = dot(&self.objective, ray);
                let improving = match self.sense {
                    Sense::Maximize => gain.is_positive(),
                    Sense::Minimize => gain.is_negative(),
                };
                self.is_feasible_point(point)
                    && improving
                    && self.eq_rows.iter().all(|(a, _)| dot(a, ray).is_zero())
                    && self
                        .ineq_rows
                        .iter()
                        .all(|(a, _)| !dot(a, ray).is_positive())
                    && (0..ray.len()).all(|j| !self.is_nonnegative(j) || !ray[j].is_negative())
            }
        }
    }
}

/// Standard-form column: which original variable it stands for and with
/// which sign, or a slack/artificial.
#[derive(Debug, Clone, Copy, PartialEq)]
enum Column {
    Var { index: usize, negated: bool },
    Slack,
    Artificial,
}

struct Tableau {
    /// `rows x (cols + 1)`, last entry is the right-hand side.
    t: Vec<Vector>,
    /// Reduced costs, `cols + 1` entries; last is minus the objective value.
    d: Vector,
    basis: Vec<usize>,
    cols: usize,
    first_artificial: usize,
}

impl Tableau {
    fn rhs(&self, row: usize) -> &Rational {
        &self.t[row][self.cols]
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let inv = Rational::one() / &self.t[r][c];
        for x in self.t[r].iter_mut() {
            if !x.is_zero() {
                *x *= &inv;
            }
        }
        let support: Vec<usize> = (0..=self.cols)
            .filter(|&j| !self.t[r][j].is_zero())
            .collect();
        let pivot_row = self.t[r].clone();
        let eliminate = |row: &mut Vector| {
            if row[c].is_zero() {
                return;
            }
            let f = row[c].clone();
            for &j in &support {
                let delta = &f * &pivot_row[j];
                row[j] -= delta;
            }
        };
        for (i, row) in self.t.iter_mut().enumerate() {
            if i != r {
                eliminate(row);
            }
        }
        eliminate(&mut self.d);
        self.basis[r] = c;
    }

    fn set_costs(&mut self, cost: &[Rational]) {
        let mut d: Vector = cost.to_vec();
        d.push(Rational::zero());
        for (i, &b) in self.basis.iter().enumerate() {
            let cb = &cost[b];
            if cb.is_zero() {
                continue;
            }
            for (dj, tij) in d.iter_mut().zip(&self.t[i]) {
                if !tij.is_zero() {
                    *dj -= cb * tij;
                }
            }
        }
        self.d = d;
    }

    /// Runs Bland's rule until optimal. Returns the entering column on
    /// unboundedness.
    fn optimize(&mut self, allowed: usize) -> Option<usize> {
        loop {
            let enter = (0..allowed).find(|&j| self.d[j].is_negative())?;
            let mut leave: Option<(usize, Rational)> = None;
            for i in 0..self.t.len() {
                let a = &self.t[i][enter];
                if !a.is_positive() {
                    continue;
                }
                let ratio = self.rhs(i) / a;
                let better = match &leave {
                    None => true,
                    Some((li, lr)) => {
                        ratio < *lr || (ratio == *lr && self.basis[i] < self.basis[*li])
                    }
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            match leave {
                Some((r, _)) => self.pivot(r, enter),
                None => return Some(enter),
            }
        }
    }

    /// `c_B^T B^{-1}`, read from the artificial block.
    fn duals(&self, cost: &[Rational]) -> Vector {
        let m = self.t.len();
        (0..m)
            .map(|k| {
                let col = self.first_artificial + k;
                let mut acc = Rational::zero();
                for (i, &b) in self.basis.iter().enumerate() {
                    if !cost[b].is_zero() && !self.t[i][col].is_zero() {
                        acc += &cost[b] * &self.t[i][col];
                    }
                }
                acc
            })
            .collect()
    }
}

pub fn solve_lp(lp: &LinearProgram) -> Result<LpResult, LpError> {
    lp.validate()?;
    let n = lp.num_vars();
    let m_eq = lp.eq_rows.len();
    let rows: Vec<&(Vector, Rational)> = lp.eq_rows.iter().chain(&lp.ineq_rows).collect();
    let m = rows.len();

    let mut columns = Vec::new();
    for j in 0..n {
        columns.push(Column::Var {
            index: j,
            negated: false,
        });
        if !lp.is_nonnegative(j) {
            columns.push(Column::Var {
                index: j,
                negated: true,
            });
        }
    }
    let first_slack = columns.len();
    columns.extend(std::iter::repeat_n(Column::Slack, m - m_eq));
    let first_artificial = columns.len();
    columns.extend(std::iter::repeat_n(Column::Artificial, m));
    let cols = columns.len();

    // Row signs so every right-hand side is nonnegative.
    let flip: Vec<bool> = rows.iter().map(|(_, b)| b.is_negative()).collect();
    let mut t = Vec::with_capacity(m);
    for (i, (a, b)) in rows.iter().enumerate() {
        let mut row = vec![Rational::zero(); cols + 1];
        for (c, col) in columns.iter().enumerate() {
            match *col {
                Column::Var { index, negated } => {
                    if !a[index].is_zero() {
                        row[c] = if negated {
                            -a[index].clone()
                        } else {
                            a[index].clone()
                        };
                    }
                }
                Column::Slack => {
                    if i >= m_eq && c - first_slack == i - m_eq {
                        row[c] = Rational::one();
                    }
                }
                Column::Artificial => {}
            }
        }
        row[first_artificial + i] = Rational::one();
        row[cols] = b.clone();
        if flip[i] {
            for x in row[..first_artificial].iter_mut() {
                *x = -x.clone();
            }
            row[cols] = -row[cols].clone();
        }
        t.push(row);
    }

    let mut tab = Tableau {
        t,
        d: Vec::new(),
        basis: (first_artificial..first_artificial + m).collect(),
        cols,
        first_artificial,
    };

    let unflip = |i: usize, y: &Rational| if flip[i] { -y.clone() } else { y.clone() };
    let split = |y: Vector| Multipliers {
        eq: y[..m_eq].to_vec(),
        ineq: y[m_eq..].to_vec(),
    };

    // Phase one: minimize the sum of artificials.
    let phase1_cost: Vector = (0..cols)
        .map(|c| {
            if c >= first_artificial {
                Rational::one()
            } else {
                Rational::zero()
            }
        })
        .collect();
    tab.set_costs(&phase1_cost);
    let unbounded = tab.optimize(first_artificial);
    debug_assert!(unbounded.is_none(), "phase one is bounded below");
    let infeasibility = -tab.d[cols].clone();
    if infeasibility.is_positive() {
        let y1 = tab.duals(&phase1_cost);
        let farkas: Vector = y1.iter().enumerate().map(|(i, y)| -unflip(i, y)).collect();
        return Ok(LpResult::Infeasible {
            farkas: split(farkas),
        });
    }

    // Drive zero-level artificials out of the basis where possible.
    for r in 0..m {
        if tab.basis[r] >= first_artificial {
            if let Some(c) = (0..first_artificial).find(|&c| !tab.t[r][c].is_zero()) {
                tab.pivot(r, c);
            }
        }
    }

    // Phase two, always as a minimization.
    let mut cost = vec![Rational::zero(); cols];
    for (c, col) in columns.iter().enumerate() {
        if let Column::Var { index, negated } = *col {
            let mut v = lp.objective[index].clone();
            if lp.sense == Sense::Maximize {
                v = -v;
            }
            cost[c] = if negated { -v } else { v };
        }
    }
    tab.set_costs(&cost);
    let outcome = tab.optimize(first_artificial);

    let mut point = vec![Rational::zero(); n];
    for (i, &b) in tab.basis.iter().enumerate() {
        if let Column::Var { index, negated } = columns[b] {
            if negated {
                point[index] -= tab.rhs(i);
            } else {
                point[index] += tab.rhs(i);
            }
        }
    }

    if let Some(enter) = outcome {
        let mut ray = vec![Rational::zero(); n];
        let mut add = |c: usize, amount: &Rational| {
            if let Column::Var { index, negated } = columns[c] {
                if negated {
                    ray[index] -= amount;
                } else {
                    ray[index] += amount;
                }
            }
        };
        add(enter, &Rational::one());
        for (i, &b) in tab.basis.iter().enumerate() {
            let a = -tab.t[i][enter].clone();
            add(b, &a);
        }
        return Ok(LpResult::Unbounded { point, ray });
    }

    let y_std = tab.duals(&cost);
    let y: Vector = y_std
        .iter()
        .enumerate()
        .map(|(i, y)| {
            let u = unflip(i, y);
            match lp.sense {
                Sense::Maximize => -u,
                Sense::Minimize => u,
            }
        })
        .collect();
    let value = dot(&lp.objective, &point);
    Ok(LpResult::Optimal {
        point,
        value,
        duals: split(y),
    })
}

/// Strictly positive barycentric weights: `q_j > 0`, `sum q_j = 1`,
/// `sum q_j y_j = x`, or `None` when `x` is not in the relative interior of
/// the hull of `points`.
pub fn strict_barycentric(x: &[Rational], points: &[Vector]) -> Result<Option<Vector>, LpError> {
    if points.is_empty() {
        return Err(LpError::EmptyPoints);
    }
    let d = x.len();
    for (row, p) in points.iter().enumerate() {
        if p.len() != d {
            return Err(LpError::DimensionMismatch {
                row,
                got: p.len(),
                expected: d,
            });
        }
    }
    let m = points.len();
    if m == 1 {
        return Ok((points[0].as_slice() == x).then(|| vec![Rational::one()]));
    }
    // variables: q_1..q_m, t
    let mut objective = vec![Rational::zero(); m + 1];
    objective[m] = Rational::one();
    let mut lp = LinearProgram::new(m + 1, Sense::Maximize).with_objective(objective);
    for j in 0..=m {
        lp.set_nonnegative(j);
    }
    let mut sum = vec![Rational::one(); m + 1];
    sum[m] = Rational::zero();
    lp.add_eq(sum, Rational::one());
    for k in 0..d {
        let mut row: Vector = points.iter().map(|p| p[k].clone()).collect();
        row.push(Rational::zero());
        lp.add_eq(row, x[k].clone());
    }
    for j in 0..m {
        let mut row = vec![Rational::zero(); m + 1];
        row[j] = -Rational::one();
        row[m] = Rational::one();
        lp.add_le(row, Rational::zero());
    }
    match solve_lp(&lp)? {
        LpResult::Optimal { point, value, .. } if value.is_positive() => {
            Ok(Some(point[..m].to_vec()))
        }
        _ => Ok(None),
    }
}

/// Weights on vertices (summing to one) and rays reproducing a point.
#[derive(Debug, Clone, PartialEq)]
pub struct HullDecomposition {
    pub vertex_weights: Vector,
    pub ray_weights: Vector,
}

impl HullDecomposition {
    pub fn reconstruct(&self, vertices: &[Vector], rays: &[Vector], dim: usize) -> Vector {
        let mut out = vec![Rational::zero(); dim];
        for (w, v) in self.vertex_weights.iter().zip(vertices) {
            crate::rational::axpy(&mut out, w, v);
        }
        for (w, r) in self.ray_weights.iter().zip(rays) {
            crate::rational::axpy(&mut out, w, r);
        }
        out
    }
}

/// Expresses `x` as a convex combination of `vertices` plus a nonnegative
/// combination of `rays` (phase-one LP over all generators).
pub fn represent_in_hull(
    x: &[Rational],
    vertices: &[Vector],
    rays: &[Vector],
) -> Result<HullDecomposition, LpError> {
    if vertices.is_empty() {
        return Err(LpError::EmptyPoints);
    }
    let d = x.len();
    for (row, g) in vertices.iter().chain(rays).enumerate() {
        if g.len() != d {
            return Err(LpError::DimensionMismatch {
                row,
                got: g.len(),
                expected: d,
            });
        }
    }
    let nv = vertices.len();
    let n = nv + rays.len();
    let mut lp = LinearProgram::new(n, Sense::Maximize);
    for j in 0..n {
        lp.set_nonnegative(j);
    }
    let mut sum = vec![Rational::one(); nv];
    sum.resize(n, Rational::zero());
    lp.add_eq(sum, Rational::one());
    for k in 0..d {
        let row: Vector = vertices.iter().chain(rays).map(|g| g[k].clone()).collect();
        lp.add_eq(row, x[k].clone());
    }
    match solve_lp(&lp)? {
        LpResult::Optimal { point, .. } => Ok(HullDecomposition {
            vertex_weights: point[..nv].to_vec(),
            ray_weights: point[nv..].to_vec(),
        }),
        LpResult::Infeasible { farkas } => Err(LpError::NotInHull { farkas }),
        LpResult::Unbounded { .. } => unreachable!("zero objective"),
    }
}
