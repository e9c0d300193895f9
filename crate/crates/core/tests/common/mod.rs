//! Independent oracles shared by the integration tests. None of them uses the
//! double description code.
#![allow(dead_code)]

use martingale_selection::generate::Sampler;
use martingale_selection::linalg;
use martingale_selection::lp::{self, LinearProgram, LpResult, Sense};
use martingale_selection::polyhedra::FGSet;
use martingale_selection::rational::{dot, zeros, Rational, Vector};
use martingale_selection::tree::Instance;
use num_traits::{One, Signed, Zero};

/// `x ∈ conv(vertices) + cone(rays)`, by LP.
pub fn in_hull(x: &[Rational], vertices: &[Vector], rays: &[Vector]) -> bool {
    lp::represent_in_hull(x, vertices, rays).is_ok()
}

/// Checks that `canon` generates the same closed set as `raw` and that no
/// canonical generator is redundant.
pub fn same_set_and_minimal(raw: &FGSet, canon: &FGSet) -> Result<(), String> {
    for v in raw.vertices() {
        if !in_hull(v, canon.vertices(), canon.rays()) {
            return Err(format!("raw vertex {v:?} lost"));
        }
    }
    let origin = zeros(raw.dim());
    for r in raw.rays() {
        if !in_hull(r, std::slice::from_ref(&origin), canon.rays()) {
            return Err(format!("raw ray {r:?} lost"));
        }
    }
    for v in canon.vertices() {
        if !in_hull(v, raw.vertices(), raw.rays()) {
            return Err(format!("canonical vertex {v:?} outside the input"));
        }
    }
    for r in canon.rays() {
        if !in_hull(r, std::slice::from_ref(&origin), raw.rays()) {
            return Err(format!("canonical ray {r:?} outside the input"));
        }
    }
    for (i, v) in canon.vertices().iter().enumerate() {
        let others: Vec<Vector> = without(canon.vertices(), i);
        if !others.is_empty() && in_hull(v, &others, canon.rays()) {
            return Err(format!("canonical vertex {v:?} is redundant"));
        }
    }
    for (i, r) in canon.rays().iter().enumerate() {
        let others = without(canon.rays(), i);
        if !others.is_empty() && in_hull(r, std::slice::from_ref(&origin), &others) {
            let neg: Vector = r.iter().map(|x| -x).collect();
            // a line is listed as both directions; each is needed
            if !canon.rays().contains(&neg) {
                return Err(format!("canonical ray {r:?} is redundant"));
            }
        }
    }
    Ok(())
}

fn without(v: &[Vector], i: usize) -> Vec<Vector> {
    v.iter()
        .enumerate()
        .filter(|&(j, _)| j != i)
        .map(|(_, x)| x.clone())
        .collect()
}

/// `ri P ∩ ri Q ≠ ∅` via strictly positive generator weights: maximize the
/// smallest weight `s` (capped at 1) over both generator lists.
pub fn ri_meet_by_slack(p: &FGSet, q: &FGSet) -> bool {
    let d = p.dim();
    let (pv, pr) = (p.vertices().len(), p.rays().len());
    let (qv, qr) = (q.vertices().len(), q.rays().len());
    let n = d + pv + pr + qv + qr + 1;
    let s = n - 1;
    let mut objective = zeros(n);
    objective[s] = Rational::one();
    let mut prog = LinearProgram::new(n, Sense::Maximize).with_objective(objective);
    let mut offset = d;
    for set in [p, q] {
        let (nv, nr) = (set.vertices().len(), set.rays().len());
        for k in 0..d {
            let mut row = zeros(n);
            row[k] = -Rational::one();
            for (j, v) in set.vertices().iter().enumerate() {
                row[offset + j] = v[k].clone();
            }
            for (j, r) in set.rays().iter().enumerate() {
                row[offset + nv + j] = r[k].clone();
            }
            prog.add_eq(row, Rational::zero());
        }
        let mut sum = zeros(n);
        for j in 0..nv {
            sum[offset + j] = Rational::one();
        }
        prog.add_eq(sum, Rational::one());
        for j in 0..nv + nr {
            let mut row = zeros(n);
            row[offset + j] = Rational::one();
            row[s] = -Rational::one();
            prog.add_ge(row, Rational::zero());
        }
        offset += nv + nr;
    }
    let mut cap = zeros(n);
    cap[s] = Rational::one();
    prog.add_le(cap, Rational::one());
    match lp::solve_lp(&prog).expect("well-formed LP") {
        LpResult::Optimal { value, .. } => value.is_positive(),
        LpResult::Infeasible { .. } => false,
        LpResult::Unbounded { .. } => unreachable!("capped objective"),
    }
}

/// Optimal value of a bounded LP by enumerating basic solutions (any `n`
/// independent constraint rows, checked for feasibility afterwards); `None` when
/// infeasible. All variables must be nonnegative and the feasible set
/// bounded.
pub fn brute_force_max(prog: &LinearProgram) -> Option<Rational> {
    let n = prog.num_vars();
    let mut rows: Vec<(Vector, Rational)> = prog.ineq_rows.clone();
    for i in 0..n {
        let mut row = zeros(n);
        row[i] = -Rational::one();
        rows.push((row, Rational::zero()));
    }
    // equalities compete with the other rows for a basis, so a dependent or
    // all-zero equality cannot hide every vertex
    rows.extend(prog.eq_rows.iter().cloned());
    let mut best: Option<Rational> = None;
    for subset in combinations(rows.len(), n) {
        let system: Vec<(Vector, Rational)> = subset.iter().map(|&i| rows[i].clone()).collect();
        let m: Vec<Vector> = system.iter().map(|(a, _)| a.clone()).collect();
        let Some(inv) = linalg::inverse(&m) else {
            continue;
        };
        let x: Vector = inv
            .iter()
            .map(|row| {
                row.iter()
                    .zip(&system)
                    .map(|(c, (_, b))| c * b)
                    .sum::<Rational>()
            })
            .collect();
        if !prog.is_feasible_point(&x) {
            continue;
        }
        let v = dot(&prog.objective, &x);
        if best.as_ref().is_none_or(|b| &v > b) {
            best = Some(v);
        }
    }
    best
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Draws selectors with random strictly positive generator weights and
/// accepts one when every internal node's value is a strictly positive
/// combination of its children's values. Returns the number of admissible
/// selectors found.
pub fn random_selector_search(inst: &Instance, tries: usize, seed: u64) -> usize {
    let tree = &inst.tree;
    let mut s = Sampler::new(seed);
    let mut found = 0;
    for _ in 0..tries {
        let x: Vec<Vector> = inst.sets.iter().map(|g| s.interior_point(g)).collect();
        let ok = (0..tree.len()).filter(|&u| !tree.is_leaf(u)).all(|u| {
            let kids: Vec<Vector> = tree.children(u).iter().map(|&c| x[c].clone()).collect();
            matches!(lp::strict_barycentric(&x[u], &kids), Ok(Some(_)))
        });
        if ok {
            found += 1;
        }
    }
    found
}

/// Minkowski sum `G + B`; with `0 ∈ ri B` this satisfies `ri G ⊆ ri (G + B)`.
pub fn minkowski(g: &FGSet, b: &FGSet) -> FGSet {
    let mut vertices = Vec::new();
    for v in g.vertices() {
        for w in b.vertices() {
            vertices.push(v.iter().zip(w).map(|(a, c)| a + c).collect());
        }
    }
    let rays = g.rays().iter().chain(b.rays()).cloned().collect();
    FGSet::new(g.dim(), vertices, rays).expect("sum of valid sets")
}
