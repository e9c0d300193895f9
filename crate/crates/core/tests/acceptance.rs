//! Acceptance criteria, one line each. Runs without the libtest harness so
//! the lines show up in plain `cargo test` output; exits nonzero if any
//! criterion fails.

mod common;

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use martingale_selection::finance::{
    arbitrage_oracle, check_na_single, consistent_price_system, ArbitrageVerdict, ConeModel,
    PriceProcess,
};
use martingale_selection::generate::{generate, Profile, Sampler};
use martingale_selection::lp::represent_in_hull;
use martingale_selection::polyhedra::{
    canonicalize, contains, conv_union, dual_cone, h_to_v, ri_intersection_closure, ri_point,
    v_to_h, FGSet, Membership,
};
use martingale_selection::rational::{axpy, dot, ratio, scale, zeros, Rational, Vector};
use martingale_selection::solver::{
    assemble_measure, backward_pass, one_step_decompose, solve, verify_solution, Verdict,
};
use martingale_selection::tree::{parse_instance, Instance};
use num_traits::{One, Signed, Zero};

const SOUNDNESS_INSTANCES: usize = 200;
const SOUNDNESS_BUDGET: Duration = Duration::from_secs(300);
const PLANTED_INSTANCES: u64 = 100;
const UNSOLVABLE_INSTANCES: usize = 50;
const SELECTORS_PER_INSTANCE: usize = 1000;
const SINGLE_VALUED_INSTANCES: u64 = 500;
const ROUND_TRIP_SETS: u64 = 500;
const RI_PAIRS: u64 = 200;
const DUAL_CONES: u64 = 100;
const FAMILIES: u64 = 100;
const CONE_MODELS: usize = 50;
const MAX_DIM: usize = 4;
const MAX_HORIZON: usize = 4;
const MAX_BRANCHING: usize = 3;
/// Exact arithmetic throughout: every comparison below is equality of
/// rationals, and every allowed failure count is zero.
const ALLOWED_FAILURES: usize = 0;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn within_bounds(inst: &Instance) -> bool {
    let t = &inst.tree;
    inst.dim <= MAX_DIM
        && t.horizon() <= MAX_HORIZON
        && (0..t.len()).all(|u| t.children(u).len() <= MAX_BRANCHING)
}

fn soundness() -> Outcome {
    let start = Instant::now();
    let mut verified = 0;
    let mut failures = 0;
    let mut out_of_bounds = 0;
    let mut seed = 0u64;
    while verified + failures < SOUNDNESS_INSTANCES {
        let profile = if seed.is_multiple_of(2) {
            Profile::Adversarial
        } else {
            Profile::SolvableBiased
        };
        let inst = generate(seed / 2, profile).instance().unwrap();
        seed += 1;
        if !within_bounds(&inst) {
            out_of_bounds += 1;
        }
        let (state, sol) = solve(&inst, true).unwrap();
        if !state.verdict.is_solvable() {
            continue;
        }
        let ok = sol.is_some_and(|sol| {
            let m = assemble_measure(&inst, &sol);
            verify_solution(&inst, &sol).unwrap().is_empty()
                && m.total_mass_is_one
                && m.expected_density_is_one
                && m.all_positive
        });
        if ok {
            verified += 1;
        } else {
            failures += 1;
        }
    }
    let elapsed = start.elapsed();
    outcome(
        failures == ALLOWED_FAILURES && out_of_bounds == 0 && elapsed < SOUNDNESS_BUDGET,
        format!(
            "{verified}/{SOUNDNESS_INSTANCES} solvable instances verified exactly, \
             {failures} failures, {out_of_bounds} out of bounds, {:.1}s (budget {}s)",
            elapsed.as_secs_f64(),
            SOUNDNESS_BUDGET.as_secs()
        ),
    )
}

fn witness_completeness() -> Outcome {
    let missed: Vec<u64> = (0..PLANTED_INSTANCES)
        .filter(|&seed| {
            let inst = generate(seed, Profile::SolvableBiased).instance().unwrap();
            !backward_pass(&inst).unwrap().verdict.is_solvable()
        })
        .collect();
    outcome(
        missed.len() == ALLOWED_FAILURES,
        format!(
            "{}/{PLANTED_INSTANCES} planted instances solvable; missed seeds {missed:?}",
            PLANTED_INSTANCES as usize - missed.len()
        ),
    )
}

fn unsolvable_cross_check() -> Outcome {
    let mut checked = 0;
    let mut admissible = 0;
    let mut seed = 0u64;
    while checked < UNSOLVABLE_INSTANCES {
        let inst = generate(seed, Profile::Adversarial).instance().unwrap();
        seed += 1;
        if backward_pass(&inst).unwrap().verdict.is_solvable() {
            continue;
        }
        checked += 1;
        admissible += common::random_selector_search(&inst, SELECTORS_PER_INSTANCE, seed);
    }
    outcome(
        admissible == ALLOWED_FAILURES,
        format!(
            "{checked} unsolvable instances x {SELECTORS_PER_INSTANCE} random selectors: \
             {admissible} admissible found"
        ),
    )
}

fn dmw_agreement() -> Outcome {
    let mut disagreements = Vec::new();
    let mut no_arbitrage = 0;
    for seed in 0..SINGLE_VALUED_INSTANCES {
        let p = PriceProcess::from_document(&generate(seed, Profile::SingleValued)).unwrap();
        let na = check_na_single(&p).unwrap();
        let oracle = arbitrage_oracle(&p).unwrap();
        let selector_ok = na.solution.as_ref().is_none_or(|sol| {
            sol.x == p.values && verify_solution(&na.instance, sol).unwrap().is_empty()
        });
        if na.no_arbitrage() != (oracle == ArbitrageVerdict::NoArbitrage) || !selector_ok {
            disagreements.push(seed);
        }
        if na.no_arbitrage() {
            no_arbitrage += 1;
        }
    }
    outcome(
        disagreements.len() == ALLOWED_FAILURES,
        format!(
            "{SINGLE_VALUED_INSTANCES} price processes ({no_arbitrage} arbitrage-free): \
             {} disagreements {disagreements:?}",
            disagreements.len()
        ),
    )
}

fn geometry_kernel() -> Outcome {
    let mut round_trip_bad = 0;
    for seed in 0..ROUND_TRIP_SETS {
        let mut s = Sampler::new(seed);
        let dim = s.range(1, MAX_DIM as i64) as usize;
        let set = s.fg_set(dim);
        let canon = canonicalize(&set);
        let back = h_to_v(&v_to_h(&set).unwrap());
        if back != canon || common::same_set_and_minimal(&set, &back).is_err() {
            round_trip_bad += 1;
        }
    }
    let mut ri_bad = 0;
    for seed in 0..RI_PAIRS {
        let mut s = Sampler::new(10_000 + seed);
        let dim = s.range(1, 3) as usize;
        let a = s.fg_set(dim);
        let b = if s.chance(0.5) {
            let p = s.interior_point(&a);
            s.set_around(&p)
        } else {
            s.fg_set(dim)
        };
        let got = ri_intersection_closure(&a, &b).unwrap().is_some();
        if got != common::ri_meet_by_slack(&a, &b) {
            ri_bad += 1;
        }
    }
    let mut dual_bad = 0;
    for seed in 0..DUAL_CONES {
        let mut s = Sampler::new(20_000 + seed);
        let dim = s.range(1, MAX_DIM as i64) as usize;
        let k = s.cone(dim);
        if dual_cone(&dual_cone(&k).unwrap()).unwrap() != canonicalize(&k) {
            dual_bad += 1;
        }
    }
    outcome(
        round_trip_bad + ri_bad + dual_bad == ALLOWED_FAILURES,
        format!(
            "V->H->V mismatches {round_trip_bad}/{ROUND_TRIP_SETS} (LP-checked), \
             ri-intersection vs slack LP {ri_bad}/{RI_PAIRS}, dual involution {dual_bad}/{DUAL_CONES}"
        ),
    )
}

fn hand_derived_fixtures() -> Outcome {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    let read = |name: &str| std::fs::read_to_string(dir.join(name)).unwrap();
    let inst = parse_instance(&read("binomial_solvable.json")).unwrap();
    let (state, sol) = solve(&inst, true).unwrap();
    let sol = sol.expect("solvable fixture");
    let t = &inst.tree;
    let (u, d) = (t.index_of("u").unwrap(), t.index_of("d").unwrap());
    let m = assemble_measure(&inst, &sol);
    let leaf = |i: usize| {
        m.leaf_measure
            .iter()
            .find(|(l, _)| *l == i)
            .unwrap()
            .1
            .clone()
    };
    let expected_density: Rational = t.leaves().map(|l| t.path_prob(l) * &m.density[l]).sum();
    let solvable_ok = state.verdict.is_solvable()
        && sol.q[u] == ratio(1, 3)
        && sol.q[d] == ratio(2, 3)
        && leaf(u) == ratio(1, 3)
        && leaf(d) == ratio(2, 3)
        && m.density[u] == ratio(2, 3)
        && m.density[d] == ratio(4, 3)
        && expected_density.is_one();

    let bad = parse_instance(&read("binomial_unsolvable.json")).unwrap();
    let verdict = backward_pass(&bad).unwrap().verdict;
    let unsolvable_ok = verdict
        == Verdict::Unsolvable {
            time: 0,
            node: "r".into(),
        };
    outcome(
        solvable_ok && unsolvable_ok,
        format!(
            "binomial: q=(1/3,2/3) Q=(1/3,2/3) z=(2/3,4/3) E_P[z]=1 {}; {{2}},{{3}} fixture {:?}",
            if solvable_ok { "ok" } else { "MISMATCH" },
            verdict
        ),
    )
}

fn inclusion_property() -> Outcome {
    let mut bad = Vec::new();
    for seed in 0..FAMILIES {
        let mut s = Sampler::new(30_000 + seed);
        let dim = s.range(1, 3) as usize;
        let k = s.range(1, 4) as usize;
        let sets: Vec<FGSet> = (0..k).map(|_| s.fg_set(dim)).collect();
        let tags: Vec<usize> = (0..k).collect();
        let hull = conv_union(&sets, &tags).unwrap();
        let x = ri_point(&hull.set).unwrap();
        let children: Vec<(usize, &FGSet)> = sets.iter().enumerate().collect();
        let parts = one_step_decompose(&x, &children, &hull).unwrap();
        let mut total = Rational::zero();
        let mut mean = zeros(dim);
        let mut ok = true;
        for ((q, xj), set) in parts.iter().zip(&sets) {
            ok &= q.is_positive() && contains(set, xj, Membership::RelativeInterior).unwrap();
            total += q;
            axpy(&mut mean, q, xj);
        }
        if !(ok && total.is_one() && mean == x) {
            bad.push(seed);
        }
    }
    outcome(
        bad.len() == ALLOWED_FAILURES,
        format!(
            "{FAMILIES} families: hull ri point split with positive weights and member ri points; \
             failures {bad:?}"
        ),
    )
}

/// `y ∈ ri K*` for `K = cone(R)`: `y . r ≥ 0` for all generators, with
/// equality exactly on generators lying in the lineality space of `K`.
fn in_ri_dual(y: &[Rational], rays: &[Vector]) -> bool {
    let origin = zeros(y.len());
    rays.iter().all(|r| {
        let v = dot(y, r);
        let neg: Vector = r.iter().map(|c| -c).collect();
        let in_lineality = represent_in_hull(&neg, std::slice::from_ref(&origin), rays).is_ok();
        if in_lineality {
            v.is_zero()
        } else {
            v.is_positive()
        }
    })
}

fn rescaled(m: &ConeModel, s: &mut Sampler) -> ConeModel {
    let cones = m
        .cones
        .iter()
        .map(|k| {
            let rays = k
                .rays()
                .iter()
                .map(|r| scale(r, &ratio(s.range(1, 9), s.range(1, 9))))
                .collect();
            FGSet::cone(m.dim, rays).unwrap()
        })
        .collect();
    ConeModel::new(m.tree.clone(), m.dim, cones).unwrap()
}

fn cone_application() -> Outcome {
    let mut solvable = 0;
    let mut membership_bad = 0;
    let mut scale_bad = 0;
    let mut seed = 0u64;
    while solvable < CONE_MODELS {
        let m = ConeModel::from_document(&generate(seed, Profile::Cones)).unwrap();
        let mut s = Sampler::new(40_000 + seed);
        seed += 1;
        let out = consistent_price_system(&m).unwrap();
        let again = consistent_price_system(&rescaled(&m, &mut s)).unwrap();
        if again.verdict != out.verdict {
            scale_bad += 1;
        }
        let Some(sol) = out.solution else { continue };
        solvable += 1;
        let members = (0..m.tree.len()).all(|u| in_ri_dual(&sol.x[u], m.cones[u].rays()));
        if !members || !verify_solution(&out.instance, &sol).unwrap().is_empty() {
            membership_bad += 1;
        }
    }
    outcome(
        membership_bad + scale_bad == ALLOWED_FAILURES,
        format!(
            "{solvable} solvable cone models ({seed} drawn): ri K* / martingale failures \
             {membership_bad}, verdict changes under rescaling {scale_bad}"
        ),
    )
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let bin = env!("CARGO_BIN_EXE_msp");
    let run = |args: &[&str]| Command::new(bin).args(args).output().unwrap();
    let mut inputs: Vec<(&str, String)> = Vec::new();
    for (cmd, profile, seed) in [
        ("solve", "adversarial", 3u64),
        ("solve", "adversarial", 11),
        ("solve", "solvable-biased", 5),
        ("na-check", "single-valued", 2),
        ("cps", "cones", 4),
    ] {
        let a = run(&["gen", "--seed", &seed.to_string(), "--profile", profile]);
        let b = run(&["gen", "--seed", &seed.to_string(), "--profile", profile]);
        if a.stdout != b.stdout || a.stdout.is_empty() {
            return outcome(false, format!("gen {profile} seed {seed} not reproducible"));
        }
        let path = dir.path().join(format!("{profile}-{seed}.json"));
        std::fs::write(&path, &a.stdout).unwrap();
        inputs.push((cmd, path.to_string_lossy().into_owned()));
    }
    let mut runs = 0;
    for (cmd, path) in &inputs {
        let reference = run(&[cmd, path]);
        for threads in ["1", "2", "4", "1"] {
            let other = run(&[cmd, "--threads", threads, path]);
            runs += 1;
            if other.stdout != reference.stdout || other.status.code() != reference.status.code() {
                return outcome(
                    false,
                    format!("{cmd} {path} differs at --threads {threads}"),
                );
            }
        }
    }
    outcome(
        true,
        format!(
            "{} inputs, {runs} reruns across --threads 1/2/4: byte-identical",
            inputs.len()
        ),
    )
}

type Check = fn() -> Outcome;

fn main() {
    let criteria: [(&str, Check); 9] = [
        ("soundness", soundness),
        ("witness completeness", witness_completeness),
        ("unsolvable cross-check", unsolvable_cross_check),
        ("no-arbitrage agreement", dmw_agreement),
        ("geometry kernel", geometry_kernel),
        ("hand-derived fixtures", hand_derived_fixtures),
        ("inclusion property", inclusion_property),
        ("cone application", cone_application),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = check();
        println!(
            "criterion {} [{name}]: {} - {} ({:.1}s)",
            i + 1,
            if o.pass { "PASS" } else { "FAIL" },
            o.detail,
            start.elapsed().as_secs_f64()
        );
        if !o.pass {
            failed += 1;
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
