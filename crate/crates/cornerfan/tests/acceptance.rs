//! One PASS/FAIL line per acceptance criterion. Run with `cargo test --test acceptance`.

mod common;

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use cornerfan::binomial::{normal_form, universal_resolution, BinomialSystem};
use cornerfan::complex::{extend_refinement, natural_smooth_refinement, ns_from_locals, star_subdivide_complex, ComplexRefinement, MonoidalComplex};
use cornerfan::exact::{ivec, IntMat, IntVec};
use cornerfan::fiber::{brute_force_smooth, fiber_complex, random_simple_bmap, FiberProblem};
use cornerfan::manifold::{chart_exponents, compose, is_compatible, lift_bmap, ordinary_blowup, BMap, Blowup, CornerComplex};
use cornerfan::monoid::ToricMonoid;
use cornerfan::refinement::sample_cover;
use cornerfan::verify::{verify_transitions, SamplePlan};
use num_bigint::BigInt;
use num_traits::Signed;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 20;
const HILBERT_TIME: Duration = Duration::from_secs(1);
const NS_SUITE: usize = 50;
const NS_TIME: Duration = Duration::from_secs(60);
const COVER_POINTS: usize = 1000;
const LIFT_PAIRS: usize = 100;
const JOYCE_INSTANCES: usize = 50;
const ATLAS_TOLERANCE: f64 = 1e-9;
const ATLAS_SAMPLES: usize = 100;
const ATLAS_TIME: Duration = Duration::from_secs(10);
const EXTENSION_TRIPLES: usize = 25;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(failures: Vec<String>, ok: String) -> Outcome {
    match failures.first() {
        None => Outcome { passed: true, detail: ok },
        Some(f) => Outcome { passed: false, detail: format!("{} failure(s), first: {f}", failures.len()) },
    }
}

/// Irreducible points of the monoid `{v ∈ [0,b]^d : member(v)}`.
fn box_points(d: usize, b: i64, member: &dyn Fn(&[i64]) -> bool) -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    let mut v = vec![0i64; d];
    loop {
        if v.iter().any(|&x| x != 0) && member(&v) {
            out.push(v.clone());
        }
        let Some(i) = (0..d).find(|&i| v[i] < b) else { break };
        v[i] += 1;
        v[..i].iter_mut().for_each(|x| *x = 0);
    }
    out
}

fn box_irreducibles(pts: &[Vec<i64>], member: &dyn Fn(&[i64]) -> bool) -> Vec<Vec<i64>> {
    pts.iter()
        .filter(|p| {
            !pts.iter().any(|x| {
                let y: Vec<i64> = p.iter().zip(x).map(|(a, b)| a - b).collect();
                x != *p && y.iter().any(|&c| c != 0) && y.iter().all(|&c| c >= 0) && member(&y)
            })
        })
        .cloned()
        .collect()
}

fn parallel(a: &[i64], b: &[i64]) -> bool {
    (0..a.len()).all(|i| (0..a.len()).all(|j| a[i] * b[j] == a[j] * b[i]))
}

/// Irreducibles `p` such that no `kp` with `k ≤ 3` splits as a sum of two
/// points off the ray of `p`.
fn box_extremals(pts: &[Vec<i64>], member: &dyn Fn(&[i64]) -> bool) -> Vec<Vec<i64>> {
    box_irreducibles(pts, member)
        .into_iter()
        .filter(|p| {
            !(1..=3).any(|k| {
                pts.iter().any(|x| {
                    let y: Vec<i64> = p.iter().zip(x).map(|(a, b)| k * a - b).collect();
                    y.iter().all(|&c| c >= 0) && y.iter().any(|&c| c != 0) && member(&y) && !parallel(x, p) && !parallel(&y, p)
                })
            })
        })
        .collect()
}

fn to_i64(v: &[IntVec]) -> Vec<Vec<i64>> {
    let mut out: Vec<Vec<i64>> = v.iter().map(|r| r.iter().map(|x| x.try_into().unwrap()).collect()).collect();
    out.sort();
    out
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let m = ToricMonoid::from_generators(2, &[ivec(&[2, 0]), ivec(&[1, 1]), ivec(&[0, 2])]).unwrap();
    let hb = to_i64(m.hilbert_basis());
    let ext = to_i64(m.extremals());
    let smooth = m.is_smooth();
    let elapsed = start.elapsed();
    // the monoid is {(a,b) ≥ 0 : a + b even}; the box is the zonotope of the generators
    let member = |v: &[i64]| v.iter().all(|&x| x >= 0) && (v[0] + v[1]) % 2 == 0;
    let mut oracle = box_irreducibles(&box_points(2, 3, &member), &member);
    oracle.sort();
    let mut f = Vec::new();
    if ext != vec![vec![0, 2], vec![2, 0]] {
        f.push(format!("extremals {ext:?}"));
    }
    if smooth {
        f.push("reported smooth".into());
    }
    if hb.len() != 3 || hb != oracle {
        f.push(format!("hilbert basis {hb:?}, oracle {oracle:?}"));
    }
    if elapsed > HILBERT_TIME {
        f.push(format!("took {elapsed:?}"));
    }
    outcome(f, format!("hilbert basis {hb:?} matches the box oracle, not smooth, {elapsed:.2?}"))
}

fn criterion_2() -> Outcome {
    let b = ordinary_blowup(&CornerComplex::model(2, 0), "x1&x2").unwrap();
    let atlas = b.atlas_at("x1&x2").unwrap();
    let mut nus: Vec<IntMat> = atlas.charts.iter().map(|c| c.nu.clone()).collect();
    nus.sort();
    // identity with its i-th row replaced by ones
    let mut want: Vec<IntMat> = (0..2)
        .map(|i| {
            let mut m = IntMat::identity(2);
            for j in 0..2 {
                m.set(i, j, BigInt::from(1));
            }
            m
        })
        .collect();
    want.sort();
    let mut f = Vec::new();
    if nus != want {
        f.push(format!("chart matrices {nus:?}"));
    }
    let hyps = b.space.hypersurfaces();
    if hyps.len() != 3 {
        f.push(format!("{} hypersurfaces", hyps.len()));
    }
    let rows = to_i64(b.blowdown.alpha.row_vecs());
    if rows != vec![vec![0, 1], vec![1, 0], vec![1, 1]] {
        f.push(format!("blow-down exponents {rows:?}"));
    }
    let star = star_subdivide_complex(&b.refinement.target().clone(), "x1&x2", &ivec(&[1, 1])).unwrap();
    if star != b.refinement {
        f.push("refinement is not the star subdivision".into());
    }
    if let Err(e) = atlas.check_exact() {
        f.push(e);
    }
    outcome(f, "star subdivision at (1,1), charts [[1,1],[0,1]] and [[1,0],[1,1]], 3 hypersurfaces, front face exponents (1,1)".into())
}

struct Suite {
    complexes: Vec<(String, MonoidalComplex)>,
    refinements: Vec<(String, ComplexRefinement)>,
}

fn criterion_3(suite: &mut Suite) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let start = Instant::now();
    let mut f = Vec::new();
    let mut checked_sub = 0;
    let mut nontrivial = 0;
    for i in 0..NS_SUITE {
        let (label, q) = common::random_complex(&mut rng);
        let (r, _) = match natural_smooth_refinement(&q) {
            Ok(x) => x,
            Err(e) => {
                f.push(format!("#{i} {label}: {e}"));
                continue;
            }
        };
        if !r.is_smooth() {
            f.push(format!("#{i} {label}: not smooth"));
        }
        if !r.validate().passed() {
            f.push(format!("#{i} {label}: {:?}", r.validate()));
        }
        if !r.is_trivial() {
            nontrivial += 1;
        }
        match natural_smooth_refinement(r.source()) {
            Ok((again, _)) if again.is_trivial() => {}
            _ => f.push(format!("#{i} {label}: ns is not idempotent")),
        }
        if let Some(sub) = common::random_subcomplex(&mut rng, &q) {
            checked_sub += 1;
            let (r0, _) = natural_smooth_refinement(&q.restrict(&sub).unwrap()).unwrap();
            if r.restrict(&sub).ok() != Some(r0) {
                f.push(format!("#{i} {label}: ns(Q)₀ ≠ ns(Q₀) on {sub:?}"));
            }
        }
        suite.refinements.push((format!("ns #{i} {label}"), r));
        suite.complexes.push((label, q));
    }
    let elapsed = start.elapsed();
    if elapsed > NS_TIME {
        f.push(format!("took {elapsed:?}"));
    }
    outcome(
        f,
        format!("{NS_SUITE} complexes ({nontrivial} needing subdivision): smooth, valid, idempotent; {checked_sub} subcomplexes compatible; {elapsed:.2?}"),
    )
}

fn criterion_4(suite: &Suite) -> Outcome {
    let start = Instant::now();
    let mut f = Vec::new();
    let mut locals = 0;
    for (label, r) in &suite.refinements {
        for (a, l) in &r.locals {
            if l.base().dim() == 0 {
                continue;
            }
            locals += 1;
            let rep = sample_cover(l, COVER_POINTS, SEED + locals as u64);
            if rep.violations() > 0 {
                f.push(format!("{label} at {a}: {} uncovered, {} overlaps", rep.uncovered.len(), rep.overlaps.len()));
            }
        }
    }
    outcome(f, format!("{} refinements, {locals} local refinements, {COVER_POINTS} points each, 0 violations, {:.2?}", suite.refinements.len(), start.elapsed()))
}

fn deepest(x: &CornerComplex) -> String {
    x.deepest().remove(0)
}

fn criterion_5(blowups: &mut Vec<(String, Blowup)>) -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 5);
    let mut f = Vec::new();
    let (mut pairs, mut tried) = (0, 0);
    while pairs < LIFT_PAIRS {
        tried += 1;
        let n = rng.gen_range(2..=3);
        let k = rng.gen_range(1..=3);
        let (label, b) = common::random_blowup(&mut rng, n);
        let delta = common::random_exponents(&mut rng, k, n);
        let fm = BMap::between_models(k, n, delta.clone()).unwrap();
        let compat = is_compatible(&fm, &b.refinement).unwrap();
        let Ok(lift) = lift_bmap(&fm, &b, &compat) else { continue };
        pairs += 1;
        let name = format!("{label}, δ = {:?}", to_i64(delta.row_vecs()));
        // exponents in the charts of the target corner
        let atlas = b.atlas_at(&deepest(&b.blowdown.target)).unwrap();
        let charts = chart_exponents(&delta, &atlas);
        if charts.is_empty() {
            f.push(format!("{name}: no chart takes the corner"));
        }
        for (i, mu) in &charts {
            if mu.mul(&atlas.charts[*i].nu) != delta {
                f.push(format!("{name}: δ ≠ μν in chart {i}"));
            }
        }
        if compose(&b.blowdown, &lift.map).as_ref() != Ok(&fm) {
            f.push(format!("{name}: β∘f′ ≠ f"));
        }
        let j = rng.gen_range(1..=2);
        let g = BMap::between_models(j, k, common::random_exponents(&mut rng, j, k)).unwrap();
        let fg = compose(&fm, &g).unwrap();
        let lifted = is_compatible(&fg, &b.refinement).and_then(|c| lift_bmap(&fg, &b, &c));
        match lifted {
            Ok(l) if Ok(&l.map) == compose(&lift.map, &g).as_ref() => {}
            _ => f.push(format!("{name}: (f∘g)′ ≠ f′∘g")),
        }
        blowups.push((label, b));
    }
    outcome(f, format!("{LIFT_PAIRS} compatible pairs (of {tried} drawn): δ = μν, β∘f′ = f and (f∘g)′ = f′∘g exact, {:.2?}", start.elapsed()))
}

fn criterion_6() -> Outcome {
    let mut f = Vec::new();
    let add = BMap::between_models(2, 1, IntMat::from_i64(&[&[1], &[1]])).unwrap();
    let p = FiberProblem::new(add.clone(), add).unwrap();
    let m = fiber_complex(&p).complex.monoid("(x1&x2,x1&x2)").clone();
    let got = to_i64(m.extremals());
    // s₁s₂ = t₁t₂ on the corners: a₁ + a₂ = b₁ + b₂
    let member = |v: &[i64]| v.iter().all(|&x| x >= 0) && v[0] + v[1] == v[2] + v[3];
    let mut oracle = box_extremals(&box_points(4, 3, &member), &member);
    oracle.sort();
    let listed = vec![vec![0, 1, 0, 1], vec![0, 1, 1, 0], vec![1, 0, 0, 1], vec![1, 0, 1, 0]];
    if got != listed || oracle != listed {
        f.push(format!("extremals {got:?}, oracle {oracle:?}"));
    }
    if m.is_simplicial() {
        f.push("addition fiber monoid reported simplicial".into());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 6);
    let mut monoids = 0;
    for i in 0..JOYCE_INSTANCES {
        let n = rng.gen_range(1..=4);
        let (k1, k2) = (rng.gen_range(0..=3), rng.gen_range(0..=3));
        let p = FiberProblem::new(random_simple_bmap(&mut rng, k1, n), random_simple_bmap(&mut rng, k2, n)).unwrap();
        for (id, m) in fiber_complex(&p).complex.monoids() {
            monoids += 1;
            if !m.is_smooth() || !brute_force_smooth(m) {
                f.push(format!("instance {i}: {id} not smooth"));
            }
        }
    }
    outcome(f, format!("addition pattern: 4 extremals agree with the box oracle, not simplicial; {JOYCE_INSTANCES} simple b-map pairs give {monoids} smooth fiber monoids"))
}

fn single_signed(v: &[BigInt]) -> bool {
    v.iter().all(|x| !x.is_negative()) || v.iter().all(|x| !x.is_positive())
}

fn criterion_7() -> Outcome {
    let mut f = Vec::new();
    let mut charts = 0;
    let systems: [(&str, BinomialSystem); 2] = [
        ("diagonal", normal_form(2, 0, &[(ivec(&[1, 0]), ivec(&[0, 1]))], 0).unwrap()),
        ("cusp", normal_form(2, 0, &[(ivec(&[2, 0]), ivec(&[0, 3]))], 0).unwrap()),
    ];
    for (name, b) in &systems {
        let r = match universal_resolution(b) {
            Ok(r) => r,
            Err(e) => {
                f.push(format!("{name}: {e}"));
                continue;
            }
        };
        if !r.r_x.is_smooth() || !r.r_x.validate().passed() {
            f.push(format!("{name}: R_X is not a smooth refinement"));
        }
        if r.indefinite_total() != 0 {
            f.push(format!("{name}: {} indefinite", r.indefinite_total()));
        }
        for c in &r.charts {
            charts += 1;
            for g in &b.gammas {
                let t = c.nu.apply(g);
                if !single_signed(&t) {
                    f.push(format!("{name}: chart {} gives {t:?}", c.chart));
                }
            }
        }
        if *name == "cusp" {
            let rays: Vec<IntVec> =
                r.r_x.source().monoids().values().filter(|m| m.dim() == 1).map(|m| m.extremals()[0].clone()).collect();
            if !rays.contains(&ivec(&[3, 2])) {
                f.push(format!("cusp: rays {rays:?} miss (3,2)"));
            }
            if !r.lifted.iter().any(|x| r.r_x.source().monoid(x).extremals() == [ivec(&[3, 2])]) {
                f.push("cusp: the lifted variety does not meet the ray (3,2)".into());
            }
        }
    }
    outcome(f, format!("diagonal and cusp resolve, {charts} charts, 0 indefinite exponents, ray (3,2) in the cusp resolution"))
}

fn criterion_8(blowups: &[(String, Blowup)]) -> Outcome {
    let start = Instant::now();
    let mut f = Vec::new();
    let (mut atlases, mut overlaps, mut worst) = (0, 0, 0.0f64);
    for (i, (label, b)) in blowups.iter().enumerate() {
        let atlas = b.atlas_at(&deepest(&b.blowdown.target)).unwrap();
        let plan = SamplePlan { points: ATLAS_SAMPLES, seed: SEED + i as u64, tolerance: ATLAS_TOLERANCE, ..SamplePlan::default() };
        let rep = verify_transitions(&atlas, &plan);
        atlases += 1;
        overlaps += atlas.transitions.len();
        worst = worst.max(rep.max_error());
        if !rep.passed() || rep.checks.iter().any(|c| c.samples < ATLAS_SAMPLES) {
            f.push(format!("{label}: max error {:e}, notes {:?}", rep.max_error(), rep.notes));
        }
    }
    let elapsed = start.elapsed();
    if elapsed > ATLAS_TIME {
        f.push(format!("took {elapsed:?}"));
    }
    outcome(f, format!("{atlases} atlases, {overlaps} overlaps × {ATLAS_SAMPLES} samples, max relative error {worst:.1e}, {elapsed:.2?}"))
}

fn criterion_9(suite: &mut Suite) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 9);
    let mut f = Vec::new();
    let (mut done, mut damaged_max) = (0, 0);
    while done < EXTENSION_TRIPLES {
        let (label, q) = common::random_complex(&mut rng);
        let Some(sub) = common::random_subcomplex(&mut rng, &q) else { continue };
        let q0 = q.restrict(&sub).unwrap();
        let a = q0.maximal()[rng.gen_range(0..q0.maximal().len())].clone();
        if q0.monoid(&a).dim() == 0 {
            continue;
        }
        let v = common::random_interior_point(&mut rng, q0.monoid(&a));
        let Ok(star) = star_subdivide_complex(&q0, &a, &v) else { continue };
        // half the triples start from a smooth R₀
        let r0 = if done % 2 == 0 { star } else { ns_from_locals(&q0, star.locals).unwrap().0 };
        done += 1;
        let name = format!("{label}, Q₀ = {sub:?}");
        let (r, report) = match extend_refinement(&q, &r0) {
            Ok(x) => x,
            Err(e) => {
                f.push(format!("{name}: {e}"));
                continue;
            }
        };
        damaged_max = damaged_max.max(report.damaged[0]);
        if !r.validate().passed() {
            f.push(format!("{name}: {:?}", r.validate()));
        }
        if r.restrict(&sub).ok() != Some(r0.clone()) {
            f.push(format!("{name}: does not restrict to R₀"));
        }
        if report.damaged.last() != Some(&0) {
            f.push(format!("{name}: damaged counts {:?}", report.damaged));
        }
        if r0.is_smooth() && !r.is_smooth() {
            f.push(format!("{name}: smooth R₀ extended to a non-smooth refinement"));
        }
        suite.refinements.push((format!("extension of {name}"), r));
    }
    outcome(f, format!("{EXTENSION_TRIPLES} triples extend validly and restrict to R₀; up to {damaged_max} damaged monoids, ending at 0"))
}

fn main() {
    let mut suite = Suite { complexes: Vec::new(), refinements: Vec::new() };
    let mut blowups = Vec::new();
    let mut results = vec![(1, "even planar monoid", criterion_1()), (2, "corner blow-up", criterion_2())];
    results.push((3, "natural smooth refinement", criterion_3(&mut suite)));
    results.push((5, "lifting identities", criterion_5(&mut blowups)));
    results.push((6, "fiber monoids", criterion_6()));
    results.push((7, "binomial resolution", criterion_7()));
    results.push((8, "atlas verification", criterion_8(&blowups)));
    results.push((9, "extension", criterion_9(&mut suite)));
    // every refinement built above, plus the blow-ups
    for (label, b) in &blowups {
        suite.refinements.push((label.clone(), b.refinement.clone()));
    }
    results.push((4, "refinement sampling oracle", criterion_4(&suite)));
    results.sort_by_key(|r| r.0);
    let sub: BTreeSet<usize> = results.iter().filter(|r| !r.2.passed).map(|r| r.0).collect();
    for (n, name, o) in &results {
        println!("criterion {n} {} {name}: {}", if o.passed { "PASS" } else { "FAIL" }, o.detail);
    }
    if !sub.is_empty() {
        eprintln!("failed criteria: {sub:?}");
        std::process::exit(1);
    }
}
