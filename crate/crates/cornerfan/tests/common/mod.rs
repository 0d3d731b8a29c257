//! Random inputs shared by the integration tests.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use cornerfan::complex::{Id, MonoidalComplex};
use cornerfan::exact::{ivec, saturated_span, IntMat, IntVec};
use cornerfan::manifold::{basic_complex, CornerComplex};
use cornerfan::monoid::ToricMonoid;
use num_bigint::BigInt;
use rand::seq::SliceRandom;
use rand::Rng;

pub const MAX_ELEMENTS: usize = 12;

pub fn cone(d: usize, gens: &[IntVec]) -> Option<ToricMonoid> {
    ToricMonoid::new(d, &saturated_span(d, gens), gens).ok()
}

fn random_vec(rng: &mut impl Rng, d: usize, lo: i64, hi: i64) -> IntVec {
    (0..d).map(|_| BigInt::from(rng.gen_range(lo..=hi))).collect()
}

/// A sharp cone of dimension `k` in `ℤ^d` on `rays` random generators;
/// `rays` must be possible for `k`.
pub fn random_cone(rng: &mut impl Rng, d: usize, k: usize, rays: usize) -> ToricMonoid {
    assert!(rays >= k && (k > 2 || rays == k));
    loop {
        // keep the cone sharp by tilting every generator towards e₀
        let gens: Vec<IntVec> = (0..rays)
            .map(|_| {
                let mut v = random_vec(rng, d, -3, 3);
                v[0] = BigInt::from(rng.gen_range(1..=3));
                v
            })
            .collect();
        if let Some(c) = cone(d, &gens) {
            if c.dim() == k && c.extremals().len() == rays {
                return c;
            }
        }
    }
}

fn det3(a: &IntVec, b: &IntVec, c: &IntVec) -> BigInt {
    &a[0] * (&b[1] * &c[2] - &b[2] * &c[1]) - &a[1] * (&b[0] * &c[2] - &b[2] * &c[0]) + &a[2] * (&b[0] * &c[1] - &b[1] * &c[0])
}

/// Two cones meeting along a common facet, in `ℤ²` or `ℤ³`.
pub fn random_two_cone_fan(rng: &mut impl Rng, d: usize) -> MonoidalComplex {
    loop {
        let shared: Vec<IntVec> = (0..d - 1).map(|_| random_vec(rng, d, -3, 3)).collect();
        let a = random_vec(rng, d, -3, 3);
        let b = random_vec(rng, d, -3, 3);
        let (sa, sb) = if d == 2 {
            let s = &shared[0];
            (&s[0] * &a[1] - &s[1] * &a[0], &s[0] * &b[1] - &s[1] * &b[0])
        } else {
            (det3(&shared[0], &shared[1], &a), det3(&shared[0], &shared[1], &b))
        };
        use num_traits::Signed;
        if !(sa.is_positive() && sb.is_negative()) {
            continue;
        }
        let mut g1 = shared.clone();
        g1.push(a);
        let mut g2 = shared;
        g2.push(b);
        let (Some(c1), Some(c2)) = (cone(d, &g1), cone(d, &g2)) else { continue };
        if c1.extremals().len() != d || c2.extremals().len() != d {
            continue;
        }
        let q = MonoidalComplex::from_fan("c", &[c1, c2]);
        if q.len() <= MAX_ELEMENTS {
            return q;
        }
    }
}

/// Two copies of a cone glued along their whole boundary.
pub fn random_football(rng: &mut impl Rng) -> MonoidalComplex {
    let sigma = random_cone(rng, 2, 2, 2);
    let one = MonoidalComplex::of_monoid(&sigma);
    let top = one.maximal()[0].clone();
    let mut monoids: BTreeMap<Id, ToricMonoid> = one.monoids().clone();
    let mut maps: BTreeMap<(Id, Id), IntMat> = BTreeMap::new();
    for ((a, b), m) in one.maps() {
        maps.insert((a.clone(), b.clone()), m.clone());
        if *b == top {
            maps.insert((a.clone(), "twin".to_string()), m.clone());
        }
    }
    monoids.insert("twin".to_string(), sigma);
    MonoidalComplex::from_generating_maps(monoids, maps).expect("football")
}

/// One complex of the randomized suite: dimension at most 4, at most
/// twelve elements.
pub fn random_complex(rng: &mut impl Rng) -> (String, MonoidalComplex) {
    loop {
        let (label, q) = match rng.gen_range(0..7) {
            0 => ("cone in Z^2".to_string(), MonoidalComplex::of_monoid(&random_cone(rng, 2, 2, 2))),
            1 | 2 => {
                let rays = rng.gen_range(3..=4);
                (format!("{rays}-ray cone in Z^3"), MonoidalComplex::of_monoid(&random_cone(rng, 3, 3, rays)))
            }
            3 => {
                let k = rng.gen_range(2..=3);
                (format!("{k}-cone in Z^4"), MonoidalComplex::of_monoid(&random_cone(rng, 4, k, k)))
            }
            4 => {
                let d = rng.gen_range(2..=3);
                (format!("two-cone fan in Z^{d}"), random_two_cone_fan(rng, d))
            }
            5 => ("football".to_string(), random_football(rng)),
            _ => {
                let n = rng.gen_range(1..=3);
                (format!("P of the model corner of codim {n}"), basic_complex(&CornerComplex::model(n, 0)))
            }
        };
        if q.len() <= MAX_ELEMENTS && q.max_dim() <= 4 {
            return (label, q);
        }
    }
}

/// A nonempty proper downward-closed subset, when there is one.
pub fn random_subcomplex(rng: &mut impl Rng, q: &MonoidalComplex) -> Option<BTreeSet<Id>> {
    let mut ids: Vec<Id> = q.ids().filter(|a| !q.maximal().contains(a)).cloned().collect();
    if ids.is_empty() {
        return None;
    }
    ids.shuffle(rng);
    let take = rng.gen_range(1..=ids.len());
    let sub = q.closure(&ids[..take]);
    (sub.len() < q.len()).then_some(sub)
}

/// `Σ wᵢ eᵢ` over the extremals with weights in `1..=3`: a lattice point
/// in the relative interior.
pub fn random_interior_point(rng: &mut impl Rng, sigma: &ToricMonoid) -> IntVec {
    let mut v = vec![BigInt::from(0); sigma.ambient_dim()];
    for e in sigma.extremals() {
        let w = BigInt::from(rng.gen_range(1..=3));
        for (a, b) in v.iter_mut().zip(e) {
            *a += &w * b;
        }
    }
    v
}

pub fn int_rows(rows: &[&[i64]]) -> Vec<IntVec> {
    rows.iter().map(|r| ivec(r)).collect()
}

/// A random blow-up of the model corner `ℝⁿ₊`: ordinary, weighted, iterated,
/// or the smoothed star subdivision at a random interior vector of a face.
pub fn random_blowup(rng: &mut impl Rng, n: usize) -> (String, cornerfan::manifold::Blowup) {
    use cornerfan::complex::{ns_from_locals, star_subdivide_complex};
    use cornerfan::manifold::{generalized_blowup, inhomogeneous_blowup, iterated_blowup, ordinary_blowup};
    let x = CornerComplex::model(n, 0);
    let deep: Vec<Id> = x.faces().filter(|f| x.codim(f) >= 2).cloned().collect();
    loop {
        let face = deep.choose(rng).unwrap().clone();
        let made = match rng.gen_range(0..4) {
            0 => ordinary_blowup(&x, &face).map(|b| (format!("[X;{face}]"), b)),
            1 => {
                let w: Vec<u64> = (0..x.codim(&face)).map(|_| rng.gen_range(1..=3)).collect();
                inhomogeneous_blowup(&x, &face, &w).map(|b| (format!("[X;{face} with weights {w:?}]"), b))
            }
            2 => {
                let faces: Vec<Id> = (0..rng.gen_range(2..=3)).map(|_| deep.choose(rng).unwrap().clone()).collect();
                iterated_blowup(&x, &faces).map(|b| (format!("[X;{}]", faces.join(", ")), b))
            }
            _ => {
                let p = basic_complex(&x);
                let cs = x.coordinate();
                let mut v = vec![BigInt::from(0); n];
                for h in x.incidence(&face) {
                    v[cs[h]] = BigInt::from(rng.gen_range(1..=3));
                }
                let label = format!("ns of the star at {v:?}");
                let Ok(r) = star_subdivide_complex(&p, &face, &v) else { continue };
                let Ok((r, _)) = ns_from_locals(&p, r.locals) else { continue };
                generalized_blowup(&x, &r).map(|b| (label, b))
            }
        };
        if let Ok(b) = made {
            return b;
        }
    }
}

/// Exponents with entries in `0..=2` and no zero row.
pub fn random_exponents(rng: &mut impl Rng, k: usize, n: usize) -> IntMat {
    loop {
        let rows: Vec<IntVec> = (0..k).map(|_| random_vec(rng, n, 0, 2)).collect();
        if rows.iter().all(|r| r.iter().any(|x| *x != BigInt::from(0))) {
            return IntMat::from_rows(n, rows);
        }
    }
}
