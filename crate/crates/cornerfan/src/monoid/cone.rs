//! Polyhedral cone primitives in integer coordinates: double description,
//! pulling triangulation and fundamental-parallelepiped enumeration.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::exact::{dot, primitive, rat_to_primitive, smith_normal_form, IntMat, IntVec, RatMat};

/// Extreme rays (primitive) of the pointed cone `{x ∈ ℚʳ : a·x ≥ 0 ∀a}`.
/// Requires the rows to have rank `r`.
pub fn extreme_rays(ineqs: &[IntVec], r: usize) -> Vec<IntVec> {
    if r == 0 {
        return Vec::new();
    }
    // greedy choice of r independent rows, lowest index first
    let mut chosen: Vec<usize> = Vec::new();
    for i in 0..ineqs.len() {
        let mut trial: Vec<IntVec> = chosen.iter().map(|&k| ineqs[k].clone()).collect();
        trial.push(ineqs[i].clone());
        if IntMat::from_rows(r, trial).rank() == chosen.len() + 1 {
            chosen.push(i);
            if chosen.len() == r {
                break;
            }
        }
    }
    assert_eq!(chosen.len(), r, "inequalities do not define a pointed cone");
    let b = IntMat::from_rows(r, chosen.iter().map(|&k| ineqs[k].clone()).collect()).to_rat();
    let binv = b.inverse().expect("independent rows");
    let mut rays: Vec<IntVec> = (0..r).map(|j| rat_to_primitive(&binv.column(j))).collect();
    let mut processed: Vec<usize> = chosen.clone();
    for i in 0..ineqs.len() {
        if chosen.contains(&i) {
            continue;
        }
        let a = &ineqs[i];
        let vals: Vec<BigInt> = rays.iter().map(|x| dot(a, x)).collect();
        let tight = |x: &IntVec| -> BTreeSet<usize> {
            processed.iter().copied().filter(|&k| dot(&ineqs[k], x).is_zero()).collect()
        };
        let zsets: Vec<BTreeSet<usize>> = rays.iter().map(tight).collect();
        let mut next: Vec<IntVec> = Vec::new();
        for (x, v) in rays.iter().zip(&vals) {
            if !v.is_negative() {
                next.push(x.clone());
            }
        }
        for p in 0..rays.len() {
            if !vals[p].is_positive() {
                continue;
            }
            for n in 0..rays.len() {
                if !vals[n].is_negative() {
                    continue;
                }
                let common: BTreeSet<usize> = zsets[p].intersection(&zsets[n]).copied().collect();
                let adjacent = (0..rays.len())
                    .filter(|&w| w != p && w != n)
                    .all(|w| !common.is_subset(&zsets[w]));
                if !adjacent {
                    continue;
                }
                let comb: IntVec = rays[n]
                    .iter()
                    .zip(&rays[p])
                    .map(|(xn, xp)| &vals[p] * xn - &vals[n] * xp)
                    .collect();
                next.push(primitive(&comb).expect("adjacent rays are independent"));
            }
        }
        next.sort();
        next.dedup();
        rays = next;
        processed.push(i);
    }
    rays.sort();
    rays
}

/// Facets and extreme rays of the full-dimensional pointed cone generated by
/// `gens` in `ℚʳ`. Rays are returned primitive and sorted.
pub fn facets_and_rays(gens: &[IntVec], r: usize) -> (Vec<IntVec>, Vec<IntVec>) {
    if r == 0 {
        return (Vec::new(), Vec::new());
    }
    let mut dirs: Vec<IntVec> = gens
        .iter()
        .filter(|g| g.iter().any(|x| !x.is_zero()))
        .map(|g| primitive(g).expect("nonzero"))
        .collect();
    dirs.sort();
    dirs.dedup();
    let facets = extreme_rays(&dirs, r);
    let rays = dirs
        .into_iter()
        .filter(|g| {
            let tight: Vec<IntVec> = facets.iter().filter(|u| dot(u, g).is_zero()).cloned().collect();
            if r == 1 {
                return true;
            }
            !tight.is_empty() && IntMat::from_rows(r, tight).rank() == r - 1
        })
        .collect();
    (facets, rays)
}

/// All faces as sorted index sets into `rays`, obtained as intersections of
/// facet vertex sets. Includes the empty face and the full set.
pub fn face_sets(rays: &[IntVec], facets: &[IntVec]) -> Vec<Vec<usize>> {
    let full: Vec<usize> = (0..rays.len()).collect();
    let facet_sets: Vec<BTreeSet<usize>> = facets
        .iter()
        .map(|u| (0..rays.len()).filter(|&i| dot(u, &rays[i]).is_zero()).collect())
        .collect();
    let mut seen: BTreeSet<Vec<usize>> = BTreeSet::new();
    seen.insert(full.clone());
    let mut queue = vec![full];
    while let Some(f) = queue.pop() {
        let fs: BTreeSet<usize> = f.iter().copied().collect();
        for z in &facet_sets {
            let g: Vec<usize> = fs.intersection(z).copied().collect();
            if seen.insert(g.clone()) {
                queue.push(g);
            }
        }
    }
    seen.into_iter().collect()
}

/// Pulling triangulation of a face (index set into `rays`), recursing through
/// the face lattice `faces` (index sets with their dimensions).
pub fn triangulate(face: &[usize], dim: usize, faces: &[(Vec<usize>, usize)]) -> Vec<Vec<usize>> {
    if face.len() == dim {
        return vec![face.to_vec()];
    }
    let v = face[0];
    let mut out = Vec::new();
    for (g, gd) in faces {
        if *gd + 1 != dim || g.contains(&v) || !g.iter().all(|i| face.contains(i)) {
            continue;
        }
        for mut s in triangulate(g, *gd, faces) {
            s.insert(0, v);
            s.sort();
            out.push(s);
        }
    }
    out
}

/// Nonzero lattice points `Σλᵢgᵢ`, `λ ∈ [0,1)ʳ`, of the simplicial cone with
/// independent generators `gens` (rows) in `ℤʳ`.
pub fn parallelepiped_points(gens: &[IntVec]) -> Vec<IntVec> {
    let r = gens.len();
    let g = IntMat::from_rows(r, gens.to_vec());
    let (_, d, v) = smith_normal_form(&g);
    let vinv = v.to_rat().inverse().expect("unimodular").to_int().expect("integral inverse");
    let ginv: RatMat = g.to_rat().inverse().expect("independent generators");
    let moduli: Vec<BigInt> = (0..r).map(|i| d.get(i, i).clone()).collect();
    let mut out = Vec::new();
    let mut y: Vec<BigInt> = vec![BigInt::zero(); r];
    loop {
        let x = vinv.apply(&y);
        let lam = ginv.apply(&crate::exact::to_rat(&x));
        let frac: Vec<BigRational> = lam.iter().map(|l| l - l.floor()).collect();
        let p = g.to_rat().apply(&frac);
        let p: IntVec = p.iter().map(|q| q.to_integer()).collect();
        if p.iter().any(|c| !c.is_zero()) {
            out.push(p);
        }
        // odometer over the box Π [0, dᵢ)
        let mut k = 0;
        loop {
            if k == r {
                out.sort();
                out.dedup();
                return out;
            }
            y[k] += 1;
            if y[k] < moduli[k] {
                break;
            }
            y[k] = BigInt::zero();
            k += 1;
        }
    }
}
