//! Generalized blow-up along a smooth refinement of the basic complex,
//! lifting of b-maps, blowing up the domain, and the classical blow-ups.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use super::{basic_complex, compose, induced_morphism, BMap, ChartAtlas, CornerComplex, ManifoldError};
use crate::complex::{
    assemble_from_local, ns_from_locals, pullback_refinement, star_locals, star_subdivide_complex, ComplexMorphism,
    ComplexRefinement, Id,
};
use crate::exact::{to_rat, IntMat, IntVec, RatMat};
use crate::monoid::ToricMonoid;
use crate::refinement::MonoidRefinement;

/// `[X;R]` with its blow-down map and the refinement it came from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Blowup {
    pub space: CornerComplex,
    pub blowdown: BMap,
    pub refinement: ComplexRefinement,
}

/// Monoid of an element of `R`, mapped into `ℤ^H` of the base.
fn element_monoid(r: &ComplexRefinement, x: &str) -> ToricMonoid {
    r.source().monoid(x).push_forward(&r.morphism.homs[x])
}

fn rays_below(r: &ComplexRefinement, x: &str) -> Vec<Id> {
    r.source().below(x).into_iter().filter(|y| r.source().monoid(y).dim() == 1).collect()
}

fn ray_vector(r: &ComplexRefinement, x: &str) -> IntVec {
    element_monoid(r, x).extremals()[0].clone()
}

pub fn generalized_blowup(x: &CornerComplex, r: &ComplexRefinement) -> Result<Blowup, ManifoldError> {
    if *r.target() != basic_complex(x) || !r.is_smooth() || !r.validate().passed() {
        return Err(ManifoldError::NotSmoothRefinement);
    }
    let space = CornerComplex::from_smooth_complex(r.source(), x.free_dim)?;
    let hyps = space.hypersurfaces();
    let n = x.hypersurfaces().len();
    let alpha = IntMat::from_rows(n, hyps.iter().map(|w| ray_vector(r, w)).collect());
    let blowdown = BMap::new(space.clone(), x.clone(), r.morphism.poset_map.clone(), alpha)?;
    Ok(Blowup { space, blowdown, refinement: r.clone() })
}

impl Blowup {
    /// `P_{[X;R]} ≅ R`: each free monoid maps onto the matching element of `R`.
    pub fn basic_matches_refinement(&self) -> bool {
        let r = &self.refinement;
        self.space.faces().all(|t| self.space.basic_monoid(t).push_forward(&self.blowdown.alpha) == element_monoid(r, t))
    }

    /// Local atlas over a deepest face of a model corner.
    pub fn atlas_at(&self, face: &str) -> Result<ChartAtlas, ManifoldError> {
        let n = self.blowdown.target.codim(face);
        if n != self.blowdown.target.hypersurfaces().len() {
            return Err(ManifoldError::InvalidComplex("atlases are built over a corner meeting every hypersurface".into()));
        }
        super::local_atlas(n, &self.refinement.locals[face], self.space.free_dim)
    }
}

/// Result of testing a b-map against a refinement of its target.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Compatibility {
    /// `f_♮ = φ` followed by the refinement.
    Factors(ComplexMorphism),
    /// the image cone of this face crosses member boundaries
    Incompatible { face: Id },
}

pub fn is_compatible(f: &BMap, r: &ComplexRefinement) -> Result<Compatibility, ManifoldError> {
    if *r.target() != basic_complex(&f.target) {
        return Err(ManifoldError::NotSmoothRefinement);
    }
    let cs = f.source.coordinate();
    let mut poset_map = BTreeMap::new();
    let mut homs = BTreeMap::new();
    for face in f.source.faces() {
        let y = &f.face_map[face];
        let gens: Vec<IntVec> = f.source.incidence(face).iter().map(|g| f.alpha.row(cs[g]).to_vec()).collect();
        let candidate = r
            .source()
            .ids()
            .filter(|x| r.morphism.image_of(x) == y)
            .filter(|x| {
                let m = element_monoid(r, x);
                gens.iter().all(|g| m.in_support(&to_rat(g)))
            })
            .min_by_key(|x| r.source().monoid(x).dim())
            .cloned();
        let Some(x) = candidate else {
            return Ok(Compatibility::Incompatible { face: face.clone() });
        };
        // α expressed in the element's own lattice
        let h = r.morphism.homs[&x].to_rat();
        let through: BTreeSet<usize> = f.source.incidence(face).iter().map(|g| cs[g]).collect();
        let mut rows = Vec::new();
        for (i, row) in f.alpha.row_vecs().iter().enumerate() {
            let sol = h.solve_left(&to_rat(row)).and_then(|s| RatMat::from_rows(s.len(), vec![s]).to_int());
            let own = r.source().monoid(&x);
            match sol {
                Some(m) if !through.contains(&i) || own.contains(m.row(0)) => rows.push(m.row(0).to_vec()),
                _ if through.contains(&i) => return Ok(Compatibility::Incompatible { face: face.clone() }),
                // outside the monoid of this face; any preimage will do
                _ => rows.push(vec![BigInt::zero(); h.rows()]),
            }
        }
        homs.insert(face.clone(), IntMat::from_rows(h.rows(), rows));
        poset_map.insert(face.clone(), x);
    }
    let phi = ComplexMorphism { source: basic_complex(&f.source), target: r.source().clone(), poset_map, homs };
    if !phi.validate().passed() {
        let bad = f.source.relations().iter().find(|(g, h)| !r.source().le(&phi.poset_map[g], &phi.poset_map[h]));
        let face = bad.map(|p| p.1.clone()).unwrap_or_else(|| f.source.faces().next().cloned().unwrap_or_default());
        return Ok(Compatibility::Incompatible { face });
    }
    Ok(Compatibility::Factors(phi))
}

/// The lift `f′: X → [Y;R]` with `β ∘ f′ = f`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LiftedBMap {
    pub map: BMap,
    pub factorization: ComplexMorphism,
}

pub fn lift_bmap(f: &BMap, blowup: &Blowup, compat: &Compatibility) -> Result<LiftedBMap, ManifoldError> {
    let Compatibility::Factors(phi) = compat else {
        let Compatibility::Incompatible { face } = compat else { unreachable!() };
        return Err(ManifoldError::NotCompatible(face.clone()));
    };
    let r = &blowup.refinement;
    let hyps = blowup.space.hypersurfaces();
    let col: BTreeMap<&Id, usize> = hyps.iter().enumerate().map(|(i, h)| (h, i)).collect();
    let cs = f.source.coordinate();
    let mut rows = vec![vec![BigInt::zero(); hyps.len()]; cs.len()];
    for (g, &i) in &cs {
        let x = &phi.poset_map[g];
        let rays = rays_below(r, x);
        let basis = RatMat::from_rows(f.target.hypersurfaces().len(), rays.iter().map(|w| to_rat(&ray_vector(r, w))).collect());
        let c = basis.solve_left(&to_rat(f.alpha.row(i))).ok_or_else(|| ManifoldError::NotCompatible(g.clone()))?;
        for (w, cw) in rays.iter().zip(&c) {
            if !cw.is_integer() || cw.is_negative() {
                return Err(ManifoldError::NotCompatible(g.clone()));
            }
            rows[i][col[w]] = cw.to_integer();
        }
    }
    let alpha = IntMat::from_rows(hyps.len(), rows);
    let map = BMap::new(f.source.clone(), blowup.space.clone(), phi.poset_map.clone(), alpha)?;
    debug_assert_eq!(compose(&blowup.blowdown, &map).map(|m| m.alpha), Ok(f.alpha.clone()));
    Ok(LiftedBMap { map, factorization: phi.clone() })
}

/// For a map out of a model corner with exponent matrix `δ`, the charts of
/// `atlas` it lifts into and the local exponents `μ = δν⁻¹` there.
pub fn chart_exponents(delta: &IntMat, atlas: &ChartAtlas) -> Vec<(usize, IntMat)> {
    let mut out = Vec::new();
    for (i, c) in atlas.charts.iter().enumerate() {
        let inv = c.nu.to_rat().inverse().expect("chart matrices are invertible");
        let Some(mu) = delta.to_rat().mul(&inv).to_int() else { continue };
        if mu.row_vecs().iter().flatten().all(|x| !x.is_negative()) {
            out.push((i, mu));
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DomainBlowup {
    /// smooth refinement `S` of `P_X`
    pub refinement: ComplexRefinement,
    pub domain: Blowup,
    pub target: Blowup,
    pub lifted: LiftedBMap,
    /// the pullback was already smooth, so `S` is it
    pub minimal: bool,
}

/// `S = ns(P_X ×_{P_Y} R)` and the lift `[X;S] → [Y;R]`.
pub fn blowup_domain(f: &BMap, r: &ComplexRefinement) -> Result<DomainBlowup, ManifoldError> {
    let fm = induced_morphism(f);
    let pb = pullback_refinement(r, &fm)?;
    let minimal = pb.is_smooth();
    let (s, _) = ns_from_locals(&fm.source, pb.locals.clone())?;
    let domain = generalized_blowup(&f.source, &s)?;
    let target = generalized_blowup(&f.target, r)?;
    let g = compose(f, &domain.blowdown)?;
    let compat = is_compatible(&g, r)?;
    let lifted = lift_bmap(&g, &target, &compat)?;
    Ok(DomainBlowup { refinement: s, domain, target, lifted, minimal })
}

fn face_vector(x: &CornerComplex, face: &str) -> IntVec {
    let n = x.hypersurfaces().len();
    let cs = x.coordinate();
    let mut v = vec![BigInt::zero(); n];
    for h in x.incidence(face) {
        v[cs[h]] = BigInt::from(1);
    }
    v
}

/// `[X;F] = [X; S(P_X, v_F)]`.
pub fn ordinary_blowup(x: &CornerComplex, face: &str) -> Result<Blowup, ManifoldError> {
    if !x.contains(face) || x.codim(face) == 0 {
        return Err(ManifoldError::UnknownFace(face.to_string()));
    }
    let r = star_subdivide_complex(&basic_complex(x), face, &face_vector(x, face))?;
    generalized_blowup(x, &r)
}

/// Blow-up along `F` with weights `n(H)` on the hypersurfaces through `F`,
/// listed in id order. The weighted star subdivision is simplicial but not
/// smooth in general; it is smoothed, which adjoins the roots `x^{1/n(H)}`.
pub fn inhomogeneous_blowup(x: &CornerComplex, face: &str, weights: &[u64]) -> Result<Blowup, ManifoldError> {
    if !x.contains(face) || x.codim(face) == 0 {
        return Err(ManifoldError::UnknownFace(face.to_string()));
    }
    if weights.len() != x.codim(face) || weights.contains(&0) {
        return Err(ManifoldError::BadWeights);
    }
    let p = basic_complex(x);
    let cs = x.coordinate();
    let n = cs.len();
    let mut v = vec![BigInt::zero(); n];
    for (h, w) in x.incidence(face).iter().zip(weights) {
        v[cs[h]] = BigInt::from(*w);
    }
    let mut locals: BTreeMap<Id, MonoidRefinement> = p.monoids().iter().map(|(a, s)| (a.clone(), MonoidRefinement::trivial(s))).collect();
    star_locals(&p, &mut locals, face, &v)?;
    // roots of the boundary defining functions: each cone takes the lattice
    // of its own generators
    for l in locals.values_mut() {
        *l = l.smoothed().map_err(|_| ManifoldError::NotSmoothRefinement)?;
    }
    let r = assemble_from_local(&p, &locals)?;
    generalized_blowup(x, &r)
}

/// Minimal elements of `R` over `G`: the faces of `[X;R]` whose interiors lie
/// over the interior of `G`.
pub fn lift_face(r: &ComplexRefinement, g: &str) -> Vec<Id> {
    let over: Vec<Id> = r.source().ids().filter(|x| r.morphism.image_of(x) == g).cloned().collect();
    over.iter().filter(|x| !over.iter().any(|y| y != *x && r.source().le(y, x))).cloned().collect()
}

/// `[X; F₁, …, F_N]`: each face is lifted to the current blow-up, which must
/// give a single face, and that face is blown up in turn.
pub fn iterated_blowup(x: &CornerComplex, faces: &[Id]) -> Result<Blowup, ManifoldError> {
    let p = basic_complex(x);
    let mut locals: BTreeMap<Id, MonoidRefinement> = p.monoids().iter().map(|(a, s)| (a.clone(), MonoidRefinement::trivial(s))).collect();
    let mut r = assemble_from_local(&p, &locals)?;
    for f in faces {
        if !x.contains(f) {
            return Err(ManifoldError::UnknownFace(f.clone()));
        }
        let lifted = lift_face(&r, f);
        let [t] = lifted.as_slice() else {
            return Err(ManifoldError::LiftNotUnique(f.clone()));
        };
        let v = element_monoid(&r, t).extremal_sum();
        if !v.iter().all(|c| c.is_zero()) {
            star_locals(&p, &mut locals, f, &v)?;
            r = assemble_from_local(&p, &locals)?;
        }
    }
    generalized_blowup(x, &r)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlowdownVerdict {
    /// `f_♮` is a refinement of complexes; `Err` names the failure
    pub refinement: Result<(), String>,
    pub smooth: bool,
    /// `f_♮` is invertible: bijective on elements and onto each monoid
    pub invertible: bool,
}

impl BlowdownVerdict {
    pub fn is_blowdown(&self) -> bool {
        self.refinement.is_ok() && self.smooth
    }

    /// Interior behaviour of the map is outside the combinatorial data, so
    /// a passing verdict is necessary but not sufficient.
    pub const CAVEAT: &'static str =
        "checks only that the induced morphism is a smooth refinement; whether the map is a diffeomorphism of interiors is not visible in the face data";
}

pub fn check_blowdown_refinement(f: &BMap) -> BlowdownVerdict {
    let m = induced_morphism(f);
    let smooth = m.source.is_smooth();
    let refinement = ComplexRefinement::from_morphism(m.clone()).map(|_| ()).map_err(|e| e.to_string());
    let images: BTreeSet<&Id> = m.poset_map.values().collect();
    let invertible = refinement.is_ok()
        && images.len() == m.source.len()
        && images.len() == m.target.len()
        && m.source.ids().all(|a| m.source.monoid(a).push_forward(&m.homs[a]) == *m.target.monoid(m.image_of(a)));
    BlowdownVerdict { refinement, smooth, invertible }
}
