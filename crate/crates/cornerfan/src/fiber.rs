//! Fiber products of b-maps `f₁: X₁ → Y ← X₂ :f₂`: the fiber complex, the
//! smoothness test for a universal fiber product, resolution along a smooth
//! refinement, and factoring commuting pairs `gᵢ: Z → Xᵢ` through it.
//!
//! The fiber complex carries one element per fiber monoid. Whether the set
//! `D(F₁,F₂) ∩ (G₁×G₂)` is empty or has several components is not visible in
//! the b-map data, so the complex is an upper model for `P_D`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use rand::Rng;

use crate::binomial::{normal_form, BinomialError, BinomialSystem};
use crate::complex::{
    fiber_product_complex, natural_smooth_refinement, ns_from_locals, pullback_refinement, ComplexError, ComplexMorphism,
    ComplexRefinement, FiberProductComplex, Id,
};
use crate::exact::{to_rat, IntMat, IntVec, RatMat};
use crate::manifold::{basic_complex, compose, generalized_blowup, induced_morphism, BMap, Blowup, CornerComplex, ManifoldError};
use crate::monoid::ToricMonoid;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FiberError {
    #[error("the maps have different targets")]
    DifferentTargets,
    #[error("b-normal transversality fails at ({0},{1})")]
    TransversalityFailed(Id, Id),
    #[error("f₁∘g₁ ≠ f₂∘g₂")]
    NotCommuting,
    #[error("refinement is not a smooth refinement of the fiber complex")]
    BadRefinement,
    #[error(transparent)]
    Manifold(#[from] ManifoldError),
    #[error(transparent)]
    Complex(#[from] ComplexError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiberProblem {
    pub f1: BMap,
    pub f2: BMap,
}

impl FiberProblem {
    pub fn new(f1: BMap, f2: BMap) -> Result<Self, FiberError> {
        if f1.target != f2.target {
            return Err(FiberError::DifferentTargets);
        }
        Ok(FiberProblem { f1, f2 })
    }

    pub fn target(&self) -> &CornerComplex {
        &self.f1.target
    }

    /// Face pairs `(F₁, F₂)` with a common image `G`.
    pub fn face_pairs(&self) -> Vec<(Id, Id, Id)> {
        let mut out = Vec::new();
        for a in self.f1.source.faces() {
            for b in self.f2.source.faces() {
                let g = &self.f1.face_map[a];
                if *g == self.f2.face_map[b] {
                    out.push((a.clone(), b.clone(), g.clone()));
                }
            }
        }
        out
    }
}

fn pair_id(a: &str, b: &str) -> Id {
    format!("({a},{b})")
}

fn dim_of(x: &CornerComplex) -> usize {
    x.faces().map(|f| x.codim(f)).max().unwrap_or(0) + x.free_dim
}

/// Rows of `α` for the hypersurfaces through `face`, columns through `g`.
fn local_exponents(f: &BMap, face: &str, g: &str) -> Vec<IntVec> {
    let cs = f.source.coordinate();
    let ct = f.target.coordinate();
    let cols: Vec<usize> = f.target.incidence(g).iter().map(|h| ct[h]).collect();
    f.source.incidence(face).iter().map(|h| cols.iter().map(|&j| f.alpha.get(cs[h], j).clone()).collect()).collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairVerdict {
    pub f1: Id,
    pub f2: Id,
    pub g: Id,
    /// rank of `N_{σF₁} × N_{σF₂} → N_{σG}`
    pub rank: usize,
    /// `codim G`
    pub required: usize,
    /// `dim F₁ + dim F₂`
    pub tangential: usize,
    pub target_dim: usize,
}

impl PairVerdict {
    /// The b-normal directions of `G` are already spanned by boundary
    /// normals. Sufficient for that part, but not necessary: tangential
    /// directions of a front face also map to b-normal directions below it.
    pub fn normal_surjective(&self) -> bool {
        self.rank == self.required
    }

    /// `bT X₁ ⊕ bT X₂ → bT Y` can only be onto if the tangential directions
    /// of `F₁ × F₂` make up for what the normals miss.
    pub fn passed(&self) -> bool {
        self.rank + self.tangential >= self.target_dim
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransversalityReport {
    pub pairs: Vec<PairVerdict>,
}

impl TransversalityReport {
    pub const NOTE: &'static str = "necessary condition only: tangential directions are not modelled";

    pub fn passed(&self) -> bool {
        self.pairs.iter().all(PairVerdict::passed)
    }

    pub fn first_failure(&self) -> Option<&PairVerdict> {
        self.pairs.iter().find(|p| !p.passed())
    }
}

/// Dimension count at each face pair over a common face `G`: the normal map
/// `N_{σF₁} × N_{σF₂} → N_{σG}` has rank `r`, and `bT X₁ ⊕ bT X₂ → bT Y`
/// has rank at most `r + dim F₁ + dim F₂`.
pub fn b_normal_transversality(p: &FiberProblem) -> TransversalityReport {
    let target_dim = dim_of(p.target());
    let (d1, d2) = (dim_of(&p.f1.source), dim_of(&p.f2.source));
    let pairs = p
        .face_pairs()
        .into_iter()
        .map(|(a, b, g)| {
            let required = p.target().codim(&g);
            let mut rows = local_exponents(&p.f1, &a, &g);
            rows.extend(local_exponents(&p.f2, &b, &g));
            let rank = IntMat::from_rows(required, rows).rank();
            let tangential = (d1 - p.f1.source.codim(&a)) + (d2 - p.f2.source.codim(&b));
            PairVerdict { f1: a, f2: b, g, rank, required, tangential, target_dim }
        })
        .collect();
    TransversalityReport { pairs }
}

pub fn fiber_complex(p: &FiberProblem) -> FiberProductComplex {
    fiber_product_complex(&induced_morphism(&p.f1), &induced_morphism(&p.f2)).expect("common target")
}

/// Local binomial model of `D(F₁,F₂)` in `ℝ^{F₁}₊ × ℝ^{F₂}₊ × ℝᵏ`: for each
/// `H ⊃ G`, `s^{α₁(·,H)} = t^{α₂(·,H)}`, plus one smooth equation per
/// tangential direction of `Y` at `G`.
pub fn pair_system(p: &FiberProblem, a: &str, b: &str, g: &str) -> Result<BinomialSystem, BinomialError> {
    let e1 = local_exponents(&p.f1, a, g);
    let e2 = local_exponents(&p.f2, b, g);
    let (c1, c2) = (e1.len(), e2.len());
    let ncols = p.target().codim(g);
    let eqs: Vec<(IntVec, IntVec)> = (0..ncols)
        .map(|j| {
            let mut lhs: IntVec = e1.iter().map(|r| r[j].clone()).collect();
            lhs.extend(std::iter::repeat_n(BigInt::zero(), c2));
            let mut rhs = vec![BigInt::zero(); c1];
            rhs.extend(e2.iter().map(|r| r[j].clone()));
            (lhs, rhs)
        })
        .collect();
    let tangential = (dim_of(&p.f1.source) - c1) + (dim_of(&p.f2.source) - c2);
    normal_form(c1 + c2, tangential, &eqs, dim_of(p.target()) - ncols)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairReport {
    pub f1: Id,
    pub f2: Id,
    pub g: Id,
    /// `σ_{F₁} ×_{σ_G} σ_{F₂}` when the pair is an element of the fiber complex
    pub monoid: Option<ToricMonoid>,
    pub smooth: bool,
    pub system: Result<BinomialSystem, BinomialError>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiberReport {
    pub pairs: Vec<PairReport>,
    pub transversality: TransversalityReport,
    pub complex: FiberProductComplex,
}

impl FiberReport {
    pub const MULTIPLICITY_NOTE: &'static str =
        "one element per fiber monoid; empty or multiple components of D(F1,F2) need geometric input";

    /// Face pairs over a common face that are not elements of the fiber
    /// complex: pieces of the set-theoretic fiber product lying in the
    /// boundary of a larger component.
    pub fn exceptional(&self) -> Vec<&PairReport> {
        self.pairs.iter().filter(|p| p.monoid.is_none()).collect()
    }

    pub fn offenders(&self) -> Vec<&PairReport> {
        self.pairs.iter().filter(|p| p.monoid.is_some() && !p.smooth).collect()
    }
}

pub fn analyze(p: &FiberProblem) -> FiberReport {
    let complex = fiber_complex(p);
    let pairs = p
        .face_pairs()
        .into_iter()
        .map(|(a, b, g)| {
            let id = pair_id(&a, &b);
            let monoid = complex.complex.contains(&id).then(|| complex.complex.monoid(&id).clone());
            let smooth = monoid.as_ref().is_some_and(ToricMonoid::is_smooth);
            let system = pair_system(p, &a, &b, &g);
            PairReport { f1: a, f2: b, g, monoid, smooth, system }
        })
        .collect();
    FiberReport { pairs, transversality: b_normal_transversality(p), complex }
}

/// `[D;R]` with `hᵢ: [D;R] → Xᵢ` and `f₁∘h₁ = f₂∘h₂`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResolvedFiberProduct {
    pub fiber: FiberProductComplex,
    pub refinement: ComplexRefinement,
    pub space: CornerComplex,
    pub h1: BMap,
    pub h2: BMap,
    /// binomial model per element of the fiber complex, keyed by pair id
    pub systems: BTreeMap<Id, Result<BinomialSystem, BinomialError>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TheoremB {
    /// every fiber monoid is free; the fiber complex itself is the universal fiber product
    Smooth(Box<ResolvedFiberProduct>),
    NotSmooth { offenders: Vec<(Id, ToricMonoid)> },
}

/// The fiber complex is the universal fiber product exactly when every
/// fiber monoid is smooth. Transversality is a precondition, reported
/// separately by [`b_normal_transversality`].
pub fn theorem_b_check(p: &FiberProblem) -> TheoremB {
    let fp = fiber_complex(p);
    let offenders: Vec<(Id, ToricMonoid)> =
        fp.complex.monoids().iter().filter(|(_, m)| !m.is_smooth()).map(|(k, m)| (k.clone(), m.clone())).collect();
    if !offenders.is_empty() {
        return TheoremB::NotSmooth { offenders };
    }
    let trivial = ComplexRefinement::from_morphism(ComplexMorphism::identity(&fp.complex)).expect("identity refinement");
    match assemble(p, fp, trivial) {
        Ok(r) => TheoremB::Smooth(Box::new(r)),
        Err(e) => unreachable!("smooth fiber complex failed to assemble: {e}"),
    }
}

/// Monoid of an element of `R`, in the ambient `ℤ^{H₁} ⊕ ℤ^{H₂}`.
fn ray_vector(r: &ComplexRefinement, x: &str) -> IntVec {
    r.source().monoid(x).push_forward(&r.morphism.homs[x]).extremals()[0].clone()
}

fn assemble(p: &FiberProblem, fiber: FiberProductComplex, r: ComplexRefinement) -> Result<ResolvedFiberProduct, FiberError> {
    let free = (p.f1.source.free_dim + p.f2.source.free_dim).saturating_sub(p.target().free_dim);
    let space = CornerComplex::from_smooth_complex(r.source(), free)?;
    let n1 = p.f1.source.hypersurfaces().len();
    let n2 = p.f2.source.hypersurfaces().len();
    let rays: Vec<IntVec> = space.hypersurfaces().iter().map(|w| ray_vector(&r, w)).collect();
    let h = |pr: &ComplexMorphism, range: std::ops::Range<usize>, x: &CornerComplex, n: usize| {
        let face_map = space.faces().map(|t| (t.clone(), pr.image_of(r.morphism.image_of(t)).clone())).collect();
        let alpha = IntMat::from_rows(n, rays.iter().map(|v| v[range.clone()].to_vec()).collect());
        BMap::new(space.clone(), x.clone(), face_map, alpha)
    };
    let h1 = h(&fiber.pr1, 0..n1, &p.f1.source, n1)?;
    let h2 = h(&fiber.pr2, n1..n1 + n2, &p.f2.source, n2)?;
    debug_assert_eq!(compose(&p.f1, &h1).ok(), compose(&p.f2, &h2).ok());
    let systems = fiber
        .complex
        .ids()
        .map(|id| {
            let (a, b) = (fiber.pr1.image_of(id), fiber.pr2.image_of(id));
            (id.clone(), pair_system(p, a, b, &p.f1.face_map[a]))
        })
        .collect();
    Ok(ResolvedFiberProduct { fiber, refinement: r, space, h1, h2, systems })
}

/// Resolution along `R` (default: the natural smooth refinement of the
/// fiber complex).
pub fn resolve_fiber_product(p: &FiberProblem, r: Option<ComplexRefinement>) -> Result<ResolvedFiberProduct, FiberError> {
    if let Some(v) = b_normal_transversality(p).first_failure() {
        return Err(FiberError::TransversalityFailed(v.f1.clone(), v.f2.clone()));
    }
    let fiber = fiber_complex(p);
    let r = match r {
        Some(r) => {
            if *r.target() != fiber.complex || !r.is_smooth() || !r.validate().passed() {
                return Err(FiberError::BadRefinement);
            }
            r
        }
        None => natural_smooth_refinement(&fiber.complex)?.0,
    };
    let out = assemble(p, fiber, r)?;
    if compose(&p.f1, &out.h1)? != compose(&p.f2, &out.h2)? {
        return Err(FiberError::NotCommuting);
    }
    Ok(out)
}

/// `g: Z → [D;R]`, possibly after blowing up `Z`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Factorization {
    /// the face pair `(F₁, F₂)` into whose interiors `Z` maps
    pub component: (Id, Id),
    pub g: BMap,
    /// `β: [Z;S] → Z` when `P_Z → P_D` does not factor through `R`
    pub blowup: Option<Blowup>,
}

/// `P_Z → P_D`, `e_H ↦ (α_{g₁}(H), α_{g₂}(H))`.
fn to_fiber_complex(z: &CornerComplex, g1: &BMap, g2: &BMap, fiber: &FiberProductComplex) -> Option<ComplexMorphism> {
    let m = g1.alpha.hstack(&g2.alpha);
    let mut poset_map = BTreeMap::new();
    for f in z.faces() {
        let id = pair_id(&g1.face_map[f], &g2.face_map[f]);
        if !fiber.complex.contains(&id) {
            return None;
        }
        poset_map.insert(f.clone(), id);
    }
    let homs = z.faces().map(|f| (f.clone(), m.clone())).collect();
    Some(ComplexMorphism { source: basic_complex(z), target: fiber.complex.clone(), poset_map, homs })
}

/// Lifts `Z → P_D` into `R` if every face's exponent rows are non-negative
/// integer combinations of the rays of a single element over its image.
fn lift_into(z: &CornerComplex, psi: &ComplexMorphism, res: &ResolvedFiberProduct) -> Option<BMap> {
    let r = &res.refinement;
    let m = &psi.homs.values().next().cloned().unwrap_or_else(|| IntMat::zeros(0, 0));
    let cs = z.coordinate();
    let hyps = res.space.hypersurfaces();
    let col: BTreeMap<&Id, usize> = hyps.iter().enumerate().map(|(i, h)| (h, i)).collect();
    let ambient = m.cols();
    let mut face_map = BTreeMap::new();
    let mut rows: Vec<Option<IntVec>> = vec![None; cs.len()];
    for f in z.faces() {
        let base = &psi.poset_map[f];
        let gens: Vec<IntVec> = z.incidence(f).iter().map(|h| m.row(cs[h]).to_vec()).collect();
        let x = r
            .source()
            .ids()
            .filter(|x| r.morphism.image_of(x) == base)
            .filter(|x| {
                let s = r.source().monoid(x).push_forward(&r.morphism.homs[*x]);
                gens.iter().all(|g| s.in_support(&to_rat(g)))
            })
            .min_by_key(|x| r.source().monoid(x).dim())?
            .clone();
        let rays: Vec<Id> = res.space.incidence(&x).iter().cloned().collect();
        let basis = RatMat::from_rows(ambient, rays.iter().map(|w| to_rat(&ray_vector(r, w))).collect());
        for h in z.incidence(f) {
            let c = basis.solve_left(&to_rat(m.row(cs[h])))?;
            let mut row = vec![BigInt::zero(); col.len()];
            for (w, cw) in rays.iter().zip(&c) {
                if !cw.is_integer() || cw.is_negative() {
                    return None;
                }
                row[col[w]] = cw.to_integer();
            }
            match &rows[cs[h]] {
                Some(prev) if *prev != row => return None,
                _ => rows[cs[h]] = Some(row),
            }
        }
        face_map.insert(f.clone(), x);
    }
    let alpha = IntMat::from_rows(col.len(), rows.into_iter().map(|r| r.unwrap_or_else(|| vec![BigInt::zero(); col.len()])).collect());
    BMap::new(z.clone(), res.space.clone(), face_map, alpha).ok()
}

/// Factors commuting `gᵢ: Z → Xᵢ` through `[D;R]`, blowing up `Z` along
/// `ns(P_Z ×_{P_D} R)` when `P_Z → P_D` does not factor through `R`.
pub fn factor_through(p: &FiberProblem, g1: &BMap, g2: &BMap, res: &ResolvedFiberProduct) -> Result<Factorization, FiberError> {
    if g1.source != g2.source || g1.target != p.f1.source || g2.target != p.f2.source {
        return Err(FiberError::Manifold(ManifoldError::ChainMismatch));
    }
    if compose(&p.f1, g1)? != compose(&p.f2, g2)? {
        return Err(FiberError::NotCommuting);
    }
    let z = &g1.source;
    let top = z.faces().find(|f| z.codim(f) == 0).cloned().unwrap_or_default();
    let component = (g1.face_map[&top].clone(), g2.face_map[&top].clone());
    let psi = to_fiber_complex(z, g1, g2, &res.fiber).ok_or(FiberError::NotCommuting)?;
    if let Some(g) = lift_into(z, &psi, res) {
        check_factors(&g, g1, g2, res)?;
        return Ok(Factorization { component, g, blowup: None });
    }
    let pb = pullback_refinement(&res.refinement, &psi)?;
    let (s, _) = ns_from_locals(&psi.source, pb.locals)?;
    let beta = generalized_blowup(z, &s)?;
    let (b1, b2) = (compose(g1, &beta.blowdown)?, compose(g2, &beta.blowdown)?);
    let psi2 = to_fiber_complex(&beta.space, &b1, &b2, &res.fiber).ok_or(FiberError::NotCommuting)?;
    let g = lift_into(&beta.space, &psi2, res).ok_or(FiberError::BadRefinement)?;
    check_factors(&g, &b1, &b2, res)?;
    Ok(Factorization { component, g, blowup: Some(beta) })
}

fn check_factors(g: &BMap, g1: &BMap, g2: &BMap, res: &ResolvedFiberProduct) -> Result<(), FiberError> {
    if compose(&res.h1, g)? != *g1 || compose(&res.h2, g)? != *g2 {
        return Err(FiberError::NotCommuting);
    }
    Ok(())
}

/// Random simple b-map `model(k) → model(n)`: 0/1 exponents, each target
/// hypersurface pulling back to at most one source hypersurface.
pub fn random_simple_bmap<R: Rng>(rng: &mut R, k: usize, n: usize) -> BMap {
    let mut alpha = IntMat::zeros(k, n);
    if k > 0 {
        for j in 0..n {
            if rng.gen_bool(0.7) {
                alpha.set(rng.gen_range(0..k), j, BigInt::from(1));
            }
        }
    }
    BMap::between_models(k, n, alpha).expect("simple exponents define a b-map between models")
}

/// Pairs whose fiber monoids are not smooth, by the brute-force criterion:
/// Hilbert basis of size `dim` with unimodular coordinates.
pub fn brute_force_smooth(m: &ToricMonoid) -> bool {
    let hb = m.hilbert_basis();
    if hb.len() != m.dim() {
        return false;
    }
    let coords: Vec<IntVec> = hb.iter().map(|v| m.coords(v).expect("Hilbert basis lies in the lattice")).collect();
    let (_, d, _) = crate::exact::smith_normal_form(&IntMat::from_rows(m.dim(), coords));
    (0..m.dim()).all(|i| d.get(i, i).abs() == BigInt::from(1))
}
