//! Refinements of a single toric monoid and the subdivisions that produce
//! them: trivial, star (plain and weighted), smoothing and planar.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::exact::{
    lp_feasible, primitive, saturated_kernel, to_rat, IntMat, IntVec, RatVec,
};
use crate::monoid::{extreme_rays, Face, MonoidError, ToricMonoid};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RefinementError {
    #[error("vector {0:?} is not a nonzero element of the monoid")]
    VNotInMonoid(IntVec),
    #[error("monoid is not simplicial")]
    NotSimplicial,
    #[error("monoid is not smooth")]
    NotSmooth,
    #[error("not a face of the base monoid")]
    NotAFace,
    #[error("weights must be at least 1")]
    BadWeights,
    #[error(transparent)]
    Monoid(#[from] MonoidError),
}

/// A face-closed collection of submonoids of `base` whose supports cover
/// `supp(base)` and meet along common faces. Members are kept sorted.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MonoidRefinement {
    base: ToricMonoid,
    members: Vec<ToricMonoid>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    NotSubmonoid { member: ToricMonoid },
    NotFaceClosed { member: ToricMonoid, missing: ToricMonoid },
    BadIntersection { a: ToricMonoid, b: ToricMonoid },
    NotCovered { witness: RatVec },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Report {
    Pass,
    Fail(Violation),
}

impl Report {
    pub fn passed(&self) -> bool {
        matches!(self, Report::Pass)
    }
}

fn closure(members: impl IntoIterator<Item = ToricMonoid>) -> Vec<ToricMonoid> {
    let mut out: Vec<ToricMonoid> = Vec::new();
    for m in members {
        for f in m.faces() {
            out.push(f.monoid.clone());
        }
    }
    out.sort();
    out.dedup();
    out
}

/// Primitive ambient directions, sorted; identifies a cone.
pub fn cone_key(m: &ToricMonoid) -> Vec<IntVec> {
    let mut v: Vec<IntVec> = m.extremals().iter().map(|e| primitive(e).expect("nonzero")).collect();
    v.sort();
    v
}

fn perp(m: &ToricMonoid) -> Vec<IntVec> {
    if m.is_trivial() {
        return IntMat::identity(m.ambient_dim()).into_rows();
    }
    saturated_kernel(&IntMat::from_rows(m.ambient_dim(), m.lattice_basis().to_vec()).transpose())
}

/// Primitive rays of `supp a ∩ supp b` in ambient coordinates.
pub fn cone_intersection(a: &ToricMonoid, b: &ToricMonoid) -> Vec<IntVec> {
    let d = a.ambient_dim();
    let mut rows: Vec<IntVec> = Vec::new();
    for m in [a, b] {
        rows.extend(m.facet_functionals());
        for p in perp(m) {
            rows.push(p.iter().map(|x| -x).collect());
            rows.push(p);
        }
    }
    rows.retain(|r| r.iter().any(|x| !x.is_zero()));
    rows.sort();
    rows.dedup();
    extreme_rays(&rows, d)
}

impl MonoidRefinement {
    /// Closes `members` under faces; no validation.
    pub fn new(base: ToricMonoid, members: impl IntoIterator<Item = ToricMonoid>) -> Self {
        MonoidRefinement { base, members: closure(members) }
    }

    pub fn trivial(sigma: &ToricMonoid) -> Self {
        Self::new(sigma.clone(), [sigma.clone()])
    }

    pub fn base(&self) -> &ToricMonoid {
        &self.base
    }

    pub fn members(&self) -> &[ToricMonoid] {
        &self.members
    }

    pub fn is_trivial(&self) -> bool {
        self.members.len() == self.base.faces().len() && self.members.contains(&self.base)
    }

    pub fn is_smooth(&self) -> bool {
        self.members.iter().all(|m| m.is_smooth())
    }

    pub fn is_simplicial(&self) -> bool {
        self.members.iter().all(|m| m.is_simplicial())
    }

    /// Members that are not a face of another member.
    pub fn maximal_members(&self) -> Vec<ToricMonoid> {
        self.members
            .iter()
            .filter(|m| {
                !self.members.iter().any(|n| n.dim() > m.dim() && n.contains_support_of(m))
            })
            .cloned()
            .collect()
    }

    /// Members whose support lies in the relative interior of `supp(base)`
    /// apart from the origin, i.e. those not inside a proper face.
    pub fn interior_members(&self) -> Vec<ToricMonoid> {
        self.members
            .iter()
            .filter(|m| {
                self.base.smallest_face_containing_monoid(m).map(|f| f.monoid == self.base).unwrap_or(false)
            })
            .cloned()
            .collect()
    }

    pub fn validate(&self) -> Report {
        let base = &self.base;
        for m in &self.members {
            let sub = base.contains_support_of(m) && m.lattice_basis().iter().all(|v| base.coords(v).is_some());
            if !sub {
                return Report::Fail(Violation::NotSubmonoid { member: m.clone() });
            }
        }
        for m in &self.members {
            for f in m.faces() {
                if self.members.binary_search(&f.monoid).is_err() {
                    return Report::Fail(Violation::NotFaceClosed { member: m.clone(), missing: f.monoid.clone() });
                }
            }
        }
        let maximal = self.maximal_members();
        for (i, a) in maximal.iter().enumerate() {
            for b in &maximal[i + 1..] {
                if !meet_in_common_face(a, b) {
                    return Report::Fail(Violation::BadIntersection { a: a.clone(), b: b.clone() });
                }
            }
        }
        match self.cover_witness(&maximal) {
            Some(w) => Report::Fail(Violation::NotCovered { witness: w }),
            None => Report::Pass,
        }
    }

    fn covered(&self, p: &[BigRational]) -> bool {
        self.members.iter().any(|m| m.in_support(p))
    }

    fn cover_witness(&self, maximal: &[ToricMonoid]) -> Option<RatVec> {
        let base = &self.base;
        if base.is_trivial() {
            return None;
        }
        let probe = |p: RatVec| -> Option<RatVec> { (!self.covered(&p)).then_some(p) };
        for e in base.extremals() {
            if let Some(w) = probe(to_rat(e)) {
                return Some(w);
            }
        }
        if let Some(w) = probe(to_rat(&base.extremal_sum())) {
            return Some(w);
        }
        if let Some(m) = maximal.iter().find(|m| m.dim() < base.dim()) {
            // a lower-dimensional maximal member: step off it into the base
            let c = to_rat(&m.extremal_sum());
            let s = to_rat(&base.extremal_sum());
            for k in 1..64u32 {
                let t = BigRational::new(BigInt::one(), BigInt::from(k));
                let p: RatVec = c.iter().zip(&s).map(|(x, y)| x + &t * y).collect();
                if let Some(w) = probe(p) {
                    return Some(w);
                }
            }
            return Some(to_rat(&base.extremal_sum()));
        }
        let base_facets = base.facets();
        for m in maximal {
            for f in m.faces().iter().filter(|f| f.monoid.dim() + 1 == m.dim()) {
                let on_boundary = base_facets.iter().any(|bf| bf.monoid.contains_support_of(&f.monoid));
                if on_boundary {
                    continue;
                }
                let key = cone_key(&f.monoid);
                let shared = maximal
                    .iter()
                    .filter(|n| *n != m)
                    .filter(|n| n.faces().iter().any(|g| g.monoid.dim() == f.monoid.dim() && cone_key(&g.monoid) == key))
                    .count();
                if shared == 1 {
                    continue;
                }
                let c = to_rat(&f.monoid.extremal_sum());
                let out: RatVec = to_rat(&f.functional).iter().map(|x| -x).collect();
                // f.functional is zero on the facet and positive on m; step against it
                let dir = base
                    .coords_rat(&out)
                    .map(|_| out.clone())
                    .unwrap_or_else(|| project_into_span(base, &out));
                for k in 1..64u32 {
                    let t = BigRational::new(BigInt::one(), BigInt::from(k) * BigInt::from(k));
                    let p: RatVec = c.iter().zip(&dir).map(|(x, y)| x + &t * y).collect();
                    if base.in_support(&p) && !self.covered(&p) {
                        return Some(p);
                    }
                }
                return Some(c);
            }
        }
        None
    }

    /// `R(τ)`: members whose support lies in the face `τ`.
    pub fn localize(&self, tau: &ToricMonoid) -> Result<MonoidRefinement, RefinementError> {
        if !tau.is_face_of(&self.base) {
            return Err(RefinementError::NotAFace);
        }
        let members: Vec<ToricMonoid> = self.members.iter().filter(|m| tau.contains_support_of(m)).cloned().collect();
        Ok(MonoidRefinement { base: tau.clone(), members })
    }

    /// Star subdivision of every member whose support contains `v`.
    pub fn star_at(&self, v: &[BigInt]) -> Result<MonoidRefinement, RefinementError> {
        let vr = to_rat(v);
        if v.iter().all(|x| x.is_zero()) || !self.base.in_support(&vr) {
            return Err(RefinementError::VNotInMonoid(v.to_vec()));
        }
        let mut out: Vec<ToricMonoid> = Vec::new();
        for m in &self.members {
            if !m.in_support(&vr) {
                out.push(m.clone());
                continue;
            }
            for f in m.faces() {
                if f.monoid.in_support(&vr) {
                    continue;
                }
                let mut gens = f.monoid.extremals().to_vec();
                gens.push(v.to_vec());
                out.push(m.full_submonoid(&gens));
            }
        }
        Ok(MonoidRefinement::new(self.base.clone(), out))
    }

    /// Member-wise smoothing; every member must be simplicial.
    pub fn smoothed(&self) -> Result<MonoidRefinement, RefinementError> {
        let mut out = Vec::with_capacity(self.members.len());
        for m in &self.members {
            out.push(m.smoothing().map_err(|_| RefinementError::NotSimplicial)?);
        }
        Ok(MonoidRefinement::new(self.base.clone(), out))
    }

    /// Image under an injective map onto (a face of) another monoid.
    pub fn push_forward(&self, m: &IntMat, new_base: &ToricMonoid) -> MonoidRefinement {
        MonoidRefinement::new(new_base.clone(), self.members.iter().map(|x| x.push_forward(m)))
    }
}

fn project_into_span(base: &ToricMonoid, v: &[BigRational]) -> RatVec {
    // orthogonal projection onto span(N_base)
    let b = IntMat::from_rows(base.ambient_dim(), base.lattice_basis().to_vec()).to_rat();
    let g = b.mul(&b.transpose());
    let ginv = g.inverse().expect("basis is independent");
    // coefficients c = (B Bᵀ)⁻¹ B v, projection = c·B
    let bvt: RatVec = (0..b.rows()).map(|i| crate::exact::dot(b.row(i), v)).collect();
    let c = ginv.apply(&bvt);
    b.apply(&c)
}

/// Supports of `a` and `b` meet in a common face, and the two faces agree
/// as monoids.
pub fn meet_in_common_face(a: &ToricMonoid, b: &ToricMonoid) -> bool {
    let rays = cone_intersection(a, b);
    let mut sum = vec![BigRational::zero(); a.ambient_dim()];
    for r in &rays {
        for (s, x) in sum.iter_mut().zip(r) {
            *s += BigRational::from_integer(x.clone());
        }
    }
    let (Ok(fa), Ok(fb)) = (a.smallest_face_containing(&sum), b.smallest_face_containing(&sum)) else {
        return false;
    };
    let mut key = rays.clone();
    key.sort();
    cone_key(&fa.monoid) == key && fa.monoid == fb.monoid
}

impl ToricMonoid {
    /// Codimension-one faces.
    pub fn facets(&self) -> Vec<Face> {
        self.faces().iter().filter(|f| f.monoid.dim() + 1 == self.dim()).cloned().collect()
    }
}

/// `S(σ, v)`.
pub fn star_subdivide(sigma: &ToricMonoid, v: &[BigInt]) -> Result<MonoidRefinement, RefinementError> {
    if !sigma.contains(v) || v.iter().all(|x| x.is_zero()) {
        return Err(RefinementError::VNotInMonoid(v.to_vec()));
    }
    MonoidRefinement::trivial(sigma).star_at(v)
}

/// `S(σ, v_{F,n})` with `v_{F,n} = Σ n(i)·eᵢ` over the extremals of `F`,
/// weights listed in the order of `face.extremals()`.
pub fn weighted_star_subdivide(sigma: &ToricMonoid, face: &ToricMonoid, weights: &[u64]) -> Result<MonoidRefinement, RefinementError> {
    if !face.is_face_of(sigma) {
        return Err(RefinementError::NotAFace);
    }
    if weights.len() != face.extremals().len() || weights.iter().any(|&w| w < 1) {
        return Err(RefinementError::BadWeights);
    }
    let mut v = vec![BigInt::zero(); sigma.ambient_dim()];
    for (e, &w) in face.extremals().iter().zip(weights) {
        for (a, b) in v.iter_mut().zip(e) {
            *a += b * BigInt::from(w);
        }
    }
    star_subdivide(sigma, &v)
}

/// Faces of `ℤ₊⟨extremals(σ)⟩`.
pub fn smoothing(sigma: &ToricMonoid) -> Result<MonoidRefinement, RefinementError> {
    let sm = sigma.smoothing().map_err(|_| RefinementError::NotSimplicial)?;
    Ok(MonoidRefinement::new(sigma.clone(), [sm]))
}

/// `τ ∩ M = {0}` for the cone of `τ`.
fn meets_trivially(tau: &ToricMonoid, mperp: &[IntVec]) -> bool {
    if tau.is_trivial() {
        return true;
    }
    let ext = tau.extremals();
    let k = ext.len();
    let strict = vec![vec![BigRational::one(); k]];
    let nonneg: Vec<RatVec> = (0..k)
        .map(|i| (0..k).map(|j| if i == j { BigRational::one() } else { BigRational::zero() }).collect())
        .collect();
    let zero: Vec<RatVec> = mperp
        .iter()
        .map(|p| ext.iter().map(|e| BigRational::from_integer(crate::exact::dot(p, e))).collect())
        .collect();
    !lp_feasible(&strict, &zero, &nonneg, k).is_feasible()
}

fn subspace_perp(d: usize, m: &[IntVec]) -> Vec<IntVec> {
    if m.iter().all(|v| v.iter().all(|x| x.is_zero())) {
        return IntMat::identity(d).into_rows();
    }
    saturated_kernel(&IntMat::from_rows(d, m.to_vec()).transpose())
}

/// `Λ`: the maximal faces of `σ` meeting `σ ∩ M` trivially.
pub fn maximal_faces_avoiding(sigma: &ToricMonoid, m: &[IntVec]) -> Result<Vec<ToricMonoid>, RefinementError> {
    if !sigma.is_smooth() {
        return Err(RefinementError::NotSmooth);
    }
    let p = subspace_perp(sigma.ambient_dim(), m);
    let avoiding: Vec<ToricMonoid> =
        sigma.faces().iter().map(|f| f.monoid.clone()).filter(|t| meets_trivially(t, &p)).collect();
    Ok(avoiding
        .iter()
        .filter(|t| !avoiding.iter().any(|u| u.dim() > t.dim() && u.contains_support_of(t)))
        .cloned()
        .collect())
}

/// `S(σ, μ)` for `μ = σ ∩ M`: all faces of the joins `μ ∗ τ`, `τ ∈ Λ`.
pub fn planar_refine(sigma: &ToricMonoid, m: &[IntVec]) -> Result<MonoidRefinement, RefinementError> {
    let lambda = maximal_faces_avoiding(sigma, m)?;
    let mu = sigma.intersect_with_subspace(m);
    let mut members = Vec::new();
    for t in &lambda {
        members.push(sigma.join(&mu, t)?);
    }
    Ok(MonoidRefinement::new(sigma.clone(), members))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SampleReport {
    pub points: usize,
    pub uncovered: Vec<RatVec>,
    pub overlaps: Vec<RatVec>,
}

impl SampleReport {
    pub fn violations(&self) -> usize {
        self.uncovered.len() + self.overlaps.len()
    }
}

/// Random rational points of `supp(base)`.
pub fn sample_support(base: &ToricMonoid, n: usize, rng: &mut impl Rng) -> Vec<RatVec> {
    let ext = base.extremals();
    (0..n)
        .map(|_| {
            let den = BigInt::from(rng.gen_range(1..=12));
            let mut p = vec![BigRational::zero(); base.ambient_dim()];
            for e in ext {
                let w = BigRational::new(BigInt::from(rng.gen_range(0..=20)), den.clone());
                for (a, b) in p.iter_mut().zip(e) {
                    *a += &w * BigRational::from_integer(b.clone());
                }
            }
            p
        })
        .collect()
}

/// Sampling oracle: each point lies in some member support, and in the
/// relative interior of at most one maximal member.
pub fn sample_cover(r: &MonoidRefinement, n: usize, seed: u64) -> SampleReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pts = sample_support(r.base(), n, &mut rng);
    let maximal = r.maximal_members();
    let mut rep = SampleReport { points: pts.len(), uncovered: Vec::new(), overlaps: Vec::new() };
    for p in pts {
        if !r.members().iter().any(|m| m.in_support(&p)) {
            rep.uncovered.push(p.clone());
        }
        if maximal.iter().filter(|m| m.in_relative_interior(&p)).count() > 1 {
            rep.overlaps.push(p);
        }
    }
    rep
}
