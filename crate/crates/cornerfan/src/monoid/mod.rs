//! Toric monoids: a lattice intersected with a pointed rational cone that
//! spans the same space.

mod cone;

use std::fmt;
use std::sync::{Arc, OnceLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::exact::{
    dot, hnf_basis, lattice_coords, lp_feasible, rat_to_primitive, saturated_kernel,
    saturated_span, to_rat, IntMat, IntVec, RatMat, RatVec,
};

pub use cone::{extreme_rays, face_sets, facets_and_rays, parallelepiped_points, triangulate};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MonoidError {
    #[error("generators do not generate a saturated monoid; missing {missing:?}")]
    NotSaturated { missing: Vec<IntVec> },
    #[error("cone contains a line")]
    NotSharp,
    #[error("vector {0:?} is not in the support")]
    NotInSupport(IntVec),
    #[error("submonoid is not full in the ambient monoid")]
    NotFullSubmonoid,
    #[error("cone generators and lattice span different subspaces")]
    SpanMismatch,
    #[error("vector length {got} does not match ambient dimension {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("monoid is not simplicial")]
    NotSimplicial,
    #[error("monoid is not smooth")]
    NotSmooth,
}

struct Structure {
    /// extremals in lattice coordinates, aligned with `ToricMonoid::extremals`
    rays: Vec<IntVec>,
    /// primitive inward facet normals in lattice coordinates
    facets: Vec<IntVec>,
    /// face ray sets with dimension, sorted by (dim, set)
    face_sets: Vec<(Vec<usize>, usize)>,
    faces: OnceLock<Vec<Face>>,
    hilbert: OnceLock<Vec<IntVec>>,
}

/// `N_σ ∩ supp(σ)`. The lattice basis is kept in Hermite form and the
/// extremals sorted, so derived equality is equality of monoids.
#[derive(Clone)]
pub struct ToricMonoid {
    ambient_dim: usize,
    lattice: Vec<IntVec>,
    extremals: Vec<IntVec>,
    st: Arc<Structure>,
}

impl PartialEq for ToricMonoid {
    fn eq(&self, o: &Self) -> bool {
        self.ambient_dim == o.ambient_dim && self.lattice == o.lattice && self.extremals == o.extremals
    }
}

impl Eq for ToricMonoid {}

impl std::hash::Hash for ToricMonoid {
    fn hash<H: std::hash::Hasher>(&self, h: &mut H) {
        self.ambient_dim.hash(h);
        self.lattice.hash(h);
        self.extremals.hash(h);
    }
}

impl PartialOrd for ToricMonoid {
    fn partial_cmp(&self, o: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(o))
    }
}

/// Dimension first, then extremals, then lattice.
impl Ord for ToricMonoid {
    fn cmp(&self, o: &Self) -> std::cmp::Ordering {
        (self.ambient_dim, self.dim(), &self.extremals, &self.lattice).cmp(&(
            o.ambient_dim,
            o.dim(),
            &o.extremals,
            &o.lattice,
        ))
    }
}

fn fmt_vecs(f: &mut fmt::Formatter<'_>, vs: &[IntVec]) -> fmt::Result {
    write!(f, "{{")?;
    for (i, v) in vs.iter().enumerate() {
        if i > 0 {
            write!(f, ", ")?;
        }
        write!(f, "(")?;
        for (j, x) in v.iter().enumerate() {
            if j > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, ")")?;
    }
    write!(f, "}}")
}

impl fmt::Debug for ToricMonoid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Monoid(ext=")?;
        fmt_vecs(f, &self.extremals)?;
        write!(f, ", lat=")?;
        fmt_vecs(f, &self.lattice)?;
        write!(f, ")")
    }
}

/// A face `τ ≤ σ` with a supporting functional `u`: `u·v = 0` on `τ`,
/// `u·v > 0` on `σ ∖ τ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Face {
    pub monoid: ToricMonoid,
    /// indices into the parent's extremals
    pub extremals: Vec<usize>,
    /// ambient coordinates
    pub functional: IntVec,
}

impl ToricMonoid {
    pub fn trivial(ambient_dim: usize) -> Self {
        ToricMonoid {
            ambient_dim,
            lattice: Vec::new(),
            extremals: Vec::new(),
            st: Arc::new(Structure {
                rays: Vec::new(),
                facets: Vec::new(),
                face_sets: vec![(Vec::new(), 0)],
                faces: OnceLock::new(),
                hilbert: OnceLock::new(),
            }),
        }
    }

    /// The monoid `ℤ₊ⁿ`.
    pub fn orthant(n: usize) -> Self {
        let id: Vec<IntVec> = IntMat::identity(n).into_rows();
        Self::new(n, &id, &id).expect("orthant")
    }

    /// `L ∩ cone(cone_gens)` where `L` is the group generated by
    /// `lattice_gens`; the cone must span the same subspace as `L`.
    pub fn new(ambient_dim: usize, lattice_gens: &[IntVec], cone_gens: &[IntVec]) -> Result<Self, MonoidError> {
        for v in lattice_gens.iter().chain(cone_gens) {
            if v.len() != ambient_dim {
                return Err(MonoidError::DimensionMismatch { expected: ambient_dim, got: v.len() });
            }
        }
        let lattice = hnf_basis(ambient_dim, lattice_gens);
        let r = lattice.len();
        if r == 0 {
            if cone_gens.iter().any(|g| g.iter().any(|x| !x.is_zero())) {
                return Err(MonoidError::SpanMismatch);
            }
            return Ok(Self::trivial(ambient_dim));
        }
        let b = IntMat::from_rows(ambient_dim, lattice.clone()).to_rat();
        let mut coords: Vec<IntVec> = Vec::new();
        for g in cone_gens {
            if g.iter().all(|x| x.is_zero()) {
                continue;
            }
            let c = b.solve_left(&to_rat(g)).ok_or(MonoidError::SpanMismatch)?;
            coords.push(rat_to_primitive(&c));
        }
        if coords.is_empty() || IntMat::from_rows(r, coords.clone()).rank() < r {
            return Err(MonoidError::SpanMismatch);
        }
        let strict: Vec<RatVec> = coords.iter().map(|c| to_rat(c)).collect();
        if !lp_feasible(&strict, &[], &[], r).is_feasible() {
            return Err(MonoidError::NotSharp);
        }
        let (facets, rays) = facets_and_rays(&coords, r);
        Ok(Self::assemble(ambient_dim, lattice, rays, facets))
    }

    fn assemble(ambient_dim: usize, lattice: Vec<IntVec>, rays: Vec<IntVec>, facets: Vec<IntVec>) -> Self {
        let b = IntMat::from_rows(ambient_dim, lattice.clone());
        let mut pairs: Vec<(IntVec, IntVec)> = rays.into_iter().map(|c| (b.apply(&c), c)).collect();
        pairs.sort();
        let (extremals, rays): (Vec<IntVec>, Vec<IntVec>) = pairs.into_iter().unzip();
        let r = lattice.len();
        let mut face_sets: Vec<(Vec<usize>, usize)> = face_sets(&rays, &facets)
            .into_iter()
            .map(|s| {
                let d = if s.is_empty() {
                    0
                } else {
                    IntMat::from_rows(r, s.iter().map(|&i| rays[i].clone()).collect()).rank()
                };
                (s, d)
            })
            .collect();
        face_sets.sort_by(|a, b| (a.1, &a.0).cmp(&(b.1, &b.0)));
        ToricMonoid {
            ambient_dim,
            lattice,
            extremals,
            st: Arc::new(Structure {
                rays,
                facets,
                face_sets,
                faces: OnceLock::new(),
                hilbert: OnceLock::new(),
            }),
        }
    }

    /// The monoid generated by `gens`, provided it equals
    /// (group generated) ∩ (cone generated).
    pub fn from_generators(ambient_dim: usize, gens: &[IntVec]) -> Result<Self, MonoidError> {
        let m = Self::new(ambient_dim, gens, gens)?;
        let missing: Vec<IntVec> = m.hilbert_basis().iter().filter(|h| !gens.contains(h)).cloned().collect();
        if !missing.is_empty() {
            return Err(MonoidError::NotSaturated { missing });
        }
        Ok(m)
    }

    /// `σ₁ × σ₂` in `ℤ^{d₁+d₂}`.
    pub fn product(a: &ToricMonoid, b: &ToricMonoid) -> ToricMonoid {
        let d = a.ambient_dim + b.ambient_dim;
        let pad = |v: &IntVec, left: bool| -> IntVec {
            let z = vec![BigInt::zero(); if left { b.ambient_dim } else { a.ambient_dim }];
            if left {
                v.iter().cloned().chain(z).collect()
            } else {
                z.into_iter().chain(v.iter().cloned()).collect()
            }
        };
        let lat: Vec<IntVec> = a.lattice.iter().map(|v| pad(v, true)).chain(b.lattice.iter().map(|v| pad(v, false))).collect();
        let gens: Vec<IntVec> =
            a.extremals.iter().map(|v| pad(v, true)).chain(b.extremals.iter().map(|v| pad(v, false))).collect();
        if lat.is_empty() {
            return Self::trivial(d);
        }
        Self::new(d, &lat, &gens).expect("product of toric monoids")
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    /// Hermite basis of `N_σ` in ambient coordinates.
    pub fn lattice_basis(&self) -> &[IntVec] {
        &self.lattice
    }

    pub fn dim(&self) -> usize {
        self.lattice.len()
    }

    pub fn is_trivial(&self) -> bool {
        self.lattice.is_empty()
    }

    /// Primitive generators (in `N_σ`) of the extreme rays, sorted.
    pub fn extremals(&self) -> &[IntVec] {
        &self.extremals
    }

    /// Extremals in lattice coordinates.
    pub fn extremal_coords(&self) -> &[IntVec] {
        &self.st.rays
    }

    /// Inward facet normals as ambient functionals.
    pub fn facet_functionals(&self) -> Vec<IntVec> {
        self.st.facets.iter().map(|u| self.lift_functional(u)).collect()
    }

    pub fn is_simplicial(&self) -> bool {
        self.extremals.len() == self.dim()
    }

    pub fn is_smooth(&self) -> bool {
        if !self.is_simplicial() {
            return false;
        }
        if self.is_trivial() {
            return true;
        }
        let m = IntMat::from_rows(self.dim(), self.st.rays.clone());
        let (_, d, _) = crate::exact::smith_normal_form(&m);
        (0..self.dim()).all(|i| d.get(i, i).is_one())
    }

    fn basis_rat(&self) -> RatMat {
        IntMat::from_rows(self.ambient_dim, self.lattice.clone()).to_rat()
    }

    /// Rational lattice coordinates of an ambient vector in the span.
    pub fn coords_rat(&self, v: &[BigRational]) -> Option<RatVec> {
        if v.len() != self.ambient_dim {
            return None;
        }
        if self.is_trivial() {
            return v.iter().all(|x| x.is_zero()).then(Vec::new);
        }
        self.basis_rat().solve_left(v)
    }

    /// Integer lattice coordinates, if `v ∈ N_σ`.
    pub fn coords(&self, v: &[BigInt]) -> Option<IntVec> {
        if v.len() != self.ambient_dim {
            return None;
        }
        lattice_coords(&self.lattice, v)
    }

    pub fn from_coords(&self, c: &[BigInt]) -> IntVec {
        IntMat::from_rows(self.ambient_dim, self.lattice.clone()).apply(c)
    }

    fn lift_functional(&self, u: &[BigInt]) -> IntVec {
        if self.is_trivial() {
            return vec![BigInt::zero(); self.ambient_dim];
        }
        // B·uᵀ = u_lat
        let bt = self.basis_rat().transpose();
        let x = bt.solve_left(&to_rat(u)).expect("lattice basis has full rank");
        if x.iter().all(|q| q.is_zero()) {
            return vec![BigInt::zero(); self.ambient_dim];
        }
        rat_to_primitive(&x)
    }

    fn coords_in_support(&self, c: &[BigRational]) -> bool {
        self.st.facets.iter().all(|u| !dot(&to_rat(u), c).is_negative())
    }

    /// `v ∈ σ`
    pub fn contains(&self, v: &[BigInt]) -> bool {
        match self.coords(v) {
            Some(c) => self.coords_in_support(&to_rat(&c)),
            None => false,
        }
    }

    /// `v ∈ supp(σ)` for a rational ambient vector.
    pub fn in_support(&self, v: &[BigRational]) -> bool {
        match self.coords_rat(v) {
            Some(c) => self.coords_in_support(&c),
            None => false,
        }
    }

    /// `v` in the relative interior of `supp(σ)`.
    pub fn in_relative_interior(&self, v: &[BigRational]) -> bool {
        match self.coords_rat(v) {
            Some(c) => self.st.facets.iter().all(|u| dot(&to_rat(u), &c).is_positive()),
            None => false,
        }
    }

    pub fn contains_support_of(&self, other: &ToricMonoid) -> bool {
        other.extremals.iter().all(|e| self.in_support(&to_rat(e)))
    }

    /// All faces, `{0}` first and `σ` last, ordered by dimension.
    pub fn faces(&self) -> &[Face] {
        self.st.faces.get_or_init(|| {
            self.st
                .face_sets
                .iter()
                .map(|(set, _)| self.face_from_set(set))
                .collect()
        })
    }

    fn face_from_set(&self, set: &[usize]) -> Face {
        let r = self.dim();
        let monoid = if set.is_empty() {
            ToricMonoid::trivial(self.ambient_dim)
        } else if set.len() == self.extremals.len() {
            self.clone()
        } else {
            let rays: Vec<IntVec> = set.iter().map(|&i| self.st.rays[i].clone()).collect();
            let sat = saturated_span(r, &rays);
            let lat: Vec<IntVec> = sat.iter().map(|c| self.from_coords(c)).collect();
            let gens: Vec<IntVec> = set.iter().map(|&i| self.extremals[i].clone()).collect();
            ToricMonoid::new(self.ambient_dim, &lat, &gens).expect("face of a toric monoid")
        };
        let mut u = vec![BigInt::zero(); r];
        for f in &self.st.facets {
            if set.iter().all(|&i| dot(f, &self.st.rays[i]).is_zero()) {
                for (a, b) in u.iter_mut().zip(f) {
                    *a += b;
                }
            }
        }
        Face { monoid, extremals: set.to_vec(), functional: self.lift_functional(&u) }
    }

    /// The unique minimal face whose support contains `v`.
    pub fn smallest_face_containing(&self, v: &[BigRational]) -> Result<Face, MonoidError> {
        let c = self
            .coords_rat(v)
            .filter(|c| self.coords_in_support(c))
            .ok_or_else(|| MonoidError::NotInSupport(rat_to_primitive(v)))?;
        let set: Vec<usize> = (0..self.extremals.len())
            .filter(|&i| {
                self.st
                    .facets
                    .iter()
                    .all(|f| !dot(&to_rat(f), &c).is_zero() || dot(f, &self.st.rays[i]).is_zero())
            })
            .collect();
        let idx = self
            .st
            .face_sets
            .iter()
            .position(|(s, _)| *s == set)
            .expect("tight sets are faces");
        Ok(self.faces()[idx].clone())
    }

    pub fn smallest_face_containing_monoid(&self, other: &ToricMonoid) -> Result<Face, MonoidError> {
        let mut sum = vec![BigRational::zero(); self.ambient_dim];
        for e in &other.extremals {
            for (s, x) in sum.iter_mut().zip(e) {
                *s += BigRational::from_integer(x.clone());
            }
        }
        self.smallest_face_containing(&sum)
    }

    /// `τ ≤ σ` as monoids (lattice included).
    pub fn is_face_of(&self, sigma: &ToricMonoid) -> bool {
        sigma.faces().iter().any(|f| f.monoid == *self)
    }

    /// Unique minimal generating set of `σ`, sorted.
    pub fn hilbert_basis(&self) -> &[IntVec] {
        self.st.hilbert.get_or_init(|| {
            if self.is_trivial() {
                return Vec::new();
            }
            let r = self.dim();
            let full: Vec<usize> = (0..self.extremals.len()).collect();
            let simplices = triangulate(&full, r, &self.st.face_sets);
            let mut cands: Vec<IntVec> = self.st.rays.clone();
            for s in &simplices {
                let gens: Vec<IntVec> = s.iter().map(|&i| self.st.rays[i].clone()).collect();
                cands.extend(parallelepiped_points(&gens));
            }
            cands.sort();
            cands.dedup();
            let in_cone = |c: &IntVec| self.st.facets.iter().all(|u| !dot(u, c).is_negative());
            let mut basis: Vec<IntVec> = cands
                .iter()
                .filter(|x| {
                    !cands.iter().any(|y| {
                        y != *x && in_cone(&x.iter().zip(y).map(|(a, b)| a - b).collect())
                    })
                })
                .map(|c| self.from_coords(c))
                .collect();
            basis.sort();
            basis
        })
    }

    /// `σ ∩ span(K)` where `K` is a saturated sublattice of `ℤʳ` given in
    /// lattice coordinates; the result carries lattice `K ∩ span(σ ∩ span K)`.
    pub fn restrict_to_sublattice(&self, k: &[IntVec]) -> ToricMonoid {
        if k.is_empty() || self.is_trivial() {
            return ToricMonoid::trivial(self.ambient_dim);
        }
        let q = k.len();
        let kmat = IntMat::from_rows(self.dim(), k.to_vec());
        // inequality u on c = y·K becomes (K uᵀ) on y
        let ineqs: Vec<IntVec> = self.st.facets.iter().map(|u| kmat.mul(&IntMat::from_rows(1, u.iter().map(|x| vec![x.clone()]).collect())).column(0)).collect();
        let mut all = ineqs;
        // make sure the system has full rank: K is injective and σ pointed, so
        // the facets restricted to span K have rank q
        all.sort();
        all.dedup();
        let rays = extreme_rays(&all, q);
        if rays.is_empty() {
            return ToricMonoid::trivial(self.ambient_dim);
        }
        let lat_y = saturated_span(q, &rays);
        let lat: Vec<IntVec> = lat_y.iter().map(|y| self.from_coords(&kmat.apply(y))).collect();
        let gens: Vec<IntVec> = rays.iter().map(|y| self.from_coords(&kmat.apply(y))).collect();
        ToricMonoid::new(self.ambient_dim, &lat, &gens).expect("restriction of a toric monoid")
    }

    /// The full submonoid `σ ∩ M` for `M` spanned by integral vectors, with
    /// lattice `N_σ ∩ M`.
    pub fn intersect_with_subspace(&self, m: &[IntVec]) -> ToricMonoid {
        if self.is_trivial() || m.iter().all(|v| v.iter().all(|x| x.is_zero())) {
            return ToricMonoid::trivial(self.ambient_dim);
        }
        let perp = saturated_kernel(&IntMat::from_rows(self.ambient_dim, m.to_vec()).transpose());
        let k = if perp.is_empty() {
            IntMat::identity(self.dim()).into_rows()
        } else {
            let b = IntMat::from_rows(self.ambient_dim, self.lattice.clone());
            let p = IntMat::from_rows(self.ambient_dim, perp).transpose();
            saturated_kernel(&b.mul(&p))
        };
        self.restrict_to_sublattice(&k)
    }

    /// `τ` equals `σ ∩ supp(τ)`.
    pub fn is_full_in(&self, sigma: &ToricMonoid) -> bool {
        if self.ambient_dim != sigma.ambient_dim || !sigma.contains_support_of(self) {
            return false;
        }
        if self.is_trivial() {
            return true;
        }
        *self == sigma.full_submonoid(&self.extremals)
    }

    /// `σ ∩ cone(gens)` with lattice `N_σ ∩ span(gens)`; `gens ⊂ supp(σ)`.
    pub fn full_submonoid(&self, gens: &[IntVec]) -> ToricMonoid {
        if gens.iter().all(|g| g.iter().all(|x| x.is_zero())) {
            return ToricMonoid::trivial(self.ambient_dim);
        }
        let coords: Vec<IntVec> = gens
            .iter()
            .map(|g| rat_to_primitive(&self.coords_rat(&to_rat(g)).expect("generator in span")))
            .collect();
        let sat = saturated_span(self.dim(), &coords);
        let lat: Vec<IntVec> = sat.iter().map(|c| self.from_coords(c)).collect();
        ToricMonoid::new(self.ambient_dim, &lat, gens).expect("full submonoid")
    }

    /// `σ ∩ (supp τ₁ + supp τ₂)` for full submonoids `τᵢ`.
    pub fn join(&self, t1: &ToricMonoid, t2: &ToricMonoid) -> Result<ToricMonoid, MonoidError> {
        if !t1.is_full_in(self) || !t2.is_full_in(self) {
            return Err(MonoidError::NotFullSubmonoid);
        }
        let gens: Vec<IntVec> = t1.extremals.iter().chain(&t2.extremals).cloned().collect();
        Ok(self.full_submonoid(&gens))
    }

    /// Image under an injective linear map `v ↦ v·M`.
    pub fn push_forward(&self, m: &IntMat) -> ToricMonoid {
        assert_eq!(m.rows(), self.ambient_dim, "map does not start at this ambient lattice");
        if self.is_trivial() {
            return ToricMonoid::trivial(m.cols());
        }
        let lat: Vec<IntVec> = self.lattice.iter().map(|v| m.apply(v)).collect();
        let gens: Vec<IntVec> = self.extremals.iter().map(|v| m.apply(v)).collect();
        ToricMonoid::new(m.cols(), &lat, &gens).expect("injective image of a toric monoid")
    }

    /// `ℤ₊⟨extremals⟩` with the lattice they generate.
    pub fn smoothing(&self) -> Result<ToricMonoid, MonoidError> {
        if !self.is_simplicial() {
            return Err(MonoidError::NotSimplicial);
        }
        Ok(ToricMonoid::new(self.ambient_dim, &self.extremals, &self.extremals).expect("simplicial"))
    }

    /// Sum of the extremals.
    pub fn extremal_sum(&self) -> IntVec {
        let mut v = vec![BigInt::zero(); self.ambient_dim];
        for e in &self.extremals {
            for (a, b) in v.iter_mut().zip(e) {
                *a += b;
            }
        }
        v
    }

    /// Non-simplicial dimension: dimension of the largest face lying in the
    /// span of the extremals that are not independent of all the others.
    pub fn nsdim(&self) -> usize {
        let n = self.extremals.len();
        let r = self.dim();
        let rays = &self.st.rays;
        let rank_of = |idx: &[usize]| -> usize {
            if idx.is_empty() {
                0
            } else {
                IntMat::from_rows(r, idx.iter().map(|&i| rays[i].clone()).collect()).rank()
            }
        };
        let all: Vec<usize> = (0..n).collect();
        let full = rank_of(&all);
        // vᵢ is independent of the others iff dropping it lowers the rank
        let dependent: Vec<usize> = (0..n)
            .filter(|&i| {
                let rest: Vec<usize> = all.iter().copied().filter(|&j| j != i).collect();
                rank_of(&rest) == full
            })
            .collect();
        if dependent.is_empty() {
            return 0;
        }
        let span = IntMat::from_rows(r, dependent.iter().map(|&i| rays[i].clone()).collect());
        let span_rank = span.rank();
        self.st
            .face_sets
            .iter()
            .filter(|(s, _)| {
                s.iter().all(|&i| {
                    let mut m = span.clone().into_rows();
                    m.push(rays[i].clone());
                    IntMat::from_rows(r, m).rank() == span_rank
                })
            })
            .map(|(_, d)| *d)
            .max()
            .unwrap_or(0)
    }
}

impl fmt::Display for ToricMonoid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ℤ₊")?;
        fmt_vecs(f, &self.extremals)
    }
}

/// Additive map `σ → σ'` given by `v ↦ v·M` on ambient lattices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonoidHom {
    pub source: ToricMonoid,
    pub target: ToricMonoid,
    pub matrix: IntMat,
}

impl MonoidHom {
    pub fn new(source: ToricMonoid, target: ToricMonoid, matrix: IntMat) -> Result<Self, MonoidError> {
        if matrix.rows() != source.ambient_dim() || matrix.cols() != target.ambient_dim() {
            return Err(MonoidError::DimensionMismatch { expected: source.ambient_dim(), got: matrix.rows() });
        }
        let h = MonoidHom { source, target, matrix };
        if !h.is_valid() {
            return Err(MonoidError::NotInSupport(
                h.source.hilbert_basis().iter().map(|v| h.matrix.apply(v)).find(|w| !h.target.contains(w)).unwrap(),
            ));
        }
        Ok(h)
    }

    pub fn identity(m: &ToricMonoid) -> Self {
        MonoidHom { source: m.clone(), target: m.clone(), matrix: IntMat::identity(m.ambient_dim()) }
    }

    /// Every Hilbert-basis element maps into the target.
    pub fn is_valid(&self) -> bool {
        self.source.hilbert_basis().iter().all(|v| self.target.contains(&self.matrix.apply(v)))
    }

    pub fn apply(&self, v: &[BigInt]) -> IntVec {
        self.matrix.apply(v)
    }

    pub fn is_injective(&self) -> bool {
        if self.source.is_trivial() {
            return true;
        }
        let b = IntMat::from_rows(self.source.ambient_dim(), self.source.lattice_basis().to_vec());
        b.mul(&self.matrix).rank() == self.source.dim()
    }

    /// `self ∘ g`
    pub fn compose_after(&self, g: &MonoidHom) -> MonoidHom {
        MonoidHom { source: g.source.clone(), target: self.target.clone(), matrix: g.matrix.mul(&self.matrix) }
    }
}

/// `σ₁ ×_σ σ₂` with its two projections.
pub fn fiber_product(phi1: &MonoidHom, phi2: &MonoidHom) -> (ToricMonoid, MonoidHom, MonoidHom) {
    assert_eq!(phi1.target.ambient_dim(), phi2.target.ambient_dim(), "homomorphisms need a common target");
    let (s1, s2) = (&phi1.source, &phi2.source);
    let prod = ToricMonoid::product(s1, s2);
    let (d1, d2) = (s1.ambient_dim(), s2.ambient_dim());
    let p1 = IntMat::identity(d1).vstack(&IntMat::zeros(d2, d1));
    let p2 = IntMat::zeros(d1, d2).vstack(&IntMat::identity(d2));
    let fp = if prod.is_trivial() {
        prod.clone()
    } else {
        // (v, w) ↦ φ₁v − φ₂w on the product lattice
        let neg = phi2.matrix.map(|x| -x);
        let diff = phi1.matrix.vstack(&neg);
        let b = IntMat::from_rows(d1 + d2, prod.lattice_basis().to_vec());
        let k = saturated_kernel(&b.mul(&diff));
        prod.restrict_to_sublattice(&k)
    };
    let pr1 = MonoidHom { source: fp.clone(), target: s1.clone(), matrix: p1 };
    let pr2 = MonoidHom { source: fp.clone(), target: s2.clone(), matrix: p2 };
    (fp, pr1, pr2)
}
