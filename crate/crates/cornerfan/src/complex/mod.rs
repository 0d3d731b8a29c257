//! Monoidal complexes over finite posets, their morphisms and refinements.
//!
//! Element ids are strings and every ordered traversal is lexicographic in
//! them, which keeps the order-dependent algorithms reproducible.

mod fiber;
mod refine;

use std::collections::{BTreeMap, BTreeSet};

use crate::exact::IntMat;
use crate::monoid::{MonoidHom, ToricMonoid};

pub use fiber::{fiber_product_complex, mutual_smooth_refinement, product, pullback_refinement, FiberProductComplex, MutualRefinement};
pub(crate) use refine::star_locals;
pub use refine::{
    assemble_from_local, extend_refinement, natural_smooth_refinement, ns_from_locals, planar_refine_complex,
    smooth_complex, star_subdivide_complex, ComplexRefinement, ExtensionReport, NsStep,
};

pub type Id = String;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ComplexError {
    #[error("unknown element {0}")]
    UnknownId(Id),
    #[error("subset is not downward closed: {below} ≤ {above} is missing")]
    NotDownwardComplete { below: Id, above: Id },
    #[error("local refinements disagree on face {face} of {over}")]
    IncompatibleLocalizations { face: Id, over: Id },
    #[error("vector is not a nonzero element of {0}")]
    VNotInMonoid(Id),
    #[error("more than one monoid maps to {0}")]
    MultiplePreimages(Id),
    #[error("image in {0} is not the intersection with a subspace")]
    ImageNotPlanar(Id),
    #[error("monoid {0} is not simplicial")]
    NotSimplicial(Id),
    #[error("complex is not smooth")]
    NotSmooth,
    #[error("invalid input: {0}")]
    Invalid(String),
}

/// A finite poset with a toric monoid per element and, for each relation
/// `a < b`, an injective face map `v ↦ v·M` onto a face of `σ_b`.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct MonoidalComplex {
    monoids: BTreeMap<Id, ToricMonoid>,
    maps: BTreeMap<(Id, Id), IntMat>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ComplexReport {
    Pass,
    Fail { property: &'static str, detail: String },
}

impl ComplexReport {
    pub fn passed(&self) -> bool {
        matches!(self, ComplexReport::Pass)
    }

    fn fail(property: &'static str, detail: String) -> Self {
        ComplexReport::Fail { property, detail }
    }
}

impl MonoidalComplex {
    /// Raw constructor: `maps` must already contain every strict relation.
    pub fn new(monoids: BTreeMap<Id, ToricMonoid>, maps: BTreeMap<(Id, Id), IntMat>) -> Self {
        MonoidalComplex { monoids, maps }
    }

    /// Builds the transitive closure from maps given on a generating set of
    /// relations, composing along chains. Conflicting compositions are an error.
    pub fn from_generating_maps(
        monoids: BTreeMap<Id, ToricMonoid>,
        generating: BTreeMap<(Id, Id), IntMat>,
    ) -> Result<Self, ComplexError> {
        for (a, b) in generating.keys() {
            for x in [a, b] {
                if !monoids.contains_key(x) {
                    return Err(ComplexError::UnknownId(x.clone()));
                }
            }
        }
        let mut maps = generating;
        loop {
            let mut added = Vec::new();
            for ((a, b), m1) in &maps {
                for ((b2, c), m2) in maps.range((b.clone(), String::new())..) {
                    if b2 != b {
                        break;
                    }
                    let m = m1.mul(m2);
                    match maps.get(&(a.clone(), c.clone())) {
                        Some(existing) if *existing != m => {
                            return Err(ComplexError::Invalid(format!("face maps do not compose along {a} < {b} < {c}")));
                        }
                        Some(_) => {}
                        None => added.push(((a.clone(), c.clone()), m)),
                    }
                }
            }
            if added.is_empty() {
                break;
            }
            for (k, m) in added {
                maps.entry(k).or_insert(m);
            }
        }
        Ok(MonoidalComplex { monoids, maps })
    }

    /// All faces of the given cones, which must live in one ambient lattice
    /// and meet along common faces; face maps are identities. Ids are
    /// `prefix` followed by a zero-padded index in canonical monoid order.
    pub fn from_fan(prefix: &str, cones: &[ToricMonoid]) -> Self {
        let mut all: Vec<ToricMonoid> = cones.iter().flat_map(|c| c.faces().iter().map(|f| f.monoid.clone())).collect();
        all.sort();
        all.dedup();
        let ids: Vec<Id> = (0..all.len()).map(|i| format!("{prefix}{i:02}")).collect();
        let mut monoids = BTreeMap::new();
        let mut maps = BTreeMap::new();
        for (i, m) in all.iter().enumerate() {
            monoids.insert(ids[i].clone(), m.clone());
            for (j, n) in all.iter().enumerate() {
                if i != j && m.is_face_of(n) {
                    maps.insert((ids[i].clone(), ids[j].clone()), IntMat::identity(m.ambient_dim()));
                }
            }
        }
        MonoidalComplex { monoids, maps }
    }

    /// The faces of a single monoid.
    pub fn of_monoid(sigma: &ToricMonoid) -> Self {
        Self::from_fan("f", std::slice::from_ref(sigma))
    }

    pub fn is_empty(&self) -> bool {
        self.monoids.is_empty()
    }

    pub fn len(&self) -> usize {
        self.monoids.len()
    }

    pub fn ids(&self) -> impl Iterator<Item = &Id> {
        self.monoids.keys()
    }

    pub fn contains(&self, id: &str) -> bool {
        self.monoids.contains_key(id)
    }

    pub fn monoid(&self, id: &str) -> &ToricMonoid {
        self.monoids.get(id).unwrap_or_else(|| panic!("unknown element {id}"))
    }

    pub fn monoids(&self) -> &BTreeMap<Id, ToricMonoid> {
        &self.monoids
    }

    pub fn maps(&self) -> &BTreeMap<(Id, Id), IntMat> {
        &self.maps
    }

    pub fn le(&self, a: &str, b: &str) -> bool {
        a == b || self.maps.contains_key(&(a.to_string(), b.to_string()))
    }

    /// Face map for `a ≤ b`; identity when `a = b`.
    pub fn face_map(&self, a: &str, b: &str) -> Option<IntMat> {
        if a == b {
            return self.monoids.get(a).map(|m| IntMat::identity(m.ambient_dim()));
        }
        self.maps.get(&(a.to_string(), b.to_string())).cloned()
    }

    /// Elements `a ≤ b`, including `b`.
    pub fn below(&self, b: &str) -> Vec<Id> {
        self.monoids.keys().filter(|a| self.le(a, b)).cloned().collect()
    }

    /// Elements `c ≥ a`, including `a`.
    pub fn above(&self, a: &str) -> Vec<Id> {
        self.monoids.keys().filter(|c| self.le(a, c)).cloned().collect()
    }

    pub fn maximal(&self) -> Vec<Id> {
        self.monoids.keys().filter(|a| self.above(a).len() == 1).cloned().collect()
    }

    pub fn is_smooth(&self) -> bool {
        self.monoids.values().all(|m| m.is_smooth())
    }

    pub fn is_simplicial(&self) -> bool {
        self.monoids.values().all(|m| m.is_simplicial())
    }

    pub fn max_dim(&self) -> usize {
        self.monoids.values().map(|m| m.dim()).max().unwrap_or(0)
    }

    /// Image of `σ_a` inside `σ_b`.
    pub fn image_in(&self, a: &str, b: &str) -> ToricMonoid {
        let m = self.face_map(a, b).expect("a ≤ b");
        self.monoid(a).push_forward(&m)
    }

    /// The element `a ≤ b` whose image is the face `f` of `σ_b`.
    pub fn face_element(&self, b: &str, f: &ToricMonoid) -> Option<Id> {
        self.below(b).into_iter().find(|a| self.image_in(a, b) == *f)
    }

    /// Checks the poset axioms, functoriality, that face maps are
    /// isomorphisms onto faces, and completeness and reducedness through the
    /// bijection between `{a ≤ b}` and the faces of `σ_b`.
    pub fn validate(&self) -> ComplexReport {
        for ((a, b), m) in &self.maps {
            let (Some(sa), Some(sb)) = (self.monoids.get(a), self.monoids.get(b)) else {
                return ComplexReport::fail("poset", format!("relation {a} < {b} names an unknown element"));
            };
            if a == b || self.maps.contains_key(&(b.clone(), a.clone())) {
                return ComplexReport::fail("poset", format!("{a} and {b} violate antisymmetry"));
            }
            if m.rows() != sa.ambient_dim() || m.cols() != sb.ambient_dim() {
                return ComplexReport::fail("face map", format!("{a} < {b}: matrix has the wrong shape"));
            }
            if !(MonoidHom { source: sa.clone(), target: sb.clone(), matrix: m.clone() }).is_injective() {
                return ComplexReport::fail("face map", format!("{a} < {b}: map is not injective"));
            }
            let img = sa.push_forward(m);
            if !img.is_face_of(sb) {
                return ComplexReport::fail("face map", format!("{a} < {b}: image is not a face"));
            }
        }
        for ((a, b), m1) in &self.maps {
            for ((b2, c), m2) in &self.maps {
                if b2 != b {
                    continue;
                }
                match self.maps.get(&(a.clone(), c.clone())) {
                    None => return ComplexReport::fail("poset", format!("{a} < {b} < {c} but not {a} < {c}")),
                    Some(m) if *m != m1.mul(m2) => {
                        return ComplexReport::fail("functoriality", format!("maps along {a} < {b} < {c} do not compose"))
                    }
                    _ => {}
                }
            }
        }
        for (b, sb) in &self.monoids {
            let below = self.below(b);
            let images: Vec<(Id, ToricMonoid)> = below.iter().map(|a| (a.clone(), self.image_in(a, b))).collect();
            for f in sb.faces() {
                let n = images.iter().filter(|(_, m)| *m == f.monoid).count();
                if n == 0 {
                    return ComplexReport::fail("complete", format!("face {} of {b} has no element", f.monoid));
                }
                if n > 1 {
                    return ComplexReport::fail("reduced", format!("face {} of {b} has {n} elements", f.monoid));
                }
            }
            // order on {a ≤ b} matches inclusion of faces
            for (a1, m1) in &images {
                for (a2, m2) in &images {
                    if self.le(a1, a2) != m1.is_face_of(m2) {
                        return ComplexReport::fail("order", format!("{a1}, {a2} ≤ {b}: order disagrees with face inclusion"));
                    }
                }
            }
        }
        ComplexReport::Pass
    }

    /// Restriction to a downward-closed subset.
    pub fn restrict(&self, subset: &BTreeSet<Id>) -> Result<MonoidalComplex, ComplexError> {
        for a in subset {
            if !self.contains(a) {
                return Err(ComplexError::UnknownId(a.clone()));
            }
            for b in self.below(a) {
                if !subset.contains(&b) {
                    return Err(ComplexError::NotDownwardComplete { below: b, above: a.clone() });
                }
            }
        }
        let monoids = self.monoids.iter().filter(|(k, _)| subset.contains(*k)).map(|(k, v)| (k.clone(), v.clone())).collect();
        let maps = self
            .maps
            .iter()
            .filter(|((a, b), _)| subset.contains(a) && subset.contains(b))
            .map(|(k, v)| (k.clone(), v.clone()))
            .collect();
        Ok(MonoidalComplex { monoids, maps })
    }

    /// Downward closure of a set of elements.
    pub fn closure(&self, ids: &[Id]) -> BTreeSet<Id> {
        ids.iter().flat_map(|a| self.below(a)).collect()
    }
}

/// Poset map plus per-element homomorphisms commuting with face maps.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComplexMorphism {
    pub source: MonoidalComplex,
    pub target: MonoidalComplex,
    pub poset_map: BTreeMap<Id, Id>,
    pub homs: BTreeMap<Id, IntMat>,
}

impl ComplexMorphism {
    pub fn identity(q: &MonoidalComplex) -> Self {
        ComplexMorphism {
            source: q.clone(),
            target: q.clone(),
            poset_map: q.ids().map(|a| (a.clone(), a.clone())).collect(),
            homs: q.monoids.iter().map(|(a, m)| (a.clone(), IntMat::identity(m.ambient_dim()))).collect(),
        }
    }

    pub fn image_of(&self, a: &str) -> &Id {
        &self.poset_map[a]
    }

    pub fn hom(&self, a: &str) -> MonoidHom {
        let b = &self.poset_map[a];
        MonoidHom {
            source: self.source.monoid(a).clone(),
            target: self.target.monoid(b).clone(),
            matrix: self.homs[a].clone(),
        }
    }

    pub fn validate(&self) -> ComplexReport {
        for a in self.source.ids() {
            let Some(b) = self.poset_map.get(a) else {
                return ComplexReport::fail("morphism", format!("{a} has no image"));
            };
            if !self.target.contains(b) {
                return ComplexReport::fail("morphism", format!("{a} maps to unknown {b}"));
            }
            let Some(m) = self.homs.get(a) else {
                return ComplexReport::fail("morphism", format!("{a} has no homomorphism"));
            };
            if m.rows() != self.source.monoid(a).ambient_dim() || m.cols() != self.target.monoid(b).ambient_dim() {
                return ComplexReport::fail("morphism", format!("{a}: homomorphism has the wrong shape"));
            }
            if !self.hom(a).is_valid() {
                return ComplexReport::fail("morphism", format!("{a}: image leaves σ_{b}"));
            }
        }
        for ((a, c), m_ac) in self.source.maps() {
            let (fa, fc) = (&self.poset_map[a], &self.poset_map[c]);
            let Some(t) = self.target.face_map(fa, fc) else {
                return ComplexReport::fail("morphism", format!("{a} < {c} but {fa} ≰ {fc}"));
            };
            if m_ac.mul(&self.homs[c]) != self.homs[a].mul(&t) {
                return ComplexReport::fail("morphism", format!("square over {a} < {c} does not commute"));
            }
        }
        ComplexReport::Pass
    }

    /// `other ∘ self`
    pub fn then(&self, other: &ComplexMorphism) -> ComplexMorphism {
        let poset_map = self.poset_map.iter().map(|(a, b)| (a.clone(), other.poset_map[b].clone())).collect();
        let homs = self.homs.iter().map(|(a, m)| (a.clone(), m.mul(&other.homs[&self.poset_map[a]]))).collect();
        ComplexMorphism { source: self.source.clone(), target: other.target.clone(), poset_map, homs }
    }

    pub fn all_injective(&self) -> bool {
        self.source.ids().all(|a| self.hom(a).is_injective())
    }
}

/// Subcomplex on a downward-closed subset with its inclusion.
pub fn subcomplex(q: &MonoidalComplex, subset: &BTreeSet<Id>) -> Result<(MonoidalComplex, ComplexMorphism), ComplexError> {
    let sub = q.restrict(subset)?;
    let inc = ComplexMorphism {
        source: sub.clone(),
        target: q.clone(),
        poset_map: sub.ids().map(|a| (a.clone(), a.clone())).collect(),
        homs: sub.monoids.iter().map(|(a, m)| (a.clone(), IntMat::identity(m.ambient_dim()))).collect(),
    };
    Ok((sub, inc))
}
