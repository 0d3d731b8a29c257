//! Products and fiber products of complexes, pullback of refinements and
//! mutual smooth refinements.

use std::collections::BTreeMap;

use super::{natural_smooth_refinement, ComplexError, ComplexMorphism, ComplexRefinement, Id, MonoidalComplex};
use crate::exact::{to_rat, IntMat};
use crate::monoid::{fiber_product, ToricMonoid};

/// `Q₁ ×_Q Q₂` with its projections. Ids are `(a,b)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiberProductComplex {
    pub complex: MonoidalComplex,
    pub pr1: ComplexMorphism,
    pub pr2: ComplexMorphism,
}

fn pair_id(a: &str, b: &str) -> Id {
    format!("({a},{b})")
}

fn projections(d1: usize, d2: usize) -> (IntMat, IntMat) {
    (
        IntMat::identity(d1).vstack(&IntMat::zeros(d2, d1)),
        IntMat::zeros(d1, d2).vstack(&IntMat::identity(d2)),
    )
}

fn assemble(
    q1: &MonoidalComplex,
    q2: &MonoidalComplex,
    pairs: BTreeMap<(Id, Id), ToricMonoid>,
) -> FiberProductComplex {
    let mut maps = BTreeMap::new();
    for (a, b) in pairs.keys() {
        for (a2, b2) in pairs.keys() {
            if (a, b) == (a2, b2) {
                continue;
            }
            if let (Some(m1), Some(m2)) = (q1.face_map(a, a2), q2.face_map(b, b2)) {
                maps.insert((pair_id(a, b), pair_id(a2, b2)), m1.block_diag(&m2));
            }
        }
    }
    let monoids: BTreeMap<Id, ToricMonoid> = pairs.iter().map(|((a, b), m)| (pair_id(a, b), m.clone())).collect();
    let complex = MonoidalComplex::new(monoids, maps);
    let mut pr1 = ComplexMorphism { source: complex.clone(), target: q1.clone(), poset_map: BTreeMap::new(), homs: BTreeMap::new() };
    let mut pr2 = ComplexMorphism { source: complex.clone(), target: q2.clone(), poset_map: BTreeMap::new(), homs: BTreeMap::new() };
    for (a, b) in pairs.keys() {
        let id = pair_id(a, b);
        let (p1, p2) = projections(q1.monoid(a).ambient_dim(), q2.monoid(b).ambient_dim());
        pr1.poset_map.insert(id.clone(), a.clone());
        pr1.homs.insert(id.clone(), p1);
        pr2.poset_map.insert(id.clone(), b.clone());
        pr2.homs.insert(id, p2);
    }
    FiberProductComplex { complex, pr1, pr2 }
}

/// Product complex. The empty complex acts as a unit.
pub fn product(q1: &MonoidalComplex, q2: &MonoidalComplex) -> FiberProductComplex {
    if q1.is_empty() || q2.is_empty() {
        let q = if q1.is_empty() { q2 } else { q1 };
        let id = ComplexMorphism::identity(q);
        let empty = ComplexMorphism {
            source: q.clone(),
            target: MonoidalComplex::default(),
            poset_map: BTreeMap::new(),
            homs: BTreeMap::new(),
        };
        let (pr1, pr2) = if q1.is_empty() { (empty, id) } else { (id, empty) };
        return FiberProductComplex { complex: q.clone(), pr1, pr2 };
    }
    let mut pairs = BTreeMap::new();
    for (a, s) in q1.monoids() {
        for (b, t) in q2.monoids() {
            pairs.insert((a.clone(), b.clone()), ToricMonoid::product(s, t));
        }
    }
    assemble(q1, q2, pairs)
}

/// `Q₁ ×_Q Q₂` for `φ₁: Q₁ → Q`, `φ₂: Q₂ → Q`. A pair `(a, b)` over a common
/// image is kept when the fiber product `σ_a ×_σ σ_b` reaches the interiors
/// of both `σ_a` and `σ_b`; otherwise it is a face of a kept pair.
pub fn fiber_product_complex(phi1: &ComplexMorphism, phi2: &ComplexMorphism) -> Result<FiberProductComplex, ComplexError> {
    if phi1.target != phi2.target {
        return Err(ComplexError::Invalid("morphisms have different targets".into()));
    }
    let (q1, q2) = (&phi1.source, &phi2.source);
    let mut pairs = BTreeMap::new();
    for a in q1.ids() {
        for b in q2.ids() {
            if phi1.image_of(a) != phi2.image_of(b) {
                continue;
            }
            let (f, p1, p2) = fiber_product(&phi1.hom(a), &phi2.hom(b));
            let v = f.extremal_sum();
            let interior = |p: &IntMat, s: &ToricMonoid| {
                s.smallest_face_containing(&to_rat(&p.apply(&v))).map(|face| face.monoid == *s).unwrap_or(false)
            };
            if interior(&p1.matrix, q1.monoid(a)) && interior(&p2.matrix, q2.monoid(b)) {
                pairs.insert((a.clone(), b.clone()), f);
            }
        }
    }
    Ok(assemble(q1, q2, pairs))
}

/// `ψ*(R)`: the refinement `Q₁ ×_Q R → Q₁` of `Q₁` for `ψ: Q₁ → Q`.
pub fn pullback_refinement(r: &ComplexRefinement, psi: &ComplexMorphism) -> Result<ComplexRefinement, ComplexError> {
    let fp = fiber_product_complex(psi, &r.morphism)?;
    ComplexRefinement::from_morphism(fp.pr1)
}

/// Smooth common refinement of two refinements of one complex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MutualRefinement {
    pub refinement: ComplexRefinement,
    pub to_r1: ComplexMorphism,
    pub to_r2: ComplexMorphism,
}

/// Natural smooth refinement of `R₁ ×_Q R₂`, with its maps to both `Rᵢ`.
pub fn mutual_smooth_refinement(r1: &ComplexRefinement, r2: &ComplexRefinement) -> Result<MutualRefinement, ComplexError> {
    let fp = fiber_product_complex(&r1.morphism, &r2.morphism)?;
    let (n, _) = natural_smooth_refinement(&fp.complex)?;
    let to_r1 = n.morphism.then(&fp.pr1);
    let to_r2 = n.morphism.then(&fp.pr2);
    let refinement = ComplexRefinement::from_morphism(to_r1.then(&r1.morphism))?;
    Ok(MutualRefinement { refinement, to_r1, to_r2 })
}
