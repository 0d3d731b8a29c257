//! Manifolds with corners as face posets with hypersurface incidence,
//! interior b-maps between them, and their monoidal complexes.
//!
//! Every monoid of a basic complex lives in `ℤ^H`, one coordinate per
//! boundary hypersurface in id order, and all face maps are identities.

mod atlas;
mod blowup;

use std::collections::{BTreeMap, BTreeSet};

use itertools::Itertools;

use crate::complex::{ComplexMorphism, Id, MonoidalComplex};
use crate::exact::{IntMat, IntVec};
use crate::monoid::ToricMonoid;

pub use atlas::{local_atlas, Chart, ChartAtlas, Transition};
pub use blowup::{
    blowup_domain, chart_exponents, check_blowdown_refinement, generalized_blowup, inhomogeneous_blowup, is_compatible, iterated_blowup,
    lift_bmap, lift_face, ordinary_blowup, Blowup, BlowdownVerdict, Compatibility, DomainBlowup, LiftedBMap,
};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ManifoldError {
    #[error("unknown face {0}")]
    UnknownFace(Id),
    #[error("invalid corner complex: {0}")]
    InvalidComplex(String),
    #[error("invalid b-map: {0}")]
    InvalidBMap(String),
    #[error("maps do not compose: target of the first is not the source of the second")]
    ChainMismatch,
    #[error("refinement is not smooth or not a valid refinement of the basic complex")]
    NotSmoothRefinement,
    #[error("map is not compatible with the refinement at face {0}")]
    NotCompatible(Id),
    #[error("lift of face {0} is not a single face")]
    LiftNotUnique(Id),
    #[error("weights must be positive and match the face codimension")]
    BadWeights,
    #[error(transparent)]
    Complex(#[from] crate::complex::ComplexError),
}

/// Faces of a manifold with corners. `incidence[F]` is the set of boundary
/// hypersurfaces containing `F`; a hypersurface `H` has incidence `{H}`.
/// `order` holds the strict relations `G < F`, meaning `G ⊋ F`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CornerComplex {
    incidence: BTreeMap<Id, BTreeSet<Id>>,
    order: BTreeSet<(Id, Id)>,
    /// number of boundaryless factors, carried along inertly
    pub free_dim: usize,
}

fn face_name(s: &BTreeSet<Id>) -> Id {
    if s.is_empty() {
        "int".to_string()
    } else {
        s.iter().join("&")
    }
}

impl CornerComplex {
    /// From incidences and a generating set of relations `G < F`; the order
    /// is closed transitively.
    pub fn new(
        incidence: BTreeMap<Id, BTreeSet<Id>>,
        relations: impl IntoIterator<Item = (Id, Id)>,
        free_dim: usize,
    ) -> Result<Self, ManifoldError> {
        let mut order: BTreeSet<(Id, Id)> = relations.into_iter().collect();
        for (g, f) in &order {
            for x in [g, f] {
                if !incidence.contains_key(x) {
                    return Err(ManifoldError::UnknownFace(x.clone()));
                }
            }
        }
        loop {
            let extra: Vec<(Id, Id)> = order
                .iter()
                .flat_map(|(a, b)| order.iter().filter(move |(b2, _)| b2 == b).map(move |(_, c)| (a.clone(), c.clone())))
                .filter(|p| !order.contains(p))
                .collect();
            if extra.is_empty() {
                break;
            }
            order.extend(extra);
        }
        let x = CornerComplex { incidence, order, free_dim };
        x.validate()?;
        Ok(x)
    }

    /// The model `ℝⁿ₊ × ℝᵐ` with hypersurfaces `x1 … xn`; the face cut out by
    /// a set `S` of them is named by joining `S` with `&`, the interior `int`.
    pub fn model(n: usize, free_dim: usize) -> Self {
        // zero-padded so that id order is coordinate order
        let w = n.to_string().len();
        let hyps: Vec<Id> = (1..=n).map(|i| format!("x{i:0w$}")).collect();
        let mut incidence = BTreeMap::new();
        let mut order = BTreeSet::new();
        let subsets: Vec<BTreeSet<Id>> = hyps.iter().cloned().powerset().map(|s| s.into_iter().collect()).collect();
        for s in &subsets {
            incidence.insert(face_name(s), s.clone());
            for t in &subsets {
                if s != t && s.is_subset(t) {
                    order.insert((face_name(s), face_name(t)));
                }
            }
        }
        CornerComplex { incidence, order, free_dim }
    }

    /// The manifold whose basic complex is the smooth complex `q`: one face
    /// per element, hypersurfaces at the rays.
    pub fn from_smooth_complex(q: &MonoidalComplex, free_dim: usize) -> Result<Self, ManifoldError> {
        if !q.is_smooth() {
            return Err(ManifoldError::NotSmoothRefinement);
        }
        let incidence = q
            .ids()
            .map(|t| (t.clone(), q.below(t).into_iter().filter(|r| q.monoid(r).dim() == 1).collect()))
            .collect();
        CornerComplex::new(incidence, q.maps().keys().cloned(), free_dim)
    }

    pub fn faces(&self) -> impl Iterator<Item = &Id> {
        self.incidence.keys()
    }

    pub fn contains(&self, f: &str) -> bool {
        self.incidence.contains_key(f)
    }

    pub fn incidence(&self, f: &str) -> &BTreeSet<Id> {
        &self.incidence[f]
    }

    pub fn codim(&self, f: &str) -> usize {
        self.incidence[f].len()
    }

    pub fn hypersurfaces(&self) -> Vec<Id> {
        self.incidence.iter().filter(|(f, s)| s.len() == 1 && s.contains(*f)).map(|(f, _)| f.clone()).collect()
    }

    /// `G ≤ F`, i.e. `G ⊇ F`.
    pub fn le(&self, g: &str, f: &str) -> bool {
        g == f || self.order.contains(&(g.to_string(), f.to_string()))
    }

    pub fn relations(&self) -> &BTreeSet<(Id, Id)> {
        &self.order
    }

    /// The face `G ≤ F` whose incidence is `s ⊆ incidence(F)`.
    pub fn face_below(&self, f: &str, s: &BTreeSet<Id>) -> Option<Id> {
        self.incidence.iter().find(|(g, i)| *i == s && self.le(g, f)).map(|(g, _)| g.clone())
    }

    pub fn deepest(&self) -> Vec<Id> {
        self.faces().filter(|f| !self.faces().any(|g| g != *f && self.le(f, g))).cloned().collect()
    }

    pub fn validate(&self) -> Result<(), ManifoldError> {
        let hyps: BTreeSet<Id> = self.hypersurfaces().into_iter().collect();
        let bad = |m: String| Err(ManifoldError::InvalidComplex(m));
        for (f, s) in &self.incidence {
            if !s.is_subset(&hyps) {
                return bad(format!("{f} lies in something that is not a hypersurface"));
            }
            for sub in s.iter().cloned().powerset() {
                let sub: BTreeSet<Id> = sub.into_iter().collect();
                let n = self.incidence.iter().filter(|(g, i)| **i == sub && self.le(g, f)).count();
                if n != 1 {
                    return bad(format!("{f} has {n} faces above it in exactly {{{}}}", sub.iter().join(",")));
                }
            }
        }
        for (g, f) in &self.order {
            if g == f || self.order.contains(&(f.clone(), g.clone())) {
                return bad(format!("{g}, {f} violate antisymmetry"));
            }
            if !self.incidence[g].is_subset(&self.incidence[f]) || self.incidence[g] == self.incidence[f] {
                return bad(format!("{g} < {f} but incidences are not strictly nested"));
            }
        }
        Ok(())
    }

    /// Coordinate index of each hypersurface in `ℤ^H`.
    pub fn coordinate(&self) -> BTreeMap<Id, usize> {
        self.hypersurfaces().into_iter().enumerate().map(|(i, h)| (h, i)).collect()
    }

    pub fn basic_monoid(&self, f: &str) -> ToricMonoid {
        let coord = self.coordinate();
        let n = coord.len();
        let gens: Vec<IntVec> = self.incidence[f].iter().map(|h| unit_vec(n, coord[h])).collect();
        if gens.is_empty() {
            ToricMonoid::trivial(n)
        } else {
            ToricMonoid::new(n, &gens, &gens).expect("coordinate orthant")
        }
    }
}

pub fn unit_vec(n: usize, i: usize) -> IntVec {
    let mut v = vec![num_bigint::BigInt::from(0); n];
    v[i] = num_bigint::BigInt::from(1);
    v
}

/// `P_X`: the free monoid on the hypersurfaces through each face.
pub fn basic_complex(x: &CornerComplex) -> MonoidalComplex {
    let monoids = x.faces().map(|f| (f.clone(), x.basic_monoid(f))).collect();
    let n = x.hypersurfaces().len();
    let maps = x.relations().iter().map(|p| (p.clone(), IntMat::identity(n))).collect();
    MonoidalComplex::new(monoids, maps)
}

/// Interior b-map: a face map and the boundary exponents `α(G, H)`, rows
/// indexed by source hypersurfaces and columns by target hypersurfaces,
/// both in id order. Locally `x_H = a·∏ s_G^{α(G,H)}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BMap {
    pub source: CornerComplex,
    pub target: CornerComplex,
    pub face_map: BTreeMap<Id, Id>,
    pub alpha: IntMat,
}

impl BMap {
    pub fn new(
        source: CornerComplex,
        target: CornerComplex,
        face_map: BTreeMap<Id, Id>,
        alpha: IntMat,
    ) -> Result<Self, ManifoldError> {
        let f = BMap { source, target, face_map, alpha };
        f.validate()?;
        Ok(f)
    }

    /// Monomial map between model corners, `x_H = ∏ s_G^{α(G,H)}`; the face
    /// map is read off from the supports of the exponents.
    pub fn between_models(k: usize, n: usize, alpha: IntMat) -> Result<Self, ManifoldError> {
        let x = CornerComplex::model(k, 0);
        let y = CornerComplex::model(n, 0);
        if alpha.rows() != k || alpha.cols() != n {
            return Err(ManifoldError::InvalidBMap("exponent matrix has the wrong shape".into()));
        }
        let cs = x.coordinate();
        let ht = y.hypersurfaces();
        let top = y.deepest().remove(0);
        let mut face_map = BTreeMap::new();
        for f in x.faces() {
            let hit: BTreeSet<Id> = x
                .incidence(f)
                .iter()
                .flat_map(|g| ht.iter().enumerate().filter(|(j, _)| !alpha.get(cs[g], *j).is_zero()).map(|(_, h)| h.clone()))
                .collect();
            face_map.insert(f.clone(), y.face_below(&top, &hit).expect("model has every face"));
        }
        BMap::new(x, y, face_map, alpha)
    }

    pub fn identity(x: &CornerComplex) -> Self {
        BMap {
            source: x.clone(),
            target: x.clone(),
            face_map: x.faces().map(|f| (f.clone(), f.clone())).collect(),
            alpha: IntMat::identity(x.hypersurfaces().len()),
        }
    }

    pub fn validate(&self) -> Result<(), ManifoldError> {
        let bad = |m: String| Err(ManifoldError::InvalidBMap(m));
        let (hs, ht) = (self.source.hypersurfaces(), self.target.hypersurfaces());
        if self.alpha.rows() != hs.len() || self.alpha.cols() != ht.len() {
            return bad("exponent matrix has the wrong shape".into());
        }
        if self.alpha.row_vecs().iter().flatten().any(|x| x < &num_bigint::BigInt::from(0)) {
            return bad("negative exponent".into());
        }
        for f in self.source.faces() {
            match self.face_map.get(f) {
                Some(g) if self.target.contains(g) => {}
                _ => return bad(format!("face {f} has no image")),
            }
        }
        for (g, f) in self.source.relations() {
            if !self.target.le(&self.face_map[g], &self.face_map[f]) {
                return bad(format!("face map does not preserve {g} < {f}"));
            }
        }
        let cs = self.source.coordinate();
        for f in self.source.faces() {
            let mut hit = BTreeSet::new();
            for g in self.source.incidence(f) {
                for (j, h) in ht.iter().enumerate() {
                    if !self.alpha.get(cs[g], j).is_zero() {
                        hit.insert(h.clone());
                    }
                }
            }
            if hit != *self.target.incidence(&self.face_map[f]) {
                return bad(format!("exponents at {f} disagree with its image {}", self.face_map[f]));
            }
        }
        Ok(())
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_ok()
    }
}

use num_traits::Zero;

/// `f_♮: P_X → P_Y`, `e_G ↦ Σ_H α(G,H) e_H`.
pub fn induced_morphism(f: &BMap) -> ComplexMorphism {
    ComplexMorphism {
        source: basic_complex(&f.source),
        target: basic_complex(&f.target),
        poset_map: f.face_map.clone(),
        homs: f.source.faces().map(|a| (a.clone(), f.alpha.clone())).collect(),
    }
}

/// `f ∘ g`, for `g: X → Y` and `f: Y → Z`.
pub fn compose(f: &BMap, g: &BMap) -> Result<BMap, ManifoldError> {
    if g.target != f.source {
        return Err(ManifoldError::ChainMismatch);
    }
    let face_map = g.face_map.iter().map(|(a, b)| (a.clone(), f.face_map[b].clone())).collect();
    BMap::new(g.source.clone(), f.target.clone(), face_map, g.alpha.mul(&f.alpha))
}
