//! Interior binomial subvarieties of a model corner `ℝⁿ₊ × ℝᵐ`: normal form,
//! the boundary faces they meet, their monoidal complex, and resolution by
//! a planar refinement followed by an extension.

use std::collections::{BTreeMap, BTreeSet};

use itertools::Itertools;
use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::complex::{
    extend_refinement, planar_refine_complex, ComplexError, ComplexMorphism, ComplexRefinement, Id, MonoidalComplex,
};
use crate::exact::{dot, lp_feasible, rat_to_primitive, saturated_kernel, to_rat, IntMat, IntVec, LpResult, RatVec};
use crate::manifold::{basic_complex, local_atlas, CornerComplex};
use crate::monoid::ToricMonoid;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum BinomialError {
    #[error("exponent vectors must have length {0}")]
    Shape(usize),
    #[error("differentials are dependent: {0} smooth equations in {1} tangential variables")]
    DependentDifferentials(usize, usize),
    #[error("exponent vector {0:?} is definite, so the variety misses the corner")]
    Definite(IntVec),
    #[error("the exponents span a definite vector, so the variety misses the corner")]
    MissesCorner,
    #[error("a face is met in more than one component")]
    CollarViolated,
    #[error("resolution check failed: {0}")]
    VerificationFailed(String),
    #[error("the complex of the variety is not smooth; refine it first, e.g. by its natural smooth refinement")]
    ComplexNotSmooth,
    #[error(transparent)]
    Complex(#[from] ComplexError),
}

/// `x^{γᵢ} = 1` for independent indefinite `γᵢ`, plus `smooth_count`
/// equations in the tangential variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BinomialSystem {
    pub boundary_dim: usize,
    pub tangential_dim: usize,
    pub gammas: Vec<IntVec>,
    pub smooth_count: usize,
}

fn is_indefinite_or_zero(g: &[BigInt]) -> bool {
    g.iter().all(|x| x.is_zero()) || (g.iter().any(|x| x.is_positive()) && g.iter().any(|x| x.is_negative()))
}

/// Puts `x^{αᵢ} = a·x^{βᵢ}` into normal form: `γᵢ = αᵢ − βᵢ`, keeping a maximal
/// independent set and turning each dependent one into a smooth equation.
pub fn normal_form(
    boundary_dim: usize,
    tangential_dim: usize,
    equations: &[(IntVec, IntVec)],
    smooth_count: usize,
) -> Result<BinomialSystem, BinomialError> {
    let mut gammas: Vec<IntVec> = Vec::new();
    let mut smooth = smooth_count;
    for (a, b) in equations {
        if a.len() != boundary_dim || b.len() != boundary_dim {
            return Err(BinomialError::Shape(boundary_dim));
        }
        let g: IntVec = a.iter().zip(b).map(|(x, y)| x - y).collect();
        if !is_indefinite_or_zero(&g) {
            return Err(BinomialError::Definite(g));
        }
        let mut with = gammas.clone();
        with.push(g.clone());
        if g.iter().any(|x| !x.is_zero()) && IntMat::from_rows(boundary_dim, with).rank() > gammas.len() {
            gammas.push(g);
        } else {
            smooth += 1;
        }
    }
    if smooth > tangential_dim {
        return Err(BinomialError::DependentDifferentials(smooth, tangential_dim));
    }
    // each γᵢ may be indefinite while their span is not: then some x_j
    // stays away from 0 on the variety. The corner is met iff W has a
    // strictly positive vector.
    if !gammas.is_empty() {
        let units: Vec<RatVec> = (0..boundary_dim).map(|i| to_rat(&crate::manifold::unit_vec(boundary_dim, i))).collect();
        let zero: Vec<RatVec> = gammas.iter().map(|g| to_rat(g)).collect();
        if !lp_feasible(&units, &zero, &[], boundary_dim).is_feasible() {
            return Err(BinomialError::MissesCorner);
        }
    }
    Ok(BinomialSystem { boundary_dim, tangential_dim, gammas, smooth_count: smooth })
}

impl BinomialSystem {
    /// `W = ⋂ ker γᵢ`, as a saturated integer basis.
    pub fn subspace(&self) -> Vec<IntVec> {
        let n = self.boundary_dim;
        if self.gammas.is_empty() {
            return IntMat::identity(n).into_rows();
        }
        saturated_kernel(&IntMat::from_rows(n, self.gammas.clone()).transpose())
    }

    pub fn ambient(&self) -> CornerComplex {
        CornerComplex::model(self.boundary_dim, self.tangential_dim)
    }
}

/// A boundary face met by the variety.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DetectedFace {
    /// coordinates vanishing on the face, 0-based
    pub coords: BTreeSet<usize>,
    /// `w ∈ W` with `wᵢ < 0` on `coords` and `0` elsewhere
    pub witness: IntVec,
    /// `σ_G ∩ W`
    pub monoid: ToricMonoid,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VarietyComplex {
    pub system: BinomialSystem,
    pub subspace: Vec<IntVec>,
    /// keyed by the id of the ambient face
    pub faces: BTreeMap<Id, DetectedFace>,
}

fn face_id(x: &CornerComplex, coords: &BTreeSet<usize>) -> Id {
    let hyps = x.hypersurfaces();
    let s: BTreeSet<Id> = coords.iter().map(|&i| hyps[i].clone()).collect();
    let top = x.deepest().remove(0);
    x.face_below(&top, &s).expect("model has every face")
}

/// The face on coordinates `S` is met iff some `w ∈ W` has `wᵢ < 0` on `S`
/// and vanishes off `S`. Since `W` is a subspace the sign is immaterial.
pub fn boundary_faces(b: &BinomialSystem) -> VarietyComplex {
    let n = b.boundary_dim;
    let x = b.ambient();
    let w = b.subspace();
    let mut faces = BTreeMap::new();
    for s in (0..n).powerset() {
        let coords: BTreeSet<usize> = s.into_iter().collect();
        let unit = |i: usize| -> RatVec { to_rat(&crate::manifold::unit_vec(n, i)) };
        let strict: Vec<RatVec> = coords.iter().map(|&i| unit(i).iter().map(|v| -v).collect()).collect();
        let zero: Vec<RatVec> =
            b.gammas.iter().map(|g| to_rat(g)).chain((0..n).filter(|i| !coords.contains(i)).map(unit)).collect();
        let LpResult::Feasible(p) = lp_feasible(&strict, &zero, &[], n) else { continue };
        let witness = if coords.is_empty() { vec![BigInt::zero(); n] } else { rat_to_primitive(&p) };
        let gens: Vec<IntVec> = coords.iter().map(|&i| crate::manifold::unit_vec(n, i)).collect();
        let sigma = if gens.is_empty() { ToricMonoid::trivial(n) } else { ToricMonoid::new(n, &gens, &gens).expect("orthant face") };
        let monoid = sigma.intersect_with_subspace(&w);
        faces.insert(face_id(&x, &coords), DetectedFace { coords, witness, monoid });
    }
    VarietyComplex { system: b.clone(), subspace: w, faces }
}

/// `P_D` and its injective morphism into `P_X`.
pub fn variety_complex(v: &VarietyComplex) -> (MonoidalComplex, ComplexMorphism) {
    let n = v.system.boundary_dim;
    let monoids: BTreeMap<Id, ToricMonoid> = v.faces.iter().map(|(k, f)| (k.clone(), f.monoid.clone())).collect();
    let mut maps = BTreeMap::new();
    for (a, fa) in &v.faces {
        for (b, fb) in &v.faces {
            if a != b && fa.coords.is_subset(&fb.coords) {
                maps.insert((a.clone(), b.clone()), IntMat::identity(n));
            }
        }
    }
    let pd = MonoidalComplex::new(monoids, maps);
    let px = basic_complex(&v.system.ambient());
    let inc = ComplexMorphism {
        poset_map: pd.ids().map(|a| (a.clone(), a.clone())).collect(),
        homs: pd.ids().map(|a| (a.clone(), IntMat::identity(n))).collect(),
        source: pd.clone(),
        target: px,
    };
    (pd, inc)
}

pub fn is_smooth_complex(pd: &MonoidalComplex) -> bool {
    pd.is_smooth()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChartCheck {
    pub chart: usize,
    pub nu: IntMat,
    /// `ν·γᵢ`: exponents of the equations in the chart's coordinates
    pub transformed: Vec<IntVec>,
    /// how many `ν·γᵢ` are indefinite; always 0 for a single equation
    pub indefinite: usize,
    /// `τ ∩ W` is the face of `τ` spanned by the generators lying in `W`
    pub face_compatible: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Resolution {
    /// smooth refinement of `P_X`
    pub r_x: ComplexRefinement,
    /// elements of `R_X` lying over the variety, i.e. the faces of `D̃`
    pub lifted: BTreeSet<Id>,
    pub charts: Vec<ChartCheck>,
    pub universal: bool,
}

impl Resolution {
    pub fn indefinite_total(&self) -> usize {
        self.charts.iter().map(|c| c.indefinite).sum()
    }
}

fn rename_target(r: &ComplexRefinement, target: &MonoidalComplex, map: &BTreeMap<Id, Id>) -> ComplexRefinement {
    let mut m = r.morphism.clone();
    m.target = target.clone();
    for v in m.poset_map.values_mut() {
        *v = map[v].clone();
    }
    let locals = r.locals.iter().map(|(k, l)| (map[k].clone(), l.clone())).collect();
    ComplexRefinement { morphism: m, locals }
}

/// Resolves `D` along a smooth refinement `R_D` of `P_D`: the planar
/// refinement `S(P_X, P_D)` contains `P_D`, `R_D` is extended from there to
/// a smooth refinement `R_X`, and every chart is checked to turn each
/// equation into a single-signed monomial.
pub fn resolve(b: &BinomialSystem, r_d: &ComplexRefinement) -> Result<Resolution, BinomialError> {
    let v = boundary_faces(b);
    let (pd, inc) = variety_complex(&v);
    if *r_d.target() != pd {
        return Err(BinomialError::Complex(ComplexError::Invalid("refinement is not of the variety complex".into())));
    }
    if !r_d.is_smooth() {
        return Err(BinomialError::ComplexNotSmooth);
    }
    let (s, carry) = planar_refine_complex(&inc.target, &inc)?;
    let q0_ids: BTreeSet<Id> = carry.values().cloned().collect();
    let q0 = s.source().restrict(&q0_ids)?;
    let r0 = rename_target(r_d, &q0, &carry);
    let (ext, _) = extend_refinement(s.source(), &r0)?;
    // source ids are reassigned by the extension, so compare the local pieces
    if q0_ids.iter().any(|a| ext.locals.get(a) != r0.locals.get(a)) {
        return Err(BinomialError::VerificationFailed("R_X does not restrict to R_D".into()));
    }
    let lifted: BTreeSet<Id> = ext.source().ids().filter(|x| q0_ids.contains(ext.morphism.image_of(x))).cloned().collect();
    let r_x = ComplexRefinement::from_morphism(ext.morphism.then(&s.morphism))?;
    if !r_x.is_smooth() {
        return Err(BinomialError::VerificationFailed("extension is not smooth".into()));
    }
    let n = b.boundary_dim;
    let w = b.subspace();
    let top = inc.target.maximal().remove(0);
    let atlas = local_atlas(n, &r_x.locals[&top], b.tangential_dim)
        .map_err(|e| BinomialError::VerificationFailed(e.to_string()))?;
    let charts: Vec<ChartCheck> = atlas
        .charts
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let transformed: Vec<IntVec> =
                b.gammas.iter().map(|g| c.nu.row_vecs().iter().map(|row| dot(row, g)).collect()).collect();
            let indefinite = transformed.iter().filter(|t| !single_signed(t)).count();
            let in_w = transformed.iter().fold(vec![true; n], |acc, t| acc.iter().zip(t).map(|(a, x)| *a && x.is_zero()).collect());
            let face_compatible = c.monoid.intersect_with_subspace(&w).dim() == in_w.iter().filter(|x| **x).count();
            ChartCheck { chart: i, nu: c.nu.clone(), transformed, indefinite, face_compatible }
        })
        .collect();
    let res = Resolution { r_x, lifted, charts, universal: r_d.is_trivial() };
    // With several equations a single ν·γᵢ may stay indefinite on
    // coordinates that never vanish on the lift; the face condition is what
    // makes the lift a p-submanifold.
    if let Some(c) = res.charts.iter().find(|c| !c.face_compatible) {
        return Err(BinomialError::VerificationFailed(format!("chart {} meets W outside a face", c.chart)));
    }
    if b.gammas.len() == 1 && res.indefinite_total() > 0 {
        return Err(BinomialError::VerificationFailed(format!("{} indefinite exponents remain", res.indefinite_total())));
    }
    Ok(res)
}

fn single_signed(v: &[BigInt]) -> bool {
    v.iter().all(|x| !x.is_negative()) || v.iter().all(|x| !x.is_positive())
}

/// `[D; P_D]`, defined when `P_D` is smooth.
pub fn universal_resolution(b: &BinomialSystem) -> Result<Resolution, BinomialError> {
    let (pd, _) = variety_complex(&boundary_faces(b));
    if !pd.is_smooth() {
        return Err(BinomialError::ComplexNotSmooth);
    }
    let trivial = ComplexRefinement::from_morphism(ComplexMorphism::identity(&pd))?;
    resolve(b, &trivial)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::natural_smooth_refinement;
    use crate::exact::ivec;

    fn sys(gammas: &[&[i64]]) -> BinomialSystem {
        let n = gammas[0].len();
        let eqs: Vec<(IntVec, IntVec)> = gammas
            .iter()
            .map(|g| (g.iter().map(|&x| BigInt::from(x.max(0))).collect(), g.iter().map(|&x| BigInt::from((-x).max(0))).collect()))
            .collect();
        normal_form(n, 0, &eqs, 0).unwrap()
    }

    #[test]
    fn normal_forms() {
        assert_eq!(sys(&[&[1, -1]]).gammas, vec![ivec(&[1, -1])]);
        assert_eq!(sys(&[&[2, -3]]).gammas, vec![ivec(&[2, -3])]);
        // x₁x₂ = x₂x₁·e^y contributes γ = 0, i.e. the smooth equation y = 0
        let eqs = vec![(ivec(&[1, 0]), ivec(&[0, 1])), (ivec(&[1, 1]), ivec(&[1, 1]))];
        let b = normal_form(2, 1, &eqs, 0).unwrap();
        assert_eq!(b.gammas.len(), 1);
        assert_eq!(b.smooth_count, 1);
        assert!(matches!(normal_form(2, 0, &eqs, 0), Err(BinomialError::DependentDifferentials(1, 0))));
        assert!(matches!(normal_form(2, 0, &[(ivec(&[1, 1]), ivec(&[0, 0]))], 0), Err(BinomialError::Definite(_))));
    }

    #[test]
    fn span_with_a_definite_vector_misses_the_corner() {
        // (−1,−1,1) + (1,2,−2) = (0,1,−1), and (−1,−1,1) + (0,1,−1) = (−1,0,0)
        let eqs = [(ivec(&[0, 0, 1]), ivec(&[1, 1, 0])), (ivec(&[1, 2, 0]), ivec(&[0, 0, 2]))];
        assert_eq!(normal_form(3, 0, &eqs, 0), Err(BinomialError::MissesCorner));
    }

    #[test]
    fn diagonal_meets_only_the_corner() {
        let v = boundary_faces(&sys(&[&[1, -1]]));
        let ids: Vec<&Id> = v.faces.keys().collect();
        assert_eq!(ids, vec!["int", "x1&x2"]);
        let corner = &v.faces["x1&x2"];
        assert_eq!(corner.witness, ivec(&[-1, -1]));
        assert_eq!(corner.monoid.extremals(), &[ivec(&[1, 1])]);
        for f in v.faces.values() {
            assert!(v.system.gammas.iter().all(|g| dot(g, &f.witness).is_zero()));
        }
        let (pd, inc) = variety_complex(&v);
        assert!(pd.validate().passed());
        assert!(inc.validate().passed() && inc.all_injective());
        assert!(is_smooth_complex(&pd));
    }

    #[test]
    fn cusp_complex() {
        let v = boundary_faces(&sys(&[&[2, -3]]));
        assert_eq!(v.faces.len(), 2);
        assert_eq!(v.faces["x1&x2"].monoid.extremals(), &[ivec(&[3, 2])]);
        assert!(is_smooth_complex(&variety_complex(&v).0));
    }

    #[test]
    fn p_submanifold_meets_everything() {
        let b = normal_form(2, 1, &[], 1).unwrap();
        let v = boundary_faces(&b);
        assert_eq!(v.faces.len(), 4);
        assert_eq!(v.faces["x1&x2"].monoid, ToricMonoid::orthant(2));
        let r = universal_resolution(&b).unwrap();
        assert!(r.r_x.is_trivial());
    }

    #[test]
    fn resolving_the_diagonal() {
        let b = sys(&[&[1, -1]]);
        let r = universal_resolution(&b).unwrap();
        assert!(r.universal);
        assert!(r.r_x.validate().passed());
        let px = basic_complex(&b.ambient());
        let star = crate::complex::star_subdivide_complex(&px, "x1&x2", &ivec(&[1, 1])).unwrap();
        assert_eq!(r.r_x, star);
        assert_eq!(r.charts.len(), 2);
        assert_eq!(r.indefinite_total(), 0);
        assert_eq!(r.lifted.len(), 2);
    }

    #[test]
    fn resolving_the_cusp() {
        let r = universal_resolution(&sys(&[&[2, -3]])).unwrap();
        assert!(r.r_x.validate().passed());
        assert!(r.r_x.is_smooth());
        let rays: Vec<IntVec> = r
            .r_x
            .source()
            .monoids()
            .values()
            .filter(|m| m.dim() == 1)
            .map(|m| m.extremals()[0].clone())
            .collect();
        assert!(rays.contains(&ivec(&[3, 2])));
        assert_eq!(r.indefinite_total(), 0);
        // the lifted curve is the ray (3,2) over the corner and the interior
        let lifted: Vec<&ToricMonoid> = r.lifted.iter().map(|x| r.r_x.source().monoid(x)).collect();
        assert!(lifted.iter().any(|m| m.extremals() == [ivec(&[3, 2])]));
    }

    #[test]
    fn two_equations_can_stay_indefinite_off_the_lift() {
        // W = ℤ(3,1,4); in the chart on e₁, e₂, (3,1,4) the exponents are
        // (−2,−2,0) and (2,−2,0), so the lift is {t₁ = t₂ = 1}
        let b = sys(&[&[-2, -2, 2], &[2, -2, -1]]);
        let r = universal_resolution(&b).unwrap();
        assert!(r.charts.iter().all(|c| c.face_compatible));
        assert!(r.indefinite_total() > 0);
        let c = r.charts.iter().find(|c| c.nu == IntMat::from_i64(&[&[1, 0, 0], &[0, 1, 0], &[3, 1, 4]])).unwrap();
        assert_eq!(c.transformed, vec![ivec(&[-2, -2, 0]), ivec(&[2, -2, 0])]);
    }

    #[test]
    fn square_cone_system_needs_refining() {
        // addition pattern: s₁ + s₂ = s₃ + s₄ on ℝ⁴₊
        let b = sys(&[&[1, 1, -1, -1]]);
        let (pd, _) = variety_complex(&boundary_faces(&b));
        assert!(!is_smooth_complex(&pd));
        assert!(matches!(universal_resolution(&b), Err(BinomialError::ComplexNotSmooth)));
        let (ns, _) = natural_smooth_refinement(&pd).unwrap();
        let r = resolve(&b, &ns).unwrap();
        assert!(r.r_x.validate().passed());
        assert_eq!(r.indefinite_total(), 0);
    }
}
