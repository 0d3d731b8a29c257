//! Refinements of complexes, built from compatible local refinements.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_bigint::BigInt;
use num_traits::Zero;

use super::{ComplexError, ComplexMorphism, ComplexReport, Id, MonoidalComplex};
use crate::exact::{to_rat, IntMat, IntVec};
use crate::monoid::ToricMonoid;
use crate::refinement::{planar_refine, MonoidRefinement, RefinementError};

/// A refinement `φ: R → Q` together with the local refinements `R(σ_a)`
/// it induces on every monoid of `Q`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComplexRefinement {
    pub morphism: ComplexMorphism,
    pub locals: BTreeMap<Id, MonoidRefinement>,
}

/// One star subdivision performed by the natural smooth refinement.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NsStep {
    pub element: Id,
    pub member: ToricMonoid,
    pub k: usize,
    /// number of cells with `nsdim = k` before and after the step
    pub before: usize,
    pub after: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct ExtensionReport {
    /// damaged monoids at the start of each round, ending with 0
    pub damaged: Vec<usize>,
    pub ns_steps: Vec<NsStep>,
}

impl ComplexRefinement {
    pub fn source(&self) -> &MonoidalComplex {
        &self.morphism.source
    }

    pub fn target(&self) -> &MonoidalComplex {
        &self.morphism.target
    }

    pub fn is_smooth(&self) -> bool {
        self.source().is_smooth()
    }

    pub fn is_trivial(&self) -> bool {
        self.locals.values().all(|r| r.is_trivial())
    }

    /// Recovers the local refinements from a morphism and checks that it
    /// really is a refinement: injective homomorphisms, each local a valid
    /// refinement, and the elements over `b` in bijection with its interior
    /// members.
    pub fn from_morphism(morphism: ComplexMorphism) -> Result<Self, ComplexError> {
        if !morphism.validate().passed() {
            return Err(ComplexError::Invalid("not a morphism".into()));
        }
        if !morphism.all_injective() {
            return Err(ComplexError::Invalid("a homomorphism is not injective".into()));
        }
        let q = &morphism.target;
        let r = &morphism.source;
        let mut locals = BTreeMap::new();
        for b in q.ids() {
            let mut interior = Vec::new();
            let mut members = Vec::new();
            for x in r.ids() {
                let a = morphism.image_of(x);
                if let Some(m) = q.face_map(a, b) {
                    let img = r.monoid(x).push_forward(&morphism.homs[x].mul(&m));
                    if a == b {
                        interior.push(img.clone());
                    }
                    members.push(img);
                }
            }
            let local = MonoidRefinement::new(q.monoid(b).clone(), members);
            if !local.validate().passed() {
                return Err(ComplexError::Invalid(format!("local refinement over {b} is invalid")));
            }
            let mut want = local.interior_members();
            interior.sort();
            want.sort();
            if interior != want {
                return Err(ComplexError::Invalid(format!("elements over {b} do not match its interior members")));
            }
            locals.insert(b.clone(), local);
        }
        Ok(ComplexRefinement { morphism, locals })
    }

    /// Full check: the source is a valid complex and the morphism is a
    /// refinement whose locals are the stored ones.
    pub fn validate(&self) -> ComplexReport {
        let r = self.source().validate();
        if !r.passed() {
            return r;
        }
        match ComplexRefinement::from_morphism(self.morphism.clone()) {
            Ok(rebuilt) if rebuilt.locals == self.locals => ComplexReport::Pass,
            Ok(_) => ComplexReport::Fail { property: "refinement", detail: "stored locals disagree".into() },
            Err(e) => ComplexReport::Fail { property: "refinement", detail: e.to_string() },
        }
    }

    /// Part of the refinement lying over a downward-closed subset of `Q`.
    pub fn restrict(&self, subset: &BTreeSet<Id>) -> Result<ComplexRefinement, ComplexError> {
        let q0 = self.target().restrict(subset)?;
        let keep: BTreeSet<Id> =
            self.source().ids().filter(|x| subset.contains(self.morphism.image_of(x))).cloned().collect();
        let r0 = self.source().restrict(&keep)?;
        let morphism = ComplexMorphism {
            source: r0,
            target: q0,
            poset_map: self.morphism.poset_map.iter().filter(|(x, _)| keep.contains(*x)).map(|(x, a)| (x.clone(), a.clone())).collect(),
            homs: self.morphism.homs.iter().filter(|(x, _)| keep.contains(*x)).map(|(x, m)| (x.clone(), m.clone())).collect(),
        };
        let locals = self.locals.iter().filter(|(a, _)| subset.contains(*a)).map(|(a, l)| (a.clone(), l.clone())).collect();
        Ok(ComplexRefinement { morphism, locals })
    }
}

/// Glues compatible local refinements into a complex. Elements over `a`
/// are the interior members of `R(σ_a)`; a lone one keeps the id `a`,
/// otherwise they are numbered `a/k` in canonical order.
pub fn assemble_from_local(
    q: &MonoidalComplex,
    locals: &BTreeMap<Id, MonoidRefinement>,
) -> Result<ComplexRefinement, ComplexError> {
    for (a, s) in q.monoids() {
        match locals.get(a) {
            Some(l) if l.base() == s => {}
            _ => return Err(ComplexError::Invalid(format!("missing local refinement over {a}"))),
        }
    }
    for ((a, b), m) in q.maps() {
        let img = q.monoid(a).push_forward(m);
        let pushed = locals[a].push_forward(m, &img);
        let here = locals[b].localize(&img).map_err(|_| ComplexError::IncompatibleLocalizations { face: a.clone(), over: b.clone() })?;
        if pushed != here {
            return Err(ComplexError::IncompatibleLocalizations { face: a.clone(), over: b.clone() });
        }
    }

    // element id, base element, monoid
    let mut cells: Vec<(Id, Id, ToricMonoid)> = Vec::new();
    for a in q.ids() {
        let mut interior = locals[a].interior_members();
        interior.sort();
        let single = interior.len() == 1;
        for (k, t) in interior.into_iter().enumerate() {
            let id = if single { a.clone() } else { format!("{a}/{k}") };
            cells.push((id, a.clone(), t));
        }
    }
    let by_base: BTreeMap<&Id, Vec<usize>> = cells.iter().enumerate().fold(BTreeMap::new(), |mut acc, (i, c)| {
        acc.entry(&c.1).or_insert_with(Vec::new).push(i);
        acc
    });

    let mut maps = BTreeMap::new();
    for b in q.ids() {
        // every member of R(σ_b), as the image of a unique cell
        let mut table: HashMap<ToricMonoid, (usize, IntMat)> = HashMap::new();
        for a in q.below(b) {
            let m = q.face_map(&a, b).expect("a ≤ b");
            for &i in by_base.get(&a).map(|v| v.as_slice()).unwrap_or(&[]) {
                table.insert(cells[i].2.push_forward(&m), (i, m.clone()));
            }
        }
        for &j in by_base.get(b).map(|v| v.as_slice()).unwrap_or(&[]) {
            let rho = &cells[j].2;
            for f in rho.faces() {
                if f.monoid == *rho {
                    continue;
                }
                let Some((i, m)) = table.get(&f.monoid) else {
                    return Err(ComplexError::Invalid(format!("face of a member over {b} is not a member")));
                };
                maps.insert((cells[*i].0.clone(), cells[j].0.clone()), m.clone());
            }
        }
    }
    let monoids: BTreeMap<Id, ToricMonoid> = cells.iter().map(|(id, _, t)| (id.clone(), t.clone())).collect();
    let source = MonoidalComplex::new(monoids, maps);
    let morphism = ComplexMorphism {
        poset_map: cells.iter().map(|(id, a, _)| (id.clone(), a.clone())).collect(),
        homs: cells.iter().map(|(id, _, t)| (id.clone(), IntMat::identity(t.ambient_dim()))).collect(),
        source,
        target: q.clone(),
    };
    Ok(ComplexRefinement { morphism, locals: locals.clone() })
}

fn trivial_locals(q: &MonoidalComplex) -> BTreeMap<Id, MonoidRefinement> {
    q.monoids().iter().map(|(a, s)| (a.clone(), MonoidRefinement::trivial(s))).collect()
}

fn lift_err(a: &str) -> impl Fn(RefinementError) -> ComplexError + '_ {
    move |e| match e {
        RefinementError::VNotInMonoid(_) => ComplexError::VNotInMonoid(a.to_string()),
        RefinementError::NotSimplicial => ComplexError::NotSimplicial(a.to_string()),
        RefinementError::NotSmooth => ComplexError::NotSmooth,
        other => ComplexError::Invalid(other.to_string()),
    }
}

/// Star subdivision at `v ∈ σ_a` in every local refinement `R(σ_b)`,
/// `b ≥ a'`, where `a'` is the element carrying the smallest face of
/// `σ_a` containing `v`.
pub(crate) fn star_locals(
    q: &MonoidalComplex,
    locals: &mut BTreeMap<Id, MonoidRefinement>,
    a: &str,
    v: &[BigInt],
) -> Result<(), ComplexError> {
    let sa = q.monoid(a);
    if v.iter().all(|x| x.is_zero()) || !sa.contains(v) {
        return Err(ComplexError::VNotInMonoid(a.to_string()));
    }
    let face = sa.smallest_face_containing(&to_rat(v)).map_err(|_| ComplexError::VNotInMonoid(a.to_string()))?;
    let a0 = q.face_element(a, &face.monoid).ok_or_else(|| ComplexError::Invalid(format!("face of {a} has no element")))?;
    let m = q.face_map(&a0, a).expect("face element");
    let v0 = m.to_rat().solve_left(&to_rat(v)).ok_or_else(|| ComplexError::VNotInMonoid(a.to_string()))?;
    let v0: IntVec = v0.iter().map(|x| x.to_integer()).collect();
    for b in q.above(&a0) {
        let vb = q.face_map(&a0, &b).expect("a0 ≤ b").apply(&v0);
        let l = locals[&b].star_at(&vb).map_err(lift_err(&b))?;
        locals.insert(b, l);
    }
    Ok(())
}

/// Star subdivision of `Q` at a nonzero `v ∈ σ_a`.
pub fn star_subdivide_complex(q: &MonoidalComplex, a: &str, v: &[BigInt]) -> Result<ComplexRefinement, ComplexError> {
    if !q.contains(a) {
        return Err(ComplexError::UnknownId(a.to_string()));
    }
    let mut locals = trivial_locals(q);
    star_locals(q, &mut locals, a, v)?;
    assemble_from_local(q, &locals)
}

/// Smoothing of a simplicial complex; the poset is unchanged.
pub fn smooth_complex(q: &MonoidalComplex) -> Result<ComplexRefinement, ComplexError> {
    let mut locals = BTreeMap::new();
    for (a, s) in q.monoids() {
        let l = crate::refinement::smoothing(s).map_err(lift_err(a))?;
        locals.insert(a.clone(), l);
    }
    assemble_from_local(q, &locals)
}

/// Cells `(a, τ)`: interior members of the local refinements, in the
/// order used for tie-breaking.
fn cells(locals: &BTreeMap<Id, MonoidRefinement>) -> Vec<(Id, ToricMonoid)> {
    let mut out = Vec::new();
    for (a, l) in locals {
        let mut interior = l.interior_members();
        interior.sort();
        out.extend(interior.into_iter().map(|t| (a.clone(), t)));
    }
    out
}

const NS_STEP_LIMIT: usize = 100_000;

/// Natural smooth refinement starting from the given local refinements
/// (trivial ones give `ns(Q)`). While some cell is non-simplicial, take the
/// largest `k = nsdim`, star-subdivide at the extremal sum of the first
/// cell with `dim = nsdim = k`, then smooth everything.
pub fn ns_from_locals(
    q: &MonoidalComplex,
    locals: BTreeMap<Id, MonoidRefinement>,
) -> Result<(ComplexRefinement, Vec<NsStep>), ComplexError> {
    let mut locals = locals;
    let mut steps = Vec::new();
    loop {
        let cs = cells(&locals);
        let dims: Vec<usize> = cs.iter().map(|(_, t)| t.nsdim()).collect();
        let k = dims.iter().copied().max().unwrap_or(0);
        if k == 0 {
            break;
        }
        if steps.len() >= NS_STEP_LIMIT {
            return Err(ComplexError::Invalid("natural smooth refinement did not terminate".into()));
        }
        let before = dims.iter().filter(|&&d| d == k).count();
        let pick = cs
            .iter()
            .zip(&dims)
            .find(|((_, t), &d)| d == k && t.dim() == k)
            .map(|(c, _)| c.clone())
            .ok_or_else(|| ComplexError::Invalid(format!("no fully non-simplicial cell of dimension {k}")))?;
        let (a, tau) = pick;
        star_locals(q, &mut locals, &a, &tau.extremal_sum())?;
        let after = cells(&locals).iter().filter(|(_, t)| t.nsdim() == k).count();
        steps.push(NsStep { element: a, member: tau, k, before, after });
    }
    for (a, l) in locals.iter_mut() {
        *l = l.smoothed().map_err(lift_err(a))?;
    }
    Ok((assemble_from_local(q, &locals)?, steps))
}

pub fn natural_smooth_refinement(q: &MonoidalComplex) -> Result<(ComplexRefinement, Vec<NsStep>), ComplexError> {
    ns_from_locals(q, trivial_locals(q))
}

/// Extends a refinement of the downward-closed `Q₀ ⊆ Q` to all of `Q`.
/// Damaged monoids (unrefined, with a refined proper face) of least
/// dimension are replaced by the cone from their extremal sum over the
/// refined boundary; the rest stay trivial. If `R₀` is smooth the result
/// is then made smooth by the natural smooth refinement, which leaves the
/// part over `Q₀` alone.
pub fn extend_refinement(
    q: &MonoidalComplex,
    r0: &ComplexRefinement,
) -> Result<(ComplexRefinement, ExtensionReport), ComplexError> {
    let dom0: BTreeSet<Id> = r0.target().ids().cloned().collect();
    let q0 = q.restrict(&dom0)?;
    if q0 != *r0.target() {
        return Err(ComplexError::Invalid("refinement is not over a subcomplex".into()));
    }
    let mut locals: BTreeMap<Id, MonoidRefinement> = r0.locals.clone();
    let mut report = ExtensionReport::default();
    loop {
        let damaged: Vec<Id> = q
            .ids()
            .filter(|s| !locals.contains_key(*s))
            .filter(|s| q.below(s).iter().any(|a| locals.get(a).is_some_and(|l| !l.is_trivial())))
            .cloned()
            .collect();
        report.damaged.push(damaged.len());
        let Some(d) = damaged.iter().map(|s| q.monoid(s).dim()).min() else { break };
        for s in damaged.iter().filter(|s| q.monoid(s).dim() == d) {
            let sigma = q.monoid(s);
            let mut boundary = Vec::new();
            for a in q.below(s) {
                if a == *s {
                    continue;
                }
                let m = q.face_map(&a, s).expect("a ≤ s");
                let img = q.monoid(&a).push_forward(&m);
                let la = locals.get(&a).cloned().unwrap_or_else(|| MonoidRefinement::trivial(q.monoid(&a)));
                boundary.extend(la.push_forward(&m, &img).members().iter().cloned());
            }
            boundary.sort();
            boundary.dedup();
            let v = sigma.extremal_sum();
            let mut members = boundary.clone();
            for rho in &boundary {
                let mut lat = rho.lattice_basis().to_vec();
                lat.push(v.clone());
                let mut gens = rho.extremals().to_vec();
                gens.push(v.clone());
                members.push(ToricMonoid::new(sigma.ambient_dim(), &lat, &gens).map_err(|e| ComplexError::Invalid(e.to_string()))?);
            }
            for a in q.below(s) {
                if a != *s {
                    locals.entry(a.clone()).or_insert_with(|| MonoidRefinement::trivial(q.monoid(&a)));
                }
            }
            locals.insert(s.clone(), MonoidRefinement::new(sigma.clone(), members));
        }
    }
    for (a, s) in q.monoids() {
        locals.entry(a.clone()).or_insert_with(|| MonoidRefinement::trivial(s));
    }
    if r0.locals.values().all(|l| l.is_smooth()) {
        let (r, steps) = ns_from_locals(q, locals)?;
        report.ns_steps = steps;
        Ok((r, report))
    } else {
        Ok((assemble_from_local(q, &locals)?, report))
    }
}

/// Planar refinement of a smooth `P` along `i: Q → P`, where each monoid of
/// `P` has at most one preimage and that preimage maps onto the
/// intersection of the target with a subspace. Monoids without a preimage
/// use the span of the images sitting in their faces. Returns the
/// refinement and, for each element of `Q`, the element of the refinement
/// carrying it.
pub fn planar_refine_complex(
    p: &MonoidalComplex,
    i: &ComplexMorphism,
) -> Result<(ComplexRefinement, BTreeMap<Id, Id>), ComplexError> {
    let mut pre: BTreeMap<&Id, Vec<&Id>> = BTreeMap::new();
    for (x, b) in &i.poset_map {
        pre.entry(b).or_default().push(x);
    }
    let mut locals = BTreeMap::new();
    let mut images: BTreeMap<Id, (Id, ToricMonoid)> = BTreeMap::new();
    for (b, sb) in p.monoids() {
        let span: Vec<IntVec> = match pre.get(b).map(|v| v.as_slice()) {
            Some([x]) => {
                let img = i.source.monoid(x).push_forward(&i.homs[*x]);
                if sb.intersect_with_subspace(img.lattice_basis()) != img {
                    return Err(ComplexError::ImageNotPlanar(b.clone()));
                }
                images.insert((*x).clone(), (b.clone(), img.clone()));
                img.lattice_basis().to_vec()
            }
            Some(_) => return Err(ComplexError::MultiplePreimages(b.clone())),
            None => {
                let mut vs = Vec::new();
                for (x, a) in &i.poset_map {
                    if a != b {
                        if let Some(m) = p.face_map(a, b) {
                            let img = i.source.monoid(x).push_forward(&i.homs[x].mul(&m));
                            vs.extend(img.lattice_basis().iter().cloned());
                        }
                    }
                }
                vs
            }
        };
        locals.insert(b.clone(), planar_refine(sb, &span).map_err(lift_err(b))?);
    }
    let r = assemble_from_local(p, &locals)?;
    let mut carry = BTreeMap::new();
    for (x, (b, img)) in images {
        let found = r.source().ids().find(|y| {
            let a = r.morphism.image_of(y);
            p.face_map(a, &b).is_some_and(|m| r.source().monoid(y).push_forward(&m) == img)
        });
        match found {
            Some(y) => carry.insert(x, y.clone()),
            None => return Err(ComplexError::ImageNotPlanar(b)),
        };
    }
    Ok((r, carry))
}
