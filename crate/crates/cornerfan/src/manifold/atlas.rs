//! Coordinate charts of the generalized blow-up of a model corner.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::{unit_vec, ManifoldError};
use crate::exact::{dot, lp_feasible, rat_to_primitive, to_rat, IntMat, IntVec, LpResult, RatMat};
use crate::monoid::ToricMonoid;
use crate::refinement::MonoidRefinement;

/// One chart `U_σ = ℝⁿ₊` with blow-down `t ↦ t^ν`; row `i` of `ν` is the
/// generator attached to `t_i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Chart {
    pub monoid: ToricMonoid,
    pub nu: IntMat,
}

/// `χ: U_{σ₁,τ} → U_{σ₂,τ}`, `t ↦ t^χ` with `χ = ν₁ν₂⁻¹`. `common[k]` pairs
/// the row of a generator of `τ` in `ν₁` with its row in `ν₂`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transition {
    pub from: usize,
    pub to: usize,
    pub common_face: ToricMonoid,
    pub common: Vec<(usize, usize)>,
    pub matrix: RatMat,
    /// `u` vanishing on `τ`, positive on the other generators of `σ₁` and
    /// negative on those of `σ₂`
    pub separating: IntVec,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChartAtlas {
    pub n: usize,
    pub free_dim: usize,
    pub charts: Vec<Chart>,
    pub transitions: Vec<Transition>,
}

/// Orders generators so that a unit vector `e_j` sits in row `j`; the rest
/// fill the free rows in canonical order. For an ordinary blow-up this gives
/// the identity with one row replaced by the blown-up face's indicator.
fn chart_rows(n: usize, gens: &[IntVec]) -> Vec<IntVec> {
    let mut rows: Vec<Option<IntVec>> = vec![None; n];
    let mut rest = Vec::new();
    for g in gens {
        match (0..n).find(|&j| *g == unit_vec(n, j)) {
            Some(j) => rows[j] = Some(g.clone()),
            None => rest.push(g.clone()),
        }
    }
    let mut rest = rest.into_iter();
    rows.into_iter().map(|r| r.unwrap_or_else(|| rest.next().expect("n generators"))).collect()
}

pub fn local_atlas(n: usize, r: &MonoidRefinement, free_dim: usize) -> Result<ChartAtlas, ManifoldError> {
    if *r.base() != ToricMonoid::orthant(n) || !r.is_smooth() || !r.validate().passed() {
        return Err(ManifoldError::NotSmoothRefinement);
    }
    let mut charts: Vec<Chart> = r
        .members()
        .iter()
        .filter(|m| m.dim() == n)
        .map(|m| Chart { monoid: m.clone(), nu: IntMat::from_rows(n, chart_rows(n, m.extremals())) })
        .collect();
    charts.sort_by(|a, b| a.nu.row_vecs().cmp(b.nu.row_vecs()));
    let mut transitions = Vec::new();
    for i in 0..charts.len() {
        for j in i + 1..charts.len() {
            transitions.push(transition(&charts, i, j)?);
        }
    }
    Ok(ChartAtlas { n, free_dim, charts, transitions })
}

fn transition(charts: &[Chart], i: usize, j: usize) -> Result<Transition, ManifoldError> {
    let (c1, c2) = (&charts[i], &charts[j]);
    let n = c1.nu.rows();
    let inv = c2.nu.to_rat().inverse().ok_or(ManifoldError::NotSmoothRefinement)?;
    let matrix = c1.nu.to_rat().mul(&inv);
    let mut common = Vec::new();
    for (a, v) in c1.nu.row_vecs().iter().enumerate() {
        if let Some(b) = c2.nu.row_vecs().iter().position(|w| w == v) {
            common.push((a, b));
        }
    }
    let shared: Vec<IntVec> = common.iter().map(|&(a, _)| c1.nu.row(a).to_vec()).collect();
    let common_face = if shared.is_empty() {
        ToricMonoid::trivial(n)
    } else {
        ToricMonoid::new(n, &shared, &shared).map_err(|_| ManifoldError::NotSmoothRefinement)?
    };
    let strict: Vec<_> = (0..n)
        .filter(|a| !common.iter().any(|p| p.0 == *a))
        .map(|a| to_rat(c1.nu.row(a)))
        .chain((0..n).filter(|b| !common.iter().any(|p| p.1 == *b)).map(|b| to_rat(c2.nu.row(b)).iter().map(|x| -x).collect()))
        .collect();
    let zero: Vec<_> = shared.iter().map(|v| to_rat(v)).collect();
    let separating = match lp_feasible(&strict, &zero, &[], n) {
        LpResult::Feasible(u) if !u.iter().all(|x| x.is_zero()) => rat_to_primitive(&u),
        LpResult::Feasible(_) => vec![BigInt::zero(); n],
        LpResult::Infeasible(_) => return Err(ManifoldError::NotSmoothRefinement),
    };
    Ok(Transition { from: i, to: j, common_face, common, matrix, separating })
}

impl ChartAtlas {
    pub fn transition(&self, i: usize, j: usize) -> Option<RatMat> {
        if i == j {
            return Some(RatMat::identity(self.n));
        }
        let (a, b) = if i < j { (i, j) } else { (j, i) };
        let t = self.transitions.iter().find(|t| t.from == a && t.to == b)?;
        if i < j {
            Some(t.matrix.clone())
        } else {
            t.matrix.inverse()
        }
    }

    /// Exact checks: `χ₁₂χ₂₃ = χ₁₃` for all triples, the rows of the common
    /// generators are unit rows (so `χ` extends across `U_{σ₁,τ}`), `β₂∘χ = β₁`,
    /// and the separating functional has the required signs.
    pub fn check_exact(&self) -> Result<(), String> {
        let k = self.charts.len();
        for a in 0..k {
            for b in 0..k {
                for c in 0..k {
                    let (ab, bc, ac) = (self.transition(a, b).unwrap(), self.transition(b, c).unwrap(), self.transition(a, c).unwrap());
                    if ab.mul(&bc) != ac {
                        return Err(format!("transitions {a}→{b}→{c} do not compose"));
                    }
                }
            }
        }
        for t in &self.transitions {
            let (n1, n2) = (&self.charts[t.from].nu, &self.charts[t.to].nu);
            if t.matrix.mul(&n2.to_rat()) != n1.to_rat() {
                return Err(format!("transition {}→{} does not intertwine the blow-downs", t.from, t.to));
            }
            for &(a, b) in &t.common {
                for j in 0..self.n {
                    let want = if j == b { BigRational::one() } else { BigRational::zero() };
                    if *t.matrix.get(a, j) != want {
                        return Err(format!("transition {}→{} mixes a common coordinate", t.from, t.to));
                    }
                }
            }
            for r in 0..self.n {
                let s1 = dot(&t.separating, n1.row(r));
                let s2 = dot(&t.separating, n2.row(r));
                let in1 = t.common.iter().any(|p| p.0 == r);
                let in2 = t.common.iter().any(|p| p.1 == r);
                let ok1 = if in1 { s1.is_zero() } else { s1.is_positive() };
                let ok2 = if in2 { s2.is_zero() } else { s2.is_negative() };
                if !ok1 || !ok2 {
                    return Err(format!("separating functional for {}→{} has the wrong signs", t.from, t.to));
                }
            }
        }
        Ok(())
    }
}
