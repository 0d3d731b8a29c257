//! Floating-point spot checks of atlases and lifts. Monomials are evaluated
//! in log space: `log(t^M) = log t · M`.

use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::exact::{IntMat, RatMat};
use crate::manifold::ChartAtlas;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PlanError {
    #[error("sampling range must satisfy 0 < lo < hi")]
    Range,
    #[error("tolerance must be positive")]
    Tolerance,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SamplePlan {
    pub points: usize,
    pub lo: f64,
    pub hi: f64,
    pub seed: u64,
    /// relative
    pub tolerance: f64,
}

impl Default for SamplePlan {
    fn default() -> Self {
        SamplePlan { points: 100, lo: 0.1, hi: 10.0, seed: 0, tolerance: 1e-9 }
    }
}

impl SamplePlan {
    pub fn new(points: usize, lo: f64, hi: f64, seed: u64, tolerance: f64) -> Result<Self, PlanError> {
        if !(lo > 0.0 && hi > lo) {
            return Err(PlanError::Range);
        }
        if !(tolerance > 0.0) {
            return Err(PlanError::Tolerance);
        }
        Ok(SamplePlan { points, lo, hi, seed, tolerance })
    }

    fn sample(&self, rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
        (0..n).map(|_| rng.gen_range(self.lo..=self.hi)).collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CheckReport {
    pub label: String,
    pub samples: usize,
    pub max_error: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct VerifyReport {
    pub tolerance: f64,
    pub checks: Vec<CheckReport>,
    /// exact preconditions that failed, if any
    pub notes: Vec<String>,
}

impl VerifyReport {
    pub fn max_error(&self) -> f64 {
        self.checks.iter().map(|c| c.max_error).fold(0.0, f64::max)
    }

    pub fn passed(&self) -> bool {
        self.notes.is_empty() && self.checks.iter().all(|c| c.max_error <= self.tolerance)
    }
}

fn rat_f64(m: &RatMat) -> Vec<Vec<f64>> {
    (0..m.rows()).map(|i| (0..m.cols()).map(|j| m.get(i, j).to_f64().unwrap_or(f64::NAN)).collect()).collect()
}

fn int_f64(m: &IntMat) -> Vec<Vec<f64>> {
    rat_f64(&m.to_rat())
}

/// `log t · M`
fn log_apply(log_t: &[f64], m: &[Vec<f64>]) -> Vec<f64> {
    let cols = m.first().map_or(0, Vec::len);
    (0..cols).map(|j| log_t.iter().zip(m).map(|(l, row)| l * row[j]).sum()).collect()
}

fn rel_error(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs() / x.abs().max(y.abs()).max(f64::MIN_POSITIVE))
        .fold(0.0, f64::max)
}

fn exp_all(v: &[f64]) -> Vec<f64> {
    v.iter().map(|x| x.exp()).collect()
}

/// Samples each overlap and checks `χ₂₁∘χ₁₂ = id` and `β₂∘χ₁₂ = β₁`.
/// Tangential coordinates pass through every chart unchanged.
pub fn verify_transitions(atlas: &ChartAtlas, plan: &SamplePlan) -> VerifyReport {
    let mut rng = ChaCha8Rng::seed_from_u64(plan.seed);
    let mut checks = Vec::new();
    let mut notes = Vec::new();
    for t in &atlas.transitions {
        let Some(back) = t.matrix.inverse() else {
            notes.push(format!("transition {}→{} is singular", t.from, t.to));
            continue;
        };
        let chi = rat_f64(&t.matrix);
        let chi_inv = rat_f64(&back);
        let nu1 = int_f64(&atlas.charts[t.from].nu);
        let nu2 = int_f64(&atlas.charts[t.to].nu);
        let mut round = 0.0f64;
        let mut down = 0.0f64;
        for _ in 0..plan.points {
            let pt = plan.sample(&mut rng, atlas.n + atlas.free_dim);
            let (s, y) = pt.split_at(atlas.n);
            let log_s: Vec<f64> = s.iter().map(|x| x.ln()).collect();
            let log_t2 = log_apply(&log_s, &chi);
            let mut back_pt = exp_all(&log_apply(&log_t2, &chi_inv));
            back_pt.extend_from_slice(y);
            round = round.max(rel_error(&back_pt, &pt));
            let mut x1 = exp_all(&log_apply(&log_s, &nu1));
            let mut x2 = exp_all(&log_apply(&log_t2, &nu2));
            x1.extend_from_slice(y);
            x2.extend_from_slice(y);
            down = down.max(rel_error(&x2, &x1));
        }
        checks.push(CheckReport { label: format!("χ{}{} round trip", t.to, t.from), samples: plan.points, max_error: round });
        checks.push(CheckReport { label: format!("β{}∘χ{}{} = β{}", t.to, t.from, t.to, t.from), samples: plan.points, max_error: down });
    }
    VerifyReport { tolerance: plan.tolerance, checks, notes }
}

/// `f(x) = a·x^δ` against `β(f′(x))` with `f′(x) = a^{ν⁻¹}x^μ`. Requires
/// `δ = μν` exactly; a failure of that identity is reported, not sampled.
pub fn verify_lift(delta: &IntMat, nu: &IntMat, mu: &IntMat, a: &[f64], plan: &SamplePlan) -> VerifyReport {
    let mut notes = Vec::new();
    if mu.mul(nu) != *delta {
        notes.push("δ ≠ μν".to_string());
    }
    let Some(nu_inv) = nu.to_rat().inverse() else {
        notes.push("ν is singular".to_string());
        return VerifyReport { tolerance: plan.tolerance, checks: vec![], notes };
    };
    if a.len() != nu.cols() || a.iter().any(|x| !(*x > 0.0)) {
        notes.push("coefficients must be positive, one per target coordinate".to_string());
        return VerifyReport { tolerance: plan.tolerance, checks: vec![], notes };
    }
    let (d, n, m, ni) = (int_f64(delta), int_f64(nu), int_f64(mu), rat_f64(&nu_inv));
    let log_a: Vec<f64> = a.iter().map(|x| x.ln()).collect();
    let log_a_nu = log_apply(&log_a, &ni);
    let mut rng = ChaCha8Rng::seed_from_u64(plan.seed);
    let mut err = 0.0f64;
    for _ in 0..plan.points {
        let x = plan.sample(&mut rng, delta.rows());
        let log_x: Vec<f64> = x.iter().map(|v| v.ln()).collect();
        let f: Vec<f64> = log_apply(&log_x, &d).iter().zip(&log_a).map(|(l, c)| (l + c).exp()).collect();
        let log_lift: Vec<f64> = log_apply(&log_x, &m).iter().zip(&log_a_nu).map(|(l, c)| l + c).collect();
        let through = exp_all(&log_apply(&log_lift, &n));
        err = err.max(rel_error(&through, &f));
    }
    VerifyReport {
        tolerance: plan.tolerance,
        checks: vec![CheckReport { label: "β∘f′ = f".into(), samples: plan.points, max_error: err }],
        notes,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;
    use crate::manifold::{local_atlas, ordinary_blowup, CornerComplex};
    use crate::monoid::ToricMonoid;
    use crate::refinement::MonoidRefinement;

    #[test]
    fn plan_validation() {
        assert_eq!(SamplePlan::new(10, 0.0, 1.0, 0, 1e-9), Err(PlanError::Range));
        assert_eq!(SamplePlan::new(10, 2.0, 1.0, 0, 1e-9), Err(PlanError::Range));
        assert_eq!(SamplePlan::new(10, 0.1, 1.0, 0, 0.0), Err(PlanError::Tolerance));
        assert!(SamplePlan::new(10, 0.1, 10.0, 0, 1e-9).is_ok());
    }

    #[test]
    fn trivial_atlas_has_no_transitions() {
        let r = MonoidRefinement::trivial(&ToricMonoid::orthant(3));
        let a = local_atlas(3, &r, 1).unwrap();
        let rep = verify_transitions(&a, &SamplePlan::default());
        assert!(rep.passed());
        assert_eq!(rep.max_error(), 0.0);
    }

    #[test]
    fn corner_blowup_atlas() {
        let a = ordinary_blowup(&CornerComplex::model(2, 0), "x1&x2").unwrap().atlas_at("x1&x2").unwrap();
        let rep = verify_transitions(&a, &SamplePlan { points: 200, ..SamplePlan::default() });
        assert!(rep.passed(), "{rep:?}");
        assert!(rep.max_error() < 1e-12);
        let mut bad = a.clone();
        bad.transitions[0].matrix = bad.transitions[0].matrix.map(|x| x * BigRational::from_integer(2.into()));
        assert!(!verify_transitions(&bad, &SamplePlan::default()).passed());
    }

    #[test]
    fn lifts() {
        let plan = SamplePlan::default();
        // diagonal s ↦ (s, s) into the chart ν = [[1,1],[0,1]]: μ = [[1,0]]
        let (delta, nu, mu) = (IntMat::from_i64(&[&[1, 1]]), IntMat::from_i64(&[&[1, 1], &[0, 1]]), IntMat::from_i64(&[&[1, 0]]));
        assert!(verify_lift(&delta, &nu, &mu, &[1.0, 1.0], &plan).passed());
        assert!(verify_lift(&delta, &nu, &mu, &[2.5, 0.3], &plan).passed());
        // cusp t ↦ (t³, t²) through the chart on ⟨(3,2), (1,1)⟩
        let cusp = IntMat::from_i64(&[&[3, 2]]);
        let nu = IntMat::from_i64(&[&[3, 2], &[1, 1]]);
        let mu = IntMat::from_i64(&[&[1, 0]]);
        let rep = verify_lift(&cusp, &nu, &mu, &[1.0, 1.0], &plan);
        assert!(rep.passed() && rep.max_error() < 1e-12, "{rep:?}");
        let wrong = IntMat::from_i64(&[&[0, 1]]);
        assert!(!verify_lift(&cusp, &nu, &wrong, &[1.0, 1.0], &plan).passed());
    }
}
