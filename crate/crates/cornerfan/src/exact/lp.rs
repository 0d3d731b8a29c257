//! Exact feasibility of homogeneous systems `s·x > 0`, `z·x = 0`, `n·x ≥ 0`.
//!
//! Up to [`FM_MAX_DIM`] variables Fourier–Motzkin elimination is used, above
//! that a phase-one simplex with Bland's rule. Infeasible systems come with a
//! Motzkin certificate `Σλᵢsᵢ + Σμᵢnᵢ + Σνᵢzᵢ = 0`, `λ, μ ≥ 0`, `λ ≠ 0`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::mat::{dot, RatVec};

pub const FM_MAX_DIM: usize = 8;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Certificate {
    pub strict: RatVec,
    pub zero: RatVec,
    pub nonneg: RatVec,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LpResult {
    Feasible(RatVec),
    Infeasible(Certificate),
}

impl LpResult {
    pub fn witness(&self) -> Option<&RatVec> {
        match self {
            LpResult::Feasible(x) => Some(x),
            LpResult::Infeasible(_) => None,
        }
    }

    pub fn is_feasible(&self) -> bool {
        matches!(self, LpResult::Feasible(_))
    }
}

fn rz() -> BigRational {
    BigRational::zero()
}

pub fn lp_feasible(strict: &[RatVec], zero: &[RatVec], nonneg: &[RatVec], dim: usize) -> LpResult {
    for v in strict.iter().chain(zero).chain(nonneg) {
        assert_eq!(v.len(), dim, "constraint length does not match dim");
    }
    if dim <= FM_MAX_DIM {
        fourier_motzkin(strict, zero, nonneg, dim)
    } else {
        simplex_route(strict, zero, nonneg, dim)
    }
}

/// Checks a witness against the system exactly.
pub fn satisfies(x: &[BigRational], strict: &[RatVec], zero: &[RatVec], nonneg: &[RatVec]) -> bool {
    strict.iter().all(|s| dot(s, x).is_positive())
        && zero.iter().all(|z| dot(z, x).is_zero())
        && nonneg.iter().all(|n| !dot(n, x).is_negative())
}

/// Checks an infeasibility certificate exactly.
pub fn certifies(c: &Certificate, strict: &[RatVec], zero: &[RatVec], nonneg: &[RatVec], dim: usize) -> bool {
    if c.strict.len() != strict.len() || c.zero.len() != zero.len() || c.nonneg.len() != nonneg.len() {
        return false;
    }
    if c.strict.iter().chain(&c.nonneg).any(|x| x.is_negative()) {
        return false;
    }
    if c.strict.iter().all(|x| x.is_zero()) {
        return false;
    }
    let mut sum = vec![rz(); dim];
    let terms = c.strict.iter().zip(strict).chain(c.zero.iter().zip(zero)).chain(c.nonneg.iter().zip(nonneg));
    for (k, v) in terms {
        for (s, x) in sum.iter_mut().zip(v) {
            *s += k * x;
        }
    }
    sum.iter().all(|x| x.is_zero())
}

#[derive(Clone)]
struct Row {
    a: RatVec,
    strict: bool,
    mult: RatVec,
}

impl Row {
    fn normalize(mut self) -> Row {
        if let Some(p) = self.a.iter().find(|x| !x.is_zero()) {
            let k = p.abs().recip();
            for x in self.a.iter_mut().chain(self.mult.iter_mut()) {
                *x = &*x * &k;
            }
        }
        self
    }
}

fn certificate_from(mult: &[BigRational], ns: usize, nz: usize) -> Certificate {
    let strict = mult[..ns].to_vec();
    let nonneg = mult[ns + 2 * nz..].to_vec();
    let zero = (0..nz).map(|i| &mult[ns + i] - &mult[ns + nz + i]).collect();
    Certificate { strict, zero, nonneg }
}

fn fourier_motzkin(strict: &[RatVec], zero: &[RatVec], nonneg: &[RatVec], dim: usize) -> LpResult {
    let (ns, nz) = (strict.len(), zero.len());
    let m = ns + 2 * nz + nonneg.len();
    let unit = |i: usize| {
        let mut u = vec![rz(); m];
        u[i] = BigRational::one();
        u
    };
    let mut rows: Vec<Row> = Vec::new();
    for (i, s) in strict.iter().enumerate() {
        rows.push(Row { a: s.clone(), strict: true, mult: unit(i) });
    }
    for (i, z) in zero.iter().enumerate() {
        rows.push(Row { a: z.clone(), strict: false, mult: unit(ns + i) });
        rows.push(Row { a: z.iter().map(|x| -x).collect(), strict: false, mult: unit(ns + nz + i) });
    }
    for (i, n) in nonneg.iter().enumerate() {
        rows.push(Row { a: n.clone(), strict: false, mult: unit(ns + 2 * nz + i) });
    }

    let mut stages: Vec<Vec<Row>> = Vec::with_capacity(dim);
    for j in 0..dim {
        let mut next = Vec::new();
        let (mut pos, mut neg) = (Vec::new(), Vec::new());
        for r in &rows {
            if r.a[j].is_positive() {
                pos.push(r);
            } else if r.a[j].is_negative() {
                neg.push(r);
            } else {
                next.push(r.clone());
            }
        }
        for p in &pos {
            for n in &neg {
                let (cp, cn) = (-&n.a[j], p.a[j].clone());
                let comb = |x: &RatVec, y: &RatVec| -> RatVec {
                    x.iter().zip(y).map(|(a, b)| &cp * a + &cn * b).collect()
                };
                next.push(Row { a: comb(&p.a, &n.a), strict: p.strict || n.strict, mult: comb(&p.mult, &n.mult) });
            }
        }
        let mut kept: Vec<Row> = Vec::new();
        for r in next {
            let r = r.normalize();
            if r.a.iter().all(|x| x.is_zero()) {
                if r.strict {
                    return LpResult::Infeasible(certificate_from(&r.mult, ns, nz));
                }
                continue;
            }
            if !kept.iter().any(|k| k.a == r.a && (k.strict || !r.strict)) {
                kept.retain(|k| !(k.a == r.a && r.strict && !k.strict));
                kept.push(r);
            }
        }
        stages.push(rows);
        rows = kept;
    }

    let mut x = vec![rz(); dim];
    for j in (0..dim).rev() {
        let mut lo: Option<(BigRational, bool)> = None;
        let mut hi: Option<(BigRational, bool)> = None;
        for r in &stages[j] {
            let c = &r.a[j];
            if c.is_zero() {
                continue;
            }
            let rest: BigRational = (j + 1..dim).map(|k| &r.a[k] * &x[k]).sum();
            let bound = -rest / c;
            if c.is_positive() {
                let tighter = match &lo {
                    None => true,
                    Some((b, s)) => bound > *b || (bound == *b && r.strict && !s),
                };
                if tighter {
                    lo = Some((bound, r.strict));
                }
            } else {
                let tighter = match &hi {
                    None => true,
                    Some((b, s)) => bound < *b || (bound == *b && r.strict && !s),
                };
                if tighter {
                    hi = Some((bound, r.strict));
                }
            }
        }
        let zero_ok = lo.as_ref().is_none_or(|(b, s)| if *s { b.is_negative() } else { !b.is_positive() })
            && hi.as_ref().is_none_or(|(b, s)| if *s { b.is_positive() } else { !b.is_negative() });
        x[j] = if zero_ok {
            rz()
        } else {
            match (lo, hi) {
                (Some((l, s)), None) => if s { l + BigRational::one() } else { l },
                (None, Some((h, s))) => if s { h - BigRational::one() } else { h },
                (Some((l, ls)), Some((h, hs))) => {
                    if l == h && !ls && !hs {
                        l
                    } else {
                        (l + h) / BigRational::from_integer(BigInt::from(2))
                    }
                }
                (None, None) => rz(),
            }
        };
    }
    debug_assert!(satisfies(&x, strict, zero, nonneg));
    LpResult::Feasible(x)
}

/// Phase-one simplex: some `y ≥ 0` with `A y = b`, or `None`.
/// Entering and leaving variables use Bland's lowest-index rule.
pub fn phase_one(a: &[RatVec], b: &[BigRational], nvars: usize) -> Option<RatVec> {
    let m = a.len();
    // tableau columns: nvars structural, m artificial, 1 rhs
    let width = nvars + m + 1;
    let mut t: Vec<RatVec> = Vec::with_capacity(m + 1);
    for i in 0..m {
        let flip = b[i].is_negative();
        let mut row = vec![rz(); width];
        for j in 0..nvars {
            row[j] = if flip { -&a[i][j] } else { a[i][j].clone() };
        }
        row[nvars + i] = BigRational::one();
        row[width - 1] = if flip { -&b[i] } else { b[i].clone() };
        t.push(row);
    }
    // objective row: minimize Σ artificials, stored as reduced costs
    let mut obj = vec![rz(); width];
    for row in &t {
        for j in 0..nvars {
            obj[j] -= &row[j];
        }
        obj[width - 1] -= &row[width - 1];
    }
    let mut basis: Vec<usize> = (nvars..nvars + m).collect();
    loop {
        let Some(enter) = (0..nvars + m).find(|&j| obj[j].is_negative()) else { break };
        let mut leave: Option<(usize, BigRational)> = None;
        for i in 0..m {
            if t[i][enter].is_positive() {
                let ratio = &t[i][width - 1] / &t[i][enter];
                let better = match &leave {
                    None => true,
                    Some((li, lr)) => ratio < *lr || (ratio == *lr && basis[i] < basis[*li]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
        }
        let Some((p, _)) = leave else { break };
        let piv = t[p][enter].clone();
        for x in t[p].iter_mut() {
            *x = &*x / &piv;
        }
        let prow = t[p].clone();
        for (i, row) in t.iter_mut().enumerate() {
            if i != p && !row[enter].is_zero() {
                let f = row[enter].clone();
                for (x, y) in row.iter_mut().zip(&prow) {
                    *x -= &f * y;
                }
            }
        }
        if !obj[enter].is_zero() {
            let f = obj[enter].clone();
            for (x, y) in obj.iter_mut().zip(&prow) {
                *x -= &f * y;
            }
        }
        basis[p] = enter;
    }
    if !obj[width - 1].is_zero() {
        return None;
    }
    let mut y = vec![rz(); nvars];
    for (i, &bv) in basis.iter().enumerate() {
        if bv < nvars {
            y[bv] = t[i][width - 1].clone();
        }
    }
    Some(y)
}

fn simplex_route(strict: &[RatVec], zero: &[RatVec], nonneg: &[RatVec], dim: usize) -> LpResult {
    let (ns, nz, nn) = (strict.len(), zero.len(), nonneg.len());
    // x = x⁺ − x⁻; slack per inequality; strict rows scaled to ≥ 1
    let nvars = 2 * dim + ns + nn;
    let mut a = Vec::new();
    let mut b = Vec::new();
    let mut push = |v: &RatVec, slack: Option<usize>, rhs: BigRational| {
        let mut row = vec![rz(); nvars];
        for k in 0..dim {
            row[k] = v[k].clone();
            row[dim + k] = -&v[k];
        }
        if let Some(s) = slack {
            row[2 * dim + s] = -BigRational::one();
        }
        a.push(row);
        b.push(rhs);
    };
    for (i, s) in strict.iter().enumerate() {
        push(s, Some(i), BigRational::one());
    }
    for (i, n) in nonneg.iter().enumerate() {
        push(n, Some(ns + i), rz());
    }
    for z in zero {
        push(z, None, rz());
    }
    if let Some(y) = phase_one(&a, &b, nvars) {
        let x: RatVec = (0..dim).map(|k| &y[k] - &y[dim + k]).collect();
        debug_assert!(satisfies(&x, strict, zero, nonneg));
        return LpResult::Feasible(x);
    }
    // dual: Σλs + Σμn + Σ(ν⁺−ν⁻)z = 0, Σλ = 1
    let dvars = ns + nn + 2 * nz;
    let mut da = Vec::new();
    let mut db = Vec::new();
    for k in 0..dim {
        let mut row = vec![rz(); dvars];
        for i in 0..ns {
            row[i] = strict[i][k].clone();
        }
        for i in 0..nn {
            row[ns + i] = nonneg[i][k].clone();
        }
        for i in 0..nz {
            row[ns + nn + i] = zero[i][k].clone();
            row[ns + nn + nz + i] = -&zero[i][k];
        }
        da.push(row);
        db.push(rz());
    }
    let mut row = vec![rz(); dvars];
    for x in row.iter_mut().take(ns) {
        *x = BigRational::one();
    }
    da.push(row);
    db.push(BigRational::one());
    let y = phase_one(&da, &db, dvars).expect("Motzkin alternative: one of the two systems is feasible");
    LpResult::Infeasible(Certificate {
        strict: y[..ns].to_vec(),
        nonneg: y[ns..ns + nn].to_vec(),
        zero: (0..nz).map(|i| &y[ns + nn + i] - &y[ns + nn + nz + i]).collect(),
    })
}

/// Forces the simplex route regardless of dimension; used to cross-check.
pub fn lp_feasible_simplex(strict: &[RatVec], zero: &[RatVec], nonneg: &[RatVec], dim: usize) -> LpResult {
    simplex_route(strict, zero, nonneg, dim)
}

/// Forces Fourier–Motzkin regardless of dimension; used to cross-check.
pub fn lp_feasible_fm(strict: &[RatVec], zero: &[RatVec], nonneg: &[RatVec], dim: usize) -> LpResult {
    fourier_motzkin(strict, zero, nonneg, dim)
}
