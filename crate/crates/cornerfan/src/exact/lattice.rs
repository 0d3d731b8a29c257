//! Hermite and Smith normal forms, integer kernels and saturated spans.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::mat::{IntMat, IntVec};

fn row_sub(m: &mut IntMat, i: usize, r: usize, q: &BigInt) {
    if q.is_zero() {
        return;
    }
    for j in 0..m.cols() {
        let x = m.get(i, j) - q * m.get(r, j);
        m.set(i, j, x);
    }
}

fn col_sub(m: &mut IntMat, j: usize, c: usize, q: &BigInt) {
    if q.is_zero() {
        return;
    }
    for i in 0..m.rows() {
        let x = m.get(i, j) - q * m.get(i, c);
        m.set(i, j, x);
    }
}

fn negate_row(m: &mut IntMat, i: usize) {
    for j in 0..m.cols() {
        let x = -m.get(i, j);
        m.set(i, j, x);
    }
}

/// Row-style Hermite normal form: returns `(H, U)` with `U·m = H`, `U`
/// unimodular, `H` in echelon form with positive pivots, entries above each
/// pivot reduced into `[0, pivot)` and zero rows last.
pub fn hermite_normal_form(m: &IntMat) -> (IntMat, IntMat) {
    let mut h = m.clone();
    let mut u = IntMat::identity(m.rows());
    let mut r = 0;
    for c in 0..h.cols() {
        if r == h.rows() {
            break;
        }
        loop {
            let best = (r..h.rows())
                .filter(|&i| !h.get(i, c).is_zero())
                .min_by(|&a, &b| h.get(a, c).abs().cmp(&h.get(b, c).abs()).then(a.cmp(&b)));
            let Some(p) = best else { break };
            h.swap_rows(r, p);
            u.swap_rows(r, p);
            let mut done = true;
            for i in r + 1..h.rows() {
                if h.get(i, c).is_zero() {
                    continue;
                }
                let q = h.get(i, c).div_floor(h.get(r, c));
                row_sub(&mut h, i, r, &q);
                row_sub(&mut u, i, r, &q);
                if !h.get(i, c).is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if h.get(r, c).is_zero() {
            continue;
        }
        if h.get(r, c).is_negative() {
            negate_row(&mut h, r);
            negate_row(&mut u, r);
        }
        for i in 0..r {
            let q = h.get(i, c).div_floor(h.get(r, c));
            row_sub(&mut h, i, r, &q);
            row_sub(&mut u, i, r, &q);
        }
        r += 1;
    }
    (h, u)
}

/// Smith normal form: returns `(U, D, V)` with `U·m·V = D` diagonal,
/// non-negative, `d₁ | d₂ | …`, and `U`, `V` unimodular.
pub fn smith_normal_form(m: &IntMat) -> (IntMat, IntMat, IntMat) {
    let mut d = m.clone();
    let mut u = IntMat::identity(m.rows());
    let mut v = IntMat::identity(m.cols());
    let n = m.rows().min(m.cols());
    for t in 0..n {
        loop {
            let mut best: Option<(usize, usize)> = None;
            for i in t..d.rows() {
                for j in t..d.cols() {
                    if d.get(i, j).is_zero() {
                        continue;
                    }
                    let better = match best {
                        None => true,
                        Some((bi, bj)) => d.get(i, j).abs() < d.get(bi, bj).abs(),
                    };
                    if better {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else { break };
            d.swap_rows(t, pi);
            u.swap_rows(t, pi);
            d.swap_cols(t, pj);
            v.swap_cols(t, pj);
            let mut clean = true;
            for i in t + 1..d.rows() {
                let q = d.get(i, t).div_floor(d.get(t, t));
                row_sub(&mut d, i, t, &q);
                row_sub(&mut u, i, t, &q);
                clean &= d.get(i, t).is_zero();
            }
            for j in t + 1..d.cols() {
                let q = d.get(t, j).div_floor(d.get(t, t));
                col_sub(&mut d, j, t, &q);
                col_sub(&mut v, j, t, &q);
                clean &= d.get(t, j).is_zero();
            }
            if !clean {
                continue;
            }
            let piv = d.get(t, t).clone();
            let bad = (t + 1..d.rows())
                .find(|&i| (t + 1..d.cols()).any(|j| !d.get(i, j).is_multiple_of(&piv)));
            match bad {
                Some(i) => {
                    // row_t += row_i, then the next pass shrinks the pivot
                    let mone = -BigInt::one();
                    row_sub(&mut d, t, i, &mone);
                    row_sub(&mut u, t, i, &mone);
                }
                None => break,
            }
        }
        if d.get(t, t).is_negative() {
            negate_row(&mut d, t);
            negate_row(&mut u, t);
        }
    }
    (u, d, v)
}

/// Lattice basis (in Hermite form) of `{v ∈ ℤʳ : v·m = 0}`, `r = m.rows()`.
pub fn saturated_kernel(m: &IntMat) -> Vec<IntVec> {
    let (h, u) = hermite_normal_form(m);
    let rank = (0..h.rows()).take_while(|&i| h.row(i).iter().any(|x| !x.is_zero())).count();
    let ker: Vec<IntVec> = (rank..h.rows()).map(|i| u.row(i).to_vec()).collect();
    hnf_basis(m.rows(), &ker)
}

/// Nonzero rows of the Hermite form of the given vectors: a canonical basis
/// of the lattice they generate.
pub fn hnf_basis(n: usize, vs: &[IntVec]) -> Vec<IntVec> {
    if vs.is_empty() {
        return Vec::new();
    }
    let (h, _) = hermite_normal_form(&IntMat::from_rows(n, vs.to_vec()));
    h.into_rows().into_iter().filter(|r| r.iter().any(|x| !x.is_zero())).collect()
}

/// Canonical basis of `span_ℚ(vs) ∩ ℤⁿ`.
pub fn saturated_span(n: usize, vs: &[IntVec]) -> Vec<IntVec> {
    if vs.iter().all(|v| v.iter().all(|x| x.is_zero())) {
        return Vec::new();
    }
    // orthogonal complement, then its complement again
    let s = IntMat::from_rows(n, vs.to_vec());
    let perp = saturated_kernel(&s.transpose());
    if perp.is_empty() {
        return (0..n)
            .map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
            .collect();
    }
    saturated_kernel(&IntMat::from_rows(n, perp).transpose())
}

/// Integer coordinates of `v` in the row lattice of `basis`, if `v` lies in it.
pub fn lattice_coords(basis: &[IntVec], v: &[BigInt]) -> Option<IntVec> {
    let n = v.len();
    if basis.is_empty() {
        return v.iter().all(|x| x.is_zero()).then(Vec::new);
    }
    let b = IntMat::from_rows(n, basis.to_vec()).to_rat();
    let x = b.solve_left(&super::mat::to_rat(v))?;
    if x.iter().all(|q| q.is_integer()) {
        Some(x.iter().map(|q| q.to_integer()).collect())
    } else {
        None
    }
}
