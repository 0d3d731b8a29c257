//! Arbitrary-precision vectors and matrices and the lattice algorithms the
//! rest of the crate is built on. Nothing here touches floating point.

mod lattice;
mod lp;
mod mat;

pub use lattice::{
    hermite_normal_form, hnf_basis, lattice_coords, saturated_kernel, saturated_span,
    smith_normal_form,
};
pub use lp::{
    certifies, lp_feasible, lp_feasible_fm, lp_feasible_simplex, phase_one, satisfies, Certificate,
    LpResult, FM_MAX_DIM,
};
pub use mat::{
    add, dot, gcd_all, is_zero_vec, ivec, primitive, rat_to_primitive, rvec, scale, sign, sub,
    to_rat, IntMat, IntVec, Matrix, RatMat, RatVec,
};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ExactError {
    #[error("zero vector has no primitive form")]
    ZeroVector,
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use num_traits::{One, Signed, Zero};

    fn is_unimodular(u: &IntMat) -> bool {
        u.det().abs().is_one()
    }

    #[test]
    fn hnf_identity_and_diagonal() {
        let id = IntMat::identity(3);
        let (h, u) = hermite_normal_form(&id);
        assert_eq!(h, id);
        assert_eq!(u, id);
        let m = IntMat::from_i64(&[&[2, 0], &[0, 3]]);
        let (h, u) = hermite_normal_form(&m);
        assert_eq!(h, m);
        assert_eq!(u, IntMat::identity(2));
    }

    #[test]
    fn hnf_small_example() {
        let m = IntMat::from_i64(&[&[2, 4], &[1, 3]]);
        let (h, u) = hermite_normal_form(&m);
        assert_eq!(u.mul(&m), h);
        assert!(is_unimodular(&u));
        assert_eq!(h.get(0, 0), &BigInt::one());
        // det is -2 so the second pivot must be 2
        assert_eq!(h, IntMat::from_i64(&[&[1, 1], &[0, 2]]));
    }

    #[test]
    fn snf_examples() {
        let (u, d, v) = smith_normal_form(&IntMat::identity(3));
        assert_eq!(d, IntMat::identity(3));
        assert_eq!(u.mul(&IntMat::identity(3)).mul(&v), d);

        let m = IntMat::from_i64(&[&[2, 0], &[0, 3]]);
        let (u, d, v) = smith_normal_form(&m);
        assert_eq!(u.mul(&m).mul(&v), d);
        assert_eq!(d, IntMat::from_i64(&[&[1, 0], &[0, 6]]));
        assert!(is_unimodular(&u) && is_unimodular(&v));

        let z = IntMat::zeros(2, 3);
        let (_, d, _) = smith_normal_form(&z);
        assert!(d.is_zero());
    }

    #[test]
    fn kernel_examples() {
        assert_eq!(saturated_kernel(&IntMat::from_i64(&[&[1], &[1]])), vec![ivec(&[1, -1])]);
        // brute force: primitive solutions of 2a - 3b = 0 in a box
        let sols: Vec<(i64, i64)> = (-6i64..=6)
            .flat_map(|a| (-6i64..=6).map(move |b| (a, b)))
            .filter(|&(a, b)| 2 * a - 3 * b == 0 && (a, b) != (0, 0))
            .filter(|&(a, b)| num_integer::gcd(a, b) == 1)
            .collect();
        assert_eq!(sols, vec![(-3, -2), (3, 2)]);
        assert_eq!(saturated_kernel(&IntMat::from_i64(&[&[2], &[-3]])), vec![ivec(&[3, 2])]);
        assert!(saturated_kernel(&IntMat::from_i64(&[&[1, 2], &[3, 4]])).is_empty());
    }

    #[test]
    fn primitive_examples() {
        assert_eq!(primitive(&ivec(&[2, 4])).unwrap(), ivec(&[1, 2]));
        assert_eq!(primitive(&ivec(&[3, 2])).unwrap(), ivec(&[3, 2]));
        assert_eq!(primitive(&ivec(&[-2, -2])).unwrap(), ivec(&[-1, -1]));
        assert_eq!(primitive(&ivec(&[0, 0])), Err(ExactError::ZeroVector));
    }

    #[test]
    fn lp_examples() {
        let r = lp_feasible(&[rvec(&[1, 0])], &[], &[], 2);
        assert!(satisfies(r.witness().unwrap(), &[rvec(&[1, 0])], &[], &[]));

        let s = [rvec(&[1, 0]), rvec(&[-1, 0])];
        match lp_feasible(&s, &[], &[], 2) {
            LpResult::Infeasible(c) => assert!(certifies(&c, &s, &[], &[], 2)),
            other => panic!("expected infeasible, got {other:?}"),
        }

        let s = [rvec(&[1, -1])];
        let z = [rvec(&[1, 1])];
        let x = lp_feasible(&s, &z, &[], 2).witness().cloned().unwrap();
        assert!(satisfies(&x, &s, &z, &[]));
        assert_eq!(&x[0], &-x[1].clone());
        assert!(x[0].is_positive());
    }

    #[test]
    fn simplex_agrees_on_examples() {
        let s = [rvec(&[1, 0]), rvec(&[-1, 0])];
        match lp_feasible_simplex(&s, &[], &[], 2) {
            LpResult::Infeasible(c) => assert!(certifies(&c, &s, &[], &[], 2)),
            other => panic!("expected infeasible, got {other:?}"),
        }
        let s = [rvec(&[1, -1])];
        let z = [rvec(&[1, 1])];
        let x = lp_feasible_simplex(&s, &z, &[], 2).witness().cloned().unwrap();
        assert!(satisfies(&x, &s, &z, &[]));
    }

    #[test]
    fn high_dimensional_route() {
        // eleven coordinates, strict positivity of the sum with all but one fixed to zero
        let dim = 11;
        let mut strict = vec![vec![num_rational::BigRational::zero(); dim]];
        for x in strict[0].iter_mut() {
            *x = num_rational::BigRational::one();
        }
        let zero: Vec<RatVec> = (1..dim)
            .map(|i| {
                let mut v = vec![num_rational::BigRational::zero(); dim];
                v[i] = num_rational::BigRational::one();
                v
            })
            .collect();
        let r = lp_feasible(&strict, &zero, &[], dim);
        assert!(satisfies(r.witness().unwrap(), &strict, &zero, &[]));
    }
}
