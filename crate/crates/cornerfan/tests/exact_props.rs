use cornerfan::exact::*;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;

fn int_matrix(max_dim: usize, bound: i64) -> impl Strategy<Value = IntMat> {
    (1..=max_dim, 1..=max_dim).prop_flat_map(move |(r, c)| {
        proptest::collection::vec(proptest::collection::vec(-bound..=bound, c), r).prop_map(move |rows| {
            IntMat::from_rows(c, rows.iter().map(|r| ivec(r)).collect())
        })
    })
}

fn is_hermite(h: &IntMat) -> bool {
    let mut last_pivot: Option<usize> = None;
    let mut seen_zero = false;
    for i in 0..h.rows() {
        let Some(p) = (0..h.cols()).find(|&j| !h.get(i, j).is_zero()) else {
            seen_zero = true;
            continue;
        };
        if seen_zero || last_pivot.is_some_and(|q| p <= q) || !h.get(i, p).is_positive() {
            return false;
        }
        for k in 0..i {
            let x = h.get(k, p);
            if x.is_negative() || x >= h.get(i, p) {
                return false;
            }
        }
        last_pivot = Some(p);
    }
    true
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn hnf_factorization(m in int_matrix(8, 100)) {
        let (h, u) = hermite_normal_form(&m);
        prop_assert_eq!(u.mul(&m), h.clone());
        prop_assert!(u.det().abs().is_one());
        prop_assert!(is_hermite(&h));
    }

    #[test]
    fn snf_factorization(m in int_matrix(8, 100)) {
        let (u, d, v) = smith_normal_form(&m);
        prop_assert_eq!(u.mul(&m).mul(&v), d.clone());
        prop_assert!(u.det().abs().is_one());
        prop_assert!(v.det().abs().is_one());
        let n = d.rows().min(d.cols());
        for i in 0..d.rows() {
            for j in 0..d.cols() {
                if i != j {
                    prop_assert!(d.get(i, j).is_zero());
                }
            }
        }
        for i in 0..n.saturating_sub(1) {
            let (a, b) = (d.get(i, i), d.get(i + 1, i + 1));
            prop_assert!(!a.is_negative());
            if a.is_zero() {
                prop_assert!(b.is_zero());
            } else {
                prop_assert!((b % a).is_zero());
            }
        }
    }

    #[test]
    fn kernel_is_saturated(rows in 2usize..=4, cols in 1usize..=2, seed in proptest::collection::vec(-3i64..=3, 8)) {
        let m = IntMat::from_rows(cols, (0..rows).map(|i| ivec(&seed[i * cols..(i + 1) * cols])).collect());
        let basis = saturated_kernel(&m);
        for b in &basis {
            prop_assert!(m.apply(b).iter().all(|x| x.is_zero()));
        }
        prop_assert_eq!(basis.len(), rows - m.rank());
        // every small integer solution is an integer combination of the basis
        let range: Vec<i64> = (-4..=4).collect();
        let mut stack = vec![Vec::<i64>::new()];
        while let Some(v) = stack.pop() {
            if v.len() == rows {
                let iv = ivec(&v);
                if m.apply(&iv).iter().all(|x| x.is_zero()) {
                    prop_assert!(lattice_coords(&basis, &iv).is_some(), "{:?} not in kernel lattice", v);
                }
                continue;
            }
            for &x in &range {
                let mut w = v.clone();
                w.push(x);
                stack.push(w);
            }
        }
    }

    #[test]
    fn lp_routes_agree(
        dim in 1usize..=4,
        data in proptest::collection::vec(-3i64..=3, 40),
        ns in 0usize..=3, nz in 0usize..=2, nn in 0usize..=3,
    ) {
        let mut it = data.chunks(4).map(|c| rvec(&c[..dim]));
        let strict: Vec<RatVec> = (0..ns).filter_map(|_| it.next()).collect();
        let zero: Vec<RatVec> = (0..nz).filter_map(|_| it.next()).collect();
        let nonneg: Vec<RatVec> = (0..nn).filter_map(|_| it.next()).collect();
        let a = lp_feasible_fm(&strict, &zero, &nonneg, dim);
        let b = lp_feasible_simplex(&strict, &zero, &nonneg, dim);
        prop_assert_eq!(a.is_feasible(), b.is_feasible());
        for r in [&a, &b] {
            match r {
                LpResult::Feasible(x) => prop_assert!(satisfies(x, &strict, &zero, &nonneg)),
                LpResult::Infeasible(c) => prop_assert!(certifies(c, &strict, &zero, &nonneg, dim)),
            }
        }
        if dim <= 3 && !a.is_feasible() {
            // dense rational grid sampling finds nothing either
            let pts: Vec<i64> = (-6..=6).collect();
            let mut stack = vec![Vec::<i64>::new()];
            while let Some(v) = stack.pop() {
                if v.len() == dim {
                    let q = rvec(&v);
                    let ok = strict.is_empty() && v.iter().all(|&x| x == 0);
                    prop_assert!(ok || !satisfies(&q, &strict, &zero, &nonneg));
                    continue;
                }
                for &x in &pts {
                    let mut w = v.clone();
                    w.push(x);
                    stack.push(w);
                }
            }
        }
    }
}

#[test]
fn saturated_span_of_even_vector() {
    let b = saturated_span(2, &[ivec(&[2, 2])]);
    assert_eq!(b, vec![ivec(&[1, 1])]);
}
