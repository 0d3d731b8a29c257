mod common;

use std::collections::BTreeSet;

use cornerfan::binomial::{boundary_faces, resolve, variety_complex, BinomialSystem};
use cornerfan::complex::natural_smooth_refinement;
use cornerfan::exact::{dot, IntVec};
use cornerfan::fiber::{factor_through, resolve_fiber_product, FiberProblem};
use cornerfan::manifold::{compose, is_compatible, lift_bmap, BMap};
use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use proptest::prelude::*;
use rand::{seq::SliceRandom, Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_system(rng: &mut impl Rng, n: usize) -> BinomialSystem {
    loop {
        let count = rng.gen_range(1..n);
        let gammas: Vec<IntVec> = (0..count).map(|_| (0..n).map(|_| BigInt::from(rng.gen_range(-2..=2))).collect()).collect();
        let eqs: Vec<(IntVec, IntVec)> = gammas
            .iter()
            .map(|g| (g.iter().map(|x| x.max(&BigInt::zero()).clone()).collect(), g.iter().map(|x| (-x).max(BigInt::zero())).collect()))
            .collect();
        if let Ok(b) = cornerfan::binomial::normal_form(n, 0, &eqs, 0) {
            if !b.gammas.is_empty() {
                return b;
            }
        }
    }
}

/// Cones of the lifted part of `R_X`, in `ℤⁿ` with coordinates permuted.
fn lifted_cones(b: &BinomialSystem, perm: &[usize]) -> Result<BTreeSet<Vec<IntVec>>, String> {
    let (pd, _) = variety_complex(&boundary_faces(b));
    let (r_d, _) = natural_smooth_refinement(&pd).map_err(|e| e.to_string())?;
    let res = resolve(b, &r_d).map_err(|e| format!("{:?}: {e}", b.gammas))?;
    let src = res.r_x.source();
    Ok(res
        .lifted
            .iter()
            .map(|x| {
                let m = src.monoid(x).push_forward(&res.r_x.morphism.homs[x]);
                let mut ext: Vec<IntVec> = m.extremals().iter().map(|e| perm.iter().map(|&i| e[i].clone()).collect()).collect();
                ext.sort();
                ext
            })
            .collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn witnesses_lie_in_w(seed in any::<u64>(), n in 2usize..=4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let b = random_system(&mut rng, n);
        let v = boundary_faces(&b);
        for f in v.faces.values() {
            for g in &b.gammas {
                prop_assert!(dot(g, &f.witness).is_zero());
            }
            for i in 0..n {
                prop_assert_eq!(f.witness[i].is_negative(), f.coords.contains(&i));
                prop_assert_eq!(f.witness[i].is_zero(), !f.coords.contains(&i));
            }
        }
        // monotone: smaller detected faces give faces of the larger monoids
        for a in v.faces.values() {
            for c in v.faces.values() {
                if a.coords.is_subset(&c.coords) {
                    prop_assert!(a.monoid.is_face_of(&c.monoid));
                }
            }
        }
    }

    #[test]
    fn resolution_is_independent_of_the_extension(seed in any::<u64>(), n in 2usize..=3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let b = random_system(&mut rng, n);
        // relabelling the hypersurfaces changes the order the extension works in
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(&mut rng);
        let permuted = BinomialSystem {
            gammas: b.gammas.iter().map(|g| perm.iter().map(|&i| g[i].clone()).collect()).collect(),
            ..b.clone()
        };
        let identity: Vec<usize> = (0..n).collect();
        // cones of the permuted system, mapped back through the inverse permutation
        let mut inverse = vec![0; n];
        for (i, &p) in perm.iter().enumerate() {
            inverse[p] = i;
        }
        let a = lifted_cones(&b, &identity);
        let c = lifted_cones(&permuted, &inverse);
        let (a, c) = (a.map_err(TestCaseError::fail)?, c.map_err(TestCaseError::fail)?);
        prop_assert_eq!(a, c);
    }

    #[test]
    fn maps_into_the_fiber_product_factor(seed in any::<u64>(), n in 2usize..=3, k in 1usize..=2, j in 1usize..=2) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (_, blowup) = common::random_blowup(&mut rng, n);
        let f2 = BMap::between_models(k, n, common::random_exponents(&mut rng, k, n)).unwrap();
        let p = FiberProblem::new(blowup.blowdown.clone(), f2.clone()).unwrap();
        let res = resolve_fiber_product(&p, None).unwrap();
        let g2 = BMap::between_models(j, k, common::random_exponents(&mut rng, j, k)).unwrap();
        let through = compose(&f2, &g2).unwrap();
        let compat = is_compatible(&through, &blowup.refinement).unwrap();
        prop_assume!(lift_bmap(&through, &blowup, &compat).is_ok());
        let g1 = lift_bmap(&through, &blowup, &compat).unwrap().map;
        let fac = factor_through(&p, &g1, &g2, &res).unwrap();
        let (g1, g2) = match &fac.blowup {
            None => (g1, g2),
            Some(beta) => (compose(&g1, &beta.blowdown).unwrap(), compose(&g2, &beta.blowdown).unwrap()),
        };
        prop_assert_eq!(compose(&res.h1, &fac.g).unwrap(), g1);
        prop_assert_eq!(compose(&res.h2, &fac.g).unwrap(), g2);
    }
}
