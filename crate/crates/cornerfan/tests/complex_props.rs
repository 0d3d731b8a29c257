mod common;

use cornerfan::complex::{extend_refinement, natural_smooth_refinement, star_subdivide_complex};
use cornerfan::manifold::{check_blowdown_refinement, compose, is_compatible, lift_bmap, BMap};
use cornerfan::refinement::{sample_cover, star_subdivide};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn ns_is_smooth_valid_and_idempotent(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (_, q) = common::random_complex(&mut rng);
        let (r, _) = natural_smooth_refinement(&q).unwrap();
        prop_assert!(r.is_smooth());
        prop_assert!(r.validate().passed());
        prop_assert_eq!(r.target(), &q);
        prop_assert!(natural_smooth_refinement(r.source()).unwrap().0.is_trivial());
        if q.is_smooth() {
            prop_assert!(r.is_trivial());
        }
    }

    #[test]
    fn ns_commutes_with_restriction(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (_, q) = common::random_complex(&mut rng);
        if let Some(sub) = common::random_subcomplex(&mut rng, &q) {
            let (r, _) = natural_smooth_refinement(&q).unwrap();
            let (r0, _) = natural_smooth_refinement(&q.restrict(&sub).unwrap()).unwrap();
            prop_assert_eq!(r.restrict(&sub).unwrap(), r0);
        }
    }

    #[test]
    fn extension_restricts_to_the_start(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (_, q) = common::random_complex(&mut rng);
        if let Some(sub) = common::random_subcomplex(&mut rng, &q) {
            let q0 = q.restrict(&sub).unwrap();
            let a = q0.maximal()[0].clone();
            prop_assume!(q0.monoid(&a).dim() > 0);
            let v = common::random_interior_point(&mut rng, q0.monoid(&a));
            let r0 = star_subdivide_complex(&q0, &a, &v).unwrap();
            let (r, report) = extend_refinement(&q, &r0).unwrap();
            prop_assert!(r.validate().passed());
            prop_assert_eq!(r.restrict(&sub).unwrap(), r0);
            prop_assert_eq!(report.damaged.last(), Some(&0));
        }
    }

    #[test]
    fn star_subdivisions_cover(seed in any::<u64>(), k in 2usize..=3, extra in 0usize..=1) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        // planar cones have exactly two rays
        let sigma = common::random_cone(&mut rng, k, k, if k == 2 { 2 } else { k + extra });
        let v = common::random_interior_point(&mut rng, &sigma);
        let r = star_subdivide(&sigma, &v).unwrap();
        prop_assert!(r.validate().passed());
        prop_assert_eq!(sample_cover(&r, 200, seed).violations(), 0);
        let s = r.smoothed();
        if r.is_simplicial() {
            let s = s.unwrap();
            prop_assert!(s.is_smooth());
        }
    }

    #[test]
    fn blowdowns_are_smooth_refinements(seed in any::<u64>(), n in 2usize..=3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (_, b) = common::random_blowup(&mut rng, n);
        prop_assert!(b.basic_matches_refinement());
        prop_assert!(check_blowdown_refinement(&b.blowdown).is_blowdown());
        prop_assert!(b.atlas_at(&b.blowdown.target.deepest()[0]).unwrap().check_exact().is_ok());
    }

    #[test]
    fn lifts_factor_the_map(seed in any::<u64>(), n in 2usize..=3, k in 1usize..=3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (_, b) = common::random_blowup(&mut rng, n);
        let f = BMap::between_models(k, n, common::random_exponents(&mut rng, k, n)).unwrap();
        if let Ok(l) = lift_bmap(&f, &b, &is_compatible(&f, &b.refinement).unwrap()) {
            prop_assert_eq!(compose(&b.blowdown, &l.map).unwrap(), f);
        }
    }
}
