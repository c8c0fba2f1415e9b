mod common;

use bsk_core::abelian::{cokernel, is_isomorphic, kernel, FgAbGroup, GroupHom, IntMatrix};
use common::*;
use num_traits::ToPrimitive;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn hom_from_seed(seed: u64) -> GroupHom {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = random_group(&mut rng, 3, 2, 72, "x");
    let h = random_group(&mut rng, 3, 2, 72, "y");
    random_hom(&mut rng, &g, &h, 6)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn exactness(seed in any::<u64>()) {
        let h = hom_from_seed(seed);
        let (k, incl) = kernel(&h).unwrap();
        let (c, proj) = cokernel(&h).unwrap();
        prop_assert!(h.compose(&incl).unwrap().is_zero());
        prop_assert!(proj.compose(&h).unwrap().is_zero());
        // inclusion injective, projection surjective
        prop_assert!(kernel(&incl).unwrap().0.is_trivial());
        prop_assert!(cokernel(&proj).unwrap().0.is_trivial());
        // exactness at the source: ker h = im incl
        let (_, kproj) = cokernel(&incl).unwrap();
        for j in 0..h.source().ngens() {
            let e: Vec<_> = (0..h.source().ngens()).map(|i| b(i64::from(i == j))).collect();
            let in_ker = h.target().is_zero_elem(&h.apply(&e).unwrap()).unwrap();
            if in_ker {
                prop_assert!(kproj.target().is_zero_elem(&kproj.apply(&e).unwrap()).unwrap());
            }
        }
        prop_assert_eq!(k.ngens(), incl.source().ngens());
        prop_assert_eq!(c.ngens(), proj.target().ngens());
    }

    #[test]
    fn rank_nullity(seed in any::<u64>()) {
        let h = hom_from_seed(seed);
        let (k, _) = kernel(&h).unwrap();
        let (c, _) = cokernel(&h).unwrap();
        let image_rank = h.target().free_rank() - c.free_rank();
        prop_assert_eq!(k.free_rank() + image_rank, h.source().free_rank());
    }

    #[test]
    fn classification_matches_element_orders(
        moduli in prop::collection::vec(1u64..=12, 1..=3),
        seed in any::<u64>(),
    ) {
        prop_assume!(moduli.iter().product::<u64>() <= 400);
        // Z^k / diag(moduli), scrambled by unimodular changes of basis
        let k = moduli.len();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut d = IntMatrix::zeros(k, k);
        for (i, &m) in moduli.iter().enumerate() {
            d[(i, i)] = b(m as i64);
        }
        let rel = random_unimodular(&mut rng, k).mul(&d).unwrap().mul(&random_unimodular(&mut rng, k)).unwrap();
        let src = FgAbGroup::with_prefix(k, vec![], "r").unwrap();
        let tgt = FgAbGroup::with_prefix(k, vec![], "e").unwrap();
        let (g, _) = cokernel(&GroupHom::new(src, tgt, rel).unwrap()).unwrap();
        prop_assert_eq!(g.free_rank(), 0);
        prop_assert_eq!(group_order_multiset(&g).unwrap(), order_multiset(&moduli));
        prop_assert_eq!(g.torsion_order().to_u64().unwrap(), moduli.iter().product::<u64>());
    }

    #[test]
    fn isomorphism_is_invariant_factor_equality(a in prop::collection::vec(2u64..=8, 0..=3), c in prop::collection::vec(2u64..=8, 0..=3)) {
        let build = |m: &[u64]| {
            let k = m.len();
            let mut d = IntMatrix::zeros(k, k);
            for (i, &x) in m.iter().enumerate() {
                d[(i, i)] = b(x as i64);
            }
            let src = FgAbGroup::with_prefix(k, vec![], "r").unwrap();
            let tgt = FgAbGroup::with_prefix(k, vec![], "e").unwrap();
            cokernel(&GroupHom::new(src, tgt, d).unwrap()).unwrap().0
        };
        let (ga, gc) = (build(&a), build(&c));
        prop_assert_eq!(is_isomorphic(&ga, &gc), order_multiset(&a) == order_multiset(&c));
    }
}
