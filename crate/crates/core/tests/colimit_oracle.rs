mod common;

use bsk_core::abelian::FgAbGroup;
use bsk_core::colimit::{ladder_cokernel, ladder_kernel, normalize, AbObject, ColimModule};
use common::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn localized_integers_normalize() {
    for n in (-12..=12i64).filter(|n| n.abs() >= 2) {
        match normalize(&ColimModule::localized(n, "v")).unwrap() {
            AbObject::Loc { summands, torsion } => {
                assert_eq!(summands.len(), 1);
                assert_eq!(radical(summands[0].inverted()), radical(&b(n)));
                assert!(torsion.is_trivial());
            }
            other => panic!("n = {n}: {other}"),
        }
        let k0 = ColimModule::constant(&FgAbGroup::free(&["[1]"]));
        assert_eq!(normalize(&k0).unwrap().normal_form(), "Z");
    }
}

#[test]
fn ladder_grid_matches_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for i in 0..120 {
        let case = random_ladder_case(&mut rng);
        let (want_k, want_c) = oracle_shapes(&case);
        let k = object_shape(&ladder_kernel(&case.ladder).unwrap());
        let c = object_shape(&ladder_cokernel(&case.ladder).unwrap());
        assert!(same_shape(&k, &want_k), "case {i} kernel: {k:?} vs {want_k:?} (n = {}, c = {})", case.n, case.c);
        assert!(same_shape(&c, &want_c), "case {i} cokernel: {c:?} vs {want_c:?} (n = {}, c = {})", case.n, case.c);
    }
}

#[test]
fn localized_cokernels_by_chasing() {
    for n in [2i64, 3, 6, -4, 10] {
        for c in 1..=30i64 {
            let want = localized_cokernel_orders(n, c, 12);
            let sys = ColimModule::localized(n, "v");
            let rung = bsk_core::abelian::GroupHom::scalar(sys.stage(), c);
            let l = bsk_core::colimit::LadderMap::new(sys.clone(), sys, rung).unwrap();
            let got = object_shape(&ladder_cokernel(&l).unwrap());
            assert_eq!(got, (vec![], 0, Some(want)), "n = {n}, c = {c}");
        }
    }
}
