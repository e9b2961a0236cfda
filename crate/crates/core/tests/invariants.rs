//! Cross-module invariants: structure-group shapes, box-morphism closure,
//! translation calculus, balance symmetries, and correlation duality.

use nilspace_core::cube::{hom_box_test, is_cube, maximal_cube_box, AffineCubeMorphism, BoxMap};
use nilspace_core::filtration::FilteredGroup;
use nilspace_core::gowers::balance_distance;
use nilspace_core::group::{FiniteAbelianPGroup, GroupElement};
use nilspace_core::homogeneity::{
    translation_p_power_check, translation_preserves_cubes, DTower, TranslationData,
    TranslationTuple,
};
use nilspace_core::poly::{MultiIndex, PolyMap};
use nilspace_core::verify::{correlation_duality, counting_catalog, structure_groups_elementary};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;

#[test]
fn structure_groups_of_homogeneous_members_have_exponent_p() {
    assert!(structure_groups_elementary(81).unwrap());
}

#[test]
fn box_restrictions_of_morphisms_compose_to_cubes() {
    // restrictions of polynomial morphisms pass the box test, and cubes with
    // image inside the box compose through them
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let f = FilteredGroup::make_zkl(3, 4, 2).unwrap();
    let g = f.group().clone();
    for _ in 0..50 {
        let mut coeffs = BTreeMap::new();
        for w in 0..=3u32 {
            let sub = f.subgroup_at(w);
            let elems = sub.elements(&g, 1 << 16).unwrap();
            let pick = elems[rng.gen_range(0..elems.len())].clone();
            coeffs.insert(MultiIndex(vec![w]), pick);
        }
        let pm = PolyMap::new(1, f.clone(), coeffs).unwrap();
        assert!(pm.is_morphism());
        let table = pm.values_on_box(&[4]).unwrap();
        assert!(hom_box_test(&table, &f).unwrap());
        // any affine cube with image in [0,4] composes to a cube
        let base = rng.gen_range(0..2i64);
        let h1 = rng.gen_range(0..=1i64);
        let h2 = rng.gen_range(0..=1i64);
        let m = AffineCubeMorphism::new(vec![base], vec![vec![h1], vec![h2]]).unwrap();
        let q = table.compose(&m).unwrap();
        assert!(is_cube(&q, &f).unwrap());
    }
}

#[test]
fn morphism_box_corners_always_pass_face_checks() {
    // restrictions of morphisms to a box minus its far corner satisfy the
    // completion precondition in every direction
    let f = FilteredGroup::make_dk(FiniteAbelianPGroup::cyclic(3, 2).unwrap(), 2).unwrap();
    let g = f.group().clone();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..30 {
        let mut coeffs = BTreeMap::new();
        for (w1, w2) in [(0u32, 0u32), (1, 0), (0, 1), (1, 1), (2, 0), (0, 2)] {
            let elems = f
                .subgroup_at(w1 + w2)
                .elements(&g, 1 << 16)
                .unwrap();
            coeffs.insert(
                MultiIndex(vec![w1, w2]),
                elems[rng.gen_range(0..elems.len())].clone(),
            );
        }
        let pm = PolyMap::new(2, f.clone(), coeffs).unwrap();
        let table = pm.values_on_box(&[2, 2]).unwrap();
        let total = table.values().len();
        let corner = nilspace_core::cube::BoxCorner::new(
            g.clone(),
            vec![0, 0],
            vec![2, 2],
            table.values()[..total - 1].to_vec(),
        )
        .unwrap();
        corner.check_faces(&f).unwrap();
        // and the canonical completion matches the morphism's own value
        let x0 = corner.complete(&f, true).unwrap();
        let fiber = f.subgroup_at(4);
        let actual = &table.values()[total - 1];
        let diff = actual.sub(&x0).unwrap();
        assert!(fiber.contains(&g, &diff));
    }
}

#[test]
fn maximal_box_cube_covers_box() {
    let m = maximal_cube_box(&[1, -1], &[2, 1]).unwrap();
    let mut seen = std::collections::HashSet::new();
    for idx in 0..(1usize << m.in_dim()) {
        let v: Vec<i64> = (0..m.in_dim()).map(|i| ((idx >> i) & 1) as i64).collect();
        seen.insert(m.apply(&v));
    }
    assert_eq!(seen.len(), 3 * 2);
}

#[test]
fn translation_tuples_compose_and_act_regularly() {
    // composition of two tuples stays cube-preserving at n <= k+1, and the
    // top-block tuples act on each fiber of the prefix projection as the
    // regular action of Z_p^{a_k}
    let tower = DTower::new(3, vec![1, 1]).unwrap();
    let filt = tower.realize().unwrap();
    let t2a: Vec<Vec<u64>> = (0..3).map(|x1| vec![x1 as u64]).collect();
    let t2b: Vec<Vec<u64>> = (0..3).map(|x1| vec![(2 * x1 as u64 + 1) % 3]).collect();
    let alpha = TranslationTuple::new(tower.clone(), vec![1], vec![t2a]).unwrap();
    let beta = TranslationTuple::new(tower.clone(), vec![2], vec![t2b]).unwrap();
    for n in 1..=3u32 {
        let composed = |x: &GroupElement| alpha.apply(&beta.apply(x).unwrap());
        assert!(translation_preserves_cubes(&filt, n, 1 << 22, &composed).unwrap());
    }
    // free and transitive on fibers of the projection to the first block:
    // constants c in Z_3 as top-block-only tuples
    let g = filt.group().clone();
    for x_idx in 0..9u128 {
        let x = g.element_at(x_idx);
        let mut images = std::collections::HashSet::new();
        for c in 0..3u64 {
            let t2c: Vec<Vec<u64>> = vec![vec![c]; 3];
            let gamma = TranslationTuple::new(tower.clone(), vec![0], vec![t2c]).unwrap();
            let y = gamma.apply(&x).unwrap();
            // prefix block fixed
            assert_eq!(y.residues()[0], x.residues()[0]);
            images.insert(y.residues().to_vec());
        }
        // distinct constants give distinct images covering the fiber
        assert_eq!(images.len(), 3);
    }
}

#[test]
fn translation_orders_divide_p_powers_on_catalog() {
    for p in [2u64, 3] {
        for f in counting_catalog(&[p], 4, 81).unwrap() {
            if !f.is_p_homogeneous() || f.group().order() > 10_000 {
                continue;
            }
            for l in 1..=f.degree() {
                for gen in f.subgroup_at(l).generators(f.group()) {
                    assert!(
                        translation_p_power_check(&f, &TranslationData::Add(&gen), l).unwrap(),
                        "translation order bound failed on {f:?} at level {l}"
                    );
                }
            }
        }
    }
}

#[test]
fn balance_is_invariant_under_target_automorphism() {
    let z3 = FiniteAbelianPGroup::cyclic(3, 1).unwrap();
    let target = FilteredGroup::make_dk(z3.clone(), 1).unwrap();
    let phi = BoxMap::from_fn(z3.clone(), vec![0, 0], vec![2, 2], |pt| {
        z3.element(&[pt[0] + pt[1]])
    })
    .unwrap();
    let phi2 = BoxMap::from_fn(z3.clone(), vec![0, 0], vec![2, 2], |pt| {
        z3.element(&[2 * (pt[0] + pt[1])])
    })
    .unwrap();
    for n in 1..=2 {
        let a = balance_distance(&phi, &target, n).unwrap();
        let b = balance_distance(&phi2, &target, n).unwrap();
        assert!((a - b).abs() < 1e-12);
    }
}

#[test]
fn correlation_bounded_by_gowers_norm() {
    assert!(correlation_duality(99, 50).unwrap());
}
