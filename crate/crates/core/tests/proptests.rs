//! Property tests over random catalog groups: group axioms, the Pascal
//! identity, coefficient/value round trips, derivative consistency, and the
//! circular-vector divisibility law.

use nilspace_core::cube::CubeMap;
use nilspace_core::filtration::FilteredGroup;
use nilspace_core::group::{multibinom, FiniteAbelianPGroup};
use nilspace_core::poly::{apply_ap, circular_center, from_values, MultiIndex, PolyMap};
use num_bigint::BigInt;
use proptest::prelude::*;
use std::collections::BTreeMap;

fn arb_group() -> impl Strategy<Value = FiniteAbelianPGroup> {
    (prop_oneof![Just(2u64), Just(3), Just(5)], 1usize..=3)
        .prop_flat_map(|(p, m)| {
            proptest::collection::vec(1u32..=3, m).prop_map(move |orders| (p, orders))
        })
        .prop_map(|(p, orders)| FiniteAbelianPGroup::new(p, orders).expect("valid group"))
}

proptest! {
    #[test]
    fn group_axioms((group, xs) in arb_group().prop_flat_map(|g| {
        let order = g.order();
        (Just(g), proptest::collection::vec(0..order, 3))
    })) {
        let a = group.element_at(xs[0]);
        let b = group.element_at(xs[1]);
        let c = group.element_at(xs[2]);
        // associativity and commutativity
        prop_assert_eq!(
            a.add(&b).unwrap().add(&c).unwrap(),
            a.add(&b.add(&c).unwrap()).unwrap()
        );
        prop_assert_eq!(a.add(&b).unwrap(), b.add(&a).unwrap());
        // identity and inverses
        prop_assert_eq!(a.add(&group.zero()).unwrap(), a.clone());
        prop_assert!(a.add(&a.neg()).unwrap().is_zero());
    }

    #[test]
    fn multibinom_pascal(
        n in proptest::collection::vec(-6i64..=6, 1..=3),
        i in proptest::collection::vec(0u32..=4, 3),
        j in 0usize..3,
    ) {
        let m = n.len();
        let i = &i[..m];
        if j < m {
            // binom(n + e_j, i) = binom(n, i) + binom(n, i - e_j)
            let mut n_shift = n.clone();
            n_shift[j] += 1;
            let lhs = multibinom(&n_shift, i);
            let mut i_dec = i.to_vec();
            let rhs = if i_dec[j] == 0 {
                multibinom(&n, i)
            } else {
                i_dec[j] -= 1;
                multibinom(&n, i) + multibinom(&n, &i_dec)
            };
            prop_assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn mobius_roundtrip((group, n, raw) in arb_group().prop_flat_map(|g| {
        (1u32..=4).prop_flat_map(move |n| {
            let g = g.clone();
            let order = g.order();
            proptest::collection::vec(0..order, 1usize << n)
                .prop_map(move |raw| (g.clone(), n, raw))
        })
    })) {
        let values: Vec<_> = raw.iter().map(|&i| group.element_at(i)).collect();
        let q = CubeMap::new(group.clone(), n, values).unwrap();
        let coeffs = q.mobius_coeffs();
        let back = CubeMap::from_coeffs(group, n, coeffs).unwrap();
        prop_assert_eq!(back, q);
    }

    #[test]
    fn interpolation_inverts_evaluation(coeff_picks in proptest::collection::vec(0u64..9, 5)) {
        // sparse polynomials into Z_{4,2}^(3), interpolated on [0,4]
        let f = FilteredGroup::make_zkl(3, 4, 2).unwrap();
        let mut coeffs = BTreeMap::new();
        for (h, &c) in coeff_picks.iter().enumerate() {
            // clamp into the chain at that height
            let sub = f.subgroup_at(h as u32);
            let elems = sub.elements(f.group(), 1 << 16).unwrap();
            let pick = elems[(c as usize) % elems.len()].clone();
            if !pick.is_zero() {
                coeffs.insert(MultiIndex(vec![h as u32]), pick);
            }
        }
        let pm = PolyMap::new(1, f.clone(), coeffs).unwrap();
        let table = pm.values_on_box(&[4]).unwrap();
        let back = from_values(&table, f).unwrap();
        prop_assert_eq!(back.coeffs(), pm.coeffs());
    }

    #[test]
    fn derivative_matches_pointwise(
        coeff_picks in proptest::collection::vec(0u64..9, 4),
        h in -3i64..=3,
        x in -4i64..=4,
    ) {
        let f = FilteredGroup::make_zkl(3, 4, 2).unwrap();
        let mut coeffs = BTreeMap::new();
        for (height, &c) in coeff_picks.iter().enumerate() {
            let elems = f.subgroup_at(height as u32).elements(f.group(), 1 << 16).unwrap();
            let pick = elems[(c as usize) % elems.len()].clone();
            if !pick.is_zero() {
                coeffs.insert(MultiIndex(vec![height as u32]), pick);
            }
        }
        let pm = PolyMap::new(1, f, coeffs).unwrap();
        let d = pm.derivative(&[h]).unwrap();
        let lhs = d.eval(&[x]).unwrap();
        let rhs = pm.eval(&[x + h]).unwrap().sub(&pm.eval(&[x]).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn circular_vectors_gain_p_divisibility(
        p in prop_oneof![Just(3u64), Just(5), Just(7)],
        seedvals in proptest::collection::vec(-50i64..=50, 3),
        center in 0usize..7,
    ) {
        // build a circular vector about the chosen center
        let pu = p as usize;
        let center = center % pu;
        let mut v = vec![0i64; pu];
        for j in 1..=(pu - 1) / 2 {
            let val = seedvals[(j - 1) % seedvals.len()];
            v[(center + j) % pu] = val;
            v[(center + pu - j) % pu] = -val;
        }
        prop_assert!(circular_center(&v).is_some());
        // the (p-1)-st cyclic difference is divisible by p and circular
        let mut w = v.clone();
        for _ in 0..p - 1 {
            w = apply_ap(&w);
        }
        prop_assert!(w.iter().all(|&x| x % p as i64 == 0));
        prop_assert!(circular_center(&w).is_some());
    }

    #[test]
    fn binom_negative_extension(n in 1i64..=8, k in 0u32..=6) {
        // binom(-n, k) = (-1)^k binom(n+k-1, k)
        let lhs = nilspace_core::group::binom(-n, k);
        let sign = if k % 2 == 1 { -1 } else { 1 };
        let rhs = BigInt::from(sign) * nilspace_core::group::binom(n + k as i64 - 1, k);
        prop_assert_eq!(lhs, rhs);
    }
}
