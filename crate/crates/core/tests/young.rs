use num_bigint::BigInt;
use proptest::prelude::*;

use capelli_core::young::{
    bound_hook5, bound_hook51, count_syt, dim_specht, hooks, rect_hook_sum, sparse_degree_charp,
    staircase_hook_sum, strong_degree_char0, verify_hook_formula, verify_symmetrizers, wide_staircase,
    Partition, Tableau,
};

#[test]
fn hook_formula_through_eight() {
    assert!(verify_hook_formula(8).unwrap().passed());
}

#[test]
fn symmetrizers_through_five() {
    assert!(verify_symmetrizers(5).unwrap().passed());
}

#[test]
fn syt_enumeration_matches_count() {
    for n in 1..=6 {
        for shape in Partition::all(n) {
            let listed = Tableau::standard(&shape);
            assert!(listed.iter().all(Tableau::is_standard));
            assert_eq!(BigInt::from(listed.len()), count_syt(&shape).unwrap(), "{shape}");
        }
    }
}

#[test]
fn staircase_hooks_prime_to_p() {
    for p in [3u64, 5, 7] {
        for u in 1..=6 {
            let shape = wide_staircase(p, u).unwrap();
            assert!(hooks(&shape).iter().flatten().all(|h| h % p != 0), "p={p} u={u}");
        }
    }
}

#[test]
fn known_bound_values() {
    assert_eq!(strong_degree_char0(3).unwrap().d_prime, BigInt::from(1936));
    let s = sparse_degree_charp(3, 2).unwrap();
    assert_eq!((s.u.value.clone(), s.d_prime.clone()), (BigInt::from(6), BigInt::from(126)));
    assert_eq!((s.least_u, s.least_d_prime), (5, BigInt::from(90)));
}

proptest! {
    #[test]
    fn rectangle_hook_sum(u in 1u64..=10, v in 1u64..=10) {
        let direct: u64 = hooks(&Partition::rectangle(u as usize, v as usize)).iter().flatten().sum();
        prop_assert_eq!(direct, rect_hook_sum(u, v));
    }

    #[test]
    fn staircase_hook_sum_direct(p in prop::sample::select(vec![2u64, 3, 5, 7]), u in 1u64..=6) {
        let direct: u64 = hooks(&wide_staircase(p, u as usize).unwrap()).iter().flatten().sum();
        prop_assert_eq!(direct, staircase_hook_sum(p, u));
    }

    #[test]
    fn hook_dimension_divides_factorial(n in 1usize..=9, pick in any::<prop::sample::Index>()) {
        let shapes = Partition::all(n);
        let shape = &shapes[pick.index(shapes.len())];
        let fact: BigInt = (1..=n).product::<usize>().into();
        prop_assert_eq!(fact % dim_specht(shape), BigInt::from(0));
        prop_assert_eq!(dim_specht(shape), dim_specht(&shape.transpose()));
    }

    #[test]
    fn degree_ceilings_are_stable(d in 2u64..=5) {
        let s = strong_degree_char0(d).unwrap();
        prop_assert!(s.ceiling.stable_under_doubling && s.rectangle_condition.value);
    }

    #[test]
    fn sparse_degree_stable(p in prop::sample::select(vec![2u64, 3, 5]), d in 2u64..=4) {
        let s = sparse_degree_charp(p, d).unwrap();
        prop_assert!(s.u.stable_under_doubling && s.u_satisfies.value);
        prop_assert!(BigInt::from(s.least_u) <= s.u.value);
    }

    #[test]
    fn hook_inequalities(u in 1u64..=4, v in 1u64..=5, p in prop::sample::select(vec![2u64, 3, 5]), w in 1u64..=3) {
        prop_assert!(bound_hook5(u, v).unwrap().passed());
        if (p - 1) * w * (w + 1) / 2 <= 20 {
            prop_assert!(bound_hook51(p, w).unwrap().passed());
        } else {
            prop_assert!(bound_hook51(p, w).is_err());
        }
    }
}
