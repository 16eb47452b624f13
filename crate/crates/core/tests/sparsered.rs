use std::collections::BTreeMap;

use proptest::prelude::*;

use capelli_core::evalalg::FiniteAlgebra;
use capelli_core::sparsered::{
    capelli_vanishing_by_counting, evaluate_combination, reduce_full, reduce_step, FormalCombination,
    SlottedMonomial, SparseIdentity, TemplateLetter,
};
use capelli_core::{Domain, Error, Scalar};

const Q: Domain = Domain::Rational;

/// Slot words over a1, a2 with total length at most 12, plus a side letter.
fn monomial() -> impl Strategy<Value = SlottedMonomial> {
    prop::collection::vec(prop::collection::vec(1u32..=2, 0..=5), 2..=5)
        .prop_filter("total length ≤ 12", |s| s.iter().map(Vec::len).sum::<usize>() <= 12)
        .prop_flat_map(|slots| {
            let n = slots.len();
            let order: Vec<TemplateLetter> = (0..n).map(TemplateLetter::Slot).collect();
            (Just(slots), Just(order).prop_shuffle(), 0..=n)
        })
        .prop_map(|(slots, mut order, side)| {
            order.insert(side, TemplateLetter::Side("y1".into()));
            SlottedMonomial::new(order, slots).unwrap()
        })
}

fn identity(d: usize) -> SparseIdentity {
    if d == 2 {
        SparseIdentity::commutator(Q)
    } else {
        SparseIdentity::standard(d, Q)
    }
}

proptest! {
    #[test]
    fn steps_descend(m in monomial(), d in 2usize..=3) {
        let id = identity(d);
        match reduce_step(&m, &id) {
            Ok(out) => {
                prop_assert!(m.long_slots(d).len() >= d);
                for (t, _) in out.terms() {
                    prop_assert!(t.lengths() < m.lengths());
                    prop_assert_eq!(t.template(), m.template());
                }
            }
            Err(Error::Degenerate(_)) => prop_assert!(m.long_slots(d).len() < d),
            Err(e) => return Err(TestCaseError::fail(e.to_string())),
        }
    }

    #[test]
    fn full_reduction_normal_form(m in monomial(), d in 2usize..=3, g in prop::collection::vec(-2i64..=2, 12)) {
        let id = identity(d);
        let c = FormalCombination::single(m, Scalar::from_i64(1, Q));
        let r = reduce_full(&c, &id, false).unwrap();
        prop_assert!(r.result.max_long_slots(d) < d);
        // Commutative test algebra: Q[t]/(t^3) with a1, a2, y1 sent to g-derived elements.
        let alg = FiniteAlgebra::truncated_poly(3, Q).unwrap();
        let gens = vec![alg.element(&g[0..3]).unwrap(), alg.element(&g[3..6]).unwrap()];
        let side: BTreeMap<String, _> = [("y1".to_string(), alg.element(&g[6..9]).unwrap())].into();
        prop_assert_eq!(
            evaluate_combination(&c, &gens, &side, &alg).unwrap(),
            evaluate_combination(&r.result, &gens, &side, &alg).unwrap()
        );
    }

    #[test]
    fn reduced_input_is_fixed(m in monomial()) {
        let id = SparseIdentity::standard(3, Q);
        prop_assume!(m.long_slots(3).len() < 3);
        let c = FormalCombination::single(m, Scalar::from_i64(2, Q));
        let r = reduce_full(&c, &id, false).unwrap();
        prop_assert_eq!(r.result, c);
        prop_assert_eq!(r.steps, 0);
    }
}

#[test]
fn counting_grid() {
    for r in 2..=3 {
        for d in 2..=3 {
            let c = capelli_vanishing_by_counting(r, d).unwrap();
            assert!(c.short_words_below_r_pow_d && c.repetition_forced, "r={r} d={d}");
        }
    }
}
