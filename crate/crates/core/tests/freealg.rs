use proptest::prelude::*;

use capelli_core::freealg::{capelli, is_alternating, Multidegree, Poly, Substitution, Var, Word};
use capelli_core::{Domain, Scalar};

const Q: Domain = Domain::Rational;

fn var() -> impl Strategy<Value = Var> {
    prop_oneof![
        (1u32..=3).prop_map(Var::x),
        (1u32..=2).prop_map(Var::y),
        Just(Var::z()),
    ]
}

fn poly() -> impl Strategy<Value = Poly> {
    prop::collection::vec((prop::collection::vec(var(), 0..4), -3i64..=3), 0..5).prop_map(|terms| {
        Poly::from_terms(
            Q,
            terms.into_iter().map(|(w, c)| (Word::from_vars(w), Scalar::from_i64(c, Q))),
        )
    })
}

proptest! {
    #[test]
    fn ring_axioms(p in poly(), q in poly(), r in poly()) {
        prop_assert_eq!(&(&p * &q) * &r, &p * &(&q * &r));
        prop_assert_eq!(&p * &(&q + &r), &(&p * &q) + &(&p * &r));
        prop_assert_eq!(&(&p + &q) * &r, &(&p * &r) + &(&q * &r));
        prop_assert_eq!(&p + &q, &q + &p);
        prop_assert!((&p - &p).is_zero());
    }

    #[test]
    fn substitution_is_multiplicative(p in poly(), q in poly(), a in poly(), b in poly()) {
        let s = Substitution::new().with(Var::x(1), a).with(Var::z(), b);
        prop_assert_eq!((&p * &q).substitute(&s), &p.substitute(&s) * &q.substitute(&s));
        prop_assert_eq!((&p + &q).substitute(&s), &p.substitute(&s) + &q.substitute(&s));
    }

    /// Alternation (pairwise sign change) and vanishing under `x_j → x_i`
    /// agree on multilinear polynomials over Q.
    #[test]
    fn linearization_consistency(
        n in 2usize..=4,
        coeffs in prop::collection::vec(-1i64..=1, 24),
        alternate in any::<bool>(),
    ) {
        let xs: Vec<Var> = (1..=n as u32).map(Var::x).collect();
        let perms: Vec<_> = capelli_core::symgroup::Perm::all(n).collect();
        let mut f = Poly::zero(Q);
        for (i, p) in perms.iter().enumerate() {
            let c = if alternate { p.sgn() as i64 * coeffs[0].max(1) } else { coeffs[i] };
            let w = Word::from_vars(p.images().into_iter().map(|k| xs[k - 1]));
            f.add_term(w, Scalar::from_i64(c, Q));
        }
        let alt = is_alternating(&f, &xs);
        let mut vanishes = true;
        for i in 0..n {
            for j in i + 1..n {
                let s = Substitution::new().with(xs[j], Poly::var(xs[i], Q));
                vanishes &= f.substitute(&s).is_zero();
            }
        }
        prop_assert_eq!(alt, vanishes);
    }
}

#[test]
fn capelli_alternating_and_sized() {
    for k in 1..=6 {
        let c = capelli(k, Q).unwrap();
        let xs: Vec<Var> = (1..=k as u32).map(Var::x).collect();
        if k <= 5 {
            assert!(is_alternating(&c, &xs), "Capl_{k}");
        }
        assert_eq!(c.num_terms(), (1..=k).product::<usize>());
        let one = Scalar::from_i64(1, Q);
        assert!(c.terms().all(|(_, s)| *s == one || *s == -&one));
    }
}

#[test]
fn multidegree_of_capelli() {
    let c = capelli(2, Q).unwrap();
    let Multidegree::Homogeneous(md) = c.multidegree() else {
        panic!("Capl_2 is homogeneous");
    };
    assert_eq!(md.len(), 4);
    assert!(md.values().all(|&d| d == 1));
    let mixed = &c + &Poly::var(Var::z(), Q);
    assert!(matches!(mixed.multidegree(), Multidegree::Inhomogeneous(_)));
}
