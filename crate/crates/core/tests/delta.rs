use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use capelli_core::delta::{delta, random_alternating, DeltaSpec};
use capelli_core::freealg::{capelli, is_alternating, parse_poly, Poly, Substitution, Var};
use capelli_core::tideal::{membership, SpanOptions};
use capelli_core::Domain;

const Q: Domain = Domain::Rational;

fn xs(n: usize) -> Vec<Var> {
    (1..=n as u32).map(Var::x).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn alternation_is_preserved(n in 1usize..=3, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_alternating(n, &mut rng, Q);
        let z = Poly::var(Var::z(), Q);
        for k in 0..=n {
            let g = delta(&f, &DeltaSpec::x(n, k, z.clone()).unwrap()).unwrap();
            prop_assert!(is_alternating(&g, &xs(n)));
        }
    }

    /// Specializing z to h after δ_{k,z} equals δ_{k,h}.
    #[test]
    fn delta_specializes(n in 1usize..=3, k in 0usize..=3, seed in any::<u64>(), h in prop::sample::select(vec!["t1", "t1*t2 + 2", "y1*t1 - 1"])) {
        prop_assume!(k <= n);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_alternating(n, &mut rng, Q);
        // Random inputs may contain z; rename it away first.
        let f = f.substitute(&Substitution::new().with(Var::z(), Poly::var(Var::t(3), Q)));
        let h = parse_poly(h, Q).unwrap();
        let viaz = delta(&f, &DeltaSpec::x(n, k, Poly::var(Var::z(), Q)).unwrap()).unwrap();
        let direct = delta(&f, &DeltaSpec::x(n, k, h.clone()).unwrap()).unwrap();
        prop_assert_eq!(viaz.substitute(&Substitution::new().with(Var::z(), h)), direct);
    }

    #[test]
    fn delta_is_z_homogeneous(n in 1usize..=3, k in 0usize..=3, seed in any::<u64>()) {
        prop_assume!(k <= n);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_alternating(n, &mut rng, Q)
            .substitute(&Substitution::new().with(Var::z(), Poly::one(Q)));
        let g = delta(&f, &DeltaSpec::x(n, k, Poly::var(Var::z(), Q)).unwrap()).unwrap();
        prop_assert!(g.terms().all(|(w, _)| w.count(Var::z()) == k));
    }
}

#[test]
fn capelli_alternation_under_delta() {
    for n in 1..=3 {
        let c = capelli(n, Q).unwrap();
        for k in 0..=n {
            let g = delta(&c, &DeltaSpec::x(n, k, Poly::var(Var::z(), Q)).unwrap()).unwrap();
            assert!(is_alternating(&g, &xs(n)));
        }
    }
}

#[test]
fn delta_keeps_capelli_ideal() {
    // δ_{k,z} of an element of CAP_2 is again in CAP_2.
    let c = capelli(2, Q).unwrap();
    let f = &Poly::var(Var::t(1), Q) * &c;
    for k in 0..=2 {
        let g = delta(&f, &DeltaSpec::x(2, k, Poly::var(Var::z(), Q)).unwrap()).unwrap();
        assert!(membership(&g, 2, &SpanOptions::default()).unwrap().member, "k = {k}");
    }
}
