use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use capelli_core::delta::random_alternating;
use capelli_core::evalalg::{
    codimension, integrality_witness, is_identity_alternating, is_identity_multilinear, FiniteAlgebra,
};
use capelli_core::freealg::{capelli, parse_poly, Poly, Substitution, Var};
use capelli_core::young::regev_codim_bound;
use capelli_core::{Domain, Scalar};

const Q: Domain = Domain::Rational;

fn algebras() -> Vec<FiniteAlgebra> {
    vec![
        FiniteAlgebra::field(Q),
        FiniteAlgebra::truncated_poly(3, Q).unwrap(),
        FiniteAlgebra::upper_triangular(2, Q).unwrap(),
        FiniteAlgebra::grassmann(2, Q).unwrap(),
        FiniteAlgebra::matrix(2, Q).unwrap(),
    ]
}

fn invertible(k: usize, seed: u64) -> Vec<Vec<Scalar>> {
    // Unit lower triangular times unit upper triangular, so always invertible.
    use rand::Rng;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let l: Vec<Vec<i64>> = (0..k)
        .map(|i| (0..k).map(|j| if i == j { 1 } else if j < i { rng.gen_range(-2..=2) } else { 0 }).collect())
        .collect();
    let u: Vec<Vec<i64>> = (0..k)
        .map(|i| (0..k).map(|j| if i == j { 1 } else if j > i { rng.gen_range(-2..=2) } else { 0 }).collect())
        .collect();
    (0..k)
        .map(|i| (0..k).map(|j| Scalar::from_i64((0..k).map(|m| l[i][m] * u[m][j]).sum(), Q)).collect())
        .collect()
}

fn comm(a: &Poly, b: &Poly) -> Poly {
    &(a * b) - &(b * a)
}

fn test_poly(which: usize) -> Poly {
    let x = |i| Poly::var(Var::x(i), Q);
    match which {
        0 => comm(&x(1), &x(2)),
        1 => &comm(&x(1), &x(2)) * &comm(&x(3), &x(4)),
        2 => comm(&comm(&x(1), &x(2)), &x(3)),
        _ => parse_poly("x1*x2*x3 - x1*x3*x2 - x2*x1*x3 + x2*x3*x1 + x3*x1*x2 - x3*x2*x1", Q).unwrap(),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn identity_verdict_is_basis_free(seed in any::<u64>(), which in 0usize..4) {
        let p = test_poly(which);
        for alg in algebras().into_iter().filter(|a| a.dim() <= 3) {
            let other = alg.change_basis(&invertible(alg.dim(), seed)).unwrap();
            prop_assert_eq!(
                is_identity_multilinear(&p, &alg).unwrap().identity,
                is_identity_multilinear(&p, &other).unwrap().identity
            );
        }
    }

    #[test]
    fn integrality_witness_annihilates(coords in prop::collection::vec(-4i64..=4, 4)) {
        let m2 = FiniteAlgebra::matrix(2, Q).unwrap();
        prop_assert!(integrality_witness(&m2.element(&coords).unwrap(), &m2).unwrap().verified);
        let ut = FiniteAlgebra::upper_triangular(2, Q).unwrap();
        prop_assert!(integrality_witness(&ut.element(&coords[..3]).unwrap(), &ut).unwrap().verified);
    }

    /// With more alternating variables than the dimension, the exhaustive
    /// scan agrees with the counting shortcut.
    #[test]
    fn alternation_beyond_dimension(seed in any::<u64>(), k in 2usize..=3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = random_alternating(k + 1, &mut rng, Q)
            .substitute(&Substitution::new().with(Var::z(), Poly::one(Q)).with(Var::t(1), Poly::one(Q)));
        prop_assume!(!p.is_zero() && p.vars().iter().all(|v| p.is_multilinear_in(&[*v])));
        let alg = FiniteAlgebra::truncated_poly(k, Q).unwrap();
        let xs: Vec<Var> = (1..=k as u32 + 1).map(Var::x).collect();
        prop_assert!(is_identity_alternating(&p, &xs, &alg).unwrap().identity);
        prop_assert!(is_identity_multilinear(&p, &alg).unwrap().identity);
    }
}

#[test]
fn codimension_respects_exponential_bound() {
    // Q satisfies the commutator (degree 2); M_2 satisfies Capl_5 (degree 10).
    let cases = [(FiniteAlgebra::field(Q), 2u64), (FiniteAlgebra::matrix(2, Q).unwrap(), 10)];
    for (alg, d) in &cases {
        for n in 1..=4 {
            let c = codimension(alg, n).unwrap().codimension;
            assert!(num_bigint::BigInt::from(c) <= regev_codim_bound(*d, n as u32).unwrap());
        }
    }
    assert!(is_identity_multilinear(&parse_poly("x1*x2 - x2*x1", Q).unwrap(), &cases[0].0).unwrap().identity);
}

#[test]
fn capelli_on_small_matrices() {
    let m2 = FiniteAlgebra::matrix(2, Q).unwrap();
    let xs: Vec<Var> = (1..=4).map(Var::x).collect();
    let r = is_identity_alternating(&capelli(4, Q).unwrap(), &xs, &m2).unwrap();
    assert!(!r.identity);
    let c2 = capelli(2, Q).unwrap();
    assert!(is_identity_multilinear(&c2, &FiniteAlgebra::upper_triangular(1, Q).unwrap()).unwrap().identity);
    assert!(!is_identity_multilinear(&c2, &FiniteAlgebra::grassmann(2, Q).unwrap()).unwrap().identity);
}

#[test]
fn algebra_file_round_trip() {
    let text = r#"{"field":"F_5","dim":2,"basis":["1","e"],
        "structure_constants":[[0,0,0,"1"],[0,1,1,"1"],[1,0,1,"1"]],"unit":["1","0"]}"#;
    let alg = FiniteAlgebra::from_json(text).unwrap();
    assert_eq!(alg.domain(), Domain::prime(5).unwrap());
    assert_eq!(codimension(&alg, 3).unwrap().codimension, 1);
    let bad = r#"{"dim":2,"structure_constants":[[0,0,1,"1"],[0,1,0,"1"]]}"#;
    assert!(FiniteAlgebra::from_json(bad).is_err());
}
