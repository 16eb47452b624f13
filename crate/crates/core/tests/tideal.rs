use std::collections::BTreeMap;

use capelli_core::delta::{delta, DeltaSpec};
use capelli_core::freealg::{capelli, parse_poly, Poly, Var};
use capelli_core::tideal::{
    congruent, membership, Caps, ComponentSpec, MembershipCertificate, SpanBasis, SpanOptions,
};
use capelli_core::Domain;

const Q: Domain = Domain::Rational;

fn md(vars: &[(Var, usize)]) -> BTreeMap<Var, usize> {
    vars.iter().copied().collect()
}

fn basis(m: usize, vars: &[(Var, usize)]) -> SpanBasis {
    let spec = ComponentSpec::new(m, md(vars)).unwrap();
    SpanBasis::build(&spec, &Caps::default(), Q).unwrap()
}

#[test]
fn certificates_are_sound() {
    let b = basis(2, &[(Var::x(1), 1), (Var::x(2), 1), (Var::y(1), 1)]);
    assert!(b.certify_rank(50_000_000));
    let inside = parse_poly("x1*y1*x2 - x2*y1*x1 + y1*x1*x2 - y1*x2*x1", Q).unwrap();
    let cert = b.is_member(&inside).unwrap();
    assert!(cert.is_member());
    assert!(cert.verify(&b, &inside).unwrap());
    let outside = parse_poly("x1*y1*x2", Q).unwrap();
    let cert = b.is_member(&outside).unwrap();
    assert!(!cert.is_member());
    assert!(cert.verify(&b, &outside).unwrap());
    if let MembershipCertificate::NonMember { functional, .. } = &cert {
        assert!(!functional.is_empty());
    }
    // A certificate for one polynomial does not verify another.
    let cert = b.is_member(&inside).unwrap();
    assert!(!cert.verify(&b, &(&inside + &outside)).unwrap_or(false));
}

#[test]
fn higher_capelli_ideals_are_smaller() {
    let vars = [(Var::x(1), 1), (Var::x(2), 1), (Var::x(3), 1), (Var::y(1), 1)];
    let big = basis(2, &vars);
    let small = basis(3, &vars);
    assert!(small.rank() <= big.rank());
    for g in small.generators() {
        assert!(big.is_member(&g.poly(Q)).unwrap().is_member(), "{g}");
    }
}

#[test]
fn delta_images_of_generators_stay_inside() {
    let vars = [(Var::x(1), 1), (Var::x(2), 1), (Var::y(1), 1)];
    let b = basis(2, &vars);
    let mut shifted = md(&vars);
    shifted.insert(Var::z(), 1);
    let target = SpanBasis::build(&ComponentSpec::new(2, shifted).unwrap(), &Caps::default(), Q).unwrap();
    let z = Poly::var(Var::z(), Q);
    for g in b.generators() {
        let image = delta(&g.poly(Q), &DeltaSpec::x(2, 1, z.clone()).unwrap()).unwrap();
        assert!(target.is_member(&image).unwrap().is_member(), "δ({g})");
    }
}

#[test]
fn bases_are_deterministic() {
    let vars = [(Var::x(1), 1), (Var::x(2), 1), (Var::y(1), 1), (Var::y(2), 1)];
    assert_eq!(basis(2, &vars).basis_hash(), basis(2, &vars).basis_hash());
}

#[test]
fn strict_bridges_empty_degree_two_span() {
    let opts = SpanOptions { empty_q: false, ..SpanOptions::default() };
    let spec = ComponentSpec::new(2, md(&[(Var::x(1), 1), (Var::x(2), 1)])).unwrap().with_options(&opts);
    assert_eq!(SpanBasis::build(&spec, &Caps::default(), Q).unwrap().rank(), 0);
    let c = capelli(2, Q).unwrap();
    assert!(membership(&c, 2, &SpanOptions::default()).unwrap().member);
}

#[test]
fn congruence_is_symmetric() {
    let f = parse_poly("x1*x2*y1", Q).unwrap();
    let g = parse_poly("x2*x1*y1", Q).unwrap();
    let opts = SpanOptions::default();
    assert_eq!(congruent(&f, &g, 2, &opts).unwrap().member, congruent(&g, &f, 2, &opts).unwrap().member);
}
