use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::Result;
use crate::scalar::{Domain, Scalar};

use super::word::{Var, Word};

/// An element of the free unital associative algebra: a finite map from
/// words to nonzero coefficients.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Poly {
    domain: Domain,
    terms: BTreeMap<Word, Scalar>,
}

impl Poly {
    pub fn zero(domain: Domain) -> Poly {
        Poly {
            domain,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(domain: Domain) -> Poly {
        Poly::monomial(Word::empty(), Scalar::one(domain))
    }

    pub fn var(v: Var, domain: Domain) -> Poly {
        Poly::monomial(Word::letter(v), Scalar::one(domain))
    }

    pub fn word(w: Word, domain: Domain) -> Poly {
        Poly::monomial(w, Scalar::one(domain))
    }

    pub fn monomial(w: Word, c: Scalar) -> Poly {
        let mut p = Poly::zero(c.domain());
        if !c.is_zero() {
            p.terms.insert(w, c);
        }
        p
    }

    /// Sums the given terms, merging repeated words.
    pub fn from_terms(domain: Domain, terms: impl IntoIterator<Item = (Word, Scalar)>) -> Poly {
        let mut p = Poly::zero(domain);
        for (w, c) in terms {
            p.add_term(w, c);
        }
        p
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, &Scalar)> {
        self.terms.iter()
    }

    pub fn coeff(&self, w: &Word) -> Scalar {
        self.terms
            .get(w)
            .cloned()
            .unwrap_or_else(|| Scalar::zero(self.domain))
    }

    /// Adds `c·w` in place, pruning a cancelled term.
    pub fn add_term(&mut self, w: Word, c: Scalar) {
        assert_eq!(c.domain(), self.domain, "scalar domain mismatch");
        if c.is_zero() {
            return;
        }
        match self.terms.entry(w) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                let s = &*e.get() + &c;
                if s.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
        }
    }

    pub fn try_add(&self, other: &Poly) -> Result<Poly> {
        self.domain.check_same(other.domain)?;
        Ok(self + other)
    }

    pub fn try_sub(&self, other: &Poly) -> Result<Poly> {
        self.domain.check_same(other.domain)?;
        Ok(self - other)
    }

    pub fn try_mul(&self, other: &Poly) -> Result<Poly> {
        self.domain.check_same(other.domain)?;
        Ok(self * other)
    }

    pub fn scale(&self, c: &Scalar) -> Poly {
        if c.is_zero() {
            return Poly::zero(self.domain);
        }
        Poly {
            domain: self.domain,
            terms: self.terms.iter().map(|(w, a)| (w.clone(), a * c)).collect(),
        }
    }

    pub fn scale_i64(&self, c: i64) -> Poly {
        self.scale(&Scalar::from_i64(c, self.domain))
    }

    pub fn pow(&self, k: u32) -> Poly {
        let mut acc = Poly::one(self.domain);
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// All indeterminates occurring in some word.
    pub fn vars(&self) -> BTreeSet<Var> {
        self.terms
            .keys()
            .flat_map(|w| w.letters().iter().copied())
            .collect()
    }

    pub fn total_degree(&self) -> Option<usize> {
        self.terms.keys().map(Word::len).max()
    }

    /// True when every word contains each of `vars` exactly once.
    pub fn is_multilinear_in(&self, vars: &[Var]) -> bool {
        self.terms
            .keys()
            .all(|w| vars.iter().all(|&v| w.count(v) == 1))
    }

    /// Applies a letter-to-letter renaming (variables absent from `map` are fixed).
    pub fn rename(&self, map: &BTreeMap<Var, Var>) -> Poly {
        Poly::from_terms(
            self.domain,
            self.terms.iter().map(|(w, c)| {
                let nw: Word = w
                    .letters()
                    .iter()
                    .map(|v| *map.get(v).unwrap_or(v))
                    .collect();
                (nw, c.clone())
            }),
        )
    }

    /// Image under the algebra endomorphism induced by `s`.
    pub fn substitute(&self, s: &Substitution) -> Poly {
        let mut out = Poly::zero(self.domain);
        for (w, c) in &self.terms {
            // Expand the word as a product of images, left to right.
            let mut partial: Vec<(Word, Scalar)> = vec![(Word::empty(), c.clone())];
            for v in w.letters() {
                match s.image(*v) {
                    None => {
                        for (pw, _) in partial.iter_mut() {
                            pw.push(*v);
                        }
                    }
                    Some(img) => {
                        let mut next = Vec::with_capacity(partial.len() * img.num_terms());
                        for (pw, pc) in &partial {
                            for (iw, ic) in img.terms() {
                                next.push((pw.concat(iw), pc * ic));
                            }
                        }
                        partial = next;
                    }
                }
            }
            for (pw, pc) in partial {
                out.add_term(pw, pc);
            }
        }
        out
    }

    /// The part of `self` whose words contain `v` exactly `k` times.
    pub fn degree_component(&self, v: Var, k: usize) -> Poly {
        Poly {
            domain: self.domain,
            terms: self
                .terms
                .iter()
                .filter(|(w, _)| w.count(v) == k)
                .map(|(w, c)| (w.clone(), c.clone()))
                .collect(),
        }
    }

    /// The common multidegree of all words, or the decomposition into
    /// multihomogeneous components when the words disagree.
    pub fn multidegree(&self) -> Multidegree {
        let comps = self.homogeneous_components();
        match comps.len() {
            0 => Multidegree::Homogeneous(BTreeMap::new()),
            1 => Multidegree::Homogeneous(comps.into_keys().next().expect("one component")),
            _ => Multidegree::Inhomogeneous(comps),
        }
    }

    pub fn homogeneous_components(&self) -> BTreeMap<BTreeMap<Var, usize>, Poly> {
        let mut comps: BTreeMap<BTreeMap<Var, usize>, Poly> = BTreeMap::new();
        for (w, c) in &self.terms {
            comps
                .entry(word_multidegree(w))
                .or_insert_with(|| Poly::zero(self.domain))
                .terms
                .insert(w.clone(), c.clone());
        }
        comps
    }
}

pub fn word_multidegree(w: &Word) -> BTreeMap<Var, usize> {
    let mut m = BTreeMap::new();
    for v in w.letters() {
        *m.entry(*v).or_insert(0) += 1;
    }
    m
}

/// Multidegree of a polynomial (see [`Poly::multidegree`]).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Multidegree {
    Homogeneous(BTreeMap<Var, usize>),
    Inhomogeneous(BTreeMap<BTreeMap<Var, usize>, Poly>),
}

/// A partial assignment of indeterminates to polynomials.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Substitution {
    images: BTreeMap<Var, Poly>,
}

impl Substitution {
    pub fn new() -> Substitution {
        Substitution::default()
    }

    pub fn with(mut self, v: Var, img: Poly) -> Substitution {
        self.images.insert(v, img);
        self
    }

    pub fn set(&mut self, v: Var, img: Poly) {
        self.images.insert(v, img);
    }

    pub fn image(&self, v: Var) -> Option<&Poly> {
        self.images.get(&v)
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        assert_eq!(self.domain, rhs.domain, "scalar domain mismatch");
        let mut out = self.clone();
        for (w, c) in &rhs.terms {
            out.add_term(w.clone(), c.clone());
        }
        out
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        assert_eq!(self.domain, rhs.domain, "scalar domain mismatch");
        let mut out = self.clone();
        for (w, c) in &rhs.terms {
            out.add_term(w.clone(), -c);
        }
        out
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        assert_eq!(self.domain, rhs.domain, "scalar domain mismatch");
        let mut out = Poly::zero(self.domain);
        for (a, ca) in &self.terms {
            for (b, cb) in &rhs.terms {
                out.add_term(a.concat(b), ca * cb);
            }
        }
        out
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly {
            domain: self.domain,
            terms: self.terms.iter().map(|(w, c)| (w.clone(), -c)).collect(),
        }
    }
}

impl Add for Poly {
    type Output = Poly;
    fn add(self, rhs: Poly) -> Poly {
        &self + &rhs
    }
}

impl Sub for Poly {
    type Output = Poly;
    fn sub(self, rhs: Poly) -> Poly {
        &self - &rhs
    }
}

impl Mul for Poly {
    type Output = Poly;
    fn mul(self, rhs: Poly) -> Poly {
        &self * &rhs
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::freealg::parse_poly;

    fn q(s: &str) -> Poly {
        parse_poly(s, Domain::Rational).unwrap()
    }

    #[test]
    fn add_examples() {
        assert!((&q("x1*x2") + &q("-x1*x2")).is_zero());
        assert_eq!((&q("x1*x2") + &q("x2*x1")).num_terms(), 2);
        assert_eq!(&q("x1*y1") + &Poly::zero(Domain::Rational), q("x1*y1"));
    }

    #[test]
    fn mul_examples() {
        assert_eq!(&q("x1") * &q("x2"), q("x1*x2"));
        assert_eq!(&q("x1 + x2") * &q("z"), q("x1*z + x2*z"));
        assert_eq!(&q("x1*x2 - x2*x1") * &Poly::one(Domain::Rational), q("x1*x2 - x2*x1"));
    }

    #[test]
    fn mixed_domain_is_error() {
        let a = q("x1");
        let b = parse_poly("x1", Domain::prime(3).unwrap()).unwrap();
        assert!(a.try_add(&b).is_err());
        assert!(a.try_mul(&b).is_err());
    }

    #[test]
    fn substitute_examples() {
        let zp1 = &q("z") + &Poly::one(Domain::Rational);
        let s = Substitution::new()
            .with(Var::x(1), &zp1 * &q("x1"))
            .with(Var::x(2), &zp1 * &q("x2"));
        assert_eq!(
            q("x1*x2").substitute(&s),
            q("z*x1*z*x2 + z*x1*x2 + x1*z*x2 + x1*x2")
        );
        assert_eq!(q("x1").substitute(&Substitution::new()), q("x1"));
        let s = Substitution::new().with(Var::x(1), q("x1 + x2"));
        assert_eq!(q("x1*y1").substitute(&s), q("x1*y1 + x2*y1"));
    }

    #[test]
    fn multidegree_examples() {
        let m = q("z*x1*z*x2").multidegree();
        let expect: BTreeMap<Var, usize> =
            [(Var::z(), 2), (Var::x(1), 1), (Var::x(2), 1)].into_iter().collect();
        assert_eq!(m, Multidegree::Homogeneous(expect));
        match q("x1 + x1*x2").multidegree() {
            Multidegree::Inhomogeneous(c) => {
                let parts: Vec<_> = c.values().cloned().collect();
                assert_eq!(parts.len(), 2);
                assert!(parts.contains(&q("x1")));
                assert!(parts.contains(&q("x1*x2")));
            }
            other => panic!("expected inhomogeneous, got {other:?}"),
        }
        let expanded = q("z*x1*z*x2 + z*x1*x2 + x1*z*x2 + x1*x2");
        assert_eq!(expanded.degree_component(Var::z(), 1), q("z*x1*x2 + x1*z*x2"));
    }
}
