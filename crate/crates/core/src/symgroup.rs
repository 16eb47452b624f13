//! Permutations and the group algebra `Q[S_m]` (or `F_p[S_m]`).
//!
//! Products follow the convention `(σπ)(i) = π(σ(i))`: apply σ first.

use std::collections::BTreeMap;
use std::fmt;
use std::time::Instant;

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};
use serde_json::json;

use crate::error::{invalid, resource_limit, Error, Result};
use crate::freealg::{Poly, Var, VarKind, Word};
use crate::report::{Verdict, VerificationReport};
use crate::scalar::{Domain, Scalar};

/// A permutation of `{1..m}`, stored 0-based.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm(Vec<u8>);

impl Perm {
    pub fn identity(m: usize) -> Perm {
        assert!(m <= u8::MAX as usize, "permutation degree too large");
        Perm((0..m as u8).collect())
    }

    /// Builds from one-line notation `σ(1), …, σ(m)` (1-based).
    pub fn from_images(images: &[usize]) -> Result<Perm> {
        let m = images.len();
        if m > u8::MAX as usize {
            return Err(invalid("permutation degree too large"));
        }
        let mut seen = vec![false; m];
        for &i in images {
            if i == 0 || i > m || seen[i - 1] {
                return Err(invalid(format!("{images:?} is not a permutation")));
            }
            seen[i - 1] = true;
        }
        Ok(Perm(images.iter().map(|&i| (i - 1) as u8).collect()))
    }

    /// The transposition of `a` and `b` (1-based) in `S_m`.
    pub fn transposition(m: usize, a: usize, b: usize) -> Perm {
        let mut p = Perm::identity(m);
        p.0.swap(a - 1, b - 1);
        p
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    /// `σ(i)` with 0-based argument and result.
    pub fn image(&self, i: usize) -> usize {
        self.0[i] as usize
    }

    /// One-line notation, 1-based.
    pub fn images(&self) -> Vec<usize> {
        self.0.iter().map(|&i| i as usize + 1).collect()
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &v)| i == v as usize)
    }

    pub fn inverse(&self) -> Perm {
        let mut inv = vec![0u8; self.0.len()];
        for (i, &v) in self.0.iter().enumerate() {
            inv[v as usize] = i as u8;
        }
        Perm(inv)
    }

    /// The product `self · other`, i.e. `i ↦ other(self(i))`.
    pub fn then(&self, other: &Perm) -> Perm {
        assert_eq!(self.degree(), other.degree(), "permutation degree mismatch");
        Perm(self.0.iter().map(|&i| other.0[i as usize]).collect())
    }

    pub fn inversions(&self) -> usize {
        let mut n = 0;
        for i in 0..self.0.len() {
            for j in i + 1..self.0.len() {
                if self.0[i] > self.0[j] {
                    n += 1;
                }
            }
        }
        n
    }

    pub fn sgn(&self) -> i32 {
        if self.inversions() % 2 == 0 {
            1
        } else {
            -1
        }
    }

    /// All of `S_m` in lexicographic order of one-line notation.
    pub fn all(m: usize) -> PermIter {
        PermIter {
            next: Some(Perm::identity(m)),
        }
    }

    /// Parses `[2,1,3]` or `2,1,3`.
    pub fn parse(s: &str) -> Result<Perm> {
        let body = s.trim().trim_start_matches('[').trim_end_matches(']');
        if body.trim().is_empty() {
            return Perm::from_images(&[]);
        }
        let images = body
            .split(',')
            .map(|t| t.trim().parse::<usize>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|_| Error::Parse {
                offset: 0,
                message: format!("bad permutation `{s}`"),
            })?;
        Perm::from_images(&images)
    }
}

impl fmt::Display for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, v) in self.images().iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, "]")
    }
}

impl fmt::Debug for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl Serialize for Perm {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.images().serialize(s)
    }
}

pub struct PermIter {
    next: Option<Perm>,
}

impl Iterator for PermIter {
    type Item = Perm;

    fn next(&mut self) -> Option<Perm> {
        let cur = self.next.take()?;
        let mut a = cur.0.clone();
        let n = a.len();
        if n > 1 {
            let mut i = n - 1;
            while i > 0 && a[i - 1] >= a[i] {
                i -= 1;
            }
            if i > 0 {
                let mut j = n - 1;
                while a[j] <= a[i - 1] {
                    j -= 1;
                }
                a.swap(i - 1, j);
                a[i..].reverse();
                self.next = Some(Perm(a));
            }
        }
        Some(cur)
    }
}

/// An element of the group algebra over `domain`.
#[derive(Clone, PartialEq, Eq)]
pub struct GroupAlgElem {
    m: usize,
    domain: Domain,
    terms: BTreeMap<Perm, Scalar>,
}

impl GroupAlgElem {
    pub fn zero(m: usize, domain: Domain) -> GroupAlgElem {
        GroupAlgElem {
            m,
            domain,
            terms: BTreeMap::new(),
        }
    }

    pub fn from_perm(p: Perm, domain: Domain) -> GroupAlgElem {
        let mut g = GroupAlgElem::zero(p.degree(), domain);
        g.terms.insert(p, Scalar::one(domain));
        g
    }

    pub fn identity(m: usize, domain: Domain) -> GroupAlgElem {
        GroupAlgElem::from_perm(Perm::identity(m), domain)
    }

    /// `Σ_σ sgn(σ) σ` over the permutations yielded by `perms`.
    pub fn signed_sum(m: usize, domain: Domain, perms: impl IntoIterator<Item = Perm>) -> GroupAlgElem {
        let mut g = GroupAlgElem::zero(m, domain);
        for p in perms {
            let s = Scalar::from_i64(p.sgn() as i64, domain);
            g.add_term(p, s);
        }
        g
    }

    pub fn degree(&self) -> usize {
        self.m
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn support_size(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Perm, &Scalar)> {
        self.terms.iter()
    }

    pub fn coeff(&self, p: &Perm) -> Scalar {
        self.terms
            .get(p)
            .cloned()
            .unwrap_or_else(|| Scalar::zero(self.domain))
    }

    pub fn add_term(&mut self, p: Perm, c: Scalar) {
        assert_eq!(p.degree(), self.m, "permutation degree mismatch");
        if c.is_zero() {
            return;
        }
        let s = match self.terms.get(&p) {
            Some(old) => old + &c,
            None => c,
        };
        if s.is_zero() {
            self.terms.remove(&p);
        } else {
            self.terms.insert(p, s);
        }
    }

    pub fn add(&self, other: &GroupAlgElem) -> GroupAlgElem {
        let mut out = self.clone();
        for (p, c) in &other.terms {
            out.add_term(p.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &GroupAlgElem) -> GroupAlgElem {
        self.add(&other.scale(&Scalar::from_i64(-1, other.domain)))
    }

    pub fn scale(&self, c: &Scalar) -> GroupAlgElem {
        let mut out = GroupAlgElem::zero(self.m, self.domain);
        for (p, a) in &self.terms {
            out.add_term(p.clone(), a * c);
        }
        out
    }

    pub fn mul(&self, other: &GroupAlgElem) -> GroupAlgElem {
        assert_eq!(self.m, other.m, "group algebra degree mismatch");
        assert_eq!(self.domain, other.domain, "scalar domain mismatch");
        let mut out = GroupAlgElem::zero(self.m, self.domain);
        for (s, a) in &self.terms {
            for (p, b) in &other.terms {
                out.add_term(s.then(p), a * b);
            }
        }
        out
    }

    /// `Σ α_σ x_{σ(1)} ⋯ x_{σ(m)}`.
    pub fn to_poly(&self) -> Poly {
        Poly::from_terms(
            self.domain,
            self.terms.iter().map(|(p, c)| (perm_word(p), c.clone())),
        )
    }

    /// Inverse of [`to_poly`](Self::to_poly) on multilinear polynomials in `x_1..x_m`.
    pub fn from_poly(p: &Poly, m: usize) -> Result<GroupAlgElem> {
        let mut g = GroupAlgElem::zero(m, p.domain());
        for (w, c) in p.terms() {
            g.add_term(word_perm(w, m)?, c.clone());
        }
        Ok(g)
    }

    /// If `other = λ·self` for a scalar λ, returns λ.
    pub fn ratio_to(&self, other: &GroupAlgElem) -> Option<Scalar> {
        let (p0, c0) = self.terms.iter().next()?;
        let lambda = &other.coeff(p0) * &c0.inv()?;
        (self.scale(&lambda) == *other).then_some(lambda)
    }
}

impl fmt::Debug for GroupAlgElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.terms.iter().map(|(p, c)| format!("{c}*{p}")).collect();
        write!(f, "{}", if parts.is_empty() { "0".into() } else { parts.join(" + ") })
    }
}

struct Term<'a>(&'a Perm, &'a Scalar);

impl Serialize for Term<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("Term", 2)?;
        st.serialize_field("perm", self.0)?;
        st.serialize_field("coeff", self.1)?;
        st.end()
    }
}

impl Serialize for GroupAlgElem {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(self.terms.iter().map(|(p, c)| Term(p, c)))
    }
}

pub fn perm_word(p: &Perm) -> Word {
    p.images().into_iter().map(|i| Var::x(i as u32)).collect()
}

fn word_perm(w: &Word, m: usize) -> Result<Perm> {
    let mut images = Vec::with_capacity(m);
    for v in w.letters() {
        if v.kind() != VarKind::X {
            return Err(invalid(format!("{w} is not a word in x-variables")));
        }
        images.push(v.index() as usize);
    }
    if images.len() != m {
        return Err(invalid(format!("{w} is not multilinear in x1..x{m}")));
    }
    Perm::from_images(&images).map_err(|_| invalid(format!("{w} is not multilinear in x1..x{m}")))
}

fn check_multilinear_x(p: &Poly) -> Result<usize> {
    let m = p.total_degree().unwrap_or(0);
    for (w, _) in p.terms() {
        word_perm(w, m)?;
    }
    Ok(m)
}

/// `σ·p`, extended linearly from `σ·M_π = M_{σπ}`: the letter in place `i`
/// becomes the letter previously in place `σ(i)`.
pub fn left_act(s: &Perm, p: &Poly) -> Result<Poly> {
    let m = check_multilinear_x(p)?;
    if !p.is_zero() && m != s.degree() {
        return Err(invalid("permutation degree does not match polynomial degree"));
    }
    Ok(Poly::from_terms(
        p.domain(),
        p.terms().map(|(w, c)| {
            let l = w.letters();
            ((0..l.len()).map(|i| l[s.image(i)]).collect(), c.clone())
        }),
    ))
}

/// `p·π`, extended linearly from `M_σ·π = M_{σπ}`: each `x_j` is renamed `x_{π(j)}`.
pub fn right_act(p: &Poly, pi: &Perm) -> Result<Poly> {
    let m = check_multilinear_x(p)?;
    if !p.is_zero() && m != pi.degree() {
        return Err(invalid("permutation degree does not match polynomial degree"));
    }
    Ok(Poly::from_terms(
        p.domain(),
        p.terms().map(|(w, c)| {
            (
                w.letters()
                    .iter()
                    .map(|v| Var::x(pi.image(v.index() as usize - 1) as u32 + 1))
                    .collect(),
                c.clone(),
            )
        }),
    ))
}

/// `P(Z) = Σ_{σ(Z) ⊆ Y} sgn(σ)·σ` in `S_{2n}`, with `X = {1..n}`, `Y = {n+1..2n}`
/// and `z` a subset of `X` given 1-based.
pub fn p_of_subset(z: &[usize], n: usize, domain: Domain) -> Result<GroupAlgElem> {
    if let Some(&bad) = z.iter().find(|&&i| i == 0 || i > n) {
        return Err(invalid(format!("{bad} is not a letter of X = 1..{n}")));
    }
    let z0: Vec<usize> = z.iter().map(|&i| i - 1).collect();
    Ok(GroupAlgElem::signed_sum(
        2 * n,
        domain,
        Perm::all(2 * n).filter(|s| z0.iter().all(|&i| s.image(i) >= n)),
    ))
}

fn subsets(n: usize) -> impl Iterator<Item = Vec<usize>> {
    (0u32..1 << n).map(move |mask| (1..=n).filter(|&i| mask >> (i - 1) & 1 == 1).collect())
}

/// Compares each coefficient of `Σ_Z (−1)^{|Z|} P(Z)` with
/// `sgn(σ)·Σ_{Z ⊆ Z(σ)} (−1)^{|Z|}` where `Z(σ) = X ∩ σ^{-1}(Y)`.
pub fn jan3_coefficients_match(n: usize) -> Result<bool> {
    let q = Domain::Rational;
    let mut lhs = GroupAlgElem::zero(2 * n, q);
    for z in subsets(n) {
        let pz = p_of_subset(&z, n, q)?;
        lhs = if z.len() % 2 == 0 { lhs.add(&pz) } else { lhs.sub(&pz) };
    }
    Ok(Perm::all(2 * n).all(|s| {
        let zs = (0..n).filter(|&i| s.image(i) >= n).count() as u32;
        let alt: i64 = (0..1u32 << zs).map(|m| if m.count_ones() % 2 == 0 { 1 } else { -1 }).sum();
        lhs.coeff(&s) == Scalar::from_i64(s.sgn() as i64 * alt, q)
    }))
}

pub const JAN3_DEFAULT_CAP: usize = 4;

/// Checks `Σ_{Z⊆X} (−1)^{|Z|} P(Z) = Σ_{σ(X)=X} sgn(σ)·σ` in `Q[S_{2n}]`.
pub fn verify_jan3(n: usize, cap: usize) -> Result<VerificationReport> {
    if n == 0 {
        return Err(invalid("n must be positive"));
    }
    if n > cap {
        return Err(resource_limit("jan3 group size n", n as u128, cap as u128));
    }
    let start = Instant::now();
    let q = Domain::Rational;
    let m = 2 * n;
    let mut lhs = GroupAlgElem::zero(m, q);
    for z in subsets(n) {
        let pz = p_of_subset(&z, n, q)?;
        lhs = if z.len() % 2 == 0 { lhs.add(&pz) } else { lhs.sub(&pz) };
    }
    let group_order: u64 = (1..=m as u64).product();
    let rhs = GroupAlgElem::signed_sum(m, q, Perm::all(m).filter(|s| (0..n).all(|i| s.image(i) < n)));
    let equal = lhs == rhs;
    let mut r = VerificationReport::new("jan3")
        .param("n", n)
        .put("group_order", group_order.to_string())
        .put("lhs_support", lhs.support_size().to_string())
        .put("rhs_support", rhs.support_size().to_string())
        .verdict(if equal { Verdict::Pass } else { Verdict::Fail });
    if !equal {
        let diff = lhs.sub(&rhs);
        r = r.put("difference", json!(diff));
    }
    Ok(r.hash_of(&rhs).finish(start))
}
