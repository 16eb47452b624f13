//! Explicit degree bounds. Every comparison against `e` uses a rational
//! enclosure `S_N < e < S_N + 1/(N!·N)` from the Taylor series, refined until
//! the decision is forced and then re-checked at twice the precision.

use std::time::Instant;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use super::{dim_specht, wide_staircase, Partition};
use crate::error::{invalid, resource_limit, Result};
use crate::report::{Verdict, VerificationReport};

/// Rational bounds `lower < e < upper` from `terms` Taylor terms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EEnclosure {
    pub terms: u32,
    pub lower: BigRational,
    pub upper: BigRational,
}

impl EEnclosure {
    pub fn new(terms: u32) -> EEnclosure {
        let terms = terms.max(1);
        let mut sum = BigRational::zero();
        let mut fact = BigInt::one();
        for k in 0..=terms {
            if k > 0 {
                fact *= k;
            }
            sum += BigRational::new(BigInt::one(), fact.clone());
        }
        let tail = BigRational::new(BigInt::one(), fact * terms);
        EEnclosure {
            terms,
            upper: &sum + tail,
            lower: sum,
        }
    }
}

impl Serialize for EEnclosure {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("EEnclosure", 3)?;
        st.serialize_field("terms", &self.terms)?;
        st.serialize_field("lower", &self.lower.to_string())?;
        st.serialize_field("upper", &self.upper.to_string())?;
        st.end()
    }
}

/// A decision about `e`, with the enclosure that forced it.
#[derive(Debug, Clone)]
pub struct Decided<T> {
    pub value: T,
    pub enclosure: EEnclosure,
    /// The same value is obtained with twice as many Taylor terms.
    pub stable_under_doubling: bool,
}

impl<T: std::fmt::Display> Serialize for Decided<T> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("Decided", 3)?;
        st.serialize_field("value", &self.value.to_string())?;
        st.serialize_field("enclosure", &self.enclosure)?;
        st.serialize_field("stable_under_doubling", &self.stable_under_doubling)?;
        st.end()
    }
}

const START_TERMS: u32 = 4;
const MAX_TERMS: u32 = 1 << 12;

/// Refines the enclosure until `f` returns a value.
pub fn decide<T: PartialEq>(f: impl Fn(&EEnclosure) -> Option<T>) -> Result<Decided<T>> {
    let mut terms = START_TERMS;
    while terms <= MAX_TERMS {
        let enc = EEnclosure::new(terms);
        if let Some(value) = f(&enc) {
            let again = f(&EEnclosure::new(2 * terms));
            return Ok(Decided {
                stable_under_doubling: again.as_ref() == Some(&value),
                value,
                enclosure: enc,
            });
        }
        terms *= 2;
    }
    Err(resource_limit("Taylor terms for e", MAX_TERMS as u128 * 2, MAX_TERMS as u128))
}

fn rat(n: impl Into<BigInt>) -> BigRational {
    BigRational::from_integer(n.into())
}

/// `⌈c·e⌉` for rational `c > 0` (never an integer, since `e` is irrational).
pub fn ceil_times_e(c: &BigRational) -> Result<Decided<BigInt>> {
    if !c.is_positive_rational() {
        return Err(invalid("coefficient of e must be positive"));
    }
    decide(|enc| {
        let lo = (c * &enc.lower).floor().to_integer();
        let hi = (c * &enc.upper).floor().to_integer();
        (lo == hi).then(|| lo + 1)
    })
}

trait PositiveRational {
    fn is_positive_rational(&self) -> bool;
}

impl PositiveRational for BigRational {
    fn is_positive_rational(&self) -> bool {
        self > &BigRational::zero()
    }
}

/// Whether `x ≥ k·e`.
pub fn at_least_times_e(x: &BigRational, k: &BigRational) -> Result<Decided<bool>> {
    decide(|enc| {
        if x >= &(k * &enc.upper) {
            Some(true)
        } else if x <= &(k * &enc.lower) {
            Some(false)
        } else {
            None
        }
    })
}

/// `(d−1)^{2m}`.
pub fn regev_codim_bound(d: u64, m: u32) -> Result<BigInt> {
    if d < 2 || m < 1 {
        return Err(invalid("need d ≥ 2 and m ≥ 1"));
    }
    Ok(num_traits::pow(BigInt::from(d - 1), 2 * m as usize))
}

/// `d′ = ⌈e·(d−1)^4⌉²`, with the check that `u = v = ⌈e(d−1)^4⌉` meets
/// `uv/(u+v)·(2/e) ≥ (d−1)^4`.
#[derive(Debug, Clone, Serialize)]
pub struct StrongDegree {
    pub d: u64,
    pub ceiling: Decided<BigInt>,
    #[serde(serialize_with = "as_string")]
    pub d_prime: BigInt,
    pub rectangle_condition: Decided<bool>,
}

pub fn strong_degree_char0(d: u64) -> Result<StrongDegree> {
    if d < 2 {
        return Err(invalid("need d ≥ 2"));
    }
    let k4 = rat(num_traits::pow(BigInt::from(d - 1), 4));
    let ceiling = ceil_times_e(&k4)?;
    let c = rat(ceiling.value.clone());
    // uv/(u+v)·(2/e) with u = v = c is c/e; c/e ≥ k4 iff c ≥ k4·e.
    let rectangle_condition = at_least_times_e(&c, &k4)?;
    Ok(StrongDegree {
        d,
        d_prime: &ceiling.value * &ceiling.value,
        ceiling,
        rectangle_condition,
    })
}

/// Sparse-identity degree in characteristic `p`.
#[derive(Debug, Clone, Serialize)]
pub struct SparseDegree {
    pub p: u64,
    pub d: u64,
    /// `u = ⌈2pe(d−1)²/3⌉`.
    pub u: Decided<BigInt>,
    #[serde(serialize_with = "as_string")]
    pub d_prime: BigInt,
    /// The explicit `u` satisfies `3u(u+1)/(p(2u+1)) ≥ (d−1)²e`.
    pub u_satisfies: Decided<bool>,
    /// Least `u` satisfying the same inequality.
    pub least_u: u64,
    #[serde(serialize_with = "as_string")]
    pub least_d_prime: BigInt,
}

fn as_string<S: serde::Serializer>(v: &BigInt, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

/// `(p−1)·p·C(u+1, 2)`.
pub fn sparse_degree(p: u64, u: &BigInt) -> BigInt {
    BigInt::from(p - 1) * p * u * (u + 1u32) / 2u32
}

fn sparse_inequality(p: u64, d: u64, u: &BigInt) -> Result<Decided<bool>> {
    let lhs = BigRational::new(BigInt::from(3u32) * u * (u + 1u32), BigInt::from(p) * (u * 2u32 + 1u32));
    at_least_times_e(&lhs, &rat((d - 1) * (d - 1)))
}

pub fn sparse_degree_charp(p: u64, d: u64) -> Result<SparseDegree> {
    if !crate::scalar::is_prime(p) {
        return Err(invalid(format!("{p} is not prime")));
    }
    if d < 2 {
        return Err(invalid("need d ≥ 2"));
    }
    let k2 = (d - 1) * (d - 1);
    let u = ceil_times_e(&BigRational::new(BigInt::from(2 * p * k2), BigInt::from(3)))?;
    let u_satisfies = sparse_inequality(p, d, &u.value)?;
    let mut least = 1u64;
    while !sparse_inequality(p, d, &BigInt::from(least))?.value {
        least += 1;
    }
    Ok(SparseDegree {
        p,
        d,
        d_prime: sparse_degree(p, &u.value),
        u_satisfies,
        least_d_prime: sparse_degree(p, &BigInt::from(least)),
        least_u: least,
        u,
    })
}

/// `n = r^{d′} + d′`.
#[derive(Debug, Clone, Serialize)]
pub struct CapelliDegree {
    #[serde(serialize_with = "as_string")]
    pub n: BigInt,
    /// `r = 1` is accepted but flagged: the bound assumes at least two generators.
    pub single_generator: bool,
}

pub fn capelli_degree_from_sparse(r: u64, d_prime: &BigInt) -> Result<CapelliDegree> {
    if r < 1 {
        return Err(invalid("need r ≥ 1"));
    }
    let e = d_prime
        .to_usize()
        .filter(|&e| e <= 1 << 24)
        .ok_or_else(|| invalid(format!("exponent {d_prime} is too large")))?;
    Ok(CapelliDegree {
        n: num_traits::pow(BigInt::from(r), e) + d_prime,
        single_generator: r == 1,
    })
}

/// Ways of combining Capelli degrees.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Compose {
    /// `A_1 ⋯ A_t = 0` with `A_i` satisfying `Capl_{n_i}`: `Π n_i`.
    Product(Vec<u64>),
    /// `k·m` for odd `m`.
    NilpotentOdd { m: u64, k: u64 },
    /// `k·(m+1)`.
    Nilpotent { m: u64, k: u64 },
}

pub fn compose_capelli_degree(mode: &Compose) -> Result<BigInt> {
    match mode {
        Compose::Product(ns) if ns.is_empty() => Err(invalid("need at least one factor")),
        Compose::Product(ns) => Ok(ns.iter().fold(BigInt::one(), |acc, &n| acc * n)),
        Compose::NilpotentOdd { m, .. } if m.is_even() => {
            Err(invalid(format!("m = {m} must be odd")))
        }
        Compose::NilpotentOdd { m, k } => Ok(BigInt::from(*k) * *m),
        Compose::Nilpotent { m, k } => Ok(BigInt::from(*k) * (*m + 1)),
    }
}

fn rational_pow(x: &BigRational, n: usize) -> BigRational {
    num_traits::pow(x.clone(), n)
}

/// `L·c^n < s` where `c` ranges over the enclosure-induced interval of `1/e`.
fn strict_below(base: &BigRational, n: usize, s: &BigInt) -> Result<(Decided<bool>, BigRational, BigRational)> {
    let s = rat(s.clone());
    let decided = decide(|enc| {
        // base·(1/e) is largest at the lower bound of e.
        let hi = rational_pow(&(base / &enc.lower), n);
        let lo = rational_pow(&(base / &enc.upper), n);
        if hi < s {
            Some(true)
        } else if lo >= s {
            Some(false)
        } else {
            None
        }
    })?;
    let enc = &decided.enclosure;
    let hi = rational_pow(&(base / &enc.lower), n);
    let lo = rational_pow(&(base / &enc.upper), n);
    Ok((decided, lo, hi))
}

pub const HOOK_BOUND_CAP: u64 = 20;

/// `(n/(u+v))^n·(2/e)^n < s^μ` for the rectangle with `v` rows of length `u`.
pub fn bound_hook5(u: u64, v: u64) -> Result<VerificationReport> {
    let start = Instant::now();
    if u == 0 || v == 0 {
        return Err(invalid("need u, v ≥ 1"));
    }
    let n = u * v;
    if n > HOOK_BOUND_CAP {
        return Err(resource_limit("rectangle size uv", n as u128, HOOK_BOUND_CAP as u128));
    }
    let s = dim_specht(&Partition::rectangle(u as usize, v as usize));
    let base = BigRational::new(BigInt::from(2 * n), BigInt::from(u + v));
    let (decided, lo, hi) = strict_below(&base, n as usize, &s)?;
    let ok = decided.value && decided.stable_under_doubling;
    Ok(VerificationReport::new("bound-hook5")
        .param("u", u)
        .param("v", v)
        .put("n", n)
        .put("lhs_lower", lo.to_string())
        .put("lhs_upper", hi.to_string())
        .put("rhs", s.to_string())
        .put("e_enclosure", &decided.enclosure)
        .put("stable_under_doubling", decided.stable_under_doubling)
        .verdict(if ok { Verdict::Pass } else { Verdict::Fail })
        .finish(start))
}

/// `(6n/(p(p−1)(2u+1)))^n·(1/e)^n < f^λ` for the wide staircase `λ ⊢ n`,
/// `n = (p−1)·C(u+1, 2)`.
pub fn bound_hook51(p: u64, u: u64) -> Result<VerificationReport> {
    let start = Instant::now();
    let shape = wide_staircase(p, u as usize)?;
    let n = shape.n() as u64;
    if n > HOOK_BOUND_CAP {
        return Err(resource_limit("staircase size n", n as u128, HOOK_BOUND_CAP as u128));
    }
    let s = dim_specht(&shape);
    let base = BigRational::new(BigInt::from(6 * n), BigInt::from(p * (p - 1) * (2 * u + 1)));
    let (decided, lo, hi) = strict_below(&base, n as usize, &s)?;
    let ok = decided.value && decided.stable_under_doubling;
    Ok(VerificationReport::new("bound-hook51")
        .param("p", p)
        .param("u", u)
        .put("n", n)
        .put("shape", shape.to_string())
        .put("n_rule", "n = (p-1)*binom(u+1,2), from the staircase row lengths")
        .put("lhs_lower", lo.to_string())
        .put("lhs_upper", hi.to_string())
        .put("rhs", s.to_string())
        .put("e_enclosure", &decided.enclosure)
        .put("stable_under_doubling", decided.stable_under_doubling)
        .verdict(if ok { Verdict::Pass } else { Verdict::Fail })
        .finish(start))
}

/// Every `(u, v)` with `uv ≤ 20` and every `(p, u)` whose staircase has
/// `n ≤ 20`.
pub fn hook_bound_grid() -> Result<Vec<VerificationReport>> {
    let mut out = Vec::new();
    for u in 1..=HOOK_BOUND_CAP {
        for v in 1..=HOOK_BOUND_CAP / u {
            out.push(bound_hook5(u, v)?);
        }
    }
    for p in (2..=HOOK_BOUND_CAP + 1).filter(|&p| crate::scalar::is_prime(p)) {
        let mut u = 1;
        while (p - 1) * u * (u + 1) / 2 <= HOOK_BOUND_CAP {
            out.push(bound_hook51(p, u)?);
            u += 1;
        }
    }
    Ok(out)
}
