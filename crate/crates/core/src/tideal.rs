//! Membership in multihomogeneous components of Capelli T-ideals.
//!
//! `Capl_m` is multilinear, so substituting polynomials into its slots and
//! multiplying on both sides by polynomials expands into a combination of
//! instances `a·Capl_m(p_1..p_m; q_1..q_m)·b` whose slots and outer factors
//! are words. Each such instance is multihomogeneous, hence the component of
//! `CAP_m` of a fixed multidegree is spanned by the word instances of that
//! multidegree. Those are enumerated here, reduced modulo a large prime, and
//! every answer is returned with a certificate checked over the exact field.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::time::Instant;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;
use serde_json::{json, Value};

use crate::delta::{delta, signed_delta_sum, zubrilin_sum_a, DeltaSpec};
use crate::error::{invalid, resource_limit, Error, Result};
use crate::freealg::{
    alternation_report, capelli_words, double_capelli, double_capelli_bridges, specialize_to_unit,
    Multidegree, Poly, Substitution, Var, VarKind, Word,
};
use crate::linalg::{
    large_primes, rational_mod, rational_reconstruct, solve_rational, ModRref, SparseRow,
};
use crate::report::{sha256_json, Verdict, VerificationReport};
use crate::scalar::{Domain, Scalar};
use crate::symgroup::Perm;

/// Resource limits for span construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Caps {
    /// Maximum number of words in a component.
    pub max_dim: u64,
    /// Maximum number of distinct generators.
    pub max_gens: u64,
}

impl Default for Caps {
    fn default() -> Caps {
        Caps {
            max_dim: 50_000,
            max_gens: 200_000,
        }
    }
}

impl Caps {
    /// Defaults overridden by `CAPELLI_MAX_DIM` / `CAPELLI_MAX_GENS`.
    pub fn from_env() -> Caps {
        let mut c = Caps::default();
        if let Some(v) = env_u64("CAPELLI_MAX_DIM") {
            c.max_dim = v;
        }
        if let Some(v) = env_u64("CAPELLI_MAX_GENS") {
            c.max_gens = v;
        }
        c
    }
}

fn env_u64(name: &str) -> Option<u64> {
    std::env::var(name).ok()?.trim().parse().ok()
}

/// How components are presented.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SpanOptions {
    pub caps: Caps,
    /// Allow one empty alternating slot (the unital T-ideal contains these).
    pub empty_p: bool,
    /// Allow empty bridge words `q_i`.
    pub empty_q: bool,
}

impl Default for SpanOptions {
    fn default() -> SpanOptions {
        SpanOptions {
            caps: Caps::default(),
            empty_p: false,
            empty_q: true,
        }
    }
}

impl SpanOptions {
    pub fn with_caps(caps: Caps) -> SpanOptions {
        SpanOptions {
            caps,
            ..SpanOptions::default()
        }
    }
}

/// The component of `CAP_m` with a fixed multidegree.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ComponentSpec {
    pub m: usize,
    pub multidegree: BTreeMap<Var, usize>,
    pub empty_p: bool,
    pub empty_q: bool,
}

impl ComponentSpec {
    pub fn new(m: usize, multidegree: BTreeMap<Var, usize>) -> Result<ComponentSpec> {
        if m == 0 {
            return Err(invalid("Capelli index must be positive"));
        }
        let multidegree = multidegree.into_iter().filter(|e| e.1 > 0).collect();
        Ok(ComponentSpec {
            m,
            multidegree,
            empty_p: false,
            empty_q: true,
        })
    }

    pub fn with_options(mut self, opts: &SpanOptions) -> ComponentSpec {
        self.empty_p = opts.empty_p;
        self.empty_q = opts.empty_q;
        self
    }

    /// The component containing a nonzero multihomogeneous `q`.
    pub fn of_poly(m: usize, q: &Poly) -> Result<ComponentSpec> {
        match q.multidegree() {
            Multidegree::Homogeneous(md) if !q.is_zero() => ComponentSpec::new(m, md),
            Multidegree::Homogeneous(_) => Err(invalid("the zero polynomial has no multidegree")),
            Multidegree::Inhomogeneous(_) => Err(invalid("polynomial is not multihomogeneous")),
        }
    }

    pub fn total_degree(&self) -> usize {
        self.multidegree.values().sum()
    }

    /// Number of words of this multidegree.
    pub fn dimension(&self) -> u128 {
        let mut acc: u128 = 1;
        let mut seen: u128 = 0;
        for &e in self.multidegree.values() {
            for i in 1..=e as u128 {
                seen += 1;
                acc = acc.saturating_mul(seen) / i;
            }
        }
        acc
    }

    fn letters(&self) -> Vec<Var> {
        self.multidegree
            .iter()
            .flat_map(|(&v, &e)| std::iter::repeat(v).take(e))
            .collect()
    }

    pub fn multidegree_string(&self) -> String {
        multidegree_string(&self.multidegree)
    }
}

pub fn multidegree_string(md: &BTreeMap<Var, usize>) -> String {
    md.iter()
        .map(|(v, &e)| if e == 1 { v.to_string() } else { format!("{v}^{e}") })
        .collect::<Vec<_>>()
        .join(" ")
}

/// The instance `a·Capl_m(p_1..p_m; q_1..q_m)·b`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Generator {
    pub a: Word,
    pub p: Vec<Word>,
    pub q: Vec<Word>,
    pub b: Word,
}

impl Generator {
    pub fn poly(&self, domain: Domain) -> Poly {
        let core = capelli_words(&self.p, &self.q, domain);
        &(&Poly::word(self.a.clone(), domain) * &core) * &Poly::word(self.b.clone(), domain)
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |ws: &[Word]| ws.iter().map(Word::to_string).collect::<Vec<_>>().join(", ");
        write!(f, "{}·Capl({}; {})·{}", self.a, join(&self.p), join(&self.q), self.b)
    }
}

/// A spanning set of a component together with its row reduction.
pub struct SpanBasis {
    spec: ComponentSpec,
    domain: Domain,
    words: Vec<Word>,
    index: HashMap<Word, u32>,
    generators: Vec<Generator>,
    rows: Vec<Vec<(u32, i64)>>,
    rref: ModRref,
    independent: Vec<usize>,
    instances: u64,
}

/// Distinct permutations of a sorted multiset, in lexicographic order.
fn multiset_permutations(sorted: &[Var], mut f: impl FnMut(&[Var]) -> Result<()>) -> Result<()> {
    let mut a = sorted.to_vec();
    loop {
        f(&a)?;
        let n = a.len();
        if n < 2 {
            return Ok(());
        }
        let mut i = n - 1;
        while i > 0 && a[i - 1] >= a[i] {
            i -= 1;
        }
        if i == 0 {
            return Ok(());
        }
        let mut j = n - 1;
        while a[j] <= a[i - 1] {
            j -= 1;
        }
        a.swap(i - 1, j);
        a[i..].reverse();
    }
}

struct Enumerator<'a> {
    spec: &'a ComponentSpec,
    perms: Vec<(Perm, i64)>,
    index: &'a HashMap<Word, u32>,
    // Block boundaries: a, p1, q1, …, pm, qm, b.
    cuts: Vec<usize>,
}

impl Enumerator<'_> {
    /// Calls `emit` for every cut of `w` into blocks with increasing p-slots.
    fn cuts(
        &mut self,
        w: &[Var],
        block: usize,
        pos: usize,
        emit: &mut dyn FnMut(&Generator, Vec<(u32, i64)>) -> Result<()>,
    ) -> Result<()> {
        let m = self.spec.m;
        let nblocks = 2 * m + 2;
        if block == nblocks - 1 {
            self.cuts.push(pos);
            let r = self.finish(w, emit);
            self.cuts.pop();
            return r;
        }
        let is_p = block % 2 == 1 && block < nblocks - 1;
        let is_q = block % 2 == 0 && block > 0;
        // Letters still needed by the remaining p-slots (and q-slots if nonempty).
        let later_p = (block + 1..nblocks - 1).filter(|b| b % 2 == 1).count();
        let later_q = (block + 1..nblocks - 1).filter(|b| b % 2 == 0).count();
        let reserve = if self.spec.empty_p { 0 } else { later_p }
            + if self.spec.empty_q { 0 } else { later_q };
        let min_len = if is_p && !self.spec.empty_p || is_q && !self.spec.empty_q {
            1
        } else {
            0
        };
        for end in pos + min_len..=w.len() {
            if w.len() - end < reserve {
                break;
            }
            if is_p {
                let i = (block - 1) / 2;
                if i > 0 {
                    let prev = &w[self.cuts[block - 2]..self.cuts[block - 1]];
                    // Strictly increasing p-slots; permuting them only changes sign.
                    if prev >= &w[pos..end] {
                        continue;
                    }
                }
            }
            self.cuts.push(pos);
            let r = self.cuts(w, block + 1, end, emit);
            self.cuts.pop();
            r?;
        }
        Ok(())
    }

    fn finish(
        &self,
        w: &[Var],
        emit: &mut dyn FnMut(&Generator, Vec<(u32, i64)>) -> Result<()>,
    ) -> Result<()> {
        let m = self.spec.m;
        let bounds: Vec<usize> = self.cuts.iter().copied().chain([w.len()]).collect();
        let block = |i: usize| Word::from_vars(w[bounds[i]..bounds[i + 1]].iter().copied());
        let g = Generator {
            a: block(0),
            p: (0..m).map(|i| block(1 + 2 * i)).collect(),
            q: (0..m).map(|i| block(2 + 2 * i)).collect(),
            b: block(2 * m + 1),
        };
        let mut row: Vec<(u32, i64)> = Vec::with_capacity(self.perms.len());
        for (pi, s) in &self.perms {
            let mut word = g.a.clone();
            for i in 0..m {
                word.extend_from(&g.p[pi.image(i)]);
                word.extend_from(&g.q[i]);
            }
            word.extend_from(&g.b);
            let col = *self.index.get(&word).expect("instance word lies in the component");
            row.push((col, *s));
        }
        row.sort_unstable_by_key(|e| e.0);
        let mut merged: Vec<(u32, i64)> = Vec::with_capacity(row.len());
        for (c, x) in row {
            match merged.last_mut() {
                Some(last) if last.0 == c => last.1 += x,
                _ => merged.push((c, x)),
            }
        }
        merged.retain(|e| e.1 != 0);
        if merged.is_empty() {
            return Ok(());
        }
        emit(&g, merged)
    }
}

fn normalize(row: &mut [(u32, i64)]) {
    let g = row.iter().fold(0i64, |g, e| g.gcd(&e.1));
    let g = if row[0].1 < 0 { -g } else { g };
    if g != 1 {
        for e in row.iter_mut() {
            e.1 /= g;
        }
    }
}

fn to_mod(row: &[(u32, i64)], p: u64) -> SparseRow {
    row.iter()
        .map(|&(c, x)| (c, x.rem_euclid(p as i64) as u64))
        .filter(|e| e.1 != 0)
        .collect()
}

fn working_prime(domain: Domain) -> u64 {
    match domain {
        Domain::Rational => large_primes()[0],
        Domain::Prime(p) => p,
    }
}

impl SpanBasis {
    /// Enumerates the generators of `spec` and row-reduces them over `domain`.
    pub fn build(spec: &ComponentSpec, caps: &Caps, domain: Domain) -> Result<SpanBasis> {
        let dim = spec.dimension();
        if dim > caps.max_dim as u128 {
            return Err(resource_limit(
                format!("component dimension of {}", spec.multidegree_string()),
                dim,
                caps.max_dim as u128,
            ));
        }
        let letters = spec.letters();
        let mut words = Vec::with_capacity(dim as usize);
        multiset_permutations(&letters, |w| {
            words.push(Word::from_vars(w.iter().copied()));
            Ok(())
        })?;
        let index: HashMap<Word, u32> =
            words.iter().enumerate().map(|(i, w)| (w.clone(), i as u32)).collect();
        let perms: Vec<(Perm, i64)> = Perm::all(spec.m).map(|p| {
            let s = p.sgn() as i64;
            (p, s)
        }).collect();

        let p = working_prime(domain);
        let mut rref = ModRref::with_history(words.len(), p);
        let mut generators = Vec::new();
        let mut rows = Vec::new();
        let mut independent = Vec::new();
        let mut seen: HashSet<Vec<(u32, i64)>> = HashSet::new();
        let mut instances = 0u64;
        let mut en = Enumerator {
            spec,
            perms,
            index: &index,
            cuts: Vec::new(),
        };
        let min_letters = spec.m - usize::from(spec.empty_p);
        if letters.len() >= min_letters {
            for w in &words {
                let mut emit = |g: &Generator, row: Vec<(u32, i64)>| -> Result<()> {
                    instances += 1;
                    let mut key = row.clone();
                    normalize(&mut key);
                    if seen.contains(&key) {
                        return Ok(());
                    }
                    if generators.len() as u64 >= caps.max_gens {
                        return Err(resource_limit(
                            format!("generators of {}", spec.multidegree_string()),
                            generators.len() as u128 + 1,
                            caps.max_gens as u128,
                        ));
                    }
                    let id = generators.len();
                    if rref.insert_from(&to_mod(&row, p), id) {
                        independent.push(id);
                    }
                    seen.insert(key);
                    generators.push(g.clone());
                    rows.push(row);
                    Ok(())
                };
                en.cuts(w.letters(), 0, 0, &mut emit)?;
            }
        }
        Ok(SpanBasis {
            spec: spec.clone(),
            domain,
            words,
            index,
            generators,
            rows,
            rref,
            independent,
            instances,
        })
    }

    pub fn spec(&self) -> &ComponentSpec {
        &self.spec
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn dimension(&self) -> usize {
        self.words.len()
    }

    pub fn words(&self) -> &[Word] {
        &self.words
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    /// Instances enumerated before removing scalar duplicates.
    pub fn instances(&self) -> u64 {
        self.instances
    }

    /// Rank of the generator rows modulo the working prime (equal to the rank
    /// over the exact field whenever [`certify_rank`](Self::certify_rank) succeeds).
    pub fn rank(&self) -> usize {
        self.rref.rank()
    }

    /// Generators that increased the rank when inserted, in insertion order.
    pub fn independent_generators(&self) -> &[usize] {
        &self.independent
    }

    /// Deterministic fingerprint of the reduced basis.
    pub fn basis_hash(&self) -> String {
        let rows: Vec<&SparseRow> = (0..self.rref.rank()).map(|i| self.rref.row(i)).collect();
        sha256_json(json!({
            "modulus": self.rref.modulus().to_string(),
            "pivots": self.rref.pivot_columns(),
            "rows": rows,
        }))
    }

    fn query_row(&self, q: &Poly) -> Result<Vec<(u32, Scalar)>> {
        self.domain.check_same(q.domain())?;
        let mut out = Vec::with_capacity(q.num_terms());
        for (w, c) in q.terms() {
            let col = self.index.get(w).ok_or_else(|| {
                invalid(format!(
                    "word {w} does not have multidegree {}",
                    self.spec.multidegree_string()
                ))
            })?;
            out.push((*col, c.clone()));
        }
        out.sort_by_key(|e| e.0);
        Ok(out)
    }

    fn query_mod(&self, q: &[(u32, Scalar)], p: u64) -> Option<SparseRow> {
        q.iter()
            .map(|(c, x)| match self.domain {
                Domain::Rational => rational_mod(&x.to_rational(), p).map(|v| (*c, v)),
                Domain::Prime(_) => x.residue_mod(p).map(|v| (*c, v)),
            })
            .collect::<Option<Vec<_>>>()
            .map(|v| v.into_iter().filter(|e| e.1 != 0).collect())
    }

    fn rebuild(&self, p: u64, history: bool) -> ModRref {
        let mut r = if history {
            ModRref::with_history(self.words.len(), p)
        } else {
            ModRref::new(self.words.len(), p)
        };
        for (i, row) in self.rows.iter().enumerate() {
            r.insert_from(&to_mod(row, p), i);
        }
        r
    }

    fn scalar_of(&self, r: &BigRational) -> Scalar {
        match self.domain {
            Domain::Rational => Scalar::from_rational(r.clone()),
            d => Scalar::from_rational_in(r, d).expect("residue lifts"),
        }
    }

    /// Decides membership of `q`, returning a certificate that has already
    /// been re-verified over the exact field.
    pub fn is_member(&self, q: &Poly) -> Result<MembershipCertificate> {
        if q.is_zero() {
            return Ok(MembershipCertificate::Member {
                combination: Vec::new(),
            });
        }
        let qrow = self.query_row(q)?;
        let p = self.rref.modulus();
        let qmod = self
            .query_mod(&qrow, p)
            .ok_or_else(|| Error::Verification("query has a denominator divisible by the working prime".into()))?;
        let mut rref = self.rref.clone();
        let residual = rref.residual(&qmod);
        let cert = if residual.is_empty() {
            self.positive_certificate(&mut rref, &qrow, &qmod)?
        } else {
            self.negative_certificate(&rref, residual[0].0, &qrow)?
        };
        if !cert.verify(self, q)? {
            return Err(Error::Verification(
                "membership certificate failed exact re-verification".into(),
            ));
        }
        Ok(cert)
    }

    fn positive_certificate(
        &self,
        rref: &mut ModRref,
        qrow: &[(u32, Scalar)],
        qmod: &SparseRow,
    ) -> Result<MembershipCertificate> {
        let coords = rref.coordinates(qmod).expect("query lies in the row space");
        let comb = rref.source_combination(&coords);
        if let Domain::Prime(_) = self.domain {
            return Ok(MembershipCertificate::Member {
                combination: comb
                    .into_iter()
                    .map(|(g, x)| (self.generators[g].clone(), residue_scalar(x, self.domain)))
                    .collect(),
            });
        }
        let support: Vec<usize> = self.independent.clone();
        let pos: HashMap<usize, usize> = support.iter().enumerate().map(|(i, &g)| (g, i)).collect();
        let first = {
            let mut v = vec![0u64; support.len()];
            for (g, x) in &comb {
                v[pos[g]] = *x;
            }
            v
        };
        let mut first = Some(first);
        let target: BTreeMap<u32, BigRational> =
            qrow.iter().map(|(c, x)| (*c, x.to_rational())).collect();
        let lambda = solve_rational(
            |prime| {
                if let Some(v) = first.take() {
                    return Some(v);
                }
                let mut r = self.rebuild(prime, true);
                if r.rank() != support.len() {
                    return None;
                }
                let qm = self.query_mod(qrow, prime)?;
                let coords = r.coordinates(&qm)?;
                let mut v = vec![0u64; support.len()];
                for (g, x) in r.source_combination(&coords) {
                    v[*pos.get(&g)?] = x;
                }
                Some(v)
            },
            |cand| self.combination_equals(&support, cand, &target),
            8,
        )?;
        Ok(MembershipCertificate::Member {
            combination: support
                .iter()
                .zip(lambda)
                .filter(|(_, l)| !l.is_zero())
                .map(|(&g, l)| (self.generators[g].clone(), self.scalar_of(&l)))
                .collect(),
        })
    }

    fn combination_equals(
        &self,
        support: &[usize],
        lambda: &[BigRational],
        target: &BTreeMap<u32, BigRational>,
    ) -> bool {
        let mut acc: BTreeMap<u32, BigRational> = BTreeMap::new();
        for (&g, l) in support.iter().zip(lambda) {
            if l.is_zero() {
                continue;
            }
            for &(c, x) in &self.rows[g] {
                let e = acc.entry(c).or_insert_with(BigRational::zero);
                *e += l * BigRational::from_integer(BigInt::from(x));
            }
        }
        acc.retain(|_, v| !v.is_zero());
        &acc == target
    }

    fn negative_certificate(
        &self,
        rref: &ModRref,
        col: u32,
        qrow: &[(u32, Scalar)],
    ) -> Result<MembershipCertificate> {
        let phi = rref.dual_functional(col);
        if let Domain::Prime(_) = self.domain {
            let functional: Vec<(Word, Scalar)> = phi
                .iter()
                .map(|&(c, x)| (self.words[c as usize].clone(), residue_scalar(x, self.domain)))
                .collect();
            let value = eval_functional(&functional_map(self, &functional), qrow);
            return Ok(MembershipCertificate::NonMember { functional, value });
        }
        let support: Vec<u32> = phi.iter().map(|e| e.0).collect();
        let mut first = Some(phi.iter().map(|e| e.1).collect::<Vec<u64>>());
        let values = solve_rational(
            |prime| {
                if let Some(v) = first.take() {
                    return Some(v);
                }
                let r = self.rebuild(prime, false);
                if r.pivot_columns().len() != rref.rank() || r.is_pivot(col) {
                    return None;
                }
                let phi = r.dual_functional(col);
                (phi.iter().map(|e| e.0).collect::<Vec<_>>() == support)
                    .then(|| phi.iter().map(|e| e.1).collect())
            },
            |cand| {
                let f: HashMap<u32, BigRational> =
                    support.iter().copied().zip(cand.iter().cloned()).collect();
                self.rows.iter().all(|row| {
                    row.iter()
                        .filter_map(|(c, x)| f.get(c).map(|v| v * BigRational::from_integer(BigInt::from(*x))))
                        .fold(BigRational::zero(), |a, b| a + b)
                        .is_zero()
                })
            },
            8,
        )?;
        let functional: Vec<(Word, Scalar)> = support
            .iter()
            .zip(values)
            .filter(|(_, v)| !v.is_zero())
            .map(|(&c, v)| (self.words[c as usize].clone(), self.scalar_of(&v)))
            .collect();
        let value = eval_functional(&functional_map(self, &functional), qrow);
        Ok(MembershipCertificate::NonMember { functional, value })
    }

    /// Proves `rank` is the rank over the exact field: for each non-pivot
    /// column the dual functional is lifted and checked to annihilate every
    /// generator, bounding the exact rank from above. Returns `false` (not
    /// certified) when the work would exceed `budget` operations or a lift fails.
    pub fn certify_rank(&self, budget: u64) -> bool {
        let free: Vec<u32> = (0..self.words.len() as u32)
            .filter(|&c| !self.rref.is_pivot(c))
            .collect();
        if self.domain != Domain::Rational {
            return true;
        }
        let nnz: u64 = self.rows.iter().map(|r| r.len() as u64).sum();
        if (free.len() as u64).saturating_mul(nnz) > budget {
            return false;
        }
        let p = BigInt::from(self.rref.modulus());
        for &c in &free {
            let phi = self.rref.dual_functional(c);
            let mut vals: HashMap<u32, BigRational> = HashMap::new();
            for (col, x) in phi {
                match rational_reconstruct(&BigInt::from(x), &p) {
                    Some(v) => vals.insert(col, v),
                    None => return false,
                };
            }
            // Clear denominators so the check runs in machine integers.
            let den = vals.values().fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
            let mut ints: HashMap<u32, i128> = HashMap::new();
            for (col, v) in vals {
                match (v * BigRational::from_integer(den.clone())).to_integer().to_i128() {
                    Some(i) => ints.insert(col, i),
                    None => return false,
                };
            }
            for row in &self.rows {
                let mut s: i128 = 0;
                for (col, x) in row {
                    if let Some(v) = ints.get(col) {
                        match v.checked_mul(*x as i128).and_then(|t| s.checked_add(t)) {
                            Some(t) => s = t,
                            None => return false,
                        }
                    }
                }
                if s != 0 {
                    return false;
                }
            }
        }
        true
    }
}

fn functional_map(basis: &SpanBasis, functional: &[(Word, Scalar)]) -> HashMap<u32, Scalar> {
    functional
        .iter()
        .map(|(w, x)| (basis.index[w], x.clone()))
        .collect()
}

fn eval_functional(f: &HashMap<u32, Scalar>, row: &[(u32, Scalar)]) -> Scalar {
    let domain = row.first().map_or(Domain::Rational, |e| e.1.domain());
    let mut s = Scalar::zero(domain);
    for (c, x) in row {
        if let Some(v) = f.get(c) {
            s = &s + &(v * x);
        }
    }
    s
}

fn residue_scalar(x: u64, domain: Domain) -> Scalar {
    Scalar::from_bigint(BigInt::from(x), domain)
}

/// Witness for a membership decision.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum MembershipCertificate {
    /// `q = Σ c·g` over the listed generators.
    Member { combination: Vec<(Generator, Scalar)> },
    /// A functional vanishing on every generator with `functional(q) = value ≠ 0`.
    NonMember {
        functional: Vec<(Word, Scalar)>,
        value: Scalar,
    },
}

impl MembershipCertificate {
    pub fn is_member(&self) -> bool {
        matches!(self, MembershipCertificate::Member { .. })
    }

    pub fn hash(&self) -> String {
        sha256_json(self)
    }

    /// Re-checks the certificate against `basis` and `q` by exact arithmetic.
    pub fn verify(&self, basis: &SpanBasis, q: &Poly) -> Result<bool> {
        match self {
            MembershipCertificate::Member { combination } => {
                let mut sum = Poly::zero(basis.domain);
                for (g, c) in combination {
                    sum = &sum + &g.poly(basis.domain).scale(c);
                }
                Ok(&sum == q)
            }
            MembershipCertificate::NonMember { functional, value } => {
                let f = functional_map(basis, functional);
                let qrow = basis.query_row(q)?;
                if value.is_zero() || eval_functional(&f, &qrow) != *value {
                    return Ok(false);
                }
                let domain = basis.domain;
                for row in &basis.rows {
                    let r: Vec<(u32, Scalar)> =
                        row.iter().map(|&(c, x)| (c, Scalar::from_i64(x, domain))).collect();
                    if !eval_functional(&f, &r).is_zero() {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
        }
    }
}

/// Membership result for one multihomogeneous component.
#[derive(Debug, Clone, Serialize)]
pub struct ComponentOutcome {
    pub multidegree: String,
    pub component_dim: usize,
    pub generators: usize,
    pub span_rank: usize,
    pub rank_certified: bool,
    pub certificate: MembershipCertificate,
}

/// Membership of every multihomogeneous component of a polynomial.
#[derive(Debug, Clone, Serialize)]
pub struct MembershipOutcome {
    pub m: usize,
    pub member: bool,
    pub components: Vec<ComponentOutcome>,
}

impl MembershipOutcome {
    pub fn certificate_hash(&self) -> String {
        let certs: Vec<&MembershipCertificate> =
            self.components.iter().map(|c| &c.certificate).collect();
        sha256_json(certs)
    }

    pub fn payload(&self) -> Value {
        json!(self
            .components
            .iter()
            .map(|c| json!({
                "multidegree": c.multidegree,
                "component_dim": c.component_dim,
                "generators": c.generators,
                "span_rank": c.span_rank,
                "rank_certified": c.rank_certified,
                "member": c.certificate.is_member(),
                "certificate_hash": c.certificate.hash(),
            }))
            .collect::<Vec<_>>())
    }
}

const RANK_BUDGET: u64 = 50_000_000;

/// Decides whether `q` lies in `CAP_m`, component by component.
pub fn membership(q: &Poly, m: usize, opts: &SpanOptions) -> Result<MembershipOutcome> {
    let mut components = Vec::new();
    let mut member = true;
    for (md, part) in q.homogeneous_components() {
        let spec = ComponentSpec::new(m, md)?.with_options(opts);
        let basis = SpanBasis::build(&spec, &opts.caps, q.domain())?;
        let certificate = basis.is_member(&part)?;
        member &= certificate.is_member();
        components.push(ComponentOutcome {
            multidegree: spec.multidegree_string(),
            component_dim: basis.dimension(),
            generators: basis.generators().len(),
            span_rank: basis.rank(),
            rank_certified: basis.certify_rank(RANK_BUDGET),
            certificate,
        });
    }
    Ok(MembershipOutcome {
        m,
        member,
        components,
    })
}

/// `f ≡ g` modulo `CAP_m`.
pub fn congruent(f: &Poly, g: &Poly, m: usize, opts: &SpanOptions) -> Result<MembershipOutcome> {
    membership(&f.try_sub(g)?, m, opts)
}

fn xs(n: usize) -> Vec<Var> {
    (1..=n as u32).map(Var::x).collect()
}

fn ys(n: usize) -> Vec<Var> {
    (1..=n as u32).map(Var::y).collect()
}

fn require_doubly_alternating(f: &Poly, n: usize) -> Result<()> {
    if !alternation_report(f, &xs(n)).alternating() || !alternation_report(f, &ys(n)).alternating() {
        return Err(invalid(format!(
            "expected a polynomial alternating in x1..x{n} and in y1..y{n}"
        )));
    }
    Ok(())
}

/// Runs `body`; a resource-limit error becomes a `skipped-cap` report.
fn capped(
    report: VerificationReport,
    start: Instant,
    body: impl FnOnce(VerificationReport) -> Result<VerificationReport>,
) -> Result<VerificationReport> {
    match body(report.clone()) {
        Ok(r) => Ok(r.finish(start)),
        Err(Error::ResourceLimit {
            what,
            attempted,
            cap,
        }) => Ok(report
            .verdict(Verdict::SkippedCap)
            .put("skipped", what)
            .put("attempted", attempted.to_string())
            .put("cap", cap.to_string())
            .finish(start)),
        Err(e) => Err(e),
    }
}

/// The default input `(x1x2 − x2x1)·x3` (n = 2) or `x1·x2` (n = 1) style:
/// `Capl_n(x;1..1)·x_{n+1}`.
pub fn default_zubrilin4_input(n: usize) -> Result<Poly> {
    let d = Domain::Rational;
    let ps: Vec<Word> = xs(n).into_iter().map(Word::letter).collect();
    let qs = vec![Word::empty(); n];
    Ok(&capelli_words(&ps, &qs, d) * &Poly::var(Var::x(n as u32 + 1), d))
}

/// `Σ_j (−1)^j δ_{j,z}(f(x_1..x_n, z^{n−j}x_{n+1}))` lies in `CAP_{n+1}`, and
/// flipping the sign of the `j = 0` summand leaves it.
pub fn verify_zubrilin4(n: usize, f: &Poly, opts: &SpanOptions) -> Result<VerificationReport> {
    let start = Instant::now();
    let base = VerificationReport::new("zubrilin4")
        .param("n", n)
        .param("f", f.to_string());
    let q = zubrilin_sum_a(f, n)?;
    capped(base, start, |r| {
        let out = membership(&q, n + 1, opts)?;
        let z = Poly::var(Var::z(), f.domain());
        let last = Var::x(n as u32 + 1);
        let first_term =
            f.substitute(&Substitution::new().with(last, &z.pow(n as u32) * &Poly::var(last, f.domain())));
        let perturbed = &q - &first_term.scale_i64(2);
        let neg = membership(&perturbed, n + 1, opts)?;
        Ok(r.put("sum_terms", q.num_terms())
            .put("components", out.payload())
            .put("negative_control_member", neg.member)
            .verdict(if out.member && !neg.member { Verdict::Pass } else { Verdict::Fail })
            .with_hash(out.certificate_hash()))
    })
}

/// Which bridge letters of the double Capelli polynomial survive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Len2Tier {
    /// Every t specialized to 1: `Capl_n(x;1)·Capl_n(y;1)`.
    Fast,
    /// Outer t1, t2, t3 kept, inner bridges specialized to 1.
    WithTs,
}

pub fn len2_input(n: usize, tier: Len2Tier) -> Result<Poly> {
    let f = double_capelli(n, Domain::Rational)?;
    let (tx, ty) = double_capelli_bridges(n);
    let mut drop: Vec<Var> = tx.into_iter().chain(ty).collect();
    if tier == Len2Tier::Fast {
        drop.extend([Var::t(1), Var::t(2), Var::t(3)]);
    }
    Ok(specialize_to_unit(&f, &drop))
}

/// Exchanges `x_i ↔ y_i` for `i ≤ n`.
pub fn swap_xy(f: &Poly, n: usize) -> Poly {
    let mut map = BTreeMap::new();
    for i in 1..=n as u32 {
        map.insert(Var::x(i), Var::y(i));
        map.insert(Var::y(i), Var::x(i));
    }
    f.rename(&map)
}

/// `δ^{(x,n)}_{k,h}(f) ≡ δ^{(y,n)}_{k,h}(f)` and `f(x,y) ≡ f(y,x)` modulo
/// `CAP_{n+1}` for the (specialized) double Capelli polynomial.
pub fn verify_len2(
    n: usize,
    tier: Len2Tier,
    k: usize,
    h: &Poly,
    opts: &SpanOptions,
) -> Result<VerificationReport> {
    let start = Instant::now();
    let f = len2_input(n, tier)?;
    let base = VerificationReport::new("len2")
        .param("n", n)
        .param("tier", tier)
        .param("k", k)
        .param("h", h.to_string());
    let dx = delta(&f, &DeltaSpec::x(n, k, h.clone())?)?;
    let dy = delta(&f, &DeltaSpec::y(n, k, h.clone())?)?;
    capped(base, start, |r| {
        let swap = congruent(&f, &swap_xy(&f, n), n + 1, opts)?;
        let out = congruent(&dx, &dy, n + 1, opts)?;
        Ok(r.put("f_terms", f.num_terms())
            .put("components", out.payload())
            .put("swap_components", swap.payload())
            .verdict(if out.member && swap.member { Verdict::Pass } else { Verdict::Fail })
            .with_hash(sha256_json([out.certificate_hash(), swap.certificate_hash()])))
    })
}

/// Default doubly alternating input: `Capl_n(x;1)·Capl_n(y;1)`.
pub fn default_doubly_alternating(n: usize) -> Result<Poly> {
    len2_input(n, Len2Tier::Fast)
}

/// The three commutation relations of δ-operators on a doubly alternating `f`:
/// (i) x/x and (iii) y/y modulo `CAP_{n+1}`, (ii) x/y as an exact equality.
pub fn verify_delta_commute(
    n: usize,
    f: &Poly,
    k: usize,
    l: usize,
    h1: &Poly,
    h2: &Poly,
    opts: &SpanOptions,
) -> Result<VerificationReport> {
    let start = Instant::now();
    require_doubly_alternating(f, n)?;
    let base = VerificationReport::new("delta-commute")
        .param("n", n)
        .param("f", f.to_string())
        .param("k", k)
        .param("l", l)
        .param("h1", h1.to_string())
        .param("h2", h2.to_string());
    let dx = |kk, h: &Poly| DeltaSpec::x(n, kk, h.clone());
    let dy = |kk, h: &Poly| DeltaSpec::y(n, kk, h.clone());
    let xx_a = delta(&delta(f, &dx(l, h2)?)?, &dx(k, h1)?)?;
    let xx_b = delta(&delta(f, &dx(k, h1)?)?, &dx(l, h2)?)?;
    let yy_a = delta(&delta(f, &dy(l, h2)?)?, &dy(k, h1)?)?;
    let yy_b = delta(&delta(f, &dy(k, h1)?)?, &dy(l, h2)?)?;
    let xy_a = delta(&delta(f, &dy(l, h2)?)?, &dx(k, h1)?)?;
    let xy_b = delta(&delta(f, &dx(k, h1)?)?, &dy(l, h2)?)?;
    let mixed_equal = xy_a == xy_b;
    // Coefficient sums vanish on every generator, so adding one word of (i)
    // must leave the ideal.
    let lead = xx_a
        .terms()
        .next()
        .map(|(w, _)| Poly::word(w.clone(), f.domain()))
        .ok_or_else(|| invalid("δ-composite vanished identically"))?;
    let broken = &xx_a + &lead;
    capped(base, start, |r| {
        let i = congruent(&xx_a, &xx_b, n + 1, opts)?;
        let iii = congruent(&yy_a, &yy_b, n + 1, opts)?;
        let neg = congruent(&broken, &xx_b, n + 1, opts)?;
        let ok = i.member && mixed_equal && iii.member && !neg.member;
        Ok(r.put("xx_components", i.payload())
            .put("xy_exact_equality", mixed_equal)
            .put("yy_components", iii.payload())
            .put("negative_control_member", neg.member)
            .verdict(if ok { Verdict::Pass } else { Verdict::Fail })
            .with_hash(sha256_json([i.certificate_hash(), iii.certificate_hash()])))
    })
}

/// `Σ_k (−1)^k h^{n−k} δ^{(x,n)}_{k,h}(f) ∈ CAP_{n+1}` for doubly alternating `f`.
pub fn verify_integrality_relation(
    n: usize,
    f: &Poly,
    h: &Poly,
    opts: &SpanOptions,
) -> Result<VerificationReport> {
    let start = Instant::now();
    require_doubly_alternating(f, n)?;
    relation_report("sof1", n, f, h, opts, start)
}

/// `Σ_k (−1)^k h^{n−k} δ_{k,h}(g) ∈ CAP_{n+1}` for `g` alternating in `x_1..x_n`.
pub fn verify_zubrilin2(n: usize, g: &Poly, h: &Poly, opts: &SpanOptions) -> Result<VerificationReport> {
    let start = Instant::now();
    if !alternation_report(g, &xs(n)).alternating() {
        return Err(invalid(format!("expected a polynomial alternating in x1..x{n}")));
    }
    relation_report("zubrilin2", n, g, h, opts, start)
}

fn relation_report(
    check: &str,
    n: usize,
    f: &Poly,
    h: &Poly,
    opts: &SpanOptions,
    start: Instant,
) -> Result<VerificationReport> {
    let q = signed_delta_sum(f, VarKind::X, n, h)?;
    let base = VerificationReport::new(check)
        .param("n", n)
        .param("f", f.to_string())
        .param("h", h.to_string());
    capped(base, start, |r| {
        let out = membership(&q, n + 1, opts)?;
        Ok(r.put("relation_terms", q.num_terms())
            .put("components", out.payload())
            .verdict(if out.member { Verdict::Pass } else { Verdict::Fail })
            .with_hash(out.certificate_hash()))
    })
}

/// Default input for the alternating-in-x relation: `t1·Capl_n(x;1)`.
pub fn default_zubrilin2_input(n: usize) -> Poly {
    let d = Domain::Rational;
    let ps: Vec<Word> = xs(n).into_iter().map(Word::letter).collect();
    &Poly::var(Var::t(1), d) * &capelli_words(&ps, &vec![Word::empty(); n], d)
}

/// Default doubly alternating input whose words start with a y-letter:
/// `Capl_n(y;1)·Capl_n(x;1)`.
pub fn default_sof1_input(n: usize) -> Result<Poly> {
    Ok(swap_xy(&default_doubly_alternating(n)?, n))
}
