//! Finite-dimensional algebras given by structure constants, evaluation of
//! polynomials in them, and the identity, codimension and integrality checks
//! built on evaluation.

use std::collections::BTreeMap;
use std::fmt;
use std::time::Instant;

use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{invalid, resource_limit, Error, Result};
use crate::freealg::{alternation_report, capelli, Poly, Var, Word};
use crate::linalg::{exact_rank_rational, ModRref};
use crate::report::{Verdict, VerificationReport};
use crate::scalar::{Domain, Scalar};
use crate::symgroup::Perm;
use crate::delta::{delta, DeltaSpec};

/// A coordinate vector over an algebra basis.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Element(Vec<Scalar>);

impl Element {
    pub fn zero(dim: usize, domain: Domain) -> Element {
        Element(vec![Scalar::zero(domain); dim])
    }

    pub fn from_coords(coords: Vec<Scalar>) -> Element {
        Element(coords)
    }

    pub fn coords(&self) -> &[Scalar] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Scalar::is_zero)
    }

    pub fn add(&self, other: &Element) -> Element {
        Element(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &Element) -> Element {
        Element(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn scale(&self, c: &Scalar) -> Element {
        Element(self.0.iter().map(|a| a * c).collect())
    }
}

impl Serialize for Element {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(self.0.iter().map(|c| c.to_string()))
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(Scalar::to_string).collect();
        write!(f, "[{}]", parts.join(", "))
    }
}

/// An associative algebra with basis `e_0..e_{k−1}` and `e_i e_j = Σ c_{ij}^l e_l`.
#[derive(Debug, Clone)]
pub struct FiniteAlgebra {
    domain: Domain,
    labels: Vec<String>,
    table: Vec<Vec<Vec<(usize, Scalar)>>>,
    unit: Option<Element>,
}

/// On-disk form: `{field, dim, basis, structure_constants: [[i, j, l, "c"]], unit}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AlgebraFile {
    #[serde(default = "default_field")]
    pub field: String,
    pub dim: usize,
    #[serde(default)]
    pub basis: Vec<String>,
    pub structure_constants: Vec<(usize, usize, usize, String)>,
    #[serde(default)]
    pub unit: Option<Vec<String>>,
}

fn default_field() -> String {
    "Q".into()
}

pub const ASSOCIATIVITY_CAP: usize = 64;

impl FiniteAlgebra {
    /// Builds from sparse structure constants `(i, j, l, c)`, checking
    /// associativity on all basis triples and the unit if one is given.
    pub fn new(
        domain: Domain,
        labels: Vec<String>,
        constants: impl IntoIterator<Item = (usize, usize, usize, Scalar)>,
        unit: Option<Vec<Scalar>>,
    ) -> Result<FiniteAlgebra> {
        let k = labels.len();
        if k == 0 {
            return Err(invalid("algebra must have positive dimension"));
        }
        if k > ASSOCIATIVITY_CAP {
            return Err(resource_limit("algebra dimension", k as u128, ASSOCIATIVITY_CAP as u128));
        }
        let mut dense = vec![vec![vec![Scalar::zero(domain); k]; k]; k];
        for (i, j, l, c) in constants {
            if i >= k || j >= k || l >= k {
                return Err(invalid(format!("structure constant index ({i}, {j}, {l}) out of range")));
            }
            domain.check_same(c.domain())?;
            dense[i][j][l] = &dense[i][j][l] + &c;
        }
        let table = dense
            .into_iter()
            .map(|row| {
                row.into_iter()
                    .map(|v| v.into_iter().enumerate().filter(|e| !e.1.is_zero()).collect())
                    .collect()
            })
            .collect();
        let mut alg = FiniteAlgebra {
            domain,
            labels,
            table,
            unit: None,
        };
        for i in 0..k {
            for j in 0..k {
                for l in 0..k {
                    let (a, b, c) = (alg.basis(i), alg.basis(j), alg.basis(l));
                    if alg.mul(&alg.mul(&a, &b), &c) != alg.mul(&a, &alg.mul(&b, &c)) {
                        return Err(invalid(format!(
                            "structure constants are not associative at ({}, {}, {})",
                            alg.labels[i], alg.labels[j], alg.labels[l]
                        )));
                    }
                }
            }
        }
        if let Some(u) = unit {
            if u.len() != k {
                return Err(invalid("unit has the wrong length"));
            }
            let u = Element(u);
            for i in 0..k {
                let e = alg.basis(i);
                if alg.mul(&u, &e) != e || alg.mul(&e, &u) != e {
                    return Err(invalid(format!("claimed unit fails on {}", alg.labels[i])));
                }
            }
            alg.unit = Some(u);
        }
        Ok(alg)
    }

    pub fn from_file(file: &AlgebraFile) -> Result<FiniteAlgebra> {
        let domain = parse_field(&file.field)?;
        let labels = if file.basis.is_empty() {
            (1..=file.dim).map(|i| format!("e{i}")).collect()
        } else if file.basis.len() == file.dim {
            file.basis.clone()
        } else {
            return Err(invalid("basis length differs from dim"));
        };
        let constants = file
            .structure_constants
            .iter()
            .map(|(i, j, l, c)| Ok((*i, *j, *l, Scalar::parse(c, domain)?)))
            .collect::<Result<Vec<_>>>()?;
        let unit = file
            .unit
            .as_ref()
            .map(|u| u.iter().map(|c| Scalar::parse(c, domain)).collect::<Result<Vec<_>>>())
            .transpose()?;
        FiniteAlgebra::new(domain, labels, constants, unit)
    }

    pub fn from_json(text: &str) -> Result<FiniteAlgebra> {
        let file: AlgebraFile = serde_json::from_str(text).map_err(|e| Error::Parse {
            offset: e.column(),
            message: e.to_string(),
        })?;
        FiniteAlgebra::from_file(&file)
    }

    pub fn to_file(&self) -> AlgebraFile {
        let mut constants = Vec::new();
        for (i, row) in self.table.iter().enumerate() {
            for (j, prods) in row.iter().enumerate() {
                for (l, c) in prods {
                    constants.push((i, j, *l, c.to_string()));
                }
            }
        }
        AlgebraFile {
            field: self.domain.to_string(),
            dim: self.dim(),
            basis: self.labels.clone(),
            structure_constants: constants,
            unit: self.unit.as_ref().map(|u| u.0.iter().map(Scalar::to_string).collect()),
        }
    }

    /// `M_n` with basis `E_ij` in row-major order.
    pub fn matrix(n: usize, domain: Domain) -> Result<FiniteAlgebra> {
        let idx = |i: usize, j: usize| i * n + j;
        let labels = (0..n * n).map(|a| format!("E{}{}", a / n + 1, a % n + 1)).collect();
        let mut c = Vec::new();
        for i in 0..n {
            for j in 0..n {
                for l in 0..n {
                    c.push((idx(i, j), idx(j, l), idx(i, l), Scalar::one(domain)));
                }
            }
        }
        let unit = (0..n * n)
            .map(|a| if a / n == a % n { Scalar::one(domain) } else { Scalar::zero(domain) })
            .collect();
        FiniteAlgebra::new(domain, labels, c, Some(unit))
    }

    /// Upper triangular `n × n` matrices.
    pub fn upper_triangular(n: usize, domain: Domain) -> Result<FiniteAlgebra> {
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i..n).map(move |j| (i, j))).collect();
        let pos = |i: usize, j: usize| pairs.iter().position(|&p| p == (i, j)).expect("upper pair");
        let labels = pairs.iter().map(|(i, j)| format!("E{}{}", i + 1, j + 1)).collect();
        let mut c = Vec::new();
        for &(i, j) in &pairs {
            for l in j..n {
                c.push((pos(i, j), pos(j, l), pos(i, l), Scalar::one(domain)));
            }
        }
        let unit = pairs
            .iter()
            .map(|(i, j)| if i == j { Scalar::one(domain) } else { Scalar::zero(domain) })
            .collect();
        FiniteAlgebra::new(domain, labels, c, Some(unit))
    }

    /// The Grassmann algebra on `g ≤ 4` generators, basis indexed by subsets.
    pub fn grassmann(g: usize, domain: Domain) -> Result<FiniteAlgebra> {
        if g > 4 {
            return Err(resource_limit("Grassmann generators", g as u128, 4));
        }
        let k = 1usize << g;
        let labels = (0..k)
            .map(|s| {
                if s == 0 {
                    "1".to_string()
                } else {
                    (0..g).filter(|b| s >> b & 1 == 1).map(|b| format!("e{}", b + 1)).collect::<Vec<_>>().join("")
                }
            })
            .collect();
        let mut c = Vec::new();
        for s in 0..k {
            for t in 0..k {
                if s & t != 0 {
                    continue;
                }
                // Sign of merging the increasing lists s and t.
                let swaps: u32 = (0..g).filter(|b| t >> b & 1 == 1).map(|b| (s >> (b + 1)).count_ones()).sum();
                let sign = if swaps % 2 == 0 { 1 } else { -1 };
                c.push((s, t, s | t, Scalar::from_i64(sign, domain)));
            }
        }
        let unit = (0..k).map(|s| if s == 0 { Scalar::one(domain) } else { Scalar::zero(domain) }).collect();
        FiniteAlgebra::new(domain, labels, c, Some(unit))
    }

    /// `F[t]/(t^k)`.
    pub fn truncated_poly(k: usize, domain: Domain) -> Result<FiniteAlgebra> {
        let labels = (0..k).map(|i| format!("t^{i}")).collect();
        let mut c = Vec::new();
        for i in 0..k {
            for j in 0..k - i {
                c.push((i, j, i + j, Scalar::one(domain)));
            }
        }
        let unit = (0..k).map(|i| if i == 0 { Scalar::one(domain) } else { Scalar::zero(domain) }).collect();
        FiniteAlgebra::new(domain, labels, c, Some(unit))
    }

    /// The ground field as a 1-dimensional algebra.
    pub fn field(domain: Domain) -> FiniteAlgebra {
        FiniteAlgebra::truncated_poly(1, domain).expect("the field is an algebra")
    }

    /// The same algebra in the basis `f_i = Σ_j P[i][j] e_j`.
    pub fn change_basis(&self, p: &[Vec<Scalar>]) -> Result<FiniteAlgebra> {
        let k = self.dim();
        let inv = invert(p, self.domain).ok_or_else(|| invalid("change of basis is singular"))?;
        let f: Vec<Element> = p.iter().map(|row| Element(row.clone())).collect();
        let to_f = |v: &Element| -> Vec<Scalar> {
            (0..k)
                .map(|b| (0..k).fold(Scalar::zero(self.domain), |acc, a| &acc + &(&v.0[a] * &inv[a][b])))
                .collect()
        };
        let mut constants = Vec::new();
        for a in 0..k {
            for b in 0..k {
                for (l, c) in to_f(&self.mul(&f[a], &f[b])).into_iter().enumerate() {
                    if !c.is_zero() {
                        constants.push((a, b, l, c));
                    }
                }
            }
        }
        let unit = self.unit.as_ref().map(to_f);
        let labels = (1..=k).map(|i| format!("f{i}")).collect();
        FiniteAlgebra::new(self.domain, labels, constants, unit)
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn unit(&self) -> Option<&Element> {
        self.unit.as_ref()
    }

    pub fn basis(&self, i: usize) -> Element {
        let mut v = Element::zero(self.dim(), self.domain);
        v.0[i] = Scalar::one(self.domain);
        v
    }

    pub fn zero(&self) -> Element {
        Element::zero(self.dim(), self.domain)
    }

    pub fn element(&self, coords: &[i64]) -> Result<Element> {
        if coords.len() != self.dim() {
            return Err(invalid("coordinate vector has the wrong length"));
        }
        Ok(Element(coords.iter().map(|&c| Scalar::from_i64(c, self.domain)).collect()))
    }

    pub fn mul(&self, a: &Element, b: &Element) -> Element {
        let mut out = self.zero();
        for (i, x) in a.0.iter().enumerate().filter(|e| !e.1.is_zero()) {
            for (j, y) in b.0.iter().enumerate().filter(|e| !e.1.is_zero()) {
                let xy = x * y;
                for (l, c) in &self.table[i][j] {
                    out.0[*l] = &out.0[*l] + &(&xy * c);
                }
            }
        }
        out
    }

    pub fn pow(&self, a: &Element, k: usize) -> Result<Element> {
        let mut out = match &self.unit {
            Some(u) => u.clone(),
            None if k == 0 => return Err(invalid("a^0 needs a unital algebra")),
            None => a.clone(),
        };
        let start = usize::from(self.unit.is_none());
        for _ in start..k {
            out = self.mul(&out, a);
        }
        Ok(out)
    }

    /// Matrix of left multiplication by `a`: column `j` holds `a·e_j`.
    pub fn left_regular(&self, a: &Element) -> Vec<Vec<Scalar>> {
        let k = self.dim();
        let cols: Vec<Element> = (0..k).map(|j| self.mul(a, &self.basis(j))).collect();
        (0..k).map(|i| (0..k).map(|j| cols[j].0[i].clone()).collect()).collect()
    }
}

fn parse_field(s: &str) -> Result<Domain> {
    let t = s.trim();
    if t == "Q" {
        return Ok(Domain::Rational);
    }
    let p = t
        .strip_prefix("F_")
        .and_then(|p| p.parse::<u64>().ok())
        .ok_or_else(|| invalid(format!("unknown field {s:?}; expected Q or F_p")))?;
    Domain::prime(p)
}

fn invert(m: &[Vec<Scalar>], domain: Domain) -> Option<Vec<Vec<Scalar>>> {
    let k = m.len();
    let mut a: Vec<Vec<Scalar>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..k).map(|j| if i == j { Scalar::one(domain) } else { Scalar::zero(domain) }));
            r
        })
        .collect();
    for col in 0..k {
        let piv = (col..k).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, piv);
        let inv = a[col][col].inv()?;
        a[col] = a[col].iter().map(|x| x * &inv).collect();
        for r in 0..k {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                let pivot_row = a[col].clone();
                for (x, y) in a[r].iter_mut().zip(&pivot_row) {
                    *x = &*x - &(&f * y);
                }
            }
        }
    }
    Some(a.into_iter().map(|r| r[k..].to_vec()).collect())
}

/// Evaluates `p` with each variable replaced by an element.
pub fn evaluate(p: &Poly, assign: &BTreeMap<Var, Element>, alg: &FiniteAlgebra) -> Result<Element> {
    alg.domain.check_same(p.domain())?;
    let mut out = alg.zero();
    for (w, c) in p.terms() {
        let mut acc: Option<Element> = None;
        for v in w.letters() {
            let e = assign
                .get(v)
                .ok_or_else(|| invalid(format!("variable {v} is not assigned")))?;
            acc = Some(match acc {
                None => e.clone(),
                Some(a) => alg.mul(&a, e),
            });
        }
        let value = match acc {
            Some(a) => a,
            None => alg
                .unit
                .clone()
                .ok_or_else(|| invalid("constant term needs a unital algebra"))?,
        };
        out = out.add(&value.scale(c));
    }
    Ok(out)
}

/// Outcome of an identity test.
#[derive(Debug, Clone, Serialize)]
pub struct EvalReport {
    pub identity: bool,
    pub mode: EvalMode,
    pub assignments_checked: u64,
    /// Basis labels for each variable, and the nonzero value they produce.
    pub witness: Option<Witness>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Witness {
    pub assignment: BTreeMap<String, String>,
    pub value: Element,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum EvalMode {
    /// Every basis tuple; complete for multilinear polynomials.
    Exhaustive,
    /// Distinct increasing basis tuples on the alternating variables.
    AlternationPruned,
    /// More alternating variables than the dimension; no evaluation needed.
    Counting,
    /// Random elements; can only refute.
    Randomized,
}

pub const EXHAUSTIVE_CAP: u128 = 50_000_000;

fn multilinear_vars(p: &Poly) -> Result<Vec<Var>> {
    let vars: Vec<Var> = p.vars().into_iter().collect();
    if !p.is_multilinear_in(&vars) {
        return Err(invalid("polynomial is not multilinear"));
    }
    Ok(vars)
}

/// Evaluates every word of a multilinear polynomial on basis elements,
/// sharing prefix products along the enumeration.
struct BasisEvaluator<'a> {
    alg: &'a FiniteAlgebra,
    words: Vec<(Vec<usize>, Scalar)>,
}

impl<'a> BasisEvaluator<'a> {
    fn new(p: &Poly, vars: &[Var], alg: &'a FiniteAlgebra) -> BasisEvaluator<'a> {
        let pos: BTreeMap<Var, usize> = vars.iter().enumerate().map(|(i, v)| (*v, i)).collect();
        let words = p
            .terms()
            .map(|(w, c)| (w.letters().iter().map(|v| pos[v]).collect(), c.clone()))
            .collect();
        BasisEvaluator { alg, words }
    }

    fn eval(&self, tuple: &[usize]) -> Element {
        let mut out = self.alg.zero();
        for (w, c) in &self.words {
            // A product of basis elements, tracked as a sparse vector.
            let mut cur: Vec<(usize, Scalar)> = vec![(tuple[w[0]], c.clone())];
            for &slot in &w[1..] {
                let b = tuple[slot];
                let mut next: BTreeMap<usize, Scalar> = BTreeMap::new();
                for (i, x) in &cur {
                    for (l, s) in &self.alg.table[*i][b] {
                        let e = next.entry(*l).or_insert_with(|| Scalar::zero(self.alg.domain));
                        *e = &*e + &(x * s);
                    }
                }
                cur = next.into_iter().filter(|e| !e.1.is_zero()).collect();
                if cur.is_empty() {
                    break;
                }
            }
            for (l, x) in cur {
                out.0[l] = &out.0[l] + &x;
            }
        }
        out
    }
}

fn witness(vars: &[Var], tuple: &[usize], alg: &FiniteAlgebra, value: Element) -> Witness {
    Witness {
        assignment: vars
            .iter()
            .zip(tuple)
            .map(|(v, &b)| (v.to_string(), alg.labels[b].clone()))
            .collect(),
        value,
    }
}

/// Checks `p` on every tuple of basis elements.
pub fn is_identity_multilinear(p: &Poly, alg: &FiniteAlgebra) -> Result<EvalReport> {
    let vars = multilinear_vars(p)?;
    let k = alg.dim();
    let total = (k as u128).checked_pow(vars.len() as u32).unwrap_or(u128::MAX);
    if total > EXHAUSTIVE_CAP {
        return Err(resource_limit("basis assignments", total, EXHAUSTIVE_CAP));
    }
    if p.is_zero() {
        return Ok(EvalReport {
            identity: true,
            mode: EvalMode::Exhaustive,
            assignments_checked: 0,
            witness: None,
        });
    }
    let ev = BasisEvaluator::new(p, &vars, alg);
    let mut tuple = vec![0usize; vars.len()];
    let mut checked = 0u64;
    loop {
        checked += 1;
        let v = ev.eval(&tuple);
        if !v.is_zero() {
            return Ok(EvalReport {
                identity: false,
                mode: EvalMode::Exhaustive,
                assignments_checked: checked,
                witness: Some(witness(&vars, &tuple, alg, v)),
            });
        }
        if !advance(&mut tuple, k) {
            break;
        }
    }
    Ok(EvalReport {
        identity: true,
        mode: EvalMode::Exhaustive,
        assignments_checked: checked,
        witness: None,
    })
}

fn advance(tuple: &mut [usize], k: usize) -> bool {
    for slot in tuple.iter_mut().rev() {
        *slot += 1;
        if *slot < k {
            return true;
        }
        *slot = 0;
    }
    false
}

/// Like [`is_identity_multilinear`] for `p` alternating in `alt`: values on
/// tuples with a repeated alternating entry vanish and reordering those
/// entries only changes sign, so increasing tuples suffice. With more
/// alternating variables than the dimension nothing needs evaluating.
pub fn is_identity_alternating(p: &Poly, alt: &[Var], alg: &FiniteAlgebra) -> Result<EvalReport> {
    let vars = multilinear_vars(p)?;
    if !alternation_report(p, alt).alternating() {
        return Err(invalid(format!("polynomial is not alternating in {alt:?}")));
    }
    let k = alg.dim();
    if alt.len() > k {
        return Ok(EvalReport {
            identity: true,
            mode: EvalMode::Counting,
            assignments_checked: 0,
            witness: None,
        });
    }
    let alt_pos: Vec<usize> = alt.iter().map(|v| vars.iter().position(|w| w == v).expect("alternating variable occurs")).collect();
    let rest: Vec<usize> = (0..vars.len()).filter(|i| !alt_pos.contains(i)).collect();
    let ev = BasisEvaluator::new(p, &vars, alg);
    let mut checked = 0u64;
    let mut tuple = vec![0usize; vars.len()];
    for combo in combinations(k, alt.len()) {
        for (slot, b) in alt_pos.iter().zip(&combo) {
            tuple[*slot] = *b;
        }
        let mut others = vec![0usize; rest.len()];
        loop {
            for (slot, b) in rest.iter().zip(&others) {
                tuple[*slot] = *b;
            }
            checked += 1;
            let v = ev.eval(&tuple);
            if !v.is_zero() {
                return Ok(EvalReport {
                    identity: false,
                    mode: EvalMode::AlternationPruned,
                    assignments_checked: checked,
                    witness: Some(witness(&vars, &tuple, alg, v)),
                });
            }
            if !advance(&mut others, k) {
                break;
            }
        }
    }
    Ok(EvalReport {
        identity: true,
        mode: EvalMode::AlternationPruned,
        assignments_checked: checked,
        witness: None,
    })
}

fn combinations(k: usize, r: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, k: usize, r: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == r {
            out.push(cur.clone());
            return;
        }
        for i in start..k {
            cur.push(i);
            go(i + 1, k, r, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, k, r, &mut Vec::new(), &mut out);
    out
}

/// Random small-integer elements; a nonzero value refutes the identity, but
/// passing every trial proves nothing for non-multilinear `p`.
pub fn is_identity_randomized(p: &Poly, alg: &FiniteAlgebra, trials: usize, seed: u64) -> Result<EvalReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let vars: Vec<Var> = p.vars().into_iter().collect();
    for t in 0..trials {
        let assign: BTreeMap<Var, Element> = vars
            .iter()
            .map(|&v| {
                let coords: Vec<i64> = (0..alg.dim()).map(|_| rng.gen_range(-3..=3)).collect();
                (v, alg.element(&coords).expect("dimension matches"))
            })
            .collect();
        let value = evaluate(p, &assign, alg)?;
        if !value.is_zero() {
            return Ok(EvalReport {
                identity: false,
                mode: EvalMode::Randomized,
                assignments_checked: t as u64 + 1,
                witness: Some(Witness {
                    assignment: assign.iter().map(|(v, e)| (v.to_string(), e.to_string())).collect(),
                    value,
                }),
            });
        }
    }
    Ok(EvalReport {
        identity: true,
        mode: EvalMode::Randomized,
        assignments_checked: trials as u64,
        witness: None,
    })
}

pub const CODIM_MAX_N: usize = 6;
pub const CODIM_MAX_TUPLES: u128 = 1 << 14;

/// `c_n(A)`: the rank of the evaluation map from multilinear polynomials of
/// degree `n` to functions on basis tuples.
#[derive(Debug, Clone, Serialize)]
pub struct Codimension {
    pub n: usize,
    pub codimension: usize,
    /// `dim(Id(A) ∩ V_n) = n! − c_n`.
    pub identities: usize,
}

pub fn codimension(alg: &FiniteAlgebra, n: usize) -> Result<Codimension> {
    if n == 0 || n > CODIM_MAX_N {
        return Err(resource_limit("codimension degree n", n as u128, CODIM_MAX_N as u128));
    }
    let k = alg.dim();
    let tuples = (k as u128).pow(n as u32);
    if tuples > CODIM_MAX_TUPLES {
        return Err(resource_limit("basis tuples", tuples, CODIM_MAX_TUPLES));
    }
    let vars: Vec<Var> = (1..=n as u32).map(Var::x).collect();
    let mut rows: Vec<Vec<(usize, Scalar)>> = Vec::new();
    for perm in Perm::all(n) {
        let w: Word = perm.images().into_iter().map(|i| Var::x(i as u32)).collect();
        let ev = BasisEvaluator::new(&Poly::word(w, alg.domain), &vars, alg);
        let mut tuple = vec![0usize; n];
        let mut row = Vec::new();
        let mut t = 0usize;
        loop {
            for (l, c) in ev.eval(&tuple).0.into_iter().enumerate() {
                if !c.is_zero() {
                    row.push((t * k + l, c));
                }
            }
            t += 1;
            if !advance(&mut tuple, k) {
                break;
            }
        }
        rows.push(row);
    }
    let rank = match alg.domain {
        Domain::Rational => exact_rank_rational(
            &rows
                .iter()
                .map(|r| r.iter().map(|(c, x)| (*c, x.to_rational())).collect())
                .collect::<Vec<Vec<(usize, BigRational)>>>(),
        ),
        Domain::Prime(p) => {
            let mut rref = ModRref::new(tuples as usize * k, p);
            for r in &rows {
                let v: Vec<(u32, u64)> = r.iter().map(|(c, x)| (*c as u32, x.residue_mod(p).expect("residue"))).collect();
                rref.insert(&v);
            }
            rref.rank()
        }
    };
    let total: usize = (1..=n).product();
    Ok(Codimension {
        n,
        codimension: rank,
        identities: total - rank,
    })
}

/// Coefficients of `det(λI − M)` from `λ^k` down to `λ^0`, by Berkowitz's
/// division-free recursion.
pub fn char_poly(m: &[Vec<Scalar>], domain: Domain) -> Vec<Scalar> {
    let n = m.len();
    let mut p = vec![Scalar::one(domain)];
    for r in 0..n {
        // Leading (r+1)×(r+1) block: M = m[..r][..r], C = m[..r][r], R = m[r][..r].
        let a = &m[r][r];
        let mut t = vec![Scalar::one(domain), -a];
        let mut v: Vec<Scalar> = (0..r).map(|i| m[i][r].clone()).collect();
        for _ in 0..r {
            let rv = (0..r).fold(Scalar::zero(domain), |acc, j| &acc + &(&m[r][j] * &v[j]));
            t.push(-rv);
            v = (0..r)
                .map(|i| (0..r).fold(Scalar::zero(domain), |acc, j| &acc + &(&m[i][j] * &v[j])))
                .collect();
        }
        let q: Vec<Scalar> = (0..r + 2)
            .map(|i| {
                (0..=i.min(r)).fold(Scalar::zero(domain), |acc, j| &acc + &(&t[i - j] * &p[j]))
            })
            .collect();
        p = q;
    }
    p
}

/// A monic relation `a^k + ξ_1 a^{k−1} + ⋯ + ξ_k = 0`.
#[derive(Debug, Clone, Serialize)]
pub struct IntegralityWitness {
    /// `ξ_1..ξ_k`.
    pub coefficients: Vec<String>,
    pub verified: bool,
}

/// The characteristic polynomial of left multiplication by `a`, checked to
/// annihilate `a` by exact evaluation.
pub fn integrality_witness(a: &Element, alg: &FiniteAlgebra) -> Result<IntegralityWitness> {
    let unit = alg.unit().ok_or_else(|| invalid("integrality witness needs a unital algebra"))?;
    let chi = char_poly(&alg.left_regular(a), alg.domain);
    let k = alg.dim();
    let mut acc = alg.zero();
    let mut power = unit.clone();
    for i in (0..=k).rev() {
        acc = acc.add(&power.scale(&chi[i]));
        power = alg.mul(&power, a);
    }
    Ok(IntegralityWitness {
        coefficients: chi[1..].iter().map(Scalar::to_string).collect(),
        verified: acc.is_zero(),
    })
}

/// How `δ_k(Capl_n) = σ_k·c(z)·Capl_n` pairs `k` with a coefficient of `det(λI − z)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CoefficientPairing {
    /// `c` is the coefficient of `λ^k`.
    SameIndex,
    /// `c` is the coefficient of `λ^{n−k}`.
    Complementary,
}

/// The sign convention found for each `k`, if one holds on every sample.
#[derive(Debug, Clone, Serialize)]
pub struct Convention {
    pub pairing: CoefficientPairing,
    pub signs: Vec<i32>,
}

/// Where the alternating x-variables range.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum XRange {
    /// All of `M_n`.
    FullAlgebra,
    /// The left ideal `M_n·E_11` (first-column matrices), an `n`-dimensional
    /// module on which `z` acts by left multiplication.
    FirstColumn,
}

struct ChSample {
    z: Element,
    chi: Vec<Scalar>,
}

fn ch_samples(n: usize, alg: &FiniteAlgebra, random: usize, seed: u64) -> Vec<ChSample> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut zs: Vec<Element> = (0..n * n).map(|i| alg.basis(i)).collect();
    for _ in 0..random {
        let coords: Vec<i64> = (0..n * n).map(|_| rng.gen_range(-5..=5)).collect();
        zs.push(alg.element(&coords).expect("dimension matches"));
    }
    zs.into_iter()
        .map(|z| {
            let m: Vec<Vec<Scalar>> = (0..n).map(|i| (0..n).map(|j| z.0[i * n + j].clone()).collect()).collect();
            ChSample {
                chi: char_poly(&m, alg.domain),
                z,
            }
        })
        .collect()
}

/// For each `k`, the ratios `δ_k(Capl_n) / Capl_n` on nonzero evaluations,
/// compared with `±c(z)` under both pairings. Returns the consistent
/// convention, if any, and the number of evaluations used.
fn discover_convention(
    n: usize,
    alg: &FiniteAlgebra,
    samples: &[ChSample],
    range: XRange,
) -> Result<(Option<Convention>, u64)> {
    let d = alg.domain;
    let c = capelli(n, d)?;
    let z = Poly::var(Var::z(), d);
    let deltas: Vec<Poly> = (0..=n)
        .map(|k| delta(&c, &DeltaSpec::x(n, k, z.clone())?))
        .collect::<Result<_>>()?;
    let xs_basis: Vec<usize> = match range {
        XRange::FullAlgebra => (0..n * n).collect(),
        XRange::FirstColumn => (0..n).map(|i| i * n).collect(),
    };
    let mut candidates: Vec<(CoefficientPairing, Vec<i32>)> = Vec::new();
    for pairing in [CoefficientPairing::SameIndex, CoefficientPairing::Complementary] {
        for mask in 0..(1u32 << (n + 1)) {
            let signs = (0..=n).map(|k| if mask >> k & 1 == 1 { -1 } else { 1 }).collect();
            candidates.push((pairing, signs));
        }
    }
    let mut evaluations = 0u64;
    let xs_tuples = combinations(xs_basis.len(), n);
    for s in samples {
        for combo in &xs_tuples {
            let mut ys = vec![0usize; n];
            loop {
                let mut assign = BTreeMap::new();
                for i in 0..n {
                    assign.insert(Var::x(i as u32 + 1), alg.basis(xs_basis[combo[i]]));
                    assign.insert(Var::y(i as u32 + 1), alg.basis(ys[i]));
                }
                assign.insert(Var::z(), s.z.clone());
                let base = evaluate(&c, &assign, alg)?;
                let lhs: Vec<Element> = deltas.iter().map(|p| evaluate(p, &assign, alg)).collect::<Result<_>>()?;
                evaluations += 1;
                candidates.retain(|(pairing, signs)| {
                    (0..=n).all(|k| {
                        let coeff = match pairing {
                            CoefficientPairing::SameIndex => &s.chi[n - k],
                            CoefficientPairing::Complementary => &s.chi[k],
                        };
                        let rhs = base.scale(&(coeff * &Scalar::from_i64(signs[k] as i64, d)));
                        lhs[k] == rhs
                    })
                });
                if candidates.is_empty() {
                    return Ok((None, evaluations));
                }
                if !advance(&mut ys, n * n) {
                    break;
                }
            }
        }
    }
    // Both pairings survive only if every evaluation was zero.
    Ok((
        candidates
            .into_iter()
            .next()
            .map(|(pairing, signs)| Convention { pairing, signs }),
        evaluations,
    ))
}

/// Finds, then asserts, the convention relating `δ_{k,z}(Capl_n)` to the
/// characteristic polynomial of `z`.
///
/// The convention is discovered on matrix units plus a few random matrices
/// and then asserted on `random` further integer matrices. Both x-ranges are
/// tried; the relation is a statement about alternating `n`-forms on an
/// `n`-dimensional `z`-module, so only the first-column range is expected to
/// admit a convention.
pub fn cayley_hamilton_delta_check(n: usize, random: usize, seed: u64) -> Result<VerificationReport> {
    let start = Instant::now();
    if n == 0 || n > 3 {
        return Err(invalid("cayley-hamilton check supports 1 ≤ n ≤ 3"));
    }
    let alg = FiniteAlgebra::matrix(n, Domain::Rational)?;
    let discovery = ch_samples(n, &alg, 3, seed);
    let (full, full_evals) = discover_convention(n, &alg, &discovery, XRange::FullAlgebra)?;
    let (found, evals) = discover_convention(n, &alg, &discovery, XRange::FirstColumn)?;
    let mut report = VerificationReport::new("ch-delta")
        .param("n", n)
        .param("random", random)
        .param("seed", seed)
        .put("full_algebra_convention", json!(full))
        .put("full_algebra_evaluations", full_evals)
        .put("discovery_evaluations", evals);
    let Some(conv) = found else {
        return Ok(report
            .put("convention", serde_json::Value::Null)
            .verdict(Verdict::Fail)
            .finish(start));
    };
    // Assert on fresh random matrices: only the found convention may survive.
    let check = ch_samples(n, &alg, random, seed.wrapping_add(1));
    let (confirmed, check_evals) = discover_convention(n, &alg, &check, XRange::FirstColumn)?;
    let consistent = confirmed
        .as_ref()
        .is_some_and(|c| c.pairing == conv.pairing && c.signs == conv.signs);
    report = report
        .put("convention", &conv)
        .put("check_evaluations", check_evals)
        .put("check_matrices", check.len())
        .verdict(if consistent { Verdict::Pass } else { Verdict::Fail });
    Ok(report.hash_of(&conv).finish(start))
}

/// Whether `Capl_n` is an identity of `M_k`, with a witness if it is not.
pub fn capelli_matrix_check(k: usize, n: usize) -> Result<VerificationReport> {
    let start = Instant::now();
    let alg = FiniteAlgebra::matrix(k, Domain::Rational)?;
    let c = capelli(n, Domain::Rational)?;
    let xs: Vec<Var> = (1..=n as u32).map(Var::x).collect();
    let r = is_identity_alternating(&c, &xs, &alg)?;
    if let Some(w) = &r.witness {
        // Re-evaluate the witness directly.
        let assign: BTreeMap<Var, Element> = w
            .assignment
            .iter()
            .map(|(v, label)| {
                let var = parse_var(v)?;
                let idx = alg.labels.iter().position(|l| l == label).ok_or_else(|| invalid("label"))?;
                Ok((var, alg.basis(idx)))
            })
            .collect::<Result<_>>()?;
        if evaluate(&c, &assign, &alg)? != w.value {
            return Err(Error::Verification("identity witness does not re-evaluate".into()));
        }
    }
    let expected = n > k * k;
    Ok(VerificationReport::new("capelli-matrix")
        .param("k", k)
        .param("n", n)
        .put("identity", r.identity)
        .put("mode", r.mode)
        .put("assignments_checked", r.assignments_checked)
        .put("witness", &r.witness)
        .verdict(if r.identity == expected { Verdict::Pass } else { Verdict::Fail })
        .hash_of(&r)
        .finish(start))
}

fn parse_var(s: &str) -> Result<Var> {
    let p = crate::freealg::parse_poly(s, Domain::Rational)?;
    let vars: Vec<Var> = p.vars().into_iter().collect();
    match vars.as_slice() {
        [v] => Ok(*v),
        _ => Err(invalid(format!("{s:?} is not a variable"))),
    }
}

/// Integer matrix as an element of `M_n`.
pub fn matrix_element(alg: &FiniteAlgebra, rows: &[Vec<i64>]) -> Result<Element> {
    alg.element(&rows.concat())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::freealg::parse_poly;

    const Q: Domain = Domain::Rational;

    fn q(s: &str) -> Poly {
        parse_poly(s, Q).unwrap()
    }

    fn assign(pairs: &[(Var, Element)]) -> BTreeMap<Var, Element> {
        pairs.iter().cloned().collect()
    }

    #[test]
    fn matrix_units() {
        let m2 = FiniteAlgebra::matrix(2, Q).unwrap();
        let (e11, e12) = (m2.basis(0), m2.basis(1));
        let v = evaluate(&capelli(1, Q).unwrap(), &assign(&[(Var::x(1), e11), (Var::y(1), e12.clone())]), &m2).unwrap();
        assert_eq!(v, e12);
        let d1 = matrix_element(&m2, &[vec![1, 0], vec![0, 2]]).unwrap();
        let d2 = matrix_element(&m2, &[vec![3, 0], vec![0, 5]]).unwrap();
        let v = evaluate(&q("x1*x2 - x2*x1"), &assign(&[(Var::x(1), d1), (Var::x(2), d2)]), &m2).unwrap();
        assert!(v.is_zero());
        assert!(evaluate(&q("x1 + 1"), &BTreeMap::new(), &m2).is_err());
    }

    #[test]
    fn rejects_nonassociative() {
        // e0·e0 = e1 but e1 is not compatible: (e0e0)e0 = e1e0 = 0, e0(e0e0) = e0e1 = e0.
        let c = vec![(0, 0, 1, Scalar::one(Q)), (0, 1, 0, Scalar::one(Q))];
        assert!(FiniteAlgebra::new(Q, vec!["a".into(), "b".into()], c, None).is_err());
    }

    #[test]
    fn standard_algebras_are_associative() {
        FiniteAlgebra::upper_triangular(3, Q).unwrap();
        FiniteAlgebra::grassmann(3, Q).unwrap();
        FiniteAlgebra::truncated_poly(4, Q).unwrap();
        FiniteAlgebra::matrix(3, Domain::prime(5).unwrap()).unwrap();
    }

    #[test]
    fn identities_small() {
        let q1 = FiniteAlgebra::field(Q);
        assert!(is_identity_multilinear(&q("x1*x2 - x2*x1"), &q1).unwrap().identity);
        let m2 = FiniteAlgebra::matrix(2, Q).unwrap();
        let r = is_identity_multilinear(&q("x1*x2 - x2*x1"), &m2).unwrap();
        assert!(!r.identity);
        assert!(r.witness.is_some());
        assert!(is_identity_multilinear(&q("x1*x1"), &m2).is_err());
    }

    #[test]
    fn capelli_on_m2() {
        let r = capelli_matrix_check(2, 4).unwrap();
        assert!(r.passed());
        assert_eq!(r.payload["identity"], json!(false));
        let r = capelli_matrix_check(2, 5).unwrap();
        assert!(r.passed());
        assert_eq!(r.payload["mode"], json!("counting"));
    }

    #[test]
    fn codimensions() {
        let m2 = FiniteAlgebra::matrix(2, Q).unwrap();
        assert_eq!(codimension(&m2, 2).unwrap().codimension, 2);
        assert_eq!(codimension(&m2, 3).unwrap().codimension, 6);
        for n in 1..=4 {
            assert_eq!(codimension(&FiniteAlgebra::field(Q), n).unwrap().codimension, 1);
        }
        let m2p = FiniteAlgebra::matrix(2, Domain::prime(7).unwrap()).unwrap();
        assert_eq!(codimension(&m2p, 3).unwrap().codimension, 6);
    }

    #[test]
    fn char_poly_2x2() {
        let m = vec![
            vec![Scalar::from_i64(1, Q), Scalar::from_i64(2, Q)],
            vec![Scalar::from_i64(3, Q), Scalar::from_i64(4, Q)],
        ];
        let chi: Vec<String> = char_poly(&m, Q).iter().map(Scalar::to_string).collect();
        assert_eq!(chi, vec!["1", "-5", "-2"]);
    }

    #[test]
    fn integrality() {
        let m2 = FiniteAlgebra::matrix(2, Q).unwrap();
        let w = integrality_witness(m2.unit().unwrap(), &m2).unwrap();
        assert!(w.verified);
        assert_eq!(w.coefficients, vec!["-4", "6", "-4", "1"]);
        let e12 = m2.basis(1);
        assert!(m2.mul(&e12, &e12).is_zero());
        assert!(integrality_witness(&e12, &m2).unwrap().verified);
        let ut = FiniteAlgebra::upper_triangular(2, Q).unwrap();
        let x = ut.element(&[1, 1, 2]).unwrap();
        assert!(integrality_witness(&x, &ut).unwrap().verified);
    }

    #[test]
    fn change_of_basis_round_trip() {
        let ut = FiniteAlgebra::upper_triangular(2, Q).unwrap();
        let p: Vec<Vec<Scalar>> = [[1, 1, 0], [0, 1, 0], [2, 0, 1]]
            .iter()
            .map(|r| r.iter().map(|&x| Scalar::from_i64(x, Q)).collect())
            .collect();
        let other = ut.change_basis(&p).unwrap();
        assert_eq!(other.dim(), 3);
        assert!(other.unit().is_some());
        let file = ut.to_file();
        let back = FiniteAlgebra::from_json(&serde_json::to_string(&file).unwrap()).unwrap();
        assert_eq!(back.to_file().structure_constants, file.structure_constants);
    }

    #[test]
    fn cayley_hamilton_n2() {
        let r = cayley_hamilton_delta_check(2, 5, 7).unwrap();
        assert!(r.passed(), "{}", r.to_json_line());
    }
}
