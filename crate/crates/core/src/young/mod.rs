//! Partitions, tableaux, hook numbers, Young symmetrizers and the explicit
//! degree bounds built on them.

mod bounds;
mod checks;

pub use bounds::*;
pub use checks::*;

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, resource_limit, Error, Result};
use crate::linalg::exact_rank;
use crate::scalar::{Domain, Scalar};
use crate::symgroup::{GroupAlgElem, Perm};

pub const SYT_COUNT_CAP: usize = 12;
pub const SYMMETRIZER_CAP: usize = 7;

/// A partition, stored as weakly decreasing positive parts.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Partition(Vec<usize>);

impl Partition {
    pub fn new(parts: Vec<usize>) -> Result<Partition> {
        if parts.iter().any(|&p| p == 0) {
            return Err(invalid("partition parts must be positive"));
        }
        if parts.windows(2).any(|w| w[0] < w[1]) {
            return Err(invalid(format!("parts {parts:?} are not weakly decreasing")));
        }
        Ok(Partition(parts))
    }

    /// `v` parts each equal to `u`.
    pub fn rectangle(u: usize, v: usize) -> Partition {
        Partition(vec![u; v])
    }

    pub fn parts(&self) -> &[usize] {
        &self.0
    }

    pub fn n(&self) -> usize {
        self.0.iter().sum()
    }

    pub fn rows(&self) -> usize {
        self.0.len()
    }

    pub fn transpose(&self) -> Partition {
        let cols = self.0.first().copied().unwrap_or(0);
        Partition((0..cols).map(|j| self.0.iter().filter(|&&r| r > j).count()).collect())
    }

    /// All partitions of `n`, in reverse lexicographic order.
    pub fn all(n: usize) -> Vec<Partition> {
        fn go(rest: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Partition>) {
            if rest == 0 {
                out.push(Partition(cur.clone()));
                return;
            }
            for part in (1..=rest.min(max)).rev() {
                cur.push(part);
                go(rest - part, part, cur, out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        go(n, n, &mut Vec::new(), &mut out);
        out
    }

    fn boxes(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.0.iter().enumerate().flat_map(|(i, &r)| (0..r).map(move |j| (i, j)))
    }
}

impl TryFrom<Vec<usize>> for Partition {
    type Error = Error;
    fn try_from(v: Vec<usize>) -> Result<Partition> {
        Partition::new(v)
    }
}

impl From<Partition> for Vec<usize> {
    fn from(p: Partition) -> Vec<usize> {
        p.0
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(usize::to_string).collect();
        f.write_str(&parts.join(","))
    }
}

impl FromStr for Partition {
    type Err = Error;

    /// Comma-joined parts, e.g. `4,2`.
    fn from_str(s: &str) -> Result<Partition> {
        let parts = s
            .split(',')
            .map(|t| {
                t.trim().parse::<usize>().map_err(|e| Error::Parse {
                    offset: 0,
                    message: format!("bad part {t:?} in {s:?}: {e}"),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Partition::new(parts)
    }
}

/// Hook numbers, row by row.
pub fn hooks(shape: &Partition) -> Vec<Vec<u64>> {
    let t = shape.transpose();
    shape
        .parts()
        .iter()
        .enumerate()
        .map(|(i, &r)| {
            (0..r)
                .map(|j| ((r - j - 1) + (t.parts()[j] - i - 1) + 1) as u64)
                .collect()
        })
        .collect()
}

pub fn hook_sum(shape: &Partition) -> u64 {
    hooks(shape).iter().flatten().sum()
}

fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * k)
}

/// `s^λ = n! / Π h_x`.
pub fn dim_specht(shape: &Partition) -> BigInt {
    let prod = hooks(shape)
        .iter()
        .flatten()
        .fold(BigInt::one(), |acc, &h| acc * h);
    factorial(shape.n()) / prod
}

/// Number of standard tableaux, counted by placing the largest entry in
/// each removable corner in turn.
pub fn count_syt(shape: &Partition) -> Result<BigInt> {
    if shape.n() > SYT_COUNT_CAP {
        return Err(resource_limit("standard tableau count n", shape.n() as u128, SYT_COUNT_CAP as u128));
    }
    fn go(parts: &mut Vec<usize>, memo: &mut HashMap<Vec<usize>, u64>) -> u64 {
        if parts.iter().all(|&p| p == 0) {
            return 1;
        }
        if let Some(&v) = memo.get(parts.as_slice()) {
            return v;
        }
        let mut total = 0;
        for i in 0..parts.len() {
            let corner = parts[i] > 0 && parts.get(i + 1).map_or(true, |&next| next < parts[i]);
            if corner {
                parts[i] -= 1;
                total += go(parts, memo);
                parts[i] += 1;
            }
        }
        memo.insert(parts.clone(), total);
        total
    }
    Ok(BigInt::from(go(&mut shape.parts().to_vec(), &mut HashMap::new())))
}

/// A filling of a shape by `1..n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Tableau {
    shape: Partition,
    rows: Vec<Vec<usize>>,
}

impl Tableau {
    pub fn new(rows: Vec<Vec<usize>>) -> Result<Tableau> {
        let shape = Partition::new(rows.iter().map(Vec::len).collect())?;
        let n = shape.n();
        let mut seen = vec![false; n + 1];
        for &e in rows.iter().flatten() {
            if e == 0 || e > n || std::mem::replace(&mut seen[e], true) {
                return Err(invalid(format!("filling {rows:?} is not a bijection onto 1..{n}")));
            }
        }
        Ok(Tableau { shape, rows })
    }

    /// The row-reading standard tableau: `1..λ_1` in the first row, and so on.
    pub fn row_reading(shape: &Partition) -> Tableau {
        let mut next = 0;
        let rows = shape
            .parts()
            .iter()
            .map(|&r| {
                (0..r)
                    .map(|_| {
                        next += 1;
                        next
                    })
                    .collect()
            })
            .collect();
        Tableau {
            shape: shape.clone(),
            rows,
        }
    }

    pub fn shape(&self) -> &Partition {
        &self.shape
    }

    pub fn rows(&self) -> &[Vec<usize>] {
        &self.rows
    }

    pub fn n(&self) -> usize {
        self.shape.n()
    }

    pub fn is_standard(&self) -> bool {
        let rows_ok = self.rows.iter().all(|r| r.windows(2).all(|w| w[0] < w[1]));
        let cols_ok = self.shape.boxes().all(|(i, j)| i == 0 || self.rows[i - 1][j] < self.rows[i][j]);
        rows_ok && cols_ok
    }

    /// All standard tableaux of a shape.
    pub fn standard(shape: &Partition) -> Vec<Tableau> {
        fn go(shape: &Partition, fill: &mut Vec<Vec<usize>>, k: usize, out: &mut Vec<Tableau>) {
            if k > shape.n() {
                out.push(Tableau {
                    shape: shape.clone(),
                    rows: fill.clone(),
                });
                return;
            }
            for i in 0..shape.rows() {
                let j = fill[i].len();
                let fits = j < shape.parts()[i] && (i == 0 || fill[i - 1].len() > j);
                if fits {
                    fill[i].push(k);
                    go(shape, fill, k + 1, out);
                    fill[i].pop();
                }
            }
        }
        let mut out = Vec::new();
        go(shape, &mut vec![Vec::new(); shape.rows()], 1, &mut out);
        out
    }

    fn columns(&self) -> Vec<Vec<usize>> {
        let t = self.shape.transpose();
        (0..t.rows())
            .map(|j| (0..t.parts()[j]).map(|i| self.rows[i][j]).collect())
            .collect()
    }

    fn class_of(n: usize, blocks: &[Vec<usize>]) -> Vec<usize> {
        let mut class = vec![0; n + 1];
        for (b, block) in blocks.iter().enumerate() {
            for &e in block {
                class[e] = b;
            }
        }
        class
    }

    fn stabilizer(&self, blocks: &[Vec<usize>]) -> Vec<Perm> {
        let n = self.n();
        let class = Tableau::class_of(n, blocks);
        Perm::all(n)
            .filter(|p| (0..n).all(|i| class[i + 1] == class[p.image(i) + 1]))
            .collect()
    }

    /// Permutations preserving every row.
    pub fn row_group(&self) -> Vec<Perm> {
        self.stabilizer(&self.rows)
    }

    /// Permutations preserving every column.
    pub fn column_group(&self) -> Vec<Perm> {
        self.stabilizer(&self.columns())
    }
}

impl fmt::Display for Tableau {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self
            .rows
            .iter()
            .map(|r| r.iter().map(usize::to_string).collect::<Vec<_>>().join(","))
            .collect();
        f.write_str(&rows.join("/"))
    }
}

impl FromStr for Tableau {
    type Err = Error;

    /// Rows separated by `/`, entries by `,`, e.g. `1,2/3`.
    fn from_str(s: &str) -> Result<Tableau> {
        let rows = s
            .split('/')
            .map(|r| {
                r.split(',')
                    .map(|t| {
                        t.trim().parse::<usize>().map_err(|e| Error::Parse {
                            offset: 0,
                            message: format!("bad entry {t:?} in {s:?}: {e}"),
                        })
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Tableau::new(rows)
    }
}

/// `a_T = Σ sgn(q)·qp` over column permutations `q` and row permutations `p`.
pub fn young_symmetrizer(t: &Tableau, domain: Domain) -> Result<GroupAlgElem> {
    let n = t.n();
    if n > SYMMETRIZER_CAP {
        return Err(resource_limit("symmetrizer degree n", n as u128, SYMMETRIZER_CAP as u128));
    }
    let rows = t.row_group();
    let mut a = GroupAlgElem::zero(n, domain);
    for q in t.column_group() {
        let s = Scalar::from_i64(q.sgn() as i64, domain);
        for p in &rows {
            a.add_term(q.then(p), s.clone());
        }
    }
    Ok(a)
}

/// The scalar `α_T` with `a_T² = α_T·a_T`.
pub fn symmetrizer_scalar(t: &Tableau, domain: Domain) -> Result<Scalar> {
    let a = young_symmetrizer(t, domain)?;
    if a.is_zero() {
        return Err(Error::Degenerate(format!("a_T vanishes for T = {t}")));
    }
    let sq = a.mul(&a);
    if sq.is_zero() {
        return Ok(Scalar::zero(domain));
    }
    a.ratio_to(&sq).ok_or_else(|| {
        Error::Verification(format!("a_T² is not a scalar multiple of a_T for T = {t}"))
    })
}

/// `dim Q[S_n]·a_T`: the rank of the vectors `σ·a_T` over all `σ ∈ S_n`.
pub fn symmetrizer_module_dim(t: &Tableau) -> Result<usize> {
    let a = young_symmetrizer(t, Domain::Rational)?;
    let n = t.n();
    let index: HashMap<Perm, usize> = Perm::all(n).enumerate().map(|(i, p)| (p, i)).collect();
    let terms: Vec<(Perm, BigInt)> = a
        .terms()
        .map(|(p, c)| (p.clone(), c.to_rational().to_integer()))
        .collect();
    let rows = Perm::all(n)
        .map(|s| {
            let mut row: Vec<(usize, BigInt)> =
                terms.iter().map(|(p, c)| (index[&s.then(p)], c.clone())).collect();
            row.sort_by_key(|e| e.0);
            row
        })
        .collect();
    Ok(exact_rank(rows))
}

/// Whether `α_T ≡ 0 (mod p)` for the row-reading tableau of each shape.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AlphaResidue {
    pub shape: Partition,
    pub p: u64,
    pub alpha: String,
    pub vanishes_mod_p: bool,
}

pub fn alpha_residues(max_n: usize, primes: &[u64]) -> Result<Vec<AlphaResidue>> {
    let mut out = Vec::new();
    for n in 1..=max_n {
        for shape in Partition::all(n) {
            let t = Tableau::row_reading(&shape);
            let alpha = symmetrizer_scalar(&t, Domain::Rational)?;
            for &p in primes {
                let modp = symmetrizer_scalar(&t, Domain::prime(p)?);
                let vanishes = match modp {
                    Ok(s) => s.is_zero(),
                    Err(Error::Degenerate(_)) => true,
                    Err(e) => return Err(e),
                };
                out.push(AlphaResidue {
                    shape: shape.clone(),
                    p,
                    alpha: alpha.to_string(),
                    vanishes_mod_p: vanishes,
                });
            }
        }
    }
    Ok(out)
}

/// `uv(u+v)/2`, the hook sum of a `u × v` rectangle.
pub fn rect_hook_sum(u: u64, v: u64) -> u64 {
    u * v * (u + v) / 2
}

/// Rows `(p−1)u, (p−1)(u−1), …, (p−1)`.
pub fn wide_staircase(p: u64, u: usize) -> Result<Partition> {
    if !crate::scalar::is_prime(p) {
        return Err(invalid(format!("{p} is not prime")));
    }
    if u == 0 {
        return Err(invalid("u must be positive"));
    }
    Partition::new((1..=u).rev().map(|k| (p as usize - 1) * k).collect())
}

/// `C(p,2)·u(u+1)(2u+1)/6`, the wide-staircase hook sum (row `k` from the
/// bottom contributes `C(p,2)·k²`).
pub fn staircase_hook_sum(p: u64, u: u64) -> u64 {
    p * (p - 1) / 2 * u * (u + 1) * (2 * u + 1) / 6
}

/// The same sum rewritten in terms of `n = (p−1)·C(u+1,2)` as
/// `C(p,2)·(2u+1)·n/3`. This agrees with the hook sum only for `p = 2`; it
/// is kept so the discrepancy can be reported. `None` if not an integer.
pub fn staircase_hook_sum_n_form(p: u64, u: u64) -> Option<u64> {
    let n = (p - 1) * u * (u + 1) / 2;
    let num = p * (p - 1) / 2 * (2 * u + 1) * n;
    (num % 3 == 0).then_some(num / 3)
}

fn valuation(mut h: u64, p: u64) -> u32 {
    let mut v = 0;
    while h % p == 0 {
        h /= p;
        v += 1;
    }
    v
}

/// Outcome of the hook-valuation simplicity criterion.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Simplicity {
    /// `None` when the available criterion cannot decide.
    pub simple: Option<bool>,
    /// Set for p = 2, where only the coprime-hooks condition is used.
    pub partial: bool,
    /// Violating boxes `(i, j, i', j')`, 1-based.
    pub witness: Option<[usize; 4]>,
}

/// Simple iff no box `(i,j)` with `v_p(h_{ij}) > 0` has a box `(i',j)` in its
/// column and `(i,j')` in its row with the three valuations pairwise distinct.
pub fn fayers_simple(shape: &Partition, p: u64) -> Result<Simplicity> {
    if !crate::scalar::is_prime(p) {
        return Err(invalid(format!("{p} is not prime")));
    }
    let h = hooks(shape);
    let v: Vec<Vec<u32>> = h.iter().map(|r| r.iter().map(|&x| valuation(x, p)).collect()).collect();
    let coprime = v.iter().flatten().all(|&x| x == 0);
    if p == 2 {
        return Ok(Simplicity {
            simple: coprime.then_some(true),
            partial: true,
            witness: None,
        });
    }
    let t = shape.transpose();
    for (i, j) in shape.boxes() {
        let a = v[i][j];
        if a == 0 {
            continue;
        }
        for i2 in 0..t.parts()[j] {
            let b = v[i2][j];
            if b == a {
                continue;
            }
            for j2 in 0..shape.parts()[i] {
                let c = v[i][j2];
                if c != a && c != b {
                    return Ok(Simplicity {
                        simple: Some(false),
                        partial: false,
                        witness: Some([i + 1, j + 1, i2 + 1, j2 + 1]),
                    });
                }
            }
        }
    }
    Ok(Simplicity {
        simple: Some(true),
        partial: false,
        witness: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn part(s: &str) -> Partition {
        s.parse().unwrap()
    }

    #[test]
    fn parse_and_print() {
        assert_eq!(part("4,2").to_string(), "4,2");
        assert!("2,4".parse::<Partition>().is_err());
        assert!("2,x".parse::<Partition>().is_err());
        assert_eq!(part("3,1").transpose(), part("2,1,1"));
        let t: Tableau = "1,2/3".parse().unwrap();
        assert!(t.is_standard());
        assert_eq!(t.to_string(), "1,2/3");
        assert!(!"2,1/3".parse::<Tableau>().unwrap().is_standard());
        assert!("1,1/3".parse::<Tableau>().is_err());
    }

    #[test]
    fn hook_examples() {
        assert_eq!(hooks(&part("1")), vec![vec![1]]);
        assert_eq!(hooks(&part("3,3")), vec![vec![4, 3, 2], vec![3, 2, 1]]);
        assert_eq!(hook_sum(&part("3,3")), 15);
        assert_eq!(rect_hook_sum(2, 3), 15);
        assert_eq!(rect_hook_sum(4, 4), 64);
        assert!(hooks(&part("4,2")).iter().flatten().all(|h| h % 3 != 0));
    }

    #[test]
    fn specht_dimensions() {
        assert_eq!(dim_specht(&part("5")), BigInt::from(1));
        assert_eq!(dim_specht(&part("2,2")), BigInt::from(2));
        assert_eq!(count_syt(&part("1,1,1")).unwrap(), BigInt::from(1));
        assert_eq!(count_syt(&part("2,1")).unwrap(), BigInt::from(2));
        assert_eq!(count_syt(&part("3,3")).unwrap(), BigInt::from(5));
        assert!(count_syt(&part("13")).is_err());
        assert_eq!(Tableau::standard(&part("3,2")).len(), 5);
    }

    #[test]
    fn small_symmetrizers() {
        let q = Domain::Rational;
        let row = young_symmetrizer(&"1,2".parse().unwrap(), q).unwrap();
        let mut expect = GroupAlgElem::identity(2, q);
        expect.add_term(Perm::transposition(2, 1, 2), Scalar::one(q));
        assert_eq!(row, expect);
        let col = young_symmetrizer(&"1/2".parse().unwrap(), q).unwrap();
        let mut expect = GroupAlgElem::identity(2, q);
        expect.add_term(Perm::transposition(2, 1, 2), Scalar::from_i64(-1, q));
        assert_eq!(col, expect);
        let hook: Tableau = "1,2/3".parse().unwrap();
        assert_eq!(young_symmetrizer(&hook, q).unwrap().support_size(), 4);
        assert_eq!(symmetrizer_scalar(&"1,2".parse().unwrap(), q).unwrap(), Scalar::from_i64(2, q));
        assert_eq!(symmetrizer_scalar(&"1/2".parse().unwrap(), q).unwrap(), Scalar::from_i64(2, q));
        assert_eq!(symmetrizer_module_dim(&hook).unwrap(), 2);
    }

    #[test]
    fn staircases() {
        assert_eq!(wide_staircase(2, 3).unwrap(), part("3,2,1"));
        assert_eq!(wide_staircase(3, 2).unwrap(), part("4,2"));
        assert_eq!(hook_sum(&part("4,2")), 15);
        assert_eq!(staircase_hook_sum(3, 2), 15);
        assert_eq!(staircase_hook_sum_n_form(3, 2), Some(30));
        assert_eq!(staircase_hook_sum_n_form(2, 3), Some(staircase_hook_sum(2, 3)));
        assert!(wide_staircase(4, 2).is_err());
    }

    #[test]
    fn simplicity() {
        let s = fayers_simple(&wide_staircase(3, 3).unwrap(), 3).unwrap();
        assert_eq!(s.simple, Some(true));
        let s = fayers_simple(&part("3,3"), 2).unwrap();
        assert!(s.partial);
        assert_eq!(s.simple, None);
        // Every hook of the staircase (3,2,1) is odd.
        assert_eq!(fayers_simple(&part("3,2,1"), 2).unwrap().simple, Some(true));
    }
}
