//! Exact linear algebra: modular sparse row reduction, multi-modular rational
//! solving with reconstruction, and fraction-free integer rank.

use std::sync::OnceLock;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

#[inline]
pub fn mulmod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

#[inline]
pub fn addmod(a: u64, b: u64, p: u64) -> u64 {
    let s = a as u128 + b as u128;
    (if s >= p as u128 { s - p as u128 } else { s }) as u64
}

#[inline]
pub fn submod(a: u64, b: u64, p: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        (a as u128 + p as u128 - b as u128) as u64
    }
}

pub fn powmod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    a %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = mulmod(acc, a, p);
        }
        a = mulmod(a, a, p);
        e >>= 1;
    }
    acc
}

/// Inverse of `a` modulo `m`, if `gcd(a, m) = 1`.
pub fn modinv(a: u64, m: u64) -> Option<u64> {
    let (mut r0, mut r1) = (m as i128, (a % m) as i128);
    let (mut s0, mut s1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    if r0 != 1 {
        return None;
    }
    Some(s0.rem_euclid(m as i128) as u64)
}

/// Deterministic Miller–Rabin for all `u64`.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &b in &BASES {
        if n % b == 0 {
            return n == b;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'outer: for &b in &BASES {
        let mut x = powmod(b, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod(x, x, n);
            if x == n - 1 {
                continue 'outer;
            }
        }
        return false;
    }
    true
}

/// The 16 largest primes below 2^62, descending.
pub fn large_primes() -> &'static [u64] {
    static PRIMES: OnceLock<Vec<u64>> = OnceLock::new();
    PRIMES.get_or_init(|| {
        let mut out = Vec::new();
        let mut c = (1u64 << 62) - 1;
        while out.len() < 16 {
            if is_prime_u64(c) {
                out.push(c);
            }
            c -= 2;
        }
        out
    })
}

/// Maps an integer into `F_p`.
pub fn bigint_mod(v: &BigInt, p: u64) -> u64 {
    let m = BigInt::from(p);
    let r = v.mod_floor(&m);
    r.try_into().expect("residue fits u64")
}

/// Maps a rational into `F_p`, if its denominator is a unit there.
pub fn rational_mod(v: &BigRational, p: u64) -> Option<u64> {
    let n = bigint_mod(v.numer(), p);
    let d = bigint_mod(v.denom(), p);
    Some(mulmod(n, modinv(d, p)?, p))
}

/// A sparse row: strictly increasing column indices with nonzero values.
pub type SparseRow = Vec<(u32, u64)>;

const NONE: u32 = u32::MAX;

/// Incrementally maintained reduced row echelon form over `F_p`.
///
/// Each stored row has a leading 1 in its pivot column, and no other row has a
/// nonzero entry in that column.
#[derive(Clone)]
pub struct ModRref {
    p: u64,
    ncols: usize,
    rows: Vec<SparseRow>,
    pivot_col: Vec<u32>,
    pivot_row: Vec<u32>,
    // Rows that may hold a nonzero entry in a given column (can be stale).
    col_rows: Vec<Vec<u32>>,
    acc: Vec<u64>,
    touched: Vec<u32>,
    history: Option<History>,
}

/// Record of every row operation, so that combinations of the current rows
/// can be rewritten in terms of the inserted vectors.
#[derive(Clone, Default)]
struct History {
    nodes: Vec<Node>,
    row_node: Vec<u32>,
}

#[derive(Clone)]
enum Node {
    // scale·(e_source − Σ f·node)
    Create { source: usize, scale: u64, uses: Vec<(u32, u64)> },
    // prev − f·sub
    Update { prev: u32, sub: u32, f: u64 },
}

impl ModRref {
    pub fn new(ncols: usize, p: u64) -> ModRref {
        ModRref {
            p,
            ncols,
            rows: Vec::new(),
            pivot_col: Vec::new(),
            pivot_row: vec![NONE; ncols],
            col_rows: vec![Vec::new(); ncols],
            acc: vec![0; ncols],
            touched: Vec::new(),
            history: None,
        }
    }

    /// Like [`new`](Self::new), but records row operations so that
    /// [`source_combination`](Self::source_combination) is available.
    pub fn with_history(ncols: usize, p: u64) -> ModRref {
        let mut m = ModRref::new(ncols, p);
        m.history = Some(History::default());
        m
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn pivot_columns(&self) -> &[u32] {
        &self.pivot_col
    }

    pub fn is_pivot(&self, c: u32) -> bool {
        self.pivot_row[c as usize] != NONE
    }

    pub fn row(&self, i: usize) -> &SparseRow {
        &self.rows[i]
    }

    /// Row index whose pivot is column `c`.
    pub fn row_of_pivot(&self, c: u32) -> Option<usize> {
        let r = self.pivot_row[c as usize];
        (r != NONE).then_some(r as usize)
    }

    /// `v` minus its projection onto the row space along the pivot columns;
    /// zero iff `v` lies in the row space.
    pub fn residual(&mut self, v: &[(u32, u64)]) -> SparseRow {
        self.residual_with_uses(v, None)
    }

    fn residual_with_uses(&mut self, v: &[(u32, u64)], mut uses: Option<&mut Vec<(u32, u64)>>) -> SparseRow {
        let p = self.p;
        for &(c, x) in v {
            let x = x % p;
            if x == 0 {
                continue;
            }
            let r = self.pivot_row[c as usize];
            if r == NONE {
                self.bump(c, x);
            } else {
                if let Some(u) = uses.as_deref_mut() {
                    u.push((r, x));
                }
                let row = &self.rows[r as usize];
                // Skip the leading 1: the pivot entry cancels exactly.
                for &(cc, a) in &row[1..] {
                    let t = mulmod(x, a, p);
                    let old = self.acc[cc as usize];
                    if old == 0 {
                        self.touched.push(cc);
                    }
                    self.acc[cc as usize] = submod(old, t, p);
                }
            }
        }
        self.drain()
    }

    fn bump(&mut self, c: u32, x: u64) {
        let old = self.acc[c as usize];
        if old == 0 {
            self.touched.push(c);
        }
        self.acc[c as usize] = addmod(old, x, self.p);
    }

    fn drain(&mut self) -> SparseRow {
        self.touched.sort_unstable();
        self.touched.dedup();
        let mut out = Vec::new();
        for &c in &self.touched {
            let x = std::mem::take(&mut self.acc[c as usize]);
            if x != 0 {
                out.push((c, x));
            }
        }
        self.touched.clear();
        out
    }

    /// Adds `v` to the row space; returns whether the rank grew.
    pub fn insert(&mut self, v: &[(u32, u64)]) -> bool {
        self.insert_from(v, usize::MAX)
    }

    /// Inserts `v`, remembering it as source `source` when history is kept.
    pub fn insert_from(&mut self, v: &[(u32, u64)], source: usize) -> bool {
        let mut uses = Vec::new();
        let track = self.history.is_some();
        let res = self.residual_with_uses(v, track.then_some(&mut uses));
        if res.is_empty() {
            return false;
        }
        self.push_residual(res, source, uses);
        true
    }

    fn push_residual(&mut self, mut res: SparseRow, source: usize, uses: Vec<(u32, u64)>) {
        let p = self.p;
        let lead = res[0].0;
        let inv = modinv(res[0].1, p).expect("nonzero residue is invertible");
        for e in res.iter_mut() {
            e.1 = mulmod(e.1, inv, p);
        }
        let new_idx = self.rows.len() as u32;
        let new_node = if let Some(h) = self.history.as_mut() {
            let uses = uses.into_iter().map(|(r, f)| (h.row_node[r as usize], f)).collect();
            h.nodes.push(Node::Create { source, scale: inv, uses });
            h.row_node.push((h.nodes.len() - 1) as u32);
            (h.nodes.len() - 1) as u32
        } else {
            0
        };
        // Clear the new pivot column from earlier rows.
        let holders = std::mem::take(&mut self.col_rows[lead as usize]);
        for j in holders {
            let row = &self.rows[j as usize];
            let Ok(pos) = row.binary_search_by_key(&lead, |e| e.0) else {
                continue;
            };
            let f = row[pos].1;
            if let Some(h) = self.history.as_mut() {
                let prev = h.row_node[j as usize];
                h.nodes.push(Node::Update { prev, sub: new_node, f });
                h.row_node[j as usize] = (h.nodes.len() - 1) as u32;
            }
            let merged = sub_scaled(row, &res, f, p);
            for &(c, _) in &merged {
                if c != self.pivot_col[j as usize] && row.binary_search_by_key(&c, |e| e.0).is_err() {
                    self.col_rows[c as usize].push(j);
                }
            }
            self.rows[j as usize] = merged;
        }
        for &(c, _) in &res[1..] {
            self.col_rows[c as usize].push(new_idx);
        }
        self.pivot_row[lead as usize] = new_idx;
        self.pivot_col.push(lead);
        self.rows.push(res);
    }

    /// Coordinates of `v` with respect to the stored rows, if `v` is in the
    /// row space: `v = Σ coords[i]·row(i)`.
    pub fn coordinates(&mut self, v: &[(u32, u64)]) -> Option<Vec<u64>> {
        if !self.residual(v).is_empty() {
            return None;
        }
        let mut coords = vec![0u64; self.rows.len()];
        for &(c, x) in v {
            if let Some(r) = self.row_of_pivot(c) {
                coords[r] = addmod(coords[r], x % self.p, self.p);
            }
        }
        Some(coords)
    }

    /// Rewrites `Σ coords[i]·row(i)` as `Σ λ_s·(source s)`; needs history.
    pub fn source_combination(&self, coords: &[u64]) -> Vec<(usize, u64)> {
        let h = self.history.as_ref().expect("row history was not recorded");
        let p = self.p;
        let mut coef = vec![0u64; h.nodes.len()];
        for (i, &c) in coords.iter().enumerate() {
            let nd = h.row_node[i] as usize;
            coef[nd] = addmod(coef[nd], c % p, p);
        }
        let mut out: std::collections::BTreeMap<usize, u64> = Default::default();
        for id in (0..h.nodes.len()).rev() {
            let c = coef[id];
            if c == 0 {
                continue;
            }
            match &h.nodes[id] {
                Node::Create { source, scale, uses } => {
                    let cs = mulmod(c, *scale, p);
                    let e = out.entry(*source).or_insert(0);
                    *e = addmod(*e, cs, p);
                    for &(nd, f) in uses {
                        coef[nd as usize] = submod(coef[nd as usize], mulmod(cs, f, p), p);
                    }
                }
                Node::Update { prev, sub, f } => {
                    coef[*prev as usize] = addmod(coef[*prev as usize], c, p);
                    coef[*sub as usize] = submod(coef[*sub as usize], mulmod(c, *f, p), p);
                }
            }
        }
        out.into_iter().filter(|e| e.1 != 0).collect()
    }

    /// The functional `e_c − Σ_i row_i[c]·e_{pivot_i}` for a non-pivot column
    /// `c`; it vanishes on every row and takes value `v[c]` on any `v` whose
    /// residual is supported on column `c` alone.
    pub fn dual_functional(&self, c: u32) -> SparseRow {
        assert!(!self.is_pivot(c), "dual functional needs a non-pivot column");
        let mut out = vec![(c, 1)];
        for (i, row) in self.rows.iter().enumerate() {
            if let Ok(pos) = row.binary_search_by_key(&c, |e| e.0) {
                out.push((self.pivot_col[i], self.p - row[pos].1));
            }
        }
        out.sort_unstable();
        out
    }
}

fn sub_scaled(a: &SparseRow, b: &SparseRow, f: u64, p: u64) -> SparseRow {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let ca = a.get(i).map_or(u32::MAX, |e| e.0);
        let cb = b.get(j).map_or(u32::MAX, |e| e.0);
        if ca < cb {
            out.push(a[i]);
            i += 1;
        } else {
            let t = mulmod(f, b[j].1, p);
            let v = if ca == cb {
                let v = submod(a[i].1, t, p);
                i += 1;
                v
            } else {
                p - t
            };
            j += 1;
            if v != 0 {
                out.push((cb, v));
            }
        }
    }
    out
}

/// Solves the dense system `A x = b` over `F_p`; `None` when `A` is singular.
pub fn solve_dense_mod(a: &[Vec<u64>], b: &[u64], p: u64) -> Option<Vec<u64>> {
    let n = a.len();
    let mut m: Vec<Vec<u64>> = a
        .iter()
        .zip(b)
        .map(|(row, &bi)| {
            let mut r: Vec<u64> = row.iter().map(|&x| x % p).collect();
            r.push(bi % p);
            r
        })
        .collect();
    for col in 0..n {
        let piv = (col..n).find(|&r| m[r][col] != 0)?;
        m.swap(col, piv);
        let inv = modinv(m[col][col], p)?;
        for x in m[col].iter_mut() {
            *x = mulmod(*x, inv, p);
        }
        let pivot_row = m[col].clone();
        let nz: Vec<usize> = (col..=n).filter(|&k| pivot_row[k] != 0).collect();
        for (r, row) in m.iter_mut().enumerate() {
            if r == col || row[col] == 0 {
                continue;
            }
            let f = row[col];
            for &k in &nz {
                row[k] = submod(row[k], mulmod(f, pivot_row[k], p), p);
            }
        }
    }
    Some(m.into_iter().map(|r| r[n]).collect())
}

/// Chinese remaindering of `(r mod m)` with `(s mod p)`.
pub fn crt(r: &BigInt, m: &BigInt, s: u64, p: u64) -> BigInt {
    let pm = BigInt::from(p);
    let m_mod_p = bigint_mod(m, p);
    let inv = modinv(m_mod_p, p).expect("coprime moduli");
    let diff = submod(s, bigint_mod(r, p), p);
    let t = mulmod(diff, inv, p);
    let out = r + m * BigInt::from(t);
    out.mod_floor(&(m * pm))
}

/// Rational reconstruction of `a mod m` with numerator and denominator at most
/// `sqrt(m/2)` in absolute value.
pub fn rational_reconstruct(a: &BigInt, m: &BigInt) -> Option<BigRational> {
    let bound = (m / BigInt::from(2)).sqrt();
    let (mut r0, mut r1) = (m.clone(), a.mod_floor(m));
    let (mut t0, mut t1) = (BigInt::zero(), BigInt::one());
    while r1 > bound {
        let q = &r0 / &r1;
        let r2 = &r0 - &q * &r1;
        let t2 = &t0 - &q * &t1;
        (r0, r1) = (r1, r2);
        (t0, t1) = (t1, t2);
    }
    if t1.is_zero() || t1.abs() > bound {
        return None;
    }
    if !(&r1).gcd(&t1).is_one() {
        return None;
    }
    Some(BigRational::new(r1, t1))
}

/// Multi-modular rational solving: `residues(p)` returns a candidate solution
/// modulo `p` (or `None` for an unlucky prime); residues are combined by CRT
/// until the reconstructed rational vector passes `verify`.
pub fn solve_rational(
    mut residues: impl FnMut(u64) -> Option<Vec<u64>>,
    mut verify: impl FnMut(&[BigRational]) -> bool,
    max_primes: usize,
) -> Result<Vec<BigRational>> {
    let mut acc: Option<(Vec<BigInt>, BigInt)> = None;
    for &p in large_primes().iter().take(max_primes) {
        let Some(sol) = residues(p) else { continue };
        let (vals, m) = match acc.take() {
            None => (sol.iter().map(|&x| BigInt::from(x)).collect(), BigInt::from(p)),
            Some((vals, m)) => {
                if vals.len() != sol.len() {
                    return Err(Error::Verification("inconsistent modular solutions".into()));
                }
                let next: Vec<BigInt> = vals
                    .iter()
                    .zip(&sol)
                    .map(|(r, &s)| crt(r, &m, s, p))
                    .collect();
                (next, &m * BigInt::from(p))
            }
        };
        let rec: Option<Vec<BigRational>> = vals.iter().map(|v| rational_reconstruct(v, &m)).collect();
        if let Some(rec) = rec {
            if verify(&rec) {
                return Ok(rec);
            }
        }
        acc = Some((vals, m));
    }
    Err(Error::Verification(format!(
        "no verified rational solution after {max_primes} primes"
    )))
}

/// Rank over `Q` of integer rows by fraction-free elimination; rows are sparse
/// `(column, value)` lists with distinct columns.
pub fn exact_rank(rows: Vec<Vec<(usize, BigInt)>>) -> usize {
    let mut pivots: Vec<Vec<(usize, BigInt)>> = Vec::new();
    let mut pivot_of: std::collections::HashMap<usize, usize> = Default::default();
    for row in rows {
        let mut v: Vec<(usize, BigInt)> = row.into_iter().filter(|e| !e.1.is_zero()).collect();
        v.sort_by_key(|e| e.0);
        loop {
            let Some((lead, _)) = v.first().cloned() else { break };
            let Some(&pi) = pivot_of.get(&lead) else { break };
            let prow = &pivots[pi];
            // v := a·v − b·prow with a = prow's lead, b = v's lead, then strip content.
            let a = prow[0].1.clone();
            let b = v[0].1.clone();
            v = combine(&v, &a, prow, &b);
            primitive(&mut v);
        }
        if let Some((lead, _)) = v.first() {
            pivot_of.insert(*lead, pivots.len());
            pivots.push(v);
        }
    }
    pivots.len()
}

/// Rank over `Q` of rational rows.
pub fn exact_rank_rational(rows: &[Vec<(usize, BigRational)>]) -> usize {
    exact_rank(
        rows.iter()
            .map(|row| {
                let l = row
                    .iter()
                    .fold(BigInt::one(), |acc, (_, x)| acc.lcm(x.denom()));
                row.iter()
                    .map(|(c, x)| (*c, (x * BigRational::from_integer(l.clone())).to_integer()))
                    .collect()
            })
            .collect(),
    )
}

fn combine(
    v: &[(usize, BigInt)],
    a: &BigInt,
    w: &[(usize, BigInt)],
    b: &BigInt,
) -> Vec<(usize, BigInt)> {
    let mut out = Vec::with_capacity(v.len() + w.len());
    let (mut i, mut j) = (0, 0);
    while i < v.len() || j < w.len() {
        let cv = v.get(i).map_or(usize::MAX, |e| e.0);
        let cw = w.get(j).map_or(usize::MAX, |e| e.0);
        let (c, x) = if cv < cw {
            i += 1;
            (cv, a * &v[i - 1].1)
        } else if cw < cv {
            j += 1;
            (cw, -(b * &w[j - 1].1))
        } else {
            i += 1;
            j += 1;
            (cv, a * &v[i - 1].1 - b * &w[j - 1].1)
        };
        if !x.is_zero() {
            out.push((c, x));
        }
    }
    out
}

fn primitive(v: &mut [(usize, BigInt)]) {
    let g = v.iter().fold(BigInt::zero(), |g, (_, x)| g.gcd(x));
    if !g.is_zero() && !g.is_one() {
        for e in v.iter_mut() {
            e.1 /= &g;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primes_and_inverses() {
        assert!(is_prime_u64((1 << 61) - 1));
        assert!(!is_prime_u64(561));
        let ps = large_primes();
        assert_eq!(ps.len(), 16);
        assert!(ps.windows(2).all(|w| w[0] > w[1]));
        assert_eq!(modinv(3, 7), Some(5));
        assert_eq!(modinv(2, 4), None);
    }

    #[test]
    fn rref_rank_and_membership() {
        let p = large_primes()[0];
        let mut m = ModRref::new(3, p);
        assert!(m.insert(&[(0, 1), (1, 1)]));
        assert!(m.insert(&[(1, 1), (2, 1)]));
        assert!(!m.insert(&[(0, 1), (2, p - 1)]));
        assert_eq!(m.rank(), 2);
        assert!(m.coordinates(&[(0, 2), (1, 3), (2, 1)]).is_some());
        assert!(m.coordinates(&[(2, 1)]).is_none());
        let phi = m.dual_functional(2);
        // φ vanishes on both rows.
        for r in [vec![(0u32, 1u64), (1, 1)], vec![(1, 1), (2, 1)]] {
            let s = r.iter().fold(0, |acc, &(c, x)| {
                let f = phi.iter().find(|e| e.0 == c).map_or(0, |e| e.1);
                addmod(acc, mulmod(f, x, p), p)
            });
            assert_eq!(s, 0);
        }
    }

    #[test]
    fn history_recovers_sources() {
        let p = large_primes()[1];
        let gens: Vec<SparseRow> = vec![
            vec![(1, 1), (2, 2)],
            vec![(0, 1), (1, 1)],
            vec![(0, 1), (2, 3)],
            vec![(0, 2), (1, 3), (2, 2)],
        ];
        let mut m = ModRref::with_history(3, p);
        for (i, g) in gens.iter().enumerate() {
            m.insert_from(g, i);
        }
        let target = vec![(0u32, 5u64), (1, 7), (2, 11)];
        let coords = m.coordinates(&target).unwrap();
        let comb = m.source_combination(&coords);
        let mut sum = [0u64; 3];
        for (s, l) in comb {
            for &(c, x) in &gens[s] {
                sum[c as usize] = addmod(sum[c as usize], mulmod(l, x, p), p);
            }
        }
        assert_eq!(sum, [5, 7, 11]);
    }

    #[test]
    fn reconstruction() {
        let m = BigInt::from(large_primes()[0]);
        let x = BigRational::new(BigInt::from(-7), BigInt::from(12));
        let r = BigInt::from(rational_mod(&x, large_primes()[0]).unwrap());
        assert_eq!(rational_reconstruct(&r, &m), Some(x));
    }

    #[test]
    fn multi_modular_solve() {
        // 2x + y = 1, x − y = 1/3  →  x = 4/9, y = 1/9
        let a = vec![vec![2u64, 1], vec![1, 0]];
        let sol = solve_rational(
            |p| {
                let mut aa = a.clone();
                aa[1][1] = p - 1;
                let third = modinv(3, p).unwrap();
                solve_dense_mod(&aa, &[1, third], p)
            },
            |_| true,
            4,
        )
        .unwrap();
        assert_eq!(sol[0], BigRational::new(4.into(), 9.into()));
        assert_eq!(sol[1], BigRational::new(1.into(), 9.into()));
    }

    #[test]
    fn fraction_free_rank() {
        let rows = vec![
            vec![(0, BigInt::from(2)), (1, BigInt::from(4))],
            vec![(0, BigInt::from(3)), (1, BigInt::from(6))],
            vec![(1, BigInt::from(5))],
        ];
        assert_eq!(exact_rank(rows), 2);
    }
}
