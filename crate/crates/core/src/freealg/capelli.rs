use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{invalid, Result};
use crate::scalar::{Domain, Scalar};
use crate::symgroup::Perm;

use super::poly::{Poly, Substitution};
use super::word::{Var, Word};

/// `Capl_k(x_1..x_k; y_1..y_k) = Σ_π sgn(π) x_{π(1)} y_1 ⋯ x_{π(k)} y_k`.
pub fn capelli(k: usize, domain: Domain) -> Result<Poly> {
    if k == 0 {
        return Err(invalid("Capelli polynomial needs k >= 1"));
    }
    let xs: Vec<Var> = (1..=k as u32).map(Var::x).collect();
    let ys: Vec<Var> = (1..=k as u32).map(Var::y).collect();
    Ok(capelli_in(&xs, &ys, domain))
}

/// The Capelli polynomial alternating in `xs` with `ys` as the bridge letters.
pub fn capelli_in(xs: &[Var], ys: &[Var], domain: Domain) -> Poly {
    let ps: Vec<Word> = xs.iter().map(|&v| Word::letter(v)).collect();
    let qs: Vec<Word> = ys.iter().map(|&v| Word::letter(v)).collect();
    capelli_words(&ps, &qs, domain)
}

/// The instance `Capl_k(p_1..p_k; q_1..q_k)` with monomial slots.
pub fn capelli_words(ps: &[Word], qs: &[Word], domain: Domain) -> Poly {
    assert_eq!(ps.len(), qs.len(), "slot count mismatch");
    let k = ps.len();
    let mut out = Poly::zero(domain);
    for pi in Perm::all(k) {
        let mut w = Word::empty();
        for (i, q) in qs.iter().enumerate() {
            w.extend_from(&ps[pi.image(i)]);
            w.extend_from(q);
        }
        out.add_term(w, Scalar::from_i64(pi.sgn() as i64, domain));
    }
    out
}

/// Index of the first fresh t-variable of `double_capelli(n)`: t1, t2, t3 are
/// the outer letters, the x-side bridges follow, then the y-side bridges.
pub fn double_capelli_bridges(n: usize) -> (Vec<Var>, Vec<Var>) {
    let n = n as u32;
    let xs = (4..4 + n).map(Var::t).collect();
    let ys = (4 + n..4 + 2 * n).map(Var::t).collect();
    (xs, ys)
}

/// `t1·Capl_n(x; t_4..t_{n+3})·t2·Capl_n(y; t_{n+4}..t_{2n+3})·t3`.
pub fn double_capelli(n: usize, domain: Domain) -> Result<Poly> {
    if n == 0 {
        return Err(invalid("double Capelli polynomial needs n >= 1"));
    }
    let xs: Vec<Var> = (1..=n as u32).map(Var::x).collect();
    let ys: Vec<Var> = (1..=n as u32).map(Var::y).collect();
    let (tx, ty) = double_capelli_bridges(n);
    let t = |i| Poly::var(Var::t(i), domain);
    Ok(&(&(&(&t(1) * &capelli_in(&xs, &tx, domain)) * &t(2)) * &capelli_in(&ys, &ty, domain))
        * &t(3))
}

/// Substitutes the unit for each of `vars`.
pub fn specialize_to_unit(p: &Poly, vars: &[Var]) -> Poly {
    let mut s = Substitution::new();
    for &v in vars {
        s.set(v, Poly::one(p.domain()));
    }
    p.substitute(&s)
}

/// Outcome of [`is_alternating`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct AlternationReport {
    pub multilinear: bool,
    /// Every transposition of two designated variables negates the polynomial.
    pub swap_negates: bool,
    /// Identifying any two designated variables gives zero.
    pub vanishes_on_equal: bool,
}

impl AlternationReport {
    pub fn alternating(&self) -> bool {
        self.multilinear && self.swap_negates
    }
}

pub fn is_alternating(p: &Poly, vars: &[Var]) -> bool {
    alternation_report(p, vars).alternating()
}

pub fn alternation_report(p: &Poly, vars: &[Var]) -> AlternationReport {
    let multilinear = p.is_multilinear_in(vars);
    let mut swap_negates = true;
    let mut vanishes_on_equal = true;
    for i in 0..vars.len() {
        for j in i + 1..vars.len() {
            let swap: BTreeMap<Var, Var> = [(vars[i], vars[j]), (vars[j], vars[i])].into();
            if swap_negates && !(&p.rename(&swap) + p).is_zero() {
                swap_negates = false;
            }
            let merge: BTreeMap<Var, Var> = [(vars[j], vars[i])].into();
            if vanishes_on_equal && !p.rename(&merge).is_zero() {
                vanishes_on_equal = false;
            }
        }
    }
    AlternationReport {
        multilinear,
        swap_negates,
        vanishes_on_equal,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::freealg::parse_poly;

    const Q: Domain = Domain::Rational;

    #[test]
    fn small_capelli() {
        assert!(capelli(0, Q).is_err());
        assert_eq!(capelli(1, Q).unwrap(), parse_poly("x1*y1", Q).unwrap());
        assert_eq!(
            capelli(2, Q).unwrap(),
            parse_poly("x1*y1*x2*y2 - x2*y1*x1*y2", Q).unwrap()
        );
        let c3 = capelli(3, Q).unwrap();
        assert_eq!(c3.num_terms(), 6);
        let w = parse_poly("x3*y1*x2*y2*x1*y3", Q).unwrap();
        let (w, _) = w.terms().next().unwrap();
        assert_eq!(c3.coeff(w), Scalar::from_i64(-1, Q));
    }

    #[test]
    fn double_capelli_small() {
        assert_eq!(
            double_capelli(1, Q).unwrap(),
            parse_poly("t1*x1*t4*t2*y1*t5*t3", Q).unwrap()
        );
        let d2 = double_capelli(2, Q).unwrap();
        assert_eq!(d2.num_terms(), 4);
        let xs = [Var::x(1), Var::x(2)];
        let ys = [Var::y(1), Var::y(2)];
        assert!(is_alternating(&d2, &xs));
        assert!(is_alternating(&d2, &ys));
    }

    #[test]
    fn alternation_examples() {
        let xs = [Var::x(1), Var::x(2)];
        assert!(is_alternating(&capelli(2, Q).unwrap(), &xs));
        assert!(!is_alternating(&parse_poly("x1*x2 + x2*x1", Q).unwrap(), &xs));
        let comm = parse_poly("x1*x2 - x2*x1", Q).unwrap();
        let r = alternation_report(&comm, &xs);
        assert!(r.alternating() && r.vanishes_on_equal);
        // Not multilinear: swap-antisymmetric but rejected.
        assert!(!is_alternating(&parse_poly("x1*x1*x2 - x2*x2*x1", Q).unwrap(), &xs));
    }
}
