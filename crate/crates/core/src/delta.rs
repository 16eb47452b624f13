//! The δ operators, the alternator `f ↦ f̃`, and the signed δ-sums whose
//! vanishing modulo Capelli T-ideals is checked in [`crate::tideal`].

use std::collections::BTreeMap;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::error::{invalid, Result};
use crate::freealg::{alternation_report, Poly, Substitution, Var, VarKind, Word};
use crate::report::{Verdict, VerificationReport};
use crate::scalar::{Domain, Scalar};
use crate::symgroup::Perm;

/// `δ_{k,h}^{(kind,n)}`: affects the variables `kind_1..kind_n` by name.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeltaSpec {
    pub kind: VarKind,
    pub n: usize,
    pub k: usize,
    pub h: Poly,
}

impl DeltaSpec {
    pub fn new(kind: VarKind, n: usize, k: usize, h: Poly) -> Result<DeltaSpec> {
        if !matches!(kind, VarKind::X | VarKind::Y) {
            return Err(invalid("δ acts on x- or y-variables"));
        }
        if k > n {
            return Err(invalid(format!("δ order k = {k} exceeds n = {n}")));
        }
        Ok(DeltaSpec { kind, n, k, h })
    }

    pub fn x(n: usize, k: usize, h: Poly) -> Result<DeltaSpec> {
        DeltaSpec::new(VarKind::X, n, k, h)
    }

    pub fn y(n: usize, k: usize, h: Poly) -> Result<DeltaSpec> {
        DeltaSpec::new(VarKind::Y, n, k, h)
    }

    pub fn affected(&self) -> Vec<Var> {
        affected(self.kind, self.n)
    }
}

fn affected(kind: VarKind, n: usize) -> Vec<Var> {
    (1..=n as u32).map(|i| Var::of_kind(kind, i)).collect()
}

fn xs(n: usize) -> Vec<Var> {
    affected(VarKind::X, n)
}

/// k-subsets of `0..n` in lexicographic order.
pub(crate) fn k_subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// `Σ_{i_1<⋯<i_k} f|_{v_{i_j} → h·v_{i_j}}`.
pub fn delta(f: &Poly, spec: &DeltaSpec) -> Result<Poly> {
    let vars = spec.affected();
    if !f.is_multilinear_in(&vars) {
        return Err(invalid(format!("δ needs a polynomial multilinear in {vars:?}")));
    }
    f.domain().check_same(spec.h.domain())?;
    let mut out = Poly::zero(f.domain());
    for subset in k_subsets(spec.n, spec.k) {
        let mut s = Substitution::new();
        for i in subset {
            s.set(vars[i], &spec.h * &Poly::var(vars[i], f.domain()));
        }
        out = &out + &f.substitute(&s);
    }
    Ok(out)
}

fn require_multilinear_alternating(f: &Poly, n: usize, extra: usize) -> Result<()> {
    let all = xs(n + extra);
    if !f.is_multilinear_in(&all) {
        return Err(invalid(format!("expected a polynomial multilinear in {all:?}")));
    }
    if !alternation_report(f, &xs(n)).alternating() {
        return Err(invalid(format!("expected a polynomial alternating in {:?}", xs(n))));
    }
    Ok(())
}

/// `Σ_{k=1}^{n+1} (−1)^{k−1} f(x_1,…,x_{k−1},x_{k+1},…,x_{n+1},x_k)`.
pub fn tilde(f: &Poly, n: usize) -> Result<Poly> {
    require_multilinear_alternating(f, n, 1)?;
    let mut out = Poly::zero(f.domain());
    for k in 1..=n + 1 {
        // Argument slot i receives x_{i+1} for k ≤ i ≤ n and slot n+1 receives x_k.
        let mut map = BTreeMap::new();
        for i in k..=n {
            map.insert(Var::x(i as u32), Var::x(i as u32 + 1));
        }
        map.insert(Var::x(n as u32 + 1), Var::x(k as u32));
        let term = f.rename(&map);
        out = if k % 2 == 1 { &out + &term } else { &out - &term };
    }
    Ok(out)
}

/// `Σ_{j=0}^n (−1)^j δ_{j,z}^{(x,n)}(f(x_1,…,x_n, z^{n−j} x_{n+1}))`.
pub fn zubrilin_sum_a(f: &Poly, n: usize) -> Result<Poly> {
    require_multilinear_alternating(f, n, 1)?;
    let d = f.domain();
    let z = Poly::var(Var::z(), d);
    let last = Var::x(n as u32 + 1);
    let mut out = Poly::zero(d);
    for j in 0..=n {
        let shifted = f.substitute(
            &Substitution::new().with(last, &z.pow((n - j) as u32) * &Poly::var(last, d)),
        );
        let term = delta(&shifted, &DeltaSpec::x(n, j, z.clone())?)?;
        out = if j % 2 == 0 { &out + &term } else { &out - &term };
    }
    Ok(out)
}

/// `Σ_{k=0}^n (−1)^k h^{n−k} δ_{k,h}^{(x,n)}(g)`.
pub fn zubrilin_sum_b(g: &Poly, n: usize, h: &Poly) -> Result<Poly> {
    require_multilinear_alternating(g, n, 0)?;
    signed_delta_sum(g, VarKind::X, n, h)
}

/// The same sum for an arbitrary affected family (used with doubly
/// alternating inputs, where the y-family is equally valid).
pub fn signed_delta_sum(g: &Poly, kind: VarKind, n: usize, h: &Poly) -> Result<Poly> {
    let mut out = Poly::zero(g.domain());
    for k in 0..=n {
        let term = &h.pow((n - k) as u32) * &delta(g, &DeltaSpec::new(kind, n, k, h.clone())?)?;
        out = if k % 2 == 0 { &out + &term } else { &out - &term };
    }
    Ok(out)
}

/// Checks that the z-degree-k part of `f|_{x_i → (z+1)x_i}` equals
/// `δ_{k,z}^{(x,n)}(f)` for every `k`, and that the parts sum back to the
/// full substitution.
pub fn epsilon_expansion_check(f: &Poly, n: usize) -> Result<VerificationReport> {
    let start = Instant::now();
    let d = f.domain();
    let vars = xs(n);
    if !f.is_multilinear_in(&vars) {
        return Err(invalid(format!("expected a polynomial multilinear in {vars:?}")));
    }
    if f.vars().contains(&Var::z()) {
        return Err(invalid("z is reserved for the grading and must not occur in f"));
    }
    let z = Poly::var(Var::z(), d);
    let one = Poly::one(d);
    let zp1 = &z + &one;
    let mut s = Substitution::new();
    for &v in &vars {
        s.set(v, &zp1 * &Poly::var(v, d));
    }
    let full = f.substitute(&s);
    let mut ok = true;
    let mut sum = Poly::zero(d);
    let mut sizes = Vec::new();
    for k in 0..=n {
        let component = full.degree_component(Var::z(), k);
        let expect = delta(f, &DeltaSpec::x(n, k, z.clone())?)?;
        ok &= component == expect;
        sizes.push(component.num_terms());
        sum = &sum + &component;
    }
    ok &= sum == full;
    Ok(VerificationReport::new("epsilon-expansion")
        .param("n", n)
        .param("f", f.to_string())
        .put("component_terms", sizes)
        .verdict(if ok { Verdict::Pass } else { Verdict::Fail })
        .hash_of(full.to_string())
        .finish(start))
}

/// `Σ_σ sgn(σ)·f|_{x_i → x_σ(i)}` over `σ ∈ S_n`.
pub fn alternate(f: &Poly, n: usize) -> Poly {
    let vars = xs(n);
    let mut out = Poly::zero(f.domain());
    for sigma in Perm::all(n) {
        let map: BTreeMap<Var, Var> = (0..n).map(|i| (vars[i], vars[sigma.image(i)])).collect();
        out = &out + &f.rename(&map).scale_i64(sigma.sgn() as i64);
    }
    out
}

/// A random polynomial multilinear in `x_1..x_n`, with each word also
/// carrying some side letters from `y_1, t_1, z`, alternated in the x's.
pub fn random_alternating(n: usize, rng: &mut impl Rng, domain: Domain) -> Poly {
    let side = [Var::y(1), Var::t(1), Var::z()];
    let mut f = Poly::zero(domain);
    for _ in 0..rng.gen_range(1..=3) {
        let mut letters: Vec<Var> = xs(n);
        letters.shuffle(rng);
        let mut w = Word::empty();
        for v in letters {
            if rng.gen_bool(0.4) {
                w.push(side[rng.gen_range(0..side.len())]);
            }
            w.push(v);
        }
        f.add_term(w, Scalar::from_i64(rng.gen_range(-3..=3), domain));
    }
    alternate(&f, n)
}

/// δ preserves alternation: for `samples` random alternating inputs and
/// every `k ≤ n`, each `δ_{k,h}^{(x,n)}` image with `h ∈ {z, t1 + 1, 1}`
/// is again alternating in `x_1..x_n`.
pub fn verify_delta_alternation(n: usize, samples: usize, seed: u64) -> Result<VerificationReport> {
    let start = Instant::now();
    let d = Domain::Rational;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let hs = [
        Poly::var(Var::z(), d),
        &Poly::var(Var::t(1), d) + &Poly::one(d),
        Poly::one(d),
    ];
    let vars = xs(n);
    let mut images = 0u64;
    let mut nonzero_inputs = 0u64;
    let mut failure = None;
    'outer: for _ in 0..samples {
        let f = random_alternating(n, &mut rng, d);
        if !f.is_zero() {
            nonzero_inputs += 1;
        }
        for h in &hs {
            for k in 0..=n {
                let g = delta(&f, &DeltaSpec::x(n, k, h.clone())?)?;
                images += 1;
                if !alternation_report(&g, &vars).alternating() {
                    failure = Some(json!({"f": f.to_string(), "h": h.to_string(), "k": k}));
                    break 'outer;
                }
            }
        }
    }
    Ok(VerificationReport::new("delta-alternation")
        .param("n", n)
        .param("samples", samples)
        .param("seed", seed)
        .put("images_checked", images)
        .put("nonzero_inputs", nonzero_inputs)
        .put("witness", &failure)
        .verdict(if failure.is_none() { Verdict::Pass } else { Verdict::Fail })
        .finish(start))
}
