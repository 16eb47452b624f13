//! Report-producing checks over whole families of shapes.

use std::time::Instant;

use num_bigint::BigInt;
use num_traits::One;
use serde_json::json;

use super::{
    count_syt, dim_specht, fayers_simple, hook_sum, hooks, rect_hook_sum, staircase_hook_sum,
    staircase_hook_sum_n_form, symmetrizer_module_dim, symmetrizer_scalar, wide_staircase, Partition,
    Tableau, SYMMETRIZER_CAP, SYT_COUNT_CAP,
};
use crate::error::{invalid, resource_limit, Result};
use crate::report::{Verdict, VerificationReport};
use crate::scalar::{Domain, Scalar};

fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, i| acc * i)
}

/// `dim_specht = count_syt` for every partition of every `n ≤ max_n`, and
/// `Σ_λ (s^λ)² = n!`.
pub fn verify_hook_formula(max_n: usize) -> Result<VerificationReport> {
    let start = Instant::now();
    if max_n > SYT_COUNT_CAP {
        return Err(resource_limit("hook formula n", max_n as u128, SYT_COUNT_CAP as u128));
    }
    let mut shapes = 0usize;
    let mut mismatch = None;
    let mut square_sums_ok = true;
    for n in 1..=max_n {
        let mut sum = BigInt::from(0);
        for shape in Partition::all(n) {
            shapes += 1;
            let d = dim_specht(&shape);
            let c = count_syt(&shape)?;
            if d != c && mismatch.is_none() {
                mismatch = Some(json!({"shape": shape, "hook": d.to_string(), "count": c.to_string()}));
            }
            sum += &d * &d;
        }
        square_sums_ok &= sum == factorial(n);
    }
    let ok = mismatch.is_none() && square_sums_ok;
    Ok(VerificationReport::new("hook-formula")
        .param("max_n", max_n)
        .put("shapes", shapes)
        .put("square_sums_match", square_sums_ok)
        .put("witness", mismatch)
        .verdict(if ok { Verdict::Pass } else { Verdict::Fail })
        .finish(start))
}

/// For every standard tableau with `n ≤ max_n`: `a_T² = α_T·a_T` with
/// `α_T = n!/s^λ`, and `dim Q[S_n]·a_T = s^λ`.
pub fn verify_symmetrizers(max_n: usize) -> Result<VerificationReport> {
    let start = Instant::now();
    if max_n > SYMMETRIZER_CAP {
        return Err(resource_limit("symmetrizer n", max_n as u128, SYMMETRIZER_CAP as u128));
    }
    let mut tableaux = 0usize;
    let mut failure = None;
    'outer: for n in 1..=max_n {
        for shape in Partition::all(n) {
            let s = dim_specht(&shape);
            let expected_alpha = Scalar::from_bigint(factorial(n) / &s, Domain::Rational);
            for t in Tableau::standard(&shape) {
                tableaux += 1;
                let alpha = symmetrizer_scalar(&t, Domain::Rational)?;
                let dim = symmetrizer_module_dim(&t)?;
                if alpha != expected_alpha || BigInt::from(dim) != s {
                    failure = Some(json!({
                        "tableau": t.to_string(),
                        "alpha": alpha.to_string(),
                        "module_dim": dim,
                        "s_lambda": s.to_string(),
                    }));
                    break 'outer;
                }
            }
        }
    }
    Ok(VerificationReport::new("symmetrizer")
        .param("max_n", max_n)
        .put("tableaux", tableaux)
        .put("witness", &failure)
        .verdict(if failure.is_none() { Verdict::Pass } else { Verdict::Fail })
        .finish(start))
}

/// Rectangle hook sums `uv(u+v)/2` against direct grid sums for `u, v ≤ max`.
pub fn verify_rect_hook_sums(max: u64) -> Result<VerificationReport> {
    let start = Instant::now();
    let mut failure = None;
    for u in 1..=max {
        for v in 1..=max {
            let direct = hook_sum(&Partition::rectangle(u as usize, v as usize));
            if direct != rect_hook_sum(u, v) && failure.is_none() {
                failure = Some(json!({"u": u, "v": v, "direct": direct, "closed_form": rect_hook_sum(u, v)}));
            }
        }
    }
    Ok(VerificationReport::new("rect-hook-sum")
        .param("max", max)
        .put("witness", &failure)
        .verdict(if failure.is_none() { Verdict::Pass } else { Verdict::Fail })
        .finish(start))
}

/// Wide staircase of width `p−1` and height `u`, for `u ≤ max_u`: the
/// stated closed form `C(p,2)(2u+1)n/3` and the form `C(p,2)·u(u+1)(2u+1)/6`
/// against the direct hook sum, and whether every hook is prime to `p`.
/// The verdict follows the stated form; the other result is reported.
pub fn verify_staircase(p: u64, max_u: u64) -> Result<VerificationReport> {
    let start = Instant::now();
    if max_u == 0 {
        return Err(invalid("max_u must be positive"));
    }
    let mut rows = Vec::new();
    let mut stated_ok = true;
    let mut sum_of_squares_ok = true;
    let mut coprime_ok = true;
    for u in 1..=max_u {
        let shape = wide_staircase(p, u as usize)?;
        let direct = hook_sum(&shape);
        let stated = staircase_hook_sum_n_form(p, u);
        let squares = staircase_hook_sum(p, u);
        let coprime = hooks(&shape).iter().flatten().all(|&h| h % p != 0);
        let simple = fayers_simple(&shape, p)?;
        stated_ok &= stated == Some(direct);
        sum_of_squares_ok &= squares == direct;
        coprime_ok &= coprime;
        rows.push(json!({
            "u": u,
            "n": shape.n(),
            "direct": direct,
            "stated_form": stated,
            "sum_of_squares_form": squares,
            "hooks_prime_to_p": coprime,
            "simple": simple.simple,
        }));
    }
    let ok = stated_ok && coprime_ok;
    Ok(VerificationReport::new("staircase")
        .param("p", p)
        .param("max_u", max_u)
        .put("stated_form_matches", stated_ok)
        .put("sum_of_squares_form_matches", sum_of_squares_ok)
        .put("hooks_prime_to_p", coprime_ok)
        .put("rows", rows)
        .verdict(if ok { Verdict::Pass } else { Verdict::Fail })
        .finish(start))
}
