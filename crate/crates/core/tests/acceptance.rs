//! One PASS/FAIL line per acceptance criterion.
//!
//! Set `CAPELLI_LONG=1` to add the slow tier (jan3 at n = 4 and the double
//! Capelli check with t1, t2, t3 kept).

use std::collections::BTreeMap;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use capelli_core::delta::{alternate, verify_delta_alternation};
use capelli_core::evalalg::{
    capelli_matrix_check, cayley_hamilton_delta_check, codimension, is_identity_multilinear, FiniteAlgebra,
};
use capelli_core::freealg::{Poly, Var, Word};
use capelli_core::report::{Verdict, VerificationReport};
use capelli_core::sparsered::{
    evaluate_combination, reduce_full, reduce_step, verify_counting, FormalCombination, SlottedMonomial,
    SparseIdentity, TemplateLetter,
};
use capelli_core::symgroup::{verify_jan3, GroupAlgElem, Perm};
use capelli_core::tideal::{
    default_doubly_alternating, default_sof1_input, default_zubrilin2_input, default_zubrilin4_input,
    verify_delta_commute, verify_integrality_relation, verify_len2, verify_zubrilin2, verify_zubrilin4,
    Caps, Len2Tier, SpanOptions,
};
use capelli_core::young::{
    hook_bound_grid, sparse_degree_charp, strong_degree_char0, verify_hook_formula, verify_rect_hook_sums,
    verify_staircase, verify_symmetrizers,
};
use capelli_core::{Domain, Result, Scalar};

const Q: Domain = Domain::Rational;

/// Criteria expected to fail; see the staircase closed-form note in the README.
const KNOWN_FAILURES: &[u32] = &[8];

struct Outcome {
    ok: bool,
    notes: Vec<String>,
}

impl Outcome {
    fn new() -> Outcome {
        Outcome { ok: true, notes: Vec::new() }
    }

    fn check(&mut self, ok: bool, note: impl Into<String>) {
        let note = note.into();
        if !ok {
            self.ok = false;
            self.notes.push(format!("FAILED {note}"));
        } else {
            self.notes.push(note);
        }
    }

    fn report(&mut self, r: &VerificationReport, note: impl Into<String>) {
        let note = note.into();
        self.check(r.passed(), format!("{note} [{}]", verdict(r)));
    }
}

fn verdict(r: &VerificationReport) -> &'static str {
    match r.verdict {
        Verdict::Pass => "pass",
        Verdict::Fail => "fail",
        Verdict::SkippedCap => "skipped-cap",
    }
}

fn long_mode() -> bool {
    std::env::var("CAPELLI_LONG").is_ok_and(|v| v == "1")
}

fn criterion1(o: &mut Outcome) -> Result<()> {
    for n in 1..=3 {
        o.report(&verify_jan3(n, 4)?, format!("jan3 n={n}"));
    }
    if long_mode() {
        let start = Instant::now();
        let r = verify_jan3(4, 4)?;
        o.report(&r, format!("jan3 n=4 in {} ms", start.elapsed().as_millis()));
        o.check(start.elapsed() < Duration::from_secs(300), "jan3 n=4 under 5 min");
    }
    Ok(())
}

fn criterion2(o: &mut Outcome) -> Result<()> {
    for n in 1..=3 {
        let r = verify_delta_alternation(n, 50, 2024 + n as u64)?;
        o.report(&r, format!("n={n}: {} δ images alternating", r.payload["images_checked"]));
    }
    Ok(())
}

fn criterion3(o: &mut Outcome, opts: &SpanOptions) -> Result<()> {
    for n in 1..=2 {
        let r = verify_zubrilin4(n, &default_zubrilin4_input(n)?, opts)?;
        o.report(&r, format!("n={n} certified, sign-flipped control rejected"));
    }
    Ok(())
}

fn criterion4(o: &mut Outcome, opts: &SpanOptions) -> Result<()> {
    let z = Poly::var(Var::z(), Q);
    for k in 1..=2 {
        o.report(&verify_len2(2, Len2Tier::Fast, k, &z, opts)?, format!("fast tier n=2 k={k}"));
    }
    if long_mode() {
        let r = verify_len2(2, Len2Tier::WithTs, 1, &z, opts)?;
        let ok = matches!(r.verdict, Verdict::Pass | Verdict::SkippedCap);
        o.check(ok, format!("with-ts tier n=2 k=1 [{}]", verdict(&r)));
    } else {
        o.notes.push("with-ts tier in long mode only".into());
    }
    Ok(())
}

fn criterion5(o: &mut Outcome, opts: &SpanOptions) -> Result<()> {
    let f = default_doubly_alternating(2)?;
    let (t1, t2) = (Poly::var(Var::t(1), Q), Poly::var(Var::t(2), Q));
    let r = verify_delta_commute(2, &f, 1, 1, &t1, &t2, opts)?;
    o.report(&r, "n=2, h1=t1, h2=t2, mixed case exact");
    o.check(r.payload["xy_exact_equality"] == serde_json::json!(true), "mixed case equality");
    Ok(())
}

fn criterion6(o: &mut Outcome, opts: &SpanOptions) -> Result<()> {
    for n in 1..=2 {
        for (name, h) in [("z", Poly::var(Var::z(), Q)), ("1", Poly::one(Q))] {
            let r = verify_zubrilin2(n, &default_zubrilin2_input(n), &h, opts)?;
            o.report(&r, format!("alternating n={n} h={name}"));
            let r = verify_integrality_relation(n, &default_sof1_input(n)?, &h, opts)?;
            o.report(&r, format!("doubly alternating n={n} h={name}"));
        }
    }
    Ok(())
}

fn criterion7(o: &mut Outcome) -> Result<()> {
    let r = verify_hook_formula(8)?;
    o.report(&r, format!("{} shapes, n ≤ 8", r.payload["shapes"]));
    Ok(())
}

fn criterion8(o: &mut Outcome) -> Result<()> {
    o.report(&verify_rect_hook_sums(8)?, "rectangles u,v ≤ 8");
    for p in [2, 3, 5] {
        let r = verify_staircase(p, 6)?;
        let stated = r.payload["stated_form_matches"] == serde_json::json!(true);
        let squares = r.payload["sum_of_squares_form_matches"] == serde_json::json!(true);
        o.check(stated, format!("stated staircase form p={p}"));
        o.notes.push(format!("sum-of-squares form p={p}: {}", if squares { "matches" } else { "differs" }));
    }
    for p in [3, 5, 7] {
        let r = verify_staircase(p, 6)?;
        o.check(
            r.payload["hooks_prime_to_p"] == serde_json::json!(true),
            format!("staircase hooks prime to p={p}"),
        );
    }
    Ok(())
}

fn criterion9(o: &mut Outcome) -> Result<()> {
    let r = verify_symmetrizers(5)?;
    o.report(&r, format!("{} standard tableaux, n ≤ 5", r.payload["tableaux"]));
    Ok(())
}

fn criterion10(o: &mut Outcome) -> Result<()> {
    let s = strong_degree_char0(3)?;
    o.check(
        s.d_prime == 1936.into() && s.ceiling.stable_under_doubling && s.rectangle_condition.value,
        format!("char 0, d=3: d′ = {}", s.d_prime),
    );
    let c = sparse_degree_charp(3, 2)?;
    o.check(
        c.u.value == 6.into() && c.d_prime == 126.into() && c.u.stable_under_doubling && c.u_satisfies.value,
        format!("char 3, d=2: u = {}, d′ = {} (least u = {})", c.u.value, c.d_prime, c.least_u),
    );
    let grid = hook_bound_grid()?;
    let stable = grid
        .iter()
        .all(|r| r.payload.get("stable_under_doubling") == Some(&serde_json::json!(true)));
    o.check(grid.iter().all(VerificationReport::passed), format!("{} hook inequalities", grid.len()));
    o.check(stable, "hook decisions stable under doubling");
    Ok(())
}

/// Random polynomial alternating in x1..x5 with one y-letter per word.
fn random_alternating5(rng: &mut ChaCha8Rng) -> Poly {
    let mut f = Poly::zero(Q);
    for _ in 0..rng.gen_range(1..=2) {
        let mut letters: Vec<Var> = (1..=5).map(Var::x).collect();
        letters.shuffle(rng);
        letters.insert(rng.gen_range(0..=5), Var::y(1));
        f.add_term(Word::from_vars(letters), Scalar::from_i64(rng.gen_range(1..=4), Q));
    }
    alternate(&f, 5)
}

fn criterion11(o: &mut Outcome) -> Result<()> {
    let r = capelli_matrix_check(2, 4)?;
    o.check(
        r.passed() && r.payload["identity"] == serde_json::json!(false) && !r.payload["witness"].is_null(),
        "Capl_4 on M_2: witness found",
    );
    let m2 = FiniteAlgebra::matrix(2, Q)?;
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut all = true;
    for _ in 0..5 {
        let f = random_alternating5(&mut rng);
        all &= f.is_zero() || is_identity_multilinear(&f, &m2)?.identity;
    }
    o.check(all, "5 random polynomials alternating in 5 variables vanish on M_2 (exhaustive)");
    o.report(&capelli_matrix_check(2, 5)?, "Capl_5 on M_2");
    let c2 = codimension(&m2, 2)?.codimension;
    let c3 = codimension(&m2, 3)?.codimension;
    o.check(c2 == 2 && c3 == 6, format!("c_2(M_2) = {c2}, c_3(M_2) = {c3}"));
    let r = cayley_hamilton_delta_check(2, 100, 42)?;
    o.report(&r, format!("δ/char-poly convention {} on 100 random matrices", r.payload["convention"]));
    Ok(())
}

fn random_identity(d: usize, rng: &mut ChaCha8Rng) -> Result<SparseIdentity> {
    // Coefficients summing to zero, so the identity holds in commutative algebras.
    let mut g = GroupAlgElem::identity(d, Q);
    let perms: Vec<Perm> = Perm::all(d).filter(|p| !p.is_identity()).collect();
    let mut total = 1i64;
    for p in perms.iter().take(perms.len() - 1) {
        let c = rng.gen_range(-2..=2);
        total += c;
        g.add_term(p.clone(), Scalar::from_i64(c, Q));
    }
    g.add_term(perms[perms.len() - 1].clone(), Scalar::from_i64(-total, Q));
    if g.support_size() < 2 {
        return Ok(SparseIdentity::standard(d, Q));
    }
    SparseIdentity::new(&g)
}

fn random_monomial(rng: &mut ChaCha8Rng, d: usize) -> SlottedMonomial {
    let n = rng.gen_range(d..=5);
    let mut lengths = vec![0usize; n];
    for _ in 0..rng.gen_range(d * d..=12) {
        lengths[rng.gen_range(0..n)] += 1;
    }
    let slots = lengths.iter().map(|&l| (0..l).map(|_| rng.gen_range(1..=2)).collect()).collect();
    let mut template: Vec<TemplateLetter> = (0..n).map(TemplateLetter::Slot).collect();
    template.shuffle(rng);
    template.insert(rng.gen_range(0..=n), TemplateLetter::Side("y1".into()));
    SlottedMonomial::new(template, slots).expect("template is multilinear")
}

fn criterion12(o: &mut Outcome) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let alg = FiniteAlgebra::truncated_poly(4, Q)?;
    let element = |rng: &mut ChaCha8Rng| alg.element(&(0..4).map(|_| rng.gen_range(-3..=3)).collect::<Vec<_>>());
    let (mut instances, mut steps, mut descent, mut bound, mut values) = (0, 0u64, true, true, true);
    for _ in 0..200 {
        let d = rng.gen_range(2..=3);
        let id = if d == 2 { SparseIdentity::commutator(Q) } else { random_identity(3, &mut rng)? };
        let m = random_monomial(&mut rng, d);
        if m.long_slots(d).len() >= d {
            let step = reduce_step(&m, &id)?;
            descent &= step.terms().all(|(t, _)| t.lengths() < m.lengths());
        }
        let c = FormalCombination::single(m, Scalar::from_i64(rng.gen_range(1..=3), Q));
        let r = reduce_full(&c, &id, true)?;
        instances += 1;
        steps += r.steps;
        descent &= r.trace.iter().flatten().all(|s| s.output_lengths.iter().all(|l| *l < s.lengths));
        bound &= r.result.max_long_slots(d) < d;
        let gens = vec![element(&mut rng)?, element(&mut rng)?];
        let side: BTreeMap<String, _> = [("y1".to_string(), element(&mut rng)?)].into();
        values &= evaluate_combination(&c, &gens, &side, &alg)? == evaluate_combination(&r.result, &gens, &side, &alg)?;
    }
    o.check(descent, format!("strict descent on every step ({steps} steps, {instances} instances)"));
    o.check(bound, "at most d−1 long slots after reduction");
    o.check(values, "values preserved in F[t]/(t^4)");
    for r in [2, 3] {
        for d in [2, 3] {
            o.report(&verify_counting(r, d)?, format!("counting r={r} d={d}"));
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let opts = SpanOptions::with_caps(Caps::from_env());
    type Run<'a> = Box<dyn Fn(&mut Outcome) -> Result<()> + 'a>;
    let criteria: Vec<(u32, &str, u64, Run)> = vec![
        (1, "subset-element identity in Q[S_2n]", 5, Box::new(criterion1)),
        (2, "δ-operators preserve alternation", 10, Box::new(criterion2)),
        (3, "alternated z-power sum in CAP_{n+1}", 60, Box::new(|o| criterion3(o, &opts))),
        (4, "double Capelli x/y congruence", 60, Box::new(|o| criterion4(o, &opts))),
        (5, "δ-commutation congruences", 60, Box::new(|o| criterion5(o, &opts))),
        (6, "signed δ-sum relations", 60, Box::new(|o| criterion6(o, &opts))),
        (7, "hook length formula", 30, Box::new(criterion7)),
        (8, "rectangle and staircase hook sums", 5, Box::new(criterion8)),
        (9, "Young symmetrizers", 120, Box::new(criterion9)),
        (10, "degree bound calculators", 5, Box::new(criterion10)),
        (11, "matrix-algebra checks", 120, Box::new(criterion11)),
        (12, "sparse reduction and counting", 60, Box::new(criterion12)),
    ];
    let mut unexpected = Vec::new();
    for (id, name, budget, run) in &criteria {
        let start = Instant::now();
        let mut o = Outcome::new();
        if let Err(e) = run(&mut o) {
            o.check(false, format!("error: {e}"));
        }
        let elapsed = start.elapsed();
        let budget_limit = if long_mode() && matches!(id, 1 | 4) { 1800 } else { *budget };
        o.check(elapsed.as_secs() < budget_limit, format!("under {budget_limit} s"));
        let status = if o.ok { "PASS" } else { "FAIL" };
        let known = if !o.ok && KNOWN_FAILURES.contains(id) { " (known)" } else { "" };
        println!(
            "criterion {id:>2}: {status}{known} {name} ({} ms): {}",
            elapsed.as_millis(),
            o.notes.join("; ")
        );
        if !o.ok && !KNOWN_FAILURES.contains(id) {
            unexpected.push(*id);
        }
    }
    if unexpected.is_empty() {
        ExitCode::SUCCESS
    } else {
        println!("unexpected failures: {unexpected:?}");
        ExitCode::FAILURE
    }
}
