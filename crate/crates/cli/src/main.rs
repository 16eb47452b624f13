use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use num_bigint::BigInt;
use serde_json::json;

use capelli_core::delta::verify_delta_alternation;
use capelli_core::evalalg::{capelli_matrix_check, cayley_hamilton_delta_check, codimension, FiniteAlgebra};
use capelli_core::freealg::parse_poly;
use capelli_core::report::{golden_compare, GoldenOutcome, Verdict, VerificationReport};
use capelli_core::sparsered::{verify_counting, verify_reduction, SparseReductionInput};
use capelli_core::symgroup::verify_jan3;
use capelli_core::tideal::{
    default_doubly_alternating, default_sof1_input, default_zubrilin2_input, default_zubrilin4_input,
    verify_delta_commute, verify_integrality_relation, verify_len2, verify_zubrilin2, verify_zubrilin4,
    Caps, Len2Tier, SpanOptions,
};
use capelli_core::young::{
    bound_hook5, bound_hook51, capelli_degree_from_sparse, hook_bound_grid, regev_codim_bound,
    sparse_degree_charp, strong_degree_char0, verify_hook_formula, verify_rect_hook_sums,
    verify_staircase, verify_symmetrizers,
};
use capelli_core::{Domain, Error, Result};

/// Exact verification harness for Capelli identities and related PI-theory bounds.
///
/// Reports are printed as JSON lines. Exit status: 0 when every check passes,
/// 1 on a mathematical failure or golden drift, 2 on usage or resource errors
/// (including checks skipped at a resource cap).
#[derive(Parser)]
#[command(name = "capelli", version)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Largest multilinear component dimension attempted.
    #[arg(long, global = true, env = "CAPELLI_MAX_DIM")]
    max_dim: Option<u64>,
    /// Largest number of distinct T-ideal generators attempted.
    #[arg(long, global = true, env = "CAPELLI_MAX_GENS")]
    max_gens: Option<u64>,
    /// Compare each report with a stored copy in DIR (created when missing).
    #[arg(long, global = true, value_name = "DIR")]
    golden: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Run a verification check.
    #[command(subcommand)]
    Verify(Verify),
    /// Compute an explicit degree bound.
    #[command(subcommand)]
    Bound(Bound),
    /// Rewrite with a sparse identity.
    #[command(subcommand)]
    Reduce(Reduce),
    /// Codimension c_n of an algebra given by structure constants.
    Codim {
        #[arg(long, value_name = "FILE")]
        alg: PathBuf,
        #[arg(long)]
        n: usize,
    },
}

#[derive(Subcommand)]
enum Verify {
    /// Group-algebra identity for the subset elements of Q[S_2n].
    Jan3 {
        #[arg(long)]
        n: usize,
    },
    /// Alternated z-power sum lies in CAP_{n+1}.
    Zubrilin4 {
        #[arg(long)]
        n: usize,
        /// Input alternating in x1..xn and linear in x_{n+1}.
        #[arg(long)]
        f: Option<String>,
    },
    /// Signed δ-sum of an x-alternating polynomial lies in CAP_{n+1}.
    Zubrilin2 {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        f: Option<String>,
        #[arg(long, default_value = "z")]
        h: String,
    },
    /// x/y symmetry of the double Capelli polynomial modulo CAP_{n+1}.
    Len2 {
        #[arg(long)]
        n: usize,
        /// Keep the outer bridge letters t1, t2, t3.
        #[arg(long)]
        with_ts: bool,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value = "z")]
        h: String,
    },
    /// Commutation of δ-operators on a doubly alternating polynomial.
    DeltaCommute {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[arg(long, default_value_t = 1)]
        l: usize,
        #[arg(long, default_value = "t1")]
        h1: String,
        #[arg(long, default_value = "t2")]
        h2: String,
        #[arg(long)]
        f: Option<String>,
    },
    /// Integrality relation for a doubly alternating polynomial.
    Sof1 {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        f: Option<String>,
        #[arg(long, default_value = "z")]
        h: String,
    },
    /// δ-operators preserve alternation on random inputs.
    Alternation {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 50)]
        samples: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Hook length formula against tableau counts.
    HookFormula {
        #[arg(long)]
        max_n: usize,
    },
    /// Young symmetrizer scalars and module dimensions.
    Symmetrizer {
        #[arg(long)]
        max_n: usize,
    },
    /// Wide-staircase hook sums and hook coprimality.
    Staircase {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        max_u: u64,
    },
    /// Rectangle hook sums against direct grid sums.
    Rect {
        #[arg(long, default_value_t = 8)]
        max: u64,
    },
    /// Strict hook-product inequalities on the whole in-cap grid.
    HookBounds,
    /// Characteristic-polynomial action of δ on Capl_n over M_n.
    ChDelta {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
    /// Whether Capl_n is an identity of M_k.
    CapelliMatrix {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        n: usize,
    },
    /// Word-counting step that turns a sparse identity into a Capelli identity.
    Counting {
        #[arg(long)]
        r: u64,
        #[arg(long)]
        d: u64,
    },
}

#[derive(Subcommand)]
enum Bound {
    /// Codimension bound (d−1)^{2m}.
    Regev {
        #[arg(long)]
        d: u64,
        #[arg(long)]
        m: u32,
    },
    /// Strong-identity degree in characteristic 0.
    Char0 {
        #[arg(long)]
        d: u64,
        /// Also report the Capelli degree r^{d′} + d′ for r generators.
        #[arg(long)]
        r: Option<u64>,
    },
    /// Sparse-identity degree in characteristic p.
    Charp {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        d: u64,
    },
    /// Capelli degree r^{d′} + d′ from either degree bound.
    Capelli {
        #[arg(long)]
        r: u64,
        #[arg(long, conflicts_with = "charp")]
        char0: bool,
        #[arg(long, value_name = "P")]
        charp: Option<u64>,
        #[arg(long)]
        d: u64,
    },
    /// Hook-product inequality for the u × v rectangle.
    Hook5 {
        #[arg(long)]
        u: u64,
        #[arg(long)]
        v: u64,
    },
    /// Hook-product inequality for the wide staircase.
    Hook51 {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        u: u64,
    },
}

#[derive(Subcommand)]
enum Reduce {
    /// Reduce the slotted monomials of a JSON input file.
    Sparse {
        #[arg(long, value_name = "FILE")]
        file: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(&cli) {
        Ok(reports) => finish(&cli.global, &reports),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::Verification(_) => 1,
                _ => 2,
            })
        }
    }
}

fn finish(global: &Global, reports: &[VerificationReport]) -> ExitCode {
    let mut code = 0u8;
    for r in reports {
        println!("{}", r.to_json_line());
        match r.verdict {
            Verdict::Pass => {}
            Verdict::Fail => code = code.max(1),
            Verdict::SkippedCap => code = 2,
        }
        if let Some(dir) = &global.golden {
            match golden_compare(dir, r) {
                Ok(GoldenOutcome::Match) => {}
                Ok(GoldenOutcome::Created) => eprintln!("golden: created {}", dir.join(r.golden_name()).display()),
                Ok(GoldenOutcome::Drift(msg)) => {
                    eprintln!("golden drift: {msg}");
                    code = code.max(1);
                }
                Err(e) => {
                    eprintln!("golden: {e}");
                    code = 2;
                }
            }
        }
    }
    ExitCode::from(code)
}

fn span_options(g: &Global) -> SpanOptions {
    let mut caps = Caps::default();
    if let Some(d) = g.max_dim {
        caps.max_dim = d;
    }
    if let Some(m) = g.max_gens {
        caps.max_gens = m;
    }
    SpanOptions::with_caps(caps)
}

/// Largest `n` with `(2n)! ≤ max_dim`.
fn jan3_cap(max_dim: u64) -> usize {
    let (mut n, mut order) = (0usize, 1u64);
    loop {
        let next = order.saturating_mul((2 * n as u64 + 1) * (2 * n as u64 + 2));
        if next > max_dim {
            return n;
        }
        n += 1;
        order = next;
    }
}

fn poly(s: &str) -> Result<capelli_core::freealg::Poly> {
    parse_poly(s, Domain::Rational)
}

fn run(cli: &Cli) -> Result<Vec<VerificationReport>> {
    let opts = span_options(&cli.global);
    let one = |r: VerificationReport| Ok(vec![r]);
    match &cli.command {
        Command::Verify(v) => match v {
            Verify::Jan3 { n } => one(verify_jan3(*n, jan3_cap(opts.caps.max_dim))?),
            Verify::Zubrilin4 { n, f } => {
                let f = match f {
                    Some(s) => poly(s)?,
                    None => default_zubrilin4_input(*n)?,
                };
                one(verify_zubrilin4(*n, &f, &opts)?)
            }
            Verify::Zubrilin2 { n, f, h } => {
                let f = match f {
                    Some(s) => poly(s)?,
                    None => default_zubrilin2_input(*n),
                };
                one(verify_zubrilin2(*n, &f, &poly(h)?, &opts)?)
            }
            Verify::Len2 { n, with_ts, k, h } => {
                let tier = if *with_ts { Len2Tier::WithTs } else { Len2Tier::Fast };
                one(verify_len2(*n, tier, *k, &poly(h)?, &opts)?)
            }
            Verify::DeltaCommute { n, k, l, h1, h2, f } => {
                let f = match f {
                    Some(s) => poly(s)?,
                    None => default_doubly_alternating(*n)?,
                };
                one(verify_delta_commute(*n, &f, *k, *l, &poly(h1)?, &poly(h2)?, &opts)?)
            }
            Verify::Sof1 { n, f, h } => {
                let f = match f {
                    Some(s) => poly(s)?,
                    None => default_sof1_input(*n)?,
                };
                one(verify_integrality_relation(*n, &f, &poly(h)?, &opts)?)
            }
            Verify::Alternation { n, samples, seed } => one(verify_delta_alternation(*n, *samples, *seed)?),
            Verify::HookFormula { max_n } => one(verify_hook_formula(*max_n)?),
            Verify::Symmetrizer { max_n } => one(verify_symmetrizers(*max_n)?),
            Verify::Staircase { p, max_u } => one(verify_staircase(*p, *max_u)?),
            Verify::Rect { max } => one(verify_rect_hook_sums(*max)?),
            Verify::HookBounds => hook_bound_grid(),
            Verify::ChDelta { n, samples, seed } => one(cayley_hamilton_delta_check(*n, *samples, *seed)?),
            Verify::CapelliMatrix { k, n } => one(capelli_matrix_check(*k, *n)?),
            Verify::Counting { r, d } => one(verify_counting(*r, *d)?),
        },
        Command::Bound(b) => one(bound(b)?),
        Command::Reduce(Reduce::Sparse { file }) => {
            let text = read(file)?;
            one(verify_reduction(&SparseReductionInput::parse(&text)?)?)
        }
        Command::Codim { alg, n } => {
            let start = Instant::now();
            let a = FiniteAlgebra::from_json(&read(alg)?)?;
            let c = codimension(&a, *n)?;
            one(VerificationReport::new("codim")
                .param("alg", alg.display().to_string())
                .param("n", n)
                .put("dim", a.dim())
                .put("field", a.domain().to_string())
                .put("codimension", c.codimension)
                .put("identities", c.identities)
                .finish(start))
        }
    }
}

fn read(path: &PathBuf) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::InvalidArgument(format!("{}: {e}", path.display())))
}

fn bound(b: &Bound) -> Result<VerificationReport> {
    let start = Instant::now();
    let stable = |flags: &[bool]| if flags.iter().all(|&f| f) { Verdict::Pass } else { Verdict::Fail };
    let report = match b {
        Bound::Regev { d, m } => VerificationReport::new("bound-regev")
            .param("d", d)
            .param("m", m)
            .put("bound", regev_codim_bound(*d, *m)?.to_string()),
        Bound::Char0 { d, r } => {
            let s = strong_degree_char0(*d)?;
            let mut report = VerificationReport::new("bound-char0")
                .param("d", d)
                .put("d_prime", s.d_prime.to_string())
                .put("detail", &s)
                .verdict(stable(&[
                    s.ceiling.stable_under_doubling,
                    s.rectangle_condition.stable_under_doubling,
                    s.rectangle_condition.value,
                ]));
            if let Some(r) = r {
                let c = capelli_degree_from_sparse(*r, &s.d_prime)?;
                report = report
                    .param("r", r)
                    .put("capelli_n", c.n.to_string())
                    .put("single_generator", c.single_generator);
            }
            report
        }
        Bound::Charp { p, d } => {
            let s = sparse_degree_charp(*p, *d)?;
            VerificationReport::new("bound-charp")
                .param("p", p)
                .param("d", d)
                .put("u", s.u.value.to_string())
                .put("d_prime", s.d_prime.to_string())
                .put("detail", &s)
                .verdict(stable(&[
                    s.u.stable_under_doubling,
                    s.u_satisfies.stable_under_doubling,
                    s.u_satisfies.value,
                ]))
        }
        Bound::Capelli { r, char0, charp, d } => {
            let (d_prime, source): (BigInt, serde_json::Value) = match (char0, charp) {
                (_, Some(p)) => (sparse_degree_charp(*p, *d)?.d_prime, json!({"charp": p})),
                (true, None) | (false, None) => (strong_degree_char0(*d)?.d_prime, json!("char0")),
            };
            let c = capelli_degree_from_sparse(*r, &d_prime)?;
            VerificationReport::new("bound-capelli")
                .param("r", r)
                .param("d", d)
                .param("source", source)
                .put("d_prime", d_prime.to_string())
                .put("n", c.n.to_string())
                .put("single_generator", c.single_generator)
        }
        Bound::Hook5 { u, v } => return bound_hook5(*u, *v),
        Bound::Hook51 { p, u } => return bound_hook51(*p, *u),
    };
    Ok(report.finish(start))
}
