#![allow(dead_code)]

use lamvar::expr::{eval_numeric, parse, sample_point, Expr, Point, Symbol};
use lamvar::jet::{EquationE, JetContext};
use lamvar::variational::{Candidate, Lagrangian, Problem};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const WORKED_L: &str = "u1^2/2 + x*u1*(1 - ln(u)) + x^2*ln(u)*(ln(u)/2 - 1)";
pub const WORKED_F: &str = "x^2*ln(u)/u - x^2/u + ln(u) - 1";

pub fn ctx() -> JetContext {
    JetContext::new("x", &["u"], 3).unwrap()
}

pub fn covering_ctx() -> JetContext {
    ctx().with_nonlocal("w").unwrap()
}

pub fn p(ctx: &JetContext, s: &str) -> Expr {
    parse(s, ctx).unwrap_or_else(|e| panic!("{s}: {e}"))
}

pub fn worked_equation() -> EquationE {
    let c = ctx();
    EquationE::new(c.clone(), vec![p(&c, WORKED_F)]).unwrap()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Evaluates `a` and `b` at `n` admissible sample points and returns the
/// pairs; points where either side leaves its domain are skipped.
pub fn paired_samples(a: &Expr, b: &Expr, n: usize, seed: u64) -> Vec<(f64, f64)> {
    let mut syms = a.symbols();
    syms.extend(b.symbols());
    let mut r = rng(seed);
    let mut out = Vec::new();
    for _ in 0..n * 10 {
        if out.len() == n {
            break;
        }
        let pt: Point = sample_point(&syms, &mut r);
        if let (Ok(x), Ok(y)) = (eval_numeric(a, &pt), eval_numeric(b, &pt)) {
            out.push((x, y));
        }
    }
    out
}

/// One labelled λ-variational candidate.
pub struct Case {
    pub name: &'static str,
    pub l: &'static str,
    pub xi: &'static str,
    pub eta: &'static str,
    pub lambda: &'static str,
    pub r: &'static str,
    pub expected: bool,
}

impl Case {
    pub fn problem(&self) -> Problem {
        let c = ctx();
        let l = Lagrangian::new(p(&c, self.l), c.clone()).unwrap();
        let cand =
            Candidate::new(p(&c, self.xi), vec![p(&c, self.eta)], p(&c, self.lambda), p(&c, self.r), &c).unwrap();
        Problem::new(l, cand).unwrap()
    }
}

/// Ten candidates, three of which are not λ-variational.
pub fn corpus() -> Vec<Case> {
    let case = |name, l, xi, eta, lambda, r, expected| Case { name, l, xi, eta, lambda, r, expected };
    vec![
        case("worked example", WORKED_L, "0", "1", "x/u", "0", true),
        case("free particle, translation in u", "u1^2/2", "0", "1", "0", "0", true),
        case("free particle, translation in x", "u1^2/2", "1", "0", "0", "0", true),
        case("oscillator, translation in x", "u1^2/2 - u^2/2", "1", "0", "0", "0", true),
        case("free particle, Galilean boost", "u1^2/2", "0", "x", "0", "u", true),
        case("shifted kinetic term, lambda = 1", "(u1 - u)^2/2", "0", "1", "1", "0", true),
        case("shifted kinetic term, lambda = x", "(u1 - x*u)^2/2", "0", "1", "x", "0", true),
        case("worked example with lambda = 0", WORKED_L, "0", "1", "0", "0", false),
        case("free particle, scaling in u", "u1^2/2", "0", "u", "0", "0", false),
        case("oscillator, translation in u", "u1^2/2 - u^2/2", "0", "1", "0", "0", false),
    ]
}

/// Source strings exercising every grammar production.
pub const EXPR_CORPUS: &[&str] = &[
    "0",
    "-7/3",
    "2.5e-1",
    "x",
    "u1^2/2",
    "x*u1*(1 - ln(u))",
    "x^2*ln(u)*(ln(u)/2 - 1)",
    WORKED_L,
    WORKED_F,
    "exp(w)*(u1 - x*ln(u) + x)",
    "x/u",
    "-u/u1",
    "u^2/u1",
    "sin(x)^2 + cos(x)^2",
    "exp(-x^2/2)/(1 + u^2)",
    "(x + u)^-3",
    "1/(x*u) - 3/(2*u1)",
    "u2 - x*ln(u)*u3",
    "ln(exp(x*u))",
    "((x))",
    "-(-(u))",
    "2^-2*x",
];

/// λ-variational candidates whose λ is singular on `{I = 0}`.
pub fn singular_corpus() -> Vec<Case> {
    let case = |name, l, lambda| Case { name, l, xi: "0", eta: "1", lambda, r: "0", expected: true };
    vec![
        case("repulsive oscillator, lambda = -u/u1", "u1^2/2 + u^2/2", "-u/u1"),
        case("cubic potential, lambda = u^2/u1", "u1^2/2 - u^3/3", "u^2/u1"),
    ]
}

// ---------- random expressions over (x, u, u1) ----------

fn syms() -> (Expr, Expr, Expr) {
    let c = ctx();
    (c.xe(), c.jet_e(0, 0), c.jet_e(0, 1))
}

pub fn leaf() -> impl Strategy<Value = Expr> {
    let (x, u, u1) = syms();
    prop_oneof![
        (-3i64..=3).prop_map(Expr::int),
        (1i64..=4, 2i64..=3).prop_map(|(n, d)| Expr::rational(n, d)),
        Just(x),
        Just(u),
        Just(u1),
    ]
}

/// Expressions positive on the sampling box, safe under `ln` and division.
pub fn positive() -> impl Strategy<Value = Expr> {
    let (x, u, u1) = syms();
    prop_oneof![
        Just(x.clone()),
        Just(u.clone()),
        Just(&x + &u),
        Just(Expr::one() + Expr::pow(u1, 2)),
        Just(Expr::int(2) + Expr::sin(x)),
    ]
}

pub fn expr() -> impl Strategy<Value = Expr> {
    leaf().prop_recursive(3, 24, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a + b),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a - b),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a * b),
            (inner.clone(), positive()).prop_map(|(a, b)| a / b),
            (inner.clone(), 1i64..=3).prop_map(|(a, n)| Expr::pow(a, n)),
            (positive(), inner.clone()).prop_map(|(b, a)| Expr::ln(b) * a),
            leaf().prop_map(Expr::exp),
            inner.clone().prop_map(Expr::sin),
            inner.prop_map(Expr::cos),
        ]
    })
}

/// Functions of `(x, u)` only.
pub fn base_expr() -> impl Strategy<Value = Expr> {
    let c = ctx();
    let (x, u) = (c.xe(), c.jet_e(0, 0));
    let leaf = prop_oneof![(-3i64..=3).prop_map(Expr::int), Just(x.clone()), Just(u.clone())];
    leaf.prop_recursive(2, 12, 2, move |inner| {
        let (x, u) = (x.clone(), u.clone());
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a + b),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a * b),
            inner.clone().prop_map(move |a| a / &u),
            inner.clone().prop_map(move |a| Expr::ln(x.clone()) * a),
            inner.prop_map(Expr::sin),
        ]
    })
}

pub fn symbol() -> impl Strategy<Value = Symbol> {
    let c = ctx();
    prop_oneof![Just(c.x()), Just(c.jet(0, 0)), Just(c.jet(0, 1))]
}

pub fn rel_close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * (1.0 + a.abs().max(b.abs()))
}
