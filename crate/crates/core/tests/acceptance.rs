//! Acceptance criteria for the engine, one line per criterion.
//!
//! Runs as a plain binary (`harness = false`) so the report is always shown:
//! `cargo test --test acceptance`.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use common::*;
use lamvar::expr::{eval_numeric, is_zero, parse, sample_point, simplify, Expr, Point};
use lamvar::geometry::{prolong_lambda, prolong_standard};
use lamvar::numverify::{conservation_check, residual_check, rk4_integrate, InitialData, Ivp, NumericSettings};
use lamvar::variational::{verify_reduction, Candidate, Lagrangian, Problem, Reduction, ReductionResult};
use proptest::strategy::{Strategy, ValueTree};
use proptest::test_runner::TestRunner;

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn zero(e: &Expr) -> Result<bool, String> {
    is_zero(e).map_err(|e| e.to_string())
}

fn worked_problem() -> Problem {
    let c = ctx();
    let l = Lagrangian::new(p(&c, WORKED_L), c.clone()).unwrap();
    let cand = Candidate::new(p(&c, "0"), vec![p(&c, "1")], p(&c, "x/u"), p(&c, "0"), &c).unwrap();
    Problem::new(l, cand).unwrap()
}

fn samples<S: Strategy>(s: S, n: usize, runner: &mut TestRunner) -> Vec<S::Value> {
    (0..n).map(|_| s.new_tree(runner).unwrap().current()).collect()
}

// ---------- criteria ----------

fn euler_lagrange() -> Check {
    let c = ctx();
    let l = Lagrangian::new(p(&c, WORKED_L), c.clone()).map_err(|e| e.to_string())?;
    let eq = l.euler_lagrange().map_err(|e| e.to_string())?;
    let f = &eq.rhs()[0];
    ensure(zero(&(f - p(&c, WORKED_F)))?, format!("u2 = {f}"))?;
    Ok(format!("u2 = {f}"))
}

fn lambda_variational_verdicts() -> Check {
    let prob = worked_problem();
    let c = covering_ctx();
    let mut verdicts = vec![
        ("definition", prob.check_definition().map_err(|e| e.to_string())?),
        ("form", prob.check_form_condition().map_err(|e| e.to_string())?),
    ];
    for a in ["0", "1", "x*u"] {
        verdicts.push((a, prob.check_covering_condition(&p(&c, a)).map_err(|e| e.to_string())?));
    }
    let failed: Vec<_> = verdicts.iter().filter(|(_, v)| !v).map(|(n, _)| *n).collect();
    ensure(failed.is_empty(), format!("false verdicts: {failed:?}"))?;
    Ok("definition, form and covering (A = 0, 1, x*u) all true".into())
}

fn first_integral() -> Check {
    let prob = worked_problem();
    let c = covering_ctx();
    let res = prob.noether_integral().map_err(|e| e.to_string())?;
    ensure(zero(&(&res.integral - p(&c, "u1 - x*ln(u) + x")))?, format!("I = {}", res.integral))?;
    ensure(
        zero(&(&res.integral_tilde - p(&c, "exp(w)*(u1 - x*ln(u) + x)")))?,
        format!("Itilde = {}", res.integral_tilde),
    )?;
    let eq = prob.equation();
    let bar = eq.restricted_derivative(&res.integral).map_err(|e| e.to_string())? + p(&c, "x/u") * &res.integral;
    ensure(zero(&eq.reduce_mod_e(&bar))?, "D̄x(I) + (x/u) I does not vanish")?;
    let tilde = prob.covering().covering_derivative(&res.integral_tilde).map_err(|e| e.to_string())?;
    ensure(zero(&tilde)?, "D̃x(Itilde) does not vanish")?;
    Ok(format!("I = {}, Itilde = {}", res.integral, res.integral_tilde))
}

fn reduction() -> Check {
    let prob = worked_problem();
    let c = ctx();
    let res = prob.noether_integral().map_err(|e| e.to_string())?;
    let g = res.reduced_rhs().ok_or("reduction is implicit")?.clone();
    ensure(zero(&(&g - p(&c, "x*ln(u) - x")))?, format!("u1 = {g}"))?;
    ensure(verify_reduction(&res, prob.equation()).map_err(|e| e.to_string())?, "verify_reduction returned false")?;
    let bad = ReductionResult { reduced: Reduction::Explicit(p(&c, "x*ln(u)")), ..res };
    ensure(!verify_reduction(&bad, prob.equation()).map_err(|e| e.to_string())?, "corrupted reduction verified")?;
    Ok(format!("u1 = {g}; verified; corrupted control rejected"))
}

fn numeric_residual() -> Check {
    let prob = worked_problem();
    let res = prob.noether_integral().map_err(|e| e.to_string())?;
    let s = NumericSettings { x0: 1.0, x1: 2.0, h: 1e-3, tol: 1e-6, params: Point::new() };
    let r = residual_check(res.reduced_rhs().unwrap(), prob.equation(), 2.0, &s).map_err(|e| e.to_string())?;
    ensure(r.max_residual <= 1e-6, r.human())?;
    Ok(format!("max residual {:.3e}", r.max_residual))
}

fn numeric_on_hypersurface() -> Check {
    let prob = worked_problem();
    let res = prob.noether_integral().map_err(|e| e.to_string())?;
    let s = NumericSettings::default();
    let rep = conservation_check(&prob, &res, &InitialData::new(vec![2.0]), &s).map_err(|e| e.to_string())?;
    ensure(rep.i0.abs() <= 1e-15, format!("I(x0) = {}", rep.i0))?;
    ensure(rep.itilde_drift <= 1e-6, rep.human())?;
    let max_i = rep.rows.iter().map(|r| r.i.abs()).fold(0.0, f64::max);
    ensure(max_i <= 1e-6, format!("max |I| = {max_i}"))?;
    Ok(format!("Itilde drift {:.3e}, max |I| {:.3e}", rep.itilde_drift, max_i))
}

fn numeric_off_hypersurface() -> Check {
    let prob = worked_problem();
    let res = prob.noether_integral().map_err(|e| e.to_string())?;
    let s = NumericSettings::default();
    let ic = InitialData { u: vec![2.0], u1: Some(vec![2f64.ln() - 1.0 + 0.5]), w: 0.0 };
    let rep = conservation_check(&prob, &res, &ic, &s).map_err(|e| e.to_string())?;
    ensure((rep.i0 - 0.5).abs() <= 1e-12, format!("I(x0) = {}", rep.i0))?;
    ensure(rep.itilde_drift <= 1e-6, rep.human())?;
    ensure(rep.i_drift >= 1e-3, rep.human())?;
    Ok(format!("Itilde drift {:.3e}, max |I - I(x0)| {:.3e}", rep.itilde_drift, rep.i_drift))
}

fn prolongation_at_lambda_zero() -> Check {
    let c = ctx();
    let mut runner = TestRunner::deterministic();
    let pairs = samples((base_expr(), base_expr()), 25, &mut runner);
    for (xi, eta) in &pairs {
        let a = prolong_lambda(xi, std::slice::from_ref(eta), &Expr::zero(), 3, &c).map_err(|e| e.to_string())?;
        let b = prolong_standard(xi, std::slice::from_ref(eta), 3, &c).map_err(|e| e.to_string())?;
        for z in c.coordinates() {
            let (ca, cb) = (simplify(&a.coefficient(&z)).unwrap(), simplify(&b.coefficient(&z)).unwrap());
            ensure(ca == cb, format!("xi = {xi}, eta = {eta}: ∂{z} coefficients {ca} vs {cb}"))?;
        }
    }
    Ok(format!("{} random fields", pairs.len()))
}

fn three_way_equivalence() -> Check {
    let c = covering_ctx();
    let cases = corpus();
    let negatives = cases.iter().filter(|k| !k.expected).count();
    for case in &cases {
        let prob = case.problem();
        let def = prob.check_definition().map_err(|e| e.to_string())?;
        let form = prob.check_form_condition().map_err(|e| e.to_string())?;
        let cov: Vec<bool> =
            ["0", "1", "x*u"].iter().map(|a| prob.check_covering_condition(&p(&c, a)).unwrap()).collect();
        ensure(
            def == case.expected && form == def && cov.iter().all(|v| *v == def),
            format!("{}: definition {def}, form {form}, covering {cov:?}", case.name),
        )?;
    }
    Ok(format!("{} cases, {negatives} negative", cases.len()))
}

fn null_lagrangian() -> Check {
    let c = ctx();
    let mut runner = TestRunner::deterministic();
    let gs = samples(base_expr(), 10, &mut runner);
    let base = p(&c, "u1^2/2 - u^2/2");
    let e0 = Lagrangian::new(base.clone(), c.clone()).unwrap().euler_lagrange().unwrap();
    for g in &gs {
        let shifted = &base + c.total_derivative(g).unwrap();
        let e1 = Lagrangian::new(shifted, c.clone()).unwrap().euler_lagrange().map_err(|e| e.to_string())?;
        ensure(zero(&(&e0.rhs()[0] - &e1.rhs()[0]))?, format!("g = {g}"))?;
    }
    Ok(format!("{} random g(x, u)", gs.len()))
}

fn classical_noether() -> Check {
    let c = ctx();
    let classical = |l: &str, xi: &str, eta: &str, expected: &str| -> Result<String, String> {
        let lag = Lagrangian::new(p(&c, l), c.clone()).unwrap();
        let cand = Candidate::new(p(&c, xi), vec![p(&c, eta)], Expr::zero(), Expr::zero(), &c).unwrap();
        let prob = Problem::new(lag, cand).map_err(|e| e.to_string())?;
        ensure(prob.check_definition().map_err(|e| e.to_string())?, format!("{l}: check failed"))?;
        let res = prob.noether_integral().map_err(|e| e.to_string())?;
        ensure(!res.conditional, "λ = 0 integral marked conditional")?;
        ensure(zero(&(&res.integral - p(&c, expected)))?, format!("{l}: I = {}", res.integral))?;
        let d = prob.equation().restricted_derivative(&res.integral).map_err(|e| e.to_string())?;
        ensure(zero(&prob.equation().reduce_mod_e(&d))?, format!("{l}: D̄x(I) ≠ 0"))?;
        Ok(res.integral.to_string())
    };
    let momentum = classical("u1^2/2", "0", "1", "u1")?;
    let energy = classical("u1^2/2 - u^2/2", "1", "0", "-(u1^2/2 + u^2/2)")?;
    Ok(format!("momentum I = {momentum}; energy I = {energy}"))
}

fn derivative_vs_finite_difference() -> Check {
    let mut runner = TestRunner::deterministic();
    let cases = samples((expr(), symbol()), 50, &mut runner);
    let mut r = rng(7);
    let mut worst: f64 = 0.0;
    for (e, s) in &cases {
        let d = e.diff(s);
        let mut syms = e.symbols();
        syms.insert(s.clone());
        let mut checked = false;
        for _ in 0..50 {
            let pt = sample_point(&syms, &mut r);
            let h = 1e-6;
            let (mut hi, mut lo) = (pt.clone(), pt.clone());
            *hi.get_mut(s).unwrap() += h;
            *lo.get_mut(s).unwrap() -= h;
            let (Ok(exact), Ok(fp), Ok(fm)) = (eval_numeric(&d, &pt), eval_numeric(e, &hi), eval_numeric(e, &lo))
            else {
                continue;
            };
            let approx = (fp - fm) / (2.0 * h);
            let err = (exact - approx).abs() / exact.abs().max(1.0);
            worst = worst.max(err);
            ensure(err <= 1e-5, format!("d/d{s} of {e}: {exact} vs {approx}"))?;
            checked = true;
            break;
        }
        ensure(checked, format!("no admissible point for {e}"))?;
    }
    Ok(format!("{} expressions, worst relative error {worst:.2e}", cases.len()))
}

fn rk4_convergence() -> Check {
    let end = |h: f64| {
        let ivp = Ivp { rhs: Box::new(|_, y| Ok(vec![y[0]])), x0: 0.0, x1: 1.0, h, y0: vec![1.0], positive: vec![] };
        rk4_integrate(&ivp).unwrap().last().unwrap().1[0]
    };
    let e = std::f64::consts::E;
    let ratio = (end(0.1) - e).abs() / (end(0.05) - e).abs();
    ensure((12.0..=20.0).contains(&ratio), format!("ratio {ratio}"))?;
    Ok(format!("error ratio {ratio:.3}"))
}

fn parser_round_trip() -> Check {
    let c = covering_ctx();
    let mut sources: Vec<String> = EXPR_CORPUS.iter().map(|s| s.to_string()).collect();
    for case in corpus().iter().chain(singular_corpus().iter()) {
        sources.extend([case.l, case.xi, case.eta, case.lambda, case.r].map(String::from));
    }
    let mut runner = TestRunner::deterministic();
    let random: Vec<Expr> = samples(expr(), 50, &mut runner);
    let mut exprs: Vec<Expr> =
        sources.iter().map(|s| parse(s, &c).map_err(|e| format!("{s}: {e}"))).collect::<Result<_, _>>()?;
    exprs.extend(random);
    for e in &exprs {
        let back = parse(&e.to_string(), &c).map_err(|err| format!("{e}: {err}"))?;
        ensure(&back == e, format!("{e} re-parsed as {back}"))?;
    }
    Ok(format!("{} expressions", exprs.len()))
}

// ---------- runner ----------

struct Criterion {
    id: &'static str,
    name: &'static str,
    limit: Duration,
    run: fn() -> Check,
}

fn main() {
    let s = Duration::from_secs;
    let criteria = [
        Criterion { id: "1", name: "Euler-Lagrange reproduction", limit: s(1), run: euler_lagrange },
        Criterion { id: "2", name: "lambda-variational verification", limit: s(5), run: lambda_variational_verdicts },
        Criterion { id: "3", name: "first integral and its identities", limit: s(2), run: first_integral },
        Criterion { id: "4", name: "reduction and verification", limit: s(5), run: reduction },
        Criterion { id: "5a", name: "RK4 residual of the reduced equation", limit: s(1), run: numeric_residual },
        Criterion { id: "5b", name: "covering conservation with I(x0) = 0", limit: s(1), run: numeric_on_hypersurface },
        Criterion {
            id: "5c",
            name: "covering conservation with I(x0) = 0.5",
            limit: s(1),
            run: numeric_off_hypersurface,
        },
        Criterion {
            id: "6a",
            name: "lambda = 0 prolongation equivalence",
            limit: s(60),
            run: prolongation_at_lambda_zero,
        },
        Criterion { id: "6b", name: "three-way verdict equivalence", limit: s(60), run: three_way_equivalence },
        Criterion { id: "6c", name: "null-Lagrangian invariance", limit: s(60), run: null_lagrangian },
        Criterion { id: "6d", name: "classical Noether at lambda = 0", limit: s(60), run: classical_noether },
        Criterion {
            id: "6e",
            name: "derivative vs finite difference",
            limit: s(60),
            run: derivative_vs_finite_difference,
        },
        Criterion { id: "6f", name: "RK4 convergence ratio", limit: s(60), run: rk4_convergence },
        Criterion { id: "6g", name: "parser round trip", limit: s(60), run: parser_round_trip },
    ];

    std::panic::set_hook(Box::new(|_| {}));
    let mut failures = 0;
    for c in &criteria {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(c.run)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            Err(format!("panicked: {msg}"))
        });
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(detail) if elapsed > c.limit => Err(format!("{detail}; exceeded {:?}", c.limit)),
            other => other,
        };
        let (tag, detail) = match &outcome {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failures += 1;
                ("FAIL", d)
            }
        };
        println!("{tag} criterion {:<3} {:<40} {:>8.3}s  {detail}", c.id, c.name, elapsed.as_secs_f64());
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures > 0 {
        std::process::exit(1);
    }
}
