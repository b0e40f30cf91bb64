//! Pipeline orchestration behind the `lamvar` binary.
//!
//! Each `run_*` function returns a [`Report`] carrying human text, the same
//! content as ordered `key=value` pairs, and the process exit code:
//!
//! | code | meaning |
//! |------|---------|
//! | 0 | success |
//! | 1 | candidate fails the check, or a numeric tolerance fails |
//! | 2 | malformed problem file, expression or option |
//! | 3 | domain error, singular Hessian or inconclusive zero test |
//! | 4 | internal inconsistency (reduction does not verify, failed assertion) |
//! | 5 | trajectory left the admissible domain |

mod file;

pub use file::{constant, initial_data, NumericOverrides, ProblemFile};

use std::fmt::Write as _;
use std::path::PathBuf;

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::numverify::{conservation_check, residual_check};
use crate::variational::{verify_reduction, Problem, Reduction, ReductionResult};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_DOMAIN: i32 = 3;
pub const EXIT_INCONSISTENT: i32 = 4;
pub const EXIT_TRAJECTORY: i32 = 5;

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Syntax { .. }
        | Error::UnknownIdentifier(_)
        | Error::JetOrderExceeded { .. }
        | Error::ProblemFile(_)
        | Error::InvalidInput(_) => EXIT_PARSE,
        Error::Assertion(_) => EXIT_INCONSISTENT,
        Error::Trajectory { .. } => EXIT_TRAJECTORY,
        _ => EXIT_DOMAIN,
    }
}

/// Options shared by every command.
#[derive(Debug, Clone, Default)]
pub struct Options {
    /// Overrides the file's lift coefficient `A`.
    pub a: Option<String>,
    pub numeric: NumericOverrides,
    /// Where to dump the covering trajectory.
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Clone, Default)]
pub struct Report {
    pub text: String,
    pub pairs: Vec<(String, String)>,
    pub exit: i32,
}

impl Report {
    fn kv(&mut self, k: &str, v: impl ToString) {
        self.pairs.push((k.to_string(), v.to_string()));
    }

    fn say(&mut self, line: impl AsRef<str>) {
        self.text.push_str(line.as_ref());
        self.text.push('\n');
    }

    fn fail(&mut self, e: &Error) {
        self.exit = exit_code(e);
        self.say(format!("error: {e}"));
        self.kv("error", e.to_string().replace('\n', " "));
    }

    /// Human text, or `key=value` lines ending with `exit=<code>`.
    pub fn render(&self, machine: bool) -> String {
        if !machine {
            return self.text.clone();
        }
        let mut out = String::new();
        for (k, v) in &self.pairs {
            let _ = writeln!(out, "{k}={v}");
        }
        let _ = writeln!(out, "exit={}", self.exit);
        out
    }
}

fn finish(mut rep: Report, r: Result<i32>) -> Report {
    match r {
        Ok(code) => rep.exit = code,
        Err(e) => rep.fail(&e),
    }
    rep
}

fn yes(b: bool) -> &'static str {
    if b {
        "true"
    } else {
        "false"
    }
}

fn header(prob: &Problem, rep: &mut Report) {
    let ctx = prob.ctx();
    rep.say(format!("Lagrangian: L = {}", prob.lagrangian().expr()));
    rep.kv("lagrangian", prob.lagrangian().expr());
    for (name, f) in ctx.dependent_names().iter().zip(prob.equation().rhs()) {
        rep.say(format!("Euler-Lagrange: {name}2 = {f}"));
        rep.kv(&format!("euler_lagrange.{name}2"), f);
    }
    let c = prob.candidate();
    let eta: Vec<String> = c.eta.iter().map(Expr::to_string).collect();
    rep.say(format!("candidate: xi = {}, eta = ({}), lambda = {}, R = {}", c.xi, eta.join(", "), c.lambda, c.r));
}

fn check_stage(prob: &Problem, a: &Expr, rep: &mut Report) -> Result<bool> {
    let def = prob.check_definition()?;
    let form = prob.check_form_condition()?;
    let cov = prob.check_covering_condition(a)?;
    let sym = prob.is_symmetry()?;
    let lsym = prob.is_lambda_symmetry()?;
    for (label, v) in [
        ("definition identity".to_string(), def),
        ("form condition (base ideal)".to_string(), form),
        (format!("covering condition (A = {a})"), cov),
        ("Lie point symmetry".to_string(), sym),
        ("lambda-symmetry".to_string(), lsym),
    ] {
        rep.say(format!("{:<32}{}", format!("{label}:"), yes(v)));
    }
    rep.kv("check.definition", def);
    rep.kv("check.form", form);
    rep.kv("check.A", a);
    rep.kv("check.covering", cov);
    rep.kv("check.symmetry", sym);
    rep.kv("check.lambda_symmetry", lsym);
    if !(def == form && form == cov) {
        rep.say("warning: the three formulations disagree");
    }
    let verdict = def && form && cov;
    rep.say(if verdict {
        "verdict: lambda-variational symmetry"
    } else {
        "verdict: not a lambda-variational symmetry"
    });
    rep.kv("check.verdict", verdict);
    Ok(verdict)
}

fn reduce_stage(prob: &Problem, rep: &mut Report) -> Result<(ReductionResult, i32)> {
    let res = prob.noether_integral()?;
    rep.say(format!("I = {}", res.integral));
    rep.say(format!("Itilde = {}", res.integral_tilde));
    rep.say(format!("status: {}", res.label()));
    rep.kv("reduce.I", &res.integral);
    rep.kv("reduce.Itilde", &res.integral_tilde);
    rep.kv("reduce.conditional", res.conditional);
    let code = match &res.reduced {
        Reduction::Explicit(g) => {
            let u1 = format!("{}1", prob.ctx().dependent_names()[0]);
            rep.say(format!("reduced: {u1} = {g}"));
            rep.kv("reduce.kind", "explicit");
            rep.kv(&format!("reduce.{u1}"), g);
            let ok = verify_reduction(&res, prob.equation())?;
            rep.say(if ok {
                "verified: every solution of the reduced equation solves the Euler-Lagrange equation"
            } else {
                "NOT verified: the reduced equation does not imply the Euler-Lagrange equation"
            });
            rep.kv("reduce.verified", ok);
            if ok {
                EXIT_OK
            } else {
                EXIT_INCONSISTENT
            }
        }
        Reduction::Implicit { note } => {
            rep.say(format!("reduced: I = 0 (implicit; {note})"));
            rep.kv("reduce.kind", "implicit");
            rep.kv("reduce.note", note);
            EXIT_OK
        }
    };
    if res.conditional {
        rep.say("note: I is conserved only on {I = 0}; the reduction holds on that hypersurface only");
    }
    Ok((res, code))
}

fn numeric_stage(
    file: &ProblemFile,
    prob: &Problem,
    res: &ReductionResult,
    opts: &Options,
    rep: &mut Report,
    require_ic: bool,
) -> Result<i32> {
    let (s, ic) = file.numeric(prob.covering().ctx(), &opts.numeric)?;
    let Some(ic) = ic else {
        if require_ic {
            return Err(Error::ProblemFile("no initial condition: give `ic` in [numeric] or --ic".into()));
        }
        rep.say("numeric: skipped (no initial condition)");
        rep.kv("numeric", "skipped");
        return Ok(EXIT_OK);
    };
    rep.say(format!("numeric: RK4 on [{}, {}] with h = {}", s.x0, s.x1, s.h));
    let mut pass = true;
    match res.reduced_rhs() {
        Some(g) => {
            let r = residual_check(g, prob.equation(), ic.u[0], &s)?;
            rep.text.push_str(&r.human());
            for (k, v) in r.key_values() {
                rep.kv(&k, v);
            }
            pass &= r.pass;
        }
        None => {
            rep.say("reduced-equation residual: not applicable (implicit reduction)");
            rep.kv("residual", "skipped");
        }
    }
    let c = conservation_check(prob, res, &ic, &s)?;
    rep.text.push_str(&c.human());
    for (k, v) in c.key_values() {
        rep.kv(&k, v);
    }
    pass &= c.pass;
    if let Some(path) = &opts.csv {
        let f = std::fs::File::create(path)
            .map_err(|e| Error::InvalidInput(format!("cannot write {}: {e}", path.display())))?;
        c.write_csv(std::io::BufWriter::new(f))
            .map_err(|e| Error::InvalidInput(format!("cannot write {}: {e}", path.display())))?;
        rep.say(format!("trajectory written to {}", path.display()));
    }
    rep.kv("verify.pass", pass);
    Ok(if pass { EXIT_OK } else { EXIT_FAIL })
}

fn prepare(file: &ProblemFile, opts: &Options, rep: &mut Report) -> Result<(Problem, Expr)> {
    let prob = file.problem()?;
    let a = file.lift_coefficient(prob.covering().ctx(), opts.a.as_deref())?;
    header(&prob, rep);
    Ok((prob, a))
}

/// Runs the three equivalent λ-variational checks plus the symmetry
/// diagnostics; exit 0 iff the candidate passes.
pub fn run_check(file: &ProblemFile, opts: &Options) -> Report {
    let mut rep = Report::default();
    let r = (|| {
        let (prob, a) = prepare(file, opts, &mut rep)?;
        Ok(if check_stage(&prob, &a, &mut rep)? { EXIT_OK } else { EXIT_FAIL })
    })();
    finish(rep, r)
}

fn through_reduce(
    file: &ProblemFile,
    opts: &Options,
    rep: &mut Report,
) -> Result<std::result::Result<(Problem, ReductionResult), i32>> {
    let (prob, a) = prepare(file, opts, rep)?;
    if !check_stage(&prob, &a, rep)? {
        return Ok(Err(EXIT_FAIL));
    }
    let (res, code) = reduce_stage(&prob, rep)?;
    if code != EXIT_OK {
        return Ok(Err(code));
    }
    Ok(Ok((prob, res)))
}

/// Check, then build `I`, `Ĩ` and the reduced equation and verify it.
pub fn run_reduce(file: &ProblemFile, opts: &Options) -> Report {
    let mut rep = Report::default();
    let r = through_reduce(file, opts, &mut rep).map(|o| o.err().unwrap_or(EXIT_OK));
    finish(rep, r)
}

/// Check and reduce, then integrate; requires an initial condition.
pub fn run_verify(file: &ProblemFile, opts: &Options) -> Report {
    pipeline(file, opts, true)
}

/// The whole pipeline; numerics are skipped when no initial condition is
/// given.
pub fn run_report(file: &ProblemFile, opts: &Options) -> Report {
    pipeline(file, opts, false)
}

fn pipeline(file: &ProblemFile, opts: &Options, require_ic: bool) -> Report {
    let mut rep = Report::default();
    let r = (|| match through_reduce(file, opts, &mut rep)? {
        Ok((prob, res)) => numeric_stage(file, &prob, &res, opts, &mut rep, require_ic),
        Err(code) => Ok(code),
    })();
    finish(rep, r)
}
