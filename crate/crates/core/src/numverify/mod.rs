//! Numerical cross-validation by fixed-step RK4.
//!
//! Three systems are integrated: the reduced first-order equation `u1 = g`,
//! the original second-order equation, and the covering system
//! `u' = u1, u1' = f, w' = λ`. Reports come in a human form and a
//! line-oriented `key=value` form.

mod rk4;

pub use rk4::{rk4_integrate, Ivp, Rhs, Trajectory, POSITIVITY_FLOOR};

use std::io::Write;

use crate::error::{Error, Result};
use crate::expr::{CompiledExpr, Expr, Func, Point, Symbol};
use crate::jet::{EquationE, JetContext};
use crate::variational::{Problem, ReductionResult};

/// Integration range, step and tolerance, plus values for any parameters.
#[derive(Debug, Clone)]
pub struct NumericSettings {
    pub x0: f64,
    pub x1: f64,
    pub h: f64,
    pub tol: f64,
    pub params: Point,
}

impl Default for NumericSettings {
    fn default() -> Self {
        NumericSettings { x0: 1.0, x1: 2.0, h: 1e-3, tol: 1e-6, params: Point::new() }
    }
}

/// Initial data at `x0`. Missing `u1` values are taken from the reduced
/// equation, which places the start on `{I = 0}`.
#[derive(Debug, Clone, Default)]
pub struct InitialData {
    pub u: Vec<f64>,
    pub u1: Option<Vec<f64>>,
    pub w: f64,
}

impl InitialData {
    pub fn new(u: Vec<f64>) -> Self {
        InitialData { u, u1: None, w: 0.0 }
    }
}

#[derive(Debug, Clone)]
pub struct ResidualReport {
    pub max_residual: f64,
    pub tol: f64,
    pub pass: bool,
    pub steps: usize,
    pub x_end: f64,
    pub u_end: f64,
}

#[derive(Debug, Clone)]
pub struct CovRow {
    pub x: f64,
    pub state: Vec<f64>,
    pub i: f64,
    pub itilde: f64,
}

#[derive(Debug, Clone)]
pub struct ConservationReport {
    pub i0: f64,
    pub itilde0: f64,
    /// `max |Ĩ(x) - Ĩ(x0)|`.
    pub itilde_drift: f64,
    /// `max |I(x) - I(x0)|`; nonzero in general when λ ≠ 0.
    pub i_drift: f64,
    /// Deviation from `I(x) = I(x0) e^{-(w(x) - w(x0))}`: relative when
    /// `I(x0) ≠ 0`, absolute otherwise.
    pub relation_error: f64,
    pub tol: f64,
    pub pass: bool,
    pub steps: usize,
    pub columns: Vec<String>,
    pub rows: Vec<CovRow>,
}

fn uses_ln(exprs: &[&Expr]) -> bool {
    exprs.iter().any(|e| e.contains_func(Func::Ln))
}

fn compile(e: &Expr, slots: &[Symbol], params: &Point) -> Result<CompiledExpr> {
    CompiledExpr::new(e, slots, params)
}

fn single(ctx: &JetContext) -> Result<()> {
    if ctx.q() != 1 {
        return Err(Error::InvalidInput("the reduced equation is only integrated for one dependent variable".into()));
    }
    Ok(())
}

/// Integrates `u' = g` and measures how far `(g, g_x + g_u g)` is from
/// satisfying `u2 = f(x, u, u1)` along the trajectory.
pub fn residual_check(g: &Expr, eq: &EquationE, u0: f64, s: &NumericSettings) -> Result<ResidualReport> {
    let ctx = eq.ctx();
    single(ctx)?;
    let (x, u, u1) = (ctx.x(), ctx.jet(0, 0), ctx.jet(0, 1));
    let slots = [x.clone(), u.clone()];
    let u2 = g.diff(&x) + g.diff(&u) * g;
    let f_on = eq.rhs()[0].substitute_one(&u1, g);
    let cg = compile(g, &slots, &s.params)?;
    let cu2 = compile(&u2, &slots, &s.params)?;
    let cf = compile(&f_on, &slots, &s.params)?;
    let ivp = Ivp {
        rhs: Box::new(|x, y| Ok(vec![cg.eval(&[x, y[0]])?])),
        x0: s.x0,
        x1: s.x1,
        h: s.h,
        y0: vec![u0],
        positive: if uses_ln(&[g, &eq.rhs()[0]]) { vec![0] } else { vec![] },
    };
    let tr = rk4_integrate(&ivp)?;
    let mut max_residual: f64 = 0.0;
    for (x, y) in &tr {
        let at = [*x, y[0]];
        let r = (cu2.eval(&at)? - cf.eval(&at)?).abs();
        max_residual = max_residual.max(r);
    }
    let (x_end, y_end) = tr.last().expect("trajectory has its initial point");
    Ok(ResidualReport {
        max_residual,
        tol: s.tol,
        pass: max_residual <= s.tol,
        steps: tr.len() - 1,
        x_end: *x_end,
        u_end: y_end[0],
    })
}

/// Integrates the original equation `u2 = f` as a first-order system in
/// `(u, u1)`.
pub fn integrate_equation(eq: &EquationE, u0: &[f64], u1_0: &[f64], s: &NumericSettings) -> Result<Trajectory> {
    let ctx = eq.ctx();
    let q = ctx.q();
    if u0.len() != q || u1_0.len() != q {
        return Err(Error::InvalidInput(format!("expected {q} values for u and u1")));
    }
    let mut slots = vec![ctx.x()];
    slots.extend((0..q).map(|a| ctx.jet(a, 0)));
    slots.extend((0..q).map(|a| ctx.jet(a, 1)));
    let fs = eq.rhs().iter().map(|f| compile(f, &slots, &s.params)).collect::<Result<Vec<_>>>()?;
    let ivp = Ivp {
        rhs: Box::new(|x, y| {
            let mut args = Vec::with_capacity(2 * q + 1);
            args.push(x);
            args.extend_from_slice(y);
            let mut d = y[q..].to_vec();
            for f in &fs {
                d.push(f.eval(&args)?);
            }
            Ok(d)
        }),
        x0: s.x0,
        x1: s.x1,
        h: s.h,
        y0: u0.iter().chain(u1_0).copied().collect(),
        positive: if uses_ln(&eq.rhs().iter().collect::<Vec<_>>()) { (0..q).collect() } else { vec![] },
    };
    rk4_integrate(&ivp)
}

/// Integrates the covering system and tracks `I` and `Ĩ = e^w I`.
pub fn conservation_check(
    problem: &Problem,
    result: &ReductionResult,
    ic: &InitialData,
    s: &NumericSettings,
) -> Result<ConservationReport> {
    let cov = problem.covering();
    let ctx = cov.ctx();
    let q = ctx.q();
    if ic.u.len() != q {
        return Err(Error::InvalidInput(format!("expected {q} initial values for u, got {}", ic.u.len())));
    }
    let u1_0 = match &ic.u1 {
        Some(v) if v.len() == q => v.clone(),
        Some(v) => return Err(Error::InvalidInput(format!("expected {q} initial values for u1, got {}", v.len()))),
        None => {
            let g = result.reduced_rhs().ok_or_else(|| {
                Error::InvalidInput("no explicit reduced equation; supply u1 in the initial data".into())
            })?;
            let cg = compile(g, &[ctx.x(), ctx.jet(0, 0)], &s.params)?;
            vec![cg.eval(&[s.x0, ic.u[0]])?]
        }
    };

    let mut slots = vec![ctx.x()];
    slots.extend((0..q).map(|a| ctx.jet(a, 0)));
    slots.extend((0..q).map(|a| ctx.jet(a, 1)));
    slots.push(cov.w());
    let eq = cov.base();
    let fs = eq.rhs().iter().map(|f| compile(f, &slots, &s.params)).collect::<Result<Vec<_>>>()?;
    let lam = compile(cov.lambda(), &slots, &s.params)?;
    let ci = compile(&result.integral, &slots, &s.params)?;
    let cit = compile(&result.integral_tilde, &slots, &s.params)?;

    let mut watched: Vec<&Expr> = eq.rhs().iter().collect();
    watched.extend([cov.lambda(), &result.integral]);
    let ivp = Ivp {
        rhs: Box::new(|x, y| {
            let mut args = Vec::with_capacity(2 * q + 2);
            args.push(x);
            args.extend_from_slice(y);
            let mut d = y[q..2 * q].to_vec();
            for f in &fs {
                d.push(f.eval(&args)?);
            }
            d.push(lam.eval(&args)?);
            Ok(d)
        }),
        x0: s.x0,
        x1: s.x1,
        h: s.h,
        y0: ic.u.iter().chain(&u1_0).copied().chain([ic.w]).collect(),
        positive: if uses_ln(&watched) { (0..q).collect() } else { vec![] },
    };
    let tr = rk4_integrate(&ivp)?;

    let mut rows = Vec::with_capacity(tr.len());
    for (x, y) in tr {
        let mut args = vec![x];
        args.extend_from_slice(&y);
        let at =
            |c: &CompiledExpr| c.eval(&args).map_err(|e| Error::Trajectory { x, msg: format!("{e} (state {y:?})") });
        let (i, itilde) = (at(&ci)?, at(&cit)?);
        rows.push(CovRow { x, state: y, i, itilde });
    }
    let first = &rows[0];
    let (i0, itilde0, w0) = (first.i, first.itilde, first.state[2 * q]);
    let mut itilde_drift: f64 = 0.0;
    let mut i_drift: f64 = 0.0;
    let mut relation_error: f64 = 0.0;
    for r in &rows {
        itilde_drift = itilde_drift.max((r.itilde - itilde0).abs());
        i_drift = i_drift.max((r.i - i0).abs());
        let predicted = i0 * (-(r.state[2 * q] - w0)).exp();
        let dev = (r.i - predicted).abs();
        relation_error = relation_error.max(if i0 != 0.0 { dev / predicted.abs() } else { dev });
    }

    let mut columns = vec![ctx.independent_name().to_string()];
    columns.extend(ctx.dependent_names().iter().cloned());
    columns.extend(ctx.dependent_names().iter().map(|n| format!("{n}1")));
    columns.push(ctx.nonlocal_name().unwrap_or("w").to_string());
    columns.extend(["I".to_string(), "Itilde".to_string()]);

    Ok(ConservationReport {
        i0,
        itilde0,
        itilde_drift,
        i_drift,
        relation_error,
        tol: s.tol,
        pass: itilde_drift <= s.tol,
        steps: rows.len() - 1,
        columns,
        rows,
    })
}

/// Deterministic float rendering shared by every report.
pub fn fmt_float(v: f64) -> String {
    format!("{v:.6e}")
}

impl ResidualReport {
    pub fn key_values(&self) -> Vec<(String, String)> {
        vec![
            ("residual.max".into(), fmt_float(self.max_residual)),
            ("residual.tol".into(), fmt_float(self.tol)),
            ("residual.steps".into(), self.steps.to_string()),
            ("residual.u_end".into(), fmt_float(self.u_end)),
            ("residual.pass".into(), self.pass.to_string()),
        ]
    }

    pub fn human(&self) -> String {
        format!(
            "reduced-equation residual: max |u2 - f| = {} over {} steps (tol {}) -> {}\n  u({}) = {}\n",
            fmt_float(self.max_residual),
            self.steps,
            fmt_float(self.tol),
            if self.pass { "pass" } else { "FAIL" },
            self.x_end,
            fmt_float(self.u_end),
        )
    }
}

impl ConservationReport {
    pub fn key_values(&self) -> Vec<(String, String)> {
        vec![
            ("conservation.I0".into(), fmt_float(self.i0)),
            ("conservation.Itilde0".into(), fmt_float(self.itilde0)),
            ("conservation.Itilde_drift".into(), fmt_float(self.itilde_drift)),
            ("conservation.I_drift".into(), fmt_float(self.i_drift)),
            ("conservation.relation_error".into(), fmt_float(self.relation_error)),
            ("conservation.tol".into(), fmt_float(self.tol)),
            ("conservation.steps".into(), self.steps.to_string()),
            ("conservation.pass".into(), self.pass.to_string()),
        ]
    }

    pub fn human(&self) -> String {
        format!(
            "covering system: I(x0) = {}, Itilde(x0) = {}\n  max |Itilde - Itilde(x0)| = {} (tol {}) -> {}\n  max |I - I(x0)| = {}\n  I vs I(x0)*exp(-(w - w0)): {}\n",
            fmt_float(self.i0),
            fmt_float(self.itilde0),
            fmt_float(self.itilde_drift),
            fmt_float(self.tol),
            if self.pass { "pass" } else { "FAIL" },
            fmt_float(self.i_drift),
            fmt_float(self.relation_error),
        )
    }

    /// Trajectory dump with one row per step.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "{}", self.columns.join(","))?;
        for r in &self.rows {
            let mut cells = vec![format!("{:.12e}", r.x)];
            cells.extend(r.state.iter().map(|v| format!("{v:.12e}")));
            cells.push(format!("{:.12e}", r.i));
            cells.push(format!("{:.12e}", r.itilde));
            writeln!(out, "{}", cells.join(","))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;
    use crate::variational::{Candidate, Lagrangian};

    const WORKED_L: &str = "u1^2/2 + x*u1*(1 - ln(u)) + x^2*ln(u)*(ln(u)/2 - 1)";

    fn worked() -> (Problem, ReductionResult) {
        let c = JetContext::new("x", &["u"], 3).unwrap();
        let p = |s: &str| parse(s, &c).unwrap();
        let l = Lagrangian::new(p(WORKED_L), c.clone()).unwrap();
        let cand = Candidate::new(p("0"), vec![p("1")], p("x/u"), p("0"), &c).unwrap();
        let prob = Problem::new(l, cand).unwrap();
        let res = prob.noether_integral().unwrap();
        (prob, res)
    }

    #[test]
    fn reduced_equation_equilibrium() {
        let (prob, res) = worked();
        let g = res.reduced_rhs().unwrap();
        let e = std::f64::consts::E;
        let r = residual_check(g, prob.equation(), e, &NumericSettings::default()).unwrap();
        assert!((r.u_end - e).abs() < 1e-12);
        assert!(r.max_residual < 1e-12);
    }

    #[test]
    fn residual_on_the_worked_example() {
        let (prob, res) = worked();
        let r = residual_check(res.reduced_rhs().unwrap(), prob.equation(), 2.0, &NumericSettings::default()).unwrap();
        assert!(r.pass, "{}", r.human());
    }

    #[test]
    fn corrupted_reduction_fails() {
        let (prob, _) = worked();
        let g = parse("x*ln(u)", prob.ctx()).unwrap();
        let r = residual_check(&g, prob.equation(), 2.0, &NumericSettings::default()).unwrap();
        assert!(r.max_residual > 1e-2);
        assert!(!r.pass);
    }

    #[test]
    fn conservation_on_and_off_the_hypersurface() {
        let (prob, res) = worked();
        let s = NumericSettings::default();
        let on = conservation_check(&prob, &res, &InitialData::new(vec![2.0]), &s).unwrap();
        assert!(on.pass && on.i0.abs() < 1e-15 && on.i_drift <= 1e-6, "{}", on.human());

        let g0 = 2f64.ln() - 1.0;
        let ic = InitialData { u: vec![2.0], u1: Some(vec![g0 + 0.5]), w: 0.0 };
        let off = conservation_check(&prob, &res, &ic, &s).unwrap();
        assert!((off.i0 - 0.5).abs() < 1e-12);
        assert!(off.pass && off.i_drift >= 1e-3, "{}", off.human());
        assert!(off.relation_error <= 1e-5);
    }

    #[test]
    fn domain_guard_reports_trajectory_error() {
        let (prob, res) = worked();
        let s = NumericSettings::default();
        let err = residual_check(res.reduced_rhs().unwrap(), prob.equation(), -1.0, &s).unwrap_err();
        assert!(matches!(err, Error::Trajectory { .. }));
    }

    #[test]
    fn csv_has_expected_columns() {
        let (prob, res) = worked();
        let s = NumericSettings { h: 0.25, ..NumericSettings::default() };
        let rep = conservation_check(&prob, &res, &InitialData::new(vec![2.0]), &s).unwrap();
        let mut buf = Vec::new();
        rep.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("x,u,u1,w,I,Itilde\n"));
        assert_eq!(text.lines().count(), 6);
    }

    #[test]
    fn original_equation_follows_reduced_solution() {
        let (prob, res) = worked();
        let s = NumericSettings::default();
        let u1 = 2f64.ln() - 1.0;
        let full = integrate_equation(prob.equation(), &[2.0], &[u1], &s).unwrap();
        let red = residual_check(res.reduced_rhs().unwrap(), prob.equation(), 2.0, &s).unwrap();
        assert!((full.last().unwrap().1[0] - red.u_end).abs() < 1e-8);
    }
}
