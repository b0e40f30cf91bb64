//! Euler–Lagrange equations, the Poincaré–Cartan form, λ-variational
//! symmetry checks and the conditional reduction on `{I = 0}`.
//!
//! For a candidate `(ξ, η, λ, R)` and Lagrangian `L`, three formulations of
//! the λ-variational condition are checked independently:
//!
//! * the defining identity `X(L) + L (Dx + λ) ξ = (Dx + λ) R` on the
//!   equation, with `X` the λ-prolongation of `ξ ∂x + η ∂u`;
//! * the form condition `L_X Θ + (X ⌟ Θ - R) λ dx - dR ∈ C̄`;
//! * the covering condition `L_X̃ Θ - d(e^w R) ∈ C̃` for the lift
//!   `X̃ = e^w (X + A ∂w)`, any `A`.
//!
//! A passing candidate yields `I = X ⌟ Θ - R`, which obeys `D̄x I + λ I = 0`,
//! and `Ĩ = e^w I`, a genuine first integral of the covering.

mod lagrangian;

pub use lagrangian::Lagrangian;

use crate::error::{Error, Result};
use crate::expr::{is_zero, simplify, Expr, SymbolKind};
use crate::geometry::{
    in_contact_ideal, interior_product, is_symmetry, lie_derivative, lift_nonlocal, prolong_lambda, prolong_standard,
    ContactIdeal, OneForm, VectorField,
};
use crate::jet::{Covering, EquationE, JetContext};

/// Candidate λ-variational symmetry `(ξ, η^a, λ, R)`.
#[derive(Debug, Clone)]
pub struct Candidate {
    pub xi: Expr,
    pub eta: Vec<Expr>,
    pub lambda: Expr,
    pub r: Expr,
}

fn on_base_manifold(e: &Expr, ctx: &JetContext, what: &str) -> Result<()> {
    for s in e.symbols() {
        let ok = ctx.owns(&s)
            && matches!(
                s.kind(),
                SymbolKind::Independent | SymbolKind::Parameter | SymbolKind::Dependent { order: 0, .. }
            );
        if !ok {
            return Err(Error::InvalidInput(format!("{what} must be a function of (x, u) only; found `{s}`")));
        }
    }
    Ok(())
}

impl Candidate {
    pub fn new(xi: Expr, eta: Vec<Expr>, lambda: Expr, r: Expr, ctx: &JetContext) -> Result<Self> {
        if eta.len() != ctx.q() {
            return Err(Error::InvalidInput(format!("expected {} eta components, got {}", ctx.q(), eta.len())));
        }
        on_base_manifold(&xi, ctx, "xi")?;
        for e in &eta {
            on_base_manifold(e, ctx, "eta")?;
        }
        on_base_manifold(&r, ctx, "R")?;
        for s in lambda.symbols() {
            let ok = ctx.owns(&s)
                && !matches!(s.kind(), SymbolKind::Nonlocal { .. })
                && s.jet_order().is_none_or(|k| k <= 1);
            if !ok {
                return Err(Error::InvalidInput(format!("lambda must be a function of (x, u, u1); found `{s}`")));
            }
        }
        Ok(Candidate { xi, eta, lambda, r })
    }
}

/// Explicit or implicit outcome of solving `I = 0` for `u1`.
#[derive(Debug, Clone, PartialEq)]
pub enum Reduction {
    /// Reduced first-order equation `u1 = g(x, u)`.
    Explicit(Expr),
    Implicit {
        note: String,
    },
}

#[derive(Debug, Clone)]
pub struct ReductionResult {
    /// `I = X ⌟ Θ - R`.
    pub integral: Expr,
    /// `Ĩ = e^w I`.
    pub integral_tilde: Expr,
    pub reduced: Reduction,
    /// True when λ is not identically zero, so `I` is only conserved on
    /// `{I = 0}`.
    pub conditional: bool,
}

impl ReductionResult {
    pub fn label(&self) -> &'static str {
        if self.conditional {
            "conserved only on {I=0} (conditional)"
        } else {
            "first integral"
        }
    }

    pub fn reduced_rhs(&self) -> Option<&Expr> {
        match &self.reduced {
            Reduction::Explicit(g) => Some(g),
            Reduction::Implicit { .. } => None,
        }
    }
}

/// A Lagrangian, its Euler–Lagrange equation and a candidate symmetry.
#[derive(Debug, Clone)]
pub struct Problem {
    lagrangian: Lagrangian,
    equation: EquationE,
    candidate: Candidate,
    covering: Covering,
}

impl Problem {
    pub fn new(lagrangian: Lagrangian, candidate: Candidate) -> Result<Self> {
        let equation = lagrangian.euler_lagrange()?;
        Candidate::new(
            candidate.xi.clone(),
            candidate.eta.clone(),
            candidate.lambda.clone(),
            candidate.r.clone(),
            lagrangian.ctx(),
        )?;
        let covering = Covering::new(&equation, candidate.lambda.clone())?;
        Ok(Problem { lagrangian, equation, candidate, covering })
    }

    pub fn lagrangian(&self) -> &Lagrangian {
        &self.lagrangian
    }

    pub fn equation(&self) -> &EquationE {
        &self.equation
    }

    pub fn candidate(&self) -> &Candidate {
        &self.candidate
    }

    pub fn covering(&self) -> &Covering {
        &self.covering
    }

    pub fn ctx(&self) -> &JetContext {
        self.lagrangian.ctx()
    }

    /// λ-prolongation of the candidate field to order `k`.
    pub fn lambda_field(&self, k: usize) -> Result<VectorField> {
        let c = &self.candidate;
        prolong_lambda(&c.xi, &c.eta, &c.lambda, k, self.ctx())
    }

    /// `X(L) + L (Dx + λ) ξ - (Dx + λ) R` reduced on the equation.
    pub fn definition_residual(&self) -> Result<Expr> {
        let c = &self.candidate;
        let ctx = self.ctx();
        let x = self.lambda_field(1)?;
        let l = self.lagrangian.expr();
        let d_lambda = |e: &Expr| -> Result<Expr> { Ok(ctx.total_derivative(e)? + &c.lambda * e) };
        let raw = x.apply(l)? + l * d_lambda(&c.xi)? - d_lambda(&c.r)?;
        simplify(&self.equation.reduce_mod_e(&raw))
    }

    pub fn check_definition(&self) -> Result<bool> {
        is_zero(&self.definition_residual()?)
    }

    /// `L_X Θ + (X ⌟ Θ - R) λ dx - dR`.
    pub fn form_condition(&self) -> Result<OneForm> {
        let c = &self.candidate;
        let ctx = self.ctx();
        let theta = self.lagrangian.poincare_cartan();
        let x = self.lambda_field(1)?;
        let lx = lie_derivative(&x, &theta)?;
        let contraction = interior_product(&x, &theta) - &c.r;
        let lam_dx = OneForm::from_pairs([(ctx.x(), contraction * &c.lambda)]);
        Ok(lx.add(&lam_dx).sub(&OneForm::d(&c.r)))
    }

    pub fn check_form_condition(&self) -> Result<bool> {
        in_contact_ideal(&self.form_condition()?, ContactIdeal::Base(&self.equation))
    }

    /// `X̃ = e^w (X + A ∂w)` on the covering.
    pub fn lifted_field(&self, a: &Expr) -> Result<VectorField> {
        let x = self.lambda_field(1)?;
        lift_nonlocal(&x, a, &self.covering)
    }

    /// `L_X̃ Θ - d(e^w R)`.
    pub fn covering_form(&self, a: &Expr) -> Result<OneForm> {
        let theta = self.lagrangian.poincare_cartan();
        let xt = self.lifted_field(a)?;
        let ew = Expr::exp(Expr::sym(self.covering.w()));
        Ok(lie_derivative(&xt, &theta)?.sub(&OneForm::d(&(ew * &self.candidate.r))))
    }

    pub fn check_covering_condition(&self, a: &Expr) -> Result<bool> {
        in_contact_ideal(&self.covering_form(a)?, ContactIdeal::Covering(&self.covering))
    }

    /// Lie point symmetry test of the standard prolongation of `ξ ∂x + η ∂u`.
    pub fn is_symmetry(&self) -> Result<bool> {
        let c = &self.candidate;
        let x = prolong_standard(&c.xi, &c.eta, 2, self.ctx())?;
        is_symmetry(&x, &self.equation)
    }

    /// λ-symmetry test: tangency of the second λ-prolongation.
    pub fn is_lambda_symmetry(&self) -> Result<bool> {
        is_symmetry(&self.lambda_field(2)?, &self.equation)
    }

    /// Builds `I`, `Ĩ` and the reduced equation, asserting `D̄x I + λ I = 0`
    /// on the equation and `D̃x Ĩ = 0` on the covering.
    pub fn noether_integral(&self) -> Result<ReductionResult> {
        let c = &self.candidate;
        let theta = self.lagrangian.poincare_cartan();
        let x = self.lambda_field(1)?;
        let integral = simplify(&(interior_product(&x, &theta) - &c.r))?;
        let w = Expr::sym(self.covering.w());
        let ew = Expr::exp(w);
        let integral_tilde = Expr::product([ew.clone(), integral.clone()]);

        let bar = self.equation.restricted_derivative(&integral)? + &c.lambda * &integral;
        if !is_zero(&self.equation.reduce_mod_e(&bar))? {
            return Err(Error::Assertion(format!("D̄x(I) + λ I does not vanish for I = {integral}")));
        }
        let lifted = interior_product(&self.lifted_field(&Expr::zero())?, &theta) - &ew * &c.r;
        if !is_zero(&(lifted - &integral_tilde))? {
            return Err(Error::Assertion("X̃ ⌟ Θ - e^w R differs from e^w I".into()));
        }
        if !is_zero(&self.covering.covering_derivative(&integral_tilde)?)? {
            return Err(Error::Assertion(format!("D̃x(Ĩ) does not vanish for Ĩ = {integral_tilde}")));
        }
        let conditional = !is_zero(&c.lambda)?;
        let reduced = self.solve_for_u1(&integral)?;
        Ok(ReductionResult { integral, integral_tilde, reduced, conditional })
    }

    fn solve_for_u1(&self, integral: &Expr) -> Result<Reduction> {
        let ctx = self.ctx();
        if ctx.q() != 1 {
            return Ok(Reduction::Implicit {
                note: format!("I = 0 is a single constraint on {} first derivatives; not solved", ctx.q()),
            });
        }
        let u1 = ctx.jet(0, 1);
        let slope = integral.diff(&u1);
        if is_zero(&slope)? {
            return Ok(Reduction::Implicit { note: "I does not involve u1".into() });
        }
        if !is_zero(&slope.diff(&u1))? {
            return Ok(Reduction::Implicit { note: "I is not linear in u1; the constraint is kept implicit".into() });
        }
        let offset = integral.substitute_one(&u1, &Expr::zero());
        Ok(Reduction::Explicit(simplify(&(-offset / slope))?))
    }
}

/// `f(x, u, g) - (g_x + g_u g)` for a reduced equation `u1 = g(x, u)`.
pub fn reduction_residual(g: &Expr, eq: &EquationE) -> Result<Expr> {
    let ctx = eq.ctx();
    if ctx.q() != 1 {
        return Err(Error::InvalidInput("reduction residual is defined for a single dependent variable".into()));
    }
    let u = ctx.jet(0, 0);
    let u1 = ctx.jet(0, 1);
    if g.contains_symbol(&u1) || g.max_dependent_order().is_some_and(|k| k > 0) {
        return Err(Error::InvalidInput("reduced right-hand side must be a function of (x, u)".into()));
    }
    let along = g.diff(&ctx.x()) + g.diff(&u) * g;
    let f_on = eq.rhs()[0].substitute_one(&u1, g);
    simplify(&(f_on - along))
}

/// Certifies that every solution of `u1 = g` solves the original equation.
pub fn verify_reduction(result: &ReductionResult, eq: &EquationE) -> Result<bool> {
    let g = result.reduced_rhs().ok_or_else(|| Error::InvalidInput("no explicit reduced equation to verify".into()))?;
    is_zero(&reduction_residual(g, eq)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    const WORKED_L: &str = "u1^2/2 + x*u1*(1 - ln(u)) + x^2*ln(u)*(ln(u)/2 - 1)";

    fn ctx() -> JetContext {
        JetContext::new("x", &["u"], 3).unwrap()
    }

    fn problem(l: &str, xi: &str, eta: &str, lambda: &str, r: &str) -> Problem {
        let c = ctx();
        let p = |s: &str| parse(s, &c).unwrap();
        let lag = Lagrangian::new(p(l), c.clone()).unwrap();
        let cand = Candidate::new(p(xi), vec![p(eta)], p(lambda), p(r), &c).unwrap();
        Problem::new(lag, cand).unwrap()
    }

    #[test]
    fn worked_example_passes_all_three_checks() {
        let pb = problem(WORKED_L, "0", "1", "x/u", "0");
        assert!(pb.check_definition().unwrap());
        assert!(pb.check_form_condition().unwrap());
        let c = pb.covering().ctx().clone();
        for a in ["0", "1", "x*u"] {
            assert!(pb.check_covering_condition(&parse(a, &c).unwrap()).unwrap(), "A = {a}");
        }
        assert!(!pb.is_symmetry().unwrap());
    }

    #[test]
    fn worked_example_integral_and_reduction() {
        let pb = problem(WORKED_L, "0", "1", "x/u", "0");
        let res = pb.noether_integral().unwrap();
        let c = pb.covering().ctx().clone();
        assert!(is_zero(&(res.integral.clone() - parse("u1 - x*ln(u) + x", &c).unwrap())).unwrap());
        assert!(res.conditional);
        let g = res.reduced_rhs().unwrap().clone();
        assert!(is_zero(&(g - parse("x*ln(u) - x", &c).unwrap())).unwrap());
        assert!(verify_reduction(&res, pb.equation()).unwrap());
        let mut bad = res.clone();
        bad.reduced = Reduction::Explicit(parse("x*ln(u)", &c).unwrap());
        assert!(!verify_reduction(&bad, pb.equation()).unwrap());
    }

    #[test]
    fn classical_cases() {
        assert!(problem("u1^2/2", "0", "1", "0", "0").check_definition().unwrap());
        assert!(!problem("u1^2/2", "0", "u", "0", "0").check_definition().unwrap());
        assert!(problem("u1^2/2", "0", "1", "0", "0").check_form_condition().unwrap());
        let res = problem("u1^2/2", "0", "1", "0", "0").noether_integral().unwrap();
        assert_eq!(res.integral, parse("u1", &ctx()).unwrap());
        assert!(!res.conditional);
        assert_eq!(res.reduced, Reduction::Explicit(Expr::zero()));
    }

    #[test]
    fn quartic_lagrangian_gives_implicit_reduction() {
        let res = problem("u1^4/12", "0", "1", "0", "0").noether_integral().unwrap();
        assert!(matches!(res.reduced, Reduction::Implicit { .. }));
    }

    #[test]
    fn candidate_validation() {
        let c = ctx();
        let p = |s: &str| parse(s, &c).unwrap();
        assert!(Candidate::new(p("0"), vec![p("1")], p("x/u"), p("u1"), &c).is_err());
        assert!(Candidate::new(p("u1"), vec![p("1")], p("0"), p("0"), &c).is_err());
        assert!(Candidate::new(p("0"), vec![p("1")], p("u2"), p("0"), &c).is_err());
        assert!(Candidate::new(p("0"), vec![], p("0"), p("0"), &c).is_err());
    }
}
