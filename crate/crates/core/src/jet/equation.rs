use std::collections::BTreeMap;

use super::{JetContext, DEFAULT_NONLOCAL};
use crate::error::{Error, Result};
use crate::expr::{Expr, Symbol, SymbolKind};

/// A second-order system `u^a_2 = f^a(x, u, u_1)`.
#[derive(Debug, Clone)]
pub struct EquationE {
    ctx: JetContext,
    rhs: Vec<Expr>,
    /// `prolonged[i - 2][a]` is the image of `u^a_i` on the equation.
    prolonged: Vec<Vec<Expr>>,
}

fn check_first_order(e: &Expr, ctx: &JetContext, what: &str) -> Result<()> {
    for s in e.symbols() {
        if !ctx.owns(&s) {
            return Err(Error::InvalidInput(format!("{what}: symbol `{s}` is not part of the jet context")));
        }
        match s.kind() {
            SymbolKind::Dependent { order, .. } if order >= 2 => {
                return Err(Error::InvalidInput(format!("{what} must not depend on `{s}`")));
            }
            SymbolKind::Nonlocal { .. } => {
                return Err(Error::InvalidInput(format!("{what} must not depend on the nonlocal variable `{s}`")));
            }
            _ => {}
        }
    }
    Ok(())
}

impl EquationE {
    pub fn new(ctx: JetContext, rhs: Vec<Expr>) -> Result<Self> {
        if rhs.len() != ctx.q() {
            return Err(Error::InvalidInput(format!("expected {} right-hand sides, got {}", ctx.q(), rhs.len())));
        }
        for f in &rhs {
            check_first_order(f, &ctx, "equation right-hand side")?;
        }
        let mut eq = EquationE { ctx, rhs, prolonged: Vec::new() };
        let mut level = eq.rhs.clone();
        for _ in 2..=eq.ctx.max_order() {
            let next = level.iter().map(|f| eq.restricted_derivative(f)).collect::<Result<Vec<_>>>()?;
            eq.prolonged.push(level);
            level = next;
        }
        Ok(eq)
    }

    pub fn ctx(&self) -> &JetContext {
        &self.ctx
    }

    pub fn rhs(&self) -> &[Expr] {
        &self.rhs
    }

    /// Image of `u^a_i` (`i >= 2`) on the prolonged equation.
    fn image(&self, a: usize, i: usize) -> &Expr {
        &self.prolonged[i - 2][a]
    }

    /// `D̄x = ∂x + u^a_1 ∂/∂u^a + f^a ∂/∂u^a_1`, for expressions in `x, u, u_1`.
    pub fn restricted_derivative(&self, e: &Expr) -> Result<Expr> {
        check_first_order(e, &self.ctx, "argument of the restricted total derivative")?;
        let mut terms = Vec::new();
        for s in e.symbols() {
            let coeff = match s.kind() {
                SymbolKind::Independent => Expr::one(),
                SymbolKind::Dependent { index, order: 0 } => self.ctx.jet_e(index, 1),
                SymbolKind::Dependent { index, .. } => self.rhs[index].clone(),
                _ => continue,
            };
            terms.push(coeff * e.diff(&s));
        }
        Ok(Expr::sum(terms))
    }

    /// Substitutes every `u^a_i`, `i >= 2`, by its image on the prolonged
    /// equation. The result is free of second and higher jets.
    pub fn reduce_mod_e(&self, e: &Expr) -> Expr {
        let bindings = self.bindings();
        e.substitute(&bindings)
    }

    fn bindings(&self) -> BTreeMap<Symbol, Expr> {
        let mut m = BTreeMap::new();
        for i in 2..=self.ctx.max_order() {
            for a in 0..self.ctx.q() {
                m.insert(self.ctx.jet(a, i), self.image(a, i).clone());
            }
        }
        m
    }
}

/// One-dimensional covering `{u^a_2 = f^a, w_1 = λ}` of an equation.
#[derive(Debug, Clone)]
pub struct Covering {
    base: EquationE,
    lambda: Expr,
    /// `lambda_jets[i - 1]` is the image of `w_i`.
    lambda_jets: Vec<Expr>,
}

impl Covering {
    /// Builds the covering; the equation's context is extended with the
    /// nonlocal variable `w` when it does not carry one yet.
    pub fn new(base: &EquationE, lambda: Expr) -> Result<Self> {
        check_first_order(&lambda, base.ctx(), "lambda")?;
        let base = if base.ctx().has_nonlocal() {
            base.clone()
        } else {
            EquationE::new(base.ctx().with_nonlocal(DEFAULT_NONLOCAL)?, base.rhs().to_vec())?
        };
        let mut lambda_jets = vec![lambda.clone()];
        for _ in 2..=base.ctx().max_order() {
            let next = base.restricted_derivative(lambda_jets.last().unwrap())?;
            lambda_jets.push(next);
        }
        Ok(Covering { base, lambda, lambda_jets })
    }

    pub fn base(&self) -> &EquationE {
        &self.base
    }

    pub fn ctx(&self) -> &JetContext {
        self.base.ctx()
    }

    pub fn lambda(&self) -> &Expr {
        &self.lambda
    }

    pub fn w(&self) -> Symbol {
        self.ctx().w(0).expect("covering context carries w")
    }

    /// `D̃x = D̄x + λ ∂/∂w`, for expressions in `x, u, u_1, w`.
    pub fn covering_derivative(&self, e: &Expr) -> Result<Expr> {
        let w = self.w();
        let mut local = Vec::new();
        for s in e.symbols() {
            if !self.ctx().owns(&s) {
                return Err(Error::InvalidInput(format!("symbol `{s}` is not part of the covering context")));
            }
            match s.kind() {
                SymbolKind::Dependent { order, .. } if order >= 2 => {
                    return Err(Error::InvalidInput(format!("covering derivative argument must not depend on `{s}`")));
                }
                SymbolKind::Nonlocal { order } if order >= 1 => {
                    return Err(Error::InvalidInput(format!("covering derivative argument must not depend on `{s}`")));
                }
                _ => {}
            }
            if s != w {
                local.push(s);
            }
        }
        let mut terms = Vec::new();
        for s in local {
            let coeff = match s.kind() {
                SymbolKind::Independent => Expr::one(),
                SymbolKind::Dependent { index, order: 0 } => self.ctx().jet_e(index, 1),
                SymbolKind::Dependent { index, .. } => self.base.rhs()[index].clone(),
                _ => continue,
            };
            terms.push(coeff * e.diff(&s));
        }
        terms.push(self.lambda.clone() * e.diff(&w));
        Ok(Expr::sum(terms))
    }

    /// Reduction modulo the covering system: `u^a_i -> D̄x^{i-2} f^a` and
    /// `w_i -> D̄x^{i-1} λ`.
    pub fn reduce(&self, e: &Expr) -> Expr {
        let mut m = self.base.bindings();
        for i in 1..=self.ctx().max_order() {
            m.insert(self.ctx().w(i).unwrap(), self.lambda_jets[i - 1].clone());
        }
        e.substitute(&m)
    }

    /// `D̃x` applied to an arbitrary jet expression, after reduction.
    pub fn total(&self, e: &Expr) -> Result<Expr> {
        self.covering_derivative(&self.reduce(e))
    }
}
