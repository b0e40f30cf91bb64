use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::expr::{is_zero, Expr, Symbol, SymbolKind};
use crate::jet::{Covering, EquationE, JetContext};

/// How a vector field was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    Point,
    StandardProlonged,
    LambdaProlonged,
    NonlocalProlonged,
    /// The line field `D̄x` or `D̃x` of an equation or covering.
    TotalDerivative,
}

/// A derivation `Σ c_z ∂/∂z` over the coordinates of a jet context.
///
/// Coefficients are known up to `order` in the jet coordinates; acting on an
/// expression that involves higher jets is an error.
#[derive(Debug, Clone)]
pub struct VectorField {
    ctx: JetContext,
    coeffs: BTreeMap<Symbol, Expr>,
    order: usize,
    provenance: Provenance,
}

impl VectorField {
    fn build(ctx: &JetContext, coeffs: BTreeMap<Symbol, Expr>, order: usize, provenance: Provenance) -> Self {
        let mut full = BTreeMap::new();
        for z in ctx.coordinates() {
            let c = coeffs.get(&z).cloned().unwrap_or_else(Expr::zero);
            full.insert(z, c);
        }
        VectorField { ctx: ctx.clone(), coeffs: full, order, provenance }
    }

    /// `ξ ∂x + η^a ∂/∂u^a` (plus `ψ ∂/∂w` when given) on the base coordinates.
    pub fn point(ctx: &JetContext, xi: Expr, eta: &[Expr], psi: Option<Expr>) -> Result<Self> {
        if eta.len() != ctx.q() {
            return Err(Error::InvalidInput(format!("expected {} eta components, got {}", ctx.q(), eta.len())));
        }
        let mut m = BTreeMap::new();
        m.insert(ctx.x(), xi);
        for (a, e) in eta.iter().enumerate() {
            m.insert(ctx.jet(a, 0), e.clone());
        }
        if let Some(p) = psi {
            let w = ctx
                .w(0)
                .ok_or_else(|| Error::InvalidInput("psi given but the context has no nonlocal variable".into()))?;
            m.insert(w, p);
        }
        Ok(VectorField::build(ctx, m, 0, Provenance::Point))
    }

    pub fn ctx(&self) -> &JetContext {
        &self.ctx
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn coefficient(&self, z: &Symbol) -> Expr {
        self.coeffs.get(z).cloned().unwrap_or_else(Expr::zero)
    }

    pub fn coefficients(&self) -> impl Iterator<Item = (&Symbol, &Expr)> {
        self.coeffs.iter()
    }

    pub fn xi(&self) -> Expr {
        self.coefficient(&self.ctx.x())
    }

    /// Coefficient of `∂/∂u^a_i`.
    pub fn eta(&self, a: usize, i: usize) -> Expr {
        self.coefficient(&self.ctx.jet(a, i))
    }

    /// Coefficient of `∂/∂w_i`; zero without a nonlocal variable.
    pub fn psi(&self, i: usize) -> Expr {
        self.ctx.w(i).map(|w| self.coefficient(&w)).unwrap_or_else(Expr::zero)
    }

    /// The field acting as a derivation on `f`.
    pub fn apply(&self, f: &Expr) -> Result<Expr> {
        let mut terms = Vec::new();
        for s in f.symbols() {
            if s.is_parameter() {
                continue;
            }
            if !self.ctx.owns(&s) {
                return Err(Error::InvalidInput(format!("symbol `{s}` is not a coordinate of the field's context")));
            }
            if s.jet_order().is_some_and(|k| k > self.order) {
                return Err(Error::OrderOverflow(s.name().to_string()));
            }
            let c = self.coefficient(&s);
            if c.is_zero_const() {
                continue;
            }
            terms.push(c * f.diff(&s));
        }
        Ok(Expr::sum(terms))
    }

    /// Coefficientwise difference, for identity checks.
    pub fn difference(&self, other: &VectorField) -> Vec<(Symbol, Expr)> {
        self.coeffs.iter().map(|(z, c)| (z.clone(), c - other.coefficient(z))).collect()
    }

    /// Coefficientwise sum; the order is the smaller of the two.
    pub fn add(&self, other: &VectorField) -> VectorField {
        let coeffs = self.coeffs.iter().map(|(z, c)| (z.clone(), c + other.coefficient(z))).collect();
        VectorField::build(&self.ctx, coeffs, self.order.min(other.order), self.provenance)
    }

    /// `D̄x` of an equation as a field on `x, u, u_1`.
    pub fn restricted_total(eq: &EquationE) -> VectorField {
        let ctx = eq.ctx();
        let mut m = BTreeMap::new();
        m.insert(ctx.x(), Expr::one());
        for a in 0..ctx.q() {
            m.insert(ctx.jet(a, 0), ctx.jet_e(a, 1));
            m.insert(ctx.jet(a, 1), eq.rhs()[a].clone());
        }
        VectorField::build(ctx, m, 1, Provenance::TotalDerivative)
    }

    /// `D̃x = D̄x + λ ∂/∂w` of a covering.
    pub fn covering_total(cov: &Covering) -> VectorField {
        let mut f = VectorField::restricted_total(cov.base());
        f.coeffs.insert(cov.w(), cov.lambda().clone());
        f
    }
}

fn check_max_order(e: &Expr, below: usize, what: &str) -> Result<()> {
    if let Some(k) = e.max_dependent_order() {
        if k >= below {
            return Err(Error::InvalidInput(format!("{what} must depend on jets of order < {below}, found order {k}")));
        }
    }
    Ok(())
}

fn prolong(
    ctx: &JetContext,
    xi: &Expr,
    eta: &[Expr],
    lambda: Option<&Expr>,
    k: usize,
) -> Result<BTreeMap<Symbol, Expr>> {
    if eta.len() != ctx.q() {
        return Err(Error::InvalidInput(format!("expected {} eta components, got {}", ctx.q(), eta.len())));
    }
    if k > ctx.max_order() {
        return Err(Error::OrderOverflow(format!("prolongation order {k}")));
    }
    check_max_order(xi, k.max(1), "xi")?;
    for e in eta {
        check_max_order(e, k.max(1), "eta")?;
    }
    let dxi = if k > 0 { ctx.total_derivative(xi)? } else { Expr::zero() };
    let mut m = BTreeMap::new();
    m.insert(ctx.x(), xi.clone());
    for (a, e) in eta.iter().enumerate() {
        let mut prev = e.clone();
        m.insert(ctx.jet(a, 0), prev.clone());
        for i in 1..=k {
            let ui = ctx.jet_e(a, i);
            let mut next = ctx.total_derivative(&prev)? - &dxi * &ui;
            if let Some(l) = lambda {
                next = next + l * (prev - xi * &ui);
            }
            m.insert(ctx.jet(a, i), next.clone());
            prev = next;
        }
    }
    Ok(m)
}

/// Standard prolongation: `η_i = Dx(η_{i-1}) - u_i Dx(ξ)`.
pub fn prolong_standard(xi: &Expr, eta: &[Expr], k: usize, ctx: &JetContext) -> Result<VectorField> {
    let m = prolong(ctx, xi, eta, None, k)?;
    Ok(VectorField::build(ctx, m, k, Provenance::StandardProlonged))
}

/// λ-prolongation:
/// `η_[λ,i] = Dx(η_[λ,i-1]) - Dx(ξ) u_i + λ (η_[λ,i-1] - ξ u_i)`.
pub fn prolong_lambda(xi: &Expr, eta: &[Expr], lambda: &Expr, k: usize, ctx: &JetContext) -> Result<VectorField> {
    let m = prolong(ctx, xi, eta, Some(lambda), k)?;
    Ok(VectorField::build(ctx, m, k, Provenance::LambdaProlonged))
}

/// Generating functions `φ^a = η^a - u^a_1 ξ`, followed by
/// `ψ_0 - w_1 ξ` when the field lives on a covering.
pub fn characteristics(x: &VectorField) -> Vec<Expr> {
    let ctx = x.ctx();
    let xi = x.xi();
    let mut out: Vec<Expr> = (0..ctx.q()).map(|a| x.eta(a, 0) - ctx.jet_e(a, 1) * &xi).collect();
    if let Some(w1) = ctx.w(1) {
        out.push(x.psi(0) - Expr::sym(w1) * &xi);
    }
    out
}

/// `X(u^a_2 - f^a)` reduced on the prolonged equation, one entry per `a`.
pub fn tangency_residuals(x: &VectorField, eq: &EquationE) -> Result<Vec<Expr>> {
    if x.order() < 2 {
        return Err(Error::InvalidInput("tangency needs a field prolonged to order 2".into()));
    }
    let ctx = eq.ctx();
    (0..ctx.q())
        .map(|a| {
            let lhs = x.apply(&(ctx.jet_e(a, 2) - &eq.rhs()[a]))?;
            Ok(eq.reduce_mod_e(&lhs))
        })
        .collect()
}

/// Symmetry condition `X(F)|_E = 0` for a field prolonged to order 2.
pub fn is_symmetry(x: &VectorField, eq: &EquationE) -> Result<bool> {
    for r in tangency_residuals(x, eq)? {
        if !is_zero(&r)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Tangency of the second λ-prolongation of `ξ ∂x + η ∂u` to the equation.
pub fn is_lambda_symmetry(xi: &Expr, eta: &[Expr], lambda: &Expr, eq: &EquationE) -> Result<bool> {
    let x = prolong_lambda(xi, eta, lambda, 2, eq.ctx())?;
    is_symmetry(&x, eq)
}

/// `X̃ = e^w (X + A ∂/∂w)`, prolonged with the covering total derivative:
/// `η̃_i = D̃x(η̃_{i-1}) - u_i D̃x(ξ̃)`, `ψ_i = D̃x(ψ_{i-1}) - w_i D̃x(ξ̃)`.
pub fn lift_nonlocal(x: &VectorField, a: &Expr, cov: &Covering) -> Result<VectorField> {
    if x.provenance() == Provenance::NonlocalProlonged {
        return Err(Error::InvalidInput("field is already a nonlocal lift".into()));
    }
    let ctx = cov.ctx();
    for s in a.symbols() {
        let ok = ctx.owns(&s)
            && match s.kind() {
                SymbolKind::Dependent { order, .. } => order <= 1,
                SymbolKind::Nonlocal { order } => order == 0,
                _ => true,
            };
        if !ok {
            return Err(Error::InvalidInput(format!("A must be a function of (x, u, u1, w); found `{s}`")));
        }
    }
    let k = x.order().max(1);
    if k > ctx.max_order() {
        return Err(Error::OrderOverflow(format!("prolongation order {k}")));
    }
    let ew = Expr::exp(Expr::sym(cov.w()));
    let xi = &ew * x.xi();
    let dxi = cov.total(&xi)?;
    let mut m = BTreeMap::new();
    m.insert(ctx.x(), xi.clone());
    for b in 0..ctx.q() {
        let mut prev = &ew * x.eta(b, 0);
        m.insert(ctx.jet(b, 0), prev.clone());
        for i in 1..=k {
            let next = cov.total(&prev)? - &dxi * ctx.jet_e(b, i);
            m.insert(ctx.jet(b, i), next.clone());
            prev = next;
        }
    }
    let mut prev = &ew * a;
    m.insert(cov.w(), prev.clone());
    for i in 1..=k {
        let wi = Expr::sym(ctx.w(i).unwrap());
        let next = cov.total(&prev)? - &dxi * wi;
        m.insert(ctx.w(i).unwrap(), next.clone());
        prev = next;
    }
    Ok(VectorField::build(ctx, m, k, Provenance::NonlocalProlonged))
}

/// Each characteristic factors as `e^w` times a `w`-free function, tested as
/// `∂(φ e^{-w})/∂w = 0`.
pub fn has_lambda_covering_form(y: &VectorField) -> Result<bool> {
    let w = y.ctx().w(0).ok_or_else(|| Error::InvalidInput("field does not live on a covering".into()))?;
    let emw = Expr::exp(-Expr::sym(w.clone()));
    for phi in characteristics(y) {
        if !is_zero(&(phi * &emw).diff(&w))? {
            return Ok(false);
        }
    }
    Ok(true)
}
