use crate::error::{Error, Result};
use crate::expr::{is_zero, simplify, Expr, SymbolKind};
use crate::geometry::OneForm;
use crate::jet::{EquationE, JetContext};

/// A first-order Lagrangian `L(x, u, u1)`.
#[derive(Debug, Clone)]
pub struct Lagrangian {
    expr: Expr,
    ctx: JetContext,
}

impl Lagrangian {
    pub fn new(expr: Expr, ctx: JetContext) -> Result<Self> {
        for s in expr.symbols() {
            let ok = ctx.owns(&s)
                && match s.kind() {
                    SymbolKind::Dependent { order, .. } => order <= 1,
                    SymbolKind::Nonlocal { .. } => false,
                    _ => true,
                };
            if !ok {
                return Err(Error::InvalidInput(format!("Lagrangian must be a function of (x, u, u1); found `{s}`")));
            }
        }
        Ok(Lagrangian { expr, ctx })
    }

    pub fn expr(&self) -> &Expr {
        &self.expr
    }

    pub fn ctx(&self) -> &JetContext {
        &self.ctx
    }

    /// `∂L/∂u^a_1`.
    pub fn momentum(&self, a: usize) -> Expr {
        self.expr.diff(&self.ctx.jet(a, 1))
    }

    /// `∂²L/∂u^a_1 ∂u^b_1`.
    pub fn hessian(&self) -> Vec<Vec<Expr>> {
        let q = self.ctx.q();
        (0..q)
            .map(|a| {
                let pa = self.momentum(a);
                (0..q).map(|b| pa.diff(&self.ctx.jet(b, 1))).collect()
            })
            .collect()
    }

    pub fn hessian_determinant(&self) -> Result<Expr> {
        simplify(&determinant(&self.hessian()))
    }

    /// Solves `Dx(∂L/∂u^a_1) - ∂L/∂u^a = 0` for `u^a_2` by Gauss–Jordan
    /// elimination on the Hessian system.
    pub fn euler_lagrange(&self) -> Result<EquationE> {
        let ctx = &self.ctx;
        let q = ctx.q();
        let det = self.hessian_determinant()?;
        if is_zero(&det)? {
            return Err(Error::SingularHessian(det.to_string()));
        }
        let mut h = self.hessian();
        let x = ctx.x();
        let mut r: Vec<Expr> = (0..q)
            .map(|a| {
                let pa = self.momentum(a);
                let mut rhs = self.expr.diff(&ctx.jet(a, 0)) - pa.diff(&x);
                for b in 0..q {
                    rhs = rhs - ctx.jet_e(b, 1) * pa.diff(&ctx.jet(b, 0));
                }
                rhs
            })
            .collect();

        for k in 0..q {
            let mut pivot = None;
            for (i, row) in h.iter().enumerate().skip(k) {
                if !is_zero(&row[k])? {
                    pivot = Some(i);
                    break;
                }
            }
            let p = pivot.ok_or_else(|| Error::SingularHessian(det.to_string()))?;
            h.swap(k, p);
            r.swap(k, p);
            for i in 0..q {
                if i == k || h[i][k].is_zero_const() {
                    continue;
                }
                let factor = &h[i][k] / &h[k][k];
                let pivot_row = h[k].clone();
                for (hij, hkj) in h[i].iter_mut().zip(&pivot_row).skip(k) {
                    *hij = simplify(&(&*hij - &factor * hkj))?;
                }
                r[i] = simplify(&(&r[i] - &factor * &r[k]))?;
            }
        }
        let rhs = (0..q).map(|a| simplify(&(&r[a] / &h[a][a]))).collect::<Result<Vec<_>>>()?;
        EquationE::new(ctx.clone(), rhs)
    }

    /// `Θ = ∂L/∂u^a_1 (du^a - u^a_1 dx) + L dx`.
    pub fn poincare_cartan(&self) -> OneForm {
        let ctx = &self.ctx;
        let mut dx = self.expr.clone();
        let mut pairs = Vec::new();
        for a in 0..ctx.q() {
            let pa = self.momentum(a);
            dx = dx - ctx.jet_e(a, 1) * &pa;
            pairs.push((ctx.jet(a, 0), pa));
        }
        pairs.push((ctx.x(), dx));
        OneForm::from_pairs(pairs)
    }
}

fn determinant(m: &[Vec<Expr>]) -> Expr {
    match m.len() {
        0 => Expr::one(),
        1 => m[0][0].clone(),
        n => Expr::sum((0..n).map(|j| {
            let minor: Vec<Vec<Expr>> = m[1..]
                .iter()
                .map(|row| row.iter().enumerate().filter(|(k, _)| *k != j).map(|(_, e)| e.clone()).collect())
                .collect();
            let sign = if j % 2 == 0 { Expr::one() } else { Expr::int(-1) };
            sign * &m[0][j] * determinant(&minor)
        })),
    }
}
