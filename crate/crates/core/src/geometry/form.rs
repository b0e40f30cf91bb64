use std::collections::BTreeMap;

use super::field::VectorField;
use crate::error::{Error, Result};
use crate::expr::{is_zero, Expr, Symbol};
use crate::jet::{Covering, EquationE};

/// A one-form `Σ a_z dz` over coordinate differentials. Zero coefficients are
/// never stored.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct OneForm {
    coeffs: BTreeMap<Symbol, Expr>,
}

impl OneForm {
    pub fn zero() -> Self {
        OneForm::default()
    }

    pub fn from_pairs<I: IntoIterator<Item = (Symbol, Expr)>>(pairs: I) -> Self {
        let mut f = OneForm::zero();
        for (z, c) in pairs {
            f.add_term(z, c);
        }
        f
    }

    fn add_term(&mut self, z: Symbol, c: Expr) {
        let next = match self.coeffs.remove(&z) {
            Some(old) => old + c,
            None => c,
        };
        if !next.is_zero_const() {
            self.coeffs.insert(z, next);
        }
    }

    /// Full coordinate differential of a scalar; parameters are constants.
    pub fn d(f: &Expr) -> Self {
        OneForm::from_pairs(f.symbols().into_iter().filter(|s| !s.is_parameter()).map(|s| {
            let c = f.diff(&s);
            (s, c)
        }))
    }

    pub fn coefficient(&self, z: &Symbol) -> Expr {
        self.coeffs.get(z).cloned().unwrap_or_else(Expr::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Symbol, &Expr)> {
        self.coeffs.iter()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn scale(&self, s: &Expr) -> OneForm {
        OneForm::from_pairs(self.coeffs.iter().map(|(z, c)| (z.clone(), c * s)))
    }

    pub fn add(&self, other: &OneForm) -> OneForm {
        let mut out = self.clone();
        for (z, c) in &other.coeffs {
            out.add_term(z.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &OneForm) -> OneForm {
        self.add(&other.scale(&Expr::int(-1)))
    }
}

/// `X ⌟ ω = Σ ω_z X^z`.
pub fn interior_product(x: &VectorField, omega: &OneForm) -> Expr {
    Expr::sum(omega.terms().map(|(z, c)| c * x.coefficient(z)))
}

/// `L_X ω = Σ [X(a_z) dz + a_z d(X^z)]`, computed componentwise.
pub fn lie_derivative(x: &VectorField, omega: &OneForm) -> Result<OneForm> {
    let mut out = OneForm::zero();
    for (z, a) in omega.terms() {
        out.add_term(z.clone(), x.apply(a)?);
        let dxz = OneForm::d(&x.coefficient(z)).scale(a);
        out = out.add(&dxz);
    }
    Ok(out)
}

/// The contact ideals `C̄` (base) and `C̃` (covering).
#[derive(Debug, Clone, Copy)]
pub enum ContactIdeal<'a> {
    Base(&'a EquationE),
    Covering(&'a Covering),
}

impl ContactIdeal<'_> {
    /// Generators `du^a - u^a_1 dx`, `du^a_1 - f^a dx` (and `dw - λ dx`).
    pub fn generators(&self) -> Vec<OneForm> {
        let eq = match self {
            ContactIdeal::Base(e) => *e,
            ContactIdeal::Covering(c) => c.base(),
        };
        let ctx = eq.ctx();
        let mut out = Vec::new();
        for a in 0..ctx.q() {
            out.push(OneForm::from_pairs([(ctx.jet(a, 0), Expr::one()), (ctx.x(), -ctx.jet_e(a, 1))]));
            out.push(OneForm::from_pairs([(ctx.jet(a, 1), Expr::one()), (ctx.x(), -eq.rhs()[a].clone())]));
        }
        if let ContactIdeal::Covering(c) = self {
            out.push(OneForm::from_pairs([(c.w(), Expr::one()), (ctx.x(), -c.lambda().clone())]));
        }
        out
    }
}

/// Membership of `omega` in the contact ideal, decided by annihilation of
/// the total-derivative line field on the equation manifold.
pub fn in_contact_ideal(omega: &OneForm, ideal: ContactIdeal<'_>) -> Result<bool> {
    type Reducer<'r> = Box<dyn Fn(&Expr) -> Expr + 'r>;
    let (field, block, reduce): (VectorField, Vec<Symbol>, Reducer<'_>) = match ideal {
        ContactIdeal::Base(eq) => (
            VectorField::restricted_total(eq),
            eq.ctx().equation_block(false),
            Box::new(move |e: &Expr| eq.reduce_mod_e(e)),
        ),
        ContactIdeal::Covering(cov) => {
            (VectorField::covering_total(cov), cov.ctx().equation_block(true), Box::new(move |e: &Expr| cov.reduce(e)))
        }
    };
    for (z, _) in omega.terms() {
        if !block.contains(z) {
            return Err(Error::InvalidInput(format!("differential d{z} lies outside the equation manifold")));
        }
    }
    is_zero(&reduce(&interior_product(&field, omega)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;
    use crate::geometry::prolong_standard;
    use crate::jet::JetContext;

    fn ctx() -> JetContext {
        JetContext::new("x", &["u"], 3).unwrap()
    }

    fn example_eq() -> EquationE {
        let c = ctx();
        let f = parse("x^2*ln(u)/u - x^2/u + ln(u) - 1", &c).unwrap();
        EquationE::new(c, vec![f]).unwrap()
    }

    #[test]
    fn interior_product_examples() {
        let c = ctx();
        let eq = example_eq();
        let theta = OneForm::from_pairs([(c.jet(0, 0), Expr::one()), (c.x(), -c.jet_e(0, 1))]);
        let du = VectorField::point(&c, Expr::zero(), &[Expr::one()], None).unwrap();
        assert_eq!(interior_product(&du, &theta), Expr::one());
        let dbar = VectorField::restricted_total(&eq);
        assert_eq!(interior_product(&dbar, &theta), Expr::zero());
    }

    #[test]
    fn lie_derivative_of_u1_dx_along_dx() {
        let c = ctx();
        let dx = prolong_standard(&Expr::one(), &[Expr::zero()], 1, &c).unwrap();
        let omega = OneForm::from_pairs([(c.x(), c.jet_e(0, 1))]);
        assert!(lie_derivative(&dx, &omega).unwrap().is_empty());
    }

    #[test]
    fn naturality_on_a_sample() {
        let c = ctx();
        let f = parse("x*ln(u) + u1^2*u", &c).unwrap();
        let x = prolong_standard(&parse("x*u", &c).unwrap(), &[parse("u^2 + x", &c).unwrap()], 2, &c).unwrap();
        let lhs = lie_derivative(&x, &OneForm::d(&f)).unwrap();
        let rhs = OneForm::d(&x.apply(&f).unwrap());
        for z in c.coordinates() {
            assert!(is_zero(&(lhs.coefficient(&z) - rhs.coefficient(&z))).unwrap(), "d{z}");
        }
    }

    #[test]
    fn contact_generators_are_members() {
        let eq = example_eq();
        let c = eq.ctx().clone();
        for g in ContactIdeal::Base(&eq).generators() {
            assert!(in_contact_ideal(&g, ContactIdeal::Base(&eq)).unwrap());
        }
        assert!(!in_contact_ideal(&OneForm::d(&c.xe()), ContactIdeal::Base(&eq)).unwrap());
        let cov = Covering::new(&eq, parse("x/u", &c).unwrap()).unwrap();
        for g in ContactIdeal::Covering(&cov).generators() {
            assert!(in_contact_ideal(&g, ContactIdeal::Covering(&cov)).unwrap());
        }
        let bad = OneForm::from_pairs([(c.jet(0, 2), Expr::one())]);
        assert!(in_contact_ideal(&bad, ContactIdeal::Base(&eq)).is_err());
    }
}
