use std::collections::BTreeMap;

use super::{Expr, Func, Node, Symbol};

impl Expr {
    /// Exact partial derivative with respect to `s`, all other symbols held
    /// independent.
    pub fn diff(&self, s: &Symbol) -> Expr {
        if !self.contains_symbol(s) {
            return Expr::zero();
        }
        match self.node() {
            Node::Num(_) => Expr::zero(),
            Node::Sym(t) => {
                if t == s {
                    Expr::one()
                } else {
                    Expr::zero()
                }
            }
            Node::Add(terms) => Expr::sum(terms.iter().map(|t| t.diff(s))),
            Node::Mul(factors) => {
                let mut terms = Vec::with_capacity(factors.len());
                for (i, f) in factors.iter().enumerate() {
                    let df = f.diff(s);
                    if df.is_zero_const() {
                        continue;
                    }
                    let others = factors.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, g)| g.clone());
                    terms.push(Expr::product(std::iter::once(df).chain(others)));
                }
                Expr::sum(terms)
            }
            Node::Pow(base, n) => Expr::product([Expr::int(*n), Expr::pow(base.clone(), n - 1), base.diff(s)]),
            Node::Apply(f, arg) => {
                let da = arg.diff(s);
                let outer = match f {
                    Func::Ln => Expr::pow(arg.clone(), -1),
                    Func::Exp => self.clone(),
                    Func::Sin => Expr::cos(arg.clone()),
                    Func::Cos => -Expr::sin(arg.clone()),
                };
                outer * da
            }
        }
    }

    /// Simultaneous substitution; replacement expressions are not themselves
    /// rewritten. The result is rebuilt through the canonical constructors.
    pub fn substitute(&self, bindings: &BTreeMap<Symbol, Expr>) -> Expr {
        if bindings.is_empty() {
            return self.clone();
        }
        self.subst_inner(bindings)
    }

    fn subst_inner(&self, bindings: &BTreeMap<Symbol, Expr>) -> Expr {
        match self.node() {
            Node::Num(_) => self.clone(),
            Node::Sym(s) => bindings.get(s).cloned().unwrap_or_else(|| self.clone()),
            Node::Add(terms) => Expr::sum(terms.iter().map(|t| t.subst_inner(bindings))),
            Node::Mul(fs) => Expr::product(fs.iter().map(|t| t.subst_inner(bindings))),
            Node::Pow(b, n) => Expr::pow(b.subst_inner(bindings), *n),
            Node::Apply(f, a) => Expr::apply(*f, a.subst_inner(bindings)),
        }
    }

    /// Convenience for a single binding.
    pub fn substitute_one(&self, s: &Symbol, value: &Expr) -> Expr {
        let mut m = BTreeMap::new();
        m.insert(s.clone(), value.clone());
        self.substitute(&m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::SymbolKind;

    fn syms() -> (Symbol, Symbol, Symbol) {
        (
            Symbol::new("x", SymbolKind::Independent),
            Symbol::new("u", SymbolKind::Dependent { index: 0, order: 0 }),
            Symbol::new("u1", SymbolKind::Dependent { index: 0, order: 1 }),
        )
    }

    #[test]
    fn power_and_log_rules() {
        let (_, u, u1) = syms();
        let e = Expr::pow(Expr::sym(u1.clone()), 2) / Expr::int(2);
        assert_eq!(e.diff(&u1), Expr::sym(u1.clone()));
        let l = Expr::ln(Expr::sym(u.clone()));
        assert_eq!(l.diff(&u), Expr::pow(Expr::sym(u), -1));
    }

    #[test]
    fn trig_and_exp_rules() {
        let (x, _, _) = syms();
        let xe = Expr::sym(x.clone());
        assert_eq!(Expr::sin(xe.clone()).diff(&x), Expr::cos(xe.clone()));
        assert_eq!(Expr::cos(xe.clone()).diff(&x), -Expr::sin(xe.clone()));
        let e = Expr::exp(Expr::int(2) * xe.clone());
        assert_eq!(e.diff(&x), Expr::int(2) * e.clone());
    }

    #[test]
    fn substitution_is_simultaneous() {
        let (x, u, _) = syms();
        let mut b = BTreeMap::new();
        b.insert(x.clone(), Expr::sym(u.clone()));
        b.insert(u.clone(), Expr::sym(x.clone()));
        let e = Expr::sym(x.clone()) - Expr::int(2) * Expr::sym(u.clone());
        let swapped = e.substitute(&b);
        assert_eq!(swapped, Expr::sym(u) - Expr::int(2) * Expr::sym(x));
    }
}
