//! Jet coordinates and total derivatives.
//!
//! A [`JetContext`] names the independent variable `x`, the dependent
//! variables `u^a` with their jets `u^a_i` (written `u`, `u1`, `u2`, ...) up to
//! a maximum order, and optionally a nonlocal variable `w` with jets `w1`, ....

mod equation;

pub use equation::{Covering, EquationE};

use crate::error::{Error, Result};
use crate::expr::{Expr, Resolver, Symbol, SymbolKind};

pub const DEFAULT_MAX_ORDER: usize = 3;
pub const DEFAULT_NONLOCAL: &str = "w";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JetContext {
    independent: String,
    dependents: Vec<String>,
    max_order: usize,
    nonlocal: Option<String>,
    parameters: Vec<String>,
}

fn valid_identifier(name: &str) -> bool {
    let mut chars = name.chars();
    chars.next().is_some_and(|c| c.is_ascii_alphabetic()) && chars.all(|c| c.is_ascii_alphanumeric())
}

fn reserved(name: &str) -> bool {
    crate::expr::Func::from_name(name).is_some()
}

impl JetContext {
    pub fn new(independent: &str, dependents: &[&str], max_order: usize) -> Result<Self> {
        if dependents.is_empty() {
            return Err(Error::InvalidInput("at least one dependent variable is required".into()));
        }
        if max_order < 2 {
            return Err(Error::InvalidInput(format!("max_order must be at least 2, got {max_order}")));
        }
        let ctx = JetContext {
            independent: independent.to_string(),
            dependents: dependents.iter().map(|s| s.to_string()).collect(),
            max_order,
            nonlocal: None,
            parameters: Vec::new(),
        };
        ctx.validate()?;
        Ok(ctx)
    }

    /// Adds the nonlocal variable `name` with its jets.
    pub fn with_nonlocal(&self, name: &str) -> Result<Self> {
        let mut ctx = self.clone();
        ctx.nonlocal = Some(name.to_string());
        ctx.validate()?;
        Ok(ctx)
    }

    pub fn with_parameters(&self, names: &[&str]) -> Result<Self> {
        let mut ctx = self.clone();
        ctx.parameters.extend(names.iter().map(|s| s.to_string()));
        ctx.validate()?;
        Ok(ctx)
    }

    fn validate(&self) -> Result<()> {
        let mut seen: Vec<&str> = Vec::new();
        let bases = std::iter::once(self.independent.as_str())
            .chain(self.dependents.iter().map(String::as_str))
            .chain(self.nonlocal.iter().map(String::as_str))
            .chain(self.parameters.iter().map(String::as_str));
        for name in bases {
            if !valid_identifier(name) || reserved(name) {
                return Err(Error::InvalidInput(format!("`{name}` is not a usable variable name")));
            }
            if seen.contains(&name) {
                return Err(Error::InvalidInput(format!("duplicate variable name `{name}`")));
            }
            seen.push(name);
        }
        for name in self.dependents.iter().chain(self.nonlocal.iter()) {
            if name.ends_with(|c: char| c.is_ascii_digit()) {
                return Err(Error::InvalidInput(format!("jet base name `{name}` must not end in a digit")));
            }
        }
        // generated jet names must not collide with plain names
        for name in [&self.independent].into_iter().chain(self.parameters.iter()) {
            if self.resolve_jet(name).is_some() {
                return Err(Error::InvalidInput(format!("`{name}` collides with a jet coordinate")));
            }
        }
        Ok(())
    }

    pub fn q(&self) -> usize {
        self.dependents.len()
    }

    pub fn max_order(&self) -> usize {
        self.max_order
    }

    pub fn has_nonlocal(&self) -> bool {
        self.nonlocal.is_some()
    }

    pub fn independent_name(&self) -> &str {
        &self.independent
    }

    pub fn dependent_names(&self) -> &[String] {
        &self.dependents
    }

    pub fn nonlocal_name(&self) -> Option<&str> {
        self.nonlocal.as_deref()
    }

    pub fn parameter_names(&self) -> &[String] {
        &self.parameters
    }

    pub fn x(&self) -> Symbol {
        Symbol::new(self.independent.as_str(), SymbolKind::Independent)
    }

    /// `u^a_i`. Panics if `a` or `i` is out of range.
    pub fn jet(&self, a: usize, i: usize) -> Symbol {
        assert!(a < self.q() && i <= self.max_order, "jet index out of range");
        let base = &self.dependents[a];
        let name = if i == 0 { base.clone() } else { format!("{base}{i}") };
        Symbol::new(name, SymbolKind::Dependent { index: a, order: i })
    }

    /// `w_i`, when the context carries a nonlocal variable.
    pub fn w(&self, i: usize) -> Option<Symbol> {
        let base = self.nonlocal.as_ref()?;
        if i > self.max_order {
            return None;
        }
        let name = if i == 0 { base.clone() } else { format!("{base}{i}") };
        Some(Symbol::new(name, SymbolKind::Nonlocal { order: i }))
    }

    pub fn parameter(&self, name: &str) -> Option<Symbol> {
        self.parameters.iter().any(|p| p == name).then(|| Symbol::new(name, SymbolKind::Parameter))
    }

    pub fn xe(&self) -> Expr {
        Expr::sym(self.x())
    }

    pub fn jet_e(&self, a: usize, i: usize) -> Expr {
        Expr::sym(self.jet(a, i))
    }

    /// Every coordinate of the context: `x`, all `u^a_i`, all `w_i`.
    pub fn coordinates(&self) -> Vec<Symbol> {
        let mut out = vec![self.x()];
        for a in 0..self.q() {
            for i in 0..=self.max_order {
                out.push(self.jet(a, i));
            }
        }
        if self.has_nonlocal() {
            for i in 0..=self.max_order {
                out.push(self.w(i).unwrap());
            }
        }
        out
    }

    /// The `2q + 1` coordinates `x, u^a, u^a_1` of the equation manifold,
    /// plus `w` when `with_w` is set.
    pub fn equation_block(&self, with_w: bool) -> Vec<Symbol> {
        let mut out = vec![self.x()];
        for a in 0..self.q() {
            out.push(self.jet(a, 0));
            out.push(self.jet(a, 1));
        }
        if with_w {
            if let Some(w) = self.w(0) {
                out.push(w);
            }
        }
        out
    }

    /// True when `s` belongs to this context (coordinate or parameter).
    pub fn owns(&self, s: &Symbol) -> bool {
        match s.kind() {
            SymbolKind::Independent => s.name() == self.independent,
            SymbolKind::Parameter => self.parameters.iter().any(|p| p == s.name()),
            SymbolKind::Dependent { index, order } => {
                index < self.q() && order <= self.max_order && self.jet(index, order) == *s
            }
            SymbolKind::Nonlocal { order } => self.w(order).as_ref() == Some(s),
        }
    }

    fn resolve_jet(&self, ident: &str) -> Option<std::result::Result<Symbol, Error>> {
        let split = ident.find(|c: char| c.is_ascii_digit()).unwrap_or(ident.len());
        let (base, digits) = ident.split_at(split);
        if !digits.chars().all(|c| c.is_ascii_digit()) {
            return None;
        }
        let order: usize = if digits.is_empty() { 0 } else { digits.parse().ok()? };
        let dep = self.dependents.iter().position(|d| d == base);
        let is_w = self.nonlocal.as_deref() == Some(base);
        if dep.is_none() && !is_w {
            return None;
        }
        if order > self.max_order {
            return Some(Err(Error::JetOrderExceeded { name: ident.to_string(), order, max: self.max_order }));
        }
        let sym = match dep {
            Some(a) => Symbol::new(ident, SymbolKind::Dependent { index: a, order }),
            None => Symbol::new(ident, SymbolKind::Nonlocal { order }),
        };
        // canonical spelling only (`u01` is not `u1`)
        let canonical = if order == 0 { base.to_string() } else { format!("{base}{order}") };
        if canonical != ident {
            return None;
        }
        Some(Ok(sym))
    }

    /// Unrestricted total derivative
    /// `Dx = ∂x + Σ u^a_{i+1} ∂/∂u^a_i (+ Σ w_{i+1} ∂/∂w_i)`.
    pub fn total_derivative(&self, e: &Expr) -> Result<Expr> {
        let mut terms = Vec::new();
        for s in e.symbols() {
            if !self.owns(&s) {
                return Err(Error::InvalidInput(format!("symbol `{s}` is not part of the jet context")));
            }
            let next = match s.kind() {
                SymbolKind::Independent => Expr::one(),
                SymbolKind::Parameter => continue,
                SymbolKind::Dependent { index, order } => {
                    if order >= self.max_order {
                        return Err(Error::OrderOverflow(s.name().to_string()));
                    }
                    self.jet_e(index, order + 1)
                }
                SymbolKind::Nonlocal { order } => {
                    if order >= self.max_order {
                        return Err(Error::OrderOverflow(s.name().to_string()));
                    }
                    Expr::sym(self.w(order + 1).unwrap())
                }
            };
            terms.push(next * e.diff(&s));
        }
        Ok(Expr::sum(terms))
    }
}

impl Resolver for JetContext {
    fn resolve(&self, ident: &str) -> Result<Symbol> {
        if ident == self.independent {
            return Ok(self.x());
        }
        if let Some(p) = self.parameter(ident) {
            return Ok(p);
        }
        match self.resolve_jet(ident) {
            Some(r) => r,
            None => Err(Error::UnknownIdentifier(ident.to_string())),
        }
    }
}
