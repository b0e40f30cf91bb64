//! Immutable symbolic expressions with exact rational coefficients.
//!
//! Every constructor returns a canonical tree: sums and products are
//! flattened, like terms and like factors are merged, rational constants are
//! folded and children are sorted under the derived total order on [`Node`].
//! Structural equality of canonical trees is plain `==`.

mod calculus;
mod eval;
mod parse;
mod print;
mod ratfun;
mod symbol;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

pub use eval::{eval_numeric, sample_point, CompiledExpr, Point};
pub use parse::{parse, Resolver};
pub use ratfun::{is_zero, simplify};
pub use symbol::{Symbol, SymbolKind};

/// Transcendental generators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Func {
    Ln,
    Exp,
    Sin,
    Cos,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Ln => "ln",
            Func::Exp => "exp",
            Func::Sin => "sin",
            Func::Cos => "cos",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        match name {
            "ln" => Some(Func::Ln),
            "exp" => Some(Func::Exp),
            "sin" => Some(Func::Sin),
            "cos" => Some(Func::Cos),
            _ => None,
        }
    }
}

/// Node kinds. Variant order is the primary key of the canonical ordering.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Node {
    Num(BigRational),
    Sym(Symbol),
    Apply(Func, Expr),
    Pow(Expr, i64),
    Mul(Vec<Expr>),
    Add(Vec<Expr>),
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Expr(Arc<Node>);

impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Expr({})", self)
    }
}

impl Expr {
    fn from_node(node: Node) -> Self {
        Expr(Arc::new(node))
    }

    pub fn node(&self) -> &Node {
        &self.0
    }

    pub fn num(r: BigRational) -> Self {
        Expr::from_node(Node::Num(r))
    }

    pub fn int(n: i64) -> Self {
        Expr::num(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn rational(n: i64, d: i64) -> Self {
        Expr::num(BigRational::new(BigInt::from(n), BigInt::from(d)))
    }

    pub fn zero() -> Self {
        Expr::int(0)
    }

    pub fn one() -> Self {
        Expr::int(1)
    }

    pub fn sym(s: Symbol) -> Self {
        Expr::from_node(Node::Sym(s))
    }

    pub fn as_num(&self) -> Option<&BigRational> {
        match self.node() {
            Node::Num(r) => Some(r),
            _ => None,
        }
    }

    pub fn as_symbol(&self) -> Option<&Symbol> {
        match self.node() {
            Node::Sym(s) => Some(s),
            _ => None,
        }
    }

    /// Structural zero (the canonical zero constant). See [`is_zero`] for the
    /// semantic test.
    pub fn is_zero_const(&self) -> bool {
        self.as_num().is_some_and(|r| r.is_zero())
    }

    pub fn is_one_const(&self) -> bool {
        self.as_num().is_some_and(|r| r.is_one())
    }

    pub fn apply(f: Func, arg: Expr) -> Self {
        if let Some(r) = arg.as_num() {
            if r.is_zero() {
                match f {
                    Func::Exp | Func::Cos => return Expr::one(),
                    Func::Sin => return Expr::zero(),
                    Func::Ln => {}
                }
            }
            if r.is_one() && f == Func::Ln {
                return Expr::zero();
            }
        }
        // ln(exp(a)) = a holds for every real a.
        if f == Func::Ln {
            if let Node::Apply(Func::Exp, inner) = arg.node() {
                return inner.clone();
            }
        }
        Expr::from_node(Node::Apply(f, arg))
    }

    pub fn ln(arg: Expr) -> Self {
        Expr::apply(Func::Ln, arg)
    }

    pub fn exp(arg: Expr) -> Self {
        Expr::apply(Func::Exp, arg)
    }

    pub fn sin(arg: Expr) -> Self {
        Expr::apply(Func::Sin, arg)
    }

    pub fn cos(arg: Expr) -> Self {
        Expr::apply(Func::Cos, arg)
    }

    pub fn pow(base: Expr, n: i64) -> Self {
        if n == 0 {
            return Expr::one();
        }
        if n == 1 {
            return base;
        }
        match base.node() {
            Node::Num(r) => {
                if r.is_zero() && n < 0 {
                    // left unfolded; numeric evaluation and normalization
                    // report it as a division by zero
                    return Expr::from_node(Node::Pow(base.clone(), n));
                }
                Expr::num(rational_pow(r, n))
            }
            Node::Pow(inner, m) => Expr::pow(inner.clone(), m * n),
            Node::Mul(factors) => Expr::product(factors.iter().map(|f| Expr::pow(f.clone(), n))),
            _ => Expr::from_node(Node::Pow(base, n)),
        }
    }

    /// Canonical product of an arbitrary list of factors.
    pub fn product<I: IntoIterator<Item = Expr>>(factors: I) -> Self {
        let mut coeff = BigRational::one();
        let mut powers: BTreeMap<Expr, i64> = BTreeMap::new();
        let mut stack: Vec<Expr> = factors.into_iter().collect();
        while let Some(f) = stack.pop() {
            match f.node() {
                Node::Num(r) => coeff *= r,
                Node::Mul(children) => stack.extend(children.iter().cloned()),
                Node::Pow(base, n) if base.as_num().is_none() => *powers.entry(base.clone()).or_insert(0) += n,
                _ => *powers.entry(f.clone()).or_insert(0) += 1,
            }
        }
        if coeff.is_zero() {
            return Expr::zero();
        }
        let mut out: Vec<Expr> = Vec::with_capacity(powers.len() + 1);
        for (base, n) in powers {
            if n == 0 {
                continue;
            }
            let p = if n == 1 { base } else { Expr::from_node(Node::Pow(base, n)) };
            out.push(p);
        }
        out.sort();
        // a numeric coefficient distributes over a lone sum
        if out.len() == 1 && !coeff.is_one() {
            if let Node::Add(terms) = out[0].node() {
                return Expr::sum(terms.iter().map(|t| Expr::product([Expr::num(coeff.clone()), t.clone()])));
            }
        }
        match (out.len(), coeff.is_one()) {
            (0, _) => Expr::num(coeff),
            (1, true) => out.pop().unwrap(),
            (_, true) => Expr::from_node(Node::Mul(out)),
            (_, false) => {
                out.insert(0, Expr::num(coeff));
                Expr::from_node(Node::Mul(out))
            }
        }
    }

    /// Canonical sum of an arbitrary list of terms.
    pub fn sum<I: IntoIterator<Item = Expr>>(terms: I) -> Self {
        let mut collected: BTreeMap<Expr, BigRational> = BTreeMap::new();
        let mut stack: Vec<Expr> = terms.into_iter().collect();
        while let Some(t) = stack.pop() {
            if let Node::Add(children) = t.node() {
                stack.extend(children.iter().cloned());
                continue;
            }
            let (c, rest) = t.split_coeff();
            let slot = collected.entry(rest).or_insert_with(BigRational::zero);
            *slot += c;
        }
        let mut out: Vec<Expr> =
            collected.into_iter().filter(|(_, c)| !c.is_zero()).map(|(rest, c)| Expr::scaled(c, rest)).collect();
        match out.len() {
            0 => Expr::zero(),
            1 => out.pop().unwrap(),
            _ => Expr::from_node(Node::Add(out)),
        }
    }

    fn scaled(c: BigRational, rest: Expr) -> Expr {
        if rest.is_one_const() {
            return Expr::num(c);
        }
        if c.is_one() {
            return rest;
        }
        Expr::product([Expr::num(c), rest])
    }

    /// Splits a term into its rational coefficient and the remaining factor
    /// (the constant `1` for pure numbers).
    pub fn split_coeff(&self) -> (BigRational, Expr) {
        match self.node() {
            Node::Num(r) => (r.clone(), Expr::one()),
            Node::Mul(children) => match children[0].node() {
                Node::Num(r) => {
                    let rest = if children.len() == 2 {
                        children[1].clone()
                    } else {
                        Expr::from_node(Node::Mul(children[1..].to_vec()))
                    };
                    (r.clone(), rest)
                }
                _ => (BigRational::one(), self.clone()),
            },
            _ => (BigRational::one(), self.clone()),
        }
    }

    pub fn children(&self) -> Vec<&Expr> {
        match self.node() {
            Node::Num(_) | Node::Sym(_) => vec![],
            Node::Apply(_, a) | Node::Pow(a, _) => vec![a],
            Node::Mul(v) | Node::Add(v) => v.iter().collect(),
        }
    }

    /// All symbols occurring anywhere in the tree.
    pub fn symbols(&self) -> BTreeSet<Symbol> {
        let mut out = BTreeSet::new();
        self.collect_symbols(&mut out);
        out
    }

    fn collect_symbols(&self, out: &mut BTreeSet<Symbol>) {
        match self.node() {
            Node::Sym(s) => {
                out.insert(s.clone());
            }
            _ => {
                for c in self.children() {
                    c.collect_symbols(out);
                }
            }
        }
    }

    pub fn contains_symbol(&self, s: &Symbol) -> bool {
        match self.node() {
            Node::Sym(t) => t == s,
            _ => self.children().into_iter().any(|c| c.contains_symbol(s)),
        }
    }

    pub fn contains_func(&self, f: Func) -> bool {
        match self.node() {
            Node::Apply(g, a) => *g == f || a.contains_func(f),
            _ => self.children().into_iter().any(|c| c.contains_func(f)),
        }
    }

    /// Highest dependent-jet order present, if any.
    pub fn max_dependent_order(&self) -> Option<usize> {
        self.symbols()
            .iter()
            .filter_map(|s| match s.kind() {
                SymbolKind::Dependent { order, .. } => Some(order),
                _ => None,
            })
            .max()
    }

    /// Highest nonlocal-jet order present, if any.
    pub fn max_nonlocal_order(&self) -> Option<usize> {
        self.symbols()
            .iter()
            .filter_map(|s| match s.kind() {
                SymbolKind::Nonlocal { order } => Some(order),
                _ => None,
            })
            .max()
    }

    pub fn to_f64_const(&self) -> Option<f64> {
        self.as_num().and_then(rational_to_f64)
    }
}

pub(crate) fn rational_pow(r: &BigRational, n: i64) -> BigRational {
    let e = n.unsigned_abs();
    let mut acc = BigRational::one();
    for _ in 0..e {
        acc *= r;
    }
    if n < 0 {
        acc.recip()
    } else {
        acc
    }
}

pub(crate) fn rational_to_f64(r: &BigRational) -> Option<f64> {
    r.to_f64().or_else(|| {
        let n = r.numer().to_f64()?;
        let d = r.denom().to_f64()?;
        Some(n / d)
    })
}

impl From<i64> for Expr {
    fn from(n: i64) -> Self {
        Expr::int(n)
    }
}

impl From<Symbol> for Expr {
    fn from(s: Symbol) -> Self {
        Expr::sym(s)
    }
}

impl From<&Symbol> for Expr {
    fn from(s: &Symbol) -> Self {
        Expr::sym(s.clone())
    }
}

macro_rules! binop {
    ($tr:ident, $method:ident, $body:expr) => {
        impl $tr<Expr> for Expr {
            type Output = Expr;
            fn $method(self, rhs: Expr) -> Expr {
                let f: fn(Expr, Expr) -> Expr = $body;
                f(self, rhs)
            }
        }
        impl $tr<&Expr> for Expr {
            type Output = Expr;
            fn $method(self, rhs: &Expr) -> Expr {
                self.$method(rhs.clone())
            }
        }
        impl $tr<Expr> for &Expr {
            type Output = Expr;
            fn $method(self, rhs: Expr) -> Expr {
                self.clone().$method(rhs)
            }
        }
        impl $tr<&Expr> for &Expr {
            type Output = Expr;
            fn $method(self, rhs: &Expr) -> Expr {
                self.clone().$method(rhs.clone())
            }
        }
    };
}

binop!(Add, add, |a, b| Expr::sum([a, b]));
binop!(Sub, sub, |a, b| Expr::sum([a, -b]));
binop!(Mul, mul, |a, b| Expr::product([a, b]));
binop!(Div, div, |a, b| Expr::product([a, Expr::pow(b, -1)]));

impl Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::product([Expr::int(-1), self])
    }
}

impl Neg for &Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        -(self.clone())
    }
}
