//! Rational normal form over the field generated by symbols and generator
//! applications, the latter treated as independent transcendentals.
//!
//! Denominators are kept as a multiset of normalized polynomial factors so
//! that common denominators stay small; no polynomial gcd is ever computed.
//! That is enough for zero testing: a rational function vanishes iff its
//! numerator does.

use std::collections::{BTreeMap, BTreeSet};

use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::eval::{eval_numeric, sample_point};
use super::{rational_to_f64, Expr, Node, Symbol};
use crate::error::{Error, Result};

const SAMPLE_POINTS: usize = 8;
const SAMPLE_ATTEMPTS: usize = 400;
const SAMPLE_SEED: u64 = 0x5eed_1a3b_da00_0001;
const RELATIVE_ZERO: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
struct Monomial(Vec<(Expr, u32)>);

impl Monomial {
    fn atom(a: Expr) -> Self {
        Monomial(vec![(a, 1)])
    }

    fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        let mut out = Vec::with_capacity(self.0.len() + other.0.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            let (a, ka) = &self.0[i];
            let (b, kb) = &other.0[j];
            match a.cmp(b) {
                std::cmp::Ordering::Less => {
                    out.push((a.clone(), *ka));
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push((b.clone(), *kb));
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    out.push((a.clone(), ka + kb));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.0[i..]);
        out.extend_from_slice(&other.0[j..]);
        Monomial(out)
    }

    fn exponent_of(&self, a: &Expr) -> u32 {
        self.0.iter().find(|(b, _)| b == a).map_or(0, |(_, k)| *k)
    }

    fn without(&self, a: &Expr, k: u32) -> Monomial {
        Monomial(
            self.0
                .iter()
                .filter_map(|(b, e)| if b == a { (*e > k).then(|| (b.clone(), e - k)) } else { Some((b.clone(), *e)) })
                .collect(),
        )
    }

    fn to_expr(&self) -> Expr {
        Expr::product(self.0.iter().map(|(a, k)| Expr::pow(a.clone(), i64::from(*k))))
    }

    fn eval(&self, vals: &BTreeMap<Expr, f64>) -> f64 {
        self.0.iter().map(|(a, k)| vals[a].powi(*k as i32)).product()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Default)]
struct Poly(BTreeMap<Monomial, BigRational>);

impl Poly {
    fn constant(c: BigRational) -> Self {
        let mut m = BTreeMap::new();
        if !c.is_zero() {
            m.insert(Monomial::default(), c);
        }
        Poly(m)
    }

    fn one() -> Self {
        Poly::constant(BigRational::one())
    }

    fn atom(a: Expr) -> Self {
        let mut m = BTreeMap::new();
        m.insert(Monomial::atom(a), BigRational::one());
        Poly(m)
    }

    fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    fn as_constant(&self) -> Option<BigRational> {
        match self.0.len() {
            0 => Some(BigRational::zero()),
            1 => {
                let (m, c) = self.0.iter().next().unwrap();
                m.is_one().then(|| c.clone())
            }
            _ => None,
        }
    }

    /// The atom when the polynomial is exactly `1·a`.
    fn as_atom(&self) -> Option<&Expr> {
        if self.0.len() != 1 {
            return None;
        }
        let (m, c) = self.0.iter().next().unwrap();
        (c.is_one() && m.0.len() == 1 && m.0[0].1 == 1).then(|| &m.0[0].0)
    }

    fn add_assign(&mut self, other: &Poly) {
        for (m, c) in &other.0 {
            let slot = self.0.entry(m.clone()).or_insert_with(BigRational::zero);
            *slot += c;
            if slot.is_zero() {
                self.0.remove(m);
            }
        }
    }

    fn mul(&self, other: &Poly) -> Poly {
        let mut out = Poly::default();
        for (ma, ca) in &self.0 {
            for (mb, cb) in &other.0 {
                let m = ma.mul(mb);
                let slot = out.0.entry(m.clone()).or_insert_with(BigRational::zero);
                *slot += ca * cb;
                if slot.is_zero() {
                    out.0.remove(&m);
                }
            }
        }
        out
    }

    fn scale(&self, c: &BigRational) -> Poly {
        if c.is_zero() {
            return Poly::default();
        }
        Poly(self.0.iter().map(|(m, d)| (m.clone(), d * c)).collect())
    }

    fn pow(&self, n: u32) -> Poly {
        let mut acc = Poly::one();
        let mut base = self.clone();
        let mut e = n;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Splits `p = lc · content · rest` where `content` is the monomial gcd of
    /// all terms and `rest` has leading coefficient one.
    fn factor_out(&self) -> (BigRational, Vec<(Expr, u32)>, Poly) {
        let mut terms = self.0.iter();
        let (first, _) = terms.next().expect("factor_out on zero polynomial");
        let mut content: Vec<(Expr, u32)> = first.0.clone();
        for (m, _) in terms {
            content = content
                .into_iter()
                .filter_map(|(a, k)| {
                    let k2 = m.exponent_of(&a).min(k);
                    (k2 > 0).then_some((a, k2))
                })
                .collect();
        }
        let mut stripped = Poly::default();
        for (m, c) in &self.0 {
            let mut m2 = m.clone();
            for (a, k) in &content {
                m2 = m2.without(a, *k);
            }
            stripped.0.insert(m2, c.clone());
        }
        let lc = stripped.0.values().next().unwrap().clone();
        let rest = stripped.scale(&lc.recip());
        (lc, content, rest)
    }

    fn to_expr(&self) -> Expr {
        Expr::sum(self.0.iter().map(|(m, c)| Expr::product([Expr::num(c.clone()), m.to_expr()])))
    }

    fn atoms(&self, out: &mut BTreeSet<Expr>) {
        for m in self.0.keys() {
            for (a, _) in &m.0 {
                out.insert(a.clone());
            }
        }
    }

    /// Value and magnitude (sum of absolute term values).
    fn eval(&self, vals: &BTreeMap<Expr, f64>) -> (f64, f64) {
        let mut value = 0.0;
        let mut scale = 0.0;
        for (m, c) in &self.0 {
            let t = rational_to_f64(c).unwrap_or(f64::NAN) * m.eval(vals);
            value += t;
            scale += t.abs();
        }
        (value, scale)
    }
}

#[derive(Debug, Clone)]
struct RatFun {
    num: Poly,
    den: BTreeMap<Poly, u32>,
}

impl RatFun {
    fn from_poly(num: Poly) -> Self {
        RatFun { num, den: BTreeMap::new() }
    }

    fn from_expr(e: &Expr) -> Result<Self> {
        Ok(match e.node() {
            Node::Num(r) => RatFun::from_poly(Poly::constant(r.clone())),
            Node::Sym(_) => RatFun::from_poly(Poly::atom(e.clone())),
            Node::Apply(f, a) => {
                let g = Expr::apply(*f, simplify(a)?);
                match g.node() {
                    Node::Apply(..) => RatFun::from_poly(Poly::atom(g)),
                    _ => RatFun::from_expr(&g)?,
                }
            }
            Node::Add(ts) => {
                let mut acc = RatFun::from_poly(Poly::default());
                for t in ts {
                    acc = acc.add(&RatFun::from_expr(t)?);
                }
                acc
            }
            Node::Mul(fs) => {
                let mut acc = RatFun::from_poly(Poly::one());
                for f in fs {
                    acc = acc.mul(&RatFun::from_expr(f)?);
                }
                acc
            }
            Node::Pow(b, n) => {
                let base = RatFun::from_expr(b)?;
                let base = if *n < 0 { base.invert()? } else { base };
                base.pow(n.unsigned_abs() as u32)
            }
        })
    }

    fn add(&self, other: &RatFun) -> RatFun {
        let mut den = self.den.clone();
        for (f, k) in &other.den {
            let slot = den.entry(f.clone()).or_insert(0);
            *slot = (*slot).max(*k);
        }
        let lift = |r: &RatFun| -> Poly {
            let mut p = r.num.clone();
            for (f, k) in &den {
                let have = r.den.get(f).copied().unwrap_or(0);
                if *k > have {
                    p = p.mul(&f.pow(k - have));
                }
            }
            p
        };
        let mut num = lift(self);
        num.add_assign(&lift(other));
        RatFun { num, den }.normalized()
    }

    fn mul(&self, other: &RatFun) -> RatFun {
        let num = self.num.mul(&other.num);
        let mut den = self.den.clone();
        for (f, k) in &other.den {
            *den.entry(f.clone()).or_insert(0) += k;
        }
        RatFun { num, den }.normalized()
    }

    fn pow(&self, n: u32) -> RatFun {
        RatFun { num: self.num.pow(n), den: self.den.iter().map(|(f, k)| (f.clone(), k * n)).collect() }.normalized()
    }

    fn invert(&self) -> Result<RatFun> {
        if self.num.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let mut num = Poly::one();
        for (f, k) in &self.den {
            num = num.mul(&f.pow(*k));
        }
        let (lc, content, rest) = self.num.factor_out();
        let num = num.scale(&lc.recip());
        let mut den = BTreeMap::new();
        for (a, k) in content {
            den.insert(Poly::atom(a), k);
        }
        if rest.as_constant().is_none() {
            *den.entry(rest).or_insert(0) += 1;
        }
        Ok(RatFun { num, den }.normalized())
    }

    /// Cancels single-atom denominator factors against the numerator content.
    fn normalized(mut self) -> RatFun {
        if self.num.is_zero() {
            self.den.clear();
            return self;
        }
        let atom_factors: Vec<(Poly, Expr, u32)> =
            self.den.iter().filter_map(|(f, k)| f.as_atom().map(|a| (f.clone(), a.clone(), *k))).collect();
        for (f, a, k) in atom_factors {
            let common = self.num.0.keys().map(|m| m.exponent_of(&a)).min().unwrap_or(0).min(k);
            if common == 0 {
                continue;
            }
            self.num = Poly(self.num.0.iter().map(|(m, c)| (m.without(&a, common), c.clone())).collect());
            if k == common {
                self.den.remove(&f);
            } else {
                self.den.insert(f, k - common);
            }
        }
        self
    }

    fn to_expr(&self) -> Expr {
        if self.den.keys().all(|f| f.as_atom().is_some()) {
            let inv_den =
                Expr::product(self.den.iter().map(|(f, k)| Expr::pow(f.as_atom().unwrap().clone(), -i64::from(*k))));
            return Expr::sum(
                self.num.0.iter().map(|(m, c)| Expr::product([Expr::num(c.clone()), m.to_expr(), inv_den.clone()])),
            );
        }
        let den = Expr::product(self.den.iter().map(|(f, k)| Expr::pow(f.to_expr(), i64::from(*k))));
        self.num.to_expr() / den
    }
}

/// Rational normal form of `e`, returned as an expression. Numerators are
/// expanded; monomial denominators are distributed over the terms.
pub fn simplify(e: &Expr) -> Result<Expr> {
    Ok(RatFun::from_expr(e)?.to_expr())
}

/// Sound zero test. A symbolic zero is trusted; a nonzero residue is
/// confirmed by numeric sampling, and a residue that vanishes at every sample
/// is reported as [`Error::Inconclusive`].
pub fn is_zero(e: &Expr) -> Result<bool> {
    let r = RatFun::from_expr(e)?;
    if r.num.is_zero() {
        return Ok(true);
    }
    let mut atoms = BTreeSet::new();
    r.num.atoms(&mut atoms);
    for f in r.den.keys() {
        f.atoms(&mut atoms);
    }
    let symbols: BTreeSet<Symbol> = atoms.iter().flat_map(|a| a.symbols()).collect();

    let mut rng = ChaCha8Rng::seed_from_u64(SAMPLE_SEED);
    let mut admissible = 0;
    for _ in 0..SAMPLE_ATTEMPTS {
        let p = sample_point(&symbols, &mut rng);
        let mut vals = BTreeMap::new();
        let mut ok = true;
        for a in &atoms {
            match eval_numeric(a, &p) {
                Ok(v) => {
                    vals.insert(a.clone(), v);
                }
                Err(_) => {
                    ok = false;
                    break;
                }
            }
        }
        if !ok {
            continue;
        }
        let den_ok = r.den.keys().all(|f| {
            let (v, s) = f.eval(&vals);
            v.is_finite() && v.abs() > 1e-12 * s.max(1.0)
        });
        if !den_ok {
            continue;
        }
        let (v, s) = r.num.eval(&vals);
        if !v.is_finite() {
            continue;
        }
        if v.abs() > RELATIVE_ZERO * s {
            return Ok(false);
        }
        admissible += 1;
        if admissible == SAMPLE_POINTS {
            break;
        }
    }
    if admissible == 0 {
        return Err(Error::NoAdmissiblePoints(e.to_string()));
    }
    Err(Error::Inconclusive(r.to_expr().to_string()))
}
