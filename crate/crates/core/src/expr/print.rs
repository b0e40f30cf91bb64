use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed};

use super::{Expr, Node};

fn write_rational(f: &mut fmt::Formatter<'_>, r: &BigRational) -> fmt::Result {
    if r.is_integer() {
        write!(f, "{}", r.numer())
    } else {
        write!(f, "{}/{}", r.numer(), r.denom())
    }
}

/// Base of a power or a factor of a product: anything that is not a single
/// token needs parentheses.
fn write_atomic(f: &mut fmt::Formatter<'_>, e: &Expr) -> fmt::Result {
    match e.node() {
        Node::Sym(_) | Node::Apply(..) => write!(f, "{e}"),
        Node::Num(r) if r.is_integer() && !r.is_negative() => write!(f, "{e}"),
        _ => write!(f, "({e})"),
    }
}

fn write_power(f: &mut fmt::Formatter<'_>, base: &Expr, n: i64) -> fmt::Result {
    write_atomic(f, base)?;
    if n != 1 {
        write!(f, "^{n}")?;
    }
    Ok(())
}

fn write_product(f: &mut fmt::Formatter<'_>, factors: &[Expr]) -> fmt::Result {
    let (coeff, rest) = match factors[0].node() {
        Node::Num(r) => (r.clone(), &factors[1..]),
        _ => (BigRational::one(), factors),
    };
    let mut numer: Vec<(&Expr, i64)> = Vec::new();
    let mut denom: Vec<(&Expr, i64)> = Vec::new();
    let mut rest: Vec<&Expr> = rest.iter().collect();
    rest.sort_by_key(|fac| match fac.node() {
        Node::Sym(_) => 0,
        Node::Pow(b, _) if matches!(b.node(), Node::Sym(_)) => 0,
        _ => 1,
    });
    for fac in rest {
        match fac.node() {
            Node::Pow(b, n) if *n < 0 => denom.push((b, -n)),
            Node::Pow(b, n) => numer.push((b, *n)),
            _ => numer.push((fac, 1)),
        }
    }
    let p: BigInt = coeff.numer().abs();
    let q: &BigInt = coeff.denom();
    // `2*(u + x)*...` would be re-read with 2 distributed over the sum; keep
    // the number away from a leading sum by writing it last
    let leads_with_sum =
        |g: &[(&Expr, i64)]| g.first().is_some_and(|(b, n)| *n == 1 && matches!(b.node(), Node::Add(_)));
    if (!coeff.is_one() && leads_with_sum(&numer)) || (!q.is_one() && leads_with_sum(&denom)) {
        return write_trailing_coeff(f, &coeff, &numer, &denom);
    }
    if coeff.is_negative() {
        f.write_str("-")?;
    }
    let mut first = true;
    if !p.is_one() || numer.is_empty() {
        write!(f, "{p}")?;
        first = false;
    }
    for (b, n) in &numer {
        if !first {
            f.write_str("*")?;
        }
        write_power(f, b, *n)?;
        first = false;
    }
    let den_parts = denom.len() + usize::from(!q.is_one());
    if den_parts == 0 {
        return Ok(());
    }
    f.write_str("/")?;
    if den_parts > 1 {
        f.write_str("(")?;
    }
    let mut first = true;
    if !q.is_one() {
        write!(f, "{q}")?;
        first = false;
    }
    for (b, n) in &denom {
        if !first {
            f.write_str("*")?;
        }
        write_power(f, b, *n)?;
        first = false;
    }
    if den_parts > 1 {
        f.write_str(")")?;
    }
    Ok(())
}

fn size(e: &Expr) -> usize {
    1 + e.children().into_iter().map(size).sum::<usize>()
}

fn write_trailing_coeff(
    f: &mut fmt::Formatter<'_>,
    coeff: &BigRational,
    numer: &[(&Expr, i64)],
    denom: &[(&Expr, i64)],
) -> fmt::Result {
    if numer.is_empty() {
        f.write_str("1")?;
    }
    for (i, (b, n)) in numer.iter().enumerate() {
        if i > 0 {
            f.write_str("*")?;
        }
        write_power(f, b, *n)?;
    }
    for (b, n) in denom {
        f.write_str("/")?;
        write_power(f, b, *n)?;
    }
    if coeff.is_negative() {
        f.write_str("*(")?;
        write_rational(f, coeff)?;
        return f.write_str(")");
    }
    if !coeff.numer().is_one() {
        write!(f, "*{}", coeff.numer())?;
    }
    if !coeff.denom().is_one() {
        write!(f, "/{}", coeff.denom())?;
    }
    Ok(())
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.node() {
            Node::Num(r) => write_rational(f, r),
            Node::Sym(s) => write!(f, "{s}"),
            Node::Apply(func, a) => write!(f, "{}({a})", func.name()),
            Node::Pow(b, n) if *n < 0 => {
                f.write_str("1/")?;
                write_power(f, b, -n)
            }
            Node::Pow(b, n) => write_power(f, b, *n),
            Node::Mul(fs) => write_product(f, fs),
            Node::Add(ts) => {
                // highest jet order and largest terms first, constant last, and
                // lead with a positive term when there is one
                let mut ordered: Vec<&Expr> = ts.iter().filter(|t| t.as_num().is_none()).collect();
                ordered.sort_by_key(|t| (std::cmp::Reverse(t.max_dependent_order()), std::cmp::Reverse(size(t))));
                ordered.extend(ts.iter().filter(|t| t.as_num().is_some()));
                if let Some(k) = ordered.iter().position(|t| !t.split_coeff().0.is_negative()) {
                    let lead = ordered.remove(k);
                    ordered.insert(0, lead);
                }
                for (i, t) in ordered.iter().enumerate() {
                    let (c, _) = t.split_coeff();
                    if i == 0 {
                        write!(f, "{t}")?;
                    } else if c.is_negative() {
                        write!(f, " - {}", -(*t))?;
                    } else {
                        write!(f, " + {t}")?;
                    }
                }
                Ok(())
            }
        }
    }
}
