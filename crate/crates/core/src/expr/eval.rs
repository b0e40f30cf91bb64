use std::collections::BTreeMap;

use rand::Rng;

use super::{rational_to_f64, Expr, Func, Node, Symbol};
use crate::error::{Error, Result};

pub type Point = BTreeMap<Symbol, f64>;

fn apply_func(f: Func, v: f64) -> Result<f64> {
    match f {
        Func::Ln => {
            if v <= 0.0 || !v.is_finite() {
                Err(Error::Domain { generator: "ln".into(), value: v })
            } else {
                Ok(v.ln())
            }
        }
        Func::Exp => Ok(v.exp()),
        Func::Sin => Ok(v.sin()),
        Func::Cos => Ok(v.cos()),
    }
}

fn checked_pow(b: f64, n: i64) -> Result<f64> {
    if b == 0.0 && n < 0 {
        return Err(Error::DivisionByZero);
    }
    let r = if let Ok(k) = i32::try_from(n) { b.powi(k) } else { b.powf(n as f64) };
    Ok(r)
}

/// IEEE double evaluation at a point binding every symbol of `e`.
pub fn eval_numeric(e: &Expr, point: &Point) -> Result<f64> {
    let v = eval_rec(e, point)?;
    if !v.is_finite() {
        return Err(Error::Domain { generator: "result".into(), value: v });
    }
    Ok(v)
}

fn eval_rec(e: &Expr, point: &Point) -> Result<f64> {
    match e.node() {
        Node::Num(r) => {
            rational_to_f64(r).ok_or_else(|| Error::InvalidInput(format!("constant {r} not representable")))
        }
        Node::Sym(s) => point.get(s).copied().ok_or_else(|| Error::UnboundSymbol(s.name().to_string())),
        Node::Add(ts) => ts.iter().try_fold(0.0, |acc, t| Ok(acc + eval_rec(t, point)?)),
        Node::Mul(fs) => fs.iter().try_fold(1.0, |acc, t| Ok(acc * eval_rec(t, point)?)),
        Node::Pow(b, n) => checked_pow(eval_rec(b, point)?, *n),
        Node::Apply(f, a) => apply_func(*f, eval_rec(a, point)?),
    }
}

/// Draws a point from the admissible sampling box of each symbol.
pub fn sample_point<'a, R: Rng>(symbols: impl IntoIterator<Item = &'a Symbol>, rng: &mut R) -> Point {
    symbols
        .into_iter()
        .map(|s| {
            let (lo, hi) = s.sample_range();
            (s.clone(), rng.gen_range(lo..hi))
        })
        .collect()
}

#[derive(Debug, Clone)]
enum Op {
    Const(f64),
    Slot(usize),
    Add(Vec<Op>),
    Mul(Vec<Op>),
    Pow(Box<Op>, i64),
    Apply(Func, Box<Op>),
}

/// An expression lowered to slot-indexed form for repeated evaluation.
#[derive(Debug, Clone)]
pub struct CompiledExpr {
    op: Op,
}

impl CompiledExpr {
    /// `slots` fixes the argument order for [`CompiledExpr::eval`]. Parameters
    /// not listed in `slots` must be bound in `fixed`.
    pub fn new(e: &Expr, slots: &[Symbol], fixed: &Point) -> Result<Self> {
        Ok(CompiledExpr { op: lower(e, slots, fixed)? })
    }

    pub fn eval(&self, args: &[f64]) -> Result<f64> {
        let v = run(&self.op, args)?;
        if !v.is_finite() {
            return Err(Error::Domain { generator: "result".into(), value: v });
        }
        Ok(v)
    }
}

fn lower(e: &Expr, slots: &[Symbol], fixed: &Point) -> Result<Op> {
    Ok(match e.node() {
        Node::Num(r) => Op::Const(rational_to_f64(r).ok_or(Error::DivisionByZero)?),
        Node::Sym(s) => match slots.iter().position(|t| t == s) {
            Some(i) => Op::Slot(i),
            None => Op::Const(*fixed.get(s).ok_or_else(|| Error::UnboundSymbol(s.name().to_string()))?),
        },
        Node::Add(ts) => Op::Add(ts.iter().map(|t| lower(t, slots, fixed)).collect::<Result<_>>()?),
        Node::Mul(fs) => Op::Mul(fs.iter().map(|t| lower(t, slots, fixed)).collect::<Result<_>>()?),
        Node::Pow(b, n) => Op::Pow(Box::new(lower(b, slots, fixed)?), *n),
        Node::Apply(f, a) => Op::Apply(*f, Box::new(lower(a, slots, fixed)?)),
    })
}

fn run(op: &Op, args: &[f64]) -> Result<f64> {
    match op {
        Op::Const(c) => Ok(*c),
        Op::Slot(i) => Ok(args[*i]),
        Op::Add(ts) => ts.iter().try_fold(0.0, |acc, t| Ok(acc + run(t, args)?)),
        Op::Mul(fs) => fs.iter().try_fold(1.0, |acc, t| Ok(acc * run(t, args)?)),
        Op::Pow(b, n) => checked_pow(run(b, args)?, *n),
        Op::Apply(f, a) => apply_func(*f, run(a, args)?),
    }
}
