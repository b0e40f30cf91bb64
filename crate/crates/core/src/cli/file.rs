//! Problem files: flat `key = value` entries grouped in sections.
//!
//! ```text
//! # comment
//! [problem]
//! independent = x          # default x
//! dependent = u            # comma list, default u
//! parameters = a, b        # optional
//! nonlocal = w             # optional, default w
//! max_order = 3            # optional, default 3
//!
//! [lagrangian]
//! L = u1^2/2 + x*u1*(1 - ln(u)) + x^2*ln(u)*(ln(u)/2 - 1)
//!
//! [candidate]
//! xi = 0
//! eta = 1                  # comma list, one entry per dependent variable
//! lambda = x/u
//! R = 0                    # optional, default 0
//! A = 0                    # optional, default 0
//!
//! [numeric]                # optional
//! ic = u=2, u1=exp(1), w=0 # u1 and w optional
//! range = 1:2
//! step = 1e-3
//! tol = 1e-6
//! params = a=1, b=2        # values for declared parameters
//! ```
//!
//! Every value on the right of `=` other than names is written in the
//! expression grammar; numeric entries must be constant expressions.

use std::collections::BTreeMap;
use std::path::Path;

use crate::error::{Error, Result};
use crate::expr::{eval_numeric, parse, Expr, Point};
use crate::jet::{JetContext, DEFAULT_MAX_ORDER, DEFAULT_NONLOCAL};
use crate::numverify::{InitialData, NumericSettings};
use crate::variational::{Candidate, Lagrangian, Problem};

const SECTIONS: &[(&str, &[&str])] = &[
    ("problem", &["independent", "dependent", "parameters", "nonlocal", "max_order"]),
    ("lagrangian", &["L"]),
    ("candidate", &["xi", "eta", "lambda", "R", "A"]),
    ("numeric", &["ic", "range", "step", "tol", "params"]),
];

/// Raw entries of a problem file, keyed by `(section, key)`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ProblemFile {
    entries: BTreeMap<(String, String), String>,
}

fn file_err(line: usize, msg: impl std::fmt::Display) -> Error {
    Error::ProblemFile(format!("line {line}: {msg}"))
}

fn list(v: &str) -> Vec<&str> {
    v.split(',').map(str::trim).filter(|s| !s.is_empty()).collect()
}

/// Evaluates a constant expression such as `exp(1)` or `1e-3`.
pub fn constant(text: &str) -> Result<f64> {
    eval_numeric(&parse(text, &())?, &Point::new())
}

impl ProblemFile {
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        let mut section: Option<&str> = None;
        for (i, raw) in text.lines().enumerate() {
            let n = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(name) = line.strip_prefix('[') {
                let name = name.strip_suffix(']').ok_or_else(|| file_err(n, "unterminated section header"))?.trim();
                let known = SECTIONS
                    .iter()
                    .find(|(s, _)| *s == name)
                    .ok_or_else(|| file_err(n, format!("unknown section [{name}]")))?;
                section = Some(known.0);
                continue;
            }
            let sec = section.ok_or_else(|| file_err(n, "entry before any section header"))?;
            let (k, v) = line.split_once('=').ok_or_else(|| file_err(n, "expected `key = value`"))?;
            let (k, v) = (k.trim(), v.trim());
            let keys = SECTIONS.iter().find(|(s, _)| *s == sec).map(|(_, k)| *k).unwrap_or(&[]);
            if !keys.contains(&k) {
                return Err(file_err(n, format!("unknown key `{k}` in [{sec}]")));
            }
            if entries.insert((sec.to_string(), k.to_string()), v.to_string()).is_some() {
                return Err(file_err(n, format!("duplicate key `{k}` in [{sec}]")));
            }
        }
        Ok(ProblemFile { entries })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::ProblemFile(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn get(&self, section: &str, key: &str) -> Option<&str> {
        self.entries.get(&(section.to_string(), key.to_string())).map(String::as_str)
    }

    fn require(&self, section: &str, key: &str) -> Result<&str> {
        self.get(section, key).ok_or_else(|| Error::ProblemFile(format!("missing `{key}` in [{section}]")))
    }

    /// Jet context declared in `[problem]`, including the nonlocal variable.
    pub fn context(&self) -> Result<JetContext> {
        let indep = self.get("problem", "independent").unwrap_or("x");
        let deps = list(self.get("problem", "dependent").unwrap_or("u"));
        let max_order = match self.get("problem", "max_order") {
            Some(v) => v.parse().map_err(|_| Error::ProblemFile(format!("max_order must be an integer, got `{v}`")))?,
            None => DEFAULT_MAX_ORDER,
        };
        let params = list(self.get("problem", "parameters").unwrap_or(""));
        JetContext::new(indep, &deps, max_order)?
            .with_parameters(&params)?
            .with_nonlocal(self.get("problem", "nonlocal").unwrap_or(DEFAULT_NONLOCAL))
    }

    /// Parses the Lagrangian and candidate and derives the Euler–Lagrange
    /// equation.
    pub fn problem(&self) -> Result<Problem> {
        let ctx = self.context()?;
        let p = |s: &str| parse(s, &ctx);
        let l = Lagrangian::new(p(self.require("lagrangian", "L")?)?, ctx.clone())?;
        let eta = list(self.require("candidate", "eta")?).into_iter().map(p).collect::<Result<Vec<_>>>()?;
        let cand = Candidate::new(
            p(self.require("candidate", "xi")?)?,
            eta,
            p(self.require("candidate", "lambda")?)?,
            p(self.get("candidate", "R").unwrap_or("0"))?,
            &ctx,
        )?;
        Problem::new(l, cand)
    }

    /// The lift coefficient `A`; `over` replaces the file's value.
    pub fn lift_coefficient(&self, ctx: &JetContext, over: Option<&str>) -> Result<Expr> {
        parse(over.or(self.get("candidate", "A")).unwrap_or("0"), ctx)
    }

    /// Numeric settings from `[numeric]`, with command-line overrides.
    pub fn numeric(&self, ctx: &JetContext, over: &NumericOverrides) -> Result<(NumericSettings, Option<InitialData>)> {
        let mut s = NumericSettings::default();
        if let Some(r) = over.range.as_deref().or(self.get("numeric", "range")) {
            let (a, b) =
                r.split_once(':').ok_or_else(|| Error::ProblemFile(format!("range must read `a:b`, got `{r}`")))?;
            s.x0 = constant(a)?;
            s.x1 = constant(b)?;
        }
        if let Some(h) = over.step.as_deref().or(self.get("numeric", "step")) {
            s.h = constant(h)?;
        }
        if let Some(t) = over.tol.as_deref().or(self.get("numeric", "tol")) {
            s.tol = constant(t)?;
        }
        for (k, v) in assignments(self.get("numeric", "params").unwrap_or(""))? {
            let sym =
                ctx.parameter(k).ok_or_else(|| Error::ProblemFile(format!("`{k}` is not a declared parameter")))?;
            s.params.insert(sym, constant(v)?);
        }
        if let Some(missing) = ctx.parameter_names().iter().find(|n| !s.params.contains_key(&ctx.parameter(n).unwrap()))
        {
            if over.ic.is_some() || self.get("numeric", "ic").is_some() {
                return Err(Error::ProblemFile(format!("parameter `{missing}` needs a value in [numeric] params")));
            }
        }
        let ic = match over.ic.as_deref().or(self.get("numeric", "ic")) {
            Some(text) => Some(initial_data(text, ctx)?),
            None => None,
        };
        Ok((s, ic))
    }
}

/// Numeric entries given on the command line; each replaces the file value.
#[derive(Debug, Clone, Default)]
pub struct NumericOverrides {
    pub ic: Option<String>,
    pub range: Option<String>,
    pub step: Option<String>,
    pub tol: Option<String>,
}

fn assignments(text: &str) -> Result<Vec<(&str, &str)>> {
    list(text)
        .into_iter()
        .map(|a| {
            a.split_once('=')
                .map(|(k, v)| (k.trim(), v.trim()))
                .ok_or_else(|| Error::ProblemFile(format!("expected `name=value`, got `{a}`")))
        })
        .collect()
}

/// Parses `u=2, u1=exp(1), w=0`.
pub fn initial_data(text: &str, ctx: &JetContext) -> Result<InitialData> {
    let names = ctx.dependent_names();
    let mut u = vec![None; names.len()];
    let mut u1 = vec![None; names.len()];
    let mut w = 0.0;
    for (k, v) in assignments(text)? {
        let val = constant(v)?;
        if Some(k) == ctx.nonlocal_name() {
            w = val;
        } else if let Some(a) = names.iter().position(|n| n == k) {
            u[a] = Some(val);
        } else if let Some(a) = names.iter().position(|n| format!("{n}1") == k) {
            u1[a] = Some(val);
        } else {
            return Err(Error::ProblemFile(format!("unknown initial-condition variable `{k}`")));
        }
    }
    let u = u
        .into_iter()
        .zip(names)
        .map(|(v, n)| v.ok_or_else(|| Error::ProblemFile(format!("initial condition is missing `{n}`"))))
        .collect::<Result<Vec<_>>>()?;
    let u1 = if u1.iter().all(Option::is_none) {
        None
    } else {
        Some(
            u1.into_iter()
                .zip(names)
                .map(|(v, n)| v.ok_or_else(|| Error::ProblemFile(format!("initial condition is missing `{n}1`"))))
                .collect::<Result<Vec<_>>>()?,
        )
    };
    Ok(InitialData { u, u1, w })
}
