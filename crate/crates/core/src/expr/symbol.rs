use std::fmt;
use std::sync::Arc;

/// What a symbol stands for in the jet coordinate model.
///
/// The derived ordering is part of the canonical form: independent variable
/// first, then dependent jets grouped by dependent index and order, then the
/// nonlocal jets, then parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SymbolKind {
    Independent,
    Dependent { index: usize, order: usize },
    Nonlocal { order: usize },
    Parameter,
}

/// A named coordinate or parameter.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Symbol {
    kind: SymbolKind,
    name: Arc<str>,
}

impl Symbol {
    pub fn new(name: impl Into<Arc<str>>, kind: SymbolKind) -> Self {
        Symbol { kind, name: name.into() }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> SymbolKind {
        self.kind
    }

    /// Jet order for dependent and nonlocal coordinates, `None` otherwise.
    pub fn jet_order(&self) -> Option<usize> {
        match self.kind {
            SymbolKind::Dependent { order, .. } | SymbolKind::Nonlocal { order } => Some(order),
            _ => None,
        }
    }

    pub fn is_parameter(&self) -> bool {
        self.kind == SymbolKind::Parameter
    }

    pub fn is_nonlocal(&self) -> bool {
        matches!(self.kind, SymbolKind::Nonlocal { .. })
    }

    /// Sampling interval used by numeric zero-test confirmation.
    pub fn sample_range(&self) -> (f64, f64) {
        match self.kind {
            SymbolKind::Independent => (0.5, 2.0),
            SymbolKind::Dependent { order: 0, .. } => (0.5, 3.0),
            SymbolKind::Dependent { .. } => (-2.0, 2.0),
            SymbolKind::Nonlocal { order: 0 } => (-1.0, 1.0),
            SymbolKind::Nonlocal { .. } => (-2.0, 2.0),
            SymbolKind::Parameter => (0.5, 2.0),
        }
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}
