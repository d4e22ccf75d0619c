use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::sync::{OnceLock, RwLock};

use super::legs::LegSet;

/// Which offshell variable an edge symbol stands for: `x_S = p_S^2 - m^2`
/// or the generalized inverse propagator `X_S`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum EdgeFlavor {
    Standard,
    Generalized,
}

/// A variable of the polynomial ring.
///
/// Symbols are plain values: two symbols with equal kind and index are the
/// same symbol. Only free-form names go through the interner. The derived
/// order (variant order first, then the index) is the global term order.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Symbol {
    /// `a_j`, `j >= 1`.
    DiffeoCoeff(u32),
    /// `lambda_s`, `s >= 3`.
    Coupling(u32),
    MassSq,
    /// The fixed offshell value `x_p`.
    FixedOffshell,
    /// `alpha_k` of a non-local transformation.
    NonlocalCoeff(u32),
    /// `beta_k` of a generalized propagator.
    PropagatorBeta(u32),
    Generic(GenericId),
    /// Offshell variable of a canonical leg subset.
    Edge(EdgeFlavor, LegSet),
}

impl Symbol {
    pub fn edge(legs: LegSet) -> Self {
        Symbol::Edge(EdgeFlavor::Standard, legs)
    }

    pub fn generalized_edge(legs: LegSet) -> Self {
        Symbol::Edge(EdgeFlavor::Generalized, legs)
    }

    pub fn generic(name: &str) -> Self {
        Symbol::Generic(GenericId::intern(name))
    }

    /// Edge variables and `x_p` are the only symbols allowed in denominators.
    pub fn is_denominator_kind(self) -> bool {
        matches!(self, Symbol::Edge(..) | Symbol::FixedOffshell)
    }

    pub fn is_edge(self) -> bool {
        matches!(self, Symbol::Edge(..))
    }

    pub fn edge_legs(self) -> Option<LegSet> {
        match self {
            Symbol::Edge(_, legs) => Some(legs),
            _ => None,
        }
    }

    /// Parses the printed form back into a symbol: `a2`, `lambda3`, `msq`,
    /// `xp`, `alpha1`, `beta0`, `x3`, `x[1+2]`, `X[1+2]`. Any other
    /// identifier becomes a generic symbol.
    pub fn parse(name: &str) -> Option<Symbol> {
        let name = name.trim();
        let valid_ident = !name.is_empty()
            && name.chars().next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
            && name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
        let indexed = |prefix: &str| -> Option<u32> {
            let rest = name.strip_prefix(prefix)?;
            if rest.is_empty() || !rest.chars().all(|c| c.is_ascii_digit()) {
                return None;
            }
            rest.parse().ok()
        };
        match name {
            "msq" => return Some(Symbol::MassSq),
            "xp" => return Some(Symbol::FixedOffshell),
            _ => {}
        }
        if let Some(rest) = name.strip_prefix("x[").or_else(|| name.strip_prefix("X[")) {
            let body = rest.strip_suffix(']')?;
            let mut legs = LegSet::EMPTY;
            for part in body.split('+') {
                let leg: u8 = part.trim().parse().ok()?;
                if leg == 0 || leg >= 64 {
                    return None;
                }
                legs.insert(leg);
            }
            let flavor = if name.starts_with('x') { EdgeFlavor::Standard } else { EdgeFlavor::Generalized };
            return Some(Symbol::Edge(flavor, legs));
        }
        if let Some(j) = indexed("lambda") {
            return Some(Symbol::Coupling(j));
        }
        if let Some(j) = indexed("alpha") {
            return Some(Symbol::NonlocalCoeff(j));
        }
        if let Some(j) = indexed("beta") {
            return Some(Symbol::PropagatorBeta(j));
        }
        if let Some(j) = indexed("a") {
            return Some(Symbol::DiffeoCoeff(j));
        }
        for (prefix, flavor) in [("x", EdgeFlavor::Standard), ("X", EdgeFlavor::Generalized)] {
            if let Some(leg) = indexed(prefix) {
                if leg == 0 || leg >= 64 {
                    return None;
                }
                return Some(Symbol::Edge(flavor, LegSet::single(leg as u8)));
            }
        }
        valid_ident.then(|| Symbol::generic(name))
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Symbol::DiffeoCoeff(j) => write!(f, "a{j}"),
            Symbol::Coupling(s) => write!(f, "lambda{s}"),
            Symbol::MassSq => f.write_str("msq"),
            Symbol::FixedOffshell => f.write_str("xp"),
            Symbol::NonlocalCoeff(k) => write!(f, "alpha{k}"),
            Symbol::PropagatorBeta(k) => write!(f, "beta{k}"),
            Symbol::Generic(id) => f.write_str(&id.name()),
            Symbol::Edge(flavor, legs) => {
                let head = match flavor {
                    EdgeFlavor::Standard => "x",
                    EdgeFlavor::Generalized => "X",
                };
                if legs.len() == 1 {
                    write!(f, "{head}{legs}")
                } else {
                    write!(f, "{head}[{legs}]")
                }
            }
        }
    }
}

/// Interned free-form symbol name. Ordered by the name itself so that
/// printing never depends on interning order.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct GenericId(u32);

#[derive(Default)]
struct Interner {
    names: Vec<String>,
    ids: HashMap<String, u32>,
}

fn interner() -> &'static RwLock<Interner> {
    static INTERNER: OnceLock<RwLock<Interner>> = OnceLock::new();
    INTERNER.get_or_init(Default::default)
}

impl GenericId {
    pub fn intern(name: &str) -> Self {
        if let Some(&id) = interner().read().expect("interner poisoned").ids.get(name) {
            return GenericId(id);
        }
        let mut table = interner().write().expect("interner poisoned");
        if let Some(&id) = table.ids.get(name) {
            return GenericId(id);
        }
        let id = table.names.len() as u32;
        table.names.push(name.to_string());
        table.ids.insert(name.to_string(), id);
        GenericId(id)
    }

    pub fn name(self) -> String {
        interner().read().expect("interner poisoned").names[self.0 as usize].clone()
    }
}

impl Ord for GenericId {
    fn cmp(&self, other: &Self) -> Ordering {
        if self.0 == other.0 {
            return Ordering::Equal;
        }
        let table = interner().read().expect("interner poisoned");
        table.names[self.0 as usize].cmp(&table.names[other.0 as usize])
    }
}

impl PartialOrd for GenericId {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
