use crate::algebra::{EdgeFlavor, Leg, LegSet, Symbol};

use super::RuleError;

/// Leg universe an edge lives in. Rooted trees carry the extra root leg 0.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum EdgeContext {
    Rooted { n: Leg },
    Unrooted { n: Leg },
}

impl EdgeContext {
    pub fn legs(self) -> Leg {
        match self {
            EdgeContext::Rooted { n } | EdgeContext::Unrooted { n } => n,
        }
    }

    pub fn universe(self) -> LegSet {
        match self {
            EdgeContext::Rooted { n } => LegSet::range(0, n),
            EdgeContext::Unrooted { n } => LegSet::range(1, n),
        }
    }

    /// Representative of `{legs, universe \ legs}`: the block without the
    /// root when rooted; otherwise the smaller block, ties going to the block
    /// holding the smallest leg. Singletons of external legs are therefore
    /// always their own representative.
    pub fn canonical(self, legs: LegSet) -> LegSet {
        let other = self.universe().difference(legs);
        match self {
            EdgeContext::Rooted { .. } => {
                if legs.contains(0) {
                    other
                } else {
                    legs
                }
            }
            EdgeContext::Unrooted { .. } => match legs.len().cmp(&other.len()) {
                std::cmp::Ordering::Less => legs,
                std::cmp::Ordering::Greater => other,
                std::cmp::Ordering::Equal => {
                    if legs.min() < other.min() {
                        legs
                    } else {
                        other
                    }
                }
            },
        }
    }
}

/// An edge seen from one of its endpoints: `far` is the set of legs behind
/// it, so momentum `sum_{i in far} p_i` flows in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct EdgeVar {
    far: LegSet,
    context: EdgeContext,
}

impl EdgeVar {
    pub fn new(far: LegSet, context: EdgeContext) -> Result<Self, RuleError> {
        let u = context.universe();
        if far.is_empty() || !far.is_subset(u) || far == u {
            return Err(RuleError::EdgeSubset(format!("{far:?}")));
        }
        Ok(EdgeVar { far, context })
    }

    pub fn leg(j: Leg, context: EdgeContext) -> Result<Self, RuleError> {
        Self::new(LegSet::single(j), context)
    }

    pub fn far(self) -> LegSet {
        self.far
    }

    pub fn context(self) -> EdgeContext {
        self.context
    }

    pub fn legs(self) -> LegSet {
        self.context.canonical(self.far)
    }

    /// The same edge seen from its other endpoint.
    pub fn reversed(self) -> Self {
        EdgeVar { far: self.context.universe().difference(self.far), context: self.context }
    }

    pub fn is_external(self) -> bool {
        self.legs().len() == 1
    }

    pub fn symbol(self, flavor: EdgeFlavor) -> Symbol {
        Symbol::Edge(flavor, self.legs())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(legs: &[Leg]) -> LegSet {
        legs.iter().copied().collect()
    }

    #[test]
    fn rooted_keeps_non_root_block() {
        let ctx = EdgeContext::Rooted { n: 3 };
        assert_eq!(ctx.canonical(set(&[0, 3])), set(&[1, 2]));
        assert_eq!(ctx.canonical(set(&[0])), set(&[1, 2, 3]));
        assert_eq!(ctx.canonical(set(&[2])), set(&[2]));
    }

    #[test]
    fn unrooted_keeps_smaller_block() {
        let ctx = EdgeContext::Unrooted { n: 5 };
        assert_eq!(ctx.canonical(set(&[1, 3, 4, 5])), set(&[2]));
        assert_eq!(ctx.canonical(set(&[3, 4])), set(&[3, 4]));
        let ctx = EdgeContext::Unrooted { n: 4 };
        assert_eq!(ctx.canonical(set(&[2, 3])), set(&[1, 4]));
        assert_eq!(ctx.canonical(set(&[1, 2])), set(&[1, 2]));
    }

    #[test]
    fn edge_validation() {
        let ctx = EdgeContext::Unrooted { n: 3 };
        assert!(EdgeVar::new(LegSet::EMPTY, ctx).is_err());
        assert!(EdgeVar::new(set(&[1, 2, 3]), ctx).is_err());
        assert!(EdgeVar::new(set(&[0]), ctx).is_err());
        let e = EdgeVar::new(set(&[1, 2]), ctx).unwrap();
        assert_eq!(e.legs(), set(&[3]));
        assert_eq!(e.reversed().far(), set(&[3]));
    }
}
