use std::cmp::Ordering;
use std::fmt;

/// External-leg label. Label 0 is reserved for the root leg of rooted trees.
pub type Leg = u8;

/// A set of leg labels, stored as a bit mask.
///
/// Ordered by cardinality first, then lexicographically on the ascending
/// element list, so `{1} < {2} < {1,2} < {1,3} < {2,3}`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct LegSet(u64);

impl LegSet {
    pub const EMPTY: LegSet = LegSet(0);

    pub fn bits(self) -> u64 {
        self.0
    }

    pub fn from_bits(bits: u64) -> Self {
        LegSet(bits)
    }

    pub fn single(leg: Leg) -> Self {
        assert!(leg < 64, "leg label {leg} out of range");
        LegSet(1 << leg)
    }

    /// `{lo, lo+1, ..., hi}`; empty when `lo > hi`.
    pub fn range(lo: Leg, hi: Leg) -> Self {
        (lo..=hi).map(LegSet::single).fold(LegSet::EMPTY, LegSet::union)
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, leg: Leg) -> bool {
        leg < 64 && self.0 & (1 << leg) != 0
    }

    pub fn union(self, other: LegSet) -> LegSet {
        LegSet(self.0 | other.0)
    }

    pub fn intersection(self, other: LegSet) -> LegSet {
        LegSet(self.0 & other.0)
    }

    pub fn difference(self, other: LegSet) -> LegSet {
        LegSet(self.0 & !other.0)
    }

    pub fn is_subset(self, other: LegSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn min(self) -> Option<Leg> {
        (self.0 != 0).then(|| self.0.trailing_zeros() as Leg)
    }

    pub fn insert(&mut self, leg: Leg) {
        *self = self.union(LegSet::single(leg));
    }

    pub fn iter(self) -> impl Iterator<Item = Leg> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                return None;
            }
            let leg = bits.trailing_zeros() as Leg;
            bits &= bits - 1;
            Some(leg)
        })
    }
}

impl FromIterator<Leg> for LegSet {
    fn from_iter<I: IntoIterator<Item = Leg>>(iter: I) -> Self {
        iter.into_iter().map(LegSet::single).fold(LegSet::EMPTY, LegSet::union)
    }
}

impl Ord for LegSet {
    fn cmp(&self, other: &Self) -> Ordering {
        self.len().cmp(&other.len()).then_with(|| {
            let diff = self.0 ^ other.0;
            if diff == 0 {
                Ordering::Equal
            } else if self.0 & (diff & diff.wrapping_neg()) != 0 {
                Ordering::Less
            } else {
                Ordering::Greater
            }
        })
    }
}

impl PartialOrd for LegSet {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for LegSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// Renders as `1+2+5`.
impl fmt::Display for LegSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.iter().map(|l| l.to_string()).collect();
        f.write_str(&parts.join("+"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_is_graded_then_lexicographic() {
        let s = |v: &[Leg]| v.iter().copied().collect::<LegSet>();
        let mut sets = vec![s(&[2, 3]), s(&[1, 3]), s(&[2]), s(&[1, 2]), s(&[1])];
        sets.sort();
        assert_eq!(sets, vec![s(&[1]), s(&[2]), s(&[1, 2]), s(&[1, 3]), s(&[2, 3])]);
    }

    #[test]
    fn iteration_is_ascending() {
        let set: LegSet = [5, 1, 3].into_iter().collect();
        assert_eq!(set.iter().collect::<Vec<_>>(), vec![1, 3, 5]);
        assert_eq!(set.to_string(), "1+3+5");
        assert_eq!(LegSet::range(1, 3).len(), 3);
        assert!(LegSet::range(3, 1).is_empty());
    }
}
