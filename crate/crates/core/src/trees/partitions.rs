use crate::algebra::LegSet;

/// All set partitions of `set`, as restricted growth strings, with blocks
/// ordered by their smallest element. Partitions with fewer blocks come
/// first within the same growth prefix.
pub fn set_partitions(set: LegSet) -> Vec<Vec<LegSet>> {
    let elems: Vec<_> = set.iter().collect();
    let mut out = Vec::new();
    if elems.is_empty() {
        out.push(Vec::new());
        return out;
    }
    let mut blocks: Vec<LegSet> = Vec::new();
    fn rec(i: usize, elems: &[u8], blocks: &mut Vec<LegSet>, out: &mut Vec<Vec<LegSet>>) {
        if i == elems.len() {
            out.push(blocks.clone());
            return;
        }
        for b in 0..blocks.len() {
            blocks[b].insert(elems[i]);
            rec(i + 1, elems, blocks, out);
            blocks[b] = blocks[b].difference(LegSet::single(elems[i]));
        }
        blocks.push(LegSet::single(elems[i]));
        rec(i + 1, elems, blocks, out);
        blocks.pop();
    }
    rec(0, &elems, &mut blocks, &mut out);
    out
}

/// Set partitions of `set` into exactly `k` blocks.
pub fn set_partitions_into(set: LegSet, k: usize) -> Vec<Vec<LegSet>> {
    set_partitions(set).into_iter().filter(|p| p.len() == k).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bell_numbers() {
        let counts: Vec<usize> = (0..=6).map(|n| set_partitions(LegSet::range(1, n)).len()).collect();
        assert_eq!(counts, vec![1, 1, 2, 5, 15, 52, 203]);
        assert_eq!(set_partitions_into(LegSet::range(1, 4), 2).len(), 7);
    }

    #[test]
    fn blocks_sorted_by_minimum() {
        for p in set_partitions(LegSet::range(1, 5)) {
            let mins: Vec<_> = p.iter().map(|b| LegSet::min(*b).unwrap()).collect();
            assert!(mins.windows(2).all(|w| w[0] < w[1]));
        }
    }
}
