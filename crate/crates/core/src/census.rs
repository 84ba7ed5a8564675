//! Counting rooted, unlabeled, unordered trees whose internal nodes have an
//! even outdegree of at least 4.
//!
//! Counts come from a multiset enumeration over canonical subtree types and
//! do not use any generating-function identity, so they serve as an oracle
//! for the series in [`crate::series`].

use std::cmp::Ordering;
use std::collections::HashMap;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

/// Largest node count accepted by default.
pub const DEFAULT_LIMIT: usize = 25;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CensusError {
    #[error("node count {n} exceeds the configured limit {limit}")]
    BeyondLimit { n: usize, limit: usize },
    #[error("node count must be at least {min}, got {n}")]
    TooSmall { n: usize, min: usize },
    #[error("outdegree {0} is neither 0 nor an even number >= 4")]
    BadOutdegree(usize),
}

/// Whether a node with `d` children may occur in the tree class.
pub fn allowed_outdegree(d: usize) -> bool {
    d == 0 || (d >= 4 && d.is_multiple_of(2))
}

/// An unordered rooted tree in canonical form: children are kept sorted by
/// `(size, children)`, so equal trees compare equal regardless of the order
/// their children were supplied in.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CanonicalTree {
    size: usize,
    children: Vec<CanonicalTree>,
}

impl Ord for CanonicalTree {
    fn cmp(&self, other: &Self) -> Ordering {
        self.size
            .cmp(&other.size)
            .then_with(|| self.children.cmp(&other.children))
    }
}

impl PartialOrd for CanonicalTree {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl CanonicalTree {
    pub fn leaf() -> Self {
        CanonicalTree {
            size: 1,
            children: Vec::new(),
        }
    }

    /// A node with the given children, checked against the class.
    pub fn node(children: Vec<CanonicalTree>) -> Result<Self, CensusError> {
        if !allowed_outdegree(children.len()) {
            return Err(CensusError::BadOutdegree(children.len()));
        }
        Ok(Self::from_children(children))
    }

    /// Canonicalizes without the outdegree check.
    pub fn from_children(mut children: Vec<CanonicalTree>) -> Self {
        children.sort();
        let size = 1 + children.iter().map(|c| c.size).sum::<usize>();
        CanonicalTree { size, children }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn children(&self) -> &[CanonicalTree] {
        &self.children
    }

    /// True if every node has 0 or an even number >= 4 of children.
    pub fn in_class(&self) -> bool {
        allowed_outdegree(self.children.len()) && self.children.iter().all(CanonicalTree::in_class)
    }

    pub fn internal_outdegrees(&self) -> Vec<usize> {
        let mut out = Vec::new();
        let mut stack = vec![self];
        while let Some(t) = stack.pop() {
            if !t.children.is_empty() {
                out.push(t.children.len());
            }
            stack.extend(t.children.iter());
        }
        out
    }

    /// Parenthesized encoding, e.g. `(()()()())` for a root with four leaves.
    pub fn encode(&self) -> String {
        let mut s = String::with_capacity(2 * self.size);
        self.encode_into(&mut s);
        s
    }

    fn encode_into(&self, out: &mut String) {
        out.push('(');
        for c in &self.children {
            c.encode_into(out);
        }
        out.push(')');
    }
}

/// Child-count state while building a multiset: 0..=3 exact, then
/// "even >= 4" and "odd >= 5".
fn bump(state: usize, by: usize) -> usize {
    let count = match state {
        4 => 4 + by,
        5 => 5 + by,
        s => s + by,
    };
    if count >= 4 {
        4 + count % 2
    } else {
        count
    }
}

/// Memoized tree counts up to a configured node limit.
///
/// Subtree types are indexed in canonical order (by size, then by position
/// within that size). A multiset of children is counted by choosing the
/// multiplicity of the largest allowed type and recursing on smaller
/// types, memoized over `(remaining nodes, child-count state, type bound)`.
#[derive(Debug)]
pub struct TreeCensus {
    limit: usize,
    /// `counts[s]` = number of trees with `s` nodes.
    counts: Vec<BigUint>,
    /// Size of each type, in canonical order.
    type_sizes: Vec<usize>,
}

impl Default for TreeCensus {
    fn default() -> Self {
        Self::new(DEFAULT_LIMIT)
    }
}

impl TreeCensus {
    pub fn new(limit: usize) -> Self {
        let mut census = TreeCensus {
            limit,
            counts: vec![BigUint::zero()],
            type_sizes: Vec::new(),
        };
        for n in 1..=limit {
            let t = census.multisets(n - 1, |state| state == 0 || state == 4);
            census.counts.push(t.clone());
            let k = t.to_usize().expect("type count fits in memory");
            census.type_sizes.extend(std::iter::repeat_n(n, k));
        }
        census
    }

    pub fn limit(&self) -> usize {
        self.limit
    }

    /// Number of multisets of known types with total size `total` whose
    /// final child-count state satisfies `accept`.
    fn multisets(&self, total: usize, accept: impl Fn(usize) -> bool) -> BigUint {
        let types = self.type_sizes.partition_point(|&s| s <= total);
        let mut memo = HashMap::new();
        self.count_from(total, 0, types, &accept, &mut memo)
    }

    fn count_from(
        &self,
        remaining: usize,
        state: usize,
        bound: usize,
        accept: &dyn Fn(usize) -> bool,
        memo: &mut HashMap<(usize, usize, usize), BigUint>,
    ) -> BigUint {
        if remaining == 0 {
            return if accept(state) {
                BigUint::one()
            } else {
                BigUint::zero()
            };
        }
        if bound == 0 {
            return BigUint::zero();
        }
        if let Some(v) = memo.get(&(remaining, state, bound)) {
            return v.clone();
        }
        let size = self.type_sizes[bound - 1];
        let mut total = BigUint::zero();
        let mut mult = 0;
        while mult * size <= remaining {
            total += self.count_from(
                remaining - mult * size,
                bump(state, mult),
                bound - 1,
                accept,
                memo,
            );
            mult += 1;
        }
        memo.insert((remaining, state, bound), total.clone());
        total
    }

    fn check(&self, n: usize) -> Result<(), CensusError> {
        if n == 0 {
            return Err(CensusError::TooSmall { n, min: 1 });
        }
        if n > self.limit {
            return Err(CensusError::BeyondLimit {
                n,
                limit: self.limit,
            });
        }
        Ok(())
    }

    /// `t_n`, the number of trees in the class with `n` nodes.
    pub fn count_trees(&self, n: usize) -> Result<BigUint, CensusError> {
        self.check(n)?;
        Ok(self.counts[n].clone())
    }

    /// Number of unordered forests of exactly `trees` trees with `n` nodes.
    pub fn count_forests(&self, n: usize, trees: usize) -> Result<BigUint, CensusError> {
        self.check(n)?;
        if trees == 0 || trees > n {
            return Err(CensusError::TooSmall {
                n,
                min: trees.max(1),
            });
        }
        let types = self.type_sizes.partition_point(|&s| s <= n);
        let mut memo = HashMap::new();
        Ok(self.forests_from(n, trees, types, &mut memo))
    }

    fn forests_from(
        &self,
        remaining: usize,
        trees: usize,
        bound: usize,
        memo: &mut HashMap<(usize, usize, usize), BigUint>,
    ) -> BigUint {
        if remaining == 0 || trees == 0 {
            return if remaining == 0 && trees == 0 {
                BigUint::one()
            } else {
                BigUint::zero()
            };
        }
        if bound == 0 {
            return BigUint::zero();
        }
        if let Some(v) = memo.get(&(remaining, trees, bound)) {
            return v.clone();
        }
        let size = self.type_sizes[bound - 1];
        let mut total = BigUint::zero();
        let mut mult = 0;
        while mult <= trees && mult * size <= remaining {
            total += self.forests_from(remaining - mult * size, trees - mult, bound - 1, memo);
            mult += 1;
        }
        memo.insert((remaining, trees, bound), total.clone());
        total
    }

    /// `(n, t_n, t_n^(1/n))` for odd `n <= max_n`.
    pub fn growth_estimate(&self, max_n: usize) -> Result<Vec<(usize, BigUint, f64)>, CensusError> {
        self.check(max_n.max(1))?;
        Ok((1..=max_n)
            .step_by(2)
            .map(|n| {
                let t = self.counts[n].clone();
                let root = t.to_f64().unwrap_or(f64::INFINITY).powf(1.0 / n as f64);
                (n, t, root)
            })
            .collect())
    }
}

/// Generates every tree in the class with exactly `n` nodes, explicitly.
/// Exponential; meant for small `n`.
pub fn enumerate_trees(n: usize) -> Vec<CanonicalTree> {
    let mut by_size: Vec<Vec<CanonicalTree>> = vec![Vec::new(); n + 1];
    for size in 1..=n {
        let types: Vec<&CanonicalTree> = by_size[1..size].iter().flatten().collect();
        let mut trees = Vec::new();
        let mut chosen = Vec::new();
        pick_children(&types, types.len(), size - 1, &mut chosen, &mut trees);
        by_size[size] = trees;
    }
    std::mem::take(&mut by_size[n])
}

/// Chooses children as non-increasing indices into `types` (so each
/// multiset is produced once) and emits the resulting trees.
fn pick_children<'a>(
    types: &[&'a CanonicalTree],
    bound: usize,
    remaining: usize,
    chosen: &mut Vec<&'a CanonicalTree>,
    out: &mut Vec<CanonicalTree>,
) {
    if remaining == 0 {
        if allowed_outdegree(chosen.len()) {
            out.push(CanonicalTree::from_children(
                chosen.iter().map(|&t| t.clone()).collect(),
            ));
        }
        return;
    }
    for i in (0..bound).rev() {
        let t = types[i];
        if t.size() <= remaining {
            chosen.push(t);
            pick_children(types, i + 1, remaining - t.size(), chosen, out);
            chosen.pop();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::seq::SliceRandom;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn small_counts() {
        let c = TreeCensus::default();
        let t = |n| c.count_trees(n).unwrap().to_u64().unwrap();
        assert_eq!(t(1), 1);
        assert_eq!((t(2), t(3), t(4)), (0, 0, 0));
        assert_eq!(t(5), 1);
        assert_eq!(t(9), 2);
        for n in (2..=24).step_by(2) {
            assert_eq!(t(n), 0, "even n = {n}");
        }
    }

    #[test]
    fn explicit_enumeration_matches_counts() {
        let c = TreeCensus::new(17);
        for n in 1..=17 {
            let trees = enumerate_trees(n);
            assert_eq!(
                BigUint::from(trees.len()),
                c.count_trees(n).unwrap(),
                "n = {n}"
            );
            let mut enc: Vec<String> = trees.iter().map(CanonicalTree::encode).collect();
            enc.sort();
            enc.dedup();
            assert_eq!(enc.len(), trees.len());
            assert!(trees.iter().all(|t| t.in_class() && t.size() == n));
        }
        let nine: Vec<String> = enumerate_trees(9)
            .iter()
            .map(CanonicalTree::encode)
            .collect();
        assert!(nine.contains(&"(()()()()()()()())".to_string()));
        assert!(nine.contains(&"(()()()(()()()()))".to_string()));
    }

    #[test]
    fn forests() {
        let c = TreeCensus::default();
        let f = |n, t| c.count_forests(n, t).unwrap().to_u64().unwrap();
        assert_eq!(f(9, 1), 2);
        assert_eq!(f(10, 2), 3);
        assert_eq!(f(2, 2), 1);
        assert_eq!(f(3, 2), 0);
        for n in 1..=25 {
            assert_eq!(c.count_forests(n, 1).unwrap(), c.count_trees(n).unwrap());
        }
    }

    #[test]
    fn limits() {
        let c = TreeCensus::default();
        assert_eq!(
            c.count_trees(26),
            Err(CensusError::BeyondLimit { n: 26, limit: 25 })
        );
        assert!(c.count_trees(0).is_err());
        assert!(c.count_forests(3, 4).is_err());
    }

    #[test]
    fn growth_sequence() {
        let c = TreeCensus::default();
        let g = c.growth_estimate(25).unwrap();
        assert_eq!(g[2].0, 5);
        assert_eq!(g[2].2, 1.0);
        let (_, _, last) = g.last().unwrap();
        assert!(*last > 1.0 && *last < 1.5, "{last}");
        assert!(g.iter().all(|&(_, _, v)| v < 1.0 / 0.6677));
    }

    #[test]
    fn canonical_form_ignores_child_order() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in [9, 13, 15, 17] {
            for t in enumerate_trees(n) {
                let shuffled = shuffle(&t, &mut rng);
                assert_eq!(shuffled, t);
                assert_eq!(shuffled.encode(), t.encode());
            }
        }
    }

    fn shuffle(t: &CanonicalTree, rng: &mut ChaCha8Rng) -> CanonicalTree {
        let mut kids: Vec<CanonicalTree> = t.children().iter().map(|c| shuffle(c, rng)).collect();
        kids.shuffle(rng);
        CanonicalTree::node(kids).unwrap()
    }

    #[test]
    fn node_rejects_bad_outdegree() {
        let leaves = |k| vec![CanonicalTree::leaf(); k];
        assert_eq!(
            CanonicalTree::node(leaves(3)),
            Err(CensusError::BadOutdegree(3))
        );
        assert_eq!(
            CanonicalTree::node(leaves(2)),
            Err(CensusError::BadOutdegree(2))
        );
        assert_eq!(CanonicalTree::node(leaves(6)).unwrap().size(), 7);
    }
}
