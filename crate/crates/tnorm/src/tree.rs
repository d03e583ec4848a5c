//! Full binary trees stored as preorder bitstrings (1 = caret, 0 = leaf).
//!
//! The leaves of such a tree enumerate, left to right, the dyadic intervals
//! obtained by recursively halving [0, 1]. The flat encoding keeps
//! serialization and byte-wise comparison cheap, which is what the word
//! pipeline spends most of its time on.

use crate::error::{Error, Result};

/// A full binary tree: every internal node (caret) has exactly two children.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CaretTree {
    bits: Vec<bool>,
}

/// Length of the preorder subtree starting at `pos`, or None if truncated.
fn subtree_len(bits: &[bool], pos: usize) -> Option<usize> {
    let mut need = 1usize;
    let mut i = pos;
    while need > 0 {
        if i >= bits.len() {
            return None;
        }
        if bits[i] {
            need += 1;
        } else {
            need -= 1;
        }
        i += 1;
    }
    Some(i - pos)
}

impl CaretTree {
    /// The single-leaf tree.
    pub fn leaf() -> Self {
        CaretTree { bits: vec![false] }
    }

    /// Joins two trees under a new root caret.
    pub fn caret(left: &CaretTree, right: &CaretTree) -> Self {
        let mut bits = Vec::with_capacity(1 + left.bits.len() + right.bits.len());
        bits.push(true);
        bits.extend_from_slice(&left.bits);
        bits.extend_from_slice(&right.bits);
        CaretTree { bits }
    }

    /// Validates a raw preorder bitstring.
    pub fn from_bits(bits: Vec<bool>) -> Result<Self> {
        match subtree_len(&bits, 0) {
            Some(len) if len == bits.len() => Ok(CaretTree { bits }),
            Some(_) => Err(Error::MalformedTree("trailing bits after preorder tree".into())),
            None => Err(Error::MalformedTree("truncated preorder tree".into())),
        }
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn node_count(&self) -> usize {
        self.bits.len()
    }

    pub fn leaf_count(&self) -> usize {
        (self.bits.len() + 1) / 2
    }

    pub fn is_leaf(&self) -> bool {
        self.bits.len() == 1
    }

    /// Splits off the root caret into (left, right) subtrees.
    pub fn children(&self) -> Option<(CaretTree, CaretTree)> {
        if self.is_leaf() {
            return None;
        }
        let left_len = subtree_len(&self.bits, 1).expect("valid tree");
        let left = CaretTree { bits: self.bits[1..1 + left_len].to_vec() };
        let right = CaretTree { bits: self.bits[1 + left_len..].to_vec() };
        Some((left, right))
    }

    /// Leaf count of the root's left subtree (tree must not be a leaf).
    pub fn left_leaf_count(&self) -> usize {
        let left_len = subtree_len(&self.bits, 1).expect("valid tree");
        (left_len + 1) / 2
    }

    /// Mirrors the tree: swaps the children of every caret.
    pub fn mirror(&self) -> CaretTree {
        fn rec(bits: &[bool], out: &mut Vec<bool>) {
            if !bits[0] {
                out.push(false);
                return;
            }
            let left_len = subtree_len(bits, 1).expect("valid tree");
            out.push(true);
            rec(&bits[1 + left_len..], out);
            rec(&bits[1..1 + left_len], out);
        }
        let mut out = Vec::with_capacity(self.bits.len());
        rec(&self.bits, &mut out);
        CaretTree { bits: out }
    }

    /// Bit position of each leaf, in leaf order.
    pub fn leaf_positions(&self) -> Vec<usize> {
        self.bits
            .iter()
            .enumerate()
            .filter_map(|(i, &b)| (!b).then_some(i))
            .collect()
    }

    /// Dyadic interval labels (num, exp) of the leaves, so that leaf j spans
    /// [num/2^exp, (num+1)/2^exp].
    pub fn leaf_intervals(&self) -> Vec<(u128, u32)> {
        let mut out = Vec::with_capacity(self.leaf_count());
        // Explicit stack of (num, exp) labels consumed in preorder.
        let mut stack = vec![(0u128, 0u32)];
        for &b in &self.bits {
            let (num, exp) = stack.pop().expect("valid tree");
            if b {
                stack.push((2 * num + 1, exp + 1));
                stack.push((2 * num, exp + 1));
            } else {
                out.push((num, exp));
            }
        }
        out
    }

    /// Cherries: carets whose both children are leaves. Returns
    /// (bit position of the caret, leaf index of its left leaf).
    pub fn cherries(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        let mut leaves_before = 0usize;
        let mut i = 0;
        while i < self.bits.len() {
            if self.bits[i] {
                if i + 2 < self.bits.len() && !self.bits[i + 1] && !self.bits[i + 2] {
                    out.push((i, leaves_before));
                }
                i += 1;
            } else {
                leaves_before += 1;
                i += 1;
            }
        }
        out
    }

    /// Replaces the cherry at bit position `pos` by a single leaf.
    pub fn collapse_cherry(&self, pos: usize) -> CaretTree {
        debug_assert!(self.bits[pos] && !self.bits[pos + 1] && !self.bits[pos + 2]);
        let mut bits = Vec::with_capacity(self.bits.len() - 2);
        bits.extend_from_slice(&self.bits[..pos]);
        bits.push(false);
        bits.extend_from_slice(&self.bits[pos + 3..]);
        CaretTree { bits }
    }

    /// Splits leaf `leaf_idx` into a caret with two leaves.
    pub fn split_leaf(&self, leaf_idx: usize) -> CaretTree {
        let pos = self.leaf_positions()[leaf_idx];
        let mut bits = Vec::with_capacity(self.bits.len() + 2);
        bits.extend_from_slice(&self.bits[..pos]);
        bits.extend_from_slice(&[true, false, false]);
        bits.extend_from_slice(&self.bits[pos + 1..]);
        CaretTree { bits }
    }

    /// Grafts `subtree` onto leaf `leaf_idx`.
    pub fn graft_at_leaf(&self, leaf_idx: usize, subtree: &CaretTree) -> CaretTree {
        let pos = self.leaf_positions()[leaf_idx];
        let mut bits = Vec::with_capacity(self.bits.len() + subtree.bits.len() - 1);
        bits.extend_from_slice(&self.bits[..pos]);
        bits.extend_from_slice(&subtree.bits);
        bits.extend_from_slice(&self.bits[pos + 1..]);
        CaretTree { bits }
    }

    /// Smallest common refinement of two trees over the same interval.
    ///
    /// Returns (merged, blocks_a, blocks_b) where blocks_a[i] is the number of
    /// merged-tree leaves lying under leaf i of `a`, and likewise for `b`.
    pub fn refine(a: &CaretTree, b: &CaretTree) -> (CaretTree, Vec<usize>, Vec<usize>) {
        fn rec(
            a: &[bool],
            b: &[bool],
            out: &mut Vec<bool>,
            blocks_a: &mut Vec<usize>,
            blocks_b: &mut Vec<usize>,
        ) {
            if !a[0] && !b[0] {
                out.push(false);
                blocks_a.push(1);
                blocks_b.push(1);
            } else if !a[0] {
                // a is a leaf: the merged subtree is b, one block for a.
                out.extend_from_slice(b);
                let leaves = (b.len() + 1) / 2;
                blocks_a.push(leaves);
                blocks_b.extend(std::iter::repeat(1).take(leaves));
            } else if !b[0] {
                out.extend_from_slice(a);
                let leaves = (a.len() + 1) / 2;
                blocks_b.push(leaves);
                blocks_a.extend(std::iter::repeat(1).take(leaves));
            } else {
                let la = subtree_len(a, 1).expect("valid tree");
                let lb = subtree_len(b, 1).expect("valid tree");
                out.push(true);
                rec(&a[1..1 + la], &b[1..1 + lb], out, blocks_a, blocks_b);
                rec(&a[1 + la..], &b[1 + lb..], out, blocks_a, blocks_b);
            }
        }
        let mut out = Vec::new();
        let mut blocks_a = Vec::new();
        let mut blocks_b = Vec::new();
        rec(&a.bits, &b.bits, &mut out, &mut blocks_a, &mut blocks_b);
        (CaretTree { bits: out }, blocks_a, blocks_b)
    }
}

impl std::fmt::Debug for CaretTree {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for &b in &self.bits {
            write!(f, "{}", if b { '1' } else { '0' })?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(s: &str) -> CaretTree {
        CaretTree::from_bits(s.chars().map(|c| c == '1').collect()).unwrap()
    }

    #[test]
    fn validation() {
        assert!(CaretTree::from_bits(vec![true, false]).is_err());
        assert!(CaretTree::from_bits(vec![false, false]).is_err());
        assert!(CaretTree::from_bits(vec![true, false, false]).is_ok());
    }

    #[test]
    fn counts_and_children() {
        let tree = t("10100");
        assert_eq!(tree.leaf_count(), 3);
        assert_eq!(tree.left_leaf_count(), 1);
        let (l, r) = tree.children().unwrap();
        assert!(l.is_leaf());
        assert_eq!(r, t("100"));
    }

    #[test]
    fn mirror_involution() {
        let tree = t("1101001100100");
        assert_eq!(tree.mirror().mirror(), tree);
        assert_eq!(t("10100").mirror(), t("11000"));
    }

    #[test]
    fn leaf_intervals_balanced() {
        let tree = t("1100100");
        // caret(caret(leaf,leaf), caret(leaf,leaf)): quarters of [0,1]
        assert_eq!(tree.leaf_intervals(), vec![(0, 2), (1, 2), (2, 2), (3, 2)]);
    }

    #[test]
    fn cherry_roundtrip() {
        let tree = t("10100");
        let ch = tree.cherries();
        assert_eq!(ch, vec![(2, 1)]);
        let collapsed = tree.collapse_cherry(2);
        assert_eq!(collapsed, t("100"));
        assert_eq!(collapsed.split_leaf(1), tree);
    }

    #[test]
    fn refine_blocks() {
        let a = t("10100"); // leaves [0,1/2],[1/2,3/4],[3/4,1]
        let b = t("11000"); // leaves [0,1/4],[1/4,1/2],[1/2,1]
        let (m, ba, bb) = CaretTree::refine(&a, &b);
        assert_eq!(m, t("1100100"));
        assert_eq!(ba, vec![2, 1, 1]);
        assert_eq!(bb, vec![1, 1, 2]);
        assert_eq!(m.leaf_count(), 4);
    }
}
