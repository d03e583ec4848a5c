//! Elements of Thompson's group T as reduced tree pairs with a cyclic
//! leaf rotation.
//!
//! An element maps domain leaf j onto range leaf (j + rot) mod L,
//! order-preservingly on the circle. The pair is kept canonical: no caret of
//! the range tree has its two leaves matched, left-to-left and
//! right-to-right, with the two leaves of a caret of the domain tree.

use crate::error::{Error, Result};
use crate::tree::CaretTree;
use std::cmp::Ordering;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct DoubleTree {
    range: CaretTree,
    domain: CaretTree,
    rot: usize,
}

fn write_leb128(out: &mut Vec<u8>, mut v: u64) {
    loop {
        let byte = (v & 0x7f) as u8;
        v >>= 7;
        if v == 0 {
            out.push(byte);
            return;
        }
        out.push(byte | 0x80);
    }
}

fn read_leb128(bytes: &[u8], pos: &mut usize) -> Result<u64> {
    let mut value = 0u64;
    let mut shift = 0u32;
    loop {
        let &byte = bytes.get(*pos).ok_or_else(|| Error::Decode("truncated varint".into()))?;
        *pos += 1;
        if shift >= 63 && byte > 1 {
            return Err(Error::Decode("varint overflow".into()));
        }
        value |= u64::from(byte & 0x7f) << shift;
        if byte & 0x80 == 0 {
            if byte == 0 && shift > 0 {
                return Err(Error::Decode("non-minimal varint".into()));
            }
            return Ok(value);
        }
        shift += 7;
    }
}

fn pack_bits(out: &mut Vec<u8>, bits: &[bool]) {
    let mut byte = 0u8;
    for (i, &b) in bits.iter().enumerate() {
        if b {
            byte |= 1 << (7 - (i % 8));
        }
        if i % 8 == 7 {
            out.push(byte);
            byte = 0;
        }
    }
    if bits.len() % 8 != 0 {
        out.push(byte);
    }
}

fn unpack_bits(bytes: &[u8], pos: &mut usize, count: usize) -> Result<Vec<bool>> {
    let nbytes = count.div_ceil(8);
    let slice = bytes
        .get(*pos..*pos + nbytes)
        .ok_or_else(|| Error::Decode("truncated tree bits".into()))?;
    *pos += nbytes;
    let mut bits = Vec::with_capacity(count);
    for i in 0..count {
        bits.push(slice[i / 8] & (1 << (7 - (i % 8))) != 0);
    }
    // Padding bits must be zero so each element has a unique encoding.
    if count % 8 != 0 {
        let last = slice[nbytes - 1];
        let mask = (1u16 << (8 - count % 8)) as u8 - 1;
        if last & mask != 0 {
            return Err(Error::Decode("nonzero padding bits".into()));
        }
    }
    Ok(bits)
}

impl DoubleTree {
    /// The identity: single-leaf trees, rotation 0.
    pub fn identity() -> Self {
        DoubleTree { range: CaretTree::leaf(), domain: CaretTree::leaf(), rot: 0 }
    }

    /// The order-3 generator. Its domain leaves [0,1/2], [1/2,3/4], [3/4,1]
    /// map to range leaves [3/4,1], [0,1/2], [1/2,3/4] respectively.
    pub fn generator_c() -> Self {
        let shape = CaretTree::caret(&CaretTree::leaf(), &CaretTree::caret(&CaretTree::leaf(), &CaretTree::leaf()));
        DoubleTree { range: shape.clone(), domain: shape, rot: 2 }
    }

    /// The order-4 generator: balanced four-leaf trees on both sides. The
    /// rotation is the unique one in {1, 3} satisfying, together with C, all
    /// five defining relations of the group (see the group_relations tests).
    pub fn generator_d() -> Self {
        let half = CaretTree::caret(&CaretTree::leaf(), &CaretTree::leaf());
        let shape = CaretTree::caret(&half, &half);
        DoubleTree { range: shape.clone(), domain: shape, rot: 3 }
    }

    /// (identity, C, D)
    pub fn generators() -> (Self, Self, Self) {
        (Self::identity(), Self::generator_c(), Self::generator_d())
    }

    /// Builds a (possibly unreduced) tree pair after validating the shape.
    pub fn new(range: CaretTree, domain: CaretTree, rot: usize) -> Result<Self> {
        if range.leaf_count() != domain.leaf_count() {
            return Err(Error::MalformedTree(format!(
                "leaf count mismatch: range {} vs domain {}",
                range.leaf_count(),
                domain.leaf_count()
            )));
        }
        if rot >= range.leaf_count() {
            return Err(Error::MalformedTree(format!(
                "rotation {} out of range for {} leaves",
                rot,
                range.leaf_count()
            )));
        }
        Ok(DoubleTree { range, domain, rot })
    }

    pub fn range_tree(&self) -> &CaretTree {
        &self.range
    }

    pub fn domain_tree(&self) -> &CaretTree {
        &self.domain
    }

    pub fn rotation(&self) -> usize {
        self.rot
    }

    pub fn leaf_count(&self) -> usize {
        self.range.leaf_count()
    }

    pub fn is_identity(&self) -> bool {
        self.leaf_count() == 1
    }

    /// True if no double caret remains.
    pub fn is_reduced(&self) -> bool {
        self.find_double_caret().is_none()
    }

    /// Looks for a range cherry whose leaves match a domain cherry under the
    /// rotation. Returns (range caret bit pos, range leaf idx, domain caret
    /// bit pos, domain leaf idx).
    fn find_double_caret(&self) -> Option<(usize, usize, usize, usize)> {
        let l = self.leaf_count();
        if l < 2 {
            return None;
        }
        let domain_cherries = self.domain.cherries();
        let range_cherries = self.range.cherries();
        for &(rpos, i) in &range_cherries {
            let j = (i + l - self.rot) % l;
            if j + 1 >= l {
                continue; // partner leaves wrap around the circle
            }
            if let Some(&(dpos, _)) = domain_cherries.iter().find(|&&(_, dj)| dj == j) {
                return Some((rpos, i, dpos, j));
            }
        }
        None
    }

    /// Cancels double carets until none remain; the result is the canonical
    /// representative of the same group element.
    pub fn reduce(mut self) -> DoubleTree {
        while let Some((rpos, i, dpos, j)) = self.find_double_caret() {
            let l = self.leaf_count();
            self.range = self.range.collapse_cherry(rpos);
            self.domain = self.domain.collapse_cherry(dpos);
            self.rot = (i + (l - 1) - j) % (l - 1);
            if self.leaf_count() == 1 {
                self.rot = 0;
            }
        }
        self
    }

    /// Splits domain leaf j and its partner range leaf into carets; the
    /// inverse of one reduction step.
    pub fn insert_double_caret(&self, domain_leaf: usize) -> DoubleTree {
        let l = self.leaf_count();
        assert!(domain_leaf < l);
        let s = (domain_leaf + self.rot) % l;
        DoubleTree {
            range: self.range.split_leaf(s),
            domain: self.domain.split_leaf(domain_leaf),
            rot: self.rot + usize::from(s < self.rot),
        }
    }

    /// Group inverse: swap the trees, negate the rotation.
    pub fn inverse(&self) -> DoubleTree {
        let l = self.leaf_count();
        DoubleTree {
            range: self.domain.clone(),
            domain: self.range.clone(),
            rot: (l - self.rot) % l,
        }
    }

    /// The 180-degree graph rotation: mirrors both trees. An automorphism of
    /// the group with R(R(x)) = x.
    pub fn rotate180(&self) -> DoubleTree {
        let l = self.leaf_count();
        DoubleTree {
            range: self.range.mirror(),
            domain: self.domain.mirror(),
            rot: (l - self.rot) % l,
        }
    }

    /// Composition as functions: (x . y)(t) = x(y(t)). Inputs reduced,
    /// output reduced.
    pub fn compose(x: &DoubleTree, y: &DoubleTree) -> DoubleTree {
        let lx = x.leaf_count();
        let ly = y.leaf_count();
        // Smallest common refinement of x's domain partition and y's range
        // partition; sub_dx[j] is its subtree over x-domain leaf j, sub_ry[i]
        // the one over y-range leaf i.
        let (_, sub_dx, sub_ry) = refine_full(&x.domain, &y.range);

        // Splitting a range leaf of y forces the same split, with the same
        // shape, on the matching domain leaf (slopes are powers of two), and
        // symmetrically for x.
        let domain_grafts: Vec<&CaretTree> =
            (0..ly).map(|j| &sub_ry[(j + y.rot) % ly]).collect();
        let range_grafts: Vec<&CaretTree> =
            (0..lx).map(|k| &sub_dx[(k + lx - x.rot) % lx]).collect();
        let domain = graft_all(&y.domain, &domain_grafts);
        let range = graft_all(&x.range, &range_grafts);

        // A rotation is stable under refinement: the new offset counts the
        // refined leaves in the blocks the old offset skipped.
        let rot_y: usize = sub_ry.iter().take(y.rot).map(|t| t.leaf_count()).sum();
        let rot_x: usize = sub_dx.iter().skip(lx - x.rot).map(|t| t.leaf_count()).sum();
        let lm = range.leaf_count();

        DoubleTree { range, domain, rot: (rot_x + rot_y) % lm }.reduce()
    }

    /// The reverse-inverse map: reverses a word and inverts its letters.
    /// Realized directly as the half-turn conjugate of the graph rotation;
    /// agrees with composing rotate180 with two half-rotations.
    pub fn reverse_inverse(&self) -> DoubleTree {
        if self.is_identity() {
            return self.clone();
        }
        let m = self.rotate180();
        let l = m.leaf_count();
        let (dl, dr) = m.domain.children().expect("non-identity");
        let (rl, rr) = m.range.children().expect("non-identity");
        let d1 = dl.leaf_count();
        let r2 = rr.leaf_count();
        let out = DoubleTree {
            range: CaretTree::caret(&rr, &rl),
            domain: CaretTree::caret(&dr, &dl),
            rot: (m.rot + d1 + r2) % l,
        };
        debug_assert!(out.is_reduced());
        out
    }

    /// Deterministic byte encoding: leaf count, rotation (both LEB128), then
    /// the preorder bits of the range and domain trees packed MSB-first.
    pub fn serialize(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(4 + self.range.node_count() / 4);
        write_leb128(&mut out, self.leaf_count() as u64);
        write_leb128(&mut out, self.rot as u64);
        pack_bits(&mut out, self.range.bits());
        pack_bits(&mut out, self.domain.bits());
        out
    }

    pub fn deserialize(bytes: &[u8]) -> Result<DoubleTree> {
        let mut pos = 0usize;
        let l = read_leb128(bytes, &mut pos)?;
        if l == 0 {
            return Err(Error::Decode("leaf count must be positive".into()));
        }
        let l = usize::try_from(l).map_err(|_| Error::Decode("leaf count overflow".into()))?;
        let rot = read_leb128(bytes, &mut pos)? as usize;
        if rot >= l {
            return Err(Error::Decode(format!("rotation {rot} out of range for {l} leaves")));
        }
        let nbits = 2 * l - 1;
        let range = CaretTree::from_bits(unpack_bits(bytes, &mut pos, nbits)?)
            .map_err(|e| Error::Decode(format!("range tree: {e}")))?;
        let domain = CaretTree::from_bits(unpack_bits(bytes, &mut pos, nbits)?)
            .map_err(|e| Error::Decode(format!("domain tree: {e}")))?;
        if pos != bytes.len() {
            return Err(Error::Decode("trailing bytes".into()));
        }
        if range.leaf_count() != l {
            return Err(Error::Decode("range tree leaf count mismatch".into()));
        }
        let out = DoubleTree { range, domain, rot };
        if !out.is_reduced() {
            return Err(Error::Decode("encoding of an unreduced tree pair".into()));
        }
        Ok(out)
    }

    /// Base64 text form of the byte encoding, one element per line in the
    /// text file formats.
    pub fn serialize_base64(&self) -> String {
        use base64::Engine as _;
        base64::engine::general_purpose::STANDARD.encode(self.serialize())
    }

    pub fn deserialize_base64(s: &str) -> Result<DoubleTree> {
        use base64::Engine as _;
        let bytes = base64::engine::general_purpose::STANDARD
            .decode(s.trim())
            .map_err(|e| Error::Decode(format!("base64: {e}")))?;
        Self::deserialize(&bytes)
    }
}

impl PartialOrd for DoubleTree {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for DoubleTree {
    /// Byte-wise lexicographic order of the serialized encodings; a total
    /// order on group elements.
    fn cmp(&self, other: &Self) -> Ordering {
        self.serialize().cmp(&other.serialize())
    }
}

impl std::fmt::Debug for DoubleTree {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "DoubleTree(r={:?}, d={:?}, rot={})", self.range, self.domain, self.rot)
    }
}

/// Common refinement that also returns, for each input leaf, the subtree of
/// the merged tree lying over it.
fn refine_full(a: &CaretTree, b: &CaretTree) -> (CaretTree, Vec<CaretTree>, Vec<CaretTree>) {
    fn rec(a: &CaretTree, b: &CaretTree, subs_a: &mut Vec<CaretTree>, subs_b: &mut Vec<CaretTree>) -> CaretTree {
        match (a.is_leaf(), b.is_leaf()) {
            (true, true) => {
                subs_a.push(CaretTree::leaf());
                subs_b.push(CaretTree::leaf());
                CaretTree::leaf()
            }
            (true, false) => {
                subs_a.push(b.clone());
                subs_b.extend(std::iter::repeat(CaretTree::leaf()).take(b.leaf_count()));
                b.clone()
            }
            (false, true) => {
                subs_b.push(a.clone());
                subs_a.extend(std::iter::repeat(CaretTree::leaf()).take(a.leaf_count()));
                a.clone()
            }
            (false, false) => {
                let (al, ar) = a.children().expect("caret");
                let (bl, br) = b.children().expect("caret");
                let ml = rec(&al, &bl, subs_a, subs_b);
                let mr = rec(&ar, &br, subs_a, subs_b);
                CaretTree::caret(&ml, &mr)
            }
        }
    }
    let mut subs_a = Vec::new();
    let mut subs_b = Vec::new();
    let m = rec(a, b, &mut subs_a, &mut subs_b);
    (m, subs_a, subs_b)
}

/// Replaces leaf j of `base` by `subs[j]`.
fn graft_all(base: &CaretTree, subs: &[&CaretTree]) -> CaretTree {
    let mut bits = Vec::with_capacity(base.node_count() + subs.iter().map(|s| s.node_count() - 1).sum::<usize>());
    let mut leaf = 0usize;
    for &b in base.bits() {
        if b {
            bits.push(true);
        } else {
            bits.extend_from_slice(subs[leaf].bits());
            leaf += 1;
        }
    }
    CaretTree::from_bits(bits).expect("grafted tree is well-formed")
}
