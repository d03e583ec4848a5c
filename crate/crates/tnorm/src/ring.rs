//! Finitely supported integer combinations of group elements, keyed by the
//! serialized canonical form. Iteration order is the byte order of the keys,
//! so accumulation and norms are deterministic.

use crate::action::{left_mul, Letter};
use crate::element::DoubleTree;
use crate::error::Result;
use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use std::collections::BTreeMap;

/// Map element -> signed coefficient; zero coefficients are never stored.
#[derive(Clone, Default, PartialEq, Eq, Debug)]
pub struct GroupRingVector {
    terms: BTreeMap<Vec<u8>, BigInt>,
}

impl GroupRingVector {
    pub fn new() -> Self {
        Self::default()
    }

    /// The basis vector of a single group element.
    pub fn basis(x: &DoubleTree) -> Self {
        let mut v = Self::new();
        v.add_key(x.serialize(), BigInt::from(1));
        v
    }

    pub fn identity() -> Self {
        Self::basis(&DoubleTree::identity())
    }

    pub fn add_key(&mut self, key: Vec<u8>, coeff: BigInt) {
        if coeff.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(key) {
            Entry::Vacant(e) => {
                e.insert(coeff);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += coeff;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn add_element(&mut self, x: &DoubleTree, coeff: BigInt) {
        self.add_key(x.serialize(), coeff);
    }

    pub fn coeff(&self, x: &DoubleTree) -> BigInt {
        self.coeff_key(&x.serialize())
    }

    pub fn coeff_key(&self, key: &[u8]) -> BigInt {
        self.terms.get(key).cloned().unwrap_or_else(BigInt::zero)
    }

    /// Coefficient of the identity: the trace of the group-ring element.
    pub fn trace(&self) -> BigInt {
        self.coeff(&DoubleTree::identity())
    }

    pub fn support_size(&self) -> usize {
        self.terms.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[u8], &BigInt)> {
        self.terms.iter().map(|(k, v)| (k.as_slice(), v))
    }

    /// Sum of squared coefficients: the squared L2 norm under the trace
    /// inner product.
    pub fn l2_norm_sq(&self) -> BigInt {
        self.terms.values().map(|c| c * c).sum()
    }

    /// Sum of |coefficients|.
    pub fn mass(&self) -> BigInt {
        self.terms.values().map(|c| c.abs()).sum()
    }

    /// Rough in-memory footprint, for budget checks.
    pub fn approx_bytes(&self) -> usize {
        self.terms
            .iter()
            .map(|(k, v)| k.len() + (v.bits() as usize + 7) / 8 + 48)
            .sum()
    }

    pub fn scale(&mut self, factor: &BigInt) {
        if factor.is_zero() {
            self.terms.clear();
            return;
        }
        for v in self.terms.values_mut() {
            *v *= factor;
        }
    }

    pub fn add_assign(&mut self, other: &GroupRingVector) {
        for (k, v) in &other.terms {
            self.add_key(k.clone(), v.clone());
        }
    }

    pub fn sub_scaled(&mut self, other: &GroupRingVector, factor: &BigInt) {
        for (k, v) in &other.terms {
            self.add_key(k.clone(), -(v * factor));
        }
    }

    /// Left multiplication by a letter, term by term.
    pub fn left_mul_letter(&self, letter: Letter) -> Result<GroupRingVector> {
        let mut out = GroupRingVector::new();
        for (key, coeff) in &self.terms {
            let x = DoubleTree::deserialize(key)?;
            out.add_key(left_mul(letter, &x).serialize(), coeff.clone());
        }
        Ok(out)
    }

    /// Left multiplication by a sum of letters.
    pub fn left_mul_letter_sum(&self, letters: &[Letter]) -> Result<GroupRingVector> {
        let mut out = GroupRingVector::new();
        for &letter in letters {
            out.add_assign(&self.left_mul_letter(letter)?);
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_coefficients_vanish() {
        let c = DoubleTree::generator_c();
        let mut v = GroupRingVector::basis(&c);
        v.add_element(&c, BigInt::from(-1));
        assert_eq!(v.support_size(), 0);
        assert_eq!(v.l2_norm_sq(), BigInt::zero());
    }

    #[test]
    fn norm_counts_squares() {
        let mut v = GroupRingVector::identity();
        v.add_element(&DoubleTree::generator_c(), BigInt::from(-3));
        assert_eq!(v.l2_norm_sq(), BigInt::from(10));
        assert_eq!(v.mass(), BigInt::from(4));
        assert_eq!(v.trace(), BigInt::from(1));
    }

    #[test]
    fn generator_sum_squared_has_trace_four() {
        // h = C + D + C^-1 + D^-1; the trace of h^2 counts the identity
        // products, one per generator.
        let letters = [Letter::C, Letter::D, Letter::Cinv, Letter::Dinv];
        let h = GroupRingVector::identity().left_mul_letter_sum(&letters).unwrap();
        let h2 = h.left_mul_letter_sum(&letters).unwrap();
        assert_eq!(h2.trace(), BigInt::from(4));
        assert_eq!(h.l2_norm_sq(), BigInt::from(4));
    }
}
