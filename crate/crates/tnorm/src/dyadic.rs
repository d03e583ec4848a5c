//! Exact dyadic rationals k/2^n on the half-open circle [0, 1).

use std::cmp::Ordering;
use std::fmt;

/// A point k/2^n with 0 <= k < 2^n, stored in lowest terms
/// (numerator odd, or numerator = 0 with exponent = 0).
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct DyadicPoint {
    num: u128,
    exp: u32,
}

impl DyadicPoint {
    pub const ZERO: DyadicPoint = DyadicPoint { num: 0, exp: 0 };

    /// Builds k/2^n reduced to lowest terms. Panics if k >= 2^n.
    pub fn new(num: u128, exp: u32) -> Self {
        assert!(exp < 128, "dyadic exponent out of range");
        assert!(num < (1u128 << exp) || (num == 0 && exp == 0), "dyadic point outside [0,1)");
        let mut num = num;
        let mut exp = exp;
        while num != 0 && num % 2 == 0 {
            num /= 2;
            exp -= 1;
        }
        if num == 0 {
            exp = 0;
        }
        DyadicPoint { num, exp }
    }

    pub fn numerator(&self) -> u128 {
        self.num
    }

    pub fn exponent(&self) -> u32 {
        self.exp
    }

    /// Numerator after rescaling to denominator 2^exp (exp >= self.exp).
    pub fn scaled_num(&self, exp: u32) -> u128 {
        debug_assert!(exp >= self.exp);
        self.num << (exp - self.exp)
    }

    /// Midpoint of self and other, as points of [0, 1].
    pub fn midpoint(a: DyadicPoint, b: DyadicPoint) -> DyadicPoint {
        let e = a.exp.max(b.exp);
        DyadicPoint::new(a.scaled_num(e) + b.scaled_num(e), e + 1)
    }

    /// self + delta (mod 1), where delta is a dyadic with denominator 2^exp.
    pub fn add_mod1(self, delta_num: u128, delta_exp: u32) -> DyadicPoint {
        let exp = self.exp.max(delta_exp);
        let denom = 1u128 << exp;
        let s = (self.scaled_num(exp) + (delta_num << (exp - delta_exp))) % denom;
        DyadicPoint::new(s, exp)
    }

    pub fn to_f64(self) -> f64 {
        self.num as f64 / (1u128 << self.exp) as f64
    }
}

impl PartialOrd for DyadicPoint {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for DyadicPoint {
    fn cmp(&self, other: &Self) -> Ordering {
        let exp = self.exp.max(other.exp);
        self.scaled_num(exp).cmp(&other.scaled_num(exp))
    }
}

impl fmt::Debug for DyadicPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/2^{}", self.num, self.exp)
    }
}

impl fmt::Display for DyadicPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, 1u128 << self.exp)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lowest_terms() {
        let p = DyadicPoint::new(4, 4); // 4/16 = 1/4
        assert_eq!(p.numerator(), 1);
        assert_eq!(p.exponent(), 2);
        assert_eq!(DyadicPoint::new(0, 7), DyadicPoint::ZERO);
    }

    #[test]
    fn ordering_across_scales() {
        let a = DyadicPoint::new(1, 2); // 1/4
        let b = DyadicPoint::new(3, 3); // 3/8
        let c = DyadicPoint::new(1, 1); // 1/2
        assert!(a < b && b < c);
    }

    #[test]
    fn midpoint_reduces() {
        let m = DyadicPoint::midpoint(DyadicPoint::new(1, 2), DyadicPoint::new(3, 2));
        assert_eq!(m, DyadicPoint::new(1, 1));
    }

    #[test]
    fn wraparound_addition() {
        let p = DyadicPoint::new(7, 3); // 7/8
        assert_eq!(p.add_mod1(1, 2), DyadicPoint::new(1, 3)); // 7/8 + 1/4 = 9/8 = 1/8 mod 1
    }
}
