//! Exact-arithmetic helpers: high-precision square roots of rationals,
//! the quadratic field Q[sqrt(2)], accurate rational-to-float conversion,
//! and half-even display rounding.
//!
//! Hankel determinants span hundreds of digits while their alpha ratios are
//! O(1); everything here therefore goes through scaled big integers and
//! converts to floating point only at the very end.

use crate::error::{Error, Result};
use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// floor(sqrt(v)) for big unsigned integers.
pub fn isqrt(v: &BigUint) -> BigUint {
    num_integer::Roots::sqrt(v)
}

/// sqrt(r) for r >= 0 as a rational accurate to `digits` decimal digits.
pub fn sqrt_rational(r: &BigRational, digits: u32) -> Result<BigRational> {
    if r.is_negative() {
        return Err(Error::Parameter("square root of a negative rational".into()));
    }
    let scale = BigUint::from(10u8).pow(digits);
    let num = r.numer().magnitude();
    let den = r.denom().magnitude();
    // sqrt(num/den) = sqrt(num*den)/den
    let root = isqrt(&(num * den * &scale * &scale));
    Ok(BigRational::new(
        BigInt::from(root),
        BigInt::from(den * scale),
    ))
}

/// Correctly rounded conversion through a 40-digit decimal literal; safe for
/// rationals whose numerator and denominator overflow f64 individually.
pub fn rational_to_f64(r: &BigRational) -> f64 {
    if r.is_zero() {
        return 0.0;
    }
    const DIGITS: u32 = 40;
    let scale = BigInt::from(10u8).pow(DIGITS);
    let scaled = (r.numer() * &scale).div_floor(r.denom());
    let s = format!("{scaled}e-{DIGITS}");
    s.parse::<f64>().expect("decimal literal")
}

/// sqrt(r) straight to f64.
pub fn sqrt_rational_f64(r: &BigRational) -> Result<f64> {
    Ok(rational_to_f64(&sqrt_rational(r, 45)?))
}

/// Rounds to `decimals` places, ties to even, as a plain decimal string.
pub fn round_half_even(r: &BigRational, decimals: u32) -> String {
    let scale = BigInt::from(10u8).pow(decimals);
    let scaled_num = r.numer() * &scale;
    let (mut q, rem) = scaled_num.div_mod_floor(r.denom());
    // div_mod_floor gives 0 <= rem < den; round the fractional part rem/den
    let twice = &rem * 2;
    let den = r.denom().clone();
    if twice > den || (twice == den && q.is_odd()) {
        q += 1;
    }
    let neg = q.is_negative();
    let q = q.magnitude().clone();
    let (int, frac) = q.div_rem(&scale.magnitude().clone());
    let mut out = String::new();
    if neg && !(int.is_zero() && frac.is_zero()) {
        out.push('-');
    }
    out.push_str(&int.to_string());
    if decimals > 0 {
        out.push('.');
        let frac_str = frac.to_string();
        for _ in frac_str.len()..decimals as usize {
            out.push('0');
        }
        out.push_str(&frac_str);
    }
    out
}

pub fn round_half_even_f64(v: f64, decimals: u32) -> String {
    format!("{v:.prec$}", prec = decimals as usize)
}

/// An element a + b*sqrt(2) of Q[sqrt(2)], with exact rational coordinates.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Quad2 {
    pub a: BigRational,
    pub b: BigRational,
}

impl Quad2 {
    pub fn zero() -> Self {
        Quad2 { a: BigRational::zero(), b: BigRational::zero() }
    }

    pub fn one() -> Self {
        Quad2 { a: BigRational::one(), b: BigRational::zero() }
    }

    pub fn from_rational(a: BigRational) -> Self {
        Quad2 { a, b: BigRational::zero() }
    }

    pub fn from_int(a: i64) -> Self {
        Self::from_rational(BigRational::from(BigInt::from(a)))
    }

    pub fn sqrt2() -> Self {
        Quad2 { a: BigRational::zero(), b: BigRational::one() }
    }

    pub fn add(&self, o: &Quad2) -> Quad2 {
        Quad2 { a: &self.a + &o.a, b: &self.b + &o.b }
    }

    pub fn sub(&self, o: &Quad2) -> Quad2 {
        Quad2 { a: &self.a - &o.a, b: &self.b - &o.b }
    }

    pub fn mul(&self, o: &Quad2) -> Quad2 {
        Quad2 {
            a: &self.a * &o.a + BigRational::from(BigInt::from(2)) * &self.b * &o.b,
            b: &self.a * &o.b + &self.b * &o.a,
        }
    }

    pub fn scale(&self, r: &BigRational) -> Quad2 {
        Quad2 { a: &self.a * r, b: &self.b * r }
    }

    /// Multiplicative inverse: conjugate over the norm a^2 - 2 b^2.
    pub fn inverse(&self) -> Result<Quad2> {
        let norm = &self.a * &self.a - BigRational::from(BigInt::from(2)) * &self.b * &self.b;
        if norm.is_zero() {
            return Err(Error::Parameter("division by zero in Q[sqrt 2]".into()));
        }
        Ok(Quad2 { a: &self.a / &norm, b: -(&self.b / &norm) })
    }

    pub fn powi(&self, mut e: u32) -> Quad2 {
        let mut base = self.clone();
        let mut acc = Quad2::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    /// Conversion via 50-digit scaled integers; exact apart from the final
    /// decimal-to-binary rounding, even when a and b nearly cancel.
    pub fn to_f64(&self) -> f64 {
        const DIGITS: u32 = 50;
        let scale = BigInt::from(10u8).pow(DIGITS);
        let a_scaled = (&self.a * &scale).round().to_integer();
        // b * sqrt(2) * 10^D = sign(b) * sqrt(2 * (b*10^D)^2)
        let b_scaled_sq = (&self.b * &scale).pow(2) * BigRational::from(BigInt::from(2));
        let b_mag = BigInt::from(isqrt(&b_scaled_sq.round().to_integer().magnitude().clone()));
        let b_scaled = if self.b.is_negative() { -b_mag } else { b_mag };
        let total = a_scaled + b_scaled;
        format!("{total}e-{DIGITS}").parse::<f64>().expect("decimal literal")
    }
}

/// Exact binomial coefficient.
pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    acc
}

/// Catalan number C_j = binom(2j, j)/(j+1).
pub fn catalan(j: u64) -> BigUint {
    binomial(2 * j, j) / BigUint::from(j + 1)
}

pub fn big_rational(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sqrt_of_two_to_many_digits() {
        let two = BigRational::from(BigInt::from(2));
        let r = sqrt_rational(&two, 40).unwrap();
        let sq = &r * &r;
        let err = (&sq - &two).abs();
        assert!(err < big_rational(1, 1) / BigRational::from(BigInt::from(10u8).pow(39)));
        assert!((sqrt_rational_f64(&two).unwrap() - std::f64::consts::SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn huge_ratio_to_f64() {
        // numerator and denominator each overflow f64, ratio is 2
        let big = BigInt::from(10u8).pow(400);
        let r = BigRational::new(&big * 2, big);
        assert_eq!(rational_to_f64(&r), 2.0);
    }

    #[test]
    fn half_even_rounding() {
        assert_eq!(round_half_even(&big_rational(141421, 100000), 5), "1.41421");
        assert_eq!(round_half_even(&big_rational(25, 1000), 2), "0.02"); // tie to even
        assert_eq!(round_half_even(&big_rational(35, 1000), 2), "0.04"); // tie to even
        assert_eq!(round_half_even(&big_rational(-7, 2), 0), "-4"); // -3.5 ties to -4 (even)
        assert_eq!(round_half_even(&big_rational(2, 1), 5), "2.00000");
    }

    #[test]
    fn quad2_field_ops() {
        let w = Quad2::from_int(2).add(&Quad2::sqrt2()); // 2 + sqrt2
        let wsq = w.mul(&w); // 6 + 4 sqrt2
        assert_eq!(wsq.a, big_rational(6, 1));
        assert_eq!(wsq.b, big_rational(4, 1));
        let inv = wsq.inverse().unwrap(); // (3 - 2 sqrt2)/2
        assert_eq!(inv.a, big_rational(3, 2));
        assert_eq!(inv.b, big_rational(-1, 1));
        assert!((w.to_f64() - (2.0 + std::f64::consts::SQRT_2)).abs() < 1e-14);
        let cancel = w.sub(&Quad2::sqrt2()); // exactly 2
        assert_eq!(cancel.to_f64(), 2.0);
        assert!((wsq.powi(3).to_f64() - (6.0 + 4.0 * std::f64::consts::SQRT_2).powi(3)).abs() < 1e-9);
    }

    #[test]
    fn binomials_and_catalans() {
        assert_eq!(binomial(4, 2), BigUint::from(6u8));
        assert_eq!(binomial(56, 28).to_string(), "7648690600760440"); // fits, sanity
        let c: Vec<u64> = (0..6).map(|j| catalan(j).try_into().unwrap()).collect();
        assert_eq!(c, vec![1, 1, 2, 5, 14, 42]);
    }
}
