//! Closed-form reference data for the free product Z_k * Z_l: the spectral
//! measure of the product of the two averaging projections, its norm, and
//! the exact free-moment recursion for the (1/3, 1/4) case at scale 12.
//!
//! These serve as oracles: the free moments agree with the pipeline moments
//! wherever all zeta vanish, and the closed-form density calibrates the
//! reconstruction code.

use crate::error::{Error, Result};
use crate::exact::{binomial, catalan};
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::f64::consts::PI;

/// Spectral data of pq for projections with traces alpha >= beta.
#[derive(Clone, Debug)]
pub struct FreeMeasure {
    pub alpha: BigRational,
    pub beta: BigRational,
    /// Band edges: the density lives on [-l1, -l2] u [l2, l1].
    pub lambda1: f64,
    pub lambda2: f64,
    /// Mass of the atom at zero: 1 - beta.
    pub atom_mass: f64,
}

impl FreeMeasure {
    pub fn new(alpha: BigRational, beta: BigRational) -> Result<Self> {
        let one = BigRational::one();
        if !(beta.is_positive() && beta <= alpha && alpha < one && &alpha + &beta < one) {
            return Err(Error::Parameter(format!(
                "free measure needs 0 < beta <= alpha < 1 and alpha + beta < 1; got ({alpha}, {beta})"
            )));
        }
        let a = alpha.to_f64().unwrap();
        let b = beta.to_f64().unwrap();
        let s1 = (a * (1.0 - b)).sqrt();
        let s2 = (b * (1.0 - a)).sqrt();
        Ok(FreeMeasure {
            atom_mass: 1.0 - b,
            lambda1: s1 + s2,
            lambda2: s1 - s2,
            alpha,
            beta,
        })
    }

    /// The continuous density at t; zero off the bands and at their edges.
    pub fn density(&self, t: f64) -> f64 {
        let at = t.abs();
        if at <= self.lambda2 || at >= self.lambda1 {
            return 0.0;
        }
        let t2 = at * at;
        let num = ((self.lambda1 * self.lambda1 - t2) * (t2 - self.lambda2 * self.lambda2)).sqrt();
        num / (2.0 * PI * at * (1.0 - t2))
    }

    /// Total mass of both continuous bands, by quadrature; equals beta.
    pub fn band_mass(&self) -> f64 {
        // With x = t^2 the two bands merge into one integral
        //   int sqrt((hi - x)(x - lo)) / (2 pi x (1 - x)) dx over [lo, hi];
        // x = mid + half sin(phi) turns the edge roots into half cos(phi).
        let lo = self.lambda2 * self.lambda2;
        let hi = self.lambda1 * self.lambda1;
        let mid = 0.5 * (lo + hi);
        let half = 0.5 * (hi - lo);
        let integrand = |phi: f64| {
            let x = mid + half * phi.sin();
            let root = half * phi.cos();
            root / (2.0 * PI * x * (1.0 - x)) * half * phi.cos()
        };
        gauss_legendre(integrand, -PI / 2.0, PI / 2.0, 200)
    }

    /// Even moments of the scaled symmetrization: for the (1/3, 1/4) case at
    /// scale 12 these are the integers of `free_moments`.
    pub fn scaled_even_moment(&self, scale_sq: f64, n: u32) -> f64 {
        let lo = self.lambda2 * self.lambda2;
        let hi = self.lambda1 * self.lambda1;
        let mid = 0.5 * (lo + hi);
        let half = 0.5 * (hi - lo);
        let integrand = |phi: f64| {
            let x = mid + half * phi.sin();
            let root = half * phi.cos();
            (scale_sq * x).powi(n as i32) * root / (2.0 * PI * x * (1.0 - x)) * half * phi.cos()
        };
        gauss_legendre(integrand, -PI / 2.0, PI / 2.0, 400)
    }
}

/// ||pq|| = sqrt(alpha(1-beta)) + sqrt(beta(1-alpha)).
pub fn free_norm(alpha: BigRational, beta: BigRational) -> Result<f64> {
    Ok(FreeMeasure::new(alpha, beta)?.lambda1)
}

/// The (1/3, 1/4) measure underlying the scaled element; band edges at
/// sqrt3 -+ sqrt2 after multiplying by sqrt 12.
pub fn qr_free_measure() -> FreeMeasure {
    FreeMeasure::new(
        BigRational::new(BigInt::from(1), BigInt::from(3)),
        BigRational::new(BigInt::from(1), BigInt::from(4)),
    )
    .expect("valid parameters")
}

/// Density of the sqrt(12)-scaled symmetrized measure at x; the closed form
/// is sqrt(24 - (x^2-5)^2) / (2 pi x (12 - x^2)) on sqrt3-sqrt2 < |x| <
/// sqrt3+sqrt2, plus an atom of mass 3/4 at zero (not included here).
pub fn qr_scaled_density(x: f64) -> f64 {
    let fm = qr_free_measure();
    let scale = 12f64.sqrt();
    fm.density(x / scale) / scale
}

/// Exact free moments m_1..m_n for (alpha, beta) = (1/3, 1/4) at scale 12:
/// m_1 = 1 and m_{n+1} = 12 m_n - 6 sum_j C_j binom(n-1, 2j) 6^j 5^{n-1-2j}.
pub fn free_moments(n_max: usize) -> Result<Vec<BigInt>> {
    if n_max == 0 {
        return Ok(Vec::new());
    }
    let mut out = vec![BigInt::one()];
    for n in 1..n_max {
        let mut sum = BigUint::zero();
        let n_u = (n - 1) as u64;
        for j in 0..=(n_u / 2) {
            sum += catalan(j)
                * binomial(n_u, 2 * j)
                * BigUint::from(6u8).pow(j as u32)
                * BigUint::from(5u8).pow((n_u - 2 * j) as u32);
        }
        let next = BigInt::from(12) * &out[n - 1] - BigInt::from(6) * BigInt::from(sum);
        out.push(next);
    }
    Ok(out)
}

/// The same moments by quadrature of the defining integral
/// m_n = int t^{2n}/pi * sqrt(24 - (t^2 - 5)^2) / (t (12 - t^2)) dt over
/// [sqrt3 - sqrt2, sqrt3 + sqrt2]; an oracle independent of the recursion.
pub fn free_moments_quadrature(n_max: usize) -> Result<Vec<f64>> {
    if n_max > 30 {
        return Err(Error::Parameter("quadrature oracle supports n <= 30".into()));
    }
    let fm = qr_free_measure();
    Ok((1..=n_max).map(|n| fm.scaled_even_moment(12.0, n as u32)).collect())
}

/// Gauss-Legendre quadrature of fixed order on [a, b].
pub fn gauss_legendre(f: impl Fn(f64) -> f64, a: f64, b: f64, order: usize) -> f64 {
    let (nodes, weights) = legendre_nodes(order);
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    nodes
        .iter()
        .zip(&weights)
        .map(|(&x, &w)| w * f(mid + half * x))
        .sum::<f64>()
        * half
}

/// Nodes and weights on [-1, 1] by Newton iteration on P_n.
fn legendre_nodes(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let eval = |x: f64| -> (f64, f64) {
        let (mut p0, mut p1) = (1.0f64, x);
        for k in 2..=n {
            let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
            p0 = p1;
            p1 = p2;
        }
        let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
        (p1, dp)
    };
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = eval(x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, dp) = eval(x);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::big_rational;

    #[test]
    fn known_norms() {
        // Z_2 * Z_3: (1 + sqrt2)/sqrt6
        let n23 = free_norm(big_rational(1, 2), big_rational(1, 3)).unwrap();
        assert!((n23 - (1.0 + 2f64.sqrt()) / 6f64.sqrt()).abs() < 1e-12);
        // Z_3 * Z_4: (sqrt2 + sqrt3)/sqrt12
        let n34 = free_norm(big_rational(1, 3), big_rational(1, 4)).unwrap();
        assert!((n34 - (2f64.sqrt() + 3f64.sqrt()) / 12f64.sqrt()).abs() < 1e-12);
        assert!((12f64.sqrt() * n34 - (2f64.sqrt() + 3f64.sqrt())).abs() < 1e-12);
    }

    #[test]
    fn hypotheses_enforced() {
        assert!(free_norm(big_rational(1, 2), big_rational(1, 2)).is_err()); // alpha + beta = 1
        assert!(free_norm(big_rational(1, 4), big_rational(1, 3)).is_err()); // beta > alpha
    }

    #[test]
    fn density_vanishes_at_band_edges_and_outside() {
        let fm = qr_free_measure();
        assert_eq!(fm.density(fm.lambda1), 0.0);
        assert_eq!(fm.density(fm.lambda2), 0.0);
        assert_eq!(fm.density(0.01), 0.0);
        assert_eq!(fm.density(0.99), 0.0);
        assert!(fm.density(0.5 * (fm.lambda1 + fm.lambda2)) > 0.0);
        // symmetry
        let t = 0.6 * fm.lambda1;
        assert_eq!(fm.density(t), fm.density(-t));
    }

    #[test]
    fn scaled_density_matches_display_form() {
        for x in [1.0f64, 1.8, 2.5, 3.0] {
            let direct = (24.0 - (x * x - 5.0).powi(2)).sqrt() / (2.0 * PI * x * (12.0 - x * x));
            assert!((qr_scaled_density(x) - direct).abs() < 1e-12, "x = {x}");
        }
        assert_eq!(qr_scaled_density(0.2), 0.0);
    }

    #[test]
    fn total_mass_is_one() {
        for (a, b) in [(1, 3, 1, 4), (1, 2, 1, 3)].map(|(p, q, r, s)| (big_rational(p, q), big_rational(r, s))) {
            let fm = FreeMeasure::new(a, b).unwrap();
            let total = fm.band_mass() + fm.atom_mass;
            assert!((total - 1.0).abs() < 1e-9, "mass {total}");
        }
    }

    #[test]
    fn recursion_start_values() {
        let m = free_moments(5).unwrap();
        let expect = [1i64, 6, 42, 318, 2526];
        for (k, e) in expect.iter().enumerate() {
            assert_eq!(m[k], BigInt::from(*e), "m_{}", k + 1);
        }
    }

    #[test]
    fn quadrature_agrees_with_recursion() {
        let exact = free_moments(20).unwrap();
        let quad = free_moments_quadrature(20).unwrap();
        for (k, (e, q)) in exact.iter().zip(&quad).enumerate() {
            let e = e.to_f64().unwrap();
            let rel = (q - e).abs() / e;
            assert!(rel < 1e-9, "n = {}: exact {e}, quadrature {q}, rel {rel}", k + 1);
        }
    }
}
