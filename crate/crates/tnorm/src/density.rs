//! Reconstruction of the spectral density from finitely many power moments,
//! in the Chebyshev and Legendre bases.
//!
//! The modified moments int T_{2n}(s/W) dmu are linear combinations of the
//! power moments with monomial coefficients that grow like 4^n and cancel
//! violently. They are therefore accumulated exactly: the supports used
//! here have W = 2 + sqrt(2) or W rational, so every term lives in
//! Q[sqrt(2)] and floats appear only at the final conversion (itself done
//! through 50-digit scaled integers).

use crate::bridge::MomentTable;
use crate::error::{Error, Result};
use crate::exact::Quad2;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::f64::consts::PI;
use std::io::Write;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Basis {
    Chebyshev,
    Legendre,
}

/// The half-width W of the reconstruction interval [-W, W], kept exact.
#[derive(Clone, Debug)]
pub struct HalfWidth {
    w_exact: Quad2,
    w: f64,
}

impl HalfWidth {
    pub fn from_rational(r: BigRational) -> Result<Self> {
        if !r.is_positive() {
            return Err(Error::Parameter("half-width must be positive".into()));
        }
        let q = Quad2::from_rational(r);
        let w = q.to_f64();
        Ok(HalfWidth { w_exact: q, w })
    }

    /// The support bound 2 + sqrt(2) = 1 + q of the QR case.
    pub fn two_plus_sqrt2() -> Self {
        let q = Quad2::from_int(2).add(&Quad2::sqrt2());
        let w = q.to_f64();
        HalfWidth { w_exact: q, w }
    }

    pub fn value(&self) -> f64 {
        self.w
    }

    /// 1 / W^2, exact.
    fn inv_wsq(&self) -> Result<Quad2> {
        self.w_exact.mul(&self.w_exact).inverse()
    }
}

/// The integrals int B_n(s/W) dmu for n = 0..2N; odd entries are exactly
/// zero since the measure is symmetric, and they are never computed.
#[derive(Clone, Debug)]
pub struct ModifiedMoments {
    pub basis: Basis,
    values: Vec<Quad2>,
    floats: Vec<f64>,
}

impl ModifiedMoments {
    /// Highest index 2N.
    pub fn top_index(&self) -> usize {
        self.values.len() - 1
    }

    pub fn value(&self, n: usize) -> &Quad2 {
        &self.values[n]
    }

    pub fn value_f64(&self, n: usize) -> f64 {
        self.floats[n]
    }
}

/// Even Chebyshev coefficient rows: cheb[j][i] is the t^{2i} coefficient of
/// T_{2j}(t), an integer.
fn chebyshev_even_rows(j_max: usize) -> Vec<Vec<BigInt>> {
    // full recurrence up to degree 2 j_max, keeping all rows
    let deg = 2 * j_max;
    let mut rows: Vec<Vec<BigInt>> = vec![vec![BigInt::one()]];
    if deg >= 1 {
        rows.push(vec![BigInt::zero(), BigInt::one()]);
    }
    for n in 1..deg {
        let mut next = vec![BigInt::zero(); n + 2];
        for (k, c) in rows[n].iter().enumerate() {
            next[k + 1] += 2 * c;
        }
        for (k, c) in rows[n - 1].iter().enumerate() {
            next[k] -= c;
        }
        rows.push(next);
    }
    (0..=j_max)
        .map(|j| {
            let row = &rows[2 * j];
            (0..=j).map(|i| row[2 * i].clone()).collect()
        })
        .collect()
}

/// Even Legendre coefficient rows: leg[j][i] is the t^{2i} coefficient of
/// P_{2j}(t), a rational.
fn legendre_even_rows(j_max: usize) -> Vec<Vec<BigRational>> {
    let deg = 2 * j_max;
    let mut rows: Vec<Vec<BigRational>> = vec![vec![BigRational::one()]];
    if deg >= 1 {
        rows.push(vec![BigRational::zero(), BigRational::one()]);
    }
    for n in 1..deg {
        // (n+1) P_{n+1} = (2n+1) x P_n - n P_{n-1}
        let np1 = BigRational::from(BigInt::from(n as i64 + 1));
        let a = BigRational::from(BigInt::from(2 * n as i64 + 1)) / &np1;
        let b = BigRational::from(BigInt::from(n as i64)) / &np1;
        let mut next = vec![BigRational::zero(); n + 2];
        for (k, c) in rows[n].iter().enumerate() {
            next[k + 1] += &a * c;
        }
        for (k, c) in rows[n - 1].iter().enumerate() {
            next[k] -= &b * c;
        }
        rows.push(next);
    }
    (0..=j_max)
        .map(|j| {
            let row = &rows[2 * j];
            (0..=j).map(|i| row[2 * i].clone()).collect()
        })
        .collect()
}

/// Modified moments of order up to 2N from power moments m_0..m_N.
pub fn modified_moments(
    table: &MomentTable,
    w: &HalfWidth,
    basis: Basis,
    n_trunc: usize,
) -> Result<ModifiedMoments> {
    if table.order() < n_trunc {
        return Err(Error::Parameter(format!(
            "need moments to order {n_trunc}, table holds {}",
            table.order()
        )));
    }
    let inv_wsq = w.inv_wsq()?;
    // powers of 1/W^2
    let mut pw: Vec<Quad2> = Vec::with_capacity(n_trunc + 1);
    pw.push(Quad2::one());
    for i in 1..=n_trunc {
        pw.push(pw[i - 1].mul(&inv_wsq));
    }
    let mut values = vec![Quad2::zero(); 2 * n_trunc + 1];
    match basis {
        Basis::Chebyshev => {
            let rows = chebyshev_even_rows(n_trunc);
            for (j, row) in rows.iter().enumerate() {
                let mut acc = Quad2::zero();
                for (i, coeff) in row.iter().enumerate() {
                    let term = pw[i].scale(&(BigRational::from(coeff.clone()) * table.moment(i)));
                    acc = acc.add(&term);
                }
                values[2 * j] = acc;
            }
        }
        Basis::Legendre => {
            let rows = legendre_even_rows(n_trunc);
            for (j, row) in rows.iter().enumerate() {
                let mut acc = Quad2::zero();
                for (i, coeff) in row.iter().enumerate() {
                    let term = pw[i].scale(&(coeff * table.moment(i)));
                    acc = acc.add(&term);
                }
                values[2 * j] = acc;
            }
        }
    }
    let floats = values.iter().map(Quad2::to_f64).collect();
    Ok(ModifiedMoments { basis, values, floats })
}

/// A sampled reconstruction of the density.
#[derive(Clone, Debug)]
pub struct DensityCurve {
    pub basis: Basis,
    /// Truncation order N (series runs to index 2N).
    pub order: usize,
    pub half_width: f64,
    pub grid: Vec<(f64, f64)>,
}

/// Symmetric grid of `count` points strictly inside (-w, w).
pub fn symmetric_grid(w: f64, count: usize) -> Vec<f64> {
    let count = count.max(2);
    (0..count)
        .map(|i| -w + (2.0 * w) * (i as f64 + 0.5) / count as f64)
        .collect()
}

fn chebyshev_t(n: usize, u: f64) -> f64 {
    // |u| <= 1 on every valid grid
    (n as f64 * u.clamp(-1.0, 1.0).acos()).cos()
}

fn legendre_p(n: usize, u: f64) -> f64 {
    let (mut p0, mut p1) = (1.0f64, u);
    if n == 0 {
        return 1.0;
    }
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * u * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    p1
}

/// Evaluates the truncated expansion on the grid points.
pub fn density_curve(
    table: &MomentTable,
    w: &HalfWidth,
    basis: Basis,
    n_trunc: usize,
    grid: &[f64],
) -> Result<DensityCurve> {
    let mm = modified_moments(table, w, basis, n_trunc)?;
    let wv = w.value();
    for &t in grid {
        if t.abs() >= wv {
            return Err(Error::Parameter(format!(
                "grid point {t} outside the open interval (-{wv}, {wv})"
            )));
        }
    }
    let points = grid
        .iter()
        .map(|&t| {
            let u = t / wv;
            let rho = match basis {
                Basis::Chebyshev => {
                    // rho_N(t) = sum c_n^2 nu_n T_n(t/W) / (pi sqrt(W^2-t^2)),
                    // c_0 = 1, c_n = sqrt 2
                    let mut sum = mm.value_f64(0);
                    for j in 1..=n_trunc {
                        sum += 2.0 * mm.value_f64(2 * j) * chebyshev_t(2 * j, u);
                    }
                    sum / (PI * (wv * wv - t * t).sqrt())
                }
                Basis::Legendre => {
                    let mut sum = 0.0;
                    for j in 0..=n_trunc {
                        let n = 2 * j;
                        sum += (n as f64 + 0.5) / wv * mm.value_f64(n) * legendre_p(n, u);
                    }
                    sum
                }
            };
            (t, rho)
        })
        .collect();
    Ok(DensityCurve { basis, order: n_trunc, half_width: wv, grid: points })
}

/// Maximum of the reconstruction over [lo, hi], sampled densely.
pub fn max_density_on(
    table: &MomentTable,
    w: &HalfWidth,
    basis: Basis,
    n_trunc: usize,
    lo: f64,
    hi: f64,
    samples: usize,
) -> Result<f64> {
    let grid: Vec<f64> = (0..samples.max(2))
        .map(|i| lo + (hi - lo) * i as f64 / (samples.max(2) - 1) as f64)
        .collect();
    let curve = density_curve(table, w, basis, n_trunc, &grid)?;
    Ok(curve.grid.iter().map(|&(_, r)| r).fold(f64::NEG_INFINITY, f64::max))
}

/// Integral of the curve's expansion over [-W, W], by quadrature adapted to
/// the basis weight; equals the zeroth modified moment up to quadrature
/// error (orthogonality kills every higher term).
pub fn curve_integral(table: &MomentTable, w: &HalfWidth, basis: Basis, n_trunc: usize) -> Result<f64> {
    let mm = modified_moments(table, w, basis, n_trunc)?;
    let wv = w.value();
    match basis {
        Basis::Chebyshev => {
            // substitute t = W cos(theta): the arcsine weight becomes d theta / pi
            let steps = 8 * n_trunc.max(1) + 64;
            let mut acc = 0.0;
            for i in 0..steps {
                let theta = PI * (i as f64 + 0.5) / steps as f64;
                let mut sum = mm.value_f64(0);
                for j in 1..=n_trunc {
                    sum += 2.0 * mm.value_f64(2 * j) * (2.0 * j as f64 * theta).cos();
                }
                acc += sum;
            }
            Ok(acc / steps as f64)
        }
        Basis::Legendre => {
            let f = |t: f64| {
                let u = t / wv;
                (0..=n_trunc)
                    .map(|j| {
                        let n = 2 * j;
                        (n as f64 + 0.5) / wv * mm.value_f64(n) * legendre_p(n, u)
                    })
                    .sum::<f64>()
            };
            Ok(crate::freeprob::gauss_legendre(f, -wv, wv, 4 * n_trunc.max(1) + 8))
        }
    }
}

/// Plot-data emission: `t rho` per line, or CSV with a header.
pub fn write_plot_data(curve: &DensityCurve, out: &mut impl Write, csv: bool) -> std::io::Result<()> {
    if csv {
        writeln!(out, "t,rho")?;
        for &(t, rho) in &curve.grid {
            writeln!(out, "{t},{rho}")?;
        }
    } else {
        for &(t, rho) in &curve.grid {
            writeln!(out, "{t} {rho}")?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bridge::Convention;
    use crate::exact::big_rational;
    use crate::freeprob;
    use crate::golden;

    fn free_table(order: usize) -> MomentTable {
        let m = freeprob::free_moments(order).unwrap();
        MomentTable::from_integers(Convention::QuarterTrace, &m).unwrap()
    }

    #[test]
    fn zeroth_modified_moment_is_m0() {
        let t = free_table(6);
        let w = HalfWidth::two_plus_sqrt2();
        for basis in [Basis::Chebyshev, Basis::Legendre] {
            let mm = modified_moments(&t, &w, basis, 6).unwrap();
            assert_eq!(mm.value(0), &Quad2::from_rational(big_rational(1, 4)));
            assert_eq!(mm.value_f64(0), 0.25);
            // odd entries are structurally zero
            assert_eq!(mm.value(3), &Quad2::zero());
        }
    }

    #[test]
    fn first_chebyshev_moment_by_hand() {
        // T_2(x) = 2x^2 - 1: nu_2 = 2 m_1 / W^2 - m_0
        let t = free_table(2);
        let w = HalfWidth::from_rational(big_rational(4, 1)).unwrap();
        let mm = modified_moments(&t, &w, Basis::Chebyshev, 2).unwrap();
        let expect = big_rational(2, 16) - big_rational(1, 4);
        assert_eq!(mm.value(2), &Quad2::from_rational(expect));
    }

    #[test]
    fn curve_integral_recovers_m0() {
        let t = free_table(12);
        let w = HalfWidth::two_plus_sqrt2();
        for basis in [Basis::Chebyshev, Basis::Legendre] {
            let integral = curve_integral(&t, &w, basis, 12).unwrap();
            assert!((integral - 0.25).abs() < 1e-8, "{basis:?}: {integral}");
        }
    }

    #[test]
    fn curves_are_symmetric() {
        let t = free_table(10);
        let w = HalfWidth::two_plus_sqrt2();
        let grid = symmetric_grid(w.value(), 64);
        for basis in [Basis::Chebyshev, Basis::Legendre] {
            let curve = density_curve(&t, &w, basis, 10, &grid).unwrap();
            for i in 0..32 {
                let (tl, rl) = curve.grid[i];
                let (tr, rr) = curve.grid[63 - i];
                assert!((tl + tr).abs() < 1e-12);
                assert!((rl - rr).abs() < 1e-12, "{basis:?} at {tl}");
            }
        }
    }

    #[test]
    fn grid_outside_support_is_rejected() {
        let t = free_table(4);
        let w = HalfWidth::two_plus_sqrt2();
        assert!(density_curve(&t, &w, Basis::Chebyshev, 4, &[3.5]).is_err());
    }

    #[test]
    fn chebyshev_curve_tracks_free_density() {
        // truncated expansion of the free moments against the closed form,
        // away from the band edges and the atom
        let t = free_table(28);
        let w = HalfWidth::two_plus_sqrt2();
        let grid: Vec<f64> = (0..200).map(|i| 1.0 + 2.0 * i as f64 / 199.0).collect();
        let curve = density_curve(&t, &w, Basis::Chebyshev, 28, &grid).unwrap();
        let sup = curve
            .grid
            .iter()
            .map(|&(x, r)| (r - freeprob::qr_scaled_density(x)).abs())
            .fold(0.0, f64::max);
        assert!(sup < 0.02, "sup error {sup}");
    }

    #[test]
    fn legendre_curve_tracks_free_density_loosely() {
        let t = free_table(28);
        let w = HalfWidth::two_plus_sqrt2();
        let grid: Vec<f64> = (0..200).map(|i| 1.0 + 2.0 * i as f64 / 199.0).collect();
        let curve = density_curve(&t, &w, Basis::Legendre, 28, &grid).unwrap();
        let sup = curve
            .grid
            .iter()
            .map(|&(x, r)| (r - freeprob::qr_scaled_density(x)).abs())
            .fold(0.0, f64::max);
        assert!(sup < 0.05, "sup error {sup}");
    }

    #[test]
    fn qr_tail_has_little_mass() {
        let table = golden::table1_moments().unwrap();
        let w = HalfWidth::two_plus_sqrt2();
        let max = max_density_on(&table, &w, Basis::Chebyshev, 28, 3.22, 3.414, 512).unwrap();
        assert!(max < 0.01, "tail max {max}");
    }

    #[test]
    fn plot_emission_formats() {
        let t = free_table(4);
        let w = HalfWidth::two_plus_sqrt2();
        let curve = density_curve(&t, &w, Basis::Chebyshev, 4, &[0.0, 1.0]).unwrap();
        let mut text = Vec::new();
        write_plot_data(&curve, &mut text, false).unwrap();
        let s = String::from_utf8(text).unwrap();
        assert_eq!(s.lines().count(), 2);
        assert!(s.lines().next().unwrap().split_whitespace().count() == 2);
        let mut csv = Vec::new();
        write_plot_data(&curve, &mut csv, true).unwrap();
        assert!(String::from_utf8(csv).unwrap().starts_with("t,rho"));
    }
}
