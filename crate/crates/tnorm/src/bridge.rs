//! Exact-rational conversion between the cyclic trace numbers zeta_n and the
//! moments m_n of h*h, plus the general two-projections trace formula the
//! conversion specializes.
//!
//! The bridge identity, with m_0 = 1/4 and zeta_0 = 1, reads
//!     zeta_n - (5 + (-2)^n)/12 = 2 * sum_{k=0}^{n} c_{n,k} m_k / 12^k,
//! where c_{n,k} is the t^k coefficient of the substituted first-kind
//! Chebyshev polynomial 6^{n/2} T_n(sqrt(6) (t - 5/12)). Those polynomials
//! satisfy P_{n+1} = (12 t - 5) P_n - 6 P_{n-1}, so every c_{n,k} is
//! rational and the system is triangular with c_{n,n} = 2^{n-1} 6^n.

use crate::error::{Error, Result};
use crate::exact::big_rational;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Which scaling the moment sequence uses.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Convention {
    /// m_0 = 1/4: moments of h*h for h = QR sqrt(12), the main pipeline.
    QuarterTrace,
    /// m_0 = 1: moments of a symmetric generator sum (the cogrowth chain).
    UnitTrace,
}

impl Convention {
    pub fn m0(self) -> BigRational {
        match self {
            Convention::QuarterTrace => big_rational(1, 4),
            Convention::UnitTrace => BigRational::one(),
        }
    }
}

/// Exact moment sequence m_0..m_N with its convention tag.
#[derive(Clone, Debug, PartialEq)]
pub struct MomentTable {
    convention: Convention,
    /// values[k] = m_k, including m_0.
    values: Vec<BigRational>,
}

impl MomentTable {
    pub fn new(convention: Convention, higher: Vec<BigRational>) -> Result<Self> {
        let mut values = vec![convention.m0()];
        values.extend(higher);
        let table = MomentTable { convention, values };
        table.check()?;
        Ok(table)
    }

    /// Builds from integer moments m_1..m_N.
    pub fn from_integers(convention: Convention, higher: &[BigInt]) -> Result<Self> {
        Self::new(convention, higher.iter().map(|v| BigRational::from(v.clone())).collect())
    }

    fn check(&self) -> Result<()> {
        for (k, v) in self.values.iter().enumerate().skip(1) {
            if !v.is_positive() {
                return Err(Error::Integrity(format!("moment m_{k} = {v} is not positive")));
            }
        }
        // log-convexity m_n^2 <= m_{n-1} m_{n+1}, a necessary condition for
        // being the moments of a positive measure
        for n in 1..self.values.len().saturating_sub(1) {
            let lhs = &self.values[n] * &self.values[n];
            let rhs = &self.values[n - 1] * &self.values[n + 1];
            if lhs > rhs {
                return Err(Error::Integrity(format!("moments not log-convex at n = {n}")));
            }
        }
        Ok(())
    }

    pub fn convention(&self) -> Convention {
        self.convention
    }

    /// Highest available index N.
    pub fn order(&self) -> usize {
        self.values.len() - 1
    }

    pub fn moment(&self, k: usize) -> &BigRational {
        &self.values[k]
    }

    pub fn moments(&self) -> &[BigRational] {
        &self.values
    }

    pub fn truncated(&self, order: usize) -> MomentTable {
        MomentTable {
            convention: self.convention,
            values: self.values[..=order.min(self.order())].to_vec(),
        }
    }
}

/// Coefficients c_{n,k} for n = 0..n_max; row n has n+1 entries.
pub fn cheb_subst_coeffs(n_max: usize) -> Vec<Vec<BigRational>> {
    let mut rows: Vec<Vec<BigRational>> = Vec::with_capacity(n_max + 1);
    rows.push(vec![BigRational::one()]);
    if n_max == 0 {
        return rows;
    }
    rows.push(vec![big_rational(-5, 2), big_rational(6, 1)]);
    for n in 1..n_max {
        let (prev, last) = (&rows[n - 1], &rows[n]);
        let mut next = vec![BigRational::zero(); n + 2];
        // P_{n+1} = (12 t - 5) P_n - 6 P_{n-1}
        for (k, c) in last.iter().enumerate() {
            next[k + 1] += c * big_rational(12, 1);
            next[k] += c * big_rational(-5, 1);
        }
        for (k, c) in prev.iter().enumerate() {
            next[k] += c * big_rational(-6, 1);
        }
        rows.push(next);
    }
    rows
}

fn bridge_constant(n: usize) -> BigRational {
    // (5 + (-2)^n) / 12
    let sign = if n % 2 == 0 { 1 } else { -1 };
    let pow2 = BigInt::from(2).pow(n as u32) * sign;
    BigRational::new(BigInt::from(5) + pow2, BigInt::from(12))
}

/// Solves the triangular bridge for m_1..m_N from integer zeta_1..zeta_N.
/// Every recovered moment must be a positive integer; anything else means
/// the zeta inputs are corrupt.
pub fn zeta_to_moments(zetas: &[BigInt]) -> Result<MomentTable> {
    let n_max = zetas.len();
    let coeffs = cheb_subst_coeffs(n_max);
    let twelve = big_rational(12, 1);
    let mut pow12: Vec<BigRational> = vec![BigRational::one()];
    for k in 1..=n_max {
        let next = &pow12[k - 1] * &twelve;
        pow12.push(next);
    }
    let mut m: Vec<BigRational> = vec![big_rational(1, 4)];
    for n in 1..=n_max {
        let zeta = BigRational::from(zetas[n - 1].clone());
        let mut rhs = (zeta - bridge_constant(n)) / big_rational(2, 1);
        for k in 0..n {
            rhs -= &coeffs[n][k] * &m[k] / &pow12[k];
        }
        let m_n = rhs * &pow12[n] / &coeffs[n][n];
        if !m_n.is_integer() || !m_n.is_positive() {
            return Err(Error::Integrity(format!(
                "bridge produced non-integral or non-positive m_{n} = {m_n}; zeta inputs are corrupt"
            )));
        }
        m.push(m_n);
    }
    MomentTable::new(Convention::QuarterTrace, m[1..].to_vec())
}

/// Forward direction: zeta_n for n = 1..N from an exact moment table.
pub fn moments_to_zeta(table: &MomentTable) -> Result<Vec<BigInt>> {
    if table.convention() != Convention::QuarterTrace {
        return Err(Error::Parameter("the bridge applies to the m0 = 1/4 convention".into()));
    }
    let n_max = table.order();
    let coeffs = cheb_subst_coeffs(n_max);
    let twelve = big_rational(12, 1);
    let mut out = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        let mut sum = BigRational::zero();
        let mut pow12 = BigRational::one();
        for k in 0..=n {
            sum += &coeffs[n][k] * table.moment(k) / &pow12;
            if k < n {
                pow12 *= &twelve;
            }
        }
        let zeta = bridge_constant(n) + sum * big_rational(2, 1);
        if !zeta.is_integer() {
            return Err(Error::Integrity(format!("zeta_{n} = {zeta} is not an integer")));
        }
        out.push(zeta.to_integer());
    }
    Ok(out)
}

/// Trace parameters of the two projections.
#[derive(Clone, Debug)]
pub struct TwoProjParams {
    pub alpha: BigRational,
    pub beta: BigRational,
}

impl TwoProjParams {
    pub fn new(alpha: BigRational, beta: BigRational) -> Result<Self> {
        if !(beta.is_positive() && beta <= alpha && alpha <= big_rational(1, 2)) {
            return Err(Error::Parameter(format!(
                "need 0 < beta <= alpha <= 1/2, got alpha = {alpha}, beta = {beta}"
            )));
        }
        Ok(TwoProjParams { alpha, beta })
    }
}

/// A finitely supported measure on [0, 1] with rational data.
#[derive(Clone, Debug, Default)]
pub struct DiscreteMeasure {
    pub atoms: Vec<(BigRational, BigRational)>,
}

impl DiscreteMeasure {
    pub fn total_mass(&self) -> BigRational {
        self.atoms.iter().map(|(_, w)| w.clone()).sum()
    }

    pub fn moment(&self, k: u32) -> BigRational {
        self.atoms.iter().map(|(t, w)| t.pow(k as i32) * w).sum()
    }
}

/// The abelian-part atom masses mu_ij = tau(e_ij) determined by the trace
/// parameters and the measure; read-only diagnostics.
#[derive(Clone, Debug, PartialEq)]
pub struct MuAtoms {
    pub mu00: BigRational,
    pub mu01: BigRational,
    pub mu10: BigRational,
    pub mu11: BigRational,
}

pub fn mu_atoms(p: &TwoProjParams, nu: &DiscreteMeasure) -> MuAtoms {
    let nu_at = |x: &BigRational| -> BigRational {
        nu.atoms
            .iter()
            .filter(|(t, _)| t == x)
            .map(|(_, w)| w.clone())
            .sum()
    };
    let half = big_rational(1, 2);
    let nu0 = nu_at(&BigRational::zero());
    let nu1 = nu_at(&BigRational::one());
    MuAtoms {
        mu00: BigRational::one() - &p.alpha - &p.beta + &half * &nu1,
        mu01: &half * &nu0,
        mu10: &half * &nu0 + (&p.alpha - &p.beta),
        mu11: &half * &nu1,
    }
}

/// tau(((P - alpha I)(Q - beta I))^n) for projections with tau P = alpha,
/// tau Q = beta and spectral data nu (total mass 2 beta):
///     (alpha beta)^n mu00 + (-beta(1-alpha))^n (mu10 - mu01)
///       + s^{n/2} integral T_n((t - alpha - beta + 2 alpha beta)/(2 sqrt s)) d nu,
/// with s = alpha(1-alpha)beta(1-beta). The half-integer powers cancel by
/// Chebyshev parity, so the value is an exact rational.
pub fn general_cyclic_from_measure(
    p: &TwoProjParams,
    nu: &DiscreteMeasure,
    n: u32,
) -> Result<BigRational> {
    let two_beta = &p.beta * big_rational(2, 1);
    if nu.total_mass() != two_beta {
        return Err(Error::Parameter(format!(
            "measure mass {} != 2 beta = {}",
            nu.total_mass(),
            two_beta
        )));
    }
    let one = BigRational::one();
    let alpha = &p.alpha;
    let beta = &p.beta;
    let mu00 = &one - alpha - beta;
    let mu10_minus_mu01 = alpha - beta;
    let s = alpha * (&one - alpha) * beta * (&one - beta);
    let shift = alpha + beta - alpha * beta * big_rational(2, 1);

    let ab_pow = (alpha * beta).pow(n as i32);
    let neg = (-(beta * (&one - alpha))).pow(n as i32);

    // s^{n/2} T_n(u / (2 sqrt s)) = W_n(u) / 2^n with
    // W_0 = 1, W_1 = u, W_{k+1} = 2 u W_k - 4 s W_{k-1}.
    let mut integral = BigRational::zero();
    for (t, w) in &nu.atoms {
        let u = t - &shift;
        let mut w_prev = BigRational::one();
        let mut w_cur = u.clone();
        let value = if n == 0 {
            w_prev.clone()
        } else {
            for _ in 1..n {
                let next = big_rational(2, 1) * &u * &w_cur - big_rational(4, 1) * &s * &w_prev;
                w_prev = w_cur;
                w_cur = next;
            }
            w_cur
        };
        integral += value * w;
    }
    let halves = BigRational::new(BigInt::one(), BigInt::from(2).pow(n));
    Ok(ab_pow * mu00 + neg * mu10_minus_mu01 + integral * halves)
}
