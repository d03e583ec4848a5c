//! Exact Hankel determinants of the interleaved moment matrix and the
//! Jacobi recursion coefficients alpha_n derived from them.
//!
//! The matrix is [mu_{i+j}] with mu_{2k} = m_k and vanishing odd entries
//! (the operator is symmetrized, so odd moments are zero). All leading
//! principal minors come out of one fraction-free elimination pass; floats
//! would be hopeless here since the determinants span hundreds of digits.

use crate::bridge::MomentTable;
use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// D_0..D_N (D_{-1} = 1 by convention). `degenerate_at` is set when a zero
/// pivot truncated the sequence: the underlying measure has finite support.
#[derive(Clone, Debug)]
pub struct HankelSeq {
    dets: Vec<BigRational>,
    pub degenerate_at: Option<usize>,
}

impl HankelSeq {
    /// D_n for n >= -1.
    pub fn det(&self, n: isize) -> &BigRational {
        static ONE: std::sync::OnceLock<BigRational> = std::sync::OnceLock::new();
        if n < 0 {
            ONE.get_or_init(BigRational::one)
        } else {
            &self.dets[n as usize]
        }
    }

    pub fn len(&self) -> usize {
        self.dets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dets.is_empty()
    }

    pub fn dets(&self) -> &[BigRational] {
        &self.dets
    }
}

/// Leading principal minors of the (N+1) x (N+1) interleaved moment matrix
/// by fraction-free (Bareiss) elimination over scaled integers.
pub fn hankel_dets(table: &MomentTable) -> Result<HankelSeq> {
    let n = table.order();
    let dim = n + 1;
    // common denominator of the moments (4 or 1 for the tables here)
    let mut denom = BigInt::one();
    for v in table.moments() {
        denom = num_integer::lcm(denom, v.denom().clone());
    }
    let mu = |idx: usize| -> BigInt {
        if idx % 2 == 0 {
            (table.moment(idx / 2) * BigRational::from(denom.clone())).to_integer()
        } else {
            BigInt::zero()
        }
    };
    let mut a: Vec<Vec<BigInt>> = (0..dim).map(|i| (0..dim).map(|j| mu(i + j)).collect()).collect();

    let mut scaled_minors: Vec<BigInt> = Vec::with_capacity(dim);
    let mut prev = BigInt::one();
    let mut degenerate_at = None;
    for k in 0..dim {
        let pivot = a[k][k].clone();
        if pivot.is_zero() {
            degenerate_at = Some(k);
            break;
        }
        scaled_minors.push(pivot.clone());
        if k + 1 == dim {
            break;
        }
        for i in k + 1..dim {
            for j in k + 1..dim {
                let num = &pivot * &a[i][j] - &a[i][k] * &a[k][j];
                let (q, r) = num_integer::Integer::div_rem(&num, &prev);
                debug_assert!(r.is_zero(), "Bareiss division must be exact");
                a[i][j] = q;
            }
        }
        prev = pivot;
    }

    // D_k = scaled minor / denom^{k+1}
    let mut dets = Vec::with_capacity(scaled_minors.len());
    let mut scale = BigRational::from(denom.clone());
    for minor in scaled_minors {
        let d = BigRational::from(minor) / &scale;
        if !d.is_positive() {
            return Err(Error::Integrity(format!(
                "Hankel determinant D_{} = {} is not positive; the moments are not a valid moment sequence",
                dets.len(),
                d
            )));
        }
        dets.push(d);
        scale *= BigRational::from(denom.clone());
    }
    Ok(HankelSeq { dets, degenerate_at })
}

/// alpha_n^2 = D_{n-2} D_n / D_{n-1}^2 as exact rationals, n = 1..len-1.
pub fn alpha_squares(h: &HankelSeq) -> Vec<BigRational> {
    (1..h.len())
        .map(|n| {
            let n = n as isize;
            h.det(n - 2) * h.det(n) / (h.det(n - 1) * h.det(n - 1))
        })
        .collect()
}

/// The same coefficients by monic orthogonalization of the moment
/// functional; an independent route used to cross-check the Hankel one.
///
/// With L[t^j] = mu_j, the monic orthogonal polynomials satisfy
/// p_{k+1} = t p_k - b_k p_{k-1} (the diagonal terms vanish by symmetry) and
/// b_k = L[p_k^2] / L[p_{k-1}^2] = alpha_k^2.
pub fn alpha_squares_by_recurrence(table: &MomentTable) -> Result<Vec<BigRational>> {
    let n = table.order();
    let functional = |poly: &[BigRational]| -> BigRational {
        poly.iter()
            .enumerate()
            .map(|(j, c)| {
                if j % 2 == 0 {
                    c * table.moment(j / 2)
                } else {
                    BigRational::zero()
                }
            })
            .sum()
    };
    let mul = |a: &[BigRational], b: &[BigRational]| -> Vec<BigRational> {
        let mut out = vec![BigRational::zero(); a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                if !y.is_zero() {
                    out[i + j] += x * y;
                }
            }
        }
        out
    };
    let shift = |a: &[BigRational]| -> Vec<BigRational> {
        let mut out = vec![BigRational::zero()];
        out.extend_from_slice(a);
        out
    };

    let mut p_prev: Vec<BigRational> = vec![BigRational::one()]; // p_0
    let mut nu_prev = functional(&mul(&p_prev, &p_prev)); // L[p_0^2] = mu_0
    let mut p_cur = shift(&p_prev); // p_1 = t
    let mut out = Vec::with_capacity(n);
    for _ in 1..=n {
        let sq = mul(&p_cur, &p_cur);
        // the odd functional L[t p^2] must vanish identically
        let odd = functional(&shift(&sq));
        if !odd.is_zero() {
            return Err(Error::Integrity("symmetric moment functional has odd part".into()));
        }
        let nu_cur = functional(&sq);
        if !nu_cur.is_positive() {
            return Err(Error::Integrity("orthogonal polynomial has non-positive norm".into()));
        }
        let b = &nu_cur / &nu_prev;
        out.push(b.clone());
        // p_{k+1} = t p_k - b_k p_{k-1}
        let mut next = shift(&p_cur);
        for (j, c) in p_prev.iter().enumerate() {
            next[j] -= &b * c;
        }
        p_prev = std::mem::replace(&mut p_cur, next);
        nu_prev = nu_cur;
    }
    Ok(out)
}
