//! Moments of a symmetric generator sum h = sum of letters via the
//! Chebyshev-like group-ring iteration and the cogrowth transformation
//! chain. For the generators {C, D, C^-1, D^-1} of T this reproduces the
//! published n <= 28 series (q = 3).
//!
//! h_0 = e, h_1 = h, h_2 = h h_1 - (q+1) h_0, h_{n+1} = h h_n - q h_{n-1};
//! each h_n is the sum of the freely reduced words of length n, which the
//! brute-force oracle in the tests checks directly.

use crate::action::{left_mul, Letter};
use crate::bridge::{Convention, MomentTable};
use crate::error::{Error, Result};
use crate::exact::binomial;
use crate::ring::GroupRingVector;
use crate::wordfile::{Variant, WordFileReader, WordFileWriter};
use num_bigint::{BigInt, BigUint};
use num_traits::One;
use std::path::Path;

/// The symmetric generator multiset of the norm computation for T.
pub const SYMMETRIC_GENERATORS: [Letter; 4] = [Letter::C, Letter::D, Letter::Cinv, Letter::Dinv];

/// Iterator state holding (h_{n-1}, h_n).
pub struct ChebIter {
    letters: Vec<Letter>,
    q: u32,
    prev: GroupRingVector,
    cur: GroupRingVector,
    n: u32,
}

impl ChebIter {
    /// Starts at n = 1 with h_1 = h. The letters must form a symmetric set
    /// (closed under inversion) for h to be self-adjoint.
    pub fn new(letters: &[Letter]) -> Result<Self> {
        if letters.len() < 2 {
            return Err(Error::Parameter("need at least two generators".into()));
        }
        for l in letters {
            if !letters.contains(&l.inverse()) {
                return Err(Error::Parameter(format!(
                    "generator set is not symmetric: missing inverse of {}",
                    l.name()
                )));
            }
        }
        let h = GroupRingVector::identity().left_mul_letter_sum(letters)?;
        Ok(ChebIter {
            letters: letters.to_vec(),
            q: letters.len() as u32 - 1,
            prev: GroupRingVector::identity(),
            cur: h,
            n: 1,
        })
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn current(&self) -> &GroupRingVector {
        &self.cur
    }

    /// Advances to h_{n+1}; refuses if the support would overrun the budget.
    pub fn step(&mut self, budget_bytes: usize) -> Result<()> {
        let mut next = self.cur.left_mul_letter_sum(&self.letters)?;
        let factor = if self.n == 1 {
            BigInt::from(self.q + 1)
        } else {
            BigInt::from(self.q)
        };
        next.sub_scaled(&self.prev, &factor);
        let bytes = next.approx_bytes();
        if bytes > budget_bytes {
            return Err(Error::MemoryBudget(format!(
                "h_{} needs about {} MiB in memory ({} supported elements)",
                self.n + 1,
                bytes >> 20,
                next.support_size()
            )));
        }
        self.prev = std::mem::replace(&mut self.cur, next);
        self.n += 1;
        Ok(())
    }
}

/// ||h_1||^2 .. ||h_n||^2 for the letter sum.
pub fn iterate_norms(letters: &[Letter], n_max: u32, budget_bytes: usize) -> Result<Vec<BigUint>> {
    let mut iter = ChebIter::new(letters)?;
    let mut out = vec![iter.current().l2_norm_sq().magnitude().clone()];
    while iter.n() < n_max {
        iter.step(budget_bytes)?;
        out.push(iter.current().l2_norm_sq().magnitude().clone());
    }
    Ok(out)
}

/// One row of the cogrowth chain.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainRow {
    pub n: u32,
    pub norm_sq: BigUint,
    pub xi: BigInt,
    pub eta: BigInt,
    pub zeta: BigInt,
    pub m: BigInt,
}

/// The exact transformation chain norms -> xi -> eta -> zeta -> m:
///   xi_n   = ||h_n||^2 - (q+1) q^{n-1}
///   eta_n  = xi_n  - (q-1)(xi_{n-1} + ... + xi_1)
///   zeta_n = eta_n - (q-1)(eta_{n-1} + ... + eta_1)
///   m_n    = binom(2n,n) q^n + sum_k binom(2n,n-k)(zeta_k + 1 - q) q^{n-k}.
pub fn chain_transform(norms_sq: &[BigUint], q: u32) -> Vec<ChainRow> {
    let qi = BigInt::from(q);
    let mut xi_sum = BigInt::from(0);
    let mut eta_sum = BigInt::from(0);
    let mut xis: Vec<BigInt> = Vec::new();
    let mut etas: Vec<BigInt> = Vec::new();
    let mut zetas: Vec<BigInt> = Vec::new();
    let mut rows = Vec::with_capacity(norms_sq.len());
    for (idx, norm_sq) in norms_sq.iter().enumerate() {
        let n = idx as u32 + 1;
        let xi = BigInt::from(norm_sq.clone()) - BigInt::from(q + 1) * qi.pow(n - 1);
        let eta = &xi - (&qi - BigInt::one()) * &xi_sum;
        let zeta = &eta - (&qi - BigInt::one()) * &eta_sum;
        xi_sum += &xi;
        eta_sum += &eta;
        xis.push(xi.clone());
        etas.push(eta.clone());
        zetas.push(zeta.clone());
        let mut m = BigInt::from(binomial(2 * n as u64, n as u64)) * qi.pow(n);
        for k in 1..=n {
            m += BigInt::from(binomial(2 * n as u64, (n - k) as u64))
                * (&zetas[k as usize - 1] + BigInt::one() - &qi)
                * qi.pow(n - k);
        }
        rows.push(ChainRow { n, norm_sq: norm_sq.clone(), xi, eta, zeta, m });
    }
    rows
}

/// Recovers the xi column from the eta column (and eta from zeta); the
/// transforms are triangular and invert each other.
pub fn chain_untransform(values: &[BigInt], q: u32) -> Vec<BigInt> {
    let factor = BigInt::from(q) - BigInt::one();
    let mut out: Vec<BigInt> = Vec::with_capacity(values.len());
    let mut sum = BigInt::from(0);
    for v in values {
        let orig = v + &factor * &sum;
        sum += &orig;
        out.push(orig);
    }
    out
}

/// The full chain for the symmetric T generators, as a moment table
/// (m_0 = 1 convention) ready for the estimator.
pub fn symmetric_sum_moments(n_max: u32, budget_bytes: usize) -> Result<MomentTable> {
    let norms = iterate_norms(&SYMMETRIC_GENERATORS, n_max, budget_bytes)?;
    let rows = chain_transform(&norms, SYMMETRIC_GENERATORS.len() as u32 - 1);
    let m: Vec<BigInt> = rows.into_iter().map(|r| r.m).collect();
    MomentTable::from_integers(Convention::UnitTrace, &m)
}

/// Writes a group-ring vector as a signed word file; the disk twin of the
/// in-memory iterate for spill and interop.
pub fn save_group_ring(v: &GroupRingVector, path: &Path, n: u32) -> Result<()> {
    let mut w = WordFileWriter::create(path, Variant::GroupRing, true, n)?;
    for (key, coeff) in v.iter() {
        w.push(key, coeff)?;
    }
    w.finish()?;
    Ok(())
}

pub fn load_group_ring(path: &Path) -> Result<GroupRingVector> {
    let mut r = WordFileReader::open(path)?;
    if r.header().variant != Variant::GroupRing {
        return Err(Error::FileIntegrity {
            path: path.to_path_buf(),
            reason: "not a group-ring file".into(),
        });
    }
    let mut v = GroupRingVector::new();
    while let Some((key, coeff)) = r.next_entry()? {
        v.add_key(key, coeff);
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::action::word_element;
    use num_traits::ToPrimitive;
    use tempfile::tempdir;

    fn norms(n: u32) -> Vec<BigUint> {
        iterate_norms(&SYMMETRIC_GENERATORS, n, 1 << 30).unwrap()
    }

    #[test]
    fn first_norms_match_published_rows() {
        let ns = norms(5);
        let expect = [4u64, 14, 46, 182, 856];
        for (k, e) in expect.iter().enumerate() {
            assert_eq!(ns[k].to_u64().unwrap(), *e, "||h_{}||^2", k + 1);
        }
    }

    #[test]
    fn chain_rows_match_published_low_orders() {
        let rows = chain_transform(&norms(5), 3);
        // (n, eta, zeta, m)
        let expect: [(u32, i64, i64, i64); 5] =
            [(1, 0, 0, 4), (2, 2, 2, 30), (3, 6, 2, 270), (4, 50, 34, 2678), (5, 360, 244, 28418)];
        for (row, (n, eta, zeta, m)) in rows.iter().zip(expect) {
            assert_eq!(row.n, n);
            assert_eq!(row.eta, BigInt::from(eta), "eta_{n}");
            assert_eq!(row.zeta, BigInt::from(zeta), "zeta_{n}");
            assert_eq!(row.m, BigInt::from(m), "m_{n}");
        }
    }

    #[test]
    fn transforms_invert() {
        let rows = chain_transform(&norms(6), 3);
        let xis: Vec<BigInt> = rows.iter().map(|r| r.xi.clone()).collect();
        let etas: Vec<BigInt> = rows.iter().map(|r| r.eta.clone()).collect();
        let zetas: Vec<BigInt> = rows.iter().map(|r| r.zeta.clone()).collect();
        assert_eq!(chain_untransform(&etas, 3), xis);
        assert_eq!(chain_untransform(&zetas, 3), etas);
    }

    /// h_n must equal the sum over freely reduced length-n words.
    #[test]
    fn iterates_match_reduced_word_expansion() {
        let letters = SYMMETRIC_GENERATORS;
        let mut iter = ChebIter::new(&letters).unwrap();
        for n in 2..=5u32 {
            iter.step(1 << 30).unwrap();
            let mut words: Vec<Vec<Letter>> = letters.iter().map(|&l| vec![l]).collect();
            for _ in 1..n {
                let mut next = Vec::new();
                for w in &words {
                    let last = *w.last().unwrap();
                    for &l in &letters {
                        if l != last.inverse() {
                            let mut w2 = w.clone();
                            w2.push(l);
                            next.push(w2);
                        }
                    }
                }
                words = next;
            }
            assert_eq!(words.len(), 4 * 3usize.pow(n - 1));
            let mut oracle = GroupRingVector::new();
            for w in &words {
                oracle.add_element(&word_element(w), BigInt::one());
            }
            assert_eq!(iter.current(), &oracle, "h_{n}");
        }
    }

    #[test]
    fn budget_refusal_names_the_size() {
        let mut iter = ChebIter::new(&SYMMETRIC_GENERATORS).unwrap();
        iter.step(1 << 30).unwrap();
        match iter.step(100) {
            Err(Error::MemoryBudget(msg)) => assert!(msg.contains("h_3")),
            other => panic!("expected budget refusal, got {other:?}"),
        }
    }

    #[test]
    fn moment_table_matches_published_m_column() {
        let table = symmetric_sum_moments(8, 1 << 30).unwrap();
        let golden = crate::golden::table3().unwrap();
        for k in 1..=8usize {
            assert_eq!(table.moment(k), &num_rational::BigRational::from(golden[k - 1].m.clone()), "m_{k}");
        }
    }

    #[test]
    fn group_ring_file_roundtrip() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("h3.twf");
        let mut iter = ChebIter::new(&SYMMETRIC_GENERATORS).unwrap();
        iter.step(1 << 30).unwrap();
        iter.step(1 << 30).unwrap();
        save_group_ring(iter.current(), &path, 3).unwrap();
        let back = load_group_ring(&path).unwrap();
        assert_eq!(&back, iter.current());
        assert_eq!(back.l2_norm_sq(), iter.current().l2_norm_sq());
    }
}
