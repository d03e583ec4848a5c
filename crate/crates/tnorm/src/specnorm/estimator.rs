//! The five estimator columns per order n: root m_n^{1/2n}, ratio
//! sqrt(m_n/m_{n-1}), the Jacobi coefficient alpha_n, lambda_max of the
//! Jacobi matrix M_n, and the bracket alpha_{n-1} + alpha_n. The first three
//! and lambda_max are increasing lower bounds of the operator norm.

use super::hankel::{alpha_squares, hankel_dets};
use super::jacobi::top_eigenvalue;
use crate::bridge::MomentTable;
use crate::error::{Error, Result};
use crate::exact::{rational_to_f64, sqrt_rational_f64};

pub const EIGEN_TOL: f64 = 1e-12;
/// Slack for the ordering/monotonicity assertions on computed rows.
pub const CHAIN_SLACK: f64 = 1e-9;

#[derive(Clone, Copy, Debug)]
pub struct EstimatorRow {
    pub n: usize,
    pub root: f64,
    pub ratio: f64,
    pub alpha: f64,
    pub lambda_max: f64,
    pub bracket: Option<f64>,
}

impl EstimatorRow {
    /// Display cells rounded half-even to five decimals.
    pub fn cells(&self) -> [String; 6] {
        [
            self.n.to_string(),
            format!("{:.5}", self.root),
            format!("{:.5}", self.ratio),
            format!("{:.5}", self.alpha),
            format!("{:.5}", self.lambda_max),
            self.bracket.map(|b| format!("{b:.5}")).unwrap_or_default(),
        ]
    }
}

/// Computes every row the moment table supports. Fails on violations of the
/// chain inequality or of column monotonicity, which would mean corrupt
/// moments rather than an estimation artifact.
pub fn estimator_table(table: &MomentTable) -> Result<Vec<EstimatorRow>> {
    let h = hankel_dets(table)?;
    let alpha_sq = alpha_squares(&h);
    let alphas: Vec<f64> = alpha_sq
        .iter()
        .map(sqrt_rational_f64)
        .collect::<Result<Vec<_>>>()?;
    let n_max = alphas.len().min(table.order());

    let mut rows = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        let root = rational_to_f64(table.moment(n)).powf(1.0 / (2.0 * n as f64));
        let ratio = sqrt_rational_f64(&(table.moment(n) / table.moment(n - 1)))?;
        let lambda_max = top_eigenvalue(&alphas[..n], EIGEN_TOL);
        let bracket = (n >= 2).then(|| alphas[n - 2] + alphas[n - 1]);
        rows.push(EstimatorRow { n, root, ratio, alpha: alphas[n - 1], lambda_max, bracket });
    }
    validate_rows(&rows)?;
    Ok(rows)
}

fn validate_rows(rows: &[EstimatorRow]) -> Result<()> {
    for row in rows {
        if row.root > row.ratio + CHAIN_SLACK || row.ratio > row.lambda_max + CHAIN_SLACK {
            return Err(Error::Integrity(format!(
                "chain inequality root <= ratio <= lambda_max violated at n = {}",
                row.n
            )));
        }
    }
    for pair in rows.windows(2) {
        let (a, b) = (&pair[0], &pair[1]);
        if b.root < a.root - CHAIN_SLACK
            || b.ratio < a.ratio - CHAIN_SLACK
            || b.lambda_max < a.lambda_max - CHAIN_SLACK
        {
            return Err(Error::Integrity(format!(
                "lower-bound columns must be non-decreasing (n = {} -> {})",
                a.n, b.n
            )));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bridge::Convention;
    use crate::golden;

    /// |computed - printed| within half an ulp of the printed precision plus
    /// the stated tolerance.
    fn close(computed: f64, printed: &str, tol: f64) -> bool {
        let value: f64 = printed.parse().unwrap();
        (computed - value).abs() <= tol
    }

    #[test]
    fn row_two_matches_published_values() {
        let table = golden::table1_moments().unwrap().truncated(4);
        let rows = estimator_table(&table).unwrap();
        let r = &rows[1];
        assert!(close(r.root, "1.56508", 5e-6));
        assert!(close(r.ratio, "2.44949", 5e-6));
        assert!(close(r.alpha, "1.41421", 5e-6));
        assert!(close(r.lambda_max, "2.44949", 5e-6));
        assert!(close(r.bracket.unwrap(), "3.41421", 5e-6));
    }

    #[test]
    fn full_published_table_reproduced_to_five_decimals() {
        let table = golden::table1_moments().unwrap();
        let rows = estimator_table(&table).unwrap();
        let golden_rows = golden::table2().unwrap();
        assert_eq!(rows.len(), 28);
        for (row, gold) in rows.iter().zip(&golden_rows) {
            assert!(close(row.root, &gold.root, 5e-6), "root n={}: {} vs {}", row.n, row.root, gold.root);
            assert!(close(row.ratio, &gold.ratio, 5e-6), "ratio n={}: {} vs {}", row.n, row.ratio, gold.ratio);
            assert!(close(row.alpha, &gold.alpha, 5e-6), "alpha n={}: {} vs {}", row.n, row.alpha, gold.alpha);
            assert!(
                close(row.lambda_max, &gold.lambda_max, 5e-6),
                "lambda n={}: {} vs {}",
                row.n,
                row.lambda_max,
                gold.lambda_max
            );
            match (&gold.bracket, row.bracket) {
                (Some(g), Some(b)) => assert!(close(b, g, 5e-6), "bracket n={}: {} vs {}", row.n, b, g),
                (None, None) => {}
                _ => panic!("bracket presence mismatch at n={}", row.n),
            }
        }
    }

    #[test]
    fn symmetric_sum_table_reproduced_to_five_decimals() {
        let table = golden::table3_moments().unwrap();
        let rows = estimator_table(&table).unwrap();
        let golden_rows = golden::table4().unwrap();
        for (row, gold) in rows.iter().zip(&golden_rows) {
            assert!(close(row.root, &gold.root, 5e-6), "root n={}: {} vs {}", row.n, row.root, gold.root);
            assert!(close(row.ratio, &gold.ratio, 5e-6), "ratio n={}", row.n);
            assert!(close(row.alpha, &gold.alpha, 5e-6), "alpha n={}: {} vs {}", row.n, row.alpha, gold.alpha);
            assert!(close(row.lambda_max, &gold.lambda_max, 5e-6), "lambda n={}: {} vs {}", row.n, row.lambda_max, gold.lambda_max);
        }
        // headline bounds
        assert!((rows[27].lambda_max - 3.7873).abs() < 5e-5);
    }

    #[test]
    fn qr_bounds_hold() {
        let table = golden::table1_moments().unwrap();
        let rows = estimator_table(&table).unwrap();
        let upper = 2.0 + std::f64::consts::SQRT_2;
        let lower = std::f64::consts::SQRT_2 + 3.0f64.sqrt();
        for row in &rows {
            assert!(row.lambda_max < upper, "n={}", row.n);
        }
        for row in rows.iter().filter(|r| r.n >= 16) {
            assert!(row.lambda_max > lower, "n={}", row.n);
        }
    }

    #[test]
    fn display_cells_round_half_even() {
        let table = golden::table1_moments().unwrap().truncated(2);
        let rows = estimator_table(&table).unwrap();
        let cells = rows[0].cells();
        assert_eq!(cells[1], "1.00000");
        assert_eq!(cells[2], "2.00000");
        assert_eq!(cells[5], "");
    }

    #[test]
    fn truncated_tables_give_prefix_rows() {
        let table = golden::table1_moments().unwrap();
        let full = estimator_table(&table).unwrap();
        let part = estimator_table(&table.truncated(10)).unwrap();
        assert_eq!(part.len(), 10);
        for (a, b) in part.iter().zip(&full) {
            assert!((a.alpha - b.alpha).abs() < 1e-14);
            assert!((a.lambda_max - b.lambda_max).abs() < 1e-11);
        }
    }

    #[test]
    fn free_moment_alphas_stay_below_free_norm_bracket() {
        // alpha_{n-1} + alpha_n for the free moments approaches the free
        // norm sqrt2 + sqrt3 from below (up to eigen tolerance)
        let free = crate::freeprob::free_moments(40).unwrap();
        let table = MomentTable::from_integers(Convention::QuarterTrace, &free).unwrap();
        let rows = estimator_table(&table).unwrap();
        let bound = std::f64::consts::SQRT_2 + 3.0f64.sqrt();
        for row in rows.iter().skip(4) {
            if let Some(b) = row.bracket {
                assert!(b <= bound + 1e-6, "n={} bracket={}", row.n, b);
            }
            assert!(row.lambda_max <= bound + 1e-6);
        }
    }
}
