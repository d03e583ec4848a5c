//! Largest eigenvalue of the zero-diagonal symmetric tridiagonal matrix
//! with off-diagonals alpha_1..alpha_n, by bisection on Sturm counts.
//! Bisection converges one-sidedly, which suits the lower-bound role these
//! eigenvalues play.

const PIVOT_GUARD: f64 = 1e-300;

/// Number of eigenvalues strictly below `lambda`, via the signs of the LDLT
/// pivots of (M - lambda I).
pub fn count_below(alphas: &[f64], lambda: f64) -> usize {
    let dim = alphas.len() + 1;
    let mut count = 0usize;
    let mut d = -lambda;
    if d < 0.0 {
        count += 1;
    }
    for i in 1..dim {
        let mut prev = d;
        if prev.abs() < PIVOT_GUARD {
            prev = if prev >= 0.0 { PIVOT_GUARD } else { -PIVOT_GUARD };
        }
        d = -lambda - alphas[i - 1] * alphas[i - 1] / prev;
        if d < 0.0 {
            count += 1;
        }
    }
    count
}

/// lambda_max(M_n) to absolute tolerance `tol`.
pub fn top_eigenvalue(alphas: &[f64], tol: f64) -> f64 {
    let dim = alphas.len() + 1;
    let mut lo = 0.0f64;
    let mut hi = 2.0 * alphas.iter().cloned().fold(0.0, f64::max) + 1.0;
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if count_below(alphas, mid) == dim {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_alpha() {
        // [[0, 2], [2, 0]] has eigenvalues +-2
        let lambda = top_eigenvalue(&[2.0], 1e-12);
        assert!((lambda - 2.0).abs() < 1e-11);
    }

    #[test]
    fn two_alphas_give_sqrt_six() {
        // off-diagonals 2, sqrt 2: eigenvalues {0, +-sqrt 6}
        let lambda = top_eigenvalue(&[2.0, std::f64::consts::SQRT_2], 1e-12);
        assert!((lambda - 6.0f64.sqrt()).abs() < 1e-11);
    }

    #[test]
    fn constant_chain_matches_cosine_formula() {
        // all alphas 1: eigenvalues 2 cos(k pi / (dim+1))
        let alphas = vec![1.0; 9];
        let dim = 10.0;
        let expect = 2.0 * (std::f64::consts::PI / (dim + 1.0)).cos();
        let lambda = top_eigenvalue(&alphas, 1e-12);
        assert!((lambda - expect).abs() < 1e-10);
    }

    #[test]
    fn counts_are_monotone() {
        let alphas = [2.0, 1.4, 1.7, 1.5];
        let mut last = 0;
        for i in 0..60 {
            let lambda = -4.0 + 8.0 * (i as f64) / 59.0;
            let c = count_below(&alphas, lambda);
            assert!(c >= last);
            last = c;
        }
        assert_eq!(last, 5);
    }
}
