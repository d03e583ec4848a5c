//! Piecewise-linear circle maps with dyadic breakpoints and power-of-two
//! slopes: the function view of a tree pair, used as an independent oracle
//! for composition and the letter action.

use crate::dyadic::DyadicPoint;
use crate::element::DoubleTree;

/// A circle homeomorphism given by breakpoint pairs: domain breakpoint
/// p_j maps to range breakpoint q_j, and the map is affine in between with
/// slope 2^{slope_exp_j}.
#[derive(Clone, Debug)]
pub struct PLCircleMap {
    domain: Vec<(u128, u32)>,
    image: Vec<(u128, u32)>,
    slope_exp: Vec<i32>,
}

impl PLCircleMap {
    pub fn from_element(x: &DoubleTree) -> PLCircleMap {
        let l = x.leaf_count();
        let d = x.domain_tree().leaf_intervals();
        let r = x.range_tree().leaf_intervals();
        let mut domain = Vec::with_capacity(l);
        let mut image = Vec::with_capacity(l);
        let mut slope_exp = Vec::with_capacity(l);
        for j in 0..l {
            let (dn, de) = d[j];
            let (rn, re) = r[(j + x.rotation()) % l];
            domain.push((dn, de));
            image.push((rn, re));
            slope_exp.push(de as i32 - re as i32);
        }
        PLCircleMap { domain, image, slope_exp }
    }

    pub fn segment_count(&self) -> usize {
        self.domain.len()
    }

    pub fn slopes(&self) -> &[i32] {
        &self.slope_exp
    }

    /// Left endpoints of the domain segments.
    pub fn breakpoints(&self) -> Vec<DyadicPoint> {
        self.domain.iter().map(|&(n, e)| DyadicPoint::new(n, e)).collect()
    }

    /// Exact evaluation at a dyadic point of [0, 1).
    pub fn eval(&self, t: DyadicPoint) -> DyadicPoint {
        // find the last segment whose left endpoint is <= t
        let mut j = self.domain.len() - 1;
        for (idx, &(n, e)) in self.domain.iter().enumerate() {
            let ce = e.max(t.exponent());
            if (n << (ce - e)) <= t.scaled_num(ce) {
                j = idx;
            } else {
                break;
            }
        }
        let (dn, de) = self.domain[j];
        let (rn, re) = self.image[j];
        let k = self.slope_exp[j];
        // value = q_j + (t - p_j) * 2^k, all exact
        let te = t.exponent().max(de);
        let diff_num = t.scaled_num(te) - (dn << (te - de)); // >= 0
        let (diff_num, diff_exp) = if k >= 0 {
            (diff_num << k as u32, te)
        } else {
            (diff_num, te + (-k) as u32)
        };
        let oe = diff_exp.max(re);
        DyadicPoint::new((rn << (oe - re)) + (diff_num << (oe - diff_exp)), oe)
    }
}
