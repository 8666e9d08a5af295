//! Non-negativity sets of univariate polynomials of degree at most two.

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::polynomial::{int, to_f64, Polynomial};

/// Closed interval, ends may be infinite; `lo == hi` is a single point.
pub type Interval = [f64; 2];

/// `{t : p(t) >= 0}` as sorted disjoint closed intervals.
pub fn nonneg_set(index: usize, p: &Polynomial) -> Result<Vec<Interval>> {
    if p.nvars() != 1 {
        return Err(Error::DimensionMismatch { expected: 1, got: p.nvars() });
    }
    let all = vec![[f64::NEG_INFINITY, f64::INFINITY]];
    let c0 = p.coefficient(&[0]);
    let c1 = p.coefficient(&[1]);
    let c2 = p.coefficient(&[2]);
    match p.degree() {
        -1 => Ok(all),
        0 => Ok(if c0.is_negative() { vec![] } else { all }),
        1 => {
            let r = to_f64(&(-&c0 / &c1));
            Ok(vec![if c1.is_positive() { [r, f64::INFINITY] } else { [f64::NEG_INFINITY, r] }])
        }
        2 => {
            let disc = &c1 * &c1 - int(4) * &c2 * &c0;
            let (b, a) = (to_f64(&c1), to_f64(&c2));
            if disc.is_negative() || (disc.is_zero() && c2.is_positive()) {
                return Ok(if c2.is_positive() { all } else { vec![] });
            }
            if disc.is_zero() {
                let r = -b / (2.0 * a);
                return Ok(vec![[r, r]]);
            }
            let s = to_f64(&disc).sqrt();
            let (mut r1, mut r2) = ((-b - s) / (2.0 * a), (-b + s) / (2.0 * a));
            if r1 > r2 {
                std::mem::swap(&mut r1, &mut r2);
            }
            Ok(if c2.is_positive() {
                vec![[f64::NEG_INFINITY, r1], [r2, f64::INFINITY]]
            } else {
                vec![[r1, r2]]
            })
        }
        _ => Err(Error::UnsupportedCurve { index, reason: "univariate degree above 2".into() }),
    }
}

pub fn intersect(a: &[Interval], b: &[Interval]) -> Vec<Interval> {
    let mut out = Vec::new();
    for x in a {
        for y in b {
            let lo = x[0].max(y[0]);
            let hi = x[1].min(y[1]);
            if lo <= hi {
                out.push([lo, hi]);
            }
        }
    }
    out.sort_by(|p, q| p[0].total_cmp(&q[0]));
    out
}

/// Feasible set of a family of univariate constraints `p_j >= 0`.
pub fn feasible(polys: &[Polynomial]) -> Result<Vec<Interval>> {
    let mut acc = vec![[f64::NEG_INFINITY, f64::INFINITY]];
    for (j, p) in polys.iter().enumerate() {
        acc = intersect(&acc, &nonneg_set(j, p)?);
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_sets() {
        let t = Polynomial::var(1, 0);
        let one = Polynomial::one(1);
        let cap = &one - &(&t * &t);
        assert_eq!(nonneg_set(0, &cap).unwrap(), vec![[-1.0, 1.0]]);
        let cup = &(&t * &t) - &one;
        assert_eq!(nonneg_set(0, &cup).unwrap().len(), 2);
        let point = -&(&t * &t);
        assert_eq!(nonneg_set(0, &point).unwrap(), vec![[0.0, 0.0]]);
        let f = feasible(&[cap, &t - &Polynomial::constant(1, crate::polynomial::rat(1, 2))]).unwrap();
        assert_eq!(f, vec![[0.5, 1.0]]);
    }
}
