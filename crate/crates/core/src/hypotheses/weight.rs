use serde::{Deserialize, Serialize};

use super::grid::AxisBox;
use crate::error::{Error, Result};

const CAP_SAMPLES: usize = 20001;
const CAP_MARGIN: f64 = 1.01;

/// `b(s) = exp(1 - 1/(1 - s^2))` on `|s| < 1`, with first and second
/// derivatives.
pub fn bump(s: f64) -> (f64, f64, f64) {
    let q = 1.0 - s * s;
    if q <= 0.0 {
        return (0.0, 0.0, 0.0);
    }
    let b = (1.0 - 1.0 / q).exp();
    if b == 0.0 {
        return (0.0, 0.0, 0.0);
    }
    let q2 = q * q;
    let d1 = -2.0 * s * b / q2;
    let d2 = b * (4.0 * s * s / (q2 * q2) - 2.0 / q2 - 8.0 * s * s / (q2 * q));
    (b, d1, d2)
}

/// Product weight `prod_j b((x_j - c_j)/delta0) * x_j^{r_j}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Weight {
    pub center: Vec<f64>,
    pub delta0: f64,
    pub exponent_shift: Option<Vec<f64>>,
    /// Strict upper bound for `sup|w| + max sup|dw| + max sup|d^2 w|`.
    pub cap: f64,
}

impl Weight {
    pub fn dim(&self) -> usize {
        self.center.len()
    }

    pub fn support(&self) -> AxisBox {
        AxisBox::cube(&self.center, self.delta0)
    }

    fn r(&self, k: usize) -> f64 {
        self.exponent_shift.as_ref().map_or(0.0, |r| r[k])
    }

    /// Univariate factor `k` at `x` with its first two derivatives.
    pub fn factor(&self, k: usize, x: f64) -> (f64, f64, f64) {
        let d = self.delta0;
        let (b, b1, b2) = bump((x - self.center[k]) / d);
        let (b1, b2) = (b1 / d, b2 / (d * d));
        let r = self.r(k);
        if r == 0.0 || b == 0.0 {
            return (b, b1, b2);
        }
        let p = x.powf(r);
        let p1 = r * x.powf(r - 1.0);
        let p2 = r * (r - 1.0) * x.powf(r - 2.0);
        (b * p, b1 * p + b * p1, b2 * p + 2.0 * b1 * p1 + b * p2)
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        let mut v = 1.0;
        for (k, &xk) in x.iter().enumerate() {
            v *= self.factor(k, xk).0;
            if v == 0.0 {
                break;
            }
        }
        v
    }

    /// Value, gradient and Hessian.
    pub fn partials(&self, x: &[f64]) -> (f64, Vec<f64>, Vec<Vec<f64>>) {
        let n = x.len();
        let fs: Vec<(f64, f64, f64)> = x.iter().enumerate().map(|(k, &v)| self.factor(k, v)).collect();
        let prod_except = |skip: &[usize]| -> f64 {
            fs.iter()
                .enumerate()
                .filter(|(k, _)| !skip.contains(k))
                .map(|(_, f)| f.0)
                .product()
        };
        let v = prod_except(&[]);
        let grad: Vec<f64> = (0..n).map(|j| fs[j].1 * prod_except(&[j])).collect();
        let mut hess = vec![vec![0.0; n]; n];
        for j in 0..n {
            for k in 0..n {
                hess[j][k] = if j == k {
                    fs[j].2 * prod_except(&[j])
                } else {
                    fs[j].1 * fs[k].1 * prod_except(&[j, k])
                };
            }
        }
        (v, grad, hess)
    }
}

/// Builds the product bump weight and measures its cap from dense
/// univariate sups.
pub fn build_weight(x0: &[f64], delta0: f64, r: Option<Vec<f64>>) -> Result<Weight> {
    if !(delta0 > 0.0) {
        return Err(Error::Domain(format!("delta0 must be positive, got {delta0}")));
    }
    if let Some(r) = &r {
        if r.len() != x0.len() {
            return Err(Error::NvarsMismatch {
                left: r.len(),
                right: x0.len(),
            });
        }
        if r.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("exponent shift must be finite".into()));
        }
    }
    let mut w = Weight {
        center: x0.to_vec(),
        delta0,
        exponent_shift: r,
        cap: 0.0,
    };
    if !w.support().positive_unit() {
        return Err(Error::Domain("weight support leaves (0,1)^n".into()));
    }
    let n = x0.len();
    let sups: Vec<[f64; 3]> = (0..n)
        .map(|k| {
            let mut s = [0.0f64; 3];
            for i in 0..CAP_SAMPLES {
                let t = -1.0 + 2.0 * i as f64 / (CAP_SAMPLES - 1) as f64;
                let (a, b, c) = w.factor(k, x0[k] + t * delta0);
                s[0] = s[0].max(a.abs());
                s[1] = s[1].max(b.abs());
                s[2] = s[2].max(c.abs());
            }
            s
        })
        .collect();
    let prod_except = |skip: &[usize]| -> f64 {
        (0..n)
            .filter(|k| !skip.contains(k))
            .map(|k| sups[k][0])
            .product()
    };
    let s0 = prod_except(&[]);
    let s1 = (0..n)
        .map(|j| sups[j][1] * prod_except(&[j]))
        .fold(0.0, f64::max);
    let mut s2 = 0.0f64;
    for j in 0..n {
        s2 = s2.max(sups[j][2] * prod_except(&[j]));
        for k in (j + 1)..n {
            s2 = s2.max(sups[j][1] * sups[k][1] * prod_except(&[j, k]));
        }
    }
    w.cap = CAP_MARGIN * (s0 + s1 + s2);
    Ok(w)
}
