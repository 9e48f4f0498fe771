use num_rational::BigRational;

use super::slice::PhaseSlice;
use crate::error::{Error, Result};
use crate::hypotheses::AxisBox;
use crate::ift::Vec2;
use crate::polyring::{rat_from_f64, ratio, EvalPoly, MultiPoly};

const SERIES_TOL: f64 = 1e-16;
const SERIES_MAX_TERMS: usize = 4000;

/// `S(r) = sum_{k>=0} (-r)^k / (k + 2) = (r - ln(1 + r)) / r^2` for `|r| < 1`.
pub fn log_series(r: f64) -> f64 {
    let a = r.abs();
    if a >= 0.5 {
        return (r - r.ln_1p()) / (r * r);
    }
    let mut sum = 0.0;
    let mut p = 1.0;
    for k in 0..SERIES_MAX_TERMS {
        sum += p / (k as f64 + 2.0);
        p *= -r;
        let kk = k as f64 + 1.0;
        if p.abs() / ((kk + 2.0) * (1.0 - a)) < SERIES_TOL {
            break;
        }
    }
    sum
}

/// `S'(r)`.
pub fn log_series_derivative(r: f64) -> f64 {
    let a = r.abs();
    if a >= 0.5 {
        return 1.0 / (r * (1.0 + r)) - 2.0 * log_series(r) / r;
    }
    // sum_{k>=1} k (-1)^k r^{k-1} / (k + 2)
    let mut sum = 0.0;
    let mut p = -1.0;
    for k in 1..SERIES_MAX_TERMS {
        let kf = k as f64;
        sum += kf * p / (kf + 2.0);
        p *= -r;
        if (kf + 1.0) * p.abs() / ((kf + 3.0) * (1.0 - a) * (1.0 - a)) < SERIES_TOL {
            break;
        }
    }
    sum
}

/// Coefficient functions of `phi(u) = u1^2 phi11 + 2 u1 u2 phi12 + u2^2 phi22`,
/// the full phase recentred at `z0` with its constant and linear parts
/// removed.
#[derive(Clone, Debug)]
pub struct PhiDecomposition {
    pub z0: Vec2,
    pub a: [f64; 2],
    /// Polynomial parts in the order 11, 12, 22.
    p: [EvalPoly; 3],
    dp: [[EvalPoly; 2]; 3],
    slice: PhaseSlice,
}

impl PhiDecomposition {
    pub fn new(slice: &PhaseSlice, z0: Vec2) -> Result<Self> {
        if !(z0[0] > 0.0 && z0[1] > 0.0) {
            return Err(Error::Domain(format!("z0 must be positive, got {z0:?}")));
        }
        let g = slice.g_poly();
        let shifted = g.shift(&[rat_from_f64(z0[0]), rat_from_f64(z0[1])])?;
        let second = |i: usize, j: usize| -> Result<MultiPoly> { shifted.derive(i)?.derive(j) };
        let weighted = |h: &MultiPoly| -> MultiPoly {
            let mut out = MultiPoly::zero(2);
            if let Some(d) = h.degree() {
                for l in 0..=d {
                    let w: BigRational = ratio(1, ((l + 1) * (l + 2)) as i64);
                    out = &out + &h.homogeneous_part(l).scale(&w);
                }
            }
            out
        };
        let polys = [weighted(&second(0, 0)?), weighted(&second(0, 1)?), weighted(&second(1, 1)?)];
        let p = [0, 1, 2].map(|k| EvalPoly::new(&polys[k]));
        let dp = [0, 1, 2].map(|k| [p[k].derive(0), p[k].derive(1)]);
        Ok(PhiDecomposition {
            z0,
            a: slice.a,
            p,
            dp,
            slice: slice.clone(),
        })
    }

    pub fn slice(&self) -> &PhaseSlice {
        &self.slice
    }

    pub fn phi12_vanishes(&self) -> bool {
        self.p[1].is_zero()
    }

    fn tail(&self, j: usize, uj: f64) -> f64 {
        let z = self.z0[j];
        -self.a[j] / (z * z) * log_series(uj / z)
    }

    fn tail_derivative(&self, j: usize, uj: f64) -> f64 {
        let z = self.z0[j];
        -self.a[j] / (z * z * z) * log_series_derivative(uj / z)
    }

    /// `[phi11, phi12, phi22]` at `u`.
    pub fn phi_ij(&self, u: Vec2) -> [f64; 3] {
        [
            self.p[0].eval(&u) + self.tail(0, u[0]),
            self.p[1].eval(&u),
            self.p[2].eval(&u) + self.tail(1, u[1]),
        ]
    }

    /// Gradients of `[phi11, phi12, phi22]`.
    pub fn phi_ij_grad(&self, u: Vec2) -> [Vec2; 3] {
        let mut g = [0, 1, 2].map(|k| [self.dp[k][0].eval(&u), self.dp[k][1].eval(&u)]);
        g[0][0] += self.tail_derivative(0, u[0]);
        g[2][1] += self.tail_derivative(1, u[1]);
        g
    }

    pub fn phi(&self, u: Vec2) -> f64 {
        let [a, b, c] = self.phi_ij(u);
        u[0] * u[0] * a + 2.0 * u[0] * u[1] * b + u[1] * u[1] * c
    }

    /// `phi11 phi22 - phi12^2`.
    pub fn det(&self, u: Vec2) -> f64 {
        let [a, b, c] = self.phi_ij(u);
        a * c - b * b
    }

    /// Largest `|u_j / z_j|` over the box; must stay below 1/2.
    pub fn ratio_bound(&self, bx: &AxisBox) -> f64 {
        (0..2)
            .map(|j| {
                let m = (bx.lo()[j].abs()).max(bx.hi()[j].abs());
                m / self.z0[j]
            })
            .fold(0.0, f64::max)
    }

    /// `b[k][l]` bounds `|d phi_k / d u_l|` on the box, `k` in the order
    /// 11, 12, 22. Errors when the box reaches `|u_j| >= z_j / 2`.
    pub fn derivative_bounds(&self, bx: &AxisBox) -> Result<[Vec2; 3]> {
        let rho = self.ratio_bound(bx);
        if !(rho < 0.5) {
            return Err(Error::Domain(format!("log-series ratio {rho} is not below 1/2")));
        }
        let (lo, hi) = (bx.lo(), bx.hi());
        let mut b = [0, 1, 2].map(|k| [self.dp[k][0].abs_bound(&lo, &hi), self.dp[k][1].abs_bound(&lo, &hi)]);
        let t = |j: usize| self.a[j].abs() / self.z0[j].powi(3) / ((1.0 - rho) * (1.0 - rho));
        b[0][0] += t(0);
        b[2][1] += t(1);
        Ok(b)
    }
}

/// Full phase minus its value and linear part at `z0`, evaluated directly.
pub fn phi_direct(slice: &PhaseSlice, z0: Vec2, u: Vec2) -> f64 {
    let x = [z0[0] + u[0], z0[1] + u[1]];
    let grad = slice.critical_residual(z0);
    slice.g(x) - slice.g(z0) + slice.a[0] * (u[0] / z0[0]).ln_1p() + slice.a[1] * (u[1] / z0[1]).ln_1p()
        - grad[0] * u[0]
        - grad[1] * u[1]
}
