use serde::{Deserialize, Serialize};

use super::slice::PhaseSlice;
use crate::hypotheses::{enclose_fn, AxisBox};
use crate::ift::{solve2, Vec2, NEWTON_MAX_ITER};

/// Residual threshold for accepting a critical point.
pub const CRITICAL_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum CriticalSearch {
    Found {
        z0: Vec2,
        residual: f64,
        iterations: usize,
    },
    /// Certified: `|G_j0 + A_j0 / u_j0| > lower_bound > 0` on the whole box.
    NotInBox { j0: usize, lower_bound: f64 },
    /// Newton found nothing in the box and no coordinate certifies.
    Inconclusive,
}

fn max_abs(r: Vec2) -> f64 {
    r[0].abs().max(r[1].abs())
}

/// Newton on `G_j(u) + A_j / u_j = 0` from `start`. Iterates must stay in
/// `u_j > 0`; returns the converged point, its residual and step count.
pub fn newton_critical(slice: &PhaseSlice, start: Vec2) -> Option<(Vec2, f64, usize)> {
    let mut u = start;
    for it in 0..NEWTON_MAX_ITER {
        let r = slice.critical_residual(u);
        if !(r[0].is_finite() && r[1].is_finite()) {
            return None;
        }
        let mut h = slice.hess(u);
        h[0][0] -= slice.a[0] / (u[0] * u[0]);
        h[1][1] -= slice.a[1] / (u[1] * u[1]);
        let step = solve2(&h, r)?;
        let next = [u[0] - step[0], u[1] - step[1]];
        if !(next[0] > 0.0 && next[1] > 0.0) {
            return None;
        }
        let small = max_abs(step) <= 1e-15 * (1.0 + max_abs(u));
        u = next;
        let res = max_abs(slice.critical_residual(u));
        if res < 1e-14 || (small && res < CRITICAL_TOL) {
            return Some((u, res, it + 1));
        }
        if small {
            return None;
        }
    }
    let res = max_abs(slice.critical_residual(u));
    (res < CRITICAL_TOL).then_some((u, res, NEWTON_MAX_ITER))
}

/// Looks for a critical point of `G + A1 log u1 + A2 log u2` in the (closed)
/// box. Newton runs from the centre and a 3x3 set of interior starts; when
/// none lands in the box, a grid enclosure of each gradient component is
/// tried as a witness that no critical point exists.
pub fn find_critical_point(slice: &PhaseSlice, bx: &AxisBox, grid: usize) -> CriticalSearch {
    let mut starts = vec![[bx.center[0], bx.center[1]]];
    for a in [-0.5, 0.0, 0.5] {
        for b in [-0.5, 0.0, 0.5] {
            if a != 0.0 || b != 0.0 {
                starts.push([bx.center[0] + a * bx.radius[0], bx.center[1] + b * bx.radius[1]]);
            }
        }
    }
    for s in starts {
        if let Some((z, res, it)) = newton_critical(slice, s) {
            if bx.contains(&z) {
                return CriticalSearch::Found {
                    z0: z,
                    residual: res,
                    iterations: it,
                };
            }
        }
    }
    no_critical_witness(slice, bx, grid)
}

/// Certified lower bound on `|G_j + A_j / u_j|` over the box for the best
/// coordinate `j`, if any is bounded away from zero.
pub fn no_critical_witness(slice: &PhaseSlice, bx: &AxisBox, grid: usize) -> CriticalSearch {
    let (lo, hi) = (bx.lo(), bx.hi());
    if !(lo[0] > 0.0 && lo[1] > 0.0) {
        return CriticalSearch::Inconclusive;
    }
    let hess_bounds = |j: usize, k: usize| -> f64 {
        let p = slice.g_poly().derive(j).and_then(|q| q.derive(k)).expect("bivariate");
        crate::polyring::EvalPoly::new(&p).abs_bound(&lo, &hi)
    };
    let mut best: Option<(usize, f64)> = None;
    for j in 0..2 {
        let mut lip = [hess_bounds(j, 0), hess_bounds(j, 1)];
        lip[j] += slice.a[j].abs() / (lo[j] * lo[j]);
        let e = enclose_fn(|x| slice.critical_residual([x[0], x[1]])[j], bx, grid, &lip);
        if let Some((_, m)) = e.sign_certificate() {
            if best.map_or(true, |(_, b)| m > b) {
                best = Some((j, m));
            }
        }
    }
    match best {
        Some((j0, lower_bound)) => CriticalSearch::NotInBox { j0, lower_bound },
        None => CriticalSearch::Inconclusive,
    }
}
