//! Explicit inverse function theorem for planar maps: admissible
//! perturbation size, certified box, boundary minimum and bi-Lipschitz
//! constant, plus Newton inversion inside the certified ball.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypotheses::{enclose_fn, AxisBox};

pub type Vec2 = [f64; 2];
pub type Mat2 = [[f64; 2]; 2];

/// A smooth map of the plane with its Jacobian.
pub trait SmoothMap2: Sync {
    fn eval(&self, x: Vec2) -> Vec2;
    fn jac(&self, x: Vec2) -> Mat2;
    /// `b[i][j][k]` bounds `|d J_ij / d x_k|` on `bx`, when available in
    /// closed form. Otherwise certification falls back to difference sups.
    fn jac_derivative_bounds(&self, _bx: &AxisBox) -> Option<[[[f64; 2]; 2]; 2]> {
        None
    }
}

/// `x -> A x + b`.
#[derive(Clone, Debug)]
pub struct AffineMap2 {
    pub a: Mat2,
    pub b: Vec2,
}

impl SmoothMap2 for AffineMap2 {
    fn eval(&self, x: Vec2) -> Vec2 {
        mat_vec(&self.a, x).map2(self.b, |u, v| u + v)
    }
    fn jac(&self, _x: Vec2) -> Mat2 {
        self.a
    }
    fn jac_derivative_bounds(&self, _bx: &AxisBox) -> Option<[[[f64; 2]; 2]; 2]> {
        Some([[[0.0; 2]; 2]; 2])
    }
}

/// Closure-backed map, handy for tests and one-offs.
pub struct FnMap2<F, J> {
    pub f: F,
    pub j: J,
}

impl<F, J> SmoothMap2 for FnMap2<F, J>
where
    F: Fn(Vec2) -> Vec2 + Sync,
    J: Fn(Vec2) -> Mat2 + Sync,
{
    fn eval(&self, x: Vec2) -> Vec2 {
        (self.f)(x)
    }
    fn jac(&self, x: Vec2) -> Mat2 {
        (self.j)(x)
    }
}

trait Map2Ext {
    fn map2(self, other: Vec2, f: impl Fn(f64, f64) -> f64) -> Vec2;
}

impl Map2Ext for Vec2 {
    fn map2(self, other: Vec2, f: impl Fn(f64, f64) -> f64) -> Vec2 {
        [f(self[0], other[0]), f(self[1], other[1])]
    }
}

pub fn det(a: &Mat2) -> f64 {
    a[0][0] * a[1][1] - a[0][1] * a[1][0]
}

pub fn max_abs_entry(a: &Mat2) -> f64 {
    a.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs()))
}

pub fn mat_vec(a: &Mat2, x: Vec2) -> Vec2 {
    [
        a[0][0] * x[0] + a[0][1] * x[1],
        a[1][0] * x[0] + a[1][1] * x[1],
    ]
}

pub fn mat_mul(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut c = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            c[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    c
}

pub fn solve2(a: &Mat2, r: Vec2) -> Option<Vec2> {
    let d = det(a);
    if d == 0.0 || !d.is_finite() {
        return None;
    }
    Some([
        (a[1][1] * r[0] - a[0][1] * r[1]) / d,
        (a[0][0] * r[1] - a[1][0] * r[0]) / d,
    ])
}

pub fn inverse2(a: &Mat2) -> Option<Mat2> {
    let d = det(a);
    if d == 0.0 || !d.is_finite() {
        return None;
    }
    Some([[a[1][1] / d, -a[0][1] / d], [-a[1][0] / d, a[0][0] / d]])
}

pub fn norm2(x: Vec2) -> f64 {
    x[0].hypot(x[1])
}

fn sub(a: Vec2, b: Vec2) -> Vec2 {
    [a[0] - b[0], a[1] - b[1]]
}

/// Supremum of admissible `M`: `|det A| / (n n! a_max^{n-1})` with n = 2.
pub fn admissible_m(a: &Mat2) -> Result<f64> {
    let d = det(a);
    if d == 0.0 || !d.is_finite() {
        return Err(Error::Singular);
    }
    Ok(d.abs() / (2.0 * 2.0 * max_abs_entry(a)))
}

/// Bi-Lipschitz factor `n! a_max^{n-1} / (|det A| - n M n! a_max^{n-1})`.
pub fn bilipschitz(a: &Mat2, m_bound: f64) -> f64 {
    let am = max_abs_entry(a);
    2.0 * am / (det(a).abs() - 2.0 * m_bound * 2.0 * am)
}

/// Central-difference Jacobian.
pub fn fd_jacobian<M: SmoothMap2 + ?Sized>(map: &M, x: Vec2, h: f64) -> Mat2 {
    let mut j = [[0.0; 2]; 2];
    for k in 0..2 {
        let mut a = x;
        let mut b = x;
        a[k] += h;
        b[k] -= h;
        let fa = map.eval(a);
        let fb = map.eval(b);
        for i in 0..2 {
            j[i][k] = (fa[i] - fb[i]) / (2.0 * h);
        }
    }
    j
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertifyOptions {
    /// Grid nodes per axis for the Jacobian checks.
    pub grid: usize,
    /// Samples per edge of the boundary square.
    pub boundary_samples: usize,
    /// `M` as a fraction of its admissible supremum.
    pub m_fraction: f64,
    pub min_radius: f64,
    /// Safety factor on difference-quotient sups when no closed-form
    /// derivative bounds exist.
    pub fd_safety: f64,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        CertifyOptions {
            grid: 33,
            boundary_samples: 1024,
            m_fraction: 0.5,
            min_radius: 1e-10,
            fd_safety: 2.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IftCertificate {
    pub x0: Vec2,
    pub fx0: Vec2,
    pub a: Mat2,
    pub det_a: f64,
    pub a_max: f64,
    /// The perturbation bound `M`.
    pub m_bound: f64,
    /// Open square `W = x0 + (-r, r)^2`.
    pub w: AxisBox,
    /// Certified sup of `|J_ij(x) - A_ij|` on `W`; strictly below `m_bound`.
    pub jac_deviation: f64,
    /// Certified lower bound for `|det J|` on `W`.
    pub det_lower: f64,
    /// Certified boundary minimum `m` (sampled minimum minus slack).
    pub m: f64,
    pub m_sampled: f64,
    pub m_slack: f64,
    pub v_radius: f64,
    pub bilip: f64,
    pub halvings: u32,
}

impl IftCertificate {
    pub fn radius(&self) -> f64 {
        self.w.radius[0]
    }

    /// True when `x` is in the open square.
    pub fn in_w(&self, x: Vec2) -> bool {
        (x[0] - self.x0[0]).abs() < self.radius() && (x[1] - self.x0[1]).abs() < self.radius()
    }

    pub fn in_v(&self, y: Vec2) -> bool {
        norm2(sub(y, self.fx0)) < self.v_radius
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificate serializes")
    }
}

/// Outcome of checking conditions ii) and iii) on one square.
struct SquareCheck {
    deviation: f64,
    det_lower: f64,
    jac_sup: f64,
}

fn check_square<M: SmoothMap2 + ?Sized>(
    map: &M,
    a: &Mat2,
    bx: &AxisBox,
    opts: &CertifyOptions,
) -> SquareCheck {
    let dj = map
        .jac_derivative_bounds(bx)
        .unwrap_or_else(|| fd_derivative_sup(map, bx, opts));
    let mut deviation = 0.0f64;
    let mut jac_sup = 0.0f64;
    for i in 0..2 {
        for j in 0..2 {
            let lip = [dj[i][j][0], dj[i][j][1]];
            let e = enclose_fn(
                |x| map.jac([x[0], x[1]])[i][j] - a[i][j],
                bx,
                opts.grid,
                &lip,
            );
            deviation = deviation.max(e.abs_sup());
            jac_sup = jac_sup.max(a[i][j].abs() + e.abs_sup());
        }
    }
    // |d det / dx_k| <= 2 * 2 * sup|J| * sup|dJ/dx_k|
    let lip_det: Vec<f64> = (0..2)
        .map(|k| {
            let d = (0..2)
                .flat_map(|i| (0..2).map(move |j| (i, j)))
                .map(|(i, j)| dj[i][j][k])
                .fold(0.0, f64::max);
            4.0 * jac_sup * d
        })
        .collect();
    let e = enclose_fn(|x| det(&map.jac([x[0], x[1]])), bx, opts.grid, &lip_det);
    let det_lower = e.sign_certificate().map_or(0.0, |(_, m)| m);
    SquareCheck {
        deviation,
        det_lower,
        jac_sup,
    }
}

/// Difference-quotient sups of `|dJ_ij/dx_k|` over the grid, inflated by
/// `fd_safety`.
fn fd_derivative_sup<M: SmoothMap2 + ?Sized>(
    map: &M,
    bx: &AxisBox,
    opts: &CertifyOptions,
) -> [[[f64; 2]; 2]; 2] {
    let r = bx.radius[0].max(bx.radius[1]);
    let h = (r * 1e-3).max(1e-9);
    let mut out = [[[0.0f64; 2]; 2]; 2];
    let xs = bx.axis_nodes(0, opts.grid);
    let ys = bx.axis_nodes(1, opts.grid);
    for &x in &xs {
        for &y in &ys {
            for k in 0..2 {
                let mut p = [x, y];
                let mut q = [x, y];
                p[k] += h;
                q[k] -= h;
                let jp = map.jac(p);
                let jq = map.jac(q);
                for i in 0..2 {
                    for j in 0..2 {
                        let d = ((jp[i][j] - jq[i][j]) / (2.0 * h)).abs();
                        out[i][j][k] = out[i][j][k].max(d);
                    }
                }
            }
        }
    }
    for v in out.iter_mut().flatten().flatten() {
        *v = opts.fd_safety * *v + 1e-12;
    }
    out
}

/// Boundary minimum of `|F(x) - F(x0)|` on the square of radius `r`.
fn boundary_min<M: SmoothMap2 + ?Sized>(map: &M, x0: Vec2, fx0: Vec2, r: f64, per_edge: usize) -> f64 {
    let mut best = f64::INFINITY;
    for k in 0..per_edge {
        let s = -1.0 + 2.0 * k as f64 / per_edge as f64;
        let pts = [
            [x0[0] + r * s, x0[1] - r],
            [x0[0] + r, x0[1] + r * s],
            [x0[0] - r * s, x0[1] + r],
            [x0[0] - r, x0[1] - r * s],
        ];
        for p in pts {
            best = best.min(norm2(sub(map.eval(p), fx0)));
        }
    }
    best
}

pub fn certify<M: SmoothMap2 + ?Sized>(map: &M, x0: Vec2, seed_radius: f64) -> Result<IftCertificate> {
    certify_with(map, x0, seed_radius, &CertifyOptions::default())
}

/// Halves the square from `seed_radius` until conditions ii) and iii)
/// certify, then measures the boundary minimum.
pub fn certify_with<M: SmoothMap2 + ?Sized>(
    map: &M,
    x0: Vec2,
    seed_radius: f64,
    opts: &CertifyOptions,
) -> Result<IftCertificate> {
    if !(seed_radius > 0.0) {
        return Err(Error::Domain(format!("seed radius must be positive, got {seed_radius}")));
    }
    let a = map.jac(x0);
    let sup = admissible_m(&a)?;
    let m_bound = opts.m_fraction * sup;
    let fx0 = map.eval(x0);
    let mut r = seed_radius;
    let mut halvings = 0;
    loop {
        if r < opts.min_radius {
            return Err(Error::RadiusUnderflow(format!(
                "no square above radius {:e} satisfies the Jacobian conditions",
                opts.min_radius
            )));
        }
        let bx = AxisBox::cube(&x0, r);
        let chk = check_square(map, &a, &bx, opts);
        if chk.deviation < m_bound && chk.det_lower > 0.0 {
            let m_sampled = boundary_min(map, x0, fx0, r, opts.boundary_samples);
            let step = 2.0 * r / opts.boundary_samples as f64;
            let m_slack = step * 2.0 * chk.jac_sup;
            let m = m_sampled - m_slack;
            if !(m > 0.0) {
                return Err(Error::Certification(format!(
                    "boundary minimum {m_sampled:e} does not exceed slack {m_slack:e}"
                )));
            }
            return Ok(IftCertificate {
                x0,
                fx0,
                a,
                det_a: det(&a),
                a_max: max_abs_entry(&a),
                m_bound,
                w: bx,
                jac_deviation: chk.deviation,
                det_lower: chk.det_lower,
                m,
                m_sampled,
                m_slack,
                v_radius: m / 2.0,
                bilip: bilipschitz(&a, m_bound),
                halvings,
            });
        }
        r *= 0.5;
        halvings += 1;
    }
}

pub const NEWTON_TOL: f64 = 1e-12;
pub const NEWTON_MAX_ITER: usize = 60;

/// Newton iteration from `x0` to the unique preimage of `y` in `W`.
pub fn invert<M: SmoothMap2 + ?Sized>(cert: &IftCertificate, map: &M, y: Vec2) -> Result<Vec2> {
    if !cert.in_v(y) {
        return Err(Error::Domain("target lies outside the certified ball V".into()));
    }
    let mut x = cert.x0;
    for _ in 0..NEWTON_MAX_ITER {
        let r = sub(map.eval(x), y);
        if norm2(r) < NEWTON_TOL {
            return Ok(x);
        }
        let step = solve2(&map.jac(x), r).ok_or(Error::Singular)?;
        x = sub(x, step);
        if !cert.in_w(x) {
            return Err(Error::Newton(format!("iterate {x:?} left the certified square")));
        }
    }
    let r = norm2(sub(map.eval(x), y));
    if r < NEWTON_TOL {
        Ok(x)
    } else {
        Err(Error::Newton(format!(
            "residual {r:e} after {NEWTON_MAX_ITER} iterations"
        )))
    }
}
