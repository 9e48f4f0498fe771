use super::adaptive::{adaptive, kronrod_nodes, presplit, PanelSampler, C64};
use crate::error::{Error, Result};

pub const FRESNEL_TOL: f64 = 1e-11;

fn check(l: f64, tau: f64, sign: i8) -> Result<()> {
    if !(l > 0.0) || !l.is_finite() {
        return Err(Error::Domain(format!("L must be positive, got {l}")));
    }
    if tau == 0.0 || !tau.is_finite() {
        return Err(Error::Domain("tau must be finite and nonzero".into()));
    }
    if sign != 1 && sign != -1 {
        return Err(Error::Domain(format!("sign must be +1 or -1, got {sign}")));
    }
    Ok(())
}

fn piece(a: f64, b: f64, tau: f64, sign: i8, tol: f64) -> Result<C64> {
    if a == b {
        return Ok(C64::new(0.0, 0.0));
    }
    let k = 2.0 * std::f64::consts::PI * sign as f64 * tau;
    let om = |lo: f64, hi: f64| 2.0 * k.abs() * lo.abs().max(hi.abs());
    let breaks = presplit(a, b, &om)?;
    Ok(adaptive(&Chirp(k), &breaks, tol)?.value)
}

/// `exp(i k s^2)` sampled as `exp(i k c^2) exp(i k (2 c d + d^2))` about the
/// panel midpoint `c`, so rounding of the large phase is a common factor of
/// the panel and does not pollute the Kronrod-Gauss difference.
struct Chirp(f64);

impl PanelSampler for Chirp {
    fn sample(&self, a: f64, b: f64) -> [(C64, f64); 15] {
        let k = self.0;
        let c = 0.5 * (a + b);
        let base = C64::from_polar(1.0, k * c * c);
        kronrod_nodes(a, b).map(|x| {
            let d = x - c;
            (base * C64::from_polar(1.0, k * d * (2.0 * c + d)), 0.0)
        })
    }
}

/// `∫_{-L}^{y} exp(2 pi i sign tau s^2) ds`.
pub fn fresnel_partial(y: f64, l: f64, tau: f64, sign: i8) -> Result<C64> {
    check(l, tau, sign)?;
    if !(y >= -l && y <= l) {
        return Err(Error::Domain(format!("need -L <= y <= L, got y = {y}")));
    }
    piece(-l, y, tau, sign, FRESNEL_TOL)
}

/// [`fresnel_partial`] at every point of an increasing grid in `[-L, L]`,
/// accumulated panel by panel.
pub fn fresnel_profile(ys: &[f64], l: f64, tau: f64, sign: i8) -> Result<Vec<C64>> {
    check(l, tau, sign)?;
    if ys.windows(2).any(|w| !(w[0] <= w[1])) || ys.iter().any(|&y| !(y >= -l && y <= l)) {
        return Err(Error::Domain("grid must increase inside [-L, L]".into()));
    }
    let mut out = Vec::with_capacity(ys.len());
    let mut acc = C64::new(0.0, 0.0);
    let mut prev = -l;
    for &y in ys {
        // tolerance shared in proportion to length
        let tol = FRESNEL_TOL * ((y - prev) / (2.0 * l)).max(1e-3 / ys.len() as f64);
        acc += piece(prev, y, tau, sign, tol)?;
        out.push(acc);
        prev = y;
    }
    Ok(out)
}

/// Grid `k / (20 sqrt tau)`, `|k| <= 200`, clipped to `[-L, L]`, plus both
/// endpoints.
pub fn fresnel_grid(l: f64, tau: f64) -> Vec<f64> {
    let step = 1.0 / (20.0 * tau.abs().sqrt());
    let mut ys = vec![-l];
    for k in -200i32..=200 {
        let y = k as f64 * step;
        if y > -l && y < l {
            ys.push(y);
        }
    }
    ys.push(l);
    ys
}

/// `max_y |∫_{-L}^{y}|` over [`fresnel_grid`].
pub fn fresnel_max(l: f64, tau: f64, sign: i8) -> Result<f64> {
    let ys = fresnel_grid(l, tau);
    Ok(fresnel_profile(&ys, l, tau, sign)?
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max))
}
