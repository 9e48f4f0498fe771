use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Interval `[a, b]` with the amplitude supported in `[a + kappa, b - kappa]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct VdcGeometry {
    pub a: f64,
    pub b: f64,
    pub kappa: f64,
}

impl VdcGeometry {
    pub fn new(a: f64, b: f64, kappa: f64) -> Result<Self> {
        if !(a < b) || !(kappa >= 0.0) || !(2.0 * kappa < b - a) {
            return Err(Error::Domain(format!("bad geometry a={a} b={b} kappa={kappa}")));
        }
        Ok(VdcGeometry { a, b, kappa })
    }

    pub fn width(&self) -> f64 {
        self.b - self.a
    }
}

fn check(c1: f64, p: f64, tau: f64) -> Result<()> {
    if !(c1 > 0.0) {
        return Err(Error::Domain(format!("c1 must be positive, got {c1}")));
    }
    if tau == 0.0 || !tau.is_finite() {
        return Err(Error::Domain("tau must be finite and nonzero".into()));
    }
    if !(p >= 0.0) {
        return Err(Error::Domain(format!("max |psi'| must be nonnegative, got {p}")));
    }
    Ok(())
}

/// `|∫ psi e^{i tau f}| <= (2(b-a)/c1 + (b-a)^2 c2 / c1^2) max|psi'| / |tau|`
/// for `|f'| >= c1` and `|f''| <= c2` on `[a, b]`.
pub fn vdc_bound_i(g: &VdcGeometry, c1: f64, c2: f64, psi_deriv_max: f64, tau: f64) -> Result<f64> {
    check(c1, psi_deriv_max, tau)?;
    if !(c2 >= 0.0) {
        return Err(Error::Domain(format!("c2 must be nonnegative, got {c2}")));
    }
    let w = g.width();
    Ok((2.0 * w / c1 + w * w * c2 / (c1 * c1)) * psi_deriv_max / tau.abs())
}

/// `4(b-a) max|psi'| / (c1 |tau|)`; the caller guarantees `f''` is
/// continuous and nonvanishing on `[a, b]`.
pub fn vdc_bound_ii(g: &VdcGeometry, c1: f64, psi_deriv_max: f64, tau: f64) -> Result<f64> {
    check(c1, psi_deriv_max, tau)?;
    Ok(4.0 * g.width() * psi_deriv_max / (c1 * tau.abs()))
}
