use serde::{Deserialize, Serialize};

use super::grid::{enclose_poly, AxisBox, Enclosure};
use crate::error::{Error, Result};
use crate::polyring::{build_g, check_pair, EvalPoly, MultiPoly};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CaseLabel {
    CaseI,
    CaseII,
    NotApplicable,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CaseReport {
    pub case_label: CaseLabel,
    /// First failing condition when `NotApplicable`.
    pub reason: Option<String>,
    pub pair: (usize, usize),
    /// Lower bound for `|G_ij|` on the box.
    pub m0: f64,
    /// Lower bound for `|x_k F_kk + F_k|`, k in the pair.
    pub m1: f64,
    /// Lower bound for `|F_ij|`; absent in Case II where `F_ij` vanishes.
    pub m2: Option<f64>,
    /// Signs of `G_ij`, `K_i`, `K_j`, `F_ij` (0 when not certified).
    pub signs: [i8; 4],
    /// Upper bounds with `|x_k^2 F_kk| + |x_k F_k| <= lambda_k / 2`.
    pub lambda: [f64; 2],
    pub bx: AxisBox,
    pub rho_min: f64,
    pub rho_max: f64,
}

/// Certified classification of `F` near `x0` with box half-width `delta`.
pub fn classify_case(
    f: &MultiPoly,
    i: usize,
    j: usize,
    x0: &[f64],
    delta: f64,
    grid: usize,
) -> Result<CaseReport> {
    let n = f.nvars();
    check_pair(i, j, n)?;
    if x0.len() != n {
        return Err(Error::NvarsMismatch {
            left: x0.len(),
            right: n,
        });
    }
    if !(delta > 0.0) {
        return Err(Error::Domain(format!("delta must be positive, got {delta}")));
    }
    let bx = AxisBox::cube(x0, delta);
    if !bx.positive_unit() {
        return Err(Error::Domain("box leaves (0,1)^n".into()));
    }
    let mut report = CaseReport {
        case_label: CaseLabel::NotApplicable,
        reason: None,
        pair: (i, j),
        m0: 0.0,
        m1: 0.0,
        m2: None,
        signs: [0; 4],
        lambda: [0.0; 2],
        rho_min: bx.rho_min(),
        rho_max: bx.rho_max(),
        bx: bx.clone(),
    };

    let fi = f.derive(i)?;
    let fj = f.derive(j)?;
    let fii = fi.derive(i)?;
    let fjj = fj.derive(j)?;
    let xi = MultiPoly::var(n, i)?;
    let xj = MultiPoly::var(n, j)?;

    // lambda does not depend on the case, compute it first
    for (slot, (x, (d1, d2))) in [(&xi, (&fi, &fii)), (&xj, (&fj, &fjj))]
        .into_iter()
        .enumerate()
    {
        let a = EvalPoly::new(&(&(x * x) * d2));
        let b = EvalPoly::new(&(x * d1));
        let sa = enclose_poly(&a, &bx, grid).abs_sup();
        let sb = enclose_poly(&b, &bx, grid).abs_sup();
        report.lambda[slot] = 2.0 * (sa + sb);
    }

    let g = build_g(f, i, j)?;
    if g.is_zero() {
        report.reason = Some(format!("G_{{{},{}}} vanishes identically", i + 1, j + 1));
        return Ok(report);
    }
    let Some((s0, m0)) = certify_sign(&g, &bx, grid) else {
        report.reason = Some(format!("G_{{{},{}}} sign not certified on box", i + 1, j + 1));
        return Ok(report);
    };
    report.m0 = m0;
    report.signs[0] = s0;

    let ki = &(&xi * &fii) + &fi;
    let kj = &(&xj * &fjj) + &fj;
    let mut m1 = f64::INFINITY;
    for (slot, (k, idx)) in [(&ki, i), (&kj, j)].into_iter().enumerate() {
        let Some((s, m)) = certify_sign(k, &bx, grid) else {
            report.reason = Some(format!(
                "x{0} F_{0}{0} + F_{0} sign not certified on box",
                idx + 1
            ));
            return Ok(report);
        };
        report.signs[1 + slot] = s;
        m1 = m1.min(m);
    }
    report.m1 = m1;

    let fij = fi.derive(j)?;
    if fij.is_zero() {
        report.case_label = CaseLabel::CaseII;
        return Ok(report);
    }
    let Some((s, m2)) = certify_sign(&fij, &bx, grid) else {
        report.reason = Some(format!(
            "F_{}{} neither vanishes identically nor keeps a certified sign",
            i + 1,
            j + 1
        ));
        return Ok(report);
    };
    report.signs[3] = s;
    report.m2 = Some(m2);
    report.case_label = CaseLabel::CaseI;
    Ok(report)
}

fn certify_sign(p: &MultiPoly, bx: &AxisBox, grid: usize) -> Option<(i8, f64)> {
    let e: Enclosure = enclose_poly(&EvalPoly::new(p), bx, grid);
    e.sign_certificate()
}
