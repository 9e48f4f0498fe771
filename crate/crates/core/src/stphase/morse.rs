use serde::{Deserialize, Serialize};

use super::phi::PhiDecomposition;
use crate::error::{Error, Result};
use crate::hypotheses::{enclose_fn, AxisBox, CaseLabel, Enclosure};
use crate::ift::{certify_with, CertifyOptions, IftCertificate, Mat2, SmoothMap2, Vec2};

/// The Morse coordinates `F(u)` with `phi = eps1 F1^2 + eps1 eps2 F2^2`
/// (Case I) or `phi = eps1 F1^2 + eps2 F2^2` (Case II).
#[derive(Clone, Debug)]
pub struct MorseMap {
    pub phi: PhiDecomposition,
    pub case: CaseLabel,
    pub eps: [f64; 2],
}

impl MorseMap {
    /// Signs are read off at the origin.
    pub fn new(phi: PhiDecomposition, case: CaseLabel) -> Result<Self> {
        let [a, _, c] = phi.phi_ij([0.0, 0.0]);
        let d = phi.det([0.0, 0.0]);
        let eps = match case {
            CaseLabel::CaseI => [a.signum(), d.signum()],
            CaseLabel::CaseII => [a.signum(), c.signum()],
            CaseLabel::NotApplicable => {
                return Err(Error::Domain("no Morse chart outside Cases I and II".into()))
            }
        };
        if a == 0.0 || d == 0.0 {
            return Err(Error::Singular);
        }
        Ok(MorseMap { phi, case, eps })
    }

    /// The quadratic form recombined from `F`, which equals `phi`.
    pub fn recombine(&self, y: Vec2) -> f64 {
        match self.case {
            CaseLabel::CaseI => self.eps[0] * y[0] * y[0] + self.eps[0] * self.eps[1] * y[1] * y[1],
            _ => self.eps[0] * y[0] * y[0] + self.eps[1] * y[1] * y[1],
        }
    }
}

impl SmoothMap2 for MorseMap {
    fn eval(&self, u: Vec2) -> Vec2 {
        let [a, b, c] = self.phi.phi_ij(u);
        match self.case {
            CaseLabel::CaseI => {
                let s1 = (self.eps[0] * a).sqrt();
                let r = b / a;
                let q = self.eps[0] * self.eps[1] * (a * c - b * b) / a;
                [s1 * (u[0] + r * u[1]), u[1] * q.sqrt()]
            }
            _ => [
                u[0] * (self.eps[0] * a).sqrt(),
                u[1] * (self.eps[1] * c).sqrt(),
            ],
        }
    }

    fn jac(&self, u: Vec2) -> Mat2 {
        let [a, b, c] = self.phi.phi_ij(u);
        let [da, db, dc] = self.phi.phi_ij_grad(u);
        let mut j = [[0.0; 2]; 2];
        match self.case {
            CaseLabel::CaseI => {
                let e = self.eps[0] * self.eps[1];
                let s1 = (self.eps[0] * a).sqrt();
                let r = b / a;
                let d = a * c - b * b;
                let q = e * d / a;
                let sq = q.sqrt();
                let w = u[0] + r * u[1];
                for k in 0..2 {
                    let ds1 = self.eps[0] * da[k] / (2.0 * s1);
                    let dr = (db[k] * a - b * da[k]) / (a * a);
                    let dd = da[k] * c + a * dc[k] - 2.0 * b * db[k];
                    let dq = e * (dd * a - d * da[k]) / (a * a);
                    let dw = if k == 0 { 1.0 } else { r } + dr * u[1];
                    j[0][k] = ds1 * w + s1 * dw;
                    j[1][k] = if k == 1 { sq } else { 0.0 } + u[1] * dq / (2.0 * sq);
                }
            }
            _ => {
                let s = [(self.eps[0] * a).sqrt(), (self.eps[1] * c).sqrt()];
                let dphi = [da, dc];
                for i in 0..2 {
                    for k in 0..2 {
                        let diag = if i == k { s[i] } else { 0.0 };
                        j[i][k] = diag + u[i] * self.eps[i] * dphi[i][k] / (2.0 * s[i]);
                    }
                }
            }
        }
        j
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChartOptions {
    pub grid: usize,
    pub min_radius: f64,
    pub ift: CertifyOptions,
}

impl Default for ChartOptions {
    fn default() -> Self {
        ChartOptions {
            grid: 33,
            min_radius: 1e-9,
            ift: CertifyOptions::default(),
        }
    }
}

/// A certified Morse chart around one critical point.
#[derive(Clone, Debug)]
pub struct MorseChart {
    pub map: MorseMap,
    pub delta4: f64,
    /// Lower bound for `|phi11|`, `|D|` (and `|phi12|` in Case I) on the
    /// `delta4` square.
    pub m4: f64,
    /// Signs of `phi11, phi12, D` on that square (0 where not certified).
    pub signs: [i8; 3],
    pub cert: IftCertificate,
    pub delta5: f64,
    pub m5: f64,
    pub delta6: f64,
    /// Certified sup of `|F|` on `[-4 delta6, 4 delta6]^2`.
    pub f_sup: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChartSummary {
    pub case: CaseLabel,
    pub z0: Vec2,
    pub a: [f64; 2],
    pub eps: [f64; 2],
    pub signs: [i8; 3],
    pub delta4: f64,
    pub m4: f64,
    pub delta5: f64,
    pub m5: f64,
    pub delta6: f64,
    pub f_sup: f64,
}

impl MorseChart {
    pub fn summary(&self) -> ChartSummary {
        ChartSummary {
            case: self.map.case,
            z0: self.map.phi.z0,
            a: self.map.phi.a,
            eps: self.map.eps,
            signs: self.signs,
            delta4: self.delta4,
            m4: self.m4,
            delta5: self.delta5,
            m5: self.m5,
            delta6: self.delta6,
            f_sup: self.f_sup,
        }
    }

    /// True when `u` (chart coordinates, relative to `z0`) is in the
    /// certified square `[-delta5, delta5]^2`'s interior.
    pub fn in_domain(&self, u: Vec2) -> bool {
        self.cert.in_w(u)
    }
}

/// Enclosures of `phi11, phi12, phi22, D` on the box.
pub fn enclose_phi(phi: &PhiDecomposition, bx: &AxisBox, grid: usize) -> Result<[Enclosure; 4]> {
    let b = phi.derivative_bounds(bx)?;
    let e: Vec<Enclosure> = (0..3)
        .map(|k| enclose_fn(|x| phi.phi_ij([x[0], x[1]])[k], bx, grid, &b[k]))
        .collect();
    let s = [e[0].abs_sup(), e[1].abs_sup(), e[2].abs_sup()];
    let lip_d: Vec<f64> = (0..2)
        .map(|l| b[0][l] * s[2] + s[0] * b[2][l] + 2.0 * s[1] * b[1][l])
        .collect();
    let d = enclose_fn(|x| phi.det([x[0], x[1]]), bx, grid, &lip_d);
    Ok([e[0], e[1], e[2], d])
}

/// Builds the chart at `phi.z0`: `delta4` by halving from `seed`, then the
/// inverse function certificate for `F` at the origin, then `delta6`.
/// `delta1` caps `delta6` together with `delta5`.
pub fn build_chart(
    phi: PhiDecomposition,
    case: CaseLabel,
    seed: f64,
    delta1: f64,
    opts: &ChartOptions,
) -> Result<MorseChart> {
    if case == CaseLabel::CaseII && !phi.phi12_vanishes() {
        return Err(Error::Domain("Case II chart needs phi12 to vanish".into()));
    }
    let zmin = phi.z0[0].min(phi.z0[1]);
    let mut d4 = seed.min(0.45 * zmin);
    let (m4, signs) = loop {
        if d4 < opts.min_radius {
            return Err(Error::RadiusUnderflow("phi signs never certify".into()));
        }
        let bx = AxisBox::cube(&[0.0, 0.0], d4);
        let e = enclose_phi(&phi, &bx, opts.grid)?;
        let s11 = e[0].sign_certificate();
        let s12 = e[1].sign_certificate();
        let s22 = e[2].sign_certificate();
        let sd = e[3].sign_certificate();
        let ok = match case {
            CaseLabel::CaseI => s11.zip(s12).zip(sd).map(|((a, b), d)| a.1.min(b.1).min(d.1)),
            _ => s11.zip(s22).zip(sd).map(|((a, c), d)| a.1.min(c.1).min(d.1)),
        };
        if let Some(m) = ok {
            let sg = |s: Option<(i8, f64)>| s.map_or(0, |v| v.0);
            break (m, [sg(s11), sg(s12), sg(sd)]);
        }
        d4 *= 0.5;
    };
    let map = MorseMap::new(phi, case)?;
    let cert = certify_with(&map, [0.0, 0.0], d4, &opts.ift)?;
    let d5 = cert.radius();
    let m5 = cert.m;
    // entries of J stay within jac_deviation of J(0) on the certified square
    let lip: [Vec2; 2] = [0, 1].map(|i| [0, 1].map(|k| cert.a[i][k].abs() + cert.jac_deviation));
    let mut d6 = 0.9 * delta1.min(d5) / 5.0;
    let f_sup = loop {
        if d6 < opts.min_radius {
            return Err(Error::RadiusUnderflow("delta6 underflow".into()));
        }
        let bx = AxisBox::cube(&[0.0, 0.0], 4.0 * d6);
        let s: Vec<f64> = (0..2)
            .map(|i| enclose_fn(|x| map.eval([x[0], x[1]])[i], &bx, opts.grid, &lip[i]).abs_sup())
            .collect();
        let sup = s[0].hypot(s[1]);
        if sup < m5 / 4.0 {
            break sup;
        }
        d6 *= 0.5;
    };
    Ok(MorseChart {
        map,
        delta4: d4,
        m4,
        signs,
        cert,
        delta5: d5,
        m5,
        delta6: d6,
        f_sup,
    })
}

