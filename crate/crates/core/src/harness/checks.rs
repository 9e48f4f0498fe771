use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::problem::Problem;
use crate::error::{Error, Result};
use crate::hypotheses::{bump, AxisBox, CaseLabel};
use crate::ift::{certify, invert, norm2, IftCertificate, SmoothMap2, Vec2};
use crate::oscquad::{fresnel_max, integrate_oscillatory, vdc_bound_i, vdc_bound_ii, VdcGeometry, C64};
use crate::stphase::{
    build_chart, find_critical_point, phi_direct, ChartOptions, CriticalSearch, Ladder, MorseChart, PhaseSlice,
    PhiDecomposition,
};

pub const ROUNDTRIP_TOL: f64 = 1e-12;
pub const MORSE_TOL: f64 = 1e-9;
pub const DECOMPOSITION_TOL: f64 = 1e-10;

fn dist(a: Vec2, b: Vec2) -> f64 {
    norm2([a[0] - b[0], a[1] - b[1]])
}

fn ladder(p: &Problem) -> Result<&Ladder> {
    p.ladder
        .as_ref()
        .map_err(|e| Error::Certification(format!("no stationary-phase ladder: {e}")))
}

fn reference_slice(p: &Problem) -> Result<(PhaseSlice, Vec2)> {
    let x0 = &p.config.x0;
    let u0 = [x0[p.pair.0], x0[p.pair.1]];
    let v: Vec<f64> = p.rest().into_iter().map(|k| x0[k]).collect();
    Ok((PhaseSlice::new(&p.f, p.pair, &v, [0.0, 0.0])?, u0))
}

/// The chart at `u0` on the `v0` slice with `A = -Psi(u0)`.
pub fn reference_chart(p: &Problem) -> Result<MorseChart> {
    let l = ladder(p)?;
    let s = PhaseSlice::new(&p.f, p.pair, &l.v0, [0.0, 0.0])?;
    let c = s.psi(l.u0);
    let s = s.with_a([-c[0], -c[1]]);
    let phi = PhiDecomposition::new(&s, l.u0)?;
    let opts = ChartOptions {
        grid: p.grid,
        ..ChartOptions::default()
    };
    build_chart(phi, l.case, 0.5 * l.delta1, l.delta1, &opts)
}

#[derive(Clone, Debug, Serialize)]
pub struct CertCheck {
    pub name: String,
    pub certificate: IftCertificate,
    pub pairs: usize,
    pub bilipschitz_violations: usize,
    pub targets: usize,
    /// Largest `|F(invert(y)) - y|`; infinite when an inversion failed.
    pub roundtrip_max: f64,
    pub passed: bool,
}

/// Bi-Lipschitz pairs on `W` and inversion round trips on `V`.
pub fn check_certificate<M: SmoothMap2, R: Rng>(
    name: &str,
    cert: &IftCertificate,
    map: &M,
    rng: &mut R,
    pairs: usize,
    targets: usize,
) -> CertCheck {
    let r = cert.radius() * (1.0 - 1e-9);
    let in_w = |rng: &mut R| [cert.x0[0] + r * rng.gen_range(-1.0..1.0), cert.x0[1] + r * rng.gen_range(-1.0..1.0)];
    let violations = (0..pairs)
        .filter(|_| {
            let a = in_w(rng);
            let b = in_w(rng);
            !(dist(a, b) < cert.bilip * dist(map.eval(a), map.eval(b)))
        })
        .count();
    let mut worst = 0.0f64;
    for _ in 0..targets {
        let rho = cert.v_radius * 0.999 * rng.gen::<f64>().sqrt();
        let th = rng.gen_range(0.0..std::f64::consts::TAU);
        let y = [cert.fx0[0] + rho * th.cos(), cert.fx0[1] + rho * th.sin()];
        match invert(cert, map, y) {
            Ok(x) if cert.in_w(x) => worst = worst.max(dist(map.eval(x), y)),
            _ => worst = f64::INFINITY,
        }
    }
    CertCheck {
        name: name.into(),
        certificate: cert.clone(),
        pairs,
        bilipschitz_violations: violations,
        targets,
        roundtrip_max: worst,
        passed: violations == 0 && worst <= ROUNDTRIP_TOL,
    }
}

/// Certificates for `Psi` at `x0` and for the Morse map `F` of the
/// reference chart.
pub fn ift_checks(p: &Problem, seed: u64, pairs: usize, targets: usize) -> Result<Vec<CertCheck>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (s, u0) = reference_slice(p)?;
    let psi = s.psi_map();
    let cert = certify(&psi, u0, 0.5 * p.config.delta)?;
    let mut out = vec![check_certificate("psi", &cert, &psi, &mut rng, pairs, targets)];
    if p.ladder.is_ok() {
        let chart = reference_chart(p)?;
        out.push(check_certificate("morse", &chart.cert, &chart.map, &mut rng, pairs, targets));
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
pub struct MorseCheck {
    pub case: CaseLabel,
    pub eps: [f64; 2],
    pub signs: [i8; 3],
    pub delta5: f64,
    pub delta6: f64,
    pub samples: usize,
    /// Max of `|eps-form(F(u)) - phi(u)|` over the `delta6` square.
    pub identity_residual: f64,
    /// Max of `|sum u_i u_j phi_ij(u) - phi(u)|` over the same points.
    pub decomposition_residual: f64,
    pub passed: bool,
}

pub fn morse_check(p: &Problem, samples: usize, seed: u64) -> Result<MorseCheck> {
    let c = reference_chart(p)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (s, z0) = (c.map.phi.slice(), c.map.phi.z0);
    let r = c.delta6;
    let (mut id, mut dec) = (0.0f64, 0.0f64);
    for _ in 0..samples {
        let u = [r * rng.gen_range(-1.0..1.0), r * rng.gen_range(-1.0..1.0)];
        let direct = phi_direct(s, z0, u);
        id = id.max((c.map.recombine(c.map.eval(u)) - direct).abs());
        dec = dec.max((c.map.phi.phi(u) - direct).abs());
    }
    Ok(MorseCheck {
        case: c.map.case,
        eps: c.map.eps,
        signs: c.signs,
        delta5: c.delta5,
        delta6: c.delta6,
        samples,
        identity_residual: id,
        decomposition_residual: dec,
        passed: id < MORSE_TOL && dec < DECOMPOSITION_TOL,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct CritpointReport {
    pub a: [f64; 2],
    pub search_box: AxisBox,
    pub result: CriticalSearch,
}

/// Critical point of the `v0` slice phase; `A = t / (2 pi tau)` when given,
/// else `A = -Psi(u0)` so that `u0` itself is critical.
pub fn critpoint(p: &Problem, tau_t: Option<(f64, [f64; 2])>) -> Result<CritpointReport> {
    let (s, bx) = match &p.ladder {
        Ok(l) => (PhaseSlice::new(&p.f, p.pair, &l.v0, [0.0, 0.0])?, l.b2()),
        Err(_) => {
            let (s, u0) = reference_slice(p)?;
            (s, AxisBox::cube(&u0, 0.5 * p.config.delta))
        }
    };
    let s = match tau_t {
        Some((tau, t)) => PhaseSlice::from_t(&p.f, p.pair, &s.v, t, tau)?,
        None => {
            let c = s.psi([bx.center[0], bx.center[1]]);
            s.with_a([-c[0], -c[1]])
        }
    };
    let result = find_critical_point(&s, &bx, p.grid);
    Ok(CritpointReport {
        a: s.a,
        search_box: bx,
        result,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct VdcTrial {
    pub a: f64,
    pub b: f64,
    pub kappa: f64,
    /// `f(s) = alpha s^2 + beta s`.
    pub alpha: f64,
    pub beta: f64,
    pub tau: f64,
    pub c1: f64,
    pub c2: f64,
    pub psi_deriv_max: f64,
    /// Certified-from-below `|∫ psi e^{i tau f}|` (value minus error estimate).
    pub integral: f64,
    pub bound_i: f64,
    pub bound_ii: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct VdcSummary {
    pub trials: usize,
    pub violations_i: usize,
    pub checked_ii: usize,
    pub violations_ii: usize,
    /// Largest `integral / bound` seen.
    pub worst_ratio_i: f64,
    pub worst_ratio_ii: f64,
    pub passed: bool,
    pub cases: Vec<VdcTrial>,
}

/// Random quadratic phase with `f'` of one sign on `[a, b]` and a bump
/// amplitude on `[a + kappa, b - kappa]`; `tau` log-uniform in `[1, 10^3]`.
pub fn vdc_trial<R: Rng>(rng: &mut R) -> Result<VdcTrial> {
    let a = rng.gen_range(-2.0..1.0);
    let b = a + rng.gen_range(0.2..2.0);
    let kappa = rng.gen_range(0.0..0.3) * (b - a);
    let g = VdcGeometry::new(a, b, kappa)?;
    let (alpha, beta) = loop {
        let alpha: f64 = if rng.gen_bool(0.2) { 0.0 } else { rng.gen_range(-3.0..3.0) };
        let beta: f64 = rng.gen_range(-6.0..6.0);
        let (da, db) = (2.0 * alpha * a + beta, 2.0 * alpha * b + beta);
        if da * db > 0.0 && da.abs().min(db.abs()) > 0.05 {
            break (alpha, beta);
        }
    };
    let (da, db) = (2.0 * alpha * a + beta, 2.0 * alpha * b + beta);
    let c1 = da.abs().min(db.abs());
    let c2 = 2.0 * alpha.abs();
    let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
    let tau = sign * 10f64.powf(rng.gen_range(0.0..3.0));
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a) - kappa;
    let psi = |s: f64| bump((s - mid) / half);
    // sampled max of |psi'|, inflated for the sampling gap
    let pmax = (0..=20_000)
        .map(|k| psi(a + kappa + 2.0 * half * k as f64 / 20_000.0).1.abs() / half)
        .fold(0.0, f64::max)
        * 1.01;
    let fmax = da.abs().max(db.abs());
    let om = move |_: f64, _: f64| tau.abs() * fmax;
    let r = integrate_oscillatory(
        |s| C64::from_polar(psi(s).0, tau * (alpha * s * s + beta * s)),
        a,
        b,
        1e-12,
        &om,
    )?;
    Ok(VdcTrial {
        a,
        b,
        kappa,
        alpha,
        beta,
        tau,
        c1,
        c2,
        psi_deriv_max: pmax,
        integral: (r.value.norm() - r.abs_error_estimate).max(0.0),
        bound_i: vdc_bound_i(&g, c1, c2, pmax, tau)?,
        bound_ii: if alpha != 0.0 {
            Some(vdc_bound_ii(&g, c1, pmax, tau)?)
        } else {
            None
        },
    })
}

pub fn vdc_trials(seed: u64, trials: usize) -> Result<VdcSummary> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut s = VdcSummary {
        trials,
        violations_i: 0,
        checked_ii: 0,
        violations_ii: 0,
        worst_ratio_i: 0.0,
        worst_ratio_ii: 0.0,
        passed: true,
        cases: Vec::with_capacity(trials),
    };
    for _ in 0..trials {
        let t = vdc_trial(&mut rng)?;
        if t.integral > t.bound_i {
            s.violations_i += 1;
        }
        s.worst_ratio_i = s.worst_ratio_i.max(t.integral / t.bound_i);
        if let Some(b2) = t.bound_ii {
            s.checked_ii += 1;
            if t.integral > b2 {
                s.violations_ii += 1;
            }
            s.worst_ratio_ii = s.worst_ratio_ii.max(t.integral / b2);
        }
        s.cases.push(t);
    }
    s.passed = s.violations_i == 0 && s.violations_ii == 0;
    Ok(s)
}

#[derive(Clone, Debug, Serialize)]
pub struct FresnelRow {
    pub tau: f64,
    pub max_abs: f64,
    pub scaled: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct FresnelSummary {
    pub l: f64,
    pub rows: Vec<FresnelRow>,
    /// Least-squares slope of `ln max|I|` against `ln tau`.
    pub slope: f64,
}

pub fn fresnel_decay(taus: &[f64], l: f64) -> Result<FresnelSummary> {
    if taus.len() < 2 {
        return Err(Error::Config("need at least two tau values".into()));
    }
    let rows = taus
        .iter()
        .map(|&tau| {
            let m = fresnel_max(l, tau, 1)?;
            Ok(FresnelRow {
                tau,
                max_abs: m,
                scaled: m * tau.abs().sqrt(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let pts: Vec<(f64, f64)> = rows.iter().map(|r| (r.tau.abs().ln(), r.max_abs.ln())).collect();
    Ok(FresnelSummary {
        l,
        slope: slope(&pts),
        rows,
    })
}

fn slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}
