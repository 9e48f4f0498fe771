use serde::{Deserialize, Serialize};

use super::morse::{build_chart, ChartOptions, ChartSummary, MorseChart};
use super::phi::PhiDecomposition;
use super::slice::{embed_box, psi_polys, rest_indices, PhaseSlice};
use crate::error::{Error, Result};
use crate::hypotheses::{enclose_poly, AxisBox, CaseLabel, CaseReport};
use crate::ift::{bilipschitz, norm2, solve2, Vec2, NEWTON_MAX_ITER};
use crate::polyring::{rat_from_f64, EvalPoly, MultiPoly};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LadderOptions {
    /// Grid nodes per axis, reduced in high dimension so the grid stays
    /// under `max_grid_points`.
    pub grid: usize,
    pub max_grid_points: usize,
    pub boundary_per_edge: usize,
    /// Nodes per `v` axis when sampling the boundary minimum.
    pub v_nodes: usize,
    pub min_radius: f64,
    pub chart: ChartOptions,
}

impl Default for LadderOptions {
    fn default() -> Self {
        LadderOptions {
            grid: 33,
            max_grid_points: 200_000,
            boundary_per_edge: 256,
            v_nodes: 5,
            min_radius: 1e-9,
            chart: ChartOptions::default(),
        }
    }
}

impl LadderOptions {
    fn grid_for(&self, n: usize) -> usize {
        let cap = (self.max_grid_points as f64).powf(1.0 / n as f64).floor() as usize;
        self.grid.min(cap).max(5)
    }
}

/// Every radius and constant of the construction, from the inverse function
/// step for `Psi_v` down to the weight radius `delta0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Ladder {
    pub case: CaseLabel,
    pub pair: (usize, usize),
    pub u0: Vec2,
    pub v0: Vec<f64>,
    /// Half-width of the classification box `B`.
    pub delta: f64,
    pub m0: f64,
    pub lambda: [f64; 2],
    pub rho_min: f64,
    pub rho_max: f64,
    /// `max |J_ij(u0, v)|` over the `v` box.
    pub a_frak: f64,
    /// Jacobian perturbation bound `m0 / (8 a_frak)`.
    pub m_frak: f64,
    pub delta_prime: f64,
    /// Uniform lower bound for `|Psi_v(u) - Psi_v(u0)|` on the boundary of
    /// the `delta'` square.
    pub m: f64,
    pub inv_lipschitz: f64,
    pub delta1: f64,
    /// Chart at `u0` for the slice `v0` with `A = -Psi_v0(u0)`.
    pub chart: ChartSummary,
    pub delta6: f64,
    pub eta0: f64,
    pub delta_tilde: f64,
    pub delta7: f64,
    pub delta0: f64,
}

impl Ladder {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("ladder serializes")
    }

    pub fn nvars(&self) -> usize {
        self.v0.len() + 2
    }

    pub fn x0(&self) -> Vec<f64> {
        super::slice::embed(self.nvars(), self.pair, self.u0, &self.v0)
    }

    /// `B2 = u0 + [-delta6, delta6]^2`.
    pub fn b2(&self) -> AxisBox {
        AxisBox::cube(&self.u0, self.delta6)
    }

    /// `B3 = u0 + [-delta7, delta7]^2`.
    pub fn b3(&self) -> AxisBox {
        AxisBox::cube(&self.u0, self.delta7)
    }

    /// Support of the weight, `x0 + [-delta0, delta0]^n`.
    pub fn weight_box(&self) -> AxisBox {
        AxisBox::cube(&self.x0(), self.delta0)
    }
}

struct Ctx<'a> {
    f: &'a MultiPoly,
    n: usize,
    pair: (usize, usize),
    u0: Vec2,
    v0: Vec<f64>,
    g: usize,
}

impl Ctx<'_> {
    fn fbox(&self, ur: f64, vr: f64) -> AxisBox {
        embed_box(
            self.n,
            self.pair,
            &AxisBox::cube(&self.u0, ur),
            &AxisBox::cube(&self.v0, vr),
        )
    }

    fn sup(&self, p: &MultiPoly, bx: &AxisBox) -> f64 {
        enclose_poly(&EvalPoly::new(p), bx, self.g).abs_sup()
    }

    fn fix_u0(&self, p: &MultiPoly) -> Result<MultiPoly> {
        p.substitute(&[
            (self.pair.0, rat_from_f64(self.u0[0])),
            (self.pair.1, rat_from_f64(self.u0[1])),
        ])
    }

    fn fix_v0(&self, p: &MultiPoly) -> Result<MultiPoly> {
        let subs: Vec<_> = rest_indices(self.n, self.pair)
            .into_iter()
            .zip(&self.v0)
            .map(|(k, &v)| (k, rat_from_f64(v)))
            .collect();
        p.substitute(&subs)
    }
}

/// Newton for `Psi_v(u) = y` from `start`, with every iterate kept in the
/// open square `w`.
pub fn newton_psi(slice: &PhaseSlice, y: Vec2, start: Vec2, w: &AxisBox) -> Option<Vec2> {
    let inside = |u: Vec2| (0..2).all(|k| (u[k] - w.center[k]).abs() < w.radius[k]);
    let scale = 1.0 + norm2(y);
    let mut u = start;
    for _ in 0..NEWTON_MAX_ITER {
        let p = slice.psi(u);
        let r = [p[0] - y[0], p[1] - y[1]];
        if norm2(r) < 1e-14 * scale {
            return Some(u);
        }
        let step = solve2(&slice.psi_jac(u), r)?;
        u = [u[0] - step[0], u[1] - step[1]];
        if !inside(u) {
            return None;
        }
        if norm2(step) < 1e-16 {
            break;
        }
    }
    let p = slice.psi(u);
    (norm2([p[0] - y[0], p[1] - y[1]]) < 1e-12 * scale).then_some(u)
}

/// Walks the radius ladder for a point certified in Case I or II.
pub fn build_ladder(f: &MultiPoly, report: &CaseReport, opts: &LadderOptions) -> Result<Ladder> {
    let case = report.case_label;
    if case == CaseLabel::NotApplicable {
        return Err(Error::Domain("the ladder needs a Case I or Case II point".into()));
    }
    let n = f.nvars();
    let pair = report.pair;
    let x0 = &report.bx.center;
    let delta = report.bx.radius[0];
    let rest = rest_indices(n, pair);
    let ctx = Ctx {
        f,
        n,
        pair,
        u0: [x0[pair.0], x0[pair.1]],
        v0: rest.iter().map(|&k| x0[k]).collect(),
        g: opts.grid_for(n),
    };
    let u0 = ctx.u0;
    let vr = delta / 2.0;

    let psi = psi_polys(f, pair)?;
    let uk = [pair.0, pair.1];
    let mut jac: Vec<Vec<MultiPoly>> = Vec::new();
    for p in &psi {
        jac.push(uk.iter().map(|&k| p.derive(k)).collect::<Result<_>>()?);
    }
    let mut jac_u0: Vec<Vec<MultiPoly>> = Vec::new();
    for row in &jac {
        jac_u0.push(row.iter().map(|p| ctx.fix_u0(p)).collect::<Result<_>>()?);
    }

    // Jacobian scale over the v box, then the perturbation bound
    let vbox = ctx.fbox(0.0, vr);
    let a_frak = jac_u0
        .iter()
        .flatten()
        .map(|p| ctx.sup(p, &vbox))
        .fold(0.0, f64::max);
    let m_frak = report.m0 / (8.0 * a_frak);

    let jac_dev: Vec<MultiPoly> = jac
        .iter()
        .flatten()
        .zip(jac_u0.iter().flatten())
        .map(|(a, b)| a - b)
        .collect();
    let mut dp = vr;
    loop {
        if dp < opts.min_radius {
            return Err(Error::RadiusUnderflow("delta' underflow".into()));
        }
        let bx = ctx.fbox(dp, vr);
        if jac_dev.iter().all(|p| ctx.sup(p, &bx) < m_frak) {
            break;
        }
        dp *= 0.5;
    }

    let m = uniform_boundary_min(&ctx, &psi, &jac, dp, vr, opts)?;

    let slice0 = PhaseSlice::new(f, pair, &ctx.v0, [0.0, 0.0])?;
    let inv_lipschitz = bilipschitz(&slice0.psi_jac(u0), m_frak);

    // delta1
    let psi_u0: Vec<MultiPoly> = psi.iter().map(|p| ctx.fix_u0(p)).collect::<Result<_>>()?;
    let psi_dev: Vec<MultiPoly> = psi.iter().zip(&psi_u0).map(|(a, b)| a - b).collect();
    let mut d1 = 0.99 * (dp / 2.0).min(report.rho_min / 2.0);
    loop {
        if d1 < opts.min_radius {
            return Err(Error::RadiusUnderflow("delta1 underflow".into()));
        }
        let bx = ctx.fbox(2.0 * d1, 2.0 * d1);
        let s = psi_dev.iter().map(|p| ctx.sup(p, &bx)).fold(0.0, f64::max);
        if std::f64::consts::SQRT_2 * s < m / 5.0 {
            break;
        }
        d1 *= 0.5;
    }

    // reference chart at u0 on the v0 slice
    let c = slice0.psi(u0);
    let slice_ref = slice0.with_a([-c[0], -c[1]]);
    let phi = PhiDecomposition::new(&slice_ref, u0)?;
    let chart: MorseChart = build_chart(phi, case, d1 / 2.0, d1, &opts.chart)?;
    let d6 = chart.delta6;

    let eta0 = find_eta0(&slice0, u0, c, dp, d6, m, inv_lipschitz, opts)?;

    let d_tilde = if rest.is_empty() {
        d1
    } else {
        let drift: Vec<MultiPoly> = psi
            .iter()
            .map(|p| ctx.fix_v0(p).map(|q| p - &q))
            .collect::<Result<_>>()?;
        let mut dt = d1;
        loop {
            if dt < opts.min_radius {
                return Err(Error::RadiusUnderflow("delta~ underflow".into()));
            }
            let bx = ctx.fbox(d6, 2.0 * dt);
            if drift.iter().all(|p| ctx.sup(p, &bx) < eta0) {
                break dt;
            }
            dt *= 0.5;
        }
    };

    let offset: Vec<MultiPoly> = psi
        .iter()
        .zip(c)
        .map(|(p, cj)| p - &MultiPoly::constant(n, rat_from_f64(cj)))
        .collect();
    let mut d7 = 0.99 * d_tilde.min(d1).min(d6);
    loop {
        if d7 < opts.min_radius {
            return Err(Error::RadiusUnderflow("delta7 underflow".into()));
        }
        let bx = ctx.fbox(2.0 * d7, 2.0 * d7);
        if offset.iter().all(|p| ctx.sup(p, &bx) < eta0 / 2.0) {
            break;
        }
        d7 *= 0.5;
    }

    Ok(Ladder {
        case,
        pair,
        u0,
        v0: ctx.v0.clone(),
        delta,
        m0: report.m0,
        lambda: report.lambda,
        rho_min: report.rho_min,
        rho_max: report.rho_max,
        a_frak,
        m_frak,
        delta_prime: dp,
        m,
        inv_lipschitz,
        delta1: d1,
        chart: chart.summary(),
        delta6: d6,
        eta0,
        delta_tilde: d_tilde,
        delta7: d7,
        delta0: d7 / 2.0,
    })
}

/// Sampled minimum of `|Psi_v(u) - Psi_v(u0)|` over `v` nodes and the
/// boundary of the `dp` square, minus slack for both sampling steps.
fn uniform_boundary_min(
    ctx: &Ctx<'_>,
    psi: &[MultiPoly; 2],
    jac: &[Vec<MultiPoly>],
    dp: f64,
    vr: f64,
    opts: &LadderOptions,
) -> Result<f64> {
    let u0 = ctx.u0;
    let vb = AxisBox::cube(&ctx.v0, vr);
    let nv = ctx.v0.len();
    let axes: Vec<Vec<f64>> = (0..nv).map(|k| vb.axis_nodes(k, opts.v_nodes)).collect();
    let total: usize = axes.iter().map(Vec::len).product();
    let per = opts.boundary_per_edge;
    let mut best = f64::INFINITY;
    for mut idx in 0..total {
        let mut v = vec![0.0; nv];
        for k in (0..nv).rev() {
            v[k] = axes[k][idx % axes[k].len()];
            idx /= axes[k].len();
        }
        let s = PhaseSlice::new(ctx.f, ctx.pair, &v, [0.0, 0.0])?;
        let c = s.psi(u0);
        for i in 0..per {
            let t = -1.0 + 2.0 * i as f64 / per as f64;
            for p in [
                [u0[0] + dp * t, u0[1] - dp],
                [u0[0] + dp, u0[1] + dp * t],
                [u0[0] - dp * t, u0[1] + dp],
                [u0[0] - dp, u0[1] - dp * t],
            ] {
                let y = s.psi(p);
                best = best.min(norm2([y[0] - c[0], y[1] - c[1]]));
            }
        }
    }
    let bx = ctx.fbox(dp, vr);
    let jsup = jac.iter().flatten().map(|p| ctx.sup(p, &bx)).fold(0.0, f64::max);
    let step = 2.0 * dp / per as f64;
    let slack_u = std::f64::consts::SQRT_2 * jsup * step;
    let rest = rest_indices(ctx.n, ctx.pair);
    let mut slack_v = 0.0;
    if opts.v_nodes > 1 {
        let h = 2.0 * vr / (opts.v_nodes - 1) as f64;
        for &k in &rest {
            let mut lk = 0.0f64;
            for p in psi {
                lk = lk.max(ctx.sup(&p.derive(k)?, &bx));
            }
            slack_v += 2.0 * std::f64::consts::SQRT_2 * lk * h / 2.0;
        }
    } else if !rest.is_empty() && vr > 0.0 {
        return Err(Error::Config("v_nodes must be at least 2".into()));
    }
    let m = best - slack_u - slack_v;
    if !(m > 0.0) {
        return Err(Error::Certification(format!(
            "uniform boundary minimum {best:e} does not exceed slack {:e}",
            slack_u + slack_v
        )));
    }
    Ok(m)
}

/// Largest power of one half such that `c + [-7 eta, 7 eta]^2` lies in
/// `Psi_v0(B2)`: boundary samples of the square are pulled back by Newton
/// and must land inside `B2` with room for the sampling gap.
#[allow(clippy::too_many_arguments)]
fn find_eta0(
    slice: &PhaseSlice,
    u0: Vec2,
    c: Vec2,
    dp: f64,
    d6: f64,
    m: f64,
    inv_lip: f64,
    opts: &LadderOptions,
) -> Result<f64> {
    let w = AxisBox::cube(&u0, dp);
    let per = opts.boundary_per_edge;
    let mut eta = 1.0f64;
    for _ in 0..200 {
        let side = 7.0 * eta;
        if 7.0 * std::f64::consts::SQRT_2 * eta < m / 4.0 {
            let margin = inv_lip * (2.0 * side / per as f64) / 2.0;
            let limit = d6 - margin;
            let mut ok = limit > 0.0;
            let mut prev = u0;
            'outer: for e in 0..4 {
                for i in 0..per {
                    if !ok {
                        break 'outer;
                    }
                    let t = -1.0 + 2.0 * i as f64 / per as f64;
                    let y = match e {
                        0 => [c[0] + side * t, c[1] - side],
                        1 => [c[0] + side, c[1] + side * t],
                        2 => [c[0] - side * t, c[1] + side],
                        _ => [c[0] - side, c[1] - side * t],
                    };
                    let pre = newton_psi(slice, y, prev, &w).or_else(|| newton_psi(slice, y, u0, &w));
                    match pre {
                        Some(p) if (p[0] - u0[0]).abs() <= limit && (p[1] - u0[1]).abs() <= limit => prev = p,
                        _ => ok = false,
                    }
                }
            }
            if ok {
                return Ok(eta);
            }
        }
        eta *= 0.5;
    }
    Err(Error::RadiusUnderflow("eta0 underflow".into()))
}
