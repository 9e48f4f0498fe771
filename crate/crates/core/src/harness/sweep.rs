use std::collections::BTreeMap;
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::problem::Problem;
use crate::error::{Error, Result};
use crate::oscquad::integrate_phase;
use crate::stphase::Ladder;

pub const THREADS_ENV: &str = "OSCBOUND_THREADS";

/// `a:b:logN`, `a:b:linN` or a comma list.
pub fn parse_tau_spec(s: &str) -> Result<Vec<f64>> {
    let bad = || Error::Config(format!("bad tau grid {s:?}; use a:b:logN, a:b:linN or a comma list"));
    let num = |x: &str| x.trim().parse::<f64>().map_err(|_| bad());
    let parts: Vec<&str> = s.split(':').collect();
    let grid = match parts.as_slice() {
        [a, b, kind] => {
            let (a, b) = (num(a)?, num(b)?);
            let (log, count) = if let Some(c) = kind.strip_prefix("log") {
                (true, c)
            } else if let Some(c) = kind.strip_prefix("lin") {
                (false, c)
            } else {
                return Err(bad());
            };
            let count: usize = count.parse().map_err(|_| bad())?;
            if count == 0 || (log && !(a > 0.0 && b > 0.0)) {
                return Err(bad());
            }
            if count == 1 {
                vec![a]
            } else if log {
                let (la, lb) = (a.log10(), b.log10());
                (0..count)
                    .map(|k| 10f64.powf(la + (lb - la) * k as f64 / (count - 1) as f64))
                    .collect()
            } else {
                (0..count).map(|k| a + (b - a) * k as f64 / (count - 1) as f64).collect()
            }
        }
        [one] => one.split(',').map(num).collect::<Result<Vec<f64>>>()?,
        _ => return Err(bad()),
    };
    if grid.is_empty() || grid.iter().any(|v| !v.is_finite()) {
        return Err(bad());
    }
    Ok(grid)
}

/// `points` equispaced values on `±mult·max(1, |tau|)`.
pub fn t_axis(tau: f64, mult: f64, points: usize) -> Vec<f64> {
    let tmax = mult * tau.abs().max(1.0);
    if points == 1 {
        return vec![0.0];
    }
    (0..points)
        .map(|k| -tmax + 2.0 * tmax * k as f64 / (points - 1) as f64)
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub taus: Vec<f64>,
    pub tmax_mult: f64,
    /// Per pair coordinate; the t grid has `t_points^2` cells per tau.
    pub t_points: usize,
    pub tol: f64,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.taus.is_empty() || self.taus.iter().any(|v| !v.is_finite()) {
            return Err(Error::Config("tau grid must be nonempty and finite".into()));
        }
        if self.t_points == 0 || !(self.tmax_mult >= 0.0) || !(self.tol > 0.0) {
            return Err(Error::Config("need t_points >= 1, tmax_mult >= 0, tol > 0".into()));
        }
        Ok(())
    }

    /// Both grids refined 2x so that the old nodes stay: geometric midpoints
    /// in tau and `2p - 1` points per t axis.
    pub fn refined(&self) -> SweepSpec {
        let mut taus = Vec::with_capacity(2 * self.taus.len());
        for w in self.taus.windows(2) {
            taus.push(w[0]);
            let mid = if w[0] > 0.0 && w[1] > 0.0 {
                (w[0] * w[1]).sqrt()
            } else {
                0.5 * (w[0] + w[1])
            };
            taus.push(mid);
        }
        taus.extend(self.taus.last());
        SweepSpec {
            taus,
            tmax_mult: self.tmax_mult,
            t_points: 2 * self.t_points - 1,
            tol: self.tol,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub tau: f64,
    pub t: Vec<f64>,
    pub re: Option<f64>,
    pub im: Option<f64>,
    pub abs: Option<f64>,
    pub abs_error_estimate: Option<f64>,
    /// `|I| max(1, |tau|)`.
    pub ratio: Option<f64>,
    pub evaluations: usize,
    pub branch: String,
    /// Quadrature failure message.
    pub flag: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepStats {
    pub cells: usize,
    pub flagged: usize,
    pub evaluations: usize,
    pub max_abs_error_estimate: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub fingerprint: String,
    pub name: Option<String>,
    pub polynomial: String,
    /// 1-based.
    pub pair: [usize; 2],
    pub case: String,
    pub weight_delta0: f64,
    pub spec: SweepSpec,
    pub tau_grid: Vec<f64>,
    /// Pair-coordinate t axis for each tau.
    pub t_grid: Vec<Vec<f64>>,
    pub cells: Vec<Cell>,
    pub c_hat: Option<f64>,
    pub branch_tally: BTreeMap<String, usize>,
    pub stats: SweepStats,
    pub ladder: Option<Ladder>,
}

impl SweepReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Config(e.to_string()))
    }

    /// Columns `tau, t1..tn, re, im, abs, ratio, branch`; flagged cells
    /// leave the numeric columns empty.
    pub fn to_csv(&self) -> String {
        let n = self.cells.first().map_or(0, |c| c.t.len());
        let mut out = String::from("tau");
        for k in 1..=n {
            let _ = write!(out, ",t{k}");
        }
        out.push_str(",re,im,abs,ratio,branch\n");
        let opt = |v: Option<f64>| v.map(|x| format!("{x:e}")).unwrap_or_default();
        for c in &self.cells {
            let _ = write!(out, "{:e}", c.tau);
            for t in &c.t {
                let _ = write!(out, ",{t:e}");
            }
            let _ = writeln!(
                out,
                ",{},{},{},{},{}",
                opt(c.re),
                opt(c.im),
                opt(c.abs),
                opt(c.ratio),
                c.branch
            );
        }
        out
    }

    pub fn flagged(&self) -> usize {
        self.stats.flagged
    }
}

/// Worker pool sized by `OSCBOUND_THREADS` when set; results do not depend
/// on it.
pub fn thread_pool() -> Result<rayon::ThreadPool> {
    let threads = match std::env::var(THREADS_ENV) {
        Ok(v) => Some(
            v.parse::<usize>()
                .ok()
                .filter(|&n| n > 0)
                .ok_or_else(|| Error::Config(format!("{THREADS_ENV} must be a positive integer, got {v:?}")))?,
        ),
        Err(_) => None,
    };
    pool_with(threads)
}

fn pool_with(threads: Option<usize>) -> Result<rayon::ThreadPool> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        b = b.num_threads(n);
    }
    b.build().map_err(|e| Error::Config(e.to_string()))
}

fn run_cell(p: &Problem, tau: f64, t_pair: [f64; 2], tol: f64) -> Cell {
    let t = p.full_t(t_pair);
    let branch = p.branch_label(tau, t_pair).to_string();
    match integrate_phase(&p.phase_problem(tau, t.clone(), tol)) {
        Ok(r) => {
            let abs = r.value.norm();
            Cell {
                tau,
                t,
                re: Some(r.value.re),
                im: Some(r.value.im),
                abs: Some(abs),
                abs_error_estimate: Some(r.abs_error_estimate),
                ratio: Some(abs * tau.abs().max(1.0)),
                evaluations: r.evaluations,
                branch,
                flag: None,
            }
        }
        Err(e) => Cell {
            tau,
            t,
            re: None,
            im: None,
            abs: None,
            abs_error_estimate: None,
            ratio: None,
            evaluations: 0,
            branch,
            flag: Some(e.to_string()),
        },
    }
}

/// Integrates every `(tau, t)` cell; quadrature failures flag the cell.
pub fn sweep(p: &Problem, spec: &SweepSpec) -> Result<SweepReport> {
    run_sweep(p, spec, thread_pool()?)
}

/// [`sweep`] on a pool of the given size instead of the environment's.
pub fn sweep_with_threads(p: &Problem, spec: &SweepSpec, threads: usize) -> Result<SweepReport> {
    run_sweep(p, spec, pool_with(Some(threads.max(1)))?)
}

fn run_sweep(p: &Problem, spec: &SweepSpec, pool: rayon::ThreadPool) -> Result<SweepReport> {
    spec.validate()?;
    let axes: Vec<Vec<f64>> = spec.taus.iter().map(|&tau| t_axis(tau, spec.tmax_mult, spec.t_points)).collect();
    let mut jobs = Vec::new();
    for (k, &tau) in spec.taus.iter().enumerate() {
        for &t1 in &axes[k] {
            for &t2 in &axes[k] {
                jobs.push((tau, [t1, t2]));
            }
        }
    }
    let cells: Vec<Cell> = pool.install(|| {
        jobs.par_iter()
            .map(|&(tau, tp)| run_cell(p, tau, tp, spec.tol))
            .collect()
    });
    let mut tally = BTreeMap::new();
    let mut c_hat: Option<f64> = None;
    let mut stats = SweepStats {
        cells: cells.len(),
        flagged: 0,
        evaluations: 0,
        max_abs_error_estimate: 0.0,
    };
    for c in &cells {
        *tally.entry(c.branch.clone()).or_insert(0) += 1;
        stats.evaluations += c.evaluations;
        if c.flag.is_some() {
            stats.flagged += 1;
        }
        if let Some(r) = c.ratio {
            c_hat = Some(c_hat.map_or(r, |m| m.max(r)));
        }
        if let Some(e) = c.abs_error_estimate {
            stats.max_abs_error_estimate = stats.max_abs_error_estimate.max(e);
        }
    }
    Ok(SweepReport {
        fingerprint: p.fingerprint.clone(),
        name: p.config.name.clone(),
        polynomial: p.config.polynomial.clone(),
        pair: [p.pair.0 + 1, p.pair.1 + 1],
        case: format!("{:?}", p.report.case_label),
        weight_delta0: p.weight.delta0,
        spec: spec.clone(),
        tau_grid: spec.taus.clone(),
        t_grid: axes,
        cells,
        c_hat,
        branch_tally: tally,
        stats,
        ladder: p.ladder.as_ref().ok().cloned(),
    })
}
