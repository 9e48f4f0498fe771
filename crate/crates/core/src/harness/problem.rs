use serde::Serialize;

use super::config::{Delta0, ProblemConfig};
use crate::error::{Error, Result};
use crate::hypotheses::{
    build_weight, classify_case, find_good_pair, singular_dim_lower_bound, CaseLabel, CaseReport, Weight, DEFAULT_GRID,
};
use crate::oscquad::PhaseProblem;
use crate::polyring::{parse_poly, MultiPoly};
use crate::stphase::{branch_classify, build_ladder, Ladder, LadderOptions, PhaseSlice};

const DIM_SAMPLES: usize = 100;

/// A loaded config with its classification, ladder and weight.
#[derive(Clone, Debug)]
pub struct Problem {
    pub config: ProblemConfig,
    pub fingerprint: String,
    pub f: MultiPoly,
    /// 0-based.
    pub pair: (usize, usize),
    pub pair_from_search: bool,
    pub report: CaseReport,
    pub ladder: std::result::Result<Ladder, String>,
    pub weight: Weight,
    pub dim_warning: Option<String>,
    pub grid: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct ClassifySummary {
    pub fingerprint: String,
    pub polynomial: String,
    /// 1-based.
    pub pair: [usize; 2],
    pub pair_from_search: bool,
    pub report: CaseReport,
    pub dim_v_star: usize,
    pub dim_lower_bound: usize,
    pub dim_warning: Option<String>,
    pub ladder: Option<Ladder>,
    pub ladder_error: Option<String>,
    pub weight_delta0: f64,
}

impl Problem {
    pub fn from_config(config: ProblemConfig, seed: u64) -> Result<Self> {
        config.validate()?;
        let f = parse_poly(&config.polynomial, Some(config.n))?;
        let (pair, pair_from_search) = match config.pair {
            Some([i, j]) => ((i - 1, j - 1), false),
            None => match find_good_pair(&f)? {
                Some(p) => (p, true),
                None => return Err(Error::Certification("no pair satisfies the pair hypotheses".into())),
            },
        };
        let grid = config.grid.unwrap_or(DEFAULT_GRID);
        let report = classify_case(&f, pair.0, pair.1, &config.x0, config.delta, grid)?;
        let ladder = if report.case_label == CaseLabel::NotApplicable {
            Err(report.reason.clone().unwrap_or_else(|| "not applicable".into()))
        } else {
            let opts = LadderOptions {
                grid,
                ..LadderOptions::default()
            };
            build_ladder(&f, &report, &opts).map_err(|e| e.to_string())
        };
        let delta0 = match config.weight.delta0 {
            Delta0::Fixed(d) => d,
            Delta0::Certified => match &ladder {
                Ok(l) => l.delta0,
                Err(e) => return Err(Error::Certification(format!("no certified delta0: {e}"))),
            },
        };
        let weight = build_weight(&config.x0, delta0, config.weight.r.clone())?;
        let lower = singular_dim_lower_bound(&f, DIM_SAMPLES, seed);
        let dim_warning = (lower > config.dim_v_star).then(|| {
            format!(
                "declared dim_v_star {} is below the sampled lower bound {lower}",
                config.dim_v_star
            )
        });
        if let Some(w) = &dim_warning {
            log::warn!("{w}");
        }
        Ok(Problem {
            fingerprint: config.fingerprint(),
            config,
            f,
            pair,
            pair_from_search,
            report,
            ladder,
            weight,
            dim_warning,
            grid,
        })
    }

    pub fn n(&self) -> usize {
        self.f.nvars()
    }

    pub fn summary(&self, seed: u64) -> ClassifySummary {
        ClassifySummary {
            fingerprint: self.fingerprint.clone(),
            polynomial: self.config.polynomial.clone(),
            pair: [self.pair.0 + 1, self.pair.1 + 1],
            pair_from_search: self.pair_from_search,
            report: self.report.clone(),
            dim_v_star: self.config.dim_v_star,
            dim_lower_bound: singular_dim_lower_bound(&self.f, DIM_SAMPLES, seed),
            dim_warning: self.dim_warning.clone(),
            ladder: self.ladder.as_ref().ok().cloned(),
            ladder_error: self.ladder.as_ref().err().cloned(),
            weight_delta0: self.weight.delta0,
        }
    }

    /// Coordinates outside the pair, in index order.
    pub fn rest(&self) -> Vec<usize> {
        (0..self.n()).filter(|&k| k != self.pair.0 && k != self.pair.1).collect()
    }

    /// Full `t` from the pair values and the configured remainder.
    pub fn full_t(&self, t_pair: [f64; 2]) -> Vec<f64> {
        let mut t = vec![0.0; self.n()];
        t[self.pair.0] = t_pair[0];
        t[self.pair.1] = t_pair[1];
        if let Some(fixed) = &self.config.t_fixed {
            for (k, v) in self.rest().into_iter().zip(fixed) {
                t[k] = *v;
            }
        }
        t
    }

    pub fn phase_problem(&self, tau: f64, t: Vec<f64>, tol: f64) -> PhaseProblem {
        PhaseProblem {
            f: self.f.clone(),
            weight: self.weight.clone(),
            t,
            tau,
            pair: self.pair,
            outer_nodes: self.config.outer_nodes,
            tol,
        }
    }

    /// Diagnostic label of the cell from the reference slice `v0`.
    pub fn branch_label(&self, tau: f64, t_pair: [f64; 2]) -> &'static str {
        if tau == 0.0 {
            return "trivial";
        }
        let Ok(l) = &self.ladder else {
            return "unclassified";
        };
        match PhaseSlice::from_t(&self.f, self.pair, &l.v0, t_pair, tau) {
            Ok(s) => branch_classify(l, &s).label(),
            Err(_) => "unclassified",
        }
    }
}
