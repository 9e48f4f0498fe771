use rayon::prelude::*;

use super::adaptive::{adaptive, integrate_1d, kronrod_nodes, presplit, PanelSampler, QuadResult, C64};
use crate::error::{Error, Result};
use crate::hypotheses::Weight;
use crate::polyring::{rat_to_f64, EvalPoly, Monomial, MultiPoly};

const TWO_PI: f64 = 2.0 * std::f64::consts::PI;
const MAX_OUTER_POINTS: usize = 1_000_000;

/// `I(tau, t) = ∫ w(x) x^{it} e^{2 pi i tau F(x)} dx` over the weight support.
#[derive(Clone, Debug, PartialEq)]
pub struct PhaseProblem {
    pub f: MultiPoly,
    pub weight: Weight,
    pub t: Vec<f64>,
    pub tau: f64,
    /// Preferred inner pair for the nested path (0-based).
    pub pair: (usize, usize),
    /// Minimum trapezoid nodes per outer axis; raised when the phase
    /// oscillates faster.
    pub outer_nodes: usize,
    pub tol: f64,
}

impl PhaseProblem {
    pub fn validate(&self) -> Result<()> {
        let n = self.f.nvars();
        if n < 2 {
            return Err(Error::Domain("need at least two variables".into()));
        }
        if self.weight.dim() != n || self.t.len() != n {
            return Err(Error::NvarsMismatch {
                left: self.t.len().max(self.weight.dim()),
                right: n,
            });
        }
        if !self.weight.support().positive_unit() {
            return Err(Error::Domain("weight support leaves (0,1)^n".into()));
        }
        if !self.tau.is_finite() || self.t.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("tau and t must be finite".into()));
        }
        if self.pair.0 == self.pair.1 || self.pair.0 >= n || self.pair.1 >= n {
            return Err(Error::SameIndex(self.pair.0));
        }
        if !(self.tol > 0.0) {
            return Err(Error::Domain("tolerance must be positive".into()));
        }
        Ok(())
    }
}

/// Variable groups that never share a monomial, so the integral factors.
pub fn variable_components(f: &MultiPoly) -> Vec<Vec<usize>> {
    let n = f.nvars();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut Vec<usize>, x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        let mut y = x;
        while p[y] != r {
            let nx = p[y];
            p[y] = r;
            y = nx;
        }
        r
    }
    for (m, _) in f.terms() {
        let vars: Vec<usize> = (0..n).filter(|&k| m.exps()[k] > 0).collect();
        for w in vars.windows(2) {
            let (a, b) = (find(&mut parent, w[0]), find(&mut parent, w[1]));
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    let roots: Vec<usize> = (0..n).map(|k| find(&mut parent, k)).collect();
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut slot = vec![usize::MAX; n];
    for k in 0..n {
        let r = roots[k];
        if slot[r] == usize::MAX {
            slot[r] = groups.len();
            groups.push(Vec::new());
        }
        groups[slot[r]].push(k);
    }
    groups
}

/// Integrand pieces for one variable group.
struct Group<'a> {
    p: &'a PhaseProblem,
    vars: Vec<usize>,
    f: EvalPoly,
    df: Vec<EvalPoly>,
    lo: Vec<f64>,
    hi: Vec<f64>,
}

impl<'a> Group<'a> {
    fn new(p: &'a PhaseProblem, vars: Vec<usize>, f: &MultiPoly) -> Self {
        let fe = EvalPoly::new(f);
        let df = (0..f.nvars()).map(|k| fe.derive(k)).collect();
        let sup = p.weight.support();
        Group {
            p,
            vars,
            f: fe,
            df,
            lo: sup.lo(),
            hi: sup.hi(),
        }
    }

    /// Integrand at `x`; only the group's coordinates are read.
    fn value(&self, x: &[f64]) -> C64 {
        let mut w = 1.0;
        let mut theta = TWO_PI * self.p.tau * self.f.eval(x);
        for &k in &self.vars {
            w *= self.p.weight.factor(k, x[k]).0;
            if w == 0.0 {
                return C64::new(0.0, 0.0);
            }
            theta += self.p.t[k] * x[k].ln();
        }
        C64::from_polar(w, theta)
    }

    /// Bound on `|d theta / d x_k|` when `x_k` ranges over `[a, b]` and the
    /// other group coordinates over `lo..hi`.
    fn omega(&self, k: usize, a: f64, b: f64, lo: &[f64], hi: &[f64]) -> f64 {
        let mut l = lo.to_vec();
        let mut h = hi.to_vec();
        l[k] = a;
        h[k] = b;
        self.p.t[k].abs() / a + TWO_PI * self.p.tau.abs() * self.df[k].abs_bound(&l, &h)
    }

    fn integrate(&self, tol: f64) -> Result<QuadResult> {
        match self.vars.len() {
            1 => self.integrate_1(tol),
            2 => {
                let x = self.p.weight.center.clone();
                self.integrate_2(self.vars[0], self.vars[1], &x, tol)
            }
            _ => self.integrate_outer(tol),
        }
    }

    fn integrate_1(&self, tol: f64) -> Result<QuadResult> {
        let k = self.vars[0];
        let x0 = self.p.weight.center.clone();
        let (lo, hi) = (self.lo.clone(), self.hi.clone());
        let om = |a: f64, b: f64| self.omega(k, a, b, &lo, &hi);
        let breaks = presplit(self.lo[k], self.hi[k], &om)?;
        let s = |y: f64| {
            let mut x = x0.clone();
            x[k] = y;
            (self.value(&x), 0.0)
        };
        adaptive(&s, &breaks, tol)
    }

    /// Iterated integral over `x_p` (inner) and `x_q` (outer) with the
    /// remaining coordinates taken from `base`.
    fn integrate_2(&self, p: usize, q: usize, base: &[f64], tol: f64) -> Result<QuadResult> {
        let width_q = self.hi[q] - self.lo[q];
        let inner_tol = 0.1 * tol / width_q;
        let mut lo = base.to_vec();
        let mut hi = base.to_vec();
        lo[p] = self.lo[p];
        hi[p] = self.hi[p];
        lo[q] = self.lo[q];
        hi[q] = self.hi[q];
        let om_q = |a: f64, b: f64| self.omega(q, a, b, &lo, &hi);
        let breaks = presplit(self.lo[q], self.hi[q], &om_q)?;
        let outer = Outer {
            g: self,
            p,
            q,
            base,
            tol: inner_tol,
        };
        outer_error();
        let r = adaptive(&outer, &breaks, 0.9 * tol);
        match outer_error() {
            Some(e) => Err(e),
            None => r,
        }
    }

    /// Trapezoid over the coordinates beyond the inner pair, each node an
    /// iterated 2D integral. The error estimate compares with the half grid.
    fn integrate_outer(&self, tol: f64) -> Result<QuadResult> {
        let (p, q) = if self.vars.contains(&self.p.pair.0) && self.vars.contains(&self.p.pair.1) {
            self.p.pair
        } else {
            (self.vars[0], self.vars[1])
        };
        let rest: Vec<usize> = self.vars.iter().copied().filter(|&k| k != p && k != q).collect();
        let quarter = std::f64::consts::FRAC_PI_2;
        let axes: Vec<Vec<f64>> = rest
            .iter()
            .map(|&k| {
                let w = self.hi[k] - self.lo[k];
                let om = self.omega(k, self.lo[k], self.hi[k], &self.lo, &self.hi);
                let need = (w * om / quarter).ceil() as usize + 1;
                let mut m = need.max(self.p.outer_nodes).max(3);
                if m % 2 == 0 {
                    m += 1;
                }
                (0..m)
                    .map(|i| self.lo[k] + w * i as f64 / (m - 1) as f64)
                    .collect()
            })
            .collect();
        let counts: Vec<usize> = axes.iter().map(Vec::len).collect();
        let total: usize = counts.iter().product();
        if total > MAX_OUTER_POINTS {
            return Err(Error::Quadrature(format!("outer grid of {total} points is too large")));
        }
        let vol: f64 = rest.iter().map(|&k| self.hi[k] - self.lo[k]).product();
        let inner_tol = 0.5 * tol / vol;
        let nodes: Vec<Result<(Vec<usize>, QuadResult)>> = (0..total)
            .into_par_iter()
            .map(|mut idx| {
                let mut ii = vec![0usize; rest.len()];
                let mut x = self.p.weight.center.clone();
                for a in (0..rest.len()).rev() {
                    ii[a] = idx % counts[a];
                    idx /= counts[a];
                    x[rest[a]] = axes[a][ii[a]];
                }
                let on_edge = ii.iter().zip(&counts).any(|(&i, &c)| i == 0 || i == c - 1);
                if on_edge {
                    // the bump vanishes on the support boundary
                    return Ok((ii, QuadResult::zero()));
                }
                self.integrate_2(p, q, &x, inner_tol).map(|r| (ii, r))
            })
            .collect();
        let mut full = C64::new(0.0, 0.0);
        let mut half = C64::new(0.0, 0.0);
        let mut inner_err = 0.0;
        let mut evals = 0;
        let h: Vec<f64> = axes.iter().map(|a| a[1] - a[0]).collect();
        let cell: f64 = h.iter().product();
        let half_cell = cell * (1u64 << rest.len()) as f64;
        for r in nodes {
            let (ii, q) = r?;
            full += q.value * cell;
            inner_err += q.abs_error_estimate * cell;
            evals += q.evaluations;
            if ii.iter().all(|i| i % 2 == 0) {
                half += q.value * half_cell;
            }
        }
        Ok(QuadResult {
            value: full,
            abs_error_estimate: (full - half).norm() + inner_err,
            evaluations: evals,
        })
    }
}

thread_local! {
    static OUTER_ERR: std::cell::RefCell<Option<Error>> = const { std::cell::RefCell::new(None) };
}

fn outer_error() -> Option<Error> {
    OUTER_ERR.with(|e| e.borrow_mut().take())
}

struct Outer<'a, 'b> {
    g: &'b Group<'a>,
    p: usize,
    q: usize,
    base: &'b [f64],
    tol: f64,
}

impl PanelSampler for Outer<'_, '_> {
    fn sample(&self, a: f64, b: f64) -> [(C64, f64); 15] {
        let xs = kronrod_nodes(a, b);
        let res: Vec<Result<QuadResult>> = xs
            .par_iter()
            .map(|&y| {
                let mut x = self.base.to_vec();
                x[self.q] = y;
                let mut lo = x.clone();
                let mut hi = x.clone();
                lo[self.p] = self.g.lo[self.p];
                hi[self.p] = self.g.hi[self.p];
                let om = |a: f64, b: f64| self.g.omega(self.p, a, b, &lo, &hi);
                let breaks = presplit(self.g.lo[self.p], self.g.hi[self.p], &om)?;
                let p = self.p;
                let s = |z: f64| {
                    let mut xx = x.clone();
                    xx[p] = z;
                    (self.g.value(&xx), 0.0)
                };
                adaptive(&s, &breaks, self.tol)
            })
            .collect();
        let mut out = [(C64::new(0.0, 0.0), 0.0); 15];
        for (i, r) in res.into_iter().enumerate() {
            match r {
                Ok(q) => out[i] = (q.value, q.abs_error_estimate),
                Err(e) => {
                    OUTER_ERR.with(|c| *c.borrow_mut() = Some(e));
                    out[i] = (C64::new(f64::NAN, f64::NAN), f64::INFINITY);
                }
            }
        }
        out
    }
}

fn split_by_group(f: &MultiPoly, groups: &[Vec<usize>]) -> (Vec<MultiPoly>, f64) {
    let n = f.nvars();
    let mut parts: Vec<Vec<(Vec<u32>, num_rational::BigRational)>> = vec![Vec::new(); groups.len()];
    let mut constant = 0.0;
    for (m, c) in f.terms() {
        let Monomial(e) = m;
        match (0..n).find(|&k| e[k] > 0) {
            None => constant += rat_to_f64(c),
            Some(k) => {
                let g = groups.iter().position(|g| g.contains(&k)).expect("covered");
                parts[g].push((e.clone(), c.clone()));
            }
        }
    }
    let polys = parts
        .into_iter()
        .map(|t| MultiPoly::from_terms(n, t).expect("same nvars"))
        .collect();
    (polys, constant)
}

/// Factorized when `F` splits into variable groups; each group of one or two
/// variables is integrated adaptively, larger groups use the outer
/// trapezoid grid.
pub fn integrate_phase(p: &PhaseProblem) -> Result<QuadResult> {
    integrate_phase_with(p, true)
}

/// `factorize = false` treats all variables as one group.
pub fn integrate_phase_with(p: &PhaseProblem, factorize: bool) -> Result<QuadResult> {
    p.validate()?;
    let n = p.f.nvars();
    let groups = if factorize {
        variable_components(&p.f)
    } else {
        vec![(0..n).collect()]
    };
    let (polys, constant) = split_by_group(&p.f, &groups);
    let share = p.tol / groups.len() as f64;
    let mut out = QuadResult {
        value: C64::from_polar(1.0, TWO_PI * p.tau * constant),
        abs_error_estimate: 0.0,
        evaluations: 0,
    };
    for (vars, poly) in groups.into_iter().zip(&polys) {
        let g = Group::new(p, vars, poly);
        let r = g.integrate(share)?;
        out = out.mul(&r);
    }
    Ok(out)
}

/// `∫ w`, the trivial bound for `|I|`.
pub fn weight_integral(w: &Weight, tol: f64) -> Result<f64> {
    let sup = w.support();
    let (lo, hi) = (sup.lo(), sup.hi());
    let mut v = 1.0;
    for k in 0..w.dim() {
        let r = integrate_1d(|x| C64::new(w.factor(k, x).0, 0.0), lo[k], hi[k], tol)?;
        v *= r.value.re;
    }
    Ok(v)
}
