use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::polyring::EvalPoly;

pub const DEFAULT_GRID: usize = 33;

/// Axis-aligned box `center ± radius`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AxisBox {
    pub center: Vec<f64>,
    pub radius: Vec<f64>,
}

impl AxisBox {
    pub fn new(center: Vec<f64>, radius: Vec<f64>) -> Self {
        assert_eq!(center.len(), radius.len());
        AxisBox { center, radius }
    }

    pub fn cube(center: &[f64], r: f64) -> Self {
        AxisBox {
            center: center.to_vec(),
            radius: vec![r; center.len()],
        }
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    pub fn lo(&self) -> Vec<f64> {
        self.center.iter().zip(&self.radius).map(|(c, r)| c - r).collect()
    }

    pub fn hi(&self) -> Vec<f64> {
        self.center.iter().zip(&self.radius).map(|(c, r)| c + r).collect()
    }

    /// Closed-box membership.
    pub fn contains(&self, x: &[f64]) -> bool {
        x.iter()
            .zip(self.center.iter().zip(&self.radius))
            .all(|(xi, (c, r))| (xi - c).abs() <= *r)
    }

    pub fn contains_box(&self, other: &AxisBox) -> bool {
        self.lo().iter().zip(other.lo()).all(|(a, b)| *a <= b)
            && self.hi().iter().zip(other.hi()).all(|(a, b)| *a >= b)
    }

    /// Closure lies in the open unit cube.
    pub fn positive_unit(&self) -> bool {
        self.lo().iter().all(|&a| a > 0.0) && self.hi().iter().all(|&b| b < 1.0)
    }

    pub fn rho_min(&self) -> f64 {
        self.lo().into_iter().fold(f64::INFINITY, f64::min)
    }

    pub fn rho_max(&self) -> f64 {
        self.hi().into_iter().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Concentric box with radii scaled by `factor`.
    pub fn scaled(&self, factor: f64) -> AxisBox {
        AxisBox {
            center: self.center.clone(),
            radius: self.radius.iter().map(|r| r * factor).collect(),
        }
    }

    /// Coordinates picked out by `idx`, e.g. the (u1, u2) face.
    pub fn project(&self, idx: &[usize]) -> AxisBox {
        AxisBox {
            center: idx.iter().map(|&k| self.center[k]).collect(),
            radius: idx.iter().map(|&k| self.radius[k]).collect(),
        }
    }

    pub fn product(&self, other: &AxisBox) -> AxisBox {
        let mut center = self.center.clone();
        center.extend_from_slice(&other.center);
        let mut radius = self.radius.clone();
        radius.extend_from_slice(&other.radius);
        AxisBox { center, radius }
    }

    /// Uniform grid coordinates on axis `k` with `g` nodes (one node for a
    /// degenerate axis).
    pub fn axis_nodes(&self, k: usize, g: usize) -> Vec<f64> {
        let (c, r) = (self.center[k], self.radius[k]);
        if r == 0.0 || g < 2 {
            return vec![c];
        }
        (0..g)
            .map(|i| c - r + 2.0 * r * i as f64 / (g - 1) as f64)
            .collect()
    }
}

/// Certified range of a function on a box: sampled extremes widened by a
/// Lipschitz pad.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Enclosure {
    pub lo: f64,
    pub hi: f64,
    pub sampled_min: f64,
    pub sampled_max: f64,
    pub pad: f64,
}

impl Enclosure {
    /// `(sign, m)` with `sign * f > m > 0` on the box, if certified.
    pub fn sign_certificate(&self) -> Option<(i8, f64)> {
        if self.lo > 0.0 {
            Some((1, self.lo))
        } else if self.hi < 0.0 {
            Some((-1, -self.hi))
        } else {
            None
        }
    }

    /// Certified upper bound on `|f|`.
    pub fn abs_sup(&self) -> f64 {
        self.lo.abs().max(self.hi.abs())
    }
}

/// Evaluates `f` on a `g`-per-axis grid and pads by `sum_k L_k h_k / 2`,
/// where `lipschitz[k]` bounds `|df/dx_k|` on the box.
pub fn enclose_fn<F>(f: F, bx: &AxisBox, g: usize, lipschitz: &[f64]) -> Enclosure
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let n = bx.dim();
    assert!(n <= 16, "grid enclosures support at most 16 dimensions");
    let nodes: Vec<Vec<f64>> = (0..n).map(|k| bx.axis_nodes(k, g)).collect();
    let counts: Vec<usize> = nodes.iter().map(Vec::len).collect();
    let total: usize = counts.iter().product();
    let (mn, mx) = (0..total)
        .into_par_iter()
        .with_min_len(256)
        .fold(
            || (f64::INFINITY, f64::NEG_INFINITY),
            |(mn, mx), mut idx| {
                let mut x = [0.0f64; 16];
                let x = &mut x[..n];
                for k in (0..n).rev() {
                    x[k] = nodes[k][idx % counts[k]];
                    idx /= counts[k];
                }
                let v = f(x);
                if v.is_nan() {
                    (f64::NEG_INFINITY, f64::INFINITY)
                } else {
                    (mn.min(v), mx.max(v))
                }
            },
        )
        .reduce(
            || (f64::INFINITY, f64::NEG_INFINITY),
            |a, b| (a.0.min(b.0), a.1.max(b.1)),
        );
    let pad: f64 = (0..n)
        .map(|k| {
            if counts[k] < 2 {
                0.0
            } else {
                let h = 2.0 * bx.radius[k] / (counts[k] - 1) as f64;
                lipschitz[k] * h / 2.0
            }
        })
        .sum();
    // small relative widening covers rounding in the samples
    let fuzz = 1e-12 * mn.abs().max(mx.abs());
    Enclosure {
        lo: mn - pad - fuzz,
        hi: mx + pad + fuzz,
        sampled_min: mn,
        sampled_max: mx,
        pad,
    }
}

pub fn enclose_poly(p: &EvalPoly, bx: &AxisBox, g: usize) -> Enclosure {
    let lip = p.grad_abs_bounds(&bx.lo(), &bx.hi());
    enclose_fn(|x| p.eval(x), bx, g, &lip)
}
