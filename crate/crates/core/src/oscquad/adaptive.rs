use std::cmp::Ordering;
use std::collections::BinaryHeap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub const MAX_DEPTH: u32 = 60;
const MAX_EVALUATIONS: usize = 200_000_000;
const MAX_PRESPLIT: usize = 2_000_000;
const ROUNDOFF: f64 = 50.0 * f64::EPSILON;

// 15-point Kronrod extension of the 7-point Gauss rule (QUADPACK qk15).
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadResult {
    pub value: C64,
    pub abs_error_estimate: f64,
    pub evaluations: usize,
}

impl QuadResult {
    pub fn zero() -> Self {
        QuadResult {
            value: C64::new(0.0, 0.0),
            abs_error_estimate: 0.0,
            evaluations: 0,
        }
    }

    /// Product with first-order error propagation.
    pub fn mul(&self, o: &QuadResult) -> QuadResult {
        QuadResult {
            value: self.value * o.value,
            abs_error_estimate: self.abs_error_estimate * o.value.norm()
                + o.abs_error_estimate * self.value.norm()
                + self.abs_error_estimate * o.abs_error_estimate,
            evaluations: self.evaluations + o.evaluations,
        }
    }
}

/// The 15 Kronrod nodes mapped to `[a, b]`, in increasing order.
pub fn kronrod_nodes(a: f64, b: f64) -> [f64; 15] {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut x = [0.0; 15];
    for k in 0..7 {
        x[k] = c - h * XGK[k];
        x[14 - k] = c + h * XGK[k];
    }
    x[7] = c;
    x
}

/// Kronrod and Gauss weights for the nodes of [`kronrod_nodes`], scaled to
/// an interval of half-width `h`.
fn weights(h: f64) -> ([f64; 15], [f64; 15]) {
    let mut wk = [0.0; 15];
    let mut wg = [0.0; 15];
    for k in 0..7 {
        wk[k] = h * WGK[k];
        wk[14 - k] = h * WGK[k];
        if k % 2 == 1 {
            wg[k] = h * WG[k / 2];
            wg[14 - k] = h * WG[k / 2];
        }
    }
    wk[7] = h * WGK[7];
    wg[7] = h * WG[3];
    (wk, wg)
}

/// One panel from precomputed samples `(value, error)` at the Kronrod
/// nodes: Kronrod value and `|K - G|` plus the weighted sample errors.
pub fn gk15_from_samples(a: f64, b: f64, s: &[(C64, f64); 15]) -> (C64, f64) {
    let r = gk15(a, b, s);
    (r.value, r.diff + r.inner)
}

struct Rule {
    value: C64,
    diff: f64,
    inner: f64,
    /// `sum |w_k f|`, the scale of rounding in `diff`.
    resabs: f64,
}

fn gk15(a: f64, b: f64, s: &[(C64, f64); 15]) -> Rule {
    let (wk, wg) = weights(0.5 * (b - a));
    let mut k = C64::new(0.0, 0.0);
    let mut g = C64::new(0.0, 0.0);
    let mut inner = 0.0;
    let mut resabs = 0.0;
    for i in 0..15 {
        k += s[i].0 * wk[i];
        g += s[i].0 * wg[i];
        inner += wk[i].abs() * s[i].1;
        resabs += wk[i].abs() * s[i].0.norm();
    }
    Rule {
        value: k,
        diff: (k - g).norm(),
        inner,
        resabs,
    }
}

struct Panel {
    a: f64,
    b: f64,
    value: C64,
    err: f64,
    /// Estimate is at the rounding floor; bisection cannot reduce it.
    noise_bound: bool,
    depth: u32,
    seq: usize,
}

impl PartialEq for Panel {
    fn eq(&self, o: &Self) -> bool {
        self.cmp(o) == Ordering::Equal
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Panel {
    fn cmp(&self, o: &Self) -> Ordering {
        // largest error first; earlier panels win ties
        self.err.total_cmp(&o.err).then(o.seq.cmp(&self.seq))
    }
}

/// Evaluates every panel's 15 samples at once; lets callers parallelize.
pub trait PanelSampler {
    fn sample(&self, a: f64, b: f64) -> [(C64, f64); 15];
}

impl<F: Fn(f64) -> (C64, f64)> PanelSampler for F {
    fn sample(&self, a: f64, b: f64) -> [(C64, f64); 15] {
        kronrod_nodes(a, b).map(|x| self(x))
    }
}

/// Global adaptive bisection over the given initial panels until the summed
/// error estimates drop below `tol`.
pub fn adaptive<S: PanelSampler + ?Sized>(sampler: &S, breaks: &[f64], tol: f64) -> Result<QuadResult> {
    if !(tol > 0.0) {
        return Err(Error::Domain(format!("tolerance must be positive, got {tol}")));
    }
    if breaks.len() < 2 || breaks.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::Domain("integration limits must increase".into()));
    }
    let mut heap = BinaryHeap::new();
    let mut seq = 0usize;
    let mut evals = 0usize;
    let mut total = 0.0f64;
    let make = |a: f64, b: f64, depth: u32, seq: &mut usize, evals: &mut usize| {
        let s = sampler.sample(a, b);
        *evals += 15;
        let r = gk15(a, b, &s);
        let err = r.diff + r.inner;
        *seq += 1;
        Panel {
            a,
            b,
            value: r.value,
            err: if err.is_nan() { f64::INFINITY } else { err },
            noise_bound: r.diff <= ROUNDOFF * r.resabs,
            depth,
            seq: *seq,
        }
    };
    for w in breaks.windows(2) {
        let p = make(w[0], w[1], 0, &mut seq, &mut evals);
        total += p.err;
        heap.push(p);
    }
    let mut iter = 0usize;
    while total > tol {
        let worst = heap.pop().expect("nonempty");
        if worst.depth >= MAX_DEPTH || !worst.err.is_finite() {
            return Err(Error::Quadrature(format!(
                "subdivision limit reached on [{}, {}] with error {:e}",
                worst.a, worst.b, worst.err
            )));
        }
        if worst.noise_bound && worst.err > 0.0 {
            return Err(Error::Quadrature(format!(
                "rounding limit reached on [{}, {}]: tolerance {tol:e} is below the attainable accuracy",
                worst.a, worst.b
            )));
        }
        if evals > MAX_EVALUATIONS {
            return Err(Error::Quadrature("evaluation budget exhausted".into()));
        }
        let m = 0.5 * (worst.a + worst.b);
        let l = make(worst.a, m, worst.depth + 1, &mut seq, &mut evals);
        let r = make(m, worst.b, worst.depth + 1, &mut seq, &mut evals);
        total += l.err + r.err - worst.err;
        heap.push(l);
        heap.push(r);
        iter += 1;
        if iter % 1024 == 0 {
            total = heap.iter().map(|p| p.err).sum();
        }
    }
    let mut panels = heap.into_vec();
    panels.sort_by(|p, q| p.a.total_cmp(&q.a));
    let mut value = C64::new(0.0, 0.0);
    let mut err = 0.0;
    for p in &panels {
        value += p.value;
        err += p.err;
    }
    Ok(QuadResult {
        value,
        abs_error_estimate: err,
        evaluations: evals,
    })
}

/// Breakpoints with each panel no wider than a quarter period, where
/// `omega(a, b)` bounds the phase derivative (radians per unit) on `[a, b]`.
pub fn presplit(a: f64, b: f64, omega: &dyn Fn(f64, f64) -> f64) -> Result<Vec<f64>> {
    let quarter = std::f64::consts::FRAC_PI_2;
    let mut out = vec![a];
    let mut x = a;
    while x < b {
        let mut w = b - x;
        for _ in 0..64 {
            let om = omega(x, x + w);
            if !(om.is_finite()) {
                return Err(Error::Quadrature("phase derivative bound is not finite".into()));
            }
            if w * om <= quarter {
                break;
            }
            w = quarter / om;
        }
        let next = if x + w >= b || b - (x + w) < 1e-15 * (b - a) { b } else { x + w };
        if next <= x {
            return Err(Error::Quadrature("presplit stalled".into()));
        }
        out.push(next);
        x = next;
        if out.len() > MAX_PRESPLIT {
            return Err(Error::Quadrature("too many oscillation panels".into()));
        }
    }
    Ok(out)
}

/// Adaptive integral of a complex function on `[a, b]` to absolute `tol`.
pub fn integrate_1d<F: Fn(f64) -> C64>(f: F, a: f64, b: f64, tol: f64) -> Result<QuadResult> {
    if !(a < b) {
        return Err(Error::Domain(format!("need a < b, got [{a}, {b}]")));
    }
    let s = |x: f64| (f(x), 0.0);
    adaptive(&s, &[a, b], tol)
}

/// As [`integrate_1d`], after splitting `[a, b]` into quarter-period panels
/// from the phase-derivative bound `omega`.
pub fn integrate_oscillatory<F: Fn(f64) -> C64>(
    f: F,
    a: f64,
    b: f64,
    tol: f64,
    omega: &dyn Fn(f64, f64) -> f64,
) -> Result<QuadResult> {
    if !(a < b) {
        return Err(Error::Domain(format!("need a < b, got [{a}, {b}]")));
    }
    let breaks = presplit(a, b, omega)?;
    let s = |x: f64| (f(x), 0.0);
    adaptive(&s, &breaks, tol)
}
