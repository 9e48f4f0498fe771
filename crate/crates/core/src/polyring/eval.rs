use super::{rat_to_f64, MultiPoly};

/// Double-precision snapshot of a [`MultiPoly`] for fast numerics.
#[derive(Clone, Debug, PartialEq)]
pub struct EvalPoly {
    nvars: usize,
    terms: Vec<(Vec<u32>, f64)>,
    max_exp: Vec<u32>,
}

impl EvalPoly {
    pub fn new(p: &MultiPoly) -> Self {
        let terms: Vec<(Vec<u32>, f64)> = p
            .terms()
            .map(|(m, c)| (m.exps().to_vec(), rat_to_f64(c)))
            .collect();
        Self::from_parts(p.nvars(), terms)
    }

    fn from_parts(nvars: usize, terms: Vec<(Vec<u32>, f64)>) -> Self {
        let mut max_exp = vec![0; nvars];
        for (e, _) in &terms {
            for (m, &a) in max_exp.iter_mut().zip(e) {
                *m = (*m).max(a);
            }
        }
        EvalPoly {
            nvars,
            terms,
            max_exp,
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.nvars);
        let mut s = 0.0;
        for (e, c) in &self.terms {
            let mut t = *c;
            for (xi, &a) in x.iter().zip(e) {
                if a > 0 {
                    t *= xi.powi(a as i32);
                }
            }
            s += t;
        }
        s
    }

    pub fn derive(&self, k: usize) -> EvalPoly {
        let terms = self
            .terms
            .iter()
            .filter(|(e, _)| e[k] > 0)
            .map(|(e, c)| {
                let mut e2 = e.clone();
                e2[k] -= 1;
                (e2, c * e[k] as f64)
            })
            .collect();
        Self::from_parts(self.nvars, terms)
    }

    /// Upper bound for `|p|` on the box `[lo, hi]` from coefficient
    /// magnitudes times monomial sups.
    pub fn abs_bound(&self, lo: &[f64], hi: &[f64]) -> f64 {
        let r: Vec<f64> = lo.iter().zip(hi).map(|(a, b)| a.abs().max(b.abs())).collect();
        let mut s = 0.0;
        for (e, c) in &self.terms {
            let mut t = c.abs();
            for (ri, &a) in r.iter().zip(e) {
                if a > 0 {
                    t *= ri.powi(a as i32);
                }
            }
            s += t;
        }
        // absorb rounding in the bound itself
        s * (1.0 + 1e-12) + f64::MIN_POSITIVE
    }

    /// Per-variable bounds on `|dp/dx_k|` over `[lo, hi]`.
    pub fn grad_abs_bounds(&self, lo: &[f64], hi: &[f64]) -> Vec<f64> {
        (0..self.nvars)
            .map(|k| {
                if self.max_exp[k] == 0 {
                    0.0
                } else {
                    self.derive(k).abs_bound(lo, hi)
                }
            })
            .collect()
    }
}
