use crate::error::{Error, Result};
use crate::hypotheses::AxisBox;
use crate::ift::{Mat2, SmoothMap2, Vec2};
use crate::polyring::{check_pair, rat_from_f64, EvalPoly, MultiPoly};

/// Indices of the coordinates other than the pair, in increasing order.
pub fn rest_indices(n: usize, pair: (usize, usize)) -> Vec<usize> {
    (0..n).filter(|&k| k != pair.0 && k != pair.1).collect()
}

/// Full coordinate vector from `(u1, u2)` and `v`.
pub fn embed(n: usize, pair: (usize, usize), u: Vec2, v: &[f64]) -> Vec<f64> {
    let mut x = vec![0.0; n];
    x[pair.0] = u[0];
    x[pair.1] = u[1];
    for (k, &vk) in rest_indices(n, pair).iter().zip(v) {
        x[*k] = vk;
    }
    x
}

/// Full-dimensional box from a `u` box and a `v` box.
pub fn embed_box(n: usize, pair: (usize, usize), ub: &AxisBox, vb: &AxisBox) -> AxisBox {
    let c = embed(n, pair, [ub.center[0], ub.center[1]], &vb.center);
    let r = embed(n, pair, [ub.radius[0], ub.radius[1]], &vb.radius);
    AxisBox::new(c, r)
}

/// Splits a full point into `(u, v)`.
pub fn split_point(pair: (usize, usize), x: &[f64]) -> (Vec2, Vec<f64>) {
    let rest = rest_indices(x.len(), pair);
    ([x[pair.0], x[pair.1]], rest.iter().map(|&k| x[k]).collect())
}

/// The bivariate phase `G(u) = F(u1, u2, v)` plus the log coefficients
/// `A_j = t_j / (2 pi tau)`.
#[derive(Clone, Debug)]
pub struct PhaseSlice {
    pub f: MultiPoly,
    pub pair: (usize, usize),
    pub v: Vec<f64>,
    pub a: [f64; 2],
    g_exact: MultiPoly,
    g: EvalPoly,
    g1: EvalPoly,
    g2: EvalPoly,
    g11: EvalPoly,
    g12: EvalPoly,
    g22: EvalPoly,
}

impl PhaseSlice {
    pub fn new(f: &MultiPoly, pair: (usize, usize), v: &[f64], a: [f64; 2]) -> Result<Self> {
        let n = f.nvars();
        check_pair(pair.0, pair.1, n)?;
        if v.len() + 2 != n {
            return Err(Error::NvarsMismatch {
                left: v.len() + 2,
                right: n,
            });
        }
        let mut values = vec![num_rational::BigRational::from_integer(0.into()); n];
        for (k, &vk) in rest_indices(n, pair).iter().zip(v) {
            values[*k] = rat_from_f64(vk);
        }
        let g_exact = f.restrict(&[pair.0, pair.1], &values)?;
        let g = EvalPoly::new(&g_exact);
        let g1 = g.derive(0);
        let g2 = g.derive(1);
        Ok(PhaseSlice {
            f: f.clone(),
            pair,
            v: v.to_vec(),
            a,
            g11: g1.derive(0),
            g12: g1.derive(1),
            g22: g2.derive(1),
            g1,
            g2,
            g,
            g_exact,
        })
    }

    /// `A_j = t_j / (2 pi tau)`; `tau` must be nonzero.
    pub fn from_t(f: &MultiPoly, pair: (usize, usize), v: &[f64], t: [f64; 2], tau: f64) -> Result<Self> {
        if tau == 0.0 {
            return Err(Error::Domain("tau must be nonzero".into()));
        }
        let s = 2.0 * std::f64::consts::PI * tau;
        Self::new(f, pair, v, [t[0] / s, t[1] / s])
    }

    pub fn with_a(&self, a: [f64; 2]) -> PhaseSlice {
        PhaseSlice { a, ..self.clone() }
    }

    /// Exact bivariate `G` (the `v` values enter as exact binary rationals).
    pub fn g_poly(&self) -> &MultiPoly {
        &self.g_exact
    }

    pub fn nvars(&self) -> usize {
        self.f.nvars()
    }

    pub fn embed(&self, u: Vec2) -> Vec<f64> {
        embed(self.nvars(), self.pair, u, &self.v)
    }

    pub fn g(&self, u: Vec2) -> f64 {
        self.g.eval(&u)
    }

    pub fn grad(&self, u: Vec2) -> Vec2 {
        [self.g1.eval(&u), self.g2.eval(&u)]
    }

    pub fn hess(&self, u: Vec2) -> Mat2 {
        let h12 = self.g12.eval(&u);
        [[self.g11.eval(&u), h12], [h12, self.g22.eval(&u)]]
    }

    /// `Psi_v(u) = (u1 dF/du1, u2 dF/du2)`.
    pub fn psi(&self, u: Vec2) -> Vec2 {
        let d = self.grad(u);
        [u[0] * d[0], u[1] * d[1]]
    }

    pub fn psi_jac(&self, u: Vec2) -> Mat2 {
        let d = self.grad(u);
        let h = self.hess(u);
        [
            [d[0] + u[0] * h[0][0], u[0] * h[0][1]],
            [u[1] * h[1][0], d[1] + u[1] * h[1][1]],
        ]
    }

    /// Gradient of the full phase `G + A1 log u1 + A2 log u2`.
    pub fn critical_residual(&self, u: Vec2) -> Vec2 {
        let d = self.grad(u);
        [d[0] + self.a[0] / u[0], d[1] + self.a[1] / u[1]]
    }

    pub fn psi_map(&self) -> PsiMap<'_> {
        PsiMap::new(self)
    }
}

/// `Psi_v` as a [`SmoothMap2`], with closed-form bounds on its second
/// derivatives.
pub struct PsiMap<'a> {
    slice: &'a PhaseSlice,
    /// `d J_ij / d u_k` as polynomials.
    dj: [[[EvalPoly; 2]; 2]; 2],
}

impl<'a> PsiMap<'a> {
    pub fn new(slice: &'a PhaseSlice) -> Self {
        let u1 = MultiPoly::var(2, 0).expect("bivariate");
        let u2 = MultiPoly::var(2, 1).expect("bivariate");
        let g = slice.g_poly();
        let g1 = g.derive(0).expect("bivariate");
        let g2 = g.derive(1).expect("bivariate");
        let psi = [&u1 * &g1, &u2 * &g2];
        let dj = [0, 1].map(|i| {
            [0, 1].map(|j| {
                let jij = psi[i].derive(j).expect("bivariate");
                [0, 1].map(|k| EvalPoly::new(&jij.derive(k).expect("bivariate")))
            })
        });
        PsiMap { slice, dj }
    }
}

impl SmoothMap2 for PsiMap<'_> {
    fn eval(&self, x: Vec2) -> Vec2 {
        self.slice.psi(x)
    }

    fn jac(&self, x: Vec2) -> Mat2 {
        self.slice.psi_jac(x)
    }

    fn jac_derivative_bounds(&self, bx: &AxisBox) -> Option<[[[f64; 2]; 2]; 2]> {
        let (lo, hi) = (bx.lo(), bx.hi());
        Some([0, 1].map(|i| [0, 1].map(|j| [0, 1].map(|k| self.dj[i][j][k].abs_bound(&lo, &hi)))))
    }
}

/// `Psi` components as polynomials in all `n` variables.
pub fn psi_polys(f: &MultiPoly, pair: (usize, usize)) -> Result<[MultiPoly; 2]> {
    let n = f.nvars();
    let a = &MultiPoly::var(n, pair.0)? * &f.derive(pair.0)?;
    let b = &MultiPoly::var(n, pair.1)? * &f.derive(pair.1)?;
    Ok([a, b])
}
