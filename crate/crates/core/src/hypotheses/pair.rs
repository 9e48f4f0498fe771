use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::polyring::{build_g, check_pair, MultiPoly};

/// Everything the pair search looks at for one `(i, j)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairDiagnostics {
    pub pair: (usize, usize),
    /// `G_ij` rendered in the text format.
    pub g: String,
    pub g_is_zero: bool,
    pub f_divides_g: bool,
    pub mixed_partial_zero: bool,
    /// `nu_{x_i}` of `x_k F_kk + F_k` for k = i, j (None when that form is zero).
    pub nu: [Option<u32>; 2],
    /// Term counts of the (f1, g, f2, f0) split.
    pub split_sizes: [usize; 4],
}

impl PairDiagnostics {
    pub fn qualifies(&self) -> bool {
        !self.g_is_zero && !self.f_divides_g
    }
}

fn check_form(f: &MultiPoly) -> Result<()> {
    let d = f.homogeneous_degree().ok_or(Error::NotHomogeneous)?;
    if d <= 1 {
        return Err(Error::DegreeTooLow(d));
    }
    Ok(())
}

pub fn pair_diagnostics(f: &MultiPoly, i: usize, j: usize) -> Result<PairDiagnostics> {
    check_pair(i, j, f.nvars())?;
    let g = build_g(f, i, j)?;
    let divides = f.divides(&g)?.is_some();
    let n = f.nvars();
    let mut nu = [None; 2];
    for (slot, k) in [i, j].into_iter().enumerate() {
        let fk = f.derive(k)?;
        let kk = &(&MultiPoly::var(n, k)? * &fk.derive(k)?) + &fk;
        nu[slot] = kk.valuation(i).ok();
    }
    let s = f.split_monomials(i, j)?;
    Ok(PairDiagnostics {
        pair: (i, j),
        g: g.to_string(),
        g_is_zero: g.is_zero(),
        f_divides_g: divides,
        mixed_partial_zero: f.mixed_partial_vanishes(i, j)?,
        nu,
        split_sizes: [s.f1.len(), s.g.len(), s.f2.len(), s.f0.len()],
    })
}

/// Lexicographically first pair with `G_ij != 0` and `F` not dividing it.
pub fn find_good_pair(f: &MultiPoly) -> Result<Option<(usize, usize)>> {
    check_form(f)?;
    let n = f.nvars();
    for i in 0..n {
        for j in (i + 1)..n {
            let g = build_g(f, i, j)?;
            if g.is_zero() {
                continue;
            }
            if f.divides(&g)?.is_none() {
                return Ok(Some((i, j)));
            }
        }
    }
    Ok(None)
}
