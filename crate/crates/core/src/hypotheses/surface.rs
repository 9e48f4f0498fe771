use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::polyring::{check_index, EvalPoly, MultiPoly};

const SCAN_CELLS: usize = 1024;
pub const SINGULAR_GRAD: f64 = 1e-8;

/// Root of `F` on the segment through `fixed_coords` parallel to axis
/// `transversal`, located by a sign-change scan of (0,1) and bisection.
///
/// `fixed_coords` lists the other `n - 1` coordinates in index order.
/// Returns `Ok(None)` when no sign change exists.
pub fn find_surface_point(
    f: &MultiPoly,
    transversal: usize,
    fixed_coords: &[f64],
) -> Result<Option<Vec<f64>>> {
    let n = f.nvars();
    check_index(transversal, n)?;
    if fixed_coords.len() + 1 != n {
        return Err(Error::NvarsMismatch {
            left: fixed_coords.len() + 1,
            right: n,
        });
    }
    if fixed_coords.iter().any(|&c| !(c > 0.0 && c < 1.0)) {
        return Err(Error::Domain("fixed coordinates must lie in (0,1)".into()));
    }
    let p = EvalPoly::new(f);
    let mut x = Vec::with_capacity(n);
    x.extend_from_slice(&fixed_coords[..transversal]);
    x.push(0.5);
    x.extend_from_slice(&fixed_coords[transversal..]);
    let at = |x: &mut Vec<f64>, s: f64| {
        x[transversal] = s;
        p.eval(x)
    };

    let mut bracket = None;
    let mut prev_s = 1.0 / SCAN_CELLS as f64;
    let mut prev_v = at(&mut x, prev_s);
    if prev_v == 0.0 {
        bracket = Some((prev_s, prev_s));
    }
    for k in 2..SCAN_CELLS {
        if bracket.is_some() {
            break;
        }
        let s = k as f64 / SCAN_CELLS as f64;
        let v = at(&mut x, s);
        if v == 0.0 {
            bracket = Some((s, s));
        } else if v.signum() != prev_v.signum() {
            bracket = Some((prev_s, s));
        }
        prev_s = s;
        prev_v = v;
    }
    let Some((mut a, mut b)) = bracket else {
        return Ok(None);
    };
    let mut fa = at(&mut x, a);
    while b - a > 0.0 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let fm = at(&mut x, m);
        if fm == 0.0 {
            a = m;
            b = m;
            break;
        }
        if fm.signum() == fa.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    let fb = at(&mut x, b);
    let fa = at(&mut x, a);
    let root = if fa.abs() <= fb.abs() { a } else { b };
    x[transversal] = root;
    let resid = p.eval(&x).abs();
    if resid >= 1e-12 {
        return Err(Error::Certification(format!(
            "bisection residual {resid:e} above 1e-12"
        )));
    }
    let grad_norm = (0..n)
        .map(|k| p.derive(k).eval(&x).powi(2))
        .sum::<f64>()
        .sqrt();
    if grad_norm <= SINGULAR_GRAD {
        return Err(Error::SingularRoot {
            point: x,
            grad_norm,
        });
    }
    Ok(Some(x))
}

/// Lower bound for the dimension of the singular locus: `n` minus the
/// largest Hessian rank seen at random points of (0,1)^n.
pub fn singular_dim_lower_bound(f: &MultiPoly, samples: usize, seed: u64) -> usize {
    let n = f.nvars();
    let hess: Vec<Vec<EvalPoly>> = (0..n)
        .map(|a| {
            let da = EvalPoly::new(&f.derive(a).expect("index in range"));
            (0..n).map(|b| da.derive(b)).collect()
        })
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = 0;
    for _ in 0..samples {
        let x: Vec<f64> = (0..n).map(|_| rng.gen_range(0.05..0.95)).collect();
        let m: Vec<Vec<f64>> = hess
            .iter()
            .map(|row| row.iter().map(|h| h.eval(&x)).collect())
            .collect();
        best = best.max(numeric_rank(m, 1e-9));
        if best == n {
            break;
        }
    }
    n - best
}

fn numeric_rank(mut m: Vec<Vec<f64>>, rel_tol: f64) -> usize {
    let rows = m.len();
    if rows == 0 {
        return 0;
    }
    let cols = m[0].len();
    let scale = m
        .iter()
        .flat_map(|r| r.iter())
        .fold(0.0f64, |a, v| a.max(v.abs()));
    if scale == 0.0 {
        return 0;
    }
    let tol = rel_tol * scale;
    let mut rank = 0;
    for c in 0..cols {
        let Some(piv) = (rank..rows).max_by(|&a, &b| m[a][c].abs().total_cmp(&m[b][c].abs())) else {
            break;
        };
        if m[piv][c].abs() <= tol {
            continue;
        }
        m.swap(rank, piv);
        for r in (rank + 1)..rows {
            let factor = m[r][c] / m[rank][c];
            for k in c..cols {
                m[r][k] -= factor * m[rank][k];
            }
        }
        rank += 1;
        if rank == rows {
            break;
        }
    }
    rank
}
