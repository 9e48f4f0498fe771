#![allow(dead_code)]

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use oscbound::MultiPoly;
use rand::Rng;

pub fn q(p: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(d))
}

/// Random polynomial with small rational coefficients; homogeneous of
/// degree `deg` when `homogeneous`, otherwise of degree at most `deg`.
pub fn random_form<R: Rng>(rng: &mut R, n: usize, deg: u32, homogeneous: bool) -> MultiPoly {
    let nterms = rng.gen_range(1..=6);
    let mut terms = Vec::new();
    for _ in 0..nterms {
        let d = if homogeneous { deg } else { rng.gen_range(0..=deg) };
        let mut e = vec![0u32; n];
        for _ in 0..d {
            e[rng.gen_range(0..n)] += 1;
        }
        let c = q(rng.gen_range(-9..=9), rng.gen_range(1..=5));
        terms.push((e, c));
    }
    MultiPoly::from_terms(n, terms).unwrap()
}

pub fn random_point<R: Rng>(rng: &mut R, n: usize) -> Vec<BigRational> {
    (0..n).map(|_| q(rng.gen_range(-20..=20), rng.gen_range(1..=7))).collect()
}

fn eval(p: &MultiPoly, x: &[BigRational]) -> BigRational {
    p.eval(x).unwrap()
}

fn shifted(x: &[BigRational], moves: &[(usize, BigRational)]) -> Vec<BigRational> {
    let mut y = x.to_vec();
    for (k, h) in moves {
        y[*k] += h;
    }
    y
}

/// Richardson-extrapolated central difference; exact for degree <= 4.
pub fn d1_oracle(p: &MultiPoly, x: &[BigRational], k: usize) -> BigRational {
    let central = |h: BigRational| {
        let a = eval(p, &shifted(x, &[(k, h.clone())]));
        let b = eval(p, &shifted(x, &[(k, -h.clone())]));
        (a - b) / (q(2, 1) * h)
    };
    let dh = central(q(1, 3));
    let dh2 = central(q(1, 6));
    (q(4, 1) * dh2 - dh) / q(3, 1)
}

/// Second partial by extrapolated finite differences; exact for degree <= 5.
pub fn d2_oracle(p: &MultiPoly, x: &[BigRational], i: usize, j: usize) -> BigRational {
    let stencil = |h: BigRational| {
        if i == j {
            let a = eval(p, &shifted(x, &[(i, h.clone())]));
            let b = eval(p, x);
            let c = eval(p, &shifted(x, &[(i, -h.clone())]));
            (a - q(2, 1) * b + c) / (h.clone() * h)
        } else {
            let pp = eval(p, &shifted(x, &[(i, h.clone()), (j, h.clone())]));
            let pm = eval(p, &shifted(x, &[(i, h.clone()), (j, -h.clone())]));
            let mp = eval(p, &shifted(x, &[(i, -h.clone()), (j, h.clone())]));
            let mm = eval(p, &shifted(x, &[(i, -h.clone()), (j, -h.clone())]));
            (pp - pm - mp + mm) / (q(4, 1) * h.clone() * h)
        }
    };
    let sh = stencil(q(1, 3));
    let sh2 = stencil(q(1, 6));
    (q(4, 1) * sh2 - sh) / q(3, 1)
}

/// The Hessian-type form evaluated from finite-difference derivatives only.
pub fn g_oracle(f: &MultiPoly, x: &[BigRational], i: usize, j: usize) -> BigRational {
    let fi = d1_oracle(f, x, i);
    let fj = d1_oracle(f, x, j);
    let fii = d2_oracle(f, x, i, i);
    let fjj = d2_oracle(f, x, j, j);
    let fij = d2_oracle(f, x, i, j);
    (x[i].clone() * fii + fi) * (x[j].clone() * fjj + fj) - x[i].clone() * x[j].clone() * fij.clone() * fij
}

/// Termwise classification straight from the term list.
pub fn split_oracle(f: &MultiPoly, i: usize, j: usize) -> [Vec<(Vec<u32>, BigRational)>; 4] {
    let mut out: [Vec<(Vec<u32>, BigRational)>; 4] = Default::default();
    for (m, c) in f.terms() {
        let e = m.exps();
        let slot = match (e[i] > 0, e[j] > 0) {
            (true, false) => 0,
            (true, true) => 1,
            (false, true) => 2,
            (false, false) => 3,
        };
        out[slot].push((e.to_vec(), c.clone()));
    }
    out
}

pub fn min_exponent_oracle(f: &MultiPoly, k: usize) -> u32 {
    f.terms().map(|(m, _)| m.exps()[k]).min().unwrap()
}

pub fn is_zero(x: &BigRational) -> bool {
    x.is_zero()
}

pub mod certs {
    use oscbound::ift::{invert, norm2, IftCertificate, SmoothMap2, Vec2};
    use rand::Rng;

    pub fn point_in_w<R: Rng>(rng: &mut R, c: &IftCertificate) -> Vec2 {
        let r = c.radius() * (1.0 - 1e-9);
        [
            c.x0[0] + r * rng.gen_range(-1.0..1.0),
            c.x0[1] + r * rng.gen_range(-1.0..1.0),
        ]
    }

    pub fn target_in_v<R: Rng>(rng: &mut R, c: &IftCertificate) -> Vec2 {
        let rho = c.v_radius * 0.999 * rng.gen::<f64>().sqrt();
        let th = rng.gen_range(0.0..std::f64::consts::TAU);
        [c.fx0[0] + rho * th.cos(), c.fx0[1] + rho * th.sin()]
    }

    fn dist(a: Vec2, b: Vec2) -> f64 {
        norm2([a[0] - b[0], a[1] - b[1]])
    }

    /// Pairs violating `|x1 - x2| < bilip |F(x1) - F(x2)|`.
    pub fn bilipschitz_violations<R: Rng, M: SmoothMap2>(
        rng: &mut R,
        c: &IftCertificate,
        map: &M,
        pairs: usize,
    ) -> usize {
        (0..pairs)
            .filter(|_| {
                let a = point_in_w(rng, c);
                let b = point_in_w(rng, c);
                !(dist(a, b) < c.bilip * dist(map.eval(a), map.eval(b)))
            })
            .count()
    }

    /// Largest `|F(invert(y)) - y|` over random targets in `V`; `inf` when
    /// an inversion fails.
    pub fn roundtrip_residual<R: Rng, M: SmoothMap2>(
        rng: &mut R,
        c: &IftCertificate,
        map: &M,
        targets: usize,
    ) -> f64 {
        let mut worst = 0.0f64;
        for _ in 0..targets {
            let y = target_in_v(rng, c);
            match invert(c, map, y) {
                Ok(x) if c.in_w(x) => worst = worst.max(dist(map.eval(x), y)),
                _ => return f64::INFINITY,
            }
        }
        worst
    }
}

pub mod golden {
    use serde_json::Value;
    use std::path::PathBuf;

    fn path(name: &str) -> PathBuf {
        PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)
    }

    fn close(a: &Value, b: &Value, at: &str, tol: f64) -> Result<(), String> {
        match (a, b) {
            (Value::Number(x), Value::Number(y)) => {
                let (x, y) = (x.as_f64().unwrap(), y.as_f64().unwrap());
                if (x - y).abs() <= tol * x.abs().max(y.abs()).max(1e-300) {
                    Ok(())
                } else {
                    Err(format!("{at}: {x} vs golden {y}"))
                }
            }
            (Value::Array(x), Value::Array(y)) if x.len() == y.len() => x
                .iter()
                .zip(y)
                .enumerate()
                .try_for_each(|(i, (p, q))| close(p, q, &format!("{at}[{i}]"), tol)),
            (Value::Object(x), Value::Object(y)) if x.len() == y.len() => x.iter().try_for_each(|(k, p)| {
                let q = y.get(k).ok_or_else(|| format!("{at}.{k}: missing from golden"))?;
                close(p, q, &format!("{at}.{k}"), tol)
            }),
            _ if a == b => Ok(()),
            _ => Err(format!("{at}: {a} vs golden {b}")),
        }
    }

    /// Compares against `tests/golden/<name>` with a relative tolerance on
    /// numbers. `OSCBOUND_BLESS=1` rewrites the file instead.
    pub fn check(name: &str, actual: &Value, tol: f64) {
        let p = path(name);
        if std::env::var_os("OSCBOUND_BLESS").is_some() {
            std::fs::create_dir_all(p.parent().unwrap()).unwrap();
            std::fs::write(&p, serde_json::to_string_pretty(actual).unwrap() + "\n").unwrap();
            return;
        }
        let text = std::fs::read_to_string(&p).unwrap_or_else(|e| panic!("{}: {e}", p.display()));
        let want: Value = serde_json::from_str(&text).unwrap();
        if let Err(msg) = close(actual, &want, "$", tol) {
            panic!("golden mismatch in {name}: {msg}");
        }
    }
}
