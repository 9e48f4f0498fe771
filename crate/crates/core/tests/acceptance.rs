//! Acceptance suite; prints one PASS/FAIL line per criterion and exits
//! nonzero if any fails.

mod common;

use std::path::PathBuf;
use std::time::{Duration, Instant};

use common::certs::{bilipschitz_violations, roundtrip_residual};
use common::*;
use num_rational::BigRational;
use num_traits::One;
use oscbound::harness::{
    fresnel_decay, ift_checks, morse_check, parse_tau_spec, sweep, vdc_trials, Problem, ProblemConfig, SweepSpec,
};
use oscbound::hypotheses::find_good_pair;
use oscbound::polyring::{rat, MultiPoly};
use oscbound::{build_g, parse_poly};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn problem(name: &str) -> Problem {
    let p = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name);
    Problem::from_config(ProblemConfig::load(&p).unwrap(), 0).unwrap()
}

fn ensure(ok: bool, msg: String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg)
    }
}

fn symbolic() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let forms = 240;
    for k in 0..forms {
        let n = rng.gen_range(1..=5);
        let d = rng.gen_range(0..=4);
        let f = random_form(&mut rng, n, d, true);
        let x = random_point(&mut rng, n);

        let mut euler = MultiPoly::zero(n);
        for v in 0..n {
            euler = &euler + &(&MultiPoly::var(n, v).unwrap() * &f.derive(v).unwrap());
        }
        ensure(euler == f.scale(&rat(d as i64)), format!("Euler identity, form {k}"))?;

        if !f.is_zero() {
            for v in 0..n {
                ensure(
                    f.valuation(v).unwrap() == min_exponent_oracle(&f, v),
                    format!("valuation, form {k}"),
                )?;
            }
            let h = random_form(&mut rng, n, 2, false);
            let g = &f * &h;
            ensure(f.divides(&g).unwrap() == Some(h.clone()), format!("exact multiple, form {k}"))?;
            if d > 0 {
                let off = &g + &MultiPoly::constant(n, BigRational::one());
                ensure(f.divides(&off).unwrap().is_none(), format!("offset multiple, form {k}"))?;
            }
        }

        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                let g = build_g(&f, i, j).unwrap();
                ensure(g.eval(&x).unwrap() == g_oracle(&f, &x, i, j), format!("G_{i}{j}, form {k}"))?;
                let s = f.split_monomials(i, j).unwrap();
                ensure(s.reconstruct() == f, format!("split reconstruction, form {k}"))?;
                for (part, want) in [&s.f1, &s.g, &s.f2, &s.f0].into_iter().zip(split_oracle(&f, i, j)) {
                    ensure(*part == MultiPoly::from_terms(n, want).unwrap(), format!("split, form {k}"))?;
                }
            }
        }
    }
    Ok(format!("{forms} forms"))
}

fn pairs() -> Outcome {
    let suite = [
        ("x1^2 + x2^2 + x3^2 + x4^2 + x5^2", 5),
        ("x1*x2*x3 - x4^3", 4),
        ("x1^2 + x1*x2 + x2^2 - x3^2", 3),
    ];
    let mut found = Vec::new();
    for (s, n) in suite {
        let f = parse_poly(s, Some(n)).unwrap();
        let (i, j) = find_good_pair(&f).unwrap().ok_or(format!("no pair for {s}"))?;
        let g = build_g(&f, i, j).unwrap();
        ensure(!g.is_zero() && f.divides(&g).unwrap().is_none(), format!("pair for {s} does not verify"))?;
        found.push(format!("({}, {})", i + 1, j + 1));
    }
    let f = parse_poly("x1*x2", Some(2)).unwrap();
    ensure(find_good_pair(&f).unwrap().is_none(), "x1*x2 has a pair".into())?;
    Ok(format!("pairs {}; x1*x2 none", found.join(" ")))
}

fn ift() -> Outcome {
    let mut worst = 0.0f64;
    let mut count = 0;
    for name in ["quadric_case2.toml", "cross_case1.toml"] {
        let p = problem(name);
        for c in ift_checks(&p, 0, 1000, 100).map_err(|e| e.to_string())? {
            ensure(
                c.pairs == 1000 && c.targets == 100 && c.bilipschitz_violations == 0 && c.roundtrip_max <= 1e-12,
                format!(
                    "{name} {}: {} violations, round trip {:e}",
                    c.name, c.bilipschitz_violations, c.roundtrip_max
                ),
            )?;
            // independent recheck with the test-side sampler
            let mut rng = ChaCha8Rng::seed_from_u64(77);
            let map = oscbound::harness::reference_chart(&p).map_err(|e| e.to_string())?;
            if c.name == "morse" {
                ensure(
                    bilipschitz_violations(&mut rng, &c.certificate, &map.map, 1000) == 0,
                    format!("{name}: resampled bi-Lipschitz violation"),
                )?;
                let r = roundtrip_residual(&mut rng, &c.certificate, &map.map, 100);
                ensure(r <= 1e-12, format!("{name}: resampled round trip {r:e}"))?;
            }
            worst = worst.max(c.roundtrip_max);
            count += 1;
        }
    }
    Ok(format!("{count} certificates, 0 violations, worst round trip {worst:.1e}"))
}

fn morse() -> Outcome {
    let mut out = Vec::new();
    for name in ["cross_case1.toml", "quadric_case2.toml"] {
        let m = morse_check(&problem(name), 1000, 0).map_err(|e| e.to_string())?;
        ensure(
            m.samples == 1000 && m.identity_residual < 1e-9 && m.decomposition_residual < 1e-10,
            format!(
                "{name}: identity {:e}, decomposition {:e}",
                m.identity_residual, m.decomposition_residual
            ),
        )?;
        out.push(format!(
            "{:?} identity {:.1e} decomposition {:.1e}",
            m.case, m.identity_residual, m.decomposition_residual
        ));
    }
    Ok(out.join("; "))
}

fn vdc() -> Outcome {
    // part ii needs a nonconstant f', so run until both parts have 100 trials
    let s = vdc_trials(0, 150).map_err(|e| e.to_string())?;
    ensure(s.checked_ii >= 100, format!("only {} trials for part ii", s.checked_ii))?;
    ensure(
        s.violations_i == 0 && s.violations_ii == 0,
        format!("violations i {} ii {}", s.violations_i, s.violations_ii),
    )?;
    Ok(format!(
        "{} trials (i), {} trials (ii), worst ratios {:.3} / {:.3}",
        s.trials, s.checked_ii, s.worst_ratio_i, s.worst_ratio_ii
    ))
}

fn fresnel() -> Outcome {
    let taus = parse_tau_spec("10:1e4:log7").unwrap();
    let s = fresnel_decay(&taus, 1.0).map_err(|e| e.to_string())?;
    ensure((s.slope + 0.5).abs() <= 0.05, format!("slope {:.4}", s.slope))?;
    Ok(format!("slope {:.4}", s.slope))
}

fn quadric_spec() -> SweepSpec {
    SweepSpec {
        taus: parse_tau_spec("1:1e3:log8").unwrap(),
        tmax_mult: 10.0,
        t_points: 9,
        tol: 1e-9,
    }
}

fn main_sweep() -> Outcome {
    let p = problem("quadric_case2.toml");
    let spec = quadric_spec();
    let a = sweep(&p, &spec).map_err(|e| e.to_string())?;
    let b = sweep(&p, &spec.refined()).map_err(|e| e.to_string())?;
    for r in [&a, &b] {
        ensure(r.stats.flagged == 0, format!("{} flagged cells", r.stats.flagged))?;
        ensure(
            r.cells.iter().all(|c| !c.branch.is_empty() && c.branch != "unclassified"),
            "unlabelled cell".into(),
        )?;
        ensure(r.cells.len() >= r.tau_grid.len() * 81, "t grid below 9^2".into())?;
    }
    let (ca, cb) = (a.c_hat.ok_or("no c_hat")?, b.c_hat.ok_or("no refined c_hat")?);
    ensure(ca.is_finite() && cb.is_finite() && ca > 0.0, format!("c_hat {ca:e}"))?;
    let ratio = cb.max(ca) / cb.min(ca);
    ensure(ratio <= 2.0, format!("c_hat {ca:.4e} -> {cb:.4e}"))?;
    Ok(format!("c_hat {ca:.4e}, refined {cb:.4e}, ratio {ratio:.3}, {} + {} cells", a.cells.len(), b.cells.len()))
}

fn determinism() -> Outcome {
    let run = || {
        let p = problem("quadric_case2.toml");
        let mut spec = quadric_spec();
        spec.taus.truncate(4);
        let s = sweep(&p, &spec).unwrap().to_json();
        let c = serde_json::to_string(&ift_checks(&p, 5, 200, 20).unwrap()).unwrap();
        let m = serde_json::to_string(&morse_check(&p, 200, 5).unwrap()).unwrap();
        let v = serde_json::to_string(&vdc_trials(5, 10).unwrap()).unwrap();
        (s, c, m, v)
    };
    let (a, b) = (run(), run());
    ensure(a.0 == b.0, "sweep report differs".into())?;
    ensure(a.1 == b.1, "certificate report differs".into())?;
    ensure(a.2 == b.2, "Morse report differs".into())?;
    ensure(a.3 == b.3, "decay-bound report differs".into())?;
    Ok("sweep, certificate, Morse and decay-bound reports identical".into())
}

fn main() {
    let criteria: [(&str, fn() -> Outcome, u64); 8] = [
        ("symbolic suite", symbolic, 30),
        ("pair search", pairs, 5),
        ("IFT certificates", ift, 60),
        ("Morse identity", morse, 120),
        ("decay bounds", vdc, 120),
        ("Fresnel slope", fresnel, 60),
        ("quadric sweep", main_sweep, 900),
        ("determinism", determinism, 900),
    ];
    let mut failed = 0;
    for (k, (name, f, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let r = std::panic::catch_unwind(f).unwrap_or_else(|_| Err("panicked".into()));
        let el = start.elapsed();
        let r = match r {
            Ok(m) if el > Duration::from_secs(*budget) => Err(format!("{m}; took {el:.1?} > {budget} s")),
            other => other,
        };
        match r {
            Ok(m) => println!("PASS {} {name}: {m} ({el:.2?})", k + 1),
            Err(m) => {
                failed += 1;
                println!("FAIL {} {name}: {m} ({el:.2?})", k + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
