mod common;

use oscbound::hypotheses::{classify_case, CaseLabel, DEFAULT_GRID};
use oscbound::ift::{fd_jacobian, max_abs_entry, SmoothMap2, Vec2};
use oscbound::polyring::{rat_from_f64, MultiPoly};
use oscbound::stphase::*;
use oscbound::{build_g, parse_poly, Error};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn quadric() -> MultiPoly {
    parse_poly("x1^2 + x2^2 - x3^2", Some(3)).unwrap()
}

fn cross() -> MultiPoly {
    parse_poly("x1^2 + x1*x2 + x2^2 - x3^2", Some(3)).unwrap()
}

fn quadric_x0() -> Vec<f64> {
    vec![0.3, 0.4, 0.5]
}

fn cross_x0() -> Vec<f64> {
    vec![0.4, 0.4, 0.48f64.sqrt()]
}

fn ladder(f: &MultiPoly, x0: &[f64]) -> Ladder {
    let r = classify_case(f, 0, 1, x0, 0.05, DEFAULT_GRID).unwrap();
    build_ladder(f, &r, &LadderOptions::default()).unwrap()
}

fn chart_at(f: &MultiPoly, x0: &[f64], case: CaseLabel) -> MorseChart {
    let s = PhaseSlice::new(f, (0, 1), &x0[2..], [0.0, 0.0]).unwrap();
    let u0 = [x0[0], x0[1]];
    let c = s.psi(u0);
    let s = s.with_a([-c[0], -c[1]]);
    let phi = PhiDecomposition::new(&s, u0).unwrap();
    build_chart(phi, case, 0.01, 0.02, &ChartOptions::default()).unwrap()
}

fn rand_in<R: Rng>(rng: &mut R, c: Vec2, r: f64) -> Vec2 {
    [c[0] + r * rng.gen_range(-1.0..1.0), c[1] + r * rng.gen_range(-1.0..1.0)]
}

#[test]
fn psi_examples() {
    let s = PhaseSlice::new(&quadric(), (0, 1), &[0.5], [0.0, 0.0]).unwrap();
    let y = s.psi([0.3, 0.4]);
    assert!((y[0] - 2.0 * 0.3 * 0.3).abs() < 1e-15 && (y[1] - 2.0 * 0.4 * 0.4).abs() < 1e-15);
    assert!((y[0] - 0.18).abs() < 1e-15 && (y[1] - 0.32).abs() < 1e-15);
    for f in [quadric(), cross(), parse_poly("x1^3 - 2*x1*x2*x3 + x3^3", Some(3)).unwrap()] {
        let s = PhaseSlice::new(&f, (0, 1), &[0.7], [0.0, 0.0]).unwrap();
        assert_eq!(s.psi([0.0, 0.3])[0], 0.0);
    }
}

#[test]
fn psi_jacobian_determinant_is_g() {
    let f = cross();
    let g = build_g(&f, 0, 1).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..100 {
        let v = rng.gen_range(0.2..0.9);
        let u = [rng.gen_range(0.1..0.9), rng.gen_range(0.1..0.9)];
        let s = PhaseSlice::new(&f, (0, 1), &[v], [0.0, 0.0]).unwrap();
        let j = fd_jacobian(&s.psi_map(), u, 1e-5);
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        let want = g.eval_f64(&[u[0], u[1], v]);
        assert!((det - want).abs() < 1e-7, "{det} vs {want}");
    }
}

#[test]
fn slice_matches_embedding_exactly() {
    let f = parse_poly("3*x1^2*x3 - x1*x2*x4 + 5/2*x2^3 - x3*x4^2", Some(4)).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..50 {
        // binary fractions are exact in both representations
        let v = [rng.gen_range(1..64) as f64 / 64.0, rng.gen_range(1..64) as f64 / 64.0];
        let s = PhaseSlice::new(&f, (1, 3), &v, [0.0, 0.0]).unwrap();
        let u = [common::q(rng.gen_range(-9..9), 7), common::q(rng.gen_range(-9..9), 5)];
        let x = vec![rat_from_f64(v[0]), u[0].clone(), rat_from_f64(v[1]), u[1].clone()];
        assert_eq!(s.g_poly().eval(&u).unwrap(), f.eval(&x).unwrap());
    }
    assert_eq!(embed(4, (1, 3), [7.0, 8.0], &[1.0, 2.0]), vec![1.0, 7.0, 2.0, 8.0]);
    assert_eq!(split_point((1, 3), &[1.0, 7.0, 2.0, 8.0]), ([7.0, 8.0], vec![1.0, 2.0]));
    assert!(matches!(
        PhaseSlice::new(&f, (1, 3), &[0.5], [0.0, 0.0]),
        Err(Error::NvarsMismatch { .. })
    ));
    assert!(matches!(PhaseSlice::from_t(&f, (1, 3), &[0.5, 0.5], [1.0, 1.0], 0.0), Err(Error::Domain(_))));
}

#[test]
fn a_from_t() {
    let s = PhaseSlice::from_t(&quadric(), (0, 1), &[0.5], [3.0, -2.0], 4.0).unwrap();
    let k = 2.0 * std::f64::consts::PI * 4.0;
    assert_eq!(s.a, [3.0 / k, -2.0 / k]);
}

#[test]
fn critical_point_recovered() {
    let s = PhaseSlice::new(&quadric(), (0, 1), &[0.5], [-0.18, -0.32]).unwrap();
    let bx = oscbound::AxisBox::cube(&[0.3, 0.4], 0.05);
    match find_critical_point(&s, &bx, DEFAULT_GRID) {
        CriticalSearch::Found { z0, residual, .. } => {
            assert!((z0[0] - 0.3).abs() < 1e-12 && (z0[1] - 0.4).abs() < 1e-12, "{z0:?}");
            assert!(residual < 1e-12);
            let r = s.critical_residual(z0);
            assert!(r[0].abs() < 1e-12 && r[1].abs() < 1e-12);
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn critical_point_outside_box_has_witness() {
    let s = PhaseSlice::new(&quadric(), (0, 1), &[0.5], [0.0, 0.0]).unwrap();
    // G = u1^2 + u2^2 - 0.25 and Psi = (2 u1^2, 2 u2^2) vanish only at 0
    assert!(s.g([0.3, 0.4]).abs() < 1e-15);
    let bx = oscbound::AxisBox::cube(&[0.4, 0.4], 0.15);
    match find_critical_point(&s, &bx, DEFAULT_GRID) {
        CriticalSearch::NotInBox { j0, lower_bound } => {
            // |dG/du_j| = 2 u_j >= 0.5 on the box
            assert!(lower_bound > 0.0 && lower_bound <= 0.5 + 1e-12);
            let mut rng = ChaCha8Rng::seed_from_u64(0);
            for _ in 0..1000 {
                let u = rand_in(&mut rng, [0.4, 0.4], 0.15);
                assert!(s.critical_residual(u)[j0].abs() >= lower_bound);
            }
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn found_points_solve_both_equations() {
    let f = cross();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let base = PhaseSlice::new(&f, (0, 1), &[0.6928], [0.0, 0.0]).unwrap();
    let bx = oscbound::AxisBox::cube(&[0.4, 0.4], 0.05);
    let mut found = 0;
    for _ in 0..100 {
        let z = rand_in(&mut rng, [0.4, 0.4], 0.04);
        let p = base.psi(z);
        let s = base.with_a([-p[0], -p[1]]);
        if let CriticalSearch::Found { z0, residual, .. } = find_critical_point(&s, &bx, 17) {
            let r = s.critical_residual(z0);
            assert!(residual < 1e-12 && r[0].abs() < 1e-12 && r[1].abs() < 1e-12);
            assert!((z0[0] - z[0]).abs() < 1e-10 && (z0[1] - z[1]).abs() < 1e-10);
            found += 1;
        }
    }
    assert_eq!(found, 100);
}

#[test]
fn multistart_finds_at_most_one_point() {
    let l = ladder(&cross(), &cross_x0());
    let base = PhaseSlice::new(&cross(), (0, 1), &l.v0, [0.0, 0.0]).unwrap();
    let d1 = l.delta1;
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for trial in 0..40 {
        let a = if trial % 2 == 0 {
            let p = base.psi(rand_in(&mut rng, l.u0, d1));
            [-p[0], -p[1]]
        } else {
            [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)]
        };
        let s = base.with_a(a);
        let mut sols: Vec<Vec2> = Vec::new();
        for i in -1..=1 {
            for j in -1..=1 {
                let start = [l.u0[0] + 0.9 * d1 * i as f64, l.u0[1] + 0.9 * d1 * j as f64];
                if let Some((z, _, _)) = newton_critical(&s, start) {
                    if (z[0] - l.u0[0]).abs() < d1 && (z[1] - l.u0[1]).abs() < d1 {
                        sols.push(z);
                    }
                }
            }
        }
        for z in &sols {
            assert!((z[0] - sols[0][0]).abs() < 1e-10 && (z[1] - sols[0][1]).abs() < 1e-10);
        }
    }
}

#[test]
fn log_series_matches_closed_form() {
    for &r in &[-0.49, -0.3, -0.1, -0.01, 0.01, 0.1, 0.25, 0.49] {
        let closed = (r - f64::ln_1p(r)) / (r * r);
        assert!((log_series(r) - closed).abs() < 1e-12, "r = {r}");
        let h = 1e-5;
        let fd = (log_series(r + h) - log_series(r - h)) / (2.0 * h);
        assert!((log_series_derivative(r) - fd).abs() < 1e-8, "r = {r}");
    }
    assert_eq!(log_series(0.0), 0.5);
    assert!((log_series_derivative(0.0) + 1.0 / 3.0).abs() < 1e-16);
}

fn phi_for(f: &MultiPoly, x0: &[f64], shift: Vec2) -> (PhaseSlice, PhiDecomposition) {
    // a critical point away from u0 so the log tail is exercised with generic A
    let s = PhaseSlice::new(f, (0, 1), &x0[2..], [0.0, 0.0]).unwrap();
    let z0 = [x0[0] + shift[0], x0[1] + shift[1]];
    let p = s.psi(z0);
    let s = s.with_a([-p[0], -p[1]]);
    let phi = PhiDecomposition::new(&s, z0).unwrap();
    (s, phi)
}

#[test]
fn phi_vanishes_to_second_order() {
    for (f, x0) in [(quadric(), quadric_x0()), (cross(), cross_x0())] {
        let (_, phi) = phi_for(&f, &x0, [0.01, -0.02]);
        assert_eq!(phi.phi([0.0, 0.0]), 0.0);
        // phi is h^2 phi11, so the central difference is O(h^2) itself
        let h = 1e-6;
        let gx = (phi.phi([h, 0.0]) - phi.phi([-h, 0.0])) / (2.0 * h);
        let gy = (phi.phi([0.0, h]) - phi.phi([0.0, -h])) / (2.0 * h);
        assert!(gx.abs() < 1e-10 && gy.abs() < 1e-10);
    }
}

#[test]
fn phi_decomposition_matches_direct_phase() {
    for (f, x0) in [(quadric(), quadric_x0()), (cross(), cross_x0())] {
        let (s, phi) = phi_for(&f, &x0, [0.01, -0.02]);
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let d4 = 0.05;
        for _ in 0..100 {
            let u = rand_in(&mut rng, [0.0, 0.0], d4);
            let direct = phi_direct(&s, phi.z0, u);
            assert!((phi.phi(u) - direct).abs() < 1e-10, "{} vs {direct}", phi.phi(u));
        }
    }
}

#[test]
fn phi11_at_origin() {
    let (s, phi) = phi_for(&cross(), &cross_x0(), [0.02, 0.01]);
    let z = phi.z0;
    let want = 0.5 * (s.hess(z)[0][0] - s.a[0] / (z[0] * z[0]));
    assert!((phi.phi_ij([0.0, 0.0])[0] - want).abs() < 1e-12);
    let want22 = 0.5 * (s.hess(z)[1][1] - s.a[1] / (z[1] * z[1]));
    assert!((phi.phi_ij([0.0, 0.0])[2] - want22).abs() < 1e-12);
    assert!((phi.phi_ij([0.0, 0.0])[1] - 0.5 * s.hess(z)[0][1]).abs() < 1e-12);
}

#[test]
fn phi_gradients_match_differences() {
    let (_, phi) = phi_for(&cross(), &cross_x0(), [0.02, 0.01]);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..100 {
        let u = rand_in(&mut rng, [0.0, 0.0], 0.1);
        let g = phi.phi_ij_grad(u);
        let h = 1e-6;
        for k in 0..2 {
            let mut p = u;
            let mut m = u;
            p[k] += h;
            m[k] -= h;
            let (a, b) = (phi.phi_ij(p), phi.phi_ij(m));
            for i in 0..3 {
                assert!((g[i][k] - (a[i] - b[i]) / (2.0 * h)).abs() < 1e-7);
            }
        }
    }
}

#[test]
fn log_ratio_limit_is_enforced() {
    let (_, phi) = phi_for(&quadric(), &quadric_x0(), [0.0, 0.0]);
    let bx = oscbound::AxisBox::cube(&[0.0, 0.0], 0.16);
    assert!(matches!(phi.derivative_bounds(&bx), Err(Error::Domain(_))));
    assert!(phi.derivative_bounds(&bx.scaled(0.5)).is_ok());
}

#[test]
fn case_two_chart_rejects_mixed_term() {
    let (_, phi) = phi_for(&cross(), &cross_x0(), [0.0, 0.0]);
    assert!(matches!(
        build_chart(phi, CaseLabel::CaseII, 0.01, 0.02, &ChartOptions::default()),
        Err(Error::Domain(_))
    ));
}

#[test]
fn morse_jacobian_at_origin() {
    let c = chart_at(&cross(), &cross_x0(), CaseLabel::CaseI);
    let j = c.map.jac([0.0, 0.0]);
    let p = c.map.phi.phi_ij([0.0, 0.0]);
    assert_eq!(j[1][0], 0.0);
    assert!((j[0][0] - (c.map.eps[0] * p[0]).sqrt()).abs() < 1e-15);
    assert!((j[0][1] - (c.map.eps[0] * p[0]).sqrt() * p[1] / p[0]).abs() < 1e-15);
}

#[test]
fn morse_jacobian_matches_differences() {
    for (f, x0, case) in [
        (cross(), cross_x0(), CaseLabel::CaseI),
        (quadric(), quadric_x0(), CaseLabel::CaseII),
    ] {
        let c = chart_at(&f, &x0, case);
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..100 {
            let u = rand_in(&mut rng, [0.0, 0.0], c.delta4);
            let j = c.map.jac(u);
            let fd = fd_jacobian(&c.map, u, 1e-6 * c.delta4.max(1e-3));
            let s = max_abs_entry(&j);
            for r in 0..2 {
                for k in 0..2 {
                    assert!((j[r][k] - fd[r][k]).abs() <= 1e-6 * s, "{j:?} vs {fd:?}");
                }
            }
        }
    }
}

fn max_identity_residual(c: &MorseChart, r: f64, seed: u64) -> (f64, f64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (s, z0) = (c.map.phi.slice(), c.map.phi.z0);
    let mut worst = 0.0f64;
    let mut phimax = 0.0f64;
    for _ in 0..1000 {
        let u = rand_in(&mut rng, [0.0, 0.0], r);
        let direct = phi_direct(s, z0, u);
        let y = c.map.eval(u);
        worst = worst.max((c.map.recombine(y) - direct).abs());
        phimax = phimax.max(direct.abs());
    }
    (worst, phimax)
}

#[test]
fn morse_identity_case_one() {
    let c = chart_at(&cross(), &cross_x0(), CaseLabel::CaseI);
    assert_eq!(c.map.case, CaseLabel::CaseI);
    for r in [c.delta6, c.delta5] {
        let (res, _) = max_identity_residual(&c, r, 1);
        assert!(res < 1e-9, "residual {res} at radius {r}");
    }
    // also for a generic critical point, where the log tail matters
    let (_, phi) = phi_for(&cross(), &cross_x0(), [0.02, -0.01]);
    let c = build_chart(phi, CaseLabel::CaseI, 0.01, 0.02, &ChartOptions::default()).unwrap();
    assert!(max_identity_residual(&c, c.delta5, 2).0 < 1e-9);
}

#[test]
fn morse_identity_case_two() {
    let c = chart_at(&quadric(), &quadric_x0(), CaseLabel::CaseII);
    assert_eq!(c.signs[1], 0);
    for r in [c.delta6, c.delta5] {
        assert!(max_identity_residual(&c, r, 3).0 < 1e-9);
    }
}

#[test]
fn morse_form_scales_quadratically() {
    let c = chart_at(&cross(), &cross_x0(), CaseLabel::CaseI);
    let mut prev: Option<(f64, f64)> = None;
    let mut r = c.delta5;
    for _ in 0..5 {
        let (res, phimax) = max_identity_residual(&c, r, 4);
        // the identity is exact, so the residual is rounding in G(z0 + u) - G(z0)
        assert!(res <= 1e-12 * phimax + 1e-15, "{res} vs {phimax}");
        if let Some((_, p)) = prev {
            let q = p / phimax;
            assert!((q - 4.0).abs() < 0.4, "ratio {q}");
        }
        prev = Some((res, phimax));
        r *= 0.5;
    }
}

#[test]
fn chart_certificates_hold_on_samples() {
    for (f, x0, case) in [
        (cross(), cross_x0(), CaseLabel::CaseI),
        (quadric(), quadric_x0(), CaseLabel::CaseII),
    ] {
        let c = chart_at(&f, &x0, case);
        assert!(c.m4 > 0.0 && c.m5 > 0.0);
        assert!(c.delta5 <= c.delta4 && c.delta6 < 0.02f64.min(c.delta5) / 5.0);
        assert!(c.f_sup < c.m5 / 4.0);
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..1000 {
            let u = rand_in(&mut rng, [0.0, 0.0], c.delta4);
            let p = c.map.phi.phi_ij(u);
            assert!(p[0].abs() > c.m4 && c.map.phi.det(u).abs() > c.m4);
            if case == CaseLabel::CaseI {
                assert!(p[1].abs() > c.m4);
            } else {
                assert!(p[2].abs() > c.m4);
            }
            let w = rand_in(&mut rng, [0.0, 0.0], 4.0 * c.delta6);
            let y = c.map.eval(w);
            assert!(y[0].hypot(y[1]) < c.m5 / 4.0);
        }
    }
}

#[test]
fn ladder_radii_are_ordered() {
    for (f, x0) in [(quadric(), quadric_x0()), (cross(), cross_x0())] {
        let l = ladder(&f, &x0);
        assert!(l.m_frak > 0.0 && l.m > 0.0 && l.eta0 > 0.0);
        assert!(l.delta_prime <= l.delta / 2.0);
        assert!(l.delta1 < l.delta_prime / 2.0 && l.delta1 < l.rho_min / 2.0);
        assert!(l.delta6 < l.delta1.min(l.chart.delta5) / 5.0);
        assert!(l.delta_tilde <= l.delta1);
        assert!(l.delta7 < l.delta_tilde.min(l.delta1) && l.delta7 <= l.delta6);
        assert_eq!(l.delta0, l.delta7 / 2.0);
        assert!(l.weight_box().positive_unit());
        // the chart sits at u0 itself
        assert_eq!(l.chart.z0, l.u0);
        assert!(l.b2().contains(&l.chart.z0));
    }
}

#[test]
fn eta_square_lies_in_image_of_b2() {
    for (f, x0) in [(quadric(), quadric_x0()), (cross(), cross_x0())] {
        let l = ladder(&f, &x0);
        let s = PhaseSlice::new(&f, (0, 1), &l.v0, [0.0, 0.0]).unwrap();
        let c = s.psi(l.u0);
        let w = oscbound::AxisBox::cube(&l.u0, l.delta_prime);
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for _ in 0..1000 {
            let y = rand_in(&mut rng, c, 7.0 * l.eta0);
            let u = newton_psi(&s, y, l.u0, &w).expect("preimage");
            assert!(l.b2().contains(&u), "{u:?}");
        }
    }
}

#[test]
fn ladder_uniform_bounds_hold_on_samples() {
    let f = cross();
    let l = ladder(&f, &cross_x0());
    let s0 = PhaseSlice::new(&f, (0, 1), &l.v0, [0.0, 0.0]).unwrap();
    let c = s0.psi(l.u0);
    let mut rng = ChaCha8Rng::seed_from_u64(43);
    for _ in 0..1000 {
        let v = [l.v0[0] + 2.0 * l.delta7 * rng.gen_range(-1.0..1.0)];
        let s = PhaseSlice::new(&f, (0, 1), &v, [0.0, 0.0]).unwrap();
        let y = s.psi(rand_in(&mut rng, l.u0, 2.0 * l.delta7));
        assert!((y[0] - c[0]).abs().max((y[1] - c[1]).abs()) < l.eta0 / 2.0);

        let v = [l.v0[0] + 2.0 * l.delta_tilde * rng.gen_range(-1.0..1.0)];
        let s = PhaseSlice::new(&f, (0, 1), &v, [0.0, 0.0]).unwrap();
        let u = rand_in(&mut rng, l.u0, l.delta6);
        let (a, b) = (s.psi(u), s0.psi(u));
        assert!((a[0] - b[0]).abs().max((a[1] - b[1]).abs()) < l.eta0);
    }
}

#[test]
fn ladder_golden() {
    for (name, f, x0) in [
        ("ladder_quadric.json", quadric(), quadric_x0()),
        ("ladder_cross.json", cross(), cross_x0()),
    ] {
        let l = ladder(&f, &x0);
        let again = ladder(&f, &x0);
        assert_eq!(l.to_json(), again.to_json());
        let v: serde_json::Value = serde_json::from_str(&l.to_json()).unwrap();
        common::golden::check(name, &v, 1e-9);
    }
}

#[test]
fn ladder_rejects_inapplicable_point() {
    let f = parse_poly("x1*x2", Some(2)).unwrap();
    let r = classify_case(&f, 0, 1, &[0.5, 0.5], 0.1, DEFAULT_GRID).unwrap();
    assert!(matches!(build_ladder(&f, &r, &LadderOptions::default()), Err(Error::Domain(_))));
}

#[test]
fn branch_examples() {
    let f = quadric();
    let l = ladder(&f, &quadric_x0());
    let s = PhaseSlice::new(&f, (0, 1), &l.v0, [0.0, 0.0]).unwrap();

    let large = s.with_a([2.0 * l.lambda[0], 0.0]);
    match branch_classify(&l, &large) {
        Branch::LargeA { j, first_lower, second_lower } => {
            assert_eq!(j, 0);
            assert_eq!(first_lower, l.lambda[0] / (2.0 * l.rho_max));
            assert_eq!(second_lower, l.lambda[0] / (2.0 * l.rho_max * l.rho_max));
        }
        b => panic!("{b:?}"),
    }

    // Psi(u0) = (0.18, 0.32) is far from the origin at the scale of eta0
    match branch_classify(&l, &s) {
        Branch::NoCritical { j0, first_lower, second_upper } => {
            assert_eq!(first_lower, l.eta0 / l.rho_max);
            let r2 = l.rho_min * l.rho_min;
            assert_eq!(second_upper, l.lambda[j0] / (2.0 * r2) + l.lambda[j0] / r2);
        }
        b => panic!("{b:?}"),
    }

    let c = s.psi(l.u0);
    match branch_classify(&l, &s.with_a([-c[0], -c[1]])) {
        Branch::Critical { z0, residual } => {
            assert!((z0[0] - l.u0[0]).abs() < 1e-12 && (z0[1] - l.u0[1]).abs() < 1e-12);
            assert!(residual < 1e-12);
        }
        b => panic!("{b:?}"),
    }
    let regions = BranchRegions::for_slice(&l, &s);
    assert_eq!(regions.d1.radius, vec![l.eta0; 2]);
    assert_eq!(regions.d2.radius, vec![3.0 * l.eta0; 2]);
}

#[test]
fn no_critical_bound_holds_on_b3() {
    for (f, x0) in [(quadric(), quadric_x0()), (cross(), cross_x0())] {
        let l = ladder(&f, &x0);
        let mut rng = ChaCha8Rng::seed_from_u64(47);
        let mut seen = 0;
        for trial in 0..60 {
            let v = [l.v0[0] + l.delta0 * rng.gen_range(-1.0..1.0)];
            let s = PhaseSlice::new(&f, (0, 1), &v, [0.0, 0.0]).unwrap();
            let c = s.psi(l.u0);
            // just outside the critical square, or anywhere in the A range
            let a = if trial % 2 == 0 {
                let k = 2.0 + rng.gen_range(0.01..3.0);
                let sgn = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
                [-c[0] - sgn * k * l.eta0, -c[1] + rng.gen_range(-1.0..1.0) * l.eta0]
            } else {
                [rng.gen_range(-l.lambda[0]..l.lambda[0]), rng.gen_range(-l.lambda[1]..l.lambda[1])]
            };
            let s = s.with_a(a);
            if let Branch::NoCritical { j0, first_lower, .. } = branch_classify(&l, &s) {
                seen += 1;
                for _ in 0..1000 {
                    let u = rand_in(&mut rng, l.u0, l.delta7);
                    assert!(s.critical_residual(u)[j0].abs() >= first_lower);
                }
            }
        }
        assert!(seen >= 40, "only {seen} NoCritical slices");
    }
}

#[test]
fn branches_cover_a_grid_consistently() {
    let f = quadric();
    let l = ladder(&f, &quadric_x0());
    let coarse: Vec<f64> = (-4..=4).map(|k| k as f64 * 2.5).collect();
    let fine: Vec<f64> = (-8..=8).map(|k| k as f64 * 1.25).collect();
    for tau in [1.0, 10.0, 100.0] {
        let label = |t1: f64, t2: f64| {
            let s = PhaseSlice::from_t(&f, (0, 1), &l.v0, [t1 * tau, t2 * tau], tau).unwrap();
            branch_classify(&l, &s)
        };
        for &t1 in &coarse {
            for &t2 in &coarse {
                let b = label(t1, t2);
                assert_ne!(b, Branch::Unresolved);
                // refinement revisits the coarse cell and must agree
                assert!(fine.contains(&t1) && fine.contains(&t2));
                assert_eq!(label(t1, t2), b);
            }
        }
    }
}
