use proptest::prelude::*;

use filippov::bifurcation::vi::predicted_label;
use filippov::bifurcation::*;
use filippov::germ::fit_germ;
use filippov::interval::IntervalSet;
use filippov::maps::mirror_map;
use filippov::poly::{Poly1, Poly2};
use filippov::polycycle::{solve_all, DisplacementModel, Leg, ModelSpec, SyntheticModel, Unfolding};
use filippov::sigma::{classify, sliding_field, SigmaClass};
use filippov::trajectory::{filippov_trajectory, Regime, TrajectoryOpts};
use filippov::{Domain, FilippovSystem, PolyField, RunConfig, Side};
use filippov::germ::Germ;

fn linear(c: [f64; 6]) -> PolyField {
    PolyField::from_terms(&[(0, 0, c[0]), (1, 0, c[1]), (0, 1, c[2])], &[(0, 0, c[3]), (1, 0, c[4]), (0, 1, c[5])]).unwrap()
}

fn system(x: PolyField, y: PolyField, h: Poly2) -> FilippovSystem {
    FilippovSystem::new(Domain::new(-4.0, 4.0, -4.0, 4.0).unwrap(), x, y, h).unwrap()
}

fn coeffs6() -> impl Strategy<Value = [f64; 6]> {
    prop::array::uniform6(-1.0f64..1.0)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 128, ..ProptestConfig::default() })]

    #[test]
    fn class_follows_first_derivatives(cx in coeffs6(), cy in coeffs6(), x in -1.0f64..1.0) {
        let cfg = RunConfig::default();
        let z = system(linear(cx), linear(cy), Poly2::y());
        let sp = classify(&z, [x, 0.0], &cfg).unwrap();
        let (xh, yh) = (sp.xh, sp.yh);
        prop_assume!(xh.abs() > cfg.tol && yh.abs() > cfg.tol);
        prop_assume!(!matches!(sp.class, SigmaClass::EquilibriumOnSigma(_)));
        let want = if xh * yh > cfg.tol {
            SigmaClass::Crossing
        } else if xh < 0.0 {
            SigmaClass::StableSliding
        } else {
            SigmaClass::UnstableSliding
        };
        prop_assert_eq!(sp.class, want);
    }

    #[test]
    fn sliding_field_is_tangent(cx in coeffs6(), cy in coeffs6(), x in -1.0f64..1.0, q in -0.5f64..0.5) {
        let cfg = RunConfig::default();
        let h = Poly2::from_terms(&[(0, 1, 1.0), (2, 0, q)]).unwrap();
        let z = system(linear(cx), linear(cy), h.clone());
        let p = z.sigma_point(x).unwrap();
        let sp = classify(&z, p, &cfg).unwrap();
        prop_assume!(sp.class.is_sliding() && (sp.yh - sp.xh).abs() > 1e-3);
        let f = sliding_field(&z, p, &cfg).unwrap();
        let dot = f[0] * h.dx().eval_at(p) + f[1] * h.dy().eval_at(p);
        prop_assert!(dot.abs() < 1e-12, "dot = {}", dot);
    }

    #[test]
    fn mirror_is_involution(a in -0.3f64..0.3, b in -0.3f64..0.3, x in -0.7f64..-0.05) {
        let cfg = RunConfig::default();
        let xf = PolyField::from_terms(&[(0, 0, 1.0), (0, 1, b)], &[(1, 0, 1.0), (2, 0, a)]).unwrap();
        let y = PolyField::from_terms(&[(0, 0, 1.0)], &[(0, 0, 1.0)]).unwrap();
        let z = system(xf, y, Poly2::y());
        let r = mirror_map(&z.plus, Side::Minus, x, &cfg).unwrap();
        let back = mirror_map(&z.plus, Side::Minus, r, &cfg).unwrap();
        prop_assert!(r > 0.0);
        prop_assert!((back - x).abs() < 1e-8, "rho(rho({})) = {}", x, back);
    }

    #[test]
    fn fit_recovers_polynomial(c in prop::collection::vec(-2.0f64..2.0, 1..6), base in -1.0f64..1.0) {
        let p = Poly1::new(c.clone());
        let nodes: Vec<(f64, f64)> = (0..24)
            .map(|k| {
                let x = base - 0.2 + 0.4 * k as f64 / 23.0;
                (x, p.eval(x - base))
            })
            .collect();
        let g = fit_germ(&nodes, base, c.len() - 1, 1e10).unwrap();
        for (k, ck) in c.iter().enumerate() {
            prop_assert!((g.coeff(k) - ck).abs() < 1e-8, "coefficient {}", k);
        }
        prop_assert!(g.high_confidence());
    }

    #[test]
    fn unique_solutions_match_roots(
        beta in -0.05f64..0.05, kappa in 0.2f64..1.5, neg in any::<bool>(),
        c3 in -0.5f64..0.5, d in 0.5f64..2.0, e2 in -0.3f64..0.3,
    ) {
        let cfg = RunConfig::default();
        let kappa = if neg { -kappa } else { kappa };
        let m = SyntheticModel::new(ModelSpec {
            k: 1,
            legs: vec![Leg {
                tu: Germ::exact(0.0, vec![beta, 0.0, kappa, c3], 0.5),
                dts: Germ::exact(0.0, vec![0.0, d, e2], 0.5),
                sigma: vec![[-0.5, 0.5]],
                a: 0.0,
            }],
            unfolding: Unfolding::default(),
            e_ii: false,
        })
        .unwrap();
        let sols = solve_all(&m, &cfg);
        let (lo, hi) = m.window(0);
        let roots: Vec<f64> = m.loop_poly().real_roots(lo, hi).into_iter().filter(|r| m.sigma(0).contains(*r)).collect();
        prop_assert_eq!(sols.len(), roots.len());
        for (s, r) in sols.iter().zip(&roots) {
            prop_assert!((s.x[0] - r).abs() < 1e-10);
        }
    }

    #[test]
    fn vi_matches_closed_form(a in -0.15f64..0.15, b in -0.12f64..0.12) {
        // stay clear of every curve
        let gap = [-8.0, -4.0, 8.0, -1.0, 2.0].iter().map(|c| (b - c * a * a).abs()).fold(f64::INFINITY, f64::min);
        prop_assume!(gap > 1e-4 && a.abs() > 1e-3);
        let cfg = RunConfig::default();
        let r = ViFamily::standard().classify([a, b], &cfg).unwrap();
        prop_assert_eq!(r.label, predicted_label(1.0, 2.0, a, b));
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, ..ProptestConfig::default() })]

    #[test]
    fn trajectory_arcs_are_consistent(x0 in -1.5f64..1.5, y0 in -1.0f64..1.0, lam in 0.5f64..1.5) {
        let cfg = RunConfig::default();
        let xf = PolyField::from_terms(&[(0, 0, 1.0)], &[(3, 0, 1.0), (1, 0, -lam)]).unwrap();
        let yf = PolyField::from_terms(&[(0, 0, -1.0)], &[(0, 0, 0.5), (1, 0, 0.3)]).unwrap();
        let z = FilippovSystem::new(Domain::new(-3.0, 3.0, -3.0, 3.0).unwrap(), xf, yf, Poly2::y()).unwrap();
        let opts = TrajectoryOpts { tmax: 4.0, sample_dt: Some(0.05), ..TrajectoryOpts::default() };
        let Ok(t) = filippov_trajectory(&z, [x0, y0], &opts, &cfg) else { return Ok(()) };
        for arc in &t.arcs {
            for (_, p) in &arc.samples {
                let h = p[1];
                match arc.regime {
                    Regime::P => prop_assert!(h >= -1e-9),
                    Regime::M => prop_assert!(h <= 1e-9),
                    Regime::S => prop_assert!(h.abs() <= 1e-9),
                }
            }
        }
        for w in t.arcs.windows(2) {
            let (a, b) = (w[0].samples.last().unwrap(), w[1].samples.first().unwrap());
            prop_assert!((a.1[0] - b.1[0]).hypot(a.1[1] - b.1[1]) < 1e-10);
            prop_assert!((a.0 - b.0).abs() < 1e-10);
        }
    }
}

#[test]
fn unknown_config_keys_rejected() {
    assert!(RunConfig::from_json(r#"{"tol": 1e-8}"#).is_ok());
    assert!(RunConfig::from_json(r#"{"tolerance": 1e-8}"#).is_err());
}

#[test]
fn sigma_sets_are_disjoint() {
    let s = IntervalSet::from_pairs(&[[0.0, 1.0], [0.5, 2.0], [3.0, 4.0]], (-10.0, 10.0));
    let p = s.pairs();
    assert_eq!(p, vec![[0.0, 2.0], [3.0, 4.0]]);
    assert!(s.contains(1.5) && !s.contains(2.5));
    for w in p.windows(2) {
        assert!(w[0][1] < w[1][0]);
    }
    let t = IntervalSet::from_pairs(&[[-1.0, 0.0], [0.0, 1.0]], (-1.0, 1.0));
    assert_eq!(t.parts.len(), 2);
    assert!(t.contains(0.0));
}

/// Label changes between neighbouring cells happen next to a traced curve.
fn check_adjacency(s: &dyn Scenario) {
    let cfg = RunConfig::default();
    let grid = GridSpec {
        ranges: s.default_ranges(),
        n: [20, 20],
    };
    let d = sweep_diagram(s, grid, &cfg).unwrap();
    let ((a0, a1), (b0, b1)) = (grid.ranges[0], grid.ranges[1]);
    let (da, db) = ((a1 - a0) / 19.0, (b1 - b0) / 19.0);
    let diag = da.hypot(db);
    let samples: Vec<[f64; 2]> = d.curves.iter().flat_map(|c| c.samples.iter().map(|p| [p[1], p[2]])).collect();
    for i in 0..20 {
        for j in 0..20 {
            for (di, dj) in [(1, 0), (0, 1)] {
                let (i2, j2) = (i + di, j + dj);
                if i2 >= 20 || j2 >= 20 {
                    continue;
                }
                let (l1, l2) = (d.label_at(i, j).unwrap(), d.label_at(i2, j2).unwrap());
                if l1 == l2 {
                    continue;
                }
                let mid = [a0 + da * (i as f64 + di as f64 / 2.0), b0 + db * (j as f64 + dj as f64 / 2.0)];
                // the coordinate axes are bifurcation lines that are not traced
                let near = mid[0].abs() <= diag
                    || mid[1].abs() <= diag
                    || samples.iter().any(|q| (q[0] - mid[0]).hypot(q[1] - mid[1]) <= diag);
                assert!(near, "{}: {l1} | {l2} at {mid:?} without a curve", s.id());
            }
        }
    }
}

#[test]
fn vi_adjacency() {
    check_adjacency(&ViFamily::standard());
}

#[test]
fn twofold_adjacency() {
    check_adjacency(&TwoFoldFamily::standard());
}

#[test]
fn cusp_adjacency() {
    check_adjacency(&CuspFamily::standard());
}
