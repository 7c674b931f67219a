//! One PASS/FAIL line per acceptance criterion.

use std::process::Command;
use std::time::Instant;

use rand::{rngs::StdRng, Rng, SeedableRng};

use filippov::bifurcation::circle::CircleScenario;
use filippov::bifurcation::vi::predicted_label;
use filippov::bifurcation::*;
use filippov::flow::{Section, TimeDir};
use filippov::germ::{fit_map, Germ};
use filippov::interval::IntervalSet;
use filippov::maps::{mirror_map, transition_map, Source};
use filippov::poly::Poly2;
use filippov::polycycle::{
    first_return, solve_all, DisplacementModel, Leg, ModelSpec, OdeLeg, OdeModel, Stability,
    SyntheticModel, Unfolding,
};
use filippov::sigma::{classify, sliding_field};
use filippov::{Domain, FilippovSystem, PolyField, RunConfig, Side};

type Check = Result<String, String>;

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn field(fx: &[(u32, u32, f64)], fy: &[(u32, u32, f64)]) -> PolyField {
    PolyField::from_terms(fx, fy).unwrap()
}

fn system(x: PolyField, y: PolyField, h: Poly2) -> FilippovSystem {
    FilippovSystem::new(Domain::new(-4.0, 4.0, -4.0, 4.0).unwrap(), x, y, h).unwrap()
}

fn one_leg(tu: Vec<f64>, dts: Vec<f64>, w: f64, sigma: Vec<[f64; 2]>) -> SyntheticModel {
    SyntheticModel::new(ModelSpec {
        k: 1,
        legs: vec![Leg {
            tu: Germ::exact(0.0, tu, w),
            dts: Germ::exact(0.0, dts, w),
            sigma,
            a: 0.0,
        }],
        unfolding: Unfolding::default(),
        e_ii: false,
    })
    .unwrap()
}

fn transition_closed_form() -> Check {
    let cfg = RunConfig::default();
    let z = system(field(&[(0, 0, 1.0)], &[(1, 0, 1.0)]), field(&[(0, 0, 1.0)], &[(0, 0, 1.0)]), Poly2::y());
    let sec = Section::new([1.0, 0.0], [0.0, 1.0], 2.0).unwrap();
    let t = |x: f64| transition_map(&z.plus, &Source::Sigma, &sec, TimeDir::Forward, x, &cfg);
    let mut worst: f64 = 0.0;
    for k in 0..50 {
        let x = -0.9 + 1.8 * k as f64 / 49.0;
        let v = t(x).map_err(|e| e.to_string())?;
        worst = worst.max((v - (1.0 - x * x) / 2.0).abs());
    }
    ensure(worst < 1e-8, format!("max error {worst:e}"))?;
    let g = fit_map(t, 0.0, -0.1, 0.1, 2, 12, cfg.cond_max).map_err(|e| e.to_string())?;
    let kappa = g.coeff(2);
    ensure((kappa + 0.5).abs() < 1e-6, format!("kappa = {kappa}"))?;
    let x2h = z.plus.lie_at(2, [0.0, 0.0]);
    ensure(kappa.signum() == -x2h.signum(), "sign law violated")?;
    Ok(format!("max error {worst:.1e}, kappa = {kappa:.9}"))
}

fn mirror_example() -> Check {
    let cfg = RunConfig::default();
    let z = FilippovSystem::new(
        Domain::new(-3.0, 3.0, -3.0, 3.0).unwrap(),
        field(&[(0, 0, 1.0)], &[(3, 0, 1.0), (1, 0, -1.0)]),
        field(&[(0, 0, 1.0)], &[(0, 0, 1.0)]),
        Poly2::y(),
    )
    .unwrap();
    let a = mirror_map(&z.plus, Side::Minus, -0.5, &cfg).map_err(|e| e.to_string())?;
    let b = mirror_map(&z.plus, Side::Minus, 2.0, &cfg).map_err(|e| e.to_string())?;
    ensure((a + 1.75f64.sqrt()).abs() < 1e-8, format!("rho(-0.5) = {a}"))?;
    ensure((b + 2.0).abs() < 1e-8, format!("rho(2) = {b}"))?;
    Ok(format!("rho(-0.5) = {a:.10}, rho(2) = {b:.10}"))
}

/// Shortest distance from `(a, b)` to the sampled curves `b = c a^2`.
fn curve_distance(coefs: &[(f64, bool)], a: f64, b: f64, lo: f64, hi: f64) -> f64 {
    let mut d = f64::INFINITY;
    for &(c, pos) in coefs {
        for k in 0..=4000 {
            let s = lo + (hi - lo) * k as f64 / 4000.0;
            if (pos && s < 0.0) || (!pos && s > 0.0) {
                continue;
            }
            d = d.min((s - a).hypot(c * s * s - b));
        }
    }
    d
}

fn vi_synthetic() -> Check {
    let f = ViFamily::standard();
    let cfg = RunConfig::default();
    let exact = [
        ("beta1", -8.0, None),
        ("beta2", -4.0, Some(true)),
        ("beta3", 8.0, Some(false)),
        ("beta4", -1.0, Some(true)),
        ("beta5", 2.0, Some(false)),
    ];
    for a in [-0.1, -0.05, 0.05, 0.1] {
        for (n, c, side) in exact {
            if side.map(|pos| pos != (a > 0.0)).unwrap_or(false) {
                ensure(foldfold_curve(&f, n, a).is_err(), format!("{n} defined at {a}"))?;
                continue;
            }
            let v = foldfold_curve(&f, n, a).map_err(|e| e.to_string())?;
            ensure((v - c * a * a).abs() < 1e-10, format!("{n}({a}) = {v}"))?;
        }
    }
    let grid = GridSpec {
        ranges: f.default_ranges(),
        n: [41, 41],
    };
    let d = sweep_diagram(&f, grid, &cfg).map_err(|e| e.to_string())?;
    let ((a0, a1), (b0, b1)) = (grid.ranges[0], grid.ranges[1]);
    let diag = ((a1 - a0) / 40.0).hypot((b1 - b0) / 40.0);
    let coefs = [(-8.0, true), (-8.0, false), (-4.0, true), (8.0, false), (-1.0, true), (2.0, false)];
    let (mut far, mut bad) = (0, 0);
    let mut seen = std::collections::BTreeSet::new();
    for c in &d.cells {
        let r = c.report.as_ref().ok_or("cell error")?;
        seen.insert(r.item);
        if curve_distance(&coefs, c.p[0], c.p[1], a0, a1) <= diag {
            continue;
        }
        far += 1;
        if r.label != predicted_label(1.0, 2.0, c.p[0], c.p[1]) {
            bad += 1;
        }
        if r.item == Some(3) {
            let s: Vec<Stability> = r.crossing.iter().map(|e| e.stability).collect();
            ensure(
                s == [Stability::Attracting, Stability::Repelling] && r.crossing[0].x[0] < r.crossing[1].x[0],
                "region 3 cycles not outer attracting / inner repelling",
            )?;
        }
    }
    ensure(bad == 0, format!("{bad} of {far} far cells mislabelled"))?;
    for it in [1, 3, 5] {
        ensure(seen.contains(&Some(it)), format!("item {it} missing from grid"))?;
    }
    // points on the curves
    let on = [
        (0.1, -0.08, "VI-2"),
        (0.1, -0.04, "VI-4"),
        (-0.1, 0.08, "VI-6"),
        (0.1, -0.01, "VI-5/b4="),
        (-0.1, 0.02, "VI-1/b5="),
        (0.1, -0.02, "VI-5/b4<"),
        (0.1, -0.005, "VI-5/b4>"),
        (-0.1, 0.01, "VI-1/b5<"),
        (-0.1, 0.05, "VI-1/b5>"),
    ];
    for (a, b, want) in on {
        let r = f.classify([a, b], &cfg).map_err(|e| e.to_string())?;
        ensure(r.label == want, format!("({a}, {b}) gave {} not {want}", r.label))?;
    }
    Ok(format!("curves exact, {far} far cells agree, curve points labelled"))
}

fn twofold() -> Check {
    let f = TwoFoldFamily::standard();
    let cfg = RunConfig::default();
    for b in [-0.2, -0.1, -0.03, 0.0, 0.03, 0.1, 0.2] {
        let (g1, g2) = twofold_curves(&f, b).map_err(|e| e.to_string())?;
        ensure((g1 - b * b).abs() < 1e-10 && (g2 + b * b).abs() < 1e-10, format!("gamma at {b}"))?;
    }
    // item -> (crossing, polycycles, sliding (folds, segments), heteroclinic)
    type Want = (usize, usize, Option<(usize, usize)>, bool);
    let table: [(u32, &[(f64, f64)], Want); 13] = [
        (1, &[(0.05, 0.1), (0.03, 0.05), (0.08, 0.02)], (0, 0, Some((1, 1)), false)),
        (2, &[(0.01, 0.1), (0.0025, 0.05)], (0, 1, None, false)),
        (3, &[(0.005, 0.1), (0.001, 0.05)], (1, 0, None, false)),
        (4, &[(0.0, 0.1), (0.0, 0.03)], (1, 0, None, true)),
        (5, &[(-0.05, 0.1), (-0.08, 0.01)], (1, 0, None, false)),
        (6, &[(-0.05, 0.0), (-0.1, 0.0)], (1, 0, None, true)),
        (7, &[(0.0, 0.0)], (0, 1, None, false)),
        (8, &[(-0.1, -0.005), (-0.05, -0.001)], (1, 0, None, false)),
        (9, &[(-0.1, -0.01), (-0.05, -0.0025)], (0, 1, None, false)),
        (10, &[(-0.1, -0.05), (-0.02, -0.08)], (0, 0, Some((1, 1)), false)),
        (11, &[(0.0, -0.05), (0.0, -0.1)], (0, 0, Some((2, 1)), false)),
        (12, &[(0.05, -0.05), (0.01, -0.09)], (0, 0, Some((2, 2)), false)),
        (13, &[(0.05, 0.0), (0.1, 0.0)], (0, 0, Some((2, 1)), false)),
    ];
    for (item, pts, want) in table {
        for &(b1, b2) in pts {
            let r = f.classify([b1, b2], &cfg).map_err(|e| e.to_string())?;
            let sl = match r.sliding.as_slice() {
                [] => None,
                [s] => Some((s.folds, s.segments)),
                _ => return Err(format!("item {item}: several sliding cycles")),
            };
            let got = (r.attracting(), r.polycycles.len(), sl, r.heteroclinic);
            ensure(got == want && r.crossing.len() == want.0, format!("item {item} at ({b1}, {b2}): {got:?}"))?;
            if want.1 == 1 {
                ensure(r.polycycles[0].stability == Stability::CAttracting, format!("item {item} polycycle not C-attracting"))?;
            }
            ensure(r.item == Some(item), format!("item {item} labelled {:?}", r.item))?;
        }
    }
    Ok("gamma curves exact, 13 items reproduced".into())
}

/// Value at zero of the quadratic through three points in `s`.
fn richardson(s: [f64; 3], v: [f64; 3]) -> f64 {
    let l = |i: usize, j: usize, k: usize| s[j] * s[k] / ((s[i] - s[j]) * (s[i] - s[k]));
    v[0] * l(0, 1, 2) + v[1] * l(1, 0, 2) + v[2] * l(2, 0, 1)
}

fn cusp() -> Check {
    let f = CuspFamily::standard();
    let c = cusp_curves(&f, 0.03).map_err(|e| e.to_string())?;
    for (n, v, want) in [("Vbar", c.vbar, -0.102), ("Ibar", c.ibar, 0.098), ("Abar", c.abar, 0.198)] {
        ensure((v - want).abs() < 1e-10, format!("{n} = {v}"))?;
    }
    let lams = [1e-4, 1e-3, 1e-2];
    let mut vs = [0.0; 3];
    let mut as_ = [0.0; 3];
    for (k, &l) in lams.iter().enumerate() {
        let c = cusp_curves(&f, l).map_err(|e| e.to_string())?;
        vs[k] = c.vbar.abs() / l.sqrt();
        as_[k] = c.abar.abs() / l.sqrt();
    }
    let s = lams.map(f64::sqrt);
    let (v0, a0) = (richardson(s, vs), richardson(s, as_));
    let (kv, ka) = (1.0 / 3f64.sqrt(), 2.0 / 3f64.sqrt());
    ensure((v0 - kv).abs() < 0.01 * kv, format!("Vbar coefficient {v0}"))?;
    ensure((a0 - ka).abs() < 0.01 * ka, format!("Abar coefficient {a0}"))?;
    Ok(format!("Vbar/sqrt -> {v0:.6} ({kv:.6}), Abar/sqrt -> {a0:.6} ({ka:.6})"))
}

fn ode_circle() -> Check {
    let cfg = RunConfig::default();
    let s = CircleScenario::new(&cfg).map_err(|e| e.to_string())?;
    let close = s.gamma0_closure().map_err(|e| e.to_string())?;
    ensure(close < 1e-6, format!("Gamma0 misses by {close:e}"))?;
    let (k, d) = (s.kappa(), s.dtilde());
    let a = 0.05;
    let b1 = s.curve("beta1", a).map_err(|e| e.to_string())?;
    let ratio = s.beta_eff(b1).map_err(|e| e.to_string())? / (a * a);
    let pred = 4.0 * k * d / (k - d);
    ensure((ratio - pred).abs() < 0.1 * pred.abs(), format!("beta1/alpha^2 = {ratio}, predicted {pred}"))?;
    let b2 = s.curve("beta2", a).map_err(|e| e.to_string())?;
    let z = s.system(a, 0.0).map_err(|e| e.to_string())?;
    for (bp, want) in [(0.5 * (b1 + b2), 2), (b2 - 0.001, 1), (b1 + 0.001, 0)] {
        let data = s.data(a, bp).map_err(|e| e.to_string())?;
        ensure(data.crossing.len() == want, format!("beta = {bp}: {} cycles, want {want}", data.crossing.len()))?;
        // each cycle is closed by the Filippov flow
        let z = s.system(a, bp).map_err(|e| e.to_string())?;
        let m = OdeModel::new(
            z,
            vec![OdeLeg {
                tau_u: Section::new([0.0, 2.0], [0.0, 1.0], 0.5).unwrap(),
                sigma: IntervalSet::open(-s.window, 0.0),
                window: (-s.window, 0.0),
            }],
            &cfg,
        );
        for c in &data.crossing {
            let (px, _) = m.first_return(c.x[0], Side::Plus).map_err(|e| e.to_string())?;
            ensure((px - c.x[0]).abs() < 1e-6, format!("cycle at {} returns to {px}", c.x[0]))?;
        }
    }
    drop(z);
    Ok(format!("beta1/alpha^2 = {ratio:.4} vs {pred:.4}, counts 2/1/0, closure {close:.1e}"))
}

fn first_return_law() -> Check {
    let mut notes = vec![];
    for (n, tu, dts) in [
        (2, vec![0.0, 0.0, 0.7, 0.3], vec![0.0, 1.3, 0.2]),
        (3, vec![0.0, 0.0, 0.0, 0.5, -0.4], vec![0.0, 0.9, -0.1]),
    ] {
        let m = one_leg(tu.clone(), dts.clone(), 0.5, vec![[0.0, 0.5]]);
        let want = tu[n] / dts[1];
        let mut errs = vec![];
        for x in [1e-2, 1e-3, 1e-4] {
            let (p, _) = first_return(&m, x).map_err(|e| e.to_string())?;
            let q = p / x.powi(n as i32);
            errs.push((q - want).abs() / want);
        }
        ensure(errs.iter().all(|e| *e < 0.05), format!("n = {n}: errors {errs:?}"))?;
        ensure(errs.windows(2).all(|w| w[1] <= w[0]), format!("n = {n}: no convergence"))?;
        for k in 1..50 {
            let x = 0.3 * k as f64 / 50.0;
            let (p, _) = first_return(&m, x).map_err(|e| e.to_string())?;
            ensure(p.abs() < x, format!("n = {n}: |P({x})| >= x"))?;
        }
        notes.push(format!("n={n} err {:.1e}", errs[2]));
    }
    Ok(notes.join(", "))
}

fn sliding_tangency(rng: &mut StdRng, cfg: &RunConfig) -> Result<(), String> {
    let mut count = 0;
    let mut tries = 0;
    while count < 1000 {
        tries += 1;
        ensure(tries < 100_000, "too few sliding points")?;
        let mut c = || rng.gen_range(-1.0..1.0);
        let x = field(&[(0, 0, c()), (1, 0, c()), (0, 1, c())], &[(0, 0, c()), (1, 0, c()), (0, 1, c())]);
        let y = field(&[(0, 0, c()), (1, 0, c()), (0, 1, c())], &[(0, 0, c()), (1, 0, c()), (0, 1, c())]);
        let h = Poly2::from_terms(&[(0, 1, 1.0), (2, 0, -0.3)]).unwrap();
        let z = system(x, y, h.clone());
        let px = rng.gen_range(-1.0..1.0);
        let p = z.sigma_point(px).map_err(|e| e.to_string())?;
        let Ok(sp) = classify(&z, p, cfg) else { continue };
        if !sp.class.is_sliding() || (sp.yh - sp.xh).abs() < 1e-3 {
            continue;
        }
        let f = sliding_field(&z, p, cfg).map_err(|e| e.to_string())?;
        let g = [h.dx().eval_at(p), h.dy().eval_at(p)];
        let dot = f[0] * g[0] + f[1] * g[1];
        ensure(dot.abs() < 1e-12, format!("<F, grad h> = {dot:e} at {p:?}"))?;
        count += 1;
    }
    Ok(())
}

fn involution(cfg: &RunConfig) -> Result<(), String> {
    let fields = [
        field(&[(0, 0, 1.0)], &[(1, 0, 1.0)]),
        field(&[(0, 0, 1.0)], &[(1, 0, 1.0), (2, 0, 0.5)]),
        field(&[(0, 0, 1.0), (0, 1, 0.2)], &[(1, 0, 1.0)]),
        field(&[(0, 0, 1.0)], &[(1, 0, 1.0), (0, 1, -0.3)]),
        field(&[(0, 0, 1.0), (2, 0, 0.5)], &[(1, 0, 1.0), (3, 0, 0.2)]),
    ];
    let y = field(&[(0, 0, 1.0)], &[(0, 0, 1.0)]);
    for (k, f) in fields.into_iter().enumerate() {
        let z = system(f, y.clone(), Poly2::y());
        for i in 0..100 {
            let x = -0.05 - 0.7 * i as f64 / 99.0;
            let r = mirror_map(&z.plus, Side::Minus, x, cfg).map_err(|e| format!("field {k}: {e}"))?;
            let back = mirror_map(&z.plus, Side::Minus, r, cfg).map_err(|e| format!("field {k}: {e}"))?;
            ensure((back - x).abs() < 1e-8, format!("field {k}: rho(rho({x})) = {back}"))?;
        }
    }
    Ok(())
}

fn eii_factorization(cfg: &RunConfig) -> Result<(), String> {
    let s = CircleScenario::new(cfg).map_err(|e| e.to_string())?;
    let (a, b) = (0.05, 0.002);
    let z = s.system(a, b).map_err(|e| e.to_string())?;
    let sec = Section::new([0.0, 2.0], [0.0, 1.0], 0.5).unwrap();
    let m = OdeModel::new(
        z.clone(),
        vec![OdeLeg {
            tau_u: sec,
            sigma: IntervalSet::open(-0.4, 0.0),
            window: (-0.4, 0.0),
        }],
        cfg,
    );
    let zeta = s.point(a, b).map_err(|e| e.to_string())?.zeta();
    for i in 0..20 {
        let x = -0.35 + (zeta - 0.01 + 0.35) * i as f64 / 19.0;
        let tu = m.tu(0, x).map_err(|e| e.to_string())?;
        let r = mirror_map(&z.minus, Side::Minus, x, cfg).map_err(|e| e.to_string())?;
        let tp = transition_map(&z.plus, &Source::Sigma, &sec, TimeDir::Forward, r, cfg).map_err(|e| e.to_string())?;
        ensure((tu - tp).abs() < 1e-8, format!("Tu({x}) = {tu}, T+(rho) = {tp}"))?;
    }
    Ok(())
}

fn uniqueness(rng: &mut StdRng, cfg: &RunConfig) -> Result<(), String> {
    for _ in 0..200 {
        let beta = rng.gen_range(-0.05..0.05);
        let kappa = rng.gen_range(0.2..1.5) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        let c3 = rng.gen_range(-0.5..0.5);
        let d = rng.gen_range(0.5..2.0);
        let e2 = rng.gen_range(-0.3..0.3);
        let m = one_leg(vec![beta, 0.0, kappa, c3], vec![0.0, d, e2], 0.5, vec![[-0.5, 0.5]]);
        let sols = solve_all(&m, cfg);
        let (lo, hi) = m.window(0);
        let roots: Vec<f64> = m.loop_poly().real_roots(lo, hi).into_iter().filter(|r| m.sigma(0).contains(*r)).collect();
        ensure(
            sols.len() == roots.len()
                && sols.iter().zip(&roots).all(|(s, r)| (s.x[0] - r).abs() < 1e-10),
            format!("solutions {:?} vs roots {roots:?}", sols.iter().map(|s| s.x[0]).collect::<Vec<_>>()),
        )?;
    }
    Ok(())
}

fn cli_determinism() -> Result<(), String> {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let sys = dir.path().join("sys.json");
    std::fs::write(
        &sys,
        r#"{"domain": [-3,3,-3,3], "X": {"fx": [[0,0,1]], "fy": [[1,0,1]]}, "Y": {"fx": [[0,0,1]], "fy": [[0,0,-1],[1,0,1]]}, "h": [[0,1,1]]}"#,
    )
    .map_err(|e| e.to_string())?;
    let sys = sys.to_str().unwrap().to_string();
    let runs: Vec<Vec<String>> = vec![
        vec!["classify", "--system", &sys, "--point", "0,0"],
        vec!["flow", "--system", &sys, "--point", "-1,0.5", "--tmax", "5", "--dt-out", "0.1"],
        vec!["mirror", "--system", &sys, "--x=-0.4"],
        vec!["transition", "--system", &sys, "--section", "1,0,0,1,2", "--window", "0.2"],
        vec!["polycycle-solve", "--scenario", "vi-foldfold-synthetic", "--point=0.1,-0.06"],
        vec!["scenario-curves", "--scenario", "cusp-synthetic", "--at", "0.03"],
    ]
    .into_iter()
    .map(|v| v.into_iter().map(String::from).collect())
    .collect();
    let bin = env!("CARGO_BIN_EXE_filippov");
    for args in &runs {
        let a = Command::new(bin).args(args).output().map_err(|e| e.to_string())?;
        let b = Command::new(bin).args(args).output().map_err(|e| e.to_string())?;
        ensure(a.status.success(), format!("{args:?} failed: {}", String::from_utf8_lossy(&a.stderr)))?;
        ensure(a.stdout == b.stdout, format!("{args:?} not byte stable"))?;
    }
    for sc in ["vi-foldfold-synthetic", "twofold-synthetic", "cusp-synthetic"] {
        let mut out = vec![];
        for k in 0..2 {
            let d = dir.path().join(format!("{sc}-{k}"));
            let threads = if k == 0 { "1" } else { "4" };
            let o = Command::new(bin)
                .args(["diagram", "--scenario", sc, "--grid", "15x15", "--threads", threads, "--out"])
                .arg(&d)
                .output()
                .map_err(|e| e.to_string())?;
            ensure(o.status.success(), format!("diagram {sc} failed"))?;
            let a = std::fs::read(d.join("diagram.csv")).map_err(|e| e.to_string())?;
            let b = std::fs::read(d.join("curves.csv")).map_err(|e| e.to_string())?;
            out.push((a, b));
        }
        ensure(out[0] == out[1], format!("diagram {sc} differs between runs"))?;
    }
    Ok(())
}

fn properties() -> Check {
    let cfg = RunConfig::default();
    let mut rng = StdRng::seed_from_u64(7);
    sliding_tangency(&mut rng, &cfg).map_err(|e| format!("sliding: {e}"))?;
    involution(&cfg).map_err(|e| format!("involution: {e}"))?;
    eii_factorization(&cfg).map_err(|e| format!("E-II: {e}"))?;
    uniqueness(&mut rng, &cfg).map_err(|e| format!("uniqueness: {e}"))?;
    cli_determinism().map_err(|e| format!("determinism: {e}"))?;
    Ok("sliding 1000 pts, involution 5x100, E-II, uniqueness 200 models, CLI reruns".into())
}

fn main() {
    let checks: [(&str, fn() -> Check); 8] = [
        ("transition map closed form", transition_closed_form),
        ("mirror map example", mirror_example),
        ("VI fold-fold synthetic oracle", vi_synthetic),
        ("two-fold synthetic", twofold),
        ("cusp synthetic", cusp),
        ("ODE circle VI scenario", ode_circle),
        ("first-return law", first_return_law),
        ("property suites", properties),
    ];
    let mut failed = vec![];
    for (k, (name, f)) in checks.iter().enumerate() {
        let t = Instant::now();
        let r = f();
        let dt = t.elapsed().as_secs_f64();
        match r {
            Ok(msg) => println!("PASS criterion {}: {name} ({msg}) [{dt:.2}s]", k + 1),
            Err(msg) => {
                println!("FAIL criterion {}: {name} ({msg}) [{dt:.2}s]", k + 1);
                failed.push(k + 1);
            }
        }
    }
    if !failed.is_empty() {
        eprintln!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
