//! Polycycle through a regular-cusp singularity, unfolded by `(lambda1, beta)`.

use serde::Serialize;

use super::diagram::{trace_curve, Curve};
use super::{crossing_inventory, trace_sliding, RegionReport, Scenario, SlidingEntry, ON_CURVE_TOL};
use crate::config::RunConfig;
use crate::germ::Germ;
use crate::poly::Poly1;
use crate::polycycle::{Leg, ModelSpec, SyntheticModel, Unfolding};
use crate::{Error, Result};

/// `Tu(x) = beta + lambda1 x + kappa x^3`, `DTs(x) = d x`.
#[derive(Debug, Clone, PartialEq)]
pub struct CuspFamily {
    pub kappa: f64,
    pub dtilde: f64,
    pub window: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CuspCurves {
    pub v: f64,
    pub i: f64,
    pub a: f64,
    pub vbar: f64,
    pub ibar: f64,
    pub abar: f64,
    pub degenerate: bool,
}

impl CuspFamily {
    pub fn new(kappa: f64, dtilde: f64, window: f64) -> Result<Self> {
        if !(kappa < 0.0) {
            return Err(Error::HypothesisViolated(format!(
                "cusp germ needs kappa < 0, got {kappa}"
            )));
        }
        if !(dtilde < 0.0) {
            // the return map must preserve orientation on the crossing side
            return Err(Error::HypothesisViolated(format!(
                "cusp family needs d < 0 for an orientation preserving return, got {dtilde}"
            )));
        }
        let fam = CuspFamily {
            kappa,
            dtilde,
            window,
        };
        let (_, poly, _) = crossing_inventory(&fam.model(0.0, 0.0)?, &RunConfig::default());
        if poly.len() != 1 || poly[0].x[0].abs() > 1e-9 {
            return Err(Error::HypothesisViolated(
                "no polycycle through the cusp at the origin".into(),
            ));
        }
        Ok(fam)
    }

    pub fn standard() -> Self {
        CuspFamily::new(-1.0, -1.0, 0.5).expect("standard cusp family")
    }

    fn tu_poly(&self, lambda1: f64, beta: f64) -> Poly1 {
        Poly1::new(vec![beta, lambda1, 0.0, self.kappa])
    }

    /// Visible fold, invisible fold and the second preimage of the visible
    /// fold level. The visible fold is the critical point on the positive
    /// side, as for the unperturbed orientation.
    pub fn folds(&self, lambda1: f64) -> Option<(f64, f64, f64)> {
        if !(lambda1 > 0.0) {
            return None;
        }
        let tu = self.tu_poly(lambda1, 0.0);
        let w = self.window;
        let crit = tu.derivative().real_roots(-w, w);
        let v = crit.iter().copied().filter(|c| *c > 0.0).fold(f64::NAN, f64::max);
        let i = crit.iter().copied().filter(|c| *c < 0.0).fold(f64::NAN, f64::min);
        if !v.is_finite() || !i.is_finite() {
            return None;
        }
        let level = &tu - &Poly1::constant(tu.eval(v));
        let rest = level.deflate(v).deflate(v);
        let a = rest.real_roots(-4.0 * w, 4.0 * w).into_iter().next()?;
        Some((v, i, a))
    }

    pub fn model(&self, lambda1: f64, beta: f64) -> Result<SyntheticModel> {
        let w = self.window;
        let sigma = if lambda1 > 0.0 {
            let (v, _, a) = self.folds(lambda1).ok_or(Error::OutsideWindow(lambda1))?;
            if a > -w {
                vec![[-w, a], [v, w]]
            } else {
                vec![[v, w]]
            }
        } else if lambda1 == 0.0 {
            vec![[-w, 0.0], [0.0, w]]
        } else {
            vec![[-w, w]]
        };
        SyntheticModel::new(ModelSpec {
            k: 1,
            legs: vec![Leg {
                tu: Germ::exact(0.0, vec![beta, lambda1, 0.0, self.kappa], w),
                dts: Germ::exact(0.0, vec![0.0, self.dtilde], w),
                sigma,
                a: 0.0,
            }],
            unfolding: Unfolding {
                beta,
                lambda1,
                ..Default::default()
            },
            e_ii: false,
        })
    }

    /// `Delta(x)` with `beta = 0`.
    fn delta0(&self, lambda1: f64, x: f64) -> f64 {
        self.tu_poly(lambda1, 0.0).eval(x) - self.dtilde * x
    }
}

/// Values of `beta` at which the root of the crossing system reaches `A`
/// and `V`, and at which the orbit of `V` lands on `I`.
pub fn cusp_curves(fam: &CuspFamily, lambda1: f64) -> Result<CuspCurves> {
    if lambda1 < 0.0 {
        return Err(Error::NegativeLambda(lambda1));
    }
    if lambda1 == 0.0 {
        return Ok(CuspCurves {
            v: 0.0,
            i: 0.0,
            a: 0.0,
            vbar: 0.0,
            ibar: 0.0,
            abar: 0.0,
            degenerate: true,
        });
    }
    let (v, i, a) = fam.folds(lambda1).ok_or(Error::OutsideWindow(lambda1))?;
    let t0v = fam.tu_poly(lambda1, 0.0).eval(v);
    Ok(CuspCurves {
        v,
        i,
        a,
        vbar: -fam.delta0(lambda1, v),
        abar: -fam.delta0(lambda1, a),
        ibar: -(t0v - fam.dtilde * i),
        degenerate: false,
    })
}

/// `(p(a) - p(b)) / (a - b)` without cancellation.
fn divided(c: &[f64], a: f64, b: f64) -> f64 {
    let mut s = 0.0;
    for (k, &ck) in c.iter().enumerate().skip(1) {
        let mut t = 0.0;
        for j in 0..k {
            t += a.powi(j as i32) * b.powi((k - 1 - j) as i32);
        }
        s += ck * t;
    }
    s
}

impl Scenario for CuspFamily {
    fn id(&self) -> &'static str {
        "cusp-synthetic"
    }

    fn param_names(&self) -> [&'static str; 2] {
        ["lambda1", "beta"]
    }

    fn default_ranges(&self) -> [(f64, f64); 2] {
        [(-0.05, 0.05), (-0.25, 0.25)]
    }

    fn classify(&self, p: [f64; 2], cfg: &RunConfig) -> Result<RegionReport> {
        let [lambda1, beta] = p;
        let m = self.model(lambda1, beta)?;
        let (crossing, polycycles, _) = crossing_inventory(&m, cfg);
        let mut rep = RegionReport::new(p);
        let tol = 1e-10;
        let folds = self.folds(lambda1);
        if let Some((v, i, a)) = folds {
            for c in trace_sliding(&m, &[Some(v)], tol) {
                let xl = c.landings.first().map(|l| l.1).unwrap_or(v);
                let structure = if (xl - i).abs() <= tol {
                    "visible+invisible"
                } else if xl > i {
                    "visible"
                } else if xl > a {
                    "visible-unique"
                } else {
                    "visible-other"
                };
                rep.sliding.push(SlidingEntry {
                    structure: structure.into(),
                    folds: 1,
                    segments: c.segments,
                });
            }
        }
        let item = if lambda1 < 0.0 {
            (crossing.len() == 1 && polycycles.is_empty()).then_some(1)
        } else if lambda1 == 0.0 {
            if beta == 0.0 {
                (polycycles.len() == 1).then_some(3)
            } else {
                (crossing.len() == 1).then_some(2)
            }
        } else {
            let (v, _, a) = folds.expect("folds exist for lambda1 > 0");
            let near = |x: f64, y: f64| (x - y).abs() <= 1e-7;
            match (crossing.len(), polycycles.len(), rep.sliding.as_slice()) {
                (1, 0, []) if crossing[0].x[0] > v => Some(4),
                (1, 0, []) if crossing[0].x[0] < a => Some(10),
                (0, 1, []) if near(polycycles[0].x[0], v) => Some(5),
                (0, 1, []) if near(polycycles[0].x[0], a) => Some(9),
                (0, 0, [s]) => match s.structure.as_str() {
                    "visible" => Some(6),
                    "visible+invisible" => Some(7),
                    "visible-unique" => Some(8),
                    _ => None,
                },
                _ => None,
            }
        };
        rep.crossing = crossing;
        rep.polycycles = polycycles;
        rep.item = item;
        rep.label = if lambda1 == 0.0 && beta == 0.0 {
            "codim2".into()
        } else {
            item.map(|n| format!("RC-{n}")).unwrap_or_else(|| "unclassified".into())
        };
        for c in self.on_curves(p) {
            rep.flags.push(format!("on-curve:{c}"));
        }
        Ok(rep)
    }

    fn curves(&self, ranges: [(f64, f64); 2], _cfg: &RunConfig) -> Result<Vec<Curve>> {
        let (l_lo, l_hi) = ranges[0];
        let start = l_hi;
        if !(start > 0.0) {
            return Ok(vec![]);
        }
        let stop = (1e-4 * start).max(l_lo);
        let k = self.kappa;
        let d = self.dtilde;
        let coeffs = |l: f64, b: f64| vec![b, l, 0.0, k];
        let tup = |l: f64, x: f64| l + 3.0 * k * x * x;
        let c0 = cusp_curves(self, start)?;
        let step = (l_hi - stop.max(0.0)) / 300.0;
        let keep = move |u: &[f64]| u[0] >= stop && u[0] <= l_hi && u[2] > 0.0;
        let mut out = vec![];
        // (lambda1, beta, v)
        let gv = move |u: &[f64]| {
            let c = coeffs(u[0], u[1]);
            vec![tup(u[0], u[2]), Poly1::new(c).eval(u[2]) - d * u[2]]
        };
        out.push(trace_curve("Vbar", &gv, &[start, c0.vbar, c0.v], step, &keep, ranges)?);
        // (lambda1, beta, v, a)
        let ga = move |u: &[f64]| {
            let c = coeffs(u[0], u[1]);
            let p = Poly1::new(c.clone());
            vec![
                tup(u[0], u[2]),
                divided(&c, u[3], u[2]) / (u[3] - u[2]),
                p.eval(u[3]) - d * u[3],
            ]
        };
        out.push(trace_curve("Abar", &ga, &[start, c0.abar, c0.v, c0.a], step, &keep, ranges)?);
        // (lambda1, beta, v, i)
        let gi = move |u: &[f64]| {
            let c = coeffs(u[0], u[1]);
            let p = Poly1::new(c.clone());
            let dc = p.derivative();
            vec![
                tup(u[0], u[2]),
                divided(dc.coeffs(), u[3], u[2]),
                p.eval(u[2]) - d * u[3],
            ]
        };
        out.push(trace_curve("Ibar", &gi, &[start, c0.ibar, c0.v, c0.i], step, &keep, ranges)?);
        Ok(out)
    }

    fn on_curves(&self, p: [f64; 2]) -> Vec<String> {
        let [lambda1, beta] = p;
        let Ok(c) = cusp_curves(self, lambda1) else {
            return vec![];
        };
        if c.degenerate {
            return if beta.abs() <= ON_CURVE_TOL {
                vec!["Vbar".into(), "Abar".into(), "Ibar".into()]
            } else {
                vec![]
            };
        }
        [("Vbar", c.vbar), ("Abar", c.abar), ("Ibar", c.ibar)]
            .iter()
            .filter(|(_, b)| (beta - b).abs() <= ON_CURVE_TOL)
            .map(|(n, _)| n.to_string())
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn curve_values_at_three_hundredths() {
        let c = cusp_curves(&CuspFamily::standard(), 0.03).unwrap();
        assert!((c.v - 0.1).abs() < 1e-14);
        assert!((c.i + 0.1).abs() < 1e-14);
        assert!((c.a + 0.2).abs() < 1e-12);
        assert!((c.vbar + 0.102).abs() < 1e-12);
        assert!((c.ibar - 0.098).abs() < 1e-12);
        assert!((c.abar - 0.198).abs() < 1e-12);
    }

    #[test]
    fn lambda_sign_errors() {
        let f = CuspFamily::standard();
        assert!(matches!(cusp_curves(&f, -0.01), Err(Error::NegativeLambda(_))));
        assert!(cusp_curves(&f, 0.0).unwrap().degenerate);
    }

    #[test]
    fn regions_along_beta() {
        let f = CuspFamily::standard();
        let cfg = RunConfig::default();
        let cases = [
            (-0.2, 4),
            (-0.102, 5),
            (0.0, 6),
            (0.098, 7),
            (0.15, 8),
            (0.198, 9),
            (0.22, 10),
        ];
        for (b, item) in cases {
            let r = f.classify([0.03, b], &cfg).unwrap();
            assert_eq!(r.item, Some(item), "beta {b}: {}", r.signature());
        }
        assert_eq!(f.classify([-0.03, 0.1], &cfg).unwrap().item, Some(1));
        assert_eq!(f.classify([0.0, 0.1], &cfg).unwrap().item, Some(2));
        let o = f.classify([0.0, 0.0], &cfg).unwrap();
        assert_eq!((o.item, o.label.as_str()), (Some(3), "codim2"));
    }

    #[test]
    fn hypotheses_checked() {
        assert!(matches!(CuspFamily::new(1.0, -1.0, 0.5), Err(Error::HypothesisViolated(_))));
        assert!(matches!(CuspFamily::new(-1.0, 1.0, 0.5), Err(Error::HypothesisViolated(_))));
    }
}
