//! Fold-fold scenario realised by a Filippov system: `X` has an attracting
//! cycle on the circle of radius 1 centred at `(0, 1 + beta)`, `Y = (1, x -
//! alpha)` has an invisible fold at `(alpha, 0)`.

use super::diagram::Curve;
use super::vi::{vi_report, ViData, VI_CURVES};
use super::{grid_axis, CycleEntry, RegionReport, Scenario, ON_CURVE_TOL};
use crate::config::RunConfig;
use crate::flow::{flow_smooth, Section, TimeDir};
use crate::germ::{fit_map, Germ};
use crate::maps::{tangency_points, transition_map, Source};
use crate::poly::{bisect, Poly2};
use crate::polycycle::Stability;
use crate::system::{Domain, FilippovSystem, PolyField};
use crate::{Error, Result};

/// Regula falsi with the Illinois modification on a sign change bracket.
fn illinois<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, mut fa: f64, mut fb: f64) -> Result<f64> {
    let mut side = 0;
    for _ in 0..100 {
        let c = (a * fb - b * fa) / (fb - fa);
        let fc = f(c);
        if !fc.is_finite() {
            return Err(Error::NoConvergence);
        }
        if fc == 0.0 || (b - a).abs() < 1e-15 || fc.abs() < 1e-15 {
            return Ok(c);
        }
        if fc * fb < 0.0 {
            a = b;
            fa = fb;
            side = 0;
        } else {
            fa *= if side == 1 { 0.5 } else { 1.0 };
            side = 1;
        }
        b = c;
        fb = fc;
    }
    Ok(b)
}

/// Radial attraction rate of the cycle of `X`.
pub const CONTRACTION: f64 = 0.1;

#[derive(Debug, Clone)]
pub struct CircleScenario {
    pub c: f64,
    /// Half-width of the x-window on Sigma.
    pub window: f64,
    /// Germs of the forward and backward transitions at the origin, offset
    /// by the chart of the unperturbed cycle.
    pub tu: Germ,
    pub ts: Germ,
    cfg: RunConfig,
}

fn section() -> Section {
    Section::new([0.0, 2.0], [0.0, 1.0], 0.5).expect("section")
}

/// Transition maps of one parameter point.
pub struct CirclePoint {
    pub alpha: f64,
    pub z: FilippovSystem,
    /// Fold of `X` on Sigma.
    pub fold: f64,
    cfg: RunConfig,
}

impl CirclePoint {
    /// Chart on the top section of the forward `X` orbit through `(y, 0)`.
    pub fn forward(&self, y: f64) -> Result<f64> {
        transition_map(&self.z.plus, &Source::Sigma, &section(), TimeDir::Forward, y, &self.cfg)
    }

    pub fn backward(&self, x: f64) -> Result<f64> {
        transition_map(&self.z.plus, &Source::Sigma, &section(), TimeDir::Backward, x, &self.cfg)
    }

    pub fn mirror(&self, x: f64) -> f64 {
        2.0 * self.alpha - x
    }

    /// Right end of the crossing domain.
    pub fn zeta(&self) -> f64 {
        self.fold.min(self.alpha).min(self.mirror(self.fold))
    }

    pub fn displacement(&self, x: f64) -> Result<f64> {
        Ok(self.forward(self.mirror(x))? - self.backward(x)?)
    }

    /// Return map derivative at a crossing point.
    pub fn multiplier(&self, x: f64) -> Result<f64> {
        let h = 1e-5;
        let y = self.mirror(x);
        let dp = (self.forward(y + h)? - self.forward(y - h)?) / (2.0 * h);
        let dm = (self.backward(x + h)? - self.backward(x - h)?) / (2.0 * h);
        Ok(-dp / dm)
    }

    /// `(S+, S-, S0)` comparing the forward and backward orbits through the
    /// two folds.
    pub fn landings(&self) -> Result<(f64, f64, f64)> {
        let (f, a) = (self.fold, self.alpha);
        let tf = self.forward(f)?;
        let bf = self.backward(f)?;
        Ok((self.forward(a)? - bf, tf - self.backward(a)?, tf - bf))
    }

    /// Crossing cycles on `[-w, zeta)` from sign changes of the displacement,
    /// ordered by `x`.
    pub fn crossing_cycles(&self, w: f64, samples: usize) -> Result<Vec<(f64, f64)>> {
        let z = self.zeta();
        let xs = grid_axis(-w, z - 1e-7, samples);
        let d = |x: f64| self.displacement(x).unwrap_or(f64::NAN);
        let mut out = vec![];
        let mut prev = (xs[0], d(xs[0]));
        for &x in &xs[1..] {
            let v = d(x);
            if prev.1 * v < 0.0 {
                let r = bisect(d, prev.0, x, prev.1);
                out.push((r, self.multiplier(r)?));
            } else if v == 0.0 {
                out.push((x, self.multiplier(x)?));
            }
            prev = (x, v);
        }
        Ok(out)
    }

    /// Largest displacement over the crossing domain.
    pub fn max_displacement(&self, w: f64) -> Result<f64> {
        let z = self.zeta();
        let xs = grid_axis(-w, z, 41);
        let mut best = (z, self.displacement(z)?);
        for &x in &xs {
            let v = self.displacement(x)?;
            if v > best.1 {
                best = (x, v);
            }
        }
        let step = (z + w) / 40.0;
        let (mut a, mut b) = ((best.0 - step).max(-w), (best.0 + step).min(z));
        let g = 0.5 * (5f64.sqrt() - 1.0);
        for _ in 0..32 {
            let (c, d) = (b - g * (b - a), a + g * (b - a));
            if self.displacement(c)? > self.displacement(d)? {
                b = d;
            } else {
                a = c;
            }
        }
        Ok(best.1.max(self.displacement(0.5 * (a + b))?))
    }
}

impl CircleScenario {
    pub fn new(cfg: &RunConfig) -> Result<Self> {
        Self::with_contraction(CONTRACTION, cfg)
    }

    pub fn with_contraction(c: f64, cfg: &RunConfig) -> Result<Self> {
        let mut s = CircleScenario {
            c,
            window: 0.4,
            tu: Germ::exact(0.0, vec![0.0], 1.0),
            ts: Germ::exact(0.0, vec![0.0], 1.0),
            cfg: cfg.clone(),
        };
        let (tu, ts) = s.fit_germs(0.0, 0.0, 0.1)?;
        let (k, d) = (tu.coeff(2), ts.coeff(2));
        if !(k > 0.0 && d > 0.0 && k < d) {
            return Err(Error::HypothesisViolated(format!(
                "fitted fold coefficients {k}, {d} violate 0 < kappa < d"
            )));
        }
        s.tu = tu;
        s.ts = ts;
        Ok(s)
    }

    pub fn kappa(&self) -> f64 {
        self.tu.coeff(2)
    }

    pub fn dtilde(&self) -> f64 {
        self.ts.coeff(2)
    }

    pub fn system(&self, alpha: f64, beta: f64) -> Result<FilippovSystem> {
        let c = self.c;
        let x = PolyField::from_terms(
            &[(0, 0, 1.0), (0, 1, -1.0), (3, 0, -c), (1, 2, -c), (1, 1, 2.0 * c)],
            &[(1, 0, 1.0), (2, 1, -c), (0, 3, -c), (0, 2, 3.0 * c), (2, 0, c), (0, 1, -2.0 * c)],
        )?
        .translate(0.0, beta);
        let y = PolyField::from_terms(&[(0, 0, 1.0)], &[(1, 0, 1.0), (0, 0, -alpha)])?;
        FilippovSystem::new(Domain::new(-3.0, 3.0, -3.0, 4.0)?, x, y, Poly2::y())
    }

    pub fn point(&self, alpha: f64, beta: f64) -> Result<CirclePoint> {
        let z = self.system(alpha, beta)?;
        let fold = tangency_points(&z.plus, -0.5, 0.5)
            .into_iter()
            .min_by(|a, b| a.abs().partial_cmp(&b.abs()).unwrap())
            .ok_or_else(|| Error::HypothesisViolated("X has no fold near the origin".into()))?;
        Ok(CirclePoint {
            alpha,
            z,
            fold,
            cfg: self.cfg.clone(),
        })
    }

    /// Germs of `y -> T+(y)` and `x -> T-(x)` about the fold of `X`, both
    /// offset by `T-(fold)`.
    pub fn fit_germs(&self, alpha: f64, beta: f64, w: f64) -> Result<(Germ, Germ)> {
        let p = self.point(alpha, beta)?;
        let f = p.fold;
        let s0 = p.backward(f)?;
        let tu = fit_map(|y| Ok(p.forward(y)? - s0), f, f - w, f + w, 4, 24, self.cfg.cond_max)?;
        let ts = fit_map(|x| Ok(p.backward(x)? - s0), f, f - w, f + w, 4, 24, self.cfg.cond_max)?;
        Ok((tu, ts))
    }

    /// Splitting of the orbits through the fold of `X`, the displacement
    /// counterpart of `beta`.
    pub fn beta_eff(&self, beta: f64) -> Result<f64> {
        self.point(0.0, beta)?.landings().map(|l| l.2)
    }

    /// Equation of curve `name` at `(alpha, beta)`; its zero set in `beta`
    /// is the curve.
    fn curve_eq(&self, name: &str, alpha: f64, beta: f64) -> Result<f64> {
        let p = self.point(alpha, beta)?;
        match name {
            "beta1" => p.max_displacement(self.window),
            "beta2" | "beta3" => p.displacement(p.zeta()),
            "beta4" => p.landings().map(|l| l.0),
            _ => p.landings().map(|l| l.1),
        }
    }

    /// `beta` on curve `name` at `alpha`.
    pub fn curve(&self, name: &str, alpha: f64) -> Result<f64> {
        if !VI_CURVES.contains(&name) {
            return Err(Error::InvalidInput(format!("unknown curve '{name}'")));
        }
        let ok = match name {
            "beta2" | "beta4" => alpha >= 0.0,
            "beta3" | "beta5" => alpha <= 0.0,
            _ => true,
        };
        if !ok {
            return Err(Error::WrongSign(name.into()));
        }
        if alpha == 0.0 {
            return Ok(0.0);
        }
        let f = |b: f64| self.curve_eq(name, alpha, b).unwrap_or(f64::NAN);
        // every equation decreases in beta; expand a bracket about zero
        let mut lo = -1e-3;
        let mut hi = 1e-3;
        for _ in 0..12 {
            if f(lo) > 0.0 {
                break;
            }
            lo *= 2.0;
        }
        for _ in 0..12 {
            if f(hi) < 0.0 {
                break;
            }
            hi *= 2.0;
        }
        let (flo, fhi) = (f(lo), f(hi));
        if !(flo > 0.0 && fhi < 0.0) {
            return Err(Error::NoConvergence);
        }
        illinois(f, lo, hi, flo, fhi)
    }

    /// Distance between `p` and its image after one period of the
    /// unperturbed cycle.
    pub fn gamma0_closure(&self) -> Result<f64> {
        let z = self.system(0.0, 0.0)?;
        let q = flow_smooth(&z.plus, [0.0, 0.0], 2.0 * std::f64::consts::PI, &self.cfg)?;
        Ok(q[0].hypot(q[1]))
    }

    pub fn data(&self, alpha: f64, beta: f64) -> Result<ViData> {
        let p = self.point(alpha, beta)?;
        let mut crossing = vec![];
        for (x, m) in p.crossing_cycles(self.window, 240)? {
            let stability = if (m.abs() - 1.0).abs() < 1e-9 {
                Stability::Unknown
            } else if m.abs() < 1.0 {
                Stability::Attracting
            } else {
                Stability::Repelling
            };
            crossing.push(CycleEntry { stability, x: vec![x] });
        }
        let z = p.zeta();
        let d_edge = p.displacement(z)?;
        let polycycles = if d_edge.abs() <= 1e-10 {
            vec![CycleEntry {
                stability: Stability::Unknown,
                x: vec![z],
            }]
        } else {
            vec![]
        };
        let (s_plus, s_minus, s0) = p.landings()?;
        Ok(ViData {
            alpha,
            origin: alpha == 0.0 && beta == 0.0,
            crossing,
            polycycles,
            d_edge,
            s_plus,
            s_minus,
            s0,
        })
    }
}

impl Scenario for CircleScenario {
    fn id(&self) -> &'static str {
        "vi-foldfold-ode"
    }

    fn param_names(&self) -> [&'static str; 2] {
        ["alpha", "beta"]
    }

    fn default_ranges(&self) -> [(f64, f64); 2] {
        [(-0.1, 0.1), (-0.03, 0.03)]
    }

    fn classify(&self, p: [f64; 2], _cfg: &RunConfig) -> Result<RegionReport> {
        let d = self.data(p[0], p[1])?;
        Ok(vi_report(p, d, self.on_curves(p), 1e-10))
    }

    fn curves(&self, ranges: [(f64, f64); 2], _cfg: &RunConfig) -> Result<Vec<Curve>> {
        let (lo, hi) = ranges[0];
        let mut out = vec![];
        for name in VI_CURVES {
            let (a, b) = match name {
                "beta2" | "beta4" => (lo.max(0.0), hi),
                "beta3" | "beta5" => (lo, hi.min(0.0)),
                _ => (lo, hi),
            };
            if !(b > a) {
                continue;
            }
            let mut samples = vec![];
            for al in grid_axis(a, b, 61) {
                let v = self.curve(name, al)?;
                if v >= ranges[1].0 && v <= ranges[1].1 {
                    samples.push([al, al, v]);
                }
            }
            out.push(Curve {
                name: name.into(),
                samples,
            });
        }
        Ok(out)
    }

    fn on_curves(&self, p: [f64; 2]) -> Vec<String> {
        VI_CURVES
            .iter()
            .filter(|n| {
                // cheap residual screen before the root solve
                let near = p[0] == 0.0
                    || self
                        .curve_eq(n, p[0], p[1])
                        .map(|v| v.abs() < 1e-6)
                        .unwrap_or(false);
                near && self
                    .curve(n, p[0])
                    .map(|v| (p[1] - v).abs() <= ON_CURVE_TOL)
                    .unwrap_or(false)
            })
            .map(|n| n.to_string())
            .collect()
    }
}
