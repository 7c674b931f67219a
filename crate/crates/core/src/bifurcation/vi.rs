//! Polycycle through a visible-invisible fold-fold point, unfolded by the
//! fold offset `alpha` and the splitting `beta`.

use serde::Serialize;

use super::diagram::{trace_curve, Curve};
use super::{crossing_inventory, CycleEntry, RegionReport, Scenario, SlidingEntry, ON_CURVE_TOL};
use crate::config::RunConfig;
use crate::continuation::{fd_jacobian, solve_fixed};
use crate::germ::Germ;
use crate::polycycle::{DisplacementModel, Leg, ModelSpec, SyntheticModel, Stability, Unfolding};
use crate::{Error, Result};

/// `T_X(y) = beta + kappa y^2`, `rho_Y(x) = 2 alpha - x`, `DTs(x) = d x^2`.
#[derive(Debug, Clone, PartialEq)]
pub struct ViFamily {
    pub kappa: f64,
    pub dtilde: f64,
    pub window: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ViCurves {
    pub beta1: f64,
    pub beta2: Option<f64>,
    pub beta3: Option<f64>,
    pub beta4: Option<f64>,
    pub beta5: Option<f64>,
}

pub const VI_CURVES: [&str; 5] = ["beta1", "beta2", "beta3", "beta4", "beta5"];

impl ViFamily {
    pub fn new(kappa: f64, dtilde: f64, window: f64) -> Result<Self> {
        if !(kappa > 0.0 && dtilde > 0.0) {
            return Err(Error::HypothesisViolated(format!(
                "fold-fold family needs kappa, d > 0, got {kappa}, {dtilde}"
            )));
        }
        if !(kappa - dtilde < 0.0) {
            return Err(Error::HypothesisViolated(format!(
                "cycle of X is not attracting: kappa - d = {}",
                kappa - dtilde
            )));
        }
        let fam = ViFamily {
            kappa,
            dtilde,
            window,
        };
        let (_, poly, _) = crossing_inventory(&fam.model(0.0, 0.0)?, &RunConfig::default());
        if poly.len() != 1 || poly[0].x[0].abs() > 1e-6 {
            return Err(Error::HypothesisViolated(
                "no polycycle through the fold-fold point at the origin".into(),
            ));
        }
        Ok(fam)
    }

    pub fn standard() -> Self {
        ViFamily::new(1.0, 2.0, 2.0).expect("standard fold-fold family")
    }

    /// Upper end of `sigma`: the fold of `X` for `alpha >= 0`, its mirror
    /// image `2 alpha` otherwise.
    pub fn zeta(alpha: f64) -> f64 {
        alpha - alpha.abs()
    }

    pub fn model(&self, alpha: f64, beta: f64) -> Result<SyntheticModel> {
        let w = self.window;
        SyntheticModel::new(ModelSpec {
            k: 1,
            legs: vec![Leg {
                tu: Germ::exact(0.0, vec![beta, 0.0, self.kappa], w),
                dts: Germ::exact(0.0, vec![0.0, 0.0, self.dtilde], w),
                sigma: vec![[2.0 * alpha - w, Self::zeta(alpha)]],
                a: 0.0,
            }],
            unfolding: Unfolding {
                alpha,
                beta,
                ..Default::default()
            },
            e_ii: true,
        })
    }
}

/// Transition of `X` from the point `y` of `Sigma` to the section.
fn tx(m: &SyntheticModel, y: f64) -> f64 {
    m.spec.legs[0].tu.eval(y)
}

fn dts(m: &SyntheticModel, x: f64) -> f64 {
    m.spec.legs[0].dts.eval(x)
}

/// `S+`: orbit of the fold of `X` against the `Y` fold; `S-`: the converse;
/// `S0`: orbit of the fold of `X` against itself.
fn landing_functions(m: &SyntheticModel, alpha: f64) -> (f64, f64, f64) {
    let s_plus = tx(m, alpha) - dts(m, 0.0);
    let s_minus = tx(m, 0.0) - dts(m, alpha);
    let s0 = tx(m, 0.0) - dts(m, 0.0);
    (s_plus, s_minus, s0)
}

fn delta(fam: &ViFamily, alpha: f64, beta: f64, x: f64) -> f64 {
    let m = fam.model(alpha, beta).expect("model");
    m.displacement(0, x, x).unwrap_or(f64::NAN)
}

fn ddelta(fam: &ViFamily, alpha: f64, beta: f64, x: f64) -> f64 {
    let m = fam.model(alpha, beta).expect("model");
    m.partials(0, x, x).map(|(a, b)| a + b).unwrap_or(f64::NAN)
}

/// Defining equations of curve `name` in `u = (alpha, beta[, x])`.
fn curve_eqs<'a>(fam: &'a ViFamily, name: &str) -> Box<dyn Fn(&[f64]) -> Vec<f64> + 'a> {
    match name {
        "beta1" => Box::new(move |u: &[f64]| {
            vec![delta(fam, u[0], u[1], u[2]), ddelta(fam, u[0], u[1], u[2])]
        }),
        "beta2" | "beta3" => Box::new(move |u: &[f64]| {
            vec![delta(fam, u[0], u[1], ViFamily::zeta(u[0]))]
        }),
        "beta4" => Box::new(move |u: &[f64]| {
            let m = fam.model(u[0], u[1]).expect("model");
            vec![landing_functions(&m, u[0]).0]
        }),
        _ => Box::new(move |u: &[f64]| {
            let m = fam.model(u[0], u[1]).expect("model");
            vec![landing_functions(&m, u[0]).1]
        }),
    }
}

fn defined(name: &str, alpha: f64) -> bool {
    match name {
        "beta2" | "beta4" => alpha >= 0.0,
        "beta3" | "beta5" => alpha <= 0.0,
        _ => true,
    }
}

/// Value of one curve at `alpha`, by Newton on its defining equations.
pub fn foldfold_curve(fam: &ViFamily, name: &str, alpha: f64) -> Result<f64> {
    if !VI_CURVES.contains(&name) {
        return Err(Error::InvalidInput(format!("unknown curve '{name}'")));
    }
    if !defined(name, alpha) {
        return Err(Error::WrongSign(name.into()));
    }
    let g = curve_eqs(fam, name);
    let u0 = if name == "beta1" {
        // vertex of the loop polynomial
        let m = fam.model(alpha, 0.0)?;
        let (lo, hi) = m.window(0);
        let x = m
            .loop_poly()
            .derivative()
            .real_roots(lo, hi)
            .into_iter()
            .min_by(|a, b| a.abs().partial_cmp(&b.abs()).unwrap())
            .unwrap_or(0.0);
        vec![alpha, 0.0, x]
    } else {
        vec![alpha, 0.0]
    };
    Ok(solve_fixed(&g, &u0, 0, alpha, 1e-15)?[1])
}

pub fn foldfold_curves(fam: &ViFamily, alpha: f64) -> Result<ViCurves> {
    let get = |n: &str| -> Result<Option<f64>> {
        match foldfold_curve(fam, n, alpha) {
            Ok(v) => Ok(Some(v)),
            Err(Error::WrongSign(_)) => Ok(None),
            Err(e) => Err(e),
        }
    };
    Ok(ViCurves {
        beta1: foldfold_curve(fam, "beta1", alpha)?,
        beta2: get("beta2")?,
        beta3: get("beta3")?,
        beta4: get("beta4")?,
        beta5: get("beta5")?,
    })
}

impl Scenario for ViFamily {
    fn id(&self) -> &'static str {
        "vi-foldfold-synthetic"
    }

    fn param_names(&self) -> [&'static str; 2] {
        ["alpha", "beta"]
    }

    fn default_ranges(&self) -> [(f64, f64); 2] {
        [(-0.15, 0.15), (-0.12, 0.12)]
    }

    fn classify(&self, p: [f64; 2], cfg: &RunConfig) -> Result<RegionReport> {
        let m = self.model(p[0], p[1])?;
        classify_vi(&m, p, self.on_curves(p), cfg)
    }

    fn curves(&self, ranges: [(f64, f64); 2], _cfg: &RunConfig) -> Result<Vec<Curve>> {
        let (lo, hi) = ranges[0];
        let step = (hi - lo) / 600.0;
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
            let start = if name == "beta3" || name == "beta5" { a } else { b };
            let v = foldfold_curve(self, name, start)?;
            let g = curve_eqs(self, name);
            let u0 = if name == "beta1" {
                let m = self.model(start, v)?;
                let x = m.loop_poly().derivative().real_roots(-1.0, 1.0);
                vec![start, v, x.first().copied().unwrap_or(0.0)]
            } else {
                vec![start, v]
            };
            let keep = move |u: &[f64]| u[0] >= a && u[0] <= b;
            out.push(trace_curve(name, &g, &u0, step, &keep, ranges)?);
        }
        Ok(out)
    }

    fn on_curves(&self, p: [f64; 2]) -> Vec<String> {
        VI_CURVES
            .iter()
            .filter(|n| {
                foldfold_curve(self, n, p[0])
                    .map(|v| (p[1] - v).abs() <= ON_CURVE_TOL)
                    .unwrap_or(false)
            })
            .map(|n| n.to_string())
            .collect()
    }
}

/// Quantities deciding the fold-fold region at one parameter point.
#[derive(Debug, Clone, PartialEq)]
pub struct ViData {
    pub alpha: f64,
    pub origin: bool,
    pub crossing: Vec<CycleEntry>,
    pub polycycles: Vec<CycleEntry>,
    /// Displacement at the closed end of `sigma`.
    pub d_edge: f64,
    pub s_plus: f64,
    pub s_minus: f64,
    pub s0: f64,
}

/// Region report of a one-leg fold-fold model; `on_curves` lists curves
/// through the point.
pub fn classify_vi(
    m: &SyntheticModel,
    p: [f64; 2],
    on_curves: Vec<String>,
    cfg: &RunConfig,
) -> Result<RegionReport> {
    let alpha = m.spec.unfolding.alpha;
    let (crossing, polycycles, _) = crossing_inventory(m, cfg);
    let zeta = ViFamily::zeta(alpha);
    let (s_plus, s_minus, s0) = landing_functions(m, alpha);
    let data = ViData {
        alpha,
        origin: alpha == 0.0 && m.spec.unfolding.beta == 0.0,
        crossing,
        polycycles,
        d_edge: m.displacement(0, zeta, zeta)?,
        s_plus,
        s_minus,
        s0,
    };
    Ok(vi_report(p, data, on_curves, 1e-12))
}

pub fn vi_report(p: [f64; 2], d: ViData, on_curves: Vec<String>, tol: f64) -> RegionReport {
    let alpha = d.alpha;
    let mut rep = RegionReport::new(p);
    let cmp = |v: f64| {
        if v.abs() <= tol {
            "="
        } else if v < 0.0 {
            "<"
        } else {
            ">"
        }
    };
    // sliding cycle through the visible fold of X
    let mut suffix = String::new();
    let sliding = if alpha > 0.0 && d.d_edge > tol && d.s0 < -tol {
        let c = cmp(d.s_plus);
        suffix = format!("/b4{c}");
        Some(match c {
            "<" => "crosses-once",
            "=" => "fold-connection",
            _ => "direct",
        })
    } else if alpha < 0.0 && d.d_edge < -tol && d.s0 > tol {
        let c = cmp(d.s_minus);
        suffix = format!("/b5{c}");
        Some(match c {
            "<" => "direct",
            "=" => "fold-connection",
            _ => "crosses-once",
        })
    } else {
        None
    };
    if let Some(structure) = sliding {
        rep.sliding.push(SlidingEntry {
            structure: structure.into(),
            folds: if structure == "fold-connection" { 2 } else { 1 },
            segments: 1,
        });
    }
    if d.s0 < -tol {
        rep.flags.push("real-cycle".into());
    } else if d.s0.abs() <= tol {
        rep.flags.push("real-tangent".into());
    }
    let stabs: Vec<Stability> = d.crossing.iter().map(|c| c.stability).collect();
    let item = match (stabs.as_slice(), d.polycycles.len()) {
        _ if d.origin => None,
        ([], 0) => Some(1),
        ([Stability::Semistable], 0) => Some(2),
        ([Stability::Attracting, Stability::Repelling], 0) => Some(3),
        ([Stability::Attracting], 1) if alpha > 0.0 => Some(4),
        ([Stability::Attracting], 0) => Some(5),
        ([], 1) if alpha < 0.0 => Some(6),
        _ => None,
    };
    rep.crossing = d.crossing;
    rep.polycycles = d.polycycles;
    rep.item = item;
    rep.label = if d.origin {
        "codim2".into()
    } else {
        match item {
            Some(n) => format!("VI-{n}{suffix}"),
            None => "unclassified".into(),
        }
    };
    for c in on_curves {
        rep.flags.push(format!("on-curve:{c}"));
    }
    rep
}

/// Label predicted from the sides of the closed-form curves
/// `beta_i = c_i alpha^2` of a pure quadratic family.
pub fn predicted_label(kappa: f64, dtilde: f64, alpha: f64, beta: f64) -> String {
    let a2 = alpha * alpha;
    let b1 = 4.0 * kappa * dtilde / (kappa - dtilde) * a2;
    let b2 = -4.0 * kappa * a2;
    let b3 = 4.0 * dtilde * a2;
    let b4 = -kappa * a2;
    let b5 = dtilde * a2;
    let cmp = |b: f64, c: f64| {
        if b < c {
            "<"
        } else if b > c {
            ">"
        } else {
            "="
        }
    };
    if alpha == 0.0 && beta == 0.0 {
        return "codim2".into();
    }
    if alpha > 0.0 {
        let item = if beta < b1 {
            1
        } else if beta == b1 {
            2
        } else if beta < b2 {
            3
        } else if beta == b2 {
            4
        } else {
            5
        };
        if beta > b2 && beta < 0.0 {
            format!("VI-{item}/b4{}", cmp(beta, b4))
        } else {
            format!("VI-{item}")
        }
    } else if alpha < 0.0 {
        let item = if beta < b3 {
            1
        } else if beta == b3 {
            6
        } else {
            5
        };
        if beta > 0.0 && beta < b3 {
            format!("VI-{item}/b5{}", cmp(beta, b5))
        } else {
            format!("VI-{item}")
        }
    } else if beta < 0.0 {
        "VI-1".into()
    } else {
        "VI-5".into()
    }
}

/// Jacobian of the saddle-node equations, exposed for diagnostics.
pub fn saddle_node_jacobian(fam: &ViFamily, u: &[f64]) -> Vec<Vec<f64>> {
    let g = curve_eqs(fam, "beta1");
    let j = fd_jacobian(&g, u);
    (0..j.nrows())
        .map(|r| (0..j.ncols()).map(|c| j[(r, c)]).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn curves_at_one_tenth() {
        let f = ViFamily::standard();
        let c = foldfold_curves(&f, 0.1).unwrap();
        assert!((c.beta1 + 0.08).abs() < 1e-12);
        assert!((c.beta2.unwrap() + 0.04).abs() < 1e-12);
        assert!((c.beta4.unwrap() + 0.01).abs() < 1e-12);
        assert!(c.beta3.is_none() && c.beta5.is_none());
        let c = foldfold_curves(&f, -0.1).unwrap();
        assert!((c.beta3.unwrap() - 0.08).abs() < 1e-12);
        assert!((c.beta5.unwrap() - 0.02).abs() < 1e-12);
        assert!(matches!(foldfold_curve(&f, "beta2", -0.1), Err(Error::WrongSign(_))));
        let z = foldfold_curves(&f, 0.0).unwrap();
        assert_eq!(z.beta1.abs() + z.beta2.unwrap().abs() + z.beta5.unwrap().abs(), 0.0);
    }

    #[test]
    fn nested_cycles() {
        let f = ViFamily::standard();
        let r = f.classify([0.1, -0.06], &RunConfig::default()).unwrap();
        assert_eq!(r.item, Some(3));
        // outer first
        assert_eq!(r.crossing[0].stability, Stability::Attracting);
        assert_eq!(r.crossing[1].stability, Stability::Repelling);
        assert!((r.crossing[0].x[0] + 0.341421356).abs() < 1e-8);
        assert!(r.sliding.is_empty());
    }

    #[test]
    fn sliding_substructure() {
        let f = ViFamily::standard();
        let r = f.classify([0.1, -0.02], &RunConfig::default()).unwrap();
        assert_eq!(r.crossing.len(), 1);
        assert_eq!(r.attracting(), 1);
        assert_eq!(r.sliding.len(), 1);
        assert_eq!(r.sliding[0].structure, "crosses-once");
        assert_eq!(r.label, "VI-5/b4<");
    }

    #[test]
    fn hypothesis_audit() {
        assert!(ViFamily::new(2.0, 1.0, 1.0).is_err());
        assert!(ViFamily::new(-1.0, 2.0, 1.0).is_err());
    }
}
