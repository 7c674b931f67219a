//! Polycycle through two regular-fold singularities, unfolded by the
//! splittings `(beta1, beta2)` of its two separatrix connections.

use super::diagram::{trace_curve_axes, Curve};
use super::{crossing_inventory, trace_sliding, RegionReport, Scenario, SlidingEntry, ON_CURVE_TOL};
use crate::config::RunConfig;
use crate::continuation::solve_fixed;
use crate::germ::Germ;
use crate::polycycle::{DisplacementModel, Leg, ModelSpec, SyntheticModel, Unfolding};
use crate::{Error, Result};

/// `Delta_1 = beta1 + k1 x1^2 - d1 x2`, `Delta_2 = beta2 + k2 x2^2 - d2 x1`
/// on `[0, w) x (-w, 0]`.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoFoldFamily {
    pub kappa: [f64; 2],
    pub dtilde: [f64; 2],
    pub window: f64,
}

impl TwoFoldFamily {
    pub fn new(kappa: [f64; 2], dtilde: [f64; 2], window: f64) -> Result<Self> {
        if !(kappa[0] < 0.0 && kappa[1] > 0.0 && dtilde[0] > 0.0 && dtilde[1] > 0.0) {
            return Err(Error::HypothesisViolated(format!(
                "two-fold family needs k1 < 0 < k2 and d1, d2 > 0, got k = {kappa:?}, d = {dtilde:?}"
            )));
        }
        let fam = TwoFoldFamily {
            kappa,
            dtilde,
            window,
        };
        let (_, poly, _) = crossing_inventory(&fam.model(0.0, 0.0)?, &RunConfig::default());
        if poly.len() != 1 || poly[0].x.iter().any(|v| v.abs() > 1e-9) {
            return Err(Error::HypothesisViolated(
                "no polycycle through both folds at the origin".into(),
            ));
        }
        Ok(fam)
    }

    pub fn standard() -> Self {
        TwoFoldFamily::new([-1.0, 1.0], [1.0, 1.0], 0.5).expect("standard two-fold family")
    }

    pub fn model(&self, beta1: f64, beta2: f64) -> Result<SyntheticModel> {
        let w = self.window;
        let leg = |b: f64, k: f64, d: f64, sigma: [f64; 2]| Leg {
            tu: Germ::exact(0.0, vec![b, 0.0, k], w),
            dts: Germ::exact(0.0, vec![0.0, d], w),
            sigma: vec![sigma],
            a: 0.0,
        };
        SyntheticModel::new(ModelSpec {
            k: 2,
            legs: vec![
                leg(beta1, self.kappa[0], self.dtilde[0], [0.0, w]),
                leg(beta2, self.kappa[1], self.dtilde[1], [-w, 0.0]),
            ],
            unfolding: Unfolding::default(),
            e_ii: false,
        })
    }

    fn delta(&self, i: usize, b: f64, xi: f64, xnext: f64) -> f64 {
        b + self.kappa[i] * xi * xi - self.dtilde[i] * xnext
    }

    /// `u = (param, other beta, x)`: `gamma1` has `param = beta2` and solves
    /// for `beta1` with the orbit through the fold `p2`.
    fn gamma_eqs(&self, which: usize) -> impl Fn(&[f64]) -> Vec<f64> + '_ {
        move |u: &[f64]| {
            if which == 1 {
                let (b2, b1, x1) = (u[0], u[1], u[2]);
                vec![self.delta(1, b2, 0.0, x1), self.delta(0, b1, x1, 0.0)]
            } else {
                let (b1, b2, x2) = (u[0], u[1], u[2]);
                vec![self.delta(0, b1, 0.0, x2), self.delta(1, b2, x2, 0.0)]
            }
        }
    }
}

/// `(gamma1(beta), gamma2(beta))`: the `beta1` giving a polycycle through
/// `p2` at `beta2 = beta`, and the `beta2` giving one through `p1` at
/// `beta1 = beta`.
pub fn twofold_curves(fam: &TwoFoldFamily, beta: f64) -> Result<(f64, f64)> {
    if !(beta.abs() < fam.window) {
        return Err(Error::InvalidInput(format!(
            "beta = {beta} outside the family range (-{0}, {0})",
            fam.window
        )));
    }
    let g1 = solve_fixed(&fam.gamma_eqs(1), &[beta, 0.0, 0.0], 0, beta, 1e-15)?;
    let g2 = solve_fixed(&fam.gamma_eqs(2), &[beta, 0.0, 0.0], 0, beta, 1e-15)?;
    Ok((g1[1], g2[1]))
}

impl Scenario for TwoFoldFamily {
    fn id(&self) -> &'static str {
        "twofold-synthetic"
    }

    fn param_names(&self) -> [&'static str; 2] {
        ["beta1", "beta2"]
    }

    fn default_ranges(&self) -> [(f64, f64); 2] {
        [(-0.1, 0.1), (-0.1, 0.1)]
    }

    fn classify(&self, p: [f64; 2], cfg: &RunConfig) -> Result<RegionReport> {
        let [b1, b2] = p;
        let m = self.model(b1, b2)?;
        let (crossing, polycycles, _) = crossing_inventory(&m, cfg);
        let mut rep = RegionReport::new(p);
        let tol = 1e-10;
        // landing of each separatrix relative to the next fold
        let s1 = m.displacement(0, 0.0, 0.0)?;
        let s2 = m.displacement(1, 0.0, 0.0)?;
        let zero = |v: f64| v.abs() <= tol;
        for c in trace_sliding(&m, &[Some(0.0), Some(0.0)], tol) {
            let structure = match (c.folds.as_slice(), c.segments) {
                ([0], _) => "p1".to_string(),
                ([1], _) => "p2".to_string(),
                (_, n) => format!("p1+p2/{n}seg"),
            };
            rep.sliding.push(SlidingEntry {
                structure,
                folds: c.folds.len(),
                segments: c.segments,
            });
        }
        // connections inside a sliding cycle are reported as part of it
        rep.heteroclinic =
            (zero(s1) || zero(s2)) && !(zero(s1) && zero(s2)) && rep.sliding.is_empty();
        let on_fold = |e: &super::CycleEntry, i: usize| e.x[i].abs() <= cfg.boundary_tol;
        let item = match (crossing.len(), polycycles.as_slice(), rep.sliding.as_slice()) {
            (0, [e], []) if on_fold(e, 0) && on_fold(e, 1) => Some(7),
            (0, [e], []) if on_fold(e, 1) => Some(2),
            (0, [e], []) if on_fold(e, 0) => Some(9),
            (1, [], []) => {
                if zero(s1) {
                    Some(4)
                } else if zero(s2) {
                    Some(6)
                } else if s1 > 0.0 {
                    Some(3)
                } else if s2 > 0.0 {
                    Some(5)
                } else {
                    Some(8)
                }
            }
            (0, [], [s]) => match (s.folds, s.segments) {
                (1, 1) if s.structure == "p2" => Some(1),
                (1, 1) => Some(10),
                (2, 2) => Some(12),
                (2, 1) if zero(s1) => Some(11),
                (2, 1) if zero(s2) => Some(13),
                _ => None,
            },
            _ => None,
        };
        rep.crossing = crossing;
        rep.polycycles = polycycles;
        rep.item = item;
        rep.label = if item == Some(7) {
            "codim2".into()
        } else {
            item.map(|n| format!("DRF-{n}")).unwrap_or_else(|| "unclassified".into())
        };
        for c in self.on_curves(p) {
            rep.flags.push(format!("on-curve:{c}"));
        }
        Ok(rep)
    }

    fn curves(&self, ranges: [(f64, f64); 2], _cfg: &RunConfig) -> Result<Vec<Curve>> {
        let (b1, b2) = (ranges[0], ranges[1]);
        let w = self.window;
        let mut out = vec![];
        let hi2 = b2.1.min(0.9 * w);
        if hi2 > 0.0 {
            let g = self.gamma_eqs(1);
            let (gv, _) = twofold_curves(self, hi2)?;
            let keep = |u: &[f64]| u[0] >= 0.0 && u[0] <= hi2;
            out.push(trace_curve_axes("gamma1", &g, &[hi2, gv, hi2 / self.dtilde[1]], hi2 / 300.0, &keep, [1, 0], ranges)?);
        }
        let lo1 = b1.0.max(-0.9 * w);
        if lo1 < 0.0 {
            let g = self.gamma_eqs(2);
            let (_, gv) = twofold_curves(self, lo1)?;
            let keep = |u: &[f64]| u[0] <= 0.0 && u[0] >= lo1;
            out.push(trace_curve_axes("gamma2", &g, &[lo1, gv, lo1 / self.dtilde[0]], -lo1 / 300.0, &keep, [0, 1], ranges)?);
        }
        Ok(out)
    }

    fn on_curves(&self, p: [f64; 2]) -> Vec<String> {
        let [b1, b2] = p;
        let mut v = vec![];
        if let Ok((g1, _)) = twofold_curves(self, b2) {
            if b2 >= 0.0 && (b1 - g1).abs() <= ON_CURVE_TOL {
                v.push("gamma1".to_string());
            }
        }
        if let Ok((_, g2)) = twofold_curves(self, b1) {
            if b1 <= 0.0 && (b2 - g2).abs() <= ON_CURVE_TOL {
                v.push("gamma2".to_string());
            }
        }
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma_values() {
        let f = TwoFoldFamily::standard();
        let (g1, _) = twofold_curves(&f, 0.2).unwrap();
        assert!((g1 - 0.04).abs() < 1e-12);
        let (_, g2) = twofold_curves(&f, -0.1).unwrap();
        assert!((g2 + 0.01).abs() < 1e-12);
        assert_eq!(twofold_curves(&f, 0.0).unwrap(), (0.0, 0.0));
    }

    #[test]
    fn crossing_between_curves() {
        let f = TwoFoldFamily::standard();
        let r = f.classify([-0.05, 0.1], &RunConfig::default()).unwrap();
        assert_eq!(r.crossing.len(), 1);
        assert_eq!(r.attracting(), 1);
        assert!(!r.heteroclinic);
        assert_eq!(r.item, Some(5));
    }

    #[test]
    fn sign_table_enforced() {
        assert!(TwoFoldFamily::new([1.0, 1.0], [1.0, 1.0], 0.5).is_err());
    }
}
