//! Unfoldings of Sigma-polycycles: scenario families, bifurcation curves,
//! region classification and diagram sweeps.

pub mod circle;
pub mod cusp;
pub mod diagram;
pub mod svg;
pub mod twofold;
pub mod vi;

use serde::Serialize;

use crate::config::RunConfig;
use crate::interval::Locus;
use crate::polycycle::{
    classify_solution, solve_all, solve_crossing_system, CrossingSolution, CycleKind,
    DisplacementModel, Stability, SyntheticModel,
};
use crate::Result;

pub use cusp::{cusp_curves, CuspCurves, CuspFamily};
pub use diagram::{sweep_diagram, Curve, DiagramGrid, GridSpec};
pub use twofold::{twofold_curves, TwoFoldFamily};
pub use vi::{foldfold_curve, foldfold_curves, ViCurves, ViFamily};

/// Distance in the second parameter below which a point counts as lying
/// on a curve.
pub const ON_CURVE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CycleEntry {
    pub stability: Stability,
    pub x: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SlidingEntry {
    pub structure: String,
    pub folds: usize,
    pub segments: usize,
}

/// Inventory of invariant objects at one parameter point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegionReport {
    pub params: [f64; 2],
    pub label: String,
    pub item: Option<u32>,
    pub crossing: Vec<CycleEntry>,
    pub polycycles: Vec<CycleEntry>,
    pub sliding: Vec<SlidingEntry>,
    pub heteroclinic: bool,
    pub flags: Vec<String>,
}

fn stab_code(s: Stability) -> char {
    match s {
        Stability::Attracting => 'A',
        Stability::Repelling => 'R',
        Stability::Semistable => 'S',
        Stability::CAttracting => 'a',
        Stability::CRepelling => 'r',
        Stability::Unknown => '?',
    }
}

impl RegionReport {
    pub fn new(params: [f64; 2]) -> Self {
        RegionReport {
            params,
            label: String::new(),
            item: None,
            crossing: vec![],
            polycycles: vec![],
            sliding: vec![],
            heteroclinic: false,
            flags: vec![],
        }
    }

    /// `count:codes`, cycles ordered by their first coordinate.
    pub fn crossing_code(&self) -> String {
        let codes: String = self.crossing.iter().map(|c| stab_code(c.stability)).collect();
        if codes.is_empty() {
            "0".into()
        } else {
            format!("{}:{}", self.crossing.len(), codes)
        }
    }

    pub fn sliding_code(&self) -> String {
        if self.sliding.is_empty() {
            return "0".into();
        }
        let s: Vec<&str> = self.sliding.iter().map(|s| s.structure.as_str()).collect();
        format!("{}:{}", self.sliding.len(), s.join("+"))
    }

    /// Geometric signature independent of item numbering.
    pub fn signature(&self) -> String {
        format!(
            "c{} p{} s{}{}",
            self.crossing_code(),
            self.polycycles.len(),
            self.sliding_code(),
            if self.heteroclinic { " h" } else { "" }
        )
    }

    pub fn attracting(&self) -> usize {
        self.crossing
            .iter()
            .filter(|c| c.stability == Stability::Attracting)
            .count()
    }

    pub fn repelling(&self) -> usize {
        self.crossing
            .iter()
            .filter(|c| c.stability == Stability::Repelling)
            .count()
    }
}

/// A two-parameter family with a Sigma-polycycle at the origin.
pub trait Scenario: Sync {
    /// Identifier used on the command line.
    fn id(&self) -> &'static str;
    fn param_names(&self) -> [&'static str; 2];
    fn default_ranges(&self) -> [(f64, f64); 2];
    fn classify(&self, p: [f64; 2], cfg: &RunConfig) -> Result<RegionReport>;
    /// Curves traced inside the given ranges.
    fn curves(&self, ranges: [(f64, f64); 2], cfg: &RunConfig) -> Result<Vec<Curve>>;
    /// Names of the curves passing within `ON_CURVE_TOL` of `p`.
    fn on_curves(&self, p: [f64; 2]) -> Vec<String>;
}

/// Crossing and polycycle entries of a germ model, from the guess lattice
/// plus, for one-leg models, the real roots of the loop polynomial.
pub fn crossing_inventory(
    m: &SyntheticModel,
    cfg: &RunConfig,
) -> (Vec<CycleEntry>, Vec<CycleEntry>, Vec<CrossingSolution>) {
    let mut sols = solve_all(m, cfg);
    if m.k() == 1 {
        let (lo, hi) = m.window(0);
        for r in m.loop_poly().real_roots(lo, hi) {
            if sols.iter().any(|s| (s.x[0] - r).abs() <= 1e-7) {
                continue;
            }
            if let Ok(s) = solve_crossing_system(m, &[r], cfg) {
                sols.push(s);
            }
        }
        sols.sort_by(|a, b| a.x.partial_cmp(&b.x).unwrap());
    }
    let mut crossing = vec![];
    let mut poly = vec![];
    for s in &sols {
        let rep = classify_solution(s);
        let e = CycleEntry {
            stability: rep.stability,
            x: s.x.clone(),
        };
        match rep.kind {
            CycleKind::CrossingLimitCycle => crossing.push(e),
            CycleKind::SigmaPolycycle => poly.push(e),
            _ => {}
        }
    }
    (crossing, poly, sols)
}

/// Whether any coordinate of a solution sits on a closed end of its domain.
pub fn boundary_coords(s: &CrossingSolution) -> Vec<usize> {
    s.loci
        .iter()
        .enumerate()
        .filter(|(_, l)| **l == Locus::Boundary)
        .map(|(i, _)| i)
        .collect()
}

/// Closed orbit through sliding segments found by the fold tracer.
#[derive(Debug, Clone, PartialEq)]
pub struct SlidingCycle {
    /// Legs whose exit fold lies on the cycle.
    pub folds: Vec<usize>,
    pub segments: usize,
    /// Arrival points `(leg, x)` that start a sliding segment.
    pub landings: Vec<(usize, f64)>,
}

/// Point of `Sigma` near vertex `i + 1` reached by leg `i` at value `v`:
/// the inverse of `DTs_i` nearest to its base, ignoring `sigma`.
pub fn land(m: &SyntheticModel, i: usize, v: f64) -> Option<f64> {
    let g = &m.spec.legs[i].dts;
    let p = &g.local() - &crate::poly::Poly1::constant(v);
    p.real_roots(-g.window, g.window)
        .into_iter()
        .min_by(|a, b| a.abs().partial_cmp(&b.abs()).unwrap())
        .map(|r| r + g.base)
}

/// Follows the orbits leaving the exit folds of a germ model. An arrival
/// outside `sigma_j` slides to the exit fold of leg `j` (if any); a cycle is
/// reported once a fold repeats with at least one sliding segment between.
pub fn trace_sliding(m: &SyntheticModel, exits: &[Option<f64>], tol: f64) -> Vec<SlidingCycle> {
    let k = m.k();
    let mut found: Vec<SlidingCycle> = vec![];
    for start in 0..k {
        let Some(f0) = exits[start] else { continue };
        let mut visits: Vec<(usize, usize, usize)> = vec![(start, 0, 0)];
        let mut landings: Vec<(usize, f64)> = vec![];
        let mut segs = 0;
        let (mut j, mut x) = (start, f0);
        for _ in 0..4000 {
            let Ok(v) = m.tu(j, x) else { break };
            let Some(xn) = land(m, j, v) else { break };
            let jn = (j + 1) % k;
            let at_fold = exits[jn].filter(|f| (xn - f).abs() <= tol);
            let next = if let Some(f) = at_fold {
                Some(f)
            } else if m.sigma(jn).contains(xn) || m.sigma(jn).locus(xn, tol) == Locus::Boundary {
                j = jn;
                x = xn;
                None
            } else if let Some(f) = exits[jn] {
                segs += 1;
                landings.push((jn, xn));
                Some(f)
            } else {
                break;
            };
            let Some(f) = next else { continue };
            j = jn;
            x = f;
            if let Some(q) = visits.iter().position(|v| v.0 == jn) {
                let (_, s0, l0) = visits[q];
                if segs > s0 {
                    let mut folds: Vec<usize> = visits[q..].iter().map(|v| v.0).collect();
                    folds.sort_unstable();
                    folds.dedup();
                    let c = SlidingCycle {
                        folds,
                        segments: segs - s0,
                        landings: landings[l0..].to_vec(),
                    };
                    if !found.iter().any(|o| o.folds == c.folds && o.segments == c.segments) {
                        found.push(c);
                    }
                }
                break;
            }
            visits.push((jn, segs, landings.len()));
        }
    }
    found
}

/// `(lo, hi)` split into `n` points with exact end values and an exact zero
/// for symmetric ranges; a single point is the midpoint.
pub fn grid_axis(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n <= 1 {
        return vec![0.5 * (lo + hi)];
    }
    let d = (n - 1) as f64;
    (0..n)
        .map(|i| ((n - 1 - i) as f64 * lo + i as f64 * hi) / d)
        .collect()
}

/// Scenario registered under a command-line identifier.
pub fn scenario_by_id(id: &str) -> Result<Box<dyn Scenario>> {
    use crate::Error;
    match id {
        "cusp-synthetic" => Ok(Box::new(CuspFamily::standard())),
        "twofold-synthetic" => Ok(Box::new(TwoFoldFamily::standard())),
        "vi-foldfold-synthetic" => Ok(Box::new(ViFamily::standard())),
        "vi-foldfold-ode" => Ok(Box::new(circle::CircleScenario::new(&RunConfig::default())?)),
        _ => Err(Error::InvalidInput(format!(
            "unknown scenario '{id}' (expected one of {})",
            SCENARIOS.join(", ")
        ))),
    }
}

pub const SCENARIOS: [&str; 4] = [
    "cusp-synthetic",
    "twofold-synthetic",
    "vi-foldfold-synthetic",
    "vi-foldfold-ode",
];

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn axis_has_exact_zero() {
        let a = grid_axis(-0.15, 0.15, 41);
        assert_eq!(a[20], 0.0);
        assert_eq!(a[0], -0.15);
        assert_eq!(a[40], 0.15);
        assert_eq!(grid_axis(-1.0, 1.0, 1), vec![0.0]);
    }
}
