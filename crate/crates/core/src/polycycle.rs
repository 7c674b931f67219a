//! Displacement functions, crossing systems and their solutions.

use nalgebra::DMatrix;
use rand::{rngs::StdRng, Rng, SeedableRng};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::flow::Section;
use crate::germ::Germ;
use crate::interval::{IntervalSet, Locus};
use crate::poly::Poly1;
use crate::system::{FilippovSystem, Side};
use crate::trajectory::{filippov_trajectory, EventKind, Regime, SigmaStop, TrajectoryOpts};
use crate::{Error, Result};

/// A cyclic chain of displacement functions `Delta_i(x_i, x_{i+1})`,
/// indices taken mod `k`.
pub trait DisplacementModel: Sync {
    fn k(&self) -> usize;

    fn displacement(&self, i: usize, xi: f64, xnext: f64) -> Result<f64>;

    /// `(d/dx_i, d/dx_{i+1})` of `Delta_i`.
    fn partials(&self, i: usize, xi: f64, xnext: f64) -> Result<(f64, f64)> {
        let h1 = 1e-6 * xi.abs().max(1e-2);
        let h2 = 1e-6 * xnext.abs().max(1e-2);
        let a = (self.displacement(i, xi + h1, xnext)? - self.displacement(i, xi - h1, xnext)?)
            / (2.0 * h1);
        let b = (self.displacement(i, xi, xnext + h2)? - self.displacement(i, xi, xnext - h2)?)
            / (2.0 * h2);
        Ok((a, b))
    }

    fn sigma(&self, i: usize) -> &IntervalSet;

    /// Range scanned for initial guesses of `x_i`.
    fn window(&self, i: usize) -> (f64, f64);
}

/// One leg of a germ-backed model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Leg {
    #[serde(rename = "Tu")]
    pub tu: Germ,
    #[serde(rename = "DTs")]
    pub dts: Germ,
    pub sigma: Vec<[f64; 2]>,
    pub a: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Unfolding {
    pub alpha: f64,
    pub beta: f64,
    pub lambda1: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    pub k: usize,
    pub legs: Vec<Leg>,
    #[serde(default)]
    pub unfolding: Unfolding,
    #[serde(rename = "eII", default)]
    pub e_ii: bool,
}

/// Crossing system assembled from explicit germs of `T^u_i` and
/// `D_i^{-1} o T^s_{i+1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticModel {
    pub spec: ModelSpec,
    sigmas: Vec<IntervalSet>,
}

fn in_window(g: &Germ, x: f64) -> Result<()> {
    if (x - g.base).abs() > g.window * (1.0 + 1e-12) {
        Err(Error::OutsideWindow(x))
    } else {
        Ok(())
    }
}

impl SyntheticModel {
    pub fn new(spec: ModelSpec) -> Result<Self> {
        if spec.k == 0 || spec.legs.len() != spec.k {
            return Err(Error::InvalidInput(format!(
                "model declares k = {} but has {} legs",
                spec.k,
                spec.legs.len()
            )));
        }
        let mut sigmas = vec![];
        for (i, leg) in spec.legs.iter().enumerate() {
            for g in [&leg.tu, &leg.dts] {
                if g.coeffs.is_empty() || !(g.window > 0.0) {
                    return Err(Error::InvalidInput(format!("leg {i} has an empty germ")));
                }
                if g.coeffs.iter().any(|c| !c.is_finite()) {
                    return Err(Error::InvalidInput(format!("leg {i} has a non-finite coefficient")));
                }
            }
            let (lo, hi) = Self::x_range(&spec, i);
            for &[a, b] in &leg.sigma {
                if !(a <= b) || a < lo - 1e-12 || b > hi + 1e-12 {
                    return Err(Error::InvalidInput(format!(
                        "sigma interval [{a}, {b}] of leg {i} lies outside [{lo}, {hi}]"
                    )));
                }
            }
            sigmas.push(IntervalSet::from_pairs(&leg.sigma, (lo, hi)));
        }
        Ok(SyntheticModel { spec, sigmas })
    }

    pub fn from_json(s: &str) -> Result<Self> {
        SyntheticModel::new(serde_json::from_str(s)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.spec).expect("model serializes")
    }

    /// Range of `x_i` on which the `Tu_i` germ is evaluated.
    fn x_range(spec: &ModelSpec, i: usize) -> (f64, f64) {
        let g = &spec.legs[i].tu;
        let (lo, hi) = (g.base - g.window, g.base + g.window);
        if spec.e_ii {
            let c = 2.0 * (spec.legs[i].a + spec.unfolding.alpha);
            (c - hi, c - lo)
        } else {
            (lo, hi)
        }
    }

    /// Argument of `Tu_i` for the section coordinate `x`.
    pub fn tu_arg(&self, i: usize, x: f64) -> f64 {
        if self.spec.e_ii {
            2.0 * (self.spec.legs[i].a + self.spec.unfolding.alpha) - x
        } else {
            x
        }
    }

    pub fn tu(&self, i: usize, x: f64) -> Result<f64> {
        let y = self.tu_arg(i, x);
        let g = &self.spec.legs[i].tu;
        in_window(g, y)?;
        Ok(g.eval(y))
    }

    pub fn dts(&self, i: usize, x: f64) -> Result<f64> {
        let g = &self.spec.legs[i].dts;
        in_window(g, x)?;
        Ok(g.eval(x))
    }

    /// `x -> Delta(x, x)` of a one-leg model as a polynomial.
    pub fn loop_poly(&self) -> Poly1 {
        let leg = &self.spec.legs[0];
        let tu_local = leg.tu.local();
        // argument of Tu relative to its base, as a polynomial in x
        let arg = if self.spec.e_ii {
            Poly1::new(vec![
                2.0 * (leg.a + self.spec.unfolding.alpha) - leg.tu.base,
                -1.0,
            ])
        } else {
            Poly1::new(vec![-leg.tu.base, 1.0])
        };
        let mut tu = Poly1::constant(0.0);
        let mut pow = Poly1::constant(1.0);
        for &c in tu_local.coeffs() {
            tu = &tu + &pow.scale(c);
            pow = &pow * &arg;
        }
        let dts = leg.dts.local().shift(-leg.dts.base);
        &tu - &dts
    }

    /// `L_i`: the point of `sigma_{i+1}` joined to `x` by leg `i`.
    pub fn next(&self, i: usize, x: f64) -> Result<f64> {
        let v = self.tu(i, x)?;
        let g = &self.spec.legs[i].dts;
        let p = &g.local() - &Poly1::constant(v);
        let j = (i + 1) % self.spec.k;
        let roots = p.real_roots(-g.window * 4.0, g.window * 4.0);
        let cands: Vec<f64> = roots.iter().map(|r| r + g.base).collect();
        let inside: Vec<f64> = cands
            .iter()
            .copied()
            .filter(|&z| self.sigmas[j].contains(z) || self.sigmas[j].locus(z, 1e-12) == Locus::Boundary)
            .collect();
        let pick = inside
            .iter()
            .copied()
            .min_by(|a, b| (a - g.base).abs().partial_cmp(&(b - g.base).abs()).unwrap());
        match pick {
            Some(z) if (z - g.base).abs() <= g.window => Ok(z),
            Some(z) => Err(Error::EscapedAnnulus(z)),
            None if !cands.is_empty() => Err(Error::EscapedAnnulus(cands[0])),
            None => Err(Error::NoReturn),
        }
    }
}

impl DisplacementModel for SyntheticModel {
    fn k(&self) -> usize {
        self.spec.k
    }

    fn displacement(&self, i: usize, xi: f64, xnext: f64) -> Result<f64> {
        Ok(self.tu(i, xi)? - self.dts(i, xnext)?)
    }

    fn partials(&self, i: usize, xi: f64, xnext: f64) -> Result<(f64, f64)> {
        let leg = &self.spec.legs[i];
        let y = self.tu_arg(i, xi);
        in_window(&leg.tu, y)?;
        in_window(&leg.dts, xnext)?;
        let s = if self.spec.e_ii { -1.0 } else { 1.0 };
        Ok((s * leg.tu.derivative(y), -leg.dts.derivative(xnext)))
    }

    fn sigma(&self, i: usize) -> &IntervalSet {
        &self.sigmas[i]
    }

    fn window(&self, i: usize) -> (f64, f64) {
        let (lo, hi) = Self::x_range(&self.spec, i);
        let prev = &self.spec.legs[(i + self.spec.k - 1) % self.spec.k].dts;
        (lo.max(prev.base - prev.window), hi.min(prev.base + prev.window))
    }
}

/// Leg of a flow-backed model: Sigma near a vertex and a section on its
/// unstable separatrix.
#[derive(Debug, Clone, PartialEq)]
pub struct OdeLeg {
    pub tau_u: Section,
    pub sigma: IntervalSet,
    pub window: (f64, f64),
}

/// `Delta_i(x_i, x_{i+1})` as the chart distance on `tau^u_i` between the
/// forward orbit of `x_i` and the backward orbit of `x_{i+1}`.
pub struct OdeModel {
    pub z: FilippovSystem,
    pub zr: FilippovSystem,
    pub legs: Vec<OdeLeg>,
    pub cfg: RunConfig,
}

impl OdeModel {
    pub fn new(z: FilippovSystem, legs: Vec<OdeLeg>, cfg: &RunConfig) -> Self {
        let zr = z.reversed();
        OdeModel {
            z,
            zr,
            legs,
            cfg: cfg.clone(),
        }
    }

    fn chart_on(&self, z: &FilippovSystem, x: f64, sec: &Section) -> Result<f64> {
        let p = z.sigma_point(x)?;
        let opts = TrajectoryOpts {
            tmax: self.cfg.max_time,
            stop_section: Some(*sec),
            ..TrajectoryOpts::default()
        };
        let tr = filippov_trajectory(z, p, &opts, &self.cfg)?;
        if let Some(a) = tr.arcs.iter().find(|a| a.regime == Regime::S) {
            let q = a.samples[0].1;
            return Err(Error::OrbitHitsSliding(q[0], q[1]));
        }
        match tr.final_event() {
            Some(e) if e.kind == EventKind::SectionHit => Ok(sec.chart(e.point)),
            _ => Err(Error::NoHit),
        }
    }

    /// Forward orbit from Sigma to `tau^u_i`.
    pub fn tu(&self, i: usize, x: f64) -> Result<f64> {
        self.chart_on(&self.z, x, &self.legs[i].tau_u)
    }

    /// Backward orbit from Sigma to `tau^u_i`.
    pub fn dts(&self, i: usize, x: f64) -> Result<f64> {
        self.chart_on(&self.zr, x, &self.legs[i].tau_u)
    }

    /// One turn of the Filippov flow from `x` back to Sigma near the vertex,
    /// arriving from `from`.
    pub fn first_return(&self, x: f64, from: Side) -> Result<(f64, f64)> {
        let ret = |x: f64| -> Result<f64> {
            let (lo, hi) = self.legs[0].window;
            let p = self.z.sigma_point(x)?;
            let opts = TrajectoryOpts {
                tmax: self.cfg.max_time,
                stop_sigma: Some(SigmaStop {
                    center: 0.5 * (lo + hi),
                    halfwidth: 0.5 * (hi - lo),
                    from: Some(from),
                    min_time: 0.5,
                }),
                ..TrajectoryOpts::default()
            };
            let tr = filippov_trajectory(&self.z, p, &opts, &self.cfg)?;
            match tr.final_event() {
                Some(e) if e.kind == EventKind::SigmaReturn => Ok(e.point[0]),
                Some(e) if e.kind == EventKind::DomainExit || e.kind == EventKind::TimeOut => {
                    Err(Error::NoReturn)
                }
                Some(e) => Err(Error::EscapedAnnulus(e.point[0])),
                None => Err(Error::NoReturn),
            }
        };
        let px = ret(x)?;
        let h = 1e-5 * x.abs().max(1e-3);
        let d = (ret(x + h)? - ret(x - h)?) / (2.0 * h);
        Ok((px, d))
    }
}

impl DisplacementModel for OdeModel {
    fn k(&self) -> usize {
        self.legs.len()
    }

    fn displacement(&self, i: usize, xi: f64, xnext: f64) -> Result<f64> {
        let j = (i + 1) % self.legs.len();
        for (x, l) in [(xi, &self.legs[i]), (xnext, &self.legs[j])] {
            if x < l.window.0 || x > l.window.1 {
                return Err(Error::OutsideWindow(x));
            }
        }
        Ok(self.tu(i, xi)? - self.dts(i, xnext)?)
    }

    fn sigma(&self, i: usize) -> &IntervalSet {
        &self.legs[i].sigma
    }

    fn window(&self, i: usize) -> (f64, f64) {
        self.legs[i].window
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CrossingSolution {
    pub x: Vec<f64>,
    pub residual: f64,
    pub jacobian: Vec<Vec<f64>>,
    pub loci: Vec<Locus>,
    /// Smallest singular value of the Jacobian below the threshold.
    pub singular: bool,
    #[serde(skip)]
    pub partials: Vec<(f64, f64)>,
}

fn residuals(m: &dyn DisplacementModel, x: &[f64]) -> Result<Vec<f64>> {
    let k = m.k();
    (0..k)
        .map(|i| m.displacement(i, x[i], x[(i + 1) % k]))
        .collect()
}

fn norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |a, b| a.max(b.abs()))
}

fn jacobian(m: &dyn DisplacementModel, x: &[f64]) -> Result<(DMatrix<f64>, Vec<(f64, f64)>)> {
    let k = m.k();
    let mut j = DMatrix::zeros(k, k);
    let mut parts = vec![];
    for i in 0..k {
        let n = (i + 1) % k;
        let (a, b) = m.partials(i, x[i], x[n])?;
        j[(i, i)] += a;
        j[(i, n)] += b;
        parts.push((a, b));
    }
    Ok((j, parts))
}

fn min_singular(j: &DMatrix<f64>) -> f64 {
    j.clone().svd(false, false).singular_values.min()
}

/// Damped Newton iteration from one guess.
pub fn solve_crossing_system(
    m: &dyn DisplacementModel,
    guess: &[f64],
    cfg: &RunConfig,
) -> Result<CrossingSolution> {
    let k = m.k();
    if guess.len() != k {
        return Err(Error::InvalidInput(format!(
            "guess has {} coordinates, model has {k}",
            guess.len()
        )));
    }
    let mut x = guess.to_vec();
    let mut f = residuals(m, &x)?;
    let mut converged = false;
    for _ in 0..cfg.newton_max_iter {
        let (j, _) = jacobian(m, &x)?;
        let dx = match j.clone().lu().solve(&nalgebra::DVector::from_column_slice(&f)) {
            Some(d) if d.iter().all(|v| v.is_finite()) => d,
            _ => {
                if norm(&f) < cfg.newton_residual {
                    converged = true;
                    break;
                }
                return Err(Error::SingularJacobian);
            }
        };
        let f0 = norm(&f);
        let mut s = 1.0;
        let mut accepted = None;
        for h in 0..=cfg.newton_halvings {
            let xn: Vec<f64> = (0..k).map(|i| x[i] - s * dx[i]).collect();
            if let Ok(fnew) = residuals(m, &xn) {
                if norm(&fnew) < f0 || h == cfg.newton_halvings {
                    accepted = Some((xn, fnew));
                    break;
                }
            }
            s *= 0.5;
        }
        let Some((xn, fnew)) = accepted else {
            return Err(Error::NoConvergence);
        };
        let step = (0..k).fold(0.0f64, |a, i| a.max((xn[i] - x[i]).abs()));
        x = xn;
        f = fnew;
        if norm(&f) < cfg.newton_residual && step < cfg.newton_step {
            converged = true;
            break;
        }
    }
    let (j, partials) = jacobian(m, &x)?;
    let singular = min_singular(&j) < 1e-6;
    // at a degenerate root the step stalls at rounding level
    if !converged && !(singular && norm(&f) < cfg.newton_residual) {
        return Err(Error::NoConvergence);
    }
    let loci = (0..k)
        .map(|i| m.sigma(i).locus(x[i], cfg.boundary_tol))
        .collect();
    Ok(CrossingSolution {
        residual: norm(&f),
        jacobian: (0..k).map(|r| (0..k).map(|c| j[(r, c)]).collect()).collect(),
        x,
        loci,
        singular,
        partials,
    })
}

/// Lattice of initial guesses, jittered when `seed != 0`.
pub fn guess_lattice(m: &dyn DisplacementModel, cfg: &RunConfig) -> Vec<Vec<f64>> {
    let k = m.k();
    let n = cfg.lattice.max(1);
    let mut rng = StdRng::seed_from_u64(cfg.seed);
    let axes: Vec<Vec<f64>> = (0..k)
        .map(|i| {
            let (lo, hi) = m.window(i);
            let d = (hi - lo) / n as f64;
            (0..n)
                .map(|j| {
                    let mut g = lo + d * (j as f64 + 0.5);
                    if cfg.seed != 0 {
                        g += rng.gen_range(-0.25..0.25) * d;
                    }
                    g
                })
                .collect()
        })
        .collect();
    if k > 3 {
        // diagonal lattice only
        return (0..n).map(|j| axes.iter().map(|a| a[j]).collect()).collect();
    }
    let mut out: Vec<Vec<f64>> = vec![vec![]];
    for a in &axes {
        out = out
            .into_iter()
            .flat_map(|p| {
                a.iter().map(move |&v| {
                    let mut q = p.clone();
                    q.push(v);
                    q
                })
            })
            .collect();
    }
    out
}

/// All distinct solutions reached from the guess lattice, sorted by `x`.
pub fn solve_all(m: &dyn DisplacementModel, cfg: &RunConfig) -> Vec<CrossingSolution> {
    let guesses = guess_lattice(m, cfg);
    let found: Vec<CrossingSolution> = guesses
        .par_iter()
        .filter_map(|g| solve_crossing_system(m, g, cfg).ok())
        .collect();
    let mut out: Vec<CrossingSolution> = vec![];
    for s in found {
        let dup = out.iter_mut().find(|o| {
            let d = (0..s.x.len()).fold(0.0f64, |a, i| a.max((o.x[i] - s.x[i]).abs()));
            d <= cfg.merge_tol || ((o.singular || s.singular) && d <= 1e-5)
        });
        match dup {
            Some(o) => {
                if s.residual < o.residual {
                    *o = s;
                }
            }
            None => out.push(s),
        }
    }
    out.sort_by(|a, b| a.x.partial_cmp(&b.x).unwrap());
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CycleKind {
    CrossingLimitCycle,
    SigmaPolycycle,
    SlidingCycle,
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Stability {
    Attracting,
    Repelling,
    Semistable,
    CAttracting,
    CRepelling,
    Unknown,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CycleReport {
    pub kind: CycleKind,
    pub stability: Stability,
    pub solution: Option<CrossingSolution>,
    pub return_derivative: Option<f64>,
}

/// Derivative of the first return map at a solution by the chain rule.
pub fn return_derivative(sol: &CrossingSolution) -> Option<f64> {
    let mut p = 1.0;
    for &(a, b) in &sol.partials {
        if b.abs() < 1e-14 {
            return None;
        }
        p *= -a / b;
    }
    p.is_finite().then_some(p)
}

pub fn classify_solution(sol: &CrossingSolution) -> CycleReport {
    let kind = if sol.loci.iter().any(|l| *l == Locus::Outside) {
        CycleKind::None
    } else if sol.loci.iter().any(|l| *l == Locus::Boundary) {
        CycleKind::SigmaPolycycle
    } else {
        CycleKind::CrossingLimitCycle
    };
    let dp = return_derivative(sol);
    let stability = match (kind, dp) {
        (CycleKind::None, _) | (_, None) => Stability::Unknown,
        (CycleKind::SigmaPolycycle, Some(d)) => {
            if d.abs() < 1.0 {
                Stability::CAttracting
            } else {
                Stability::CRepelling
            }
        }
        (_, Some(d)) => {
            if sol.singular && (d.abs() - 1.0).abs() < 1e-4 {
                Stability::Semistable
            } else if sol.singular {
                Stability::Unknown
            } else if d.abs() < 1.0 {
                Stability::Attracting
            } else {
                Stability::Repelling
            }
        }
    };
    CycleReport {
        kind,
        stability,
        solution: Some(sol.clone()),
        return_derivative: dp,
    }
}

/// One turn of the germ model from `x` and its centered-difference slope.
pub fn first_return(m: &SyntheticModel, x: f64) -> Result<(f64, f64)> {
    let turn = |x: f64| -> Result<f64> {
        let mut v = x;
        for i in 0..m.k() {
            v = m.next(i, v)?;
        }
        Ok(v)
    };
    let px = turn(x)?;
    let h = 1e-6 * x.abs().max(1e-8);
    let d = (turn(x + h)? - turn(x - h)?) / (2.0 * h);
    Ok((px, d))
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn one_leg(tu: Vec<f64>, dts: Vec<f64>, w: f64, sigma: Vec<[f64; 2]>) -> SyntheticModel {
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

    fn vi(alpha: f64, beta: f64) -> SyntheticModel {
        let z = alpha - alpha.abs();
        SyntheticModel::new(ModelSpec {
            k: 1,
            legs: vec![Leg {
                tu: Germ::exact(0.0, vec![beta, 0.0, 1.0], 1.0),
                dts: Germ::exact(0.0, vec![0.0, 0.0, 2.0], 1.0),
                sigma: vec![[2.0 * alpha - 1.0, z]],
                a: 0.0,
            }],
            unfolding: Unfolding {
                alpha,
                beta,
                lambda1: 0.0,
            },
            e_ii: true,
        })
        .unwrap()
    }

    #[test]
    fn linear_solve() {
        let m = one_leg(vec![0.02, 1.03], vec![0.0], 0.5, vec![[-0.5, 0.5]]);
        let s = solve_crossing_system(&m, &[0.1], &RunConfig::default()).unwrap();
        assert!((s.x[0] + 0.02 / 1.03).abs() < 1e-12);
    }

    #[test]
    fn vi_two_cycles() {
        let m = vi(0.1, -0.06);
        let d = m.displacement(0, -0.05858, -0.05858).unwrap();
        assert!(d.abs() < 1e-5);
        let cfg = RunConfig::default();
        let sols = solve_all(&m, &cfg);
        let xs: Vec<f64> = sols
            .iter()
            .filter(|s| s.loci[0] != Locus::Outside)
            .map(|s| s.x[0])
            .collect();
        assert_eq!(xs.len(), 2, "{xs:?}");
        assert!((xs[0] - (-0.2 - 0.02f64.sqrt())).abs() < 1e-9);
        assert!((xs[1] - (-0.2 + 0.02f64.sqrt())).abs() < 1e-9);
        let outer = classify_solution(&sols.iter().find(|s| s.x[0] == xs[0]).unwrap().clone());
        let inner = classify_solution(&sols.iter().find(|s| s.x[0] == xs[1]).unwrap().clone());
        assert_eq!(outer.kind, CycleKind::CrossingLimitCycle);
        assert_eq!(outer.stability, Stability::Attracting);
        assert_eq!(inner.stability, Stability::Repelling);
    }

    #[test]
    fn vi_saddle_node_is_singular() {
        let m = vi(0.1, -0.08);
        let sols = solve_all(&m, &RunConfig::default());
        assert_eq!(sols.len(), 1, "{sols:?}");
        assert!((sols[0].x[0] + 0.2).abs() < 1e-6);
        assert!(sols[0].singular);
    }

    #[test]
    fn vi_boundary_polycycle() {
        let m = vi(0.1, -0.04);
        let s = solve_crossing_system(&m, &[0.01], &RunConfig::default()).unwrap();
        assert!(s.x[0].abs() < 1e-10);
        assert_eq!(classify_solution(&s).kind, CycleKind::SigmaPolycycle);
    }

    #[test]
    fn fold_first_return_ratio() {
        let m = one_leg(vec![0.0, 0.0, 1.0], vec![0.0, 2.0], 0.5, vec![[-0.5, 0.5]]);
        for x in [1e-2, 1e-3] {
            let (p, _) = first_return(&m, x).unwrap();
            assert!((p / (x * x) - 0.5).abs() < 0.025 * 0.5);
        }
        let id = one_leg(vec![0.0, 1.0], vec![0.0, 1.0], 0.5, vec![[-0.5, 0.5]]);
        let (p, d) = first_return(&id, 0.3).unwrap();
        assert!((p - 0.3).abs() < 1e-14 && (d - 1.0).abs() < 1e-9);
    }

    #[test]
    fn model_json_round_trip() {
        let m = vi(0.1, -0.06);
        let back = SyntheticModel::from_json(&m.to_json()).unwrap();
        assert_eq!(m, back);
        assert!(SyntheticModel::from_json(r#"{"k":2,"legs":[]}"#).is_err());
    }

    #[test]
    fn loop_poly_matches_displacement() {
        let m = vi(0.1, -0.06);
        let p = m.loop_poly();
        for x in [-0.3, -0.1, 0.0] {
            assert!((p.eval(x) - m.displacement(0, x, x).unwrap()).abs() < 1e-14);
        }
    }
}
