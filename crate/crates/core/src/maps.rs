//! Transition maps, mirror maps, their domains and the local transfer pairs
//! of a polycycle vertex. The switching manifold is charted by `x`.

use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::flow::{
    directed, flow_smooth, run_arc, transit, ArcSpec, ArcStop, Section, TimeDir, Transit, Watch,
    WatchMode,
};
use crate::germ::{fit_map, Chart, Germ};
use crate::integrate::EventFn;
use crate::interval::{Interval, IntervalSet};
use crate::sigma::contact_order;
use crate::system::{FilippovSystem, Side, SmoothField, Vec2};
use crate::trajectory::{filippov_trajectory, EventKind, Regime, TrajectoryOpts};
use crate::{Error, Result};

/// Where a transition map starts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Source {
    Sigma,
    Section(Section),
}

impl Source {
    pub fn point(&self, sf: &SmoothField, s: f64) -> Result<Vec2> {
        let p = match self {
            Source::Sigma => sf.sigma_point(s)?,
            Source::Section(sec) => sec.point(s),
        };
        if !sf.domain.contains(p) {
            return Err(Error::OutOfDomain(p[0], p[1]));
        }
        Ok(p)
    }
}

/// Transit of the orbit through chart value `s` of `from` to `to`,
/// ignoring the switching manifold.
pub fn transition(
    sf: &SmoothField,
    from: &Source,
    to: &Section,
    dir: TimeDir,
    s: f64,
    cfg: &RunConfig,
) -> Result<Transit> {
    transit(sf, from.point(sf, s)?, to, dir, cfg)
}

pub fn transition_map(
    sf: &SmoothField,
    from: &Source,
    to: &Section,
    dir: TimeDir,
    s: f64,
    cfg: &RunConfig,
) -> Result<f64> {
    transition(sf, from, to, dir, s, cfg).map(|t| t.hit.chart)
}

fn sampled_roots<F: Fn(f64) -> Option<f64>>(f: F, lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let mut out = vec![];
    let xs: Vec<f64> = (0..=n).map(|k| lo + (hi - lo) * k as f64 / n as f64).collect();
    let vs: Vec<Option<f64>> = xs.iter().map(|&x| f(x)).collect();
    for k in 0..n {
        if let (Some(a), Some(b)) = (vs[k], vs[k + 1]) {
            if a == 0.0 {
                out.push(xs[k]);
            } else if a * b < 0.0 {
                let g = |x: f64| f(x).unwrap_or(0.0);
                out.push(crate::poly::bisect(g, xs[k], xs[k + 1], a));
            }
        }
    }
    out
}

/// Zeros of `Fh` along the switching manifold with `lo <= x <= hi`.
pub fn tangency_points(sf: &SmoothField, lo: f64, hi: f64) -> Vec<f64> {
    match sf.lie_on_sigma(1) {
        Some(p) if p.is_zero() => vec![],
        Some(p) => p.real_roots(lo, hi),
        None => sampled_roots(
            |x| sf.sigma_point(x).ok().map(|q| sf.lie_at(1, q)),
            lo,
            hi,
            2000,
        ),
    }
}

/// Points where the line of `sec` meets the switching manifold.
fn section_crossings(sf: &SmoothField, sec: &Section, lo: f64, hi: f64) -> Vec<f64> {
    if let Some(g) = sf.sigma_graph() {
        let n = sec.normal();
        let l = crate::poly::Poly1::new(vec![
            -n[0] * sec.anchor[0] - n[1] * sec.anchor[1],
            n[0],
        ]);
        let p = &l + &g.scale(n[1]);
        if p.is_zero() {
            return vec![];
        }
        return p.real_roots(lo, hi);
    }
    sampled_roots(|x| sf.sigma_point(x).ok().map(|q| sec.line(q)), lo, hi, 2000)
}

/// First return to the switching manifold of the orbit leaving `p` into
/// `side` in direction `dir`.
pub fn sigma_return(
    sf: &SmoothField,
    p: Vec2,
    dir: TimeDir,
    side: Side,
    cfg: &RunConfig,
) -> Result<(Vec2, f64)> {
    let f = directed(sf, dir);
    let g = |y: Vec2| sf.h_at(y);
    let (hx, hy) = (sf.h.dx(), sf.h.dy());
    let grad = move |y: Vec2| [hx.eval(y[0], y[1]), hy.eval(y[0], y[1])];
    let out = run_arc(
        &ArcSpec {
            f: &f,
            domain: Some(sf.domain),
            max_time: cfg.max_time,
            section: None,
            watches: vec![Watch {
                ev: EventFn { g: &g, grad: &grad },
                mode: WatchMode::Stop,
                start: side.sign() as i8,
            }],
            sample_dt: None,
            tol: cfg.into(),
            touch_tol: 1e-10,
        },
        p,
    )?;
    match out.stop {
        ArcStop::Watch(_) => Ok((out.end, dir.sign() * out.t)),
        _ => Err(Error::NoReturn),
    }
}

/// Membership set on `(lo, hi)` of a predicate that may only change at the
/// `candidates`, or at isolated points located by bisection.
pub fn domain_by_membership<M: Fn(f64) -> bool>(
    member: M,
    candidates: &[f64],
    lo: f64,
    hi: f64,
) -> IntervalSet {
    let mut knots: Vec<f64> = candidates
        .iter()
        .copied()
        .filter(|&c| c > lo && c < hi)
        .collect();
    knots.sort_by(|a, b| a.partial_cmp(b).unwrap());
    knots.dedup_by(|a, b| (*a - *b).abs() <= 1e-12);
    let mut pieces = vec![];
    for &c in &knots {
        if member(c) {
            pieces.push(Interval::new(c, c, true, true));
        }
    }
    let mut edges = vec![lo];
    edges.extend(knots.iter().copied());
    edges.push(hi);
    for w in edges.windows(2) {
        cell_pieces(w[0], w[1], &member, &mut pieces);
    }
    merge(pieces)
}

fn cell_pieces<M: Fn(f64) -> bool>(a: f64, b: f64, member: &M, out: &mut Vec<Interval>) {
    const N: usize = 9;
    let xs: Vec<f64> = (0..N)
        .map(|j| a + (b - a) * (j as f64 + 0.5) / N as f64)
        .collect();
    let ms: Vec<bool> = xs.iter().map(|&x| member(x)).collect();
    let mut start = if ms[0] { Some((a, false)) } else { None };
    for j in 0..N - 1 {
        if ms[j] == ms[j + 1] {
            continue;
        }
        let (mut i, mut o) = if ms[j] {
            (xs[j], xs[j + 1])
        } else {
            (xs[j + 1], xs[j])
        };
        for _ in 0..80 {
            let m = 0.5 * (i + o);
            if m == i || m == o {
                break;
            }
            if member(m) {
                i = m
            } else {
                o = m
            }
        }
        if ms[j] {
            let (s, closed) = start.take().unwrap_or((a, false));
            out.push(Interval::new(s, i, closed, true));
        } else {
            start = Some((i, true));
        }
    }
    if let Some((s, closed)) = start {
        out.push(Interval::new(s, b, closed, false));
    }
}

fn merge(mut pieces: Vec<Interval>) -> IntervalSet {
    pieces.sort_by(|a, b| a.lo.partial_cmp(&b.lo).unwrap());
    let mut out: Vec<Interval> = vec![];
    for p in pieces {
        if let Some(last) = out.last_mut() {
            let touching = last.hi == p.lo && (last.hi_closed || p.lo_closed);
            if touching || last.hi > p.lo {
                if p.hi > last.hi {
                    last.hi = p.hi;
                    last.hi_closed = p.hi_closed;
                } else if p.hi == last.hi {
                    last.hi_closed |= p.hi_closed;
                }
                if p.lo == last.lo {
                    last.lo_closed |= p.lo_closed;
                }
                continue;
            }
        }
        out.push(p);
    }
    IntervalSet::new(out)
}

/// Chart values of Sigma points joined to a `side` tangency point by an arc
/// of `sf` lying in the closed half-plane.
fn shadows(sf: &SmoothField, side: Side, roots: &[f64], cfg: &RunConfig) -> Vec<f64> {
    let mut out = vec![];
    for &r in roots {
        let Ok(p) = sf.sigma_point(r) else { continue };
        let Ok(c) = contact_order(sf, p, cfg) else { continue };
        for (dir, s) in [
            (TimeDir::Forward, c.forward_sign()),
            (TimeDir::Backward, c.backward_sign()),
        ] {
            if s == side.sign() {
                if let Ok((q, _)) = sigma_return(sf, p, dir, side, cfg) {
                    out.push(q[0]);
                }
            }
        }
    }
    out
}

/// Points of the switching manifold in `(lo, hi)` whose orbit reaches `to`
/// without leaving the closed half-plane `side`.
pub fn sigma_domain(
    sf: &SmoothField,
    side: Side,
    to: &Section,
    dir: TimeDir,
    lo: f64,
    hi: f64,
    cfg: &RunConfig,
) -> Result<IntervalSet> {
    if !(lo < hi) {
        return Err(Error::WindowTooSmall);
    }
    let member = |x: f64| {
        transition(sf, &Source::Sigma, to, dir, x, cfg)
            .map(|t| t.in_half_plane(side, cfg.tol))
            .unwrap_or(false)
    };
    let roots = tangency_points(sf, lo, hi);
    let mut cands = roots.clone();
    cands.extend(shadows(sf, side, &roots, cfg));
    cands.extend(section_crossings(sf, to, lo, hi));
    Ok(domain_by_membership(member, &cands, lo, hi))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Exclusion {
    /// Odd contact or contact visible from the half-plane.
    Contact,
    /// Joined to such a contact by an arc in the half-plane.
    Connected,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Excluded {
    pub x: f64,
    pub cause: Exclusion,
}

pub fn exclusion_set(
    sf: &SmoothField,
    side: Side,
    lo: f64,
    hi: f64,
    cfg: &RunConfig,
) -> Vec<Excluded> {
    let mut out = vec![];
    let mut bad = vec![];
    for r in tangency_points(sf, lo, hi) {
        let Ok(p) = sf.sigma_point(r) else { continue };
        let exclude = match contact_order(sf, p, cfg) {
            Ok(c) => c.order % 2 == 1 || c.forward_sign() == side.sign(),
            Err(_) => true,
        };
        if exclude {
            out.push(Excluded {
                x: r,
                cause: Exclusion::Contact,
            });
            bad.push(r);
        }
    }
    for x in shadows(sf, side, &bad, cfg) {
        if x >= lo && x <= hi {
            out.push(Excluded {
                x,
                cause: Exclusion::Connected,
            });
        }
    }
    out
}

/// The involution of the switching manifold induced by the arcs of one
/// field in one half-plane.
pub struct Mirror<'a> {
    pub sf: &'a SmoothField,
    pub side: Side,
    pub lo: f64,
    pub hi: f64,
    pub excluded: Vec<Excluded>,
    cfg: RunConfig,
}

impl<'a> Mirror<'a> {
    pub fn new(sf: &'a SmoothField, side: Side, lo: f64, hi: f64, cfg: &RunConfig) -> Self {
        let excluded = exclusion_set(sf, side, lo, hi, cfg);
        Mirror {
            sf,
            side,
            lo,
            hi,
            excluded,
            cfg: cfg.clone(),
        }
    }

    /// Over the x-range of the domain of `sf`.
    pub fn over_domain(sf: &'a SmoothField, side: Side, cfg: &RunConfig) -> Self {
        Mirror::new(sf, side, sf.domain.xmin, sf.domain.xmax, cfg)
    }

    pub fn map(&self, x: f64) -> Result<f64> {
        let cfg = &self.cfg;
        let p = self.sf.sigma_point(x)?;
        if !self.sf.domain.contains(p) {
            return Err(Error::OutOfDomain(p[0], p[1]));
        }
        let c = contact_order(self.sf, p, cfg)?;
        if c.order > 1 {
            if c.order % 2 == 1 {
                return Err(Error::OddContact);
            }
            if c.forward_sign() == self.side.sign() {
                return Err(Error::InExclusionSet(x));
            }
            return Ok(x);
        }
        if self
            .excluded
            .iter()
            .any(|e| (e.x - x).abs() <= cfg.boundary_tol)
        {
            return Err(Error::InExclusionSet(x));
        }
        let dir = if c.forward_sign() == self.side.sign() {
            TimeDir::Forward
        } else {
            TimeDir::Backward
        };
        match sigma_return(self.sf, p, dir, self.side, cfg) {
            Ok((q, _)) => Ok(q[0]),
            Err(Error::NoReturn) | Err(Error::DomainExit { .. }) => Err(Error::NoReturn),
            Err(e) => Err(e),
        }
    }

    /// Points whose forward orbit enters the half-plane, together with the
    /// invisible even contacts, minus the exclusion set.
    pub fn domain(&self) -> IntervalSet {
        let s = self.side.sign();
        let member = |x: f64| {
            self.sf
                .sigma_point(x)
                .map(|p| s * self.sf.lie_at(1, p) >= 0.0)
                .unwrap_or(false)
                && !self
                    .excluded
                    .iter()
                    .any(|e| (e.x - x).abs() <= self.cfg.boundary_tol)
        };
        let mut cands = tangency_points(self.sf, self.lo, self.hi);
        cands.extend(self.excluded.iter().map(|e| e.x));
        domain_by_membership(member, &cands, self.lo, self.hi)
    }
}

/// `rho(x)` for the arcs of `sf` in `side`, over the domain's x-range.
pub fn mirror_map(sf: &SmoothField, side: Side, x: f64, cfg: &RunConfig) -> Result<f64> {
    Mirror::over_domain(sf, side, cfg).map(x)
}

/// Passage along the Filippov flow from one section to another. Pass the
/// reversed system for backward passages.
pub fn connection_diffeo(
    z: &FilippovSystem,
    from: &Section,
    to: &Section,
    s: f64,
    cfg: &RunConfig,
) -> Result<f64> {
    let opts = TrajectoryOpts {
        tmax: cfg.max_time,
        stop_section: Some(*to),
        ..TrajectoryOpts::default()
    };
    let tr = filippov_trajectory(z, from.point(s), &opts, cfg)?;
    if let Some(a) = tr.arcs.iter().find(|a| a.regime == Regime::S) {
        let p = a.samples[0].1;
        return Err(Error::OrbitHitsSliding(p[0], p[1]));
    }
    match tr.final_event() {
        Some(e) if e.kind == EventKind::SectionHit => Ok(to.chart(e.point)),
        _ => Err(Error::NoHit),
    }
}

/// Local structure of a polycycle vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TransferCase {
    /// Separatrices on opposite sides.
    O,
    /// Same side; the other field is transversal.
    EI,
    /// Same side; the other field has an invisible fold.
    EII,
}

/// Half-planes holding the unstable and stable separatrices at a vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Layout {
    pub unstable: Side,
    pub stable: Side,
}

#[derive(Debug, Clone)]
pub struct TransferPair {
    pub case: TransferCase,
    pub base: Vec2,
    pub tau_u: Section,
    pub tau_s: Section,
    pub tu: Germ,
    pub ts: Germ,
    pub sigma: IntervalSet,
}

fn order_at(sf: &SmoothField, p: Vec2, cfg: &RunConfig) -> usize {
    contact_order(sf, p, cfg).map(|c| c.order).unwrap_or(1)
}

/// Section across the orbit of `sf` at flight time `t` from `p`.
pub fn place_section(sf: &SmoothField, p: Vec2, t: f64, cfg: &RunConfig) -> Result<Section> {
    let a = flow_smooth(sf, p, t, cfg)?;
    Section::across(a, sf.eval(a), cfg.section_halfwidth)
}

fn flight(sf: &SmoothField, p: Vec2, cfg: &RunConfig) -> f64 {
    let v = sf.eval(p);
    cfg.section_distance / v[0].hypot(v[1]).max(1e-12)
}

/// Germs of the maps carrying the switching manifold near the vertex `p`
/// to the sections placed along its separatrices.
pub fn transfer_pair(
    z: &FilippovSystem,
    p: Vec2,
    layout: Layout,
    window: f64,
    cfg: &RunConfig,
) -> Result<TransferPair> {
    let fu = z.side(layout.unstable);
    let fs = z.side(layout.stable);
    let tau_u = place_section(fu, p, flight(fu, p, cfg), cfg)?;
    let tau_s = place_section(fs, p, -flight(fs, p, cfg), cfg)?;
    let (lo, hi) = (p[0] - window, p[0] + window);
    let nu = order_at(fu, p, cfg);
    let ns = order_at(fs, p, cfg);
    let samples = 4 * (nu.max(ns) + 1);
    let chart_u = Chart::Section {
        anchor: tau_u.anchor,
        direction: tau_u.direction,
    };
    let chart_s = Chart::Section {
        anchor: tau_s.anchor,
        direction: tau_s.direction,
    };
    let ts_map = |x: f64| transition_map(fs, &Source::Sigma, &tau_s, TimeDir::Backward, x, cfg);
    if layout.unstable != layout.stable {
        let tu = fit_map(
            |x| transition_map(fu, &Source::Sigma, &tau_u, TimeDir::Forward, x, cfg),
            p[0],
            lo,
            hi,
            nu,
            samples,
            cfg.cond_max,
        )?;
        let ts = fit_map(ts_map, p[0], lo, hi, ns, samples, cfg.cond_max)?;
        let su = sigma_domain(fu, layout.unstable, &tau_u, TimeDir::Forward, lo, hi, cfg)?;
        let ss = sigma_domain(fs, layout.stable, &tau_s, TimeDir::Backward, lo, hi, cfg)?;
        return Ok(TransferPair {
            case: TransferCase::O,
            base: p,
            tau_u,
            tau_s,
            tu: tu.with_chart(chart_u),
            ts: ts.with_chart(chart_s),
            sigma: su.intersect(&ss),
        });
    }
    let side = layout.unstable;
    let other = z.side(side.other());
    let c = contact_order(other, p, cfg)?;
    if c.order == 1 {
        // chart along the normal of the switching manifold
        let g = [z.h().dx().eval_at(p), z.h().dy().eval_at(p)];
        let gn = g[0].hypot(g[1]);
        let nu_v = [side.sign() * g[0] / gn, side.sign() * g[1] / gn];
        let normal = Section::new(p, nu_v, window)?;
        let from = Source::Section(normal);
        let tu = fit_map(
            |y| transition_map(fu, &from, &tau_u, TimeDir::Forward, y, cfg),
            0.0,
            0.0,
            window,
            1,
            samples,
            cfg.cond_max,
        )?;
        let ts = fit_map(
            |y| transition_map(fs, &from, &tau_s, TimeDir::Backward, y, cfg),
            0.0,
            0.0,
            window,
            1,
            samples,
            cfg.cond_max,
        )?;
        return Ok(TransferPair {
            case: TransferCase::EI,
            base: p,
            tau_u,
            tau_s,
            tu: tu.with_chart(chart_u),
            ts: ts.with_chart(chart_s),
            sigma: IntervalSet::new(vec![Interval::new(0.0, window, true, false)]),
        });
    }
    if c.order % 2 == 1 || c.forward_sign() == side.other().sign() {
        return Err(Error::UnsupportedSingularity(
            "other field has an odd or visible contact at the vertex".into(),
        ));
    }
    let rho = Mirror::over_domain(other, side.other(), cfg);
    let tu_map = |x: f64| {
        let r = rho.map(x)?;
        transition_map(fu, &Source::Sigma, &tau_u, TimeDir::Forward, r, cfg)
    };
    let tu = fit_map(&tu_map, p[0], lo, hi, nu, samples, cfg.cond_max)?;
    let ts = fit_map(ts_map, p[0], lo, hi, ns, samples, cfg.cond_max)?;
    let rdom = rho.domain();
    let member = |x: f64| {
        let stable = transition(fs, &Source::Sigma, &tau_s, TimeDir::Backward, x, cfg)
            .map(|t| t.in_half_plane(side, cfg.tol))
            .unwrap_or(false);
        let unstable = rho.map(x).and_then(|r| {
            transition(fu, &Source::Sigma, &tau_u, TimeDir::Forward, r, cfg)
                .map(|t| t.in_half_plane(side, cfg.tol))
        });
        rdom.contains(x) && stable && unstable.unwrap_or(false)
    };
    let mut cands = tangency_points(fu, lo, hi);
    cands.extend(tangency_points(other, lo, hi));
    cands.extend(shadows(fu, side, &cands.clone(), cfg));
    let images: Vec<f64> = cands.iter().filter_map(|&x| rho.map(x).ok()).collect();
    cands.extend(images);
    let sigma = domain_by_membership(member, &cands, lo, hi);
    Ok(TransferPair {
        case: TransferCase::EII,
        base: p,
        tau_u,
        tau_s,
        tu: tu.with_chart(chart_u),
        ts: ts.with_chart(chart_s),
        sigma,
    })
}
