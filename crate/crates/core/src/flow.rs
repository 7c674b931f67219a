//! Smooth flows, transversal sections and event driven arcs.

use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::integrate::{dense_root, refine_root, DenseStep, EventFn, Stepper, Tolerances};
use crate::system::{Domain, SmoothField, Vec2};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TimeDir {
    Forward,
    Backward,
}

impl TimeDir {
    pub fn sign(self) -> f64 {
        match self {
            TimeDir::Forward => 1.0,
            TimeDir::Backward => -1.0,
        }
    }

    pub fn flip(self) -> TimeDir {
        match self {
            TimeDir::Forward => TimeDir::Backward,
            TimeDir::Backward => TimeDir::Forward,
        }
    }
}

/// Segment `anchor + s * direction`, `|s| <= halfwidth`, with the chart `s`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Section {
    pub anchor: Vec2,
    pub direction: Vec2,
    pub halfwidth: f64,
}

impl Section {
    pub fn new(anchor: Vec2, direction: Vec2, halfwidth: f64) -> Result<Self> {
        let n = direction[0].hypot(direction[1]);
        if !(n > 0.0) || !(halfwidth > 0.0) {
            return Err(Error::InvalidInput("degenerate section".into()));
        }
        Ok(Section {
            anchor,
            direction: [direction[0] / n, direction[1] / n],
            halfwidth,
        })
    }

    /// Section through `anchor` orthogonal to `v`, with the chart growing to
    /// the right of `v`.
    pub fn across(anchor: Vec2, v: Vec2, halfwidth: f64) -> Result<Self> {
        Section::new(anchor, [v[1], -v[0]], halfwidth)
    }

    pub fn normal(&self) -> Vec2 {
        [-self.direction[1], self.direction[0]]
    }

    /// Signed distance from the section line.
    pub fn line(&self, p: Vec2) -> f64 {
        let n = self.normal();
        (p[0] - self.anchor[0]) * n[0] + (p[1] - self.anchor[1]) * n[1]
    }

    pub fn chart(&self, p: Vec2) -> f64 {
        (p[0] - self.anchor[0]) * self.direction[0] + (p[1] - self.anchor[1]) * self.direction[1]
    }

    pub fn point(&self, s: f64) -> Vec2 {
        [
            self.anchor[0] + s * self.direction[0],
            self.anchor[1] + s * self.direction[1],
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WatchMode {
    /// End the arc when the function changes sign.
    Stop,
    /// Only record extrema and touches.
    Monitor,
}

/// Scalar function observed along an arc.
pub struct Watch<'a> {
    pub ev: EventFn<'a>,
    pub mode: WatchMode,
    /// Known starting sign of the function, `0` to read it off `y0`.
    pub start: i8,
}

pub struct ArcSpec<'a> {
    pub f: &'a dyn Fn(Vec2) -> Vec2,
    pub domain: Option<Domain>,
    pub max_time: f64,
    pub section: Option<Section>,
    pub watches: Vec<Watch<'a>>,
    pub sample_dt: Option<f64>,
    pub tol: Tolerances,
    /// Magnitude below which an extremum of a watched function is a touch.
    pub touch_tol: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ArcStop {
    Section,
    Watch(usize),
    Domain,
    Time,
}

#[derive(Debug, Clone)]
pub struct ArcOut {
    pub end: Vec2,
    pub t: f64,
    pub stop: ArcStop,
    /// `(min, max)` of each watched function over the arc, start included.
    pub extrema: Vec<(f64, f64)>,
    /// `(watch, time, point)` of tangential touches.
    pub touches: Vec<(usize, f64, Vec2)>,
    pub samples: Vec<(f64, Vec2)>,
}

const NS: usize = 8;

fn sgn(v: f64) -> i8 {
    if v > 0.0 {
        1
    } else if v < 0.0 {
        -1
    } else {
        0
    }
}

struct WatchScan {
    crossing: Option<(f64, f64)>,
    touches: Vec<(f64, Vec2)>,
}

/// Scans one step of a watched function; `side` holds the current sign.
fn scan_watch(
    f: &dyn Fn(Vec2) -> Vec2,
    st: &DenseStep,
    w: &Watch,
    side: &mut i8,
    ext: &mut (f64, f64),
    touch_tol: f64,
) -> WatchScan {
    let ts: Vec<f64> = (0..=NS).map(|j| st.t0 + st.h * j as f64 / NS as f64).collect();
    let mut pts: Vec<(f64, f64)> = ts.iter().map(|&t| (t, (w.ev.g)(st.at(t)))).collect();
    let dg = |t: f64| w.ev.along(f, st.at(t));
    let dv: Vec<f64> = ts.iter().map(|&t| dg(t)).collect();
    let mut touches = vec![];
    let mut extra = vec![];
    for j in 0..NS {
        if dv[j] * dv[j + 1] < 0.0 {
            let te = dense_root(dg, ts[j], ts[j + 1]);
            let ge = (w.ev.g)(st.at(te));
            extra.push((te, ge));
        }
    }
    pts.extend(extra.iter().copied());
    pts.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    for &(_, g) in &pts {
        ext.0 = ext.0.min(g);
        ext.1 = ext.1.max(g);
    }
    let mut crossing = None;
    for k in 0..pts.len() {
        let (t, g) = pts[k];
        if *side == 0 {
            if g.abs() > touch_tol {
                *side = sgn(g);
            }
            continue;
        }
        let is_ext = extra.iter().any(|e| e.0 == t);
        if is_ext && g.abs() <= touch_tol {
            touches.push((t, st.at(t)));
            continue;
        }
        if k > 0 && sgn(g) == -*side && g.abs() > touch_tol {
            // last point on the original side
            let mut a = pts[k - 1].0;
            for m in (0..k).rev() {
                if sgn(pts[m].1) == *side {
                    a = pts[m].0;
                    break;
                }
            }
            *side = -*side;
            if crossing.is_none() {
                crossing = Some((a, t));
            }
            if w.mode == WatchMode::Stop {
                break;
            }
        }
    }
    WatchScan { crossing, touches }
}

/// Integrates `y' = f(y)` from `y0` until the first stopping event.
pub fn run_arc(spec: &ArcSpec, y0: Vec2) -> Result<ArcOut> {
    let f = spec.f;
    if let Some(d) = &spec.domain {
        if !d.contains(y0) {
            return Err(Error::OutOfDomain(y0[0], y0[1]));
        }
    }
    let mut stepper = Stepper::new(f, y0, spec.tol);
    let mut sides: Vec<i8> = spec
        .watches
        .iter()
        .map(|w| {
            let g = (w.ev.g)(y0);
            if w.start != 0 {
                w.start
            } else if g.abs() > spec.touch_tol {
                sgn(g)
            } else {
                0
            }
        })
        .collect();
    let mut extrema: Vec<(f64, f64)> = spec
        .watches
        .iter()
        .map(|w| {
            let g = (w.ev.g)(y0);
            (g, g)
        })
        .collect();
    let mut sec_side: i8 = spec.section.map(|s| sgn(s.line(y0))).unwrap_or(0);
    let mut touches = vec![];
    let mut samples = vec![(0.0, y0)];
    let mut next_sample = spec.sample_dt.map(|d| d);
    loop {
        let st = stepper.step(spec.max_time)?;
        let mut best: Option<(f64, Vec2, ArcStop)> = None;
        let consider = |t: f64, y: Vec2, k: ArcStop, best: &mut Option<(f64, Vec2, ArcStop)>| {
            if best.map_or(true, |b| t < b.0) {
                *best = Some((t, y, k));
            }
        };
        let mut step_touches = vec![];
        for (i, w) in spec.watches.iter().enumerate() {
            let scan = scan_watch(f, &st, w, &mut sides[i], &mut extrema[i], spec.touch_tol);
            for (t, p) in scan.touches {
                step_touches.push((i, t, p));
            }
            if w.mode == WatchMode::Stop {
                if let Some((a, b)) = scan.crossing {
                    let (t, y) = refine_root(f, &st, &w.ev, a, b);
                    consider(t, y, ArcStop::Watch(i), &mut best);
                }
            }
        }
        if let Some(sec) = &spec.section {
            let g = |y: Vec2| sec.line(y);
            let n = sec.normal();
            let grad = move |_: Vec2| n;
            let ev = EventFn { g: &g, grad: &grad };
            let mut prev_t = st.t0;
            for j in 1..=NS {
                let t = st.t0 + st.h * j as f64 / NS as f64;
                let v = sgn(sec.line(st.at(t)));
                if sec_side == 0 {
                    sec_side = v;
                } else if v == -sec_side {
                    let (tr, yr) = refine_root(f, &st, &ev, prev_t, t);
                    if sec.chart(yr).abs() <= sec.halfwidth {
                        consider(tr, yr, ArcStop::Section, &mut best);
                        break;
                    }
                    sec_side = v;
                }
                prev_t = t;
            }
        }
        if let Some(d) = &spec.domain {
            if !d.contains(st.y1) || (0..NS).any(|j| !d.contains(st.at(st.t0 + st.h * j as f64 / NS as f64))) {
                let inside = |t: f64| {
                    let p = st.at(t);
                    (p[0] - d.xmin)
                        .min(d.xmax - p[0])
                        .min(p[1] - d.ymin)
                        .min(d.ymax - p[1])
                };
                let mut a = st.t0;
                let mut b = st.t1();
                for j in 1..=NS {
                    let t = st.t0 + st.h * j as f64 / NS as f64;
                    if inside(t) < 0.0 {
                        b = t;
                        break;
                    }
                    a = t;
                }
                let te = dense_root(inside, a, b);
                consider(te, st.at(te), ArcStop::Domain, &mut best);
            }
        }
        if best.is_none() && stepper.t >= spec.max_time {
            best = Some((spec.max_time, st.y1, ArcStop::Time));
        }
        let t_stop = best.map(|b| b.0).unwrap_or(st.t1());
        for (i, t, p) in step_touches {
            if t <= t_stop {
                touches.push((i, t, p));
            }
        }
        match spec.sample_dt {
            Some(dt) => {
                while let Some(ts) = next_sample {
                    if ts > t_stop {
                        break;
                    }
                    samples.push((ts, st.at(ts)));
                    next_sample = Some(ts + dt);
                }
            }
            None => {
                if best.is_none() {
                    samples.push((st.t1(), st.y1));
                }
            }
        }
        if let Some((t, y, stop)) = best {
            if samples.last().map_or(true, |s| s.0 < t) {
                samples.push((t, y));
            }
            return Ok(ArcOut {
                end: y,
                t,
                stop,
                extrema,
                touches,
                samples,
            });
        }
    }
}

/// Field multiplied by the time direction.
pub fn directed(sf: &SmoothField, dir: TimeDir) -> impl Fn(Vec2) -> Vec2 + '_ {
    let s = dir.sign();
    move |p| {
        let v = sf.eval(p);
        [s * v[0], s * v[1]]
    }
}

/// `phi_F(t; p)` for either sign of `t`.
pub fn flow_smooth(sf: &SmoothField, p: Vec2, t: f64, cfg: &RunConfig) -> Result<Vec2> {
    let dir = if t >= 0.0 { TimeDir::Forward } else { TimeDir::Backward };
    if t == 0.0 {
        return Ok(p);
    }
    let f = directed(sf, dir);
    let out = run_arc(
        &ArcSpec {
            f: &f,
            domain: Some(sf.domain),
            max_time: t.abs(),
            section: None,
            watches: vec![],
            sample_dt: None,
            tol: cfg.into(),
            touch_tol: 1e-10,
        },
        p,
    )?;
    match out.stop {
        ArcStop::Domain => Err(Error::DomainExit {
            x: out.end[0],
            y: out.end[1],
            t: dir.sign() * out.t,
        }),
        _ => Ok(out.end),
    }
}

/// First hit of a section.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hit {
    pub point: Vec2,
    pub chart: f64,
    /// Signed flight time.
    pub time: f64,
}

/// Hit together with the range of `h` along the arc.
#[derive(Debug, Clone)]
pub struct Transit {
    pub hit: Hit,
    pub h_min: f64,
    pub h_max: f64,
    pub touches: Vec<(f64, Vec2)>,
}

impl Transit {
    /// Whether the arc stays in the closed half-plane `side`.
    pub fn in_half_plane(&self, side: crate::system::Side, tol: f64) -> bool {
        match side {
            crate::system::Side::Plus => self.h_min >= -tol,
            crate::system::Side::Minus => self.h_max <= tol,
        }
    }
}

/// First hit of `section` by the orbit of `sf` through `p`, recording the
/// extrema of `h` along the way.
pub fn transit(
    sf: &SmoothField,
    p: Vec2,
    section: &Section,
    dir: TimeDir,
    cfg: &RunConfig,
) -> Result<Transit> {
    let f = directed(sf, dir);
    let g = |y: Vec2| sf.h_at(y);
    let (hx, hy) = (sf.h.dx(), sf.h.dy());
    let grad = move |y: Vec2| [hx.eval(y[0], y[1]), hy.eval(y[0], y[1])];
    let out = run_arc(
        &ArcSpec {
            f: &f,
            domain: Some(sf.domain),
            max_time: cfg.max_time,
            section: Some(*section),
            watches: vec![Watch {
                ev: EventFn { g: &g, grad: &grad },
                mode: WatchMode::Monitor,
                start: 0,
            }],
            sample_dt: None,
            tol: cfg.into(),
            touch_tol: 1e-10,
        },
        p,
    )?;
    match out.stop {
        ArcStop::Section => {
            let v = sf.eval(out.end);
            let n = section.normal();
            let vn = v[0] * n[0] + v[1] * n[1];
            if vn.abs() <= cfg.tol * v[0].hypot(v[1]).max(1.0) {
                return Err(Error::TangentialHit(out.end[0], out.end[1]));
            }
            Ok(Transit {
                hit: Hit {
                    point: out.end,
                    chart: section.chart(out.end),
                    time: dir.sign() * out.t,
                },
                h_min: out.extrema[0].0,
                h_max: out.extrema[0].1,
                touches: out.touches.iter().map(|t| (t.1, t.2)).collect(),
            })
        }
        ArcStop::Domain => Err(Error::DomainExit {
            x: out.end[0],
            y: out.end[1],
            t: dir.sign() * out.t,
        }),
        _ => Err(Error::NoHit),
    }
}

pub fn hit_section(
    sf: &SmoothField,
    p: Vec2,
    section: &Section,
    dir: TimeDir,
    cfg: &RunConfig,
) -> Result<Hit> {
    transit(sf, p, section, dir, cfg).map(|t| t.hit)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::Poly2;
    use crate::system::PolyField;

    fn rot() -> SmoothField {
        let f = PolyField::from_terms(&[(0, 1, -1.0)], &[(1, 0, 1.0)]).unwrap();
        SmoothField::new(f, Poly2::y(), Domain::new(-5.0, 5.0, -5.0, 5.0).unwrap(), 6)
    }

    #[test]
    fn rotation_flow() {
        let cfg = RunConfig::default();
        let q = flow_smooth(&rot(), [1.0, 0.0], std::f64::consts::FRAC_PI_2, &cfg).unwrap();
        assert!(q[0].abs() < 1e-11 && (q[1] - 1.0).abs() < 1e-11);
        let back = flow_smooth(&rot(), q, -std::f64::consts::FRAC_PI_2, &cfg).unwrap();
        assert!((back[0] - 1.0).abs() < 1e-11);
    }

    #[test]
    fn domain_exit_reported() {
        let f = PolyField::from_terms(&[(0, 0, 1.0)], &[]).unwrap();
        let sf = SmoothField::new(f, Poly2::y(), Domain::new(-1.0, 1.0, -1.0, 1.0).unwrap(), 6);
        match flow_smooth(&sf, [0.0, 0.0], 5.0, &RunConfig::default()) {
            Err(Error::DomainExit { x, t, .. }) => {
                assert!((x - 1.0).abs() < 1e-9 && (t - 1.0).abs() < 1e-9)
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn parabola_hits_vertical_section() {
        let f = PolyField::from_terms(&[(0, 0, 1.0)], &[(1, 0, 1.0)]).unwrap();
        let sf = SmoothField::new(f, Poly2::y(), Domain::new(-3.0, 3.0, -3.0, 3.0).unwrap(), 6);
        let sec = Section::new([1.0, 0.0], [0.0, 1.0], 2.0).unwrap();
        let cfg = RunConfig::default();
        let tr = transit(&sf, [-0.2, 0.0], &sec, TimeDir::Forward, &cfg).unwrap();
        assert!((tr.hit.chart - 0.48).abs() < 1e-12);
        assert!((tr.hit.time - 1.2).abs() < 1e-12);
        assert!(tr.h_min < -0.019);
        let tr0 = transit(&sf, [0.0, 0.0], &sec, TimeDir::Forward, &cfg).unwrap();
        assert!(tr0.h_min >= -1e-14);
    }
}
