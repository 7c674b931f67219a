//! Trajectories of the Filippov system: regular arcs on either side,
//! crossings, sliding arcs and fold exits.

use std::fmt::Write as _;

use serde::Serialize;

use crate::config::RunConfig;
use crate::flow::{run_arc, ArcSpec, ArcStop, Section, Watch, WatchMode};
use crate::integrate::EventFn;
use crate::sigma::sliding_vector;
use crate::system::{FilippovSystem, Side, Vec2};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Regime {
    P,
    M,
    S,
}

impl Regime {
    pub fn code(self) -> &'static str {
        match self {
            Regime::P => "P",
            Regime::M => "M",
            Regime::S => "S",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EventKind {
    Cross,
    TangencyTouch,
    SlideEntry,
    FoldExit,
    SectionHit,
    SigmaReturn,
    PseudoEquilibrium,
    DomainExit,
    TimeOut,
}

impl EventKind {
    pub fn name(self) -> &'static str {
        match self {
            EventKind::Cross => "cross",
            EventKind::TangencyTouch => "tangency-touch",
            EventKind::SlideEntry => "slide-entry",
            EventKind::FoldExit => "fold-exit",
            EventKind::SectionHit => "section-hit",
            EventKind::SigmaReturn => "sigma-return",
            EventKind::PseudoEquilibrium => "pseudo-equilibrium",
            EventKind::DomainExit => "domain-exit",
            EventKind::TimeOut => "time-out",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajEvent {
    pub t: f64,
    pub point: Vec2,
    pub kind: EventKind,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ArcRecord {
    pub regime: Regime,
    pub t0: f64,
    pub samples: Vec<(f64, Vec2)>,
    pub end: Option<EventKind>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Trajectory {
    pub arcs: Vec<ArcRecord>,
    pub events: Vec<TrajEvent>,
}

impl Trajectory {
    pub fn end(&self) -> Option<Vec2> {
        self.events.last().map(|e| e.point)
    }

    pub fn final_event(&self) -> Option<&TrajEvent> {
        self.events.last()
    }

    pub fn count(&self, kind: EventKind) -> usize {
        self.events.iter().filter(|e| e.kind == kind).count()
    }

    pub fn sliding_arcs(&self) -> usize {
        self.arcs.iter().filter(|a| a.regime == Regime::S).count()
    }

    /// `t,x,y,regime,event` rows; event rows close each arc.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("t,x,y,regime,event\n");
        for arc in &self.arcs {
            let n = arc.samples.len();
            for (k, (t, p)) in arc.samples.iter().enumerate() {
                let tag = if k + 1 == n {
                    arc.end.map(|e| e.name()).unwrap_or("")
                } else {
                    ""
                };
                let _ = writeln!(s, "{},{},{},{},{}", t, p[0], p[1], arc.regime.code(), tag);
            }
        }
        s
    }
}

/// Stop when the orbit comes back to the switching manifold near a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SigmaStop {
    pub center: f64,
    pub halfwidth: f64,
    /// Only arrivals from this side count.
    pub from: Option<Side>,
    pub min_time: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryOpts {
    pub tmax: f64,
    pub sample_dt: Option<f64>,
    pub stop_section: Option<Section>,
    pub stop_sigma: Option<SigmaStop>,
    pub max_switches: usize,
}

impl Default for TrajectoryOpts {
    fn default() -> Self {
        TrajectoryOpts {
            tmax: 100.0,
            sample_dt: None,
            stop_section: None,
            stop_sigma: None,
            max_switches: 10_000,
        }
    }
}

/// Direction in which the field on `side` pushes the orbit off the
/// switching manifold at `q`: `+1` into `h > 0`, `-1` into `h < 0`.
fn push(z: &FilippovSystem, side: Side, q: Vec2, cfg: &RunConfig) -> Result<f64> {
    let sf = z.side(side);
    for k in 1..=cfg.contact_cap.min(sf.cap()) {
        let v = sf.lie_at(k, q);
        if v.abs() > cfg.tol {
            return Ok(v.signum());
        }
    }
    Err(Error::DegenerateContact(cfg.contact_cap))
}

/// Regime taken by the forward orbit leaving the switching manifold at `q`.
pub fn regime_at(z: &FilippovSystem, q: Vec2, cfg: &RunConfig) -> Result<Regime> {
    let px = push(z, Side::Plus, q, cfg)?;
    let py = push(z, Side::Minus, q, cfg)?;
    match (px > 0.0, py > 0.0) {
        (true, true) => Ok(Regime::P),
        (false, false) => Ok(Regime::M),
        (false, true) => Ok(Regime::S),
        (true, false) => Err(Error::NonDeterministicExit(q[0], q[1])),
    }
}

fn project(z: &FilippovSystem, mut p: Vec2) -> Vec2 {
    let h = z.h();
    let (hx, hy) = (h.dx(), h.dy());
    for _ in 0..3 {
        let v = h.eval(p[0], p[1]);
        let g = [hx.eval(p[0], p[1]), hy.eval(p[0], p[1])];
        let n2 = g[0] * g[0] + g[1] * g[1];
        if n2 == 0.0 || v == 0.0 {
            break;
        }
        p = [p[0] - v * g[0] / n2, p[1] - v * g[1] / n2];
    }
    p
}

fn close(traj: &mut Trajectory, t: f64, y: Vec2, kind: EventKind) {
    traj.events.push(TrajEvent { t, point: y, kind });
    if let Some(a) = traj.arcs.last_mut() {
        a.end = Some(kind);
    }
}

/// Forward Filippov trajectory from `p`.
pub fn filippov_trajectory(
    z: &FilippovSystem,
    p: Vec2,
    opts: &TrajectoryOpts,
    cfg: &RunConfig,
) -> Result<Trajectory> {
    let d = z.domain();
    if !d.contains(p) {
        return Err(Error::OutOfDomain(p[0], p[1]));
    }
    let hv = z.h_at(p);
    let mut regime = if hv > cfg.tol {
        Regime::P
    } else if hv < -cfg.tol {
        Regime::M
    } else {
        regime_at(z, p, cfg)?
    };
    let mut traj = Trajectory::default();
    let mut t = 0.0;
    let mut y = p;
    let h = z.h();
    let (hx, hy) = (h.dx(), h.dy());
    let gh = |q: Vec2| h.eval(q[0], q[1]);
    let gradh = |q: Vec2| [hx.eval(q[0], q[1]), hy.eval(q[0], q[1])];
    let xh = |q: Vec2| z.plus.lie_at(1, q);
    let xhg = |q: Vec2| z.plus.lie_grad(1, q);
    let yh = |q: Vec2| z.minus.lie_at(1, q);
    let yhg = |q: Vec2| z.minus.lie_grad(1, q);
    let fp = |q: Vec2| z.plus.eval(q);
    let fm = |q: Vec2| z.minus.eval(q);
    let fs = |q: Vec2| sliding_vector(z, q);
    // tangential speed of the sliding motion
    let tang = |q: Vec2| {
        let g = gradh(q);
        let v = sliding_vector(z, q);
        v[0] * (-g[1]) + v[1] * g[0]
    };
    let tang_grad = |q: Vec2| {
        let e = 1e-7;
        [
            (tang([q[0] + e, q[1]]) - tang([q[0] - e, q[1]])) / (2.0 * e),
            (tang([q[0], q[1] + e]) - tang([q[0], q[1] - e])) / (2.0 * e),
        ]
    };
    let tol = cfg.into();
    for _ in 0..opts.max_switches {
        let remaining = opts.tmax - t;
        if remaining <= 0.0 {
            traj.events.push(TrajEvent { t, point: y, kind: EventKind::TimeOut });
            return Ok(traj);
        }
        let (watches, f): (Vec<Watch>, &dyn Fn(Vec2) -> Vec2) = match regime {
            Regime::P => (
                vec![Watch { ev: EventFn { g: &gh, grad: &gradh }, mode: WatchMode::Stop, start: 0 }],
                &fp,
            ),
            Regime::M => (
                vec![Watch { ev: EventFn { g: &gh, grad: &gradh }, mode: WatchMode::Stop, start: 0 }],
                &fm,
            ),
            Regime::S => (
                vec![
                    Watch { ev: EventFn { g: &xh, grad: &xhg }, mode: WatchMode::Stop, start: 0 },
                    Watch { ev: EventFn { g: &yh, grad: &yhg }, mode: WatchMode::Stop, start: 0 },
                    Watch { ev: EventFn { g: &tang, grad: &tang_grad }, mode: WatchMode::Stop, start: 0 },
                ],
                &fs,
            ),
        };
        let out = run_arc(
            &ArcSpec {
                f,
                domain: Some(d),
                max_time: remaining,
                section: opts.stop_section,
                watches,
                sample_dt: opts.sample_dt,
                tol,
                touch_tol: 1e-10,
            },
            y,
        )?;
        let t0 = t;
        let shift = |v: &[(f64, Vec2)]| v.iter().map(|&(s, q)| (t0 + s, q)).collect::<Vec<_>>();
        traj.arcs.push(ArcRecord { regime, t0, samples: shift(&out.samples), end: None });
        if regime != Regime::S {
            for &(_, s, q) in &out.touches {
                traj.events.push(TrajEvent { t: t0 + s, point: q, kind: EventKind::TangencyTouch });
            }
        }
        t = t0 + out.t;
        y = out.end;

        match out.stop {
            ArcStop::Section => {
                close(&mut traj, t, y, EventKind::SectionHit);
                return Ok(traj);
            }
            ArcStop::Domain => {
                close(&mut traj, t, y, EventKind::DomainExit);
                return Ok(traj);
            }
            ArcStop::Time => {
                close(&mut traj, t, y, EventKind::TimeOut);
                return Ok(traj);
            }
            ArcStop::Watch(i) => {
                if regime == Regime::S {
                    y = project(z, y);
                    if i == 2 {
                        close(&mut traj, t, y, EventKind::PseudoEquilibrium);
                        return Ok(traj);
                    }
                    let next = regime_at(z, y, cfg)?;
                    close(&mut traj, t, y, EventKind::FoldExit);
                    if next == Regime::S {
                        // numerically still sliding; nudge along the motion
                        regime = if i == 0 { Regime::P } else { Regime::M };
                    } else {
                        regime = next;
                    }
                    continue;
                }
                let from = if regime == Regime::P { Side::Plus } else { Side::Minus };
                if let Some(ss) = &opts.stop_sigma {
                    if (y[0] - ss.center).abs() <= ss.halfwidth
                        && t >= ss.min_time
                        && ss.from.map_or(true, |s| s == from)
                    {
                        close(&mut traj, t, y, EventKind::SigmaReturn);
                        return Ok(traj);
                    }
                }
                let next = match regime_at(z, y, cfg) {
                    Ok(r) => r,
                    Err(Error::NonDeterministicExit(..)) => {
                        // arrival at a point where both fields leave: stay on the
                        // side we came from (a touch)
                        regime
                    }
                    Err(e) => return Err(e),
                };
                let kind = match next {
                    Regime::S => EventKind::SlideEntry,
                    r if r == regime => EventKind::TangencyTouch,
                    _ => EventKind::Cross,
                };
                close(&mut traj, t, y, kind);
                regime = next;
            }
        }
    }
    traj.events.push(TrajEvent { t, point: y, kind: EventKind::TimeOut });
    Ok(traj)
}
