//! Dormand-Prince 5(4) with continuous extension and event refinement.

use crate::config::RunConfig;
use crate::system::Vec2;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub rtol: f64,
    pub atol: f64,
    pub h_max: f64,
    pub max_steps: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            rtol: 1e-12,
            atol: 1e-12,
            h_max: 0.1,
            max_steps: 2_000_000,
        }
    }
}

impl From<&RunConfig> for Tolerances {
    fn from(c: &RunConfig) -> Self {
        Tolerances {
            rtol: c.rtol,
            atol: c.atol,
            h_max: c.h_max,
            ..Tolerances::default()
        }
    }
}

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

fn axpy(y: Vec2, terms: &[(f64, Vec2)], h: f64) -> Vec2 {
    let mut out = y;
    for &(a, k) in terms {
        out[0] += h * a * k[0];
        out[1] += h * a * k[1];
    }
    out
}

struct Stages {
    k: [Vec2; 7],
    y1: Vec2,
    err: Vec2,
}

fn stages(f: &dyn Fn(Vec2) -> Vec2, y: Vec2, k1: Vec2, h: f64) -> Stages {
    let k2 = f(axpy(y, &[(A21, k1)], h));
    let k3 = f(axpy(y, &[(A31, k1), (A32, k2)], h));
    let k4 = f(axpy(y, &[(A41, k1), (A42, k2), (A43, k3)], h));
    let k5 = f(axpy(y, &[(A51, k1), (A52, k2), (A53, k3), (A54, k4)], h));
    let k6 = f(axpy(
        y,
        &[(A61, k1), (A62, k2), (A63, k3), (A64, k4), (A65, k5)],
        h,
    ));
    let y1 = axpy(
        y,
        &[(A71, k1), (A73, k3), (A74, k4), (A75, k5), (A76, k6)],
        h,
    );
    let k7 = f(y1);
    let err = axpy(
        [0.0, 0.0],
        &[(E1, k1), (E3, k3), (E4, k4), (E5, k5), (E6, k6), (E7, k7)],
        h,
    );
    Stages {
        k: [k1, k2, k3, k4, k5, k6, k7],
        y1,
        err,
    }
}

/// One fifth order step of length `h` from `y` without error control.
pub fn rk_step(f: &dyn Fn(Vec2) -> Vec2, y: Vec2, h: f64) -> Vec2 {
    if h == 0.0 {
        return y;
    }
    stages(f, y, f(y), h).y1
}

/// An accepted step with its continuous extension.
#[derive(Debug, Clone, Copy)]
pub struct DenseStep {
    pub t0: f64,
    pub h: f64,
    pub y0: Vec2,
    pub y1: Vec2,
    r: [Vec2; 5],
}

impl DenseStep {
    pub fn t1(&self) -> f64 {
        self.t0 + self.h
    }

    /// Interpolated state at absolute time `t`.
    pub fn at(&self, t: f64) -> Vec2 {
        let s = ((t - self.t0) / self.h).clamp(0.0, 1.0);
        let s1 = 1.0 - s;
        let mut out = [0.0; 2];
        for i in 0..2 {
            out[i] = self.r[0][i]
                + s * (self.r[1][i] + s1 * (self.r[2][i] + s * (self.r[3][i] + s1 * self.r[4][i])));
        }
        out
    }
}

/// Adaptive stepper for `y' = f(y)`; time always increases.
pub struct Stepper<'a> {
    f: &'a dyn Fn(Vec2) -> Vec2,
    tol: Tolerances,
    pub t: f64,
    pub y: Vec2,
    h: f64,
    k1: Vec2,
    steps: usize,
}

impl<'a> Stepper<'a> {
    pub fn new(f: &'a dyn Fn(Vec2) -> Vec2, y0: Vec2, tol: Tolerances) -> Self {
        let k1 = f(y0);
        let speed = k1[0].hypot(k1[1]).max(1e-3);
        let h = (1e-3 / speed).min(tol.h_max).max(1e-8);
        Stepper {
            f,
            tol,
            t: 0.0,
            y: y0,
            h,
            k1,
            steps: 0,
        }
    }

    /// Takes one accepted step, never passing `t_end`.
    pub fn step(&mut self, t_end: f64) -> Result<DenseStep> {
        let mut rejected = false;
        loop {
            self.steps += 1;
            if self.steps > self.tol.max_steps {
                return Err(Error::StepSizeUnderflow(self.t));
            }
            let remaining = t_end - self.t;
            let mut h = self.h.min(self.tol.h_max);
            let last = h >= remaining;
            if last {
                h = remaining;
            }
            if h <= 1e-14 * self.t.abs().max(1.0) && !last {
                return Err(Error::StepSizeUnderflow(self.t));
            }
            let st = stages(self.f, self.y, self.k1, h);
            let mut e2 = 0.0;
            let mut finite = true;
            for i in 0..2 {
                let sc = self.tol.atol + self.tol.rtol * self.y[i].abs().max(st.y1[i].abs());
                let q = st.err[i] / sc;
                e2 += q * q;
                finite &= st.y1[i].is_finite();
            }
            let err = (0.5 * e2).sqrt();
            if !finite || !err.is_finite() {
                self.h = h * 0.1;
                rejected = true;
                continue;
            }
            if err <= 1.0 {
                let [k1, _, k3, k4, k5, k6, k7] = st.k;
                let ydiff = [st.y1[0] - self.y[0], st.y1[1] - self.y[1]];
                let bspl = [h * k1[0] - ydiff[0], h * k1[1] - ydiff[1]];
                let r4 = [
                    ydiff[0] - h * k7[0] - bspl[0],
                    ydiff[1] - h * k7[1] - bspl[1],
                ];
                let r5 = axpy(
                    [0.0, 0.0],
                    &[(D1, k1), (D3, k3), (D4, k4), (D5, k5), (D6, k6), (D7, k7)],
                    h,
                );
                let ds = DenseStep {
                    t0: self.t,
                    h,
                    y0: self.y,
                    y1: st.y1,
                    r: [self.y, ydiff, bspl, r4, r5],
                };
                let mut fac = 0.9 * err.max(1e-10).powf(-0.2);
                fac = fac.clamp(0.2, 5.0);
                if rejected {
                    fac = fac.min(1.0);
                }
                if !last || fac < 1.0 {
                    self.h = h * fac;
                }
                self.t = if last { t_end } else { self.t + h };
                self.y = st.y1;
                self.k1 = k7;
                return Ok(ds);
            }
            let fac = (0.9 * err.powf(-0.2)).clamp(0.1, 0.9);
            self.h = h * fac;
            rejected = true;
        }
    }
}

/// Scalar event function with its gradient.
pub struct EventFn<'a> {
    pub g: &'a dyn Fn(Vec2) -> f64,
    pub grad: &'a dyn Fn(Vec2) -> Vec2,
}

impl EventFn<'_> {
    /// Derivative of `g` along `f`.
    pub fn along(&self, f: &dyn Fn(Vec2) -> Vec2, y: Vec2) -> f64 {
        let gr = (self.grad)(y);
        let v = f(y);
        gr[0] * v[0] + gr[1] * v[1]
    }
}

/// Root of `g(y(t))` inside `[a, b]` (absolute times) where the signs of
/// `g` at the ends differ, refined with exact substeps from the step start.
pub fn refine_root(
    f: &dyn Fn(Vec2) -> Vec2,
    st: &DenseStep,
    ev: &EventFn,
    a: f64,
    b: f64,
) -> (f64, Vec2) {
    let g = |t: f64| (ev.g)(st.at(t));
    let ga = g(a);
    let mut t = crate::poly::bisect(g, a, b, ga);
    let (lo, hi) = (a.min(b), a.max(b));
    let mut y = rk_step(f, st.y0, t - st.t0);
    for _ in 0..4 {
        let gv = (ev.g)(y);
        let d = ev.along(f, y);
        if d == 0.0 || !d.is_finite() {
            break;
        }
        let tn = (t - gv / d).clamp(lo, hi);
        let dt = (tn - t).abs();
        t = tn;
        y = rk_step(f, st.y0, t - st.t0);
        if dt < 1e-15 * t.abs().max(1.0) {
            break;
        }
    }
    (t, y)
}

/// Root of a plain scalar function of time on the dense output.
pub fn dense_root<G: Fn(f64) -> f64>(g: G, a: f64, b: f64) -> f64 {
    let ga = g(a);
    crate::poly::bisect(g, a, b, ga)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_oscillator_period() {
        let f = |y: Vec2| [y[1], -y[0]];
        let mut s = Stepper::new(&f, [1.0, 0.0], Tolerances::default());
        let tend = 2.0 * std::f64::consts::PI;
        while s.t < tend {
            s.step(tend).unwrap();
        }
        assert!((s.y[0] - 1.0).abs() < 1e-10);
        assert!(s.y[1].abs() < 1e-10);
    }

    #[test]
    fn dense_output_is_accurate() {
        let f = |y: Vec2| [y[1], -y[0]];
        let mut s = Stepper::new(&f, [1.0, 0.0], Tolerances::default());
        let st = s.step(1.0).unwrap();
        let tm = st.t0 + 0.37 * st.h;
        let y = st.at(tm);
        assert!((y[0] - tm.cos()).abs() < 1e-11);
    }

    #[test]
    fn event_refinement() {
        let f = |y: Vec2| [y[1], -y[0]];
        let mut s = Stepper::new(&f, [1.0, 0.0], Tolerances { h_max: 2.0, ..Default::default() });
        let g = |y: Vec2| y[0];
        let grad = |_: Vec2| [1.0, 0.0];
        let ev = EventFn { g: &g, grad: &grad };
        loop {
            let st = s.step(3.0).unwrap();
            if g(st.y1) < 0.0 {
                let (t, _) = refine_root(&f, &st, &ev, st.t0, st.t1());
                assert!((t - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
                break;
            }
        }
    }
}
