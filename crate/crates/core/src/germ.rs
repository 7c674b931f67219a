//! Polynomial germs of transition maps and their least-squares fitting.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::poly::Poly1;
use crate::system::Vec2;
use crate::{Error, Result};

/// Chart the values of a germ are expressed in.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum Chart {
    Section { anchor: Vec2, direction: Vec2 },
    Sigma,
}

/// `sum c_k (x - base)^k`, valid on `|x - base| <= window`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Germ {
    pub base: f64,
    pub coeffs: Vec<f64>,
    pub residual: f64,
    pub window: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chart: Option<Chart>,
}

impl Germ {
    pub fn exact(base: f64, coeffs: Vec<f64>, window: f64) -> Self {
        Germ {
            base,
            coeffs,
            residual: 0.0,
            window,
            chart: None,
        }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn coeff(&self, k: usize) -> f64 {
        self.coeffs.get(k).copied().unwrap_or(0.0)
    }

    /// Polynomial in the local variable `x - base`.
    pub fn local(&self) -> Poly1 {
        Poly1::new(self.coeffs.clone())
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.local().eval(x - self.base)
    }

    pub fn derivative(&self, x: f64) -> f64 {
        self.local().derivative().eval(x - self.base)
    }

    /// Leading coefficient; `kappa` for a transition germ, `d~` for a
    /// diffeomorphism or fold germ of the stable side.
    pub fn leading(&self) -> f64 {
        self.coeffs.last().copied().unwrap_or(0.0)
    }

    pub fn kappa(&self) -> f64 {
        self.leading()
    }

    pub fn lambda(&self, i: usize) -> f64 {
        self.coeff(i)
    }

    /// Residual small against the scale of the leading term.
    pub fn high_confidence(&self) -> bool {
        self.residual <= 1e-7 * self.window.powi(self.degree() as i32)
    }

    pub fn with_chart(mut self, c: Chart) -> Self {
        self.chart = Some(c);
        self
    }
}

/// `m` Chebyshev points of the first kind on `[lo, hi]`, increasing.
pub fn chebyshev_nodes(lo: f64, hi: f64, m: usize) -> Vec<f64> {
    let c = 0.5 * (lo + hi);
    let r = 0.5 * (hi - lo);
    (0..m)
        .map(|k| {
            let th = std::f64::consts::PI * (2 * (m - 1 - k) + 1) as f64 / (2 * m) as f64;
            c + r * th.cos()
        })
        .collect()
}

/// Least-squares polynomial of the given degree through `samples`
/// (abscissa, value), expanded about `base`.
pub fn fit_germ(samples: &[(f64, f64)], base: f64, degree: usize, cond_max: f64) -> Result<Germ> {
    let need = 2 * (degree + 1);
    if samples.len() < need {
        return Err(Error::TooFewSamples {
            need,
            got: samples.len(),
        });
    }
    let w = samples
        .iter()
        .map(|s| (s.0 - base).abs())
        .fold(0.0, f64::max);
    if !(w > 1e-10) {
        return Err(Error::WindowTooSmall);
    }
    let m = samples.len();
    let a = DMatrix::from_fn(m, degree + 1, |i, k| ((samples[i].0 - base) / w).powi(k as i32));
    let b = DVector::from_iterator(m, samples.iter().map(|s| s.1));
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    let cond = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    if cond > cond_max {
        return Err(Error::IllConditioned(cond));
    }
    let sol = svd
        .solve(&b, 1e-14 * smax)
        .map_err(|e| Error::InvalidInput(e.to_string()))?;
    let coeffs: Vec<f64> = (0..=degree).map(|k| sol[k] / w.powi(k as i32)).collect();
    let germ = Germ::exact(base, coeffs, w);
    let residual = samples
        .iter()
        .map(|s| (germ.eval(s.0) - s.1).abs())
        .fold(0.0, f64::max);
    Ok(Germ { residual, ..germ })
}

/// Samples `f` on Chebyshev nodes of `[lo, hi]` and fits a germ about `base`.
pub fn fit_map<F: FnMut(f64) -> Result<f64>>(
    mut f: F,
    base: f64,
    lo: f64,
    hi: f64,
    degree: usize,
    samples: usize,
    cond_max: f64,
) -> Result<Germ> {
    let xs = chebyshev_nodes(lo, hi, samples.max(2 * (degree + 1)));
    let mut pts = Vec::with_capacity(xs.len());
    for x in xs {
        pts.push((x, f(x)?));
    }
    fit_germ(&pts, base, degree, cond_max)
}
