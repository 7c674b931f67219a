//! Univariate and bivariate polynomials with real coefficients.

use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use crate::{Error, Result};

/// Polynomial in one variable, coefficients in ascending order.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Poly1 {
    c: Vec<f64>,
}

impl Poly1 {
    pub fn new(mut c: Vec<f64>) -> Self {
        while c.last() == Some(&0.0) {
            c.pop();
        }
        Poly1 { c }
    }

    pub fn constant(a: f64) -> Self {
        Poly1::new(vec![a])
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.c
    }

    pub fn coeff(&self, k: usize) -> f64 {
        self.c.get(k).copied().unwrap_or(0.0)
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        if self.c.is_empty() {
            None
        } else {
            Some(self.c.len() - 1)
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.c.iter().rev().fold(0.0, |acc, &a| acc * x + a)
    }

    pub fn derivative(&self) -> Poly1 {
        Poly1::new(
            self.c
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &a)| k as f64 * a)
                .collect(),
        )
    }

    pub fn scale(&self, s: f64) -> Poly1 {
        Poly1::new(self.c.iter().map(|a| a * s).collect())
    }

    /// Quotient of `p(x) - p(r)` by `x - r`.
    pub fn deflate(&self, r: f64) -> Poly1 {
        let n = self.c.len();
        if n <= 1 {
            return Poly1::default();
        }
        let mut q = vec![0.0; n - 1];
        let mut acc = 0.0;
        for k in (1..n).rev() {
            acc = acc * r + self.c[k];
            q[k - 1] = acc;
        }
        Poly1::new(q)
    }

    /// `p(x + s)` expanded in powers of `x`.
    pub fn shift(&self, s: f64) -> Poly1 {
        let mut out = Poly1::default();
        let lin = Poly1::new(vec![s, 1.0]);
        for &a in self.c.iter().rev() {
            out = &(&out * &lin) + &Poly1::constant(a);
        }
        out
    }

    /// Magnitude used to scale zero tests near `x`.
    fn scale_at(&self, x: f64) -> f64 {
        let ax = x.abs().max(1.0);
        self.c
            .iter()
            .enumerate()
            .map(|(k, a)| a.abs() * ax.powi(k as i32))
            .sum::<f64>()
            .max(f64::MIN_POSITIVE)
    }

    /// All real roots in the closed interval `[lo, hi]`, sorted, multiple
    /// roots reported once.
    pub fn real_roots(&self, lo: f64, hi: f64) -> Vec<f64> {
        let mut roots = self.roots_rec(lo, hi);
        roots.sort_by(|a, b| a.partial_cmp(b).unwrap());
        roots.dedup_by(|a, b| (*a - *b).abs() <= 1e-10 * (1.0 + b.abs()));
        roots
    }

    fn roots_rec(&self, lo: f64, hi: f64) -> Vec<f64> {
        match self.degree() {
            None | Some(0) => vec![],
            Some(1) => {
                let r = -self.c[0] / self.c[1];
                if r >= lo && r <= hi {
                    vec![r]
                } else {
                    vec![]
                }
            }
            Some(_) => {
                let crit = self.derivative().roots_rec(lo, hi);
                let mut knots = vec![lo];
                knots.extend(crit.iter().copied().filter(|&c| c > lo && c < hi));
                knots.push(hi);
                knots.sort_by(|a, b| a.partial_cmp(b).unwrap());
                let mut out = Vec::new();
                for &c in &crit {
                    if self.eval(c).abs() <= 1e-13 * self.scale_at(c) {
                        out.push(c);
                    }
                }
                for w in knots.windows(2) {
                    let (a, b) = (w[0], w[1]);
                    let (fa, fb) = (self.eval(a), self.eval(b));
                    if fa == 0.0 {
                        out.push(a);
                    }
                    if fb == 0.0 {
                        out.push(b);
                    }
                    if fa * fb < 0.0 {
                        out.push(bisect(|x| self.eval(x), a, b, fa));
                    }
                }
                out
            }
        }
    }
}

/// Bisection to machine precision on a bracket with `f(a) = fa`.
pub fn bisect<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, mut fa: f64) -> f64 {
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let fm = f(m);
        if fm == 0.0 {
            return m;
        }
        if fa * fm < 0.0 {
            b = m;
        } else {
            a = m;
            fa = fm;
        }
    }
    0.5 * (a + b)
}

impl Add for &Poly1 {
    type Output = Poly1;
    fn add(self, o: &Poly1) -> Poly1 {
        let n = self.c.len().max(o.c.len());
        Poly1::new((0..n).map(|k| self.coeff(k) + o.coeff(k)).collect())
    }
}

impl Sub for &Poly1 {
    type Output = Poly1;
    fn sub(self, o: &Poly1) -> Poly1 {
        let n = self.c.len().max(o.c.len());
        Poly1::new((0..n).map(|k| self.coeff(k) - o.coeff(k)).collect())
    }
}

impl Mul for &Poly1 {
    type Output = Poly1;
    fn mul(self, o: &Poly1) -> Poly1 {
        if self.is_zero() || o.is_zero() {
            return Poly1::default();
        }
        let mut c = vec![0.0; self.c.len() + o.c.len() - 1];
        for (i, a) in self.c.iter().enumerate() {
            for (j, b) in o.c.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        Poly1::new(c)
    }
}

/// Polynomial in `(x, y)` stored as sorted `(i, j, c)` monomials `c x^i y^j`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Poly2 {
    terms: Vec<(u32, u32, f64)>,
    deg: u32,
}

impl Poly2 {
    fn from_map(m: BTreeMap<(u32, u32), f64>) -> Self {
        let terms: Vec<_> = m
            .into_iter()
            .filter(|(_, c)| *c != 0.0)
            .map(|((i, j), c)| (i, j, c))
            .collect();
        let deg = terms.iter().map(|t| t.0 + t.1).max().unwrap_or(0);
        Poly2 { terms, deg }
    }

    /// Builds a polynomial from monomials; a repeated `(i, j)` is an error.
    pub fn from_terms(terms: &[(u32, u32, f64)]) -> Result<Self> {
        let mut m = BTreeMap::new();
        for &(i, j, c) in terms {
            if !c.is_finite() {
                return Err(Error::InvalidInput(format!(
                    "non-finite coefficient for monomial ({i}, {j})"
                )));
            }
            if m.insert((i, j), c).is_some() {
                return Err(Error::InvalidInput(format!(
                    "duplicate monomial ({i}, {j})"
                )));
            }
        }
        Ok(Poly2::from_map(m))
    }

    /// Like [`Poly2::from_terms`] but sums repeated monomials.
    pub fn summed(terms: &[(u32, u32, f64)]) -> Self {
        let mut m = BTreeMap::new();
        for &(i, j, c) in terms {
            *m.entry((i, j)).or_insert(0.0) += c;
        }
        Poly2::from_map(m)
    }

    pub fn constant(c: f64) -> Self {
        Poly2::summed(&[(0, 0, c)])
    }

    pub fn x() -> Self {
        Poly2::summed(&[(1, 0, 1.0)])
    }

    pub fn y() -> Self {
        Poly2::summed(&[(0, 1, 1.0)])
    }

    pub fn terms(&self) -> &[(u32, u32, f64)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.deg
    }

    pub fn eval(&self, x: f64, y: f64) -> f64 {
        const N: usize = 32;
        let d = self.deg as usize;
        if d >= N {
            return self
                .terms
                .iter()
                .map(|&(i, j, c)| c * x.powi(i as i32) * y.powi(j as i32))
                .sum();
        }
        let mut px = [1.0; N];
        let mut py = [1.0; N];
        for k in 1..=d {
            px[k] = px[k - 1] * x;
            py[k] = py[k - 1] * y;
        }
        self.terms
            .iter()
            .map(|&(i, j, c)| c * px[i as usize] * py[j as usize])
            .sum()
    }

    pub fn eval_at(&self, p: [f64; 2]) -> f64 {
        self.eval(p[0], p[1])
    }

    pub fn dx(&self) -> Poly2 {
        Poly2::summed(
            &self
                .terms
                .iter()
                .filter(|t| t.0 > 0)
                .map(|&(i, j, c)| (i - 1, j, c * i as f64))
                .collect::<Vec<_>>(),
        )
    }

    pub fn dy(&self) -> Poly2 {
        Poly2::summed(
            &self
                .terms
                .iter()
                .filter(|t| t.1 > 0)
                .map(|&(i, j, c)| (i, j - 1, c * j as f64))
                .collect::<Vec<_>>(),
        )
    }

    pub fn scale(&self, s: f64) -> Poly2 {
        Poly2::summed(
            &self
                .terms
                .iter()
                .map(|&(i, j, c)| (i, j, c * s))
                .collect::<Vec<_>>(),
        )
    }

    /// Substitutes `y = q(x)`.
    pub fn restrict(&self, q: &Poly1) -> Poly1 {
        let maxj = self.terms.iter().map(|t| t.1).max().unwrap_or(0) as usize;
        let mut qp = vec![Poly1::constant(1.0)];
        for k in 1..=maxj {
            let next = &qp[k - 1] * q;
            qp.push(next);
        }
        let mut out = Poly1::default();
        for &(i, j, c) in &self.terms {
            let mut xi = vec![0.0; i as usize + 1];
            xi[i as usize] = c;
            out = &out + &(&Poly1::new(xi) * &qp[j as usize]);
        }
        out
    }

    /// `p(x - dx, y - dy)`, the polynomial translated by `(dx, dy)`.
    pub fn translate(&self, dx: f64, dy: f64) -> Poly2 {
        let sx = Poly2::summed(&[(1, 0, 1.0), (0, 0, -dx)]);
        let sy = Poly2::summed(&[(0, 1, 1.0), (0, 0, -dy)]);
        let mut out = Poly2::default();
        for &(i, j, c) in &self.terms {
            let mut m = Poly2::constant(c);
            for _ in 0..i {
                m = &m * &sx;
            }
            for _ in 0..j {
                m = &m * &sy;
            }
            out = &out + &m;
        }
        out
    }

    /// Coefficient of `y^1` and `y^0` if the polynomial is affine in `y`
    /// with a constant nonzero `y` coefficient.
    pub fn as_graph(&self) -> Option<Poly1> {
        let mut a = None;
        let mut g = vec![];
        for &(i, j, c) in &self.terms {
            match j {
                0 => {
                    if g.len() <= i as usize {
                        g.resize(i as usize + 1, 0.0);
                    }
                    g[i as usize] = c;
                }
                1 if i == 0 => a = Some(c),
                _ => return None,
            }
        }
        let a = a?;
        Some(Poly1::new(g).scale(-1.0 / a))
    }
}

impl Add for &Poly2 {
    type Output = Poly2;
    fn add(self, o: &Poly2) -> Poly2 {
        let mut v = self.terms.clone();
        v.extend_from_slice(&o.terms);
        Poly2::summed(&v)
    }
}

impl Sub for &Poly2 {
    type Output = Poly2;
    fn sub(self, o: &Poly2) -> Poly2 {
        self + &(-o)
    }
}

impl Neg for &Poly2 {
    type Output = Poly2;
    fn neg(self) -> Poly2 {
        self.scale(-1.0)
    }
}

impl Mul for &Poly2 {
    type Output = Poly2;
    fn mul(self, o: &Poly2) -> Poly2 {
        let mut m: BTreeMap<(u32, u32), f64> = BTreeMap::new();
        for &(i, j, a) in &self.terms {
            for &(k, l, b) in &o.terms {
                *m.entry((i + k, j + l)).or_insert(0.0) += a * b;
            }
        }
        Poly2::from_map(m)
    }
}
