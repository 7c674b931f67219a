//! Polynomial vector fields, the switching function and the Filippov pair.

use serde::{Deserialize, Serialize};

use crate::poly::{Poly1, Poly2};
use crate::{Error, Result};

pub type Vec2 = [f64; 2];

/// Axis aligned rectangle `[xmin, xmax] x [ymin, ymax]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Domain {
    pub xmin: f64,
    pub xmax: f64,
    pub ymin: f64,
    pub ymax: f64,
}

impl Domain {
    pub fn new(xmin: f64, xmax: f64, ymin: f64, ymax: f64) -> Result<Self> {
        if !(xmin < xmax && ymin < ymax) || ![xmin, xmax, ymin, ymax].iter().all(|v| v.is_finite())
        {
            return Err(Error::InvalidInput("empty or non-finite domain".into()));
        }
        Ok(Domain { xmin, xmax, ymin, ymax })
    }

    pub fn contains(&self, p: Vec2) -> bool {
        p[0] >= self.xmin && p[0] <= self.xmax && p[1] >= self.ymin && p[1] <= self.ymax
    }

    pub fn as_array(&self) -> [f64; 4] {
        [self.xmin, self.xmax, self.ymin, self.ymax]
    }
}

/// Planar vector field with polynomial components.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PolyField {
    pub fx: Poly2,
    pub fy: Poly2,
}

impl PolyField {
    pub fn new(fx: Poly2, fy: Poly2) -> Self {
        PolyField { fx, fy }
    }

    pub fn from_terms(fx: &[(u32, u32, f64)], fy: &[(u32, u32, f64)]) -> Result<Self> {
        Ok(PolyField::new(Poly2::from_terms(fx)?, Poly2::from_terms(fy)?))
    }

    pub fn eval(&self, p: Vec2) -> Vec2 {
        [self.fx.eval(p[0], p[1]), self.fy.eval(p[0], p[1])]
    }

    pub fn degree(&self) -> u32 {
        self.fx.degree().max(self.fy.degree())
    }

    /// `<F, grad g>` as a polynomial.
    pub fn lie(&self, g: &Poly2) -> Poly2 {
        &(&self.fx * &g.dx()) + &(&self.fy * &g.dy())
    }

    pub fn neg(&self) -> PolyField {
        PolyField::new(-&self.fx, -&self.fy)
    }

    /// Field conjugated by the translation `(x, y) -> (x + dx, y + dy)`.
    pub fn translate(&self, dx: f64, dy: f64) -> PolyField {
        PolyField::new(self.fx.translate(dx, dy), self.fy.translate(dx, dy))
    }
}

/// `F^k h` computed by repeated polynomial Lie differentiation.
pub fn lie_derivative(f: &PolyField, h: &Poly2, k: usize) -> Poly2 {
    let mut g = h.clone();
    for _ in 0..k {
        g = f.lie(&g);
    }
    g
}

/// Which half-plane (and so which field) a quantity refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Plus,
    Minus,
}

impl Side {
    /// `+1` for the half-plane `h > 0`, `-1` otherwise.
    pub fn sign(self) -> f64 {
        match self {
            Side::Plus => 1.0,
            Side::Minus => -1.0,
        }
    }

    pub fn other(self) -> Side {
        match self {
            Side::Plus => Side::Minus,
            Side::Minus => Side::Plus,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Side::Plus => "plus",
            Side::Minus => "minus",
        }
    }
}

/// A single smooth field together with the switching function and the
/// cached Lie derivatives `F^k h`, `k = 0..=cap`.
#[derive(Debug, Clone, PartialEq)]
pub struct SmoothField {
    pub field: PolyField,
    pub h: Poly2,
    pub domain: Domain,
    lie: Vec<Poly2>,
    dlie: Vec<(Poly2, Poly2)>,
    graph: Option<Poly1>,
}

impl SmoothField {
    pub fn new(field: PolyField, h: Poly2, domain: Domain, cap: usize) -> Self {
        let mut lie = vec![h.clone()];
        for k in 1..=cap + 1 {
            let next = field.lie(&lie[k - 1]);
            lie.push(next);
        }
        let dlie = lie.iter().map(|g| (g.dx(), g.dy())).collect();
        let graph = h.as_graph();
        SmoothField {
            field,
            h,
            domain,
            lie,
            dlie,
            graph,
        }
    }

    pub fn cap(&self) -> usize {
        self.lie.len() - 2
    }

    pub fn eval(&self, p: Vec2) -> Vec2 {
        self.field.eval(p)
    }

    /// `F^k h` at `p`.
    pub fn lie_at(&self, k: usize, p: Vec2) -> f64 {
        self.lie[k].eval(p[0], p[1])
    }

    pub fn lie_poly(&self, k: usize) -> &Poly2 {
        &self.lie[k]
    }

    /// Gradient of `F^k h` at `p`.
    pub fn lie_grad(&self, k: usize, p: Vec2) -> Vec2 {
        [self.dlie[k].0.eval(p[0], p[1]), self.dlie[k].1.eval(p[0], p[1])]
    }

    pub fn h_at(&self, p: Vec2) -> f64 {
        self.h.eval(p[0], p[1])
    }

    /// Point of the switching manifold with chart coordinate `x`.
    pub fn sigma_point(&self, x: f64) -> Result<Vec2> {
        if let Some(g) = &self.graph {
            return Ok([x, g.eval(x)]);
        }
        let h = &self.h;
        let hy = h.dy();
        let mut y = 0.0;
        for _ in 0..60 {
            let v = h.eval(x, y);
            let d = hy.eval(x, y);
            if d.abs() < 1e-14 {
                break;
            }
            let step = v / d;
            y -= step;
            if step.abs() < 1e-15 {
                return Ok([x, y]);
            }
        }
        if h.eval(x, y).abs() < 1e-12 {
            Ok([x, y])
        } else {
            Err(Error::NotOnSigma(h.eval(x, y)))
        }
    }

    pub fn sigma_graph(&self) -> Option<&Poly1> {
        self.graph.as_ref()
    }

    /// Restriction of `F^k h` to the switching manifold, when it is a graph.
    pub fn lie_on_sigma(&self, k: usize) -> Option<Poly1> {
        self.graph.as_ref().map(|g| self.lie[k].restrict(g))
    }

    /// The same field run backwards in time.
    pub fn reversed(&self) -> SmoothField {
        SmoothField::new(self.field.neg(), self.h.clone(), self.domain, self.cap())
    }
}

/// A Filippov pair `Z = (X, Y)` with switching function `h`; `X` acts on
/// `h > 0` and `Y` on `h < 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct FilippovSystem {
    pub plus: SmoothField,
    pub minus: SmoothField,
    graph: Option<Poly1>,
}

impl FilippovSystem {
    pub fn new(domain: Domain, x: PolyField, y: PolyField, h: Poly2) -> Result<Self> {
        Self::with_caps(domain, x, y, h, 8, 6)
    }

    pub fn with_caps(
        domain: Domain,
        x: PolyField,
        y: PolyField,
        h: Poly2,
        degree_cap: usize,
        contact_cap: usize,
    ) -> Result<Self> {
        for (name, f) in [("X", &x), ("Y", &y)] {
            if f.degree() as usize > degree_cap {
                return Err(Error::InvalidInput(format!(
                    "field {name} has degree {} above the cap {degree_cap}",
                    f.degree()
                )));
            }
        }
        if h.degree() as usize > degree_cap {
            return Err(Error::InvalidInput("switching function degree above cap".into()));
        }
        if h.degree() == 0 {
            return Err(Error::InvalidInput("switching function is constant".into()));
        }
        check_regular(&h, &domain)?;
        let graph = h.as_graph();
        Ok(FilippovSystem {
            plus: SmoothField::new(x, h.clone(), domain, contact_cap),
            minus: SmoothField::new(y, h, domain, contact_cap),
            graph,
        })
    }

    pub fn domain(&self) -> Domain {
        self.plus.domain
    }

    pub fn h(&self) -> &Poly2 {
        &self.plus.h
    }

    pub fn h_at(&self, p: Vec2) -> f64 {
        self.plus.h_at(p)
    }

    pub fn side(&self, s: Side) -> &SmoothField {
        match s {
            Side::Plus => &self.plus,
            Side::Minus => &self.minus,
        }
    }

    pub fn x(&self) -> &PolyField {
        &self.plus.field
    }

    pub fn y(&self) -> &PolyField {
        &self.minus.field
    }

    /// `y = g(x)` when the switching manifold is a graph over `x`.
    pub fn sigma_graph(&self) -> Option<&Poly1> {
        self.graph.as_ref()
    }

    /// Point of the switching manifold with chart coordinate `x`.
    pub fn sigma_point(&self, x: f64) -> Result<Vec2> {
        self.plus.sigma_point(x)
    }

    /// Restriction of `F^k h` to the switching manifold, when it is a graph.
    pub fn lie_on_sigma(&self, s: Side, k: usize) -> Option<Poly1> {
        self.graph.as_ref().map(|g| self.side(s).lie_poly(k).restrict(g))
    }

    /// The time reversed pair `(-X, -Y)`.
    pub fn reversed(&self) -> FilippovSystem {
        FilippovSystem {
            plus: self.plus.reversed(),
            minus: self.minus.reversed(),
            graph: self.graph.clone(),
        }
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let spec: SystemSpec = serde_json::from_str(s)?;
        spec.build()
    }

    pub fn to_spec(&self) -> SystemSpec {
        SystemSpec {
            domain: self.domain().as_array(),
            x: FieldSpec::of(self.x()),
            y: FieldSpec::of(self.y()),
            h: self.h().terms().to_vec(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_spec()).expect("system serializes")
    }
}

/// Checks that `grad h` does not vanish on the zero set inside the domain.
fn check_regular(h: &Poly2, d: &Domain) -> Result<()> {
    let n = 64;
    let (hx, hy) = (h.dx(), h.dy());
    let at = |i: usize, j: usize| {
        [
            d.xmin + (d.xmax - d.xmin) * i as f64 / n as f64,
            d.ymin + (d.ymax - d.ymin) * j as f64 / n as f64,
        ]
    };
    let scale = (d.xmax - d.xmin).max(d.ymax - d.ymin);
    for i in 0..=n {
        for j in 0..=n {
            let p = at(i, j);
            let v = h.eval(p[0], p[1]);
            for q in [at((i + 1).min(n), j), at(i, (j + 1).min(n))] {
                let w = h.eval(q[0], q[1]);
                let z = if v == 0.0 {
                    Some(p)
                } else if v * w < 0.0 {
                    let s = crate::poly::bisect(
                        |s| h.eval(p[0] + s * (q[0] - p[0]), p[1] + s * (q[1] - p[1])),
                        0.0,
                        1.0,
                        v,
                    );
                    Some([p[0] + s * (q[0] - p[0]), p[1] + s * (q[1] - p[1])])
                } else {
                    None
                };
                if let Some(z) = z {
                    let g = hx.eval(z[0], z[1]).hypot(hy.eval(z[0], z[1]));
                    if g < 1e-9 * scale.max(1.0) {
                        return Err(Error::SingularSwitching(z[0], z[1]));
                    }
                }
            }
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldSpec {
    pub fx: Vec<(u32, u32, f64)>,
    pub fy: Vec<(u32, u32, f64)>,
}

impl FieldSpec {
    pub fn of(f: &PolyField) -> Self {
        FieldSpec {
            fx: f.fx.terms().to_vec(),
            fy: f.fy.terms().to_vec(),
        }
    }

    pub fn build(&self) -> Result<PolyField> {
        PolyField::from_terms(&self.fx, &self.fy)
    }
}

/// On-disk form of a system: sparse monomial lists `[i, j, c]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemSpec {
    pub domain: [f64; 4],
    #[serde(rename = "X")]
    pub x: FieldSpec,
    #[serde(rename = "Y")]
    pub y: FieldSpec,
    pub h: Vec<(u32, u32, f64)>,
}

impl SystemSpec {
    pub fn build(&self) -> Result<FilippovSystem> {
        let [a, b, c, d] = self.domain;
        FilippovSystem::new(
            Domain::new(a, b, c, d)?,
            self.x.build()?,
            self.y.build()?,
            Poly2::from_terms(&self.h)?,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_round_trip() {
        let s = r#"{"domain":[-2,2,-2,2],"X":{"fx":[[0,0,1]],"fy":[[1,0,1]]},"Y":{"fx":[[0,0,1]],"fy":[[0,0,1]]},"h":[[0,1,1]]}"#;
        let z = FilippovSystem::from_json(s).unwrap();
        let z2 = FilippovSystem::from_json(&z.to_json()).unwrap();
        assert_eq!(z.to_spec(), z2.to_spec());
        assert_eq!(z.x().eval([0.3, 0.0]), [1.0, 0.3]);
    }

    #[test]
    fn duplicate_monomial_in_json_rejected() {
        let s = r#"{"domain":[-2,2,-2,2],"X":{"fx":[[0,0,1],[0,0,2]],"fy":[[1,0,1]]},"Y":{"fx":[[0,0,1]],"fy":[[0,0,1]]},"h":[[0,1,1]]}"#;
        assert!(matches!(FilippovSystem::from_json(s), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn unknown_key_rejected() {
        let s = r#"{"domain":[-2,2,-2,2],"X":{"fx":[],"fy":[]},"Y":{"fx":[],"fy":[]},"h":[[0,1,1]],"extra":1}"#;
        assert!(FilippovSystem::from_json(s).is_err());
    }

    #[test]
    fn singular_switching_rejected() {
        let h = Poly2::from_terms(&[(2, 0, 1.0), (0, 2, -1.0)]).unwrap();
        let d = Domain::new(-1.0, 1.0, -1.0, 1.0).unwrap();
        let f = PolyField::default();
        assert!(matches!(
            FilippovSystem::new(d, f.clone(), f, h),
            Err(Error::SingularSwitching(..))
        ));
    }

    #[test]
    fn lie_derivatives_of_cubic() {
        let f = PolyField::from_terms(&[(0, 0, 1.0)], &[(3, 0, 1.0)]).unwrap();
        let h = Poly2::y();
        let l4 = lie_derivative(&f, &h, 4);
        assert_eq!(l4.eval(0.0, 0.0), 6.0);
        assert_eq!(lie_derivative(&f, &h, 3).eval(0.0, 0.0), 0.0);
    }
}
