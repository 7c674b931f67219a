//! Pointwise structure of the switching manifold: crossing, sliding and
//! tangency points, contact orders and the sliding vector field.

use serde::Serialize;

use crate::config::RunConfig;
use crate::system::{FilippovSystem, Side, SmoothField, Vec2};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Visibility {
    Visible,
    Invisible,
    Odd,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum FoldFoldKind {
    VV,
    VI,
    IV,
    II,
}

/// First nonvanishing Lie derivative of `h` at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Contact {
    pub order: usize,
    pub value: f64,
}

impl Contact {
    pub fn sign(&self) -> f64 {
        self.value.signum()
    }

    /// Sign of `h` along the orbit for small positive time.
    pub fn forward_sign(&self) -> f64 {
        self.value.signum()
    }

    /// Sign of `h` along the orbit for small negative time.
    pub fn backward_sign(&self) -> f64 {
        if self.order % 2 == 0 {
            self.value.signum()
        } else {
            -self.value.signum()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tangency {
    pub side: Side,
    pub order: usize,
    pub visibility: Visibility,
    /// Sign of the transversal field's `Fh` at the point.
    pub other_sign: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SigmaClass {
    Crossing,
    StableSliding,
    UnstableSliding,
    Tangency(Tangency),
    FoldFold(FoldFoldKind),
    /// Both fields tangent with at least one contact of higher order.
    DoubleTangency { x_order: usize, y_order: usize },
    EquilibriumOnSigma(Side),
}

impl SigmaClass {
    pub fn is_sliding(&self) -> bool {
        matches!(self, SigmaClass::StableSliding | SigmaClass::UnstableSliding)
    }

    pub fn to_json(&self) -> serde_json::Value {
        use serde_json::json;
        match self {
            SigmaClass::Crossing => json!({"class": "crossing"}),
            SigmaClass::StableSliding => json!({"class": "stable-sliding"}),
            SigmaClass::UnstableSliding => json!({"class": "unstable-sliding"}),
            SigmaClass::Tangency(t) => json!({
                "class": "tangency",
                "side": t.side.name(),
                "order": t.order,
                "visibility": t.visibility,
            }),
            SigmaClass::FoldFold(k) => json!({"class": "fold-fold", "kind": k}),
            SigmaClass::DoubleTangency { x_order, y_order } => {
                json!({"class": "double-tangency", "x_order": x_order, "y_order": y_order})
            }
            SigmaClass::EquilibriumOnSigma(s) => {
                json!({"class": "equilibrium", "side": s.name()})
            }
        }
    }
}

/// Classification of a point together with the raw first derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SigmaPoint {
    pub class: SigmaClass,
    pub xh: f64,
    pub yh: f64,
    pub near_degenerate: bool,
}

fn near(v: f64, cfg: &RunConfig) -> bool {
    v.abs() > cfg.near_tol && v.abs() <= cfg.tol
}

/// Order of contact of the orbit of `f` with the switching manifold at `p`.
pub fn contact_order(f: &SmoothField, p: Vec2, cfg: &RunConfig) -> Result<Contact> {
    let cap = cfg.contact_cap.min(f.cap());
    for k in 1..=cap {
        let v = f.lie_at(k, p);
        if v.abs() > cfg.tol {
            return Ok(Contact { order: k, value: v });
        }
    }
    Err(Error::DegenerateContact(cap))
}

/// Visibility of an even contact for the field acting on `side`.
pub fn visibility(side: Side, c: &Contact) -> Visibility {
    if c.order % 2 == 1 {
        Visibility::Odd
    } else if c.sign() == side.sign() {
        Visibility::Visible
    } else {
        Visibility::Invisible
    }
}

fn fold_fold_kind(xv: Visibility, yv: Visibility) -> FoldFoldKind {
    use Visibility::*;
    match (xv, yv) {
        (Visible, Visible) => FoldFoldKind::VV,
        (Visible, _) => FoldFoldKind::VI,
        (_, Visible) => FoldFoldKind::IV,
        _ => FoldFoldKind::II,
    }
}

/// Classifies a point of the switching manifold.
pub fn classify(z: &FilippovSystem, p: Vec2, cfg: &RunConfig) -> Result<SigmaPoint> {
    if !z.domain().contains(p) {
        return Err(Error::OutOfDomain(p[0], p[1]));
    }
    let hv = z.h_at(p);
    if hv.abs() > cfg.tol {
        return Err(Error::NotOnSigma(hv));
    }
    for s in [Side::Plus, Side::Minus] {
        let v = z.side(s).eval(p);
        if v[0].hypot(v[1]) <= cfg.tol {
            return Ok(SigmaPoint {
                class: SigmaClass::EquilibriumOnSigma(s),
                xh: z.plus.lie_at(1, p),
                yh: z.minus.lie_at(1, p),
                near_degenerate: false,
            });
        }
    }
    let xh = z.plus.lie_at(1, p);
    let yh = z.minus.lie_at(1, p);
    let near_degenerate = near(xh, cfg) || near(yh, cfg);
    if near_degenerate && cfg.strict {
        return Err(Error::NearDegenerate(if near(xh, cfg) { xh } else { yh }));
    }
    let xt = xh.abs() <= cfg.tol;
    let yt = yh.abs() <= cfg.tol;
    let class = match (xt, yt) {
        (false, false) => {
            if xh * yh > 0.0 {
                SigmaClass::Crossing
            } else if xh < 0.0 {
                SigmaClass::StableSliding
            } else {
                SigmaClass::UnstableSliding
            }
        }
        (true, false) => {
            let c = contact_order(&z.plus, p, cfg)?;
            SigmaClass::Tangency(Tangency {
                side: Side::Plus,
                order: c.order,
                visibility: visibility(Side::Plus, &c),
                other_sign: yh.signum(),
            })
        }
        (false, true) => {
            let c = contact_order(&z.minus, p, cfg)?;
            SigmaClass::Tangency(Tangency {
                side: Side::Minus,
                order: c.order,
                visibility: visibility(Side::Minus, &c),
                other_sign: xh.signum(),
            })
        }
        (true, true) => {
            let cx = contact_order(&z.plus, p, cfg)?;
            let cy = contact_order(&z.minus, p, cfg)?;
            if cx.order == 2 && cy.order == 2 {
                SigmaClass::FoldFold(fold_fold_kind(
                    visibility(Side::Plus, &cx),
                    visibility(Side::Minus, &cy),
                ))
            } else {
                SigmaClass::DoubleTangency {
                    x_order: cx.order,
                    y_order: cy.order,
                }
            }
        }
    };
    Ok(SigmaPoint {
        class,
        xh,
        yh,
        near_degenerate,
    })
}

/// Filippov convex combination `(Yh X - Xh Y) / (Yh - Xh)` without any
/// membership checks.
pub fn sliding_vector(z: &FilippovSystem, p: Vec2) -> Vec2 {
    let xh = z.plus.lie_at(1, p);
    let yh = z.minus.lie_at(1, p);
    let fx = z.plus.eval(p);
    let fy = z.minus.eval(p);
    let d = yh - xh;
    [(yh * fx[0] - xh * fy[0]) / d, (yh * fx[1] - xh * fy[1]) / d]
}

/// Sliding vector field at a point of the sliding region.
pub fn sliding_field(z: &FilippovSystem, p: Vec2, cfg: &RunConfig) -> Result<Vec2> {
    let sp = classify(z, p, cfg)?;
    if !sp.class.is_sliding() {
        return Err(Error::NotSliding);
    }
    let d = sp.yh - sp.xh;
    if d.abs() < cfg.near_tol {
        return Err(Error::DenominatorNearZero(d));
    }
    Ok(sliding_vector(z, p))
}
