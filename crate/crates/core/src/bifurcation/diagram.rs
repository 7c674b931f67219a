//! Parameter-plane sweeps and traced curves.

use rayon::prelude::*;
use serde::Serialize;

use super::{grid_axis, RegionReport, Scenario};
use crate::config::RunConfig;
use crate::continuation::{solve_fixed, trace, ContinuationOpts};
use crate::Result;

/// Sampled parameter curve; each sample is `(param, p1, p2)` where `param`
/// is the continuation parameter.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Curve {
    pub name: String,
    pub samples: Vec<[f64; 3]>,
}

/// Traces `g(u) = 0` through `u0` in both directions of `u[0]`, keeping
/// points accepted by `keep`. `axes` names the coordinates of `u` holding
/// `(p1, p2)`; samples outside `ranges` are dropped.
pub fn trace_curve_axes<G, K>(
    name: &str,
    g: &G,
    u0: &[f64],
    step: f64,
    keep: &K,
    axes: [usize; 2],
    ranges: [(f64, f64); 2],
) -> Result<Curve>
where
    G: Fn(&[f64]) -> Vec<f64>,
    K: Fn(&[f64]) -> bool,
{
    let u0 = solve_fixed(g, u0, 0, u0[0], 1e-13)?;
    let opts = ContinuationOpts {
        step,
        ..Default::default()
    };
    let mut fwd = vec![0.0; u0.len()];
    fwd[0] = 1.0;
    let bwd: Vec<f64> = fwd.iter().map(|v| -v).collect();
    let mut a = trace(g, &u0, &bwd, &opts, keep)?;
    let b = trace(g, &u0, &fwd, &opts, keep)?;
    a.reverse();
    a.extend(b.into_iter().skip(1));
    let samples = a
        .into_iter()
        .map(|u| [u[0], u[axes[0]], u[axes[1]]])
        .filter(|s| {
            (0..2).all(|k| s[k + 1] >= ranges[k].0 && s[k + 1] <= ranges[k].1)
        })
        .collect();
    Ok(Curve {
        name: name.into(),
        samples,
    })
}

/// `trace_curve_axes` for curves given as `p2` over `p1 = u[0]`.
pub fn trace_curve<G, K>(
    name: &str,
    g: &G,
    u0: &[f64],
    step: f64,
    keep: &K,
    ranges: [(f64, f64); 2],
) -> Result<Curve>
where
    G: Fn(&[f64]) -> Vec<f64>,
    K: Fn(&[f64]) -> bool,
{
    trace_curve_axes(name, g, u0, step, keep, [0, 1], ranges)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridSpec {
    pub ranges: [(f64, f64); 2],
    pub n: [usize; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Cell {
    pub index: [usize; 2],
    pub p: [f64; 2],
    pub report: Option<RegionReport>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiagramGrid {
    pub scenario: String,
    pub param_names: [String; 2],
    pub grid: GridSpec,
    pub cells: Vec<Cell>,
    pub curves: Vec<Curve>,
}

/// Classifies every cell (in parallel) and traces the scenario curves.
/// Cells are ordered with `p1` varying fastest.
pub fn sweep_diagram(s: &dyn Scenario, grid: GridSpec, cfg: &RunConfig) -> Result<DiagramGrid> {
    let a1 = grid_axis(grid.ranges[0].0, grid.ranges[0].1, grid.n[0]);
    let a2 = grid_axis(grid.ranges[1].0, grid.ranges[1].1, grid.n[1]);
    let idx: Vec<[usize; 2]> = (0..a2.len())
        .flat_map(|j| (0..a1.len()).map(move |i| [i, j]))
        .collect();
    let cells: Vec<Cell> = idx
        .par_iter()
        .map(|&[i, j]| {
            let p = [a1[i], a2[j]];
            match s.classify(p, cfg) {
                Ok(r) => Cell {
                    index: [i, j],
                    p,
                    report: Some(r),
                    error: None,
                },
                Err(e) => Cell {
                    index: [i, j],
                    p,
                    report: None,
                    error: Some(format!("{}: {e}", e.kind())),
                },
            }
        })
        .collect();
    let degenerate = grid.n.iter().any(|&n| n < 2);
    let curves = if degenerate {
        vec![]
    } else {
        s.curves(grid.ranges, cfg)?
    };
    let names = s.param_names();
    Ok(DiagramGrid {
        scenario: s.id().into(),
        param_names: [names[0].into(), names[1].into()],
        grid,
        cells,
        curves,
    })
}

impl DiagramGrid {
    pub fn diagram_csv(&self) -> String {
        let mut s = String::from("p1,p2,label,crossing_cycles,polycycles,sliding_cycles,flags\n");
        for c in &self.cells {
            match &c.report {
                Some(r) => {
                    let mut flags = r.flags.clone();
                    if r.heteroclinic {
                        flags.push("heteroclinic".into());
                    }
                    s.push_str(&format!(
                        "{},{},{},{},{},{},{}\n",
                        c.p[0],
                        c.p[1],
                        r.label,
                        r.crossing_code(),
                        r.polycycles.len(),
                        r.sliding_code(),
                        flags.join(";")
                    ));
                }
                None => {
                    let e = c.error.as_deref().unwrap_or("");
                    let kind = e.split(':').next().unwrap_or("");
                    s.push_str(&format!("{},{},error,,,,error:{}\n", c.p[0], c.p[1], kind));
                }
            }
        }
        s
    }

    pub fn curves_csv(&self) -> String {
        curves_csv(&self.curves)
    }

    pub fn label_at(&self, i: usize, j: usize) -> Option<&str> {
        let n1 = self.grid.n[0].max(1);
        self.cells
            .get(j * n1 + i)
            .and_then(|c| c.report.as_ref())
            .map(|r| r.label.as_str())
    }
}

pub fn curves_csv(curves: &[Curve]) -> String {
    let mut s = String::from("curve,param,p1,p2\n");
    for c in curves {
        for p in &c.samples {
            s.push_str(&format!("{},{},{},{}\n", c.name, p[0], p[1], p[2]));
        }
    }
    s
}
