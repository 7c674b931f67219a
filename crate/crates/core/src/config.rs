use serde::{Deserialize, Serialize};

/// Numerical knobs shared by every stage. Unknown keys are rejected when
/// loading from JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Threshold below which a Lie derivative counts as zero.
    pub tol: f64,
    /// Values in `(near_tol, tol)` are flagged as near degenerate.
    pub near_tol: f64,
    pub contact_cap: usize,
    pub degree_cap: usize,
    pub rtol: f64,
    pub atol: f64,
    pub h_max: f64,
    pub max_time: f64,
    pub event_tol: f64,
    pub newton_residual: f64,
    pub newton_step: f64,
    pub newton_max_iter: usize,
    pub newton_halvings: usize,
    pub lattice: usize,
    pub merge_tol: f64,
    pub boundary_tol: f64,
    pub cond_max: f64,
    pub section_distance: f64,
    pub section_halfwidth: f64,
    pub strict: bool,
    pub seed: u64,
    pub threads: Option<usize>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            tol: 1e-9,
            near_tol: 1e-12,
            contact_cap: 6,
            degree_cap: 8,
            rtol: 1e-12,
            atol: 1e-12,
            h_max: 0.1,
            max_time: 100.0,
            event_tol: 1e-12,
            newton_residual: 1e-12,
            newton_step: 1e-12,
            newton_max_iter: 50,
            newton_halvings: 8,
            lattice: 9,
            merge_tol: 1e-8,
            boundary_tol: 1e-9,
            cond_max: 1e10,
            section_distance: 0.1,
            section_halfwidth: 0.05,
            strict: false,
            seed: 0,
            threads: None,
        }
    }
}

impl RunConfig {
    pub fn from_json(s: &str) -> crate::Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}
