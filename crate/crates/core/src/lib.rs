//! Displacement functions for planar Filippov systems: transition and mirror
//! maps, crossing systems for Sigma-polycycles and bifurcation diagrams of
//! their unfoldings.

pub mod config;
pub mod error;
pub mod flow;
pub mod germ;
pub mod integrate;
pub mod interval;
pub mod maps;
pub mod poly;
pub mod polycycle;
pub mod sigma;
pub mod system;
pub mod trajectory;
pub mod continuation;
pub mod bifurcation;
pub mod cli;

pub use config::RunConfig;
pub use error::{Error, Result};
pub use system::{Domain, FilippovSystem, PolyField, Side, SmoothField, Vec2};
