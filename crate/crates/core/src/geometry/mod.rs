//! From a solution of the affine sphere equation to the affine sphere itself
//! (frame integration), its cone, and the semi-flat Calabi–Yau structure on
//! the total space of the torus fibration.

mod coframe;
mod forms;
mod frame;

pub use coframe::{
    assemble_g_omega, complex_structure, cy_coframe, volume_ratio, CoframeSample, COMPLEX_BASIS, REAL_BASIS,
};
pub use forms::{su3_structure_residuals, SampleBox, Su3Residuals};
pub use frame::{
    cone_point, frame_gauge_check, frame_gauge_defect, integrate_frame, loop_defect, sphere_frame, structure_curvature,
    structure_matrices, FrameField, DET_GUARD,
};

use thiserror::Error;

use crate::gauge::GaugeError;
use crate::pdesolve::PdeError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("frame is singular at node ({i}, {j}): |det N| = {det:e}")]
    SingularFrame { i: usize, j: usize, det: f64 },
    #[error("coframe is degenerate: g is not positive definite")]
    DegenerateFrame,
    #[error("invalid grid: {0}")]
    BadGrid(String),
    #[error(transparent)]
    Pde(#[from] PdeError),
    #[error(transparent)]
    Gauge(#[from] GaugeError),
}
