//! Numerical checks of the local models behind Stein neighborhoods: Levi
//! forms of model functions, complex points of model surfaces, patched
//! functions and exhaustions, and gradient-flow retraction.

pub mod field;
pub mod flow;
pub mod orientation;
pub mod patch;
pub mod patched;
pub mod psh;
pub mod winding;

pub use field::{
    det_identity_check, levi_closed, levi_fd, Box4, FnField, HermitianForm2, LocalModel, PointC2,
    ScalarField,
};
pub use flow::{flow_to_surface, FlowOptions, FlowResult};
pub use orientation::{intersection_sign, OrientedPlane};
pub use patch::{complex_det, model_patch, Atlas, ModelKind, SurfacePatch};
pub use patched::{build_patched_rho, exhaustion_certificate, ModelChart, PatchedRho, Scene};
pub use psh::{psh_certificate, Grid, Jets, PshOptions};
pub use winding::{locate_complex_points, locate_in_atlas, winding_index, ComplexPoint};
