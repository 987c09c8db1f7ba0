//! Stein neighborhoods of immersed real surfaces in complex surfaces.
//!
//! [`invariants`] and [`surgery`] work with integer invariants only: indices
//! of complex points, adjunction-type bounds, verdicts and replayable surgery
//! recipes. [`localgeo`] certifies the local analytic models numerically, and
//! [`scenario`] ties both to JSON scenario files and reports.

pub mod certificate;
pub mod error;
pub mod invariants;
pub mod localgeo;
pub mod scenario;
pub mod suites;
pub mod surgery;
