//! Similarity analysis, closed-form solutions, simulation and multiresolution
//! frames for compacton-supporting nonlinear dispersive equations.

pub mod closed_forms;
pub mod dsl;
pub mod exec;
pub mod frame;
pub mod numerics;
pub mod similarity;
pub mod simulator;
