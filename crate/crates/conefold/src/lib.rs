//! Cones and cylinders with a one-parameter rigid folding that keeps two
//! planar sections planar, in both the discrete and the smooth setting.
//!
//! The discrete side synthesizes three-face germs in closed form, couples
//! the two fold angles, iterates the germ into a strip and verifies the
//! resulting closure and mirror properties. An exact rational elimination
//! engine backs the identity checks. The smooth side integrates the frame
//! equations of deformable cones and cylinders and evaluates the planarity
//! residuals and closed-form curvature solutions.

pub mod bricard;
pub mod cone;
pub mod config;
pub mod cylinder;
pub mod elim;
pub mod exact;
pub mod geom;
pub mod job;
pub mod mesh;
pub mod poly;
pub mod smooth;
