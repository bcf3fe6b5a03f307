//! Part-level grounding, editing and evaluation for 3D objects described as
//! quantized bounding-box token programs.

pub mod builder;
pub mod clustering;
pub mod executor;
pub mod grammar;
pub mod hash;
pub mod metrics;
pub mod segmentation;
pub mod synth;
