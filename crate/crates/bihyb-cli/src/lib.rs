//! IO companion to `bihyb-core`: instance file formats, seeded generators,
//! the batch experiment runner, and the line-delimited control protocol.

pub mod experiment;
pub mod format;
pub mod generate;
pub mod protocol;
