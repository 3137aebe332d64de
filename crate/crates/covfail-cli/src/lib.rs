//! Support library behind the `covfail` binary: the graph file format, the
//! synthetic instance generator, and the geometric coverage oracle. Split
//! from the binary so integration tests can drive the same code.

pub mod coverage;
pub mod generator;
pub mod graphfile;
