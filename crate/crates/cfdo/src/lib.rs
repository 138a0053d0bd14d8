//! Fitness dependent optimizer with chaotic-map variants, a benchmark
//! function suite, two applied problems, and experiment statistics.

pub mod chaos;
pub mod experiment;
pub mod fdo;
pub mod objectives;
pub mod problems;
pub mod stats;
pub mod stream;
