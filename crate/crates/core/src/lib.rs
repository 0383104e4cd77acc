//! Exact symbolic computation of twisted product connections.

pub mod basis;
pub mod bimodule;
pub mod connections;
pub mod error;
pub mod harness;
pub mod matrix;
pub mod omega;
pub mod product;
pub mod report;
pub mod scenario;
pub mod scalar;
pub mod tdga;
pub mod twist;
