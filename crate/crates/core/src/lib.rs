//! Compiles activation functions into purely combinational two-level logic.
//!
//! The pipeline runs: sample the function onto a fixed-point grid
//! ([`tabulator`]), minimize each output bit into a shared AND/OR plane
//! ([`minimizer`]), model the result as an evaluable circuit with cost proxies
//! ([`netlist`]) and write it out as Berkeley PLA or Verilog ([`emitter`]).
//! [`analyzer`] compares the circuit against LUT and closed-form baselines,
//! and [`nn`] measures what the quantized activation does to a small trained
//! network.

pub mod analyzer;
pub mod baseline;
pub mod emitter;
pub mod error;
pub mod fixed_point;
pub mod funcref;
pub mod minimizer;
pub mod netlist;
pub mod nn;
pub mod tabulator;

pub use error::{Error, Result};
