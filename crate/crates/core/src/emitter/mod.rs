//! Text outputs: Berkeley PLA, structural Verilog with its region wrapper,
//! ROM baselines and testbenches, plus an evaluator that replays testbench
//! vectors against emitted Verilog.

mod pla;
mod verilog;
pub mod vsim;

pub use pla::{emit_pla, parse_pla};
pub use verilog::{
    core_module_name, emit_rom_verilog, emit_testbench, emit_verilog, parse_testbench, sanitize_identifier, TestVector,
};

use crate::error::Result;
use vsim::VerilogDesign;

/// Outcome of replaying a testbench's golden vectors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckReport {
    pub vectors: usize,
    /// Failing vectors with the value the design produced.
    pub mismatches: Vec<(TestVector, u64)>,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// Evaluates every `check_core` / `check_top` vector of `testbench` on the
/// modules in `verilog`.
pub fn check_design(verilog: &str, testbench: &str) -> Result<CheckReport> {
    let design = VerilogDesign::parse(verilog)?;
    let (core, top, vectors) = parse_testbench(testbench)?;
    let mut mismatches = Vec::new();
    for v in &vectors {
        let module = match (v.top, &top) {
            (true, Some(t)) => t.as_str(),
            (true, None) => {
                return Err(crate::Error::Verilog("wrapper vector without a wrapper instance".into()));
            }
            (false, _) => core.as_str(),
        };
        let y = design.eval(module, &[("x", v.x)])?["y"];
        if y != v.y {
            mismatches.push((*v, y));
        }
    }
    Ok(CheckReport {
        vectors: vectors.len(),
        mismatches,
    })
}
