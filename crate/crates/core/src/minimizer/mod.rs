//! Exact two-level minimization of multi-output truth tables into a
//! shared-AND-plane cover.
//!
//! Each output bit is minimized on its own (Quine–McCluskey primes, then an
//! exact cover); structurally identical cubes are then shared between outputs.
//! Sharing is by cube identity only, so the shared plane is not guaranteed to
//! be the multi-output optimum.

mod cover;
mod cube;
mod hazard;
mod primes;

use std::collections::BTreeMap;

pub use cover::{greedy_cover, minimum_cover, minimum_cover_with_budget, SopCover, DEFAULT_NODE_BUDGET};
pub use cube::{Cube, Literal};
pub use hazard::{hazard_free_augment, uncovered_adjacent_pairs};
pub use primes::{prime_implicants, MAX_WIDTH};

use crate::error::{Error, Result};
use crate::tabulator::QuantizedFunctionTable;

/// Which input codes may be treated as don't-cares.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum DcPolicy {
    /// Fully specified table.
    #[default]
    None,
    /// Codes the region wrapper never routes to the table.
    Unreachable,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MinimizeOptions {
    pub dc_policy: DcPolicy,
    pub hazard_free: bool,
    /// Widest input for which the exact cover is attempted; wider tables use
    /// the greedy heuristic.
    pub exact_limit: u32,
    pub node_budget: u64,
}

impl Default for MinimizeOptions {
    fn default() -> Self {
        MinimizeOptions {
            dc_policy: DcPolicy::None,
            hazard_free: false,
            exact_limit: 12,
            node_budget: DEFAULT_NODE_BUDGET,
        }
    }
}

/// Shared AND plane plus per-output OR-plane membership.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PlaCover {
    inputs: u32,
    outputs: u32,
    /// Distinct cubes in ascending order.
    products: Vec<Cube>,
    /// Bit `j` set when the product feeds output `j`.
    membership: Vec<u32>,
}

impl PlaCover {
    /// Builds a normalized cover: duplicate cubes are merged (memberships
    /// OR-ed), products feeding no output are dropped, products are sorted.
    pub fn from_rows(inputs: u32, outputs: u32, rows: impl IntoIterator<Item = (Cube, u32)>) -> Result<Self> {
        if inputs == 0 || inputs > MAX_WIDTH {
            return Err(Error::WidthLimit(inputs));
        }
        if outputs == 0 || outputs > 32 {
            return Err(Error::InvalidParameter(format!("output count {outputs} must be 1..=32")));
        }
        let out_mask = cube::full_mask(outputs);
        let mut merged: BTreeMap<Cube, u32> = BTreeMap::new();
        for (cube, members) in rows {
            if cube.width() != inputs {
                return Err(Error::InvalidParameter(format!(
                    "cube {cube} has width {}, cover has {inputs} inputs",
                    cube.width()
                )));
            }
            if members & !out_mask != 0 {
                return Err(Error::InvalidParameter(format!("membership {members:#b} exceeds {outputs} outputs")));
            }
            *merged.entry(cube).or_default() |= members;
        }
        let (products, membership) = merged.into_iter().filter(|&(_, m)| m != 0).unzip();
        Ok(PlaCover {
            inputs,
            outputs,
            products,
            membership,
        })
    }

    /// Merges per-output covers; `sops[j]` is the cover of output `j`.
    pub fn from_sops(inputs: u32, sops: &[SopCover]) -> Result<Self> {
        let rows = sops
            .iter()
            .enumerate()
            .flat_map(|(j, s)| s.cubes.iter().map(move |&c| (c, 1u32 << j)));
        PlaCover::from_rows(inputs, sops.len() as u32, rows)
    }

    pub fn inputs(&self) -> u32 {
        self.inputs
    }

    pub fn outputs(&self) -> u32 {
        self.outputs
    }

    pub fn products(&self) -> &[Cube] {
        &self.products
    }

    pub fn product_count(&self) -> usize {
        self.products.len()
    }

    /// Output membership mask of product `p`.
    pub fn membership(&self, p: usize) -> u32 {
        self.membership[p]
    }

    /// Indices of the products feeding output `j`, ascending.
    pub fn output_products(&self, j: u32) -> Vec<usize> {
        (0..self.products.len()).filter(|&p| self.membership[p] >> j & 1 == 1).collect()
    }

    pub fn sop(&self, j: u32) -> SopCover {
        SopCover {
            output: j as usize,
            cubes: self.output_products(j).into_iter().map(|p| self.products[p]).collect(),
            exact: true,
        }
    }

    pub fn eval(&self, code: u32) -> u32 {
        self.products
            .iter()
            .zip(&self.membership)
            .filter(|(c, _)| c.contains_minterm(code))
            .fold(0, |acc, (_, &m)| acc | m)
    }
}

/// A minimized cover plus how it was obtained.
#[derive(Clone, Debug)]
pub struct MinimizeResult {
    pub cover: PlaCover,
    /// Per output: whether its cover is provably minimum.
    pub exact: Vec<bool>,
    /// Sum of per-output cover sizes before sharing.
    pub unshared_products: usize,
    pub dont_cares: Vec<u32>,
}

/// Minimizes an arbitrary multi-output function given as one output word per
/// input code.
pub fn minimize_function(
    words: &[u32],
    inputs: u32,
    outputs: u32,
    dcset: &[u32],
    options: &MinimizeOptions,
) -> Result<MinimizeResult> {
    if inputs > MAX_WIDTH {
        return Err(Error::WidthLimit(inputs));
    }
    if words.len() != 1usize << inputs {
        return Err(Error::InvalidParameter(format!(
            "truth table has {} rows, expected {}",
            words.len(),
            1usize << inputs
        )));
    }
    let dc = primes::MintermSet::new(inputs, dcset);
    let mut sops = Vec::with_capacity(outputs as usize);
    let mut exact = Vec::with_capacity(outputs as usize);
    for j in 0..outputs {
        let onset: Vec<u32> = (0..words.len() as u32)
            .filter(|&c| !dc.contains(c) && words[c as usize] >> j & 1 == 1)
            .collect();
        let sop = minimize_output(&onset, dcset, inputs, options)?.with_output(j as usize);
        exact.push(sop.exact);
        sops.push(sop);
    }
    let unshared_products = sops.iter().map(|s| s.cubes.len()).sum();
    Ok(MinimizeResult {
        cover: PlaCover::from_sops(inputs, &sops)?,
        exact,
        unshared_products,
        dont_cares: dcset.to_vec(),
    })
}

/// Minimizes a single output column.
pub fn minimize_output(onset: &[u32], dcset: &[u32], width: u32, options: &MinimizeOptions) -> Result<SopCover> {
    let primes = prime_implicants(onset, dcset, width)?;
    let mut sop = if width <= options.exact_limit {
        minimum_cover_with_budget(&primes, onset, options.node_budget)?
    } else {
        greedy_cover(&primes, onset)?
    };
    if options.hazard_free {
        let exact = sop.exact;
        sop = hazard_free_augment(&sop, onset, dcset, width)?;
        sop.exact = exact;
    }
    sop.cubes.sort();
    sop.cubes.dedup();
    Ok(sop)
}

/// Minimizes every output bit of a table and shares identical products.
pub fn multi_output_minimize(table: &QuantizedFunctionTable, options: &MinimizeOptions) -> Result<PlaCover> {
    Ok(minimize_table(table, options)?.cover)
}

pub fn minimize_table(table: &QuantizedFunctionTable, options: &MinimizeOptions) -> Result<MinimizeResult> {
    let dcset = match options.dc_policy {
        DcPolicy::None => Vec::new(),
        DcPolicy::Unreachable => table.unreachable_codes(),
    };
    minimize_function(
        table.entries(),
        table.in_fmt().total_bits(),
        table.out_fmt().total_bits(),
        &dcset,
        options,
    )
}
