//! Evaluable AND/OR-plane circuit with its region wrapper, plus
//! technology-independent cost proxies.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::baseline::{RomKbConfig, RomKind, MIN_ROM_ROWS};
use crate::error::{Error, Result};
use crate::fixed_point::FixedPointFormat;
use crate::minimizer::{Cube, PlaCover, MAX_WIDTH};
use crate::tabulator::{LambdaMode, QuantizedFunctionTable, RegionKind};

/// Port-level description of the logic around the table.
///
/// The input port is two's complement with the table's fractional bits and
/// one guard integer bit above the table range; the output port is two's
/// complement with the output format's fractional bits.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WrapperSpec {
    pub kind: RegionKind,
    pub in_fmt: FixedPointFormat,
    pub out_fmt: FixedPointFormat,
    pub lambda_mode: LambdaMode,
    /// Signed output codes, low side first.
    pub saturation_codes: Vec<i64>,
    /// Linear-branch gain in output code units.
    pub gain_code: u64,
    /// Magnitude codes at or above this leave the table branch.
    pub limit_code: u32,
    pub port_width: u32,
    pub out_width: u32,
}

/// Where the wrapper routes one port code.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Route {
    Constant(i64),
    /// Linear branch on the signed port code.
    Linear(i64),
    Table { index: u32, negate: bool },
}

impl WrapperSpec {
    pub fn from_table(table: &QuantizedFunctionTable) -> Result<Self> {
        let in_fmt = table.in_fmt();
        let port_width = in_fmt.total_bits() + 2;
        if port_width > 24 {
            return Err(Error::WidthLimit(port_width));
        }
        let limit = table.region().table_limit() * in_fmt.scale();
        let mut spec = WrapperSpec {
            kind: table.region().kind,
            in_fmt,
            out_fmt: table.out_fmt(),
            lambda_mode: table.lambda_mode(),
            saturation_codes: table.saturation_codes().to_vec(),
            gain_code: table.gain_code(),
            limit_code: limit.round() as u32,
            port_width,
            out_width: 0,
        };
        let (mut lo, mut hi) = (0i64, 0i64);
        for code in 0..spec.port_codes() {
            let v = spec.eval_with(code, |i| table.entries()[i as usize]);
            lo = lo.min(v);
            hi = hi.max(v);
        }
        spec.out_width = signed_width(lo, hi).max(table.out_fmt().total_bits() + 1);
        Ok(spec)
    }

    pub fn port_codes(&self) -> u32 {
        1 << self.port_width
    }

    /// Signed value of a port code, in input-step units.
    pub fn port_signed(&self, code: u32) -> i64 {
        let w = self.port_width;
        let c = (code & ((1u32 << w) - 1)) as i64;
        if c >> (w - 1) & 1 == 1 {
            c - (1i64 << w)
        } else {
            c
        }
    }

    /// Real input value of a port code.
    pub fn port_value(&self, code: u32) -> f64 {
        self.port_signed(code) as f64 * self.in_fmt.step()
    }

    pub fn route(&self, code: u32) -> Route {
        let x = self.port_signed(code);
        let neg = x < 0;
        let mag = x.unsigned_abs() as u32;
        let sat = |i: usize| Route::Constant(self.saturation_codes[i]);
        match self.kind {
            RegionKind::OddSymmetricSaturating => {
                if mag >= self.limit_code {
                    sat(if neg { 0 } else { 1 })
                } else {
                    Route::Table { index: mag, negate: neg }
                }
            }
            RegionKind::NegativeExpSaturating => {
                if !neg {
                    Route::Linear(x)
                } else if mag >= self.limit_code {
                    sat(0)
                } else {
                    Route::Table { index: mag, negate: true }
                }
            }
            RegionKind::Custom => {
                if neg {
                    sat(0)
                } else if mag >= self.limit_code {
                    sat(1)
                } else {
                    Route::Table { index: mag, negate: false }
                }
            }
        }
    }

    /// Output code for one port code, with `lookup` standing in for the core.
    pub fn eval_with(&self, code: u32, lookup: impl Fn(u32) -> u32) -> i64 {
        let of = self.out_fmt.frac_bits();
        let half = (1i64 << of) >> 1;
        let inf = self.in_fmt.frac_bits();
        match self.route(code) {
            Route::Constant(v) => v,
            Route::Linear(x) => (x * self.gain_code as i64 + ((1i64 << inf) >> 1)) >> inf,
            Route::Table { index, negate } => {
                let e = lookup(index) as i64;
                let m = match (self.kind, self.lambda_mode) {
                    (RegionKind::NegativeExpSaturating, LambdaMode::Unfolded) => (e * self.gain_code as i64 + half) >> of,
                    _ => e,
                };
                if negate {
                    -m
                } else {
                    m
                }
            }
        }
    }

    /// Canonical signed-digit expansion of the linear gain, as
    /// `(shift, +1 | -1)` pairs from the top digit down.
    pub fn gain_csd(&self) -> Vec<(u32, i8)> {
        csd(self.gain_code)
    }
}

/// Canonical signed-digit form: no two adjacent nonzero digits.
pub fn csd(mut n: u64) -> Vec<(u32, i8)> {
    let mut digits = Vec::new();
    let mut shift = 0;
    while n != 0 {
        if n & 1 == 1 {
            let d: i8 = if n & 3 == 3 { -1 } else { 1 };
            digits.push((shift, d));
            n = if d == 1 { n - 1 } else { n + 1 };
        }
        n >>= 1;
        shift += 1;
    }
    digits.reverse();
    digits
}

/// Smallest two's-complement width holding `lo..=hi`.
pub fn signed_width(lo: i64, hi: i64) -> u32 {
    (1..64).find(|&w| lo >= -(1i64 << (w - 1)) && hi < (1i64 << (w - 1))).unwrap_or(64)
}

/// Two-level circuit: an AND plane of cubes and one OR per output bit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlaNetlist {
    name: String,
    inputs: u32,
    outputs: u32,
    and_plane: Vec<Cube>,
    or_plane: Vec<Vec<usize>>,
    wrapper: Option<WrapperSpec>,
    /// Input codes whose core output is unspecified.
    dont_cares: Vec<u32>,
}

impl PlaNetlist {
    /// Builds a netlist from raw planes. Product indices must be valid; a
    /// product may repeat a cube or feed no output.
    pub fn from_planes(
        name: impl Into<String>,
        inputs: u32,
        and_plane: Vec<Cube>,
        or_plane: Vec<Vec<usize>>,
    ) -> Result<Self> {
        if inputs == 0 || inputs > MAX_WIDTH {
            return Err(Error::WidthLimit(inputs));
        }
        if or_plane.is_empty() || or_plane.len() > 32 {
            return Err(Error::InvalidParameter(format!("output count {} must be 1..=32", or_plane.len())));
        }
        if let Some(c) = and_plane.iter().find(|c| c.width() != inputs) {
            return Err(Error::InvalidParameter(format!("cube {c} does not have {inputs} inputs")));
        }
        for (j, row) in or_plane.iter().enumerate() {
            if let Some(&p) = row.iter().find(|&&p| p >= and_plane.len()) {
                return Err(Error::InvalidParameter(format!("output {j} uses product {p} of {}", and_plane.len())));
            }
        }
        Ok(PlaNetlist {
            name: name.into(),
            inputs,
            outputs: or_plane.len() as u32,
            and_plane,
            or_plane,
            wrapper: None,
            dont_cares: Vec::new(),
        })
    }

    pub fn from_cover(name: impl Into<String>, cover: &PlaCover) -> Self {
        let or_plane = (0..cover.outputs()).map(|j| cover.output_products(j)).collect();
        PlaNetlist {
            name: name.into(),
            inputs: cover.inputs(),
            outputs: cover.outputs(),
            and_plane: cover.products().to_vec(),
            or_plane,
            wrapper: None,
            dont_cares: Vec::new(),
        }
    }

    /// A cover of `table` wrapped in the table's region logic.
    pub fn from_table(name: impl Into<String>, cover: &PlaCover, table: &QuantizedFunctionTable) -> Result<Self> {
        if cover.inputs() != table.in_fmt().total_bits() || cover.outputs() != table.out_fmt().total_bits() {
            return Err(Error::InvalidParameter(format!(
                "cover is {}x{}, table is {}x{}",
                cover.inputs(),
                cover.outputs(),
                table.in_fmt().total_bits(),
                table.out_fmt().total_bits()
            )));
        }
        let mut n = PlaNetlist::from_cover(name, cover);
        n.wrapper = Some(WrapperSpec::from_table(table)?);
        Ok(n)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn inputs(&self) -> u32 {
        self.inputs
    }

    pub fn outputs(&self) -> u32 {
        self.outputs
    }

    pub fn and_plane(&self) -> &[Cube] {
        &self.and_plane
    }

    pub fn or_plane(&self) -> &[Vec<usize>] {
        &self.or_plane
    }

    pub fn wrapper(&self) -> Option<&WrapperSpec> {
        self.wrapper.as_ref()
    }

    pub fn with_dont_cares(mut self, mut codes: Vec<u32>) -> Self {
        codes.sort_unstable();
        codes.dedup();
        self.dont_cares = codes;
        self
    }

    pub fn dont_cares(&self) -> &[u32] {
        &self.dont_cares
    }

    /// Products that feed no output.
    pub fn unused_products(&self) -> Vec<usize> {
        let mut used = vec![false; self.and_plane.len()];
        for &p in self.or_plane.iter().flatten() {
            used[p] = true;
        }
        (0..used.len()).filter(|&p| !used[p]).collect()
    }

    /// The shared-plane cover this netlist implements.
    pub fn to_cover(&self) -> Result<PlaCover> {
        let mut members = vec![0u32; self.and_plane.len()];
        for (j, row) in self.or_plane.iter().enumerate() {
            for &p in row {
                members[p] |= 1 << j;
            }
        }
        PlaCover::from_rows(self.inputs, self.outputs, self.and_plane.iter().copied().zip(members))
    }

    /// Core output word for an input code.
    pub fn eval(&self, code: u32) -> u32 {
        let hit: Vec<bool> = self.and_plane.iter().map(|c| c.contains_minterm(code)).collect();
        self.or_plane
            .iter()
            .enumerate()
            .filter(|(_, row)| row.iter().any(|&p| hit[p]))
            .fold(0, |acc, (j, _)| acc | 1 << j)
    }

    /// Signed output code of the wrapped circuit for a port code.
    pub fn eval_wrapped(&self, port_code: u32) -> Option<i64> {
        self.wrapper.as_ref().map(|w| w.eval_with(port_code, |i| self.eval(i)))
    }

    pub fn cost(&self) -> CostReport {
        let literal_count = self.and_plane.iter().map(Cube::literal_count).sum::<u32>() as u64;
        let fanins: Vec<u64> = self.or_plane.iter().map(|r| r.len() as u64).collect();
        let and_gates: u64 = self.and_plane.iter().map(|c| (c.literal_count() as u64).saturating_sub(1)).sum();
        let or_gates: u64 = fanins.iter().map(|f| f.saturating_sub(1)).sum();
        let complemented = (0..self.inputs)
            .filter(|&b| self.and_plane.iter().any(|c| c.care() >> b & 1 == 1 && c.value() >> b & 1 == 0))
            .count() as u64;
        let max_width = self.and_plane.iter().map(|c| c.literal_count() as u64).max().unwrap_or(0);
        let max_fanin = fanins.iter().copied().max().unwrap_or(0);
        CostReport {
            design: self.name.clone(),
            product_count: self.and_plane.len() as u64,
            literal_count,
            or_input_count: fanins.iter().sum(),
            gate_equiv_area: and_gates + or_gates + complemented,
            depth_levels: ceil_log2(max_width) + ceil_log2(max_fanin),
            rom_bits: 0,
            clock_cycles: 0,
        }
    }
}

fn ceil_log2(n: u64) -> u64 {
    if n <= 1 {
        0
    } else {
        64 - (n - 1).leading_zeros() as u64
    }
}

/// Technology-independent size and speed figures of one design.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CostReport {
    pub design: String,
    pub product_count: u64,
    pub literal_count: u64,
    pub or_input_count: u64,
    /// Two-input gate equivalents; for ROMs, one per stored bit plus the
    /// datapath.
    pub gate_equiv_area: u64,
    pub depth_levels: u64,
    pub rom_bits: u64,
    pub clock_cycles: u32,
}

impl CostReport {
    /// `self` area over `other` area.
    pub fn area_ratio(&self, other: &CostReport) -> f64 {
        self.gate_equiv_area as f64 / other.gate_equiv_area as f64
    }
}

/// Cost of a ROM implementing `table`.
///
/// The value ROM stores `max(32, 2^n)` rows of the output word. The
/// slope/intercept ROM stores the same rows of `k`, `b` and a sign bit, and
/// adds an array multiplier (`k bits * x bits`) and an adder.
pub fn rom_cost(table: &QuantizedFunctionTable, kind: RomKind, kb: &RomKbConfig) -> CostReport {
    let n = table.in_fmt().total_bits();
    let m = table.out_fmt().total_bits() as u64;
    let rows = MIN_ROM_ROWS.max(1u64 << n);
    let (rom_bits, datapath, depth) = match kind {
        RomKind::Values => (rows * m, 0, ceil_log2(rows)),
        RomKind::SlopeIntercept => {
            let x_bits = (table.in_fmt().int_bits() + kb.x_frac_bits) as u64;
            let k_bits = kb.k_fmt.total_bits() as u64;
            let b_bits = kb.b_fmt.total_bits() as u64 + 1;
            (
                rows * kb.word_bits() as u64,
                k_bits * x_bits + b_bits,
                ceil_log2(rows) + ceil_log2(x_bits) + ceil_log2(k_bits + x_bits),
            )
        }
    };
    CostReport {
        design: format!("{}_{}", table.variant_name(), kind.name()),
        product_count: 0,
        literal_count: 0,
        or_input_count: 0,
        gate_equiv_area: rom_bits + datapath,
        depth_levels: depth,
        rom_bits,
        clock_cycles: kind.clock_cycles(),
    }
}

pub fn write_cost_csv<W: Write>(w: W, reports: &[CostReport]) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    for r in reports {
        wr.serialize(r)?;
    }
    wr.flush()?;
    Ok(())
}

pub fn read_cost_csv<R: std::io::Read>(r: R) -> Result<Vec<CostReport>> {
    let mut rd = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(r);
    rd.deserialize().map(|row| row.map_err(Error::from)).collect()
}

/// Fixed-width text table with area ratios against the first row.
pub fn format_cost_table(reports: &[CostReport]) -> String {
    let mut out = format!(
        "{:<24} {:>8} {:>8} {:>8} {:>8} {:>6} {:>8} {:>6} {:>8}\n",
        "design", "products", "literals", "or_in", "area_ge", "depth", "rom_bits", "cycles", "ratio"
    );
    for r in reports {
        let ratio = reports.first().map_or(1.0, |base| r.area_ratio(base));
        out.push_str(&format!(
            "{:<24} {:>8} {:>8} {:>8} {:>8} {:>6} {:>8} {:>6} {:>8.3}\n",
            r.design,
            r.product_count,
            r.literal_count,
            r.or_input_count,
            r.gate_equiv_area,
            r.depth_levels,
            r.rom_bits,
            r.clock_cycles,
            ratio
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcref::ActivationSpec;
    use crate::minimizer::{minimize_table, MinimizeOptions};
    use crate::tabulator::{build_table, build_table_with, SamplingConvention, TableOptions};

    fn table(f: ActivationSpec, i: &str, o: &str) -> QuantizedFunctionTable {
        build_table(&f, i.parse().unwrap(), o.parse().unwrap(), SamplingConvention::default()).unwrap()
    }

    fn netlist(t: &QuantizedFunctionTable) -> PlaNetlist {
        let cover = minimize_table(t, &MinimizeOptions::default()).unwrap().cover;
        PlaNetlist::from_table(t.variant_name(), &cover, t).unwrap()
    }

    /// Cube from a literal set, every literal taken positive.
    fn positive(width: u32, bits: &[u32]) -> Cube {
        let mask = bits.iter().fold(0, |m, &b| m | 1 << b);
        Cube::new(width, mask, mask)
    }

    fn tanh_table_one() -> PlaNetlist {
        let lits: [&[u32]; 19] = [
            &[3],
            &[2, 0],
            &[2, 1],
            &[2, 1, 0],
            &[2, 1, 0],
            &[3, 2],
            &[3, 1, 0],
            &[3, 1, 0],
            &[3, 2, 1, 0],
            &[3, 2, 0],
            &[3, 2, 1],
            &[3, 1, 0],
            &[2, 1, 0],
            &[3, 2, 1, 0],
            &[1, 0],
            &[2, 1],
            &[3, 2, 1, 0],
            &[3, 1, 0],
            &[3, 2, 1],
        ];
        let and_plane = lits.iter().map(|l| positive(4, l)).collect();
        // Y0 first; indices are p_k - 1
        let or_plane = vec![
            vec![18, 17, 10, 7, 3],
            vec![16, 15, 14, 1],
            vec![14, 10, 9, 4],
            vec![13, 12, 11, 10, 9, 8, 6],
            vec![7, 6, 5, 2, 1],
            vec![4, 3, 0],
            vec![2, 1, 0],
        ];
        PlaNetlist::from_planes("table_one", 4, and_plane, or_plane).unwrap()
    }

    #[test]
    fn transcribed_tanh_planes() {
        let n = tanh_table_one();
        let c = n.cost();
        assert_eq!(c.product_count, 19);
        let fanins: Vec<usize> = n.or_plane().iter().map(Vec::len).collect();
        assert_eq!(fanins, vec![5, 4, 4, 7, 5, 3, 3]);
        assert_eq!(c.or_input_count, 31);
        assert!(n.unused_products().is_empty());
    }

    #[test]
    fn transcribed_selu_planes_count() {
        let k = |v: &[usize]| v.iter().map(|p| p - 1).collect::<Vec<_>>();
        let or_plane = vec![
            k(&[56, 50, 49, 48, 47, 46, 44]),
            k(&[45, 44, 43, 42, 41, 40, 39, 38, 37, 36, 35, 34, 27, 23, 22, 19]),
            k(&[55, 54, 34, 32, 31, 30, 29, 18, 17, 16]),
            k(&[28, 27, 26, 25, 15, 14, 13, 12, 11]),
            k(&[53, 52, 51, 24, 23, 22, 21, 10, 9, 3]),
            k(&[20, 8, 7, 6]),
            k(&[19, 18, 5, 2]),
            k(&[4, 2, 1]),
        ];
        // literal sets are not needed for the counts
        let and_plane = vec![Cube::universal(5); 56];
        let n = PlaNetlist::from_planes("table_two", 5, and_plane, or_plane).unwrap();
        assert_eq!(n.cost().product_count, 56);
        // the printed OR plane never references p33
        assert_eq!(n.unused_products(), vec![32]);
    }

    #[test]
    fn eval_matches_entries() {
        let t = table(ActivationSpec::tanh(), "U1.3", "U1.6");
        let n = netlist(&t);
        assert_eq!(n.eval(0), 0);
        assert_eq!(n.eval(4), 30);
        for c in 0..16 {
            assert_eq!(n.eval(c), t.entries()[c as usize]);
        }
        assert_eq!(n.to_cover().unwrap().product_count(), n.and_plane().len());
    }

    #[test]
    fn wrapper_matches_reference_on_every_port_code() {
        let unfolded = build_table_with(
            &ActivationSpec::selu(),
            "U2.3".parse().unwrap(),
            "U1.7".parse().unwrap(),
            TableOptions {
                lambda_mode: LambdaMode::Unfolded,
                ..TableOptions::default()
            },
        )
        .unwrap();
        for t in [
            table(ActivationSpec::tanh(), "U1.3", "U1.6"),
            table(ActivationSpec::selu(), "U2.3", "U1.7"),
            table(ActivationSpec::sigmoid(), "U1.3", "U1.6"),
            table(ActivationSpec::elu(), "U2.4", "U1.7"),
            unfolded,
        ] {
            let n = netlist(&t);
            let w = n.wrapper().unwrap();
            for code in 0..w.port_codes() {
                let x = w.port_value(code);
                assert_eq!(n.eval_wrapped(code).unwrap(), t.reference_code(x), "{} x={x}", t.variant_name());
            }
        }
    }

    #[test]
    fn wrapper_widths() {
        let t = table(ActivationSpec::tanh(), "U1.3", "U1.6");
        let w = WrapperSpec::from_table(&t).unwrap();
        assert_eq!((w.port_width, w.out_width, w.limit_code), (6, 8, 16));
        // x = +2.0 saturates to +1.0
        assert_eq!(w.eval_with(16, |_| 0), 64);
        let s = WrapperSpec::from_table(&table(ActivationSpec::selu(), "U2.3", "U1.7")).unwrap();
        // 134 * 7.875 = 1055.25 needs 12 signed bits
        assert_eq!((s.port_width, s.out_width, s.limit_code), (7, 12, 31));
        assert_eq!(s.eval_with(8, |_| 0), 134);
    }

    #[test]
    fn csd_expansions() {
        let value = |d: &[(u32, i8)]| d.iter().map(|&(s, g)| g as i64 * (1i64 << s)).sum::<i64>();
        assert_eq!(csd(134), vec![(7, 1), (3, 1), (1, -1)]);
        assert_eq!(csd(7), vec![(3, 1), (0, -1)]);
        assert_eq!(csd(0), vec![]);
        for n in 0..5000u64 {
            let d = csd(n);
            assert_eq!(value(&d), n as i64);
            assert!(d.windows(2).all(|w| w[0].0 > w[1].0 + 1), "{n}: {d:?}");
        }
    }

    #[test]
    fn wire_costs_nothing() {
        let n = PlaNetlist::from_planes("wire", 1, vec![positive(1, &[0])], vec![vec![0]]).unwrap();
        let c = n.cost();
        assert_eq!((c.product_count, c.gate_equiv_area, c.depth_levels), (1, 0, 0));
        let inv = PlaNetlist::from_planes("inv", 1, vec![Cube::new(1, 1, 0)], vec![vec![0]]).unwrap();
        assert_eq!(inv.cost().gate_equiv_area, 1);
    }

    #[test]
    fn cost_ignores_product_order() {
        let t = table(ActivationSpec::selu(), "U2.3", "U1.7");
        let n = netlist(&t);
        let mut and_plane = n.and_plane().to_vec();
        and_plane.reverse();
        let last = and_plane.len() - 1;
        let or_plane = n.or_plane().iter().map(|r| r.iter().map(|p| last - p).collect()).collect();
        let r = PlaNetlist::from_planes(n.name(), n.inputs(), and_plane, or_plane).unwrap();
        assert_eq!(r.cost(), n.cost());
        for c in 0..32 {
            assert_eq!(r.eval(c), n.eval(c));
        }
    }

    #[test]
    fn rom_bits() {
        let tanh = table(ActivationSpec::tanh(), "U1.3", "U1.6");
        let selu = table(ActivationSpec::selu(), "U2.3", "U1.7");
        let wide = table(ActivationSpec::tanh(), "U1.5", "U1.6");
        let kb = RomKbConfig::for_table(&tanh);
        assert_eq!(rom_cost(&tanh, RomKind::Values, &kb).rom_bits, 224);
        assert_eq!(rom_cost(&selu, RomKind::Values, &kb).rom_bits, 256);
        assert_eq!(rom_cost(&wide, RomKind::Values, &kb).rom_bits, 448);
        let c = rom_cost(&tanh, RomKind::SlopeIntercept, &kb);
        assert_eq!(c.rom_bits, 32 * 21);
        assert_eq!(c.clock_cycles, 2);
        assert!(c.gate_equiv_area > rom_cost(&tanh, RomKind::Values, &kb).gate_equiv_area);
    }

    #[test]
    fn combinational_is_smaller_than_roms() {
        for t in [table(ActivationSpec::tanh(), "U1.3", "U1.6"), table(ActivationSpec::selu(), "U2.3", "U1.7")] {
            let c = netlist(&t).cost();
            let kb = RomKbConfig::for_table(&t);
            assert!(c.gate_equiv_area < rom_cost(&t, RomKind::Values, &kb).gate_equiv_area);
            assert_eq!(c.clock_cycles, 0);
        }
    }

    #[test]
    fn cost_csv_round_trip() {
        let t = table(ActivationSpec::tanh(), "U1.3", "U1.6");
        let kb = RomKbConfig::for_table(&t);
        let reports = vec![netlist(&t).cost(), rom_cost(&t, RomKind::Values, &kb)];
        let mut buf = Vec::new();
        write_cost_csv(&mut buf, &reports).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("design,product_count,literal_count,or_input_count,gate_equiv_area,"));
        assert_eq!(read_cost_csv(text.as_bytes()).unwrap(), reports);
        let table = format_cost_table(&reports);
        assert_eq!(table.lines().count(), 3);
        assert!(table.lines().nth(1).unwrap().trim_end().ends_with("1.000"));
    }
}
