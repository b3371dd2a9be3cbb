//! Sampling an activation function onto a fixed-point grid.
//!
//! A table holds one output magnitude code per input magnitude code over the
//! nonlinear region only. Everything outside that region (saturation, sign
//! routing, the linear SELU branch) is described by a [`RegionSpec`] and
//! realized by the wrapper; [`QuantizedFunctionTable::reference_code`] is the
//! bit-accurate software model of the wrapped circuit.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::fixed_point::{FixedPointFormat, RoundingMode};
use crate::funcref::{ActivationKind, ActivationSpec};

/// Where inside segment `c` the function is sampled, and how an arbitrary
/// magnitude is mapped to a segment.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DomainPoint {
    /// Segment `[c s, (c+1) s)`, sampled at `c s`.
    LeftEdge,
    /// Segment `[c s, (c+1) s)`, sampled at `(c + 1/2) s`.
    Midpoint,
    /// Segment `[(c - 1/2) s, (c + 1/2) s)`, sampled at `c s`.
    NearestGrid,
}

impl DomainPoint {
    pub const ALL: [DomainPoint; 3] = [DomainPoint::LeftEdge, DomainPoint::Midpoint, DomainPoint::NearestGrid];

    pub fn name(self) -> &'static str {
        match self {
            DomainPoint::LeftEdge => "left_edge",
            DomainPoint::Midpoint => "midpoint",
            DomainPoint::NearestGrid => "nearest_grid",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RangeMode {
    Floor,
    Round,
}

impl RangeMode {
    pub fn rounding(self) -> RoundingMode {
        match self {
            RangeMode::Floor => RoundingMode::Floor,
            RangeMode::Round => RoundingMode::Round,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            RangeMode::Floor => "floor",
            RangeMode::Round => "round",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SamplingConvention {
    pub domain_point: DomainPoint,
    pub range_mode: RangeMode,
}

impl Default for SamplingConvention {
    fn default() -> Self {
        SamplingConvention {
            domain_point: DomainPoint::LeftEdge,
            range_mode: RangeMode::Round,
        }
    }
}

impl SamplingConvention {
    pub fn new(domain_point: DomainPoint, range_mode: RangeMode) -> Self {
        SamplingConvention { domain_point, range_mode }
    }

    /// All six combinations, in a fixed order.
    pub fn all() -> Vec<SamplingConvention> {
        DomainPoint::ALL
            .iter()
            .flat_map(|&d| [RangeMode::Floor, RangeMode::Round].map(|r| SamplingConvention::new(d, r)))
            .collect()
    }

    /// Rounding used to map a magnitude onto an input code.
    pub fn index_mode(&self) -> RoundingMode {
        match self.domain_point {
            DomainPoint::LeftEdge | DomainPoint::Midpoint => RoundingMode::Floor,
            DomainPoint::NearestGrid => RoundingMode::Round,
        }
    }

    pub fn sample_point(&self, code: u32, fmt: &FixedPointFormat) -> f64 {
        let c = code as f64;
        match self.domain_point {
            DomainPoint::LeftEdge | DomainPoint::NearestGrid => c * fmt.step(),
            DomainPoint::Midpoint => (c + 0.5) * fmt.step(),
        }
    }

    /// Lowest magnitude mapped onto `code`.
    pub fn segment_start(&self, code: u32, fmt: &FixedPointFormat) -> f64 {
        let c = code as f64;
        match self.domain_point {
            DomainPoint::LeftEdge | DomainPoint::Midpoint => c * fmt.step(),
            DomainPoint::NearestGrid => ((c - 0.5) * fmt.step()).max(0.0),
        }
    }
}

impl fmt::Display for SamplingConvention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.domain_point.name(), self.range_mode.name())
    }
}

impl FromStr for SamplingConvention {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || {
            Error::InvalidParameter(format!(
                "convention `{s}` (expected <left_edge|midpoint|nearest_grid>/<floor|round>)"
            ))
        };
        let (d, r) = s.split_once(['/', ',', ':']).ok_or_else(bad)?;
        let norm = |t: &str| t.trim().to_ascii_lowercase().replace('-', "_");
        let domain_point = match norm(d).as_str() {
            "left_edge" | "left" => DomainPoint::LeftEdge,
            "midpoint" | "mid" => DomainPoint::Midpoint,
            "nearest_grid" | "nearest" => DomainPoint::NearestGrid,
            _ => return Err(bad()),
        };
        let range_mode = match norm(r).as_str() {
            "floor" => RangeMode::Floor,
            "round" => RangeMode::Round,
            _ => return Err(bad()),
        };
        Ok(SamplingConvention { domain_point, range_mode })
    }
}

/// How SELU's lambda enters the circuit.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum LambdaMode {
    /// Table stores `lambda * a * (1 - e^-t)` directly.
    #[default]
    Folded,
    /// Table stores `a * (1 - e^-t)`; a constant multiplier follows it.
    Unfolded,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RegionKind {
    /// tanh: `1` above the breakpoint, `-1` below its negation, odd table between.
    OddSymmetricSaturating,
    /// ELU/SELU: linear for `x >= 0`, saturated at `-lambda a` below `-b`.
    NegativeExpSaturating,
    /// Table over `[0, b)`; clamps to `f(0)` below zero and to `f(b)` above.
    Custom,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Region {
    SaturateHi,
    SaturateLo,
    LinearBranch,
    TableBranch,
}

/// Piecewise structure around the table.
#[derive(Clone, Debug, PartialEq)]
pub struct RegionSpec {
    pub kind: RegionKind,
    /// Strictly increasing.
    pub breakpoints: Vec<f64>,
    /// Saturation outputs in breakpoint order (low side first).
    pub saturation: Vec<f64>,
    /// Gain of the linear branch (lambda for SELU, 1 otherwise).
    pub linear_gain: f64,
}

impl RegionSpec {
    pub fn odd_symmetric(limit: f64, sat: f64) -> Self {
        RegionSpec {
            kind: RegionKind::OddSymmetricSaturating,
            breakpoints: vec![-limit, limit],
            saturation: vec![-sat, sat],
            linear_gain: 1.0,
        }
    }

    pub fn negative_exp(limit: f64, sat: f64, gain: f64) -> Self {
        RegionSpec {
            kind: RegionKind::NegativeExpSaturating,
            breakpoints: vec![-limit, 0.0],
            saturation: vec![-sat],
            linear_gain: gain,
        }
    }

    pub fn custom(limit: f64, lo: f64, hi: f64) -> Self {
        RegionSpec {
            kind: RegionKind::Custom,
            breakpoints: vec![0.0, limit],
            saturation: vec![lo, hi],
            linear_gain: 1.0,
        }
    }

    /// Magnitudes strictly below this bound are served by the table.
    pub fn table_limit(&self) -> f64 {
        match self.kind {
            RegionKind::OddSymmetricSaturating | RegionKind::Custom => self.breakpoints[1],
            RegionKind::NegativeExpSaturating => -self.breakpoints[0],
        }
    }
}

pub fn classify_region(x: f64, spec: &RegionSpec) -> Region {
    let b = spec.table_limit();
    match spec.kind {
        RegionKind::OddSymmetricSaturating => {
            if x >= b {
                Region::SaturateHi
            } else if x <= -b {
                Region::SaturateLo
            } else {
                Region::TableBranch
            }
        }
        RegionKind::NegativeExpSaturating => {
            if x >= 0.0 {
                Region::LinearBranch
            } else if x <= -b {
                Region::SaturateLo
            } else {
                Region::TableBranch
            }
        }
        RegionKind::Custom => {
            if x < 0.0 {
                Region::SaturateLo
            } else if x >= b {
                Region::SaturateHi
            } else {
                Region::TableBranch
            }
        }
    }
}

/// Knobs of [`build_table_with`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct TableOptions {
    pub convention: SamplingConvention,
    pub lambda_mode: LambdaMode,
}

/// A sampled activation function over its nonlinear region.
#[derive(Clone, Debug)]
pub struct QuantizedFunctionTable {
    activation: ActivationSpec,
    in_fmt: FixedPointFormat,
    out_fmt: FixedPointFormat,
    entries: Vec<u32>,
    region: RegionSpec,
    options: TableOptions,
    /// Saturation outputs as signed out_fmt codes, parallel to `region.saturation`.
    saturation_codes: Vec<i64>,
    /// Linear gain quantized to out_fmt precision, in out_fmt code units.
    gain_code: u64,
    warnings: Vec<String>,
}

/// Default input format for a function at `bits` total input bits.
pub fn default_input_format(kind: ActivationKind, bits: u32) -> Result<FixedPointFormat> {
    match kind {
        ActivationKind::Selu | ActivationKind::Elu => FixedPointFormat::new(2, bits.saturating_sub(2)),
        _ => FixedPointFormat::new(1, bits.saturating_sub(1)),
    }
}

/// Default output format at `bits` total output bits: one integer bit.
pub fn default_output_format(bits: u32) -> Result<FixedPointFormat> {
    FixedPointFormat::new(1, bits.saturating_sub(1))
}

/// Parses a variant name such as `tanh_7_4` or `SeLU_8_5` (output bits, then
/// input bits) into the function and its default formats.
pub fn parse_variant(name: &str) -> Result<(ActivationSpec, FixedPointFormat, FixedPointFormat)> {
    let bad = || Error::InvalidParameter(format!("variant `{name}` (expected <function>_<out bits>_<in bits>)"));
    let mut parts = name.split('_');
    let func: ActivationSpec = parts.next().ok_or_else(bad)?.parse()?;
    let out_bits: u32 = parts.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
    let in_bits: u32 = parts.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
    if parts.next().is_some() {
        return Err(bad());
    }
    let in_fmt = default_input_format(func.kind(), in_bits)?;
    let out_fmt = default_output_format(out_bits)?;
    Ok((func, in_fmt, out_fmt))
}

pub fn build_table(
    f: &ActivationSpec,
    in_fmt: FixedPointFormat,
    out_fmt: FixedPointFormat,
    convention: SamplingConvention,
) -> Result<QuantizedFunctionTable> {
    build_table_with(
        f,
        in_fmt,
        out_fmt,
        TableOptions {
            convention,
            ..TableOptions::default()
        },
    )
}

pub fn build_table_with(
    f: &ActivationSpec,
    in_fmt: FixedPointFormat,
    out_fmt: FixedPointFormat,
    options: TableOptions,
) -> Result<QuantizedFunctionTable> {
    let mode = options.convention.range_mode.rounding();
    let mut warnings = Vec::new();
    if out_fmt.frac_bits() == 0 {
        warnings.push(format!("output format {out_fmt} has no fractional bits"));
    }

    let region = match f.kind() {
        ActivationKind::Tanh => RegionSpec::odd_symmetric(in_fmt.range_end(), 1.0),
        ActivationKind::Selu | ActivationKind::Elu => {
            RegionSpec::negative_exp(in_fmt.max_value(), f.lambda() * f.alpha(), f.lambda())
        }
        ActivationKind::Sigmoid | ActivationKind::Exp | ActivationKind::Custom => {
            if let Some(c) = f.custom_function() {
                if c.domain.lo > 0.0 || c.domain.hi < in_fmt.max_value() {
                    return Err(Error::Untabulatable(
                        c.name.clone(),
                        format!(
                            "declared domain [{}, {}] does not cover the input grid [0, {}]",
                            c.domain.lo,
                            c.domain.hi,
                            in_fmt.max_value()
                        ),
                    ));
                }
                if c.range.lo < 0.0 || c.range.hi > out_fmt.max_value() {
                    return Err(Error::Untabulatable(
                        c.name.clone(),
                        format!("declared range [{}, {}] does not fit {out_fmt}", c.range.lo, c.range.hi),
                    ));
                }
            }
            let hi_point = match f.custom_function() {
                Some(c) => in_fmt.range_end().min(c.domain.hi),
                None => in_fmt.range_end(),
            };
            RegionSpec::custom(in_fmt.range_end(), f.eval(0.0), f.eval(hi_point))
        }
    };

    let mut table = QuantizedFunctionTable {
        activation: f.clone(),
        in_fmt,
        out_fmt,
        entries: Vec::with_capacity(in_fmt.code_count() as usize),
        region,
        options,
        saturation_codes: Vec::new(),
        gain_code: 0,
        warnings,
    };

    let max = out_fmt.max_code() as f64;
    for code in 0..in_fmt.code_count() {
        let t = options.convention.sample_point(code, &in_fmt);
        let value = table.magnitude_fn(t);
        if value < 0.0 || !value.is_finite() {
            return Err(Error::Untabulatable(
                f.name().to_string(),
                format!("magnitude {value} at {t} is not a nonnegative finite value"),
            ));
        }
        let scaled = mode.apply(value * out_fmt.scale());
        if scaled > max {
            return Err(Error::RangeOverflow {
                code,
                value,
                max: out_fmt.max_value(),
            });
        }
        table.entries.push(scaled as u32);
    }

    table.gain_code = RoundingMode::Round.apply(table.region.linear_gain * out_fmt.scale()) as u64;
    for (i, &s) in table.region.saturation.clone().iter().enumerate() {
        let scaled = mode.apply(s.abs() * out_fmt.scale());
        if scaled > max {
            return Err(Error::RangeOverflow {
                code: in_fmt.code_count() + i as u32,
                value: s,
                max: out_fmt.max_value(),
            });
        }
        let c = scaled as i64;
        table.saturation_codes.push(if s < 0.0 { -c } else { c });
    }
    Ok(table)
}

impl QuantizedFunctionTable {
    pub fn activation(&self) -> &ActivationSpec {
        &self.activation
    }

    pub fn in_fmt(&self) -> FixedPointFormat {
        self.in_fmt
    }

    pub fn out_fmt(&self) -> FixedPointFormat {
        self.out_fmt
    }

    pub fn entries(&self) -> &[u32] {
        &self.entries
    }

    pub fn region(&self) -> &RegionSpec {
        &self.region
    }

    pub fn convention(&self) -> SamplingConvention {
        self.options.convention
    }

    pub fn lambda_mode(&self) -> LambdaMode {
        self.options.lambda_mode
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    /// Saturation outputs as signed output codes (low side first).
    pub fn saturation_codes(&self) -> &[i64] {
        &self.saturation_codes
    }

    /// The linear-branch gain in output code units (`round(gain * 2^frac)`).
    pub fn gain_code(&self) -> u64 {
        self.gain_code
    }

    /// Linear gain after quantization, and its deviation from the exact gain.
    pub fn quantized_gain(&self) -> (f64, f64) {
        let q = self.gain_code as f64 * self.out_fmt.step();
        (q, q - self.region.linear_gain)
    }

    /// `NAME_<out bits>_<in bits>`.
    pub fn variant_name(&self) -> String {
        format!(
            "{}_{}_{}",
            self.activation.name(),
            self.out_fmt.total_bits(),
            self.in_fmt.total_bits()
        )
    }

    /// The nonnegative magnitude the table approximates at magnitude `t`.
    pub fn magnitude_fn(&self, t: f64) -> f64 {
        match self.region.kind {
            RegionKind::OddSymmetricSaturating | RegionKind::Custom => self.activation.eval(t),
            RegionKind::NegativeExpSaturating => {
                let a = self.activation.alpha();
                let base = -a * (-t).exp_m1();
                match self.options.lambda_mode {
                    LambdaMode::Folded => self.activation.lambda() * base,
                    LambdaMode::Unfolded => base,
                }
            }
        }
    }

    /// Input codes that no table-branch input can select. Marking these as
    /// don't-cares leaves the wrapped circuit unchanged.
    pub fn unreachable_codes(&self) -> Vec<u32> {
        let limit = self.region.table_limit();
        (0..self.in_fmt.code_count())
            .filter(|&c| self.options.convention.segment_start(c, &self.in_fmt) >= limit)
            .collect()
    }

    /// Table index selected by magnitude `t`.
    pub fn index_of(&self, t: f64) -> u32 {
        self.in_fmt.encode(t, self.options.convention.index_mode())
    }

    /// Output code of the table branch for a stored entry, after the
    /// optional lambda stage.
    fn table_branch_magnitude(&self, entry: u32) -> i64 {
        let e = entry as i64;
        match (self.region.kind, self.options.lambda_mode) {
            (RegionKind::NegativeExpSaturating, LambdaMode::Unfolded) => {
                let of = self.out_fmt.frac_bits();
                (e * self.gain_code as i64 + ((1i64 << of) >> 1)) >> of
            }
            _ => e,
        }
    }

    /// Bit-accurate model of the wrapped circuit, as a signed output code.
    pub fn reference_code(&self, x: f64) -> i64 {
        self.wrapped_code_with(x, |i| self.entries[i as usize])
    }

    /// The wrapper around an arbitrary implementation of the table: `lookup`
    /// maps a table index to the stored entry.
    pub fn wrapped_code_with(&self, x: f64, lookup: impl Fn(u32) -> u32) -> i64 {
        self.wrapped_code_by_magnitude(x, |t| self.table_branch_magnitude(lookup(self.index_of(t))))
    }

    /// The wrapper with the table branch replaced outright: `magnitude` maps
    /// `|x|` to an unsigned output code.
    pub fn wrapped_code_by_magnitude(&self, x: f64, magnitude: impl Fn(f64) -> i64) -> i64 {
        let region = classify_region(x, &self.region);
        match region {
            Region::SaturateLo => self.saturation_codes[0],
            Region::SaturateHi => *self.saturation_codes.last().expect("saturation codes"),
            // gain * x in output code units is gain_code * x; round half up
            Region::LinearBranch => (self.gain_code as f64 * x + 0.5).floor() as i64,
            Region::TableBranch => {
                let m = magnitude(x.abs());
                match self.region.kind {
                    RegionKind::OddSymmetricSaturating if x < 0.0 => -m,
                    RegionKind::NegativeExpSaturating => -m,
                    _ => m,
                }
            }
        }
    }

    /// Bit-accurate model of the wrapped circuit.
    pub fn reference_eval(&self, x: f64) -> f64 {
        self.reference_code(x) as f64 * self.out_fmt.step()
    }

    /// Exact value of the wrapped function (the value the circuit approximates).
    pub fn exact_eval(&self, x: f64) -> f64 {
        self.activation.eval(x)
    }

    /// Writes the table as CSV: input_code, input_value, exact_value,
    /// output_code, output_value, abs_error.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(["input_code", "input_value", "exact_value", "output_code", "output_value", "abs_error"])?;
        for (code, &out) in self.entries.iter().enumerate() {
            let x = self.in_fmt.decode(code as u32)?;
            let exact = self.magnitude_fn(x);
            let y = self.out_fmt.decode(out)?;
            wr.write_record([
                code.to_string(),
                x.to_string(),
                exact.to_string(),
                out.to_string(),
                y.to_string(),
                (y - exact).abs().to_string(),
            ])?;
        }
        wr.flush()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fmt(s: &str) -> FixedPointFormat {
        s.parse().unwrap()
    }

    fn tanh_7_4(conv: SamplingConvention) -> QuantizedFunctionTable {
        build_table(&ActivationSpec::tanh(), fmt("U1.3"), fmt("U1.6"), conv).unwrap()
    }

    fn selu_8_5(conv: SamplingConvention) -> QuantizedFunctionTable {
        build_table(&ActivationSpec::selu(), fmt("U2.3"), fmt("U1.7"), conv).unwrap()
    }

    #[test]
    fn tanh_entries() {
        let t = tanh_7_4(SamplingConvention::default());
        assert_eq!(t.entries().len(), 16);
        assert_eq!(t.entries()[0], 0);
        // round(64 tanh(0.5)) = round(29.5755) = 30
        assert_eq!(t.entries()[4], 30);
        assert_eq!(t.variant_name(), "tanh_7_4");
    }

    #[test]
    fn selu_entries() {
        let t = selu_8_5(SamplingConvention::default());
        assert_eq!(t.entries().len(), 32);
        // round(128 * 1.0507 * 1.6733 * (1 - e^-3.875)) = round(220.37) = 220
        assert_eq!(t.entries()[31], 220);
        assert_eq!(t.saturation_codes(), &[-225]);
    }

    #[test]
    fn entries_against_independent_evaluation() {
        let conv = SamplingConvention::default();
        let t = selu_8_5(conv);
        for (c, &e) in t.entries().iter().enumerate() {
            let x = -(c as f64) / 8.0;
            let v = -crate::funcref::selu(x, 1.6733, 1.0507) * 128.0;
            assert_eq!(e, (v + 0.5).floor() as u32, "code {c}");
        }
    }

    #[test]
    fn regions() {
        let tanh = tanh_7_4(SamplingConvention::default());
        let selu = selu_8_5(SamplingConvention::default());
        assert_eq!(classify_region(2.0, tanh.region()), Region::SaturateHi);
        assert_eq!(classify_region(-2.0, tanh.region()), Region::SaturateLo);
        assert_eq!(classify_region(1.99, tanh.region()), Region::TableBranch);
        assert_eq!(classify_region(-3.875, selu.region()), Region::SaturateLo);
        assert_eq!(classify_region(-3.87, selu.region()), Region::TableBranch);
        assert_eq!(classify_region(0.0, selu.region()), Region::LinearBranch);
    }

    #[test]
    fn reference_eval_examples() {
        let t = tanh_7_4(SamplingConvention::default());
        assert_eq!(t.reference_eval(-0.5), -(30.0 / 64.0));
        assert_eq!(t.reference_eval(10.0), 1.0);
        assert_eq!(t.reference_eval(-10.0), -1.0);
        let s = selu_8_5(SamplingConvention::default());
        // lambda quantized to U1.7: round(1.0507 * 128) = 134
        assert_eq!(s.gain_code(), 134);
        assert_eq!(s.reference_eval(1.0), 134.0 / 128.0);
        assert_eq!(s.reference_eval(-4.0), -225.0 / 128.0);
    }

    #[test]
    fn grid_points_are_not_double_quantized() {
        for conv in SamplingConvention::all() {
            let t = tanh_7_4(conv);
            for c in 0..16u32 {
                let x = c as f64 / 8.0;
                let e = t.entries()[c as usize] as f64 / 64.0;
                assert_eq!(t.reference_eval(x), e);
                if c > 0 {
                    assert_eq!(t.reference_eval(-x), -e);
                }
            }
        }
    }

    #[test]
    fn piecewise_constant_error_bound() {
        // tanh' <= 1 and SELU magnitude slope <= lambda * a
        let t = tanh_7_4(SamplingConvention::default());
        let bound = 1.0 * 0.125 + 1.0 / 128.0;
        let s = selu_8_5(SamplingConvention::default());
        let sbound = 1.0507 * 1.6733 * 0.125 + 1.0 / 256.0;
        for i in 0..20_000 {
            let x = -2.0 + 4.0 * i as f64 / 20_000.0;
            if classify_region(x, t.region()) == Region::TableBranch {
                assert!((t.reference_eval(x) - x.tanh()).abs() <= bound + 1e-12, "tanh at {x}");
            }
            let y = -3.875 * i as f64 / 20_000.0;
            if classify_region(y, s.region()) == Region::TableBranch {
                assert!((s.reference_eval(y) - s.exact_eval(y)).abs() <= sbound + 1e-12, "selu at {y}");
            }
        }
    }

    #[test]
    fn tables_are_monotone() {
        for conv in SamplingConvention::all() {
            for bits in [3, 4, 5, 6, 8] {
                for t in [
                    build_table(&ActivationSpec::tanh(), default_input_format(ActivationKind::Tanh, bits).unwrap(), fmt("U1.6"), conv).unwrap(),
                    build_table(&ActivationSpec::selu(), default_input_format(ActivationKind::Selu, bits).unwrap(), fmt("U1.7"), conv).unwrap(),
                ] {
                    assert!(t.entries().windows(2).all(|w| w[0] <= w[1]), "{} {conv}", t.variant_name());
                }
            }
        }
    }

    #[test]
    fn overflow_is_reported_with_code() {
        let err = build_table(&ActivationSpec::selu(), fmt("U2.3"), fmt("U0.7"), SamplingConvention::default()).unwrap_err();
        match err {
            Error::RangeOverflow { code, .. } => assert_eq!(code, 7),
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn degenerate_output_warns() {
        let t = build_table(&ActivationSpec::tanh(), fmt("U1.3"), fmt("U1.0"), SamplingConvention::default()).unwrap();
        assert_eq!(t.warnings().len(), 1);
    }

    #[test]
    fn unreachable_codes() {
        let s = selu_8_5(SamplingConvention::default());
        assert_eq!(s.unreachable_codes(), vec![31]);
        let t = tanh_7_4(SamplingConvention::default());
        assert!(t.unreachable_codes().is_empty());
    }

    #[test]
    fn unfolded_lambda() {
        let opts = TableOptions {
            convention: SamplingConvention::default(),
            lambda_mode: LambdaMode::Unfolded,
        };
        let s = build_table_with(&ActivationSpec::selu(), fmt("U2.3"), fmt("U1.7"), opts).unwrap();
        // a (1 - e^-3.875) * 128 = 209.74 -> 210
        assert_eq!(s.entries()[31], 210);
        // a (1 - e^-3.75) * 128 = 209.15 -> 209; then (209 * 134 + 64) >> 7 = 219
        assert_eq!(s.entries()[30], 209);
        assert_eq!(s.reference_code(-3.8), -219);
    }

    #[test]
    fn custom_and_sigmoid_regions() {
        let sq = ActivationSpec::custom(
            "sq",
            |x| x * x / 4.0,
            crate::funcref::Interval::new(0.0, 2.0),
            crate::funcref::Interval::new(0.0, 1.0),
        )
        .unwrap();
        let t = build_table(&sq, fmt("U1.3"), fmt("U1.6"), SamplingConvention::default()).unwrap();
        assert_eq!(t.reference_eval(-1.0), 0.0);
        assert_eq!(t.reference_eval(1.0), 0.25);
        assert_eq!(t.reference_eval(5.0), 1.0);
        let sig = build_table(&ActivationSpec::sigmoid(), fmt("U1.3"), fmt("U1.6"), SamplingConvention::default()).unwrap();
        assert_eq!(sig.entries()[0], 32);
    }

    #[test]
    fn convention_strings() {
        for c in SamplingConvention::all() {
            assert_eq!(c.to_string().parse::<SamplingConvention>().unwrap(), c);
        }
        assert!("left_edge".parse::<SamplingConvention>().is_err());
        assert_eq!(SamplingConvention::all().len(), 6);
    }

    #[test]
    fn variants() {
        let (f, i, o) = parse_variant("SeLU_8_5").unwrap();
        assert_eq!((f.kind(), i.to_string(), o.to_string()), (ActivationKind::Selu, "U2.3".into(), "U1.7".into()));
        let (_, i, o) = parse_variant("tanh_7_6").unwrap();
        assert_eq!((i.to_string(), o.to_string()), ("U1.5".into(), "U1.6".into()));
        assert!(parse_variant("tanh_7").is_err());
    }

    #[test]
    fn csv_dump() {
        let mut buf = Vec::new();
        tanh_7_4(SamplingConvention::default()).write_csv(&mut buf).unwrap();
        let s = String::from_utf8(buf).unwrap();
        let lines: Vec<_> = s.lines().collect();
        assert_eq!(lines[0], "input_code,input_value,exact_value,output_code,output_value,abs_error");
        assert_eq!(lines.len(), 17);
        assert!(lines[5].starts_with("4,0.5,"));
    }
}
