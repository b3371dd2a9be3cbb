//! Lookup-table baselines: a value ROM (one stored output per input code) and
//! a slope/intercept ROM evaluating `y = k t + b` per segment.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::fixed_point::{FixedPointFormat, RoundingMode};
use crate::tabulator::{QuantizedFunctionTable, RegionKind};

/// Minimum row count of a memory-compiler ROM.
pub const MIN_ROM_ROWS: u64 = 32;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RomKind {
    /// Stores the output code of every input code.
    Values,
    /// Stores slope and intercept per segment.
    SlopeIntercept,
}

impl RomKind {
    pub fn name(self) -> &'static str {
        match self {
            RomKind::Values => "rom_y",
            RomKind::SlopeIntercept => "rom_kb",
        }
    }

    /// Cycles from input to output: a registered read, plus a registered
    /// multiply-add for the slope/intercept form.
    pub fn clock_cycles(self) -> u32 {
        match self {
            RomKind::Values => 1,
            RomKind::SlopeIntercept => 2,
        }
    }
}

impl fmt::Display for RomKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for RomKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "values" | "rom_y" | "y" => Ok(RomKind::Values),
            "slope_intercept" | "rom_kb" | "kb" => Ok(RomKind::SlopeIntercept),
            _ => Err(Error::InvalidParameter(format!("unknown ROM kind `{s}`"))),
        }
    }
}

/// How each segment's line is chosen.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum LineFit {
    /// Through both segment endpoints.
    #[default]
    Secant,
    /// Least squares over the segment.
    LeastSquares,
}

impl FromStr for LineFit {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "secant" => Ok(LineFit::Secant),
            "least_squares" | "lsq" => Ok(LineFit::LeastSquares),
            _ => Err(Error::InvalidParameter(format!("unknown line fit `{s}`"))),
        }
    }
}

/// Word formats of the slope/intercept ROM.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RomKbConfig {
    /// Slope format (nonnegative magnitudes).
    pub k_fmt: FixedPointFormat,
    /// Intercept magnitude format; one sign bit is stored on top.
    pub b_fmt: FixedPointFormat,
    /// Fractional bits of the input fed to the multiplier.
    pub x_frac_bits: u32,
    pub fit: LineFit,
}

impl RomKbConfig {
    /// Slope and intercept with three fractional bits beyond the output; the
    /// multiplier sees four more fractional input bits than the table index.
    pub fn for_table(table: &QuantizedFunctionTable) -> Self {
        let out = table.out_fmt();
        let word = FixedPointFormat::new(out.int_bits(), (out.frac_bits() + 3).min(crate::fixed_point::MAX_BITS - out.int_bits()))
            .expect("at most MAX_BITS bits");
        RomKbConfig {
            k_fmt: word,
            b_fmt: word,
            x_frac_bits: (table.in_fmt().frac_bits() + 4).min(crate::fixed_point::MAX_BITS),
            fit: LineFit::Secant,
        }
    }

    pub fn word_bits(&self) -> u32 {
        self.k_fmt.total_bits() + self.b_fmt.total_bits() + 1
    }
}

/// One line segment, real-valued and quantized.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Segment {
    pub start: f64,
    pub k: f64,
    pub b: f64,
    pub k_code: u32,
    /// Signed intercept in `b_fmt` units.
    pub b_code: i64,
}

/// Slope/intercept ROM over the table branch of a wrapped function.
#[derive(Clone, Debug)]
pub struct RomKbTable {
    config: RomKbConfig,
    step: f64,
    out_fmt: FixedPointFormat,
    segments: Vec<Segment>,
}

/// The nonnegative magnitude the table branch represents, with lambda folded.
pub fn branch_magnitude(table: &QuantizedFunctionTable, t: f64) -> f64 {
    let f = table.activation();
    match table.region().kind {
        RegionKind::OddSymmetricSaturating | RegionKind::Custom => f.eval(t),
        RegionKind::NegativeExpSaturating => -f.eval(-t),
    }
}

fn fit_line(g: &dyn Fn(f64) -> f64, lo: f64, hi: f64, fit: LineFit) -> (f64, f64) {
    match fit {
        LineFit::Secant => {
            let k = (g(hi) - g(lo)) / (hi - lo);
            (k, g(lo) - k * lo)
        }
        LineFit::LeastSquares => {
            const SAMPLES: usize = 256;
            let xs: Vec<f64> = (0..SAMPLES)
                .map(|i| lo + (hi - lo) * (i as f64 + 0.5) / SAMPLES as f64)
                .collect();
            let n = SAMPLES as f64;
            let mx = xs.iter().sum::<f64>() / n;
            let my = xs.iter().map(|&x| g(x)).sum::<f64>() / n;
            let sxy: f64 = xs.iter().map(|&x| (x - mx) * (g(x) - my)).sum();
            let sxx: f64 = xs.iter().map(|&x| (x - mx) * (x - mx)).sum();
            let k = sxy / sxx;
            (k, my - k * mx)
        }
    }
}

impl RomKbTable {
    /// One segment per input code of the table.
    pub fn build(table: &QuantizedFunctionTable, config: RomKbConfig) -> Result<Self> {
        let in_fmt = table.in_fmt();
        let step = in_fmt.step();
        let g = |t: f64| branch_magnitude(table, t);
        let mut segments = Vec::with_capacity(in_fmt.code_count() as usize);
        for code in 0..in_fmt.code_count() {
            let start = code as f64 * step;
            let (k, b) = fit_line(&g, start, start + step, config.fit);
            if k < 0.0 || k > config.k_fmt.max_value() + config.k_fmt.step() / 2.0 {
                return Err(Error::RangeOverflow {
                    code,
                    value: k,
                    max: config.k_fmt.max_value(),
                });
            }
            if b.abs() > config.b_fmt.max_value() + config.b_fmt.step() / 2.0 {
                return Err(Error::RangeOverflow {
                    code,
                    value: b,
                    max: config.b_fmt.max_value(),
                });
            }
            let k_code = config.k_fmt.encode(k, RoundingMode::Round);
            let b_mag = config.b_fmt.encode(b.abs(), RoundingMode::Round) as i64;
            segments.push(Segment {
                start,
                k,
                b,
                k_code,
                b_code: if b < 0.0 { -b_mag } else { b_mag },
            });
        }
        Ok(RomKbTable {
            config,
            step,
            out_fmt: table.out_fmt(),
            segments,
        })
    }

    pub fn config(&self) -> &RomKbConfig {
        &self.config
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    /// Quantized slope and intercept of a segment as reals.
    pub fn quantized_line(&self, s: usize) -> (f64, f64) {
        let seg = &self.segments[s];
        (
            seg.k_code as f64 * self.config.k_fmt.step(),
            seg.b_code as f64 * self.config.b_fmt.step(),
        )
    }

    /// Output magnitude code for `t >= 0`.
    pub fn magnitude_code(&self, t: f64) -> i64 {
        let xs = (1u64 << self.config.x_frac_bits) as f64;
        let tq = (t * xs).floor() / xs;
        let s = ((tq / self.step).floor() as usize).min(self.segments.len() - 1);
        let (k, b) = self.quantized_line(s);
        let y = RoundingMode::Round.apply((k * tq + b) * self.out_fmt.scale());
        y.clamp(0.0, self.out_fmt.max_code() as f64) as i64
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcref::ActivationSpec;
    use crate::tabulator::{build_table, SamplingConvention};

    fn tanh_table() -> QuantizedFunctionTable {
        build_table(
            &ActivationSpec::tanh(),
            "U1.3".parse().unwrap(),
            "U1.6".parse().unwrap(),
            SamplingConvention::default(),
        )
        .unwrap()
    }

    #[test]
    fn secant_segment_matches_hand_construction() {
        let t = tanh_table();
        let rom = RomKbTable::build(&t, RomKbConfig::for_table(&t)).unwrap();
        let seg = rom.segments()[4];
        let k = (0.625f64.tanh() - 0.5f64.tanh()) / 0.125;
        assert_eq!(seg.start, 0.5);
        assert!((seg.k - k).abs() < 1e-12);
        assert!((seg.b - (0.5f64.tanh() - k * 0.5)).abs() < 1e-12);
        // secant endpoints are on the curve
        assert!((seg.k * 0.625 + seg.b - 0.625f64.tanh()).abs() < 1e-12);
    }

    #[test]
    fn least_squares_beats_secant_in_mean_square() {
        let t = tanh_table();
        let g = |x: f64| x.tanh();
        let (ks, bs) = fit_line(&g, 0.5, 0.625, LineFit::Secant);
        let (kl, bl) = fit_line(&g, 0.5, 0.625, LineFit::LeastSquares);
        let mse = |k: f64, b: f64| (0..1000).map(|i| 0.5 + 0.125 * (i as f64 + 0.5) / 1000.0).map(|x| (k * x + b - g(x)).powi(2)).sum::<f64>();
        assert!(mse(kl, bl) < mse(ks, bs));
        let mut cfg = RomKbConfig::for_table(&t);
        cfg.fit = LineFit::LeastSquares;
        assert!(RomKbTable::build(&t, cfg).is_ok());
    }

    #[test]
    fn magnitudes_stay_in_range() {
        let t = tanh_table();
        let rom = RomKbTable::build(&t, RomKbConfig::for_table(&t)).unwrap();
        for i in 0..2000 {
            let x = 2.0 * i as f64 / 2000.0;
            let m = rom.magnitude_code(x);
            assert!((0..=127).contains(&m));
            // output rounding (1/128) plus input truncation (1/128) plus fit error
            assert!((m as f64 / 64.0 - x.tanh()).abs() < 0.02, "x={x}");
        }
    }

    #[test]
    fn selu_magnitude_is_folded() {
        let t = build_table(
            &ActivationSpec::selu(),
            "U2.3".parse().unwrap(),
            "U1.7".parse().unwrap(),
            SamplingConvention::default(),
        )
        .unwrap();
        let expected = 1.0507 * 1.6733 * (1.0 - (-1.0f64).exp());
        assert!((branch_magnitude(&t, 1.0) - expected).abs() < 1e-12);
        let rom = RomKbTable::build(&t, RomKbConfig::for_table(&t)).unwrap();
        assert_eq!(rom.segments().len(), 32);
    }

    #[test]
    fn kinds_parse() {
        assert_eq!("rom_y".parse::<RomKind>().unwrap(), RomKind::Values);
        assert_eq!("slope_intercept".parse::<RomKind>().unwrap(), RomKind::SlopeIntercept);
        assert_eq!(RomKind::SlopeIntercept.clock_cycles(), 2);
        assert!("cordic".parse::<RomKind>().is_err());
    }
}
