//! Average-error measurement and method comparison.
//!
//! The average error of an approximation `A` of `P` over an interval is
//! `100 * sum |P(x_i) - A(x_i)| / N` with `x_i` the midpoints of `N` equal
//! cells, so both interval endpoints are excluded.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use crate::baseline::{RomKbConfig, RomKbTable, RomKind};
use crate::error::{Error, Result};
use crate::fixed_point::{FixedPointFormat, RoundingMode};
use crate::funcref::{
    exp_pow2_approx, sigmoid_pow2_approx, tanh_pow2_approx, taylor_exp, ActivationKind, ActivationSpec, Interval,
    Pow2Coefficient, TANH_SATURATION_INPUT, TANH_SMALL_INPUT,
};
use crate::minimizer::{minimize_table, MinimizeOptions};
use crate::netlist::{rom_cost, CostReport, PlaNetlist};
use crate::tabulator::{build_table_with, LambdaMode, QuantizedFunctionTable, RegionKind, SamplingConvention, TableOptions};

pub const DEFAULT_SAMPLES: usize = 100_000;

/// Default Taylor order of the series baseline.
pub const DEFAULT_TAYLOR_ORDER: u32 = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Method {
    /// The function itself.
    Exact,
    /// The minimized netlist inside its wrapper.
    Combinational,
    RomY,
    RomKb,
    /// `e^x` replaced by its Maclaurin polynomial of the given order.
    Taylor(u32),
    /// `e^x` replaced by a power of two.
    Pow2Approx(Pow2Coefficient),
    /// tanh as `x` near zero, `1` far out and a LUT between.
    Taylor5Lut,
}

impl Method {
    /// The comparison set: every method except `Exact`.
    pub fn standard() -> Vec<Method> {
        vec![
            Method::Combinational,
            Method::RomY,
            Method::RomKb,
            Method::Taylor(DEFAULT_TAYLOR_ORDER),
            Method::Pow2Approx(Pow2Coefficient::default()),
            Method::Taylor5Lut,
        ]
    }

    pub fn name(&self) -> String {
        match self {
            Method::Exact => "exact".into(),
            Method::Combinational => "combinational".into(),
            Method::RomY => "rom_y".into(),
            Method::RomKb => "rom_kb".into(),
            Method::Taylor(order) => format!("taylor{order}"),
            Method::Pow2Approx(Pow2Coefficient::Simplified) => "pow2_approx".into(),
            Method::Pow2Approx(Pow2Coefficient::Precise) => "pow2_approx_1.44".into(),
            Method::Taylor5Lut => "taylor5_lut".into(),
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        let m = match s.as_str() {
            "exact" => Method::Exact,
            "combinational" | "comb" => Method::Combinational,
            "rom_y" => Method::RomY,
            "rom_kb" => Method::RomKb,
            "taylor" => Method::Taylor(DEFAULT_TAYLOR_ORDER),
            "pow2" | "pow2_approx" | "pow2_approx_1.5" => Method::Pow2Approx(Pow2Coefficient::Simplified),
            "pow2_approx_1.44" | "pow2_1.44" => Method::Pow2Approx(Pow2Coefficient::Precise),
            "taylor5_lut" => Method::Taylor5Lut,
            other => match other.strip_prefix("taylor").and_then(|o| o.parse().ok()) {
                Some(order) => Method::Taylor(order),
                None => return Err(Error::InvalidParameter(format!("unknown method `{s}`"))),
            },
        };
        Ok(m)
    }
}

/// Parses a comma-separated method list; `all` expands to the standard set.
pub fn parse_methods(s: &str) -> Result<Vec<Method>> {
    let mut out = Vec::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        if part.eq_ignore_ascii_case("all") {
            out.extend(Method::standard());
        } else {
            out.push(part.parse()?);
        }
    }
    if out.is_empty() {
        return Err(Error::InvalidParameter("empty method list".into()));
    }
    Ok(out)
}

/// Mean and maximum of `|exact - approx|` at the cell midpoints.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ErrorStats {
    pub average_error_percent: f64,
    pub max_error: f64,
    pub n_samples: usize,
}

/// `x_i = lo + (hi - lo) (i + 1/2) / n`.
pub fn sample_point(interval: Interval, i: usize, n: usize) -> f64 {
    interval.lo + (interval.hi - interval.lo) * (i as f64 + 0.5) / n as f64
}

/// Compensated (Neumaier) sum; the result does not depend on thread count
/// because there is only one.
fn neumaier(values: impl Iterator<Item = f64>) -> f64 {
    let (mut sum, mut c) = (0.0f64, 0.0f64);
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            c += (sum - t) + v;
        } else {
            c += (v - t) + sum;
        }
        sum = t;
    }
    sum + c
}

pub fn average_error(
    approx: impl Fn(f64) -> f64,
    exact: impl Fn(f64) -> f64,
    interval: Interval,
    n: usize,
) -> Result<ErrorStats> {
    if n == 0 {
        return Err(Error::InvalidParameter("sample count must be at least 1".into()));
    }
    if !(interval.lo < interval.hi) {
        return Err(Error::InvalidParameter(format!("empty interval ({}, {})", interval.lo, interval.hi)));
    }
    let mut max_error = 0.0f64;
    let total = neumaier((0..n).map(|i| {
        let x = sample_point(interval, i, n);
        let e = (exact(x) - approx(x)).abs();
        max_error = max_error.max(e);
        e
    }));
    Ok(ErrorStats {
        average_error_percent: 100.0 * total / n as f64,
        max_error,
        n_samples: n,
    })
}

/// The interval the wrapped table approximates: `(-b, b)` for odd functions,
/// `(-b, 0)` for the negative-exponential branch, `(0, b)` otherwise.
pub fn default_interval(table: &QuantizedFunctionTable) -> Interval {
    let b = table.region().table_limit();
    match table.region().kind {
        RegionKind::OddSymmetricSaturating => Interval::new(-b, b),
        RegionKind::NegativeExpSaturating => Interval::new(-b, 0.0),
        RegionKind::Custom => Interval::new(0.0, b),
    }
}

/// `e^x` through a series or power-of-two substitute, composed into `f`.
fn via_exp(f: &ActivationSpec, x: f64, e: impl Fn(f64) -> f64) -> Option<f64> {
    let v = match f.kind() {
        ActivationKind::Exp => e(x),
        ActivationKind::Tanh => {
            let r = 1.0 - 2.0 / (1.0 + e(2.0 * x.abs()));
            r.copysign(x)
        }
        ActivationKind::Sigmoid => {
            let p = e(x.abs());
            let s = p / (1.0 + p);
            if x < 0.0 {
                1.0 - s
            } else {
                s
            }
        }
        ActivationKind::Elu | ActivationKind::Selu => {
            let g = if x > 0.0 { x } else { f.alpha() * (e(x) - 1.0) };
            f.lambda() * g
        }
        ActivationKind::Custom => return None,
    };
    Some(v)
}

/// tanh as `x` below the small-input bound, `1` above the saturation bound
/// and a value LUT at the table's input resolution between them.
#[derive(Clone, Debug)]
pub struct Taylor5Lut {
    step: f64,
    first: usize,
    values: Vec<f64>,
    out_fmt: FixedPointFormat,
}

impl Taylor5Lut {
    pub fn for_table(table: &QuantizedFunctionTable) -> Result<Self> {
        if table.activation().kind() != ActivationKind::Tanh {
            return Err(Error::NotApplicable("taylor5_lut".into(), table.activation().name().into()));
        }
        let in_fmt = table.in_fmt();
        let out_fmt = table.out_fmt();
        let conv = table.convention();
        let step = in_fmt.step();
        let first = (TANH_SMALL_INPUT / step).floor() as usize;
        let last = (TANH_SATURATION_INPUT / step).ceil() as usize;
        let values = (first..last)
            .map(|i| {
                let t = match conv.domain_point {
                    crate::tabulator::DomainPoint::Midpoint => (i as f64 + 0.5) * step,
                    _ => i as f64 * step,
                };
                out_fmt.quantize_unbounded(t.tanh(), conv.range_mode.rounding()).min(out_fmt.max_value())
            })
            .collect();
        Ok(Taylor5Lut {
            step,
            first,
            values,
            out_fmt,
        })
    }

    /// Stored rows.
    pub fn rows(&self) -> usize {
        self.values.len()
    }

    pub fn eval(&self, x: f64) -> f64 {
        let t = x.abs();
        let m = if t < TANH_SMALL_INPUT {
            self.out_fmt.quantize_unbounded(t, RoundingMode::Round)
        } else if t >= TANH_SATURATION_INPUT {
            1.0f64.min(self.out_fmt.max_value())
        } else {
            let i = ((t / self.step).floor() as usize).clamp(self.first, self.first + self.values.len() - 1);
            self.values[i - self.first]
        };
        m.copysign(x)
    }
}

/// Everything needed to evaluate each method on one table.
#[derive(Clone, Debug)]
pub struct MethodContext<'a> {
    table: &'a QuantizedFunctionTable,
    netlist: PlaNetlist,
    rom_kb: RomKbTable,
}

impl<'a> MethodContext<'a> {
    /// Minimizes the table and builds the slope/intercept ROM with default
    /// word formats.
    pub fn new(table: &'a QuantizedFunctionTable, options: &MinimizeOptions) -> Result<Self> {
        let r = minimize_table(table, options)?;
        let netlist = PlaNetlist::from_table(table.variant_name(), &r.cover, table)?.with_dont_cares(r.dont_cares);
        Self::with_netlist(table, netlist, RomKbConfig::for_table(table))
    }

    pub fn with_netlist(table: &'a QuantizedFunctionTable, netlist: PlaNetlist, kb: RomKbConfig) -> Result<Self> {
        let rom_kb = RomKbTable::build(table, kb)?;
        Ok(MethodContext { table, netlist, rom_kb })
    }

    pub fn table(&self) -> &QuantizedFunctionTable {
        self.table
    }

    pub fn netlist(&self) -> &PlaNetlist {
        &self.netlist
    }

    pub fn rom_kb(&self) -> &RomKbTable {
        &self.rom_kb
    }

    /// The method as a real function of `x`.
    pub fn evaluator(&self, method: Method) -> Result<Box<dyn Fn(f64) -> f64 + '_>> {
        let t = self.table;
        let f = t.activation();
        let step = t.out_fmt().step();
        let not_applicable = || Error::NotApplicable(method.name(), f.name().to_string());
        Ok(match method {
            Method::Exact => Box::new(move |x| f.eval(x)),
            Method::Combinational => {
                let n = &self.netlist;
                Box::new(move |x| t.wrapped_code_with(x, |i| n.eval(i)) as f64 * step)
            }
            Method::RomY => Box::new(move |x| t.reference_eval(x)),
            Method::RomKb => {
                if t.lambda_mode() == LambdaMode::Unfolded && t.region().kind == RegionKind::NegativeExpSaturating {
                    return Err(not_applicable());
                }
                let rom = &self.rom_kb;
                Box::new(move |x| t.wrapped_code_by_magnitude(x, |m| rom.magnitude_code(m)) as f64 * step)
            }
            Method::Taylor(order) => {
                via_exp(f, 0.0, |v| v).ok_or_else(not_applicable)?;
                Box::new(move |x| via_exp(f, x, |v| taylor_exp(v, order, 0.0)).expect("checked kind"))
            }
            Method::Pow2Approx(coeff) => match f.kind() {
                ActivationKind::Tanh => Box::new(move |x| tanh_pow2_approx(x, coeff)),
                ActivationKind::Sigmoid => Box::new(move |x| sigmoid_pow2_approx(x, coeff)),
                ActivationKind::Custom => return Err(not_applicable()),
                _ => Box::new(move |x| via_exp(f, x, exp_pow2_approx).expect("checked kind")),
            },
            Method::Taylor5Lut => {
                let lut = Taylor5Lut::for_table(t)?;
                Box::new(move |x| lut.eval(x))
            }
        })
    }

    /// Hardware cost, for the methods that have a cost model.
    pub fn cost(&self, method: Method) -> Option<CostReport> {
        match method {
            Method::Combinational => Some(self.netlist.cost()),
            Method::RomY => Some(rom_cost(self.table, RomKind::Values, self.rom_kb.config())),
            Method::RomKb => Some(rom_cost(self.table, RomKind::SlopeIntercept, self.rom_kb.config())),
            _ => None,
        }
    }

    pub fn report(&self, method: Method, interval: Interval, n: usize) -> Result<ErrorReport> {
        let approx = self.evaluator(method)?;
        let f = self.table.activation();
        let stats = average_error(approx, |x| f.eval(x), interval, n)?;
        Ok(ErrorReport {
            method: method.name(),
            average_error_percent: stats.average_error_percent,
            max_error: stats.max_error,
            n_samples: n,
            convention: self.table.convention().to_string(),
            cost: self.cost(method),
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ErrorReport {
    pub method: String,
    pub average_error_percent: f64,
    pub max_error: f64,
    pub n_samples: usize,
    pub convention: String,
    pub cost: Option<CostReport>,
}

/// One report per method, in the order given.
pub fn compare_methods(ctx: &MethodContext<'_>, methods: &[Method], interval: Interval, n: usize) -> Result<Vec<ErrorReport>> {
    methods.iter().map(|&m| ctx.report(m, interval, n)).collect()
}

const REPORT_HEADER: [&str; 10] = [
    "method",
    "convention",
    "n_samples",
    "average_error_percent",
    "max_error",
    "product_count",
    "literal_count",
    "gate_equiv_area",
    "rom_bits",
    "clock_cycles",
];

/// Method comparison as CSV; cost columns are empty for methods without a
/// cost model.
pub fn write_report_csv<W: Write>(w: W, reports: &[ErrorReport]) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    wr.write_record(REPORT_HEADER)?;
    for r in reports {
        let cost = |g: fn(&CostReport) -> u64| r.cost.as_ref().map(|c| g(c).to_string()).unwrap_or_default();
        wr.write_record([
            r.method.clone(),
            r.convention.clone(),
            r.n_samples.to_string(),
            format!("{:.6}", r.average_error_percent),
            format!("{:.6}", r.max_error),
            cost(|c| c.product_count),
            cost(|c| c.literal_count),
            cost(|c| c.gate_equiv_area),
            cost(|c| c.rom_bits),
            cost(|c| c.clock_cycles as u64),
        ])?;
    }
    wr.flush()?;
    Ok(())
}

/// A named real function.
type Curve<'a> = (String, Box<dyn Fn(f64) -> f64 + 'a>);

/// Sampled curves: an `x` column, an `exact` column and one column per
/// method.
#[derive(Clone, Debug, PartialEq)]
pub struct ErrorCurves {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl ErrorCurves {
    fn sample(interval: Interval, points: usize, exact: &dyn Fn(f64) -> f64, methods: Vec<Curve<'_>>) -> Self {
        let mut columns = vec!["x".to_string(), "exact".to_string()];
        columns.extend(methods.iter().map(|(n, _)| n.clone()));
        let rows = (0..points)
            .map(|i| {
                let x = sample_point(interval, i, points);
                let mut row = vec![x, exact(x)];
                row.extend(methods.iter().map(|(_, g)| g(x)));
                row
            })
            .collect();
        ErrorCurves { columns, rows }
    }

    /// Largest `|exact - column|` over the samples.
    pub fn max_error(&self, column: &str) -> Option<f64> {
        let j = self.columns.iter().position(|c| c == column)?;
        Some(self.rows.iter().map(|r| (r[1] - r[j]).abs()).fold(0.0, f64::max))
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(&self.columns)?;
        for row in &self.rows {
            wr.write_record(row.iter().map(|v| v.to_string()))?;
        }
        wr.flush()?;
        Ok(())
    }
}

/// Per-sample values of each method over `interval`.
pub fn error_curves(ctx: &MethodContext<'_>, methods: &[Method], interval: Interval, points: usize) -> Result<ErrorCurves> {
    let f = ctx.table().activation();
    let evals = methods
        .iter()
        .map(|&m| Ok((m.name(), ctx.evaluator(m)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(ErrorCurves::sample(interval, points, &|x| f.eval(x), evals))
}

/// A real-valued lookup table of `rows` equal segments over an interval.
#[derive(Clone, Debug)]
pub struct UniformLut {
    interval: Interval,
    step: f64,
    values: Vec<f64>,
    slopes: Vec<f64>,
}

impl UniformLut {
    pub fn new(f: impl Fn(f64) -> f64, interval: Interval, rows: usize) -> Result<Self> {
        if rows == 0 || !(interval.lo < interval.hi) {
            return Err(Error::InvalidParameter("a LUT needs at least one row over a nonempty interval".into()));
        }
        let step = (interval.hi - interval.lo) / rows as f64;
        let edge = |i: usize| f(interval.lo + i as f64 * step);
        let values: Vec<f64> = (0..=rows).map(edge).collect();
        let slopes = values.windows(2).map(|w| (w[1] - w[0]) / step).collect();
        Ok(UniformLut {
            interval,
            step,
            values,
            slopes,
        })
    }

    fn segment(&self, x: f64) -> usize {
        (((x - self.interval.lo) / self.step).floor().max(0.0) as usize).min(self.slopes.len() - 1)
    }

    /// Value stored at the segment's left edge.
    pub fn value(&self, x: f64) -> f64 {
        self.values[self.segment(x)]
    }

    /// Secant line of the segment.
    pub fn secant(&self, x: f64) -> f64 {
        let s = self.segment(x);
        self.values[s] + self.slopes[s] * (x - (self.interval.lo + s as f64 * self.step))
    }
}

/// `e^x` under the value LUT, the secant LUT, the Taylor polynomial and the
/// power-of-two form.
pub fn exp_curves(interval: Interval, rows: usize, taylor_order: u32, points: usize) -> Result<ErrorCurves> {
    let lut = UniformLut::new(f64::exp, interval, rows)?;
    let methods: Vec<Curve<'_>> = vec![
        ("rom_y".into(), Box::new(|x| lut.value(x))),
        ("rom_kb".into(), Box::new(|x| lut.secant(x))),
        (format!("taylor{taylor_order}"), Box::new(move |x| taylor_exp(x, taylor_order, 0.0))),
        ("pow2_approx".into(), Box::new(exp_pow2_approx)),
    ];
    Ok(ErrorCurves::sample(interval, points, &f64::exp, methods))
}

/// Average error of the combinational design under one convention.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepEntry {
    pub convention: SamplingConvention,
    pub average_error_percent: f64,
    /// `|AE - target|`.
    pub distance: f64,
    pub product_count: usize,
}

/// Evaluates the combinational design under all six conventions, sorted by
/// distance from `target_percent` (ties keep the convention order).
pub fn convention_sweep(
    f: &ActivationSpec,
    in_fmt: FixedPointFormat,
    out_fmt: FixedPointFormat,
    lambda_mode: LambdaMode,
    target_percent: f64,
    n: usize,
    options: &MinimizeOptions,
) -> Result<Vec<SweepEntry>> {
    let mut entries = SamplingConvention::all()
        .into_iter()
        .map(|convention| {
            let table = build_table_with(f, in_fmt, out_fmt, TableOptions { convention, lambda_mode })?;
            let ctx = MethodContext::new(&table, options)?;
            let r = ctx.report(Method::Combinational, default_interval(&table), n)?;
            Ok(SweepEntry {
                convention,
                average_error_percent: r.average_error_percent,
                distance: (r.average_error_percent - target_percent).abs(),
                product_count: ctx.netlist().and_plane().len(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    entries.sort_by(|a, b| a.distance.total_cmp(&b.distance));
    Ok(entries)
}

pub fn write_sweep_csv<W: Write>(w: W, entries: &[SweepEntry], target_percent: f64) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    wr.write_record(["convention", "average_error_percent", "target_percent", "distance", "product_count", "best"])?;
    for (i, e) in entries.iter().enumerate() {
        wr.write_record([
            e.convention.to_string(),
            format!("{:.6}", e.average_error_percent),
            target_percent.to_string(),
            format!("{:.6}", e.distance),
            e.product_count.to_string(),
            (i == 0).to_string(),
        ])?;
    }
    wr.flush()?;
    Ok(())
}
