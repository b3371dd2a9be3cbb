use std::ffi::OsString;
use std::fmt;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use afc_core::analyzer::{
    compare_methods, convention_sweep, default_interval, error_curves, exp_curves, parse_methods, write_report_csv,
    write_sweep_csv, MethodContext,
};
use afc_core::baseline::{RomKbConfig, RomKind};
use afc_core::emitter::vsim::VerilogDesign;
use afc_core::emitter::{check_design, emit_pla, emit_testbench, emit_verilog, parse_pla, sanitize_identifier};
use afc_core::funcref::Interval;
use afc_core::minimizer::{minimize_table, uncovered_adjacent_pairs, DcPolicy};
use afc_core::netlist::{format_cost_table, rom_cost, write_cost_csv, PlaNetlist, WrapperSpec};
use afc_core::nn::{self, Dataset, MlpModel, Split, SyntheticConfig, TrainConfig};
use afc_core::tabulator::{build_table, build_table_with, parse_variant, QuantizedFunctionTable, TableOptions};
use afc_core::Error;

use crate::{CheckArgs, ErrorArgs, EvalArgs, GenArgs, MakeDataArgs, SweepArgs, TableArgs, TrainArgs};

/// `println!` that ignores a closed stdout.
macro_rules! say {
    ($($t:tt)*) => {{
        let _ = writeln!(io::stdout(), $($t)*);
    }};
}

pub const EXIT_USAGE: u8 = 1;
pub const EXIT_VERIFY: u8 = 2;
pub const EXIT_INTERNAL: u8 = 3;

#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Verification(String),
    Internal(String),
}

impl Failure {
    pub fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => EXIT_USAGE,
            Failure::Verification(_) => EXIT_VERIFY,
            Failure::Internal(_) => EXIT_INTERNAL,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Usage(m) | Failure::Verification(m) | Failure::Internal(m) => f.write_str(m),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match &e {
            Error::InvalidFormat(_)
            | Error::UnknownFunction(_)
            | Error::InvalidParameter(_)
            | Error::WidthLimit(_)
            | Error::RangeOverflow { .. }
            | Error::Untabulatable(..)
            | Error::NotApplicable(..)
            | Error::KindMismatch { .. }
            | Error::PlaParse { .. }
            | Error::Dataset(_)
            | Error::Checkpoint(_) => Failure::Usage(e.to_string()),
            Error::Io(io) if io.kind() == io::ErrorKind::NotFound => Failure::Usage(e.to_string()),
            _ => Failure::Internal(e.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Error::from(e).into()
    }
}

type Outcome = Result<(), Failure>;

/// What every output header records.
pub struct Run {
    header: String,
    seed: u64,
}

impl Run {
    pub fn new(raw: &[OsString], seed: u64) -> Self {
        let args: Vec<String> = raw.iter().skip(1).map(|a| a.to_string_lossy().into_owned()).collect();
        Run {
            header: format!("# afc {} afc {} seed={seed}\n", env!("CARGO_PKG_VERSION"), args.join(" ")),
            seed,
        }
    }

    fn csv(&self, write: impl FnOnce(&mut Vec<u8>) -> afc_core::Result<()>) -> Result<Vec<u8>, Failure> {
        let mut buf = self.header.clone().into_bytes();
        write(&mut buf)?;
        Ok(buf)
    }
}

fn write_file(path: &Path, bytes: &[u8]) -> Outcome {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    fs::write(path, bytes).map_err(|e| Failure::Internal(format!("cannot write {}: {e}", path.display())))
}

fn read_file(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))
}

fn table(args: &TableArgs) -> Result<QuantizedFunctionTable, Failure> {
    let (in_fmt, out_fmt) = args.formats();
    let t = build_table_with(
        &args.spec()?,
        in_fmt,
        out_fmt,
        TableOptions {
            convention: args.convention,
            lambda_mode: args.lambda_mode(),
        },
    )?;
    for w in t.warnings() {
        eprintln!("warning: {w}");
    }
    Ok(t)
}

pub fn gen(run: &Run, args: &GenArgs) -> Outcome {
    let t = table(&args.table)?;
    let opts = args.minimize.options();
    let r = minimize_table(&t, &opts)?;
    let name = sanitize_identifier(&args.name.clone().unwrap_or_else(|| t.variant_name()));
    let netlist = PlaNetlist::from_table(name.clone(), &r.cover, &t)?.with_dont_cares(r.dont_cares.clone());

    let dir = &args.out_dir;
    write_file(&dir.join(format!("{name}.pla")), format!("{}\n", emit_pla(&r.cover)).as_bytes())?;
    write_file(&dir.join(format!("{name}.v")), emit_verilog(&netlist, &name).as_bytes())?;
    write_file(&dir.join(format!("{name}_tb.v")), emit_testbench(&netlist, &name, Some(&t))?.as_bytes())?;
    write_file(&dir.join("table.csv"), &run.csv(|b| t.write_csv(b))?)?;

    let kb = RomKbConfig::for_table(&t);
    let costs = [
        netlist.cost(),
        rom_cost(&t, RomKind::Values, &kb),
        rom_cost(&t, RomKind::SlopeIntercept, &kb),
    ];
    write_file(&dir.join("cost.csv"), &run.csv(|b| write_cost_csv(b, &costs))?)?;

    let exact = r.exact.iter().filter(|&&e| e).count();
    say!(
        "{name}: {} -> {}, {}, {} products ({} before sharing), {exact}/{} outputs provably minimum",
        t.in_fmt(),
        t.out_fmt(),
        t.convention(),
        r.cover.product_count(),
        r.unshared_products,
        r.exact.len()
    );
    if !r.dont_cares.is_empty() {
        say!("don't-care input codes: {:?}", r.dont_cares);
    }
    say!("{}", format_cost_table(&costs).trim_end());
    say!("wrote {}", dir.display());
    Ok(())
}

fn first_mismatch(codes: impl Iterator<Item = u32>, got: impl Fn(u32) -> Result<u64, Failure>, want: impl Fn(u32) -> u64) -> Result<Option<String>, Failure> {
    for c in codes {
        let (g, w) = (got(c)?, want(c));
        if g != w {
            return Ok(Some(format!("first failing input code {c}: expected {w}, got {g}")));
        }
    }
    Ok(None)
}

pub fn check(run: &Run, args: &CheckArgs) -> Outcome {
    let _ = run;
    let t = table(&args.table)?;
    let opts = args.minimize.options();
    let n = t.in_fmt().total_bits();
    let m = t.out_fmt().total_bits();
    let dc: Vec<u32> = match opts.dc_policy {
        DcPolicy::None => Vec::new(),
        DcPolicy::Unreachable => t.unreachable_codes(),
    };
    let care = || (0..1u32 << n).filter(|c| !dc.contains(c));
    let entry = |c: u32| t.entries()[c as usize] as u64;

    let mut designs: Vec<(PathBuf, String)> = Vec::new();
    let mut benches: Vec<(PathBuf, String)> = Vec::new();
    let mut failures = Vec::new();
    let mut report = |path: &Path, result: Option<String>| match result {
        None => say!("PASS {}", path.display()),
        Some(msg) => {
            say!("FAIL {}: {msg}", path.display());
            failures.push(path.display().to_string());
        }
    };

    for path in &args.files {
        let text = read_file(path)?;
        let file_name = path.file_name().map(|f| f.to_string_lossy().into_owned()).unwrap_or_default();
        if file_name.ends_with(".pla") {
            let cover = parse_pla(&text)?;
            if cover.inputs() != n || cover.outputs() != m {
                report(path, Some(format!("cover is {}x{}, table is {n}x{m}", cover.inputs(), cover.outputs())));
                continue;
            }
            let mut result = first_mismatch(care(), |c| Ok(cover.eval(c) as u64), entry)?;
            if result.is_none() && opts.hazard_free {
                for j in 0..m {
                    let onset: Vec<u32> = care().filter(|&c| entry(c) >> j & 1 == 1).collect();
                    let pairs = uncovered_adjacent_pairs(&cover.sop(j).cubes, &onset, n);
                    if let Some((a, b)) = pairs.first() {
                        result = Some(format!("output {j}: adjacent onset codes {a} and {b} share no product"));
                        break;
                    }
                }
            }
            report(path, result);
        } else if file_name.ends_with("_tb.v") {
            benches.push((path.clone(), text));
        } else if file_name.ends_with(".v") {
            let d = VerilogDesign::parse(&text)?;
            let modules: Vec<String> = d.module_names().into_iter().map(String::from).collect();
            let core = modules
                .iter()
                .find(|m| m.ends_with("_core"))
                .or(modules.first())
                .cloned()
                .ok_or_else(|| Failure::Usage(format!("{} has no module", path.display())))?;
            let eval = |module: &str, x: u32| -> Result<u64, Failure> {
                Ok(d.eval(module, &[("x", x as u64)])?.get("y").copied().unwrap_or(0))
            };
            let mut result = first_mismatch(care(), |c| eval(&core, c), entry)?;
            let top = core.strip_suffix("_core").filter(|s| modules.iter().any(|m| m == s));
            if let (None, Some(top)) = (&result, top) {
                let w = WrapperSpec::from_table(&t)?;
                let mask = (1u64 << w.out_width) - 1;
                result = first_mismatch(
                    0..w.port_codes(),
                    |c| eval(top, c),
                    |c| t.reference_code(w.port_value(c)) as u64 & mask,
                )?
                .map(|s| format!("wrapper port: {s}"));
            }
            report(path, result);
            designs.push((path.clone(), text));
        } else {
            return Err(Failure::Usage(format!("{}: expected a .pla, .v or _tb.v file", path.display())));
        }
    }
    for (path, tb) in &benches {
        let (_, design) = designs
            .first()
            .ok_or_else(|| Failure::Usage(format!("{} needs a design .v file next to it", path.display())))?;
        let r = check_design(design, tb)?;
        let result = r.mismatches.first().map(|(v, got)| {
            format!("vector x={} expected {} got {got} ({} of {} vectors fail)", v.x, v.y, r.mismatches.len(), r.vectors)
        });
        report(path, result);
    }
    if failures.is_empty() {
        Ok(())
    } else {
        Err(Failure::Verification(format!("{} file(s) failed: {}", failures.len(), failures.join(", "))))
    }
}

fn emit(out: Option<&Path>, bytes: &[u8]) -> Outcome {
    match out {
        Some(p) => write_file(p, bytes),
        None => {
            let _ = io::stdout().write_all(bytes);
            Ok(())
        }
    }
}

pub fn error(run: &Run, args: &ErrorArgs) -> Outcome {
    let t = table(&args.table)?;
    let opts = args.minimize.options();
    let mut methods = parse_methods(&args.methods)?;
    let interval = args.interval.unwrap_or_else(|| default_interval(&t));
    if args.sweep_conventions {
        let target = args.target.unwrap_or(0.0);
        let entries = convention_sweep(t.activation(), t.in_fmt(), t.out_fmt(), t.lambda_mode(), target, args.n_samples, &opts)?;
        emit(args.out.as_deref(), &run.csv(|b| write_sweep_csv(b, &entries, target))?)?;
    } else {
        let ctx = MethodContext::new(&t, &opts)?;
        if args.methods.split(',').any(|m| m.trim().eq_ignore_ascii_case("all")) {
            methods.retain(|&m| match ctx.evaluator(m) {
                Err(Error::NotApplicable(..)) => {
                    eprintln!("note: skipping {m}, not applicable to {}", t.activation().name());
                    false
                }
                _ => true,
            });
        }
        let reports = compare_methods(&ctx, &methods, interval, args.n_samples)?;
        emit(args.out.as_deref(), &run.csv(|b| write_report_csv(b, &reports))?)?;
        if let Some(p) = &args.curve {
            let curves = error_curves(&ctx, &methods, interval, args.points)?;
            write_file(p, &run.csv(|b| curves.write_csv(b))?)?;
        }
    }
    if let Some(p) = &args.figure {
        let curves = exp_curves(Interval::new(-1.0, 1.0), args.rows, args.taylor_order, args.points)?;
        write_file(p, &run.csv(|b| curves.write_csv(b))?)?;
    }
    Ok(())
}

fn read_dataset(path: &Path, classes: Option<usize>) -> Result<Dataset, Failure> {
    let text = read_file(path)?;
    Ok(Dataset::read_csv(text.as_bytes(), classes)?)
}

pub fn make_data(run: &Run, args: &MakeDataArgs) -> Outcome {
    let cfg = SyntheticConfig {
        classes: args.classes,
        dim: args.dim,
        n: args.n,
        blobs_per_class: args.blobs_per_class,
        radius: args.radius,
        spread: args.spread,
        test_fraction: args.test_fraction,
    };
    let d = nn::generate_synthetic(run.seed, &cfg)?;
    for (split, file) in [(Split::Train, "train.csv"), (Split::Test, "test.csv")] {
        let part = d.subset(split);
        write_file(&args.out_dir.join(file), &run.csv(|b| part.write_csv(b))?)?;
        say!("{file}: {} rows", part.len());
    }
    Ok(())
}

fn load_model(path: &Path) -> Result<MlpModel, Failure> {
    let text = read_file(path)?;
    Ok(MlpModel::read_checkpoint(text.as_bytes())?)
}

pub fn train(run: &Run, args: &TrainArgs) -> Outcome {
    let train_set = read_dataset(&args.train, None)?;
    let data = match &args.test {
        Some(p) => {
            let test = read_dataset(p, Some(train_set.classes()))?;
            Dataset::join(&train_set, &test)?
        }
        None => train_set,
    };
    let cfg = TrainConfig {
        hidden: args.hidden,
        epochs: args.epochs,
        learning_rate: args.lr,
        batch_size: args.batch_size,
        seed: run.seed,
    };
    let out = nn::train(&data, args.activation.clone(), &cfg)?;
    let mut ckpt = Vec::new();
    out.model.write_checkpoint(&mut ckpt)?;
    ckpt.push(b'\n');
    write_file(&args.out_dir.join("model.json"), &ckpt)?;
    let log = run.csv(|b| {
        let mut w = csv::Writer::from_writer(b);
        w.write_record(["epoch", "loss"])?;
        for (e, l) in out.losses.iter().enumerate() {
            w.write_record([(e + 1).to_string(), l.to_string()])?;
        }
        w.flush()?;
        Ok(())
    })?;
    write_file(&args.out_dir.join("train_log.csv"), &log)?;
    say!("train accuracy {:.2}%", out.train_accuracy);
    say!("test accuracy {:.2}%", out.test_accuracy);
    Ok(())
}

pub fn eval(run: &Run, args: &EvalArgs) -> Outcome {
    let _ = run;
    let model = load_model(&args.model)?;
    let data = read_dataset(&args.data, Some(model.dims()[2]))?;
    match &args.variant {
        None => say!("float accuracy {:.2}%", model.accuracy(&data)?),
        Some(v) => {
            let (f, in_fmt, out_fmt) = parse_variant(v)?;
            let t = build_table(&f, in_fmt, out_fmt, args.convention)?;
            let q = nn::infer_quantized(&model, &data, &t)?;
            let base = model.accuracy(&data)?;
            say!("{} accuracy {q:.2}% (float {base:.2}%, delta {:+.2} points)", t.variant_name(), q - base);
        }
    }
    Ok(())
}

pub fn sweep(run: &Run, args: &SweepArgs) -> Outcome {
    let model = load_model(&args.model)?;
    let data = read_dataset(&args.data, Some(model.dims()[2]))?;
    let variants: Vec<&str> = args.variants.split(',').map(str::trim).filter(|v| !v.is_empty()).collect();
    let rows = nn::sweep_report(&model, &data, &variants, args.convention)?;
    let bytes = run.csv(|b| nn::write_sweep_csv(b, &rows))?;
    write_file(&args.out_dir.join("sweep.csv"), &bytes)?;
    for r in &rows {
        say!("{:<12} {:>7.2}% {:+.2}", r.variant, r.accuracy_percent, r.delta_points);
    }
    Ok(())
}
