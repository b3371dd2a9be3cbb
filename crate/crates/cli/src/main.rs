mod commands;
mod config;

use std::ffi::OsString;
use std::path::PathBuf;
use std::process::ExitCode;

use afc_core::fixed_point::FixedPointFormat;
use afc_core::funcref::{ActivationKind, ActivationSpec, Interval};
use afc_core::minimizer::{DcPolicy, MinimizeOptions, DEFAULT_NODE_BUDGET};
use afc_core::tabulator::{LambdaMode, SamplingConvention};
use clap::{Args, CommandFactory, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "afc", version, about = "Compile activation functions into two-level combinational logic")]
struct Cli {
    /// `key = value` file setting any long flag; command-line flags win.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Seed for every random choice; recorded in output headers.
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Tabulate, minimize and write PLA, Verilog, testbench, table and cost files.
    Gen(GenArgs),
    /// Check PLA, Verilog and testbench files against a regenerated table.
    Check(CheckArgs),
    /// Average error of the circuit and the baselines.
    Error(ErrorArgs),
    /// Train a small network and measure quantized-activation accuracy.
    #[command(subcommand)]
    Nn(NnCommand),
}

#[derive(Clone, Copy, Debug, Default, ValueEnum)]
enum LambdaArg {
    #[default]
    Folded,
    Unfolded,
}

#[derive(Clone, Copy, Debug, Default, ValueEnum)]
enum DcArg {
    #[default]
    None,
    Unreachable,
}

#[derive(Args, Debug)]
struct TableArgs {
    /// tanh, sigmoid, elu, selu or exp.
    function: ActivationSpec,

    /// Input magnitude format; U1.3 by default, U2.3 for elu and selu.
    #[arg(long, value_name = "Ui.f")]
    in_fmt: Option<FixedPointFormat>,

    /// Output magnitude format; U1.6 by default, U1.7 for elu and selu.
    #[arg(long, value_name = "Ui.f")]
    out_fmt: Option<FixedPointFormat>,

    /// <left_edge|midpoint|nearest_grid>/<floor|round>.
    #[arg(long, default_value = "left_edge/round")]
    convention: SamplingConvention,

    #[arg(long, value_enum, default_value_t)]
    lambda_mode: LambdaArg,

    /// ELU/SELU alpha.
    #[arg(long)]
    alpha: Option<f64>,

    /// SELU lambda.
    #[arg(long)]
    lambda: Option<f64>,
}

#[derive(Args, Debug)]
struct MinimizeArgs {
    /// Add consensus terms so no single-bit input change glitches an output.
    #[arg(long)]
    hazard_free: bool,

    /// Treat input codes the wrapper never selects as don't-cares.
    #[arg(long, value_enum, default_value_t)]
    dc_policy: DcArg,

    /// Widest input solved exactly; wider tables use the greedy cover.
    #[arg(long, default_value_t = MinimizeOptions::default().exact_limit)]
    exact_limit: u32,

    /// Branch-and-bound node budget per output.
    #[arg(long, default_value_t = DEFAULT_NODE_BUDGET)]
    node_budget: u64,
}

#[derive(Args, Debug)]
struct GenArgs {
    #[command(flatten)]
    table: TableArgs,
    #[command(flatten)]
    minimize: MinimizeArgs,

    /// Module and file base name; defaults to <function>_<out bits>_<in bits>.
    #[arg(long)]
    name: Option<String>,

    #[arg(long, env = "AFC_OUT_DIR", default_value = ".")]
    out_dir: PathBuf,
}

#[derive(Args, Debug)]
struct CheckArgs {
    #[command(flatten)]
    table: TableArgs,
    #[command(flatten)]
    minimize: MinimizeArgs,

    /// .pla, .v and _tb.v files.
    #[arg(required = true)]
    files: Vec<PathBuf>,
}

#[derive(Args, Debug)]
struct ErrorArgs {
    #[command(flatten)]
    table: TableArgs,
    #[command(flatten)]
    minimize: MinimizeArgs,

    /// Comma-separated: exact, combinational, rom_y, rom_kb, taylor<N>,
    /// pow2_approx, pow2_approx_1.44, taylor5_lut, or all.
    #[arg(long, default_value = "all")]
    methods: String,

    #[arg(long, default_value_t = afc_core::analyzer::DEFAULT_SAMPLES)]
    n_samples: usize,

    /// `lo,hi`; defaults to the interval the table covers.
    #[arg(long, value_parser = parse_interval, allow_hyphen_values = true)]
    interval: Option<Interval>,

    /// Report the combinational design under all six conventions instead.
    #[arg(long)]
    sweep_conventions: bool,

    /// Target AE in percent; the sweep is sorted by distance from it.
    #[arg(long)]
    target: Option<f64>,

    /// Write per-sample method values to this CSV.
    #[arg(long, value_name = "FILE")]
    curve: Option<PathBuf>,

    /// Write the e^x comparison curves over [-1, 1] to this CSV.
    #[arg(long, value_name = "FILE")]
    figure: Option<PathBuf>,

    /// Sample points of the curve files.
    #[arg(long, default_value_t = 1001)]
    points: usize,

    /// Rows of the e^x lookup tables.
    #[arg(long, default_value_t = 16)]
    rows: usize,

    #[arg(long, default_value_t = afc_core::analyzer::DEFAULT_TAYLOR_ORDER)]
    taylor_order: u32,

    /// Write the report here instead of stdout.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum NnCommand {
    /// Write train.csv and test.csv of Gaussian blobs.
    MakeData(MakeDataArgs),
    /// Train with the exact activation; writes model.json and train_log.csv.
    Train(TrainArgs),
    /// Accuracy of a model, optionally with a quantized activation.
    Eval(EvalArgs),
    /// Accuracy change per activation variant.
    Sweep(SweepArgs),
}

#[derive(Args, Debug)]
struct MakeDataArgs {
    #[arg(long, default_value_t = 3)]
    classes: usize,
    #[arg(long, default_value_t = 2)]
    dim: usize,
    #[arg(long, default_value_t = 3000)]
    n: usize,
    #[arg(long, default_value_t = 2)]
    blobs_per_class: usize,
    #[arg(long, default_value_t = 2.0)]
    radius: f64,
    #[arg(long, default_value_t = 0.4)]
    spread: f64,
    #[arg(long, default_value_t = 0.25)]
    test_fraction: f64,
    #[arg(long, env = "AFC_OUT_DIR", default_value = ".")]
    out_dir: PathBuf,
}

#[derive(Args, Debug)]
struct TrainArgs {
    #[arg(long, value_name = "FILE")]
    train: PathBuf,
    #[arg(long, value_name = "FILE")]
    test: Option<PathBuf>,
    #[arg(long, default_value = "tanh")]
    activation: ActivationSpec,
    #[arg(long, default_value_t = 16)]
    hidden: usize,
    #[arg(long, default_value_t = 60)]
    epochs: usize,
    #[arg(long, default_value_t = 0.1)]
    lr: f64,
    #[arg(long, default_value_t = 32)]
    batch_size: usize,
    #[arg(long, env = "AFC_OUT_DIR", default_value = ".")]
    out_dir: PathBuf,
}

#[derive(Args, Debug)]
struct EvalArgs {
    #[arg(long, value_name = "FILE")]
    model: PathBuf,
    #[arg(long, value_name = "FILE")]
    data: PathBuf,
    /// Quantized activation such as tanh_7_6 (output bits, input bits).
    #[arg(long)]
    variant: Option<String>,
    #[arg(long, default_value = "left_edge/round")]
    convention: SamplingConvention,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[arg(long, value_name = "FILE")]
    model: PathBuf,
    #[arg(long, value_name = "FILE")]
    data: PathBuf,
    #[arg(long, default_value = "tanh_5_4,tanh_7_4,tanh_7_6")]
    variants: String,
    #[arg(long, default_value = "left_edge/round")]
    convention: SamplingConvention,
    #[arg(long, env = "AFC_OUT_DIR", default_value = ".")]
    out_dir: PathBuf,
}

fn parse_interval(s: &str) -> Result<Interval, String> {
    let (lo, hi) = s.split_once(',').ok_or("expected lo,hi")?;
    let lo: f64 = lo.trim().parse().map_err(|_| format!("bad bound `{lo}`"))?;
    let hi: f64 = hi.trim().parse().map_err(|_| format!("bad bound `{hi}`"))?;
    if !(lo < hi) {
        return Err(format!("empty interval {lo},{hi}"));
    }
    Ok(Interval::new(lo, hi))
}

impl TableArgs {
    fn spec(&self) -> afc_core::Result<ActivationSpec> {
        let mut f = self.function.clone();
        if let Some(a) = self.alpha {
            f = f.with_alpha(a)?;
        }
        if let Some(l) = self.lambda {
            f = f.with_lambda(l)?;
        }
        Ok(f)
    }

    fn formats(&self) -> (FixedPointFormat, FixedPointFormat) {
        let exp_branch = matches!(self.function.kind(), ActivationKind::Elu | ActivationKind::Selu);
        let fmt = |i, f| FixedPointFormat::new(i, f).expect("valid default format");
        let in_default = if exp_branch { fmt(2, 3) } else { fmt(1, 3) };
        let out_default = if exp_branch { fmt(1, 7) } else { fmt(1, 6) };
        (self.in_fmt.unwrap_or(in_default), self.out_fmt.unwrap_or(out_default))
    }

    fn lambda_mode(&self) -> LambdaMode {
        match self.lambda_mode {
            LambdaArg::Folded => LambdaMode::Folded,
            LambdaArg::Unfolded => LambdaMode::Unfolded,
        }
    }
}

impl MinimizeArgs {
    fn options(&self) -> MinimizeOptions {
        MinimizeOptions {
            dc_policy: match self.dc_policy {
                DcArg::None => DcPolicy::None,
                DcArg::Unreachable => DcPolicy::Unreachable,
            },
            hazard_free: self.hazard_free,
            exact_limit: self.exact_limit,
            node_budget: self.node_budget,
        }
    }
}

fn subcommand_path(cmd: &Command) -> Vec<&'static str> {
    match cmd {
        Command::Gen(_) => vec!["gen"],
        Command::Check(_) => vec!["check"],
        Command::Error(_) => vec!["error"],
        Command::Nn(n) => vec![
            "nn",
            match n {
                NnCommand::MakeData(_) => "make-data",
                NnCommand::Train(_) => "train",
                NnCommand::Eval(_) => "eval",
                NnCommand::Sweep(_) => "sweep",
            },
        ],
    }
}

fn parse_or_exit(raw: &[OsString]) -> Result<Cli, ExitCode> {
    let root = Cli::command().args_override_self(true);
    match root.try_get_matches_from(raw) {
        Ok(m) => Ok(<Cli as clap::FromArgMatches>::from_arg_matches(&m).map_err(|e| {
            let _ = e.print();
            ExitCode::from(commands::EXIT_USAGE)
        })?),
        Err(e) => {
            let _ = e.print();
            Err(ExitCode::from(if e.use_stderr() { commands::EXIT_USAGE } else { 0 }))
        }
    }
}

fn main() -> ExitCode {
    let raw: Vec<OsString> = std::env::args_os().collect();
    let mut cli = match parse_or_exit(&raw) {
        Ok(c) => c,
        Err(code) => return code,
    };
    if let Some(file) = cli.config.clone() {
        let path = subcommand_path(&cli.command);
        let spliced = match config::splice(&Cli::command(), &raw, &path, &file) {
            Ok(s) => s,
            Err(msg) => {
                eprintln!("error: {msg}");
                return ExitCode::from(commands::EXIT_USAGE);
            }
        };
        cli = match parse_or_exit(&spliced) {
            Ok(c) => c,
            Err(code) => return code,
        };
    }
    let run = commands::Run::new(&raw, cli.seed);
    let outcome = match &cli.command {
        Command::Gen(a) => commands::gen(&run, a),
        Command::Check(a) => commands::check(&run, a),
        Command::Error(a) => commands::error(&run, a),
        Command::Nn(NnCommand::MakeData(a)) => commands::make_data(&run, a),
        Command::Nn(NnCommand::Train(a)) => commands::train(&run, a),
        Command::Nn(NnCommand::Eval(a)) => commands::eval(&run, a),
        Command::Nn(NnCommand::Sweep(a)) => commands::sweep(&run, a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {f}");
            ExitCode::from(f.code())
        }
    }
}
