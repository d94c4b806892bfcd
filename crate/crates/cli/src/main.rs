//! `rqlkit`: generate, simulate and analyze RQL Kogge-Stone adders.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use output::Failure;

#[derive(Parser, Debug)]
#[command(name = "rqlkit", version, about = "RQL Kogge-Stone adder generator, simulator and power analysis")]
struct Cli {
    /// Gate parameter table (TOML).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Directory for output files.
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,
    /// Seed for random input vectors.
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    /// Format of the report printed to stdout.
    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Table,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a phased adder netlist.
    Gen(GenArgs),
    /// Check a netlist for structural problems.
    Validate(ValidateArgs),
    /// Simulate a netlist on input vectors.
    Sim(SimArgs),
    /// Sweep clock-power margins over frequency.
    Margins(MarginsArgs),
    /// Dynamic power, activity power or large-circuit clock budget.
    Power(PowerArgs),
    /// Dissipated power from measured clock sidebands.
    Sidebands(SidebandArgs),
    /// Design and evaluate the clock-feed impedance transformer.
    Clocknet(ClocknetArgs),
}

/// Where a command gets its netlist from: a file, or generated in place.
#[derive(Args, Debug, Clone)]
pub struct NetlistArgs {
    /// Read the netlist from this file instead of generating one.
    #[arg(long)]
    pub netlist: Option<PathBuf>,
    #[arg(long, default_value_t = 8)]
    pub width: u32,
    /// Fabricated-chip preset: no carry out, one idle phase, 1000 µm striplines.
    #[arg(long)]
    pub chip: bool,
    /// Idle phases inserted before a logic stage.
    #[arg(long)]
    pub idle: Option<u32>,
    /// Logic stage the idle phases precede (default: last CLA column).
    #[arg(long)]
    pub idle_before: Option<u32>,
    /// Stripline length for long interconnects, µm.
    #[arg(long)]
    pub ptl_length: Option<f64>,
    /// Omit the carry-out output.
    #[arg(long)]
    pub no_cout: bool,
    #[arg(long, default_value_t = 4)]
    pub max_fanout: usize,
    /// Wrap the core with input shift register and output amplifiers.
    #[arg(long)]
    pub chip_model: bool,
}

#[derive(Args, Debug)]
pub struct GenArgs {
    #[command(flatten)]
    pub netlist: NetlistArgs,
    /// Clock frequency for the latency report.
    #[arg(long, default_value = "10GHz")]
    pub clock: String,
    /// Netlist file name inside the output directory.
    #[arg(long, default_value = "netlist.rqln")]
    pub output: String,
}

#[derive(Args, Debug)]
pub struct ValidateArgs {
    pub netlist: PathBuf,
    #[arg(long, default_value_t = 4)]
    pub max_fanout: usize,
}

/// Input vector source. Exactly one may be given; the default is `--exhaustive`
/// for widths up to 8 and 4096 random vectors above.
#[derive(Args, Debug, Clone, Default)]
pub struct VectorArgs {
    /// Vector file, one `A,B` hex pair per line.
    #[arg(long)]
    pub vectors: Option<PathBuf>,
    /// Serial program for the input shift register: a bit string, `zeros<N>`,
    /// `ones<N>`, or a file.
    #[arg(long)]
    pub serial: Option<String>,
    /// Serial program from the 16-bit LFSR with this seed.
    #[arg(long)]
    pub prbs: Option<String>,
    /// Length of the LFSR program (default: shift register length).
    #[arg(long)]
    pub prbs_len: Option<usize>,
    /// Chop the LFSR program as ACTIVE:ZERO bits.
    #[arg(long)]
    pub chop: Option<String>,
    /// All input pairs.
    #[arg(long)]
    pub exhaustive: bool,
    /// This many random vectors from `--seed`.
    #[arg(long)]
    pub random: Option<usize>,
    /// Cycles to run the serial harness (default: program length).
    #[arg(long)]
    pub cycles: Option<usize>,
}

#[derive(Args, Debug)]
pub struct SimArgs {
    #[command(flatten)]
    pub netlist: NetlistArgs,
    #[command(flatten)]
    pub vectors: VectorArgs,
    /// Compare outputs with integer addition; exit 1 on mismatch.
    #[arg(long)]
    pub check: bool,
    /// Add arrival times and timing violations.
    #[arg(long)]
    pub timed: bool,
    #[arg(long, default_value = "10GHz")]
    pub clock: String,
    /// Clock amplitude relative to nominal.
    #[arg(long, default_value_t = 1.0)]
    pub bias: f64,
}

#[derive(Args, Debug)]
pub struct MarginsArgs {
    #[command(flatten)]
    pub netlist: NetlistArgs,
    #[arg(long, default_value = "4GHz")]
    pub fmin: String,
    #[arg(long, default_value = "16GHz")]
    pub fmax: String,
    #[arg(long, default_value_t = 13)]
    pub steps: usize,
    /// Over-bias ceiling as relative clock amplitude.
    #[arg(long)]
    pub ceiling: Option<f64>,
    /// Receiver acceptance window beyond a quarter period, fraction of T.
    #[arg(long)]
    pub receiver_window: Option<f64>,
    /// Check that the upper limit is constant and the width non-increasing.
    #[arg(long)]
    pub check: bool,
}

#[derive(Args, Debug)]
pub struct PowerArgs {
    /// Junction count; selects the closed-form calculation.
    #[arg(long)]
    pub n: Option<f64>,
    /// Average critical current, A.
    #[arg(long)]
    pub ic: Option<f64>,
    /// Clock frequency.
    #[arg(long)]
    pub f: Option<String>,
    /// Clock budget of a large circuit (ScalingScenario).
    #[arg(long)]
    pub budget: bool,
    /// Scenario file for `--budget`.
    #[arg(long)]
    pub scenario: Option<PathBuf>,
    /// Tolerated clock variation for `--budget`, ±fraction.
    #[arg(long)]
    pub margin: Option<f64>,
    /// Weight power by simulated switching activity.
    #[arg(long)]
    pub activity: bool,
    #[command(flatten)]
    pub netlist: NetlistArgs,
    #[command(flatten)]
    pub vectors: VectorArgs,
}

#[derive(Args, Debug)]
pub struct SidebandArgs {
    /// Measurement descriptor (TOML).
    #[arg(long)]
    pub descriptor: Option<PathBuf>,
    /// Sideband ratio on clock Q, dB.
    #[arg(long, allow_negative_numbers = true)]
    pub q: Option<f64>,
    /// Sideband ratio on clock I, dB.
    #[arg(long, allow_negative_numbers = true)]
    pub i: Option<f64>,
    /// Carrier power on clock Q at the chip, dBm.
    #[arg(long, allow_negative_numbers = true)]
    p0q: Option<f64>,
    /// Carrier power on clock I at the chip, dBm.
    #[arg(long, allow_negative_numbers = true)]
    p0i: Option<f64>,
    /// Share of sideband power attributed to amplitude modulation.
    #[arg(long, default_value_t = 0.5)]
    pub fraction: f64,
    /// Critical-current share of the adder core.
    #[arg(long)]
    pub cla_frac: Option<f64>,
    #[arg(long)]
    pub f_carrier: Option<String>,
    #[arg(long)]
    pub active: Option<u64>,
    #[arg(long)]
    pub zero: Option<u64>,
    /// Spectrum CSV (frequency Hz, power dBm) to read one line's SSB from.
    #[arg(long)]
    pub spectrum: Option<PathBuf>,
    /// Clock line the spectrum belongs to.
    #[arg(long, default_value = "Q")]
    pub spectrum_line: String,
}

#[derive(Args, Debug)]
pub struct ClocknetArgs {
    #[arg(long, default_value_t = 6)]
    pub sections: usize,
    #[arg(long, default_value_t = 50.0)]
    pub zs: f64,
    #[arg(long, default_value_t = 4.0)]
    pub zl: f64,
    #[arg(long, default_value = "7.5GHz")]
    f0: String,
    /// Return loss target, dB.
    #[arg(long, default_value_t = 30.0)]
    pub rl: f64,
    /// Band that must meet the target, LO:HI.
    #[arg(long, default_value = "5:10GHz")]
    pub band: String,
    /// Frequency sweep, LO:HI.
    #[arg(long, default_value = "1:20GHz")]
    pub sweep: String,
    #[arg(long, default_value_t = 191)]
    pub points: usize,
    #[arg(long)]
    pub binomial: bool,
    /// Use plain small-reflection synthesis without exact refinement.
    #[arg(long)]
    pub small_reflection: bool,
    /// Exit 1 unless the band meets the target in the exact sweep.
    #[arg(long)]
    pub check: bool,
}

pub struct Global {
    pub config: Option<PathBuf>,
    pub out: PathBuf,
    pub seed: u64,
    pub format: Format,
    pub argv: Vec<String>,
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let g = Global {
        config: cli.config,
        out: cli.out,
        seed: cli.seed,
        format: cli.format,
        argv: argv.into_iter().skip(1).collect(),
    };
    let result = match cli.command {
        Command::Gen(a) => commands::gen(&g, a),
        Command::Validate(a) => commands::validate(&g, a),
        Command::Sim(a) => commands::sim(&g, a),
        Command::Margins(a) => commands::margins(&g, a),
        Command::Power(a) => commands::power(&g, a),
        Command::Sidebands(a) => commands::sidebands(&g, a),
        Command::Clocknet(a) => commands::clocknet(&g, a),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(f) => {
            eprintln!("rqlkit: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

impl From<rqlkit::Error> for Failure {
    fn from(e: rqlkit::Error) -> Self {
        use rqlkit::Error::*;
        let code = match e {
            Io(_) | Parse { .. } => 3,
            Structural(_) => 1,
            _ => 2,
        };
        Failure { code, message: e.to_string() }
    }
}
