//! Wave-pipelined simulation of phased netlists.
//!
//! Every logic stage sits on its own clock phase, so evaluating the netlist
//! in topological order per input vector is exact; pipelining only shifts
//! when results appear. The logical simulator evaluates 64 vectors at a time,
//! one per bit lane.

mod harness;
pub mod io;
mod lfsr;
mod logic;
mod margins;
pub mod timed;

pub use harness::{chopped_program, shift_register_harness, InputProgram};
pub use lfsr::{Lfsr16, DEFAULT_LFSR_SEED};
pub use logic::{
    check_addition, evaluate_combinational, exhaustive_vectors, expected_output, fanin_cone, random_vectors,
    simulate_logic, simulate_logic_detailed, switching_activity, Activity, AdditionCheck, SimTrace, TraceDetail,
    Vector,
};
pub use margins::{
    amplitude_db, calibrate_ceiling, default_bias_grid, frequency_grid, margin_sweep, min_operating_bias, MarginConfig,
    MarginCurve, MarginPoint, DEFAULT_OVER_BIAS_CEILING,
};
pub use timed::{analyze_timing, simulate_timed, TimedTrace, TimingAnalysis, TimingViolation};
