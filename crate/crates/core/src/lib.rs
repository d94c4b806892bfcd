//! Gate-level modeling of Reciprocal Quantum Logic carry look-ahead adders.
//!
//! - [`gate`]: cell kinds, logical semantics, device budgets, delay model.
//! - [`netlist`]: Kogge-Stone generator, phase assignment, fanout legalization.
//! - [`sim`]: wave-pipelined logical and timed simulation, input harness, margins.
//! - [`power`]: dynamic power, activity-weighted power, clock budgets.
//! - [`rf`]: sideband power measurement math and clock-feed matching networks.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod gate;
pub mod netlist;
pub mod power;
pub mod rf;
pub mod sim;
pub mod units;

pub use error::{Error, Result};
