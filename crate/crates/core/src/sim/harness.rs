//! The serial-input shift register that feeds the adder on chip.
//!
//! A `2n`-stage register is tapped from stage 0 upward as `A0..A(n-1)`, then
//! continues as `B(n-1)` down to `B0`. Stage 0 holds the newest bit. The
//! serial program repeats, so every cycle presents a cyclic rotation of it.

use serde::{Deserialize, Serialize};

use crate::error::{param, Result};

use super::logic::Vector;

/// A serial bit program, optionally described as a chopped pattern.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputProgram {
    pub serial_bits: Vec<bool>,
    /// `(active_len, zero_len)` when the program alternates data and zeros.
    pub chop: Option<(usize, usize)>,
}

/// Active data followed by zeros, repeated: the modulation pattern used for
/// power measurement. `active` supplies at least `active_len` bits.
pub fn chopped_program(
    active: impl IntoIterator<Item = bool>,
    active_len: usize,
    zero_len: usize,
) -> Result<InputProgram> {
    if active_len == 0 || zero_len == 0 {
        return Err(param("chop lengths must be positive"));
    }
    let mut bits: Vec<bool> = active.into_iter().take(active_len).collect();
    if bits.len() < active_len {
        return Err(param("not enough active bits for the chop length"));
    }
    bits.resize(active_len + zero_len, false);
    Ok(InputProgram { serial_bits: bits, chop: Some((active_len, zero_len)) })
}

/// Addend pairs seen by a `width`-bit adder over `cycles` clock cycles.
///
/// At cycle `t` stage `k` holds `serial[(t - k) mod len]`;
/// `A_i = stage i` and `B_i = stage (2·width - 1 - i)`.
pub fn shift_register_harness(serial: &[bool], width: u32, cycles: usize) -> Result<Vec<Vector>> {
    let stages = 2 * width as usize;
    if width == 0 || width > 64 {
        return Err(param(format!("harness width must be in 1..=64, got {width}")));
    }
    if serial.len() < stages {
        return Err(param(format!(
            "serial program has {} bits, the {stages}-stage register needs at least {stages}",
            serial.len()
        )));
    }
    let len = serial.len();
    let stage = |t: usize, k: usize| serial[(t + len * stages - k) % len];
    Ok((0..cycles)
        .map(|t| {
            let mut a = 0u64;
            let mut b = 0u64;
            for i in 0..width as usize {
                a |= u64::from(stage(t, i)) << i;
                b |= u64::from(stage(t, stages - 1 - i)) << i;
            }
            (a, b)
        })
        .collect())
}
