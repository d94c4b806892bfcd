//! Multisection quarter-wave impedance transformers.
//!
//! Section impedances come from small-reflection theory in log form: the
//! reflection at step `n` is `Γ_n = ½ ln(Z_{n+1}/Z_n)`, and the total
//! response `Γ(θ) = e^{-jNθ} Σ Γ_n e^{-j(N-2n)θ}` is shaped as a Chebyshev
//! polynomial (equal ripple) or `cos^N θ` (binomial). Verification uses the
//! exact chain-matrix cascade.

use std::f64::consts::PI;
use std::fmt::Write as _;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{param, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Synthesis {
    Chebyshev,
    Binomial,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransformerSpec {
    pub z_source: f64,
    pub z_load: f64,
    pub n_sections: usize,
    pub f_center: f64,
    /// Design return loss over the passband, dB.
    pub return_loss_db: f64,
    /// Band that must meet `return_loss_db`, Hz.
    pub band: Option<(f64, f64)>,
    pub synthesis: Synthesis,
}

impl Default for TransformerSpec {
    fn default() -> Self {
        TransformerSpec {
            z_source: 50.0,
            z_load: 4.0,
            n_sections: 6,
            f_center: 7.5e9,
            return_loss_db: 30.0,
            band: None,
            synthesis: Synthesis::Chebyshev,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransformerDesign {
    pub z_source: f64,
    pub z_load: f64,
    pub n_sections: usize,
    pub f_center: f64,
    pub synthesis: Synthesis,
    /// Section impedances from the source side, Ω.
    pub section_impedances: Vec<f64>,
    /// Passband reflection bound from small-reflection theory.
    pub ripple: f64,
    /// Passband edges where `|Γ| <= ripple`, Hz.
    pub band_edges: (f64, f64),
    pub fractional_bandwidth: f64,
}

fn chebyshev(n: usize, x: f64) -> f64 {
    if x.abs() <= 1.0 {
        (n as f64 * x.acos()).cos()
    } else {
        x.signum().powi(n as i32) * (n as f64 * x.abs().acosh()).cosh()
    }
}

/// Cosine-series coefficients `a_k` of `f(θ) = Σ a_k cos kθ`, `k = 0..=n`,
/// for a trigonometric polynomial of degree `n`.
fn cosine_coefficients(n: usize, f: impl Fn(f64) -> f64) -> Vec<f64> {
    let m = 4 * (n + 1);
    let samples: Vec<f64> = (0..m).map(|i| f(2.0 * PI * i as f64 / m as f64)).collect();
    (0..=n)
        .map(|k| {
            let s: f64 =
                samples.iter().enumerate().map(|(i, v)| v * (2.0 * PI * (k * i) as f64 / m as f64).cos()).sum();
            if k == 0 {
                s / m as f64
            } else {
                2.0 * s / m as f64
            }
        })
        .collect()
}

pub fn design_transformer(spec: &TransformerSpec) -> Result<TransformerDesign> {
    let TransformerSpec { z_source: z0, z_load: zl, n_sections: n, f_center, .. } = *spec;
    if !(z0 > 0.0 && zl > 0.0) || (z0 - zl).abs() < 1e-12 * z0 {
        return Err(param("source and load impedances must be positive and different"));
    }
    if n == 0 {
        return Err(param("at least one section is required"));
    }
    if !(f_center > 0.0) || !(spec.return_loss_db > 0.0) {
        return Err(param("centre frequency and return loss must be positive"));
    }
    let gamma0 = 0.5 * (zl / z0).ln();
    let target = 10f64.powf(-spec.return_loss_db / 20.0);
    let theta_of = |f: f64| 0.5 * PI * f / f_center;

    // theta_m: lower passband edge in electrical length, for a ripple bound
    let (theta_m, shape): (f64, Box<dyn Fn(f64) -> f64>) = match spec.synthesis {
        Synthesis::Chebyshev => {
            let ratio = gamma0.abs() / target;
            if ratio <= 1.0 {
                return Err(Error::Design {
                    message: "target ripple exceeds the unmatched reflection".into(),
                    achievable_db: -20.0 * gamma0.abs().log10(),
                });
            }
            let sec = (ratio.acosh() / n as f64).cosh();
            let tn = chebyshev(n, sec);
            ((1.0 / sec).acos(), Box::new(move |th: f64| gamma0 * chebyshev(n, sec * th.cos()) / tn))
        }
        Synthesis::Binomial => {
            let c = (target / gamma0.abs()).powf(1.0 / n as f64);
            if c >= 1.0 {
                return Err(Error::Design {
                    message: "target ripple exceeds the unmatched reflection".into(),
                    achievable_db: -20.0 * gamma0.abs().log10(),
                });
            }
            (c.acos(), Box::new(move |th: f64| gamma0 * th.cos().powi(n as i32)))
        }
    };

    if let Some((f_lo, f_hi)) = spec.band {
        if !(0.0 < f_lo && f_lo < f_hi) {
            return Err(param("band must satisfy 0 < f_lo < f_hi"));
        }
        let needed = theta_of(f_lo).min(PI - theta_of(f_hi));
        if needed < theta_m - 1e-12 {
            let achievable = if needed <= 0.0 {
                gamma0.abs()
            } else {
                match spec.synthesis {
                    Synthesis::Chebyshev => gamma0.abs() / chebyshev(n, 1.0 / needed.cos()),
                    Synthesis::Binomial => gamma0.abs() * needed.cos().powi(n as i32),
                }
            };
            return Err(Error::Design {
                message: format!(
                    "{n} sections cannot hold {} dB return loss over {f_lo}..{f_hi} Hz",
                    spec.return_loss_db
                ),
                achievable_db: -20.0 * achievable.log10(),
            });
        }
    }

    // Γ(θ) e^{jNθ} = Σ_n Γ_n e^{-j(N-2n)θ}; with Γ_n = Γ_{N-n} this is
    // 2 Σ_{n<N/2} Γ_n cos((N-2n)θ) (+ Γ_{N/2} for even N).
    let a = cosine_coefficients(n, &shape);
    let reflections: Vec<f64> = (0..=n)
        .map(|i| {
            let k = (n as isize - 2 * i as isize).unsigned_abs();
            if k == 0 {
                a[0]
            } else {
                a[k] / 2.0
            }
        })
        .collect();
    let mut ln_z = z0.ln();
    let mut section_impedances = Vec::with_capacity(n);
    for g in &reflections[..n] {
        ln_z += 2.0 * g;
        section_impedances.push(ln_z.exp());
    }
    let f_lo = 2.0 * theta_m / PI * f_center;
    let f_hi = 2.0 * f_center - f_lo;
    Ok(TransformerDesign {
        z_source: z0,
        z_load: zl,
        n_sections: n,
        f_center,
        synthesis: spec.synthesis,
        section_impedances,
        ripple: target,
        band_edges: (f_lo, f_hi),
        fractional_bandwidth: (f_hi - f_lo) / f_center,
    })
}

/// Designs against the exact cascade instead of small-reflection theory.
///
/// The ripple target is tightened until the exact return loss meets
/// `spec.return_loss_db` over `spec.band`, or over the theoretical passband
/// of the untightened design when no band is given.
pub fn design_transformer_exact(spec: &TransformerSpec) -> Result<TransformerDesign> {
    let first = design_transformer(spec)?;
    let (lo, hi) = spec.band.unwrap_or(first.band_edges);
    let fs: Vec<f64> = (0..=400).map(|i| lo + (hi - lo) * i as f64 / 400.0).collect();
    let mut target = spec.return_loss_db;
    let mut design = first;
    for _ in 0..50 {
        let worst =
            cascade_sparams(&design, &fs)?.iter().map(SParamPoint::return_loss_db).fold(f64::INFINITY, f64::min);
        if worst >= spec.return_loss_db {
            return Ok(design);
        }
        target += spec.return_loss_db - worst + 0.01;
        design = design_transformer(&TransformerSpec { return_loss_db: target, ..spec.clone() })?;
    }
    Err(Error::Design {
        message: "exact cascade did not converge to the requested return loss".into(),
        achievable_db: target,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SParamPoint {
    pub frequency: f64,
    pub s11: Complex64,
    pub s21: Complex64,
}

impl SParamPoint {
    pub fn return_loss_db(&self) -> f64 {
        -20.0 * self.s11.norm().log10()
    }
}

/// Exact S-parameters of the ideal line cascade between the source and load
/// impedances, each section a quarter wave at the centre frequency.
pub fn cascade_sparams(design: &TransformerDesign, frequencies: &[f64]) -> Result<Vec<SParamPoint>> {
    let j = Complex64::i();
    let (z1, z2) = (design.z_source, design.z_load);
    frequencies
        .iter()
        .map(|&f| {
            if !(f > 0.0) {
                return Err(param("frequencies must be positive"));
            }
            let bl = 0.5 * PI * f / design.f_center;
            let (c, s) = (Complex64::new(bl.cos(), 0.0), bl.sin());
            let mut m = [
                [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
                [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
            ];
            for &z in &design.section_impedances {
                let sec = [[c, j * z * s], [j * s / z, c]];
                m = [
                    [m[0][0] * sec[0][0] + m[0][1] * sec[1][0], m[0][0] * sec[0][1] + m[0][1] * sec[1][1]],
                    [m[1][0] * sec[0][0] + m[1][1] * sec[1][0], m[1][0] * sec[0][1] + m[1][1] * sec[1][1]],
                ];
            }
            let [[a, b], [cc, d]] = m;
            let den = a * z2 + b + cc * z1 * z2 + d * z1;
            Ok(SParamPoint {
                frequency: f,
                s11: (a * z2 + b - cc * z1 * z2 - d * z1) / den,
                s21: 2.0 * (z1 * z2).sqrt() / den,
            })
        })
        .collect()
}

/// Widest contiguous frequency range where the return loss is at least
/// `threshold_db`; `None` if no point qualifies.
pub fn return_loss_band(points: &[SParamPoint], threshold_db: f64) -> Option<(f64, f64)> {
    let mut best: Option<(f64, f64)> = None;
    let mut start = None;
    for (i, p) in points.iter().enumerate() {
        let ok = p.return_loss_db() >= threshold_db;
        if ok && start.is_none() {
            start = Some(i);
        }
        let closes = !ok || i + 1 == points.len();
        if let (true, Some(s)) = (closes, start) {
            let e = if ok { i } else { i - 1 };
            let run = (points[s].frequency, points[e].frequency);
            if best.is_none_or(|b| run.1 - run.0 > b.1 - b.0) {
                best = Some(run);
            }
            start = None;
        }
    }
    best
}

pub fn design_csv(design: &TransformerDesign) -> String {
    let mut s = String::from("section,impedance_ohm\n");
    for (i, z) in design.section_impedances.iter().enumerate() {
        let _ = writeln!(s, "{},{z:.6}", i + 1);
    }
    s
}

/// One row per frequency: real and imaginary parts of S11 and S21.
pub fn sparams_csv(points: &[SParamPoint]) -> String {
    let mut s = String::from("frequency_hz,s11_re,s11_im,s21_re,s21_im\n");
    for p in points {
        let _ = writeln!(s, "{},{:.12e},{:.12e},{:.12e},{:.12e}", p.frequency, p.s11.re, p.s11.im, p.s21.re, p.s21.im);
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_section_is_geometric_mean() {
        let d = design_transformer(&TransformerSpec { n_sections: 1, ..Default::default() }).unwrap();
        assert!((d.section_impedances[0] - 200f64.sqrt()).abs() < 1e-9);
        let p = cascade_sparams(&d, &[d.f_center]).unwrap();
        assert!(p[0].s11.norm() < 1e-12);
    }

    #[test]
    fn six_section_bandwidth() {
        let d = design_transformer(&TransformerSpec::default()).unwrap();
        assert!((d.fractional_bandwidth - 1.143).abs() < 0.005, "{}", d.fractional_bandwidth);
        assert!(d.section_impedances.windows(2).all(|w| w[1] < w[0]));
        assert!(d.section_impedances[0] < 50.0 && d.section_impedances[5] > 4.0);
    }

    #[test]
    fn reversal_symmetry() {
        let a = design_transformer(&TransformerSpec::default()).unwrap();
        let b = design_transformer(&TransformerSpec { z_source: 4.0, z_load: 50.0, ..Default::default() }).unwrap();
        for (x, y) in a.section_impedances.iter().zip(b.section_impedances.iter().rev()) {
            assert!((x - y).abs() < 1e-9 * x, "{x} {y}");
        }
    }

    #[test]
    fn binomial_is_maximally_flat() {
        let d = design_transformer(&TransformerSpec { synthesis: Synthesis::Binomial, ..Default::default() }).unwrap();
        let p = cascade_sparams(&d, &[d.f_center]).unwrap();
        assert!(p[0].s11.norm() < 1e-3);
        assert!(d.section_impedances.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn unreachable_band_reports_achievable() {
        let spec = TransformerSpec { n_sections: 2, band: Some((5e9, 10e9)), ..Default::default() };
        match design_transformer(&spec) {
            Err(Error::Design { achievable_db, .. }) => assert!(achievable_db > 0.0 && achievable_db < 30.0),
            other => panic!("{other:?}"),
        }
        assert!(design_transformer(&TransformerSpec { band: Some((5e9, 10e9)), ..Default::default() }).is_ok());
    }

    #[test]
    fn exact_refinement_meets_target() {
        let spec = TransformerSpec { band: Some((5e9, 10e9)), ..Default::default() };
        let d = design_transformer_exact(&spec).unwrap();
        let fs: Vec<f64> = (0..=50).map(|i| 5e9 + 1e8 * i as f64).collect();
        for p in cascade_sparams(&d, &fs).unwrap() {
            assert!(p.return_loss_db() >= 30.0, "{}", p.return_loss_db());
        }
    }

    #[test]
    fn cascade_is_lossless() {
        let d = design_transformer(&TransformerSpec::default()).unwrap();
        let fs: Vec<f64> = (1..=200).map(|i| i as f64 * 1e8).collect();
        for p in cascade_sparams(&d, &fs).unwrap() {
            assert!((p.s11.norm_sqr() + p.s21.norm_sqr() - 1.0).abs() < 1e-10);
        }
    }
}
