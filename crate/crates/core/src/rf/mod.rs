//! Sideband power measurement and the clock-feed matching network.

mod sideband;
mod spectrum;
mod transformer;

pub use sideband::{
    am_pm_corrected_power, chop_fundamental, extract_ma, extract_mp, rounded_db, sideband_chain, ssb_power_upper_bound,
    LineMeasurement, LineResult, MeasurementDescriptor, PowerEstimate, SidebandMeasurement, SidebandReport,
    DEFAULT_AM_POWER_FRACTION,
};
pub use spectrum::{
    measure_ssb, parse_spectrum_csv, quadrature_decompose, spectrum_bin, spectrum_sidebands, synthesize_chopped,
    synthesize_modulated, ModulationFactors, SidebandRatios, SpectrumPoint, SsbMeasurement,
};
pub use transformer::{
    cascade_sparams, design_csv, design_transformer, design_transformer_exact, return_loss_band, sparams_csv,
    SParamPoint, Synthesis, TransformerDesign, TransformerSpec,
};
