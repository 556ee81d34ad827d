//! Link adaptation: the MCS catalog, constellation look-up-table
//! persistence, spectral-efficiency computation, SNR-driven selection, and
//! decoding-latency sweeps.

mod fixtures;
mod latency;
mod lut;
mod mcs;
mod se;

pub use fixtures::{
    table2_store, verify_fixtures, FixtureCheck, CONVENTIONAL_MCS_ID, FIXTURE_ENERGY_TOLERANCE,
};
pub use latency::{latency_sweep, ConstellationSource, LatencyCell, LatencySearchConfig};
pub use lut::{
    load_lut, octal_digits_to_value, select_constellation, store_lut, value_to_octal_digits,
    LutRecord, LutStore,
};
pub use mcs::McsEntry;
pub use se::{bound_pb, select_mcs, spectral_efficiency, PbSource, SeCurvePoint};
