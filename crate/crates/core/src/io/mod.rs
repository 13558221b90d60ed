//! Run descriptions, figure presets and serialization.

pub mod config;
pub mod emit;
pub mod presets;

pub use config::{parse_config, render_config, Format, RunConfig};
pub use emit::{emit, parse_spectrum_csv, CrossingScan, Emit, RateTable};
pub use presets::{preset, PRESETS};
