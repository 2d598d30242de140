//! Experiment harness around `stratlearn`: JSON configuration, preset grids
//! and CSV output.

pub mod config;
pub mod csv_out;
pub mod presets;

pub use config::{emit_config, parse_config, ConfigError, Document, PresetRequest};
pub use csv_out::{emit_csv, render_csv, NamedSeries, HEADER};
pub use presets::{run_preset, Manifest, PresetName, PresetOptions};
