//! Deterministic discrete-event engine, scenario presets and the metrics
//! pipeline.

pub mod engine;
pub mod log;
pub mod metrics;
pub mod presets;
pub mod scenario;

pub use engine::run;
pub use log::{EventLog, LogRecord, Receiver, Record};
pub use metrics::{
    coverage_report, expected_for_device, rtt_mean_s, rtt_series, MetricsReport, TypeStats,
};
pub use presets::{preset, preset_names, scenario_presets};
pub use scenario::{DeviceCohort, Scenario};
