//! lampsim — a discrete-event simulator of a multi-gateway LoRaWAN
//! smart-lighting network.
//!
//! The simulator reproduces, at desk scale, attack experiments against a
//! street-lamp deployment (indirect and direct interference, channel,
//! gateway and network exhaustion, join floods) and long-term overnight
//! runs under different ADR policies, including the firmware defects
//! observed in shipped lighting controllers.
//!
//! The crate is organised around the layers of the network:
//!
//! - [`core`]: time base, EU868 channel plan, airtime, duty cycles.
//! - [`radio`]: link budget, sensitivity, CSS capture and collision rules.
//! - [`device`]: the end-node MAC state machine and its defect flags.
//! - [`gateway`]: finite demodulator resources and downlink transmission.
//! - [`netserver`]: deduplication, ADR, join handling, overload policy.
//! - [`attacker`]: five parameterized, duty-cycle-exempt traffic sources.
//! - [`sim`]: the deterministic event engine, scenario presets, metrics.
//!
//! Runs are pure functions of `(Scenario, seed)`: the same inputs always
//! produce a byte-identical event log.

pub mod attacker;
pub mod core;
pub mod device;
pub mod gateway;
pub mod netserver;
pub mod radio;
pub mod rng;
pub mod sim;

use thiserror::Error as ThisError;

/// Errors from configuration validation and the core operations.
#[derive(Debug, ThisError)]
pub enum Error {
    #[error("invalid data rate index {0}")]
    InvalidDataRate(u8),
    #[error("no data rate for SF{sf} at {bandwidth_hz} Hz")]
    InvalidSfBw { sf: u8, bandwidth_hz: u32 },
    #[error("payload of {len} bytes exceeds the {max}-byte maximum for DR{dr}")]
    PayloadTooLarge { len: u16, max: u16, dr: u8 },
    #[error("no enabled channel")]
    NoChannelEnabled,
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

#[cfg(doctest)]
mod book {
    //! The guide chapters under `book/src` double as doc-tests so the
    //! snippets in the book stay in sync with the library.
    macro_rules! chapter {
        ($name:ident, $path:literal) => {
            #[doc = include_str!($path)]
            mod $name {}
        };
    }
    chapter!(introduction, "../../../book/src/introduction.md");
    chapter!(channels_and_airtime, "../../../book/src/channels-and-airtime.md");
    chapter!(propagation_and_capture, "../../../book/src/propagation-and-capture.md");
    chapter!(devices, "../../../book/src/devices.md");
    chapter!(gateways_and_server, "../../../book/src/gateways-and-server.md");
    chapter!(attacks, "../../../book/src/attacks.md");
    chapter!(scenarios_and_metrics, "../../../book/src/scenarios-and-metrics.md");
}
