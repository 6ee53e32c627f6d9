//! Time base, EU868 channel plan, data rates, airtime and duty-cycle
//! accounting shared by every other module.

pub mod channel;
pub mod datarate;
pub mod duty;
pub mod time;
pub mod txparams;

pub use channel::{next_channel, Channel, ChannelId, ChannelPlan, SubBand, SubBandId};
pub use datarate::DataRate;
pub use duty::{duty_cycle_reserve, SubBandState};
pub use time::{Duration, Timestamp};
pub use txparams::{airtime, max_payload, preamble_airtime, CodeRate, TxParams};
