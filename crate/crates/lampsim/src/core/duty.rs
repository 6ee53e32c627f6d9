//! Per-transmission duty-cycle accounting.
//!
//! After a transmission of length `T_air` on a sub-band with duty fraction
//! `d`, the band is blocked for `T_off = T_air·(1/d − 1)`, i.e. the next
//! transmission may start `T_air/d` after the previous one began. Over any
//! completed run this per-transmission rule keeps the aggregate airtime
//! fraction within `d`.

use crate::core::time::{Duration, Timestamp};
use serde::{Deserialize, Serialize};

/// Duty state of one sub-band on one radio.
#[derive(Debug, Clone, Copy, Default, Serialize, Deserialize)]
pub struct SubBandState {
    /// Earliest next allowed transmission start.
    pub next_allowed: Timestamp,
    /// Cumulative airtime spent on this sub-band.
    pub airtime_used: Duration,
}

impl SubBandState {
    /// Earliest permitted start at or after `t`, without reserving.
    pub fn earliest_start(&self, t: Timestamp) -> Timestamp {
        self.next_allowed.max(t)
    }

    /// Reserve a transmission of length `air` wanted at `t` under duty
    /// fraction `duty`; returns the granted start time and blocks the band
    /// until `start + air/duty`.
    pub fn reserve(&mut self, t: Timestamp, air: Duration, duty: f64) -> Timestamp {
        debug_assert!(air > Duration::ZERO);
        debug_assert!(duty > 0.0 && duty <= 1.0);
        let start = self.earliest_start(t);
        let occupancy = Duration::from_micros((air.as_micros() as f64 / duty).round() as u64);
        self.next_allowed = start + occupancy;
        self.airtime_used += air;
        start
    }
}

/// Reserve on `state` and return the granted start (spec operation form).
pub fn duty_cycle_reserve(
    state: &mut SubBandState,
    t: Timestamp,
    air: Duration,
    duty: f64,
) -> Timestamp {
    state.reserve(t, air, duty)
}
