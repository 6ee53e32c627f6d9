//! Device message profiles, activation modes and firmware defect flags.

use crate::core::{ChannelId, DataRate, Duration, Timestamp};
use serde::{Deserialize, Serialize};

/// The three message types a lighting controller emits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MessageKind {
    /// Confirmed, once after power-on (the first uplink after a join).
    Boot,
    /// Confirmed status telegram, periodic.
    Status,
    /// Unconfirmed usage statistics, periodic.
    Counters,
}

impl MessageKind {
    pub fn confirmed(self) -> bool {
        !matches!(self, MessageKind::Counters)
    }

    pub fn tag(self) -> &'static str {
        match self {
            MessageKind::Boot => "boot",
            MessageKind::Status => "status",
            MessageKind::Counters => "counters",
        }
    }
}

/// Session provisioning mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Activation {
    Otaa,
    Abp {
        /// Frame counters survive power cycles (LoRaWAN 1.0.4 behaviour).
        persist_counters: bool,
    },
}

/// The firmware misbehaviours observed in deployed controllers, all off by
/// default (a spec-compliant device).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct DefectFlags {
    /// Ignores missing downlink confirmations and ADR commands: pending
    /// confirmed frames are treated as delivered, the data rate never
    /// changes after the join.
    pub ignore_ack_and_adr: bool,
    /// Starts data traffic at DR0 regardless of the data rate the network
    /// granted at join time.
    pub reset_dr0_after_join: bool,
    /// Retries a failed join 0.5-1 s after the previous request instead of
    /// waiting out the join receive windows and the prescribed back-off.
    pub join_backoff_violation: bool,
    /// Counter-transmission progress is lost when the lamp powers down, so
    /// periods longer than the nightly power window never fire.
    pub counters_trigger_lost_on_powerdown: bool,
}

/// Message set, timing and radio defaults for a device cohort.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeviceProfile {
    pub boot_payload: u16,
    pub status_payload: u16,
    pub status_period: Duration,
    pub counters_payload: u16,
    pub counters_period: Duration,
    pub tx_power_dbm: i8,
    /// Data rate used for joins and as the initial DR for ABP sessions.
    pub initial_dr: DataRate,
    /// Uplink channels the device hops across.
    pub enabled_channels: Vec<ChannelId>,
    pub rx1_delay: Duration,
    pub rx2_delay: Duration,
    pub join_rx1_delay: Duration,
    pub join_rx2_delay: Duration,
    /// How long a receive window stays open for a downlink to start.
    pub rx_window: Duration,
    pub max_retries: u32,
    pub retry_delay_min: Duration,
    pub retry_delay_max: Duration,
    /// Lower the DR every this many retransmissions (off by default).
    pub retry_dr_backoff: Option<u32>,
    /// Ask the server to use RX2 for all downlinks (mains-powered nodes
    /// listen to RX2 whenever possible).
    pub rx2_preference: bool,
    /// Step the join DR down one notch every two failed join attempts.
    pub join_dr_cycle: bool,
}

impl Default for DeviceProfile {
    fn default() -> Self {
        DeviceProfile {
            boot_payload: 12,
            status_payload: 16,
            status_period: Duration::from_mins(15),
            counters_payload: 11,
            counters_period: Duration::from_mins(60),
            tx_power_dbm: 14,
            initial_dr: DataRate::DR5,
            enabled_channels: vec![0, 1, 2],
            rx1_delay: Duration::from_secs(1),
            rx2_delay: Duration::from_secs(2),
            join_rx1_delay: Duration::from_secs(5),
            join_rx2_delay: Duration::from_secs(6),
            rx_window: Duration::from_millis(50),
            max_retries: 8,
            retry_delay_min: Duration::from_secs(1),
            retry_delay_max: Duration::from_secs(3),
            retry_dr_backoff: None,
            rx2_preference: false,
            join_dr_cycle: true,
        }
    }
}

impl DeviceProfile {
    pub fn payload_len(&self, kind: MessageKind) -> u16 {
        match kind {
            MessageKind::Boot => self.boot_payload,
            MessageKind::Status => self.status_payload,
            MessageKind::Counters => self.counters_payload,
        }
    }

    pub fn validate(&self) -> Result<(), crate::Error> {
        if self.status_period == Duration::ZERO || self.counters_period == Duration::ZERO {
            return Err(crate::Error::InvalidConfig("message periods must be positive".into()));
        }
        if self.enabled_channels.is_empty() {
            return Err(crate::Error::InvalidConfig("device has no enabled channels".into()));
        }
        if self.tx_power_dbm > 16 {
            return Err(crate::Error::InvalidConfig(format!(
                "device tx power {} dBm exceeds the 16 dBm compliant maximum",
                self.tx_power_dbm
            )));
        }
        if self.retry_delay_min > self.retry_delay_max {
            return Err(crate::Error::InvalidConfig("retry delay range inverted".into()));
        }
        Ok(())
    }
}

/// A dusk-to-dawn power window.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PowerWindow {
    pub on: Timestamp,
    pub off: Timestamp,
}
