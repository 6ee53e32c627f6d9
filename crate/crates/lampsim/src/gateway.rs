//! Gateway radio front-end: finite demodulation resources, uplink
//! forwarding and duty-cycle-constrained downlink transmission.

use crate::core::{ChannelPlan, DataRate, Duration, SubBandState, Timestamp};
use crate::radio::{EmitterId, FrameKind, PhyFrame, Position};
use serde::{Deserialize, Serialize};

/// Static configuration of one gateway.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GatewayConfig {
    pub name: String,
    pub position: Position,
    /// Frequencies the gateway listens on, all SFs concurrently.
    pub listen_hz: Vec<u32>,
    pub demod_paths: usize,
    pub enabled: bool,
    /// Fixed clock offset applied to reported reception timestamps,
    /// microseconds (gateway clocks are not synchronized).
    pub clock_offset_us: i64,
    /// How long a path stays bound after a preamble-only frame ends,
    /// in symbol durations, before the gateway discards it.
    pub preamble_hang_symbols: u32,
    pub tx_power_rx1_dbm: i8,
    pub tx_power_rx2_dbm: i8,
}

impl GatewayConfig {
    pub fn new(name: &str, position: Position, plan: &ChannelPlan) -> Self {
        GatewayConfig {
            name: name.to_string(),
            position,
            listen_hz: plan.uplink.iter().map(|c| c.frequency_hz).collect(),
            demod_paths: 8,
            enabled: true,
            clock_offset_us: 0,
            preamble_hang_symbols: 3,
            tx_power_rx1_dbm: 14,
            tx_power_rx2_dbm: 27,
        }
    }

    pub fn validate(&self) -> Result<(), crate::Error> {
        if self.demod_paths == 0 {
            return Err(crate::Error::InvalidConfig(format!(
                "gateway {} needs at least one demodulation path",
                self.name
            )));
        }
        if self.listen_hz.is_empty() {
            return Err(crate::Error::InvalidConfig(format!(
                "gateway {} listens on no channels",
                self.name
            )));
        }
        if !self.position.x_m.is_finite() || !self.position.y_m.is_finite() {
            return Err(crate::Error::InvalidConfig(format!(
                "gateway {} has a non-finite position",
                self.name
            )));
        }
        Ok(())
    }
}

/// Occupancy of the demodulation paths.
#[derive(Debug, Clone, Default)]
pub struct DemodState {
    /// (frame uid, busy until) per occupied path.
    occupied: Vec<(u64, Timestamp)>,
}

/// Runtime state of one gateway.
#[derive(Debug)]
pub struct Gateway {
    pub config: GatewayConfig,
    pub emitter: EmitterId,
    pub enabled: bool,
    pub demod: DemodState,
    pub duty: Vec<SubBandState>,
    /// Count of uplinks decoded and forwarded to the server.
    pub forwarded: u64,
}

/// Result of offering a frame's preamble to the gateway front end.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PreambleOutcome {
    Allocated,
    DemodBusy,
    NotListening,
}

impl Gateway {
    pub fn new(config: GatewayConfig, emitter: EmitterId, plan: &ChannelPlan) -> Self {
        let enabled = config.enabled;
        Gateway {
            config,
            emitter,
            enabled,
            demod: DemodState::default(),
            duty: vec![SubBandState::default(); plan.sub_bands.len()],
            forwarded: 0,
        }
    }

    pub fn listens_on(&self, frequency_hz: u32) -> bool {
        self.config.listen_hz.contains(&frequency_hz)
    }

    /// Offer a detectable preamble at `t`. `extra_busy` counts paths bound
    /// by flood sources modeled analytically. Preamble-only frames hold a
    /// path for their airtime plus the configured hang time and are then
    /// discarded without producing an uplink.
    pub fn on_preamble(
        &mut self,
        frame: &PhyFrame,
        t: Timestamp,
        extra_busy: usize,
    ) -> PreambleOutcome {
        if !self.enabled || !self.listens_on(frame.frequency_hz) {
            return PreambleOutcome::NotListening;
        }
        if frame.params.preamble_symbols == 0 {
            // Nothing to detect; the frame is interference only.
            return PreambleOutcome::NotListening;
        }
        self.demod.occupied.retain(|&(_, until)| until > t);
        if self.demod.occupied.len() + extra_busy >= self.config.demod_paths {
            return PreambleOutcome::DemodBusy;
        }
        let busy_until = match frame.kind {
            FrameKind::PreambleOnly => frame.end() + self.hang_time(frame),
            _ => frame.end(),
        };
        self.demod.occupied.push((frame.uid, busy_until));
        PreambleOutcome::Allocated
    }

    fn hang_time(&self, frame: &PhyFrame) -> Duration {
        let sym_us = ((1u64 << frame.params.sf) * 1_000_000) / frame.params.bandwidth_hz as u64;
        Duration::from_micros(self.config.preamble_hang_symbols as u64 * sym_us)
    }

    pub fn occupied_paths(&self, t: Timestamp) -> usize {
        self.demod
            .occupied
            .iter()
            .filter(|&&(_, until)| until > t)
            .count()
    }

    /// Reported reception timestamp under this gateway's clock.
    pub fn local_time(&self, t: Timestamp) -> i64 {
        t.as_micros() as i64 + self.config.clock_offset_us
    }

    /// Reserve a downlink transmission starting exactly at `at`. Returns
    /// false (a scheduling failure surfaced to the server) when the duty
    /// cycle blocks the band at the window time.
    pub fn reserve_downlink(
        &mut self,
        sub_band: usize,
        duty: f64,
        at: Timestamp,
        air: Duration,
    ) -> bool {
        if !self.enabled {
            return false;
        }
        if self.duty[sub_band].earliest_start(at) > at {
            return false;
        }
        self.duty[sub_band].reserve(at, air, duty);
        true
    }

    /// Drop all in-flight demodulation and stop forwarding.
    pub fn disable(&mut self) {
        self.enabled = false;
        self.demod.occupied.clear();
    }

    pub fn downlink_dr(&self, plan: &ChannelPlan, uplink_dr: DataRate, rx2: bool) -> DataRate {
        if rx2 {
            plan.rx2_dr
        } else {
            DataRate::new(uplink_dr.index().saturating_sub(plan.rx1_dr_offset).min(5)).unwrap()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::core::TxParams;
    use crate::radio::PayloadRef;

    fn frame(uid: u64, start_us: u64, kind: FrameKind) -> PhyFrame {
        let params = TxParams::lorawan(DataRate::DR5, 16, 14);
        PhyFrame::new(
            uid,
            EmitterId(100),
            868_100_000,
            params,
            Timestamp::from_micros(start_us),
            kind,
            false,
            PayloadRef { len: 16, content_id: uid },
        )
        .unwrap()
    }

    fn gateway() -> Gateway {
        let plan = ChannelPlan::eu868_default();
        Gateway::new(
            GatewayConfig::new("gw", Position::new(0.0, 0.0), &plan),
            EmitterId(0),
            &plan,
        )
    }

    #[test]
    fn eight_concurrent_frames_fit_eight_paths() {
        let mut gw = gateway();
        for uid in 0..8 {
            let f = frame(uid, 0, FrameKind::UplinkData);
            assert_eq!(gw.on_preamble(&f, f.start, 0), PreambleOutcome::Allocated);
        }
        let ninth = frame(8, 0, FrameKind::UplinkData);
        assert_eq!(gw.on_preamble(&ninth, ninth.start, 0), PreambleOutcome::DemodBusy);
    }

    #[test]
    fn paths_free_after_frame_end() {
        let mut gw = gateway();
        for uid in 0..8 {
            let f = frame(uid, 0, FrameKind::UplinkData);
            gw.on_preamble(&f, f.start, 0);
        }
        let later = frame(9, 10_000_000, FrameKind::UplinkData);
        assert_eq!(gw.on_preamble(&later, later.start, 0), PreambleOutcome::Allocated);
    }

    #[test]
    fn preamble_only_frames_hold_paths_through_hang_time() {
        let mut gw = gateway();
        let f = frame(1, 0, FrameKind::PreambleOnly);
        gw.on_preamble(&f, f.start, 0);
        let end = f.end();
        assert_eq!(gw.occupied_paths(end), 1, "hang time keeps the path bound");
        let hang = Duration::from_micros(3 * 1024);
        assert_eq!(gw.occupied_paths(end + hang), 0);
    }

    #[test]
    fn headerless_frames_claim_nothing() {
        let mut gw = gateway();
        let mut f = frame(1, 0, FrameKind::PlainLora);
        f.params.preamble_symbols = 0;
        assert_eq!(gw.on_preamble(&f, f.start, 0), PreambleOutcome::NotListening);
    }

    #[test]
    fn off_channel_frames_are_not_listened_to() {
        let mut gw = gateway();
        let mut f = frame(1, 0, FrameKind::PlainLora);
        f.frequency_hz = 868_000_000;
        assert_eq!(gw.on_preamble(&f, f.start, 0), PreambleOutcome::NotListening);
    }

    #[test]
    fn disabled_gateway_refuses_everything() {
        let mut gw = gateway();
        gw.disable();
        assert!(!gw.reserve_downlink(0, 0.01, Timestamp::ZERO, Duration::from_millis(50)));
        let f = frame(1, 0, FrameKind::UplinkData);
        assert_eq!(gw.on_preamble(&f, f.start, 0), PreambleOutcome::NotListening);
    }

    #[test]
    fn downlink_duty_cycle_blocks_back_to_back_windows() {
        let mut gw = gateway();
        let air = Duration::from_millis(100);
        assert!(gw.reserve_downlink(0, 0.01, Timestamp::ZERO, air));
        // 100 ms at 1% blocks the band for 10 s.
        assert!(!gw.reserve_downlink(0, 0.01, Timestamp::from_micros(5_000_000), air));
        assert!(gw.reserve_downlink(0, 0.01, Timestamp::from_micros(10_000_000), air));
    }
}
