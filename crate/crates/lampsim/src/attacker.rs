//! Duty-cycle-exempt attack traffic generators.
//!
//! Each attack expands into one emitter per targeted frequency. Emitters
//! whose frames are pure interference (plain LoRa, jam bursts, preamble
//! floods) are modeled analytically: their periodic schedule is queried on
//! demand instead of being pushed through the event queue, which keeps
//! millisecond-rate jamming cheap over multi-hour runs. Emitters whose
//! frames the network actually processes (channel exhaustion, join floods)
//! emit real frames through the event loop.

use crate::core::{preamble_airtime, ChannelPlan, CodeRate, DataRate, Duration, Timestamp, TxParams};
use crate::device::UplinkMeta;
use crate::radio::{EmitterId, FrameKind, Position};
use crate::rng::SimRng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum JoinFloodMode {
    OtaaValid,
    OtaaInvalid,
    AbpValid,
    AbpInvalid,
}

impl JoinFloodMode {
    pub fn uses_valid_credentials(self) -> bool {
        matches!(self, JoinFloodMode::OtaaValid | JoinFloodMode::AbpValid)
    }

    pub fn tag(self) -> &'static str {
        match self {
            JoinFloodMode::OtaaValid => "otaa-valid",
            JoinFloodMode::OtaaInvalid => "otaa-invalid",
            JoinFloodMode::AbpValid => "abp-valid",
            JoinFloodMode::AbpInvalid => "abp-invalid",
        }
    }
}

/// The five attacker behaviours.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum AttackKind {
    /// Plain LoRa packets on neighbouring, partially overlapping
    /// frequencies (868.0/.2/.4/.6 MHz), 16 bytes every 2.5 ms at SF12
    /// CR4/8 by default.
    IndirectInterference {
        frequencies: Vec<u32>,
        payload_len: u16,
        period: Duration,
        sf: u8,
        code_rate: CodeRate,
        preamble_symbols: u16,
    },
    /// Targeted 0-byte bursts on the known uplink channels, preamble
    /// omitted, one frame per millisecond per channel.
    DirectJam {
        frequencies: Vec<u32>,
        payload_len: u16,
        period: Duration,
        sf: u8,
        code_rate: CodeRate,
        preamble_symbols: u16,
    },
    /// Valid LoRaWAN telegrams from registered sessions, ~100 messages per
    /// minute aggregated over the configured channels.
    ChannelExhaust {
        payload_len: u16,
        messages_per_minute: f64,
    },
    /// LoRaWAN-matching preambles, one emitter per channel.
    PreambleFlood {
        period: Duration,
        preamble_symbols: u16,
        sf: u8,
    },
    /// OTAA or ABP join traffic on the three join channels, with valid or
    /// fake credentials.
    JoinFlood {
        mode: JoinFloodMode,
        period: Duration,
        /// Index of the device whose credentials were captured (valid modes).
        victim: usize,
    },
}

/// One attack instance with its geometry and activation interval.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttackConfig {
    pub kind: AttackKind,
    pub position: Position,
    pub power_dbm: i8,
    pub start: Timestamp,
    pub end: Timestamp,
}

impl AttackConfig {
    pub fn indirect_interference(position: Position, start: Timestamp, end: Timestamp) -> Self {
        AttackConfig {
            kind: AttackKind::IndirectInterference {
                frequencies: vec![868_000_000, 868_200_000, 868_400_000, 868_600_000],
                payload_len: 16,
                period: Duration::from_micros(2_500),
                sf: 12,
                code_rate: CodeRate::CR4_8,
                preamble_symbols: 8,
            },
            position,
            power_dbm: 14,
            start,
            end,
        }
    }

    pub fn direct_jam(plan: &ChannelPlan, position: Position, start: Timestamp, end: Timestamp) -> Self {
        let frequencies: Vec<u32> = plan
            .uplink
            .iter()
            .map(|c| c.frequency_hz)
            .collect::<std::collections::BTreeSet<_>>()
            .into_iter()
            .collect();
        AttackConfig {
            kind: AttackKind::DirectJam {
                frequencies,
                payload_len: 0,
                period: Duration::from_millis(1),
                sf: 7,
                code_rate: CodeRate::CR4_8,
                preamble_symbols: 0,
            },
            position,
            power_dbm: 20,
            start,
            end,
        }
    }

    pub fn channel_exhaust(position: Position, start: Timestamp, end: Timestamp) -> Self {
        AttackConfig {
            kind: AttackKind::ChannelExhaust {
                payload_len: 16,
                messages_per_minute: 100.0,
            },
            position,
            power_dbm: 14,
            start,
            end,
        }
    }

    pub fn preamble_flood(position: Position, start: Timestamp, end: Timestamp) -> Self {
        AttackConfig {
            kind: AttackKind::PreambleFlood {
                period: Duration::from_millis(20),
                preamble_symbols: 8,
                sf: 7,
            },
            position,
            power_dbm: 14,
            start,
            end,
        }
    }

    pub fn join_flood(mode: JoinFloodMode, position: Position, start: Timestamp, end: Timestamp) -> Self {
        let period = match mode {
            // OTAA floods pace themselves like join cycles; ABP floods
            // blast data frames back to back.
            JoinFloodMode::OtaaValid | JoinFloodMode::OtaaInvalid => Duration::from_millis(200),
            JoinFloodMode::AbpValid | JoinFloodMode::AbpInvalid => Duration::ZERO,
        };
        AttackConfig {
            kind: AttackKind::JoinFlood { mode, period, victim: 0 },
            position,
            power_dbm: 14,
            start,
            end,
        }
    }

    pub fn validate(&self) -> Result<(), crate::Error> {
        if self.power_dbm > 20 {
            return Err(crate::Error::InvalidConfig(format!(
                "attacker power {} dBm exceeds the 20 dBm hardware maximum",
                self.power_dbm
            )));
        }
        if self.end <= self.start {
            return Err(crate::Error::InvalidConfig(
                "attack activation interval is empty".into(),
            ));
        }
        Ok(())
    }
}

/// What an evented emitter attaches to its frames.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AttackerTraffic {
    /// Pure interference; never decoded.
    Interference,
    /// Valid LoRaWAN uplinks from a registered attacker session.
    RegisteredData { payload_len: u16 },
    /// Join-flood traffic.
    Join { mode: JoinFloodMode, victim: EmitterId },
    /// Replayed ABP data frames.
    AbpReplay { victim: EmitterId, valid: bool },
}

/// One attacking radio bound to one frequency.
#[derive(Debug, Clone)]
pub struct AttackEmitter {
    pub emitter: EmitterId,
    pub attack_index: usize,
    pub position: Position,
    pub frequency_hz: u32,
    pub params: TxParams,
    pub frame_kind: FrameKind,
    pub traffic: AttackerTraffic,
    /// Emission k starts at `first + k·step`.
    pub first: Timestamp,
    pub step: Duration,
    pub end: Timestamp,
    pub airtime: Duration,
    /// Analytic emitters are folded into interference queries instead of
    /// the event queue.
    pub analytic: bool,
    /// Paths this emitter binds on a listening gateway (preamble flood).
    pub claims_demod: bool,
    // Evented-emitter state.
    pub next_index: u64,
    pub fcnt: u32,
}

impl AttackEmitter {
    /// Start time of emission `k`.
    pub fn start_of(&self, k: u64) -> Timestamp {
        self.first + Duration::from_micros(self.step.as_micros() * k)
    }

    /// Emissions whose on-air interval intersects `[from, to)`, as indices.
    pub fn overlapping(&self, from: Timestamp, to: Timestamp) -> std::ops::Range<u64> {
        let to = to.min(self.end);
        if to <= self.first || self.step == Duration::ZERO {
            return 0..0;
        }
        let step = self.step.as_micros() as i128;
        let first = self.first.as_micros() as i128;
        let air = self.airtime.as_micros() as i128;
        // k such that first + k·step < to and first + k·step + air > from.
        let hi = ((to.as_micros() as i128 - first) + step - 1) / step; // exclusive
        let lo = ((from.as_micros() as i128 - air - first) / step + 1).max(0);
        let lo = lo as u64;
        let hi = hi.max(0) as u64;
        lo..hi.max(lo)
    }

    /// Number of emissions starting in `[from, to)`.
    pub fn emissions_between(&self, from: Timestamp, to: Timestamp) -> u64 {
        let to = to.min(self.end);
        let from = from.max(self.first);
        if to <= from || self.step == Duration::ZERO {
            return 0;
        }
        let step = self.step.as_micros() as i128;
        let first = self.first.as_micros() as i128;
        let lo = (from.as_micros() as i128 - first + step - 1) / step;
        let hi = (to.as_micros() as i128 - first + step - 1) / step;
        (hi - lo).max(0) as u64
    }

    /// Whether a demodulation path is bound by this emitter at `t`, given
    /// the per-frame hold time (airtime plus gateway hang time).
    pub fn demod_claims_at(&self, t: Timestamp, hold: Duration) -> usize {
        if !self.claims_demod || t < self.first || t >= self.end + hold {
            return 0;
        }
        let step = self.step.as_micros() as i128;
        if step == 0 {
            return 0;
        }
        let first = self.first.as_micros() as i128;
        let t_us = t.as_micros() as i128;
        let hold_us = hold.as_micros() as i128;
        // k with start ≤ t < start + hold
        let hi = (t_us - first) / step; // latest started
        let lo = ((t_us - hold_us - first) / step + 1).max(0);
        if hi < lo {
            0
        } else {
            let latest_allowed = (self.end.as_micros() as i128 - first) / step;
            ((hi.min(latest_allowed) - lo) + 1).max(0) as usize
        }
    }
}

/// Expand an attack into its per-frequency emitters. `base` is the first
/// free emitter id; `seed` drives the per-emitter phase offsets.
pub fn expand_attack(
    config: &AttackConfig,
    attack_index: usize,
    base: u32,
    plan: &ChannelPlan,
    victims: &[EmitterId],
    seed: u64,
) -> Vec<AttackEmitter> {
    let mut out = Vec::new();
    let mut make = |i: usize,
                    freq: u32,
                    params: TxParams,
                    frame_kind: FrameKind,
                    traffic: AttackerTraffic,
                    step: Duration,
                    analytic: bool,
                    claims_demod: bool| {
        let air = match frame_kind {
            FrameKind::PreambleOnly => preamble_airtime(&params),
            _ => crate::core::airtime(&params).expect("attack airtime"),
        };
        // Physical radios cannot start a new frame mid-frame; only the
        // direct jammer keeps its nominal rate (overlapping bursts model
        // its aggregate energy).
        let step = if analytic && matches!(config.kind, AttackKind::DirectJam { .. }) {
            step
        } else {
            step.max(air)
        };
        let phase = SimRng::stream(seed, "attack-phase", &[attack_index as u64, i as u64])
            .next_below(step.as_micros().max(1));
        out.push(AttackEmitter {
            emitter: EmitterId(base + out.len() as u32),
            attack_index,
            position: config.position,
            frequency_hz: freq,
            params,
            frame_kind,
            traffic,
            first: config.start + Duration::from_micros(phase),
            step,
            end: config.end,
            airtime: air,
            analytic,
            claims_demod,
            next_index: 0,
            fcnt: 0,
        });
    };

    match &config.kind {
        AttackKind::IndirectInterference {
            frequencies,
            payload_len,
            period,
            sf,
            code_rate,
            preamble_symbols,
        } => {
            for (i, &f) in frequencies.iter().enumerate() {
                let params = TxParams {
                    sf: *sf,
                    bandwidth_hz: 125_000,
                    code_rate: *code_rate,
                    preamble_symbols: *preamble_symbols,
                    explicit_header: true,
                    crc_on: true,
                    payload_len: *payload_len,
                    power_dbm: config.power_dbm,
                    ldro: None,
                };
                make(i, f, params, FrameKind::PlainLora, AttackerTraffic::Interference, *period, true, false);
            }
        }
        AttackKind::DirectJam {
            frequencies,
            payload_len,
            period,
            sf,
            code_rate,
            preamble_symbols,
        } => {
            for (i, &f) in frequencies.iter().enumerate() {
                let params = TxParams {
                    sf: *sf,
                    bandwidth_hz: 125_000,
                    code_rate: *code_rate,
                    preamble_symbols: *preamble_symbols,
                    explicit_header: false,
                    crc_on: false,
                    payload_len: *payload_len,
                    power_dbm: config.power_dbm,
                    ldro: None,
                };
                make(i, f, params, FrameKind::PlainLora, AttackerTraffic::Interference, *period, true, false);
            }
        }
        AttackKind::ChannelExhaust {
            payload_len,
            messages_per_minute,
        } => {
            let freqs: Vec<u32> = plan
                .uplink
                .iter()
                .map(|c| c.frequency_hz)
                .collect::<std::collections::BTreeSet<_>>()
                .into_iter()
                .collect();
            let per_channel = messages_per_minute / freqs.len() as f64;
            let step = Duration::from_secs_f64(60.0 / per_channel);
            for (i, &f) in freqs.iter().enumerate() {
                let params = TxParams::lorawan(DataRate::DR5, *payload_len, config.power_dbm);
                make(
                    i,
                    f,
                    params,
                    FrameKind::UplinkData,
                    AttackerTraffic::RegisteredData { payload_len: *payload_len },
                    step,
                    false,
                    false,
                );
            }
        }
        AttackKind::PreambleFlood {
            period,
            preamble_symbols,
            sf,
        } => {
            let freqs: Vec<u32> = plan
                .uplink
                .iter()
                .map(|c| c.frequency_hz)
                .collect::<std::collections::BTreeSet<_>>()
                .into_iter()
                .collect();
            for (i, &f) in freqs.iter().enumerate() {
                let params = TxParams {
                    sf: *sf,
                    bandwidth_hz: 125_000,
                    code_rate: CodeRate::CR4_5,
                    preamble_symbols: *preamble_symbols,
                    explicit_header: true,
                    crc_on: false,
                    payload_len: 0,
                    power_dbm: config.power_dbm,
                    ldro: None,
                };
                // Skew each flooder's period slightly so the boards drift
                // against each other instead of locking into one phase.
                let skew = SimRng::stream(seed, "flood-skew", &[attack_index as u64, i as u64])
                    .next_below(997);
                let skewed = *period + Duration::from_micros(skew);
                make(i, f, params, FrameKind::PreambleOnly, AttackerTraffic::Interference, skewed, true, true);
            }
        }
        AttackKind::JoinFlood { mode, period, victim } => {
            let victim_id = victims.get(*victim).copied().unwrap_or(EmitterId(u32::MAX));
            for (i, &ch) in plan.join_channels.iter().enumerate() {
                let f = plan.channel(ch).frequency_hz;
                let (params, frame_kind, traffic) = match mode {
                    JoinFloodMode::OtaaValid | JoinFloodMode::OtaaInvalid => (
                        TxParams::lorawan(DataRate::DR5, 23, config.power_dbm),
                        FrameKind::JoinRequest,
                        AttackerTraffic::Join { mode: *mode, victim: victim_id },
                    ),
                    JoinFloodMode::AbpValid | JoinFloodMode::AbpInvalid => (
                        TxParams::lorawan(DataRate::DR0, 16, config.power_dbm),
                        FrameKind::UplinkData,
                        AttackerTraffic::AbpReplay {
                            victim: victim_id,
                            valid: *mode == JoinFloodMode::AbpValid,
                        },
                    ),
                };
                make(i, f, params, frame_kind, traffic, *period, false, false);
            }
        }
    }
    out
}

/// Session material for an emission of an evented attacker: the uplink meta
/// the server will see. Valid modes clone a registered device's identity;
/// invalid modes present unregistered identities.
pub fn stolen_credentials(emitter: &AttackEmitter, emission_index: u64) -> Option<UplinkMeta> {
    match emitter.traffic {
        AttackerTraffic::Interference => None,
        AttackerTraffic::RegisteredData { .. } => Some(UplinkMeta::Data {
            device: emitter.emitter,
            kind: crate::device::MessageKind::Counters,
            fcnt: emitter.fcnt + 1,
            confirmed: false,
            chain: ((emitter.emitter.0 as u64) << 32) | emission_index,
            attempt: 0,
        }),
        AttackerTraffic::Join { mode, victim } => {
            let device = if mode.uses_valid_credentials() {
                victim
            } else {
                emitter.emitter
            };
            // Fresh nonces per emission; offset past the 14-bit range the
            // devices draw from to avoid aliasing a legitimate nonce.
            let devnonce = 0xC000u16.wrapping_add(
                (emitter.emitter.0 as u16)
                    .wrapping_mul(911)
                    .wrapping_add(emission_index as u16),
            );
            Some(UplinkMeta::Join {
                device,
                devnonce,
                valid_credentials: mode.uses_valid_credentials(),
            })
        }
        AttackerTraffic::AbpReplay { victim, valid } => {
            let device = if valid { victim } else { emitter.emitter };
            Some(UplinkMeta::Data {
                device,
                kind: crate::device::MessageKind::Counters,
                // Replayed captures cycle a stale counter range.
                fcnt: 1 + (emission_index % 8) as u32,
                confirmed: false,
                chain: ((emitter.emitter.0 as u64) << 32) | emission_index,
                attempt: 0,
            })
        }
    }
}
