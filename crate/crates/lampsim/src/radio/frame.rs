//! Radio frames as seen by the ether.

use crate::core::{airtime, preamble_airtime, Duration, Timestamp, TxParams};
use serde::{Deserialize, Serialize};

/// Identity of anything that emits or receives radio energy.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
pub struct EmitterId(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FrameKind {
    UplinkData,
    DownlinkData,
    JoinRequest,
    JoinAccept,
    /// Plain LoRa emission that carries no LoRaWAN frame (interference).
    PlainLora,
    /// A preamble with no payload symbols at all.
    PreambleOnly,
}

impl FrameKind {
    /// Frames a gateway can demodulate into an uplink for the server.
    pub fn is_uplink(self) -> bool {
        matches!(self, FrameKind::UplinkData | FrameKind::JoinRequest)
    }

    pub fn is_downlink(self) -> bool {
        matches!(self, FrameKind::DownlinkData | FrameKind::JoinAccept)
    }
}

/// Length plus a logical content id; payload bytes themselves are opaque.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PayloadRef {
    pub len: u16,
    pub content_id: u64,
}

/// One radio emission.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhyFrame {
    pub uid: u64,
    pub emitter: EmitterId,
    pub frequency_hz: u32,
    pub params: TxParams,
    pub start: Timestamp,
    pub air: Duration,
    pub kind: FrameKind,
    pub confirmed: bool,
    pub payload: PayloadRef,
    /// Addressed receiver, for downlink kinds.
    pub dest: Option<EmitterId>,
}

impl PhyFrame {
    /// Build a frame, deriving the airtime from the parameters. Preamble-only
    /// frames occupy the air for their preamble duration alone.
    pub fn new(
        uid: u64,
        emitter: EmitterId,
        frequency_hz: u32,
        params: TxParams,
        start: Timestamp,
        kind: FrameKind,
        confirmed: bool,
        payload: PayloadRef,
    ) -> Result<Self, crate::Error> {
        let air = match kind {
            FrameKind::PreambleOnly => preamble_airtime(&params),
            _ => airtime(&params)?,
        };
        Ok(PhyFrame {
            uid,
            emitter,
            frequency_hz,
            params,
            start,
            air,
            kind,
            confirmed,
            payload,
            dest: None,
        })
    }

    pub fn end(&self) -> Timestamp {
        self.start + self.air
    }

    /// End of the critical preamble+header region: the preamble plus the
    /// first eight payload symbols (which carry the PHY header).
    pub fn header_end(&self) -> Timestamp {
        if self.kind == FrameKind::PreambleOnly {
            return self.end();
        }
        let quarter_sym_us =
            ((1u128 << self.params.sf) * 1_000_000) / (4 * self.params.bandwidth_hz as u128);
        let header = preamble_airtime(&self.params)
            + Duration::from_micros((32 * quarter_sym_us) as u64);
        (self.start + header).min(self.end())
    }

    pub fn overlaps(&self, start: Timestamp, end: Timestamp) -> bool {
        self.start < end && start < self.end()
    }
}

/// Overlap of two rectangular spectral occupancies as a fraction of the
/// first signal's bandwidth.
pub fn spectral_overlap(f1_hz: u32, bw1_hz: u32, f2_hz: u32, bw2_hz: u32) -> f64 {
    debug_assert!(bw1_hz > 0 && bw2_hz > 0);
    let lo1 = f1_hz as f64 - bw1_hz as f64 / 2.0;
    let hi1 = f1_hz as f64 + bw1_hz as f64 / 2.0;
    let lo2 = f2_hz as f64 - bw2_hz as f64 / 2.0;
    let hi2 = f2_hz as f64 + bw2_hz as f64 / 2.0;
    let overlap = (hi1.min(hi2) - lo1.max(lo2)).max(0.0);
    overlap / bw1_hz as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::core::CodeRate;

    #[test]
    fn spectral_overlap_examples() {
        // Identical channels overlap fully.
        assert_eq!(spectral_overlap(868_100_000, 125_000, 868_100_000, 125_000), 1.0);
        // 868.0 vs 868.1 MHz at 125 kHz: 25 kHz of shared spectrum.
        let f = spectral_overlap(868_100_000, 125_000, 868_000_000, 125_000);
        assert!((f - 0.2).abs() < 1e-9, "{f}");
        // Disjoint bands.
        assert_eq!(spectral_overlap(868_100_000, 125_000, 869_525_000, 125_000), 0.0);
    }

    #[test]
    fn preamble_only_frames_have_no_payload_airtime() {
        let params = TxParams {
            sf: 7,
            bandwidth_hz: 125_000,
            code_rate: CodeRate::CR4_5,
            preamble_symbols: 8,
            explicit_header: true,
            crc_on: true,
            payload_len: 0,
            power_dbm: 14,
            ldro: None,
        };
        let f = PhyFrame::new(
            1,
            EmitterId(0),
            868_100_000,
            params,
            Timestamp::ZERO,
            FrameKind::PreambleOnly,
            false,
            PayloadRef { len: 0, content_id: 0 },
        )
        .unwrap();
        assert_eq!(f.air, preamble_airtime(&params));
        assert_eq!(f.header_end(), f.end());
    }

    #[test]
    fn header_region_is_a_prefix() {
        let params = TxParams::lorawan(crate::core::DataRate::DR5, 16, 14);
        let f = PhyFrame::new(
            2,
            EmitterId(0),
            868_100_000,
            params,
            Timestamp::from_micros(1000),
            FrameKind::UplinkData,
            true,
            PayloadRef { len: 16, content_id: 9 },
        )
        .unwrap();
        assert!(f.header_end() > f.start);
        assert!(f.header_end() < f.end());
    }
}
