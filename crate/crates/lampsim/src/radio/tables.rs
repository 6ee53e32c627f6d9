//! Receiver sensitivity and inter-SF rejection tables.

use crate::Error;
use serde::{Deserialize, Serialize};

/// Minimum decodable RSSI per (SF, bandwidth) and minimum SNR per SF.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensitivityTable {
    /// Index SF−7, at 125 kHz.
    pub rssi_floor_125_dbm: [f64; 6],
    /// Index SF−7, at 250 kHz (3 dB worse than 125 kHz).
    pub rssi_floor_250_dbm: [f64; 6],
    /// Index SF−7: SNR demodulation floor in dB.
    pub snr_floor_db: [f64; 6],
}

impl Default for SensitivityTable {
    fn default() -> Self {
        SensitivityTable {
            rssi_floor_125_dbm: [-123.0, -126.0, -129.0, -132.0, -134.5, -137.0],
            rssi_floor_250_dbm: [-120.0, -123.0, -126.0, -129.0, -131.5, -134.0],
            snr_floor_db: [-7.5, -10.0, -12.5, -15.0, -17.5, -20.0],
        }
    }
}

impl SensitivityTable {
    pub fn rssi_floor(&self, sf: u8, bandwidth_hz: u32) -> f64 {
        let i = (sf.clamp(7, 12) - 7) as usize;
        if bandwidth_hz >= 250_000 {
            self.rssi_floor_250_dbm[i]
        } else {
            self.rssi_floor_125_dbm[i]
        }
    }

    pub fn snr_floor(&self, sf: u8) -> f64 {
        self.snr_floor_db[(sf.clamp(7, 12) - 7) as usize]
    }

    pub fn validate(&self) -> Result<(), Error> {
        for t in [&self.rssi_floor_125_dbm, &self.rssi_floor_250_dbm] {
            for w in t.windows(2) {
                if w[1] >= w[0] {
                    return Err(Error::InvalidConfig(
                        "sensitivity must strictly improve with SF".into(),
                    ));
                }
            }
        }
        Ok(())
    }
}

/// Capture threshold, inter-SF rejection thresholds, and the handling of
/// partially overlapping interference.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RejectionMatrix {
    /// A co-SF, co-channel interferer this many dB below the wanted signal
    /// does not prevent decoding (capture effect).
    pub co_sf_capture_db: f64,
    /// `inter_sf_db[target SF − 7][interferer SF − 7]`: how much stronger a
    /// different-SF interferer must be to break decoding.
    pub inter_sf_db: [[f64; 6]; 6],
    /// Partially overlapping interference is additionally attenuated by a
    /// per-frame-pair uniform draw in `[0, this]` dB, standing in for chirp
    /// misalignment between non-aligned channels.
    pub partial_overlap_jitter_db: f64,
    /// Survival probability for a co-SF collision touching only the payload.
    pub payload_collision_survival: f64,
}

impl Default for RejectionMatrix {
    fn default() -> Self {
        // Rejection grows with the target's processing gain, interpolated
        // linearly from 5 dB (SF7) to 19.5 dB (SF12).
        let mut inter = [[0.0; 6]; 6];
        for (ti, row) in inter.iter_mut().enumerate() {
            let v = 5.0 + 14.5 * ti as f64 / 5.0;
            for (si, cell) in row.iter_mut().enumerate() {
                *cell = if ti == si { 6.0 } else { (v * 10.0).round() / 10.0 };
            }
        }
        RejectionMatrix {
            co_sf_capture_db: 6.0,
            inter_sf_db: inter,
            partial_overlap_jitter_db: 6.0,
            payload_collision_survival: 0.9,
        }
    }
}

impl RejectionMatrix {
    pub fn inter_sf(&self, target_sf: u8, interferer_sf: u8) -> f64 {
        self.inter_sf_db[(target_sf.clamp(7, 12) - 7) as usize]
            [(interferer_sf.clamp(7, 12) - 7) as usize]
    }

    pub fn validate(&self) -> Result<(), Error> {
        if self.co_sf_capture_db <= 0.0 {
            return Err(Error::InvalidConfig("capture threshold must be positive".into()));
        }
        for (ti, row) in self.inter_sf_db.iter().enumerate() {
            for (si, &v) in row.iter().enumerate() {
                if ti != si && !(5.0..=19.5).contains(&v) {
                    return Err(Error::InvalidConfig(format!(
                        "inter-SF rejection [SF{}][SF{}] = {v} outside [5, 19.5] dB",
                        ti + 7,
                        si + 7
                    )));
                }
            }
        }
        if !(0.0..=1.0).contains(&self.payload_collision_survival) {
            return Err(Error::InvalidConfig("payload survival not a probability".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid_and_bounded() {
        let s = SensitivityTable::default();
        s.validate().unwrap();
        assert_eq!(s.rssi_floor(7, 125_000), -123.0);
        assert_eq!(s.rssi_floor(12, 125_000), -137.0);
        assert_eq!(s.rssi_floor(7, 250_000), -120.0);
        assert_eq!(s.snr_floor(12), -20.0);

        let r = RejectionMatrix::default();
        r.validate().unwrap();
        assert_eq!(r.inter_sf(7, 12), 5.0);
        assert_eq!(r.inter_sf(12, 7), 19.5);
    }

    #[test]
    fn zero_interference_always_decodes_at_sensitivity() {
        // With the default noise floor of −117 dBm, any RSSI at or above
        // sensitivity also clears the SNR floor.
        let s = SensitivityTable::default();
        for sf in 7..=12u8 {
            let rssi = s.rssi_floor(sf, 125_000);
            let snr = rssi - (-117.0);
            assert!(snr >= s.snr_floor(sf), "SF{sf}: {snr}");
        }
    }
}
