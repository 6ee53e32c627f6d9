//! EU868 data-rate indices and their SF/bandwidth mapping.

use crate::Error;
use serde::{Deserialize, Serialize};

/// A LoRaWAN EU868 data rate. Index 0 is SF12/125 kHz, 5 is SF7/125 kHz and
/// 6 is SF7/250 kHz; spreading factor strictly decreases from index 0 to 5.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub struct DataRate(u8);

impl DataRate {
    pub const DR0: DataRate = DataRate(0);
    pub const DR1: DataRate = DataRate(1);
    pub const DR2: DataRate = DataRate(2);
    pub const DR3: DataRate = DataRate(3);
    pub const DR4: DataRate = DataRate(4);
    pub const DR5: DataRate = DataRate(5);
    pub const DR6: DataRate = DataRate(6);

    pub fn new(index: u8) -> Result<Self, Error> {
        if index <= 6 {
            Ok(DataRate(index))
        } else {
            Err(Error::InvalidDataRate(index))
        }
    }

    pub const fn index(self) -> u8 {
        self.0
    }

    pub const fn spreading_factor(self) -> u8 {
        match self.0 {
            6 => 7,
            i => 12 - i,
        }
    }

    pub const fn bandwidth_hz(self) -> u32 {
        if self.0 == 6 {
            250_000
        } else {
            125_000
        }
    }

    /// Inverse of the index ↔ (SF, BW) mapping.
    pub fn from_sf_bw(sf: u8, bandwidth_hz: u32) -> Result<Self, Error> {
        match (sf, bandwidth_hz) {
            (7, 250_000) => Ok(DataRate(6)),
            (7..=12, 125_000) => Ok(DataRate(12 - sf)),
            _ => Err(Error::InvalidSfBw { sf, bandwidth_hz }),
        }
    }

    /// Step the index down (slower, more robust), clamped at 0.
    pub fn slower(self, steps: u8) -> DataRate {
        DataRate(self.0.saturating_sub(steps).min(5))
    }
}

impl TryFrom<u8> for DataRate {
    type Error = Error;
    fn try_from(v: u8) -> Result<Self, Error> {
        DataRate::new(v)
    }
}

impl From<DataRate> for u8 {
    fn from(dr: DataRate) -> u8 {
        dr.0
    }
}

impl std::fmt::Display for DataRate {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "DR{}(SF{})", self.0, self.spreading_factor())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_mapping() {
        assert_eq!(DataRate::DR0.spreading_factor(), 12);
        assert_eq!(DataRate::DR5.spreading_factor(), 7);
        assert_eq!(DataRate::DR5.bandwidth_hz(), 125_000);
        assert_eq!(DataRate::DR6.spreading_factor(), 7);
        assert_eq!(DataRate::DR6.bandwidth_hz(), 250_000);
    }

    #[test]
    fn bijection_round_trips() {
        for i in 0..=5u8 {
            let dr = DataRate::new(i).unwrap();
            let back = DataRate::from_sf_bw(dr.spreading_factor(), dr.bandwidth_hz()).unwrap();
            assert_eq!(back, dr);
        }
        // SF strictly decreases across indices 0..=5.
        for i in 0..5u8 {
            let a = DataRate::new(i).unwrap().spreading_factor();
            let b = DataRate::new(i + 1).unwrap().spreading_factor();
            assert!(a > b);
        }
    }

    #[test]
    fn rejects_out_of_range() {
        assert!(DataRate::new(7).is_err());
        assert!(DataRate::from_sf_bw(6, 125_000).is_err());
        assert!(DataRate::from_sf_bw(8, 250_000).is_err());
    }
}
