//! EU868 channel plan, sub-bands and pseudo-random channel hopping.

use crate::core::datarate::DataRate;
use crate::rng::SimRng;
use crate::Error;
use serde::{Deserialize, Serialize};

pub type SubBandId = usize;
pub type ChannelId = usize;

/// One uplink channel entry.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Channel {
    pub frequency_hz: u32,
    pub dr_min: DataRate,
    pub dr_max: DataRate,
    pub sub_band: SubBandId,
}

/// A regulatory sub-band with its duty-cycle fraction (e.g. 0.01 for 1%).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SubBand {
    pub id: SubBandId,
    pub duty_cycle: f64,
}

/// The channel plan shared by devices, gateways and the network server.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelPlan {
    pub uplink: Vec<Channel>,
    pub rx2_frequency_hz: u32,
    pub rx2_dr: DataRate,
    pub rx2_sub_band: SubBandId,
    pub rx1_dr_offset: u8,
    pub sub_bands: Vec<SubBand>,
    /// Indices into `uplink` of the three default (join) channels.
    pub join_channels: Vec<ChannelId>,
    /// Maximum application payload in bytes per data-rate index 0..=6.
    pub max_payload_by_dr: [u16; 7],
}

impl ChannelPlan {
    /// Semtech's default EU868 parameters: 868.1/.3/.5 MHz at 1% duty,
    /// 867.1-867.9 MHz at 0.1%, a 250 kHz channel on 868.3, and the
    /// 869.525 MHz downlink channel at 10%.
    pub fn eu868_default() -> Self {
        let one_percent = 0;
        let tenth_percent = 1;
        let ten_percent = 2;
        let mut uplink = vec![
            Channel {
                frequency_hz: 868_100_000,
                dr_min: DataRate::DR0,
                dr_max: DataRate::DR5,
                sub_band: one_percent,
            },
            Channel {
                frequency_hz: 868_300_000,
                dr_min: DataRate::DR0,
                dr_max: DataRate::DR5,
                sub_band: one_percent,
            },
            Channel {
                frequency_hz: 868_500_000,
                dr_min: DataRate::DR0,
                dr_max: DataRate::DR5,
                sub_band: one_percent,
            },
        ];
        for k in 0..5u32 {
            uplink.push(Channel {
                frequency_hz: 867_100_000 + 200_000 * k,
                dr_min: DataRate::DR0,
                dr_max: DataRate::DR5,
                sub_band: tenth_percent,
            });
        }
        uplink.push(Channel {
            frequency_hz: 868_300_000,
            dr_min: DataRate::DR6,
            dr_max: DataRate::DR6,
            sub_band: one_percent,
        });
        ChannelPlan {
            uplink,
            rx2_frequency_hz: 869_525_000,
            rx2_dr: DataRate::DR0,
            rx2_sub_band: ten_percent,
            rx1_dr_offset: 0,
            sub_bands: vec![
                SubBand {
                    id: one_percent,
                    duty_cycle: 0.01,
                },
                SubBand {
                    id: tenth_percent,
                    duty_cycle: 0.001,
                },
                SubBand {
                    id: ten_percent,
                    duty_cycle: 0.10,
                },
            ],
            join_channels: vec![0, 1, 2],
            max_payload_by_dr: [51, 51, 51, 115, 222, 222, 222],
        }
    }

    /// Maximum application payload for a data rate under this plan.
    pub fn max_payload(&self, dr: DataRate) -> u16 {
        self.max_payload_by_dr[dr.index() as usize]
    }

    pub fn channel(&self, id: ChannelId) -> &Channel {
        &self.uplink[id]
    }

    pub fn sub_band(&self, id: SubBandId) -> &SubBand {
        &self.sub_bands[id]
    }

    pub fn validate(&self) -> Result<(), Error> {
        if self.uplink.is_empty() {
            return Err(Error::InvalidConfig("channel plan has no uplink channels".into()));
        }
        for ch in &self.uplink {
            if !(863_000_000..=870_000_000).contains(&ch.frequency_hz) {
                return Err(Error::InvalidConfig(format!(
                    "uplink frequency {} Hz outside 863-870 MHz",
                    ch.frequency_hz
                )));
            }
            if ch.sub_band >= self.sub_bands.len() {
                return Err(Error::InvalidConfig(format!(
                    "channel {} references unknown sub-band {}",
                    ch.frequency_hz, ch.sub_band
                )));
            }
        }
        for sb in &self.sub_bands {
            if !(sb.duty_cycle > 0.0 && sb.duty_cycle <= 1.0) {
                return Err(Error::InvalidConfig(format!(
                    "sub-band {} duty cycle {} not in (0, 1]",
                    sb.id, sb.duty_cycle
                )));
            }
        }
        for &c in &self.join_channels {
            if c >= self.uplink.len() {
                return Err(Error::InvalidConfig(format!("join channel {c} out of range")));
            }
        }
        if self.rx1_dr_offset > 5 {
            return Err(Error::InvalidConfig(format!(
                "rx1_dr_offset {} > 5",
                self.rx1_dr_offset
            )));
        }
        Ok(())
    }
}

/// Pick the next uplink channel pseudo-randomly among those enabled in
/// `mask`, never repeating `last` when at least two are enabled.
pub fn next_channel(
    rng: &mut SimRng,
    plan: &ChannelPlan,
    mask: &[ChannelId],
    last: Option<ChannelId>,
) -> Result<ChannelId, Error> {
    let candidates: Vec<ChannelId> = mask
        .iter()
        .copied()
        .filter(|&c| c < plan.uplink.len())
        .collect();
    if candidates.is_empty() {
        return Err(Error::NoChannelEnabled);
    }
    if candidates.len() == 1 {
        return Ok(candidates[0]);
    }
    let pool: Vec<ChannelId> = match last {
        Some(l) => candidates.iter().copied().filter(|&c| c != l).collect(),
        None => candidates.clone(),
    };
    let pool = if pool.is_empty() { candidates } else { pool };
    Ok(pool[rng.next_below(pool.len() as u64) as usize])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_plan_matches_table() {
        let plan = ChannelPlan::eu868_default();
        assert_eq!(plan.uplink.len(), 9);
        assert_eq!(plan.uplink[0].frequency_hz, 868_100_000);
        assert_eq!(plan.uplink[3].frequency_hz, 867_100_000);
        assert_eq!(plan.uplink[7].frequency_hz, 867_900_000);
        assert_eq!(plan.uplink[8].dr_min, DataRate::DR6);
        assert_eq!(plan.rx2_frequency_hz, 869_525_000);
        assert_eq!(plan.rx2_dr, DataRate::DR0);
        assert_eq!(plan.sub_band(plan.uplink[0].sub_band).duty_cycle, 0.01);
        assert_eq!(plan.sub_band(plan.uplink[3].sub_band).duty_cycle, 0.001);
        assert_eq!(plan.sub_band(plan.rx2_sub_band).duty_cycle, 0.10);
        assert!(plan.validate().is_ok());
    }

    #[test]
    fn max_payload_table() {
        let plan = ChannelPlan::eu868_default();
        assert_eq!(plan.max_payload(DataRate::DR0), 51);
        assert_eq!(plan.max_payload(DataRate::DR2), 51);
        assert_eq!(plan.max_payload(DataRate::DR5), 222);
    }

    #[test]
    fn single_enabled_channel_is_forced() {
        let plan = ChannelPlan::eu868_default();
        let mut rng = SimRng::new(1);
        assert_eq!(next_channel(&mut rng, &plan, &[2], Some(2)).unwrap(), 2);
    }

    #[test]
    fn empty_mask_is_an_error() {
        let plan = ChannelPlan::eu868_default();
        let mut rng = SimRng::new(1);
        assert!(next_channel(&mut rng, &plan, &[], None).is_err());
    }

    #[test]
    fn hopping_is_uniform_and_avoids_last() {
        let plan = ChannelPlan::eu868_default();
        let mut rng = SimRng::new(99);
        let mask = [0usize, 1, 2];
        let n = 10_000;
        let mut counts = [0u32; 3];
        for _ in 0..n {
            let c = next_channel(&mut rng, &plan, &mask, Some(0)).unwrap();
            assert_ne!(c, 0, "must not repeat the last channel");
            counts[c] += 1;
        }
        for &c in &counts[1..] {
            let freq = c as f64 / n as f64;
            assert!((freq - 0.5).abs() < 0.02, "frequency {freq}");
        }
    }

    #[test]
    fn same_seed_same_draws() {
        let plan = ChannelPlan::eu868_default();
        let mut a = SimRng::stream(5, "chan", &[3]);
        let mut b = SimRng::stream(5, "chan", &[3]);
        for _ in 0..100 {
            assert_eq!(
                next_channel(&mut a, &plan, &[0, 1, 2], Some(1)).unwrap(),
                next_channel(&mut b, &plan, &[0, 1, 2], Some(1)).unwrap()
            );
        }
    }
}
