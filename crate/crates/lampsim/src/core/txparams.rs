//! Transmission parameters and the LoRa time-on-air computation.

use crate::core::datarate::DataRate;
use crate::core::time::Duration;
use crate::Error;
use serde::{Deserialize, Serialize};

/// EU868 default maximum application payload in bytes per data-rate index.
pub const EU868_MAX_PAYLOAD: [u16; 7] = [51, 51, 51, 115, 222, 222, 222];

/// Maximum application payload for a data rate (EU868 regional defaults).
pub fn max_payload(dr: DataRate) -> u16 {
    EU868_MAX_PAYLOAD[dr.index() as usize]
}

/// Forward-error-correction rate 4/(4+n) for n in 1..=4.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub struct CodeRate(u8);

impl CodeRate {
    pub const CR4_5: CodeRate = CodeRate(1);
    pub const CR4_6: CodeRate = CodeRate(2);
    pub const CR4_7: CodeRate = CodeRate(3);
    pub const CR4_8: CodeRate = CodeRate(4);

    pub fn new(n: u8) -> Result<Self, Error> {
        if (1..=4).contains(&n) {
            Ok(CodeRate(n))
        } else {
            Err(Error::InvalidConfig(format!("code rate 4/{} out of range", n + 4)))
        }
    }

    /// The n of 4/(4+n).
    pub const fn redundancy(self) -> u8 {
        self.0
    }
}

impl TryFrom<u8> for CodeRate {
    type Error = Error;
    fn try_from(v: u8) -> Result<Self, Error> {
        CodeRate::new(v)
    }
}

impl From<CodeRate> for u8 {
    fn from(cr: CodeRate) -> u8 {
        cr.0
    }
}

/// Physical-layer parameters of one emission.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TxParams {
    pub sf: u8,
    pub bandwidth_hz: u32,
    pub code_rate: CodeRate,
    pub preamble_symbols: u16,
    pub explicit_header: bool,
    pub crc_on: bool,
    pub payload_len: u16,
    pub power_dbm: i8,
    /// Low-data-rate optimization; hardware default is on for SF11/SF12
    /// at 125 kHz. `None` selects that default.
    pub ldro: Option<bool>,
}

impl TxParams {
    /// Standard LoRaWAN uplink parameters at a given data rate.
    pub fn lorawan(dr: DataRate, payload_len: u16, power_dbm: i8) -> Self {
        TxParams {
            sf: dr.spreading_factor(),
            bandwidth_hz: dr.bandwidth_hz(),
            code_rate: CodeRate::CR4_5,
            preamble_symbols: 8,
            explicit_header: true,
            crc_on: true,
            payload_len,
            power_dbm,
            ldro: None,
        }
    }

    pub fn data_rate(&self) -> Result<DataRate, Error> {
        DataRate::from_sf_bw(self.sf, self.bandwidth_hz)
    }

    fn ldro_enabled(&self) -> bool {
        self.ldro
            .unwrap_or(self.bandwidth_hz == 125_000 && self.sf >= 11)
    }

    fn validate(&self) -> Result<(), Error> {
        if !(7..=12).contains(&self.sf) {
            return Err(Error::InvalidConfig(format!("SF{} out of range", self.sf)));
        }
        if self.bandwidth_hz == 0 {
            return Err(Error::InvalidConfig("zero bandwidth".into()));
        }
        Ok(())
    }
}

/// Symbol duration in microseconds times four (exact for 125/250/500 kHz).
fn quarter_symbol_us(sf: u8, bandwidth_hz: u32) -> u128 {
    // T_sym = 2^SF / BW seconds; a quarter symbol in µs is 2^SF·1e6/(4·BW).
    ((1u128 << sf) * 1_000_000) / (4 * bandwidth_hz as u128)
}

/// Number of payload symbols, including the 8-symbol minimum.
fn payload_symbols(p: &TxParams) -> u64 {
    let pl = p.payload_len as i64;
    let sf = p.sf as i64;
    let crc = if p.crc_on { 1 } else { 0 };
    let implicit = if p.explicit_header { 0 } else { 1 };
    let de = if p.ldro_enabled() { 1 } else { 0 };
    let numer = 8 * pl - 4 * sf + 28 + 16 * crc - 20 * implicit;
    let denom = 4 * (sf - 2 * de);
    let blocks = if numer > 0 {
        (numer + denom - 1) / denom
    } else {
        0
    };
    8 + (blocks as u64) * (p.code_rate.redundancy() as u64 + 4)
}

/// Time on air of the preamble part only: `preamble_symbols + 4.25` symbols.
pub fn preamble_airtime(p: &TxParams) -> Duration {
    let quarters = 4 * p.preamble_symbols as u128 + 17;
    Duration::from_micros((quarters * quarter_symbol_us(p.sf, p.bandwidth_hz)) as u64)
}

/// Full time on air: preamble plus payload symbols.
///
/// Exact in integer microseconds for the 125/250 kHz bandwidths of the
/// EU868 plan. Errors when the payload exceeds the regional maximum for
/// the parameters' data rate.
pub fn airtime(p: &TxParams) -> Result<Duration, Error> {
    p.validate()?;
    if let Ok(dr) = p.data_rate() {
        let max = max_payload(dr);
        if p.payload_len > max {
            return Err(Error::PayloadTooLarge {
                len: p.payload_len,
                max,
                dr: dr.index(),
            });
        }
    }
    let quarters = 4 * p.preamble_symbols as u128 + 17 + 4 * payload_symbols(p) as u128;
    Ok(Duration::from_micros(
        (quarters * quarter_symbol_us(p.sf, p.bandwidth_hz)) as u64,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Independent oracle used to freeze the expected values below and to
    /// cross-check the implementation on random inputs. It computes the
    /// standard symbol-count formula in floating point, from scratch.
    pub(crate) fn airtime_oracle_us(
        sf: u32,
        bw: f64,
        cr: u32,
        preamble: u32,
        explicit_header: bool,
        crc: bool,
        payload: u32,
        ldro: bool,
    ) -> u64 {
        let t_sym_us = (2f64.powi(sf as i32) / bw) * 1e6;
        let ih = if explicit_header { 0.0 } else { 1.0 };
        let crc = if crc { 1.0 } else { 0.0 };
        let de = if ldro { 1.0 } else { 0.0 };
        let numer = 8.0 * payload as f64 - 4.0 * sf as f64 + 28.0 + 16.0 * crc - 20.0 * ih;
        let n_payload = 8.0 + (numer / (4.0 * (sf as f64 - 2.0 * de))).ceil().max(0.0) * (cr + 4) as f64;
        let total_symbols = preamble as f64 + 4.25 + n_payload;
        (total_symbols * t_sym_us).round() as u64
    }

    fn params(
        sf: u8,
        cr: CodeRate,
        preamble: u16,
        explicit: bool,
        crc: bool,
        payload: u16,
    ) -> TxParams {
        TxParams {
            sf,
            bandwidth_hz: 125_000,
            code_rate: cr,
            preamble_symbols: preamble,
            explicit_header: explicit,
            crc_on: crc,
            payload_len: payload,
            power_dbm: 14,
            ldro: None,
        }
    }

    #[test]
    fn symbol_time_sf7_bw125_is_1024_us() {
        // 2^7 / 125000 s = 1.024 ms by definition.
        assert_eq!(quarter_symbol_us(7, 125_000) * 4, 1024);
    }

    #[test]
    fn minimal_sf7_frame() {
        // SF7, CR4/8, 0-byte payload, no preamble, implicit header, no CRC.
        // Frozen from the oracle: 12.25 symbols · 1.024 ms = 12 544 µs.
        let p = params(7, CodeRate::CR4_8, 0, false, false, 0);
        assert_eq!(airtime(&p).unwrap().as_micros(), 12_544);
        assert_eq!(
            airtime_oracle_us(7, 125e3, 4, 0, false, false, 0, false),
            12_544
        );
    }

    #[test]
    fn sf12_frame_with_ldro() {
        // SF12, CR4/8, 16-byte payload, 8-symbol preamble, explicit header,
        // CRC on, LDRO active. Frozen from the oracle: 1 712 128 µs.
        let p = params(12, CodeRate::CR4_8, 8, true, true, 16);
        assert_eq!(airtime(&p).unwrap().as_micros(), 1_712_128);
        assert_eq!(
            airtime_oracle_us(12, 125e3, 4, 8, true, true, 16, true),
            1_712_128
        );
    }

    #[test]
    fn payload_too_large_is_rejected() {
        let p = params(12, CodeRate::CR4_5, 8, true, true, 52);
        assert!(matches!(
            airtime(&p),
            Err(Error::PayloadTooLarge { max: 51, .. })
        ));
    }

    #[test]
    fn airtime_monotone_in_payload_and_sf() {
        let base = params(9, CodeRate::CR4_5, 8, true, true, 10);
        let more = params(9, CodeRate::CR4_5, 8, true, true, 30);
        assert!(airtime(&more).unwrap() > airtime(&base).unwrap());
        let higher_sf = params(10, CodeRate::CR4_5, 8, true, true, 10);
        assert!(airtime(&higher_sf).unwrap() > airtime(&base).unwrap());
    }

    #[test]
    fn preamble_airtime_is_prefix() {
        let p = params(7, CodeRate::CR4_5, 8, true, true, 16);
        let pre = preamble_airtime(&p);
        assert_eq!(pre.as_micros(), 12_544); // 12.25 syms · 1.024 ms
        assert!(pre < airtime(&p).unwrap());
    }

    #[test]
    fn matches_oracle_on_randomized_inputs() {
        let mut rng = crate::rng::SimRng::new(0xA1B2);
        for _ in 0..1000 {
            let sf = 7 + (rng.next_below(6) as u8);
            let bw = if rng.chance(0.5) { 125_000 } else { 250_000 };
            let cr = CodeRate::new(1 + rng.next_below(4) as u8).unwrap();
            let preamble = rng.next_below(64) as u16;
            let explicit = rng.chance(0.5);
            let crc = rng.chance(0.5);
            let dr = DataRate::from_sf_bw(sf, bw);
            let max = dr.map(max_payload).unwrap_or(51);
            let payload = rng.next_below(max as u64 + 1) as u16;
            let p = TxParams {
                sf,
                bandwidth_hz: bw,
                code_rate: cr,
                preamble_symbols: preamble,
                explicit_header: explicit,
                crc_on: crc,
                payload_len: payload,
                power_dbm: 14,
                ldro: None,
            };
            let ldro = bw == 125_000 && sf >= 11;
            let want = airtime_oracle_us(
                sf as u32,
                bw as f64,
                cr.redundancy() as u32,
                preamble as u32,
                explicit,
                crc,
                payload as u32,
                ldro,
            );
            assert_eq!(
                airtime(&p).unwrap().as_micros(),
                want,
                "sf{sf} bw{bw} cr{} pre{preamble} eh{explicit} crc{crc} pl{payload}",
                cr.redundancy()
            );
        }
    }
}
