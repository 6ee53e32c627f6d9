//! Reception resolution: sensitivity, aggregate SNR, capture and the
//! header/payload collision rules.

use crate::radio::tables::{RejectionMatrix, SensitivityTable};
use crate::rng::SimRng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LossReason {
    BelowSensitivity,
    HeaderCollision,
    PayloadCollision,
    InterSfSwamped,
    DemodBusy,
    OffChannel,
}

impl LossReason {
    pub fn tag(self) -> &'static str {
        match self {
            LossReason::BelowSensitivity => "below-sensitivity",
            LossReason::HeaderCollision => "header-collision",
            LossReason::PayloadCollision => "payload-collision",
            LossReason::InterSfSwamped => "inter-sf-swamped",
            LossReason::DemodBusy => "demod-busy",
            LossReason::OffChannel => "off-channel",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Decoded,
    Lost(LossReason),
}

impl Verdict {
    pub fn is_decoded(self) -> bool {
        self == Verdict::Decoded
    }
}

/// The decoded/lost verdict with the signal figures the receiver measured.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReceptionOutcome {
    pub verdict: Verdict,
    pub rssi_dbm: f64,
    pub snr_db: f64,
}

/// How the resolver sees the frame being decoded.
#[derive(Debug, Clone, Copy)]
pub struct TargetView {
    pub uid: u64,
    pub sf: u8,
    pub bandwidth_hz: u32,
}

/// One interfering emission overlapping the target on air.
#[derive(Debug, Clone, Copy)]
pub struct Interference {
    pub uid: u64,
    pub sf: u8,
    /// Power of the interferer at the receiver, before spectral scaling.
    pub rssi_dbm: f64,
    /// Spectral overlap fraction with respect to the target's bandwidth.
    pub overlap: f64,
    /// Whether the interferer's on-air interval touches the target's
    /// preamble+header region (as opposed to payload only).
    pub overlaps_header: bool,
}

/// Seeded per-frame-pair draws used by the collision rules. Keying draws by
/// the (target, interferer) pair keeps verdicts independent of how many
/// other interferers are present.
#[derive(Debug, Clone, Copy)]
pub struct CollisionDraws {
    pub seed: u64,
}

impl CollisionDraws {
    fn unit(&self, domain: &str, target: u64, interferer: u64) -> f64 {
        SimRng::keyed_unit(self.seed, domain, &[target, interferer])
    }

    fn alignment_attenuation_db(&self, target: u64, interferer: u64, max_db: f64) -> f64 {
        if max_db <= 0.0 {
            0.0
        } else {
            self.unit("align", target, interferer) * max_db
        }
    }

    fn payload_survives(&self, target: u64, interferer: u64, p: f64) -> bool {
        self.unit("payload", target, interferer) < p
    }
}

pub fn dbm_to_mw(dbm: f64) -> f64 {
    10f64.powf(dbm / 10.0)
}

pub fn mw_to_dbm(mw: f64) -> f64 {
    10.0 * mw.log10()
}

const FULL_OVERLAP: f64 = 0.999;

/// Resolve whether `target`, received at `rssi_dbm`, decodes against the
/// given interferers. Rules, in order:
///
/// 1. below receiver sensitivity → lost;
/// 2. SNR against the aggregate interference (spectral-overlap-scaled,
///    different-SF contributions suppressed by the rejection matrix,
///    summed in linear power) under the per-SF floor → lost;
/// 3. a co-SF co-channel interferer inside the capture threshold that
///    touches the preamble+header region → certain loss;
/// 4. a co-SF co-channel interferer inside the capture threshold touching
///    only the payload → survives with the configured probability;
/// 5. co-SF interferers below the capture threshold are captured over;
/// 6. a different-SF (or partially overlapping) interferer kills the frame
///    only when its effective power exceeds the target by the rejection
///    threshold for the SF pair.
pub fn resolve_reception(
    target: &TargetView,
    rssi_dbm: f64,
    interferers: &[Interference],
    sens: &SensitivityTable,
    rej: &RejectionMatrix,
    noise_floor_dbm: f64,
    draws: &CollisionDraws,
) -> ReceptionOutcome {
    // Effective power per interferer after spectral scaling and alignment
    // jitter; `suppressed` additionally removes the inter-SF rejection gain
    // and is what enters the aggregate SNR.
    struct Eff {
        idx: usize,
        effective_dbm: f64,
        suppressed_dbm: f64,
    }
    let mut effs: Vec<Eff> = Vec::with_capacity(interferers.len());
    for (idx, i) in interferers.iter().enumerate() {
        if i.overlap <= 0.0 {
            continue;
        }
        let mut eff = i.rssi_dbm + 10.0 * i.overlap.log10();
        if i.overlap < FULL_OVERLAP {
            eff -= draws.alignment_attenuation_db(target.uid, i.uid, rej.partial_overlap_jitter_db);
        }
        let suppressed = if i.sf != target.sf {
            eff - rej.inter_sf(target.sf, i.sf)
        } else {
            eff
        };
        effs.push(Eff {
            idx,
            effective_dbm: eff,
            suppressed_dbm: suppressed,
        });
    }

    let interference_mw: f64 = effs.iter().map(|e| dbm_to_mw(e.suppressed_dbm)).sum();
    let snr_db = rssi_dbm - mw_to_dbm(dbm_to_mw(noise_floor_dbm) + interference_mw);
    let outcome = |verdict| ReceptionOutcome {
        verdict,
        rssi_dbm,
        snr_db,
    };

    // Rule 1: sensitivity.
    if rssi_dbm < sens.rssi_floor(target.sf, target.bandwidth_hz) {
        return outcome(Verdict::Lost(LossReason::BelowSensitivity));
    }

    // Rule 2: aggregate SNR under the demodulation floor.
    if snr_db < sens.snr_floor(target.sf) {
        let dominant = effs
            .iter()
            .max_by(|a, b| a.suppressed_dbm.total_cmp(&b.suppressed_dbm))
            .map(|e| &interferers[e.idx]);
        let reason = match dominant {
            Some(d) if d.sf == target.sf => {
                if d.overlaps_header {
                    LossReason::HeaderCollision
                } else {
                    LossReason::PayloadCollision
                }
            }
            _ => LossReason::InterSfSwamped,
        };
        return outcome(Verdict::Lost(reason));
    }

    // Rule 3: co-SF co-channel header collision.
    for e in &effs {
        let i = &interferers[e.idx];
        if i.sf == target.sf
            && i.overlap >= FULL_OVERLAP
            && rssi_dbm - i.rssi_dbm < rej.co_sf_capture_db
            && i.overlaps_header
        {
            return outcome(Verdict::Lost(LossReason::HeaderCollision));
        }
    }

    // Rule 4: co-SF payload-only collisions, each survived independently.
    for e in &effs {
        let i = &interferers[e.idx];
        if i.sf == target.sf
            && i.overlap >= FULL_OVERLAP
            && rssi_dbm - i.rssi_dbm < rej.co_sf_capture_db
            && !i.overlaps_header
            && !draws.payload_survives(target.uid, i.uid, rej.payload_collision_survival)
        {
            return outcome(Verdict::Lost(LossReason::PayloadCollision));
        }
    }

    // Rule 6: inter-SF (or partially overlapping co-SF) rejection.
    for e in &effs {
        let i = &interferers[e.idx];
        let threshold = if i.sf != target.sf {
            rej.inter_sf(target.sf, i.sf)
        } else if i.overlap < FULL_OVERLAP {
            rej.co_sf_capture_db
        } else {
            continue; // co-SF co-channel handled by rules 3-5
        };
        if e.effective_dbm >= rssi_dbm + threshold {
            return outcome(Verdict::Lost(LossReason::InterSfSwamped));
        }
    }

    outcome(Verdict::Decoded)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn target() -> TargetView {
        TargetView {
            uid: 1,
            sf: 7,
            bandwidth_hz: 125_000,
        }
    }

    fn co_sf(rssi: f64, header: bool) -> Interference {
        Interference {
            uid: 100,
            sf: 7,
            rssi_dbm: rssi,
            overlap: 1.0,
            overlaps_header: header,
        }
    }

    fn resolve(t: &TargetView, rssi: f64, ints: &[Interference]) -> ReceptionOutcome {
        resolve_reception(
            t,
            rssi,
            ints,
            &SensitivityTable::default(),
            &RejectionMatrix::default(),
            -117.0,
            &CollisionDraws { seed: 11 },
        )
    }

    #[test]
    fn clean_reception_decodes() {
        let o = resolve(&target(), -100.0, &[]);
        assert_eq!(o.verdict, Verdict::Decoded);
        assert_eq!(o.rssi_dbm, -100.0);
        assert!((o.snr_db - 17.0).abs() < 1e-9);
    }

    #[test]
    fn below_sensitivity_is_lost() {
        let o = resolve(&target(), -123.5, &[]);
        assert_eq!(o.verdict, Verdict::Lost(LossReason::BelowSensitivity));
    }

    #[test]
    fn weak_interferer_of_any_sf_is_harmless() {
        // 15 dB below the target: resilient to any CSS-based interference
        // with weaker power.
        for sf in 7..=12u8 {
            let i = Interference {
                uid: 50 + sf as u64,
                sf,
                rssi_dbm: -95.0,
                overlap: 1.0,
                overlaps_header: true,
            };
            let o = resolve(&target(), -80.0, &[i]);
            assert_eq!(o.verdict, Verdict::Decoded, "SF{sf}");
        }
    }

    #[test]
    fn strong_co_sf_header_collision_is_certain_loss() {
        let o = resolve(&target(), -90.0, &[co_sf(-80.0, true)]);
        assert_eq!(o.verdict, Verdict::Lost(LossReason::HeaderCollision));
    }

    #[test]
    fn payload_only_collision_survives_ninety_percent() {
        let mut survived = 0u32;
        let n = 10_000;
        for k in 0..n {
            let t = TargetView {
                uid: 2 * k as u64,
                sf: 7,
                bandwidth_hz: 125_000,
            };
            let i = Interference {
                uid: 2 * k as u64 + 1,
                sf: 7,
                rssi_dbm: -90.5, // comparable power, inside capture threshold
                overlap: 1.0,
                overlaps_header: false,
            };
            if resolve(&t, -90.0, &[i]).verdict.is_decoded() {
                survived += 1;
            }
        }
        let frac = survived as f64 / n as f64;
        assert!((frac - 0.9).abs() < 0.02, "survival {frac}");
    }

    #[test]
    fn different_sf_below_rejection_threshold_decodes() {
        // SF7 target, SF12 interferer 3 dB stronger: below the 5 dB floor
        // of the rejection matrix.
        let i = Interference {
            uid: 9,
            sf: 12,
            rssi_dbm: -87.0,
            overlap: 1.0,
            overlaps_header: true,
        };
        let o = resolve(&target(), -90.0, &[i]);
        assert_eq!(o.verdict, Verdict::Decoded);
    }

    #[test]
    fn different_sf_above_rejection_threshold_swamps() {
        let i = Interference {
            uid: 9,
            sf: 12,
            rssi_dbm: -84.0, // 6 dB stronger ≥ 5 dB threshold
            overlap: 1.0,
            overlaps_header: true,
        };
        let o = resolve(&target(), -90.0, &[i]);
        assert_eq!(o.verdict, Verdict::Lost(LossReason::InterSfSwamped));
    }

    #[test]
    fn capture_is_asymmetric() {
        // A at −80, B at −90, co-SF co-channel full overlap. A decodes, B not.
        let a = TargetView {
            uid: 1,
            sf: 7,
            bandwidth_hz: 125_000,
        };
        let b = TargetView {
            uid: 2,
            sf: 7,
            bandwidth_hz: 125_000,
        };
        let from_b = Interference {
            uid: 2,
            sf: 7,
            rssi_dbm: -90.0,
            overlap: 1.0,
            overlaps_header: true,
        };
        let from_a = Interference {
            uid: 1,
            sf: 7,
            rssi_dbm: -80.0,
            overlap: 1.0,
            overlaps_header: true,
        };
        assert!(resolve(&a, -80.0, &[from_b]).verdict.is_decoded());
        assert!(!resolve(&b, -90.0, &[from_a]).verdict.is_decoded());
    }

    #[test]
    fn snr_decreases_with_interference_but_rssi_does_not() {
        let one = resolve(&target(), -90.0, &[co_sf(-96.5, true)]);
        let two = resolve(
            &target(),
            -90.0,
            &[co_sf(-96.5, true), {
                let mut i = co_sf(-96.5, true);
                i.uid = 101;
                i
            }],
        );
        assert!(two.snr_db < one.snr_db);
        assert_eq!(one.rssi_dbm, two.rssi_dbm);
    }

    #[test]
    fn removing_an_interferer_never_hurts() {
        // Randomized monotonicity check with stable per-pair draws.
        let mut rng = crate::rng::SimRng::new(0xBEEF);
        for trial in 0..500 {
            let t = TargetView {
                uid: trial,
                sf: 7 + (rng.next_below(6) as u8),
                bandwidth_hz: 125_000,
            };
            let rssi = rng.uniform(-120.0, -60.0);
            let n = 1 + rng.next_below(4) as usize;
            let ints: Vec<Interference> = (0..n)
                .map(|k| Interference {
                    uid: 1000 + trial * 10 + k as u64,
                    sf: 7 + (rng.next_below(6) as u8),
                    rssi_dbm: rng.uniform(-130.0, -50.0),
                    overlap: if rng.chance(0.5) { 1.0 } else { rng.uniform(0.1, 0.9) },
                    overlaps_header: rng.chance(0.5),
                })
                .collect();
            if !resolve(&t, rssi, &ints).verdict.is_decoded() {
                continue;
            }
            for skip in 0..n {
                let fewer: Vec<Interference> = ints
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| *i != skip)
                    .map(|(_, v)| *v)
                    .collect();
                assert!(
                    resolve(&t, rssi, &fewer).verdict.is_decoded(),
                    "removing interferer {skip} flipped a decoded frame to lost"
                );
            }
        }
    }
}
