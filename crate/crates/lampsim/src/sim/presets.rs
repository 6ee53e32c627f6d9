//! The built-in scenario catalog: attack-tuning experiments on a single
//! test node and the 81-lamp long-term overnight runs, with and without an
//! attacker. Distances are desk-scale stand-ins configured as data.

use crate::attacker::{AttackConfig, JoinFloodMode};
use crate::core::{DataRate, Duration, Timestamp};
use crate::device::{Activation, DefectFlags, DeviceProfile, PowerWindow};
use crate::gateway::GatewayConfig;
use crate::netserver::{AdrPolicy, OverloadPolicy};
use crate::radio::Position;
use crate::sim::scenario::{DeviceCohort, Scenario};

fn window(duration: Duration) -> Vec<PowerWindow> {
    vec![PowerWindow { on: Timestamp::ZERO, off: Timestamp::ZERO + duration }]
}

/// Single test node emitting `count` messages of `len` bytes every
/// `period`, confirmed or not, pinned at DR5 with the three default
/// channels.
fn test_node(len: u16, period: Duration, confirmed: bool, duration: Duration) -> DeviceCohort {
    let huge = Duration::from_hours(10_000);
    let mut profile = DeviceProfile::default();
    profile.join_dr_cycle = false; // the test firmware pins DR5 joins
    profile.max_retries = 12;
    if confirmed {
        profile.status_payload = len;
        profile.status_period = period;
        profile.counters_period = huge;
    } else {
        profile.counters_payload = len;
        profile.counters_period = period;
        profile.status_period = huge;
    }
    DeviceCohort {
        count: 1,
        profile,
        defects: DefectFlags::default(),
        activation: Activation::Otaa,
        positions: vec![Position::new(0.0, 0.0)],
        power_windows: window(duration),
        power_stagger: Duration::ZERO,
    }
}

fn attack_tuning_base(name: &str, duration: Duration) -> Scenario {
    let mut sc = Scenario::skeleton(name, 1, duration);
    // Controlled experiments: fixed line-of-sight geometry, no fading.
    sc.link.shadowing_sigma_db = 0.0;
    sc
}

const ATTACK_WARMUP: Timestamp = Timestamp::from_micros(30_000_000);

/// A window long enough for exactly `count` periodic fires.
fn msgs_duration(count: u64, period: Duration) -> Duration {
    Duration::from_micros(period.as_micros() * count + period.as_micros() / 2)
}

/// In-vitro indirect interference: everything on a desk, gateway 3 m away,
/// four plain-LoRa emitters one metre from the node.
fn invitro_indirect() -> Scenario {
    let period = Duration::from_secs(120);
    let duration = msgs_duration(30, period);
    let mut sc = attack_tuning_base("invitro-indirect", duration);
    sc.gateways = vec![GatewayConfig::new("bench", Position::new(4.0, 0.0), &sc.plan)];
    sc.fleet = vec![test_node(16, period, true, duration)];
    sc.attacks = vec![AttackConfig::indirect_interference(
        Position::new(1.0, 0.5),
        ATTACK_WARMUP,
        Timestamp::ZERO + duration,
    )];
    sc
}

/// On-site close-by interference: the node sits ~1.3 km from the main
/// gateway (downlinks around −110 dBm), the interferer boxes 2 m away.
fn onsite_indirect(rx2_preference: bool) -> Scenario {
    let period = Duration::from_secs(120);
    let duration = msgs_duration(30, period);
    let name = if rx2_preference { "onsite-indirect-rx2" } else { "onsite-indirect" };
    let mut sc = attack_tuning_base(name, duration);
    sc.gateways = vec![
        GatewayConfig::new("gratsch", Position::new(1292.0, 0.0), &sc.plan),
        GatewayConfig::new("marling", Position::new(1700.0, 600.0), &sc.plan),
        GatewayConfig::new("labers", Position::new(1500.0, -900.0), &sc.plan),
    ];
    let mut node = test_node(16, period, true, duration);
    node.profile.rx2_preference = rx2_preference;
    sc.fleet = vec![node];
    sc.attacks = vec![AttackConfig::indirect_interference(
        Position::new(2.0, 0.0),
        ATTACK_WARMUP,
        Timestamp::ZERO + duration,
    )];
    sc
}

/// The 10 m-distance experiment: interferer boxes 10 m from the node, the
/// node relatively close in line of sight to the main gateway.
fn indirect_10m() -> Scenario {
    let period = Duration::from_secs(120);
    let duration = msgs_duration(30, period);
    let mut sc = attack_tuning_base("indirect-10m", duration);
    sc.gateways = vec![
        GatewayConfig::new("gratsch", Position::new(37.0, 0.0), &sc.plan),
        GatewayConfig::new("marling", Position::new(1700.0, 600.0), &sc.plan),
        GatewayConfig::new("labers", Position::new(1500.0, -900.0), &sc.plan),
    ];
    sc.fleet = vec![test_node(16, period, true, duration)];
    sc.attacks = vec![AttackConfig::indirect_interference(
        Position::new(-10.0, 0.0),
        ATTACK_WARMUP,
        Timestamp::ZERO + duration,
    )];
    sc
}

/// Intentional obstruction: eight 0-byte jammers right next to the node.
fn direct_jam(len: u16, jammed: bool) -> Scenario {
    let period = Duration::from_secs(60);
    let duration = msgs_duration(30, period);
    let name = if jammed {
        match len {
            1 => "direct-jam-1",
            16 => "direct-jam-16",
            _ => "direct-jam-51",
        }
    } else {
        "direct-jam-baseline"
    };
    let mut sc = attack_tuning_base(name, duration);
    sc.gateways = vec![GatewayConfig::new("gratsch", Position::new(150.0, 0.0), &sc.plan)];
    sc.fleet = vec![test_node(len, period, false, duration)];
    if jammed {
        sc.attacks = vec![AttackConfig::direct_jam(
            &sc.plan,
            Position::new(2.0, 0.0),
            ATTACK_WARMUP,
            Timestamp::ZERO + duration,
        )];
    }
    sc
}

/// Channel exhaustion: LoRaWAN-compliant flooding from registered nodes.
fn channel_exhaust() -> Scenario {
    let period = Duration::from_secs(60);
    let duration = msgs_duration(30, period);
    let mut sc = attack_tuning_base("channel-exhaust", duration);
    sc.gateways = vec![GatewayConfig::new("gratsch", Position::new(300.0, 0.0), &sc.plan)];
    sc.fleet = vec![test_node(16, period, true, duration)];
    let mut attack = AttackConfig::channel_exhaust(
        Position::new(2.0, 0.0),
        ATTACK_WARMUP,
        Timestamp::ZERO + duration,
    );
    attack.position = Position::new(2.0, 0.0);
    sc.attacks = vec![attack];
    sc
}

/// Gateway exhaustion: preamble flooders far out, binding demodulator
/// paths without overpowering the node's signal.
fn gw_exhaust() -> Scenario {
    let period = Duration::from_secs(60);
    let duration = msgs_duration(30, period);
    let mut sc = attack_tuning_base("gw-exhaust", duration);
    sc.gateways = vec![GatewayConfig::new("gratsch", Position::new(0.0, 0.0), &sc.plan)];
    let mut node = test_node(16, period, false, duration);
    node.positions = vec![Position::new(300.0, 0.0)];
    sc.fleet = vec![node];
    sc.attacks = vec![AttackConfig::preamble_flood(
        Position::new(2000.0, 0.0),
        ATTACK_WARMUP,
        Timestamp::ZERO + duration,
    )];
    sc
}

/// Join floods in all four credential modes.
fn join_flood(mode: JoinFloodMode) -> Scenario {
    let period = Duration::from_secs(120);
    let duration = msgs_duration(30, period);
    let name = match mode {
        JoinFloodMode::OtaaValid => "join-flood-otaa-valid",
        JoinFloodMode::OtaaInvalid => "join-flood-otaa-invalid",
        JoinFloodMode::AbpValid => "join-flood-abp-valid",
        JoinFloodMode::AbpInvalid => "join-flood-abp-invalid",
    };
    let mut sc = attack_tuning_base(name, duration);
    sc.gateways = vec![
        GatewayConfig::new("gratsch", Position::new(1292.0, 0.0), &sc.plan),
        GatewayConfig::new("marling", Position::new(1700.0, 500.0), &sc.plan),
    ];
    sc.fleet = vec![test_node(16, period, true, duration)];
    sc.attacks = vec![AttackConfig::join_flood(
        mode,
        Position::new(2.0, 0.0),
        ATTACK_WARMUP,
        Timestamp::ZERO + duration,
    )];
    if mode == JoinFloodMode::OtaaValid {
        sc.server.overload = Some(OverloadPolicy::default());
    }
    sc
}

/// Jam a gateway's vicinity, with or without a second gateway in range.
fn jam_gateway(redundant: bool) -> Scenario {
    let period = Duration::from_secs(60);
    let duration = msgs_duration(30, period);
    let name = if redundant { "jam-gw-redundant" } else { "jam-gw-single" };
    let mut sc = attack_tuning_base(name, duration);
    sc.gateways = vec![GatewayConfig::new("gratsch", Position::new(400.0, 0.0), &sc.plan)];
    if redundant {
        sc.gateways.push(GatewayConfig::new(
            "marling",
            Position::new(-200.0, 0.0),
            &sc.plan,
        ));
    }
    sc.fleet = vec![test_node(16, period, false, duration)];
    sc.attacks = vec![AttackConfig::direct_jam(
        &sc.plan,
        Position::new(405.0, 0.0),
        ATTACK_WARMUP,
        Timestamp::ZERO + duration,
    )];
    sc
}

/// The six-gateway, 81-lamp deployment for the overnight runs. Lamps
/// cluster in cells around their gateways; the defective 25-lamp cohort
/// carries the old firmware (DR0 reset, lost counter trigger, ignored
/// confirmations, join back-off violation).
fn longterm(policy: &str, attacked: bool) -> Scenario {
    let duration = Duration::from_hours(11);
    let name = format!(
        "longterm-{policy}{}",
        if attacked { "-attacked" } else { "" }
    );
    let mut sc = Scenario::skeleton(&name, 1, duration);
    // Hilly terrain: steeper loss, milder fading than the bench presets.
    sc.link.path_loss_exponent = 3.2;
    sc.link.shadowing_sigma_db = 2.0;
    sc.server.adr = match policy {
        "adr6" => AdrPolicy::limited_range(),
        "fixed-sf7" => AdrPolicy::fixed_dr5(),
        "fixed-adr1" => AdrPolicy::fixed_adr1(),
        _ => AdrPolicy::server_default(),
    };
    // The main gateway sits across the valley from the town cluster.
    let gw_pos = [
        Position::new(0.0, 0.0),      // gratsch (main)
        Position::new(4200.0, 300.0), // marling
        Position::new(4900.0, 950.0), // labers
        Position::new(4700.0, -640.0),
        Position::new(3900.0, -780.0),
        Position::new(5300.0, 140.0),
    ];
    let names = ["gratsch", "marling", "labers", "untermais", "sinigo", "quarazze"];
    sc.gateways = names
        .iter()
        .zip(gw_pos.iter())
        .map(|(n, p)| GatewayConfig::new(n, *p, &sc.plan))
        .collect();
    // Unsynchronized gateway clocks, ±5 s.
    for (g, gw) in sc.gateways.iter_mut().enumerate() {
        gw.clock_offset_us =
            [-4_800_000i64, 3_100_000, -1_700_000, 4_500_000, -3_900_000, 900_000][g];
    }
    // Lamps ring their cell gateway at 350-700 m, round-robin across cells
    // so every cohort spreads over the whole town. Four of the lamps still
    // running the join-violating firmware stand together along the road
    // where the attacker's test boxes end up.
    let cluster = [
        Position::new(435.0, -75.0),
        Position::new(480.0, -120.0),
        Position::new(420.0, -135.0),
        Position::new(468.0, -58.0),
    ];
    let positions: Vec<Position> = (0..81usize)
        .map(|i| match i {
            73 => cluster[0],
            74 => cluster[1],
            75 => cluster[2],
            76 => cluster[3],
            _ => {
                let gw = gw_pos[i % 6];
                let r = 350.0 + ((i * 37) % 350) as f64;
                let theta = i as f64 * 2.399963;
                Position::new(gw.x_m + r * theta.cos(), gw.y_m + r * theta.sin())
            }
        })
        .collect();
    let on = Timestamp::from_micros(300_000_000);
    let off = on + Duration::from_hours(10);
    let night = vec![PowerWindow { on, off }];
    // Every lamp resets to DR0 after the join. The 25 daily-counter lamps
    // additionally never retransmit, ignore ADR and lose their counter
    // trigger at power-down; eight of them still run the firmware that
    // violates the join back-off.
    let defects = DefectFlags { reset_dr0_after_join: true, ..Default::default() };
    let old_firmware = DefectFlags {
        reset_dr0_after_join: true,
        ignore_ack_and_adr: true,
        counters_trigger_lost_on_powerdown: true,
        join_backoff_violation: false,
    };
    let oldest_firmware = DefectFlags {
        join_backoff_violation: true,
        ..old_firmware
    };
    let mk_profile = |status_min: u64, counters_min: u64, channels: usize| {
        let mut p = DeviceProfile::default();
        p.status_period = Duration::from_mins(status_min);
        p.counters_period = Duration::from_mins(counters_min);
        p.enabled_channels = (0..channels).collect();
        p
    };
    let stagger = Duration::from_secs(120);
    // Current-firmware lamps learned the five extra channels at
    // provisioning; the old-firmware cohort still runs the three defaults.
    let cohorts = [
        (21usize, mk_profile(15, 30, 8), defects),
        (20, mk_profile(20, 60, 8), defects),
        (15, mk_profile(30, 120, 8), defects),
        (17, mk_profile(60, 1440, 3), old_firmware),
        (8, mk_profile(60, 1440, 3), oldest_firmware),
    ];
    let mut taken = 0usize;
    sc.fleet = cohorts
        .into_iter()
        .map(|(count, profile, defects)| {
            let cohort = DeviceCohort {
                count,
                profile,
                defects,
                activation: Activation::Otaa,
                positions: positions[taken..taken + count].to_vec(),
                power_windows: night.clone(),
                power_stagger: stagger,
            };
            taken += count;
            cohort
        })
        .collect();
    if attacked {
        // Test boxes on the road through the main gateway's cell, right by
        // the old-firmware lamp cluster.
        sc.attacks = vec![AttackConfig::direct_jam(
            &sc.plan,
            Position::new(450.0, -110.0),
            Timestamp::ZERO,
            Timestamp::ZERO + duration,
        )];
    }
    sc
}

/// Every named preset.
pub fn scenario_presets() -> Vec<Scenario> {
    let mut out = vec![
        invitro_indirect(),
        onsite_indirect(false),
        onsite_indirect(true),
        indirect_10m(),
        direct_jam(16, false),
        direct_jam(1, true),
        direct_jam(16, true),
        direct_jam(51, true),
        channel_exhaust(),
        gw_exhaust(),
        join_flood(JoinFloodMode::OtaaValid),
        join_flood(JoinFloodMode::OtaaInvalid),
        join_flood(JoinFloodMode::AbpValid),
        join_flood(JoinFloodMode::AbpInvalid),
        jam_gateway(true),
        jam_gateway(false),
    ];
    for policy in ["default", "adr6", "fixed-sf7", "fixed-adr1"] {
        out.push(longterm(policy, false));
        out.push(longterm(policy, true));
    }
    out
}

/// Look a preset up by name, e.g. `longterm-default-attacked`.
pub fn preset(name: &str) -> Option<Scenario> {
    scenario_presets().into_iter().find(|s| s.name == name)
}

/// The names in catalog order.
pub fn preset_names() -> Vec<String> {
    scenario_presets().into_iter().map(|s| s.name).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::attacker::AttackKind;

    #[test]
    fn all_presets_validate() {
        for sc in scenario_presets() {
            let diags = sc.diagnostics();
            assert!(diags.is_empty(), "{}: {diags:?}", sc.name);
        }
    }

    #[test]
    fn longterm_has_81_lamps_and_6_gateways() {
        let sc = preset("longterm-default").unwrap();
        assert_eq!(sc.device_count(), 81);
        assert_eq!(sc.gateways.len(), 6);
        // 25 daily-trigger defective lamps.
        let daily: usize = sc
            .fleet
            .iter()
            .filter(|c| c.defects.counters_trigger_lost_on_powerdown)
            .map(|c| c.count)
            .sum();
        assert_eq!(daily, 25);
    }

    #[test]
    fn direct_jam_preset_has_eight_jammers() {
        let sc = preset("direct-jam-16").unwrap();
        match &sc.attacks[0].kind {
            AttackKind::DirectJam { frequencies, .. } => assert_eq!(frequencies.len(), 8),
            k => panic!("unexpected kind {k:?}"),
        }
    }

    #[test]
    fn indirect_10m_geometry() {
        let sc = preset("indirect-10m").unwrap();
        let node = sc.fleet[0].positions[0];
        let attacker = sc.attacks[0].position;
        assert!((node.distance_to(&attacker) - 10.0).abs() < 1e-9);
        // The node is nearer to the main gateway than to the others.
        let d_main = node.distance_to(&sc.gateways[0].position);
        assert!(d_main < 100.0);
    }
}
