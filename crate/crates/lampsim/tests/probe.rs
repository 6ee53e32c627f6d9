//! Scratch calibration probe (not part of the acceptance gate).

use lampsim::sim::{coverage_report, preset, rtt_mean_s, rtt_series, run};

fn probe(name: &str, seed: u64) {
    let mut sc = preset(name).unwrap();
    sc.seed = seed;
    let t0 = std::time::Instant::now();
    let log = run(&sc).unwrap();
    let r = coverage_report(&log, &sc);
    let series = rtt_series(&log, 0);
    let rtt = rtt_mean_s(&series);
    println!(
        "{name} seed={seed}: wall={:?} records={} status {}/{} acked={} counters {}/{} boot {}/{} rtt_mean={:?} losses={} retx={}",
        t0.elapsed(),
        log.records.len(),
        r.status.received,
        r.status.expected,
        r.status.acked,
        r.counters.received,
        r.counters.expected,
        r.boot.received,
        r.boot.expected,
        rtt,
        r.rtt_losses,
        r.retransmissions,
    );
}

#[test]
#[ignore]
fn probe_attacks() {
    for name in [
        "direct-jam-baseline",
        "direct-jam-16",
        "onsite-indirect",
        "onsite-indirect-rx2",
        "indirect-10m",
        "gw-exhaust",
        "join-flood-abp-valid",
        "join-flood-otaa-invalid",
        "join-flood-otaa-valid",
        "jam-gw-redundant",
        "jam-gw-single",
        "channel-exhaust",
        "invitro-indirect",
    ] {
        probe(name, 1);
    }
}

#[test]
#[ignore]
fn probe_longterm() {
    for name in ["longterm-default", "longterm-default-attacked"] {
        let mut sc = preset(name).unwrap();
        sc.seed = 1;
        let t0 = std::time::Instant::now();
        let log = run(&sc).unwrap();
        let r = coverage_report(&log, &sc);
        println!(
            "{name}: wall={:?} records={} boot_dev={} spread={:?} status={:.1}% ({} of {}) counters={:.1}% cdev={} gw2dev={} gw2msg={:.1}% retx={}",
            t0.elapsed(),
            log.records.len(),
            r.boot.devices_heard,
            r.boot_spread.map(|d| d.as_secs_f64()),
            r.status.coverage_pct(),
            r.status.received,
            r.status.expected,
            r.counters.coverage_pct(),
            r.counters.devices_heard,
            r.gw2_devices,
            r.gw2_message_pct,
            r.retransmissions,
        );
    }
}

#[test]
#[ignore]
fn probe_boot_detail() {
    use lampsim::device::{DeviceEvent, MessageKind};
    use lampsim::netserver::ServerEvent;
    use lampsim::sim::Record;
    for name in ["longterm-default", "longterm-default-attacked"] {
        let mut sc = preset(name).unwrap();
        sc.seed = 1;
        let log = run(&sc).unwrap();
        let mut boots: Vec<(f64, u32)> = Vec::new();
        let mut join_attempts = vec![0u32; 81];
        let mut joined_at = vec![None::<f64>; 81];
        for r in log.iter() {
            match &r.body {
                Record::Server(ServerEvent::UplinkReceived { device, kind: MessageKind::Boot, .. }) => {
                    if !boots.iter().any(|(_, d)| *d == device.0) {
                        boots.push((r.t.as_secs_f64(), device.0));
                    }
                }
                Record::Device { device, event: DeviceEvent::JoinRequested { .. } } => {
                    join_attempts[*device] += 1;
                }
                Record::Device { device, event: DeviceEvent::Joined { .. } } => {
                    if joined_at[*device].is_none() {
                        joined_at[*device] = Some(r.t.as_secs_f64());
                    }
                }
                _ => {}
            }
        }
        boots.sort_by(|a, b| a.0.total_cmp(&b.0));
        println!("== {name}: {} boots, first {:?} last5 {:?}", boots.len(),
            &boots[..3.min(boots.len())], &boots[boots.len().saturating_sub(5)..]);
        // gratsch cell = device indices ≡ 0 mod 6
        let mut cell: Vec<(usize, u32, Option<f64>)> = (0..81)
            .filter(|i| i % 6 == 0)
            .map(|i| (i, join_attempts[i], joined_at[i]))
            .collect();
        cell.sort_by_key(|(_, _, j)| j.map(|s| s as u64));
        println!("  gratsch cell (idx, join_attempts, joined_at): {cell:?}");
        let unjoined: Vec<usize> = (0..81).filter(|&i| joined_at[i].is_none()).collect();
        println!("  never joined: {unjoined:?}");
    }
}

#[test]
#[ignore]
fn probe_lamp13() {
    use lampsim::sim::{Record, Receiver};
    let mut sc = preset("longterm-default").unwrap();
    sc.seed = 1;
    let log = run(&sc).unwrap();
    let mut shown = 0;
    for r in log.iter() {
        let t = r.t.as_secs_f64();
        let keep = match &r.body {
            Record::Device { device: 13, .. } => true,
            Record::Emission { emitter: 13, .. } => true,
            Record::Reception { receiver: Receiver::Device(13), .. } => true,
            Record::DownlinkTx { device: 13, .. } => true,
            Record::DownlinkDropped { device: 13, .. } => true,
            _ => false,
        };
        if keep && shown < 40 {
            println!("{t:10.3} seq={} {:?}", r.seq, r.body);
            shown += 1;
        }
    }
}

#[test]
#[ignore]
fn probe_clean_late() {
    use lampsim::device::DeviceEvent;
    use lampsim::device::MessageKind;
    use lampsim::netserver::ServerEvent;
    use lampsim::sim::Record;
    let mut sc = preset("longterm-default").unwrap();
    sc.seed = 1;
    let log = run(&sc).unwrap();
    let mut joined_at = vec![None::<f64>; 81];
    let mut attempts = vec![0u32; 81];
    let mut boot_at = vec![None::<f64>; 81];
    for r in log.iter() {
        match &r.body {
            Record::Device { device, event: DeviceEvent::Joined { .. } } => {
                if joined_at[*device].is_none() { joined_at[*device] = Some(r.t.as_secs_f64()); }
            }
            Record::Device { device, event: DeviceEvent::JoinRequested { .. } } => attempts[*device] += 1,
            Record::Server(ServerEvent::UplinkReceived { device, kind: MessageKind::Boot, .. }) => {
                let d = device.0 as usize;
                if d < 81 && boot_at[d].is_none() { boot_at[d] = Some(r.t.as_secs_f64()); }
            }
            _ => {}
        }
    }
    let mut rows: Vec<(usize, u32, Option<f64>, Option<f64>)> =
        (0..81).map(|i| (i, attempts[i], joined_at[i], boot_at[i])).collect();
    rows.sort_by(|a, b| b.3.partial_cmp(&a.3).unwrap());
    println!("latest boots (idx, attempts, joined, boot):");
    for row in rows.iter().take(8) {
        println!("  {row:?}");
    }
}
