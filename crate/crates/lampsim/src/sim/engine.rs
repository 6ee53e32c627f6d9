//! The deterministic discrete-event engine.
//!
//! One run is strictly single-threaded: a future-event queue keyed by
//! `(timestamp, sequence)` drives device MACs, attacker emitters, gateway
//! front-ends and the network server. Radio emissions are expanded into
//! per-receiver reception resolutions at emission end, when the full set of
//! overlapping interferers is known. Periodic interference-only attackers
//! (jammers, preamble floods) are folded in analytically instead of being
//! pushed through the queue, which keeps millisecond-rate attacks cheap.

use crate::attacker::{expand_attack, stolen_credentials, AttackEmitter, AttackerTraffic};
use crate::core::{airtime, DataRate, Duration, Timestamp, TxParams};
use crate::device::{
    Activation, Device, DeviceAction, DeviceCtx, DownlinkMeta, TxPlan, UplinkMeta, WakeKind,
};
use crate::gateway::{Gateway, PreambleOutcome};
use crate::netserver::{NetServer, ServerAction, ServerEvent, UplinkCopy};
use crate::radio::{
    resolve_reception, spectral_overlap, CollisionDraws, EmitterId, FrameKind, Interference,
    LossReason, PayloadRef, PhyFrame, Position, ReceptionOutcome, TargetView, Verdict,
};
use crate::rng::SimRng;
use crate::sim::log::{EventLog, Receiver, Record};
use crate::sim::scenario::Scenario;
use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};

#[derive(Debug, Clone, PartialEq, Eq)]
enum Event {
    Wake { device: usize, kind: WakeKind },
    FrameStart { uid: u64 },
    FrameEnd { uid: u64 },
    Ingest { uid: u64 },
    AttackerEmit { index: usize },
    NoteAttack { index: usize },
    End,
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct Queued {
    t: u64,
    seq: u64,
    event: Event,
}

impl Ord for Queued {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.t, self.seq).cmp(&(other.t, other.seq))
    }
}

impl PartialOrd for Queued {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Debug)]
enum FrameMeta {
    Up(UplinkMeta),
    Down(DownlinkMeta),
}

struct PendingIngest {
    meta: UplinkMeta,
    copies: Vec<UplinkCopy>,
    uplink_end: Timestamp,
    frequency_hz: u32,
    dr: DataRate,
}

/// Run a scenario to completion and return the event log.
pub fn run(scenario: &Scenario) -> Result<EventLog, crate::Error> {
    scenario.validate()?;
    Engine::new(scenario).run()
}

struct Engine<'a> {
    sc: &'a Scenario,
    now: Timestamp,
    seq: u64,
    queue: BinaryHeap<Reverse<Queued>>,
    devices: Vec<Device>,
    gateways: Vec<Gateway>,
    server: NetServer,
    attackers: Vec<AttackEmitter>,
    /// Indices into `attackers` of analytically-modeled emitters.
    analytic: Vec<usize>,
    /// In-range (above-sensitivity) analytic flood emitters per gateway.
    flood_per_gateway: Vec<Vec<usize>>,
    /// Path gain (loss + frozen shadowing) per emitter per receiver slot:
    /// slots are gateways first, then devices.
    gain: Vec<Vec<f64>>,
    pending_frames: HashMap<u64, PhyFrame>,
    frame_meta: HashMap<u64, FrameMeta>,
    demod_failed: HashMap<u64, Vec<usize>>,
    pending_ingest: HashMap<u64, PendingIngest>,
    ether: Vec<PhyFrame>,
    log: EventLog,
    next_uid: u64,
    draws: CollisionDraws,
    frame_ends_since_prune: u32,
}

impl<'a> Engine<'a> {
    fn new(sc: &'a Scenario) -> Self {
        let n_dev = sc.device_count();
        let n_gw = sc.gateways.len();

        // Emitter id space: devices, then gateways, then attack emitters.
        let mut devices = Vec::with_capacity(n_dev);
        let mut positions: Vec<Position> = Vec::new();
        let mut idx = 0usize;
        for cohort in &sc.fleet {
            for d in 0..cohort.count {
                let stagger = if cohort.power_stagger == Duration::ZERO {
                    Duration::ZERO
                } else {
                    Duration::from_micros(
                        SimRng::stream(sc.seed, "power-stagger", &[idx as u64])
                            .next_below(cohort.power_stagger.as_micros()),
                    )
                };
                let windows = cohort
                    .power_windows
                    .iter()
                    .map(|w| crate::device::PowerWindow { on: w.on + stagger, off: w.off })
                    .collect();
                let dev = Device::new(
                    idx,
                    EmitterId(idx as u32),
                    cohort.positions[d],
                    cohort.profile.clone(),
                    cohort.defects,
                    cohort.activation,
                    windows,
                    &sc.plan,
                    sc.seed,
                );
                positions.push(cohort.positions[d]);
                devices.push(dev);
                idx += 1;
            }
        }
        let mut gateways = Vec::with_capacity(n_gw);
        for (g, cfg) in sc.gateways.iter().enumerate() {
            positions.push(cfg.position);
            gateways.push(Gateway::new(cfg.clone(), EmitterId((n_dev + g) as u32), &sc.plan));
        }

        let victims: Vec<EmitterId> = devices.iter().map(|d| d.emitter).collect();
        let mut attackers = Vec::new();
        for (a, cfg) in sc.attacks.iter().enumerate() {
            let base = (n_dev + n_gw + attackers.len()) as u32;
            let emitters = expand_attack(cfg, a, base, &sc.plan, &victims, sc.seed);
            for e in &emitters {
                positions.push(e.position);
            }
            attackers.extend(emitters);
        }

        let mut server = NetServer::new(sc.server.clone());
        for dev in &devices {
            server.register(dev.emitter, dev.activation, dev.profile.rx2_preference);
        }
        for e in &attackers {
            if matches!(e.traffic, AttackerTraffic::RegisteredData { .. }) {
                server.register(e.emitter, Activation::Abp { persist_counters: true }, false);
            }
        }

        // Path gains, frozen per (emitter, receiver) pair.
        let n_emitters = positions.len();
        let n_slots = n_gw + n_dev;
        let mut gain = vec![vec![0.0f64; n_slots]; n_emitters];
        for (e, row) in gain.iter_mut().enumerate() {
            for (slot, cell) in row.iter_mut().enumerate() {
                let rx_pos = if slot < n_gw {
                    sc.gateways[slot].position
                } else {
                    positions[slot - n_gw]
                };
                let rx_emitter = if slot < n_gw { n_dev + slot } else { slot - n_gw };
                if rx_emitter == e {
                    *cell = 0.0;
                    continue;
                }
                let d = positions[e].distance_to(&rx_pos);
                let shadow = sc.link.shadow_draw(sc.seed, e as u64, rx_emitter as u64);
                *cell = -sc.link.path_loss_db(d) - shadow;
            }
        }

        let analytic: Vec<usize> = attackers
            .iter()
            .enumerate()
            .filter(|(_, e)| e.analytic)
            .map(|(i, _)| i)
            .collect();
        let mut flood_per_gateway = vec![Vec::new(); n_gw];
        for &ai in &analytic {
            let e = &attackers[ai];
            if !e.claims_demod {
                continue;
            }
            for (g, gwv) in flood_per_gateway.iter_mut().enumerate() {
                let gw = &gateways[g];
                if !gw.listens_on(e.frequency_hz) {
                    continue;
                }
                let rssi = e.params.power_dbm as f64 + gain[e.emitter.0 as usize][g];
                if rssi >= sc.sensitivity.rssi_floor(e.params.sf, e.params.bandwidth_hz) {
                    gwv.push(ai);
                }
            }
        }

        Engine {
            sc,
            now: Timestamp::ZERO,
            seq: 0,
            queue: BinaryHeap::new(),
            devices,
            gateways,
            server,
            attackers,
            analytic,
            flood_per_gateway,
            gain,
            pending_frames: HashMap::new(),
            frame_meta: HashMap::new(),
            demod_failed: HashMap::new(),
            pending_ingest: HashMap::new(),
            ether: Vec::new(),
            log: EventLog::default(),
            next_uid: 0,
            draws: CollisionDraws { seed: sc.seed },
            frame_ends_since_prune: 0,
        }
    }

    fn schedule(&mut self, t: Timestamp, event: Event) {
        self.seq += 1;
        self.queue.push(Reverse(Queued { t: t.as_micros(), seq: self.seq, event }));
    }

    fn log(&mut self, body: Record) {
        self.seq += 1;
        self.log.push(self.now, self.seq, body);
    }

    fn n_gw(&self) -> usize {
        self.gateways.len()
    }

    fn slot_of_gateway(&self, g: usize) -> usize {
        g
    }

    fn slot_of_device(&self, d: usize) -> usize {
        self.n_gw() + d
    }

    fn rssi_at(&self, frame: &PhyFrame, slot: usize) -> f64 {
        frame.params.power_dbm as f64 + self.gain[frame.emitter.0 as usize][slot]
    }

    fn run(mut self) -> Result<EventLog, crate::Error> {
        self.log(Record::ScenarioStart {
            name: self.sc.name.clone(),
            seed: self.sc.seed,
        });
        let horizon = Timestamp::ZERO + self.sc.duration;
        // Device power schedules.
        for d in 0..self.devices.len() {
            for (t, kind) in self.devices[d].bootstrap() {
                if t <= horizon {
                    self.schedule(t, Event::Wake { device: d, kind });
                }
            }
        }
        // Attack activation notes and evented emitters.
        for (i, cfg) in self.sc.attacks.iter().enumerate() {
            self.schedule(cfg.start.min(horizon), Event::NoteAttack { index: i });
        }
        for idx in 0..self.attackers.len() {
            if !self.attackers[idx].analytic {
                let first = self.attackers[idx].first;
                if first < horizon {
                    self.schedule(first, Event::AttackerEmit { index: idx });
                }
            }
        }
        self.schedule(horizon, Event::End);

        while let Some(Reverse(q)) = self.queue.pop() {
            self.now = Timestamp::from_micros(q.t);
            match q.event {
                Event::End => break,
                Event::Wake { device, kind } => self.on_wake(device, kind),
                Event::FrameStart { uid } => self.on_frame_start(uid),
                Event::FrameEnd { uid } => self.on_frame_end(uid),
                Event::Ingest { uid } => self.on_ingest(uid),
                Event::AttackerEmit { index } => self.on_attacker_emit(index),
                Event::NoteAttack { index } => {
                    let emitters = self
                        .attackers
                        .iter()
                        .filter(|e| e.attack_index == index)
                        .count();
                    self.log(Record::AttackActive { index, emitters });
                }
            }
        }
        self.now = horizon;
        self.log(Record::ScenarioEnd);
        // Records were appended in (t, seq) order already; assert in debug.
        debug_assert!(self
            .log
            .records
            .windows(2)
            .all(|w| (w[0].t, w[0].seq) <= (w[1].t, w[1].seq)));
        Ok(self.log)
    }

    fn on_wake(&mut self, device: usize, kind: WakeKind) {
        let ctx = DeviceCtx { now: self.now, plan: &self.sc.plan };
        let actions = self.devices[device].on_wake(kind, &ctx);
        self.apply_device_actions(device, actions);
    }

    fn apply_device_actions(&mut self, device: usize, actions: Vec<DeviceAction>) {
        let horizon = Timestamp::ZERO + self.sc.duration;
        for action in actions {
            match action {
                DeviceAction::Transmit(plan) => self.queue_uplink(device, plan),
                DeviceAction::Wake(t, kind) => {
                    if t <= horizon {
                        self.schedule(t, Event::Wake { device, kind });
                    }
                }
                DeviceAction::Event(event) => self.log(Record::Device { device, event }),
            }
        }
    }

    fn queue_uplink(&mut self, device: usize, plan: TxPlan) {
        self.next_uid += 1;
        let uid = self.next_uid;
        let frame = match PhyFrame::new(
            uid,
            self.devices[device].emitter,
            plan.frequency_hz,
            plan.params,
            plan.at,
            plan.kind,
            plan.confirmed,
            plan.payload,
        ) {
            Ok(f) => f,
            Err(_) => return,
        };
        self.frame_meta.insert(uid, FrameMeta::Up(plan.meta));
        let at = frame.start;
        self.pending_frames.insert(uid, frame);
        self.schedule(at, Event::FrameStart { uid });
    }

    fn on_attacker_emit(&mut self, index: usize) {
        let horizon = Timestamp::ZERO + self.sc.duration;
        let (frame, next) = {
            let e = &mut self.attackers[index];
            let k = e.next_index;
            let at = e.start_of(k);
            if at >= e.end || at > horizon {
                return;
            }
            e.next_index += 1;
            let meta = stolen_credentials(e, k);
            if let AttackerTraffic::RegisteredData { .. } = e.traffic {
                e.fcnt += 1;
            }
            self.next_uid += 1;
            let uid = self.next_uid;
            let content = ((e.emitter.0 as u64) << 32) | k;
            let frame = PhyFrame::new(
                uid,
                e.emitter,
                e.frequency_hz,
                e.params,
                at,
                e.frame_kind,
                false,
                PayloadRef { len: e.params.payload_len, content_id: content },
            )
            .expect("attack frame");
            if let Some(m) = meta {
                self.frame_meta.insert(uid, FrameMeta::Up(m));
            }
            (frame, e.start_of(k + 1))
        };
        let uid = frame.uid;
        let at = frame.start;
        self.pending_frames.insert(uid, frame);
        self.schedule(at, Event::FrameStart { uid });
        if next < self.attackers[index].end && next <= horizon {
            self.schedule(next, Event::AttackerEmit { index });
        }
    }

    fn on_frame_start(&mut self, uid: u64) {
        let Some(frame) = self.pending_frames.remove(&uid) else {
            return;
        };
        self.log(Record::Emission {
            uid,
            emitter: frame.emitter.0,
            kind: frame.kind,
            frequency_hz: frame.frequency_hz,
            sf: frame.params.sf,
            len: frame.payload.len,
            confirmed: frame.confirmed,
            air: frame.air,
            content: frame.payload.content_id,
        });
        if frame.kind.is_uplink() {
            for g in 0..self.n_gw() {
                let slot = self.slot_of_gateway(g);
                let rssi = self.rssi_at(&frame, slot);
                if rssi
                    < self
                        .sc
                        .sensitivity
                        .rssi_floor(frame.params.sf, frame.params.bandwidth_hz)
                {
                    continue;
                }
                let extra = self.flood_claims(g, frame.start);
                let gw = &mut self.gateways[g];
                if gw.on_preamble(&frame, frame.start, extra) == PreambleOutcome::DemodBusy {
                    self.demod_failed.entry(uid).or_default().push(g);
                }
            }
        }
        let end = frame.end();
        self.ether.push(frame);
        self.schedule(end, Event::FrameEnd { uid });
    }

    /// Demodulation paths bound by analytic preamble floods at `t`.
    fn flood_claims(&self, g: usize, t: Timestamp) -> usize {
        let mut total = 0;
        for &ai in &self.flood_per_gateway[g] {
            let e = &self.attackers[ai];
            let sym_us =
                ((1u64 << e.params.sf) * 1_000_000) / e.params.bandwidth_hz as u64;
            let hold = e.airtime
                + Duration::from_micros(
                    self.gateways[g].config.preamble_hang_symbols as u64 * sym_us,
                );
            total += e.demod_claims_at(t, hold);
        }
        total
    }

    fn on_frame_end(&mut self, uid: u64) {
        let Some(pos) = self.ether.iter().position(|f| f.uid == uid) else {
            return;
        };
        let frame = self.ether[pos].clone();
        if frame.kind.is_uplink() {
            self.resolve_uplink(&frame);
        } else if frame.kind.is_downlink() {
            self.resolve_downlink(&frame);
        }
        self.frame_ends_since_prune += 1;
        if self.frame_ends_since_prune >= 64 {
            self.frame_ends_since_prune = 0;
            let horizon = self.now.saturating_sub(Duration::from_secs(8));
            self.ether.retain(|f| f.end() >= horizon);
        }
    }

    /// Interference seen by `frame` at a receiver slot.
    fn interferers_for(&self, frame: &PhyFrame, slot: usize, receiver_emitter: u32) -> Vec<Interference> {
        let mut out = Vec::new();
        let header_end = frame.header_end();
        for f2 in &self.ether {
            if f2.uid == frame.uid
                || f2.emitter == frame.emitter
                || f2.emitter.0 == receiver_emitter
            {
                continue;
            }
            if !f2.overlaps(frame.start, frame.end()) {
                continue;
            }
            let ov = spectral_overlap(
                frame.frequency_hz,
                frame.params.bandwidth_hz,
                f2.frequency_hz,
                f2.params.bandwidth_hz,
            );
            if ov <= 0.0 {
                continue;
            }
            out.push(Interference {
                uid: f2.uid,
                sf: f2.params.sf,
                rssi_dbm: self.rssi_at(f2, slot),
                overlap: ov,
                overlaps_header: f2.start < header_end && f2.end() > frame.start,
            });
        }
        for &ai in &self.analytic {
            let e = &self.attackers[ai];
            if e.emitter == frame.emitter || e.emitter.0 == receiver_emitter {
                continue;
            }
            let ov = spectral_overlap(
                frame.frequency_hz,
                frame.params.bandwidth_hz,
                e.frequency_hz,
                e.params.bandwidth_hz,
            );
            if ov <= 0.0 {
                continue;
            }
            let ks = e.overlapping(frame.start, frame.end());
            let n = ks.end.saturating_sub(ks.start);
            if n == 0 {
                continue;
            }
            // One radio is one interference source regardless of how many
            // of its frames overlap the target: nominal-rate jammers whose
            // period is shorter than their airtime radiate continuously at
            // single-frame power, not at a multiple of it.
            let single = e.params.power_dbm as f64 + self.gain[e.emitter.0 as usize][slot];
            let overlaps_header = {
                let hk = e.overlapping(frame.start, header_end);
                hk.end > hk.start
            };
            out.push(Interference {
                uid: (1u64 << 63) | ((e.emitter.0 as u64) << 32) | (ks.start & 0xFFFF_FFFF),
                sf: e.params.sf,
                rssi_dbm: single,
                overlap: ov,
                overlaps_header,
            });
        }
        out
    }

    fn resolve_uplink(&mut self, frame: &PhyFrame) {
        let mut copies: Vec<UplinkCopy> = Vec::new();
        for g in 0..self.n_gw() {
            if !self.gateways[g].enabled || !self.gateways[g].listens_on(frame.frequency_hz) {
                continue;
            }
            let slot = self.slot_of_gateway(g);
            let rssi = self.rssi_at(frame, slot);
            let interferers = self.interferers_for(frame, slot, self.gateways[g].emitter.0);
            let target = TargetView {
                uid: frame.uid,
                sf: frame.params.sf,
                bandwidth_hz: frame.params.bandwidth_hz,
            };
            let mut outcome = resolve_reception(
                &target,
                rssi,
                &interferers,
                &self.sc.sensitivity,
                &self.sc.rejection,
                self.sc.link.noise_floor_dbm,
                &self.draws,
            );
            if outcome.verdict.is_decoded()
                && self.demod_failed.get(&frame.uid).is_some_and(|v| v.contains(&g))
            {
                outcome.verdict = Verdict::Lost(LossReason::DemodBusy);
            }
            let gw_time = self.gateways[g].local_time(self.now);
            self.log(Record::Reception {
                uid: frame.uid,
                receiver: Receiver::Gateway(g),
                outcome,
                gw_time_us: Some(gw_time),
            });
            if outcome.verdict.is_decoded() && frame.kind != FrameKind::PreambleOnly {
                self.gateways[g].forwarded += 1;
                copies.push(UplinkCopy {
                    gateway: g,
                    rssi_dbm: outcome.rssi_dbm,
                    snr_db: outcome.snr_db,
                    gw_time_us: gw_time,
                });
            }
        }
        self.demod_failed.remove(&frame.uid);
        if copies.is_empty() {
            self.frame_meta.remove(&frame.uid);
            return;
        }
        let Some(FrameMeta::Up(meta)) = self.frame_meta.remove(&frame.uid) else {
            return;
        };
        let dr = match DataRate::from_sf_bw(frame.params.sf, frame.params.bandwidth_hz) {
            Ok(dr) => dr,
            Err(_) => return,
        };
        self.pending_ingest.insert(
            frame.uid,
            PendingIngest {
                meta,
                copies,
                uplink_end: frame.end(),
                frequency_hz: frame.frequency_hz,
                dr,
            },
        );
        self.schedule(frame.end() + self.sc.server.dedup_window, Event::Ingest { uid: frame.uid });
    }

    fn resolve_downlink(&mut self, frame: &PhyFrame) {
        let Some(dest) = frame.dest else {
            return;
        };
        let d = dest.0 as usize;
        if d >= self.devices.len() {
            return;
        }
        let dr = match DataRate::from_sf_bw(frame.params.sf, frame.params.bandwidth_hz) {
            Ok(dr) => dr,
            Err(_) => return,
        };
        let slot = self.slot_of_device(d);
        let rssi = self.rssi_at(frame, slot);
        // Half-duplex: a node transmitting over the downlink cannot hear it.
        let transmitting = self
            .ether
            .iter()
            .any(|f| f.emitter == dest && f.overlaps(frame.start, frame.end()));
        let matched = !transmitting
            && self.devices[d].window_match(frame.start, frame.frequency_hz, dr, &self.sc.plan);
        let outcome = if !matched {
            ReceptionOutcome {
                verdict: Verdict::Lost(LossReason::OffChannel),
                rssi_dbm: rssi,
                snr_db: 0.0,
            }
        } else {
            let interferers = self.interferers_for(frame, slot, dest.0);
            let target = TargetView {
                uid: frame.uid,
                sf: frame.params.sf,
                bandwidth_hz: frame.params.bandwidth_hz,
            };
            resolve_reception(
                &target,
                rssi,
                &interferers,
                &self.sc.sensitivity,
                &self.sc.rejection,
                self.sc.link.noise_floor_dbm,
                &self.draws,
            )
        };
        self.log(Record::Reception {
            uid: frame.uid,
            receiver: Receiver::Device(d),
            outcome,
            gw_time_us: None,
        });
        let meta = self.frame_meta.remove(&frame.uid);
        if !outcome.verdict.is_decoded() {
            return;
        }
        if let Some(FrameMeta::Down(meta)) = meta {
            let ctx = DeviceCtx { now: self.now, plan: &self.sc.plan };
            let actions = self.devices[d].on_downlink(&ctx, frame.end(), &meta);
            self.apply_device_actions(d, actions);
        }
    }

    fn on_ingest(&mut self, uid: u64) {
        let Some(p) = self.pending_ingest.remove(&uid) else {
            return;
        };
        let actions = self.server.ingest_uplink(
            &p.meta,
            &p.copies,
            p.uplink_end,
            p.frequency_hz,
            p.dr,
            self.sc.plan.rx2_frequency_hz,
            self.sc.plan.rx2_dr,
            &self.sc.sensitivity,
            self.now,
        );
        for action in actions {
            match action {
                ServerAction::Event(ev) => self.log(Record::Server(ev)),
                ServerAction::DisableGateway(g) => {
                    self.gateways[g].disable();
                    self.log(Record::Server(ServerEvent::GatewayDisabled { gateway: g }));
                }
                ServerAction::Downlink(plan) => self.execute_downlink(plan),
            }
        }
    }

    fn sub_band_of_freq(&self, freq: u32) -> usize {
        if freq == self.sc.plan.rx2_frequency_hz {
            return self.sc.plan.rx2_sub_band;
        }
        self.sc
            .plan
            .uplink
            .iter()
            .find(|c| c.frequency_hz == freq)
            .map(|c| c.sub_band)
            .unwrap_or(0)
    }

    fn execute_downlink(&mut self, plan: crate::netserver::DownlinkPlan) {
        let g = plan.gateway;
        let device = plan.meta.device();
        let kind = match plan.meta {
            DownlinkMeta::JoinAccept { .. } => FrameKind::JoinAccept,
            _ => FrameKind::DownlinkData,
        };
        let attempts: Vec<(u8, Timestamp, u32, DataRate, i8)> = {
            let gw = &self.gateways[g];
            let mut v = Vec::new();
            if let Some((at, freq, dr)) = plan.rx1 {
                v.push((1u8, at, freq, dr, gw.config.tx_power_rx1_dbm));
            }
            let (at2, f2, dr2) = plan.rx2;
            v.push((2u8, at2, f2, dr2, gw.config.tx_power_rx2_dbm));
            v
        };
        for (window, at, freq, dr, power) in attempts {
            if at <= self.now {
                continue;
            }
            let params = TxParams::lorawan(dr, plan.payload_len, power);
            let air = match airtime(&params) {
                Ok(a) => a,
                Err(_) => continue,
            };
            let sb = self.sub_band_of_freq(freq);
            let duty = self.sc.plan.sub_band(sb).duty_cycle;
            if !self.gateways[g].reserve_downlink(sb, duty, at, air) {
                continue;
            }
            self.next_uid += 1;
            let uid = self.next_uid;
            let mut frame = PhyFrame::new(
                uid,
                self.gateways[g].emitter,
                freq,
                params,
                at,
                kind,
                false,
                PayloadRef { len: plan.payload_len, content_id: uid },
            )
            .expect("downlink frame");
            frame.dest = Some(device);
            self.frame_meta.insert(uid, FrameMeta::Down(plan.meta));
            self.pending_frames.insert(uid, frame);
            self.schedule(at, Event::FrameStart { uid });
            self.log(Record::DownlinkTx {
                device: device.0,
                gateway: g,
                window,
                frequency_hz: freq,
                sf: dr.spreading_factor(),
                len: plan.payload_len,
            });
            return;
        }
        self.log(Record::DownlinkDropped { device: device.0, gateway: g });
    }
}
