//! The end-node MAC state machine.
//!
//! A device is a passive state machine: the scenario event loop feeds it
//! wake-ups and downlinks, and it answers with transmissions, future
//! wake-ups and loggable state changes. All randomness comes from streams
//! derived from the scenario seed and the device index.

use crate::core::{
    airtime, next_channel, ChannelPlan, DataRate, Duration, SubBandState, Timestamp, TxParams,
};
use crate::device::profile::{Activation, DefectFlags, DeviceProfile, MessageKind, PowerWindow};
use crate::radio::{EmitterId, FrameKind, PayloadRef, Position};
use crate::rng::SimRng;

/// Wake-up kinds a device schedules for itself.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WakeKind {
    PowerOn(usize),
    PowerOff(usize),
    JoinAttempt { epoch: u64 },
    JoinTimeout { epoch: u64 },
    Periodic { kind: MessageKind, epoch: u64 },
    SendBoot { epoch: u64 },
    AckTimeout { chain: u64 },
}

/// A transmission the device has committed to (duty cycle already cleared).
#[derive(Debug, Clone)]
pub struct TxPlan {
    pub at: Timestamp,
    pub frequency_hz: u32,
    pub params: TxParams,
    pub kind: FrameKind,
    pub confirmed: bool,
    pub payload: PayloadRef,
    pub meta: UplinkMeta,
}

/// Logical content of an uplink, consumed by the network server.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum UplinkMeta {
    Data {
        device: EmitterId,
        kind: MessageKind,
        fcnt: u32,
        confirmed: bool,
        /// Stable id of the logical message across retransmissions.
        chain: u64,
        attempt: u32,
    },
    Join {
        device: EmitterId,
        devnonce: u16,
        valid_credentials: bool,
    },
}

/// Logical content of a downlink, produced by the network server.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DownlinkMeta {
    Ack {
        device: EmitterId,
        chain: u64,
        adr: Option<DataRate>,
    },
    AdrCommand {
        device: EmitterId,
        dr: DataRate,
    },
    JoinAccept {
        device: EmitterId,
        dr: DataRate,
    },
}

impl DownlinkMeta {
    pub fn device(&self) -> EmitterId {
        match *self {
            DownlinkMeta::Ack { device, .. }
            | DownlinkMeta::AdrCommand { device, .. }
            | DownlinkMeta::JoinAccept { device, .. } => device,
        }
    }
}

/// State changes worth a log record.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DeviceEvent {
    PowerOn,
    PowerOff,
    JoinRequested { attempt: u32, dr: DataRate },
    Joined { dr: DataRate, attempts: u32 },
    UplinkQueued { kind: MessageKind, chain: u64, attempt: u32 },
    MessageSkipped { kind: MessageKind, busy: bool },
    AckReceived { chain: u64, rtt: Duration },
    ChainAbandoned { chain: u64, attempts: u32 },
    AdrApplied { from: DataRate, to: DataRate },
    DownlinkIgnored,
}

#[derive(Debug, Clone)]
pub enum DeviceAction {
    Transmit(TxPlan),
    Wake(Timestamp, WakeKind),
    Event(DeviceEvent),
}

/// An open receive window.
#[derive(Debug, Clone, Copy)]
pub struct RxWindow {
    pub frequency_hz: u32,
    pub dr: DataRate,
    pub open_at: Timestamp,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JoinState {
    Idle,
    Joining,
    Joined,
}

#[derive(Debug, Clone)]
struct PendingChain {
    chain: u64,
    kind: MessageKind,
    first_start: Timestamp,
    attempts: u32,
}

/// EU868-style aggregated join-airtime budget: 36 s in the first hour after
/// power-on, another 36 s until hour 11, then 8.7 s per started day.
#[derive(Debug, Clone, Copy, Default)]
struct JoinBudget {
    anchor: Timestamp,
    bucket: u32,
    spent: Duration,
}

impl JoinBudget {
    fn reset(&mut self, now: Timestamp) {
        self.anchor = now;
        self.bucket = 0;
        self.spent = Duration::ZERO;
    }

    fn bucket_of(&self, t: Timestamp) -> (u32, Timestamp, Duration) {
        let since = t.since(self.anchor);
        let hour = Duration::from_hours(1);
        if since < hour {
            (0, self.anchor + hour, Duration::from_secs(36))
        } else if since < Duration::from_hours(11) {
            (1, self.anchor + Duration::from_hours(11), Duration::from_secs(36))
        } else {
            let day = (since.as_micros() - Duration::from_hours(11).as_micros())
                / Duration::from_hours(24).as_micros();
            let end = self.anchor
                + Duration::from_hours(11)
                + Duration::from_hours(24).mul(day + 1);
            (2 + day as u32, end, Duration::from_micros(8_700_000))
        }
    }

    /// Earliest time at or after `t` where `air` fits the budget.
    fn earliest(&self, t: Timestamp, air: Duration) -> Timestamp {
        let (bucket, end, cap) = self.bucket_of(t);
        let spent = if bucket == self.bucket { self.spent } else { Duration::ZERO };
        if spent + air <= cap {
            t
        } else {
            end
        }
    }

    fn commit(&mut self, t: Timestamp, air: Duration) {
        let (bucket, _, _) = self.bucket_of(t);
        if bucket != self.bucket {
            self.bucket = bucket;
            self.spent = Duration::ZERO;
        }
        self.spent += air;
    }
}

/// Protocol state of one end node.
#[derive(Debug)]
pub struct MacState {
    pub powered: bool,
    pub join_state: JoinState,
    pub current_dr: DataRate,
    pub last_channel: Option<usize>,
    pub sub_bands: Vec<SubBandState>,
    pub fcnt_up: u32,
    pub windows: Vec<RxWindow>,
    pending: Option<PendingChain>,
    join_attempts: u32,
    join_epoch: u64,
    power_epoch: u64,
    devnonce_used: std::collections::HashSet<u16>,
    counter_remaining: Duration,
    counter_next_at: Option<Timestamp>,
}

/// One simulated end node.
#[derive(Debug)]
pub struct Device {
    pub index: usize,
    pub emitter: EmitterId,
    pub position: Position,
    pub profile: DeviceProfile,
    pub defects: DefectFlags,
    pub activation: Activation,
    pub power_windows: Vec<PowerWindow>,
    pub mac: MacState,
    join_budget: JoinBudget,
    msg_seq: u64,
    rng_chan: SimRng,
    rng_mac: SimRng,
}

pub struct DeviceCtx<'a> {
    pub now: Timestamp,
    pub plan: &'a ChannelPlan,
}

impl Device {
    pub fn new(
        index: usize,
        emitter: EmitterId,
        position: Position,
        profile: DeviceProfile,
        defects: DefectFlags,
        activation: Activation,
        power_windows: Vec<PowerWindow>,
        plan: &ChannelPlan,
        seed: u64,
    ) -> Self {
        let counters_period = profile.counters_period;
        Device {
            index,
            emitter,
            position,
            profile,
            defects,
            activation,
            power_windows,
            mac: MacState {
                powered: false,
                join_state: JoinState::Idle,
                current_dr: DataRate::DR5,
                last_channel: None,
                sub_bands: vec![SubBandState::default(); plan.sub_bands.len()],
                fcnt_up: 0,
                windows: Vec::new(),
                pending: None,
                join_attempts: 0,
                join_epoch: 0,
                power_epoch: 0,
                devnonce_used: std::collections::HashSet::new(),
                counter_remaining: counters_period,
                counter_next_at: None,
            },
            join_budget: JoinBudget::default(),
            msg_seq: 0,
            rng_chan: SimRng::stream(seed, "dev-chan", &[index as u64]),
            rng_mac: SimRng::stream(seed, "dev-mac", &[index as u64]),
        }
    }

    /// Initial wake-ups for the scenario event queue.
    pub fn bootstrap(&self) -> Vec<(Timestamp, WakeKind)> {
        let mut wakes = Vec::new();
        for (i, w) in self.power_windows.iter().enumerate() {
            wakes.push((w.on, WakeKind::PowerOn(i)));
            wakes.push((w.off, WakeKind::PowerOff(i)));
        }
        wakes
    }

    pub fn is_joined(&self) -> bool {
        self.mac.join_state == JoinState::Joined
    }

    fn fresh_content(&mut self) -> u64 {
        self.msg_seq += 1;
        ((self.emitter.0 as u64) << 32) | self.msg_seq
    }

    fn fresh_devnonce(&mut self) -> u16 {
        loop {
            let n = (self.rng_mac.next_u64() & 0xFFFF) as u16;
            if self.mac.devnonce_used.insert(n) {
                return n;
            }
        }
    }

    /// Earliest compliant transmission start for `air` on `sub_band`,
    /// reserving duty (and the join budget when applicable).
    fn gate_tx(
        &mut self,
        desired: Timestamp,
        air: Duration,
        sub_band: usize,
        duty: f64,
        join: bool,
    ) -> Timestamp {
        if join && self.defects.join_backoff_violation {
            // The defective firmware transmits regardless of clearance; the
            // airtime still counts in the ledger.
            self.mac.sub_bands[sub_band].airtime_used += air;
            return desired;
        }
        let mut t = desired;
        loop {
            let t_duty = self.mac.sub_bands[sub_band].earliest_start(t);
            let t_all = if join {
                self.join_budget.earliest(t_duty, air)
            } else {
                t_duty
            };
            if t_all == t {
                break;
            }
            t = t_all;
        }
        self.mac.sub_bands[sub_band].reserve(t, air, duty);
        if join {
            self.join_budget.commit(t, air);
        }
        t
    }

    fn open_class_a_windows(&mut self, ctx: &DeviceCtx, frame_end: Timestamp, freq: u32, dr: DataRate, join: bool) {
        let (d1, d2) = if join {
            (self.profile.join_rx1_delay, self.profile.join_rx2_delay)
        } else {
            (self.profile.rx1_delay, self.profile.rx2_delay)
        };
        let rx1_dr =
            DataRate::new(dr.index().saturating_sub(ctx.plan.rx1_dr_offset).min(5)).unwrap();
        self.mac.windows.push(RxWindow {
            frequency_hz: freq,
            dr: rx1_dr,
            open_at: frame_end + d1,
        });
        self.mac.windows.push(RxWindow {
            frequency_hz: ctx.plan.rx2_frequency_hz,
            dr: ctx.plan.rx2_dr,
            open_at: frame_end + d2,
        });
        // Keep stale windows (overlapping join attempts) around briefly.
        let horizon = ctx.now.saturating_sub(Duration::from_secs(30));
        self.mac.windows.retain(|w| w.open_at >= horizon);
    }

    /// Whether a downlink starting at `start` on `freq`/`dr` falls into an
    /// open window (or the continuous RX2 ear of an rx2-preference node).
    pub fn window_match(&self, start: Timestamp, freq: u32, dr: DataRate, plan: &ChannelPlan) -> bool {
        if !self.mac.powered {
            return false;
        }
        let tol = self.profile.rx_window;
        if self
            .mac
            .windows
            .iter()
            .any(|w| w.frequency_hz == freq && w.dr == dr && start >= w.open_at.saturating_sub(Duration::from_millis(2)) && start <= w.open_at + tol)
        {
            return true;
        }
        self.profile.rx2_preference && freq == plan.rx2_frequency_hz && dr == plan.rx2_dr
    }

    fn transmit_data(
        &mut self,
        ctx: &DeviceCtx,
        kind: MessageKind,
        chain: u64,
        attempt: u32,
        desired: Timestamp,
        out: &mut Vec<DeviceAction>,
    ) {
        let plan = ctx.plan;
        let channel_id = match next_channel(
            &mut self.rng_chan,
            plan,
            &self.profile.enabled_channels,
            self.mac.last_channel,
        ) {
            Ok(c) => c,
            Err(_) => return,
        };
        self.mac.last_channel = Some(channel_id);
        let ch = plan.channel(channel_id);
        let dr = self.mac.current_dr;
        let len = self.profile.payload_len(kind).min(plan.max_payload(dr));
        let params = TxParams::lorawan(dr, len, self.profile.tx_power_dbm);
        let air = match airtime(&params) {
            Ok(a) => a,
            Err(_) => return,
        };
        let duty = plan.sub_band(ch.sub_band).duty_cycle;
        let at = self.gate_tx(desired, air, ch.sub_band, duty, false);
        self.mac.fcnt_up += 1;
        let confirmed = kind.confirmed() && !self.defects.ignore_ack_and_adr;
        let meta = UplinkMeta::Data {
            device: self.emitter,
            kind,
            fcnt: self.mac.fcnt_up,
            confirmed: kind.confirmed(),
            chain,
            attempt,
        };
        out.push(DeviceAction::Event(DeviceEvent::UplinkQueued { kind, chain, attempt }));
        out.push(DeviceAction::Transmit(TxPlan {
            at,
            frequency_hz: ch.frequency_hz,
            params,
            kind: FrameKind::UplinkData,
            confirmed: kind.confirmed(),
            payload: PayloadRef { len, content_id: chain },
            meta,
        }));
        let end = at + air;
        self.open_class_a_windows(ctx, end, ch.frequency_hz, dr, false);
        if confirmed {
            if attempt == 0 {
                self.mac.pending = Some(PendingChain {
                    chain,
                    kind,
                    first_start: at,
                    attempts: 0,
                });
            }
            let deadline = end
                + self.profile.rx2_delay
                + self.profile.rx_window
                + Duration::from_millis(100);
            out.push(DeviceAction::Wake(deadline, WakeKind::AckTimeout { chain }));
        }
    }

    fn start_join_attempt(&mut self, ctx: &DeviceCtx, out: &mut Vec<DeviceAction>) {
        let plan = ctx.plan;
        let attempt = self.mac.join_attempts;
        // Compliant stacks step the join DR down every two timeouts. The
        // back-off-violating firmware hammers quick same-DR retries and
        // only rarely rotates its join rate.
        let ladder_every = if self.defects.join_backoff_violation { 24 } else { 2 };
        let dr = if self.profile.join_dr_cycle {
            self.profile.initial_dr.slower((attempt / ladder_every) as u8)
        } else {
            self.profile.initial_dr
        };
        let channel_id = match next_channel(
            &mut self.rng_chan,
            plan,
            &plan.join_channels,
            self.mac.last_channel,
        ) {
            Ok(c) => c,
            Err(_) => return,
        };
        self.mac.last_channel = Some(channel_id);
        let ch = plan.channel(channel_id);
        let params = TxParams::lorawan(dr, 23, self.profile.tx_power_dbm);
        let air = airtime(&params).expect("join request airtime");
        let duty = plan.sub_band(ch.sub_band).duty_cycle;
        let at = self.gate_tx(ctx.now, air, ch.sub_band, duty, true);
        let devnonce = self.fresh_devnonce();
        let content = self.fresh_content();
        self.mac.join_attempts += 1;
        out.push(DeviceAction::Event(DeviceEvent::JoinRequested {
            attempt,
            dr,
        }));
        out.push(DeviceAction::Transmit(TxPlan {
            at,
            frequency_hz: ch.frequency_hz,
            params,
            kind: FrameKind::JoinRequest,
            confirmed: false,
            payload: PayloadRef { len: 23, content_id: content },
            meta: UplinkMeta::Join {
                device: self.emitter,
                devnonce,
                valid_credentials: true,
            },
        }));
        let end = at + air;
        self.open_class_a_windows(ctx, end, ch.frequency_hz, dr, true);
        let epoch = self.mac.join_epoch;
        if self.defects.join_backoff_violation {
            let delay = Duration::from_secs_f64(self.rng_mac.uniform(0.5, 1.0));
            out.push(DeviceAction::Wake(end + delay, WakeKind::JoinAttempt { epoch }));
        } else {
            let deadline = end
                + self.profile.join_rx2_delay
                + self.profile.rx_window
                + Duration::from_millis(100);
            out.push(DeviceAction::Wake(deadline, WakeKind::JoinTimeout { epoch }));
        }
    }

    pub fn on_wake(&mut self, kind: WakeKind, ctx: &DeviceCtx) -> Vec<DeviceAction> {
        let mut out = Vec::new();
        match kind {
            WakeKind::PowerOn(_) => self.handle_power_on(ctx, &mut out),
            WakeKind::PowerOff(_) => self.handle_power_off(ctx, &mut out),
            WakeKind::JoinAttempt { epoch } => {
                if self.mac.powered
                    && epoch == self.mac.join_epoch
                    && self.mac.join_state == JoinState::Joining
                {
                    self.start_join_attempt(ctx, &mut out);
                }
            }
            WakeKind::JoinTimeout { epoch } => {
                if self.mac.powered
                    && epoch == self.mac.join_epoch
                    && self.mac.join_state == JoinState::Joining
                {
                    let delay = Duration::from_secs_f64(self.rng_mac.uniform(1.0, 3.0));
                    out.push(DeviceAction::Wake(
                        ctx.now + delay,
                        WakeKind::JoinAttempt { epoch },
                    ));
                }
            }
            WakeKind::Periodic { kind, epoch } => {
                if self.mac.powered && epoch == self.mac.power_epoch {
                    self.handle_periodic(kind, ctx, &mut out);
                }
            }
            WakeKind::SendBoot { epoch } => {
                if self.mac.powered && epoch == self.mac.power_epoch && self.is_joined() {
                    let chain = self.fresh_content();
                    self.transmit_data(ctx, MessageKind::Boot, chain, 0, ctx.now, &mut out);
                }
            }
            WakeKind::AckTimeout { chain } => self.handle_ack_timeout(chain, ctx, &mut out),
        }
        out
    }

    fn handle_power_on(&mut self, ctx: &DeviceCtx, out: &mut Vec<DeviceAction>) {
        self.mac.powered = true;
        self.mac.power_epoch += 1;
        self.join_budget.reset(ctx.now);
        out.push(DeviceAction::Event(DeviceEvent::PowerOn));
        let epoch = self.mac.power_epoch;
        match self.activation {
            Activation::Otaa => {
                self.mac.join_state = JoinState::Joining;
                self.mac.join_attempts = 0;
                self.mac.join_epoch += 1;
                out.push(DeviceAction::Wake(
                    ctx.now,
                    WakeKind::JoinAttempt { epoch: self.mac.join_epoch },
                ));
            }
            Activation::Abp { persist_counters } => {
                self.mac.join_state = JoinState::Joined;
                self.mac.current_dr = self.profile.initial_dr;
                if !persist_counters {
                    self.mac.fcnt_up = 0;
                }
                let delay = Duration::from_secs_f64(self.rng_mac.uniform(1.0, 3.0));
                out.push(DeviceAction::Wake(ctx.now + delay, WakeKind::SendBoot { epoch }));
            }
        }
        out.push(DeviceAction::Wake(
            ctx.now + self.profile.status_period,
            WakeKind::Periodic { kind: MessageKind::Status, epoch },
        ));
        if self.defects.counters_trigger_lost_on_powerdown {
            self.mac.counter_remaining = self.profile.counters_period;
        }
        self.mac.counter_next_at = Some(ctx.now + self.mac.counter_remaining);
        out.push(DeviceAction::Wake(
            ctx.now + self.mac.counter_remaining,
            WakeKind::Periodic { kind: MessageKind::Counters, epoch },
        ));
    }

    fn handle_power_off(&mut self, ctx: &DeviceCtx, out: &mut Vec<DeviceAction>) {
        if !self.mac.powered {
            return;
        }
        if let Some(next) = self.mac.counter_next_at.take() {
            self.mac.counter_remaining = next.since(ctx.now).max(Duration::from_secs(1));
        }
        self.mac.powered = false;
        self.mac.power_epoch += 1;
        self.mac.join_epoch += 1;
        self.mac.windows.clear();
        if let Some(p) = self.mac.pending.take() {
            out.push(DeviceAction::Event(DeviceEvent::ChainAbandoned {
                chain: p.chain,
                attempts: p.attempts,
            }));
        }
        if self.activation == Activation::Otaa {
            self.mac.join_state = JoinState::Idle;
        }
        out.push(DeviceAction::Event(DeviceEvent::PowerOff));
    }

    fn handle_periodic(&mut self, kind: MessageKind, ctx: &DeviceCtx, out: &mut Vec<DeviceAction>) {
        let epoch = self.mac.power_epoch;
        let period = match kind {
            MessageKind::Status => self.profile.status_period,
            MessageKind::Counters => self.profile.counters_period,
            MessageKind::Boot => return,
        };
        out.push(DeviceAction::Wake(
            ctx.now + period,
            WakeKind::Periodic { kind, epoch },
        ));
        if kind == MessageKind::Counters {
            self.mac.counter_remaining = period;
            self.mac.counter_next_at = Some(ctx.now + period);
        }
        if !self.is_joined() {
            out.push(DeviceAction::Event(DeviceEvent::MessageSkipped { kind, busy: false }));
            return;
        }
        if kind.confirmed() && self.mac.pending.is_some() {
            out.push(DeviceAction::Event(DeviceEvent::MessageSkipped { kind, busy: true }));
            return;
        }
        let chain = self.fresh_content();
        self.transmit_data(ctx, kind, chain, 0, ctx.now, out);
    }

    fn handle_ack_timeout(&mut self, chain: u64, ctx: &DeviceCtx, out: &mut Vec<DeviceAction>) {
        let Some(pending) = self.mac.pending.as_mut() else {
            return;
        };
        if pending.chain != chain || !self.mac.powered {
            return;
        }
        pending.attempts += 1;
        if pending.attempts > self.profile.max_retries {
            let p = self.mac.pending.take().unwrap();
            out.push(DeviceAction::Event(DeviceEvent::ChainAbandoned {
                chain: p.chain,
                attempts: p.attempts,
            }));
            return;
        }
        let attempts = pending.attempts;
        let kind = pending.kind;
        if let Some(n) = self.profile.retry_dr_backoff {
            if n > 0 && attempts % n == 0 {
                self.mac.current_dr = self.mac.current_dr.slower(1);
            }
        }
        let delay = Duration::from_secs_f64(
            self.rng_mac.uniform(
                self.profile.retry_delay_min.as_secs_f64(),
                self.profile.retry_delay_max.as_secs_f64(),
            ),
        );
        self.transmit_data(ctx, kind, chain, attempts, ctx.now + delay, out);
    }

    pub fn on_downlink(
        &mut self,
        ctx: &DeviceCtx,
        frame_end: Timestamp,
        meta: &DownlinkMeta,
    ) -> Vec<DeviceAction> {
        let mut out = Vec::new();
        if !self.mac.powered {
            return out;
        }
        match *meta {
            DownlinkMeta::JoinAccept { dr, .. } => {
                if self.mac.join_state != JoinState::Joining {
                    return out;
                }
                self.mac.join_state = JoinState::Joined;
                self.mac.join_epoch += 1;
                self.mac.fcnt_up = 0;
                self.mac.current_dr = if self.defects.reset_dr0_after_join {
                    DataRate::DR0
                } else {
                    dr
                };
                out.push(DeviceAction::Event(DeviceEvent::Joined {
                    dr: self.mac.current_dr,
                    attempts: self.mac.join_attempts,
                }));
                let delay = Duration::from_secs_f64(self.rng_mac.uniform(1.0, 3.0));
                out.push(DeviceAction::Wake(
                    ctx.now + delay,
                    WakeKind::SendBoot { epoch: self.mac.power_epoch },
                ));
            }
            DownlinkMeta::Ack { chain, adr, .. } => {
                if self.defects.ignore_ack_and_adr {
                    out.push(DeviceAction::Event(DeviceEvent::DownlinkIgnored));
                    return out;
                }
                if let Some(p) = &self.mac.pending {
                    if p.chain == chain {
                        let rtt = frame_end.since(p.first_start);
                        self.mac.pending = None;
                        out.push(DeviceAction::Event(DeviceEvent::AckReceived { chain, rtt }));
                    }
                }
                if let Some(dr) = adr {
                    self.apply_adr(dr, &mut out);
                }
            }
            DownlinkMeta::AdrCommand { dr, .. } => {
                if self.defects.ignore_ack_and_adr {
                    out.push(DeviceAction::Event(DeviceEvent::DownlinkIgnored));
                    return out;
                }
                self.apply_adr(dr, &mut out);
            }
        }
        out
    }

    fn apply_adr(&mut self, dr: DataRate, out: &mut Vec<DeviceAction>) {
        let clamped = DataRate::new(dr.index().min(5)).unwrap();
        if clamped != self.mac.current_dr {
            out.push(DeviceAction::Event(DeviceEvent::AdrApplied {
                from: self.mac.current_dr,
                to: clamped,
            }));
            self.mac.current_dr = clamped;
        }
    }

    /// Receive-window schedule after an uplink ending at `end` (pure form).
    pub fn rx_windows(
        &self,
        plan: &ChannelPlan,
        end: Timestamp,
        uplink_freq: u32,
        uplink_dr: DataRate,
        join: bool,
    ) -> [RxWindow; 2] {
        let (d1, d2) = if join {
            (self.profile.join_rx1_delay, self.profile.join_rx2_delay)
        } else {
            (self.profile.rx1_delay, self.profile.rx2_delay)
        };
        let rx1_dr =
            DataRate::new(uplink_dr.index().saturating_sub(plan.rx1_dr_offset).min(5)).unwrap();
        [
            RxWindow { frequency_hz: uplink_freq, dr: rx1_dr, open_at: end + d1 },
            RxWindow { frequency_hz: plan.rx2_frequency_hz, dr: plan.rx2_dr, open_at: end + d2 },
        ]
    }
}
