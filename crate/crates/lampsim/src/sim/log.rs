//! The replay-complete event log.
//!
//! Records are strictly ordered by `(timestamp, sequence)` and carry enough
//! structure for every metric to be derived from the log alone. Rendering
//! is line-oriented and byte-stable across runs and platforms.

use crate::core::{Duration, Timestamp};
use crate::device::{DeviceEvent, MessageKind};
use crate::netserver::ServerEvent;
use crate::radio::{FrameKind, LossReason, ReceptionOutcome, Verdict};
use std::fmt::Write as _;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Receiver {
    Gateway(usize),
    Device(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Record {
    ScenarioStart {
        name: String,
        seed: u64,
    },
    ScenarioEnd,
    AttackActive {
        index: usize,
        emitters: usize,
    },
    Emission {
        uid: u64,
        emitter: u32,
        kind: FrameKind,
        frequency_hz: u32,
        sf: u8,
        len: u16,
        confirmed: bool,
        air: Duration,
        content: u64,
    },
    Reception {
        uid: u64,
        receiver: Receiver,
        outcome: ReceptionOutcome,
        /// Reception time under the receiving gateway's offset clock.
        gw_time_us: Option<i64>,
    },
    Device {
        device: usize,
        event: DeviceEvent,
    },
    Server(ServerEvent),
    DownlinkTx {
        device: u32,
        gateway: usize,
        window: u8,
        frequency_hz: u32,
        sf: u8,
        len: u16,
    },
    DownlinkDropped {
        device: u32,
        gateway: usize,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct LogRecord {
    pub t: Timestamp,
    pub seq: u64,
    pub body: Record,
}

#[derive(Debug, Default, Clone, PartialEq)]
pub struct EventLog {
    pub records: Vec<LogRecord>,
}

fn frame_kind_tag(kind: FrameKind) -> &'static str {
    match kind {
        FrameKind::UplinkData => "uplink-data",
        FrameKind::DownlinkData => "downlink-data",
        FrameKind::JoinRequest => "join-request",
        FrameKind::JoinAccept => "join-accept",
        FrameKind::PlainLora => "plain-lora",
        FrameKind::PreambleOnly => "preamble-only",
    }
}

fn verdict_tag(v: Verdict) -> String {
    match v {
        Verdict::Decoded => "decoded".into(),
        Verdict::Lost(r) => format!("lost:{}", r.tag()),
    }
}

impl EventLog {
    pub fn push(&mut self, t: Timestamp, seq: u64, body: Record) {
        self.records.push(LogRecord { t, seq, body });
    }

    pub fn iter(&self) -> impl Iterator<Item = &LogRecord> {
        self.records.iter()
    }

    /// One line per record; the byte-identical replay artifact.
    pub fn render(&self) -> String {
        let mut s = String::with_capacity(self.records.len() * 64);
        for r in &self.records {
            let _ = write!(s, "{} {} ", r.t.as_micros(), r.seq);
            match &r.body {
                Record::ScenarioStart { name, seed } => {
                    let _ = write!(s, "scenario-start name={name} seed={seed}");
                }
                Record::ScenarioEnd => {
                    let _ = write!(s, "scenario-end");
                }
                Record::AttackActive { index, emitters } => {
                    let _ = write!(s, "attack-active index={index} emitters={emitters}");
                }
                Record::Emission {
                    uid,
                    emitter,
                    kind,
                    frequency_hz,
                    sf,
                    len,
                    confirmed,
                    air,
                    content,
                } => {
                    let _ = write!(
                        s,
                        "emission uid={uid} emitter={emitter} kind={} freq={frequency_hz} sf={sf} len={len} confirmed={confirmed} air={air} content={content}",
                        frame_kind_tag(*kind)
                    );
                }
                Record::Reception { uid, receiver, outcome, gw_time_us } => {
                    let recv = match receiver {
                        Receiver::Gateway(g) => format!("gw{g}"),
                        Receiver::Device(d) => format!("dev{d}"),
                    };
                    let _ = write!(
                        s,
                        "reception uid={uid} rx={recv} verdict={} rssi={:.2} snr={:.2}",
                        verdict_tag(outcome.verdict),
                        outcome.rssi_dbm,
                        outcome.snr_db
                    );
                    if let Some(gt) = gw_time_us {
                        let _ = write!(s, " gwtime={gt}");
                    }
                }
                Record::Device { device, event } => {
                    let _ = write!(s, "device dev={device} ");
                    let _ = match event {
                        DeviceEvent::PowerOn => write!(s, "power-on"),
                        DeviceEvent::PowerOff => write!(s, "power-off"),
                        DeviceEvent::JoinRequested { attempt, dr } => {
                            write!(s, "join-request attempt={attempt} sf={}", dr.spreading_factor())
                        }
                        DeviceEvent::Joined { dr, attempts } => {
                            write!(s, "joined sf={} attempts={attempts}", dr.spreading_factor())
                        }
                        DeviceEvent::UplinkQueued { kind, chain, attempt } => {
                            write!(s, "uplink kind={} chain={chain} attempt={attempt}", kind.tag())
                        }
                        DeviceEvent::MessageSkipped { kind, busy } => {
                            write!(s, "skipped kind={} busy={busy}", kind.tag())
                        }
                        DeviceEvent::AckReceived { chain, rtt } => {
                            write!(s, "ack chain={chain} rtt={rtt}")
                        }
                        DeviceEvent::ChainAbandoned { chain, attempts } => {
                            write!(s, "abandoned chain={chain} attempts={attempts}")
                        }
                        DeviceEvent::AdrApplied { from, to } => {
                            write!(
                                s,
                                "adr-applied from=DR{} to=DR{}",
                                from.index(),
                                to.index()
                            )
                        }
                        DeviceEvent::DownlinkIgnored => write!(s, "downlink-ignored"),
                    };
                }
                Record::Server(ev) => {
                    let _ = write!(s, "server ");
                    let _ = match ev {
                        ServerEvent::UplinkReceived {
                            device,
                            kind,
                            chain,
                            fcnt,
                            confirmed,
                            gateways,
                            best_gateway,
                            sf,
                            rssi_dbm,
                            snr_db,
                            ..
                        } => write!(
                            s,
                            "uplink dev={} kind={} chain={chain} fcnt={fcnt} confirmed={confirmed} gws={gateways} best=gw{best_gateway} sf={sf} rssi={rssi_dbm:.2} snr={snr_db:.2}",
                            device.0,
                            kind.tag()
                        ),
                        ServerEvent::JoinRequestSeen { device, gateways, sf } => {
                            write!(s, "join-request dev={} gws={gateways} sf={sf}", device.0)
                        }
                        ServerEvent::JoinAccepted { device, gateway } => {
                            write!(s, "join-accept dev={} gw={gateway}", device.0)
                        }
                        ServerEvent::JoinIgnored { device, reason } => {
                            write!(s, "join-ignored dev={} reason={reason}", device.0)
                        }
                        ServerEvent::ReplayRejected { device, fcnt } => {
                            write!(s, "replay-rejected dev={} fcnt={fcnt}", device.0)
                        }
                        ServerEvent::UnknownDevice { device } => {
                            write!(s, "unknown-device dev={}", device.0)
                        }
                        ServerEvent::AdrCommand { device, from, to } => {
                            write!(
                                s,
                                "adr-command dev={} from=DR{} to=DR{}",
                                device.0,
                                from.index(),
                                to.index()
                            )
                        }
                        ServerEvent::GatewayDisabled { gateway } => {
                            write!(s, "gateway-disabled gw={gateway}")
                        }
                    };
                }
                Record::DownlinkTx { device, gateway, window, frequency_hz, sf, len } => {
                    let _ = write!(
                        s,
                        "downlink dev={device} gw={gateway} window=rx{window} freq={frequency_hz} sf={sf} len={len}"
                    );
                }
                Record::DownlinkDropped { device, gateway } => {
                    let _ = write!(s, "downlink-dropped dev={device} gw={gateway}");
                }
            }
            s.push('\n');
        }
        s
    }

    /// Count records matching a predicate.
    pub fn count(&self, mut pred: impl FnMut(&Record) -> bool) -> usize {
        self.records.iter().filter(|r| pred(&r.body)).count()
    }
}

/// Convenience matchers used by metrics and tests.
impl Record {
    pub fn as_uplink_received(&self) -> Option<&ServerEvent> {
        match self {
            Record::Server(ev @ ServerEvent::UplinkReceived { .. }) => Some(ev),
            _ => None,
        }
    }

    pub fn uplink_kind(&self) -> Option<MessageKind> {
        match self {
            Record::Server(ServerEvent::UplinkReceived { kind, .. }) => Some(*kind),
            _ => None,
        }
    }

    pub fn loss_reason(&self) -> Option<LossReason> {
        match self {
            Record::Reception { outcome: ReceptionOutcome { verdict: Verdict::Lost(r), .. }, .. } => {
                Some(*r)
            }
            _ => None,
        }
    }
}
