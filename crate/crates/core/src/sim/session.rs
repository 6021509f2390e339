//! Event-driven simulation of one petitioner/owner file transfer.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::fmt;

use rand::Rng as _;
use serde::Serialize;

use super::channel::Link;
use super::Scenario;
use crate::seed::{self, Rng};
use crate::space::ProtocolSettings;

pub fn n_chunks(file_size_bytes: u64, chunk_bytes: u64) -> u64 {
    file_size_bytes.div_ceil(chunk_bytes)
}

/// Request under way: the file-information handshake or the data request for a chunk.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Request {
    FileInfo,
    /// 1-based chunk index.
    Data(u64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum PacketType {
    Firq,
    Firp,
    Drq(u64),
    Drp(u64),
}

impl fmt::Display for PacketType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PacketType::Firq => write!(f, "FIRQ"),
            PacketType::Firp => write!(f, "FIRP"),
            PacketType::Drq(i) => write!(f, "DRQ({i})"),
            PacketType::Drp(i) => write!(f, "DRP({i})"),
        }
    }
}

impl Request {
    fn packet(self) -> PacketType {
        match self {
            Request::FileInfo => PacketType::Firq,
            Request::Data(i) => PacketType::Drq(i),
        }
    }

    fn reply(self) -> PacketType {
        match self {
            Request::FileInfo => PacketType::Firp,
            Request::Data(i) => PacketType::Drp(i),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum EventKind {
    Send,
    Lost,
    Receive,
    /// A reply that no longer matches the outstanding (request, attempt).
    Stale,
    Timeout,
    Complete,
    Refused,
}

impl fmt::Display for EventKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            EventKind::Send => "send",
            EventKind::Lost => "lost",
            EventKind::Receive => "receive",
            EventKind::Stale => "stale",
            EventKind::Timeout => "timeout",
            EventKind::Complete => "complete",
            EventKind::Refused => "refused",
        };
        f.write_str(s)
    }
}

/// One line of the optional event trace.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EventRecord {
    pub virtual_time: f64,
    pub session_id: u32,
    pub event_kind: EventKind,
    pub packet_type: Option<PacketType>,
    pub attempt_no: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    AwaitingFirp,
    Transferring,
    Done,
    Refused,
}

/// Petitioner-side protocol state.
#[derive(Debug, Clone)]
pub struct SessionState {
    pub phase: Phase,
    pub next_chunk_index: u64,
    pub attempts_on_current_request: u32,
    pub clock_s: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SessionOutcome {
    pub time_s: f64,
    pub lost_packets: u64,
    pub bytes_delivered: u64,
    pub refused: bool,
}

#[derive(Debug, Clone, Copy)]
enum Action {
    RequestArrives(Request, u32),
    ReplyArrives(Request, u32),
    TimerFires(Request, u32),
}

struct Event {
    time: f64,
    seq: u64,
    action: Action,
}

impl PartialEq for Event {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Event {}
impl PartialOrd for Event {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Event {
    // Reversed so the max-heap pops the earliest event; seq breaks ties FIFO.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .time
            .total_cmp(&self.time)
            .then_with(|| other.seq.cmp(&self.seq))
    }
}

struct Session<'a> {
    settings: ProtocolSettings,
    scenario: &'a Scenario,
    n_chunks: u64,
    loss: f64,
    link: Link,
    loss_rng: Rng,
    queue: BinaryHeap<Event>,
    seq: u64,
    state: SessionState,
    current: Request,
    lost: u64,
    delivered: u64,
    id: u32,
    log: Option<&'a mut Vec<EventRecord>>,
}

impl<'a> Session<'a> {
    fn record(&mut self, time: f64, kind: EventKind, packet: Option<PacketType>, attempt: u32) {
        if let Some(log) = self.log.as_deref_mut() {
            log.push(EventRecord {
                virtual_time: time,
                session_id: self.id,
                event_kind: kind,
                packet_type: packet,
                attempt_no: attempt,
            });
        }
    }

    fn schedule(&mut self, time: f64, action: Action) {
        self.seq += 1;
        self.queue.push(Event {
            time,
            seq: self.seq,
            action,
        });
    }

    fn payload(&self, packet: PacketType) -> u64 {
        match packet {
            PacketType::Drp(i) => {
                let chunk = self.settings.chunk_bytes;
                chunk.min(self.scenario.file_size_bytes - (i - 1) * chunk)
            }
            _ => 0,
        }
    }

    /// Put a packet on the air; returns its arrival time if the channel delivers it.
    fn transmit(&mut self, now: f64, packet: PacketType, attempt: u32) -> Option<f64> {
        let arrival =
            now + self.scenario.tx_time(self.payload(packet)) + self.scenario.propagation_delay_s;
        self.record(now, EventKind::Send, Some(packet), attempt);
        let survives = self.loss_rng.random::<f64>() >= self.loss;
        if survives && self.link.up_throughout(now, arrival) {
            Some(arrival)
        } else {
            self.lost += 1;
            self.record(now, EventKind::Lost, Some(packet), attempt);
            None
        }
    }

    fn send_request(&mut self, now: f64, request: Request, attempt: u32) {
        self.current = request;
        self.state.attempts_on_current_request = attempt;
        if let Some(at) = self.transmit(now, request.packet(), attempt) {
            self.schedule(at, Action::RequestArrives(request, attempt));
        }
        self.schedule(
            now + self.settings.timeout_s,
            Action::TimerFires(request, attempt),
        );
    }

    fn outstanding(&self, request: Request, attempt: u32) -> bool {
        matches!(self.state.phase, Phase::AwaitingFirp | Phase::Transferring)
            && self.current == request
            && self.state.attempts_on_current_request == attempt
    }

    fn run(mut self) -> SessionOutcome {
        self.send_request(0.0, Request::FileInfo, 1);
        while let Some(Event { time, action, .. }) = self.queue.pop() {
            if matches!(self.state.phase, Phase::Done | Phase::Refused) {
                break;
            }
            self.state.clock_s = time;
            match action {
                Action::RequestArrives(request, attempt) => {
                    // The owner answers every request it hears, duplicates included.
                    self.record(time, EventKind::Receive, Some(request.packet()), attempt);
                    if let Some(at) = self.transmit(time, request.reply(), attempt) {
                        self.schedule(at, Action::ReplyArrives(request, attempt));
                    }
                }
                Action::ReplyArrives(request, attempt) => {
                    if !self.outstanding(request, attempt) {
                        self.record(time, EventKind::Stale, Some(request.reply()), attempt);
                        continue;
                    }
                    self.record(time, EventKind::Receive, Some(request.reply()), attempt);
                    match request {
                        Request::FileInfo => {
                            self.state.phase = Phase::Transferring;
                            self.state.next_chunk_index = 1;
                            self.send_request(time, Request::Data(1), 1);
                        }
                        Request::Data(i) => {
                            self.delivered += self.payload(PacketType::Drp(i));
                            if i == self.n_chunks {
                                self.state.phase = Phase::Done;
                                self.record(time, EventKind::Complete, None, attempt);
                            } else {
                                self.state.next_chunk_index = i + 1;
                                self.send_request(time, Request::Data(i + 1), 1);
                            }
                        }
                    }
                }
                Action::TimerFires(request, attempt) => {
                    if !self.outstanding(request, attempt) {
                        continue;
                    }
                    self.record(time, EventKind::Timeout, Some(request.packet()), attempt);
                    if attempt >= self.settings.attempts {
                        self.state.phase = Phase::Refused;
                        self.record(time, EventKind::Refused, Some(request.packet()), attempt);
                    } else {
                        self.send_request(time, request, attempt + 1);
                    }
                }
            }
        }
        SessionOutcome {
            time_s: self.state.clock_s,
            lost_packets: self.lost,
            bytes_delivered: self.delivered,
            refused: self.state.phase == Phase::Refused,
        }
    }
}

/// Simulate one transfer of `scenario.file_size_bytes` under `settings`.
///
/// Deterministic in `seed`: the link timeline and per-packet losses use
/// separate streams derived from it.
pub fn simulate_session(
    settings: &ProtocolSettings,
    scenario: &Scenario,
    seed: u64,
) -> SessionOutcome {
    run_session(settings, scenario, seed, 0, None)
}

/// As [`simulate_session`], appending every protocol event to `log`.
pub fn simulate_session_traced(
    settings: &ProtocolSettings,
    scenario: &Scenario,
    seed: u64,
    session_id: u32,
    log: &mut Vec<EventRecord>,
) -> SessionOutcome {
    run_session(settings, scenario, seed, session_id, Some(log))
}

fn run_session(
    settings: &ProtocolSettings,
    scenario: &Scenario,
    seed: u64,
    session_id: u32,
    log: Option<&mut Vec<EventRecord>>,
) -> SessionOutcome {
    assert!(
        settings.chunk_bytes >= 1 && settings.attempts >= 1,
        "quantized settings required"
    );
    let session = Session {
        settings: *settings,
        scenario,
        n_chunks: n_chunks(scenario.file_size_bytes, settings.chunk_bytes),
        loss: scenario.effective_loss(),
        link: Link::new(scenario, seed::rng(seed::derive(seed, 0))),
        loss_rng: seed::rng(seed::derive(seed, 1)),
        queue: BinaryHeap::new(),
        seq: 0,
        state: SessionState {
            phase: Phase::AwaitingFirp,
            next_chunk_index: 1,
            attempts_on_current_request: 0,
            clock_s: 0.0,
        },
        current: Request::FileInfo,
        lost: 0,
        delivered: 0,
        id: session_id,
        log,
    };
    session.run()
}
