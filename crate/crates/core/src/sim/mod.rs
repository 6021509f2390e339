//! Discrete-event simulation of VDTP file transfers over a vehicular channel.
//!
//! A petitioner asks the owner for the file size (FIRQ/FIRP) and then pulls
//! the file chunk by chunk (DRQ(i)/DRP(i)), stop-and-wait. Each request is
//! retransmitted after `retransmission_time` without a reply, and the session
//! is refused once a request has been sent `total_attempts` times.
//!
//! Packets cross a two-state link: they are lost if the link drops at any
//! point of their flight, and independently with the scenario's loss rate.

mod channel;
mod scenario;
mod session;

use std::io::Write;

use serde::{Deserialize, Serialize};

pub use channel::Link;
pub use scenario::{Scenario, PRESETS};
pub use session::{
    n_chunks, simulate_session, simulate_session_traced, EventKind, EventRecord, PacketType, Phase,
    SessionOutcome, SessionState,
};

use crate::seed;
use crate::space::ProtocolSettings;

/// Aggregate of one replication: `scenario.sessions` independent transfers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransferOutcome {
    /// Mean session duration; refused sessions count their time until refusal.
    pub transmission_time_s: f64,
    /// Mean lost packets per session.
    pub lost_packets: f64,
    /// Payload delivered across all sessions, in KiB.
    pub data_transferred_kbytes: f64,
    pub completed_sessions: u32,
    pub refused_sessions: u32,
}

impl TransferOutcome {
    pub fn sessions(&self) -> u32 {
        self.completed_sessions + self.refused_sessions
    }

    /// Mean payload delivered per session, in KiB.
    pub fn kbytes_per_session(&self) -> f64 {
        self.data_transferred_kbytes / self.sessions() as f64
    }

    pub fn from_sessions(sessions: &[SessionOutcome]) -> Self {
        let n = sessions.len() as f64;
        let refused = sessions.iter().filter(|s| s.refused).count() as u32;
        Self {
            transmission_time_s: sessions.iter().map(|s| s.time_s).sum::<f64>() / n,
            lost_packets: sessions.iter().map(|s| s.lost_packets as f64).sum::<f64>() / n,
            data_transferred_kbytes: sessions.iter().map(|s| s.bytes_delivered).sum::<u64>() as f64
                / 1024.0,
            completed_sessions: sessions.len() as u32 - refused,
            refused_sessions: refused,
        }
    }
}

/// Session `i` of a replication seeded with `seed` uses `derive(seed, i)`.
pub fn simulate_replication(
    settings: &ProtocolSettings,
    scenario: &Scenario,
    seed: u64,
) -> TransferOutcome {
    let sessions: Vec<SessionOutcome> = (0..scenario.sessions)
        .map(|i| simulate_session(settings, scenario, seed::derive(seed, i as u64)))
        .collect();
    TransferOutcome::from_sessions(&sessions)
}

/// As [`simulate_replication`], also returning the merged event trace.
pub fn simulate_replication_traced(
    settings: &ProtocolSettings,
    scenario: &Scenario,
    seed: u64,
) -> (TransferOutcome, Vec<EventRecord>) {
    let mut log = Vec::new();
    let sessions: Vec<SessionOutcome> = (0..scenario.sessions)
        .map(|i| {
            simulate_session_traced(
                settings,
                scenario,
                seed::derive(seed, i as u64),
                i,
                &mut log,
            )
        })
        .collect();
    (TransferOutcome::from_sessions(&sessions), log)
}

/// Delivered KiB per second of transfer time, per completed session.
pub fn effective_throughput(outcome: &TransferOutcome) -> f64 {
    if outcome.completed_sessions == 0 || outcome.transmission_time_s <= 0.0 {
        return 0.0;
    }
    outcome.data_transferred_kbytes
        / outcome.completed_sessions as f64
        / outcome.transmission_time_s
}

/// Write an event trace as CSV: virtual_time, session_id, event_kind, packet_type, attempt_no.
pub fn write_event_trace<W: Write>(events: &[EventRecord], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "virtual_time",
        "session_id",
        "event_kind",
        "packet_type",
        "attempt_no",
    ])?;
    for e in events {
        w.write_record([
            e.virtual_time.to_string(),
            e.session_id.to_string(),
            e.event_kind.to_string(),
            e.packet_type.map(|p| p.to_string()).unwrap_or_default(),
            e.attempt_no.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
