use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use vdtp_tune::sim::{
    n_chunks, simulate_replication, simulate_session, simulate_session_traced, EventKind,
    PacketType, Scenario,
};
use vdtp_tune::ProtocolSettings;

fn lossless(bandwidth: f64, header: u64, prop: f64, file: u64) -> Scenario {
    Scenario {
        bandwidth_bps: bandwidth,
        header_bytes: header,
        propagation_delay_s: prop,
        file_size_bytes: file,
        ..Scenario::ideal()
    }
}

fn dead_channel() -> Scenario {
    Scenario {
        base_loss_prob: 1.0,
        ..Scenario::ideal()
    }
}

/// Stop-and-wait time written out from scratch: one handshake round trip,
/// then one round trip per chunk whose reply carries that chunk.
fn closed_form(chunk: u64, file: u64, bandwidth: f64, header: u64, prop: f64) -> f64 {
    let tx = |payload: u64| (payload + header) as f64 * 8.0 / bandwidth;
    let mut t = 2.0 * prop + tx(0) + tx(0);
    let mut left = file;
    while left > 0 {
        let piece = left.min(chunk);
        t += 2.0 * prop + tx(0) + tx(piece);
        left -= piece;
    }
    t
}

#[test]
fn lossless_time_matches_closed_form() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for case in 0..50 {
        let chunk = rng.random_range(128..=524_288u64);
        let file = rng.random_range(1..=4_000_000u64);
        let bandwidth = rng.random_range(1e6..2e7);
        let prop = rng.random_range(0.0..0.05);
        let header = rng.random_range(0..=128u64);
        let scenario = lossless(bandwidth, header, prop, file);
        let settings = ProtocolSettings {
            chunk_bytes: chunk,
            attempts: 3,
            timeout_s: 10.0,
        };
        let out = simulate_session(&settings, &scenario, case);
        let expected = closed_form(chunk, file, bandwidth, header, prop);
        assert!(!out.refused);
        assert_eq!(out.lost_packets, 0);
        assert_eq!(out.bytes_delivered, file);
        assert!(
            (out.time_s - expected).abs() <= 1e-9,
            "case {case}: {} vs {expected}",
            out.time_s
        );
    }
}

#[test]
fn chunk_count_is_ceiling() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..1000 {
        let file = rng.random_range(1..=10_000_000u64);
        let chunk = rng.random_range(1..=1_000_000u64);
        let expected = (file as f64 / chunk as f64).ceil() as u64;
        assert_eq!(n_chunks(file, chunk), expected, "{file} / {chunk}");
    }
}

#[test]
fn lossless_replication_totals() {
    let s = Scenario::ideal();
    let out = simulate_replication(
        &ProtocolSettings {
            chunk_bytes: 25_600,
            attempts: 8,
            timeout_s: 8.0,
        },
        &s,
        5,
    );
    assert_eq!(out.lost_packets, 0.0);
    assert_eq!(out.refused_sessions, 0);
    assert_eq!(
        out.data_transferred_kbytes,
        s.sessions as f64 * s.file_size_bytes as f64 / 1024.0
    );
}

#[test]
fn dead_channel_replication_delivers_nothing() {
    let s = dead_channel();
    let out = simulate_replication(
        &ProtocolSettings {
            chunk_bytes: 25_600,
            attempts: 4,
            timeout_s: 2.0,
        },
        &s,
        5,
    );
    assert_eq!(out.data_transferred_kbytes, 0.0);
    assert_eq!(out.refused_sessions, s.sessions);
}

#[test]
fn presets_are_ordered() {
    let urban = Scenario::preset("urban").unwrap();
    let highway = Scenario::preset("highway").unwrap();
    assert!(highway.base_loss_prob > urban.base_loss_prob);
    assert!(highway.link_up_mean_s < urban.link_up_mean_s);
    let a1 = Scenario::preset("urban_a1").unwrap();
    let a2 = Scenario::preset("urban_a2").unwrap();
    let a3 = Scenario::preset("urban_a3").unwrap();
    assert!(a1.density_scale < a2.density_scale && a2.density_scale < a3.density_scale);
}

#[test]
fn higher_loss_means_more_lost_packets() {
    // One-sided Welch test on per-replication lost packets, 1000 replications each.
    let settings = ProtocolSettings {
        chunk_bytes: 25_600,
        attempts: 8,
        timeout_s: 2.0,
    };
    let sample = |loss: f64| -> Vec<f64> {
        let s = Scenario {
            base_loss_prob: loss,
            sessions: 1,
            ..Scenario::ideal()
        };
        (0..1000)
            .map(|r| simulate_replication(&settings, &s, r).lost_packets)
            .collect()
    };
    let (low, high) = (sample(0.01), sample(0.03));
    let stats = |x: &[f64]| {
        let m = x.iter().sum::<f64>() / x.len() as f64;
        let v = x.iter().map(|a| (a - m).powi(2)).sum::<f64>() / (x.len() - 1) as f64;
        (m, v)
    };
    let ((m1, v1), (m2, v2)) = (stats(&low), stats(&high));
    let z = (m2 - m1) / (v1 / 1000.0 + v2 / 1000.0).sqrt();
    assert!(z > 2.326, "z = {z}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn total_loss_refuses_after_every_attempt(attempts in 1u32..=40, timeout in 1.0f64..10.0, chunk in 128u64..=524_288, seed in any::<u64>()) {
        let settings = ProtocolSettings { chunk_bytes: chunk, attempts, timeout_s: timeout };
        let mut log = Vec::new();
        let out = simulate_session_traced(&settings, &dead_channel(), seed, 0, &mut log);
        prop_assert!(out.refused);
        prop_assert_eq!(out.bytes_delivered, 0);
        prop_assert_eq!(out.lost_packets, attempts as u64);
        prop_assert!((out.time_s - attempts as f64 * timeout).abs() <= 1e-9 * attempts as f64 * timeout);
        let firq_sends = log.iter().filter(|e| e.event_kind == EventKind::Send && e.packet_type == Some(PacketType::Firq)).count();
        prop_assert_eq!(firq_sends, attempts as usize);
    }

    #[test]
    fn no_request_is_sent_more_than_attempts_times(attempts in 1u32..=6, timeout in 0.01f64..2.0, loss in 0.0f64..0.6, seed in any::<u64>()) {
        let settings = ProtocolSettings { chunk_bytes: 65_536, attempts, timeout_s: timeout };
        let scenario = Scenario { base_loss_prob: loss, link_up_mean_s: 5.0, link_down_mean_s: 1.0, ..Scenario::ideal() };
        let mut log = Vec::new();
        let out = simulate_session_traced(&settings, &scenario, seed, 0, &mut log);
        let mut sends = std::collections::HashMap::new();
        for e in log.iter().filter(|e| e.event_kind == EventKind::Send) {
            if matches!(e.packet_type, Some(PacketType::Firq) | Some(PacketType::Drq(_))) {
                *sends.entry(e.packet_type).or_insert(0u32) += 1;
            }
        }
        prop_assert!(sends.values().all(|&n| n <= attempts));
        let lost = log.iter().filter(|e| e.event_kind == EventKind::Lost).count() as u64;
        prop_assert_eq!(lost, out.lost_packets);
        prop_assert!(out.refused || out.bytes_delivered == scenario.file_size_bytes);
    }

    #[test]
    fn bigger_chunks_never_slow_a_lossless_transfer(a in 128u64..=524_288, b in 128u64..=524_288) {
        let (small, large) = (a.min(b), a.max(b));
        let s = Scenario::ideal();
        let t = |chunk| simulate_session(&ProtocolSettings { chunk_bytes: chunk, attempts: 2, timeout_s: 10.0 }, &s, 0).time_s;
        prop_assert!(t(large) <= t(small) + 1e-12);
    }
}
