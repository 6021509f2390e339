//! The three-dimensional VDTP configuration space.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DIMS: usize = 3;

const NAMES: [&str; DIMS] = ["chunk_size", "total_attempts", "retransmission_time"];

/// One candidate protocol configuration, searched as three reals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VdtpConfig {
    /// Payload bytes per data reply.
    pub chunk_size: f64,
    /// Transmissions allowed per request before the session is refused.
    pub total_attempts: f64,
    /// Seconds to wait for a reply before resending a request.
    pub retransmission_time: f64,
}

impl VdtpConfig {
    pub const fn new(chunk_size: f64, total_attempts: f64, retransmission_time: f64) -> Self {
        Self {
            chunk_size,
            total_attempts,
            retransmission_time,
        }
    }

    pub fn to_array(self) -> [f64; DIMS] {
        [
            self.chunk_size,
            self.total_attempts,
            self.retransmission_time,
        ]
    }

    pub fn from_array(x: [f64; DIMS]) -> Self {
        Self::new(x[0], x[1], x[2])
    }

    /// Interpret a slice of exactly three coordinates.
    pub fn from_slice(x: &[f64]) -> Result<Self> {
        let arr: [f64; DIMS] = x
            .try_into()
            .map_err(|_| Error::Config(format!("expected {DIMS} coordinates, got {}", x.len())))?;
        Ok(Self::from_array(arr))
    }

    /// Integer view consumed by the protocol, rounding half up.
    pub fn quantize(self) -> ProtocolSettings {
        ProtocolSettings {
            chunk_bytes: round_half_up(self.chunk_size).max(Bounds::CHUNK.0) as u64,
            attempts: round_half_up(self.total_attempts).max(1.0) as u32,
            timeout_s: self.retransmission_time,
        }
    }
}

fn round_half_up(x: f64) -> f64 {
    (x + 0.5).floor()
}

/// Quantized configuration as the simulator sees it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProtocolSettings {
    pub chunk_bytes: u64,
    pub attempts: u32,
    pub timeout_s: f64,
}

/// Box constraints on the search space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawBounds")]
pub struct Bounds {
    lower: [f64; DIMS],
    upper: [f64; DIMS],
}

#[derive(Deserialize)]
struct RawBounds {
    lower: [f64; DIMS],
    upper: [f64; DIMS],
}

impl TryFrom<RawBounds> for Bounds {
    type Error = Error;

    fn try_from(raw: RawBounds) -> Result<Self> {
        Bounds::new(raw.lower, raw.upper)
    }
}

impl Default for Bounds {
    fn default() -> Self {
        Self {
            lower: [Self::CHUNK.0, Self::ATTEMPTS.0, Self::TIMEOUT.0],
            upper: [Self::CHUNK.1, Self::ATTEMPTS.1, Self::TIMEOUT.1],
        }
    }
}

impl Bounds {
    pub const CHUNK: (f64, f64) = (128.0, 524_288.0);
    pub const ATTEMPTS: (f64, f64) = (1.0, 250.0);
    pub const TIMEOUT: (f64, f64) = (1.0, 10.0);

    pub fn new(lower: [f64; DIMS], upper: [f64; DIMS]) -> Result<Self> {
        for i in 0..DIMS {
            if !(lower[i].is_finite() && upper[i].is_finite() && lower[i] < upper[i]) {
                return Err(Error::Config(format!(
                    "{}: lower bound {} must be below upper bound {}",
                    NAMES[i], lower[i], upper[i]
                )));
            }
        }
        Ok(Self { lower, upper })
    }

    pub fn lower(&self) -> [f64; DIMS] {
        self.lower
    }

    pub fn upper(&self) -> [f64; DIMS] {
        self.upper
    }

    pub fn sample_uniform<R: Rng + ?Sized>(&self, rng: &mut R) -> VdtpConfig {
        let mut x = [0.0; DIMS];
        for (i, xi) in x.iter_mut().enumerate() {
            *xi = rng.random_range(self.lower[i]..=self.upper[i]);
        }
        VdtpConfig::from_array(x)
    }

    pub fn clamp(&self, config: VdtpConfig) -> VdtpConfig {
        let mut x = config.to_array();
        for (i, xi) in x.iter_mut().enumerate() {
            *xi = xi.max(self.lower[i]).min(self.upper[i]);
        }
        VdtpConfig::from_array(x)
    }

    pub fn contains(&self, config: &VdtpConfig) -> bool {
        self.check(config).is_ok()
    }

    /// Report every coordinate that falls outside its bound.
    pub fn check(&self, config: &VdtpConfig) -> Result<()> {
        let violations: Vec<String> = config
            .to_array()
            .iter()
            .enumerate()
            .filter(|(i, x)| !(**x >= self.lower[*i] && **x <= self.upper[*i]))
            .map(|(i, x)| {
                format!(
                    "{} = {} outside [{}, {}]",
                    NAMES[i], x, self.lower[i], self.upper[i]
                )
            })
            .collect();
        if violations.is_empty() {
            Ok(())
        } else {
            Err(Error::OutOfBounds(format!(
                "bound violation: {}",
                violations.join("; ")
            )))
        }
    }

    /// Map a point of the unit cube onto these bounds.
    pub fn from_unit(&self, u: &[f64]) -> VdtpConfig {
        let mut x = [0.0; DIMS];
        for i in 0..DIMS {
            x[i] = self.lower[i] + u[i] * (self.upper[i] - self.lower[i]);
        }
        self.clamp(VdtpConfig::from_array(x))
    }

    pub fn to_unit(&self, config: &VdtpConfig) -> [f64; DIMS] {
        let x = config.to_array();
        let mut u = [0.0; DIMS];
        for i in 0..DIMS {
            u[i] = (x[i] - self.lower[i]) / (self.upper[i] - self.lower[i]);
        }
        u
    }

    /// Per-dimension (lower, upper) pairs for the optimizers.
    pub fn ranges(&self) -> Vec<(f64, f64)> {
        (0..DIMS).map(|i| (self.lower[i], self.upper[i])).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed;
    use proptest::prelude::*;

    #[test]
    fn default_bounds_match_protocol_ranges() {
        let b = Bounds::default();
        assert_eq!(b.lower(), [128.0, 1.0, 1.0]);
        assert_eq!(b.upper(), [524_288.0, 250.0, 10.0]);
    }

    #[test]
    fn degenerate_bounds_rejected() {
        let eps = 1e-9;
        assert!(Bounds::new([1.0 + eps, 0.0, 0.0], [1.0, 1.0, 1.0]).is_err());
        assert!(Bounds::new([1.0, 0.0, 0.0], [1.0, 1.0, 1.0]).is_err());
        assert!(Bounds::new([f64::NAN, 0.0, 0.0], [1.0, 1.0, 1.0]).is_err());
    }

    #[test]
    fn samples_stay_inside_and_are_reproducible() {
        let b = Bounds::default();
        let mut rng = seed::rng(7);
        for _ in 0..1000 {
            assert!(b.contains(&b.sample_uniform(&mut rng)));
        }
        let a = b.sample_uniform(&mut seed::rng(99));
        let c = b.sample_uniform(&mut seed::rng(99));
        assert_eq!(a, c);
    }

    #[test]
    fn clamp_examples() {
        let b = Bounds::default();
        assert_eq!(
            b.clamp(VdtpConfig::new(64.0, 0.0, 0.5)),
            VdtpConfig::new(128.0, 1.0, 1.0)
        );
        assert_eq!(
            b.clamp(VdtpConfig::new(41358.0, 3.0, 10.0)),
            VdtpConfig::new(41358.0, 3.0, 10.0)
        );
        assert_eq!(
            b.clamp(VdtpConfig::new(1e9, 300.0, 20.0)),
            VdtpConfig::new(524_288.0, 250.0, 10.0)
        );
    }

    #[test]
    fn quantize_examples() {
        let q = VdtpConfig::new(128.4, 1.2, 1.0).quantize();
        assert_eq!((q.chunk_bytes, q.attempts, q.timeout_s), (128, 1, 1.0));
        let q = VdtpConfig::new(41358.0, 3.0, 10.0).quantize();
        assert_eq!((q.chunk_bytes, q.attempts, q.timeout_s), (41358, 3, 10.0));
        let q = VdtpConfig::new(524_287.6, 249.5, 9.99).quantize();
        assert_eq!(
            (q.chunk_bytes, q.attempts, q.timeout_s),
            (524_288, 250, 9.99)
        );
    }

    #[test]
    fn check_lists_every_violation() {
        let err = Bounds::default()
            .check(&VdtpConfig::new(100.0, 3.0, 11.0))
            .unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("chunk_size"), "{msg}");
        assert!(msg.contains("retransmission_time"), "{msg}");
        assert!(!msg.contains("total_attempts"), "{msg}");
    }

    #[test]
    fn unit_mapping_round_trips() {
        let b = Bounds::default();
        let c = VdtpConfig::new(41358.0, 3.0, 10.0);
        let back = b.from_unit(&b.to_unit(&c));
        for (x, y) in back.to_array().iter().zip(c.to_array()) {
            assert!((x - y).abs() <= 1e-9 * y.abs());
        }
    }

    /// Pearson chi-square over 10 equiprobable bins.
    fn chi_square_uniform(u: &[f64]) -> f64 {
        let mut counts = [0usize; 10];
        for &v in u {
            counts[((v * 10.0) as usize).min(9)] += 1;
        }
        let expected = u.len() as f64 / 10.0;
        counts
            .iter()
            .map(|&c| (c as f64 - expected).powi(2) / expected)
            .sum()
    }

    #[test]
    fn sample_marginals_are_uniform() {
        use statrs::distribution::{ChiSquared, ContinuousCDF};
        let b = Bounds::default();
        let mut rng = seed::rng(2024);
        let units: Vec<[f64; DIMS]> = (0..10_000)
            .map(|_| b.to_unit(&b.sample_uniform(&mut rng)))
            .collect();
        let dist = ChiSquared::new(9.0).unwrap();
        for d in 0..DIMS {
            let col: Vec<f64> = units.iter().map(|u| u[d]).collect();
            let p = 1.0 - dist.cdf(chi_square_uniform(&col));
            assert!(p > 0.001, "dimension {d}: p = {p}");
        }
    }

    proptest! {
        #[test]
        fn clamp_is_feasible_and_idempotent(
            a in -1e10f64..1e10, t in -1e4f64..1e4, r in -1e3f64..1e3
        ) {
            let b = Bounds::default();
            let once = b.clamp(VdtpConfig::new(a, t, r));
            prop_assert!(b.contains(&once));
            prop_assert_eq!(b.clamp(once), once);
        }

        #[test]
        fn quantized_values_respect_bounds(u in prop::array::uniform3(0.0f64..=1.0)) {
            let b = Bounds::default();
            let q = b.from_unit(&u).quantize();
            prop_assert!((128..=524_288).contains(&q.chunk_bytes));
            prop_assert!((1..=250).contains(&q.attempts));
            prop_assert!((1.0..=10.0).contains(&q.timeout_s));
        }
    }
}
