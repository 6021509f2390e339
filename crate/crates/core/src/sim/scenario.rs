use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Channel and traffic model standing in for one VANET instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    pub bandwidth_bps: f64,
    /// Framing overhead added to every packet.
    pub header_bytes: u64,
    /// One-way delay per packet on top of its serialization time.
    pub propagation_delay_s: f64,
    /// Per-packet loss probability while the link is up.
    pub base_loss_prob: f64,
    /// Mean connected dwell time; `inf` keeps the link permanently up.
    pub link_up_mean_s: f64,
    pub link_down_mean_s: f64,
    pub sessions: u32,
    pub file_size_bytes: u64,
    /// Vehicle-density stress factor; scales loss and disconnection.
    #[serde(default)]
    pub density_scale: f64,
}

const URBAN: &str = include_str!("../../../../scenarios/urban.cfg");
const HIGHWAY: &str = include_str!("../../../../scenarios/highway.cfg");
const URBAN_A2: &str = include_str!("../../../../scenarios/urban_a2.cfg");
const URBAN_A3: &str = include_str!("../../../../scenarios/urban_a3.cfg");

/// Names accepted by [`Scenario::preset`].
pub const PRESETS: [&str; 4] = ["urban", "highway", "urban_a2", "urban_a3"];

impl Scenario {
    pub fn preset(name: &str) -> Result<Self> {
        let text = match name.to_ascii_lowercase().replace('-', "_").as_str() {
            "urban" | "urban_a1" => URBAN,
            "highway" => HIGHWAY,
            "urban_a2" => URBAN_A2,
            "urban_a3" => URBAN_A3,
            _ => return Err(Error::UnknownScenario(name.to_string())),
        };
        Self::parse(text)
    }

    /// Resolve a preset name, or fall back to reading a scenario file.
    pub fn resolve(name_or_path: &str) -> Result<Self> {
        match Self::preset(name_or_path) {
            Ok(s) => Ok(s),
            Err(Error::UnknownScenario(_)) if Path::new(name_or_path).is_file() => {
                Self::load(name_or_path)
            }
            Err(e) => Err(e),
        }
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
    }

    pub fn parse(text: &str) -> Result<Self> {
        let s: Scenario = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        s.validate()?;
        Ok(s)
    }

    /// Lossless, permanently connected channel with the Urban radio settings.
    pub fn ideal() -> Self {
        Self {
            name: "ideal".into(),
            bandwidth_bps: 5.5e6,
            header_bytes: 64,
            propagation_delay_s: 0.01,
            base_loss_prob: 0.0,
            link_up_mean_s: f64::INFINITY,
            link_down_mean_s: 1.0,
            sessions: 20,
            file_size_bytes: 1_048_576,
            density_scale: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Config(format!("scenario `{}`: {msg}", self.name)));
        if !(self.bandwidth_bps > 0.0 && self.bandwidth_bps.is_finite()) {
            return fail(format!(
                "bandwidth_bps must be positive, got {}",
                self.bandwidth_bps
            ));
        }
        if !(0.0..1.0).contains(&self.base_loss_prob) && self.base_loss_prob != 1.0 {
            return fail(format!(
                "base_loss_prob must lie in [0, 1], got {}",
                self.base_loss_prob
            ));
        }
        if !(self.link_up_mean_s > 0.0) || !(self.link_down_mean_s > 0.0) {
            return fail("link dwell means must be positive".into());
        }
        if !self.link_down_mean_s.is_finite() {
            return fail("link_down_mean_s must be finite".into());
        }
        if !(self.propagation_delay_s >= 0.0 && self.propagation_delay_s.is_finite()) {
            return fail("propagation_delay_s must be non-negative".into());
        }
        if self.sessions < 1 {
            return fail("sessions must be at least 1".into());
        }
        if self.file_size_bytes < 1 {
            return fail("file_size_bytes must be at least 1".into());
        }
        if !(self.density_scale >= 0.0 && self.density_scale.is_finite()) {
            return fail("density_scale must be non-negative".into());
        }
        Ok(())
    }

    /// Per-packet loss while connected, after density scaling.
    ///
    /// A base probability of exactly 1 models a dead channel and bypasses the cap.
    pub fn effective_loss(&self) -> f64 {
        if self.base_loss_prob >= 1.0 {
            1.0
        } else {
            (self.base_loss_prob * (1.0 + self.density_scale)).min(0.95)
        }
    }

    pub fn effective_down_mean(&self) -> f64 {
        self.link_down_mean_s * (1.0 + self.density_scale)
    }

    pub fn always_up(&self) -> bool {
        self.link_up_mean_s.is_infinite()
    }

    /// Serialization time of a packet carrying `payload` bytes.
    pub fn tx_time(&self, payload: u64) -> f64 {
        ((payload + self.header_bytes) * 8) as f64 / self.bandwidth_bps
    }
}
