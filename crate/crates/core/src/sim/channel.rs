use rand::Rng as _;
use rand_distr::{Distribution, Exp};

use super::Scenario;
use crate::seed::Rng;

/// Two-state renewal link with exponential up/down dwell times.
///
/// The timeline is generated lazily and kept, so queries may arrive in any
/// time order without disturbing the realization.
pub struct Link {
    always_up: bool,
    up_dwell: Option<Exp<f64>>,
    down_dwell: Option<Exp<f64>>,
    rng: Rng,
    /// Contiguous segments `(end_time, is_up)`; segment k starts at the end of k-1.
    segments: Vec<(f64, bool)>,
}

impl Link {
    pub fn new(scenario: &Scenario, mut rng: Rng) -> Self {
        if scenario.always_up() {
            return Self {
                always_up: true,
                up_dwell: None,
                down_dwell: None,
                rng,
                segments: vec![],
            };
        }
        let up_mean = scenario.link_up_mean_s;
        let down_mean = scenario.effective_down_mean();
        let up_dwell = Exp::new(1.0 / up_mean).expect("positive rate");
        let down_dwell = Exp::new(1.0 / down_mean).expect("positive rate");
        // Stationary start: memorylessness makes the residual dwell exponential too.
        let start_up = rng.random::<f64>() < up_mean / (up_mean + down_mean);
        let first = if start_up {
            up_dwell.sample(&mut rng)
        } else {
            down_dwell.sample(&mut rng)
        };
        Self {
            always_up: false,
            up_dwell: Some(up_dwell),
            down_dwell: Some(down_dwell),
            rng,
            segments: vec![(first, start_up)],
        }
    }

    fn extend_to(&mut self, t: f64) {
        while self.segments.last().is_some_and(|&(end, _)| end <= t) {
            let &(end, up) = self.segments.last().unwrap();
            let dwell = if up { &self.down_dwell } else { &self.up_dwell };
            let len = dwell.as_ref().unwrap().sample(&mut self.rng);
            self.segments.push((end + len, !up));
        }
    }

    /// Whether the link stays connected for the whole interval `[start, end]`.
    pub fn up_throughout(&mut self, start: f64, end: f64) -> bool {
        if self.always_up {
            return true;
        }
        self.extend_to(end);
        let first = self
            .segments
            .partition_point(|&(seg_end, _)| seg_end <= start);
        self.segments[first..]
            .iter()
            .scan(false, |past_end, &(seg_end, up)| {
                if *past_end {
                    return None;
                }
                *past_end = seg_end > end;
                Some(up)
            })
            .all(|up| up)
    }
}
