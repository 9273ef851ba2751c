use std::fmt::Write as _;

use crate::learner::EpisodeRecord;
use crate::Scalar;

pub const CSV_HEADER: &str = "window_start,avg_score,completion_pct,epsilon";

/// Aggregates over one window of consecutive training episodes.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MetricsWindow {
    /// Index of the window's first episode.
    pub window_start: u64,
    pub episodes: u64,
    pub avg_score: f64,
    pub completion_pct: f64,
    /// Exploration rate in effect after the window's last episode.
    pub epsilon: f64,
    /// Shorter than the configured window (only ever the last one).
    pub partial: bool,
}

/// Folds episode records into fixed-size windows.
#[derive(Clone, Debug)]
pub struct MetricsAccumulator {
    size: u64,
    start: u64,
    count: u64,
    score: f64,
    completed: u64,
    windows: Vec<MetricsWindow>,
}

impl MetricsAccumulator {
    pub fn new(size: u64) -> Self {
        assert!(size > 0, "window size must be positive");
        MetricsAccumulator { size, start: 0, count: 0, score: 0.0, completed: 0, windows: Vec::new() }
    }

    /// Adds the next episode. `epsilon_after` is the rate in effect once
    /// this episode is over.
    pub fn push<F: Scalar>(&mut self, rec: &EpisodeRecord<F>, epsilon_after: f64) -> Option<MetricsWindow> {
        self.count += 1;
        self.score += rec.score.to_f64();
        self.completed += rec.completed as u64;
        (self.count == self.size).then(|| self.close(epsilon_after, false))
    }

    fn close(&mut self, epsilon: f64, partial: bool) -> MetricsWindow {
        let n = self.count as f64;
        let w = MetricsWindow {
            window_start: self.start,
            episodes: self.count,
            avg_score: self.score / n,
            completion_pct: 100.0 * self.completed as f64 / n,
            epsilon,
            partial,
        };
        self.start += self.count;
        self.count = 0;
        self.score = 0.0;
        self.completed = 0;
        self.windows.push(w);
        w
    }

    /// Closes a trailing partial window, if any, and returns every window.
    pub fn finish(mut self, epsilon: f64) -> Vec<MetricsWindow> {
        if self.count > 0 {
            self.close(epsilon, true);
        }
        self.windows
    }
}

pub fn windows_to_csv(windows: &[MetricsWindow]) -> String {
    let mut out = format!("{CSV_HEADER}\n");
    for w in windows {
        writeln!(out, "{},{},{},{}", w.window_start, w.avg_score, w.completion_pct, w.epsilon).unwrap();
    }
    out
}
