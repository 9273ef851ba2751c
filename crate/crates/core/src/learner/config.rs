use crate::{Error, Result, Scalar};

/// Hyperparameters of supervised Q-learning.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LearnerConfig<F> {
    pub alpha: F,
    pub epsilon: F,
    pub gamma: F,
    /// Factor applied to epsilon at the end of every `decay_period`
    /// episodes.
    pub epsilon_decay: F,
    pub decay_period: u64,
    pub num_episodes: u64,
    pub max_steps: u32,
    pub q_init: F,
    pub seed: u64,
}

impl<F: Scalar> Default for LearnerConfig<F> {
    fn default() -> Self {
        LearnerConfig {
            alpha: F::from_f64(0.1),
            epsilon: F::from_f64(0.25),
            gamma: F::from_f64(0.9),
            epsilon_decay: F::from_f64(0.95),
            decay_period: 10_000,
            num_episodes: 500_000,
            max_steps: 60,
            q_init: F::zero(),
            seed: 0,
        }
    }
}

impl<F: Scalar> LearnerConfig<F> {
    pub fn validate(&self) -> Result<()> {
        let bad = |field: &str, why: &str| Err(Error::validation("learner config", format!("{field} {why}")));
        let (zero, one) = (F::zero(), F::one());
        if !(self.alpha > zero && self.alpha <= one) {
            return bad("alpha", "must lie in (0, 1]");
        }
        if !(self.gamma > zero && self.gamma < one) {
            return bad("gamma", "must lie in (0, 1)");
        }
        if !(self.epsilon >= zero && self.epsilon <= one) {
            return bad("epsilon", "must lie in [0, 1]");
        }
        if !(self.epsilon_decay > zero && self.epsilon_decay <= one) {
            return bad("epsilon_decay", "must lie in (0, 1]");
        }
        if self.decay_period == 0 {
            return bad("decay_period", "must be positive");
        }
        if self.max_steps == 0 {
            return bad("max_steps", "must be positive");
        }
        if !self.q_init.is_finite() {
            return bad("q_init", "must be finite");
        }
        Ok(())
    }

    /// Exploration rate in effect once `episodes` episodes have finished.
    pub fn epsilon_after(&self, episodes: u64) -> F {
        let k = (episodes / self.decay_period) as i32;
        self.epsilon * self.epsilon_decay.powi(k)
    }

    /// Exploration rate once training is over.
    pub fn final_epsilon(&self) -> F {
        self.epsilon_after(self.num_episodes)
    }

    /// `key=value` pairs, space separated.
    pub fn summary(&self) -> String {
        format!(
            "alpha={} epsilon={} gamma={} epsilon_decay={} decay_period={} num_episodes={} max_steps={} q_init={} seed={}",
            self.alpha,
            self.epsilon,
            self.gamma,
            self.epsilon_decay,
            self.decay_period,
            self.num_episodes,
            self.max_steps,
            self.q_init,
            self.seed
        )
    }
}
