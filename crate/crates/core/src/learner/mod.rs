//! Supervised tabular Q-learning with one value table per
//! `(q_s, q_h, u)` triple.

mod config;
mod qbank;
mod train;

pub use config::LearnerConfig;
pub use qbank::{QBank, TableKey};
pub use train::{evaluate, q_update, rollouts, select_action, train, EpisodeRecord, EvalSummary, Task, Trainer};
