//! Supervised tabular Q-learning for finite MDPs whose action sequences are
//! constrained by finite automata and whose state sequences are scored by
//! reward machines.
//!
//! The crate is organised bottom-up:
//!
//! * [`automata`]: deterministic automata over labelled actions, spec
//!   completion, synchronous products, controllability checking and
//!   supremal controllable sublanguage synthesis.
//! * [`reward_machine`]: reward machines over item/station propositions.
//! * [`environment`]: the environment contract, the pick-up-and-delivery
//!   gridworld and a small corridor fixture.
//! * [`supervisor`]: the runtime action filter built from two completed
//!   specs.
//! * [`learner`]: the Q bank, epsilon-greedy selection, the update rule,
//!   training and evaluation loops.
//! * [`harness`]: experiment configuration, metrics windows and the
//!   `train` / `eval` / `check` / `supremal` runners used by the CLI.
//!
//! Numeric code is generic over [`Scalar`] (`f32` or `f64`); the aliases at
//! the crate root pin the common `f64` instantiations.

pub mod automata;
pub mod bundled;
pub mod environment;
mod error;
pub mod harness;
pub mod learner;
pub mod reward_machine;
mod scalar;
pub mod supervisor;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub use automata::{ActionAlphabet, ActionId, Automaton, StateId};
pub use environment::{Environment, GridMap, GridState, GridWorld, Heading};
pub use reward_machine::{PropositionLabel, RmState};
pub use supervisor::{Supervisor, SupervisorState};

/// Reward machine with `f64` rewards.
pub type RewardMachine = reward_machine::RewardMachine<f64>;
/// Reward machine with `f32` rewards.
pub type RewardMachine32 = reward_machine::RewardMachine<f32>;
/// Q bank with `f64` action values.
pub type QBank = learner::QBank<f64>;
/// Q bank with `f32` action values.
pub type QBank32 = learner::QBank<f32>;
/// Learner configuration with `f64` hyperparameters.
pub type LearnerConfig = learner::LearnerConfig<f64>;
/// Learner configuration with `f32` hyperparameters.
pub type LearnerConfig32 = learner::LearnerConfig<f32>;
/// Episode record with `f64` scores.
pub type EpisodeRecord = learner::EpisodeRecord<f64>;
