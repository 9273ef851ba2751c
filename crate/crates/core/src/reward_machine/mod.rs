//! Reward machines over item/station propositions.
//!
//! A reward machine is stepped once per environment transition on the label
//! of the new environment state and emits the reward attached to the
//! machine transition it takes.

mod label;
mod machine;
mod text;

pub use label::{LabelPattern, PropositionLabel, NUM_LABELS};
pub use machine::{PartialMachine, RewardFn, RewardMachine, RmState};
pub use text::{parse_reward_machine, write_reward_machine};
