//! Environments the learner can be trained on.
//!
//! An environment is deterministic apart from optional injection of
//! uncontrollable events, labels its states with reward-machine
//! propositions and names its actions through an [`ActionAlphabet`] shared
//! with the action-constraint automata.

mod corridor;
mod grid;
mod map;
mod plant;

use std::fmt::Debug;

use rand::RngCore;

use crate::automata::{ActionAlphabet, ActionId, ActionSet};
use crate::reward_machine::PropositionLabel;
use crate::Result;

pub use corridor::Corridor;
pub use grid::{gridworld_alphabet, Cell, DropRule, DuGate, EnvConfig, GridAction, GridState, GridWorld, Heading};
pub use map::{parse_map, render_map, GridMap};
pub use plant::{abstract_plant_automaton, plant_automaton, PlantModel};

pub trait Environment {
    type State: Clone + Debug + PartialEq;

    fn alphabet(&self) -> &ActionAlphabet;

    fn reset(&self) -> Self::State;

    /// Controllable actions that can be executed in `s`.
    fn feasible_actions(&self, s: &Self::State) -> ActionSet;

    /// Successor of `s` under `a`; errors if `a` is not executable.
    fn execute(&self, s: &Self::State, a: ActionId) -> Result<Self::State>;

    fn label(&self, s: &Self::State) -> PropositionLabel;

    /// Draws an uncontrollable event to fire right after the agent executed
    /// `last` and reached `s`, if any.
    fn maybe_inject_uncontrollable(&self, s: &Self::State, last: ActionId, rng: &mut dyn RngCore) -> Option<ActionId>;

    /// Injective 64-bit key for `s`, used to index value tables.
    fn digest(&self, s: &Self::State) -> u64;
}
