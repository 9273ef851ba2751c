//! Fixtures for the pick-up and delivery task, compiled into the crate.
//!
//! The same files ship under `fixtures/` so that configs can reference and
//! edit them.

use crate::automata::{complete_safe_spec, complete_unsafe_spec, parse_automaton, Automaton};
use crate::environment::{parse_map, GridMap};
use crate::reward_machine::{parse_reward_machine, RewardMachine};
use crate::Scalar;

pub const GRIDWORLD_MAP: &str = include_str!("../fixtures/gridworld.map");
pub const RECOVERY_AUT: &str = include_str!("../fixtures/recovery.aut");
pub const UTURN_AUT: &str = include_str!("../fixtures/uturn.aut");
pub const UTURN_MOVES_AUT: &str = include_str!("../fixtures/uturn_moves.aut");
pub const PICKUP_RM: &str = include_str!("../fixtures/pickup.rm");
pub const PAPER_CONF: &str = include_str!("../fixtures/paper.conf");

pub fn gridworld_map() -> GridMap {
    parse_map(GRIDWORLD_MAP, "gridworld.map").expect("bundled map")
}

/// Recovery sequence after an accidental drop, before completion.
pub fn recovery_spec_raw() -> Automaton {
    parse_automaton(RECOVERY_AUT, "recovery.aut").expect("bundled recovery spec")
}

/// Completed recovery spec (`G_s`).
pub fn recovery_spec() -> Automaton {
    complete_safe_spec(&recovery_spec_raw()).expect("bundled recovery spec")
}

/// U-turn recogniser over the full gridworld alphabet, before completion.
pub fn uturn_raw() -> Automaton {
    parse_automaton(UTURN_AUT, "uturn.aut").expect("bundled u-turn spec")
}

/// Completed U-turn spec (`H`) over the full gridworld alphabet.
pub fn uturn_spec() -> Automaton {
    complete_unsafe_spec(&uturn_raw()).expect("bundled u-turn spec")
}

/// U-turn recogniser over `l, r, f, b` only.
pub fn uturn_raw_small() -> Automaton {
    parse_automaton(UTURN_MOVES_AUT, "uturn_moves.aut").expect("bundled u-turn spec")
}

/// Completed U-turn spec over `l, r, f, b` only.
pub fn uturn_spec_small() -> Automaton {
    complete_unsafe_spec(&uturn_raw_small()).expect("bundled u-turn spec")
}

pub fn pickup_machine<F: Scalar>() -> RewardMachine<F> {
    parse_reward_machine(PICKUP_RM, "pickup.rm").expect("bundled reward machine")
}
