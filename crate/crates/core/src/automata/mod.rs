//! Deterministic finite automata over labelled actions and the supervisory
//! control operations built on them.
//!
//! Specs are used in their *completed* form: a total automaton in which a
//! marked state (or the designated sink) flags that an action constraint
//! has been broken. [`Automaton::is_violation`] is the single predicate all
//! consumers use for that flag.

mod alphabet;
mod automaton;
mod construct;
mod control;
mod language;
mod text;

pub use alphabet::{ActionAlphabet, ActionId, ActionSet};
pub use automaton::{Automaton, AutomatonBuilder, StateId};
pub use construct::{complete_safe_spec, complete_unsafe_spec, conjoin_specs, product};
pub use control::{check_controllability, supremal_controllable, ControllabilityVerdict, Supremal};
pub use language::{enumerate_language, enumerate_within, Word};
pub use text::{parse_automaton, write_automaton};

/// Name given to the violation state added by spec completion.
pub const SINK_NAME: &str = "s_a";
