//! Runtime action filter built from the completed safe spec `G_s` and the
//! completed unsafe spec `H`.

use crate::automata::{ActionAlphabet, ActionId, ActionSet, Automaton, StateId};
use crate::{Error, Result};

/// Current states of `G_s` and `H`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SupervisorState {
    pub qs: StateId,
    pub qh: StateId,
}

#[derive(Clone, Debug)]
pub struct Supervisor {
    gs: Automaton,
    h: Automaton,
}

impl Supervisor {
    /// Both specs must be total and share the alphabet.
    pub fn new(gs: Automaton, h: Automaton) -> Result<Self> {
        gs.alphabet().ensure_same(h.alphabet())?;
        for (name, a) in [("G_s", &gs), ("H", &h)] {
            if !a.is_total() {
                return Err(Error::validation("supervisor", format!("{name} is not completed")));
            }
        }
        Ok(Supervisor { gs, h })
    }

    pub fn safe_spec(&self) -> &Automaton {
        &self.gs
    }

    pub fn unsafe_spec(&self) -> &Automaton {
        &self.h
    }

    pub fn alphabet(&self) -> &ActionAlphabet {
        self.gs.alphabet()
    }

    pub fn initial(&self) -> SupervisorState {
        SupervisorState { qs: self.gs.initial(), qh: self.h.initial() }
    }

    /// Number of `(q_s, q_h)` combinations, the bound on distinct keys.
    pub fn dims(&self) -> (usize, usize) {
        (self.gs.num_states(), self.h.num_states())
    }

    pub fn is_violation(&self, sup: SupervisorState) -> bool {
        self.gs.is_violation(sup.qs) || self.h.is_violation(sup.qh)
    }

    fn successor(&self, sup: SupervisorState, a: ActionId) -> SupervisorState {
        SupervisorState {
            qs: self.gs.try_step(sup.qs, a).expect("completed spec"),
            qh: self.h.try_step(sup.qh, a).expect("completed spec"),
        }
    }

    /// Drops the controllable candidates that would lead either spec into a
    /// violation state. Uncontrollable labels are never filtered.
    pub fn allowed(&self, sup: SupervisorState, candidates: ActionSet) -> ActionSet {
        let mut out = candidates;
        out.retain(|a| !self.alphabet().is_controllable(a) || !self.is_violation(self.successor(sup, a)));
        out
    }

    /// Steps both specs on `a`. Reaching a violation is a
    /// [`Error::SupervisorBug`] for controllable actions and a
    /// [`Error::ControllabilityViolation`] for uncontrollable ones.
    pub fn advance(&self, sup: SupervisorState, a: ActionId) -> Result<SupervisorState> {
        if !self.alphabet().contains(a) {
            return Err(Error::Domain { kind: "action", name: a.to_string() });
        }
        let next = self.successor(sup, a);
        if self.is_violation(next) {
            let action = self.alphabet().name(a).to_string();
            return Err(if self.alphabet().is_controllable(a) {
                Error::SupervisorBug { action }
            } else {
                Error::ControllabilityViolation {
                    action,
                    trace: format!("({}, {})", self.gs.state_name(sup.qs), self.h.state_name(sup.qh)),
                }
            });
        }
        Ok(next)
    }

    /// Like [`Supervisor::advance`] but without the fault check; used by
    /// monitors that record violations instead of failing.
    pub fn step_unchecked(&self, sup: SupervisorState, a: ActionId) -> SupervisorState {
        self.successor(sup, a)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundled;
    use proptest::prelude::*;

    fn sup() -> Supervisor {
        Supervisor::new(bundled::recovery_spec(), bundled::uturn_spec()).unwrap()
    }

    fn set(s: &Supervisor, names: &[&str]) -> ActionSet {
        names.iter().map(|n| s.alphabet().lookup(n).unwrap()).collect()
    }

    fn state(s: &Supervisor, qs: &str, qh: &str) -> SupervisorState {
        SupervisorState { qs: s.safe_spec().lookup_state(qs).unwrap(), qh: s.unsafe_spec().lookup_state(qh).unwrap() }
    }

    #[test]
    fn repeated_turn_is_filtered() {
        let s = sup();
        let q = state(&s, "w0", "1");
        assert_eq!(s.allowed(q, set(&s, &["l", "r", "f"])), set(&s, &["l", "f"]));
    }

    #[test]
    fn after_drop_only_d2_is_allowed() {
        let s = sup();
        let all: ActionSet = s.alphabet().controllable_ids().collect();
        assert_eq!(s.allowed(state(&s, "w1", "0"), all), set(&s, &["d2"]));
    }

    #[test]
    fn fresh_state_allows_every_move() {
        let s = sup();
        let moves = set(&s, &["l", "r", "f", "b"]);
        assert_eq!(s.allowed(s.initial(), moves), moves);
    }

    #[test]
    fn uncontrollable_labels_pass_through() {
        let s = sup();
        let du = set(&s, &["d_u"]);
        assert_eq!(s.allowed(state(&s, "w1", "0"), du), du);
    }

    #[test]
    fn advance_steps_both_specs() {
        let s = sup();
        let r = s.alphabet().lookup("r").unwrap();
        let du = s.alphabet().lookup("d_u").unwrap();
        assert_eq!(s.advance(s.initial(), r).unwrap(), state(&s, "w0", "1"));
        assert_eq!(s.advance(s.initial(), du).unwrap(), state(&s, "w1", "0"));
    }

    #[test]
    fn violation_channels_are_distinct() {
        let s = sup();
        let du = s.alphabet().lookup("d_u").unwrap();
        let r = s.alphabet().lookup("r").unwrap();
        assert!(matches!(s.advance(state(&s, "w1", "0"), du), Err(Error::ControllabilityViolation { .. })));
        assert!(matches!(s.advance(state(&s, "w0", "1"), r), Err(Error::SupervisorBug { .. })));
    }

    #[test]
    fn rejects_uncompleted_specs() {
        assert!(Supervisor::new(bundled::recovery_spec_raw(), bundled::uturn_spec()).is_err());
        assert!(Supervisor::new(bundled::recovery_spec(), bundled::uturn_spec_small()).is_err());
    }

    proptest! {
        #[test]
        fn allowed_is_idempotent_and_shrinking(qs in 0u32..7, qh in 0u32..4, bits in 0u64..(1 << 11)) {
            let s = sup();
            let q = SupervisorState { qs: StateId(qs), qh: StateId(qh) };
            let mut cands = ActionSet::EMPTY;
            for a in s.alphabet().ids().filter(|a| bits & (1 << a.index()) != 0) {
                cands.insert(a);
            }
            let once = s.allowed(q, cands);
            prop_assert_eq!(s.allowed(q, once), once);
            prop_assert!(once.iter().all(|a| cands.contains(a)));
        }
    }
}
