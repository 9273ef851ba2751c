use std::collections::BTreeSet;

use super::{ActionId, Automaton, StateId};

/// A finite action string.
pub type Word = Vec<ActionId>;

/// Every admissible string of length at most `max_len`.
///
/// A string is admissible when it has a run from the initial state that never
/// enters a violation state; for plants (no marked states) this is the
/// generated language truncated at `max_len`. Exponential in `max_len`; meant
/// as a brute-force oracle on small instances.
pub fn enumerate_language(a: &Automaton, max_len: usize) -> BTreeSet<Word> {
    let mut out = BTreeSet::new();
    if a.is_violation(a.initial()) {
        return out;
    }
    let mut word = Vec::with_capacity(max_len);
    walk(a, a.initial(), max_len, &mut word, &mut out);
    out
}

fn walk(a: &Automaton, q: StateId, budget: usize, word: &mut Word, out: &mut BTreeSet<Word>) {
    out.insert(word.clone());
    if budget == 0 {
        return;
    }
    for l in a.alphabet().ids() {
        if let Some(next) = a.try_step(q, l) {
            if a.is_violation(next) {
                continue;
            }
            word.push(l);
            walk(a, next, budget - 1, word, out);
            word.pop();
        }
    }
}

/// Strings of length at most `max_len` generated by `plant` and admissible
/// in `spec`; the same set as intersecting both enumerations, without
/// enumerating the spec on its own.
pub fn enumerate_within(plant: &Automaton, spec: &Automaton, max_len: usize) -> BTreeSet<Word> {
    let mut out = BTreeSet::new();
    if plant.is_violation(plant.initial()) || spec.is_violation(spec.initial()) {
        return out;
    }
    let mut word = Vec::with_capacity(max_len);
    walk_pair(plant, spec, (plant.initial(), spec.initial()), max_len, &mut word, &mut out);
    out
}

fn walk_pair(
    plant: &Automaton,
    spec: &Automaton,
    (p, q): (StateId, StateId),
    budget: usize,
    word: &mut Word,
    out: &mut BTreeSet<Word>,
) {
    out.insert(word.clone());
    if budget == 0 {
        return;
    }
    for l in plant.alphabet().ids() {
        let next = plant.try_step(p, l).zip(spec.try_step(q, l));
        if let Some((p2, q2)) = next {
            if plant.is_violation(p2) || spec.is_violation(q2) {
                continue;
            }
            word.push(l);
            walk_pair(plant, spec, (p2, q2), budget - 1, word, out);
            word.pop();
        }
    }
}
