use std::collections::{HashMap, VecDeque};

use super::{ActionAlphabet, Automaton, StateId, SINK_NAME};
use crate::{Error, Result};

fn fresh_name(existing: &[String], base: &str) -> String {
    let mut name = base.to_string();
    let mut k = 1;
    while existing.iter().any(|n| n == &name) {
        name = format!("{base}_{k}");
        k += 1;
    }
    name
}

/// Completes a model of safe action sequences into a total spec.
///
/// A fresh absorbing state `s_a` becomes the only marked state; every label
/// without a transition at some state is redirected there. Defined
/// transitions are copied unchanged.
pub fn complete_safe_spec(safe: &Automaton) -> Result<Automaton> {
    if safe.sink().is_some() {
        return Err(Error::validation("safe spec", "input already has a violation sink"));
    }
    let n = safe.alphabet().len();
    let mut names = safe.names().to_vec();
    let sink = StateId(names.len() as u32);
    names.push(fresh_name(safe.names(), SINK_NAME));

    let mut delta = Vec::with_capacity(names.len() * n);
    for q in safe.states() {
        for a in safe.alphabet().ids() {
            delta.push(Some(safe.try_step(q, a).unwrap_or(sink)));
        }
    }
    delta.extend(std::iter::repeat_n(Some(sink), n));

    let mut marked = vec![false; names.len()];
    marked[sink.index()] = true;
    Ok(Automaton::from_parts(safe.alphabet().clone(), names, delta, safe.initial(), marked, Some(sink)))
}

/// Completes a recogniser of unsafe action sequences into a total spec.
///
/// Missing transitions return to the initial state; marked states are kept
/// and act as violation flags.
pub fn complete_unsafe_spec(unsafe_: &Automaton) -> Result<Automaton> {
    if unsafe_.sink().is_some() {
        return Err(Error::validation("unsafe spec", "input already has a violation sink"));
    }
    let q0 = unsafe_.initial();
    let delta = unsafe_
        .states()
        .flat_map(|q| unsafe_.alphabet().ids().map(move |a| Some(unsafe_.try_step(q, a).unwrap_or(q0))))
        .collect();
    Ok(Automaton::from_parts(
        unsafe_.alphabet().clone(),
        unsafe_.names().to_vec(),
        delta,
        q0,
        unsafe_.marked_flags().to_vec(),
        None,
    ))
}

/// Reachable synchronous product over a shared alphabet. A label is enabled
/// in a pair iff it is enabled in both components; a pair is marked iff both
/// components are marked.
pub fn product(a: &Automaton, b: &Automaton) -> Result<Automaton> {
    a.alphabet().ensure_same(b.alphabet())?;
    let alphabet = a.alphabet().clone();
    let n = alphabet.len();

    let mut index: HashMap<(StateId, StateId), StateId> = HashMap::new();
    let mut pairs: Vec<(StateId, StateId)> = Vec::new();
    let mut queue = VecDeque::new();
    let start = (a.initial(), b.initial());
    index.insert(start, StateId(0));
    pairs.push(start);
    queue.push_back(StateId(0));

    let mut delta: Vec<Option<StateId>> = Vec::new();
    while let Some(x) = queue.pop_front() {
        let (p, q) = pairs[x.index()];
        let row = delta.len();
        delta.resize(row + n, None);
        for l in alphabet.ids() {
            let (Some(p2), Some(q2)) = (a.try_step(p, l), b.try_step(q, l)) else {
                continue;
            };
            let next = *index.entry((p2, q2)).or_insert_with(|| {
                let id = StateId(pairs.len() as u32);
                pairs.push((p2, q2));
                queue.push_back(id);
                id
            });
            delta[row + l.index()] = Some(next);
        }
    }

    let names = pairs.iter().map(|&(p, q)| format!("{}|{}", a.state_name(p), b.state_name(q))).collect();
    let marked = pairs.iter().map(|&(p, q)| a.is_marked(p) && b.is_marked(q)).collect();
    Ok(Automaton::from_parts(alphabet, names, delta, StateId(0), marked, None))
}

/// Conjunction of two specs: a string is legal iff it is legal in both.
///
/// The result is total with a single absorbing sink collecting every pair in
/// which either component is in violation (or has no transition).
pub fn conjoin_specs(a: &Automaton, b: &Automaton) -> Result<Automaton> {
    a.alphabet().ensure_same(b.alphabet())?;
    let alphabet: ActionAlphabet = a.alphabet().clone();
    let n = alphabet.len();

    let mut index: HashMap<(StateId, StateId), StateId> = HashMap::new();
    let mut pairs: Vec<Option<(StateId, StateId)>> = Vec::new();
    let mut names: Vec<String> = Vec::new();
    let mut queue = VecDeque::new();
    let mut delta: Vec<Option<StateId>> = Vec::new();

    let bad = |p: StateId, q: StateId| a.is_violation(p) || b.is_violation(q);
    let start = (a.initial(), b.initial());
    // Slot 0 is the initial pair, slot 1 the sink (slot 0 if the initial
    // pair is already in violation).
    let sink = if bad(start.0, start.1) {
        StateId(0)
    } else {
        index.insert(start, StateId(0));
        pairs.push(Some(start));
        names.push(format!("{}|{}", a.state_name(start.0), b.state_name(start.1)));
        queue.push_back(StateId(0));
        StateId(1)
    };
    pairs.push(None);
    names.push(String::new());

    while let Some(x) = queue.pop_front() {
        let (p, q) = pairs[x.index()].expect("queued pair");
        let row = x.index() * n;
        if delta.len() < row + n {
            delta.resize(row + n, None);
        }
        for l in alphabet.ids() {
            let next = match (a.try_step(p, l), b.try_step(q, l)) {
                (Some(p2), Some(q2)) if !bad(p2, q2) => *index.entry((p2, q2)).or_insert_with(|| {
                    let id = StateId(pairs.len() as u32);
                    pairs.push(Some((p2, q2)));
                    names.push(format!("{}|{}", a.state_name(p2), b.state_name(q2)));
                    queue.push_back(id);
                    id
                }),
                _ => sink,
            };
            delta[row + l.index()] = Some(next);
        }
    }
    delta.resize(pairs.len() * n, None);
    for l in alphabet.ids() {
        delta[sink.index() * n + l.index()] = Some(sink);
    }
    names[sink.index()] = fresh_name(&names, SINK_NAME);
    let mut marked = vec![false; pairs.len()];
    marked[sink.index()] = true;
    let initial = if sink == StateId(0) { sink } else { StateId(0) };
    Ok(Automaton::from_parts(alphabet, names, delta, initial, marked, Some(sink)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::{enumerate_language, AutomatonBuilder};
    use crate::bundled;

    fn ab(labels: &[&str]) -> ActionAlphabet {
        ActionAlphabet::new(labels.iter().map(|&l| (l, !l.starts_with('u')))).unwrap()
    }

    #[test]
    fn safe_completion_single_state() {
        let mut b = AutomatonBuilder::new(ab(&["f", "l"]));
        b.initial("q0");
        b.transition("q0", "f", "q0").unwrap();
        let g = complete_safe_spec(&b.build().unwrap()).unwrap();
        let sa = g.sink().unwrap();
        let (f, l) = (g.alphabet().lookup("f").unwrap(), g.alphabet().lookup("l").unwrap());
        assert_eq!(g.step(g.initial(), l).unwrap(), sa);
        assert_eq!(g.step(g.initial(), f).unwrap(), g.initial());
        assert_eq!(g.step(sa, f).unwrap(), sa);
        assert_eq!(g.step(sa, l).unwrap(), sa);
        assert!(g.is_total());
        assert_eq!(g.marked_states().collect::<Vec<_>>(), vec![sa]);
    }

    #[test]
    fn safe_completion_of_recovery_chain() {
        let raw = bundled::recovery_spec_raw();
        let g = complete_safe_spec(&raw).unwrap();
        let sa = g.sink().unwrap();
        let ab = g.alphabet();
        let chain = [("w1", "d2"), ("w2", "d3"), ("w3", "p1"), ("w4", "p2"), ("w5", "p3")];
        for (w, only) in chain {
            let q = g.lookup_state(w).unwrap();
            for a in ab.ids() {
                let next = g.step(q, a).unwrap();
                if ab.name(a) == only {
                    assert_ne!(next, sa);
                    assert_eq!(Some(next), raw.try_step(q, a));
                } else {
                    assert_eq!(next, sa, "{w} --{}-->", ab.name(a));
                }
            }
        }
        // w0 keeps every action
        let w0 = g.lookup_state("w0").unwrap();
        assert!(ab.ids().all(|a| g.step(w0, a).unwrap() != sa));
    }

    #[test]
    fn safe_completion_of_total_input_adds_unreachable_sink() {
        let mut b = AutomatonBuilder::new(ab(&["a"]));
        b.initial("q0");
        b.transition("q0", "a", "q0").unwrap();
        let raw = b.build().unwrap();
        let g = complete_safe_spec(&raw).unwrap();
        assert_eq!(g.num_states(), 2);
        assert_eq!(g.step(g.initial(), crate::ActionId(0)).unwrap(), g.initial());
        assert_eq!(enumerate_language(&g, 3), enumerate_language(&raw, 3));
    }

    #[test]
    fn unsafe_completion_reproduces_uturn_figure() {
        let h1 = bundled::uturn_raw_small();
        let h = complete_unsafe_spec(&h1).unwrap();
        let ab = h.alphabet();
        let id = |s: &str| h.lookup_state(s).unwrap();
        let l = |s: &str| ab.lookup(s).unwrap();
        for s in ["1", "2"] {
            assert_eq!(h.step(id(s), l("f")).unwrap(), id("0"));
            assert_eq!(h.step(id(s), l("b")).unwrap(), id("0"));
        }
        assert_eq!(h.step(id("0"), l("f")).unwrap(), id("0"));
        assert_eq!(h.step(id("0"), l("r")).unwrap(), id("1"));
        assert_eq!(h.step(id("1"), l("l")).unwrap(), id("2"));
        assert_eq!(h.step(id("2"), l("r")).unwrap(), id("1"));
        assert!(h.is_violation(h.step(id("1"), l("r")).unwrap()));
        assert!(h.is_violation(h.step(id("2"), l("l")).unwrap()));
        assert!(h.is_total());
    }

    #[test]
    fn unsafe_completion_of_empty_machine() {
        let mut b = AutomatonBuilder::new(ab(&["a", "b"]));
        b.initial("0");
        let h = complete_unsafe_spec(&b.build().unwrap()).unwrap();
        assert_eq!(h.num_states(), 1);
        assert_eq!(h.step(h.initial(), crate::ActionId(0)).unwrap(), h.initial());
        assert_eq!(h.step(h.initial(), crate::ActionId(1)).unwrap(), h.initial());
    }

    #[test]
    fn unsafe_completion_of_total_machine_is_identity() {
        let h = bundled::uturn_spec_small();
        assert_eq!(complete_unsafe_spec(&h).unwrap(), h);
    }

    #[test]
    fn product_identities() {
        let h = bundled::uturn_spec_small();
        let mut b = AutomatonBuilder::new(h.alphabet().clone());
        b.initial("*").mark("*");
        for l in ["l", "r", "f", "b"] {
            b.transition("*", l, "*").unwrap();
        }
        let universal = b.build().unwrap();
        let p = product(&h, &universal).unwrap();
        assert_eq!(p.num_states(), h.num_states());
        assert_eq!(p.num_transitions(), h.num_transitions());
        assert_eq!(enumerate_language(&p, 4), enumerate_language(&h, 4));

        let hh = product(&h, &h).unwrap();
        assert_eq!(enumerate_language(&hh, 4), enumerate_language(&h, 4));
    }

    #[test]
    fn product_disjoint_enabled_labels() {
        let alpha = ab(&["a", "b"]);
        let mut x = AutomatonBuilder::new(alpha.clone());
        x.initial("x").transition("x", "a", "x").unwrap();
        let mut y = AutomatonBuilder::new(alpha);
        y.initial("y").transition("y", "b", "y").unwrap();
        let p = product(&x.build().unwrap(), &y.build().unwrap()).unwrap();
        assert_eq!(p.num_states(), 1);
        assert_eq!(p.num_transitions(), 0);
    }

    #[test]
    fn product_rejects_alphabet_mismatch() {
        let mut x = AutomatonBuilder::new(ab(&["a"]));
        x.initial("x");
        let mut y = AutomatonBuilder::new(ab(&["b"]));
        y.initial("y");
        assert!(matches!(product(&x.build().unwrap(), &y.build().unwrap()), Err(Error::AlphabetMismatch(_))));
    }

    #[test]
    fn conjunction_flags_either_violation() {
        let gs = bundled::recovery_spec();
        let h = bundled::uturn_spec();
        let c = conjoin_specs(&gs, &h).unwrap();
        assert!(c.is_total());
        let ab = c.alphabet();
        for w in ["r r", "d_u l", "l r", "d_u d2 d3 p1 p2 p3 r", "d_u d2 d3 p1 p2 p3 r r"] {
            let word = ab.parse_word(w).unwrap();
            let expect = gs.is_violation(gs.run(&word).unwrap()) || h.is_violation(h.run(&word).unwrap());
            assert_eq!(c.is_violation(c.run(&word).unwrap()), expect, "{w}");
        }
    }
}
