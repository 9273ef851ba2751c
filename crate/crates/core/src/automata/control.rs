use std::collections::{HashMap, VecDeque};

use super::{ActionId, Automaton, StateId, Word, SINK_NAME};
use crate::Result;

/// Outcome of the controllability test `K̄Σu ∩ L(plant) ⊆ K̄`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ControllabilityVerdict {
    Controllable,
    /// `counterexample = ω·u`: `ω` is legal, `u` is uncontrollable, the plant
    /// generates `ω·u` and the spec rejects it.
    Uncontrollable {
        counterexample: Word,
    },
}

impl ControllabilityVerdict {
    pub fn is_controllable(&self) -> bool {
        matches!(self, ControllabilityVerdict::Controllable)
    }

    pub fn counterexample(&self) -> Option<&[ActionId]> {
        match self {
            ControllabilityVerdict::Controllable => None,
            ControllabilityVerdict::Uncontrollable { counterexample } => Some(counterexample),
        }
    }
}

/// Successor of `q` in a spec, `None` if the label leads to a violation.
/// Undefined transitions count as violations.
#[inline]
fn spec_next(spec: &Automaton, q: StateId, a: ActionId) -> Option<StateId> {
    spec.try_step(q, a).filter(|&n| !spec.is_violation(n))
}

/// Decides whether `spec` is controllable with respect to `plant`.
///
/// Breadth-first search over the product of the plant and the legal part of
/// the spec. Successors are expanded in alphabet order, so the returned
/// counterexample is the shortest one and, among those, the first in
/// label order.
pub fn check_controllability(plant: &Automaton, spec: &Automaton) -> Result<ControllabilityVerdict> {
    plant.alphabet().ensure_same(spec.alphabet())?;
    let ab = plant.alphabet();
    let uncontrollable: Vec<ActionId> = ab.uncontrollable_ids().collect();
    if uncontrollable.is_empty() || spec.is_violation(spec.initial()) {
        return Ok(ControllabilityVerdict::Controllable);
    }

    // (pair, parent index, label from parent)
    let mut nodes: Vec<((StateId, StateId), usize, Option<ActionId>)> = Vec::new();
    let mut seen: HashMap<(StateId, StateId), ()> = HashMap::new();
    let start = (plant.initial(), spec.initial());
    nodes.push((start, usize::MAX, None));
    seen.insert(start, ());
    let mut queue = VecDeque::from([0usize]);

    while let Some(i) = queue.pop_front() {
        let ((p, q), _, _) = nodes[i];
        for &u in &uncontrollable {
            if plant.try_step(p, u).is_some() && spec_next(spec, q, u).is_none() {
                let mut word = trace(&nodes, i);
                word.push(u);
                return Ok(ControllabilityVerdict::Uncontrollable { counterexample: word });
            }
        }
        for a in ab.ids() {
            let (Some(p2), Some(q2)) = (plant.try_step(p, a), spec_next(spec, q, a)) else {
                continue;
            };
            if seen.insert((p2, q2), ()).is_none() {
                nodes.push(((p2, q2), i, Some(a)));
                queue.push_back(nodes.len() - 1);
            }
        }
    }
    Ok(ControllabilityVerdict::Controllable)
}

fn trace<T>(nodes: &[(T, usize, Option<ActionId>)], mut i: usize) -> Word {
    let mut word = Vec::new();
    while let Some(a) = nodes[i].2 {
        word.push(a);
        i = nodes[i].1;
    }
    word.reverse();
    word
}

/// Result of supremal controllable sublanguage synthesis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Supremal {
    /// Not even the empty string survives: the initial configuration already
    /// admits an uncontrollable path into a violation.
    Empty,
    /// A completed spec (total, single absorbing sink) whose legal language
    /// is the supremal controllable sublanguage within the plant.
    Language(Automaton),
}

impl Supremal {
    pub fn is_empty(&self) -> bool {
        matches!(self, Supremal::Empty)
    }

    pub fn automaton(&self) -> Option<&Automaton> {
        match self {
            Supremal::Empty => None,
            Supremal::Language(a) => Some(a),
        }
    }
}

/// Computes the supremal controllable (prefix-closed) sublanguage of the
/// spec's legal language with respect to the plant.
///
/// Works on the reachable product: product states from which a
/// plant-enabled uncontrollable action leaves the spec, or reaches an
/// already removed state, are removed; the survivors are then trimmed to
/// those reachable from the initial pair. Both steps repeat until nothing
/// changes.
pub fn supremal_controllable(plant: &Automaton, spec: &Automaton) -> Result<Supremal> {
    plant.alphabet().ensure_same(spec.alphabet())?;
    let ab = plant.alphabet();
    let n = ab.len();
    if spec.is_violation(spec.initial()) {
        return Ok(Supremal::Empty);
    }

    // Explore the legal product. `succ[i * n + a]`:
    //   Some(Some(j)) -> legal successor j
    //   Some(None)    -> plant-enabled but illegal
    //   None          -> not enabled in the plant
    let mut index: HashMap<(StateId, StateId), usize> = HashMap::new();
    let mut pairs = vec![(plant.initial(), spec.initial())];
    index.insert(pairs[0], 0);
    let mut succ: Vec<Option<Option<usize>>> = Vec::new();
    let mut i = 0;
    while i < pairs.len() {
        let (p, q) = pairs[i];
        for a in ab.ids() {
            let entry = plant.try_step(p, a).map(|p2| {
                spec_next(spec, q, a).map(|q2| {
                    *index.entry((p2, q2)).or_insert_with(|| {
                        pairs.push((p2, q2));
                        pairs.len() - 1
                    })
                })
            });
            succ.push(entry);
        }
        i += 1;
    }

    let m = pairs.len();
    let uncontrollable: Vec<ActionId> = ab.uncontrollable_ids().collect();
    let mut alive = vec![true; m];
    loop {
        let mut changed = false;
        // prune
        let mut again = true;
        while again {
            again = false;
            for x in 0..m {
                if !alive[x] {
                    continue;
                }
                let escapes = uncontrollable.iter().any(|&u| match succ[x * n + u.index()] {
                    Some(None) => true,
                    Some(Some(y)) => !alive[y],
                    None => false,
                });
                if escapes {
                    alive[x] = false;
                    again = true;
                    changed = true;
                }
            }
        }
        if !alive[0] {
            return Ok(Supremal::Empty);
        }
        // trim
        let mut reach = vec![false; m];
        reach[0] = true;
        let mut stack = vec![0usize];
        while let Some(x) = stack.pop() {
            for a in 0..n {
                if let Some(Some(y)) = succ[x * n + a] {
                    if alive[y] && !reach[y] {
                        reach[y] = true;
                        stack.push(y);
                    }
                }
            }
        }
        for x in 0..m {
            if alive[x] && !reach[x] {
                alive[x] = false;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }

    // Renumber survivors in exploration order and add the sink.
    let mut new_id = vec![usize::MAX; m];
    let mut names = Vec::new();
    for x in (0..m).filter(|&x| alive[x]) {
        new_id[x] = names.len();
        let (p, q) = pairs[x];
        names.push(format!("{}|{}", plant.state_name(p), spec.state_name(q)));
    }
    let sink = StateId(names.len() as u32);
    let mut sink_name = SINK_NAME.to_string();
    while names.contains(&sink_name) {
        sink_name.push('\'');
    }
    names.push(sink_name);

    let mut delta = Vec::with_capacity(names.len() * n);
    for x in (0..m).filter(|&x| alive[x]) {
        for a in 0..n {
            let d = match succ[x * n + a] {
                Some(Some(y)) if alive[y] => StateId(new_id[y] as u32),
                _ => sink,
            };
            delta.push(Some(d));
        }
    }
    delta.extend(std::iter::repeat_n(Some(sink), n));
    let mut marked = vec![false; names.len()];
    marked[sink.index()] = true;
    Ok(Supremal::Language(Automaton::from_parts(ab.clone(), names, delta, StateId(0), marked, Some(sink))))
}
