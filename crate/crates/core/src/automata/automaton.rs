use std::collections::HashMap;
use std::fmt;

use super::alphabet::{ActionAlphabet, ActionId};
use crate::{Error, Result};

/// Index of a state inside an [`Automaton`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StateId(pub u32);

impl StateId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for StateId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Deterministic automaton `(Q, Σ, δ, q0, Qm)` with an optional absorbing
/// violation sink.
///
/// The transition function is stored densely, one slot per
/// `(state, label)`; an empty slot means the transition is undefined.
/// Values are immutable once built.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Automaton {
    alphabet: ActionAlphabet,
    names: Vec<String>,
    delta: Vec<Option<StateId>>,
    initial: StateId,
    marked: Vec<bool>,
    sink: Option<StateId>,
}

impl Automaton {
    /// Assembles an automaton from already-validated parts. `delta` is laid
    /// out row-major by state.
    pub(crate) fn from_parts(
        alphabet: ActionAlphabet,
        names: Vec<String>,
        delta: Vec<Option<StateId>>,
        initial: StateId,
        marked: Vec<bool>,
        sink: Option<StateId>,
    ) -> Self {
        debug_assert_eq!(delta.len(), names.len() * alphabet.len());
        debug_assert_eq!(marked.len(), names.len());
        debug_assert!(initial.index() < names.len());
        let a = Automaton { alphabet, names, delta, initial, marked, sink };
        if let Some(s) = a.sink {
            debug_assert!(a.alphabet.ids().all(|l| a.try_step(s, l) == Some(s)));
        }
        a
    }

    pub fn alphabet(&self) -> &ActionAlphabet {
        &self.alphabet
    }

    pub fn num_states(&self) -> usize {
        self.names.len()
    }

    pub fn states(&self) -> impl Iterator<Item = StateId> {
        (0..self.names.len() as u32).map(StateId)
    }

    pub fn initial(&self) -> StateId {
        self.initial
    }

    pub fn sink(&self) -> Option<StateId> {
        self.sink
    }

    pub fn state_name(&self, q: StateId) -> &str {
        &self.names[q.index()]
    }

    pub fn state_id(&self, name: &str) -> Option<StateId> {
        self.names.iter().position(|n| n == name).map(|i| StateId(i as u32))
    }

    pub fn lookup_state(&self, name: &str) -> Result<StateId> {
        self.state_id(name).ok_or_else(|| Error::Domain { kind: "state", name: name.to_string() })
    }

    pub fn is_marked(&self, q: StateId) -> bool {
        self.marked[q.index()]
    }

    pub fn marked_states(&self) -> impl Iterator<Item = StateId> + '_ {
        self.states().filter(|&q| self.is_marked(q))
    }

    /// True for the sink and for every marked state. Completed specs mark
    /// exactly the states that flag a broken constraint.
    pub fn is_violation(&self, q: StateId) -> bool {
        self.sink == Some(q) || self.marked[q.index()]
    }

    fn check_state(&self, q: StateId) -> Result<()> {
        if q.index() < self.names.len() {
            Ok(())
        } else {
            Err(Error::Domain { kind: "state", name: q.to_string() })
        }
    }

    /// Successor without error reporting; `None` when undefined or out of
    /// range.
    #[inline]
    pub fn try_step(&self, q: StateId, a: ActionId) -> Option<StateId> {
        let n = self.alphabet.len();
        if a.index() >= n {
            return None;
        }
        self.delta.get(q.index() * n + a.index()).copied().flatten()
    }

    /// Labels with a defined transition out of `q`, in alphabet order.
    pub fn active_actions(&self, q: StateId) -> Result<Vec<ActionId>> {
        self.check_state(q)?;
        Ok(self.alphabet.ids().filter(|&a| self.try_step(q, a).is_some()).collect())
    }

    pub fn step(&self, q: StateId, a: ActionId) -> Result<StateId> {
        self.check_state(q)?;
        if !self.alphabet.contains(a) {
            return Err(Error::Domain { kind: "label", name: a.to_string() });
        }
        self.try_step(q, a).ok_or_else(|| Error::TransitionUndefined {
            state: self.state_name(q).to_string(),
            label: self.alphabet.name(a).to_string(),
        })
    }

    /// Extended transition function from the initial state.
    pub fn run(&self, word: &[ActionId]) -> Result<StateId> {
        self.run_from(self.initial, word)
    }

    pub fn run_from(&self, q: StateId, word: &[ActionId]) -> Result<StateId> {
        word.iter().try_fold(q, |q, &a| self.step(q, a))
    }

    /// True when every `(state, label)` pair has a successor.
    pub fn is_total(&self) -> bool {
        self.delta.iter().all(Option::is_some)
    }

    pub fn num_transitions(&self) -> usize {
        self.delta.iter().filter(|d| d.is_some()).count()
    }

    /// All defined transitions `(src, label, dst)` in state-then-label order.
    pub fn transitions(&self) -> impl Iterator<Item = (StateId, ActionId, StateId)> + '_ {
        let n = self.alphabet.len().max(1);
        self.delta
            .iter()
            .enumerate()
            .filter_map(move |(i, d)| d.map(|dst| (StateId((i / n) as u32), ActionId((i % n) as u16), dst)))
    }

    /// Same automaton over an alphabet with identical labels but possibly
    /// different controllability flags.
    pub fn with_alphabet(&self, alphabet: ActionAlphabet) -> Result<Self> {
        if !self.alphabet.same_labels(&alphabet) {
            return Err(Error::AlphabetMismatch(format!("[{}] vs [{}]", self.alphabet.header(), alphabet.header())));
        }
        let mut out = self.clone();
        out.alphabet = alphabet;
        Ok(out)
    }

    pub(crate) fn names(&self) -> &[String] {
        &self.names
    }

    pub(crate) fn marked_flags(&self) -> &[bool] {
        &self.marked
    }
}

/// Incremental constructor for [`Automaton`]. States are created on first
/// mention by name, in order of appearance.
#[derive(Clone, Debug)]
pub struct AutomatonBuilder {
    alphabet: ActionAlphabet,
    names: Vec<String>,
    index: HashMap<String, StateId>,
    edges: Vec<(StateId, ActionId, StateId)>,
    initial: Option<StateId>,
    marked: Vec<StateId>,
}

impl AutomatonBuilder {
    pub fn new(alphabet: ActionAlphabet) -> Self {
        AutomatonBuilder {
            alphabet,
            names: Vec::new(),
            index: HashMap::new(),
            edges: Vec::new(),
            initial: None,
            marked: Vec::new(),
        }
    }

    pub fn alphabet(&self) -> &ActionAlphabet {
        &self.alphabet
    }

    pub fn state(&mut self, name: &str) -> StateId {
        if let Some(&q) = self.index.get(name) {
            return q;
        }
        let q = StateId(self.names.len() as u32);
        self.names.push(name.to_string());
        self.index.insert(name.to_string(), q);
        q
    }

    pub fn initial(&mut self, name: &str) -> &mut Self {
        let q = self.state(name);
        self.initial = Some(q);
        self
    }

    pub fn mark(&mut self, name: &str) -> &mut Self {
        let q = self.state(name);
        self.marked.push(q);
        self
    }

    pub fn transition(&mut self, src: &str, label: &str, dst: &str) -> Result<&mut Self> {
        let a = self.alphabet.lookup(label)?;
        let s = self.state(src);
        let d = self.state(dst);
        self.edges.push((s, a, d));
        Ok(self)
    }

    /// Validates determinism and the presence of an initial state.
    pub fn build(&self) -> Result<Automaton> {
        let initial = self.initial.ok_or_else(|| Error::validation("automaton", "no initial state"))?;
        let n = self.alphabet.len();
        let mut delta: Vec<Option<StateId>> = vec![None; self.names.len() * n];
        for &(s, a, d) in &self.edges {
            let slot = &mut delta[s.index() * n + a.index()];
            match *slot {
                Some(prev) if prev != d => {
                    return Err(Error::validation(
                        "automaton",
                        format!(
                            "nondeterministic: `{}` has two `{}` successors (`{}`, `{}`)",
                            self.names[s.index()],
                            self.alphabet.name(a),
                            self.names[prev.index()],
                            self.names[d.index()]
                        ),
                    ))
                }
                _ => *slot = Some(d),
            }
        }
        let mut marked = vec![false; self.names.len()];
        for q in &self.marked {
            marked[q.index()] = true;
        }
        Ok(Automaton::from_parts(self.alphabet.clone(), self.names.clone(), delta, initial, marked, None))
    }
}
