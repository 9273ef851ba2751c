use std::collections::HashMap;
use std::fmt;

use super::label::{LabelPattern, PropositionLabel, NUM_LABELS};
use crate::{Error, Result, Scalar};

/// Index of a reward-machine state.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RmState(pub u16);

impl RmState {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for RmState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "u#{}", self.0)
    }
}

/// Reward attached to a machine transition `(u, u')`.
///
/// Only constant rewards are needed by the bundled tasks; the enum leaves
/// room for rewards that depend on the environment transition.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum RewardFn<F> {
    Constant(F),
}

impl<F: Scalar> RewardFn<F> {
    pub fn value(&self) -> F {
        match *self {
            RewardFn::Constant(r) => r,
        }
    }
}

#[derive(Clone, Debug)]
struct Edge<F> {
    from: RmState,
    pattern: LabelPattern,
    to: RmState,
    reward: F,
}

/// A reward machine as written down: named states and a possibly partial,
/// pattern-labelled edge list. [`totalize`](Self::totalize) turns it into a
/// runnable [`RewardMachine`].
#[derive(Clone, Debug)]
pub struct PartialMachine<F> {
    names: Vec<String>,
    initial: Option<RmState>,
    terminal: Vec<RmState>,
    edges: Vec<Edge<F>>,
}

impl<F: Scalar> Default for PartialMachine<F> {
    fn default() -> Self {
        Self::new()
    }
}

impl<F: Scalar> PartialMachine<F> {
    pub fn new() -> Self {
        PartialMachine { names: Vec::new(), initial: None, terminal: Vec::new(), edges: Vec::new() }
    }

    pub fn state(&mut self, name: &str) -> RmState {
        if let Some(i) = self.names.iter().position(|n| n == name) {
            return RmState(i as u16);
        }
        self.names.push(name.to_string());
        RmState(self.names.len() as u16 - 1)
    }

    pub fn initial(&mut self, name: &str) -> &mut Self {
        self.initial = Some(self.state(name));
        self
    }

    pub fn terminal(&mut self, name: &str) -> &mut Self {
        let u = self.state(name);
        if !self.terminal.contains(&u) {
            self.terminal.push(u);
        }
        self
    }

    /// Adds `from --pattern / reward--> to`. Among edges of one state whose
    /// patterns match a label, the most specific wins, then the earliest.
    pub fn edge(&mut self, from: &str, pattern: LabelPattern, to: &str, reward: F) -> &mut Self {
        let from = self.state(from);
        let to = self.state(to);
        self.edges.push(Edge { from, pattern, to, reward });
        self
    }

    /// Resolves the edge list into total transition and reward tables.
    ///
    /// Labels no edge covers become self-loops carrying the state's standing
    /// reward: the reward of its first explicit self-loop, or zero.
    pub fn totalize(&self) -> Result<RewardMachine<F>> {
        let initial = self.initial.ok_or_else(|| Error::validation("reward machine", "no initial state"))?;
        for (i, a) in self.edges.iter().enumerate() {
            for b in &self.edges[..i] {
                if a.from == b.from && a.pattern == b.pattern && (a.to != b.to || a.reward != b.reward) {
                    return Err(Error::validation(
                        "reward machine",
                        format!("conflicting edges from `{}` on `{}`", self.names[a.from.index()], a.pattern),
                    ));
                }
            }
        }

        let n = self.names.len();
        let mut table = Vec::with_capacity(n);
        let mut rewards: HashMap<(RmState, RmState), F> = HashMap::new();
        for u in (0..n).map(|i| RmState(i as u16)) {
            let outgoing: Vec<&Edge<F>> = self.edges.iter().filter(|e| e.from == u).collect();
            let standing = outgoing.iter().find(|e| e.to == u).map_or_else(F::zero, |e| e.reward);
            let mut row = [(u, standing); NUM_LABELS];
            for (slot, label) in row.iter_mut().zip(PropositionLabel::all()) {
                // max_by_key keeps the last maximum; iterate in reverse so the
                // earliest edge wins ties
                if let Some(e) =
                    outgoing.iter().rev().filter(|e| e.pattern.matches(label)).max_by_key(|e| e.pattern.specificity())
                {
                    *slot = (e.to, e.reward);
                }
            }
            for &(to, r) in &row {
                match rewards.get(&(u, to)) {
                    Some(&prev) if prev != r => {
                        return Err(Error::validation(
                            "reward machine",
                            format!(
                                "transition `{}` -> `{}` carries two rewards ({prev} and {r})",
                                self.names[u.index()],
                                self.names[to.index()]
                            ),
                        ))
                    }
                    _ => {
                        rewards.insert((u, to), r);
                    }
                }
            }
            table.push(row);
        }

        let mut terminal = vec![false; n];
        for t in &self.terminal {
            terminal[t.index()] = true;
        }
        Ok(RewardMachine {
            names: self.names.clone(),
            initial,
            terminal,
            table,
            rewards: rewards.into_iter().map(|(k, r)| (k, RewardFn::Constant(r))).collect(),
        })
    }
}

/// Reward machine `⟨U, u0, δu, δr⟩` with a total transition function over
/// the 16 proposition labels. Immutable and cheap to step.
#[derive(Clone, Debug)]
pub struct RewardMachine<F> {
    names: Vec<String>,
    initial: RmState,
    terminal: Vec<bool>,
    table: Vec<[(RmState, F); NUM_LABELS]>,
    rewards: HashMap<(RmState, RmState), RewardFn<F>>,
}

impl<F: Scalar> RewardMachine<F> {
    pub fn initial(&self) -> RmState {
        self.initial
    }

    pub fn num_states(&self) -> usize {
        self.names.len()
    }

    pub fn states(&self) -> impl Iterator<Item = RmState> {
        (0..self.names.len() as u16).map(RmState)
    }

    pub fn state_name(&self, u: RmState) -> &str {
        &self.names[u.index()]
    }

    pub fn lookup_state(&self, name: &str) -> Result<RmState> {
        self.names
            .iter()
            .position(|n| n == name)
            .map(|i| RmState(i as u16))
            .ok_or_else(|| Error::Domain { kind: "rm-state", name: name.to_string() })
    }

    /// `(δu(u, ℓ), δr(u, δu(u, ℓ)))`.
    pub fn step(&self, u: RmState, label: PropositionLabel) -> Result<(RmState, F)> {
        self.table
            .get(u.index())
            .map(|row| row[label.index()])
            .ok_or_else(|| Error::Domain { kind: "rm-state", name: u.to_string() })
    }

    pub fn is_terminal(&self, u: RmState) -> bool {
        self.terminal.get(u.index()).copied().unwrap_or(false)
    }

    pub fn terminal_states(&self) -> impl Iterator<Item = RmState> + '_ {
        self.states().filter(|&u| self.is_terminal(u))
    }

    /// Reward function on the machine transition `(from, to)`, if that
    /// transition exists.
    pub fn reward_fn(&self, from: RmState, to: RmState) -> Option<&RewardFn<F>> {
        self.rewards.get(&(from, to))
    }

    /// Explicit edge list covering every `(u, ℓ)`, one exact pattern each.
    pub(crate) fn exact_edges(&self) -> impl Iterator<Item = (RmState, PropositionLabel, RmState, F)> + '_ {
        self.states().flat_map(move |u| {
            PropositionLabel::all().map(move |l| {
                let (to, r) = self.table[u.index()][l.index()];
                (u, l, to, r)
            })
        })
    }
}
