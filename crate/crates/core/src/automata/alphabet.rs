use std::fmt;

use crate::{Error, Result};

/// Index of a label inside an [`ActionAlphabet`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ActionId(pub u16);

impl ActionId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for ActionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

/// Small set of actions (ids below 64) stored as a bitmask. Iterates in
/// alphabet order.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct ActionSet(u64);

impl ActionSet {
    pub const EMPTY: ActionSet = ActionSet(0);

    pub fn insert(&mut self, a: ActionId) {
        assert!(a.index() < 64, "action sets hold ids below 64");
        self.0 |= 1 << a.index();
    }

    pub fn remove(&mut self, a: ActionId) {
        if a.index() < 64 {
            self.0 &= !(1 << a.index());
        }
    }

    pub fn contains(self, a: ActionId) -> bool {
        a.index() < 64 && self.0 & (1 << a.index()) != 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    /// The `k`-th member in alphabet order.
    pub fn nth(self, k: usize) -> Option<ActionId> {
        self.iter().nth(k)
    }

    pub fn iter(self) -> impl Iterator<Item = ActionId> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                return None;
            }
            let i = bits.trailing_zeros();
            bits &= bits - 1;
            Some(ActionId(i as u16))
        })
    }

    pub fn retain(&mut self, mut keep: impl FnMut(ActionId) -> bool) {
        for a in self.iter() {
            if !keep(a) {
                self.remove(a);
            }
        }
    }
}

impl FromIterator<ActionId> for ActionSet {
    fn from_iter<I: IntoIterator<Item = ActionId>>(iter: I) -> Self {
        let mut s = ActionSet::EMPTY;
        for a in iter {
            s.insert(a);
        }
        s
    }
}

/// Finite, ordered set of action labels partitioned into controllable and
/// uncontrollable labels. The label order is the order used whenever a
/// deterministic tie-break over labels is needed.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ActionAlphabet {
    labels: Vec<String>,
    controllable: Vec<bool>,
}

impl ActionAlphabet {
    /// Builds an alphabet from `(label, controllable)` pairs.
    pub fn new<I, S>(labels: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, bool)>,
        S: Into<String>,
    {
        let mut out = ActionAlphabet { labels: Vec::new(), controllable: Vec::new() };
        for (name, c) in labels {
            let name = name.into();
            if name.is_empty() || name.chars().any(|ch| ch.is_whitespace() || ch == ',' || ch == '!') {
                return Err(Error::validation("alphabet", format!("bad label `{name}`")));
            }
            if out.labels.contains(&name) {
                return Err(Error::validation("alphabet", format!("duplicate label `{name}`")));
            }
            out.labels.push(name);
            out.controllable.push(c);
        }
        if out.labels.len() > u16::MAX as usize {
            return Err(Error::validation("alphabet", "too many labels"));
        }
        Ok(out)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn ids(&self) -> impl Iterator<Item = ActionId> + '_ {
        (0..self.labels.len()).map(|i| ActionId(i as u16))
    }

    pub fn controllable_ids(&self) -> impl Iterator<Item = ActionId> + '_ {
        self.ids().filter(|&a| self.controllable[a.index()])
    }

    pub fn uncontrollable_ids(&self) -> impl Iterator<Item = ActionId> + '_ {
        self.ids().filter(|&a| !self.controllable[a.index()])
    }

    pub fn name(&self, a: ActionId) -> &str {
        &self.labels[a.index()]
    }

    pub fn id(&self, name: &str) -> Option<ActionId> {
        self.labels.iter().position(|l| l == name).map(|i| ActionId(i as u16))
    }

    /// Like [`id`](Self::id) but reports unknown labels as a domain error.
    pub fn lookup(&self, name: &str) -> Result<ActionId> {
        self.id(name).ok_or_else(|| Error::Domain { kind: "label", name: name.to_string() })
    }

    pub fn contains(&self, a: ActionId) -> bool {
        a.index() < self.labels.len()
    }

    pub fn is_controllable(&self, a: ActionId) -> bool {
        self.controllable[a.index()]
    }

    /// Same labels, every one of them controllable.
    pub fn all_controllable(&self) -> Self {
        ActionAlphabet { labels: self.labels.clone(), controllable: vec![true; self.labels.len()] }
    }

    pub fn same_labels(&self, other: &ActionAlphabet) -> bool {
        self.labels == other.labels
    }

    /// Errors unless both alphabets agree on labels, order and
    /// controllability.
    pub fn ensure_same(&self, other: &ActionAlphabet) -> Result<()> {
        if self == other {
            return Ok(());
        }
        Err(Error::AlphabetMismatch(format!("[{}] vs [{}]", self.header(), other.header())))
    }

    /// Space-separated label names, e.g. `"d_u d_u"`. The empty word prints
    /// as `ε`.
    pub fn format_word(&self, word: &[ActionId]) -> String {
        if word.is_empty() {
            return "ε".to_string();
        }
        word.iter().map(|&a| self.name(a)).collect::<Vec<_>>().join(" ")
    }

    /// Parses a space-separated word; `ε` or the empty string is the empty
    /// word.
    pub fn parse_word(&self, s: &str) -> Result<Vec<ActionId>> {
        s.split_whitespace().filter(|t| *t != "ε").map(|t| self.lookup(t)).collect()
    }

    /// `l,r,d_u!` rendering used by the automaton text format.
    pub fn header(&self) -> String {
        self.labels
            .iter()
            .zip(&self.controllable)
            .map(|(l, &c)| if c { l.clone() } else { format!("{l}!") })
            .collect::<Vec<_>>()
            .join(",")
    }
}
