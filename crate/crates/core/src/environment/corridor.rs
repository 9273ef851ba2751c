use rand::RngCore;

use super::Environment;
use crate::automata::{ActionAlphabet, ActionId, ActionSet};
use crate::reward_machine::PropositionLabel;
use crate::{Error, Result};

/// A row of cells walked with `w` and `e`. The last cell is labelled as the
/// station; nothing is ever carried and there are no uncontrollable events.
#[derive(Clone, Debug)]
pub struct Corridor {
    len: usize,
    start: usize,
    alphabet: ActionAlphabet,
}

impl Corridor {
    pub const WEST: ActionId = ActionId(0);
    pub const EAST: ActionId = ActionId(1);

    pub fn new(len: usize, start: usize) -> Result<Self> {
        if len < 2 || start >= len {
            return Err(Error::validation("corridor", format!("start {start} in a corridor of {len} cells")));
        }
        Ok(Corridor { len, start, alphabet: ActionAlphabet::new([("w", true), ("e", true)])? })
    }

    pub fn num_cells(&self) -> usize {
        self.len
    }

    pub fn goal(&self) -> usize {
        self.len - 1
    }
}

impl Environment for Corridor {
    type State = usize;

    fn alphabet(&self) -> &ActionAlphabet {
        &self.alphabet
    }

    fn reset(&self) -> usize {
        self.start
    }

    fn feasible_actions(&self, s: &usize) -> ActionSet {
        let mut out = ActionSet::EMPTY;
        if *s > 0 {
            out.insert(Self::WEST);
        }
        if *s + 1 < self.len {
            out.insert(Self::EAST);
        }
        out
    }

    fn execute(&self, s: &usize, a: ActionId) -> Result<usize> {
        if !self.feasible_actions(s).contains(a) {
            return Err(Error::Contract(format!("action {a} is not executable in cell {s}")));
        }
        Ok(if a == Self::WEST { s - 1 } else { s + 1 })
    }

    fn label(&self, s: &usize) -> PropositionLabel {
        PropositionLabel::new(0, *s == self.goal()).expect("empty mask")
    }

    fn maybe_inject_uncontrollable(&self, _: &usize, _: ActionId, _: &mut dyn RngCore) -> Option<ActionId> {
        None
    }

    fn digest(&self, s: &usize) -> u64 {
        *s as u64
    }
}
