use std::fmt;
use std::str::FromStr;

use crate::{Error, Result};

/// Number of distinct labels: 8 carried masks times the station flag.
pub const NUM_LABELS: usize = 16;

/// Propositions observed by the reward machine: which of the three items are
/// carried and whether the agent stands on the station cell.
///
/// Bit `i - 1` of `carried` is item `i`. The text form lists item 1 first, so
/// carrying only item 1 prints as `100`; standing on the station appends
/// `∧S`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PropositionLabel {
    carried: u8,
    at_station: bool,
}

impl PropositionLabel {
    pub fn new(carried: u8, at_station: bool) -> Result<Self> {
        if carried > 0b111 {
            return Err(Error::validation("label", format!("carried mask {carried:#b} exceeds 3 bits")));
        }
        Ok(PropositionLabel { carried, at_station })
    }

    pub fn carried(self) -> u8 {
        self.carried
    }

    pub fn at_station(self) -> bool {
        self.at_station
    }

    pub fn carries(self, item: u8) -> bool {
        (1..=3).contains(&item) && self.carried & (1 << (item - 1)) != 0
    }

    /// Dense index in `0..NUM_LABELS`.
    #[inline]
    pub fn index(self) -> usize {
        (self.carried as usize) << 1 | self.at_station as usize
    }

    pub fn from_index(i: usize) -> Self {
        debug_assert!(i < NUM_LABELS);
        PropositionLabel { carried: (i >> 1) as u8, at_station: i & 1 == 1 }
    }

    pub fn all() -> impl Iterator<Item = PropositionLabel> {
        (0..NUM_LABELS).map(Self::from_index)
    }
}

impl fmt::Display for PropositionLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for item in 1..=3 {
            f.write_str(if self.carries(item) { "1" } else { "0" })?;
        }
        if self.at_station {
            f.write_str("∧S")?;
        }
        Ok(())
    }
}

impl FromStr for PropositionLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::validation("label", format!("cannot parse `{s}`"));
        let (bits, station) = match s.split_once(['∧', '&']) {
            Some((b, "S")) => (b, true),
            Some(_) => return Err(bad()),
            None => (s, false),
        };
        if bits.len() != 3 {
            return Err(bad());
        }
        let mut carried = 0;
        for (i, c) in bits.chars().enumerate() {
            match c {
                '1' => carried |= 1 << i,
                '0' => {}
                _ => return Err(bad()),
            }
        }
        PropositionLabel::new(carried, station)
    }
}

/// A set of labels: a mask pattern over `0`, `1`, `?` plus an optional
/// station constraint (`&S` or `&!S`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct LabelPattern {
    bits: [Option<bool>; 3],
    station: Option<bool>,
}

impl LabelPattern {
    pub const ANY: LabelPattern = LabelPattern { bits: [None; 3], station: None };

    pub fn exact(label: PropositionLabel) -> Self {
        LabelPattern { bits: [1, 2, 3].map(|i| Some(label.carries(i))), station: Some(label.at_station()) }
    }

    pub fn matches(&self, label: PropositionLabel) -> bool {
        self.bits.iter().enumerate().all(|(i, b)| b.is_none_or(|b| b == label.carries(i as u8 + 1)))
            && self.station.is_none_or(|s| s == label.at_station())
    }

    /// Number of constrained propositions; higher wins when patterns overlap.
    pub fn specificity(&self) -> usize {
        self.bits.iter().filter(|b| b.is_some()).count() + self.station.is_some() as usize
    }
}

impl fmt::Display for LabelPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.bits {
            f.write_str(match b {
                Some(true) => "1",
                Some(false) => "0",
                None => "?",
            })?;
        }
        match self.station {
            Some(true) => f.write_str("&S"),
            Some(false) => f.write_str("&!S"),
            None => Ok(()),
        }
    }
}

impl FromStr for LabelPattern {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::validation("label pattern", format!("cannot parse `{s}`"));
        if s == "true" {
            return Ok(LabelPattern::ANY);
        }
        let (mask, station) = match s.split_once(['&', '∧']) {
            Some((m, "S")) => (m, Some(true)),
            Some((m, "!S")) | Some((m, "¬S")) => (m, Some(false)),
            Some(_) => return Err(bad()),
            None => (s, None),
        };
        let chars: Vec<char> = mask.chars().collect();
        if chars.len() != 3 {
            return Err(bad());
        }
        let mut bits = [None; 3];
        for (slot, c) in bits.iter_mut().zip(chars) {
            *slot = match c {
                '1' => Some(true),
                '0' => Some(false),
                '?' => None,
                _ => return Err(bad()),
            };
        }
        Ok(LabelPattern { bits, station })
    }
}
