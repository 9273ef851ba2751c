//! Reward-machine text files.
//!
//! ```text
//! states: u0,u1
//! initial: u0
//! terminal: u1
//! u0 1??&S u1 0      # <from> <pattern> <to> <reward>
//! ```

use std::fmt::Write as _;

use super::label::LabelPattern;
use super::machine::{PartialMachine, RewardMachine};
use crate::{Error, Result, Scalar};

fn split_list(s: &str) -> impl Iterator<Item = &str> {
    s.split(|c: char| c == ',' || c.is_whitespace()).filter(|t| !t.is_empty())
}

/// Parses and totalizes a reward machine.
pub fn parse_reward_machine<F: Scalar>(text: &str, origin: &str) -> Result<RewardMachine<F>> {
    let mut pm = PartialMachine::<F>::new();
    let mut declared: Option<Vec<String>> = None;
    let mut has_initial = false;
    for (lineno, raw) in text.lines().enumerate() {
        let lineno = lineno + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix("states:") {
            let names: Vec<String> = split_list(rest).map(str::to_string).collect();
            for s in &names {
                pm.state(s);
            }
            declared.get_or_insert_with(Vec::new).extend(names);
        } else if let Some(rest) = line.strip_prefix("initial:") {
            pm.initial(rest.trim());
            has_initial = true;
        } else if let Some(rest) = line.strip_prefix("terminal:") {
            for s in split_list(rest) {
                pm.terminal(s);
            }
        } else {
            let fields: Vec<&str> = line.split_whitespace().collect();
            let [from, pattern, to, reward] = fields[..] else {
                return Err(Error::parse(origin, lineno, "expected `<from> <pattern> <to> <reward>`"));
            };
            let pattern: LabelPattern =
                pattern.parse().map_err(|e: Error| Error::parse(origin, lineno, e.to_string()))?;
            let reward: F =
                reward.parse().map_err(|_| Error::parse(origin, lineno, format!("bad reward `{reward}`")))?;
            if let Some(declared) = &declared {
                for s in [from, to] {
                    if !declared.iter().any(|d| d == s) {
                        return Err(Error::parse(origin, lineno, format!("undeclared state `{s}`")));
                    }
                }
            }
            pm.edge(from, pattern, to, reward);
        }
    }
    if !has_initial {
        return Err(Error::parse(origin, 0, "missing `initial:` header"));
    }
    pm.totalize().map_err(|e| Error::parse(origin, 0, e.to_string()))
}

/// Writes a machine with one exact edge per `(state, label)`.
pub fn write_reward_machine<F: Scalar>(rm: &RewardMachine<F>) -> String {
    let mut out = String::new();
    let names: Vec<&str> = rm.states().map(|u| rm.state_name(u)).collect();
    let _ = writeln!(out, "states: {}", names.join(","));
    let _ = writeln!(out, "initial: {}", rm.state_name(rm.initial()));
    let terminal: Vec<&str> = rm.terminal_states().map(|u| rm.state_name(u)).collect();
    if !terminal.is_empty() {
        let _ = writeln!(out, "terminal: {}", terminal.join(","));
    }
    for (u, label, to, r) in rm.exact_edges() {
        let _ = writeln!(out, "{} {} {} {}", rm.state_name(u), LabelPattern::exact(label), rm.state_name(to), r);
    }
    out
}
