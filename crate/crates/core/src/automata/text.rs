//! Line-oriented automaton files.
//!
//! ```text
//! # comment
//! alphabet: l,r,f,b,d_u!      # `!` marks an uncontrollable label
//! initial: 0
//! marked: m                   # optional, comma or space separated
//! 0 r 1                       # <src> <label> <dst>
//! ```

use std::fmt::Write as _;

use super::{ActionAlphabet, Automaton, AutomatonBuilder};
use crate::{Error, Result};

fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    }
    .trim()
}

fn split_list(s: &str) -> impl Iterator<Item = &str> {
    s.split(|c: char| c == ',' || c.is_whitespace()).map(str::trim).filter(|t| !t.is_empty())
}

/// Parses the automaton text format. `origin` names the source in error
/// messages.
pub fn parse_automaton(text: &str, origin: &str) -> Result<Automaton> {
    let mut builder: Option<AutomatonBuilder> = None;
    let mut initial: Option<String> = None;
    let mut marked: Vec<String> = Vec::new();

    for (lineno, raw) in text.lines().enumerate() {
        let lineno = lineno + 1;
        let line = strip_comment(raw);
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix("alphabet:") {
            if builder.is_some() {
                return Err(Error::parse(origin, lineno, "duplicate alphabet header"));
            }
            let labels = split_list(rest).map(|t| match t.strip_suffix('!') {
                Some(name) => (name.to_string(), false),
                None => (t.to_string(), true),
            });
            let ab = ActionAlphabet::new(labels).map_err(|e| Error::parse(origin, lineno, e.to_string()))?;
            builder = Some(AutomatonBuilder::new(ab));
            continue;
        }
        if let Some(rest) = line.strip_prefix("initial:") {
            let name = rest.trim();
            if name.is_empty() || name.contains(char::is_whitespace) {
                return Err(Error::parse(origin, lineno, "expected one initial state"));
            }
            initial = Some(name.to_string());
            continue;
        }
        if let Some(rest) = line.strip_prefix("marked:") {
            marked.extend(split_list(rest).map(str::to_string));
            continue;
        }
        let b = builder.as_mut().ok_or_else(|| Error::parse(origin, lineno, "transition before `alphabet:` header"))?;
        let fields: Vec<&str> = line.split_whitespace().collect();
        let [src, label, dst] = fields[..] else {
            return Err(Error::parse(origin, lineno, "expected `<src> <label> <dst>`"));
        };
        b.transition(src, label, dst).map_err(|e| Error::parse(origin, lineno, e.to_string()))?;
    }

    let mut b = builder.ok_or_else(|| Error::parse(origin, 0, "missing `alphabet:` header"))?;
    let initial = initial.ok_or_else(|| Error::parse(origin, 0, "missing `initial:` header"))?;
    b.initial(&initial);
    for m in &marked {
        b.mark(m);
    }
    b.build().map_err(|e| Error::parse(origin, 0, e.to_string()))
}

/// Renders an automaton in the text format accepted by [`parse_automaton`].
pub fn write_automaton(a: &Automaton) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "alphabet: {}", a.alphabet().header());
    let _ = writeln!(out, "initial: {}", a.state_name(a.initial()));
    let marked: Vec<&str> = a.marked_states().map(|q| a.state_name(q)).collect();
    if !marked.is_empty() {
        let _ = writeln!(out, "marked: {}", marked.join(","));
    }
    for (s, l, d) in a.transitions() {
        let _ = writeln!(out, "{} {} {}", a.state_name(s), a.alphabet().name(l), a.state_name(d));
    }
    out
}
