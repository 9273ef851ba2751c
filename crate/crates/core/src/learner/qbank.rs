use std::io;

use rustc_hash::FxHashMap;

use crate::automata::{ActionAlphabet, ActionId, ActionSet, StateId};
use crate::reward_machine::RmState;
use crate::supervisor::SupervisorState;
use crate::{Error, Result, Scalar};

/// Selects one value table of a [`QBank`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TableKey {
    pub qs: StateId,
    pub qh: StateId,
    pub u: RmState,
}

impl TableKey {
    pub fn new(sup: SupervisorState, u: RmState) -> Self {
        TableKey { qs: sup.qs, qh: sup.qh, u }
    }
}

type Table<F> = FxHashMap<u64, Box<[F]>>;

/// One action-value table per `(q_s, q_h, u)`, each mapping an environment
/// state digest and an action to a value. Tables and rows are created on
/// first write; anything unwritten reads as `q_init`.
#[derive(Clone, Debug)]
pub struct QBank<F> {
    dims: (usize, usize, usize),
    actions: Vec<String>,
    q_init: F,
    tables: Vec<Option<Table<F>>>,
    /// Free-form run description carried in the snapshot header.
    pub note: String,
    pub seed: u64,
}

impl<F: Scalar> QBank<F> {
    /// `dims` is `(|Q_s|, |Q_h|, |U|)`.
    pub fn new(dims: (usize, usize, usize), alphabet: &ActionAlphabet, q_init: F) -> Self {
        QBank {
            dims,
            actions: alphabet.ids().map(|a| alphabet.name(a).to_string()).collect(),
            q_init,
            tables: vec![None; dims.0 * dims.1 * dims.2],
            note: String::new(),
            seed: 0,
        }
    }

    pub fn dims(&self) -> (usize, usize, usize) {
        self.dims
    }

    pub fn q_init(&self) -> F {
        self.q_init
    }

    pub fn num_actions(&self) -> usize {
        self.actions.len()
    }

    pub fn action_labels(&self) -> &[String] {
        &self.actions
    }

    fn slot(&self, key: TableKey) -> usize {
        let (_, nh, nu) = self.dims;
        assert!(
            key.qs.index() < self.dims.0 && key.qh.index() < nh && key.u.index() < nu,
            "table key {key:?} outside bank dims {:?}",
            self.dims
        );
        (key.qs.index() * nh + key.qh.index()) * nu + key.u.index()
    }

    pub fn row(&self, key: TableKey, s: u64) -> Option<&[F]> {
        self.tables[self.slot(key)].as_ref()?.get(&s).map(|r| &r[..])
    }

    pub fn get(&self, key: TableKey, s: u64, a: ActionId) -> F {
        self.row(key, s).map_or(self.q_init, |r| r[a.index()])
    }

    pub fn set(&mut self, key: TableKey, s: u64, a: ActionId, v: F) {
        let slot = self.slot(key);
        let (n, init) = (self.actions.len(), self.q_init);
        let row = self.tables[slot]
            .get_or_insert_with(FxHashMap::default)
            .entry(s)
            .or_insert_with(|| vec![init; n].into_boxed_slice());
        row[a.index()] = v;
    }

    /// Largest value over `actions`; `None` for an empty set.
    pub fn max_over(&self, key: TableKey, s: u64, actions: ActionSet) -> Option<F> {
        let row = self.row(key, s);
        actions.iter().map(|a| row.map_or(self.q_init, |r| r[a.index()])).reduce(F::max)
    }

    pub fn num_tables(&self) -> usize {
        self.tables.iter().filter(|t| t.is_some()).count()
    }

    /// Materialised `(key, state)` rows.
    pub fn num_rows(&self) -> usize {
        self.tables.iter().flatten().map(|t| t.len()).sum()
    }

    fn key_of(&self, slot: usize) -> TableKey {
        let (_, nh, nu) = self.dims;
        TableKey {
            qs: StateId((slot / (nh * nu)) as u32),
            qh: StateId((slot / nu % nh) as u32),
            u: RmState((slot % nu) as u16),
        }
    }

    fn is_init(&self, v: F) -> bool {
        v == self.q_init && v.is_sign_negative() == self.q_init.is_sign_negative()
    }

    /// Visits every entry whose value differs from `q_init`, in key, state,
    /// action order.
    pub fn for_each_entry(&self, mut f: impl FnMut(TableKey, u64, ActionId, F)) {
        for (slot, table) in self.tables.iter().enumerate() {
            let Some(table) = table else { continue };
            let key = self.key_of(slot);
            let mut states: Vec<_> = table.keys().copied().collect();
            states.sort_unstable();
            for s in states {
                for (a, &v) in table[&s].iter().enumerate() {
                    if !self.is_init(v) {
                        f(key, s, ActionId(a as u16), v);
                    }
                }
            }
        }
    }

    /// Entries whose value differs from `q_init`.
    pub fn num_entries(&self) -> usize {
        let mut n = 0;
        self.for_each_entry(|_, _, _, _| n += 1);
        n
    }

    /// Writes the text snapshot: a header followed by one
    /// `q_s q_h u <state-digest> <action> <value>` line per entry that
    /// differs from `q_init`.
    pub fn write_snapshot<W: io::Write>(&self, mut w: W) -> io::Result<()> {
        let (ns, nh, nu) = self.dims;
        writeln!(w, "# qbank v1")?;
        writeln!(w, "dims {ns} {nh} {nu}")?;
        writeln!(w, "actions {}", self.actions.join(","))?;
        writeln!(w, "q_init {}", self.q_init)?;
        writeln!(w, "seed {}", self.seed)?;
        writeln!(w, "note {}", self.note)?;
        let mut res = Ok(());
        self.for_each_entry(|key, s, a, v| {
            if res.is_ok() {
                res = writeln!(w, "{} {} {} {s} {} {v}", key.qs, key.qh, key.u.0, self.actions[a.index()]);
            }
        });
        res
    }

    pub fn to_snapshot(&self) -> String {
        let mut out = Vec::new();
        self.write_snapshot(&mut out).expect("writing to memory");
        String::from_utf8(out).expect("utf-8 snapshot")
    }

    pub fn from_snapshot(text: &str, origin: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
        let mut header = |want: &str| -> Result<(usize, String)> {
            let (n, line) = lines.next().ok_or_else(|| Error::parse(origin, 0, format!("missing `{want}` header")))?;
            if want == "#" {
                return if line.trim() == "# qbank v1" {
                    Ok((n, String::new()))
                } else {
                    Err(Error::parse(origin, n, "not a qbank snapshot"))
                };
            }
            let rest = line
                .strip_prefix(want)
                .and_then(|r| r.strip_prefix(' ').or(r.is_empty().then_some("")))
                .ok_or_else(|| Error::parse(origin, n, format!("expected `{want}` header")))?;
            Ok((n, rest.to_string()))
        };
        header("#")?;
        let (n, dims) = header("dims")?;
        let dims: Vec<usize> = dims
            .split_whitespace()
            .map(str::parse)
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::parse(origin, n, format!("dims: {e}")))?;
        let [ns, nh, nu] = dims[..] else {
            return Err(Error::parse(origin, n, "dims needs three numbers"));
        };
        let (n, actions) = header("actions")?;
        let alphabet = ActionAlphabet::new(actions.split(',').map(|a| (a, true)))
            .map_err(|e| Error::parse(origin, n, e.to_string()))?;
        let (n, q_init) = header("q_init")?;
        let q_init: F = q_init.parse().map_err(|_| Error::parse(origin, n, format!("bad q_init `{q_init}`")))?;
        let (n, seed) = header("seed")?;
        let seed = seed.parse().map_err(|_| Error::parse(origin, n, format!("bad seed `{seed}`")))?;
        let (_, note) = header("note")?;

        let mut bank = QBank::new((ns, nh, nu), &alphabet, q_init);
        bank.seed = seed;
        bank.note = note;
        for (n, line) in lines {
            if line.trim().is_empty() {
                continue;
            }
            let f: Vec<&str> = line.split_whitespace().collect();
            let [qs, qh, u, s, a, v] = f[..] else {
                return Err(Error::parse(origin, n, "expected `q_s q_h u state action value`"));
            };
            let num = |t: &str| t.parse::<u64>().map_err(|_| Error::parse(origin, n, format!("bad number `{t}`")));
            let key =
                TableKey { qs: StateId(num(qs)? as u32), qh: StateId(num(qh)? as u32), u: RmState(num(u)? as u16) };
            if key.qs.index() >= ns || key.qh.index() >= nh || key.u.index() >= nu {
                return Err(Error::parse(origin, n, "table key outside dims"));
            }
            let a = alphabet.lookup(a).map_err(|e| Error::parse(origin, n, e.to_string()))?;
            let v: F = v.parse().map_err(|_| Error::parse(origin, n, format!("bad value `{v}`")))?;
            bank.set(key, num(s)?, a, v);
        }
        Ok(bank)
    }

    /// Errors unless the bank fits automata and a reward machine of the
    /// given sizes over the given alphabet.
    pub fn ensure_compatible(&self, dims: (usize, usize, usize), alphabet: &ActionAlphabet) -> Result<()> {
        if self.dims != dims {
            return Err(Error::Incompatible(format!(
                "bank has dims {:?}, the configured specs need {:?}",
                self.dims, dims
            )));
        }
        let labels: Vec<&str> = alphabet.ids().map(|a| alphabet.name(a)).collect();
        if self.actions != labels {
            return Err(Error::Incompatible(format!(
                "bank actions {} differ from {}",
                self.actions.join(","),
                labels.join(",")
            )));
        }
        Ok(())
    }
}

/// Banks are equal when their metadata and every value agree; whether an
/// entry holding `q_init` was ever written does not matter.
impl<F: Scalar> PartialEq for QBank<F> {
    fn eq(&self, other: &Self) -> bool {
        if self.dims != other.dims
            || self.actions != other.actions
            || self.q_init.to_f64().to_bits() != other.q_init.to_f64().to_bits()
            || self.seed != other.seed
            || self.note != other.note
        {
            return false;
        }
        let collect = |b: &QBank<F>| {
            let mut v = Vec::new();
            b.for_each_entry(|k, s, a, x| v.push((k, s, a, x.to_f64().to_bits())));
            v
        };
        collect(self) == collect(other)
    }
}
