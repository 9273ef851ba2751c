use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rand::{Rng, RngCore};

use super::map::GridMap;
use super::Environment;
use crate::automata::{ActionAlphabet, ActionId, ActionSet};
use crate::reward_machine::PropositionLabel;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Cell {
    pub x: u8,
    pub y: u8,
}

impl Cell {
    pub const fn new(x: u8, y: u8) -> Self {
        Cell { x, y }
    }

    fn offset(self, dx: i8, dy: i8) -> Option<Cell> {
        Some(Cell { x: self.x.checked_add_signed(dx)?, y: self.y.checked_add_signed(dy)? })
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.x, self.y)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Heading {
    N,
    E,
    S,
    W,
}

impl Heading {
    pub const ALL: [Heading; 4] = [Heading::N, Heading::E, Heading::S, Heading::W];

    pub fn clockwise(self) -> Heading {
        match self {
            Heading::N => Heading::E,
            Heading::E => Heading::S,
            Heading::S => Heading::W,
            Heading::W => Heading::N,
        }
    }

    pub fn counter_clockwise(self) -> Heading {
        match self {
            Heading::N => Heading::W,
            Heading::W => Heading::S,
            Heading::S => Heading::E,
            Heading::E => Heading::N,
        }
    }

    fn delta(self) -> (i8, i8) {
        match self {
            Heading::N => (0, 1),
            Heading::E => (1, 0),
            Heading::S => (0, -1),
            Heading::W => (-1, 0),
        }
    }

    fn code(self) -> u64 {
        self as u64
    }
}

impl FromStr for Heading {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "N" | "n" => Ok(Heading::N),
            "E" | "e" => Ok(Heading::E),
            "S" | "s" => Ok(Heading::S),
            "W" | "w" => Ok(Heading::W),
            _ => Err(Error::validation("heading", format!("`{s}` is not one of N, E, S, W"))),
        }
    }
}

impl fmt::Display for Heading {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Heading::N => "N",
            Heading::E => "E",
            Heading::S => "S",
            Heading::W => "W",
        })
    }
}

/// Gridworld actions. The id of each variant is its position in
/// [`gridworld_alphabet`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GridAction {
    Left,
    Right,
    Forward,
    Backward,
    Pick(u8),
    Drop(u8),
    /// Accidental drop of item 1; the only uncontrollable action.
    DropAccident,
}

impl GridAction {
    pub const ALL: [GridAction; 11] = [
        GridAction::Left,
        GridAction::Right,
        GridAction::Forward,
        GridAction::Backward,
        GridAction::Pick(1),
        GridAction::Pick(2),
        GridAction::Pick(3),
        GridAction::Drop(1),
        GridAction::Drop(2),
        GridAction::Drop(3),
        GridAction::DropAccident,
    ];

    pub fn id(self) -> ActionId {
        ActionId(match self {
            GridAction::Left => 0,
            GridAction::Right => 1,
            GridAction::Forward => 2,
            GridAction::Backward => 3,
            GridAction::Pick(i) => 3 + i as u16,
            GridAction::Drop(i) => 6 + i as u16,
            GridAction::DropAccident => 10,
        })
    }

    pub fn from_id(a: ActionId) -> Option<GridAction> {
        GridAction::ALL.get(a.index()).copied()
    }

    pub fn label(self) -> &'static str {
        ["l", "r", "f", "b", "p1", "p2", "p3", "d1", "d2", "d3", "d_u"][self.id().index()]
    }

    pub fn is_movement(self) -> bool {
        matches!(self, GridAction::Left | GridAction::Right | GridAction::Forward | GridAction::Backward)
    }
}

/// `l, r, f, b, p1, p2, p3, d1, d2, d3, d_u!`
pub fn gridworld_alphabet() -> ActionAlphabet {
    ActionAlphabet::new(GridAction::ALL.iter().map(|a| (a.label(), *a != GridAction::DropAccident)))
        .expect("static alphabet")
}

/// Where the accidental drop may occur.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DuGate {
    /// Only while all three items are carried, right after a movement.
    CarryAll,
    /// In every state (after a movement, when injected at run time). Used to
    /// exercise the uncontrollable case.
    Everywhere,
}

impl FromStr for DuGate {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "carry_all" => Ok(DuGate::CarryAll),
            "everywhere" => Ok(DuGate::Everywhere),
            _ => Err(Error::validation("du_gate", format!("`{s}` is not carry_all or everywhere"))),
        }
    }
}

impl fmt::Display for DuGate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DuGate::CarryAll => "carry_all",
            DuGate::Everywhere => "everywhere",
        })
    }
}

/// When the controllable drops `d1`..`d3` are available.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DropRule {
    /// Whenever the item is carried.
    Carried,
    /// Only while item 1, the one that can fall, is off the agent; in
    /// practice this confines drops to the recovery after an accident.
    Recovery,
}

impl FromStr for DropRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "carried" => Ok(DropRule::Carried),
            "recovery" => Ok(DropRule::Recovery),
            _ => Err(Error::validation("drops", format!("`{s}` is not carried or recovery"))),
        }
    }
}

impl fmt::Display for DropRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DropRule::Carried => "carried",
            DropRule::Recovery => "recovery",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EnvConfig {
    pub initial_heading: Heading,
    /// Probability of an accidental drop after each gated movement.
    pub p_u: f64,
    pub du_gate: DuGate,
    pub drops: DropRule,
}

impl Default for EnvConfig {
    fn default() -> Self {
        EnvConfig { initial_heading: Heading::N, p_u: 0.1, du_gate: DuGate::CarryAll, drops: DropRule::Carried }
    }
}

const ALL_ITEMS: u8 = 0b111;

/// Agent pose, carried items and the floor position of every item not
/// carried. Bit `i - 1` of `carried` is item `i`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct GridState {
    pub pos: Cell,
    pub heading: Heading,
    pub carried: u8,
    pub floor: [Option<Cell>; 3],
}

impl GridState {
    pub fn carries(&self, item: u8) -> bool {
        self.carried & (1 << (item - 1)) != 0
    }

    /// Compact name without whitespace, e.g. `6.0N000-0.6-8.6-6.3`.
    pub fn name(&self) -> String {
        let mut s = format!(
            "{}.{}{}{}{}{}",
            self.pos.x,
            self.pos.y,
            self.heading,
            self.carries(1) as u8,
            self.carries(2) as u8,
            self.carries(3) as u8
        );
        for f in self.floor {
            match f {
                Some(c) => s.push_str(&format!("-{}.{}", c.x, c.y)),
                None => s.push_str("-c"),
            }
        }
        s
    }
}

impl fmt::Display for GridState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

/// The pick-up and delivery gridworld.
#[derive(Clone, Debug)]
pub struct GridWorld {
    map: Arc<GridMap>,
    cfg: EnvConfig,
    alphabet: ActionAlphabet,
}

impl GridWorld {
    pub fn new(map: impl Into<Arc<GridMap>>, cfg: EnvConfig) -> Result<Self> {
        if !(0.0..=1.0).contains(&cfg.p_u) {
            return Err(Error::validation("env config", format!("p_u = {} is not a probability", cfg.p_u)));
        }
        Ok(GridWorld { map: map.into(), cfg, alphabet: gridworld_alphabet() })
    }

    pub fn map(&self) -> &GridMap {
        &self.map
    }

    pub fn config(&self) -> &EnvConfig {
        &self.cfg
    }

    /// Destination of a movement, `None` if it leaves the grid or crosses a
    /// wall.
    pub fn move_target(&self, s: &GridState, a: GridAction) -> Option<(Cell, Heading)> {
        let heading = match a {
            GridAction::Left => s.heading.counter_clockwise(),
            GridAction::Right => s.heading.clockwise(),
            GridAction::Forward | GridAction::Backward => s.heading,
            _ => return None,
        };
        let (mut dx, mut dy) = heading.delta();
        if a == GridAction::Backward {
            dx = -dx;
            dy = -dy;
        }
        let to = s.pos.offset(dx, dy);
        self.map.passable(s.pos, to).then(|| (to.expect("passable"), heading))
    }

    /// Whether the uncontrollable drop is possible in `s` at all.
    pub fn du_enabled(&self, s: &GridState) -> bool {
        match self.cfg.du_gate {
            DuGate::CarryAll => s.carried == ALL_ITEMS,
            DuGate::Everywhere => true,
        }
    }

    pub fn grid_action(&self, a: ActionId) -> Result<GridAction> {
        GridAction::from_id(a).ok_or_else(|| Error::Domain { kind: "action", name: a.to_string() })
    }
}

impl Environment for GridWorld {
    type State = GridState;

    fn alphabet(&self) -> &ActionAlphabet {
        &self.alphabet
    }

    fn reset(&self) -> GridState {
        GridState {
            pos: self.map.station(),
            heading: self.cfg.initial_heading,
            carried: 0,
            floor: [1, 2, 3].map(|i| Some(self.map.item_home(i))),
        }
    }

    fn feasible_actions(&self, s: &GridState) -> ActionSet {
        let mut out = ActionSet::EMPTY;
        for a in [GridAction::Left, GridAction::Right, GridAction::Forward, GridAction::Backward] {
            if self.move_target(s, a).is_some() {
                out.insert(a.id());
            }
        }
        for i in 1..=3u8 {
            if s.floor[i as usize - 1] == Some(s.pos) {
                out.insert(GridAction::Pick(i).id());
            }
        }
        let drops = match self.cfg.drops {
            DropRule::Carried => true,
            DropRule::Recovery => !s.carries(1),
        };
        for i in (1..=3u8).filter(|_| drops) {
            if s.carries(i) {
                out.insert(GridAction::Drop(i).id());
            }
        }
        out
    }

    fn execute(&self, s: &GridState, a: ActionId) -> Result<GridState> {
        let act = self.grid_action(a)?;
        let infeasible = || Error::Contract(format!("`{}` is not executable in {s}", act.label()));
        let mut next = *s;
        match act {
            GridAction::Left | GridAction::Right | GridAction::Forward | GridAction::Backward => {
                let (pos, heading) = self.move_target(s, act).ok_or_else(infeasible)?;
                next.pos = pos;
                next.heading = heading;
            }
            GridAction::Pick(i) => {
                let slot = &mut next.floor[i as usize - 1];
                if *slot != Some(s.pos) {
                    return Err(infeasible());
                }
                *slot = None;
                next.carried |= 1 << (i - 1);
            }
            GridAction::Drop(i) => {
                if !s.carries(i) {
                    return Err(infeasible());
                }
                next.carried &= !(1 << (i - 1));
                next.floor[i as usize - 1] = Some(s.pos);
            }
            GridAction::DropAccident => {
                if !self.du_enabled(s) {
                    return Err(infeasible());
                }
                if s.carries(1) {
                    next.carried &= !1;
                    next.floor[0] = Some(s.pos);
                }
            }
        }
        Ok(next)
    }

    fn label(&self, s: &GridState) -> PropositionLabel {
        PropositionLabel::new(s.carried, s.pos == self.map.station()).expect("3-bit mask")
    }

    fn maybe_inject_uncontrollable(&self, s: &GridState, last: ActionId, rng: &mut dyn RngCore) -> Option<ActionId> {
        let after_move = GridAction::from_id(last).is_some_and(GridAction::is_movement);
        if self.cfg.p_u <= 0.0 || !after_move || !self.du_enabled(s) {
            return None;
        }
        rng.gen_bool(self.cfg.p_u).then_some(GridAction::DropAccident.id())
    }

    fn digest(&self, s: &GridState) -> u64 {
        let mut d = s.pos.x as u64 | (s.pos.y as u64) << 8 | s.heading.code() << 16 | (s.carried as u64) << 18;
        for (i, f) in s.floor.iter().enumerate() {
            let code = f.map_or(0, |c| self.map.cell_index(c) as u64 + 1);
            d |= code << (21 + 12 * i);
        }
        d
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundled;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn world(cfg: EnvConfig) -> GridWorld {
        GridWorld::new(bundled::gridworld_map(), cfg).unwrap()
    }

    fn at(x: u8, y: u8, heading: Heading, carried: u8, w: &GridWorld) -> GridState {
        let mut s = w.reset();
        s.pos = Cell::new(x, y);
        s.heading = heading;
        for i in 1..=3u8 {
            if carried & (1 << (i - 1)) != 0 {
                s.floor[i as usize - 1] = None;
            }
        }
        s.carried = carried;
        s
    }

    fn names(w: &GridWorld, set: ActionSet) -> Vec<&str> {
        set.iter().map(|a| w.alphabet().name(a)).collect()
    }

    #[test]
    fn reset_state() {
        let w = world(EnvConfig::default());
        let s = w.reset();
        assert_eq!((s.pos, s.heading, s.carried), (Cell::new(6, 0), Heading::N, 0));
        assert_eq!(s.floor, [Some(Cell::new(0, 6)), Some(Cell::new(8, 6)), Some(Cell::new(6, 3))]);
        assert_eq!(w.reset(), s);
        let e = world(EnvConfig { initial_heading: Heading::E, ..EnvConfig::default() });
        assert_eq!(e.reset().heading, Heading::E);
        assert_eq!(w.label(&s).to_string(), "000∧S");
    }

    #[test]
    fn feasible_at_station_excludes_border() {
        let w = world(EnvConfig::default());
        let s = w.reset();
        // facing N at y = 0: b would cross the southern border
        assert_eq!(names(&w, w.feasible_actions(&s)), ["l", "r", "f"]);
    }

    #[test]
    fn pick_feasible_on_item_cell() {
        let w = world(EnvConfig::default());
        let s = at(0, 6, Heading::E, 0, &w);
        assert!(w.feasible_actions(&s).contains(GridAction::Pick(1).id()));
        assert!(!w.feasible_actions(&s).contains(GridAction::Pick(2).id()));
    }

    #[test]
    fn pocket_cell_allows_only_the_western_exit() {
        let w = world(EnvConfig::default());
        let s = at(5, 3, Heading::N, 0, &w);
        assert_eq!(names(&w, w.feasible_actions(&s)), ["l"]);
    }

    #[test]
    fn movement_semantics() {
        let w = world(EnvConfig::default());
        let s = at(4, 4, Heading::N, 0b010, &w);
        let l = w.execute(&s, GridAction::Left.id()).unwrap();
        assert_eq!((l.pos, l.heading, l.carried), (Cell::new(3, 4), Heading::W, 0b010));
        let b = w.execute(&s, GridAction::Backward.id()).unwrap();
        assert_eq!((b.pos, b.heading), (Cell::new(4, 3), Heading::N));
        let r = w.execute(&s, GridAction::Right.id()).unwrap();
        assert_eq!((r.pos, r.heading), (Cell::new(5, 4), Heading::E));
        let f = w.execute(&s, GridAction::Forward.id()).unwrap();
        assert_eq!((f.pos, f.heading), (Cell::new(4, 5), Heading::N));
    }

    #[test]
    fn accidental_drop_leaves_item_one_in_place() {
        let w = world(EnvConfig::default());
        let s = at(2, 2, Heading::E, 0b111, &w);
        let d = w.execute(&s, GridAction::DropAccident.id()).unwrap();
        assert_eq!(d.carried, 0b110);
        assert_eq!(w.label(&d).to_string(), "011");
        assert_eq!(d.floor[0], Some(Cell::new(2, 2)));
        // not allowed under the default gate unless all three are carried
        assert!(w.execute(&d, GridAction::DropAccident.id()).is_err());
    }

    #[test]
    fn drop_rules() {
        let drops = |w: &GridWorld, s: &GridState| -> Vec<String> {
            names(w, w.feasible_actions(s)).into_iter().filter(|n| n.starts_with('d')).map(String::from).collect()
        };
        let w = world(EnvConfig::default());
        assert_eq!(drops(&w, &at(2, 2, Heading::E, 0b111, &w)), ["d1", "d2", "d3"]);
        assert_eq!(drops(&w, &at(2, 2, Heading::E, 0b110, &w)), ["d2", "d3"]);
        let r = world(EnvConfig { drops: DropRule::Recovery, ..EnvConfig::default() });
        assert!(drops(&r, &at(2, 2, Heading::E, 0b111, &r)).is_empty());
        assert!(drops(&r, &at(2, 2, Heading::E, 0b001, &r)).is_empty());
        assert_eq!(drops(&r, &at(2, 2, Heading::E, 0b110, &r)), ["d2", "d3"]);
        assert_eq!("recovery".parse::<DropRule>().unwrap(), DropRule::Recovery);
        assert!("never".parse::<DropRule>().is_err());
    }

    #[test]
    fn infeasible_actions_are_contract_errors() {
        let w = world(EnvConfig::default());
        let s = w.reset();
        for a in [GridAction::Backward, GridAction::Pick(1), GridAction::Drop(2)] {
            assert!(matches!(w.execute(&s, a.id()), Err(Error::Contract(_))), "{a:?}");
        }
    }

    #[test]
    fn labels_follow_state() {
        let w = world(EnvConfig::default());
        assert_eq!(w.label(&at(6, 0, Heading::S, 0b111, &w)).to_string(), "111∧S");
        assert_eq!(w.label(&at(0, 6, Heading::S, 0b001, &w)).to_string(), "100");
    }

    #[test]
    fn injection_gate() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let f = GridAction::Forward.id();
        let always = world(EnvConfig { p_u: 1.0, ..EnvConfig::default() });
        let never = world(EnvConfig { p_u: 0.0, ..EnvConfig::default() });
        let full = at(4, 4, Heading::N, 0b111, &always);
        let partial = at(4, 4, Heading::N, 0b011, &always);
        assert_eq!(always.maybe_inject_uncontrollable(&full, f, &mut rng), Some(GridAction::DropAccident.id()));
        assert_eq!(always.maybe_inject_uncontrollable(&partial, f, &mut rng), None);
        assert_eq!(always.maybe_inject_uncontrollable(&full, GridAction::Pick(3).id(), &mut rng), None);
        for _ in 0..1000 {
            assert_eq!(never.maybe_inject_uncontrollable(&full, f, &mut rng), None);
        }
    }

    #[test]
    fn digests_distinguish_floor_placement() {
        let w = world(EnvConfig::default());
        let s = at(2, 2, Heading::E, 0b111, &w);
        let d = w.execute(&s, GridAction::DropAccident.id()).unwrap();
        let d2 = w.execute(&s, GridAction::Drop(1).id()).unwrap();
        assert_eq!(w.digest(&d), w.digest(&d2));
        assert_ne!(w.digest(&s), w.digest(&d));
        let moved = at(3, 2, Heading::E, 0b110, &w);
        assert_ne!(w.digest(&moved), w.digest(&d));
    }
}
