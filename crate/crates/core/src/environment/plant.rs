use std::collections::VecDeque;
use std::hash::Hash;
use std::str::FromStr;

use rustc_hash::FxHashMap;

use super::grid::{GridAction, GridState, GridWorld};
use super::Environment;
use crate::automata::{ActionId, Automaton, StateId};
use crate::{Error, Result};

/// Which plant generator the controllability check uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PlantModel {
    /// Every reachable [`GridState`]. Exact, but the floor placements of
    /// dropped items make it far too large for the bundled map.
    Exact,
    /// States keyed by `(pos, heading, carried)`. Movements and drops are
    /// exact; `p_i` is enabled whenever item `i` is not carried. The
    /// generated language contains the exact one, so a controllable verdict
    /// carries over to the exact plant.
    Abstract,
}

impl FromStr for PlantModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(PlantModel::Exact),
            "abstract" => Ok(PlantModel::Abstract),
            _ => Err(Error::validation("plant model", format!("`{s}` is not exact or abstract"))),
        }
    }
}

/// Explicit automaton of the gridworld's reachable states. `d_u` is
/// enabled wherever the configured gate allows it, independent of the
/// preceding action.
pub fn plant_automaton(world: &GridWorld, cap: usize) -> Result<Automaton> {
    explore(world, world.reset(), cap, |s| *s, |s| successors(world, s), GridState::name)
}

/// The `(pos, heading, carried)` quotient described at [`PlantModel::Abstract`].
pub fn abstract_plant_automaton(world: &GridWorld, cap: usize) -> Result<Automaton> {
    let start = world.reset();
    explore(
        world,
        start,
        cap,
        |s| (s.pos, s.heading, s.carried),
        |s| {
            let mut out = Vec::new();
            for a in GridAction::ALL {
                let next = match a {
                    GridAction::Pick(i) if !s.carries(i) => {
                        let mut n = *s;
                        n.carried |= 1 << (i - 1);
                        n.floor[i as usize - 1] = None;
                        Some(n)
                    }
                    GridAction::Pick(_) => None,
                    _ => {
                        let feasible = a == GridAction::DropAccident && world.du_enabled(s)
                            || world.feasible_actions(s).contains(a.id());
                        feasible.then(|| world.execute(s, a.id()).expect("feasible"))
                    }
                };
                if let Some(n) = next {
                    out.push((a.id(), n));
                }
            }
            out
        },
        |s| {
            format!(
                "{}.{}{}{}{}{}",
                s.pos.x,
                s.pos.y,
                s.heading,
                s.carries(1) as u8,
                s.carries(2) as u8,
                s.carries(3) as u8
            )
        },
    )
}

fn successors(world: &GridWorld, s: &GridState) -> Vec<(ActionId, GridState)> {
    let mut enabled = world.feasible_actions(s);
    if world.du_enabled(s) {
        enabled.insert(GridAction::DropAccident.id());
    }
    enabled.iter().map(|a| (a, world.execute(s, a).expect("enabled action executes"))).collect()
}

fn explore<K, N, X>(
    world: &GridWorld,
    start: GridState,
    cap: usize,
    key: impl Fn(&GridState) -> K,
    mut succ: X,
    name: N,
) -> Result<Automaton>
where
    K: Hash + Eq,
    N: Fn(&GridState) -> String,
    X: FnMut(&GridState) -> Vec<(ActionId, GridState)>,
{
    let alphabet = world.alphabet().clone();
    let n = alphabet.len();
    let mut index: FxHashMap<K, StateId> = FxHashMap::default();
    let mut names = Vec::new();
    let mut delta: Vec<Option<StateId>> = Vec::new();
    let mut queue = VecDeque::new();

    index.insert(key(&start), StateId(0));
    names.push(name(&start));
    delta.resize(n, None);
    queue.push_back((StateId(0), start));

    while let Some((q, s)) = queue.pop_front() {
        for (a, next) in succ(&s) {
            let k = key(&next);
            let target = match index.get(&k) {
                Some(&t) => t,
                None => {
                    if names.len() >= cap {
                        return Err(Error::ResourceCap { cap });
                    }
                    let t = StateId(names.len() as u32);
                    index.insert(k, t);
                    names.push(name(&next));
                    delta.resize(names.len() * n, None);
                    queue.push_back((t, next));
                    t
                }
            };
            delta[q.index() * n + a.index()] = Some(target);
        }
    }
    let marked = vec![false; names.len()];
    Ok(Automaton::from_parts(alphabet, names, delta, StateId(0), marked, None))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundled;
    use crate::environment::{DuGate, EnvConfig};

    fn world(gate: DuGate) -> GridWorld {
        GridWorld::new(bundled::gridworld_map(), EnvConfig { du_gate: gate, ..EnvConfig::default() }).unwrap()
    }

    fn tiny_world(gate: DuGate) -> GridWorld {
        let text = "size 3 2\nitem 1 0 0\nitem 2 1 0\nitem 3 2 1\nstation 0 1\n";
        let map = crate::environment::parse_map(text, "tiny").unwrap();
        GridWorld::new(map, EnvConfig { du_gate: gate, ..EnvConfig::default() }).unwrap()
    }

    fn du() -> ActionId {
        GridAction::DropAccident.id()
    }

    #[test]
    fn initial_labels_match_reset_feasibility() {
        let w = world(DuGate::CarryAll);
        let reset: Vec<_> = w.feasible_actions(&w.reset()).iter().collect();
        let tiny = tiny_world(DuGate::CarryAll);
        let exact = plant_automaton(&tiny, 1_000_000).unwrap();
        assert_eq!(
            exact.active_actions(exact.initial()).unwrap(),
            tiny.feasible_actions(&tiny.reset()).iter().collect::<Vec<_>>()
        );
        // the quotient adds every pick whose item is not carried
        let p = abstract_plant_automaton(&w, 1_000_000).unwrap();
        let picks = [4, 5, 6].map(ActionId);
        let mut want = reset.clone();
        want.extend(picks);
        assert_eq!(p.active_actions(p.initial()).unwrap(), want);
    }

    #[test]
    fn abstract_du_only_at_full_mask() {
        let w = world(DuGate::CarryAll);
        let p = abstract_plant_automaton(&w, 1_000_000).unwrap();
        let mut with_du = 0;
        for q in p.states() {
            let full = p.state_name(q).ends_with("111");
            assert_eq!(p.try_step(q, du()).is_some(), full, "{}", p.state_name(q));
            with_du += full as usize;
        }
        // every open (pos, heading) pair is reachable with all items
        assert!(with_du > 100);
    }

    #[test]
    fn everywhere_gate_enables_du_in_every_state() {
        let w = world(DuGate::Everywhere);
        let p = abstract_plant_automaton(&w, 1_000_000).unwrap();
        assert!(p.states().all(|q| p.try_step(q, du()).is_some()));
    }

    #[test]
    fn exact_plant_hits_the_cap_on_the_bundled_map() {
        let w = world(DuGate::CarryAll);
        assert!(matches!(plant_automaton(&w, 50_000), Err(Error::ResourceCap { cap: 50_000 })));
    }

    #[test]
    fn exact_language_is_contained_in_abstract_language() {
        use crate::automata::enumerate_language;
        for gate in [DuGate::CarryAll, DuGate::Everywhere] {
            let w = tiny_world(gate);
            let exact = plant_automaton(&w, 1_000_000).unwrap();
            let abs = abstract_plant_automaton(&w, 1_000_000).unwrap();
            assert!(exact.num_states() > abs.num_states());
            let le = enumerate_language(&exact, 5);
            let la = enumerate_language(&abs, 5);
            assert!(le.is_subset(&la));
            assert!(le.len() < la.len());
        }
    }
}
