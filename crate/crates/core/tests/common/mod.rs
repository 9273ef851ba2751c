//! Reference implementations the library is checked against. None of them
//! call the code under test for the quantity they compute.

#![allow(dead_code)]

use std::cmp::Reverse;
use std::collections::{BTreeSet, BinaryHeap, HashMap, HashSet};
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use shieldq::automata::{complete_unsafe_spec, enumerate_within, ActionAlphabet, ActionSet, AutomatonBuilder, Word};
use shieldq::environment::{Corridor, GridAction};
use shieldq::harness::ExperimentConfig;
use shieldq::learner::{q_update, TableKey, Task, Trainer};
use shieldq::reward_machine::parse_reward_machine;
use shieldq::{ActionId, Automaton, Environment, GridState, GridWorld, RewardMachine, RmState, StateId};
use shieldq::{Supervisor, SupervisorState};

pub fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

pub fn paper_config() -> ExperimentConfig {
    ExperimentConfig::load(&fixtures().join("paper.conf")).unwrap()
}

// ---------------------------------------------------------------------------
// supremal controllable sublanguage by enumeration

/// Random alphabet of `labels` symbols with at least one uncontrollable
/// and, given two or more labels, at least one controllable symbol.
pub fn random_alphabet<R: Rng>(rng: &mut R, labels: usize) -> ActionAlphabet {
    let u = rng.gen_range(0..labels);
    let c = (u + rng.gen_range(1..labels.max(2))) % labels;
    ActionAlphabet::new((0..labels).map(|i| {
        let controllable = i != u && (i == c || rng.gen_bool(0.5));
        (format!("a{i}"), controllable)
    }))
    .unwrap()
}

/// Random partial automaton defining each transition with probability
/// `density`; with `marks` some states become violations.
pub fn random_automaton<R: Rng>(
    rng: &mut R,
    ab: &ActionAlphabet,
    states: usize,
    density: f64,
    marks: bool,
) -> Automaton {
    let mut b = AutomatonBuilder::new(ab.clone());
    b.initial("0");
    for q in 1..states {
        b.state(&q.to_string());
    }
    for q in 0..states {
        for a in ab.ids() {
            if rng.gen_bool(density) {
                let d = rng.gen_range(0..states);
                b.transition(&q.to_string(), ab.name(a), &d.to_string()).unwrap();
            }
        }
        if marks && q > 0 && rng.gen_bool(0.1) {
            b.mark(&q.to_string());
        }
    }
    b.build().unwrap()
}

/// A random plant and spec over at most three labels and five states each.
pub fn random_pair(seed: u64) -> (Automaton, Automaton) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let labels = rng.gen_range(1..=3);
    let ab = random_alphabet(&mut rng, labels);
    let (np, ns) = (rng.gen_range(1..=5), rng.gen_range(1..=5));
    let plant = random_automaton(&mut rng, &ab, np, 0.9, false);
    let spec = random_automaton(&mut rng, &ab, ns, 0.7, true);
    (plant, spec)
}

/// `n` random pairs, stratified so that at most 30% have an empty supremal
/// sublanguage and at most 40% leave the spec unchanged up to `max_len`;
/// the rest are pruned to a strictly smaller nonempty language.
pub fn stratified_pairs(n: usize, max_len: usize) -> Vec<(u64, Automaton, Automaton)> {
    let (mut empty, mut same) = (n * 3 / 10, n * 4 / 10);
    let mut out = Vec::with_capacity(n);
    for seed in 0.. {
        if out.len() == n {
            break;
        }
        let (plant, spec) = random_pair(seed);
        let sup = brute_supremal(&plant, &spec, max_len);
        let quota = if sup.is_empty() {
            &mut empty
        } else if sup == enumerate_within(&plant, &spec, max_len) {
            &mut same
        } else {
            out.push((seed, plant, spec));
            continue;
        };
        if *quota > 0 {
            *quota -= 1;
            out.push((seed, plant, spec));
        }
    }
    out
}

fn legal(spec: &Automaton, q: StateId, a: ActionId) -> Option<StateId> {
    spec.try_step(q, a).filter(|&n| !spec.is_violation(n))
}

/// Configuration reached by `w` in plant and spec, if `w` is legal.
fn run_pair(plant: &Automaton, spec: &Automaton, w: &[ActionId]) -> Option<(StateId, StateId)> {
    let mut x = (plant.initial(), spec.initial());
    if spec.is_violation(x.1) {
        return None;
    }
    for &a in w {
        x = (plant.try_step(x.0, a)?, legal(spec, x.1, a)?);
    }
    Some(x)
}

/// Some string of uncontrollable labels takes the plant out of the legal
/// language from `x`. Strings longer than the number of configuration pairs
/// revisit a pair, so the search only needs that many steps.
fn uncontrollable_escape(plant: &Automaton, spec: &Automaton, x: (StateId, StateId)) -> bool {
    let ab = plant.alphabet();
    let limit = plant.num_states() * spec.num_states() + 1;
    let mut frontier: HashSet<(StateId, StateId)> = HashSet::from([x]);
    for _ in 0..limit {
        let mut next = HashSet::new();
        for &(p, q) in &frontier {
            for u in ab.uncontrollable_ids() {
                if let Some(p2) = plant.try_step(p, u) {
                    match legal(spec, q, u) {
                        None => return true,
                        Some(q2) => {
                            next.insert((p2, q2));
                        }
                    }
                }
            }
        }
        frontier = next;
    }
    false
}

/// The supremal controllable prefix-closed sublanguage, truncated at
/// `max_len`: legal plant strings none of whose prefixes can be pushed out
/// of the legal language by uncontrollable labels alone.
pub fn brute_supremal(plant: &Automaton, spec: &Automaton, max_len: usize) -> BTreeSet<Word> {
    enumerate_within(plant, spec, max_len)
        .into_iter()
        .filter(|w| {
            (0..=w.len()).all(|k| {
                let x = run_pair(plant, spec, &w[..k]).expect("prefix of a legal string");
                !uncontrollable_escape(plant, spec, x)
            })
        })
        .collect()
}

// ---------------------------------------------------------------------------
// optimal scores over the supervised gridworld

type Node = (GridState, SupervisorState, RmState);

fn node_key(w: &GridWorld, n: &Node) -> (u64, SupervisorState, RmState) {
    (w.digest(&n.0), n.1, n.2)
}

fn allowed(w: &GridWorld, sup: &Supervisor, n: &Node) -> Vec<ActionId> {
    sup.allowed(n.1, w.feasible_actions(&n.0)).iter().collect()
}

/// Deterministic step of the product for an agent action, before any
/// injected event.
fn step(w: &GridWorld, sup: &Supervisor, rm: &RewardMachine, n: &Node, a: ActionId) -> (Node, f64) {
    let s = w.execute(&n.0, a).unwrap();
    let q = sup.advance(n.1, a).unwrap();
    let (u, r) = rm.step(n.2, w.label(&s)).unwrap();
    ((s, q, u), r)
}

/// Highest undiscounted episode score without accidental drops, by
/// Dijkstra over the supervised product with costs `-reward`. `None` if no
/// terminal reward-machine state is reachable.
pub fn optimal_score(w: &GridWorld, sup: &Supervisor, rm: &RewardMachine) -> Option<f64> {
    // rewards in the bundled machine are integers; keep the queue exact
    let start: Node = (w.reset(), sup.initial(), rm.initial());
    let mut dist: HashMap<_, i64> = HashMap::from([(node_key(w, &start), 0)]);
    let mut nodes = vec![start];
    let mut heap = BinaryHeap::from([Reverse((0i64, 0usize))]);
    while let Some(Reverse((d, i))) = heap.pop() {
        let n = nodes[i];
        if dist[&node_key(w, &n)] < d {
            continue;
        }
        if rm.is_terminal(n.2) {
            return Some(-d as f64);
        }
        for a in allowed(w, sup, &n) {
            let (m, r) = step(w, sup, rm, &n, a);
            assert!(r <= 0.0 && r.fract() == 0.0, "oracle needs integral costs, got {r}");
            let nd = d - r as i64;
            let k = node_key(w, &m);
            if dist.get(&k).is_none_or(|&o| nd < o) {
                dist.insert(k, nd);
                nodes.push(m);
                heap.push(Reverse((nd, nodes.len() - 1)));
            }
        }
    }
    None
}

/// Best expected undiscounted score within `horizon` agent steps, with
/// accidental drops injected at rate `w.config().p_u`, by backward
/// induction over the reachable supervised product.
///
/// Voluntary drops (a `d_i` the safe spec does not demand) are left out of
/// the search: a dropped item has to be picked up again, so such a detour
/// never shortens a route, and keeping them would multiply the state space
/// by every floor placement of every item.
pub fn expected_optimal_score(w: &GridWorld, sup: &Supervisor, rm: &RewardMachine, horizon: u32) -> f64 {
    let p_u = w.config().p_u;
    let du = GridAction::DropAccident.id();
    let recovering = |n: &Node| n.1.qs != sup.initial().qs;
    let choices = |n: &Node| -> Vec<ActionId> {
        allowed(w, sup, n)
            .into_iter()
            .filter(|&a| recovering(n) || !matches!(GridAction::from_id(a), Some(GridAction::Drop(_))))
            .collect()
    };

    // outcome list per (node, action): (probability, reward, successor)
    let mut index = HashMap::new();
    let mut nodes: Vec<Node> = Vec::new();
    let mut edges: Vec<Vec<Vec<(f64, f64, usize)>>> = Vec::new();
    let mut intern = |n: Node, nodes: &mut Vec<Node>| -> usize {
        *index.entry(node_key(w, &n)).or_insert_with(|| {
            nodes.push(n);
            nodes.len() - 1
        })
    };
    intern((w.reset(), sup.initial(), rm.initial()), &mut nodes);
    let mut i = 0;
    while i < nodes.len() {
        let n = nodes[i];
        let mut per_action = Vec::new();
        if !rm.is_terminal(n.2) {
            for a in choices(&n) {
                let (m, r) = step(w, sup, rm, &n, a);
                let fires = p_u > 0.0 && GridAction::from_id(a).is_some_and(|g| g.is_movement()) && w.du_enabled(&m.0);
                let mut outcomes = Vec::new();
                if fires {
                    let s2 = w.execute(&m.0, du).unwrap();
                    let q2 = sup.advance(m.1, du).unwrap();
                    let (u2, r2) = rm.step(m.2, w.label(&s2)).unwrap();
                    outcomes.push((p_u, r + r2, intern((s2, q2, u2), &mut nodes)));
                    outcomes.push((1.0 - p_u, r, intern(m, &mut nodes)));
                } else {
                    outcomes.push((1.0, r, intern(m, &mut nodes)));
                }
                per_action.push(outcomes);
            }
        }
        edges.push(per_action);
        i += 1;
    }

    // value[k][x]: best expected score with k steps left
    let mut value = vec![0.0; nodes.len()];
    for _ in 0..horizon {
        value = edges
            .iter()
            .map(|acts| {
                acts.iter()
                    .map(|outs| outs.iter().map(|&(p, r, y)| p * (r + value[y])).sum::<f64>())
                    .reduce(f64::max)
                    .unwrap_or(0.0)
            })
            .collect();
    }
    value[0]
}

// ---------------------------------------------------------------------------
// hand-stepped tabular update

/// Dense Q table indexed `[u][s][a]` with the textbook update written out.
pub struct ReferenceQ {
    pub q: Vec<Vec<Vec<f64>>>,
}

impl ReferenceQ {
    pub fn new(rm_states: usize, env_states: usize, actions: usize, init: f64) -> Self {
        ReferenceQ { q: vec![vec![vec![init; actions]; env_states]; rm_states] }
    }

    #[allow(clippy::too_many_arguments)]
    pub fn update(
        &mut self,
        (u, s, a): (usize, usize, usize),
        r: f64,
        (u2, s2): (usize, usize),
        next_allowed: &[usize],
        dead_end: bool,
        alpha: f64,
        gamma: f64,
    ) {
        let old = self.q[u][s][a];
        self.q[u][s][a] = if dead_end || next_allowed.is_empty() {
            old + alpha * r
        } else {
            let best = next_allowed.iter().map(|&b| self.q[u2][s2][b]).fold(f64::NEG_INFINITY, f64::max);
            old + alpha * (r + gamma * best - old)
        };
    }
}

/// Two-cell corridor starting in cell 0 under permissive specs. The machine
/// needs the station (cell 1), then cell 0, then the station again.
pub struct Chain {
    pub env: Corridor,
    pub sup: Supervisor,
    pub rm: RewardMachine,
}

pub const CHAIN_RM: &str = "\
initial: a
terminal: d
a 000&!S a -1
a 000&S b 2
b 000&S b -0.5
b 000&!S c -1.5
c 000&!S c -1
c 000&S d 5
";

impl Chain {
    pub fn new() -> Self {
        let env = Corridor::new(2, 0).unwrap();
        let mut h = AutomatonBuilder::new(env.alphabet().clone());
        h.initial("0");
        let h = complete_unsafe_spec(&h.build().unwrap()).unwrap();
        let sup = Supervisor::new(h.clone(), h).unwrap();
        let rm = parse_reward_machine(CHAIN_RM, "chain.rm").unwrap();
        Chain { env, sup, rm }
    }

    pub fn task(&self) -> Task<'_, Corridor, f64> {
        Task::new(&self.env, &self.sup, &self.rm).unwrap()
    }
}

/// Machine index of each hand-stepped state `a`, `b`, `c`, `d`.
fn chain_index(rm: &RewardMachine) -> [RmState; 4] {
    ["a", "b", "c", "d"].map(|n| rm.lookup_state(n).unwrap())
}

/// The chain's reward machine written out: `(next, reward)` from state `u`
/// on entering `cell`.
fn chain_rm_step(u: usize, cell: usize) -> (usize, f64) {
    match (u, cell == 1) {
        (0, false) => (0, -1.0),
        (0, true) => (1, 2.0),
        (1, true) => (1, -0.5),
        (1, false) => (2, -1.5),
        (2, false) => (2, -1.0),
        (2, true) => (3, 5.0),
        _ => (3, 0.0),
    }
}

/// Largest deviation between `bank` and `reference` over every entry.
fn chain_deviation(bank: &shieldq::QBank, reference: &ReferenceQ, idx: &[RmState; 4]) -> f64 {
    let mut worst: f64 = 0.0;
    for (u, rows) in reference.q.iter().enumerate() {
        for (s, row) in rows.iter().enumerate() {
            for (a, &v) in row.iter().enumerate() {
                let key = TableKey { qs: StateId(0), qh: StateId(0), u: idx[u] };
                worst = worst.max((bank.get(key, s as u64, ActionId(a as u16)) - v).abs());
            }
        }
    }
    worst
}

/// Trains on the chain with random hyperparameters and replays every
/// episode's action string through [`ReferenceQ`]. Returns the largest
/// deviation seen after any episode, over `rollouts` trainers.
pub fn chain_rollout_deviation(seed: u64, rollouts: usize) -> f64 {
    let chain = Chain::new();
    let idx = chain_index(&chain.rm);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for k in 0..rollouts {
        let cfg = shieldq::LearnerConfig {
            alpha: rng.gen_range(0.01..1.0),
            gamma: rng.gen_range(0.0..1.0),
            epsilon: rng.gen_range(0.0..1.0),
            q_init: rng.gen_range(-5.0..5.0),
            max_steps: rng.gen_range(1..10),
            num_episodes: 5,
            seed: seed.wrapping_mul(1000) + k as u64,
            ..Default::default()
        };
        let mut trainer = Trainer::new(chain.task(), cfg).unwrap();
        let mut reference = ReferenceQ::new(4, 2, 2, cfg.q_init);
        while !trainer.finished() {
            let rec = trainer.run_episode().unwrap();
            let (mut s, mut u) = (0usize, 0usize);
            for &a in &rec.action_string {
                let s2 = if a == Corridor::EAST { s + 1 } else { s - 1 };
                let (u2, r) = chain_rm_step(u, s2);
                let next_allowed = [if s2 == 0 { Corridor::EAST } else { Corridor::WEST }.index()];
                reference.update((u, s, a.index()), r, (u2, s2), &next_allowed, u2 == 3, cfg.alpha, cfg.gamma);
                s = s2;
                u = u2;
            }
            worst = worst.max(chain_deviation(trainer.bank(), &reference, &idx));
        }
    }
    worst
}

/// Applies `n` random single updates to one bank and to [`ReferenceQ`];
/// returns the largest deviation after any update.
pub fn single_update_deviation(seed: u64, n: usize) -> f64 {
    let ab = ActionAlphabet::new([("x", true), ("y", true), ("z", true)]).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let q_init = rng.gen_range(-3.0..3.0);
    let mut bank = shieldq::QBank::new((1, 1, 3), &ab, q_init);
    let mut reference = ReferenceQ::new(3, 4, 3, q_init);
    let idx = [RmState(0), RmState(1), RmState(2), RmState(2)];
    let key = |u: usize| TableKey { qs: StateId(0), qh: StateId(0), u: RmState(u as u16) };
    let mut worst: f64 = 0.0;
    for _ in 0..n {
        let (u, s, a) = (rng.gen_range(0..3), rng.gen_range(0..4), rng.gen_range(0..3));
        let (u2, s2) = (rng.gen_range(0..3), rng.gen_range(0..4));
        let next: Vec<usize> = (0..3).filter(|_| rng.gen_bool(0.6)).collect();
        let dead_end = rng.gen_bool(0.2);
        let r = rng.gen_range(-20.0..5.0);
        let (alpha, gamma) = (rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0));
        let allowed: ActionSet = next.iter().map(|&b| ActionId(b as u16)).collect();
        q_update(
            &mut bank,
            key(u),
            s as u64,
            ActionId(a as u16),
            r,
            key(u2),
            s2 as u64,
            allowed,
            dead_end,
            alpha,
            gamma,
        );
        reference.update((u, s, a), r, (u2, s2), &next, dead_end, alpha, gamma);
        worst = worst.max(chain_deviation(&bank, &reference, &idx));
    }
    worst
}
