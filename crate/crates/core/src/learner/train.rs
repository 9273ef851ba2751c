use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::config::LearnerConfig;
use super::qbank::{QBank, TableKey};
use crate::automata::{ActionId, ActionSet};
use crate::environment::Environment;
use crate::reward_machine::RewardMachine;
use crate::supervisor::{Supervisor, SupervisorState};
use crate::{Error, Result, Scalar};

/// Outcome of one episode.
#[derive(Clone, Debug, PartialEq)]
pub struct EpisodeRecord<F> {
    /// Sum of every reward the reward machine emitted.
    pub score: F,
    /// Agent-chosen actions executed.
    pub steps: u32,
    /// The reward machine reached a terminal state.
    pub completed: bool,
    /// Executed labels in order, injected uncontrollable events included.
    pub action_string: Vec<ActionId>,
}

/// Aggregates over evaluation episodes.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct EvalSummary {
    pub episodes: u64,
    pub completed: u64,
    pub completion_pct: f64,
    pub mean_score: f64,
    pub mean_steps: f64,
}

/// Epsilon-greedy choice over `allowed`: a uniform draw with probability
/// `epsilon`, otherwise a maximiser of the keyed table with ties broken
/// uniformly.
pub fn select_action<F: Scalar, R: Rng + ?Sized>(
    bank: &QBank<F>,
    key: TableKey,
    s: u64,
    allowed: ActionSet,
    epsilon: F,
    rng: &mut R,
) -> Result<ActionId> {
    if allowed.is_empty() {
        return Err(Error::Contract("action selection over an empty set".into()));
    }
    if rng.gen::<f64>() < epsilon.to_f64() {
        return Ok(allowed.nth(rng.gen_range(0..allowed.len())).expect("index below len"));
    }
    let row = bank.row(key, s);
    let value = |a: ActionId| row.map_or(bank.q_init(), |r| r[a.index()]);
    let best = allowed.iter().map(value).reduce(F::max).expect("nonempty");
    let ties: ActionSet = allowed.iter().filter(|&a| value(a) == best).collect();
    if ties.len() == 1 {
        return Ok(ties.nth(0).expect("one tie"));
    }
    Ok(ties.nth(rng.gen_range(0..ties.len())).expect("index below len"))
}

/// One application of the update rule. With `dead_end` the target is the
/// reward alone; otherwise it bootstraps from the best `next_allowed`
/// action of the next table.
#[allow(clippy::too_many_arguments)]
pub fn q_update<F: Scalar>(
    bank: &mut QBank<F>,
    key: TableKey,
    s: u64,
    a: ActionId,
    r: F,
    next_key: TableKey,
    next_s: u64,
    next_allowed: ActionSet,
    dead_end: bool,
    alpha: F,
    gamma: F,
) {
    let q = bank.get(key, s, a);
    let v = match (dead_end, bank.max_over(next_key, next_s, next_allowed)) {
        (false, Some(next)) => q + alpha * (r + gamma * next - q),
        _ => q + alpha * r,
    };
    bank.set(key, s, a, v);
}

enum BankMode<'b, F> {
    Learn(&'b mut QBank<F>, F, F),
    Read(&'b QBank<F>),
}

impl<F> BankMode<'_, F> {
    fn read(&self) -> &QBank<F> {
        match self {
            BankMode::Learn(b, ..) => b,
            BankMode::Read(b) => b,
        }
    }
}

/// Environment, supervisor and reward machine the learner runs against.
pub struct Task<'a, E, F> {
    pub env: &'a E,
    pub supervisor: &'a Supervisor,
    pub rm: &'a RewardMachine<F>,
}

impl<E, F> Clone for Task<'_, E, F> {
    fn clone(&self) -> Self {
        *self
    }
}

impl<E, F> Copy for Task<'_, E, F> {}

impl<'a, E: Environment, F: Scalar> Task<'a, E, F> {
    pub fn new(env: &'a E, supervisor: &'a Supervisor, rm: &'a RewardMachine<F>) -> Result<Self> {
        env.alphabet().ensure_same(supervisor.alphabet())?;
        Ok(Task { env, supervisor, rm })
    }

    /// `(|Q_s|, |Q_h|, |U|)`.
    pub fn dims(&self) -> (usize, usize, usize) {
        let (ns, nh) = self.supervisor.dims();
        (ns, nh, self.rm.num_states())
    }

    pub fn new_bank(&self, q_init: F) -> QBank<F> {
        QBank::new(self.dims(), self.env.alphabet(), q_init)
    }

    fn allowed(&self, sup: SupervisorState, s: &E::State) -> ActionSet {
        self.supervisor.allowed(sup, self.env.feasible_actions(s))
    }

    /// Runs one episode. A learning bank gets one [`q_update`] per agent
    /// step.
    fn episode(
        &self,
        mut bank: BankMode<'_, F>,
        epsilon: F,
        max_steps: u32,
        rng: &mut ChaCha8Rng,
    ) -> Result<EpisodeRecord<F>> {
        let alphabet = self.env.alphabet();
        let mut s = self.env.reset();
        let mut sup = self.supervisor.initial();
        let mut u = self.rm.initial();
        let mut record = EpisodeRecord { score: F::zero(), steps: 0, completed: false, action_string: Vec::new() };
        let mut allowed = self.allowed(sup, &s);
        for _ in 0..max_steps {
            if allowed.is_empty() || self.rm.is_terminal(u) {
                break;
            }
            let key = TableKey::new(sup, u);
            let digest = self.env.digest(&s);
            let a = select_action(bank.read(), key, digest, allowed, epsilon, rng)?;

            let mut next = self.env.execute(&s, a)?;
            let (mut next_u, mut r) = self.rm.step(u, self.env.label(&next))?;
            let mut next_sup = self.supervisor.advance(sup, a)?;
            record.action_string.push(a);

            // an injected event belongs to the same transition from the
            // agent's point of view
            if let Some(x) = self.env.maybe_inject_uncontrollable(&next, a, rng) {
                next = self.env.execute(&next, x)?;
                next_sup = self.supervisor.advance(next_sup, x).map_err(|e| match e {
                    Error::ControllabilityViolation { action, .. } => {
                        Error::ControllabilityViolation { action, trace: alphabet.format_word(&record.action_string) }
                    }
                    e => e,
                })?;
                let (u2, r2) = self.rm.step(next_u, self.env.label(&next))?;
                next_u = u2;
                r = r + r2;
                record.action_string.push(x);
            }

            let next_allowed = self.allowed(next_sup, &next);
            if let BankMode::Learn(bank, alpha, gamma) = &mut bank {
                let (alpha, gamma) = (*alpha, *gamma);
                let dead_end = next_allowed.is_empty() || self.rm.is_terminal(next_u);
                q_update(
                    bank,
                    key,
                    digest,
                    a,
                    r,
                    TableKey::new(next_sup, next_u),
                    self.env.digest(&next),
                    next_allowed,
                    dead_end,
                    alpha,
                    gamma,
                );
            }
            record.score = record.score + r;
            record.steps += 1;
            s = next;
            sup = next_sup;
            u = next_u;
            allowed = next_allowed;
        }
        record.completed = self.rm.is_terminal(u);
        Ok(record)
    }
}

/// Incremental form of [`train`]: one call to [`Trainer::run_episode`] per
/// episode, with the epsilon schedule applied between them.
pub struct Trainer<'a, E, F> {
    task: Task<'a, E, F>,
    cfg: LearnerConfig<F>,
    bank: QBank<F>,
    rng: ChaCha8Rng,
    done: u64,
}

impl<'a, E: Environment, F: Scalar> Trainer<'a, E, F> {
    pub fn new(task: Task<'a, E, F>, cfg: LearnerConfig<F>) -> Result<Self> {
        cfg.validate()?;
        let mut bank = task.new_bank(cfg.q_init);
        bank.seed = cfg.seed;
        bank.note = cfg.summary();
        Ok(Trainer { task, cfg, bank, rng: ChaCha8Rng::seed_from_u64(cfg.seed), done: 0 })
    }

    /// Epsilon used by the next episode.
    pub fn epsilon(&self) -> F {
        self.cfg.epsilon_after(self.done)
    }

    pub fn episodes_done(&self) -> u64 {
        self.done
    }

    pub fn finished(&self) -> bool {
        self.done >= self.cfg.num_episodes
    }

    pub fn bank(&self) -> &QBank<F> {
        &self.bank
    }

    pub fn into_bank(self) -> QBank<F> {
        self.bank
    }

    pub fn run_episode(&mut self) -> Result<EpisodeRecord<F>> {
        let eps = self.epsilon();
        let rec = self.task.episode(
            BankMode::Learn(&mut self.bank, self.cfg.alpha, self.cfg.gamma),
            eps,
            self.cfg.max_steps,
            &mut self.rng,
        )?;
        self.done += 1;
        Ok(rec)
    }
}

/// Supervised Q-learning for `cfg.num_episodes` episodes.
pub fn train<E: Environment, F: Scalar>(
    task: Task<'_, E, F>,
    cfg: &LearnerConfig<F>,
) -> Result<(QBank<F>, Vec<EpisodeRecord<F>>)> {
    let mut t = Trainer::new(task, *cfg)?;
    let mut records = Vec::with_capacity(cfg.num_episodes.min(1 << 20) as usize);
    while !t.finished() {
        records.push(t.run_episode()?);
    }
    Ok((t.into_bank(), records))
}

/// Runs `episodes` episodes with a fixed `epsilon` and no updates.
pub fn evaluate<E: Environment, F: Scalar>(
    task: Task<'_, E, F>,
    bank: &QBank<F>,
    episodes: u64,
    epsilon: F,
    max_steps: u32,
    seed: u64,
) -> Result<EvalSummary> {
    bank.ensure_compatible(task.dims(), task.env.alphabet())?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut completed, mut score, mut steps) = (0u64, 0.0, 0.0);
    for _ in 0..episodes {
        let rec = task.episode(BankMode::Read(bank), epsilon, max_steps, &mut rng)?;
        completed += rec.completed as u64;
        score += rec.score.to_f64();
        steps += rec.steps as f64;
    }
    let n = episodes.max(1) as f64;
    Ok(EvalSummary {
        episodes,
        completed,
        completion_pct: 100.0 * completed as f64 / n,
        mean_score: score / n,
        mean_steps: steps / n,
    })
}

/// Runs single evaluation episodes, keeping each record.
pub fn rollouts<E: Environment, F: Scalar>(
    task: Task<'_, E, F>,
    bank: &QBank<F>,
    episodes: u64,
    epsilon: F,
    max_steps: u32,
    seed: u64,
) -> Result<Vec<EpisodeRecord<F>>> {
    bank.ensure_compatible(task.dims(), task.env.alphabet())?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..episodes).map(|_| task.episode(BankMode::Read(bank), epsilon, max_steps, &mut rng)).collect()
}
