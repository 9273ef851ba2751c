use std::fs;
use std::io::{self, Write as _};
use std::path::{Path, PathBuf};
use std::thread;

use super::config::{ExperimentConfig, Source};
use super::metrics::{windows_to_csv, MetricsAccumulator, MetricsWindow};
use crate::automata::{
    check_controllability, complete_safe_spec, complete_unsafe_spec, conjoin_specs, enumerate_within, parse_automaton,
    supremal_controllable, write_automaton, Automaton, ControllabilityVerdict, Supremal,
};
use crate::bundled;
use crate::environment::{
    abstract_plant_automaton, gridworld_alphabet, parse_map, plant_automaton, Environment, GridWorld, PlantModel,
};
use crate::learner::{evaluate, EvalSummary, QBank, Task, Trainer};
use crate::reward_machine::{parse_reward_machine, RewardMachine};
use crate::supervisor::Supervisor;
use crate::{Error, Result};

/// File name of the bank snapshot inside a run's output directory.
pub const BANK_FILE: &str = "bank.qtab";

/// Loaded inputs of one experiment.
#[derive(Clone, Debug)]
pub struct Experiment {
    pub config: ExperimentConfig,
    pub world: GridWorld,
    /// `G_s'` and `H_1` as read.
    pub safe_raw: Automaton,
    pub unsafe_raw: Automaton,
    pub supervisor: Supervisor,
    pub rm: RewardMachine<f64>,
}

fn read_source(src: &Source, bundled: &'static str, name: &str) -> Result<(String, String)> {
    match src {
        Source::Bundled => Ok((bundled.to_string(), format!("<bundled {name}>"))),
        Source::File(p) => Ok((fs::read_to_string(p).map_err(|e| Error::io(p, e))?, p.display().to_string())),
    }
}

impl Experiment {
    pub fn new(config: ExperimentConfig) -> Result<Self> {
        config.validate()?;
        let (text, origin) = read_source(&config.map, bundled::GRIDWORLD_MAP, "gridworld.map")?;
        let world = GridWorld::new(parse_map(&text, &origin)?, config.env)?;
        let (text, origin) = read_source(&config.safe_spec, bundled::RECOVERY_AUT, "recovery.aut")?;
        let safe_raw = parse_automaton(&text, &origin)?;
        let (text, origin) = read_source(&config.unsafe_spec, bundled::UTURN_AUT, "uturn.aut")?;
        let unsafe_raw = parse_automaton(&text, &origin)?;
        let (text, origin) = read_source(&config.reward_machine, bundled::PICKUP_RM, "pickup.rm")?;
        let rm = parse_reward_machine(&text, &origin)?;
        let alphabet = gridworld_alphabet();
        for spec in [&safe_raw, &unsafe_raw] {
            alphabet.ensure_same(spec.alphabet())?;
        }
        let supervisor = Supervisor::new(complete_safe_spec(&safe_raw)?, complete_unsafe_spec(&unsafe_raw)?)?;
        Ok(Experiment { config, world, safe_raw, unsafe_raw, supervisor, rm })
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::new(ExperimentConfig::load(path)?)
    }

    pub fn task(&self) -> Task<'_, GridWorld, f64> {
        Task::new(&self.world, &self.supervisor, &self.rm).expect("alphabets checked on load")
    }

    /// Plant automaton per the `check` section.
    pub fn plant(&self) -> Result<Automaton> {
        let cap = self.config.check.state_cap;
        match self.config.check.plant {
            PlantModel::Abstract => abstract_plant_automaton(&self.world, cap),
            PlantModel::Exact => plant_automaton(&self.world, cap),
        }
    }

    /// `G_s` and `H` conjoined into one completed spec.
    pub fn combined_spec(&self) -> Result<Automaton> {
        conjoin_specs(self.supervisor.safe_spec(), self.supervisor.unsafe_spec())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CheckReport {
    pub plant_states: usize,
    pub verdict: ControllabilityVerdict,
    /// Counterexample in label form.
    pub counterexample: Option<String>,
    /// Whether the counterexample executes in the environment and drives a
    /// spec into violation with its last, uncontrollable, action.
    pub replayed: Option<bool>,
}

impl CheckReport {
    pub fn is_controllable(&self) -> bool {
        self.verdict.is_controllable()
    }
}

/// Offline controllability check of the configured plant against the
/// combined spec.
pub fn run_check(exp: &Experiment) -> Result<CheckReport> {
    let mut plant = exp.plant()?;
    let mut spec = exp.combined_spec()?;
    if exp.config.check.treat_all_controllable {
        let all = plant.alphabet().all_controllable();
        plant = plant.with_alphabet(all.clone())?;
        spec = spec.with_alphabet(all)?;
    }
    let verdict = check_controllability(&plant, &spec)?;
    let (counterexample, replayed) = match verdict.counterexample() {
        None => (None, None),
        Some(w) => (Some(plant.alphabet().format_word(w)), Some(replay(exp, w))),
    };
    Ok(CheckReport { plant_states: plant.num_states(), verdict, counterexample, replayed })
}

fn replay(exp: &Experiment, word: &[crate::ActionId]) -> bool {
    let w = &exp.world;
    let mut s = w.reset();
    for &a in word {
        match w.execute(&s, a) {
            Ok(n) => s = n,
            Err(_) => return false,
        }
    }
    let sup = &exp.supervisor;
    let Some((&last, prefix)) = word.split_last() else {
        return false;
    };
    let mut q = sup.initial();
    for &a in prefix {
        q = sup.step_unchecked(q, a);
        if sup.is_violation(q) {
            return false;
        }
    }
    !sup.alphabet().is_controllable(last) && sup.is_violation(sup.step_unchecked(q, last))
}

/// How a spec file given to [`run_supremal`] is completed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Completion {
    /// Missing transitions are violations.
    Safe,
    /// Missing transitions return to the initial state; marked states are
    /// violations.
    Unsafe,
    /// Used as is.
    None,
}

#[derive(Clone, Debug)]
pub struct SupremalReport {
    pub result: Supremal,
    /// Bound used for the language comparison.
    pub bound: usize,
    /// Bounded language of the result equals that of the input spec.
    pub equal_to_spec: bool,
    /// The result passes the controllability check.
    pub rechecked: bool,
    pub written: Option<PathBuf>,
}

/// Synthesises the supremal controllable sublanguage of `spec` against the
/// configured plant and writes it to `out` when nonempty.
pub fn run_supremal(
    exp: &Experiment,
    spec: &Automaton,
    completion: Completion,
    out: Option<&Path>,
) -> Result<SupremalReport> {
    gridworld_alphabet().ensure_same(spec.alphabet())?;
    let spec = match completion {
        Completion::Safe => complete_safe_spec(spec)?,
        Completion::Unsafe => complete_unsafe_spec(spec)?,
        Completion::None => spec.clone(),
    };
    let plant = exp.plant()?;
    let result = supremal_controllable(&plant, &spec)?;
    let bound = 6;
    let (equal_to_spec, rechecked, written) = match &result {
        Supremal::Empty => (false, true, None),
        Supremal::Language(k) => {
            let equal = enumerate_within(&plant, k, bound) == enumerate_within(&plant, &spec, bound);
            let ok = check_controllability(&plant, k)?.is_controllable();
            let written = match out {
                Some(p) => {
                    fs::write(p, write_automaton(k)).map_err(|e| Error::io(p, e))?;
                    Some(p.to_path_buf())
                }
                None => None,
            };
            (equal, ok, written)
        }
    };
    Ok(SupremalReport { result, bound, equal_to_spec, rechecked, written })
}

#[derive(Clone, Debug, Default)]
pub struct TrainOptions {
    pub seed: Option<u64>,
    pub out_dir: PathBuf,
    /// Train even if the controllability check fails.
    pub force: bool,
}

#[derive(Clone, Debug)]
pub struct TrainReport {
    pub seed: u64,
    pub check: CheckReport,
    pub windows: Vec<MetricsWindow>,
    pub metrics_path: PathBuf,
    pub bank_path: PathBuf,
    pub final_epsilon: f64,
}

/// Trains, writing the metrics CSV and the final bank under
/// `opts.out_dir`. `on_window` sees each window as it closes.
pub fn run_train(
    exp: &Experiment,
    opts: &TrainOptions,
    on_window: &mut dyn FnMut(&MetricsWindow),
) -> Result<TrainReport> {
    let check = run_check(exp)?;
    if !check.is_controllable() && !opts.force {
        return Err(Error::Uncontrollable { counterexample: check.counterexample.clone().unwrap_or_default() });
    }
    let mut cfg = exp.config.learner;
    if let Some(seed) = opts.seed {
        cfg.seed = seed;
    }
    let mut trainer = Trainer::new(exp.task(), cfg)?;
    let mut metrics = MetricsAccumulator::new(exp.config.window);
    while !trainer.finished() {
        let rec = trainer.run_episode()?;
        if let Some(w) = metrics.push(&rec, trainer.epsilon()) {
            on_window(&w);
        }
    }
    let final_epsilon = trainer.epsilon();
    let windows = metrics.finish(final_epsilon);
    if let Some(w) = windows.last().filter(|w| w.partial) {
        on_window(w);
    }

    fs::create_dir_all(&opts.out_dir).map_err(|e| Error::io(&opts.out_dir, e))?;
    let metrics_path = opts.out_dir.join(&exp.config.metrics_output);
    fs::write(&metrics_path, windows_to_csv(&windows)).map_err(|e| Error::io(&metrics_path, e))?;
    let bank_path = opts.out_dir.join(BANK_FILE);
    let bank = trainer.into_bank();
    let file = fs::File::create(&bank_path).map_err(|e| Error::io(&bank_path, e))?;
    let mut w = io::BufWriter::new(file);
    bank.write_snapshot(&mut w).and_then(|_| w.flush()).map_err(|e| Error::io(&bank_path, e))?;
    Ok(TrainReport { seed: cfg.seed, check, windows, metrics_path, bank_path, final_epsilon })
}

/// Independent runs, one thread and one `seed-<S>` subdirectory per seed.
/// Results come back in seed order.
pub fn run_train_many(exp: &Experiment, seeds: &[u64], out_dir: &Path, force: bool) -> Vec<Result<TrainReport>> {
    thread::scope(|scope| {
        let handles: Vec<_> = seeds
            .iter()
            .map(|&seed| {
                let opts = TrainOptions { seed: Some(seed), out_dir: out_dir.join(format!("seed-{seed}")), force };
                scope.spawn(move || run_train(exp, &opts, &mut |_| {}))
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("training thread panicked")).collect()
    })
}

/// `seed,final_avg_score,final_completion_pct,final_epsilon` per run.
pub fn summary_csv(reports: &[TrainReport]) -> String {
    let mut out = String::from("seed,final_avg_score,final_completion_pct,final_epsilon\n");
    for r in reports {
        if let Some(w) = r.windows.last() {
            out.push_str(&format!("{},{},{},{}\n", r.seed, w.avg_score, w.completion_pct, r.final_epsilon));
        }
    }
    out
}

pub fn load_bank(path: &Path) -> Result<QBank<f64>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    QBank::from_snapshot(&text, &path.display().to_string())
}

/// Evaluates a saved bank with a fixed exploration rate.
pub fn run_eval(exp: &Experiment, bank_path: &Path, episodes: u64, epsilon: f64) -> Result<EvalSummary> {
    let bank = load_bank(bank_path)?;
    let task = exp.task();
    bank.ensure_compatible(task.dims(), exp.world.alphabet())?;
    let cfg = &exp.config.learner;
    evaluate(task, &bank, episodes, epsilon, cfg.max_steps, cfg.seed)
}
