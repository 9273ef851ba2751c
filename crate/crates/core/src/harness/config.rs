use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::environment::{DropRule, DuGate, EnvConfig, Heading, PlantModel};
use crate::learner::LearnerConfig;
use crate::{Error, Result};

/// Where an input file comes from: the copy compiled into the crate or a
/// path on disk.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Source {
    Bundled,
    File(PathBuf),
}

#[derive(Clone, Debug, PartialEq)]
pub struct CheckConfig {
    pub plant: PlantModel,
    pub state_cap: usize,
    /// Check with every label controllable.
    pub treat_all_controllable: bool,
}

impl Default for CheckConfig {
    fn default() -> Self {
        CheckConfig { plant: PlantModel::Abstract, state_cap: 1_000_000, treat_all_controllable: false }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub map: Source,
    pub env: EnvConfig,
    pub learner: LearnerConfig<f64>,
    pub window: u64,
    /// Metrics CSV, relative to the output directory.
    pub metrics_output: PathBuf,
    pub safe_spec: Source,
    pub unsafe_spec: Source,
    pub reward_machine: Source,
    pub check: CheckConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            map: Source::Bundled,
            env: EnvConfig::default(),
            learner: LearnerConfig::default(),
            window: 10_000,
            metrics_output: PathBuf::from("metrics.csv"),
            safe_spec: Source::Bundled,
            unsafe_spec: Source::Bundled,
            reward_machine: Source::Bundled,
            check: CheckConfig::default(),
        }
    }
}

fn value<T: FromStr>(key: &str, raw: &str) -> Result<T> {
    raw.parse().map_err(|_| Error::Config(format!("{key}: cannot parse `{raw}`")))
}

impl ExperimentConfig {
    /// Parses flat `section.key = value` lines. Unset keys keep their
    /// defaults; relative paths resolve against `base`.
    pub fn parse(text: &str, origin: &str, base: &Path) -> Result<Self> {
        let mut cfg = ExperimentConfig::default();
        let mut seen = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, val) =
                line.split_once('=').ok_or_else(|| Error::parse(origin, i + 1, "expected `key = value`"))?;
            let (key, val) = (key.trim(), val.trim());
            if seen.insert(key.to_string(), i + 1).is_some() {
                return Err(Error::parse(origin, i + 1, format!("`{key}` set twice")));
            }
            cfg.set(key, val, base).map_err(|e| Error::parse(origin, i + 1, e.to_string()))?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let base = path.parent().unwrap_or(Path::new("."));
        let cfg = Self::parse(&text, &path.display().to_string(), base)?;
        for (key, src) in [
            ("env.map", &cfg.map),
            ("spec.safe", &cfg.safe_spec),
            ("spec.unsafe", &cfg.unsafe_spec),
            ("spec.reward_machine", &cfg.reward_machine),
        ] {
            if let Source::File(p) = src {
                if !p.is_file() {
                    return Err(Error::Config(format!("{key}: {} does not exist", p.display())));
                }
            }
        }
        Ok(cfg)
    }

    fn set(&mut self, key: &str, val: &str, base: &Path) -> Result<()> {
        let file = || -> Result<Source> {
            if val.is_empty() {
                return Err(Error::Config(format!("{key}: empty path")));
            }
            Ok(Source::File(base.join(val)))
        };
        let l = &mut self.learner;
        match key {
            "env.map" => self.map = file()?,
            "env.p_u" => self.env.p_u = value(key, val)?,
            "env.du_gate" => self.env.du_gate = DuGate::from_str(val)?,
            "env.drops" => self.env.drops = DropRule::from_str(val)?,
            "env.initial_heading" => self.env.initial_heading = Heading::from_str(val)?,
            "learner.alpha" => l.alpha = value(key, val)?,
            "learner.epsilon" => l.epsilon = value(key, val)?,
            "learner.gamma" => l.gamma = value(key, val)?,
            "learner.epsilon_decay" => l.epsilon_decay = value(key, val)?,
            "learner.decay_period" => l.decay_period = value(key, val)?,
            "learner.num_episodes" => l.num_episodes = value(key, val)?,
            "learner.max_steps" => l.max_steps = value(key, val)?,
            "learner.q_init" => l.q_init = value(key, val)?,
            "learner.seed" => l.seed = value(key, val)?,
            "metrics.window" => self.window = value(key, val)?,
            "metrics.output" => self.metrics_output = PathBuf::from(val),
            "spec.safe" => self.safe_spec = file()?,
            "spec.unsafe" => self.unsafe_spec = file()?,
            "spec.reward_machine" => self.reward_machine = file()?,
            "check.plant" => self.check.plant = PlantModel::from_str(val)?,
            "check.state_cap" => self.check.state_cap = value::<f64>(key, val)? as usize,
            "check.treat_all_controllable" => self.check.treat_all_controllable = value(key, val)?,
            _ => return Err(Error::Config(format!("unknown key `{key}`"))),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        let wrap = |e: Error| Error::Config(e.to_string());
        self.learner.validate().map_err(wrap)?;
        if !(0.0..=1.0).contains(&self.env.p_u) {
            return Err(Error::Config(format!("env.p_u: {} is not a probability", self.env.p_u)));
        }
        if self.window == 0 {
            return Err(Error::Config("metrics.window must be positive".into()));
        }
        if self.check.state_cap == 0 {
            return Err(Error::Config("check.state_cap must be positive".into()));
        }
        Ok(())
    }
}
