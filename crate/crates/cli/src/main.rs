use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use shieldq::automata::{parse_automaton, Supremal};
use shieldq::environment::render_map;
use shieldq::harness::{
    run_check, run_eval, run_supremal, run_train, run_train_many, summary_csv, Completion, Experiment, TrainOptions,
};
use shieldq::Error;

#[derive(Parser)]
#[command(name = "shieldq", version, about = "Supervised Q-learning under automaton constraints")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train and write the metrics CSV and the final Q bank.
    Train {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        /// Output directory (default: current directory).
        #[arg(long, default_value = ".")]
        out: PathBuf,
        /// Train even if the controllability check fails.
        #[arg(long)]
        force: bool,
        /// Independent concurrent runs with seeds S, S+1, ...
        #[arg(long, default_value_t = 1)]
        runs: u64,
    },
    /// Evaluate a saved bank without updating it.
    Eval {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        bank: PathBuf,
        #[arg(long, default_value_t = 1000)]
        episodes: u64,
        #[arg(long, default_value_t = 0.0)]
        epsilon: f64,
    },
    /// Check the configured plant and specs for controllability.
    Check {
        #[arg(long)]
        config: PathBuf,
    },
    /// Synthesise the supremal controllable sublanguage of a spec.
    Supremal {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = CompletionArg::Safe)]
        completion: CompletionArg,
    },
    /// Print the map and its wall set.
    MapDump {
        #[arg(long)]
        config: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum CompletionArg {
    Safe,
    Unsafe,
    None,
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Uncontrollable { .. } | Error::ControllabilityViolation { .. } => 2,
        Error::ResourceCap { .. } => 4,
        Error::Config(_)
        | Error::Parse { .. }
        | Error::Io { .. }
        | Error::Validation { .. }
        | Error::Domain { .. }
        | Error::AlphabetMismatch(_)
        | Error::Incompatible(_) => 3,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn run(cmd: Command) -> shieldq::Result<u8> {
    match cmd {
        Command::Train { config, seed, out, force, runs } => {
            let exp = Experiment::load(&config)?;
            if runs > 1 {
                return train_many(&exp, seed.unwrap_or(exp.config.learner.seed), runs, &out, force);
            }
            let opts = TrainOptions { seed, out_dir: out, force };
            let report = run_train(&exp, &opts, &mut |w| {
                println!(
                    "episodes {:>8}  avg_score {:>9.3}  completion {:>6.2}%  epsilon {:.6}",
                    w.window_start + w.episodes,
                    w.avg_score,
                    w.completion_pct,
                    w.epsilon
                );
            })?;
            if let Some(w) = report.windows.last().filter(|w| w.partial) {
                println!("last window is partial ({} episodes)", w.episodes);
            }
            println!("metrics: {}", report.metrics_path.display());
            println!("bank: {}", report.bank_path.display());
            Ok(0)
        }
        Command::Eval { config, bank, episodes, epsilon } => {
            let exp = Experiment::load(&config)?;
            let summary = run_eval(&exp, &bank, episodes, epsilon)?;
            println!("{}", serde_json::to_string_pretty(&summary).expect("plain struct"));
            Ok(0)
        }
        Command::Check { config } => {
            let exp = Experiment::load(&config)?;
            let report = run_check(&exp)?;
            println!("plant states: {}", report.plant_states);
            match &report.counterexample {
                None => {
                    println!("controllable");
                    Ok(0)
                }
                Some(w) => {
                    println!("uncontrollable");
                    println!("counterexample: {w}");
                    if report.replayed == Some(false) {
                        println!("note: counterexample does not replay on the environment");
                    }
                    Ok(2)
                }
            }
        }
        Command::Supremal { config, spec, out, completion } => {
            let exp = Experiment::load(&config)?;
            let text = std::fs::read_to_string(&spec).map_err(|e| Error::Io { path: spec.clone(), source: e })?;
            let aut = parse_automaton(&text, &spec.display().to_string())?;
            let completion = match completion {
                CompletionArg::Safe => Completion::Safe,
                CompletionArg::Unsafe => Completion::Unsafe,
                CompletionArg::None => Completion::None,
            };
            let report = run_supremal(&exp, &aut, completion, Some(&out))?;
            match &report.result {
                Supremal::Empty => {
                    println!("supremal controllable sublanguage is empty; nothing written");
                    Ok(2)
                }
                Supremal::Language(k) => {
                    println!("states: {}", k.num_states());
                    println!(
                        "language up to length {}: {}",
                        report.bound,
                        if report.equal_to_spec { "equal to the spec" } else { "strictly smaller than the spec" }
                    );
                    println!("controllable: {}", report.rechecked);
                    println!("written: {}", out.display());
                    Ok(0)
                }
            }
        }
        Command::MapDump { config } => {
            let exp = Experiment::load(&config)?;
            print!("{}", render_map(exp.world.map()));
            Ok(0)
        }
    }
}

fn train_many(exp: &Experiment, first: u64, runs: u64, out: &Path, force: bool) -> shieldq::Result<u8> {
    let seeds: Vec<u64> = (0..runs).map(|i| first.wrapping_add(i)).collect();
    let mut ok = Vec::new();
    let mut failure = None;
    for (seed, res) in seeds.iter().zip(run_train_many(exp, &seeds, out, force)) {
        match res {
            Ok(r) => ok.push(r),
            Err(e) => {
                eprintln!("seed {seed}: {e}");
                failure.get_or_insert(e);
            }
        }
    }
    let summary = summary_csv(&ok);
    print!("{summary}");
    std::fs::create_dir_all(out).map_err(|e| Error::Io { path: out.to_path_buf(), source: e })?;
    let path = out.join("summary.csv");
    std::fs::write(&path, summary).map_err(|e| Error::Io { path, source: e })?;
    match failure {
        Some(e) => Err(e),
        None => Ok(0),
    }
}
