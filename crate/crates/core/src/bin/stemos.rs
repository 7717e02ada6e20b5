use std::error::Error;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use nalgebra::{Vector2, Vector3};
use serde::Deserialize;
use sha2::{Digest, Sha256};

use stemos::geo::{solve_map_alignment, solve_rigid_3d3d, MapProjection, RigidTransform};
use stemos::metrics::{classify_failures, compute_metrics, render_table, run_suite, CellResult, RunReport, Suite, SuiteConfig};
use stemos::orchestrator::{decode_trace, encode_trace, run_scenario, Ablation, MemoryConfig, RunConfig};
use stemos::sim::{lifelong_scenario, robustness_scenario, FaultMode, FaultPlan, Persistence, Scenario, Trigger};
use stemos::spatial::{Domain, Level, PredicateParams};
use stemos::stem::{encode_log, read_log, reduce, restore, snapshot, MemoryState};
use stemos::embodiment::RegistryParams;

#[derive(Parser)]
#[command(name = "stemos", about = "Run, evaluate and inspect multi-robot memory scenarios")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum OnOff {
    On,
    Off,
}

#[derive(Clone, Copy, ValueEnum)]
enum AblateArg {
    Spatial,
    Temporal,
    Embodiment,
}

#[derive(Clone, Copy, ValueEnum)]
enum FaultArg {
    None,
    E1,
    E2,
    E3,
}

#[derive(Clone, Copy, ValueEnum)]
enum LevelArg {
    L1,
    L2,
    L3,
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteArg {
    Lifelong,
    Scalability,
    Robustness,
    Ablation,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario file, or a generated one when no file is given.
    Run(RunArgs),
    /// Run an experiment suite; `config` is an optional JSON suite config.
    Suite {
        #[arg(value_enum)]
        name: SuiteArg,
        config: Option<PathBuf>,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Metrics over one or more trace files.
    Metrics { traces: Vec<PathBuf> },
    /// Solve an alignment problem from a correspondence file.
    Align { file: PathBuf },
    /// Fold an event log twice (directly and through a snapshot) and compare.
    Replay { log: PathBuf },
}

#[derive(Args)]
struct RunArgs {
    scenario: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, value_enum, default_value = "on")]
    memory: OnOff,
    #[arg(long, value_enum)]
    ablate: Option<AblateArg>,
    #[arg(long, value_enum)]
    fault: Option<FaultArg>,
    #[arg(long, default_value_t = 1)]
    sq: u32,
    #[arg(long, value_enum, default_value = "l1")]
    level: LevelArg,
    #[arg(long, default_value_t = 1)]
    trials: usize,
    /// Report path; traces and event logs are written next to it.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn fault_plan(mode: FaultMode, scenario: &Scenario) -> Option<FaultPlan> {
    let task = scenario.tasks.first().map(|t| t.task.id.clone());
    let (tool, persistence) = match mode {
        FaultMode::None => return None,
        FaultMode::E1 => (None, Persistence::Transient { ticks: 60 }),
        FaultMode::E2 => (Some("grasp".to_owned()), Persistence::Persistent),
        FaultMode::E3 => (None, Persistence::Persistent),
    };
    Some(FaultPlan { mode, trigger: Trigger::AfterDispatch { task, delay: 2 }, robot: None, tool, persistence })
}

fn cmd_run(args: RunArgs) -> Result<(), Box<dyn Error>> {
    let RunArgs { scenario: file, seed, memory, ablate, fault, sq, level, trials, out } = args;
    let mode = match fault {
        None | Some(FaultArg::None) => FaultMode::None,
        Some(FaultArg::E1) => FaultMode::E1,
        Some(FaultArg::E2) => FaultMode::E2,
        Some(FaultArg::E3) => FaultMode::E3,
    };
    let level = match level {
        LevelArg::L1 => Level::L1,
        LevelArg::L2 => Level::L2,
        LevelArg::L3 => Level::L3,
    };
    let mut config_mem = match memory {
        OnOff::On => MemoryConfig::full(),
        OnOff::Off => MemoryConfig::baseline(),
    };
    if let Some(a) = ablate {
        config_mem = MemoryConfig::without(match a {
            AblateArg::Spatial => Ablation::Spatial,
            AblateArg::Temporal => Ablation::Temporal,
            AblateArg::Embodiment => Ablation::Embodiment,
        });
    }
    let arm = match (memory, ablate) {
        (_, Some(_)) => "ablated",
        (OnOff::On, None) => "memory",
        (OnOff::Off, None) => "baseline",
    };
    let loaded: Option<Scenario> = match &file {
        Some(p) => Some(serde_json::from_str(&fs::read_to_string(p)?)?),
        None => None,
    };
    let team = ["wheeled", "humanoid"];
    let mut reports = Vec::new();
    let mut failures = std::collections::BTreeMap::new();
    for i in 0..trials {
        let s = seed + i as u64;
        let scenario = match &loaded {
            Some(sc) => {
                let mut sc = sc.clone();
                if fault.is_some() {
                    sc.fault = fault_plan(mode, &sc);
                }
                sc
            }
            None if mode != FaultMode::None => robustness_scenario(mode, s, &team),
            None => lifelong_scenario(Domain::Household, level, sq, s, &team),
        };
        let config = RunConfig { memory: config_mem, seed: s, ..RunConfig::default() };
        let outcome = run_scenario(&scenario, config)?;
        for (k, v) in classify_failures(&outcome.trace) {
            *failures.entry(k).or_insert(0usize) += v;
        }
        if let Some(path) = &out {
            fs::write(sibling(path, &format!("{i}.trace.jsonl")), encode_trace(&outcome.trace))?;
            fs::write(sibling(path, &format!("{i}.events.jsonl")), encode_log(&outcome.memory.temporal.records))?;
        }
        reports.push(RunReport::from_trace(&scenario.name, arm, s, &outcome.trace));
    }
    let metrics = compute_metrics(&reports)?;
    let cell = CellResult { cell: "run".into(), arm: arm.into(), metrics: Some(metrics), failures: failures.clone(), errors: 0 };
    print!("{}", render_table(std::slice::from_ref(&cell)));
    for (stage, n) in &failures {
        println!("failures {}: {n}", serde_json::to_string(stage)?.trim_matches('"'));
    }
    if let Some(path) = &out {
        let lines: Vec<String> = reports.iter().map(stemos::canonical::to_string).collect::<Result<_, _>>()?;
        fs::write(path, lines.join("\n") + "\n")?;
    }
    Ok(())
}

fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let mut name = path.file_name().map(|n| n.to_os_string()).unwrap_or_default();
    name.push(".");
    name.push(suffix);
    path.with_file_name(name)
}

fn cmd_suite(name: SuiteArg, config: Option<PathBuf>, trials: Option<usize>, seed: Option<u64>, out: Option<PathBuf>) -> Result<(), Box<dyn Error>> {
    let suite = match name {
        SuiteArg::Lifelong => Suite::Lifelong,
        SuiteArg::Scalability => Suite::Scalability,
        SuiteArg::Robustness => Suite::Robustness,
        SuiteArg::Ablation => Suite::Ablation,
    };
    let mut cfg = match config {
        Some(p) => serde_json::from_str(&fs::read_to_string(p)?)?,
        None => SuiteConfig::for_suite(suite),
    };
    cfg.suite = suite;
    if let Some(t) = trials {
        cfg.trials = t;
    }
    if let Some(s) = seed {
        cfg.seed = s;
    }
    let report = run_suite(&cfg);
    print!("{}", report.table());
    if let Some(path) = out {
        fs::write(path, stemos::canonical::to_string(&report)? + "\n")?;
    }
    Ok(())
}

fn cmd_metrics(traces: &[PathBuf]) -> Result<(), Box<dyn Error>> {
    let mut reports = Vec::new();
    let mut failures = std::collections::BTreeMap::new();
    for p in traces {
        let lines = decode_trace(&fs::read_to_string(p)?).map_err(|(line, e)| format!("{}:{line}: {e}", p.display()))?;
        for (k, v) in classify_failures(&lines) {
            *failures.entry(k).or_insert(0usize) += v;
        }
        reports.push(RunReport::from_trace(&p.display().to_string(), "trace", 0, &lines));
    }
    let metrics = compute_metrics(&reports)?;
    let cell = CellResult { cell: "traces".into(), arm: "-".into(), metrics: Some(metrics), failures: failures.clone(), errors: 0 };
    print!("{}", render_table(std::slice::from_ref(&cell)));
    for (stage, n) in &failures {
        println!("failures {}: {n}", serde_json::to_string(stage)?.trim_matches('"'));
    }
    Ok(())
}

#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum AlignInput {
    /// Matched 3D points `(source, target)`.
    Rigid { pairs: Vec<([f64; 3], [f64; 3])> },
    /// Reconstruction points against 2D map coordinates.
    Map {
        points: Vec<[f64; 3]>,
        targets: Vec<[f64; 2]>,
        #[serde(default)]
        projection: Option<MapProjection>,
    },
}

fn print_transform(t: &RigidTransform) {
    let r = t.rotation;
    for i in 0..3 {
        println!("[{:>12.8} {:>12.8} {:>12.8} | {:>12.8}]", r[(i, 0)], r[(i, 1)], r[(i, 2)], t.translation[i]);
    }
}

fn cmd_align(file: &Path) -> Result<(), Box<dyn Error>> {
    let input: AlignInput = serde_json::from_str(&fs::read_to_string(file)?)?;
    match input {
        AlignInput::Rigid { pairs } => {
            let pairs: Vec<_> = pairs.iter().map(|(p, q)| (Vector3::from(*p), Vector3::from(*q))).collect();
            let fit = solve_rigid_3d3d(&pairs)?;
            print_transform(&fit.transform);
            println!("rms {:.3e}", fit.rms);
        }
        AlignInput::Map { points, targets, projection } => {
            let points: Vec<_> = points.iter().map(|p| Vector3::from(*p)).collect();
            let targets: Vec<_> = targets.iter().map(|p| Vector2::from(*p)).collect();
            let a = solve_map_alignment(&points, &targets, &projection.unwrap_or_default(), &RigidTransform::identity())?;
            print_transform(&a.transform);
            println!("cost {:.3e} after {} iterations{}", a.cost, a.iterations, if a.z_unobservable { " (z unobservable)" } else { "" });
        }
    }
    Ok(())
}

fn cmd_replay(log: &Path) -> Result<(), Box<dyn Error>> {
    let events = read_log(log)?;
    let initial = MemoryState::initial(PredicateParams::default(), RegistryParams::default());
    let full = reduce(&initial, &events)?;
    let mid = events.len() / 2;
    let half = reduce(&initial, &events[..mid])?;
    let resumed = reduce(&restore(&snapshot(&half))?, &events[mid..])?;
    let (a, b) = (snapshot(&full), snapshot(&resumed));
    let hash = Sha256::digest(&a);
    let hex: String = hash.iter().map(|b| format!("{b:02x}")).collect();
    if a != b {
        return Err(format!("replay diverged after snapshot at event {mid}").into());
    }
    println!("ok: {} events, version {}, sha256 {hex}", events.len(), full.version);
    Ok(())
}

fn main() {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(args) => cmd_run(args),
        Command::Suite { name, config, trials, seed, out } => cmd_suite(name, config, trials, seed, out),
        Command::Metrics { traces } => cmd_metrics(&traces),
        Command::Align { file } => cmd_align(&file),
        Command::Replay { log } => cmd_replay(&log),
    };
    if let Err(e) = result {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
