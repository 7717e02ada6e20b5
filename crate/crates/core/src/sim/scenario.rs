//! Scenario files and the generators behind the experiment suites.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::fault::{FaultMode, FaultPlan, Persistence, Trigger};
use super::world::RobotSpec;
use super::worldgen::{free_slot, generate_world, Footprint};
use crate::ids::{NodeId, RobotId, TaskId, Tick};
use crate::planner::{classify, GlobalTask, GoalAtom, Template};
use crate::spatial::{Domain, Level, WorldSpec};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "snake_case")]
pub enum WorldSource {
    Inline { spec: Box<WorldSpec> },
    Generated { domain: Domain, level: Level, seed: u64 },
}

impl WorldSource {
    pub fn resolve(&self) -> WorldSpec {
        match self {
            WorldSource::Inline { spec } => (**spec).clone(),
            WorldSource::Generated { domain, level, seed } => generate_world(*domain, *level, *seed),
        }
    }
}

/// A task as scripted in a scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskSpec {
    pub task: GlobalTask,
    /// Held back until every earlier task has ended.
    #[serde(default)]
    pub after_previous: bool,
    /// Position in the lifelong sequence, from 1.
    #[serde(default = "first")]
    pub sq_index: u32,
    #[serde(default = "yes")]
    pub is_final: bool,
}

fn first() -> u32 {
    1
}

fn yes() -> bool {
    true
}

/// Everything needed to run one trial.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub name: String,
    pub world: WorldSource,
    pub robots: Vec<RobotSpec>,
    pub tasks: Vec<TaskSpec>,
    #[serde(default)]
    pub fault: Option<FaultPlan>,
    /// Suite cell the trial belongs to, e.g. `household/L1/SQ3`.
    #[serde(default)]
    pub cell: String,
}

impl Scenario {
    pub fn fault_mode(&self) -> FaultMode {
        self.fault.as_ref().map_or(FaultMode::None, |f| f.mode)
    }
}

/// Robots of the given kinds, ids `r1..`, placed round-robin over regions.
pub fn spawn_team(world: &WorldSpec, kinds: &[&str]) -> Vec<RobotSpec> {
    kinds
        .iter()
        .enumerate()
        .map(|(i, kind)| RobotSpec {
            id: RobotId::new(format!("r{}", i + 1)),
            kind: (*kind).to_owned(),
            location: world.regions[i % world.regions.len()].id.clone(),
        })
        .collect()
}

/// Picks tasks against a world, keeping track of what earlier tasks used.
struct TaskMaker<'a> {
    world: &'a WorldSpec,
    rng: ChaCha8Rng,
    used: BTreeSet<String>,
    /// Where each category currently sits, as tasks are assumed to succeed.
    at: BTreeMap<String, Vec<NodeId>>,
    /// Footprints per carrier. Slots vacated by a move stay reserved so a
    /// later restore can fit.
    load: BTreeMap<NodeId, Vec<Footprint>>,
}

impl<'a> TaskMaker<'a> {
    fn new(world: &'a WorldSpec, seed: u64) -> Self {
        let mut at: BTreeMap<String, Vec<NodeId>> = BTreeMap::new();
        let mut load: BTreeMap<NodeId, Vec<Footprint>> = BTreeMap::new();
        for o in &world.objects {
            at.entry(o.category.clone()).or_default().push(o.carrier.clone());
            let t = o.pose.translation;
            load.entry(o.carrier.clone()).or_default().push(([t.x, t.y], o.half_extents));
        }
        Self { world, rng: ChaCha8Rng::seed_from_u64(seed ^ 0x7a5c), used: BTreeSet::new(), at, load }
    }

    /// Unused categories; single-instance ones if `unique`.
    fn categories(&self, unique: bool) -> Vec<String> {
        self.at
            .iter()
            .filter(|(c, places)| !self.used.contains(*c) && (!unique || places.len() == 1))
            .map(|(c, _)| c.clone())
            .collect()
    }

    fn pick_categories(&mut self, n: usize) -> Vec<String> {
        let mut pool = self.categories(true);
        if pool.len() < n {
            pool = self.categories(false);
        }
        pool.shuffle(&mut self.rng);
        pool.truncate(n);
        self.used.extend(pool.iter().cloned());
        pool
    }

    fn half_of(&self, category: &str) -> [f64; 3] {
        self.world.objects.iter().find(|o| o.category == category).map_or([0.1; 3], |o| o.half_extents)
    }

    /// Footprints the objects of `categories` would take on `carrier`, if
    /// they all fit.
    fn fit(&self, carrier: &NodeId, surface: [f64; 2], categories: &[String]) -> Option<Vec<Footprint>> {
        let mut taken = self.load.get(carrier).cloned().unwrap_or_default();
        let mut added = Vec::new();
        for c in categories {
            let half = self.half_of(c);
            let t = free_slot(surface, &half, &taken)?.translation;
            taken.push(([t.x, t.y], half));
            added.push(([t.x, t.y], half));
        }
        Some(added)
    }

    /// Open carrier holding none of `categories` with room for all of them.
    fn dest(&mut self, categories: &[String]) -> Option<NodeId> {
        let options: Vec<NodeId> = self
            .world
            .carriers
            .iter()
            .filter(|c| !c.enclosed)
            .filter(|c| categories.iter().all(|cat| !self.at.get(cat).is_some_and(|v| v.contains(&c.id))))
            .filter(|c| self.fit(&c.id, c.surface, categories).is_some())
            .map(|c| c.id.clone())
            .collect();
        options.choose(&mut self.rng).cloned()
    }

    fn moved(&mut self, categories: &[String], dest: &NodeId) {
        let surface = self.world.carriers.iter().find(|c| c.id == *dest).map_or([0.0; 2], |c| c.surface);
        if let Some(added) = self.fit(dest, surface, categories) {
            self.load.entry(dest.clone()).or_default().extend(added);
        }
        for c in categories {
            self.at.insert(c.clone(), vec![dest.clone()]);
        }
    }

    fn task(id: &str, instruction: String, arrival: Tick, goal: Vec<GoalAtom>) -> GlobalTask {
        let template = classify(&instruction).expect("generated instructions parse");
        GlobalTask { id: TaskId::new(id), instruction, template, arrival, goal }
    }

    /// "bring the X [and the Y ...] to the D".
    fn gather(&mut self, id: &str, n: usize, arrival: Tick) -> Option<GlobalTask> {
        let cats = self.pick_categories(n);
        if cats.len() < n {
            return None;
        }
        let dest = self.dest(&cats)?;
        let list: Vec<String> = cats.iter().map(|c| format!("the {}", c.replace('_', " "))).collect();
        let instruction = format!("bring {} to the {dest}", join(&list));
        let goal = cats.iter().map(|c| GoalAtom::CategoryAt { category: c.clone(), carrier: dest.clone() }).collect();
        self.moved(&cats, &dest);
        Some(Self::task(id, instruction, arrival, goal))
    }

    /// "move the X from the S to the D" with S where X really is.
    fn deliver(&mut self, id: &str, arrival: Tick) -> Option<GlobalTask> {
        let cat = self.pick_categories(1).pop()?;
        let source = self.at.get(&cat)?.first()?.clone();
        let dest = self.dest(std::slice::from_ref(&cat))?;
        let instruction = format!("move the {cat} from the {source} to the {dest}");
        let goal = vec![GoalAtom::CategoryAt { category: cat.clone(), carrier: dest.clone() }];
        self.moved(&[cat], &dest);
        Some(Self::task(id, instruction, arrival, goal))
    }

    fn restore(&mut self, id: &str, categories: &[String], arrival: Tick) -> GlobalTask {
        let list: Vec<String> = categories.iter().map(|c| format!("the {}", c.replace('_', " "))).collect();
        let tail = if categories.len() > 1 { "they were" } else { "it was" };
        let instruction = format!("put {} back where {tail}", join(&list));
        let goal = categories.iter().map(|c| GoalAtom::CategoryRestored { category: c.clone() }).collect();
        Self::task(id, instruction, arrival, goal)
    }
}

fn join(items: &[String]) -> String {
    match items {
        [] => String::new(),
        [one] => one.clone(),
        [init @ .., last] => format!("{} and {last}", init.join(", ")),
    }
}

fn domain_name(d: Domain) -> &'static str {
    match d {
        Domain::Household => "household",
        Domain::Restaurant => "restaurant",
        Domain::Supermarket => "supermarket",
    }
}

/// One lifelong sequence of `sq` tasks in a persistent world. Tasks before
/// the last fetch single objects to new places; for `sq >= 2` the last task
/// asks to put the first fetched objects back.
pub fn lifelong_scenario(domain: Domain, level: Level, sq: u32, seed: u64, team: &[&str]) -> Scenario {
    let world = generate_world(domain, level, seed);
    let mut maker = TaskMaker::new(&world, seed);
    let mut tasks = Vec::new();
    let mut fetched: Vec<String> = Vec::new();
    let fetches = if sq >= 2 { sq - 1 } else { 1 };
    for k in 1..=fetches {
        let id = format!("t{k}");
        let Some(t) = maker.gather(&id, 1, 0) else { break };
        if let Some(GoalAtom::CategoryAt { category, .. }) = t.goal.first() {
            fetched.push(category.clone());
        }
        tasks.push(TaskSpec { task: t, after_previous: k > 1, sq_index: k, is_final: sq == 1 });
    }
    if sq >= 2 {
        let back: Vec<String> = fetched.iter().take(2).cloned().collect();
        let t = maker.restore(&format!("t{sq}"), &back, 0);
        tasks.push(TaskSpec { task: t, after_previous: true, sq_index: sq, is_final: true });
    }
    Scenario {
        name: format!("lifelong-{}-{level:?}-sq{sq}-{seed}", domain_name(domain)),
        robots: spawn_team(&world, team),
        world: WorldSource::Generated { domain, level, seed },
        tasks,
        fault: None,
        cell: format!("{}/{level:?}/SQ{sq}", domain_name(domain)),
    }
}

/// A single household task of a random kind under fault `mode`.
pub fn robustness_scenario(mode: FaultMode, seed: u64, team: &[&str]) -> Scenario {
    let (domain, level) = (Domain::Household, Level::L1);
    let world = generate_world(domain, level, seed);
    let mut maker = TaskMaker::new(&world, seed);
    let kind = maker.rng.random_range(0..3);
    let task = match kind {
        0 => maker.gather("t1", 1, 0),
        1 => maker.deliver("t1", 0),
        _ => maker.gather("t1", 2, 0),
    }
    .or_else(|| maker.gather("t1", 1, 0))
    .expect("household worlds offer a fetch");
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xfa17);
    let fault = match mode {
        FaultMode::None => None,
        FaultMode::E1 => Some(FaultPlan {
            mode,
            trigger: Trigger::AfterDispatch { task: Some(task.id.clone()), delay: rng.random_range(1..=6) },
            robot: None,
            tool: None,
            persistence: Persistence::Transient { ticks: rng.random_range(20..=300) },
        }),
        FaultMode::E2 => Some(FaultPlan {
            mode,
            trigger: Trigger::AfterDispatch { task: Some(task.id.clone()), delay: rng.random_range(0..=6) },
            robot: None,
            tool: Some("grasp".into()),
            persistence: Persistence::Persistent,
        }),
        FaultMode::E3 => Some(FaultPlan {
            mode,
            trigger: Trigger::AfterDispatch { task: Some(task.id.clone()), delay: 0 },
            robot: None,
            tool: None,
            persistence: Persistence::Persistent,
        }),
    };
    let mode_name = serde_json::to_value(mode).ok().and_then(|v| v.as_str().map(str::to_owned)).unwrap_or_default();
    Scenario {
        name: format!("robustness-{mode_name}-{seed}"),
        robots: spawn_team(&world, team),
        world: WorldSource::Generated { domain, level, seed },
        tasks: vec![TaskSpec { task, after_previous: false, sq_index: 1, is_final: true }],
        fault,
        cell: format!("household/L1/{mode_name}"),
    }
}

/// Three gather tasks in a row on an L3 world with `n` wheeled robots.
pub fn scalability_scenario(domain: Domain, n: usize, seed: u64) -> Scenario {
    let level = Level::L3;
    let world = generate_world(domain, level, seed);
    let mut maker = TaskMaker::new(&world, seed);
    let mut tasks = Vec::new();
    for k in 1..=3u32 {
        let Some(t) = maker.gather(&format!("t{k}"), 3, 0) else { break };
        tasks.push(TaskSpec { task: t, after_previous: k > 1, sq_index: k, is_final: k == 3 });
    }
    let kinds = vec!["wheeled"; n];
    Scenario {
        name: format!("scalability-{}-x{n}-{seed}", domain_name(domain)),
        robots: spawn_team(&world, &kinds),
        world: WorldSource::Generated { domain, level, seed },
        tasks,
        fault: None,
        cell: format!("{}/L3/wheeled_x{n}", domain_name(domain)),
    }
}

/// Template of every task, for reports.
pub fn templates(s: &Scenario) -> Vec<Template> {
    s.tasks.iter().map(|t| t.task.template).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generated_tasks_parse_and_round_trip() {
        for seed in 0..20 {
            let s = lifelong_scenario(Domain::Household, Level::L2, 5, seed, &["wheeled", "humanoid"]);
            assert_eq!(s.tasks.len(), 5);
            assert_eq!(s.tasks.last().unwrap().task.template, Template::Restore);
            assert!(s.tasks.iter().filter(|t| t.is_final).count() == 1);
            let text = crate::canonical::to_string(&s).unwrap();
            let back: Scenario = serde_json::from_str(&text).unwrap();
            assert_eq!(back, s);
            for mode in [FaultMode::None, FaultMode::E1, FaultMode::E2, FaultMode::E3] {
                let r = robustness_scenario(mode, seed, &["wheeled", "humanoid"]);
                assert_eq!(r.fault_mode(), mode);
            }
            let sc = scalability_scenario(Domain::Household, 3, seed);
            assert_eq!(sc.robots.len(), 3);
            assert!(!sc.tasks.is_empty());
        }
    }
}
