use std::collections::{BTreeMap, BTreeSet};
use std::sync::OnceLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

use super::types::{Intent, PlanResult, PlannerContext, Subtask, Template, WorkflowGraph};
use super::validate::validate_graph;
use super::PlanError;
use crate::embodiment::Availability;
use crate::ids::{NodeId, ObjectId, RobotId};
use crate::spatial::{SceneTree, WorldSpec};
use crate::stem::RobotSummary;

/// Static domain knowledge available to the planner regardless of memory:
/// the map layout (no contents), storage conventions, recipes and stations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RuleSet {
    pub map: SceneTree,
    pub recipes: BTreeMap<String, Vec<String>>,
    pub stations: BTreeMap<String, NodeId>,
    pub categories: BTreeSet<String>,
    /// Category → carriers that conventionally store it, best first.
    pub priors: BTreeMap<String, Vec<NodeId>>,
}

pub const PRODUCT: &str = "burger";

impl RuleSet {
    pub fn for_world(world: &WorldSpec) -> Self {
        let mut map = SceneTree::new("root");
        for r in &world.regions {
            map.add_region(r.id.clone(), r.name.clone(), r.position, r.media.clone()).expect("world regions are unique");
        }
        for c in &world.carriers {
            map.add_carrier(c.id.clone(), &c.region, c.name.clone(), c.position, world.carrier_attrs(c))
                .expect("world carriers are valid");
        }
        let mut categories: BTreeSet<String> = world.priors.keys().cloned().collect();
        for inputs in world.recipes.values() {
            categories.extend(inputs.iter().cloned());
        }
        if !world.recipes.is_empty() {
            categories.insert(PRODUCT.to_owned());
        }
        Self { map, recipes: world.recipes.clone(), stations: world.stations.clone(), categories, priors: world.priors.clone() }
    }

    /// Conventional home of a category.
    pub fn home(&self, category: &str) -> Option<&NodeId> {
        self.priors.get(category).and_then(|v| v.first())
    }

    pub fn station(&self, name: &str) -> Option<&NodeId> {
        self.stations.get(name)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Parsed {
    Fetch { items: Vec<String>, dest: Option<String> },
    Deliver { item: String, source: String, dest: String },
    Burger { variant: String, dest: Option<String> },
    Package { item: String, container: String },
    Restore { items: Vec<String> },
}

fn re(cell: &'static OnceLock<Regex>, pattern: &str) -> &'static Regex {
    cell.get_or_init(|| Regex::new(pattern).expect("static pattern"))
}

fn split_items(list: &str) -> Vec<String> {
    static SEP: OnceLock<Regex> = OnceLock::new();
    static ARTICLE: OnceLock<Regex> = OnceLock::new();
    let sep = re(&SEP, r"\s*,\s*(?:and\s+)?|\s+and\s+");
    let article = re(&ARTICLE, r"^(?:the|an|a|some)\s+");
    sep.split(list.trim())
        .map(|s| article.replace(s.trim(), "").trim().replace(' ', "_"))
        .filter(|s| !s.is_empty())
        .collect()
}

pub(crate) fn parse_instruction(text: &str) -> Option<Parsed> {
    static RESTORE: OnceLock<Regex> = OnceLock::new();
    static BURGER: OnceLock<Regex> = OnceLock::new();
    static PACKAGE: OnceLock<Regex> = OnceLock::new();
    static DELIVER: OnceLock<Regex> = OnceLock::new();
    static FETCH: OnceLock<Regex> = OnceLock::new();
    let t = text.trim().trim_end_matches('.').to_lowercase();
    if let Some(c) = re(&RESTORE, r"^put (.+) back where (?:they were|it was)$").captures(&t) {
        return Some(Parsed::Restore { items: split_items(&c[1]) });
    }
    if let Some(c) = re(&BURGER, r"^(?:order|prepare|make) an? (\w+) burger(?: and (?:serve|deliver) it to (?:the )?(\w+))?$").captures(&t) {
        return Some(Parsed::Burger { variant: c[1].to_owned(), dest: c.get(2).map(|m| m.as_str().to_owned()) });
    }
    if let Some(c) = re(&PACKAGE, r"^(?:package|pack) (?:the |an? )?(\w+) (?:in|into) (?:the |an? )?(\w+)$").captures(&t) {
        return Some(Parsed::Package { item: c[1].to_owned(), container: c[2].to_owned() });
    }
    if let Some(c) = re(&DELIVER, r"^move (?:the |an? )?(\w+) from (?:the )?(\w+) to (?:the )?(\w+)$").captures(&t) {
        return Some(Parsed::Deliver { item: c[1].to_owned(), source: c[2].to_owned(), dest: c[3].to_owned() });
    }
    if let Some(c) = re(&FETCH, r"^(?:bring|fetch|get) (.+?)(?: to (?:the )?(\w+))?$").captures(&t) {
        let items = split_items(&c[1]);
        if !items.is_empty() {
            return Some(Parsed::Fetch { items, dest: c.get(2).map(|m| m.as_str().to_owned()) });
        }
    }
    None
}

/// Template an instruction falls under, if any.
pub fn classify(text: &str) -> Option<Template> {
    Some(match parse_instruction(text)? {
        Parsed::Fetch { items, .. } if items.len() > 1 => Template::Gather,
        Parsed::Fetch { .. } => Template::Fetch,
        Parsed::Deliver { .. } => Template::Deliver,
        Parsed::Burger { .. } => Template::PrepareAndServe,
        Parsed::Package { .. } => Template::Package,
        Parsed::Restore { .. } => Template::Restore,
    })
}

fn dist(a: &[f64; 2], b: &[f64; 2]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt()
}

/// Robots with all of `tools`, IDLE ones first, each group ordered by tree
/// hops to `near`, then map distance, then id. OFFLINE robots are skipped.
pub fn rank_robots(robots: &[RobotSummary], tools: &[&str], near: &NodeId, map: &SceneTree) -> Vec<RobotId> {
    let target = map.get(near).map(|n| n.position);
    let mut keyed: Vec<_> = robots
        .iter()
        .filter(|r| r.availability != Availability::Offline)
        .filter(|r| tools.iter().all(|t| r.capabilities.iter().any(|c| c == t)))
        .map(|r| {
            let busy = r.availability != Availability::Idle;
            let hops = map.hops(&r.location, near).unwrap_or(usize::MAX);
            let d = target.map_or(f64::INFINITY, |t| dist(&r.position, &t));
            (busy, hops, d, &r.id)
        })
        .collect();
    keyed.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.total_cmp(&b.2)).then(a.3.cmp(b.3)));
    keyed.into_iter().map(|k| k.3.clone()).collect()
}

struct Builder<'a> {
    ctx: &'a PlannerContext,
    rules: &'a RuleSet,
    trace: Vec<String>,
    subtasks: Vec<Subtask>,
    load: BTreeMap<RobotId, usize>,
    /// `(robot, capability)` pairs that feedback reports as broken.
    broken: BTreeSet<(RobotId, String)>,
}

/// Reads `TOOL_BROKEN: <cap> on <robot> ...` feedback lines.
fn broken_tools(ctx: &PlannerContext) -> BTreeSet<(RobotId, String)> {
    ctx.temporal
        .iter()
        .filter_map(|f| {
            let rest = f.feedback.strip_prefix("TOOL_BROKEN: ")?;
            let (cap, tail) = rest.split_once(" on ")?;
            let robot = tail.split_whitespace().next()?;
            Some((RobotId::from(robot), cap.to_owned()))
        })
        .collect()
}

impl<'a> Builder<'a> {
    fn location(&self, name: &str) -> NodeId {
        NodeId::from(name)
    }

    /// Carrier the spatial summary places an object of `category` on.
    fn known_location(&self, category: &str, object: Option<&ObjectId>) -> Option<NodeId> {
        self.ctx.spatial.iter().find_map(|c| {
            c.objects
                .iter()
                .any(|o| match object {
                    Some(id) => &o.id == id,
                    None => o.category == category,
                })
                .then(|| c.id.clone())
        })
    }

    /// Picks the best-ranked robot, preferring ones not yet loaded in this plan.
    fn assign(&mut self, tools: &[&str], near: &NodeId, exclude: &[RobotId], what: &str) -> Result<RobotId, PlanError> {
        let mut ranked = rank_robots(&self.ctx.robots, tools, near, &self.rules.map);
        ranked.retain(|r| !tools.iter().any(|t| self.broken.contains(&(r.clone(), (*t).to_owned()))));
        let pool: Vec<&RobotId> = ranked.iter().filter(|r| !exclude.contains(r)).collect();
        let pool = if pool.is_empty() { ranked.iter().collect() } else { pool };
        let pick = pool
            .iter()
            .min_by_key(|r| self.load.get(**r).copied().unwrap_or(0))
            .map(|r| (*r).clone())
            .ok_or_else(|| PlanError::NoCapableRobot { tools: tools.join("+"), subtask: what.to_owned() })?;
        *self.load.entry(pick.clone()).or_default() += 1;
        self.trace.push(format!("assign {what} -> {pick} (nearest capable to {near})"));
        Ok(pick)
    }

    fn fetch(&mut self, category: &str, object: Option<ObjectId>, source: Option<NodeId>, dest: NodeId, depth: u32) -> Result<(), PlanError> {
        let known = self.known_location(category, object.as_ref());
        let near = known
            .clone()
            .or_else(|| source.clone())
            .or_else(|| self.rules.home(category).cloned())
            .unwrap_or_else(|| dest.clone());
        let intent = Intent::Fetch { category: category.to_owned(), object: object.clone(), source, dest: dest.clone() };
        let what = match &object {
            Some(id) => format!("fetch {id} to {dest}"),
            None => format!("fetch {category} to {dest}"),
        };
        if let Some(at) = &known {
            self.trace.push(format!("memory places {category} on {at}"));
        }
        let robot = self.assign(&intent.all_required(), &near, &[], &what)?;
        self.subtasks.push(Subtask { description: what, depth, robots: vec![robot], intent });
        Ok(())
    }

    fn collab(&mut self, intent: Intent, near: &NodeId, depth: u32, what: String) -> Result<(), PlanError> {
        let first = self.assign(&intent.required(0, 2), near, &[], &format!("{what} (role 0)"))?;
        let second = self.assign(&intent.required(1, 2), near, std::slice::from_ref(&first), &format!("{what} (role 1)"))?;
        let robots = if first == second { vec![first] } else { vec![first, second] };
        self.subtasks.push(Subtask { description: what, depth, robots, intent });
        Ok(())
    }
}

/// Rule-based decomposition of `ctx.instruction` into a validated workflow graph.
pub fn decompose(ctx: &PlannerContext, rules: &RuleSet) -> Result<PlanResult, PlanError> {
    let parsed = parse_instruction(&ctx.instruction).ok_or_else(|| PlanError::UnknownTemplate(ctx.instruction.clone()))?;
    let mut b = Builder { ctx, rules, trace: Vec::new(), subtasks: Vec::new(), load: BTreeMap::new(), broken: broken_tools(ctx) };
    let service = || rules.station("service").cloned().ok_or_else(|| PlanError::UnknownTemplate("no service point".into()));
    match parsed {
        Parsed::Fetch { items, dest } => {
            let dest = match dest {
                Some(d) => b.location(&d),
                None => service()?,
            };
            b.trace.push(format!("template {:?}: {} item(s) to {dest}", if items.len() > 1 { Template::Gather } else { Template::Fetch }, items.len()));
            for item in &items {
                b.fetch(item, None, None, dest.clone(), 1)?;
            }
        }
        Parsed::Deliver { item, source, dest } => {
            b.trace.push(format!("template Deliver: {item} from {source} to {dest}"));
            let (s, d) = (b.location(&source), b.location(&dest));
            b.fetch(&item, None, Some(s), d, 1)?;
        }
        Parsed::Burger { variant, dest } => {
            let inputs = rules.recipes.get(&variant).cloned().ok_or_else(|| PlanError::UnknownTemplate(format!("no recipe {variant}")))?;
            let station = rules.station("prep").cloned().ok_or_else(|| PlanError::UnknownTemplate("no prep station".into()))?;
            let dest = match dest {
                Some(d) => b.location(&d),
                None => service()?,
            };
            b.trace.push(format!("template PrepareAndServe: {variant} burger = {inputs:?}, prepare at {station}, serve at {dest}"));
            b.trace.push("layer 1 gathers ingredients in parallel; layer 2 assembles and serves".into());
            for item in &inputs {
                b.fetch(item, None, None, station.clone(), 1)?;
            }
            let intent = Intent::Assemble { inputs: inputs.clone(), product: PRODUCT.into(), station: station.clone(), dest: dest.clone() };
            b.collab(intent, &station, 2, format!("assemble {variant} burger at {station} and serve at {dest}"))?;
        }
        Parsed::Package { item, container } => {
            let station = rules.station("packing").cloned().ok_or_else(|| PlanError::UnknownTemplate("no packing station".into()))?;
            b.trace.push(format!("template Package: {item} into {container} at {station}"));
            b.fetch(&item, None, None, station.clone(), 1)?;
            b.fetch(&container, None, None, station.clone(), 1)?;
            let intent = Intent::Pack { item: item.clone(), container: container.clone(), station: station.clone() };
            b.collab(intent, &station, 2, format!("put {item} into {container} at {station}"))?;
        }
        Parsed::Restore { items } => {
            b.trace.push(format!("template Restore: {items:?}"));
            for item in &items {
                let remembered = ctx.moves.iter().find(|m| &m.category == item);
                match remembered {
                    Some(m) => {
                        b.trace.push(format!("history: {} left {}", m.object, m.origin));
                        b.fetch(item, Some(m.object.clone()), m.current.clone(), m.origin.clone(), 1)?;
                    }
                    None if ctx.history => b.trace.push(format!("{item} has not moved")),
                    None => match rules.home(item).cloned() {
                        Some(home) => {
                            b.trace.push(format!("no history for {item}; using storage convention {home}"));
                            b.fetch(item, None, None, home, 1)?;
                        }
                        None => return Err(PlanError::UnknownTemplate(format!("no home for {item}"))),
                    },
                }
            }
        }
    }
    let graph = WorkflowGraph { task: ctx.task.clone(), subtasks: b.subtasks };
    validate_graph(&graph, &ctx.robots, rules, &ctx.spatial).map_err(PlanError::Hallucination)?;
    Ok(PlanResult { trace: b.trace, graph })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_templates() {
        assert_eq!(classify("bring the apple to the coffee_table"), Some(Template::Fetch));
        assert_eq!(classify("Fetch an orange and a knife."), Some(Template::Gather));
        assert_eq!(classify("bring the apple, the cup and the book to the desk"), Some(Template::Gather));
        assert_eq!(classify("move the cup from the sink to the cabinet"), Some(Template::Deliver));
        assert_eq!(classify("order a normal burger"), Some(Template::PrepareAndServe));
        assert_eq!(classify("package the gift into the bag"), Some(Template::Package));
        assert_eq!(classify("put the apple and the cup back where they were"), Some(Template::Restore));
        assert_eq!(classify("dance"), None);
        assert_eq!(
            parse_instruction("fetch an orange and a knife"),
            Some(Parsed::Fetch { items: vec!["orange".into(), "knife".into()], dest: None })
        );
    }
}
