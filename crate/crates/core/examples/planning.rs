//! Decomposes an instruction into a workflow graph with the rule planner
//! and validates it against the roster and map.

use stemos::orchestrator::{Engine, RunConfig};
use stemos::planner::{decompose, validate_graph, RuleSet};
use stemos::sim::lifelong_scenario;
use stemos::spatial::{Domain, Level};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let scenario = lifelong_scenario(Domain::Restaurant, Level::L2, 1, 7, &["wheeled", "humanoid", "wheeled"]);
    let mut engine = Engine::new(&scenario, RunConfig::default())?;
    engine.step()?;
    let ctx = engine.context(0);
    let rules = RuleSet::for_world(&scenario.world.resolve());

    println!("instruction: {}", ctx.instruction);
    let plan = decompose(&ctx, &rules)?;
    for line in &plan.trace {
        println!("  {line}");
    }
    for s in &plan.graph.subtasks {
        println!("depth {} {:?}: {}", s.depth, s.robots.iter().map(|r| r.0.as_str()).collect::<Vec<_>>(), s.description);
    }
    validate_graph(&plan.graph, &ctx.robots, &rules, &ctx.spatial).map_err(|v| format!("{v:?}"))?;
    println!("plan is valid");
    Ok(())
}
