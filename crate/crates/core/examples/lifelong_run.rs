//! Runs one lifelong task sequence with and without memory and prints the
//! trace of the final (restore) task.

use stemos::metrics::{compute_metrics, RunReport};
use stemos::orchestrator::{run_scenario, MemoryConfig, RunConfig, TraceLine};
use stemos::sim::lifelong_scenario;
use stemos::spatial::{Domain, Level};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let seed = 11;
    let scenario = lifelong_scenario(Domain::Household, Level::L2, 3, seed, &["wheeled", "humanoid"]);
    for task in &scenario.tasks {
        println!("{}: {}", task.task.id, task.task.instruction);
    }
    let last = scenario.tasks.last().ok_or("no tasks")?.task.id.clone();
    for (arm, memory) in [("memory", MemoryConfig::full()), ("baseline", MemoryConfig::baseline())] {
        let out = run_scenario(&scenario, RunConfig { memory, seed, ..RunConfig::default() })?;
        let m = compute_metrics(&[RunReport::from_trace(&scenario.name, arm, seed, &out.trace)])?;
        println!("\n{arm}: SR {:.0}%, MSR {:.0}%, AEST {:?}, {} events", m.sr, m.msr, m.aest, out.memory.version);
        for line in out.trace.iter().filter(|l| l.task() == Some(&last)) {
            match line {
                TraceLine::Tool { robot, tool, status, feedback, .. } => println!("  {robot} {tool} {status:?}: {feedback}"),
                TraceLine::TaskEnd { completed, cause, .. } => println!("  done: {completed} {}", cause.clone().unwrap_or_default()),
                _ => {}
            }
        }
    }
    Ok(())
}
