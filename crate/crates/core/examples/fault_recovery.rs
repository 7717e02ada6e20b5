//! Injects each fault mode into the same task and compares how the memory
//! and baseline arms recover.

use stemos::orchestrator::{run_scenario, MemoryConfig, RunConfig, TraceLine};
use stemos::sim::{robustness_scenario, FaultMode};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let seed = 3;
    for mode in [FaultMode::E1, FaultMode::E2, FaultMode::E3] {
        let scenario = robustness_scenario(mode, seed, &["wheeled", "humanoid"]);
        println!("{mode:?}: {}", scenario.tasks[0].task.instruction);
        for (arm, memory) in [("memory", MemoryConfig::full()), ("baseline", MemoryConfig::baseline())] {
            let out = run_scenario(&scenario, RunConfig { memory, seed, ..RunConfig::default() })?;
            let recoveries: Vec<String> = out
                .trace
                .iter()
                .filter_map(|l| match l {
                    TraceLine::Recovery { action, cause, .. } => Some(format!("{action} after {cause}")),
                    _ => None,
                })
                .collect();
            let end = out.trace.iter().find_map(|l| match l {
                TraceLine::TaskEnd { completed, cause, steps, .. } => Some((*completed, cause.clone(), *steps)),
                _ => None,
            });
            println!("  {arm:<8} {end:?} recoveries {recoveries:?}");
        }
    }
    Ok(())
}
