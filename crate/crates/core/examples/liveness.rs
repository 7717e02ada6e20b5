//! Heartbeats keep robots available; a robot that goes quiet is swept
//! offline and drops out of capability lookup.

use stemos::embodiment::{Availability, EmbodimentRegistry, HeartbeatStatus, RegistryParams, Resources, RobotProfile};
use stemos::spatial::{CarrierAttrs, SceneTree};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut tree = SceneTree::new("root");
    tree.add_region("kitchen".into(), "kitchen".into(), [0.0, 0.0], vec![])?;
    tree.add_region("hall".into(), "hall".into(), [6.0, 0.0], vec![])?;
    tree.add_carrier("counter".into(), &"kitchen".into(), "counter".into(), [1.0, 0.0], CarrierAttrs::default())?;

    let mut registry = EmbodimentRegistry::new(RegistryParams::default());
    for (id, at) in [("r1", "kitchen"), ("r2", "hall")] {
        let d = registry.register_robot(RobotProfile::new(id, "wheeled", at.into(), [0.0, 0.0], &["navigate", "grasp"]), &tree)?;
        registry.apply(&d, &tree)?;
    }
    println!("grasp near counter: {:?}", registry.find_capable("grasp", &"counter".into(), &tree));

    // Only r2 keeps reporting.
    for tick in (5..=30).step_by(5) {
        let beat = HeartbeatStatus { robot: "r2".into(), tick, resources: Resources::default(), sensors: Default::default(), claim: Availability::Idle };
        let d = registry.heartbeat(&beat)?;
        registry.apply(&d, &tree)?;
        for d in registry.sweep_offline(tick) {
            println!("tick {tick}: {} goes offline", d.robot);
            registry.apply(&d, &tree)?;
        }
    }
    println!("grasp near counter: {:?}", registry.find_capable("grasp", &"counter".into(), &tree));
    Ok(())
}
