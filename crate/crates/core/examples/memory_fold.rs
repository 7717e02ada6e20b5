//! Builds a small memory by folding events, then shows that a snapshot plus
//! the rest of the log gives the same state as replaying everything.

use std::collections::BTreeMap;

use nalgebra::Vector3;
use stemos::embodiment::{RegistryParams, RobotProfile};
use stemos::geo::RigidTransform;
use stemos::spatial::{CarrierAttrs, ObjectNode, PredicateParams, SpatialDelta, TreeEdit};
use stemos::stem::{reduce, restore, snapshot, Event, MemoryState, ToolCallRecord, ToolStatus};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let m0 = MemoryState::initial(PredicateParams::default(), RegistryParams::default());
    let mut memory = m0.clone();

    let mut events = vec![
        Event::new(1, 0).with_spatial(SpatialDelta::TreeEdit(TreeEdit::AddRegion {
            id: "kitchen".into(),
            name: "kitchen".into(),
            position: [0.0, 0.0],
            media: vec![],
        })),
        Event::new(2, 0).with_spatial(SpatialDelta::TreeEdit(TreeEdit::AddCarrier {
            id: "table".into(),
            region: "kitchen".into(),
            name: "table".into(),
            position: [1.0, 0.5],
            attrs: CarrierAttrs::default(),
        })),
        Event::new(3, 0).with_spatial(SpatialDelta::Add {
            carrier: "table".into(),
            node: ObjectNode::new("plate_1", "plate", [0.1, 0.1, 0.01], RigidTransform::from_translation(Vector3::new(0.0, 0.0, 0.01))),
        }),
        Event::new(4, 0).with_spatial(SpatialDelta::Add {
            carrier: "table".into(),
            node: ObjectNode::new("cup_1", "cup", [0.04, 0.04, 0.05], RigidTransform::from_translation(Vector3::new(0.15, 0.0, 0.05))),
        }),
    ];
    for e in &events {
        memory.apply_mut(e)?;
    }
    let robot = RobotProfile::new("r1", "wheeled", "kitchen".into(), [0.0, 0.0], &["navigate", "detect", "grasp"]);
    let register = memory.embodiment.register_robot(robot, &memory.spatial.tree)?;
    let args = BTreeMap::from([("robot".to_owned(), "r1".to_owned()), ("category".to_owned(), "cup".to_owned())]);
    events.push(Event::new(5, 1).with_embodiment(register));
    events.push(Event::new(6, 2).with_tool(ToolCallRecord::new("detect", args, ToolStatus::Ok, "detected cup_1 on table")));
    for e in &events[4..] {
        memory.apply_mut(e)?;
    }

    let table = memory.spatial.tree.graph(&"table".into())?;
    println!("table holds {} objects", table.len());
    for edge in &table.edges {
        println!("  {:?}({}, {})", edge.relation, edge.subject, edge.object);
    }

    let snap = snapshot(&reduce(&m0, &events[..3])?);
    let resumed = reduce(&restore(&snap)?, &events[3..])?;
    let full = reduce(&m0, &events)?;
    println!("version {}, snapshot + tail equals full replay: {}", full.version, snapshot(&resumed) == snapshot(&full));
    println!("live state equals replay: {}", snapshot(&memory) == snapshot(&full));
    Ok(())
}
