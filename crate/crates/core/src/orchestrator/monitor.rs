use crate::embodiment::EmbodimentDelta;
use crate::ids::{NodeId, TaskId, Tick};
use crate::spatial::{ObjectNode, SpatialDelta};
use crate::stem::{Event, MemoryState, StemError, ToolCallRecord};

/// Deltas that bring memory's view of `carrier` in line with what a robot
/// just saw there. Removals come first so re-added objects never collide.
pub fn reconcile(memory: &MemoryState, carrier: &NodeId, observed: &[ObjectNode]) -> Vec<SpatialDelta> {
    let tree = &memory.spatial.tree;
    let Ok(graph) = tree.graph(carrier) else { return Vec::new() };
    let mut removes = Vec::new();
    let mut rest = Vec::new();
    for id in graph.nodes.keys() {
        if !observed.iter().any(|o| &o.id == id) {
            removes.push(SpatialDelta::Remove { carrier: carrier.clone(), object: id.clone() });
        }
    }
    for o in observed {
        match graph.get(&o.id) {
            Some(m) => {
                if m.pose != o.pose {
                    rest.push(SpatialDelta::Move {
                        carrier: carrier.clone(),
                        object: o.id.clone(),
                        delta: o.pose.compose(&m.pose.inverse()),
                    });
                }
                for (k, v) in &o.state {
                    if m.state.get(k) != Some(v) {
                        rest.push(SpatialDelta::SetState {
                            carrier: carrier.clone(),
                            object: o.id.clone(),
                            key: k.clone(),
                            value: Some(v.clone()),
                        });
                    }
                }
                for k in m.state.keys().filter(|k| !o.state.contains_key(*k)) {
                    rest.push(SpatialDelta::SetState { carrier: carrier.clone(), object: o.id.clone(), key: k.clone(), value: None });
                }
            }
            None => {
                if let Some((elsewhere, _)) = tree.find_object(&o.id) {
                    removes.push(SpatialDelta::Remove { carrier: elsewhere.clone(), object: o.id.clone() });
                }
                rest.push(SpatialDelta::Add { carrier: carrier.clone(), node: o.clone() });
            }
        }
    }
    removes.extend(rest);
    removes
}

/// The single writer of memory: turns deltas into numbered events and folds
/// them in. A call's record rides on its first event; the k-th spatial delta
/// shares an event with the k-th embodiment delta.
pub fn commit(
    memory: &mut MemoryState,
    tau: Tick,
    task: Option<&TaskId>,
    records: Vec<ToolCallRecord>,
    spatial: Vec<SpatialDelta>,
    embodiment: Vec<EmbodimentDelta>,
) -> Result<usize, StemError> {
    let n = spatial.len().max(embodiment.len()).max(usize::from(!records.is_empty()));
    let mut spatial = spatial.into_iter();
    let mut embodiment = embodiment.into_iter();
    let mut records = Some(records);
    for _ in 0..n {
        let mut e = Event::new(memory.version + 1, tau).with_task(task.cloned());
        e.spatial_delta = spatial.next();
        e.embodiment_delta = embodiment.next();
        if let Some(r) = records.take() {
            e.tool_log = r;
        }
        memory.apply_mut(&e)?;
    }
    Ok(n)
}
