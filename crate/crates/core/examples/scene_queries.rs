//! Loads a generated household into a scene tree and asks where things are.

use stemos::sim::generate_world;
use stemos::spatial::{build_scene_tree, locate_candidates, query_nearby, Domain, Level};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let world = generate_world(Domain::Household, Level::L2, 3);
    let tree = build_scene_tree(&world)?;
    println!("{} regions, {} carriers, {} objects", world.regions.len(), world.carriers.len(), tree.object_count());

    let object = world.objects.first().ok_or("empty world")?;
    let category = &object.category;
    println!("candidates for {category}: {:?}", locate_candidates(&tree, category));

    let region = tree.region_of(&object.carrier).cloned().ok_or("carrier without region")?;
    for n in query_nearby(&tree, &region, 1)? {
        let names: Vec<&str> = n.objects.iter().map(|o| o.id.0.as_str()).collect();
        println!("{} ({:?}, {} hop): {names:?}, {} relations", n.id, n.kind, n.hops, n.edges.len());
    }
    Ok(())
}
