use std::collections::{BTreeMap, BTreeSet};

use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::catalog::{self, CarrierTemplate};
use crate::geo::RigidTransform;
use crate::ids::{NodeId, ObjectId};
use crate::spatial::{CarrierSpec, Domain, Level, ObjectSpec, PredicateParams, RegionSpec, WorldSpec};

/// Distance between neighbouring region centres.
pub const REGION_PITCH: f64 = 6.0;
const SLOT_PITCH: f64 = 0.3;

/// Regions and carriers a level asks for.
fn layout(level: Level, rng: &mut ChaCha8Rng) -> (usize, usize) {
    match level {
        Level::L1 => (2, 4),
        Level::L2 => (3, rng.random_range(6..=7)),
        Level::L3 => (5, rng.random_range(10..=12)),
    }
}

/// Region centres on a square grid, row by row.
pub fn region_positions(n: usize) -> Vec<[f64; 2]> {
    let cols = (n as f64).sqrt().ceil().max(1.0) as usize;
    (0..n).map(|i| [(i % cols) as f64 * REGION_PITCH, (i / cols) as f64 * REGION_PITCH]).collect()
}

/// Surface position `(x, y)` and half extents of a resting object.
pub type Footprint = ([f64; 2], [f64; 3]);

fn carrier_offset(i: usize) -> [f64; 2] {
    [-1.5 + 1.5 * (i % 3) as f64, -1.2 + 2.4 * (i / 3) as f64]
}

/// Axis-aligned footprint test against objects already on the carrier.
fn fits(x: f64, y: f64, half: &[f64; 3], taken: &[Footprint]) -> bool {
    taken.iter().all(|(p, h)| (x - p[0]).abs() >= half[0] + h[0] || (y - p[1]).abs() >= half[1] + h[1])
}

/// First free slot on a surface of half size `surface`, scanning rows from
/// the back left corner.
pub fn free_slot(surface: [f64; 2], half: &[f64; 3], taken: &[Footprint]) -> Option<RigidTransform> {
    let nx = ((2.0 * surface[0]) / SLOT_PITCH).floor().max(1.0) as usize;
    let ny = ((2.0 * surface[1]) / SLOT_PITCH).floor().max(1.0) as usize;
    for j in 0..ny {
        for i in 0..nx {
            let x = -surface[0] + SLOT_PITCH * (i as f64 + 0.5);
            let y = -surface[1] + SLOT_PITCH * (j as f64 + 0.5);
            if x.abs() + half[0] <= surface[0] + 1e-9 && y.abs() + half[1] <= surface[1] + 1e-9 && fits(x, y, half, taken) {
                return Some(RigidTransform::from_translation(nalgebra::Vector3::new(x, y, half[2])));
            }
        }
    }
    None
}

struct Picked<'a> {
    region: usize,
    template: &'a CarrierTemplate,
}

/// Deterministic world for `(domain, level, seed)` whose node count lies in
/// the level's band.
pub fn generate_world(domain: Domain, level: Level, seed: u64) -> WorldSpec {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x05ee_d0f3_a11d);
    let tpl = catalog::template(domain);
    let (n_regions, n_carriers) = layout(level, &mut rng);

    let mut regions: Vec<usize> = tpl
        .required_regions
        .iter()
        .map(|name| tpl.regions.iter().position(|r| r.name == *name).expect("required region in catalog"))
        .collect();
    let mut rest: Vec<usize> = (0..tpl.regions.len()).filter(|i| !regions.contains(i)).collect();
    rest.shuffle(&mut rng);
    regions.extend(rest.into_iter().take(n_regions.saturating_sub(regions.len())));
    regions.truncate(n_regions);

    // Required carriers first, then spread the remaining quota evenly.
    let mut picked: Vec<Picked> = Vec::new();
    for (ri, &r) in regions.iter().enumerate() {
        for t in tpl.regions[r].carriers.iter().filter(|t| tpl.required_carriers.contains(&t.name)) {
            picked.push(Picked { region: ri, template: t });
        }
    }
    let mut pools: Vec<Vec<&CarrierTemplate>> = regions
        .iter()
        .map(|&r| {
            let mut v: Vec<&CarrierTemplate> =
                tpl.regions[r].carriers.iter().filter(|t| !tpl.required_carriers.contains(&t.name)).collect();
            v.shuffle(&mut rng);
            v
        })
        .collect();
    while picked.len() < n_carriers {
        let count = |ri: usize| picked.iter().filter(|p| p.region == ri).count();
        let next = (0..regions.len()).filter(|&ri| !pools[ri].is_empty()).min_by_key(|&ri| (count(ri), ri));
        let Some(ri) = next else { break };
        let t = pools[ri].remove(0);
        picked.push(Picked { region: ri, template: t });
    }
    picked.sort_by_key(|p| {
        let order = tpl.regions[regions[p.region]].carriers.iter().position(|t| t.name == p.template.name);
        (p.region, order)
    });

    let positions = region_positions(regions.len());
    let region_specs: Vec<RegionSpec> = regions
        .iter()
        .enumerate()
        .map(|(i, &r)| RegionSpec {
            id: NodeId::from(tpl.regions[r].name),
            name: tpl.regions[r].name.replace('_', " "),
            position: positions[i],
            media: vec![format!("img://{}/{}", tpl.regions[r].name, seed)],
        })
        .collect();
    let mut carriers = Vec::new();
    for (i, p) in picked.iter().enumerate() {
        let slot = picked[..i].iter().filter(|q| q.region == p.region).count();
        let off = carrier_offset(slot);
        let base = positions[p.region];
        carriers.push(CarrierSpec {
            id: NodeId::from(p.template.name),
            name: p.template.name.replace('_', " "),
            region: region_specs[p.region].id.clone(),
            position: [base[0] + off[0], base[1] + off[1]],
            surface: p.template.surface,
            enclosed: p.template.enclosed,
        });
    }

    let mut priors: BTreeMap<String, Vec<NodeId>> = BTreeMap::new();
    for p in &picked {
        for cat in p.template.stores {
            priors.entry((*cat).to_owned()).or_default().push(NodeId::from(p.template.name));
        }
    }

    let (lo, hi) = level.band();
    let structural = 1 + region_specs.len() + carriers.len();
    let total = rng.random_range(lo.max(structural + 1)..=hi);
    let n_objects = total - structural;

    // Required categories, then unique ones from the stores of present carriers,
    // then repeats once those run out.
    let mut pool: Vec<String> = priors.keys().filter(|c| !tpl.required_objects.contains(&c.as_str())).cloned().collect();
    pool.shuffle(&mut rng);
    let mut categories: Vec<String> = tpl.required_objects.iter().map(|s| (*s).to_owned()).collect();
    while categories.len() < n_objects {
        match pool.pop() {
            Some(c) => categories.push(c),
            None => {
                let all: Vec<String> = priors.keys().cloned().collect();
                categories.push(all.choose(&mut rng).expect("world has categories").clone());
            }
        }
    }
    categories.truncate(n_objects);

    let mut taken: BTreeMap<NodeId, Vec<Footprint>> = BTreeMap::new();
    let mut counters: BTreeMap<String, usize> = BTreeMap::new();
    let mut objects = Vec::new();
    for cat in categories {
        let half = catalog::half_extents(&cat);
        let homes = priors.get(&cat).cloned().unwrap_or_default();
        let mut order: Vec<NodeId> = carriers.iter().map(|c| c.id.clone()).collect();
        order.shuffle(&mut rng);
        if !homes.is_empty() && rng.random_bool(0.5) {
            let home = homes[0].clone();
            order.retain(|c| *c != home);
            order.insert(0, home);
        } else if let Some(first) = order.first().cloned() {
            if homes.contains(&first) && order.len() > 1 {
                order.swap(0, 1);
            }
        }
        let placed = order.iter().find_map(|cid| {
            let spec = carriers.iter().find(|c| c.id == *cid).expect("carrier");
            free_slot(spec.surface, &half, taken.get(cid).map_or(&[][..], Vec::as_slice)).map(|pose| (cid.clone(), pose))
        });
        let Some((carrier, pose)) = placed else { continue };
        let n = counters.entry(cat.clone()).or_default();
        *n += 1;
        taken.entry(carrier.clone()).or_default().push(([pose.translation.x, pose.translation.y], half));
        let mut affordances: BTreeSet<String> = BTreeSet::from(["graspable".to_owned()]);
        let mut state = BTreeMap::new();
        if catalog::is_container(&cat) {
            affordances.extend(["open".to_owned(), "container".to_owned()]);
            state.insert("open".to_owned(), "false".to_owned());
        }
        objects.push(ObjectSpec {
            id: ObjectId::new(format!("{cat}_{n}")),
            carrier,
            category: cat,
            half_extents: half,
            affordances,
            pose,
            state,
        });
    }

    WorldSpec {
        domain,
        level: Some(level),
        seed,
        root_media: vec![format!("map://{}/{seed}", serde_json::to_value(domain).ok().and_then(|v| v.as_str().map(str::to_owned)).unwrap_or_default())],
        regions: region_specs,
        carriers,
        objects,
        priors,
        stations: tpl.stations.iter().map(|(k, v)| ((*k).to_owned(), NodeId::from(*v))).collect(),
        recipes: tpl.recipes.iter().map(|(k, v)| ((*k).to_owned(), v.iter().map(|s| (*s).to_owned()).collect())).collect(),
        params: PredicateParams::default(),
    }
}
