//! Static domain content: which rooms exist, what furniture they hold and
//! which object categories conventionally live where.

use crate::spatial::Domain;

pub struct CarrierTemplate {
    pub name: &'static str,
    pub surface: [f64; 2],
    pub enclosed: bool,
    /// Categories stored here by convention.
    pub stores: &'static [&'static str],
}

pub struct RegionTemplate {
    pub name: &'static str,
    pub carriers: &'static [CarrierTemplate],
}

pub struct DomainTemplate {
    pub domain: Domain,
    pub regions: &'static [RegionTemplate],
    /// Regions that every generated world contains, in order.
    pub required_regions: &'static [&'static str],
    /// Carriers that every generated world contains.
    pub required_carriers: &'static [&'static str],
    /// Categories that every generated world contains at least once.
    pub required_objects: &'static [&'static str],
    pub stations: &'static [(&'static str, &'static str)],
    pub recipes: &'static [(&'static str, &'static [&'static str])],
}

const fn c(name: &'static str, sx: f64, sy: f64, enclosed: bool, stores: &'static [&'static str]) -> CarrierTemplate {
    CarrierTemplate { name, surface: [sx, sy], enclosed, stores }
}

const HOUSEHOLD: DomainTemplate = DomainTemplate {
    domain: Domain::Household,
    regions: &[
        RegionTemplate {
            name: "kitchen",
            carriers: &[
                c("counter", 0.9, 0.4, false, &["apple", "bread", "orange", "banana", "knife"]),
                c("fridge", 0.45, 0.35, true, &["egg", "milk", "butter", "cheese", "juice"]),
                c("cabinet", 0.6, 0.3, true, &["plate", "cup", "bowl", "glass"]),
                c("stove", 0.45, 0.3, false, &["pan", "pot"]),
            ],
        },
        RegionTemplate {
            name: "living_room",
            carriers: &[
                c("coffee_table", 0.6, 0.4, false, &["remote", "magazine", "candle"]),
                c("sofa", 0.9, 0.3, false, &["pillow", "blanket"]),
                c("tv_stand", 0.75, 0.25, false, &["speaker", "game_controller"]),
            ],
        },
        RegionTemplate {
            name: "bedroom",
            carriers: &[
                c("nightstand", 0.3, 0.3, false, &["book", "lamp", "alarm_clock"]),
                c("wardrobe", 0.6, 0.3, true, &["shirt", "towel", "scarf"]),
                c("dresser", 0.6, 0.3, false, &["wallet", "watch", "comb"]),
            ],
        },
        RegionTemplate {
            name: "dining_room",
            carriers: &[
                c("dining_table", 0.9, 0.5, false, &["napkin", "salt_shaker", "vase"]),
                c("sideboard", 0.75, 0.3, false, &["wine", "tray", "fork", "spoon"]),
            ],
        },
        RegionTemplate {
            name: "bathroom",
            carriers: &[
                c("sink", 0.45, 0.3, false, &["toothbrush", "soap", "toothpaste"]),
                c("bath_shelf", 0.45, 0.2, false, &["shampoo", "lotion", "tissue"]),
            ],
        },
        RegionTemplate {
            name: "study",
            carriers: &[
                c("desk", 0.75, 0.4, false, &["laptop", "pen", "notebook", "stapler"]),
                c("bookshelf", 0.6, 0.25, false, &["folder", "dictionary", "globe"]),
            ],
        },
    ],
    required_regions: &["kitchen"],
    required_carriers: &["counter"],
    required_objects: &[],
    stations: &[("service", "counter")],
    recipes: &[],
};

const RESTAURANT: DomainTemplate = DomainTemplate {
    domain: Domain::Restaurant,
    regions: &[
        RegionTemplate {
            name: "kitchen",
            carriers: &[
                c("prep_counter", 0.9, 0.45, false, &["bun", "lettuce", "tomato", "knife"]),
                c("kitchen_fridge", 0.45, 0.35, true, &["patty", "cheese", "sauce", "milk"]),
                c("grill", 0.6, 0.35, false, &["spatula"]),
                c("dish_rack", 0.6, 0.3, false, &["plate", "cup", "bowl"]),
            ],
        },
        RegionTemplate {
            name: "service",
            carriers: &[
                c("pickup_counter", 0.9, 0.35, false, &["tray", "receipt"]),
                c("drink_station", 0.6, 0.3, false, &["cola", "juice", "water_bottle", "ice_bucket"]),
            ],
        },
        RegionTemplate {
            name: "dining_hall",
            carriers: &[
                c("table_1", 0.6, 0.4, false, &["napkin", "menu"]),
                c("table_2", 0.6, 0.4, false, &["salt_shaker", "pepper_shaker"]),
                c("table_3", 0.6, 0.4, false, &["vase", "candle"]),
            ],
        },
        RegionTemplate {
            name: "storage",
            carriers: &[
                c("dry_shelf", 0.75, 0.3, false, &["flour", "sugar", "rice", "oil"]),
                c("freezer", 0.45, 0.35, true, &["fries", "nuggets", "ice_cream"]),
            ],
        },
        RegionTemplate {
            name: "bar",
            carriers: &[
                c("bar_counter", 0.9, 0.3, false, &["glass", "lemon", "straw"]),
                c("wine_rack", 0.6, 0.25, false, &["wine", "beer"]),
            ],
        },
    ],
    required_regions: &["kitchen", "service"],
    required_carriers: &["prep_counter", "kitchen_fridge", "pickup_counter"],
    required_objects: &["bun", "patty", "cheese"],
    stations: &[("prep", "prep_counter"), ("service", "pickup_counter")],
    recipes: &[
        ("normal", &["bun", "patty"]),
        ("cheese", &["bun", "patty", "cheese"]),
        ("deluxe", &["bun", "patty", "cheese", "lettuce", "tomato"]),
    ],
};

const SUPERMARKET: DomainTemplate = DomainTemplate {
    domain: Domain::Supermarket,
    regions: &[
        RegionTemplate {
            name: "checkout",
            carriers: &[
                c("packing_counter", 0.9, 0.45, false, &["bag", "gift", "ribbon", "box"]),
                c("checkout_counter", 0.75, 0.35, false, &["receipt", "coupon"]),
            ],
        },
        RegionTemplate {
            name: "produce",
            carriers: &[
                c("fruit_stand", 0.9, 0.4, false, &["apple", "banana", "orange", "grape"]),
                c("veg_shelf", 0.9, 0.3, false, &["carrot", "potato", "onion", "lettuce"]),
            ],
        },
        RegionTemplate {
            name: "dairy",
            carriers: &[
                c("dairy_fridge", 0.6, 0.35, true, &["milk", "yogurt", "cheese", "butter"]),
                c("egg_shelf", 0.6, 0.3, false, &["egg", "cream"]),
            ],
        },
        RegionTemplate {
            name: "bakery",
            carriers: &[
                c("bread_shelf", 0.75, 0.3, false, &["bread", "bagel", "croissant"]),
                c("cake_counter", 0.6, 0.35, false, &["cake", "muffin", "cookie"]),
            ],
        },
        RegionTemplate {
            name: "household_goods",
            carriers: &[
                c("cleaning_shelf", 0.75, 0.3, false, &["detergent", "sponge", "soap"]),
                c("paper_shelf", 0.75, 0.3, false, &["tissue", "towel_roll", "napkin"]),
            ],
        },
        RegionTemplate {
            name: "stockroom",
            carriers: &[
                c("pallet", 0.9, 0.5, false, &["crate", "carton"]),
                c("back_shelf", 0.75, 0.3, false, &["canned_soup", "pasta", "cereal"]),
            ],
        },
    ],
    required_regions: &["checkout"],
    required_carriers: &["packing_counter", "checkout_counter"],
    required_objects: &["bag", "gift"],
    stations: &[("packing", "packing_counter"), ("service", "checkout_counter")],
    recipes: &[],
};

pub fn template(domain: Domain) -> &'static DomainTemplate {
    match domain {
        Domain::Household => &HOUSEHOLD,
        Domain::Restaurant => &RESTAURANT,
        Domain::Supermarket => &SUPERMARKET,
    }
}

/// Half extents (x, y, z) of an object of `category`.
pub fn half_extents(category: &str) -> [f64; 3] {
    match category {
        "bag" => [0.2, 0.15, 0.15],
        "box" | "crate" | "carton" => [0.15, 0.12, 0.1],
        "laptop" | "tray" | "pillow" | "blanket" => [0.15, 0.1, 0.03],
        "gift" => [0.06, 0.05, 0.05],
        "burger" => [0.06, 0.06, 0.04],
        "wine" | "milk" | "juice" | "cola" | "shampoo" | "beer" | "oil" | "vase" | "lamp" => [0.04, 0.04, 0.12],
        _ => [0.05, 0.04, 0.04],
    }
}

/// Categories that can be opened and hold other objects.
pub fn is_container(category: &str) -> bool {
    matches!(category, "bag" | "box")
}

/// Capabilities of a body kind.
pub fn capabilities(kind: &str) -> Option<&'static [&'static str]> {
    Some(match kind {
        "wheeled" | "single_arm" => &["navigate", "detect", "grasp"],
        "humanoid" | "dual_arm" => &["navigate", "detect", "grasp", "open", "assemble"],
        "quadruped" => &["navigate", "detect"],
        _ => return None,
    })
}

/// Capability a tool consumes.
pub fn capability_of(tool: &str) -> Option<&'static str> {
    Some(match tool {
        "navigate" => "navigate",
        "detect" => "detect",
        "pick" | "place" | "handover" => "grasp",
        "open" | "close" => "open",
        "assemble" => "assemble",
        _ => return None,
    })
}
