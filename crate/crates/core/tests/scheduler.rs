mod common;

use std::collections::BTreeSet;

use proptest::prelude::*;

use stemos::ids::RobotId;
use stemos::orchestrator::{audit_running, step_scheduler, SubtaskState};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn random_schedules_keep_invariants(seed in any::<u64>()) {
        let run = common::simulate_schedule(seed);
        prop_assert_eq!(run.violations, 0);
        prop_assert_eq!(run.orphans, 0);
    }
}

#[test]
fn deeper_layer_waits_for_shallower_one() {
    let mut r = common::rng(1);
    let mut tasks = vec![common::random_task(&mut r, "t1")];
    let mut busy = BTreeSet::new();
    step_scheduler(1, &mut tasks, &mut busy, |_| true);
    let depths: BTreeSet<u32> =
        tasks[0].subtasks.iter().filter(|s| s.state == SubtaskState::Running).map(|s| s.depth()).collect();
    assert!(depths.iter().all(|d| *d == 1), "{depths:?}");
    assert!(audit_running(&tasks).is_empty());
}

#[test]
fn unusable_robots_are_never_claimed() {
    let mut r = common::rng(2);
    let mut tasks: Vec<_> = (0..3).map(|i| common::random_task(&mut r, &format!("t{i}"))).collect();
    let mut busy = BTreeSet::new();
    let down = RobotId::new("r1");
    step_scheduler(1, &mut tasks, &mut busy, |id| *id != down);
    assert!(!busy.contains(&down));
    for t in &tasks {
        for s in t.subtasks.iter().filter(|s| s.state == SubtaskState::Running) {
            assert!(!s.robots().contains(&down));
        }
    }
}

#[test]
fn schedules_make_progress() {
    let dispatched: usize = (0..50).map(|s| common::simulate_schedule(s).dispatched).sum();
    assert!(dispatched > 50);
}
