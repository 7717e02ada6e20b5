use std::net::TcpListener;
use std::time::Duration;

use stemos::ids::NodeId;
use stemos::orchestrator::{Engine, MemoryConfig, RunConfig};
use stemos::planner::{decompose, validate_graph, PlanError, PlanResponse, Planner, PlannerContext, RemotePlanner, RuleSet, ViolationKind};
use stemos::sim::lifelong_scenario;
use stemos::spatial::{Domain, Level};

fn context(seed: u64) -> (PlannerContext, RuleSet) {
    let s = lifelong_scenario(Domain::Household, Level::L1, 1, seed, &["wheeled", "humanoid"]);
    let mut engine = Engine::new(&s, RunConfig { memory: MemoryConfig::full(), seed, ..RunConfig::default() }).unwrap();
    engine.step().unwrap();
    (engine.context(0), RuleSet::for_world(&s.world.resolve()))
}

#[test]
fn rule_plans_validate() {
    for seed in 0..20 {
        let (ctx, rules) = context(seed);
        let plan = decompose(&ctx, &rules).unwrap();
        assert!(!plan.graph.subtasks.is_empty());
        validate_graph(&plan.graph, &ctx.robots, &rules, &ctx.spatial).unwrap();
    }
}

#[test]
fn invented_location_is_a_hallucination() {
    let (ctx, rules) = context(1);
    let mut plan = decompose(&ctx, &rules).unwrap();
    if let stemos::planner::Intent::Fetch { dest, .. } = &mut plan.graph.subtasks[0].intent {
        *dest = NodeId::new("room_99");
    }
    let violations = validate_graph(&plan.graph, &ctx.robots, &rules, &ctx.spatial).unwrap_err();
    assert!(violations.iter().any(|v| v.kind == ViolationKind::HallucinatedLocation), "{violations:?}");
}

#[test]
fn remote_planner_round_trip() {
    let (ctx, rules) = context(2);
    let local = decompose(&ctx, &rules).unwrap();
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let addr = listener.local_addr().unwrap().to_string();
    let reply = PlanResponse { trace: local.trace.clone(), subtasks: local.graph.subtasks.clone() };
    let server = std::thread::spawn(move || {
        stemos::planner::serve_one(&listener, |req| {
            assert_eq!(req.task, stemos::TaskId::new("t1"));
            reply
        })
    });
    let remote = RemotePlanner::new(addr).with_timeout(Duration::from_secs(5)).decompose(&ctx, &rules).unwrap();
    server.join().unwrap().unwrap();
    assert_eq!(remote.graph, local.graph);
}

#[test]
fn silent_server_times_out() {
    let (ctx, rules) = context(3);
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let addr = listener.local_addr().unwrap().to_string();
    let err = RemotePlanner::new(addr).with_timeout(Duration::from_millis(200)).decompose(&ctx, &rules).unwrap_err();
    assert!(matches!(err, PlanError::Timeout(_)), "{err}");
    drop(listener);
}

#[test]
fn unreachable_endpoint_is_a_transport_failure() {
    let (ctx, rules) = context(4);
    let port = TcpListener::bind("127.0.0.1:0").unwrap().local_addr().unwrap().port();
    let err = RemotePlanner::new(format!("127.0.0.1:{port}")).decompose(&ctx, &rules).unwrap_err();
    assert!(matches!(err, PlanError::TransportFailure(_)), "{err}");
}
