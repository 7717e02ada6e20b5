//! Serves the rule planner over the line protocol on a local socket and
//! plans through the remote client.

use std::net::TcpListener;
use std::time::Duration;

use stemos::orchestrator::{Engine, RunConfig};
use stemos::planner::{decompose, serve_one, PlanResponse, Planner, RemotePlanner, RuleSet};
use stemos::sim::lifelong_scenario;
use stemos::spatial::{Domain, Level};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let scenario = lifelong_scenario(Domain::Supermarket, Level::L1, 1, 5, &["wheeled"]);
    let mut engine = Engine::new(&scenario, RunConfig::default())?;
    engine.step()?;
    let ctx = engine.context(0);
    let rules = RuleSet::for_world(&scenario.world.resolve());
    let local = decompose(&ctx, &rules)?;

    let listener = TcpListener::bind("127.0.0.1:0")?;
    let addr = listener.local_addr()?.to_string();
    let reply = PlanResponse { trace: local.trace.clone(), subtasks: local.graph.subtasks.clone() };
    let server = std::thread::spawn(move || {
        serve_one(&listener, |req| {
            println!("server got a request for {} with tools {:?}", req.task, req.tools);
            reply
        })
    });
    let plan = RemotePlanner::new(addr).with_timeout(Duration::from_secs(5)).decompose(&ctx, &rules)?;
    server.join().map_err(|_| "server panicked")??;
    println!("remote plan has {} subtasks, same as local: {}", plan.graph.subtasks.len(), plan.graph == local.graph);
    Ok(())
}
