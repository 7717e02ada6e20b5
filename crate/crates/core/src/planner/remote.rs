use std::io::{BufRead, BufReader, ErrorKind, Write};
use std::net::{TcpListener, TcpStream, ToSocketAddrs};
use std::time::Duration;

use serde::{Deserialize, Serialize};

use super::types::{PlanResult, PlannerContext, Subtask, WorkflowGraph};
use super::validate::validate_graph;
use super::{PlanError, Planner, RuleSet};
use crate::canonical;

pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(30);

/// One line of canonical JSON sent to the remote planner.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanRequest {
    pub task: crate::TaskId,
    /// `[M_s, M_t, M_r, T_global]` in that order.
    pub sections: serde_json::Value,
    /// Capability names any robot in the roster offers.
    pub tools: Vec<String>,
}

impl PlanRequest {
    pub fn from_context(ctx: &PlannerContext) -> Self {
        let mut tools: Vec<String> = ctx.robots.iter().flat_map(|r| r.capabilities.iter().cloned()).collect();
        tools.sort();
        tools.dedup();
        Self { task: ctx.task.clone(), sections: ctx.sections(), tools }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanResponse {
    pub trace: Vec<String>,
    pub subtasks: Vec<Subtask>,
}

/// Client side of the line protocol: connect, write the request line, read
/// one response line.
#[derive(Debug, Clone)]
pub struct RemotePlanner {
    pub endpoint: String,
    pub timeout: Duration,
}

impl RemotePlanner {
    pub fn new(endpoint: impl Into<String>) -> Self {
        Self { endpoint: endpoint.into(), timeout: DEFAULT_TIMEOUT }
    }

    pub fn with_timeout(mut self, timeout: Duration) -> Self {
        self.timeout = timeout;
        self
    }

    fn exchange(&self, line: &str) -> Result<String, PlanError> {
        let addr = self
            .endpoint
            .to_socket_addrs()
            .map_err(|e| PlanError::TransportFailure(format!("{}: {e}", self.endpoint)))?
            .next()
            .ok_or_else(|| PlanError::TransportFailure(format!("{}: no address", self.endpoint)))?;
        let classify = |e: std::io::Error| match e.kind() {
            ErrorKind::TimedOut | ErrorKind::WouldBlock => PlanError::Timeout(self.timeout),
            _ => PlanError::TransportFailure(e.to_string()),
        };
        let mut stream = TcpStream::connect_timeout(&addr, self.timeout).map_err(classify)?;
        stream.set_read_timeout(Some(self.timeout)).map_err(classify)?;
        stream.set_write_timeout(Some(self.timeout)).map_err(classify)?;
        stream.write_all(line.as_bytes()).map_err(classify)?;
        stream.write_all(b"\n").map_err(classify)?;
        stream.flush().map_err(classify)?;
        let mut reply = String::new();
        BufReader::new(stream).read_line(&mut reply).map_err(classify)?;
        if reply.is_empty() {
            return Err(PlanError::TransportFailure("connection closed without a reply".into()));
        }
        Ok(reply)
    }
}

impl Planner for RemotePlanner {
    fn decompose(&mut self, ctx: &PlannerContext, rules: &RuleSet) -> Result<PlanResult, PlanError> {
        let request = canonical::to_string(&PlanRequest::from_context(ctx))
            .map_err(|e| PlanError::TransportFailure(e.to_string()))?;
        let reply = self.exchange(&request)?;
        let response: PlanResponse =
            canonical::from_str(reply.trim()).map_err(|e| PlanError::TransportFailure(format!("bad reply: {e}")))?;
        let graph = WorkflowGraph { task: ctx.task.clone(), subtasks: response.subtasks };
        validate_graph(&graph, &ctx.robots, rules, &ctx.spatial).map_err(PlanError::Hallucination)?;
        Ok(PlanResult { trace: response.trace, graph })
    }
}

/// Answers exactly one request on `listener` with `respond(request)`.
/// Handy for tests and for wrapping a local planner behind the protocol.
pub fn serve_one<F>(listener: &TcpListener, respond: F) -> std::io::Result<()>
where
    F: FnOnce(PlanRequest) -> PlanResponse,
{
    let (stream, _) = listener.accept()?;
    let mut reader = BufReader::new(stream.try_clone()?);
    let mut line = String::new();
    reader.read_line(&mut line)?;
    let request: PlanRequest =
        canonical::from_str(line.trim()).map_err(|e| std::io::Error::new(ErrorKind::InvalidData, e.to_string()))?;
    let response = respond(request);
    let text = canonical::to_string(&response).map_err(|e| std::io::Error::new(ErrorKind::InvalidData, e.to_string()))?;
    let mut stream = stream;
    stream.write_all(text.as_bytes())?;
    stream.write_all(b"\n")?;
    stream.flush()
}
