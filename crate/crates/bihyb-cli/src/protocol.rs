//! Line-delimited JSON control protocol for driving episodes from another
//! process, over stdio or TCP.
//!
//! Every request is one JSON object on one line with an `"op"` field:
//!
//! ```json
//! {"op":"reset","heuristic":"lk_fast","max_steps":8,"seed":0,"instance":{...}}
//! {"op":"reset","heuristic":"sjf","instance_path":"inst/dag_0.json"}
//! {"op":"legal"}
//! {"op":"legal","a1":3}
//! {"op":"step","a1":3,"a2":5}
//! {"op":"observe"}
//! {"op":"shutdown"}
//! ```
//!
//! Every response is one line, either `{"ok":{...}}` or
//! `{"err":{"code":"...","message":"..."}}`. Codes: `parse` for lines that
//! are not a well-formed request, `state` for operations that make no sense
//! right now (no episode, bad heuristic, unreadable instance file),
//! `illegal_action` for steps outside the legal set, `episode_done` for
//! steps after the episode ended. A failed request never kills the session;
//! the next line is processed normally.

use std::io::{BufRead, BufReader, Write};
use std::net::{TcpListener, ToSocketAddrs};
use std::path::Path;

use bihyb_core::env::{self, EnvConfig, EnvState, LowerHeuristic, Observation};
use bihyb_core::CoreError;
use serde::Deserialize;
use serde_json::{json, Value};

use crate::format::{load_instance, InstanceFile};

#[derive(Debug, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
enum Request {
    Reset(ResetRequest),
    Legal {
        #[serde(default)]
        a1: Option<usize>,
    },
    Step {
        a1: usize,
        a2: usize,
    },
    Observe,
    Shutdown,
}

#[derive(Debug, Deserialize)]
struct ResetRequest {
    heuristic: String,
    #[serde(default)]
    instance: Option<InstanceFile>,
    #[serde(default)]
    instance_path: Option<String>,
    #[serde(default)]
    max_steps: Option<usize>,
    #[serde(default)]
    seed: Option<u64>,
}

fn ok(payload: Value) -> String {
    json!({ "ok": payload }).to_string()
}

fn err(code: &str, message: impl Into<String>) -> String {
    json!({ "err": { "code": code, "message": message.into() } }).to_string()
}

fn obs_json(obs: &Observation) -> Value {
    json!({
        "problem": obs.problem.name(),
        "k": obs.k,
        "max_steps": obs.max_steps,
        "objective": obs.objective,
        "done": obs.done,
        "nodes": obs.nodes,
        "edges": obs.edges,
        "nodes2": obs.nodes2,
        "edges2": obs.edges2,
    })
}

/// One protocol conversation: at most one live episode at a time, replaced
/// wholesale by each `reset`.
#[derive(Default)]
pub struct Session {
    state: Option<EnvState>,
}

impl Session {
    pub fn new() -> Self {
        Session::default()
    }

    /// Handles one request line. Returns the response line and whether the
    /// session should keep running.
    pub fn handle_line(&mut self, line: &str) -> (String, bool) {
        let request: Request = match serde_json::from_str(line) {
            Ok(r) => r,
            Err(e) => return (err("parse", format!("bad request: {e}")), true),
        };
        match request {
            Request::Reset(req) => (self.reset(req), true),
            Request::Legal { a1 } => (self.legal(a1), true),
            Request::Step { a1, a2 } => (self.step(a1, a2), true),
            Request::Observe => (self.observe(), true),
            Request::Shutdown => (ok(json!({})), false),
        }
    }

    fn reset(&mut self, req: ResetRequest) -> String {
        let Some(heuristic) = LowerHeuristic::parse(&req.heuristic) else {
            return err("state", format!("unknown heuristic {:?}", req.heuristic));
        };
        let instance = match (req.instance, req.instance_path) {
            (Some(file), None) => match file.into_instance() {
                Ok(i) => i,
                Err(e) => return err("state", format!("bad inline instance: {e:#}")),
            },
            (None, Some(path)) => match load_instance(Path::new(&path)) {
                Ok(i) => i,
                Err(e) => return err("state", format!("{e:#}")),
            },
            _ => {
                return err(
                    "state",
                    "reset needs exactly one of \"instance\" and \"instance_path\"",
                )
            }
        };
        let max_steps = req
            .max_steps
            .unwrap_or_else(|| env::default_max_steps(instance.kind()));
        let config = match EnvConfig::new(max_steps, heuristic, req.seed.unwrap_or(0)) {
            Ok(c) => c,
            Err(e) => return err("state", e.to_string()),
        };
        match env::reset(instance, config) {
            Ok(state) => {
                let payload = json!({
                    "k": state.k(),
                    "max_steps": state.max_steps(),
                    "objective": state.last_objective(),
                    "done": state.done(),
                });
                self.state = Some(state);
                ok(payload)
            }
            Err(e) => err("state", e.to_string()),
        }
    }

    fn legal(&mut self, a1: Option<usize>) -> String {
        let Some(state) = &self.state else {
            return err("state", "no episode; send reset first");
        };
        match state.legal_actions(a1) {
            Ok(actions) => ok(json!({ "actions": actions })),
            Err(e) => err("illegal_action", e.to_string()),
        }
    }

    fn step(&mut self, a1: usize, a2: usize) -> String {
        let Some(state) = &self.state else {
            return err("state", "no episode; send reset first");
        };
        match state.step((a1, a2)) {
            Ok(outcome) => {
                let payload = json!({
                    "reward": outcome.reward,
                    "objective": outcome.objective,
                    "done": outcome.done,
                    "k": outcome.state.k(),
                    "obs": obs_json(&outcome.state.observe()),
                });
                self.state = Some(outcome.state);
                ok(payload)
            }
            Err(CoreError::EpisodeDone) => err("episode_done", "episode already finished"),
            Err(e @ CoreError::IllegalAction { .. }) => {
                let hint = state
                    .legal_actions(None)
                    .map(|f| f.len())
                    .unwrap_or(0);
                err(
                    "illegal_action",
                    format!("{e}; {hint} first components currently legal"),
                )
            }
            Err(e) => err("state", e.to_string()),
        }
    }

    fn observe(&mut self) -> String {
        let Some(state) = &self.state else {
            return err("state", "no episode; send reset first");
        };
        ok(obs_json(&state.observe()))
    }
}

/// Serves one session on a reader/writer pair until shutdown or EOF.
pub fn serve_connection(reader: impl BufRead, mut writer: impl Write) -> std::io::Result<()> {
    let mut session = Session::new();
    for line in reader.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let (response, keep_going) = session.handle_line(&line);
        writer.write_all(response.as_bytes())?;
        writer.write_all(b"\n")?;
        writer.flush()?;
        if !keep_going {
            break;
        }
    }
    Ok(())
}

pub fn serve_stdio() -> std::io::Result<()> {
    let stdin = std::io::stdin();
    let stdout = std::io::stdout();
    serve_connection(stdin.lock(), stdout.lock())
}

/// Accepts TCP connections, one session per connection, each on its own
/// thread. With `max_conns` set, returns after accepting that many.
pub fn serve_tcp(addr: impl ToSocketAddrs, max_conns: Option<usize>) -> std::io::Result<()> {
    let listener = TcpListener::bind(addr)?;
    eprintln!("listening on {}", listener.local_addr()?);
    serve_listener(listener, max_conns)
}

pub fn serve_listener(listener: TcpListener, max_conns: Option<usize>) -> std::io::Result<()> {
    let mut handles = Vec::new();
    for (accepted, conn) in listener.incoming().enumerate() {
        let stream = conn?;
        handles.push(std::thread::spawn(move || {
            let reader = BufReader::new(stream.try_clone()?);
            serve_connection(reader, stream)
        }));
        if max_conns.is_some_and(|m| accepted + 1 >= m) {
            break;
        }
    }
    for h in handles {
        let _ = h.join();
    }
    Ok(())
}
