//! Typed event log. One JSON object per line:
//! `{"t":..,"step":..,"robot":..,"type":..,"payload":{..}}`.

use std::io::{BufRead, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::arena::Resource;
use crate::error::{Error, Result};
use crate::naming::{Outcome, WordId, WordOrigin};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", content = "payload", rename_all = "snake_case")]
pub enum EventKind {
    /// Commitment fixed at start-up (locked populations).
    Locked { resource: Resource },
    /// Uncommitted robot stepped onto a resource.
    Discover { resource: Resource },
    Recruit { resource: Resource, sender: u32 },
    CrossInhibit { from: Resource, sender: u32 },
    Abandon { from: Resource },
    WordCreated {
        word: WordId,
        provenance: Resource,
        trigger: WordOrigin,
        committed: bool,
    },
    /// Utterance and every robot it reached.
    Utter { word: WordId, hearers: Vec<u32> },
    Game {
        word: WordId,
        speaker: u32,
        outcome: Outcome,
        before: Vec<WordId>,
        after: Vec<WordId>,
    },
    /// The last robot holding the word dropped it.
    Extinct { word: WordId },
    Converged { word: WordId },
    Timeout,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Event {
    pub t: f64,
    pub step: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub robot: Option<u32>,
    #[serde(flatten)]
    pub kind: EventKind,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct EventLog {
    pub events: Vec<Event>,
}

impl EventLog {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, step: u64, dt: f64, robot: Option<usize>, kind: EventKind) {
        // round to microseconds so `t` prints without float noise
        let t = (step as f64 * dt * 1e6).round() / 1e6;
        self.events.push(Event {
            t,
            step,
            robot: robot.map(|r| r as u32),
            kind,
        });
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Event> {
        self.events.iter()
    }

    pub fn write_jsonl<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for e in &self.events {
            serde_json::to_writer(&mut out, e)?;
            out.write_all(b"\n")?;
        }
        Ok(())
    }

    pub fn to_jsonl(&self) -> Vec<u8> {
        let mut buf = Vec::new();
        self.write_jsonl(&mut buf).expect("writing to memory");
        buf
    }

    pub fn read_jsonl<R: BufRead>(input: R, path: &Path) -> Result<Self> {
        let mut events = Vec::new();
        for (i, line) in input.lines().enumerate() {
            let line = line.map_err(|e| Error::io(path, e))?;
            if line.trim().is_empty() {
                continue;
            }
            let e = serde_json::from_str(&line).map_err(|e| Error::EventLog {
                path: path.to_path_buf(),
                line: i + 1,
                message: e.to_string(),
            })?;
            events.push(e);
        }
        Ok(EventLog { events })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let f = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Self::read_jsonl(std::io::BufReader::new(f), path)
    }
}
