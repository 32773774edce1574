//! Orientation JSON and DOT.
//!
//! JSON layout, with arcs in lexicographic order and one arc per line:
//!
//! ```text
//! {
//!   "parts": [1, 1, 1],
//!   "arcs": [
//!     [0, 1],
//!     [1, 2],
//!     [2, 0]
//!   ]
//! }
//! ```
//!
//! An optional `"completion_log"` array of strings follows `"arcs"` for
//! constructed orientations. Writing is canonical, so reading a file and
//! writing it back reproduces it byte for byte.

use std::fmt::Write as _;

use serde::Deserialize;
use thiserror::Error;

use crate::graph::{GraphError, GraphTopology, Orientation};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrientationDoc {
    pub orientation: Orientation,
    pub completion_log: Option<Vec<String>>,
}

#[derive(Deserialize)]
struct RawDoc {
    parts: Vec<usize>,
    arcs: Vec<(usize, usize)>,
    #[serde(default)]
    completion_log: Option<Vec<String>>,
}

pub fn parse_orientation(text: &str) -> Result<OrientationDoc, IoError> {
    let raw: RawDoc = serde_json::from_str(text).map_err(|e| IoError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let topology = GraphTopology::new(&raw.parts)?;
    let orientation = Orientation::new(topology, &raw.arcs)?;
    Ok(OrientationDoc {
        orientation,
        completion_log: raw.completion_log,
    })
}

pub fn read_orientation(path: &std::path::Path) -> Result<OrientationDoc, IoError> {
    parse_orientation(&std::fs::read_to_string(path)?)
}

pub fn orientation_json(d: &Orientation, completion_log: Option<&[String]>) -> String {
    let parts: Vec<String> = d.topology().parts().iter().map(|p| p.to_string()).collect();
    let mut s = String::new();
    s.push_str("{\n");
    let _ = writeln!(s, "  \"parts\": [{}],", parts.join(", "));
    s.push_str("  \"arcs\": [");
    let arcs = d.arcs();
    for (i, (u, v)) in arcs.iter().enumerate() {
        let sep = if i == 0 { "\n" } else { ",\n" };
        let _ = write!(s, "{sep}    [{u}, {v}]");
    }
    s.push_str(if arcs.is_empty() { "]" } else { "\n  ]" });
    if let Some(log) = completion_log {
        s.push_str(",\n  \"completion_log\": [");
        for (i, line) in log.iter().enumerate() {
            let sep = if i == 0 { "\n" } else { ",\n" };
            let quoted = serde_json::to_string(line).expect("string serializes");
            let _ = write!(s, "{sep}    {quoted}");
        }
        s.push_str(if log.is_empty() { "]" } else { "\n  ]" });
    }
    s.push_str("\n}\n");
    s
}

impl OrientationDoc {
    pub fn to_json(&self) -> String {
        orientation_json(&self.orientation, self.completion_log.as_deref())
    }
}

/// Graphviz digraph with one same-rank cluster per part.
pub fn orientation_dot(d: &Orientation) -> String {
    let t = d.topology();
    let mut s = String::new();
    let _ = writeln!(s, "digraph \"{t}\" {{");
    for i in 0..t.n_parts() {
        let _ = writeln!(s, "  subgraph cluster_{i} {{");
        let _ = writeln!(s, "    label=\"V{}\";", i + 1);
        s.push_str("    rank=same;\n");
        for v in t.part_range(i) {
            let _ = writeln!(s, "    {v} [label=\"{}\"];", t.label(v));
        }
        s.push_str("  }\n");
    }
    for (u, v) in d.arcs() {
        let _ = writeln!(s, "  {u} -> {v};");
    }
    s.push_str("}\n");
    s
}
