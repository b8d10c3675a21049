//! Line-oriented edge-list format:
//!
//! ```text
//! # comment
//! n 3
//! edge 1 3
//! ```

use super::DirectedGraph;
use crate::error::{Error, Result};

pub fn parse_graph(text: &str) -> Result<DirectedGraph> {
    let mut n: Option<usize> = None;
    let mut edges = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line_no = lineno + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |message: &str| Error::Parse {
            line: line_no,
            message: format!("{message}: `{line}`"),
        };
        let mut words = line.split_whitespace();
        let keyword = words.next().unwrap_or_default();
        let args: Vec<&str> = words.collect();
        match (keyword, n) {
            ("n", None) => {
                let [count] = args[..] else {
                    return Err(err("expected `n <int>`"));
                };
                let count: usize = count.parse().map_err(|_| err("bad agent count"))?;
                if count == 0 {
                    return Err(err("agent count must be positive"));
                }
                n = Some(count);
            }
            ("n", Some(_)) => return Err(err("agent count given twice")),
            (_, None) => return Err(err("first line must be `n <int>`")),
            ("edge", Some(count)) => {
                let [u, v] = args[..] else {
                    return Err(err("expected `edge <u> <v>`"));
                };
                let u: u64 = u.parse().map_err(|_| err("bad edge source"))?;
                let v: u64 = v.parse().map_err(|_| err("bad edge target"))?;
                for x in [u, v] {
                    if x == 0 || x > count as u64 {
                        return Err(Error::AgentOutOfRange { agent: x, n: count });
                    }
                }
                edges.push((u as u32, v as u32));
            }
            _ => return Err(err("unknown directive")),
        }
    }
    let n = n.ok_or(Error::Parse {
        line: 0,
        message: "missing `n <int>` line".into(),
    })?;
    DirectedGraph::new(n, edges)
}

/// Canonical text: the `n` line followed by edges in ascending `(u, v)` order.
pub fn serialize_graph(g: &DirectedGraph) -> String {
    let mut out = format!("n {}\n", g.n());
    for (u, v) in g.edges() {
        out.push_str(&format!("edge {u} {v}\n"));
    }
    out
}
