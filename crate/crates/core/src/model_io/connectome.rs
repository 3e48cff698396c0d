use std::collections::HashMap;
use std::path::Path;

use thiserror::Error;

use crate::graph::BinaryGraph;

#[derive(Debug, Error)]
pub enum ConnectomeError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("connectome has no edges besides self-loops")]
    EmptyGraph,
}

/// A biological network loaded from an edge list.
///
/// Node labels from the file are re-indexed densely in order of first
/// appearance in a kept edge; self-loops are dropped before indexing. Edges
/// keep their direction as written; measures treat them as undirected.
#[derive(Debug, Clone, PartialEq)]
pub struct ConnectomeGraph {
    pub name: String,
    pub n: usize,
    pub edges: Vec<(usize, usize, f64)>,
    /// Original label of every dense index.
    pub labels: Vec<String>,
    pub dropped_self_loops: usize,
}

impl ConnectomeGraph {
    /// Undirected presence/absence graph: `{i, j}` exists iff either
    /// direction carries positive weight.
    pub fn to_binary(&self) -> BinaryGraph {
        BinaryGraph::from_edges(
            self.n,
            self.edges
                .iter()
                .filter(|e| e.2 > 0.0)
                .map(|&(s, d, _)| (s, d)),
        )
    }
}

/// Parses `src dst [weight]` lines. `#` starts a comment line.
pub fn parse_connectome(name: &str, text: &str) -> Result<ConnectomeGraph, ConnectomeError> {
    let mut index: HashMap<String, usize> = HashMap::new();
    let mut labels = Vec::new();
    let mut edge_slot: HashMap<(usize, usize), usize> = HashMap::new();
    let mut edges: Vec<(usize, usize, f64)> = Vec::new();
    let mut dropped = 0;

    let mut intern = |label: &str, labels: &mut Vec<String>| {
        *index.entry(label.to_string()).or_insert_with(|| {
            labels.push(label.to_string());
            labels.len() - 1
        })
    };

    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |message: String| ConnectomeError::Parse {
            line: lineno + 1,
            message,
        };
        let fields: Vec<&str> = line.split_whitespace().collect();
        let weight = match fields[..] {
            [_, _] => 1.0,
            [_, _, w] => w
                .parse::<f64>()
                .map_err(|_| err(format!("bad weight {w:?}")))?,
            _ => return Err(err(format!("expected 2 or 3 fields, got {}", fields.len()))),
        };
        if !(weight.is_finite() && weight > 0.0) {
            return Err(err(format!("weight must be positive, got {weight}")));
        }
        if fields[0] == fields[1] {
            dropped += 1;
            continue;
        }
        let src = intern(fields[0], &mut labels);
        let dst = intern(fields[1], &mut labels);
        match edge_slot.get(&(src, dst)) {
            Some(&slot) => edges[slot].2 = edges[slot].2.max(weight),
            None => {
                edge_slot.insert((src, dst), edges.len());
                edges.push((src, dst, weight));
            }
        }
    }
    if edges.is_empty() {
        return Err(ConnectomeError::EmptyGraph);
    }
    Ok(ConnectomeGraph {
        name: name.to_string(),
        n: labels.len(),
        edges,
        labels,
        dropped_self_loops: dropped,
    })
}

/// Reads an edge list; the graph is named after the file stem.
pub fn read_connectome(path: impl AsRef<Path>) -> Result<ConnectomeGraph, ConnectomeError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)?;
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    parse_connectome(&name, &text)
}

/// Edge-list text that [`parse_connectome`] reads back to the same graph.
pub fn write_connectome(g: &ConnectomeGraph) -> String {
    let mut out = format!("# {}: {} nodes, {} edges\n", g.name, g.n, g.edges.len());
    for &(s, d, w) in &g.edges {
        out.push_str(&format!("{} {} {}\n", g.labels[s], g.labels[d], w));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal() {
        let g = parse_connectome("t", "0 1\n1 2\n").unwrap();
        assert_eq!(g.n, 3);
        assert_eq!(g.edges, vec![(0, 1, 1.0), (1, 2, 1.0)]);
    }

    #[test]
    fn duplicates_keep_max() {
        let g = parse_connectome("t", "0 1 2.0\n0 1 5.0\n").unwrap();
        assert_eq!(g.edges, vec![(0, 1, 5.0)]);
    }

    #[test]
    fn only_self_loop_is_empty() {
        assert!(matches!(
            parse_connectome("t", "0 0 1.0\n"),
            Err(ConnectomeError::EmptyGraph)
        ));
    }

    #[test]
    fn labels_reindexed_in_first_appearance_order() {
        let g =
            parse_connectome("t", "# header\nAVAL RIAR 3\nRIAR AVAL\nX X\n\nZ AVAL 0.5\n").unwrap();
        assert_eq!(g.labels, ["AVAL", "RIAR", "Z"]);
        assert_eq!(g.dropped_self_loops, 1);
        assert_eq!(g.edges, vec![(0, 1, 3.0), (1, 0, 1.0), (2, 0, 0.5)]);
        assert_eq!(g.to_binary().edge_count(), 2);
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        match parse_connectome("t", "0 1\n0 1 abc\n") {
            Err(ConnectomeError::Parse { line: 2, .. }) => {}
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            parse_connectome("t", "0 1 -1\n"),
            Err(ConnectomeError::Parse { line: 1, .. })
        ));
        assert!(matches!(
            parse_connectome("t", "0\n"),
            Err(ConnectomeError::Parse { line: 1, .. })
        ));
    }

    #[test]
    fn write_then_read_is_identity() {
        let g = parse_connectome("w", "a b 0.1\nb c 2\nc a 1e-3\nd d\n").unwrap();
        let mut back = parse_connectome("w", &write_connectome(&g)).unwrap();
        assert_eq!(back.dropped_self_loops, 0);
        back.dropped_self_loops = g.dropped_self_loops;
        assert_eq!(back, g);
    }
}
