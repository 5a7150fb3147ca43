//! Text formats: edge lists, signals, sparse triplets, eigenpair dumps and
//! the JSON tree description.
//!
//! Edge list: one edge per line `j<TAB>k<TAB>w` (weight optional, default
//! 1.0), `#` comments and blank lines ignored; a line with a single token
//! declares an isolated node (needed to express 1-node graphs). Arbitrary
//! node labels are remapped to dense indices with the label map kept
//! alongside. All numeric output uses shortest round-trip formatting, so
//! files parse back losslessly.

use std::collections::HashMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::graph::Graph;
use crate::multires::{PartitionTree, WaveletBasis};
use crate::sparse::SparseVector;
use crate::spectral::EigenPairs;
use crate::{Error, Result};

/// A parsed graph plus the node label map.
#[derive(Debug, Clone)]
pub struct LoadedGraph {
    pub graph: Graph,
    /// `labels[i]` is the original label of dense node `i`.
    pub labels: Vec<String>,
    /// True when labels were not already the dense range `0..n`.
    pub remapped: bool,
}

pub fn parse_edge_list(text: &str) -> Result<LoadedGraph> {
    struct RawEdge {
        j: String,
        k: String,
        w: f64,
    }
    let mut raw_edges: Vec<RawEdge> = Vec::new();
    let mut raw_nodes: Vec<String> = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let tokens: Vec<&str> = line.split_whitespace().collect();
        match tokens.len() {
            1 => raw_nodes.push(tokens[0].to_string()),
            2 | 3 => {
                let w = if tokens.len() == 3 {
                    tokens[2].parse::<f64>().map_err(|e| Error::Parse {
                        line: lineno + 1,
                        msg: format!("bad weight {:?}: {e}", tokens[2]),
                    })?
                } else {
                    1.0
                };
                raw_edges.push(RawEdge { j: tokens[0].to_string(), k: tokens[1].to_string(), w });
            }
            _ => {
                return Err(Error::Parse {
                    line: lineno + 1,
                    msg: format!("expected 1-3 fields, found {}", tokens.len()),
                })
            }
        }
    }

    let mut appearance: Vec<&String> = Vec::new();
    for e in &raw_edges {
        appearance.push(&e.j);
        appearance.push(&e.k);
    }
    appearance.extend(raw_nodes.iter());

    // Dense canonical integers keep their own ids; anything else is
    // remapped in first-appearance order.
    let canonical: Option<Vec<usize>> = appearance
        .iter()
        .map(|s| s.parse::<usize>().ok().filter(|v| v.to_string() == **s))
        .collect();
    let dense = canonical.as_ref().and_then(|ids| {
        let max = *ids.iter().max()?;
        let mut seen = vec![false; max + 1];
        for &i in ids {
            seen[i] = true;
        }
        seen.iter().all(|&s| s).then_some(max + 1)
    });

    let (n, labels, index_of): (usize, Vec<String>, HashMap<String, usize>) = match dense {
        Some(n) => {
            let labels: Vec<String> = (0..n).map(|i| i.to_string()).collect();
            let map = labels.iter().enumerate().map(|(i, l)| (l.clone(), i)).collect();
            (n, labels, map)
        }
        None => {
            let mut labels: Vec<String> = Vec::new();
            let mut map: HashMap<String, usize> = HashMap::new();
            for s in &appearance {
                if !map.contains_key(*s) {
                    map.insert((*s).clone(), labels.len());
                    labels.push((*s).clone());
                }
            }
            (labels.len(), labels, map)
        }
    };

    let edges: Vec<(usize, usize, f64)> = raw_edges
        .iter()
        .map(|e| (index_of[&e.j], index_of[&e.k], e.w))
        .collect();
    let graph = Graph::build(n, &edges)?;
    Ok(LoadedGraph { graph, labels, remapped: dense.is_none() })
}

pub fn read_edge_list(path: &Path) -> Result<LoadedGraph> {
    parse_edge_list(&std::fs::read_to_string(path)?)
}

pub fn format_edge_list(graph: &Graph, labels: &[String]) -> String {
    let mut out = String::new();
    let mut touched = vec![false; graph.node_count()];
    for e in graph.edges() {
        touched[e.j] = true;
        touched[e.k] = true;
        out.push_str(&format!("{}\t{}\t{}\n", labels[e.j], labels[e.k], e.w));
    }
    for (i, t) in touched.iter().enumerate() {
        if !t {
            out.push_str(&format!("{}\n", labels[i]));
        }
    }
    out
}

/// Default labels `0..n` for graphs built in memory.
pub fn default_labels(n: usize) -> Vec<String> {
    (0..n).map(|i| i.to_string()).collect()
}

/// Signal file: either CSV `node,value` rows (optional `node,value` header,
/// any node order) or one bare value per line in node order.
pub fn parse_signal(text: &str, labels: &[String]) -> Result<Vec<f64>> {
    let lines: Vec<(usize, &str)> = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
        .collect();
    if lines.is_empty() {
        return Err(Error::Parse { line: 0, msg: "empty signal file".into() });
    }

    let n = labels.len();
    if lines[0].1.contains(',') {
        let index_of: HashMap<&str, usize> =
            labels.iter().enumerate().map(|(i, l)| (l.as_str(), i)).collect();
        let mut values = vec![f64::NAN; n];
        let mut filled = vec![false; n];
        for &(lineno, line) in &lines {
            if line.eq_ignore_ascii_case("node,value") {
                continue;
            }
            let (node, value) = line.split_once(',').ok_or_else(|| Error::Parse {
                line: lineno,
                msg: "expected node,value".into(),
            })?;
            let idx = *index_of.get(node.trim()).ok_or_else(|| Error::Parse {
                line: lineno,
                msg: format!("unknown node label {:?}", node.trim()),
            })?;
            if filled[idx] {
                return Err(Error::Parse {
                    line: lineno,
                    msg: format!("duplicate value for node {:?}", node.trim()),
                });
            }
            values[idx] = value.trim().parse::<f64>().map_err(|e| Error::Parse {
                line: lineno,
                msg: format!("bad value {:?}: {e}", value.trim()),
            })?;
            filled[idx] = true;
        }
        if let Some(miss) = filled.iter().position(|&f| !f) {
            return Err(Error::Parse {
                line: 0,
                msg: format!("missing value for node {:?}", labels[miss]),
            });
        }
        Ok(values)
    } else {
        let mut values = Vec::with_capacity(n);
        for &(lineno, line) in &lines {
            values.push(line.parse::<f64>().map_err(|e| Error::Parse {
                line: lineno,
                msg: format!("bad value {line:?}: {e}"),
            })?);
        }
        if values.len() != n {
            return Err(Error::Parse {
                line: 0,
                msg: format!("expected {n} values, found {}", values.len()),
            });
        }
        Ok(values)
    }
}

pub fn read_signal(path: &Path, labels: &[String]) -> Result<Vec<f64>> {
    parse_signal(&std::fs::read_to_string(path)?, labels)
}

pub fn format_signal(values: &[f64], labels: &[String]) -> String {
    let mut out = String::from("node,value\n");
    for (label, v) in labels.iter().zip(values) {
        out.push_str(&format!("{label},{v}\n"));
    }
    out
}

/// Sparse columns as `row,col,value` triplets, column-major.
pub fn format_triplets(columns: &[SparseVector]) -> String {
    let mut out = String::from("row,col,value\n");
    for (c, col) in columns.iter().enumerate() {
        for (r, v) in col.iter() {
            out.push_str(&format!("{r},{c},{v}\n"));
        }
    }
    out
}

/// Parses a triplet dump back into sparse columns. Dimensions are inferred
/// (every basis/dictionary dump covers all rows and has no empty trailing
/// column).
pub fn parse_triplets(text: &str) -> Result<Vec<SparseVector>> {
    let mut entries: Vec<(usize, usize, f64)> = Vec::new();
    let mut max_row = 0usize;
    let mut max_col = 0usize;
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.eq_ignore_ascii_case("row,col,value") {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 3 {
            return Err(Error::Parse { line: lineno + 1, msg: "expected row,col,value".into() });
        }
        let parse_idx = |s: &str| {
            s.trim().parse::<usize>().map_err(|e| Error::Parse {
                line: lineno + 1,
                msg: format!("bad index {s:?}: {e}"),
            })
        };
        let r = parse_idx(fields[0])?;
        let c = parse_idx(fields[1])?;
        let v = fields[2].trim().parse::<f64>().map_err(|e| Error::Parse {
            line: lineno + 1,
            msg: format!("bad value {:?}: {e}", fields[2]),
        })?;
        max_row = max_row.max(r);
        max_col = max_col.max(c);
        entries.push((r, c, v));
    }
    if entries.is_empty() {
        return Err(Error::Parse { line: 0, msg: "empty triplet file".into() });
    }
    let dim = max_row + 1;
    let mut per_col: Vec<Vec<(usize, f64)>> = vec![Vec::new(); max_col + 1];
    for (r, c, v) in entries {
        per_col[c].push((r, v));
    }
    Ok(per_col
        .into_iter()
        .map(|mut col| {
            col.sort_by_key(|&(r, _)| r);
            let (indices, values) = col.into_iter().unzip();
            SparseVector::new(dim, indices, values)
        })
        .collect())
}

/// Eigenpair dump: first line the eigenvalues, then one line per matrix row.
pub fn format_eigenpairs(eigen: &EigenPairs) -> String {
    let mut out = String::new();
    out.push_str(
        &eigen.values().iter().map(|v| v.to_string()).collect::<Vec<_>>().join(","),
    );
    out.push('\n');
    let v = eigen.vectors();
    for r in 0..v.nrows() {
        out.push_str(
            &(0..v.ncols()).map(|c| v[[r, c]].to_string()).collect::<Vec<_>>().join(","),
        );
        out.push('\n');
    }
    out
}

/// Parses an eigenpair dump back into (values, row-major vectors).
pub fn parse_eigenpairs(text: &str) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (lineno, first) = lines
        .next()
        .ok_or_else(|| Error::Parse { line: 0, msg: "empty eigenpair file".into() })?;
    let parse_row = |lineno: usize, line: &str| -> Result<Vec<f64>> {
        line.split(',')
            .map(|f| {
                f.trim().parse::<f64>().map_err(|e| Error::Parse {
                    line: lineno + 1,
                    msg: format!("bad value {f:?}: {e}"),
                })
            })
            .collect()
    };
    let values = parse_row(lineno, first)?;
    let mut rows = Vec::new();
    for (lineno, line) in lines {
        rows.push(parse_row(lineno, line)?);
    }
    Ok((values, rows))
}

/// JSON description of a partition tree: piece membership per node, levels,
/// depth.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct TreeJson {
    pub n: usize,
    pub depth: usize,
    pub nodes: Vec<TreeNodeJson>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct TreeNodeJson {
    pub id: usize,
    pub level: usize,
    pub parent: Option<usize>,
    pub children: Option<(usize, usize)>,
    pub nodes: Vec<usize>,
}

impl From<&PartitionTree> for TreeJson {
    fn from(tree: &PartitionTree) -> Self {
        TreeJson {
            n: tree.graph_size(),
            depth: tree.depth(),
            nodes: tree
                .nodes()
                .iter()
                .enumerate()
                .map(|(id, node)| TreeNodeJson {
                    id,
                    level: node.level,
                    parent: node.parent,
                    children: node.children,
                    nodes: node.piece.nodes().to_vec(),
                })
                .collect(),
        }
    }
}

/// Convenience: basis columns as triplet text.
pub fn format_basis(basis: &WaveletBasis) -> String {
    format_triplets(basis.columns())
}
