//! Flat-file formats for graphs and node attributes.
//!
//! * Edge list: UTF-8 TSV, one `source<TAB>target` pair per line, zero-based
//!   ids. Blank lines and lines starting with `#` are skipped.
//! * Node table: CSV with header `node_id,screen_name,role,followers`; node
//!   ids must cover `0..n` exactly once.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{DirectedGraph, GraphError, NodeTable, Role};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    File {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub(crate) fn open(path: &Path) -> Result<File, IoError> {
    File::open(path).map_err(|source| IoError::File {
        path: path.to_path_buf(),
        source,
    })
}

pub(crate) fn create(path: &Path) -> Result<File, IoError> {
    File::create(path).map_err(|source| IoError::File {
        path: path.to_path_buf(),
        source,
    })
}

/// Parses edge pairs from TSV text.
pub fn parse_edge_list<R: Read>(reader: R) -> Result<Vec<(usize, usize)>, IoError> {
    let mut pairs = Vec::new();
    for (idx, line) in BufReader::new(reader).lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut fields = trimmed.split('\t');
        let parse = |f: Option<&str>| -> Result<usize, IoError> {
            let f = f.ok_or_else(|| IoError::Parse {
                line: idx + 1,
                message: "expected source<TAB>target".into(),
            })?;
            f.trim().parse::<usize>().map_err(|e| IoError::Parse {
                line: idx + 1,
                message: format!("bad node id {f:?}: {e}"),
            })
        };
        let s = parse(fields.next())?;
        let t = parse(fields.next())?;
        if fields.next().is_some() {
            return Err(IoError::Parse {
                line: idx + 1,
                message: "more than two fields".into(),
            });
        }
        pairs.push((s, t));
    }
    Ok(pairs)
}

/// Reads an edge list; `n` defaults to `max id + 1`.
pub fn read_edge_list(path: &Path, n: Option<usize>) -> Result<DirectedGraph, IoError> {
    let pairs = parse_edge_list(open(path)?)?;
    let n = n.unwrap_or_else(|| {
        pairs
            .iter()
            .map(|&(s, t)| s.max(t) + 1)
            .max()
            .unwrap_or(0)
    });
    Ok(DirectedGraph::from_edge_list(&pairs, n)?)
}

pub fn write_edge_list<W: Write>(g: &DirectedGraph, writer: W) -> Result<(), IoError> {
    let mut w = BufWriter::new(writer);
    for (s, t) in g.edges() {
        writeln!(w, "{s}\t{t}")?;
    }
    w.flush()?;
    Ok(())
}

pub fn save_edge_list(g: &DirectedGraph, path: &Path) -> Result<(), IoError> {
    write_edge_list(g, create(path)?)
}

#[derive(Debug, Serialize, Deserialize)]
struct NodeRow {
    node_id: usize,
    screen_name: String,
    role: String,
    followers: u64,
}

pub fn parse_node_table<R: Read>(reader: R) -> Result<NodeTable, IoError> {
    let mut rdr = csv::Reader::from_reader(reader);
    let mut rows = Vec::new();
    for (idx, rec) in rdr.deserialize::<NodeRow>().enumerate() {
        let row = rec?;
        let role = row.role.parse::<Role>().map_err(|e| IoError::Parse {
            line: idx + 2,
            message: e.to_string(),
        })?;
        rows.push((row.node_id, row.screen_name, role, row.followers));
    }
    let n = rows.len();
    let mut table = NodeTable {
        screen_names: vec![String::new(); n],
        roles: vec![Role::Ordinary; n],
        followers: vec![0; n],
    };
    let mut seen = vec![false; n];
    for (idx, (id, name, role, followers)) in rows.into_iter().enumerate() {
        if id >= n || seen[id] {
            return Err(IoError::Parse {
                line: idx + 2,
                message: format!("node_id {id} duplicated or outside 0..{n}"),
            });
        }
        seen[id] = true;
        table.screen_names[id] = name;
        table.roles[id] = role;
        table.followers[id] = followers;
    }
    Ok(table)
}

pub fn read_node_table(path: &Path) -> Result<NodeTable, IoError> {
    parse_node_table(open(path)?)
}

pub fn write_node_table<W: Write>(nodes: &NodeTable, writer: W) -> Result<(), IoError> {
    let mut w = csv::Writer::from_writer(writer);
    for v in 0..nodes.len() {
        w.serialize(NodeRow {
            node_id: v,
            screen_name: nodes.screen_names[v].clone(),
            role: nodes.roles[v].as_str().to_string(),
            followers: nodes.followers[v],
        })?;
    }
    w.flush()?;
    Ok(())
}

pub fn save_node_table(nodes: &NodeTable, path: &Path) -> Result<(), IoError> {
    write_node_table(nodes, create(path)?)
}
