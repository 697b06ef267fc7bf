//! File formats.
//!
//! - graph JSON: `{"n": 3, "edges": [[0, 1], [1, 2]]}`
//! - vertex set JSON: `{"vertices": [0, 2]}`
//! - signal CSV: rows `vertex_id,real,imag`, no header required; vertices
//!   without a row read as zero.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, VertexSet};
use crate::spectral::{C64, Signal};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphFile {
    pub n: usize,
    pub edges: Vec<[usize; 2]>,
}

impl From<&Graph> for GraphFile {
    fn from(g: &Graph) -> Self {
        GraphFile {
            n: g.n(),
            edges: g.edges().into_iter().map(|(u, v)| [u, v]).collect(),
        }
    }
}

impl TryFrom<GraphFile> for Graph {
    type Error = Error;

    fn try_from(file: GraphFile) -> Result<Graph> {
        let edges: Vec<(usize, usize)> = file.edges.iter().map(|e| (e[0], e[1])).collect();
        Graph::new(file.n, &edges)
    }
}

pub fn read_graph(reader: impl Read) -> Result<Graph> {
    let file: GraphFile = serde_json::from_reader(reader)?;
    Graph::try_from(file)
}

pub fn graph_to_json(g: &Graph) -> Result<String> {
    Ok(serde_json::to_string(&GraphFile::from(g))?)
}

/// Reads a vertex set and checks it against the vertex count.
pub fn read_vertex_set(reader: impl Read, n: usize) -> Result<VertexSet> {
    let raw: VertexSet = serde_json::from_reader(reader)?;
    VertexSet::new(n, raw.iter().copied())
}

fn parse_rows(reader: impl Read) -> Result<Vec<(usize, C64)>> {
    let mut csv = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(reader);
    let mut rows = Vec::new();
    for (line, record) in csv.records().enumerate() {
        let record = record?;
        if line == 0 && record.get(0).is_some_and(|f| f.parse::<usize>().is_err()) {
            continue;
        }
        if record.len() != 3 {
            return Err(Error::Format(format!(
                "row {}: expected vertex_id,real,imag, got {} fields",
                line + 1,
                record.len()
            )));
        }
        let field = |i: usize| -> Result<f64> {
            record[i]
                .parse::<f64>()
                .map_err(|e| Error::Format(format!("row {}: {e}", line + 1)))
        };
        let vertex = record[0]
            .parse::<usize>()
            .map_err(|e| Error::Format(format!("row {}: {e}", line + 1)))?;
        rows.push((vertex, C64::new(field(1)?, field(2)?)));
    }
    Ok(rows)
}

pub fn read_signal(reader: impl Read, n: usize) -> Result<Signal> {
    let mut values = vec![C64::new(0.0, 0.0); n];
    let mut seen = vec![false; n];
    for (vertex, z) in parse_rows(reader)? {
        if vertex >= n {
            return Err(Error::VertexOutOfRange { vertex, n });
        }
        if std::mem::replace(&mut seen[vertex], true) {
            return Err(Error::Format(format!("vertex {vertex} listed twice")));
        }
        values[vertex] = z;
    }
    Signal::new(values)
}

/// Reads samples for the members of `w`, in `w`'s order.
///
/// Rows for vertices outside `w` are rejected; members without a row read as zero.
pub fn read_samples(reader: impl Read, w: &VertexSet) -> Result<Vec<C64>> {
    let mut values = vec![C64::new(0.0, 0.0); w.len()];
    let mut seen = vec![false; w.len()];
    for (vertex, z) in parse_rows(reader)? {
        let pos = w.as_slice().binary_search(&vertex).map_err(|_| {
            Error::SampleIndexMismatch(format!("vertex {vertex} is not in the sampling set"))
        })?;
        if std::mem::replace(&mut seen[pos], true) {
            return Err(Error::Format(format!("vertex {vertex} listed twice")));
        }
        values[pos] = z;
    }
    if let Some(i) = values.iter().position(|z| !(z.re.is_finite() && z.im.is_finite())) {
        return Err(Error::Format(format!("non-finite sample at vertex {}", w.as_slice()[i])));
    }
    Ok(values)
}

/// Writes `(vertex, value)` rows; `f64` display is the shortest round-trip form.
pub fn write_rows<'a>(
    mut writer: impl Write,
    rows: impl IntoIterator<Item = (usize, &'a C64)>,
) -> Result<()> {
    for (v, z) in rows {
        writeln!(writer, "{v},{},{}", z.re, z.im)?;
    }
    Ok(())
}

pub fn write_signal(writer: impl Write, f: &Signal) -> Result<()> {
    write_rows(writer, f.values().iter().enumerate())
}
