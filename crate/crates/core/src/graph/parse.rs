use std::collections::BTreeMap;
use std::io::{Read, Write};

use super::{NodeId, WeightedEdge};
use crate::error::{Error, Result};

/// Layout of an interaction log, taken from its header row.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LogKind {
    /// `source,target`: one row per event.
    Events,
    /// `source,target,weight`: pre-aggregated counts.
    Edges,
}

/// Result of parsing an interaction log.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParsedLog {
    pub kind: LogKind,
    /// Number of data rows read.
    pub rows: u64,
    /// Number of events represented (sum of weights).
    pub events: u64,
    /// Events whose source equals their target; these are discarded.
    pub self_loops: u64,
    /// Aggregated edges sorted by `(source, target)`.
    pub edges: Vec<WeightedEdge>,
}

/// Reads a `source,target[,weight]` CSV log and aggregates it per ordered
/// pair. Row numbers in errors count the header as row 1.
pub fn parse_interaction_log<R: Read>(reader: R) -> Result<ParsedLog> {
    let mut csv = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(reader);
    let mut records = csv.records();

    let header = match records.next() {
        Some(rec) => rec?,
        None => {
            return Err(Error::Parse {
                row: 1,
                message: "missing header row".into(),
            })
        }
    };
    let columns: Vec<&str> = header.iter().map(str::trim).collect();
    let kind = match columns.as_slice() {
        ["source", "target"] => LogKind::Events,
        ["source", "target", "weight"] => LogKind::Edges,
        _ => {
            return Err(Error::Parse {
                row: 1,
                message: format!(
                    "expected header `source,target` or `source,target,weight`, got `{}`",
                    columns.join(",")
                ),
            })
        }
    };
    let width = columns.len();

    let mut pairs: BTreeMap<(NodeId, NodeId), u64> = BTreeMap::new();
    let mut rows = 0u64;
    let mut events = 0u64;
    let mut self_loops = 0u64;
    for (i, rec) in records.enumerate() {
        let row = i as u64 + 2;
        let rec = rec?;
        if rec.len() != width {
            return Err(Error::Parse {
                row,
                message: format!("expected {width} columns, found {}", rec.len()),
            });
        }
        let source = NodeId::new(&rec[0]).map_err(|_| Error::Parse {
            row,
            message: "empty source id".into(),
        })?;
        let target = NodeId::new(&rec[1]).map_err(|_| Error::Parse {
            row,
            message: "empty target id".into(),
        })?;
        let weight = match kind {
            LogKind::Events => 1,
            LogKind::Edges => match rec[2].trim().parse::<u64>() {
                Ok(w) if w > 0 => w,
                _ => {
                    return Err(Error::Parse {
                        row,
                        message: format!("weight must be a positive integer, got `{}`", &rec[2]),
                    })
                }
            },
        };
        rows += 1;
        events += weight;
        if source == target {
            self_loops += weight;
            continue;
        }
        *pairs.entry((source, target)).or_insert(0) += weight;
    }

    let edges = pairs
        .into_iter()
        .map(|((source, target), weight)| WeightedEdge {
            source,
            target,
            weight,
        })
        .collect();
    Ok(ParsedLog {
        kind,
        rows,
        events,
        self_loops,
        edges,
    })
}

/// Writes a `source,target,weight` edge list sorted by `(source, target)`.
pub fn write_edge_list<'a, W, I>(writer: W, edges: I) -> Result<()>
where
    W: Write,
    I: IntoIterator<Item = &'a WeightedEdge>,
{
    let mut sorted: Vec<&WeightedEdge> = edges.into_iter().collect();
    sorted.sort_by(|a, b| (&a.source, &a.target).cmp(&(&b.source, &b.target)));
    let mut out = csv::Writer::from_writer(writer);
    out.write_record(["source", "target", "weight"])?;
    for e in sorted {
        out.write_record([e.source.as_str(), e.target.as_str(), &e.weight.to_string()])?;
    }
    out.flush()?;
    Ok(())
}
