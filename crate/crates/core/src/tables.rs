//! RFC 4180 CSV encodings of analysis results.
//!
//! Writers return the encoded text so callers can assemble a whole bundle
//! before touching the filesystem. Undefined metrics are written as empty
//! fields.

use std::collections::BTreeMap;
use std::io::Read;

use crate::centrality::PageRankVector;
use crate::community::{ConsensusClustering, UNASSIGNED_LABEL};
use crate::error::{Error, Result};
use crate::graph::{write_edge_list, DirectedGraph, NodeId};
use crate::report::{ClusterProfile, InteractionMatrix};
use crate::topology::{CoreDecomposition, DegreeDistribution, LorenzCurve, PathLengthMode};

fn encode<F>(header: &[&str], fill: F) -> String
where
    F: FnOnce(&mut csv::Writer<Vec<u8>>) -> csv::Result<()>,
{
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("writing to memory");
    fill(&mut w).expect("writing to memory");
    String::from_utf8(w.into_inner().expect("flushing to memory")).expect("UTF-8 input")
}

fn fixed(x: f64, decimals: usize) -> String {
    format!("{x:.decimals$}")
}

fn opt_fixed(x: Option<f64>) -> String {
    x.map(|v| fixed(v, 6)).unwrap_or_default()
}

pub fn edge_list_csv(g: &DirectedGraph) -> String {
    let edges: Vec<_> = g.edges().collect();
    let mut buf = Vec::new();
    write_edge_list(&mut buf, &edges).expect("writing to memory");
    String::from_utf8(buf).expect("UTF-8 ids")
}

/// `node_id,label,stability`, sorted by `(label, node_id)`.
pub fn clusters_csv(cc: &ConsensusClustering) -> String {
    encode(&["node_id", "label", "stability"], |w| {
        for (id, label, stability) in cc.rows() {
            w.write_record([id.as_str(), label, &fixed(stability, 6)])?;
        }
        Ok(())
    })
}

/// Reads a `node_id,label,stability` table for graph `g`. Labels keep their
/// order of first appearance; graph nodes absent from the file are
/// unassigned.
pub fn read_clusters_csv<R: Read>(reader: R, g: &DirectedGraph) -> Result<ConsensusClustering> {
    let mut csv = csv::ReaderBuilder::new().flexible(true).from_reader(reader);
    let header: Vec<String> = csv
        .headers()?
        .iter()
        .map(|h| h.trim().to_string())
        .collect();
    if header != ["node_id", "label", "stability"] {
        return Err(Error::Parse {
            row: 1,
            message: format!(
                "expected header `node_id,label,stability`, got `{}`",
                header.join(",")
            ),
        });
    }
    let mut labels: Vec<String> = Vec::new();
    let mut rows = Vec::new();
    for (i, rec) in csv.records().enumerate() {
        let row = i as u64 + 2;
        let rec = rec?;
        if rec.len() != 3 {
            return Err(Error::Parse {
                row,
                message: format!("expected 3 columns, found {}", rec.len()),
            });
        }
        let id = NodeId::new(&rec[0]).map_err(|_| Error::Parse {
            row,
            message: "empty node id".into(),
        })?;
        let label = &rec[1];
        if label.is_empty() {
            return Err(Error::Parse {
                row,
                message: "empty label".into(),
            });
        }
        let stability = if rec[2].trim().is_empty() {
            1.0
        } else {
            rec[2].trim().parse::<f64>().map_err(|_| Error::Parse {
                row,
                message: format!("invalid stability `{}`", &rec[2]),
            })?
        };
        let label = (label != UNASSIGNED_LABEL).then(|| label.to_string());
        if let Some(l) = &label {
            if !labels.contains(l) {
                labels.push(l.clone());
            }
        }
        rows.push((id, label, stability));
    }
    ConsensusClustering::from_assignments(g, &labels, rows, None)
}

/// One row per cluster. `l` follows `mode`; both conventions are also
/// written in their own columns.
pub fn profiles_csv(profiles: &[ClusterProfile], mode: PathLengthMode) -> String {
    encode(
        &[
            "label",
            "N",
            "E",
            "G_in",
            "C_in",
            "Cl",
            "l",
            "l_paper_literal",
            "l_reachable_only",
            "k_max",
            "k_avg",
            "k_std",
        ],
        |w| {
            for p in profiles {
                w.write_record([
                    p.label.clone(),
                    p.nodes.to_string(),
                    p.edges.to_string(),
                    opt_fixed(p.gini_in),
                    opt_fixed(p.centralization_in),
                    opt_fixed(p.clustering),
                    opt_fixed(p.path_length(mode)),
                    opt_fixed(p.path_length_paper),
                    opt_fixed(p.path_length_reachable),
                    p.k_max.map(|k| k.to_string()).unwrap_or_default(),
                    opt_fixed(p.k_avg),
                    opt_fixed(p.k_std),
                ])?;
            }
            Ok(())
        },
    )
}

fn matrix_csv<T, F>(m: &InteractionMatrix, cells: &[Vec<T>], format: F) -> String
where
    F: Fn(&T) -> String,
{
    let mut header = vec![""];
    header.extend(m.columns.iter().map(String::as_str));
    encode(&header, |w| {
        for (label, row) in m.rows.iter().zip(cells) {
            let mut record = vec![label.clone()];
            record.extend(row.iter().map(&format));
            w.write_record(record)?;
        }
        Ok(())
    })
}

/// Row-normalised matrix at two decimals.
pub fn interaction_matrix_csv(m: &InteractionMatrix) -> String {
    matrix_csv(m, &m.normalized, |x| fixed(*x, 2))
}

pub fn interaction_matrix_raw_csv(m: &InteractionMatrix) -> String {
    matrix_csv(m, &m.raw, u64::to_string)
}

/// `label,rank,node_id,pagerank`, ranks starting at 1.
pub fn top_nodes_csv(table: &[(String, Vec<(NodeId, f64)>)]) -> String {
    encode(&["label", "rank", "node_id", "pagerank"], |w| {
        for (label, ranked) in table {
            for (rank, (id, score)) in ranked.iter().enumerate() {
                w.write_record([
                    label.as_str(),
                    &(rank + 1).to_string(),
                    id.as_str(),
                    &fixed(*score, 6),
                ])?;
            }
        }
        Ok(())
    })
}

pub fn cluster_sizes_csv(sizes: &BTreeMap<usize, usize>) -> String {
    encode(&["size", "count"], |w| {
        for (size, count) in sizes {
            w.write_record([size.to_string(), count.to_string()])?;
        }
        Ok(())
    })
}

/// `node_id,pagerank`, descending by score with ties by id.
pub fn pagerank_csv(pr: &PageRankVector) -> String {
    let ranked = crate::centrality::rank_nodes(pr, None, pr.len());
    encode(&["node_id", "pagerank"], |w| {
        for (id, score) in &ranked {
            w.write_record([id.as_str(), &fixed(*score, 6)])?;
        }
        Ok(())
    })
}

pub fn lorenz_csv(curve: Option<&LorenzCurve>) -> String {
    encode(&["X", "Y"], |w| {
        for (x, y) in curve.map(|c| c.points.as_slice()).unwrap_or_default() {
            w.write_record([fixed(*x, 6), fixed(*y, 6)])?;
        }
        Ok(())
    })
}

/// `k,node_count`: nodes whose k-index equals `k`.
pub fn kcore_csv(cores: &CoreDecomposition) -> String {
    encode(&["k", "node_count"], |w| {
        for (k, count) in &cores.shells {
            w.write_record([k.to_string(), count.to_string()])?;
        }
        Ok(())
    })
}

pub fn indegree_csv(dist: &DegreeDistribution) -> String {
    encode(&["k", "count", "fraction", "cumulative"], |w| {
        for b in &dist.bins {
            w.write_record([
                b.k.to_string(),
                b.count.to_string(),
                fixed(b.fraction, 6),
                fixed(b.cumulative, 6),
            ])?;
        }
        Ok(())
    })
}

/// File-name-safe form of a label: characters outside `[A-Za-z0-9_-]`
/// become `_`.
pub fn file_stem(label: &str) -> String {
    label
        .chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || c == '-' || c == '_' {
                c
            } else {
                '_'
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_graph, WeightedEdge};

    fn graph() -> DirectedGraph {
        build_graph(
            [("a", "b"), ("b", "a"), ("c", "d")]
                .iter()
                .map(|&(s, t)| WeightedEdge::new(s, t, 3).unwrap()),
            1,
        )
        .unwrap()
    }

    #[test]
    fn clusters_round_trip() {
        let g = graph();
        let text = "node_id,label,stability\na,X,0.97\nb,X,1\nc,__unassigned__,0.4\n";
        let cc = read_clusters_csv(text.as_bytes(), &g).unwrap();
        assert_eq!(cc.label_of("a"), Some("X"));
        assert_eq!(cc.unassigned().len(), 2);
        let written = clusters_csv(&cc);
        assert_eq!(
            written,
            "node_id,label,stability\na,X,0.970000\nb,X,1.000000\n\
             c,__unassigned__,0.400000\nd,__unassigned__,0.000000\n"
        );
        let again = read_clusters_csv(written.as_bytes(), &g).unwrap();
        assert_eq!(clusters_csv(&again), written);
    }

    #[test]
    fn clusters_with_unknown_nodes_fail() {
        let text = "node_id,label,stability\nq,X,1\nr,X,1\n";
        match read_clusters_csv(text.as_bytes(), &graph()) {
            Err(Error::UnknownNodes(ids)) => assert_eq!(ids, ["q", "r"]),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn matrix_layout() {
        let m = InteractionMatrix {
            rows: vec!["X".into(), "Y, Z".into()],
            columns: vec!["X".into(), "Y, Z".into()],
            raw: vec![vec![1, 3], vec![0, 0]],
            normalized: vec![vec![0.25, 0.75], vec![0.0, 0.0]],
        };
        assert_eq!(
            interaction_matrix_csv(&m),
            ",X,\"Y, Z\"\nX,0.25,0.75\n\"Y, Z\",0.00,0.00\n"
        );
        assert_eq!(
            interaction_matrix_raw_csv(&m),
            ",X,\"Y, Z\"\nX,1,3\n\"Y, Z\",0,0\n"
        );
    }

    #[test]
    fn file_stems() {
        assert_eq!(file_stem("BeC-p"), "BeC-p");
        assert_eq!(file_stem("a b/c"), "a_b_c");
    }
}
