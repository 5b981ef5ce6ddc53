//! Fixture generators and process helpers for the CLI tests.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn netpolar(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_netpolar"))
        .args(args)
        .output()
        .expect("spawning netpolar")
}

pub fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path
}

/// Every file in `dir`, by name.
pub fn read_bundle(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (
                e.file_name().to_string_lossy().into_owned(),
                fs::read(e.path()).unwrap(),
            )
        })
        .collect()
}

/// Two directed `size`-cliques `a*` and `b*` with one bridge `a0 -> b0`,
/// every edge of weight 3, as an edge-list CSV.
pub fn two_clique_log(size: usize) -> String {
    let mut text = String::from("source,target,weight\n");
    for prefix in ["a", "b"] {
        for i in 0..size {
            for j in 0..size {
                if i != j {
                    text.push_str(&format!("{prefix}{i},{prefix}{j},3\n"));
                }
            }
        }
    }
    text.push_str("a0,b0,3\n");
    text
}

pub const TWO_CLIQUE_ANCHORS: &str = "label,node_id\nA,a0\nB,b1\n";

/// Synthetic interaction network: `nodes` accounts in `communities` groups
/// of skewed sizes, exactly `edges` distinct directed pairs with weights in
/// `3..=12`. Most edges stay inside a group and favour its low-numbered
/// members, giving heavy-tailed in-degrees. Every node has an out-edge.
///
/// Returns the edge-list CSV and an anchors CSV naming the most favoured
/// member of each of the `labels` largest groups.
pub fn synthetic_network(
    seed: u64,
    nodes: usize,
    edges: usize,
    communities: usize,
    labels: usize,
) -> (String, String) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // Group sizes proportional to 1/(g+2).
    let shares: Vec<f64> = (0..communities).map(|g| 1.0 / (g + 2) as f64).collect();
    let total: f64 = shares.iter().sum();
    let mut sizes: Vec<usize> = shares
        .iter()
        .map(|s| ((s / total) * nodes as f64).floor().max(3.0) as usize)
        .collect();
    let assigned: usize = sizes.iter().sum();
    sizes[0] += nodes - assigned;
    let mut groups = Vec::new();
    let mut next = 0;
    for size in &sizes {
        groups.push((next..next + size).collect::<Vec<usize>>());
        next += size;
    }
    let group_of: Vec<usize> = groups
        .iter()
        .enumerate()
        .flat_map(|(g, members)| members.iter().map(move |_| g))
        .collect();

    let pick_in_group = |rng: &mut ChaCha8Rng, members: &[usize]| {
        // Quadratic bias towards the front of the group.
        let u: f64 = rng.gen();
        members[((u * u) * members.len() as f64) as usize]
    };
    let mut pairs = BTreeSet::new();
    let add = |rng: &mut ChaCha8Rng, s: usize, pairs: &mut BTreeSet<(usize, usize)>| loop {
        let t = if rng.gen_bool(0.92) {
            pick_in_group(rng, &groups[group_of[s]])
        } else {
            rng.gen_range(0..nodes)
        };
        if t != s && pairs.insert((s, t)) {
            return;
        }
    };
    for s in 0..nodes {
        add(&mut rng, s, &mut pairs);
    }
    while pairs.len() < edges {
        let s = rng.gen_range(0..nodes);
        add(&mut rng, s, &mut pairs);
    }

    let mut log = String::from("source,target,weight\n");
    for (s, t) in pairs {
        log.push_str(&format!("u{s:05},u{t:05},{}\n", rng.gen_range(3..=12)));
    }
    let mut anchors = String::from("label,node_id\n");
    for (g, members) in groups.iter().take(labels).enumerate() {
        anchors.push_str(&format!("G{g},u{:05}\n", members[0]));
    }
    (log, anchors)
}
