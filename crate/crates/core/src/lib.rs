//! Polarisation analysis of interaction networks.
//!
//! The pipeline turns a log of directed interactions (for example retweets)
//! into a weighted graph, finds stable communities with an anchored
//! ensemble of Louvain runs, and describes every community with inequality,
//! efficiency and resilience metrics.
//!
//! ```
//! use netpolar::graph::{build_graph, parse_interaction_log};
//! use netpolar::community::{louvain, modularity};
//!
//! let log = "source,target\na,b\nb,c\nc,a\nd,e\ne,f\nf,d\n";
//! let parsed = parse_interaction_log(log.as_bytes()).unwrap();
//! let g = build_graph(parsed.edges, 1).unwrap();
//! let p = louvain(&g, 0).unwrap();
//! assert_eq!(p.community_count(), 2);
//! assert_eq!(modularity(&g, &p).unwrap(), 0.5);
//! ```
//!
//! A guide with worked examples lives in the `book/` directory of the
//! repository; its code listings are compiled and run as doc-tests.

pub mod centrality;
pub mod community;
mod error;
pub mod graph;
pub mod report;
pub mod tables;
pub mod topology;

pub use error::{Error, Result};

// The book's listings run as doc-tests of this crate.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/graphs.md")]
    mod graphs {}
    #[doc = include_str!("../../../book/src/modularity.md")]
    mod modularity {}
    #[doc = include_str!("../../../book/src/louvain.md")]
    mod louvain {}
    #[doc = include_str!("../../../book/src/consensus.md")]
    mod consensus {}
    #[doc = include_str!("../../../book/src/pagerank.md")]
    mod pagerank {}
    #[doc = include_str!("../../../book/src/topology.md")]
    mod topology {}
    #[doc = include_str!("../../../book/src/reports.md")]
    mod reports {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
