//! Library side of the `netpolar` command: configuration handling and the
//! three commands, callable without spawning a process.

pub mod config;
pub mod pipeline;

pub use config::{InputKind, PartialConfig, RunConfig};
pub use pipeline::{analyze, ingest, metrics, Bundle, Failure, IngestCounts, Outcome};
