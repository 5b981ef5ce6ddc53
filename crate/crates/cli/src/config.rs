//! Run configuration: flags, a flat `key=value` file and built-in defaults.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use anyhow::{anyhow, bail, Context};
use netpolar::community::ConsensusConfig;
use netpolar::graph::LogKind;
use netpolar::topology::PathLengthMode;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InputKind {
    Events,
    Edges,
}

impl InputKind {
    pub fn as_str(self) -> &'static str {
        match self {
            InputKind::Events => "events",
            InputKind::Edges => "edges",
        }
    }
}

impl From<LogKind> for InputKind {
    fn from(kind: LogKind) -> Self {
        match kind {
            LogKind::Events => InputKind::Events,
            LogKind::Edges => InputKind::Edges,
        }
    }
}

impl FromStr for InputKind {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> anyhow::Result<Self> {
        match s {
            "events" => Ok(InputKind::Events),
            "edges" => Ok(InputKind::Edges),
            other => bail!("unknown input kind `{other}` (expected events or edges)"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AplMode(pub PathLengthMode);

impl fmt::Display for AplMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self.0 {
            PathLengthMode::PaperLiteral => "paper-literal",
            PathLengthMode::ReachableOnly => "reachable-only",
        })
    }
}

impl FromStr for AplMode {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> anyhow::Result<Self> {
        match s {
            "paper-literal" => Ok(AplMode(PathLengthMode::PaperLiteral)),
            "reachable-only" => Ok(AplMode(PathLengthMode::ReachableOnly)),
            other => {
                bail!("unknown apl mode `{other}` (expected paper-literal or reachable-only)")
            }
        }
    }
}

/// Every setting optional; one layer of the precedence stack.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct PartialConfig {
    pub input: Option<PathBuf>,
    pub input_kind: Option<InputKind>,
    pub min_weight: Option<u64>,
    pub giant_component: Option<bool>,
    pub runs: Option<usize>,
    pub epsilon: Option<f64>,
    pub seed: Option<u64>,
    pub damping: Option<f64>,
    pub anchors: Option<PathBuf>,
    pub clusters: Option<PathBuf>,
    pub apl_mode: Option<AplMode>,
    pub weak_ties_include_unassigned: Option<bool>,
    pub matrix_include_unassigned: Option<bool>,
    pub top_k: Option<usize>,
    pub ego: Option<Vec<String>>,
    pub workers: Option<usize>,
    pub out: Option<PathBuf>,
}

/// Keys written to manifests for reference only.
const INFORMATIONAL_KEYS: &[&str] = &["version", "input_sha256", "anchors_sha256"];

fn parse_value<T: FromStr>(key: &str, value: &str) -> anyhow::Result<T>
where
    T::Err: fmt::Display,
{
    value
        .parse()
        .map_err(|e| anyhow!("invalid value `{value}` for `{key}`: {e}"))
}

impl PartialConfig {
    /// Parses `key=value` lines. Blank lines and lines starting with `#` are
    /// skipped; `-` and `_` are interchangeable in keys.
    pub fn parse(text: &str) -> anyhow::Result<Self> {
        let mut cfg = PartialConfig::default();
        let mut seen = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .with_context(|| format!("line {}: expected key=value", i + 1))?;
            let key = key.trim().replace('-', "_");
            let value = value.trim();
            if seen.contains(&key) {
                bail!("line {}: `{key}` set twice", i + 1);
            }
            cfg.set(&key, value)
                .with_context(|| format!("line {}", i + 1))?;
            seen.push(key);
        }
        Ok(cfg)
    }

    fn set(&mut self, key: &str, value: &str) -> anyhow::Result<()> {
        let path = || Some(PathBuf::from(value));
        match key {
            "input" => self.input = path(),
            "input_kind" => self.input_kind = Some(parse_value(key, value)?),
            "min_weight" => self.min_weight = Some(parse_value(key, value)?),
            "giant_component" => self.giant_component = Some(parse_value(key, value)?),
            "runs" => self.runs = Some(parse_value(key, value)?),
            "epsilon" => self.epsilon = Some(parse_value(key, value)?),
            "seed" => self.seed = Some(parse_value(key, value)?),
            "damping" => self.damping = Some(parse_value(key, value)?),
            "anchors" => self.anchors = path(),
            "clusters" => self.clusters = path(),
            "apl_mode" => self.apl_mode = Some(parse_value(key, value)?),
            "weak_ties_include_unassigned" => {
                self.weak_ties_include_unassigned = Some(parse_value(key, value)?)
            }
            "matrix_include_unassigned" => {
                self.matrix_include_unassigned = Some(parse_value(key, value)?)
            }
            "top_k" => self.top_k = Some(parse_value(key, value)?),
            "ego" => {
                self.ego = Some(
                    value
                        .split(',')
                        .map(str::trim)
                        .filter(|s| !s.is_empty())
                        .map(str::to_string)
                        .collect(),
                )
            }
            "workers" => self.workers = Some(parse_value(key, value)?),
            "out" => self.out = path(),
            k if INFORMATIONAL_KEYS.contains(&k) => {}
            other => bail!("unknown key `{other}`"),
        }
        Ok(())
    }

    /// Field-wise `self` if set, else `lower`.
    pub fn or(self, lower: PartialConfig) -> PartialConfig {
        PartialConfig {
            input: self.input.or(lower.input),
            input_kind: self.input_kind.or(lower.input_kind),
            min_weight: self.min_weight.or(lower.min_weight),
            giant_component: self.giant_component.or(lower.giant_component),
            runs: self.runs.or(lower.runs),
            epsilon: self.epsilon.or(lower.epsilon),
            seed: self.seed.or(lower.seed),
            damping: self.damping.or(lower.damping),
            anchors: self.anchors.or(lower.anchors),
            clusters: self.clusters.or(lower.clusters),
            apl_mode: self.apl_mode.or(lower.apl_mode),
            weak_ties_include_unassigned: self
                .weak_ties_include_unassigned
                .or(lower.weak_ties_include_unassigned),
            matrix_include_unassigned: self
                .matrix_include_unassigned
                .or(lower.matrix_include_unassigned),
            top_k: self.top_k.or(lower.top_k),
            ego: self.ego.or(lower.ego),
            workers: self.workers.or(lower.workers),
            out: self.out.or(lower.out),
        }
    }

    /// Fills gaps with defaults and validates ranges.
    pub fn resolve(self) -> anyhow::Result<RunConfig> {
        let cfg = RunConfig {
            input: self.input,
            input_kind: self.input_kind,
            min_weight: self.min_weight.unwrap_or(3),
            giant_component: self.giant_component.unwrap_or(false),
            consensus: ConsensusConfig {
                runs: self.runs.unwrap_or(100),
                epsilon: self.epsilon.unwrap_or(0.05),
                master_seed: self.seed.unwrap_or(0),
            },
            damping: self.damping.unwrap_or(0.85),
            anchors: self.anchors,
            clusters: self.clusters,
            apl_mode: self
                .apl_mode
                .unwrap_or(AplMode(PathLengthMode::PaperLiteral)),
            weak_ties_include_unassigned: self.weak_ties_include_unassigned.unwrap_or(false),
            matrix_include_unassigned: self.matrix_include_unassigned.unwrap_or(false),
            top_k: self.top_k.unwrap_or(5),
            ego: self.ego.unwrap_or_default(),
            workers: self.workers,
            out: self.out,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Effective settings of one invocation.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub input: Option<PathBuf>,
    /// `None` detects the layout from the header.
    pub input_kind: Option<InputKind>,
    pub min_weight: u64,
    pub giant_component: bool,
    pub consensus: ConsensusConfig,
    pub damping: f64,
    pub anchors: Option<PathBuf>,
    pub clusters: Option<PathBuf>,
    pub apl_mode: AplMode,
    pub weak_ties_include_unassigned: bool,
    pub matrix_include_unassigned: bool,
    pub top_k: usize,
    pub ego: Vec<String>,
    /// Thread count; `None` uses one per core.
    pub workers: Option<usize>,
    pub out: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        PartialConfig::default()
            .resolve()
            .expect("defaults are valid")
    }
}

impl RunConfig {
    fn validate(&self) -> anyhow::Result<()> {
        if self.min_weight == 0 {
            bail!("min_weight must be at least 1");
        }
        self.consensus.validate()?;
        if !(self.damping > 0.0 && self.damping < 1.0) {
            bail!("damping must lie in (0, 1), got {}", self.damping);
        }
        if self.workers == Some(0) {
            bail!("workers must be at least 1");
        }
        Ok(())
    }

    pub fn input(&self) -> anyhow::Result<&PathBuf> {
        self.input.as_ref().context("no input file given (--input)")
    }

    pub fn anchors(&self) -> anyhow::Result<&PathBuf> {
        self.anchors
            .as_ref()
            .context("no anchors file given (--anchors)")
    }

    pub fn clusters(&self) -> anyhow::Result<&PathBuf> {
        self.clusters
            .as_ref()
            .context("no clusters file given (--clusters)")
    }

    pub fn out(&self) -> anyhow::Result<&PathBuf> {
        self.out
            .as_ref()
            .context("no output location given (--out)")
    }

    /// Manifest text in the config file format. The worker budget and the
    /// output location are left out: neither affects the results.
    pub fn manifest(
        &self,
        detected: InputKind,
        input_sha256: &str,
        anchors_sha256: &str,
    ) -> String {
        let path = |p: &Option<PathBuf>| {
            p.as_ref()
                .map(|p| p.display().to_string())
                .unwrap_or_default()
        };
        let lines = [
            ("version", env!("CARGO_PKG_VERSION").to_string()),
            ("input", path(&self.input)),
            ("input_sha256", input_sha256.to_string()),
            ("input_kind", detected.as_str().to_string()),
            ("min_weight", self.min_weight.to_string()),
            ("giant_component", self.giant_component.to_string()),
            ("runs", self.consensus.runs.to_string()),
            ("epsilon", self.consensus.epsilon.to_string()),
            ("seed", self.consensus.master_seed.to_string()),
            ("damping", self.damping.to_string()),
            ("anchors", path(&self.anchors)),
            ("anchors_sha256", anchors_sha256.to_string()),
            ("apl_mode", self.apl_mode.to_string()),
            (
                "weak_ties_include_unassigned",
                self.weak_ties_include_unassigned.to_string(),
            ),
            (
                "matrix_include_unassigned",
                self.matrix_include_unassigned.to_string(),
            ),
            ("top_k", self.top_k.to_string()),
            ("ego", self.ego.join(",")),
        ];
        let mut text = String::from("# netpolar run manifest\n");
        for (k, v) in lines {
            text.push_str(&format!("{k}={v}\n"));
        }
        text
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults() {
        let cfg = RunConfig::default();
        assert_eq!(cfg.min_weight, 3);
        assert_eq!(cfg.consensus, ConsensusConfig::default());
        assert_eq!(cfg.damping, 0.85);
        assert_eq!(cfg.apl_mode, AplMode(PathLengthMode::PaperLiteral));
        assert_eq!(cfg.top_k, 5);
        assert!(!cfg.giant_component);
    }

    #[test]
    fn file_parsing() {
        let cfg = PartialConfig::parse(
            "# comment\n\nmin-weight = 5\nepsilon=0.1\napl_mode=reachable-only\nego=a, b\ngiant_component=true\n",
        )
        .unwrap();
        assert_eq!(cfg.min_weight, Some(5));
        assert_eq!(cfg.epsilon, Some(0.1));
        assert_eq!(cfg.apl_mode, Some(AplMode(PathLengthMode::ReachableOnly)));
        assert_eq!(cfg.ego, Some(vec!["a".to_string(), "b".to_string()]));
        assert_eq!(cfg.giant_component, Some(true));
    }

    #[test]
    fn file_errors_name_the_line() {
        for (text, needle) in [
            ("runs=10\nfoo=1\n", "line 2"),
            ("runs=ten\n", "line 1"),
            ("runs=1\nruns=2\n", "set twice"),
            ("just text\n", "key=value"),
        ] {
            let msg = format!("{:#}", PartialConfig::parse(text).unwrap_err());
            assert!(msg.contains(needle), "{msg}");
        }
    }

    #[test]
    fn flags_beat_file_beat_defaults() {
        let file = PartialConfig::parse("runs=50\nseed=7\n").unwrap();
        let flags = PartialConfig {
            runs: Some(20),
            ..Default::default()
        };
        let cfg = flags.or(file).resolve().unwrap();
        assert_eq!(cfg.consensus.runs, 20);
        assert_eq!(cfg.consensus.master_seed, 7);
        assert_eq!(cfg.consensus.epsilon, 0.05);
    }

    #[test]
    fn ranges_are_checked() {
        for text in [
            "min_weight=0",
            "runs=0",
            "epsilon=1",
            "damping=1.5",
            "workers=0",
        ] {
            assert!(
                PartialConfig::parse(text).unwrap().resolve().is_err(),
                "{text}"
            );
        }
    }

    #[test]
    fn manifest_round_trips() {
        let cfg = PartialConfig::parse("input=log.csv\nanchors=a.csv\nruns=40\nego=x,y\n")
            .unwrap()
            .resolve()
            .unwrap();
        let text = cfg.manifest(InputKind::Events, "abc", "def");
        assert!(text.contains("input_sha256=abc\n"));
        assert!(!text.contains("workers"));
        let back = PartialConfig::parse(&text).unwrap().resolve().unwrap();
        assert_eq!(
            back,
            RunConfig {
                input_kind: Some(InputKind::Events),
                ..cfg
            }
        );
    }
}
