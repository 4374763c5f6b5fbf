//! Run configurations: one JSON document per invocation.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::baire::CompactCode;
use crate::laws::{check_ids, LawConfig, LawError};
use crate::pipeline::Trunc;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    #[default]
    Run,
    VerifyLaws,
    Export,
}

/// Test fixtures that break a run on purpose.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Fixture {
    /// Plants a second graft at the root of the first one in the last stage.
    CorruptFamily,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    pub compacts: Vec<CompactCode>,
    /// Defaults to one stage per compact set.
    #[serde(default)]
    pub stages: Option<usize>,
    #[serde(default = "default_trunc")]
    pub trunc: Trunc,
}

impl PipelineConfig {
    pub fn stages(&self) -> usize {
        self.stages.unwrap_or(self.compacts.len())
    }
}

fn default_trunc() -> Trunc {
    Trunc::new(4, 4, 2)
}

/// The materialized window of the hybrid that `run` and `export` write out.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Window {
    pub depth: usize,
    pub width: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub command: Command,
    pub pipeline: PipelineConfig,
    /// Defaults to one level below the truncation depth.
    #[serde(default)]
    pub window: Option<Window>,
    /// Law suites; `verify-laws` runs everything when empty.
    #[serde(default)]
    pub suites: Vec<String>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub out_dir: Option<PathBuf>,
    /// Instance sizes for the law suites.
    #[serde(default)]
    pub laws: Option<LawConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fixture: Option<Fixture>,
}

impl RunConfig {
    pub fn window(&self) -> Window {
        self.window.unwrap_or(Window {
            depth: self.pipeline.trunc.depth + 1,
            width: self.pipeline.trunc.width,
        })
    }

    pub fn suites(&self) -> Vec<String> {
        if self.suites.is_empty() && self.command == Command::VerifyLaws {
            vec!["all".to_string()]
        } else {
            self.suites.clone()
        }
    }

    /// Law sizes with the seed, truncation and (when given) compact sets of
    /// this run.
    pub fn law_config(&self) -> LawConfig {
        let mut cfg = self.laws.clone().unwrap_or_default();
        cfg.seed = self.seed;
        cfg.trunc = self.pipeline.trunc;
        if !self.pipeline.compacts.is_empty() {
            cfg.compacts = self.pipeline.compacts.clone();
        }
        let w = self.window();
        cfg.hybrid_depth = w.depth;
        cfg.hybrid_width = w.width;
        cfg
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("configs serialize");
        s.push('\n');
        s
    }

    fn validate(&self) -> Result<(), ConfigError> {
        let bad = |m: String| Err(ConfigError::BadParameters(m));
        let t = &self.pipeline.trunc;
        if t.depth == 0 || t.width == 0 || t.threshold == 0 {
            return bad(format!(
                "truncation depth, width and threshold must be positive, got {}/{}/{}",
                t.depth, t.width, t.threshold
            ));
        }
        let w = self.window();
        if w.depth == 0 || w.width == 0 {
            return bad(format!("window depth and width must be positive, got {}/{}", w.depth, w.width));
        }
        let (k, n) = (self.pipeline.stages(), self.pipeline.compacts.len());
        if k > n {
            return bad(format!("{k} stages requested but only {n} compact sets given"));
        }
        if self.fixture == Some(Fixture::CorruptFamily) && k == 0 {
            return bad("the corrupt-family fixture needs at least one stage".into());
        }
        check_ids(&self.suites).map_err(|LawError::UnknownLemma(id)| ConfigError::UnknownLemma(id))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConfigError {
    #[error("malformed JSON at line {line}, column {column}: {message}")]
    MalformedJson { line: usize, column: usize, message: String },
    #[error("schema violation at line {line}, column {column}: {message}")]
    SchemaViolation { line: usize, column: usize, message: String },
    #[error("bad parameters: {0}")]
    BadParameters(String),
    #[error("unknown lemma id {0:?}")]
    UnknownLemma(String),
}

impl ConfigError {
    pub fn kind(&self) -> &'static str {
        match self {
            ConfigError::MalformedJson { .. } => "malformed-json",
            ConfigError::SchemaViolation { .. } => "schema-violation",
            ConfigError::BadParameters(_) => "bad-parameters",
            ConfigError::UnknownLemma(_) => "unknown-lemma",
        }
    }
}

impl From<serde_json::Error> for ConfigError {
    fn from(e: serde_json::Error) -> Self {
        use serde_json::error::Category;
        let (line, column) = (e.line(), e.column());
        let message = e.to_string();
        match e.classify() {
            Category::Data => ConfigError::SchemaViolation { line, column, message },
            Category::Io | Category::Syntax | Category::Eof => ConfigError::MalformedJson { line, column, message },
        }
    }
}

pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let cfg: RunConfig = serde_json::from_str(text)?;
    cfg.validate()?;
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_runs_no_stages() {
        let cfg = parse_config(r#"{"pipeline": {"compacts": []}}"#).unwrap();
        assert_eq!(cfg.command, Command::Run);
        assert_eq!(cfg.pipeline.stages(), 0);
        assert_eq!(cfg.window(), Window { depth: 5, width: 4 });
    }

    #[test]
    fn zero_depth_is_a_bad_parameter() {
        let e = parse_config(r#"{"pipeline": {"compacts": [], "trunc": {"depth": 0, "width": 4}}}"#).unwrap_err();
        assert_eq!(e.kind(), "bad-parameters");
        let e = parse_config(r#"{"pipeline": {"compacts": [], "stages": 1}}"#).unwrap_err();
        assert_eq!(e.kind(), "bad-parameters");
    }

    #[test]
    fn unpruned_tables_violate_the_schema() {
        let text = r#"{"pipeline": {"compacts": [{"table": {"": []}, "depth": 1}]}}"#;
        let e = parse_config(text).unwrap_err();
        assert_eq!(e.kind(), "schema-violation", "{e}");
        let text = r#"{"pipeline": {"compacts": [{"table": {"": [0]}, "depth": 2}]}}"#;
        assert_eq!(parse_config(text).unwrap_err().kind(), "schema-violation");
    }

    #[test]
    fn syntax_errors_carry_a_location() {
        let e = parse_config("{\n  \"pipeline\": {\"compacts\": [}\n}").unwrap_err();
        match e {
            ConfigError::MalformedJson { line, .. } => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
        assert_eq!(parse_config(r#"{"pipeline": {"compacts": []}, "colour": 1}"#).unwrap_err().kind(), "schema-violation");
    }

    #[test]
    fn unknown_suites_are_rejected() {
        let e = parse_config(r#"{"pipeline": {"compacts": []}, "suites": ["lemma-9.9"]}"#).unwrap_err();
        assert_eq!(e, ConfigError::UnknownLemma("lemma-9.9".into()));
    }

    #[test]
    fn configs_round_trip() {
        let text = r#"{"command": "verify-laws", "pipeline": {"compacts": [{"table": {"": [0]}, "depth": 1}], "trunc": {"depth": 3, "width": 3}}, "seed": 7}"#;
        let cfg = parse_config(text).unwrap();
        assert_eq!(parse_config(&cfg.to_json()).unwrap(), cfg);
        assert_eq!(cfg.suites(), vec!["all".to_string()]);
        assert_eq!(cfg.law_config().seed, 7);
    }
}
