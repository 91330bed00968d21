//! The declarative job file.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::error::{CliError, Result};

#[derive(Copy, Clone, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    PvaCheck,
    Bracket,
    Flow,
    Walg,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::PvaCheck => "pva-check",
            Mode::Bracket => "bracket",
            Mode::Flow => "flow",
            Mode::Walg => "walg",
        }
    }
}

#[derive(Copy, Clone, Debug, Default, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Text,
    Json,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobConfig {
    pub mode: Option<Mode>,
    pub format: Option<Format>,
    /// Index table file for `walg`.
    pub table: Option<PathBuf>,
    pub algebra: Option<AlgebraConfig>,
    /// Rows of `{u_i λ u_j}`.
    pub matrix: Option<Vec<Vec<String>>>,
    pub bracket: Option<BracketConfig>,
    pub flow: Option<FlowConfig>,
    pub lie: Option<LieConfig>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgebraConfig {
    /// Generator names; alternatively `n` gives `u1..uN` (or `u` for one).
    pub generators: Option<Vec<String>>,
    pub n: Option<usize>,
    #[serde(default = "one")]
    pub dims: usize,
    #[serde(default)]
    pub params: Vec<String>,
    #[serde(default)]
    pub functions: Vec<FunctionConfig>,
    /// Names of the formal variable families.
    pub formal: Option<Vec<String>>,
}

fn one() -> usize {
    1
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FunctionConfig {
    pub name: String,
    pub args: Vec<String>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BracketConfig {
    pub left: String,
    pub right: String,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlowConfig {
    pub density: String,
    /// A second Hamiltonian pair whose flow must coincide.
    pub compare: Option<ComparePair>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComparePair {
    pub density: String,
    pub matrix: Vec<Vec<String>>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LieConfig {
    #[serde(rename = "type")]
    pub ty: String,
    pub rank: usize,
    pub f: Nilpotent,
    pub s: Option<Vec<Entry>>,
    /// Scale of the invariant form `(a|b) = c·tr(ab)`.
    #[serde(default = "default_c")]
    pub c: String,
    #[serde(default = "default_z")]
    pub z: String,
    pub dispersive: Option<String>,
    pub names: Option<Vec<String>>,
}

fn default_c() -> String {
    "c".into()
}

fn default_z() -> String {
    "z".into()
}

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum Nilpotent {
    /// Only `"principal"` is accepted.
    Named(String),
    Entries(Vec<Entry>),
}

/// One matrix entry; rows and columns count from 1.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Entry {
    pub row: usize,
    pub col: usize,
    pub value: String,
}

impl JobConfig {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| CliError::config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::parse(&text).map_err(|e| match e {
            CliError::Config(m) => CliError::config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn algebra(&self) -> Result<&AlgebraConfig> {
        self.algebra
            .as_ref()
            .ok_or_else(|| CliError::config("missing [algebra] section"))
    }

    pub fn matrix(&self) -> Result<&[Vec<String>]> {
        self.matrix
            .as_deref()
            .ok_or_else(|| CliError::config("missing `matrix`"))
    }

    pub fn lie(&self) -> Result<&LieConfig> {
        self.lie
            .as_ref()
            .ok_or_else(|| CliError::config("missing [lie] section"))
    }

    /// Rejects a config written for another mode.
    pub fn expect_mode(&self, mode: Mode) -> Result<()> {
        match self.mode {
            Some(m) if m != mode => Err(CliError::config(format!(
                "config is for mode `{}`, not `{}`",
                m.name(),
                mode.name()
            ))),
            _ => Ok(()),
        }
    }
}
