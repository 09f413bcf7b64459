//! Run configuration, dispatch and output for the command-line front end.

mod config;
mod emit;
mod run;

use std::path::Path;

use thiserror::Error;

pub use config::{
    parse_config, Command, ConfigError, Format, Model, ObstructionPolicy, Origin, RunConfig, TauSource,
};
pub use emit::{
    csv, float, json_document, phase_char, phase_diagram_csv, phase_diagram_golden, to_json, SCHEMA_VERSION,
};
pub use run::run;

#[derive(Debug, Error)]
pub enum RunError {
    #[error("configuration error: {0}")]
    Config(#[from] ConfigError),
    #[error("{0}")]
    Domain(String),
    #[error("{path}: {message}")]
    Io { path: String, message: String },
}

impl RunError {
    /// 2 for configuration problems, 1 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) => 2,
            _ => 1,
        }
    }
}

/// One output file. The primary artifact has an empty suffix; others are
/// written next to it as `<out><suffix>`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Artifact {
    pub suffix: String,
    pub content: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunOutput {
    pub artifacts: Vec<Artifact>,
}

impl RunOutput {
    pub fn single(content: String) -> Self {
        Self {
            artifacts: vec![Artifact {
                suffix: String::new(),
                content,
            }],
        }
    }

    pub fn primary(&self) -> &str {
        &self.artifacts[0].content
    }

    pub fn write(&self, out: &Path) -> Result<Vec<String>, RunError> {
        let mut written = Vec::new();
        for a in &self.artifacts {
            let mut p = out.as_os_str().to_owned();
            p.push(&a.suffix);
            let path = Path::new(&p);
            std::fs::write(path, &a.content).map_err(|e| RunError::Io {
                path: path.display().to_string(),
                message: e.to_string(),
            })?;
            written.push(path.display().to_string());
        }
        Ok(written)
    }
}
