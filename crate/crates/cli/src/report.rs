//! Report envelope, run manifest and exit-code mapping.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{Value, json};

pub const SCHEMA: u32 = 1;

pub const EXIT_VALIDATION: u8 = 2;
pub const EXIT_VIOLATION: u8 = 3;
pub const EXIT_UNKNOWN_SUBCOMMAND: u8 = 64;
pub const EXIT_READ: u8 = 66;
pub const EXIT_WRITE: u8 = 73;

#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub command: &'static str,
    pub inputs: BTreeMap<&'static str, String>,
    pub params: Value,
    pub version: &'static str,
    pub graph_hash: Option<String>,
}

impl Manifest {
    pub fn new(command: &'static str) -> Self {
        Manifest {
            command,
            inputs: BTreeMap::new(),
            params: json!({}),
            version: env!("CARGO_PKG_VERSION"),
            graph_hash: None,
        }
    }

    pub fn input(&mut self, role: &'static str, path: &Path) {
        self.inputs.insert(role, path.display().to_string());
    }

    pub fn param(&mut self, key: &str, value: impl Serialize) {
        let value = serde_json::to_value(value).expect("parameters serialize");
        self.params
            .as_object_mut()
            .expect("params is an object")
            .insert(key.to_owned(), value);
    }
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    schema: u32,
    manifest: &'a Manifest,
    #[serde(flatten)]
    body: &'a T,
}

pub fn render(manifest: &Manifest, body: &impl Serialize) -> Result<String, Failure> {
    let envelope = Envelope {
        schema: SCHEMA,
        manifest,
        body,
    };
    let mut text = serde_json::to_string_pretty(&envelope).map_err(pwgs::Error::from)?;
    text.push('\n');
    Ok(text)
}

#[derive(Debug)]
pub enum Failure {
    Validation(pwgs::Error),
    Read(PathBuf, std::io::Error),
    Write(String, std::io::Error),
    Violations(usize),
}

impl From<pwgs::Error> for Failure {
    fn from(e: pwgs::Error) -> Self {
        Failure::Validation(e)
    }
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Validation(_) => EXIT_VALIDATION,
            Failure::Read(..) => EXIT_READ,
            Failure::Write(..) => EXIT_WRITE,
            Failure::Violations(_) => EXIT_VIOLATION,
        }
    }

    pub fn to_json(&self) -> Value {
        let (kind, message) = match self {
            Failure::Validation(e) => (e.kind(), e.to_string()),
            Failure::Read(p, e) => ("ReadError", format!("{}: {e}", p.display())),
            Failure::Write(p, e) => ("WriteError", format!("{p}: {e}")),
            Failure::Violations(n) => ("VerificationFailed", format!("{n} checks reported violations")),
        };
        error_json(kind, &message, self.exit_code())
    }
}

pub fn error_json(kind: &str, message: &str, exit_code: u8) -> Value {
    json!({ "schema": SCHEMA, "error": { "kind": kind, "message": message, "exit_code": exit_code } })
}

pub fn read_file(path: &Path) -> Result<Vec<u8>, Failure> {
    fs::read(path).map_err(|e| Failure::Read(path.to_owned(), e))
}

/// Writes to `path`, or to stdout when no path is given.
pub fn emit(path: Option<&Path>, bytes: &[u8]) -> Result<(), Failure> {
    match path {
        Some(p) => fs::write(p, bytes).map_err(|e| Failure::Write(p.display().to_string(), e)),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(bytes)
                .and_then(|()| out.flush())
                .map_err(|e| Failure::Write("<stdout>".into(), e))
        }
    }
}
