//! Output files, 17-digit JSON and the per-directory run manifest.

use std::collections::BTreeMap;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use compacton::numerics::fmt17;
use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter};
use sha2::{Digest, Sha256};

use crate::error::{CliError, Result};

pub const MANIFEST: &str = "manifest.json";

/// Pretty JSON whose floats carry 17 significant digits.
struct Digits17<'a>(PrettyFormatter<'a>);

impl Formatter for Digits17<'_> {
    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        w.write_all(fmt17(value).as_bytes())
    }
    fn write_f32<W: ?Sized + Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(w, value as f64)
    }
    fn begin_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }
    fn end_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }
    fn begin_array_value<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }
    fn end_array_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }
    fn begin_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }
    fn end_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }
    fn begin_object_key<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }
    fn begin_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }
    fn end_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

/// Serialize with 17-digit floats and a trailing newline.
pub fn to_json<T: Serialize + ?Sized>(value: &T) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, Digits17(PrettyFormatter::new()));
    value.serialize(&mut ser).expect("in-memory JSON serialization");
    buf.push(b'\n');
    String::from_utf8(buf).expect("JSON is UTF-8")
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct InputRecord {
    pub name: String,
    pub sha256: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct OutputRecord {
    /// Relative to the manifest's directory.
    pub path: String,
    pub sha256: String,
    pub bytes: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub subcommand: String,
    pub argv: Vec<String>,
    pub version: String,
    /// Seconds since the Unix epoch.
    pub timestamp: u64,
    pub inputs: Vec<InputRecord>,
    pub outputs: Vec<OutputRecord>,
    pub status: String,
    pub exit_code: i32,
    pub error: Option<String>,
}

/// Bookkeeping for one invocation: inputs, written files and the
/// directories that need a manifest.
pub struct Run {
    subcommand: String,
    argv: Vec<String>,
    inputs: Vec<InputRecord>,
    outputs: BTreeMap<PathBuf, Vec<OutputRecord>>,
}

impl Run {
    pub fn new(subcommand: &str, argv: Vec<String>) -> Run {
        Run { subcommand: subcommand.into(), argv, inputs: Vec::new(), outputs: BTreeMap::new() }
    }

    pub fn input(&mut self, name: &str, bytes: &[u8]) {
        self.inputs.push(InputRecord { name: name.into(), sha256: sha256_hex(bytes) });
    }

    /// Declare an output directory up front so a failure before the first
    /// file still leaves a manifest behind.
    pub fn declare_dir(&mut self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        self.outputs.entry(dir.to_path_buf()).or_default();
        Ok(())
    }

    pub fn write(&mut self, path: &Path, bytes: &[u8]) -> Result<()> {
        let name = path.file_name().ok_or_else(|| CliError::usage(format!("'{}' is not a file path", path.display())))?;
        if name == MANIFEST {
            return Err(CliError::usage(format!("'{MANIFEST}' is reserved for the run manifest")));
        }
        let dir = match path.parent() {
            Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
            _ => PathBuf::from("."),
        };
        std::fs::create_dir_all(&dir)?;
        std::fs::write(path, bytes)?;
        self.outputs.entry(dir).or_default().push(OutputRecord {
            path: name.to_string_lossy().into_owned(),
            sha256: sha256_hex(bytes),
            bytes: bytes.len(),
        });
        Ok(())
    }

    /// Write `text` to `emit` when given, else to stdout.
    pub fn emit_or_print(&mut self, emit: Option<&Path>, text: &str) -> Result<()> {
        match emit {
            Some(p) => self.write(p, text.as_bytes()),
            None => {
                print!("{text}");
                Ok(())
            }
        }
    }

    /// One manifest per output directory, listing that directory's files.
    pub fn finish(self, outcome: &Result<()>) -> io::Result<()> {
        let timestamp = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
        for (dir, outputs) in self.outputs {
            let manifest = RunManifest {
                subcommand: self.subcommand.clone(),
                argv: self.argv.clone(),
                version: env!("CARGO_PKG_VERSION").into(),
                timestamp,
                inputs: self.inputs.clone(),
                outputs,
                status: if outcome.is_ok() { "ok".into() } else { "failed".into() },
                exit_code: outcome.as_ref().err().map_or(0, CliError::exit_code),
                error: outcome.as_ref().err().map(|e| e.to_string()),
            };
            std::fs::write(dir.join(MANIFEST), to_json(&manifest))?;
        }
        Ok(())
    }
}
