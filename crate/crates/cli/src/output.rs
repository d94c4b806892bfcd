use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::Value;

use crate::{Format, Global};

/// A run that could not complete, with its process exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Self {
        Failure { code: 2, message: message.into() }
    }

    pub fn io(path: &Path, e: std::io::Error) -> Self {
        Failure { code: 3, message: format!("{}: {e}", path.display()) }
    }
}

pub type CmdResult<T = bool> = Result<T, Failure>;

pub fn read_text(path: &Path) -> CmdResult<String> {
    fs::read_to_string(path).map_err(|e| Failure::io(path, e))
}

/// Everything needed to reproduce a run. Contains no timestamps, so the same
/// invocation writes byte-identical files.
#[derive(Serialize)]
struct RunManifest<'a> {
    tool: &'static str,
    version: &'static str,
    subcommand: &'a str,
    args: &'a [String],
    inputs: Vec<String>,
    config: Option<String>,
    seed: u64,
    out: String,
    outputs: Vec<String>,
}

/// Collects a command's files and report, then writes them out.
pub struct Run<'g> {
    g: &'g Global,
    subcommand: &'static str,
    inputs: Vec<PathBuf>,
    files: Vec<(String, String)>,
}

impl<'g> Run<'g> {
    pub fn new(g: &'g Global, subcommand: &'static str) -> Self {
        Run { g, subcommand, inputs: Vec::new(), files: Vec::new() }
    }

    pub fn input(&mut self, path: &Path) {
        self.inputs.push(path.to_path_buf());
    }

    pub fn file(&mut self, name: impl Into<String>, contents: String) {
        self.files.push((name.into(), contents));
    }

    /// Writes all files, the JSON summary and the manifest, then prints the
    /// report in the requested format.
    pub fn finish(mut self, summary: &impl Serialize, table: String, csv: Option<String>) -> CmdResult<()> {
        let summary = serde_json::to_value(summary).expect("summary serializes");
        let with_seed = add_seed(summary, self.g.seed);
        let json = serde_json::to_string_pretty(&with_seed).expect("json") + "\n";
        self.files.push((format!("{}_summary.json", self.subcommand), json.clone()));
        fs::create_dir_all(&self.g.out).map_err(|e| Failure::io(&self.g.out, e))?;
        let manifest = RunManifest {
            tool: "rqlkit",
            version: env!("CARGO_PKG_VERSION"),
            subcommand: self.subcommand,
            args: &self.g.argv,
            inputs: self.inputs.iter().map(|p| p.display().to_string()).collect(),
            config: self.g.config.as_ref().map(|p| p.display().to_string()),
            seed: self.g.seed,
            out: self.g.out.display().to_string(),
            outputs: self.files.iter().map(|(n, _)| n.clone()).collect(),
        };
        let manifest = serde_json::to_string_pretty(&manifest).expect("json") + "\n";
        self.files.push(("manifest.json".into(), manifest));
        for (name, contents) in &self.files {
            let path = self.g.out.join(name);
            fs::write(&path, contents).map_err(|e| Failure::io(&path, e))?;
        }
        match self.g.format {
            Format::Table => print!("{table}"),
            Format::Json => print!("{json}"),
            Format::Csv => match csv {
                Some(c) => print!("{c}"),
                None => print!("{}", flat_csv(&with_seed)),
            },
        }
        Ok(())
    }
}

fn add_seed(v: Value, seed: u64) -> Value {
    match v {
        Value::Object(mut m) => {
            m.insert("seed".into(), Value::from(seed));
            Value::Object(m)
        }
        other => serde_json::json!({ "seed": seed, "result": other }),
    }
}

/// `key,value` rows of the leaves of a JSON value, keys joined with dots.
fn flat_csv(v: &Value) -> String {
    fn walk(prefix: &str, v: &Value, out: &mut String) {
        match v {
            Value::Object(m) => {
                for (k, x) in m {
                    let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                    walk(&key, x, out);
                }
            }
            Value::Array(a) => {
                for (i, x) in a.iter().enumerate() {
                    walk(&format!("{prefix}.{i}"), x, out);
                }
            }
            leaf => out.push_str(&format!("{prefix},{leaf}\n")),
        }
    }
    let mut out = String::from("key,value\n");
    walk("", v, &mut out);
    out
}
