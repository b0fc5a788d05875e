//! Converters under test and the evaluation loop.

use std::collections::BTreeSet;
use std::io::{Read, Write};
use std::os::unix::process::CommandExt;
use std::path::Path;
use std::process::{Command, Stdio};
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use wait_timeout::ChildExt;

use super::{BenchError, GoldEntry};
use crate::mathml::{emit, normalize_presentation, parse_mathml};
use crate::metrics::{ted, CostModel, ShortcutRule};
use crate::pipeline::{convert, ConvertOptions};
use crate::tree::ExprTree;

pub const DEFAULT_TIMEOUT: f64 = 30.0;

/// Something that turns a gold entry's TeX into MathML text.
pub trait Converter: Send + Sync {
    fn name(&self) -> &str;
    fn convert(&self, entry: &GoldEntry) -> Result<String, String>;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TexSource {
    Corrected,
    Semantic,
}

/// This crate's own pipeline.
#[derive(Debug, Clone)]
pub struct InternalConverter {
    pub name: String,
    pub options: ConvertOptions,
    pub source: TexSource,
    /// Feed the entry's context to the annotation phase.
    pub use_context: bool,
}

impl InternalConverter {
    pub fn new(name: impl Into<String>, options: ConvertOptions) -> Self {
        InternalConverter { name: name.into(), options, source: TexSource::Corrected, use_context: true }
    }
}

impl Converter for InternalConverter {
    fn name(&self) -> &str {
        &self.name
    }

    fn convert(&self, entry: &GoldEntry) -> Result<String, String> {
        let tex = match self.source {
            TexSource::Corrected => &entry.record.corrected_tex,
            TexSource::Semantic => &entry.record.semantic_tex,
        };
        let doc = match (&entry.record.context, self.use_context) {
            (Some(c), true) => Some(c.document(tex).map_err(|e| e.to_string())?),
            _ => None,
        };
        convert(tex, doc.as_ref(), &self.options).map(|pm| emit(&pm)).map_err(|e| e.to_string())
    }
}

/// Returns the gold markup itself; a sanity baseline.
#[derive(Debug, Clone, Default)]
pub struct GoldEcho;

impl Converter for GoldEcho {
    fn name(&self) -> &str {
        "gold"
    }

    fn convert(&self, entry: &GoldEntry) -> Result<String, String> {
        Ok(emit(&entry.gold))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InputMode {
    #[default]
    Stdin,
    Arg,
}

fn default_timeout() -> f64 {
    DEFAULT_TIMEOUT
}

/// External tool: TeX on stdin (or as an argument), MathML on stdout,
/// nonzero exit means failure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AdapterConfig {
    pub name: String,
    /// Program and arguments. In `arg` mode `{tex}` is substituted, or
    /// the TeX is appended when no argument mentions it.
    pub command: Vec<String>,
    #[serde(default)]
    pub input_mode: InputMode,
    /// Seconds.
    #[serde(default = "default_timeout")]
    pub timeout: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct AdaptersFile {
    #[serde(default)]
    adapter: Vec<AdapterConfig>,
}

/// `[[adapter]]` tables; names must be unique, timeouts positive.
pub fn parse_adapters(src: &str) -> Result<Vec<AdapterConfig>, BenchError> {
    let file: AdaptersFile = toml::from_str(src).map_err(|e| BenchError::Adapter(e.to_string()))?;
    let mut names = BTreeSet::new();
    for a in &file.adapter {
        if !names.insert(a.name.as_str()) {
            return Err(BenchError::Adapter(format!("duplicate adapter name `{}`", a.name)));
        }
        if !(a.timeout > 0.0 && a.timeout.is_finite()) {
            return Err(BenchError::Adapter(format!("adapter `{}`: timeout must be positive", a.name)));
        }
        if a.command.is_empty() {
            return Err(BenchError::Adapter(format!("adapter `{}`: empty command", a.name)));
        }
    }
    Ok(file.adapter)
}

pub fn load_adapters(path: impl AsRef<Path>) -> Result<Vec<AdapterConfig>, BenchError> {
    parse_adapters(&std::fs::read_to_string(path)?)
}

#[derive(Debug, Clone)]
pub struct SubprocessAdapter {
    pub config: AdapterConfig,
}

impl SubprocessAdapter {
    pub fn new(config: AdapterConfig) -> Self {
        SubprocessAdapter { config }
    }

    /// Runs the tool once. On timeout the whole process group is killed.
    pub fn run(&self, tex: &str) -> Result<String, String> {
        let cfg = &self.config;
        let (program, args) = cfg.command.split_first().ok_or("empty command")?;
        let mut cmd = Command::new(program);
        match cfg.input_mode {
            InputMode::Stdin => {
                cmd.args(args).stdin(Stdio::piped());
            }
            InputMode::Arg => {
                let mut substituted = false;
                for a in args {
                    if a.contains("{tex}") {
                        substituted = true;
                    }
                    cmd.arg(a.replace("{tex}", tex));
                }
                if !substituted {
                    cmd.arg(tex);
                }
                cmd.stdin(Stdio::null());
            }
        }
        cmd.stdout(Stdio::piped()).stderr(Stdio::piped()).process_group(0);
        let mut child = cmd.spawn().map_err(|e| format!("cannot start `{program}`: {e}"))?;

        if let Some(mut stdin) = child.stdin.take() {
            let input = format!("{tex}\n");
            // a tool that exits without reading is not an error here
            std::thread::spawn(move || {
                let _ = stdin.write_all(input.as_bytes());
            });
        }
        let mut stdout = child.stdout.take().expect("piped stdout");
        let mut stderr = child.stderr.take().expect("piped stderr");
        let out_reader = std::thread::spawn(move || {
            let mut buf = Vec::new();
            let _ = stdout.read_to_end(&mut buf);
            buf
        });
        let err_reader = std::thread::spawn(move || {
            let mut buf = Vec::new();
            let _ = stderr.read_to_end(&mut buf);
            buf
        });

        let status = match child.wait_timeout(Duration::from_secs_f64(cfg.timeout)) {
            Ok(Some(status)) => status,
            Ok(None) => {
                kill_group(child.id());
                let _ = child.kill();
                let _ = child.wait();
                return Err(format!("timed out after {}s", cfg.timeout));
            }
            Err(e) => {
                kill_group(child.id());
                let _ = child.wait();
                return Err(e.to_string());
            }
        };
        // descendants that kept the pipes open would block the readers
        kill_group(child.id());
        let out = out_reader.join().unwrap_or_default();
        let err = err_reader.join().unwrap_or_default();
        if !status.success() {
            let msg = String::from_utf8_lossy(&err);
            return Err(format!("{status}: {}", msg.trim()));
        }
        String::from_utf8(out).map_err(|_| "output is not UTF-8".to_string())
    }
}

fn kill_group(pid: u32) {
    if let Ok(pid) = i32::try_from(pid) {
        // SAFETY: plain syscall on a process group we created
        unsafe {
            libc::kill(-pid, libc::SIGKILL);
        }
    }
}

impl Converter for SubprocessAdapter {
    fn name(&self) -> &str {
        &self.config.name
    }

    fn convert(&self, entry: &GoldEntry) -> Result<String, String> {
        self.run(&entry.record.corrected_tex)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Missing {
    /// The conversion failed.
    Failure,
    /// The converter produced no content markup.
    Absent,
}

/// A distance, or why there is none. Serialized as a number or as
/// `"failure"` / `"absent"`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Score {
    Value(f64),
    Missing(Missing),
}

impl Score {
    pub fn value(self) -> Option<f64> {
        match self {
            Score::Value(v) => Some(v),
            Score::Missing(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalResult {
    pub entry_id: u32,
    pub converter: String,
    pub presentation_distance: Score,
    pub content_distance: Score,
    /// Seconds spent in the converter.
    pub wall_time: f64,
    pub success: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

fn evaluate(entry: &GoldEntry, conv: &dyn Converter, cm: &CostModel, rules: &[ShortcutRule]) -> EvalResult {
    let start = Instant::now();
    let output = conv.convert(entry);
    let wall_time = start.elapsed().as_secs_f64();
    let failed = |error: String| EvalResult {
        entry_id: entry.id(),
        converter: conv.name().to_string(),
        presentation_distance: Score::Missing(Missing::Failure),
        content_distance: Score::Missing(Missing::Failure),
        wall_time,
        success: false,
        error: Some(error),
    };
    let pm = match output.and_then(|xml| parse_mathml(&xml).map_err(|e| e.to_string())) {
        Ok(pm) => pm,
        Err(e) => return failed(e),
    };
    if pm.presentation.token_count() == 0 {
        return failed("no presentation nodes".into());
    }
    let dist = |a: &ExprTree, b: &ExprTree| ted(a, b, cm, rules).expect("cost model validated before the run");
    let (ours, gold) = (normalize_presentation(&pm.presentation), normalize_presentation(&entry.gold.presentation));
    let presentation = dist(&ours, &gold);
    let content = match (&pm.content, &entry.gold.content) {
        (Some(c), Some(g)) => Score::Value(dist(c, g)),
        _ => Score::Missing(Missing::Absent),
    };
    EvalResult {
        entry_id: entry.id(),
        converter: conv.name().to_string(),
        presentation_distance: Score::Value(presentation),
        content_distance: content,
        wall_time,
        success: true,
        error: None,
    }
}

/// Scores every converter on every entry, `jobs` at a time. Failures are
/// recorded in the results; results are sorted by converter, then entry.
pub fn run_eval(
    gold: &[GoldEntry],
    converters: &[Box<dyn Converter>],
    cm: &CostModel,
    rules: &[ShortcutRule],
    jobs: usize,
) -> Result<Vec<EvalResult>, BenchError> {
    cm.validate(!rules.is_empty())?;
    let mut names = BTreeSet::new();
    for c in converters {
        if !names.insert(c.name()) {
            return Err(BenchError::Adapter(format!("duplicate converter name `{}`", c.name())));
        }
    }
    let pairs: Vec<(&GoldEntry, &dyn Converter)> =
        converters.iter().flat_map(|c| gold.iter().map(move |e| (e, c.as_ref()))).collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| BenchError::Adapter(e.to_string()))?;
    let mut results: Vec<EvalResult> =
        pool.install(|| pairs.par_iter().map(|(e, c)| evaluate(e, *c, cm, rules)).collect());
    results.sort_by(|a, b| a.converter.cmp(&b.converter).then(a.entry_id.cmp(&b.entry_id)));
    Ok(results)
}
