//! Request traces: ingestion from text logs and synthetic generators.
//!
//! The canonical on-disk format is UTF-8 text with one request token per line.
//! Blank lines and lines starting with `#` are ignored. Tokens are re-indexed
//! densely in order of first appearance. Delimited logs (comma, tab or
//! whitespace separated) select the token with a zero-based column index.
//!
//! A file whose first line is `# dense-ids num_files=<N>` holds integer ids that
//! are taken literally, which lets generated traces over a catalog larger than
//! the set of requested files round-trip exactly.

use std::collections::HashMap;
use std::fs;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::FileId;

const DENSE_DIRECTIVE: &str = "# dense-ids num_files=";

/// A sequence of requests over a catalog of `num_files` files.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RequestTrace {
    requests: Vec<FileId>,
    num_files: usize,
    /// Original token of each dense id; empty for generated traces.
    tokens: Vec<String>,
}

impl RequestTrace {
    pub fn new(requests: Vec<FileId>, num_files: usize) -> Result<Self> {
        if num_files == 0 {
            return Err(Error::InvalidCatalog("trace over an empty catalog".into()));
        }
        if requests.is_empty() {
            return Err(Error::InvalidTrace("trace has no requests".into()));
        }
        if let Some((slot, &bad)) = requests.iter().enumerate().find(|(_, &f)| f >= num_files) {
            return Err(Error::InvalidTrace(format!(
                "request {bad} at slot {} outside catalog of {num_files} files",
                slot + 1
            )));
        }
        Ok(RequestTrace {
            requests,
            num_files,
            tokens: Vec::new(),
        })
    }

    pub fn requests(&self) -> &[FileId] {
        &self.requests
    }

    pub fn num_files(&self) -> usize {
        self.num_files
    }

    pub fn len(&self) -> usize {
        self.requests.len()
    }

    pub fn is_empty(&self) -> bool {
        self.requests.is_empty()
    }

    /// Original token for a dense id, if the trace was ingested.
    pub fn token(&self, id: FileId) -> Option<&str> {
        self.tokens.get(id).map(String::as_str)
    }

    /// Dense id for an original token.
    pub fn id_of(&self, token: &str) -> Option<FileId> {
        self.tokens.iter().position(|t| t == token)
    }

    /// First `horizon` requests over the same catalog.
    pub fn truncated(&self, horizon: usize) -> Result<RequestTrace> {
        if horizon == 0 {
            return Err(Error::Config("horizon must be at least one slot".into()));
        }
        if horizon > self.len() {
            return Err(Error::Config(format!(
                "horizon {horizon} exceeds trace length {}",
                self.len()
            )));
        }
        Ok(RequestTrace {
            requests: self.requests[..horizon].to_vec(),
            num_files: self.num_files,
            tokens: self.tokens.clone(),
        })
    }

    /// Writes the trace in the canonical format.
    pub fn write(&self, path: &Path) -> Result<()> {
        let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
        let mut out = BufWriter::new(file);
        let res: std::io::Result<()> = (|| {
            if self.tokens.is_empty() {
                writeln!(out, "{DENSE_DIRECTIVE}{}", self.num_files)?;
                for f in &self.requests {
                    writeln!(out, "{f}")?;
                }
            } else {
                for &f in &self.requests {
                    writeln!(out, "{}", self.tokens[f])?;
                }
            }
            out.flush()
        })();
        res.map_err(|e| Error::io(path, e))
    }
}

/// Whether a delimited log starts with a header row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum HeaderMode {
    /// Skip the first data line when none of its fields parse as a number.
    #[default]
    Auto,
    Present,
    Absent,
}

#[derive(Debug, Clone, Default)]
pub struct LoadOptions {
    pub limit: Option<usize>,
    pub id_column: usize,
    pub header: HeaderMode,
}

fn split_fields(line: &str) -> Vec<&str> {
    if line.contains(',') {
        line.split(',').map(str::trim).collect()
    } else if line.contains('\t') {
        line.split('\t').map(str::trim).collect()
    } else {
        line.split_whitespace().collect()
    }
}

fn looks_like_header(fields: &[&str]) -> bool {
    fields.iter().all(|f| f.parse::<f64>().is_err())
}

/// Loads a trace with automatic header detection.
pub fn load_trace(path: &Path, limit: Option<usize>, id_column: usize) -> Result<RequestTrace> {
    load_trace_with(
        path,
        &LoadOptions {
            limit,
            id_column,
            header: HeaderMode::Auto,
        },
    )
}

pub fn load_trace_with(path: &Path, options: &LoadOptions) -> Result<RequestTrace> {
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let reader = BufReader::new(file);

    let mut ids: HashMap<String, FileId> = HashMap::new();
    let mut tokens: Vec<String> = Vec::new();
    let mut requests: Vec<FileId> = Vec::new();
    let mut dense: Option<usize> = None;
    let mut seen_data = false;

    for (lineno, line) in reader.lines().enumerate() {
        if options.limit.is_some_and(|l| requests.len() >= l) {
            break;
        }
        let line = line.map_err(|e| Error::io(path, e))?;
        let line = line.trim();
        if lineno == 0 {
            if let Some(n) = line.strip_prefix(DENSE_DIRECTIVE) {
                let n = n.trim().parse::<usize>().map_err(|_| {
                    Error::InvalidTrace(format!("bad catalog size in directive {line:?}"))
                })?;
                dense = Some(n);
                continue;
            }
        }
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields = split_fields(line);
        if !seen_data {
            seen_data = true;
            let skip = match options.header {
                HeaderMode::Present => true,
                HeaderMode::Absent => false,
                HeaderMode::Auto => {
                    dense.is_none() && fields.len() > 1 && looks_like_header(&fields)
                }
            };
            if skip {
                continue;
            }
        }
        let token = *fields.get(options.id_column).ok_or_else(|| {
            Error::InvalidTrace(format!(
                "line {} has {} fields, id column {} missing",
                lineno + 1,
                fields.len(),
                options.id_column
            ))
        })?;
        if let Some(n) = dense {
            let id = token.parse::<usize>().map_err(|_| {
                Error::InvalidTrace(format!("line {}: {token:?} is not a dense id", lineno + 1))
            })?;
            requests.push(id);
            if id >= n {
                return Err(Error::InvalidTrace(format!(
                    "line {}: id {id} outside declared catalog of {n}",
                    lineno + 1
                )));
            }
        } else {
            let next = tokens.len();
            let id = *ids.entry(token.to_owned()).or_insert_with(|| {
                tokens.push(token.to_owned());
                next
            });
            requests.push(id);
        }
    }

    if requests.is_empty() {
        return Err(Error::InvalidTrace(format!(
            "{} contains no requests",
            path.display()
        )));
    }
    match dense {
        Some(n) => RequestTrace::new(requests, n),
        None => Ok(RequestTrace {
            num_files: tokens.len(),
            requests,
            tokens,
        }),
    }
}

/// `f_t = (t - 1) mod N`.
pub fn gen_round_robin(num_files: usize, horizon: usize) -> Result<RequestTrace> {
    if num_files == 0 {
        return Err(Error::InvalidCatalog(
            "round robin over an empty catalog".into(),
        ));
    }
    RequestTrace::new((0..horizon).map(|t| t % num_files).collect(), num_files)
}

/// Normalized Zipf probabilities `P(k) ∝ (k + 1)^(-exponent)`.
pub fn zipf_probabilities(num_files: usize, exponent: f64) -> Vec<f64> {
    let weights: Vec<f64> = (0..num_files)
        .map(|k| ((k + 1) as f64).powf(-exponent))
        .collect();
    let total: f64 = weights.iter().sum();
    weights.into_iter().map(|w| w / total).collect()
}

/// I.i.d. Zipf requests, deterministic in `seed` (ChaCha8 stream).
pub fn gen_zipf(
    num_files: usize,
    horizon: usize,
    exponent: f64,
    seed: u64,
) -> Result<RequestTrace> {
    if num_files == 0 {
        return Err(Error::InvalidCatalog("zipf over an empty catalog".into()));
    }
    if !(exponent > 0.0 && exponent.is_finite()) {
        return Err(Error::domain(format!(
            "zipf exponent must be positive, got {exponent}"
        )));
    }
    let weights: Vec<f64> = (0..num_files)
        .map(|k| ((k + 1) as f64).powf(-exponent))
        .collect();
    let dist =
        WeightedIndex::new(&weights).map_err(|e| Error::domain(format!("zipf weights: {e}")))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    RequestTrace::new(
        (0..horizon).map(|_| dist.sample(&mut rng)).collect(),
        num_files,
    )
}
