use std::path::Path;

use serde::Serialize;
use sha2::{Digest, Sha256};
use tokenwalk::{Error, Graph, Hypothesis};

pub const ERROR_SCHEMA: &str = "tokenwalk.error/v1";

#[derive(Debug, Serialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
    pub bytes: usize,
}

#[derive(Debug, Serialize)]
pub struct Provenance<C: Serialize> {
    pub input: Option<InputDigest>,
    pub config: C,
    pub library_version: &'static str,
    pub generated_at: String,
}

/// Every report: a versioned schema tag, where it came from, what it says.
#[derive(Debug, Serialize)]
pub struct Report<C: Serialize, R: Serialize> {
    pub schema: &'static str,
    pub provenance: Provenance<C>,
    pub result: R,
}

impl<C: Serialize, R: Serialize> Report<C, R> {
    pub fn new(schema: &'static str, input: Option<InputDigest>, config: C, result: R) -> Self {
        Report {
            schema,
            provenance: Provenance {
                input,
                config,
                library_version: tokenwalk::VERSION,
                generated_at: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Millis, true),
            },
            result,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize") + "\n"
    }
}

/// Reads and parses an edge-list file, keeping its digest.
pub fn load_graph(path: &Path) -> Result<(Graph, InputDigest), Error> {
    let bytes = std::fs::read(path)?;
    let text = String::from_utf8(bytes.clone())
        .map_err(|_| Error::Validation(format!("{} is not UTF-8 text", path.display())))?;
    let graph = tokenwalk::graph::parse_edge_list(&text)?;
    let digest = InputDigest {
        path: path.display().to_string(),
        sha256: hex::encode(Sha256::digest(&bytes)),
        bytes: bytes.len(),
    };
    Ok((graph, digest))
}

#[derive(Debug, Serialize)]
struct ErrorBody<'a> {
    kind: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    hypothesis: Option<Hypothesis>,
    message: String,
}

#[derive(Debug, Serialize)]
struct ErrorReport<'a> {
    schema: &'static str,
    error: ErrorBody<'a>,
}

pub fn error_json(kind: &str, hypothesis: Option<Hypothesis>, message: String) -> String {
    let report = ErrorReport {
        schema: ERROR_SCHEMA,
        error: ErrorBody {
            kind,
            hypothesis,
            message,
        },
    };
    serde_json::to_string_pretty(&report).expect("errors serialize") + "\n"
}

pub fn library_error_json(err: &Error) -> String {
    let hypothesis = match err {
        Error::Hypothesis(h) => Some(*h),
        _ => None,
    };
    error_json(err.kind(), hypothesis, err.to_string())
}
