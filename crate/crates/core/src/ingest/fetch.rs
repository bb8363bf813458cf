use std::collections::{BTreeMap, BTreeSet};
use std::io::Read;
use std::path::{Path, PathBuf};

use encoding_rs::Encoding;
use regex::bytes::Regex;
use serde::{Deserialize, Serialize};

use super::IngestError;
use crate::celex::{document_url_with_host, parse_celex, CelexId, Endpoint, DEFAULT_CCVISTA_HOST};

/// One downloaded language version of a document.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawDocument {
    pub celex: CelexId,
    pub lang: String,
    pub content: String,
    pub source_url: String,
    /// Retrieval date, `YYYY-MM-DD`.
    pub retrieved: String,
}

/// Where raw documents come from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum FetchSource {
    /// Files named `<celex>-<lang>.html` (or `.txt`) under `root`.
    LocalDirectory {
        root: PathBuf,
        /// Fixed retrieval date; the file modification date otherwise.
        #[serde(default)]
        retrieved: Option<String>,
    },
    HttpEndpoint {
        endpoint: Endpoint,
        /// Replaces the `http://europa.eu.int` origin of the URL templates.
        #[serde(default)]
        base_url: Option<String>,
        #[serde(default)]
        ccvista_host: Option<String>,
    },
}

const FIXTURE_EXTENSIONS: [&str; 2] = ["html", "txt"];

impl FetchSource {
    pub fn local(root: impl Into<PathBuf>) -> Self {
        FetchSource::LocalDirectory { root: root.into(), retrieved: None }
    }

    /// The fixture path for `(id, lang)`, if one exists.
    pub fn local_path(root: &Path, id: &CelexId, lang: &str) -> Option<PathBuf> {
        FIXTURE_EXTENSIONS.iter().map(|ext| root.join(format!("{id}-{lang}.{ext}"))).find(|p| p.is_file())
    }

    pub fn url_for(&self, id: &CelexId, lang: &str) -> Result<String, IngestError> {
        match self {
            FetchSource::LocalDirectory { root, .. } => {
                let path = Self::local_path(root, id, lang)
                    .unwrap_or_else(|| root.join(format!("{id}-{lang}.html")));
                Ok(format!("file://{}", path.display()))
            }
            FetchSource::HttpEndpoint { endpoint, base_url, ccvista_host } => {
                let host = ccvista_host.as_deref().unwrap_or(DEFAULT_CCVISTA_HOST);
                let url = document_url_with_host(id, lang, *endpoint, host)?;
                Ok(match base_url {
                    Some(base) => match url.strip_prefix("http://europa.eu.int") {
                        Some(rest) => format!("{}{rest}", base.trim_end_matches('/')),
                        None => url,
                    },
                    None => url,
                })
            }
        }
    }
}

/// Retrieves and decodes one language version of a document.
pub fn fetch_document(source: &FetchSource, id: &CelexId, lang: &str) -> Result<RawDocument, IngestError> {
    match source {
        FetchSource::LocalDirectory { root, retrieved } => {
            let path = FetchSource::local_path(root, id, lang).ok_or_else(|| {
                IngestError::NotFound(root.join(format!("{id}-{lang}.html")).display().to_string())
            })?;
            let io_err = |source| IngestError::Io { path: path.clone(), source };
            let bytes = std::fs::read(&path).map_err(io_err)?;
            let retrieved = match retrieved {
                Some(d) => d.clone(),
                None => {
                    let modified = std::fs::metadata(&path).and_then(|m| m.modified()).map_err(io_err)?;
                    chrono::DateTime::<chrono::Utc>::from(modified).format("%Y-%m-%d").to_string()
                }
            };
            let location = path.display().to_string();
            let content = decode(&bytes, None, &location)?;
            Ok(RawDocument {
                celex: *id,
                lang: lang.to_owned(),
                content,
                source_url: format!("file://{location}"),
                retrieved,
            })
        }
        FetchSource::HttpEndpoint { .. } => {
            let url = source.url_for(id, lang)?;
            let http_err = |e: ureq::Error| match e {
                ureq::Error::StatusCode(404) => IngestError::NotFound(url.clone()),
                other => IngestError::Http { url: url.clone(), message: other.to_string() },
            };
            let mut response = ureq::get(&url).call().map_err(http_err)?;
            let charset = response
                .headers()
                .get("content-type")
                .and_then(|v| v.to_str().ok())
                .and_then(|v| v.split("charset=").nth(1))
                .map(|c| c.trim_matches(|ch: char| ch == '"' || ch.is_whitespace()).to_owned());
            let mut bytes = Vec::new();
            response
                .body_mut()
                .as_reader()
                .read_to_end(&mut bytes)
                .map_err(|e| IngestError::Http { url: url.clone(), message: e.to_string() })?;
            let content = decode(&bytes, charset.as_deref(), &url)?;
            Ok(RawDocument {
                celex: *id,
                lang: lang.to_owned(),
                content,
                source_url: url,
                retrieved: chrono::Utc::now().format("%Y-%m-%d").to_string(),
            })
        }
    }
}

fn declared_charset(bytes: &[u8]) -> Option<String> {
    static META: std::sync::OnceLock<Regex> = std::sync::OnceLock::new();
    let re =
        META.get_or_init(|| Regex::new(r#"(?i)<meta[^>]*charset\s*=\s*["']?([A-Za-z0-9_:.\-]+)"#).unwrap());
    let head = &bytes[..bytes.len().min(4096)];
    re.captures(head).map(|c| String::from_utf8_lossy(&c[1]).into_owned())
}

/// Decodes `bytes` under the declared (header, then meta) charset, UTF-8 by default.
fn decode(bytes: &[u8], header_charset: Option<&str>, location: &str) -> Result<String, IngestError> {
    let label = header_charset
        .map(str::to_owned)
        .or_else(|| declared_charset(bytes))
        .unwrap_or_else(|| "utf-8".to_owned());
    let encoding = Encoding::for_label(label.as_bytes()).unwrap_or(encoding_rs::UTF_8);
    let body = match Encoding::for_bom(bytes) {
        Some((bom_enc, len)) if bom_enc == encoding => &bytes[len..],
        _ => bytes,
    };
    encoding.decode_without_bom_handling_and_without_replacement(body).map(|c| c.into_owned()).ok_or_else(
        || IngestError::DecodeFailure { location: location.to_owned(), encoding: encoding.name().to_owned() },
    )
}

/// Scans a fixture directory for `<celex>-<lang>.{html,txt}` files.
pub fn list_local_inventory(root: &Path) -> Result<BTreeMap<CelexId, BTreeSet<String>>, IngestError> {
    let io_err = |source| IngestError::Io { path: root.to_path_buf(), source };
    let mut inventory: BTreeMap<CelexId, BTreeSet<String>> = BTreeMap::new();
    for entry in std::fs::read_dir(root).map_err(io_err)? {
        let path = entry.map_err(io_err)?.path();
        let (Some(stem), Some(ext)) =
            (path.file_stem().and_then(|s| s.to_str()), path.extension().and_then(|s| s.to_str()))
        else {
            continue;
        };
        if !FIXTURE_EXTENSIONS.contains(&ext) {
            continue;
        }
        let Some((celex, lang)) = stem.rsplit_once('-') else {
            continue;
        };
        if let Ok(id) = parse_celex(celex) {
            inventory.entry(id).or_default().insert(lang.to_owned());
        }
    }
    Ok(inventory)
}
