//! Minimal OpenML client with an on-disk cache.
//!
//! A dataset is resolved through the public JSON API
//! (`/api/v1/json/data/<id>`), its ARFF file is downloaded once, converted to
//! the dataset CSV format and stored at `<cache_dir>/openml/<id>/data.csv`.
//! Later calls read the cached CSV and never touch the network. Only numeric
//! feature columns and a nominal target are accepted.

use std::fs::{self, File};
use std::path::{Path, PathBuf};
use std::time::Duration;

use stiknn_core::{Dataset, LabelInterner, LabeledPoint, Role};

use crate::dataset_csv::{read_csv, write_csv};
use crate::error::{Error, Result};

pub const API_BASE: &str = "https://www.openml.org/api/v1/json";
pub const CACHE_ENV: &str = "STI_CACHE_DIR";

/// Cache root: `STI_CACHE_DIR`, else `$XDG_CACHE_HOME/stiknn`, else
/// `$HOME/.cache/stiknn`, else `./.stiknn-cache`.
pub fn default_cache_dir() -> PathBuf {
    if let Some(dir) = std::env::var_os(CACHE_ENV) {
        return PathBuf::from(dir);
    }
    if let Some(dir) = std::env::var_os("XDG_CACHE_HOME") {
        return PathBuf::from(dir).join("stiknn");
    }
    if let Some(home) = std::env::var_os("HOME") {
        return PathBuf::from(home).join(".cache").join("stiknn");
    }
    PathBuf::from(".stiknn-cache")
}

pub fn cache_path(cache_dir: &Path, id: u32) -> PathBuf {
    cache_dir.join("openml").join(id.to_string()).join("data.csv")
}

/// Blocking HTTP GET returning the status code and body text.
pub trait HttpGet {
    fn get(&self, url: &str) -> Result<(u16, String)>;
}

pub struct UreqClient {
    agent: ureq::Agent,
}

impl UreqClient {
    pub fn new() -> Self {
        let agent = ureq::Agent::config_builder()
            .http_status_as_error(false)
            .timeout_global(Some(Duration::from_secs(300)))
            .build()
            .into();
        Self { agent }
    }
}

impl Default for UreqClient {
    fn default() -> Self {
        Self::new()
    }
}

impl HttpGet for UreqClient {
    fn get(&self, url: &str) -> Result<(u16, String)> {
        let mut resp = self.agent.get(url).call().map_err(|e| Error::Network(format!("{url}: {e}")))?;
        let status = resp.status().as_u16();
        let body = resp
            .body_mut()
            .with_config()
            .limit(1 << 30)
            .read_to_string()
            .map_err(|e| Error::Network(format!("{url}: {e}")))?;
        Ok((status, body))
    }
}

pub fn fetch_openml(id: u32, cache_dir: &Path) -> Result<Dataset> {
    fetch_openml_with(id, cache_dir, &UreqClient::new())
}

/// Cached fetch through an arbitrary HTTP client. Concurrent callers for the
/// same id serialise on a lock file so the download happens once.
pub fn fetch_openml_with(id: u32, cache_dir: &Path, http: &dyn HttpGet) -> Result<Dataset> {
    let data = cache_path(cache_dir, id);
    if data.is_file() {
        return read_csv(&data, Role::Train);
    }
    let dir = data.parent().expect("cache path has a parent");
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let lock_path = dir.join(".lock");
    let lock = File::create(&lock_path).map_err(|e| Error::io(&lock_path, e))?;
    lock.lock().map_err(|e| Error::io(&lock_path, e))?;
    if data.is_file() {
        return read_csv(&data, Role::Train);
    }

    let (url, target) = describe(id, http)?;
    let (status, arff) = http.get(&url)?;
    if status != 200 {
        return Err(Error::OpenMl(format!("dataset {id}: download returned HTTP {status}")));
    }
    let dataset = parse_arff(&arff, target.as_deref())?;

    let tmp = dir.join("data.csv.tmp");
    write_csv(&dataset, &tmp)?;
    fs::rename(&tmp, &data).map_err(|e| Error::io(&data, e))?;
    read_csv(&data, Role::Train)
}

/// Returns the ARFF download URL and default target attribute for `id`.
fn describe(id: u32, http: &dyn HttpGet) -> Result<(String, Option<String>)> {
    let url = format!("{API_BASE}/data/{id}");
    let (status, body) = http.get(&url)?;
    let json: serde_json::Value = serde_json::from_str(&body)
        .map_err(|e| Error::OpenMl(format!("dataset {id}: bad API response (HTTP {status}): {e}")))?;
    if let Some(err) = json.get("error") {
        let msg = err.get("message").and_then(|m| m.as_str()).unwrap_or("unknown error");
        return Err(Error::OpenMl(format!("dataset {id}: {msg} (HTTP {status})")));
    }
    let desc = json
        .get("data_set_description")
        .ok_or_else(|| Error::OpenMl(format!("dataset {id}: missing data_set_description")))?;
    let format = desc.get("format").and_then(|f| f.as_str()).unwrap_or("ARFF");
    if !format.eq_ignore_ascii_case("arff") && !format.eq_ignore_ascii_case("sparse_arff") {
        return Err(Error::OpenMl(format!("dataset {id}: unsupported format {format}")));
    }
    let url = desc
        .get("url")
        .and_then(|u| u.as_str())
        .ok_or_else(|| Error::OpenMl(format!("dataset {id}: no download url")))?
        .to_string();
    let target = desc
        .get("default_target_attribute")
        .and_then(|t| t.as_str())
        .map(str::to_string);
    Ok((url, target))
}

#[derive(Debug, Clone, PartialEq)]
enum AttrType {
    Numeric,
    Nominal,
    Other(String),
}

/// Splits on commas outside single or double quotes, trimming and unquoting
/// each field.
fn split_fields(line: &str) -> Vec<String> {
    let mut fields = Vec::new();
    let mut cur = String::new();
    let mut quote: Option<char> = None;
    let mut chars = line.chars();
    while let Some(c) = chars.next() {
        match (quote, c) {
            (Some(q), c) if c == q => quote = None,
            (Some(_), '\\') => {
                if let Some(next) = chars.next() {
                    cur.push(next);
                }
            }
            (Some(_), c) => cur.push(c),
            (None, '\'' | '"') => quote = Some(c),
            (None, ',') => fields.push(std::mem::take(&mut cur).trim().to_string()),
            (None, c) => cur.push(c),
        }
    }
    fields.push(cur.trim().to_string());
    fields
}

/// Splits an `@attribute` declaration into its name and type text.
fn attribute_decl(rest: &str) -> Option<(String, String)> {
    let rest = rest.trim_start();
    let first = rest.chars().next()?;
    if first == '\'' || first == '"' {
        let end = rest[1..].find(first)? + 1;
        Some((rest[1..end].to_string(), rest[end + 1..].trim().to_string()))
    } else {
        let end = rest.find(char::is_whitespace)?;
        Some((rest[..end].to_string(), rest[end..].trim().to_string()))
    }
}

/// Converts ARFF text to a dataset. `target` defaults to the last attribute.
pub fn parse_arff(text: &str, target: Option<&str>) -> Result<Dataset> {
    let src = Path::new("<arff>");
    let mut attrs: Vec<(String, AttrType)> = Vec::new();
    let mut lines = text.lines().enumerate();
    let mut in_data = false;
    for (idx, raw) in lines.by_ref() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('%') {
            continue;
        }
        let lower = line.to_ascii_lowercase();
        if lower.starts_with("@attribute") {
            let (name, ty) = attribute_decl(&line["@attribute".len()..])
                .ok_or_else(|| Error::format(src, idx as u64 + 1, "malformed @attribute"))?;
            let ty_lower = ty.to_ascii_lowercase();
            let kind = if ty.starts_with('{') {
                AttrType::Nominal
            } else if ["numeric", "real", "integer"].contains(&ty_lower.as_str()) {
                AttrType::Numeric
            } else {
                AttrType::Other(ty_lower)
            };
            attrs.push((name, kind));
        } else if lower.starts_with("@data") {
            in_data = true;
            break;
        }
    }
    if !in_data || attrs.is_empty() {
        return Err(Error::OpenMl("ARFF file has no attributes or no @data section".into()));
    }

    let target_idx = match target {
        Some(name) => attrs
            .iter()
            .position(|(n, _)| n == name)
            .ok_or_else(|| Error::OpenMl(format!("target attribute {name:?} not found")))?,
        None => attrs.len() - 1,
    };
    if attrs[target_idx].1 != AttrType::Nominal {
        return Err(Error::OpenMl(format!("target {:?} is not nominal", attrs[target_idx].0)));
    }
    let bad: Vec<&str> = attrs
        .iter()
        .enumerate()
        .filter(|(i, (_, ty))| *i != target_idx && *ty != AttrType::Numeric)
        .map(|(_, (n, _))| n.as_str())
        .collect();
    if !bad.is_empty() {
        return Err(Error::OpenMl(format!("non-numeric feature columns: {}", bad.join(", "))));
    }

    let mut labels = LabelInterner::new();
    let mut points = Vec::new();
    for (idx, raw) in lines {
        let line_no = idx as u64 + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('%') {
            continue;
        }
        if line.starts_with('{') {
            return Err(Error::format(src, line_no, "sparse ARFF rows are not supported"));
        }
        let fields = split_fields(line);
        if fields.len() != attrs.len() {
            return Err(Error::format(
                src,
                line_no,
                format!("expected {} values, found {}", attrs.len(), fields.len()),
            ));
        }
        let mut features = Vec::with_capacity(attrs.len() - 1);
        for (i, cell) in fields.iter().enumerate() {
            if cell == "?" {
                return Err(Error::format(src, line_no, format!("missing value in {:?}", attrs[i].0)));
            }
            if i != target_idx {
                let x: f64 = cell
                    .parse()
                    .map_err(|_| Error::format(src, line_no, format!("non-numeric value {cell:?}")))?;
                features.push(x);
            }
        }
        points.push(LabeledPoint::new(features, labels.intern(&fields[target_idx])));
    }
    Ok(Dataset::new(points, labels.names().to_vec(), Role::Train)?)
}
