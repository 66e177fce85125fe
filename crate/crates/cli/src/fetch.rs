//! Test-matrix downloads from the SuiteSparse collection.
//!
//! The tarball is fetched and unpacked in memory; the cache directory is only
//! written once the `.mtx` header has been checked, so a failed or offline
//! fetch leaves it as it was.

use std::io::Read;
use std::path::{Path, PathBuf};
use std::time::Duration;

use crate::error::CliError;

pub const DEFAULT_MIRROR: &str = "https://sparse.tamu.edu";

/// The experimental test set: name, rows, columns, and whether the
/// experiments use the transpose of the stored matrix.
pub const TEST_SET: &[(&str, usize, usize, bool)] = &[
    ("plat1919", 1919, 1919, false),
    ("rosen10", 6152, 2056, true),
    ("GL7d12", 8899, 1019, false),
    ("3elt_dual", 9000, 9000, false),
    ("fv1", 9604, 9604, false),
    ("shuttle_eddy", 10429, 10429, false),
    ("nopoly", 10774, 10774, false),
    ("flower_5_4", 14721, 5226, true),
    ("barth5", 15606, 15606, false),
    ("L-9", 17983, 17983, false),
    ("crack_dual", 20141, 20141, false),
    ("rel8", 345688, 12347, false),
];

pub fn cache_dir(flag: Option<&Path>) -> PathBuf {
    match flag {
        Some(p) => p.to_path_buf(),
        None => std::env::var_os("FEAST_CACHE_DIR").map(PathBuf::from).unwrap_or_else(|| PathBuf::from("feast-cache")),
    }
}

pub fn mirror_url() -> String {
    std::env::var("FEAST_MIRROR_URL").unwrap_or_else(|_| DEFAULT_MIRROR.to_string()).trim_end_matches('/').to_string()
}

/// Location of a fetched matrix inside the cache.
pub fn cached_path(cache: &Path, name: &str) -> PathBuf {
    cache.join(name).join(format!("{name}.mtx"))
}

struct Target {
    group: Option<String>,
    name: String,
    expected: Option<(usize, usize)>,
}

fn resolve(name: &str) -> Result<Target, CliError> {
    if let Some((group, n)) = name.split_once('/') {
        let expected = TEST_SET.iter().find(|t| t.0 == n).map(|t| (t.1, t.2));
        return Ok(Target { group: Some(group.to_string()), name: n.to_string(), expected });
    }
    match TEST_SET.iter().find(|t| t.0 == name) {
        Some(t) => Ok(Target { group: None, name: name.to_string(), expected: Some((t.1, t.2)) }),
        None => Err(CliError::Usage(unknown_message(name))),
    }
}

fn unknown_message(name: &str) -> String {
    let lower = name.to_lowercase();
    let close: Vec<&str> = TEST_SET
        .iter()
        .map(|t| t.0)
        .filter(|t| {
            let tl = t.to_lowercase();
            tl.contains(&lower) || lower.contains(&tl) || tl.chars().take(3).eq(lower.chars().take(3))
        })
        .collect();
    let all: Vec<&str> = TEST_SET.iter().map(|t| t.0).collect();
    let mut msg = format!("unknown matrix '{name}'.");
    if !close.is_empty() {
        msg.push_str(&format!(" Did you mean: {}?", close.join(", ")));
    }
    msg.push_str(&format!(" Known names: {}. Other matrices can be given as Group/Name.", all.join(", ")));
    msg
}

/// Downloads `name` into the cache and returns the `.mtx` path.
pub fn fetch(name: &str, cache: &Path) -> Result<PathBuf, CliError> {
    let target = resolve(name)?;
    let dest = cached_path(cache, &target.name);
    if dest.exists() {
        let dims = header_dims(&std::fs::read(&dest)?)?;
        if target.expected.is_none_or(|e| same_shape(dims, e)) {
            return Ok(dest);
        }
    }

    let client = reqwest::blocking::Client::builder()
        .connect_timeout(Duration::from_secs(15))
        .timeout(Duration::from_secs(600))
        .build()
        .map_err(|e| CliError::Network(e.to_string()))?;
    let base = mirror_url();

    let group = match target.group {
        Some(g) => g,
        None => {
            let index = get(&client, &format!("{base}/files/ssstats.csv"))?;
            let (group, dims) = lookup_group(&index, &target.name)?
                .ok_or_else(|| CliError::Network(format!("'{}' is not listed in the collection index", target.name)))?;
            if let Some(e) = target.expected {
                if !same_shape(dims, e) {
                    return Err(CliError::ChecksumMismatch(format!(
                        "index lists {} as {}x{}, expected {}x{}",
                        target.name, dims.0, dims.1, e.0, e.1
                    )));
                }
            }
            group
        }
    };

    let tarball = get(&client, &format!("{base}/MM/{group}/{}.tar.gz", target.name))?;
    let mtx = extract_mtx(&tarball, &target.name)?;
    let dims = header_dims(&mtx)?;
    if let Some(e) = target.expected {
        if !same_shape(dims, e) {
            return Err(CliError::ChecksumMismatch(format!(
                "{} has size {}x{}, expected {}x{}",
                target.name, dims.0, dims.1, e.0, e.1
            )));
        }
    }

    let dir = dest.parent().expect("cache path has a parent");
    std::fs::create_dir_all(dir)?;
    let tmp = dest.with_extension("mtx.part");
    std::fs::write(&tmp, &mtx)?;
    std::fs::rename(&tmp, &dest)?;
    Ok(dest)
}

fn get(client: &reqwest::blocking::Client, url: &str) -> Result<Vec<u8>, CliError> {
    let resp = client.get(url).send().map_err(|e| CliError::Network(format!("{url}: {e}")))?;
    let resp = resp.error_for_status().map_err(|e| CliError::Network(format!("{url}: {e}")))?;
    resp.bytes().map(|b| b.to_vec()).map_err(|e| CliError::Network(format!("{url}: {e}")))
}

/// Finds `name` in `ssstats.csv` (two preamble lines, then
/// `Group,Name,rows,cols,...`).
fn lookup_group(index: &[u8], name: &str) -> Result<Option<(String, (usize, usize))>, CliError> {
    let mut rd = csv::ReaderBuilder::new().has_headers(false).flexible(true).from_reader(index);
    for rec in rd.records() {
        let rec = rec?;
        if rec.len() < 4 || rec.get(1) != Some(name) {
            continue;
        }
        let rows = rec[2].trim().parse().ok();
        let cols = rec[3].trim().parse().ok();
        if let (Some(r), Some(c)) = (rows, cols) {
            return Ok(Some((rec[0].to_string(), (r, c))));
        }
    }
    Ok(None)
}

fn extract_mtx(tarball: &[u8], name: &str) -> Result<Vec<u8>, CliError> {
    let gz = flate2::read::GzDecoder::new(tarball);
    let mut ar = tar::Archive::new(gz);
    let want = format!("{name}.mtx");
    for entry in ar.entries().map_err(|e| CliError::Network(format!("bad archive: {e}")))? {
        let mut entry = entry.map_err(|e| CliError::Network(format!("bad archive: {e}")))?;
        let path = entry.path().map_err(|e| CliError::Network(format!("bad archive: {e}")))?.into_owned();
        if path.file_name().and_then(|f| f.to_str()) == Some(want.as_str()) {
            let mut buf = Vec::new();
            entry.read_to_end(&mut buf).map_err(|e| CliError::Network(format!("bad archive: {e}")))?;
            return Ok(buf);
        }
    }
    Err(CliError::Network(format!("archive has no {want}")))
}

/// Rows and columns from the size line of a Matrix Market file.
fn header_dims(bytes: &[u8]) -> Result<(usize, usize), CliError> {
    let text = String::from_utf8_lossy(&bytes[..bytes.len().min(1 << 16)]);
    let line = text
        .lines()
        .map(str::trim)
        .find(|l| !l.is_empty() && !l.starts_with('%'))
        .ok_or_else(|| CliError::ChecksumMismatch("no size line in Matrix Market file".into()))?;
    let mut it = line.split_whitespace().map(|t| t.parse::<usize>());
    match (it.next(), it.next()) {
        (Some(Ok(r)), Some(Ok(c))) => Ok((r, c)),
        _ => Err(CliError::ChecksumMismatch(format!("bad size line '{line}'"))),
    }
}

/// The test set lists some matrices transposed, so either orientation passes.
fn same_shape(got: (usize, usize), want: (usize, usize)) -> bool {
    got == want || got == (want.1, want.0)
}
