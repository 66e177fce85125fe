mod common;

use std::io::{Read, Write};
use std::net::TcpListener;
use std::path::Path;
use std::thread::JoinHandle;

use common::*;

/// Serves fixed bodies by path until `requests` have been answered.
fn serve(routes: Vec<(String, Vec<u8>)>, requests: usize) -> (String, JoinHandle<()>) {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let url = format!("http://{}", listener.local_addr().unwrap());
    let handle = std::thread::spawn(move || {
        for stream in listener.incoming().take(requests) {
            let mut s = stream.unwrap();
            let mut buf = [0u8; 4096];
            let n = s.read(&mut buf).unwrap();
            let req = String::from_utf8_lossy(&buf[..n]);
            let path = req.split_whitespace().nth(1).unwrap_or("/").to_string();
            let (status, body) = match routes.iter().find(|r| r.0 == path) {
                Some((_, b)) => ("200 OK", b.clone()),
                None => ("404 Not Found", b"missing".to_vec()),
            };
            let head = format!("HTTP/1.1 {status}\r\nContent-Length: {}\r\nConnection: close\r\n\r\n", body.len());
            s.write_all(head.as_bytes()).unwrap();
            s.write_all(&body).unwrap();
        }
    });
    (url, handle)
}

fn tarball(name: &str, mtx: &str) -> Vec<u8> {
    let gz = flate2::write::GzEncoder::new(Vec::new(), flate2::Compression::fast());
    let mut ar = tar::Builder::new(gz);
    let mut header = tar::Header::new_gnu();
    header.set_size(mtx.len() as u64);
    header.set_mode(0o644);
    header.set_cksum();
    ar.append_data(&mut header, format!("{name}/{name}.mtx"), mtx.as_bytes()).unwrap();
    ar.into_inner().unwrap().finish().unwrap()
}

const INDEX: &str = "2\n01-Jan-2024\nHB,plat1919,1919,1919,32399,1,0,0,0,1,1,structural problem,32399\nPothen,barth5,15606,15606,61484,1\n";

fn fetch(name: &str, cache: &Path, mirror: &str) -> std::process::Output {
    bin().args(["fetch", name, "--cache", cache.to_str().unwrap()]).env("FEAST_MIRROR_URL", mirror).output().unwrap()
}

fn is_empty_or_missing(dir: &Path) -> bool {
    !dir.exists() || std::fs::read_dir(dir).unwrap().next().is_none()
}

#[test]
fn unknown_name_lists_suggestions() {
    let cache = tempfile::tempdir().unwrap();
    let o = fetch("plat", cache.path(), "http://127.0.0.1:9");
    assert_eq!(code(&o), 1);
    let err = stderr(&o);
    assert!(err.contains("plat1919") && err.contains("barth5"), "{err}");
    assert!(is_empty_or_missing(cache.path()));
}

#[test]
fn offline_exits_four_and_leaves_cache_alone() {
    let cache = tempfile::tempdir().unwrap();
    // Reserve a port, then close it so nothing listens there.
    let port = TcpListener::bind("127.0.0.1:0").unwrap().local_addr().unwrap().port();
    let o = fetch("plat1919", cache.path(), &format!("http://127.0.0.1:{port}"));
    assert_eq!(code(&o), 4, "{}", stderr(&o));
    assert!(stderr(&o).contains("network"));
    assert!(is_empty_or_missing(cache.path()));
}

#[test]
fn fetch_unpacks_and_checks_sizes() {
    let cache = tempfile::tempdir().unwrap();
    let mtx = "%%MatrixMarket matrix coordinate real general\n% test body\n1919 1919 1\n1 1 2.5\n";
    let routes = vec![
        ("/files/ssstats.csv".to_string(), INDEX.as_bytes().to_vec()),
        ("/MM/HB/plat1919.tar.gz".to_string(), tarball("plat1919", mtx)),
    ];
    let (url, h) = serve(routes, 2);
    let o = fetch("plat1919", cache.path(), &url);
    h.join().unwrap();
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let path = cache.path().join("plat1919").join("plat1919.mtx");
    assert_eq!(String::from_utf8_lossy(&o.stdout).trim(), path.to_str().unwrap());
    assert_eq!(std::fs::read_to_string(&path).unwrap(), mtx);

    // A cached copy needs no network.
    let o = fetch("plat1919", cache.path(), "http://127.0.0.1:9");
    assert_eq!(code(&o), 0, "{}", stderr(&o));
}

#[test]
fn wrong_size_is_rejected_without_writing() {
    let cache = tempfile::tempdir().unwrap();
    let mtx = "%%MatrixMarket matrix coordinate real general\n1000 1919 1\n1 1 2.5\n";
    let routes = vec![
        ("/files/ssstats.csv".to_string(), INDEX.as_bytes().to_vec()),
        ("/MM/HB/plat1919.tar.gz".to_string(), tarball("plat1919", mtx)),
    ];
    let (url, h) = serve(routes, 2);
    let o = fetch("plat1919", cache.path(), &url);
    h.join().unwrap();
    assert_eq!(code(&o), 5, "{}", stderr(&o));
    assert!(is_empty_or_missing(cache.path()));
}

#[test]
fn explicit_group_skips_the_index() {
    let cache = tempfile::tempdir().unwrap();
    let mtx = "%%MatrixMarket matrix coordinate real general\n3 2 1\n1 1 1.0\n";
    let routes = vec![("/MM/Test/tiny.tar.gz".to_string(), tarball("tiny", mtx))];
    let (url, h) = serve(routes, 1);
    let o = fetch("Test/tiny", cache.path(), &url);
    h.join().unwrap();
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(cache.path().join("tiny").join("tiny.mtx").exists());
}

#[test]
fn missing_archive_is_a_network_error() {
    let cache = tempfile::tempdir().unwrap();
    let (url, h) = serve(vec![("/files/ssstats.csv".to_string(), INDEX.as_bytes().to_vec())], 2);
    let o = fetch("barth5", cache.path(), &url);
    h.join().unwrap();
    assert_eq!(code(&o), 4, "{}", stderr(&o));
    assert!(is_empty_or_missing(cache.path()));
}
