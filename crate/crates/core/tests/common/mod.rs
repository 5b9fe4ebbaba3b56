#![allow(dead_code)]

pub mod oracle;

use std::fs;
use std::path::{Path, PathBuf};

pub fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

/// Corpus files for one quality label, sorted by name.
pub fn corpus(qf: u32) -> Vec<(String, Vec<u8>)> {
    let dir = fixtures().join(format!("corpus/qf{qf}"));
    let mut names: Vec<_> = fs::read_dir(&dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .filter(|n| n.ends_with(".jpg"))
        .collect();
    names.sort();
    names
        .into_iter()
        .map(|n| {
            let bytes = fs::read(dir.join(&n)).unwrap();
            (n, bytes)
        })
        .collect()
}

pub fn fixture(qf: u32, name: &str) -> Vec<u8> {
    corpus(qf)
        .into_iter()
        .find(|(n, _)| n.contains(name))
        .unwrap_or_else(|| panic!("missing fixture {name}"))
        .1
}

/// Reads a binary (P5) 8-bit PGM.
pub fn read_pgm(path: &Path) -> (usize, usize, Vec<u8>) {
    let data = fs::read(path).unwrap();
    let mut fields = Vec::new();
    let mut i = 0;
    while fields.len() < 4 {
        while data[i].is_ascii_whitespace() {
            i += 1;
        }
        if data[i] == b'#' {
            while data[i] != b'\n' {
                i += 1;
            }
            continue;
        }
        let start = i;
        while !data[i].is_ascii_whitespace() {
            i += 1;
        }
        fields.push(String::from_utf8_lossy(&data[start..i]).into_owned());
    }
    assert_eq!(fields[0], "P5");
    let w: usize = fields[1].parse().unwrap();
    let h: usize = fields[2].parse().unwrap();
    assert_eq!(fields[3], "255");
    let body = data[i + 1..].to_vec();
    assert_eq!(body.len(), w * h);
    (w, h, body)
}
