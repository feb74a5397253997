//! Triplet text files and JSON bundles of generator matrices.
//!
//! A triplet file starts with `rows cols nnz` and then lists one
//! `row col re im` line per stored entry, 1-based, column by column.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use uq_un1::operator::{Gen, GeneratorSet, SparseOperator};

use crate::CliError;

/// Everything needed to re-verify an exported representation.
#[derive(Serialize, Deserialize)]
pub struct Bundle {
    pub q: f64,
    /// Basis vectors on which the relations are meaningful (0-based).
    pub columns: Vec<usize>,
    pub gens: GeneratorSet,
}

fn io_error(path: &Path, e: std::io::Error) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

pub fn file_name(g: Gen) -> String {
    match g {
        Gen::K(i) => format!("k{i}.txt"),
        Gen::KInv(i) => format!("kinv{i}.txt"),
        Gen::E(i) => format!("e{i}.txt"),
        Gen::F(i) => format!("f{i}.txt"),
    }
}

pub fn to_triplet(op: &SparseOperator) -> String {
    let triplets = op.triplets();
    let mut out = format!("{} {} {}\n", op.rows(), op.cols(), triplets.len());
    for (r, c, v) in triplets {
        writeln!(out, "{} {} {:.16e} {:.16e}", r + 1, c + 1, v.re, v.im).expect("writing to a String");
    }
    out
}

pub fn from_triplet(text: &str) -> Result<SparseOperator, String> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header: Vec<usize> = lines
        .next()
        .ok_or("empty file")?
        .split_whitespace()
        .map(|x| x.parse().map_err(|_| format!("bad header field {x:?}")))
        .collect::<Result<_, _>>()?;
    let [rows, cols, nnz] = header[..] else {
        return Err("header must be `rows cols nnz`".into());
    };
    let mut entries = Vec::with_capacity(nnz);
    for line in lines {
        let f: Vec<&str> = line.split_whitespace().collect();
        let [r, c, re, im] = f[..] else {
            return Err(format!("bad entry line {line:?}"));
        };
        let idx = |x: &str| x.parse::<usize>().ok().filter(|&k| k >= 1).map(|k| k - 1);
        let num = |x: &str| x.parse::<f64>().ok();
        match (idx(r), idx(c), num(re), num(im)) {
            (Some(r), Some(c), Some(re), Some(im)) => entries.push((r, c, Complex64::new(re, im))),
            _ => return Err(format!("bad entry line {line:?}")),
        }
    }
    if entries.len() != nnz {
        return Err(format!("header promises {nnz} entries, found {}", entries.len()));
    }
    SparseOperator::from_triplets(rows, cols, entries).map_err(|e| e.to_string())
}

/// Write one triplet file per generator plus `columns.txt` and `q.txt`;
/// returns the files written.
pub fn write_triplets(dir: &Path, bundle: &Bundle) -> Result<Vec<PathBuf>, CliError> {
    fs::create_dir_all(dir).map_err(|e| io_error(dir, e))?;
    let mut written = Vec::new();
    for (g, op) in bundle.gens.all() {
        let path = dir.join(file_name(g));
        fs::write(&path, to_triplet(op)).map_err(|e| io_error(&path, e))?;
        written.push(path);
    }
    let path = dir.join("columns.txt");
    let cols: String = bundle.columns.iter().map(|c| format!("{}\n", c + 1)).collect();
    fs::write(&path, cols).map_err(|e| io_error(&path, e))?;
    written.push(path);
    let path = dir.join("q.txt");
    fs::write(&path, format!("{:.16e}\n", bundle.q)).map_err(|e| io_error(&path, e))?;
    written.push(path);
    Ok(written)
}

pub fn write_json(path: &Path, bundle: &Bundle) -> Result<(), CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| io_error(dir, e))?;
    }
    let text = serde_json::to_string(bundle).expect("bundles serialize");
    fs::write(path, text).map_err(|e| io_error(path, e))
}

/// Read a bundle back: a directory of triplet files or a JSON file. `q`
/// is used only when the directory has no `q.txt`.
pub fn read(path: &Path, q: f64) -> Result<Bundle, CliError> {
    if !path.is_dir() {
        let text = fs::read_to_string(path).map_err(|e| io_error(path, e))?;
        return serde_json::from_str(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())));
    }
    let load = |name: String| -> Result<Option<SparseOperator>, CliError> {
        let p = path.join(&name);
        if !p.exists() {
            return Ok(None);
        }
        let text = fs::read_to_string(&p).map_err(|e| io_error(&p, e))?;
        from_triplet(&text).map(Some).map_err(|e| CliError::Input(format!("{}: {e}", p.display())))
    };
    let mut k = Vec::new();
    let mut k_inv = Vec::new();
    while let Some(op) = load(file_name(Gen::K(k.len() + 1)))? {
        k.push(op);
    }
    for i in 1..=k.len() {
        k_inv.push(load(file_name(Gen::KInv(i)))?.ok_or_else(|| CliError::Input(format!("missing kinv{i}.txt")))?);
    }
    let mut e = Vec::new();
    let mut f = Vec::new();
    for i in 1..k.len() {
        e.push(load(file_name(Gen::E(i)))?.ok_or_else(|| CliError::Input(format!("missing e{i}.txt")))?);
        f.push(load(file_name(Gen::F(i)))?.ok_or_else(|| CliError::Input(format!("missing f{i}.txt")))?);
    }
    if k.is_empty() {
        return Err(CliError::Input(format!("{}: no k1.txt", path.display())));
    }
    let gens = GeneratorSet::new(k, k_inv, e, f).map_err(|e| CliError::Input(e.to_string()))?;
    let cols_path = path.join("columns.txt");
    let columns = match fs::read_to_string(&cols_path) {
        Ok(text) => text
            .split_whitespace()
            .map(|x| {
                x.parse::<usize>()
                    .ok()
                    .filter(|&c| c >= 1)
                    .map(|c| c - 1)
                    .ok_or_else(|| CliError::Input(format!("bad column {x:?}")))
            })
            .collect::<Result<_, _>>()?,
        Err(_) => (0..gens.dim()).collect(),
    };
    let q = match fs::read_to_string(path.join("q.txt")) {
        Ok(text) => text
            .trim()
            .parse()
            .map_err(|_| CliError::Input(format!("bad q.txt: {:?}", text.trim())))?,
        Err(_) => q,
    };
    Ok(Bundle { q, columns, gens })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triplet_round_trip_is_exact() {
        let op = SparseOperator::from_triplets(
            3,
            2,
            [
                (0, 0, Complex64::new(1.0 / 3.0, 0.0)),
                (2, 1, Complex64::new(-2.5e-17, std::f64::consts::PI)),
            ],
        )
        .unwrap();
        let text = to_triplet(&op);
        assert!(text.starts_with("3 2 2\n1 1 3.3333333333333331e-1 0.0000000000000000e0\n"));
        assert_eq!(from_triplet(&text).unwrap(), op);
    }

    #[test]
    fn malformed_triplets_are_rejected() {
        assert!(from_triplet("").is_err());
        assert!(from_triplet("2 2 1\n").is_err());
        assert!(from_triplet("2 2 1\n0 1 1 0\n").is_err());
        assert!(from_triplet("2 2 1\n3 1 1 0\n").is_err());
    }
}
