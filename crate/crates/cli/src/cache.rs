//! Append-only truant cache, one file per `(m, n, bound)`.
//!
//! Each line is `<coefficients>\t<truant>` with the truant written as an
//! integer or `inf`. Lines that fail to parse are skipped with a warning.

use std::fs::{self, File, OpenOptions};
use std::io::{self, BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use gonal_core::{CoeffVector, Truant, TruantSink};
use log::warn;

pub const CACHE_DIR_ENV: &str = "GONAL_CACHE_DIR";

pub struct TruantCache {
    path: PathBuf,
    file: Mutex<File>,
}

impl TruantCache {
    pub fn file_name(m: u64, n: u64, bound: u64) -> String {
        format!("truants-m{m}-n{n}-b{bound}.tsv")
    }

    /// Opens (creating if needed) the cache file and returns the records
    /// already in it.
    pub fn open(
        dir: &Path,
        m: u64,
        n: u64,
        bound: u64,
    ) -> io::Result<(TruantCache, Vec<(CoeffVector, Truant)>)> {
        fs::create_dir_all(dir)?;
        let path = dir.join(Self::file_name(m, n, bound));
        let known = if path.exists() {
            read_records(&path)?
        } else {
            Vec::new()
        };
        let mut file = OpenOptions::new().create(true).append(true).open(&path)?;
        // A run killed mid-write leaves a partial line; start on a fresh one.
        let len = file.metadata()?.len();
        if len > 0 && !fs::read(&path)?.ends_with(b"\n") {
            file.write_all(b"\n")?;
        }
        Ok((
            TruantCache {
                path,
                file: Mutex::new(file),
            },
            known,
        ))
    }

    pub fn path(&self) -> &Path {
        &self.path
    }
}

fn read_records(path: &Path) -> io::Result<Vec<(CoeffVector, Truant)>> {
    let mut out = Vec::new();
    for (i, line) in BufReader::new(File::open(path)?).lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        match parse_record(&line) {
            Some(rec) => out.push(rec),
            None => warn!(
                "{}:{}: discarding corrupt cache entry {line:?}",
                path.display(),
                i + 1
            ),
        }
    }
    Ok(out)
}

pub fn parse_record(line: &str) -> Option<(CoeffVector, Truant)> {
    let (vector, truant) = line.split_once('\t')?;
    let vector: CoeffVector = vector.parse().ok()?;
    let truant = match truant.trim() {
        "inf" => Truant::AboveBound,
        t => Truant::Finite(t.parse().ok()?),
    };
    Some((vector, truant))
}

pub fn format_record(vector: &CoeffVector, truant: Truant) -> String {
    let coeffs: Vec<String> = vector.as_slice().iter().map(u64::to_string).collect();
    let t = truant
        .finite()
        .map_or_else(|| "inf".to_owned(), |t| t.to_string());
    format!("{}\t{t}\n", coeffs.join(","))
}

impl TruantSink for TruantCache {
    fn record(&self, vector: &CoeffVector, truant: Truant) {
        let line = format_record(vector, truant);
        let mut file = self.file.lock().unwrap_or_else(|e| e.into_inner());
        // Whole-line appends; a torn final line is discarded on the next load.
        if let Err(e) = file.write_all(line.as_bytes()) {
            warn!("{}: cache write failed: {e}", self.path.display());
        }
    }
}

/// `--cache-dir`, else `$GONAL_CACHE_DIR`, else the user cache directory.
pub fn resolve_dir(flag: Option<&Path>) -> Option<PathBuf> {
    if let Some(dir) = flag {
        return Some(dir.to_path_buf());
    }
    if let Some(dir) = std::env::var_os(CACHE_DIR_ENV) {
        return Some(PathBuf::from(dir));
    }
    let base = std::env::var_os("XDG_CACHE_HOME")
        .map(PathBuf::from)
        .or_else(|| std::env::var_os("HOME").map(|h| PathBuf::from(h).join(".cache")))?;
    Some(base.join("gonal"))
}
