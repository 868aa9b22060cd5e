//! Files written by a run. Everything goes below one output directory and is
//! listed in its `manifest.json`.
//!
//! CSV numbers are written as `{:.16e}` (17 significant digits), with `.` as
//! the decimal separator and `\n` line endings; absent values are empty
//! fields. Identical inputs give byte-identical CSV files.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use rabi_core::C64;
use serde::Serialize;

use crate::config::Formats;
use crate::error::{Error, Result};

pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn opt_num(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

/// A value that may be missing from a series, written as an empty field.
pub fn at(series: &Option<Vec<f64>>, k: usize) -> String {
    opt_num(series.as_ref().and_then(|s| s.get(k).copied()))
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io { path: path.to_path_buf(), source }
}

#[derive(Debug)]
pub struct OutputDir {
    root: PathBuf,
    formats: Formats,
    /// Files written so far, relative to `root`.
    files: Vec<PathBuf>,
    scope: Option<PathBuf>,
}

impl OutputDir {
    pub fn create(root: impl Into<PathBuf>, formats: Formats) -> Result<Self> {
        let root = root.into();
        fs::create_dir_all(&root).map_err(io_err(&root))?;
        Ok(Self { root, formats, files: Vec::new(), scope: None })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn formats(&self) -> Formats {
        self.formats
    }

    pub fn files(&self) -> &[PathBuf] {
        &self.files
    }

    /// Subsequent files go to `root/dir`; `None` returns to the root.
    pub fn set_scope(&mut self, dir: Option<&str>) {
        self.scope = dir.map(PathBuf::from);
    }

    fn target(&mut self, name: &str) -> Result<(PathBuf, PathBuf)> {
        let rel = match &self.scope {
            Some(d) => d.join(name),
            None => PathBuf::from(name),
        };
        let path = self.root.join(&rel);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent).map_err(io_err(parent))?;
        }
        Ok((rel, path))
    }

    fn record(&mut self, rel: PathBuf) {
        if !self.files.contains(&rel) {
            self.files.push(rel);
        }
    }

    pub fn csv<I>(&mut self, name: &str, header: &[&str], rows: I) -> Result<()>
    where
        I: IntoIterator<Item = Vec<String>>,
    {
        if !self.formats.csv {
            return Ok(());
        }
        let (rel, path) = self.target(name)?;
        let csv_err = |source| Error::Csv { path: path.clone(), source };
        let mut w =
            csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_path(&path).map_err(csv_err)?;
        w.write_record(header).map_err(csv_err)?;
        for row in rows {
            debug_assert_eq!(row.len(), header.len());
            w.write_record(&row).map_err(csv_err)?;
        }
        w.flush().map_err(io_err(&path))?;
        self.record(rel);
        Ok(())
    }

    pub fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        if !self.formats.json {
            return Ok(());
        }
        self.write_json(name, value)
    }

    fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        let (rel, path) = self.target(name)?;
        let file = fs::File::create(&path).map_err(io_err(&path))?;
        let mut w = BufWriter::new(file);
        serde_json::to_writer_pretty(&mut w, value).map_err(|source| Error::Json { path: path.clone(), source })?;
        w.write_all(b"\n").and_then(|_| w.flush()).map_err(io_err(&path))?;
        self.record(rel);
        Ok(())
    }

    /// Renders a plot unless SVG output is off.
    pub fn svg(&mut self, name: &str, draw: impl FnOnce(&Path) -> Result<()>) -> Result<()> {
        if !self.formats.svg {
            return Ok(());
        }
        let (rel, path) = self.target(name)?;
        draw(&path)?;
        self.record(rel);
        Ok(())
    }

    /// Joint states in the snapshot layout: per sample a little-endian `u64`
    /// dimension followed by that many `(re, im)` pairs of little-endian `f64`.
    pub fn snapshots(&mut self, name: &str, states: &[Vec<C64>]) -> Result<()> {
        let (rel, path) = self.target(name)?;
        let file = fs::File::create(&path).map_err(io_err(&path))?;
        let mut w = BufWriter::new(file);
        let put = |w: &mut BufWriter<fs::File>| -> std::io::Result<()> {
            for s in states {
                w.write_all(&(s.len() as u64).to_le_bytes())?;
                for z in s {
                    w.write_all(&z.re.to_le_bytes())?;
                    w.write_all(&z.im.to_le_bytes())?;
                }
            }
            w.flush()
        };
        put(&mut w).map_err(io_err(&path))?;
        self.record(rel);
        Ok(())
    }

    /// Writes `manifest.json` at the root, listing every file written so far.
    /// The manifest is written whatever the format flags.
    pub fn manifest(&mut self, manifest: &Manifest) -> Result<()> {
        let scope = self.scope.take();
        let mut m = manifest.clone();
        m.files = self.files.iter().map(|p| p.to_string_lossy().replace('\\', "/")).collect();
        let r = self.write_json("manifest.json", &m);
        self.scope = scope;
        r
    }
}

/// Reads back a snapshot file.
pub fn read_snapshots(path: &Path) -> Result<Vec<Vec<C64>>> {
    let bytes = fs::read(path).map_err(io_err(path))?;
    let bad = || Error::Io {
        path: path.to_path_buf(),
        source: std::io::Error::new(std::io::ErrorKind::InvalidData, "truncated snapshot file"),
    };
    let mut out = Vec::new();
    let mut k = 0;
    let word = |k: usize| -> Option<[u8; 8]> { bytes.get(k..k + 8).map(|b| b.try_into().expect("8 bytes")) };
    while k < bytes.len() {
        let dim = u64::from_le_bytes(word(k).ok_or_else(bad)?) as usize;
        k += 8;
        let mut s = Vec::with_capacity(dim);
        for _ in 0..dim {
            let re = f64::from_le_bytes(word(k).ok_or_else(bad)?);
            let im = f64::from_le_bytes(word(k + 8).ok_or_else(bad)?);
            s.push(C64::new(re, im));
            k += 16;
        }
        out.push(s);
    }
    Ok(out)
}

#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub core_version: &'static str,
    pub subcommand: String,
    pub config: serde_json::Value,
    pub config_hash: String,
    pub workers: usize,
    pub wall_time_s: f64,
    pub determinism: &'static str,
    /// Cells or levels that failed, with their cause.
    pub failures: Vec<String>,
    pub files: Vec<String>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_format_has_17_digits() {
        assert_eq!(num(0.1), "1.0000000000000001e-1");
        assert_eq!(num(-2.0), "-2.0000000000000000e0");
        assert_eq!(num(0.1).parse::<f64>().unwrap(), 0.1);
        assert_eq!(opt_num(None), "");
    }

    #[test]
    fn csv_layout_and_listing() {
        let dir = tempfile::tempdir().unwrap();
        let mut out = OutputDir::create(dir.path(), Formats::default()).unwrap();
        out.set_scope(Some("sub"));
        out.csv("a.csv", &["x", "y"], vec![vec![num(1.0), String::new()]]).unwrap();
        let text = fs::read_to_string(dir.path().join("sub/a.csv")).unwrap();
        assert_eq!(text, "x,y\n1.0000000000000000e0,\n");
        assert_eq!(out.files(), &[PathBuf::from("sub/a.csv")]);
    }

    #[test]
    fn disabled_formats_write_nothing() {
        let dir = tempfile::tempdir().unwrap();
        let mut out = OutputDir::create(dir.path(), Formats { csv: false, json: false, svg: false }).unwrap();
        out.csv("a.csv", &["x"], vec![vec![num(1.0)]]).unwrap();
        out.json("a.json", &1).unwrap();
        out.svg("a.svg", |_| panic!("not drawn")).unwrap();
        assert!(out.files().is_empty());
        assert!(!dir.path().join("a.csv").exists());
    }

    #[test]
    fn snapshots_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let mut out = OutputDir::create(dir.path(), Formats::default()).unwrap();
        let states = vec![vec![C64::new(1.0, -0.5), C64::new(0.0, 2.0)], vec![C64::new(3.0, 0.0)]];
        out.snapshots("s.bin", &states).unwrap();
        let path = dir.path().join("s.bin");
        assert_eq!(fs::metadata(&path).unwrap().len(), 8 + 32 + 8 + 16);
        assert_eq!(read_snapshots(&path).unwrap(), states);
    }
}
