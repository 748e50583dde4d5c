//! Point-cloud CSV files and JSON Lines manifests.
//!
//! A cloud file holds one point per row, `d` comma-separated numbers per
//! row. A first row that does not parse as numbers is treated as a header.
//! Blank lines and lines starting with `#` are ignored.

use std::fs::File;
use std::io::{self, BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use canon_core::coverage::Dataset;
use canon_core::synth::{normalize, Normalization};
use canon_core::PointCloud;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Numeric rows of a CSV file plus its header, if it had one.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Option<Vec<String>>,
    pub rows: Vec<Vec<f64>>,
}

/// How a plain vector was laid out on disk.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Layout {
    Row,
    Column,
}

impl Table {
    pub fn read(path: &Path) -> Result<Self> {
        let file = File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
        Self::from_reader(file).with_context(|| format!("while reading {}", path.display()))
    }

    pub fn from_reader(r: impl io::Read) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(false)
            .flexible(true)
            .comment(Some(b'#'))
            .trim(csv::Trim::All)
            .from_reader(r);
        let mut header = None;
        let mut rows: Vec<Vec<f64>> = Vec::new();
        for (i, record) in reader.records().enumerate() {
            let record = record?;
            if record.iter().all(str::is_empty) {
                continue;
            }
            let parsed: std::result::Result<Vec<f64>, _> = record.iter().map(str::parse::<f64>).collect();
            match parsed {
                Ok(row) => {
                    if let Some(bad) = row.iter().find(|v| !v.is_finite()) {
                        bail!("line {}: non-finite value {bad}", i + 1);
                    }
                    if let Some(first) = rows.first() {
                        if first.len() != row.len() {
                            bail!("line {}: expected {} values, found {}", i + 1, first.len(), row.len());
                        }
                    }
                    rows.push(row);
                }
                Err(_) if rows.is_empty() && header.is_none() => {
                    header = Some(record.iter().map(str::to_owned).collect());
                }
                Err(e) => bail!("line {}: {e}", i + 1),
            }
        }
        if rows.is_empty() {
            bail!("no numeric rows");
        }
        Ok(Self { header, rows })
    }

    /// Rows as points: a `d × n` cloud with `n` = number of rows.
    pub fn cloud(&self) -> Result<PointCloud> {
        Ok(PointCloud::from_points(&self.rows)?)
    }

    /// The values as a plain vector, when the file is a single row or a single column.
    pub fn vector(&self) -> Option<(Vec<f64>, Layout)> {
        if self.rows.len() == 1 {
            Some((self.rows[0].clone(), Layout::Row))
        } else if self.rows.iter().all(|r| r.len() == 1) {
            Some((self.rows.iter().map(|r| r[0]).collect(), Layout::Column))
        } else {
            None
        }
    }

    pub fn from_cloud(cloud: &PointCloud, header: Option<Vec<String>>) -> Self {
        Self {
            header,
            rows: cloud.points().map(<[f64]>::to_vec).collect(),
        }
    }

    pub fn from_vector(values: Vec<f64>, layout: Layout, header: Option<Vec<String>>) -> Self {
        let rows = match layout {
            Layout::Row => vec![values],
            Layout::Column => values.into_iter().map(|v| vec![v]).collect(),
        };
        Self { header, rows }
    }

    /// Writes values in shortest round-trip decimal form, so reading the file
    /// back reproduces every value exactly.
    pub fn write(&self, out: impl Write) -> Result<()> {
        let mut w = csv::WriterBuilder::new().flexible(true).from_writer(out);
        if let Some(h) = &self.header {
            w.write_record(h)?;
        }
        for row in &self.rows {
            w.write_record(row.iter().map(|v| v.to_string()))?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Reads a cloud file; one point per row.
pub fn read_cloud(path: &Path) -> Result<PointCloud> {
    Table::read(path)?.cloud()
}

/// `Some(path)` writes to the file, `None` to stdout.
pub fn output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(File::create(p).with_context(|| format!("cannot create {}", p.display()))?),
        None => Box::new(io::stdout().lock()),
    })
}

/// `v` with 12 significant digits, trailing zeros removed.
pub fn sig12(v: f64) -> String {
    if v == 0.0 || !v.is_finite() {
        return v.to_string();
    }
    let exp = v.abs().log10().floor() as i32;
    if !(-5..=15).contains(&exp) {
        return format!("{v:.11e}");
    }
    let decimals = (11 - exp).max(0) as usize;
    let s = format!("{v:.decimals$}");
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_owned()
    } else {
        s
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub path: PathBuf,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<u32>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum ManifestLine {
    Entry(ManifestEntry),
    Settings { normalization: Normalization },
}

/// A JSON Lines list of labelled cloud files.
///
/// Each line is `{"path": ..., "label": ...}`; an optional line
/// `{"normalization": {...}}` sets the preprocessing for every entry.
/// Relative paths are resolved against the manifest's directory.
#[derive(Debug, Clone, PartialEq)]
pub struct Manifest {
    pub entries: Vec<ManifestEntry>,
    pub normalization: Option<Normalization>,
}

impl Manifest {
    pub fn read(path: &Path) -> Result<Self> {
        let file = File::open(path).with_context(|| format!("cannot open manifest {}", path.display()))?;
        let base = path.parent().unwrap_or(Path::new("."));
        let mut entries = Vec::new();
        let mut normalization = None;
        for (i, line) in BufReader::new(file).lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let parsed: ManifestLine = serde_json::from_str(&line)
                .with_context(|| format!("{}:{}: malformed manifest line", path.display(), i + 1))?;
            match parsed {
                ManifestLine::Entry(mut e) => {
                    if e.path.is_relative() {
                        e.path = base.join(&e.path);
                    }
                    if !e.path.is_file() {
                        bail!("{}:{}: no such file {}", path.display(), i + 1, e.path.display());
                    }
                    entries.push(e);
                }
                ManifestLine::Settings { normalization: n } => normalization = Some(n),
            }
        }
        if entries.is_empty() {
            bail!("manifest {} lists no clouds", path.display());
        }
        Ok(Self { entries, normalization })
    }

    /// Loads every cloud, applying the normalization with a generator seeded by `seed`.
    pub fn load(&self, name: &str, seed: u64) -> Result<Dataset> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut items = Vec::with_capacity(self.entries.len());
        for e in &self.entries {
            let mut cloud = read_cloud(&e.path)?.with_label(e.label);
            if let Some(n) = &self.normalization {
                cloud = normalize(&cloud, n, &mut rng).with_context(|| format!("normalizing {}", e.path.display()))?;
            }
            items.push(cloud);
        }
        Ok(Dataset::new(name, items)?)
    }
}

pub fn write_manifest(path: &Path, entries: &[ManifestEntry]) -> Result<()> {
    let mut out = io::BufWriter::new(File::create(path).with_context(|| format!("cannot create {}", path.display()))?);
    for e in entries {
        writeln!(out, "{}", serde_json::to_string(e)?)?;
    }
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_and_comments() {
        let t = Table::from_reader("x,y\n# note\n1,2\n\n3.5,4\n".as_bytes()).unwrap();
        assert_eq!(t.header, Some(vec!["x".into(), "y".into()]));
        assert_eq!(t.rows, vec![vec![1.0, 2.0], vec![3.5, 4.0]]);
        let c = t.cloud().unwrap();
        assert_eq!(c.shape(), (2, 2));
        assert_eq!(c.row(0), vec![1.0, 3.5]);
    }

    #[test]
    fn ragged_and_garbage_rows_fail() {
        assert!(Table::from_reader("1,2\n3\n".as_bytes()).is_err());
        assert!(Table::from_reader("1,2\nfoo,4\n".as_bytes()).is_err());
        assert!(Table::from_reader("a,b\n".as_bytes()).is_err());
        assert!(Table::from_reader("1,nan\n".as_bytes()).is_err());
    }

    #[test]
    fn vector_layouts() {
        let row = Table::from_reader("3,1,2\n".as_bytes()).unwrap();
        assert_eq!(row.vector(), Some((vec![3.0, 1.0, 2.0], Layout::Row)));
        let col = Table::from_reader("3\n1\n2\n".as_bytes()).unwrap();
        assert_eq!(col.vector(), Some((vec![3.0, 1.0, 2.0], Layout::Column)));
        let grid = Table::from_reader("3,1\n2,0\n".as_bytes()).unwrap();
        assert_eq!(grid.vector(), None);
    }

    #[test]
    fn write_round_trips() {
        let t = Table::from_reader("0.1,1e-7,3\n2,0.30000000000000004,-1\n".as_bytes()).unwrap();
        let mut buf = Vec::new();
        t.write(&mut buf).unwrap();
        assert_eq!(Table::from_reader(buf.as_slice()).unwrap(), t);
        let mut buf = Vec::new();
        Table::from_vector(vec![1.0, 2.0, 3.0], Layout::Row, None).write(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "1,2,3\n");
    }

    #[test]
    fn twelve_digits() {
        assert_eq!(sig12(0.0), "0");
        assert_eq!(sig12(1.0), "1");
        assert_eq!(sig12(1.0 / 3.0), "0.333333333333");
        assert_eq!(sig12(12345.678901234567), "12345.6789012");
        assert_eq!(sig12(2.0f64.sqrt()), "1.41421356237");
        assert_eq!(sig12(1e-9), "1.00000000000e-9");
    }
}
