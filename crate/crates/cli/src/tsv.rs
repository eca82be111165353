//! Tab-separated input and output.
//!
//! Every file has a header line. Columns are found by name, so extra
//! columns are ignored. Reals are written with 17 significant digits, which
//! round-trips any `f64`.

use std::collections::HashMap;
use std::fs::File;
use std::io::Write;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use pweight_core::testing::SummaryStatRecord;

/// Round-trip exact rendering of a real (`inf` and `-inf` for infinities).
pub fn fmt_real(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        format!("{x}")
    }
}

/// A header plus rows of already formatted cells.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self { header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn render(&self) -> String {
        let mut out = self.header.join("\t");
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.join("\t"));
            out.push('\n');
        }
        out
    }

    /// Index of a named column.
    pub fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }
}

/// Writes through a temporary file in the target directory, then renames,
/// so a failed run never leaves a partial file behind.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)
        .with_context(|| format!("cannot create a temporary file in {}", dir.display()))?;
    tmp.write_all(contents)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).with_context(|| format!("cannot write {}", path.display()))?;
    Ok(())
}

struct Reader {
    path: String,
    inner: csv::Reader<File>,
    columns: HashMap<String, usize>,
}

impl Reader {
    fn open(path: &Path) -> Result<Self> {
        let file = File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
        let mut inner = csv::ReaderBuilder::new().delimiter(b'\t').has_headers(true).from_reader(file);
        let path = path.display().to_string();
        let columns = inner
            .headers()
            .with_context(|| format!("{path}:1: unreadable header"))?
            .iter()
            .enumerate()
            .map(|(i, h)| (h.trim().to_ascii_lowercase(), i))
            .collect();
        Ok(Self { path, inner, columns })
    }

    fn require(&self, name: &str) -> Result<usize> {
        self.columns
            .get(name)
            .copied()
            .ok_or_else(|| anyhow!("{}:1: header has no `{name}` column", self.path))
    }

    /// Calls `row` on every data record; errors are prefixed with `path:line`.
    fn for_each(mut self, mut row: impl FnMut(&csv::StringRecord) -> Result<()>) -> Result<()> {
        let mut rec = csv::StringRecord::new();
        loop {
            let more = self.inner.read_record(&mut rec).map_err(|e| match e.position() {
                Some(p) => anyhow!("{}:{}: {e}", self.path, p.line()),
                None => anyhow!("{}: {e}", self.path),
            })?;
            if !more {
                return Ok(());
            }
            let line = rec.position().map_or(0, |p| p.line());
            row(&rec).with_context(|| format!("{}:{line}", self.path))?;
        }
    }
}

fn field(rec: &csv::StringRecord, i: usize) -> Result<&str> {
    rec.get(i).map(str::trim).ok_or_else(|| anyhow!("missing column {}", i + 1))
}

fn real(rec: &csv::StringRecord, i: usize, what: &str) -> Result<f64> {
    let s = field(rec, i)?;
    let x: f64 = s.parse().map_err(|_| anyhow!("{what} {s:?} is not a number"))?;
    if x.is_nan() {
        bail!("{what} is NaN");
    }
    Ok(x)
}

/// Reads `id` and one named real column, e.g. `mu` or `p`.
pub fn read_values(path: &Path, column: &str) -> Result<(Vec<String>, Vec<f64>)> {
    let r = Reader::open(path)?;
    let (id_col, val_col) = (r.require("id")?, r.require(column)?);
    let (mut ids, mut vals) = (Vec::new(), Vec::new());
    r.for_each(|rec| {
        ids.push(field(rec, id_col)?.to_string());
        vals.push(real(rec, val_col, column)?);
        Ok(())
    })?;
    if ids.is_empty() {
        bail!("{}: no data rows", path.display());
    }
    Ok((ids, vals))
}

/// Reads summary statistics: `id`, `p`, and optionally `n` and `sign`.
///
/// `broadcast_n` replaces the per-record sample size (and makes the `n`
/// column optional).
pub fn read_summary(path: &Path, broadcast_n: Option<f64>) -> Result<Vec<SummaryStatRecord>> {
    let r = Reader::open(path)?;
    let id_col = r.require("id")?;
    let p_col = r.require("p")?;
    let n_col = match broadcast_n {
        Some(_) => None,
        None => Some(r.require("n").context("pass --broadcast-n for study-level sample sizes")?),
    };
    let sign_col = r.columns.get("sign").copied();
    let mut out = Vec::new();
    r.for_each(|rec| {
        let n = match n_col {
            Some(c) => real(rec, c, "n")?,
            None => broadcast_n.unwrap_or_default(),
        };
        let sign = match sign_col.map(|c| field(rec, c)).transpose()? {
            None | Some("") | Some("NA") | Some("na") => None,
            Some(s) => Some(match s {
                "+" | "+1" | "1" => 1.0,
                "-" | "-1" => -1.0,
                other => bail!("sign {other:?} must be +1 or -1"),
            }),
        };
        out.push(SummaryStatRecord::new(field(rec, id_col)?, real(rec, p_col, "p")?, n, sign)?);
        Ok(())
    })?;
    if out.is_empty() {
        bail!("{}: no data rows", path.display());
    }
    Ok(out)
}

/// Reads an `id`, `locus` grouping used to count hits per locus.
pub fn read_loci(path: &Path) -> Result<HashMap<String, String>> {
    let r = Reader::open(path)?;
    let (id_col, locus_col) = (r.require("id")?, r.require("locus")?);
    let mut map = HashMap::new();
    r.for_each(|rec| {
        map.insert(field(rec, id_col)?.to_string(), field(rec, locus_col)?.to_string());
        Ok(())
    })?;
    Ok(map)
}
