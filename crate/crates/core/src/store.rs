//! On-disk catalog cache.
//!
//! A catalog file is newline-delimited JSON: a header object followed by one
//! record per class, lowest edge count first. The header carries the format
//! version and a SHA-256 checksum over the record lines; a file that fails
//! either check is treated as absent and rebuilt. Interrupted enumerations
//! are written in the same format with `complete: false`.

use std::fs::{self, File};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::enumerate::{enumerate_with, CatalogEntry, Enumeration, EnumerationOptions, GraphCatalog, PartialCatalog};
use crate::error::{Error, Result};

pub const FORMAT_VERSION: u32 = 1;
pub const CACHE_ENV: &str = "TROPICELL_CACHE";

#[derive(Debug, Serialize, Deserialize)]
struct Header {
    format: String,
    version: u32,
    g: u32,
    n: u32,
    complete: bool,
    /// Lowest populated level of a partial catalog.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    lowest: Option<usize>,
    top_edges: usize,
    classes: usize,
    checksum: String,
}

const FORMAT_NAME: &str = "tropicell-catalog";

#[derive(Debug)]
pub enum StoredCatalog {
    Complete(GraphCatalog),
    Partial(PartialCatalog),
}

fn write_levels<W: Write>(g: u32, n: u32, levels: &[Vec<CatalogEntry>], lowest: Option<usize>, w: W) -> Result<()> {
    let mut lines = Vec::new();
    let mut hasher = Sha256::new();
    for entry in levels.iter().skip(lowest.unwrap_or(0)).flatten() {
        let line = serde_json::to_string(entry)?;
        hasher.update(line.as_bytes());
        hasher.update(b"\n");
        lines.push(line);
    }
    let header = Header {
        format: FORMAT_NAME.into(),
        version: FORMAT_VERSION,
        g,
        n,
        complete: lowest.is_none(),
        lowest,
        top_edges: levels.len(),
        classes: lines.len(),
        checksum: hex::encode(hasher.finalize()),
    };
    let mut w = BufWriter::new(w);
    serde_json::to_writer(&mut w, &header)?;
    w.write_all(b"\n")?;
    for line in lines {
        w.write_all(line.as_bytes())?;
        w.write_all(b"\n")?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_catalog<W: Write>(catalog: &GraphCatalog, w: W) -> Result<()> {
    write_levels(catalog.g(), catalog.n(), catalog.levels(), None, w)
}

pub fn write_partial<W: Write>(partial: &PartialCatalog, w: W) -> Result<()> {
    write_levels(partial.g, partial.n, &partial.levels, Some(partial.lowest), w)
}

/// Parses and validates a catalog file. Version or checksum mismatches are
/// reported as [`Error::Format`].
pub fn read_catalog<R: BufRead>(r: R) -> Result<StoredCatalog> {
    let mut lines = r.lines();
    let header_line = lines
        .next()
        .ok_or_else(|| Error::Format("empty catalog file".into()))??;
    let header: Header = serde_json::from_str(&header_line).map_err(|e| Error::Format(format!("bad header: {e}")))?;
    if header.format != FORMAT_NAME {
        return Err(Error::Format(format!("unknown format {:?}", header.format)));
    }
    if header.version != FORMAT_VERSION {
        return Err(Error::Format(format!(
            "format version {} (expected {FORMAT_VERSION})",
            header.version
        )));
    }
    let mut hasher = Sha256::new();
    let mut levels: Vec<Vec<CatalogEntry>> = vec![Vec::new(); header.top_edges];
    let mut count = 0;
    for line in lines {
        let line = line?;
        if line.is_empty() {
            continue;
        }
        hasher.update(line.as_bytes());
        hasher.update(b"\n");
        let entry: CatalogEntry = serde_json::from_str(&line).map_err(|e| Error::Format(format!("bad record: {e}")))?;
        let edges = entry.graph.num_edges();
        if edges == 0 || edges > header.top_edges {
            return Err(Error::Format(format!("record with {edges} edges")));
        }
        levels[edges - 1].push(entry);
        count += 1;
    }
    if count != header.classes || hex::encode(hasher.finalize()) != header.checksum {
        return Err(Error::Format("checksum mismatch".into()));
    }
    if header.complete {
        Ok(StoredCatalog::Complete(GraphCatalog::from_levels(
            header.g, header.n, levels,
        )))
    } else {
        let lowest = header
            .lowest
            .filter(|&l| l < header.top_edges)
            .ok_or_else(|| Error::Format("partial catalog without a valid lowest level".into()))?;
        Ok(StoredCatalog::Partial(PartialCatalog {
            g: header.g,
            n: header.n,
            lowest,
            levels,
        }))
    }
}

/// Where catalogs live when no directory is given explicitly.
pub fn default_cache_dir() -> Option<PathBuf> {
    if let Some(dir) = std::env::var_os(CACHE_ENV).filter(|d| !d.is_empty()) {
        return Some(PathBuf::from(dir));
    }
    if let Some(dir) = std::env::var_os("XDG_CACHE_HOME").filter(|d| !d.is_empty()) {
        return Some(PathBuf::from(dir).join("tropicell"));
    }
    std::env::var_os("HOME").map(|h| PathBuf::from(h).join(".cache").join("tropicell"))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CacheStatus {
    Hit,
    Built,
    /// A cached file existed but was unreadable, stale or corrupt.
    Rebuilt(String),
    /// Enumeration continued from a saved checkpoint.
    Resumed,
}

#[derive(Clone, Debug)]
pub struct CatalogStore {
    dir: PathBuf,
}

impl CatalogStore {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        CatalogStore { dir: dir.into() }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn catalog_path(&self, g: u32, n: u32) -> PathBuf {
        self.dir.join(format!("jgn-{g}-{n}.ndjson"))
    }

    pub fn checkpoint_path(&self, g: u32, n: u32) -> PathBuf {
        self.dir.join(format!("jgn-{g}-{n}.partial.ndjson"))
    }

    fn write_atomic(&self, path: &Path, f: impl FnOnce(File) -> Result<()>) -> Result<()> {
        fs::create_dir_all(&self.dir)?;
        let tmp = path.with_extension("tmp");
        f(File::create(&tmp)?)?;
        fs::rename(&tmp, path)?;
        Ok(())
    }

    pub fn save(&self, catalog: &GraphCatalog) -> Result<PathBuf> {
        let path = self.catalog_path(catalog.g(), catalog.n());
        self.write_atomic(&path, |f| write_catalog(catalog, f))?;
        Ok(path)
    }

    pub fn save_checkpoint(&self, partial: &PartialCatalog) -> Result<PathBuf> {
        let path = self.checkpoint_path(partial.g, partial.n);
        self.write_atomic(&path, |f| write_partial(partial, f))?;
        Ok(path)
    }

    /// `Ok(None)` when no file exists; format problems are errors.
    pub fn load(&self, g: u32, n: u32) -> Result<Option<GraphCatalog>> {
        let path = self.catalog_path(g, n);
        if !path.exists() {
            return Ok(None);
        }
        match read_catalog(BufReader::new(File::open(&path)?))? {
            StoredCatalog::Complete(c) if c.g() == g && c.n() == n => Ok(Some(c)),
            _ => Err(Error::Format(format!("{} holds a different catalog", path.display()))),
        }
    }

    fn load_checkpoint(&self, g: u32, n: u32) -> Option<PartialCatalog> {
        let file = File::open(self.checkpoint_path(g, n)).ok()?;
        match read_catalog(BufReader::new(file)) {
            Ok(StoredCatalog::Partial(p)) if p.g == g && p.n == n => Some(p),
            _ => None,
        }
    }

    /// Returns the cached catalog, or enumerates (resuming from a checkpoint
    /// when one exists) and caches the result. If the class limit is hit, a
    /// checkpoint is written and [`Error::ResourceLimit`] returned.
    pub fn load_or_build(
        &self,
        g: u32,
        n: u32,
        options: &EnumerationOptions<'_>,
    ) -> Result<(GraphCatalog, CacheStatus)> {
        let mut status = CacheStatus::Built;
        match self.load(g, n) {
            Ok(Some(c)) => return Ok((c, CacheStatus::Hit)),
            Ok(None) => {}
            Err(e) => status = CacheStatus::Rebuilt(e.to_string()),
        }
        let resume = self.load_checkpoint(g, n);
        if resume.is_some() && status == CacheStatus::Built {
            status = CacheStatus::Resumed;
        }
        match enumerate_with(g, n, options, resume)? {
            Enumeration::Complete(c) => {
                self.save(&c)?;
                let _ = fs::remove_file(self.checkpoint_path(g, n));
                Ok((c, status))
            }
            Enumeration::Interrupted(p) => {
                let path = self.save_checkpoint(&p)?;
                Err(Error::ResourceLimit {
                    classes: p.classes(),
                    completed_edges: p.lowest + 1,
                    checkpoint: path.display().to_string(),
                })
            }
        }
    }
}
