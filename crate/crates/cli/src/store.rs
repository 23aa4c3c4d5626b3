//! On-disk grid index.
//!
//! Layout, all integers and floats little-endian:
//!
//! ```text
//! magic  "GSIX"
//! u16    format version (1)
//! i32    SRID
//! u8×4   cells per axis for levels 1..4
//! f64×4  bounds: lon_min lat_min lon_max lat_max
//! u64    entry count
//! entry* u32 id length, id bytes (UTF-8), f64 lon, f64 lat
//! ```
//!
//! Entries are written in id order so equal indexes give equal files. Cell
//! keys are not stored; loading recomputes them.

use std::fs;
use std::path::Path;

use geoswarm::geo::{GeoPoint, GeoRect};
use geoswarm::index::{GridConfig, GridDensity, GridIndex, IndexError};
use thiserror::Error;

const MAGIC: &[u8; 4] = b"GSIX";
pub const FORMAT_VERSION: u16 = 1;

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("not an index file (bad magic)")]
    BadMagic,
    #[error("unsupported index format version {0}")]
    UnsupportedVersion(u16),
    #[error("index file is corrupt: {0}")]
    Corrupt(String),
    #[error(transparent)]
    Index(#[from] IndexError),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

fn density_from_cells(n: u8) -> Option<GridDensity> {
    [GridDensity::Low, GridDensity::Medium, GridDensity::High]
        .into_iter()
        .find(|d| d.cells_per_axis() == n as u32)
}

pub fn encode(index: &GridIndex<String>) -> Vec<u8> {
    let cfg = index.config();
    let mut buf = Vec::with_capacity(64 + index.len() * 32);
    buf.extend_from_slice(MAGIC);
    buf.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
    let srid = index
        .entries()
        .next()
        .map_or(geoswarm::geo::SRID_WGS84, |(_, p)| p.srid());
    buf.extend_from_slice(&srid.to_le_bytes());
    for d in cfg.levels {
        buf.push(d.cells_per_axis() as u8);
    }
    let b = &cfg.bounds;
    for v in [b.lon_min(), b.lat_min(), b.lon_max(), b.lat_max()] {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    buf.extend_from_slice(&(index.len() as u64).to_le_bytes());
    let mut entries: Vec<_> = index.entries().collect();
    entries.sort_by(|a, b| a.0.cmp(b.0));
    for (id, p) in entries {
        buf.extend_from_slice(&(id.len() as u32).to_le_bytes());
        buf.extend_from_slice(id.as_bytes());
        buf.extend_from_slice(&p.lon().to_le_bytes());
        buf.extend_from_slice(&p.lat().to_le_bytes());
    }
    buf
}

struct Cursor<'a> {
    buf: &'a [u8],
    at: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], StoreError> {
        let end = self
            .at
            .checked_add(n)
            .filter(|&e| e <= self.buf.len())
            .ok_or_else(|| StoreError::Corrupt(format!("truncated at byte {}", self.at)))?;
        let s = &self.buf[self.at..end];
        self.at = end;
        Ok(s)
    }

    fn array<const N: usize>(&mut self) -> Result<[u8; N], StoreError> {
        Ok(self.take(N)?.try_into().expect("length checked"))
    }

    fn f64(&mut self) -> Result<f64, StoreError> {
        Ok(f64::from_le_bytes(self.array()?))
    }
}

pub fn decode(buf: &[u8]) -> Result<GridIndex<String>, StoreError> {
    let mut c = Cursor { buf, at: 0 };
    if c.take(4).ok() != Some(MAGIC.as_slice()) {
        return Err(StoreError::BadMagic);
    }
    let version = u16::from_le_bytes(c.array()?);
    if version != FORMAT_VERSION {
        return Err(StoreError::UnsupportedVersion(version));
    }
    let srid = i32::from_le_bytes(c.array()?);
    let mut levels = [GridDensity::High; 4];
    for level in &mut levels {
        let n = c.array::<1>()?[0];
        *level = density_from_cells(n)
            .ok_or_else(|| StoreError::Corrupt(format!("bad cell count {n}")))?;
    }
    let bounds = GeoRect::new(c.f64()?, c.f64()?, c.f64()?, c.f64()?).map_err(IndexError::from)?;
    let count = u64::from_le_bytes(c.array()?);
    let mut points = Vec::new();
    for _ in 0..count {
        let len = u32::from_le_bytes(c.array()?) as usize;
        let id = std::str::from_utf8(c.take(len)?)
            .map_err(|_| StoreError::Corrupt("id is not UTF-8".into()))?
            .to_string();
        let p = GeoPoint::with_srid(c.f64()?, c.f64()?, srid).map_err(IndexError::from)?;
        points.push((id, p));
    }
    if c.at != buf.len() {
        return Err(StoreError::Corrupt("trailing bytes".into()));
    }
    Ok(GridIndex::build(points, GridConfig::new(levels, bounds))?)
}

pub fn save(index: &GridIndex<String>, path: &Path) -> Result<(), StoreError> {
    fs::write(path, encode(index)).map_err(|source| StoreError::Io {
        path: path.display().to_string(),
        source,
    })
}

pub fn load(path: &Path) -> Result<GridIndex<String>, StoreError> {
    let buf = fs::read(path).map_err(|source| StoreError::Io {
        path: path.display().to_string(),
        source,
    })?;
    decode(&buf)
}
