//! CSV and ring-file readers.

use std::cmp::Ordering;
use std::collections::HashSet;
use std::fmt;
use std::fs;
use std::io::Read;
use std::path::Path;

use geoswarm::geo::{self, GeoError, GeoPoint, GeoPolygon};
use geoswarm::hierarchy::HierarchyRecord;
use thiserror::Error;

use crate::geocode::Geocoder;

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("{0}: missing or unusable header ({1})")]
    MissingHeader(String, String),
    #[error("{0}: no data rows")]
    EmptyFile(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Csv {
        path: String,
        #[source]
        source: csv::Error,
    },
    #[error("{path}, line {line}: {message}")]
    Row {
        path: String,
        line: u64,
        message: String,
    },
    #[error("{path}: {source}")]
    Geometry {
        path: String,
        #[source]
        source: GeoError,
    },
}

/// Which columns carry a customer's location.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CustomerFormat {
    /// Use `wkt` when present, else `lon`/`lat`, else only `address`.
    #[default]
    Auto,
    Wkt,
    LonLat,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CustomerRow {
    pub id: String,
    pub name: String,
    pub address: Option<String>,
    pub point: Option<GeoPoint>,
}

impl CustomerRow {
    /// The row's point, or the geocoded address when it has none.
    pub fn locate(
        &self,
        geocoder: &dyn Geocoder,
    ) -> Result<GeoPoint, crate::geocode::GeocodeError> {
        match (&self.point, &self.address) {
            (Some(p), _) => Ok(*p),
            (None, Some(a)) => geocoder.geocode(a),
            (None, None) => Err(crate::geocode::GeocodeError::EmptyAddress),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Reject {
    /// 1-based line number in the file, header included.
    pub line: u64,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct CustomerLoad {
    pub rows: Vec<CustomerRow>,
    pub rejects: Vec<Reject>,
}

struct Columns {
    id: usize,
    name: Option<usize>,
    address: Option<usize>,
    wkt: Option<usize>,
    lon_lat: Option<(usize, usize)>,
}

pub fn load_customers(path: &Path, format: CustomerFormat) -> Result<CustomerLoad, IngestError> {
    let file = fs::File::open(path).map_err(|source| IngestError::Io {
        path: path.display().to_string(),
        source,
    })?;
    read_customers(file, &path.display().to_string(), format)
}

/// Reads customer CSV from any reader. `label` names the source in errors.
///
/// Rows with unusable geometry, no location at all or a repeated id are
/// returned as rejects instead of failing the load.
pub fn read_customers(
    reader: impl Read,
    label: &str,
    format: CustomerFormat,
) -> Result<CustomerLoad, IngestError> {
    let mut csv = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .flexible(false)
        .from_reader(reader);
    let csv_err = |source| IngestError::Csv {
        path: label.to_string(),
        source,
    };
    let headers = csv.headers().map_err(csv_err)?.clone();
    let find = |name: &str| headers.iter().position(|h| h.eq_ignore_ascii_case(name));
    let missing = |what: &str| IngestError::MissingHeader(label.to_string(), what.to_string());
    if headers.iter().all(str::is_empty) {
        return Err(missing("no header row"));
    }
    let cols = Columns {
        id: find("id").ok_or_else(|| missing("no `id` column"))?,
        name: find("name"),
        address: find("address"),
        wkt: match format {
            CustomerFormat::LonLat => None,
            _ => find("wkt"),
        },
        lon_lat: match format {
            CustomerFormat::Wkt => None,
            _ => find("lon").zip(find("lat")),
        },
    };
    match format {
        CustomerFormat::Wkt if cols.wkt.is_none() => return Err(missing("no `wkt` column")),
        CustomerFormat::LonLat if cols.lon_lat.is_none() => {
            return Err(missing("no `lon`/`lat` columns"))
        }
        _ if cols.wkt.is_none() && cols.lon_lat.is_none() && cols.address.is_none() => {
            return Err(missing("need `wkt`, `lon`+`lat` or `address`"))
        }
        _ => {}
    }

    let mut load = CustomerLoad::default();
    let mut ids = HashSet::new();
    for record in csv.records() {
        let record = record.map_err(csv_err)?;
        let line = record.position().map_or(0, |p| p.line());
        let field = |i: Option<usize>| {
            i.and_then(|i| record.get(i))
                .filter(|s| !s.is_empty())
                .map(str::to_string)
        };
        let reject = |reason: String| Reject { line, reason };
        let Some(id) = field(Some(cols.id)) else {
            load.rejects.push(reject("empty id".into()));
            continue;
        };
        let point = match (field(cols.wkt), cols.lon_lat) {
            (Some(w), _) => geo::parse_wkt_point(&w)
                .map(Some)
                .map_err(|e| e.to_string()),
            (None, Some((lo, la))) => match (field(Some(lo)), field(Some(la))) {
                (Some(lon), Some(lat)) => parse_lon_lat(&lon, &lat).map(Some),
                (None, None) => Ok(None),
                _ => Err("only one of lon/lat given".to_string()),
            },
            (None, None) => Ok(None),
        };
        let point = match point {
            Ok(p) => p,
            Err(reason) => {
                load.rejects.push(reject(reason));
                continue;
            }
        };
        let address = field(cols.address);
        if point.is_none() && address.is_none() {
            load.rejects.push(reject("no location or address".into()));
            continue;
        }
        if !ids.insert(id.clone()) {
            load.rejects.push(reject(format!("duplicate id {id}")));
            continue;
        }
        load.rows.push(CustomerRow {
            id,
            name: field(cols.name).unwrap_or_default(),
            address,
            point,
        });
    }
    if load.rows.is_empty() && load.rejects.is_empty() {
        return Err(IngestError::EmptyFile(label.to_string()));
    }
    Ok(load)
}

fn parse_lon_lat(lon: &str, lat: &str) -> Result<GeoPoint, String> {
    let num = |s: &str| {
        s.parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| format!("not a coordinate: {s:?}"))
    };
    GeoPoint::new(num(lon)?, num(lat)?).map_err(|e| e.to_string())
}

/// Employee key: numeric ids order numerically and sort before textual ones.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum RecordId {
    Num(u64),
    Text(String),
}

impl RecordId {
    pub fn parse(s: &str) -> Self {
        s.parse()
            .map_or_else(|_| RecordId::Text(s.to_string()), RecordId::Num)
    }
}

impl Ord for RecordId {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (RecordId::Num(a), RecordId::Num(b)) => a.cmp(b),
            (RecordId::Num(_), RecordId::Text(_)) => Ordering::Less,
            (RecordId::Text(_), RecordId::Num(_)) => Ordering::Greater,
            (RecordId::Text(a), RecordId::Text(b)) => a.cmp(b),
        }
    }
}

impl PartialOrd for RecordId {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for RecordId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RecordId::Num(n) => write!(f, "{n}"),
            RecordId::Text(s) => f.write_str(s),
        }
    }
}

impl fmt::Debug for RecordId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Reads `emp_id,first_name,last_name,manager_id`; an empty `manager_id`
/// marks a root.
pub fn load_hierarchy(path: &Path) -> Result<Vec<HierarchyRecord<RecordId>>, IngestError> {
    let label = path.display().to_string();
    let file = fs::File::open(path).map_err(|source| IngestError::Io {
        path: label.clone(),
        source,
    })?;
    read_hierarchy(file, &label)
}

pub fn read_hierarchy(
    reader: impl Read,
    label: &str,
) -> Result<Vec<HierarchyRecord<RecordId>>, IngestError> {
    let mut csv = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(reader);
    let csv_err = |source| IngestError::Csv {
        path: label.to_string(),
        source,
    };
    let headers = csv.headers().map_err(csv_err)?.clone();
    let find = |name: &str| {
        headers
            .iter()
            .position(|h| h.eq_ignore_ascii_case(name))
            .ok_or_else(|| {
                IngestError::MissingHeader(label.to_string(), format!("no `{name}` column"))
            })
    };
    let (id_col, first_col, last_col, mgr_col) = (
        find("emp_id")?,
        find("first_name")?,
        find("last_name")?,
        find("manager_id")?,
    );
    let mut records = Vec::new();
    for record in csv.records() {
        let record = record.map_err(csv_err)?;
        let get = |i| record.get(i).unwrap_or("");
        let id = get(id_col);
        if id.is_empty() {
            return Err(IngestError::Row {
                path: label.to_string(),
                line: record.position().map_or(0, |p| p.line()),
                message: "empty emp_id".into(),
            });
        }
        let manager = Some(get(mgr_col))
            .filter(|m| !m.is_empty())
            .map(RecordId::parse);
        records.push(
            HierarchyRecord::new(RecordId::parse(id), manager).named(get(first_col), get(last_col)),
        );
    }
    if records.is_empty() {
        return Err(IngestError::EmptyFile(label.to_string()));
    }
    Ok(records)
}

/// Polygons from a ring file. Either one `POLYGON((...))` per line, or
/// vertices as `lon lat` / `lon,lat` lines with blank lines separating
/// rings. `#` starts a comment.
pub fn read_rings(text: &str, label: &str) -> Result<Vec<GeoPolygon>, IngestError> {
    let geom_err = |source| IngestError::Geometry {
        path: label.to_string(),
        source,
    };
    let lines: Vec<(usize, &str)> = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .collect();
    let mut polygons = Vec::new();
    if lines
        .iter()
        .any(|(_, l)| l.len() >= 7 && l[..7].eq_ignore_ascii_case("POLYGON"))
    {
        for (_, l) in lines.iter().filter(|(_, l)| !l.is_empty()) {
            polygons.push(geo::parse_wkt_polygon(l).map_err(geom_err)?);
        }
    } else {
        let mut ring = Vec::new();
        for (n, l) in lines.iter().chain(std::iter::once(&(0, ""))) {
            if l.is_empty() {
                if !ring.is_empty() {
                    polygons.push(GeoPolygon::new(std::mem::take(&mut ring)).map_err(geom_err)?);
                }
                continue;
            }
            let parts: Vec<&str> = l
                .split([',', ' ', '\t'])
                .filter(|s| !s.is_empty())
                .collect();
            let point = match parts.as_slice() {
                [lon, lat] => parse_lon_lat(lon, lat),
                _ => Err(format!("expected `lon lat`, got {l:?}")),
            }
            .map_err(|message| IngestError::Row {
                path: label.to_string(),
                line: *n as u64,
                message,
            })?;
            ring.push(point);
        }
    }
    if polygons.is_empty() {
        return Err(IngestError::EmptyFile(label.to_string()));
    }
    Ok(polygons)
}

pub fn load_rings(path: &Path) -> Result<Vec<GeoPolygon>, IngestError> {
    let label = path.display().to_string();
    let text = fs::read_to_string(path).map_err(|source| IngestError::Io {
        path: label.clone(),
        source,
    })?;
    read_rings(&text, &label)
}
