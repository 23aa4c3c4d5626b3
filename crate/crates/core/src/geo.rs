//! Geographic primitives: longitude/latitude points, simple polygons, WKT
//! text codec, great-circle distance and planar containment.

use std::cmp::Ordering;
use std::fmt;

use thiserror::Error;

/// Spatial reference id for GPS longitude/latitude (WGS84).
pub const SRID_WGS84: i32 = 4326;

/// Mean Earth radius of the sphere model, in meters.
pub const EARTH_RADIUS_M: f64 = 6_371_000.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeoError {
    #[error("malformed WKT: {0}")]
    MalformedWkt(String),
    #[error("coordinate out of range: lon={lon}, lat={lat}")]
    OutOfRangeCoordinate { lon: f64, lat: f64 },
    #[error("SRID mismatch: {0} vs {1}")]
    SridMismatch(i32, i32),
    #[error("unsupported region: {0}")]
    UnsupportedRegion(String),
    #[error("invalid polygon: {0}")]
    InvalidPolygon(String),
    #[error("invalid rectangle: {0}")]
    InvalidRect(String),
}

/// A position on the globe in degrees.
///
/// Longitude is kept in `[-180, 180]` and latitude in `[-90, 90]`; the
/// constructors reject anything else, including non-finite values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeoPoint {
    lon: f64,
    lat: f64,
    srid: i32,
}

impl GeoPoint {
    /// A point in SRID 4326.
    pub fn new(lon: f64, lat: f64) -> Result<Self, GeoError> {
        Self::with_srid(lon, lat, SRID_WGS84)
    }

    pub fn with_srid(lon: f64, lat: f64, srid: i32) -> Result<Self, GeoError> {
        if !(-180.0..=180.0).contains(&lon) || !(-90.0..=90.0).contains(&lat) {
            return Err(GeoError::OutOfRangeCoordinate { lon, lat });
        }
        Ok(Self { lon, lat, srid })
    }

    pub fn lon(&self) -> f64 {
        self.lon
    }

    pub fn lat(&self) -> f64 {
        self.lat
    }

    pub fn srid(&self) -> i32 {
        self.srid
    }

    fn check_srid(&self, other: &GeoPoint) -> Result<(), GeoError> {
        if self.srid != other.srid {
            return Err(GeoError::SridMismatch(self.srid, other.srid));
        }
        Ok(())
    }

    fn canonical_cmp(&self, other: &GeoPoint) -> Ordering {
        self.lon
            .total_cmp(&other.lon)
            .then(self.lat.total_cmp(&other.lat))
    }
}

impl fmt::Display for GeoPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "POINT({} {})", self.lon, self.lat)
    }
}

/// Parses `POINT(<x> <y>)` or `POINT(<x>,<y>)` with x = longitude and
/// y = latitude. The keyword is case-insensitive.
pub fn parse_wkt_point(text: &str) -> Result<GeoPoint, GeoError> {
    let body = strip_keyword(text.trim(), "POINT")?;
    let inner = strip_parens(body)?;
    let (x, y) = parse_pair(inner)?;
    GeoPoint::new(x, y)
}

/// Canonical WKT: `POINT(<lon> <lat>)` with the shortest decimal rendering
/// that parses back to the same bits.
pub fn emit_wkt(p: &GeoPoint) -> String {
    p.to_string()
}

/// Parses a single-ring `POLYGON((x y, x y, ...))`. A closing vertex equal
/// to the first one is optional.
pub fn parse_wkt_polygon(text: &str) -> Result<GeoPolygon, GeoError> {
    let body = strip_keyword(text.trim(), "POLYGON")?;
    let ring = strip_parens(strip_parens(body)?)?;
    if ring.contains('(') || ring.contains(')') {
        return Err(GeoError::MalformedWkt(
            "only single-ring polygons are supported".into(),
        ));
    }
    let vertices = ring
        .split(',')
        .map(|pair| {
            let mut tokens = pair.split_whitespace();
            match (tokens.next(), tokens.next(), tokens.next()) {
                (Some(x), Some(y), None) => GeoPoint::new(parse_coord(x)?, parse_coord(y)?),
                _ => Err(GeoError::MalformedWkt(format!(
                    "expected two coordinates, got {:?}",
                    pair.trim()
                ))),
            }
        })
        .collect::<Result<Vec<_>, _>>()?;
    GeoPolygon::new(vertices)
}

/// `POLYGON((...))` with the ring explicitly closed.
pub fn emit_wkt_polygon(poly: &GeoPolygon) -> String {
    let coords: Vec<String> = poly
        .ring()
        .iter()
        .chain(std::iter::once(&poly.ring()[0]))
        .map(|v| format!("{} {}", v.lon, v.lat))
        .collect();
    format!("POLYGON(({}))", coords.join(", "))
}

fn strip_keyword<'a>(text: &'a str, keyword: &str) -> Result<&'a str, GeoError> {
    match text.get(..keyword.len()) {
        Some(head) if head.eq_ignore_ascii_case(keyword) => Ok(text[keyword.len()..].trim()),
        _ => Err(GeoError::MalformedWkt(format!(
            "expected {keyword} in {text:?}"
        ))),
    }
}

fn strip_parens(text: &str) -> Result<&str, GeoError> {
    let text = text.trim();
    text.strip_prefix('(')
        .and_then(|t| t.strip_suffix(')'))
        .map(str::trim)
        .ok_or_else(|| GeoError::MalformedWkt(format!("expected parenthesised body in {text:?}")))
}

fn parse_pair(inner: &str) -> Result<(f64, f64), GeoError> {
    let tokens: Vec<&str> = if inner.contains(',') {
        inner.split(',').map(str::trim).collect()
    } else {
        inner.split_whitespace().collect()
    };
    if tokens.len() != 2
        || tokens
            .iter()
            .any(|t| t.is_empty() || t.contains(char::is_whitespace))
    {
        return Err(GeoError::MalformedWkt(format!(
            "expected exactly two coordinates in {inner:?}"
        )));
    }
    Ok((parse_coord(tokens[0])?, parse_coord(tokens[1])?))
}

fn parse_coord(token: &str) -> Result<f64, GeoError> {
    match token.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(GeoError::MalformedWkt(format!(
            "non-numeric token {token:?}"
        ))),
    }
}

/// Great-circle (haversine) distance in meters on a sphere of radius
/// [`EARTH_RADIUS_M`].
///
/// Operands are put in a canonical order before evaluation so that the
/// result is bitwise symmetric.
pub fn geodesic_distance(a: &GeoPoint, b: &GeoPoint) -> Result<f64, GeoError> {
    a.check_srid(b)?;
    let (a, b) = if a.canonical_cmp(b) == Ordering::Greater {
        (b, a)
    } else {
        (a, b)
    };
    Ok(haversine(a.lon, a.lat, b.lon, b.lat))
}

pub(crate) fn haversine(lon1: f64, lat1: f64, lon2: f64, lat2: f64) -> f64 {
    let phi1 = lat1.to_radians();
    let phi2 = lat2.to_radians();
    let dphi = (lat2 - lat1).to_radians();
    let dlambda = (lon2 - lon1).to_radians();
    let s_phi = (dphi / 2.0).sin();
    let s_lambda = (dlambda / 2.0).sin();
    let h = s_phi * s_phi + phi1.cos() * phi2.cos() * s_lambda * s_lambda;
    2.0 * EARTH_RADIUS_M * h.sqrt().min(1.0).asin()
}

/// An axis-aligned lon/lat rectangle, `lon_min < lon_max`, `lat_min < lat_max`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeoRect {
    lon_min: f64,
    lat_min: f64,
    lon_max: f64,
    lat_max: f64,
}

impl GeoRect {
    pub fn new(lon_min: f64, lat_min: f64, lon_max: f64, lat_max: f64) -> Result<Self, GeoError> {
        GeoPoint::new(lon_min, lat_min)?;
        GeoPoint::new(lon_max, lat_max)?;
        if !(lon_min < lon_max && lat_min < lat_max) {
            return Err(GeoError::InvalidRect(format!(
                "degenerate bounds ({lon_min}, {lat_min}, {lon_max}, {lat_max})"
            )));
        }
        Ok(Self {
            lon_min,
            lat_min,
            lon_max,
            lat_max,
        })
    }

    pub fn lon_min(&self) -> f64 {
        self.lon_min
    }

    pub fn lat_min(&self) -> f64 {
        self.lat_min
    }

    pub fn lon_max(&self) -> f64 {
        self.lon_max
    }

    pub fn lat_max(&self) -> f64 {
        self.lat_max
    }

    pub fn contains(&self, p: &GeoPoint) -> bool {
        (self.lon_min..=self.lon_max).contains(&p.lon)
            && (self.lat_min..=self.lat_max).contains(&p.lat)
    }

    /// Nearest point of the rectangle to `(lon, lat)` in coordinate space.
    pub fn clamp(&self, lon: f64, lat: f64) -> GeoPoint {
        GeoPoint {
            lon: lon.clamp(self.lon_min, self.lon_max),
            lat: lat.clamp(self.lat_min, self.lat_max),
            srid: SRID_WGS84,
        }
    }

    /// Counter-clockwise ring starting at the south-west corner.
    pub fn to_polygon(&self) -> GeoPolygon {
        let corner = |lon, lat| GeoPoint {
            lon,
            lat,
            srid: SRID_WGS84,
        };
        GeoPolygon {
            ring: vec![
                corner(self.lon_min, self.lat_min),
                corner(self.lon_max, self.lat_min),
                corner(self.lon_max, self.lat_max),
                corner(self.lon_min, self.lat_max),
            ],
        }
    }
}

/// A simple polygon given by one implicitly closed ring.
#[derive(Debug, Clone, PartialEq)]
pub struct GeoPolygon {
    ring: Vec<GeoPoint>,
}

impl GeoPolygon {
    /// Validates the ring. A trailing copy of the first vertex is dropped;
    /// other consecutive duplicates, fewer than three distinct vertices,
    /// mixed SRIDs and edges spanning more than 180° of longitude (which
    /// cross the antimeridian or wrap a pole) are rejected.
    pub fn new(mut ring: Vec<GeoPoint>) -> Result<Self, GeoError> {
        if ring.len() > 1 && ring.first() == ring.last() {
            ring.pop();
        }
        if ring.len() < 3 {
            return Err(GeoError::InvalidPolygon(format!(
                "need at least 3 vertices, got {}",
                ring.len()
            )));
        }
        let srid = ring[0].srid;
        if let Some(p) = ring.iter().find(|p| p.srid != srid) {
            return Err(GeoError::SridMismatch(srid, p.srid));
        }
        for (a, b) in edges(&ring) {
            if a == b {
                return Err(GeoError::InvalidPolygon(format!(
                    "consecutive duplicate vertex {a}"
                )));
            }
            if (b.lon - a.lon).abs() > 180.0 {
                return Err(GeoError::UnsupportedRegion(format!(
                    "edge {a} -> {b} crosses the antimeridian"
                )));
            }
        }
        let mut distinct = ring.clone();
        distinct.sort_by(GeoPoint::canonical_cmp);
        distinct.dedup();
        if distinct.len() < 3 {
            return Err(GeoError::InvalidPolygon(
                "need at least 3 distinct vertices".into(),
            ));
        }
        Ok(Self { ring })
    }

    pub fn ring(&self) -> &[GeoPoint] {
        &self.ring
    }

    pub fn srid(&self) -> i32 {
        self.ring[0].srid
    }

    /// Twice the signed planar area (positive for counter-clockwise rings).
    pub fn doubled_signed_area(&self) -> f64 {
        edges(&self.ring)
            .map(|(a, b)| a.lon * b.lat - b.lon * a.lat)
            .sum()
    }

    /// Coordinate-space bounding box as `(lon_min, lat_min, lon_max, lat_max)`.
    pub fn extent(&self) -> (f64, f64, f64, f64) {
        self.ring.iter().fold(
            (
                f64::INFINITY,
                f64::INFINITY,
                f64::NEG_INFINITY,
                f64::NEG_INFINITY,
            ),
            |(x0, y0, x1, y1), p| (x0.min(p.lon), y0.min(p.lat), x1.max(p.lon), y1.max(p.lat)),
        )
    }
}

fn edges(ring: &[GeoPoint]) -> impl Iterator<Item = (&GeoPoint, &GeoPoint)> {
    ring.iter().zip(ring.iter().cycle().skip(1))
}

fn on_segment(p: &GeoPoint, a: &GeoPoint, b: &GeoPoint) -> bool {
    let cross = (b.lon - a.lon) * (p.lat - a.lat) - (b.lat - a.lat) * (p.lon - a.lon);
    cross == 0.0
        && p.lon >= a.lon.min(b.lon)
        && p.lon <= a.lon.max(b.lon)
        && p.lat >= a.lat.min(b.lat)
        && p.lat <= a.lat.max(b.lat)
}

/// Planar even-odd containment in lon/lat space. Points on the boundary
/// count as inside; a zero-area polygon contains only its segment points.
pub fn point_in_polygon(p: &GeoPoint, poly: &GeoPolygon) -> Result<bool, GeoError> {
    if p.srid != poly.srid() {
        return Err(GeoError::SridMismatch(p.srid, poly.srid()));
    }
    if edges(&poly.ring).any(|(a, b)| on_segment(p, a, b)) {
        return Ok(true);
    }
    if poly.doubled_signed_area() == 0.0 {
        return Ok(false);
    }
    let mut inside = false;
    for (a, b) in edges(&poly.ring) {
        if (a.lat > p.lat) != (b.lat > p.lat) {
            let x = a.lon + (p.lat - a.lat) * (b.lon - a.lon) / (b.lat - a.lat);
            if p.lon < x {
                inside = !inside;
            }
        }
    }
    Ok(inside)
}
