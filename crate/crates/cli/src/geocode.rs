//! Address to coordinate lookup.
//!
//! [`HashGeocoder`] is an offline stand-in for a geocoding web service: it
//! maps the normalised address (trimmed, lower-cased) through SHA-256 and
//! spreads the first 8 digest bytes over the globe. The same address always
//! lands on the same point; the point means nothing geographically.

use geoswarm::geo::GeoPoint;
use sha2::{Digest, Sha256};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GeocodeError {
    #[error("empty address")]
    EmptyAddress,
}

/// Replaceable lookup seam; a network-backed implementation would slot in here.
pub trait Geocoder {
    fn geocode(&self, address: &str) -> Result<GeoPoint, GeocodeError>;
}

#[derive(Debug, Clone, Copy, Default)]
pub struct HashGeocoder;

impl Geocoder for HashGeocoder {
    fn geocode(&self, address: &str) -> Result<GeoPoint, GeocodeError> {
        geocode(address)
    }
}

/// Deterministic pseudo-location with lon in `[-180, 180)` and lat in `[-85, 85)`.
pub fn geocode(address: &str) -> Result<GeoPoint, GeocodeError> {
    let normalized = address.trim().to_lowercase();
    if normalized.is_empty() {
        return Err(GeocodeError::EmptyAddress);
    }
    let digest = Sha256::digest(normalized.as_bytes());
    let word = u64::from_be_bytes(digest[..8].try_into().expect("8 bytes"));
    let hi = (word >> 32) as f64 / 4_294_967_296.0;
    let lo = (word & 0xFFFF_FFFF) as f64 / 4_294_967_296.0;
    Ok(GeoPoint::new(-180.0 + 360.0 * hi, -85.0 + 170.0 * lo)
        .expect("within range by construction"))
}
