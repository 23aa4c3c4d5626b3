//! Map overlays: GeoJSON feature collections and equirectangular SVG.
//!
//! An overlay is a list of layers, the union of their features. Outline
//! layers are always drawn beneath point layers.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use geoswarm::geo::{GeoPoint, GeoPolygon};
use serde_json::{json, Map, Value};
use thiserror::Error;

pub const DEFAULT_POINT_COLOR: &str = "#d62728";
pub const DEFAULT_OUTLINE_COLOR: &str = "#1f77b4";
pub const MIN_CANVAS: u32 = 64;

#[derive(Debug, Error)]
pub enum RenderError {
    #[error("nothing to draw")]
    EmptyScene,
    #[error("invalid layer {0}: {1}")]
    InvalidLayer(String, String),
    #[error("canvas {0}x{1} is smaller than {MIN_CANVAS}x{MIN_CANVAS}")]
    CanvasTooSmall(u32, u32),
    #[error("invalid GeoJSON: {0}")]
    InvalidGeoJson(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LayerKind {
    Points,
    Outline,
}

impl LayerKind {
    fn as_str(self) -> &'static str {
        match self {
            LayerKind::Points => "points",
            LayerKind::Outline => "outline",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Geometry {
    Point(GeoPoint),
    Polygon(GeoPolygon),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Feature {
    pub geometry: Geometry,
    pub label: Option<String>,
}

impl Feature {
    pub fn point(p: GeoPoint, label: Option<String>) -> Self {
        Self {
            geometry: Geometry::Point(p),
            label,
        }
    }

    pub fn polygon(p: GeoPolygon, label: Option<String>) -> Self {
        Self {
            geometry: Geometry::Polygon(p),
            label,
        }
    }

    fn srid(&self) -> i32 {
        match &self.geometry {
            Geometry::Point(p) => p.srid(),
            Geometry::Polygon(p) => p.srid(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Style {
    pub color: String,
    pub marker_size: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RenderLayer {
    name: String,
    kind: LayerKind,
    features: Vec<Feature>,
    style: Style,
}

impl RenderLayer {
    /// Rejects empty layers, geometries that do not match `kind`, and mixed
    /// SRIDs.
    pub fn new(
        name: impl Into<String>,
        kind: LayerKind,
        features: Vec<Feature>,
        style: Style,
    ) -> Result<Self, RenderError> {
        let name = name.into();
        let bad = |msg: &str| Err(RenderError::InvalidLayer(name.clone(), msg.to_string()));
        if features.is_empty() {
            return bad("no features");
        }
        let matches_kind = |f: &Feature| {
            matches!(
                (kind, &f.geometry),
                (LayerKind::Points, Geometry::Point(_))
                    | (LayerKind::Outline, Geometry::Polygon(_))
            )
        };
        if !features.iter().all(matches_kind) {
            return bad("geometry does not match layer kind");
        }
        let srid = features[0].srid();
        if features.iter().any(|f| f.srid() != srid) {
            return bad("mixed SRIDs");
        }
        Ok(Self {
            name,
            kind,
            features,
            style,
        })
    }

    pub fn points(
        name: impl Into<String>,
        points: Vec<(GeoPoint, Option<String>)>,
    ) -> Result<Self, RenderError> {
        let features = points
            .into_iter()
            .map(|(p, l)| Feature::point(p, l))
            .collect();
        Self::new(
            name,
            LayerKind::Points,
            features,
            Style {
                color: DEFAULT_POINT_COLOR.into(),
                marker_size: 2.0,
            },
        )
    }

    pub fn outlines(
        name: impl Into<String>,
        polygons: Vec<GeoPolygon>,
    ) -> Result<Self, RenderError> {
        let features = polygons
            .into_iter()
            .map(|p| Feature::polygon(p, None))
            .collect();
        Self::new(
            name,
            LayerKind::Outline,
            features,
            Style {
                color: DEFAULT_OUTLINE_COLOR.into(),
                marker_size: 1.0,
            },
        )
    }

    pub fn with_style(mut self, style: Style) -> Self {
        self.style = style;
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> LayerKind {
        self.kind
    }

    pub fn features(&self) -> &[Feature] {
        &self.features
    }

    pub fn style(&self) -> &Style {
        &self.style
    }
}

/// Outline layers first, each group in input order.
fn draw_order(layers: &[RenderLayer]) -> impl Iterator<Item = &RenderLayer> {
    let outlines = layers.iter().filter(|l| l.kind == LayerKind::Outline);
    let points = layers.iter().filter(|l| l.kind == LayerKind::Points);
    outlines.chain(points)
}

fn position(p: &GeoPoint) -> Value {
    json!([p.lon(), p.lat()])
}

/// RFC 7946 FeatureCollection. Polygon rings are written closed.
pub fn geojson_string(layers: &[RenderLayer]) -> String {
    let mut features = Vec::new();
    for layer in draw_order(layers) {
        for f in &layer.features {
            let geometry = match &f.geometry {
                Geometry::Point(p) => json!({"type": "Point", "coordinates": position(p)}),
                Geometry::Polygon(poly) => {
                    let ring: Vec<Value> = poly
                        .ring()
                        .iter()
                        .chain(std::iter::once(&poly.ring()[0]))
                        .map(position)
                        .collect();
                    json!({"type": "Polygon", "coordinates": [ring]})
                }
            };
            let mut props = Map::new();
            props.insert("layer".into(), json!(layer.name));
            props.insert("kind".into(), json!(layer.kind.as_str()));
            props.insert("color".into(), json!(layer.style.color));
            props.insert("marker_size".into(), json!(layer.style.marker_size));
            if let Some(label) = &f.label {
                props.insert("name".into(), json!(label));
            }
            features.push(json!({"type": "Feature", "geometry": geometry, "properties": props}));
        }
    }
    let mut text =
        serde_json::to_string_pretty(&json!({"type": "FeatureCollection", "features": features}))
            .expect("JSON values always serialise");
    text.push('\n');
    text
}

pub fn render_geojson(layers: &[RenderLayer], out: &Path) -> Result<(), RenderError> {
    write_file(out, &geojson_string(layers))
}

fn write_file(out: &Path, text: &str) -> Result<(), RenderError> {
    fs::write(out, text).map_err(|source| RenderError::Io {
        path: out.display().to_string(),
        source,
    })
}

/// Parses a FeatureCollection of Point and single-ring Polygon features back
/// into layers, grouped by the `layer` property in order of first
/// appearance. Structure violations are errors.
pub fn read_geojson(text: &str) -> Result<Vec<RenderLayer>, RenderError> {
    let bad = |m: String| RenderError::InvalidGeoJson(m);
    let root: Value = serde_json::from_str(text).map_err(|e| bad(e.to_string()))?;
    if root.get("type") != Some(&json!("FeatureCollection")) {
        return Err(bad("root is not a FeatureCollection".into()));
    }
    let features = root
        .get("features")
        .and_then(Value::as_array)
        .ok_or_else(|| bad("`features` is not an array".into()))?;

    let mut groups: Vec<(String, LayerKind, Style, Vec<Feature>)> = Vec::new();
    for (i, f) in features.iter().enumerate() {
        let ctx = |m: &str| bad(format!("feature {i}: {m}"));
        if f.get("type") != Some(&json!("Feature")) {
            return Err(ctx("type is not Feature"));
        }
        let geometry = f.get("geometry").ok_or_else(|| ctx("missing geometry"))?;
        let coords = geometry
            .get("coordinates")
            .ok_or_else(|| ctx("missing coordinates"))?;
        let props = f.get("properties").and_then(Value::as_object);
        let prop_str = |k: &str| props.and_then(|p| p.get(k)).and_then(Value::as_str);
        let (kind, geometry) = match geometry.get("type").and_then(Value::as_str) {
            Some("Point") => (
                LayerKind::Points,
                Geometry::Point(read_position(coords).map_err(|m| ctx(&m))?),
            ),
            Some("Polygon") => {
                let rings = coords
                    .as_array()
                    .ok_or_else(|| ctx("polygon coordinates not an array"))?;
                let [ring] = rings.as_slice() else {
                    return Err(ctx("only single-ring polygons are supported"));
                };
                let positions = ring
                    .as_array()
                    .ok_or_else(|| ctx("ring is not an array"))?
                    .iter()
                    .map(read_position)
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(|m| ctx(&m))?;
                if positions.len() < 4 || positions.first() != positions.last() {
                    return Err(ctx("linear ring must be closed with at least 4 positions"));
                }
                let poly = GeoPolygon::new(positions).map_err(|e| ctx(&e.to_string()))?;
                (LayerKind::Outline, Geometry::Polygon(poly))
            }
            other => return Err(ctx(&format!("unsupported geometry type {other:?}"))),
        };
        let layer = prop_str("layer").unwrap_or(kind.as_str()).to_string();
        let style = Style {
            color: prop_str("color")
                .unwrap_or(match kind {
                    LayerKind::Points => DEFAULT_POINT_COLOR,
                    LayerKind::Outline => DEFAULT_OUTLINE_COLOR,
                })
                .to_string(),
            marker_size: props
                .and_then(|p| p.get("marker_size"))
                .and_then(Value::as_f64)
                .unwrap_or(2.0),
        };
        let feature = Feature {
            geometry,
            label: prop_str("name").map(str::to_string),
        };
        match groups.iter_mut().find(|g| g.0 == layer && g.1 == kind) {
            Some(g) => g.3.push(feature),
            None => groups.push((layer, kind, style, vec![feature])),
        }
    }
    groups
        .into_iter()
        .map(|(name, kind, style, features)| RenderLayer::new(name, kind, features, style))
        .collect()
}

fn read_position(v: &Value) -> Result<GeoPoint, String> {
    match v.as_array().map(Vec::as_slice) {
        Some([lon, lat]) => {
            let (lon, lat) = lon
                .as_f64()
                .zip(lat.as_f64())
                .ok_or("position members must be numbers")?;
            GeoPoint::new(lon, lat).map_err(|e| e.to_string())
        }
        _ => Err("position must be [lon, lat]".into()),
    }
}

/// Linear lon→x, lat→y (inverted) map of the scene's bounding box onto the
/// canvas, leaving a 5% margin on each side. A zero-width extent maps to the
/// canvas centre on that axis.
#[derive(Debug, Clone, Copy)]
pub struct Projection {
    lon_min: f64,
    lon_max: f64,
    lat_min: f64,
    lat_max: f64,
    width: f64,
    height: f64,
}

impl Projection {
    pub fn fit(layers: &[RenderLayer], width: u32, height: u32) -> Result<Self, RenderError> {
        if width < MIN_CANVAS || height < MIN_CANVAS {
            return Err(RenderError::CanvasTooSmall(width, height));
        }
        let mut it = layers
            .iter()
            .flat_map(|l| &l.features)
            .flat_map(|f| match &f.geometry {
                Geometry::Point(p) => std::slice::from_ref(p),
                Geometry::Polygon(poly) => poly.ring(),
            })
            .peekable();
        if it.peek().is_none() {
            return Err(RenderError::EmptyScene);
        }
        let mut proj = Self {
            lon_min: f64::INFINITY,
            lon_max: f64::NEG_INFINITY,
            lat_min: f64::INFINITY,
            lat_max: f64::NEG_INFINITY,
            width: width as f64,
            height: height as f64,
        };
        for p in it {
            proj.lon_min = proj.lon_min.min(p.lon());
            proj.lon_max = proj.lon_max.max(p.lon());
            proj.lat_min = proj.lat_min.min(p.lat());
            proj.lat_max = proj.lat_max.max(p.lat());
        }
        Ok(proj)
    }

    pub fn margin(&self) -> (f64, f64) {
        (0.05 * self.width, 0.05 * self.height)
    }

    pub fn project(&self, p: &GeoPoint) -> (f64, f64) {
        let (mx, my) = self.margin();
        let x = if self.lon_max > self.lon_min {
            mx + (p.lon() - self.lon_min) / (self.lon_max - self.lon_min) * (self.width - 2.0 * mx)
        } else {
            self.width / 2.0
        };
        let y = if self.lat_max > self.lat_min {
            self.height
                - my
                - (p.lat() - self.lat_min) / (self.lat_max - self.lat_min)
                    * (self.height - 2.0 * my)
        } else {
            self.height / 2.0
        };
        (x, y)
    }

    /// Inverse of [`Projection::project`] for non-degenerate extents.
    pub fn unproject(&self, x: f64, y: f64) -> (f64, f64) {
        let (mx, my) = self.margin();
        let lon = self.lon_min + (x - mx) / (self.width - 2.0 * mx) * (self.lon_max - self.lon_min);
        let lat = self.lat_min
            + (self.height - my - y) / (self.height - 2.0 * my) * (self.lat_max - self.lat_min);
        (lon, lat)
    }
}

/// Three decimals, shortest form.
fn num(v: f64) -> String {
    let r = (v * 1000.0).round() / 1000.0;
    format!("{}", if r == 0.0 { 0.0 } else { r })
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
        .replace('\'', "&apos;")
}

pub fn svg_string(layers: &[RenderLayer], width: u32, height: u32) -> Result<String, RenderError> {
    let proj = Projection::fit(layers, width, height)?;
    let mut svg = String::new();
    let _ = writeln!(svg, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" height="{height}" viewBox="0 0 {width} {height}">"#
    );
    let _ = writeln!(
        svg,
        r##"  <rect width="{width}" height="{height}" fill="#ffffff"/>"##
    );
    for layer in draw_order(layers) {
        let color = escape(&layer.style.color);
        let _ = writeln!(
            svg,
            r#"  <g id="{}" class="{}">"#,
            escape(&layer.name),
            layer.kind.as_str()
        );
        for f in &layer.features {
            let title = f
                .label
                .as_ref()
                .map(|l| format!("<title>{}</title>", escape(l)))
                .unwrap_or_default();
            match &f.geometry {
                Geometry::Polygon(poly) => {
                    let d: Vec<String> = poly
                        .ring()
                        .iter()
                        .enumerate()
                        .map(|(i, p)| {
                            let (x, y) = proj.project(p);
                            format!("{}{} {}", if i == 0 { "M" } else { "L" }, num(x), num(y))
                        })
                        .collect();
                    let _ = writeln!(
                        svg,
                        r#"    <path d="{} Z" fill="none" stroke="{color}" stroke-width="{}">{title}</path>"#,
                        d.join(" "),
                        num(layer.style.marker_size)
                    );
                }
                Geometry::Point(p) => {
                    let (x, y) = proj.project(p);
                    let _ = writeln!(
                        svg,
                        r#"    <circle cx="{}" cy="{}" r="{}" fill="{color}">{title}</circle>"#,
                        num(x),
                        num(y),
                        num(layer.style.marker_size)
                    );
                }
            }
        }
        let _ = writeln!(svg, "  </g>");
    }
    let _ = writeln!(svg, "</svg>");
    Ok(svg)
}

pub fn render_svg(
    layers: &[RenderLayer],
    out: &Path,
    width: u32,
    height: u32,
) -> Result<(), RenderError> {
    write_file(out, &svg_string(layers, width, height)?)
}
