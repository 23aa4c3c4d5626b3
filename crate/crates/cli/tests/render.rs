use std::path::{Path, PathBuf};

use geoswarm::geo::{GeoPoint, GeoRect};
use geoswarm_cli::cli::parse_layers;
use geoswarm_cli::render::{
    geojson_string, read_geojson, svg_string, Geometry, LayerKind, Projection, RenderLayer,
};
use geoswarm_testkit::{random_convex_polygon, random_points, SplitMix64};
use proptest::prelude::*;
use serde_json::Value;

fn data_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data")
}

fn world() -> Vec<RenderLayer> {
    let listing = std::fs::read_to_string(data_dir().join("world.layers")).unwrap();
    parse_layers(&listing, &data_dir()).unwrap()
}

/// Minimal structural check of a FeatureCollection with Point/Polygon members.
fn check_geojson(v: &Value) -> usize {
    assert_eq!(v["type"], "FeatureCollection");
    let features = v["features"].as_array().expect("features array");
    for f in features {
        assert_eq!(f["type"], "Feature");
        assert!(f["properties"].is_object());
        let coords = &f["geometry"]["coordinates"];
        let position_ok = |p: &Value| {
            let p = p.as_array().unwrap();
            p.len() == 2 && p.iter().all(|c| c.as_f64().is_some_and(f64::is_finite))
        };
        match f["geometry"]["type"].as_str() {
            Some("Point") => assert!(position_ok(coords)),
            Some("Polygon") => {
                for ring in coords.as_array().unwrap() {
                    let ring = ring.as_array().unwrap();
                    assert!(ring.len() >= 4 && ring.first() == ring.last());
                    assert!(ring.iter().all(position_ok));
                }
            }
            other => panic!("unexpected geometry {other:?}"),
        }
    }
    features.len()
}

#[test]
fn bundled_cities_give_700_features() {
    let layers = world();
    let cities: Vec<RenderLayer> = layers
        .iter()
        .filter(|l| l.kind() == LayerKind::Points)
        .cloned()
        .collect();
    let v: Value = serde_json::from_str(&geojson_string(&cities)).unwrap();
    assert_eq!(check_geojson(&v), 700);
    let all: Value = serde_json::from_str(&geojson_string(&layers)).unwrap();
    assert_eq!(check_geojson(&all), 705);
}

#[test]
fn union_svg_is_valid_and_layered() {
    let svg = svg_string(&world(), 1200, 600).unwrap();
    let doc = roxmltree::Document::parse(&svg).expect("well-formed XML");
    let root = doc.root_element();
    assert_eq!(root.tag_name().name(), "svg");
    assert_eq!(
        root.tag_name().namespace(),
        Some("http://www.w3.org/2000/svg")
    );
    let order: Vec<&str> = root
        .descendants()
        .filter(|n| matches!(n.tag_name().name(), "path" | "circle"))
        .map(|n| n.tag_name().name())
        .collect();
    assert_eq!(order.len(), 705);
    let last_path = order.iter().rposition(|&t| t == "path").unwrap();
    let first_circle = order.iter().position(|&t| t == "circle").unwrap();
    assert!(last_path < first_circle);
    for c in root.descendants().filter(|n| n.has_tag_name("circle")) {
        let x: f64 = c.attribute("cx").unwrap().parse().unwrap();
        let y: f64 = c.attribute("cy").unwrap().parse().unwrap();
        assert!((60.0..=1140.0).contains(&x) && (30.0..=570.0).contains(&y));
    }
}

#[test]
fn geojson_round_trip_through_point_reader() {
    let mut rng = SplitMix64(5);
    let rect = GeoRect::new(-170.0, -80.0, 170.0, 80.0).unwrap();
    let points: Vec<_> = random_points(&mut rng, &rect, 300)
        .into_iter()
        .map(|(_, p)| (p, None))
        .collect();
    let polys: Vec<_> = (0..20)
        .map(|_| random_convex_polygon(&mut rng, &rect, 8))
        .collect();
    let layers = vec![
        RenderLayer::outlines("o", polys).unwrap(),
        RenderLayer::points("p", points).unwrap(),
    ];
    let back = read_geojson(&geojson_string(&layers)).unwrap();
    assert_eq!(back.len(), 2);
    for (a, b) in layers.iter().zip(&back) {
        assert_eq!(a.features().len(), b.features().len());
        for (fa, fb) in a.features().iter().zip(b.features()) {
            let coords = |g: &Geometry| -> Vec<GeoPoint> {
                match g {
                    Geometry::Point(p) => vec![*p],
                    Geometry::Polygon(p) => p.ring().to_vec(),
                }
            };
            for (pa, pb) in coords(&fa.geometry).iter().zip(coords(&fb.geometry)) {
                assert!((pa.lon() - pb.lon()).abs() <= 1e-9 && (pa.lat() - pb.lat()).abs() <= 1e-9);
            }
        }
    }
}

proptest! {
    #[test]
    fn projection_inverts(
        lon0 in -170.0f64..0.0, dlon in 0.1f64..100.0,
        lat0 in -80.0f64..0.0, dlat in 0.1f64..80.0,
        tx in 0.0f64..=1.0, ty in 0.0f64..=1.0,
        w in 64u32..4000, h in 64u32..4000,
    ) {
        let corners = vec![
            (GeoPoint::new(lon0, lat0).unwrap(), None),
            (GeoPoint::new(lon0 + dlon, lat0 + dlat).unwrap(), None),
        ];
        let layer = RenderLayer::points("p", corners).unwrap();
        let proj = Projection::fit(&[layer], w, h).unwrap();
        let p = GeoPoint::new(lon0 + tx * dlon, lat0 + ty * dlat).unwrap();
        let (x, y) = proj.project(&p);
        let (mx, my) = proj.margin();
        prop_assert!(x >= mx - 1e-9 && x <= w as f64 - mx + 1e-9);
        prop_assert!(y >= my - 1e-9 && y <= h as f64 - my + 1e-9);
        let (lon, lat) = proj.unproject(x, y);
        prop_assert!((lon - p.lon()).abs() <= 1e-9 * dlon.max(1.0));
        prop_assert!((lat - p.lat()).abs() <= 1e-9 * dlat.max(1.0));
    }
}
