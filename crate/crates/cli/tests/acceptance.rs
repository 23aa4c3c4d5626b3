//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails.

use std::f64::consts::PI;
use std::fs;
use std::panic::{self, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::{Command, ExitCode};
use std::time::Instant;

use geoswarm::geo::{self, GeoPoint, GeoRect, EARTH_RADIUS_M};
use geoswarm::hierarchy::{evaluate_levels, HierarchyError};
use geoswarm::index::{GridConfig, GridDensity, GridIndex};
use geoswarm::objectives::{
    self, facility_objective, product_mix_objective, FacilityInstance, Objective,
    ProductMixInstance,
};
use geoswarm::pso::{
    self, update_position, update_velocity, FixedDraws, Particle, SwarmConfig, Topology,
};
use geoswarm_cli::cli::parse_layers;
use geoswarm_cli::render::{geojson_string, svg_string, LayerKind, RenderLayer};
use geoswarm_testkit::{
    bfs_depths, brute_nearest, brute_range, distance_to_boundary, grid_scan_facility,
    lp_vertex_optimum, random_convex_polygon, random_forest, random_forest_with_cycle,
    random_points, ring_coords, winding_number, SplitMix64,
};
use serde_json::Value;

type Verdict = Result<String, String>;
type Check = fn() -> Verdict;

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("data")
        .join(name)
}

fn pso_convergence() -> Verdict {
    let obj = objectives::sphere(2);
    let start = Instant::now();
    let mut hits = 0;
    let mut worst = 0.0f64;
    for seed in 0..100 {
        let cfg = SwarmConfig::for_objective(&obj)
            .with_swarm_size(30)
            .with_coefficients(1.0, 2.0, 2.0)
            .with_max_iterations(2000)
            .with_seed(seed);
        let out = pso::run(&cfg, &obj).map_err(|e| e.to_string())?;
        worst = worst.max(out.best_fitness);
        if out.best_fitness < 1e-6 {
            hits += 1;
        }
    }
    let secs = start.elapsed().as_secs_f64();
    let msg = format!("{hits}/100 seeds below 1e-6 (worst {worst:.3e}), {secs:.3} s total");
    if hits >= 95 && secs < 1.0 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn random_objective(rng: &mut SplitMix64) -> Objective {
    match rng.below(4) {
        0 => objectives::sphere(1 + rng.below(6)),
        1 => objectives::rastrigin(1 + rng.below(6)),
        2 => {
            let n = 1 + rng.below(4);
            let m = 1 + rng.below(5);
            let c = (0..n).map(|_| rng.range(0.5, 9.0)).collect();
            let a = (0..m)
                .map(|_| (0..n).map(|_| rng.range(0.5, 9.0)).collect())
                .collect();
            let b = (0..m).map(|_| rng.range(1.0, 20.0)).collect();
            product_mix_objective(&ProductMixInstance::new(c, a, b).unwrap()).unwrap()
        }
        _ => {
            let lon0 = rng.range(-170.0, 160.0);
            let lat0 = rng.range(-70.0, 60.0);
            let region = GeoRect::new(
                lon0,
                lat0,
                lon0 + rng.range(0.1, 10.0),
                lat0 + rng.range(0.1, 10.0),
            )
            .unwrap();
            let n = 5 + rng.below(20);
            let customers = random_points(rng, &region, n)
                .into_iter()
                .map(|(_, p)| p)
                .collect();
            facility_objective(&FacilityInstance::new(customers, 1 + rng.below(3), region).unwrap())
        }
    }
}

fn monotone_gbest() -> Verdict {
    let mut rng = SplitMix64(2);
    let mut violations = 0;
    let mut iterations = 0;
    for _ in 0..1_000 {
        let obj = random_objective(&mut rng);
        let swarm_size = 2 + rng.below(40);
        let mut cfg = SwarmConfig::for_objective(&obj)
            .with_seed(rng.next_u64())
            .with_swarm_size(swarm_size)
            .with_max_iterations(1 + rng.below(200))
            .with_coefficients(
                rng.range(0.0, 1.2),
                rng.range(0.0, 2.5),
                rng.range(0.0, 2.5),
            )
            .with_velocity_fraction(rng.range(0.05, 1.0));
        if swarm_size >= 3 && rng.unit() < 0.5 {
            cfg = cfg.with_topology(Topology::Ring {
                radius: 1 + rng.below((swarm_size - 1) / 2),
            });
        }
        let out = pso::run(&cfg, &obj).map_err(|e| e.to_string())?;
        iterations += out.iterations;
        violations += out.history.windows(2).filter(|w| w[1] > w[0]).count();
    }
    let msg = format!("1000 runs, {iterations} iterations, {violations} increases");
    if violations == 0 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn update_exactness() -> Verdict {
    let mut rng = SplitMix64(3);
    let mut mismatches = 0;
    for _ in 0..10_000 {
        let dim = 1 + rng.below(8);
        let (c0, c1, c2) = (
            rng.range(0.0, 1.5),
            rng.range(0.0, 3.0),
            rng.range(0.0, 3.0),
        );
        let mut vec =
            |lo: f64, hi: f64| -> Vec<f64> { (0..dim).map(|_| rng.range(lo, hi)).collect() };
        let x = vec(-50.0, 50.0);
        let v = vec(-20.0, 20.0);
        let pbest = vec(-50.0, 50.0);
        let social = vec(-50.0, 50.0);
        let bounds: Vec<(f64, f64)> = (0..dim).map(|_| (-60.0, 60.0)).collect();
        let mut cfg = SwarmConfig::new(bounds.clone()).with_coefficients(c0, c1, c2);
        cfg.v_max = vec(1.0, 200.0);
        let particle = Particle {
            position: x.clone(),
            velocity: v.clone(),
            pbest_position: pbest.clone(),
            pbest_fitness: 0.0,
        };
        let got = update_velocity(&particle, &social, &cfg, &mut FixedDraws(1.0)).unwrap();
        let mut moved = Particle {
            velocity: got.clone(),
            ..particle
        };
        update_position(&mut moved, &bounds);
        for d in 0..dim {
            let raw = cfg.c0 * v[d]
                + cfg.c1 * 1.0 * (pbest[d] - x[d])
                + cfg.c2 * 1.0 * (social[d] - x[d]);
            let want_v = raw.max(-cfg.v_max[d]).min(cfg.v_max[d]);
            let stepped = x[d] + want_v;
            let (want_x, want_v_after) = if stepped < -60.0 {
                (-60.0, 0.0)
            } else if stepped > 60.0 {
                (60.0, 0.0)
            } else {
                (stepped, want_v)
            };
            if got[d].to_bits() != want_v.to_bits()
                || moved.position[d].to_bits() != want_x.to_bits()
                || moved.velocity[d].to_bits() != want_v_after.to_bits()
            {
                mismatches += 1;
            }
        }
    }
    let msg = format!("10000 vectors, {mismatches} bit mismatches");
    if mismatches == 0 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn product_mix() -> Verdict {
    let mut rng = SplitMix64(4);
    let mut within = 0;
    let int = |rng: &mut SplitMix64| (1 + rng.below(9)) as f64;
    for _ in 0..50 {
        let n = 1 + rng.below(4);
        let m = 1 + rng.below(5);
        let c: Vec<f64> = (0..n).map(|_| int(&mut rng)).collect();
        let a: Vec<Vec<f64>> = (0..m)
            .map(|_| (0..n).map(|_| int(&mut rng)).collect())
            .collect();
        let b: Vec<f64> = (0..m).map(|_| int(&mut rng)).collect();
        let (_, opt) = lp_vertex_optimum(&c, &a, &b).ok_or("oracle found no vertex")?;
        let inst = ProductMixInstance::new(c, a, b).map_err(|e| e.to_string())?;
        let obj = product_mix_objective(&inst).map_err(|e| e.to_string())?;
        let best = (0..5)
            .map(|seed| {
                let out =
                    pso::run(&SwarmConfig::for_objective(&obj).with_seed(seed), &obj).unwrap();
                inst.objective_value(&out.best_position)
            })
            .fold(f64::NEG_INFINITY, f64::max);
        if (best - opt).abs() <= 0.01 * opt {
            within += 1;
        }
    }
    let textbook =
        ProductMixInstance::parse(&fs::read_to_string(data("textbook.problem")).unwrap())
            .map_err(|e| e.to_string())?;
    let (_, oracle) =
        lp_vertex_optimum(textbook.profit(), textbook.constraints(), textbook.rhs()).unwrap();
    let obj = product_mix_objective(&textbook).unwrap();
    let out = pso::run(&SwarmConfig::for_objective(&obj).with_seed(0), &obj).unwrap();
    let profit = textbook.objective_value(&out.best_position);
    let msg =
        format!("{within}/50 random LPs within 1%; textbook profit {profit:.4} (oracle {oracle})");
    if within >= 45 && profit >= 35.64 && (oracle - 36.0).abs() < 1e-9 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn facility() -> Verdict {
    let d = 0.01;
    let corners: Vec<GeoPoint> = [(-d, -d), (d, -d), (d, d), (-d, d)]
        .iter()
        .map(|&(lon, lat)| GeoPoint::new(lon, lat).unwrap())
        .collect();
    let inst = FacilityInstance::new(corners, 1, GeoRect::new(-d, -d, d, d).unwrap()).unwrap();
    let obj = facility_objective(&inst);
    let out = pso::run(&SwarmConfig::for_objective(&obj).with_seed(0), &obj).unwrap();
    let off = out.best_position[0].abs().max(out.best_position[1].abs());

    let mut rng = SplitMix64(5);
    let mut worst = 0.0f64;
    let mut passed = 0;
    for _ in 0..20 {
        let lon0 = rng.range(-170.0, 165.0);
        let lat0 = rng.range(-70.0, 65.0);
        let region = GeoRect::new(
            lon0,
            lat0,
            lon0 + rng.range(0.5, 5.0),
            lat0 + rng.range(0.5, 5.0),
        )
        .unwrap();
        let customers: Vec<GeoPoint> = random_points(&mut rng, &region, 50)
            .into_iter()
            .map(|(_, p)| p)
            .collect();
        let (_, oracle) = grid_scan_facility(&customers, &region, 200);
        let inst = FacilityInstance::new(customers, 1, region).unwrap();
        let obj = facility_objective(&inst);
        let out = pso::run(&SwarmConfig::for_objective(&obj).with_seed(0), &obj).unwrap();
        let ratio = out.best_fitness / oracle;
        worst = worst.max(ratio);
        if ratio <= 1.005 {
            passed += 1;
        }
    }
    let msg = format!("corners off-centre by {off:.2e} deg; {passed}/20 instances within 1.005 of grid scan (worst {worst:.5})");
    if off <= 1e-3 && passed == 20 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn index_exactness() -> Verdict {
    let mut rng = SplitMix64(6);
    let bounds = GeoRect::new(-60.0, -40.0, 60.0, 50.0).unwrap();
    let points = random_points(&mut rng, &bounds, 10_000);
    let configs = [
        [GridDensity::High; 4],
        [
            GridDensity::Low,
            GridDensity::Medium,
            GridDensity::High,
            GridDensity::Medium,
        ],
        [
            GridDensity::Medium,
            GridDensity::Low,
            GridDensity::Low,
            GridDensity::High,
        ],
    ];
    let indexes: Vec<GridIndex<u64>> = configs
        .iter()
        .map(|levels| {
            GridIndex::build(points.iter().cloned(), GridConfig::new(*levels, bounds)).unwrap()
        })
        .collect();
    let query_area = GeoRect::new(-70.0, -50.0, 70.0, 60.0).unwrap();
    let (mut nearest_queries, mut nearest_bad, mut pruned) = (0, 0, 0);
    let mut range_bad = 0;
    for q in 0..1_000 {
        let idx = &indexes[q % indexes.len()];
        let p = GeoPoint::new(
            rng.range(query_area.lon_min(), query_area.lon_max()),
            rng.range(query_area.lat_min(), query_area.lat_max()),
        )
        .unwrap();
        for k in [1, 5, 20] {
            let (got, stats) = idx.nearest_with_stats(&p, k).unwrap();
            nearest_queries += 1;
            if got != brute_nearest(&points, &p, k) {
                nearest_bad += 1;
            }
            if stats.total() < points.len() {
                pruned += 1;
            }
        }
        let region = random_convex_polygon(&mut rng, &query_area, 10);
        if idx.range_query(&region).unwrap() != brute_range(&points, &region) {
            range_bad += 1;
        }
    }
    let pruned_share = pruned as f64 / nearest_queries as f64;
    let msg = format!(
        "{nearest_bad}/{nearest_queries} nearest and {range_bad}/1000 range mismatches; pruning wins on {:.2}%",
        100.0 * pruned_share
    );
    if nearest_bad == 0 && range_bad == 0 && pruned_share >= 0.99 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn hierarchy_oracle() -> Verdict {
    let mut rng = SplitMix64(7);
    let mut mismatched = 0;
    let mut largest = 0;
    for i in 0..100 {
        let n = if i < 5 { 10_000 } else { 1 + rng.below(10_000) };
        largest = largest.max(n);
        let root_p = rng.range(0.0, 0.1);
        let records = random_forest(&mut rng, n, root_p);
        let levels = evaluate_levels(&records).map_err(|e| e.to_string())?;
        let oracle = bfs_depths(&records);
        let agree = levels.rows.len() == oracle.len()
            && levels.unreachable.is_empty()
            && levels
                .rows
                .iter()
                .all(|(r, l)| oracle.get(&r.emp_id) == Some(l));
        if !agree {
            mismatched += 1;
        }
    }
    let mut missed_cycles = 0;
    for i in 0..50 {
        let n = 1 + rng.below(2_000);
        let records = random_forest_with_cycle(&mut rng, n, 1 + i % 7);
        if !matches!(
            evaluate_levels(&records),
            Err(HierarchyError::CycleDetected(_))
        ) {
            missed_cycles += 1;
        }
    }
    let msg = format!("{mismatched}/100 forests differ from BFS (largest {largest} nodes); {missed_cycles}/50 cycles missed");
    if mismatched == 0 && missed_cycles == 0 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn visualizer() -> Verdict {
    let listing = fs::read_to_string(data("world.layers")).unwrap();
    let layers = parse_layers(&listing, &data("")).map_err(|e| e.to_string())?;
    let cities: Vec<RenderLayer> = layers
        .iter()
        .filter(|l| l.kind() == LayerKind::Points)
        .cloned()
        .collect();
    let v: Value = serde_json::from_str(&geojson_string(&cities)).map_err(|e| e.to_string())?;
    let features = v["features"].as_array().ok_or("no features array")?;
    let points_ok = v["type"] == "FeatureCollection"
        && features.iter().all(|f| {
            f["type"] == "Feature"
                && f["geometry"]["type"] == "Point"
                && f["geometry"]["coordinates"]
                    .as_array()
                    .is_some_and(|c| c.len() == 2 && c.iter().all(Value::is_f64))
        });

    let svg = svg_string(&layers, 1024, 512).map_err(|e| e.to_string())?;
    let doc = roxmltree::Document::parse(&svg).map_err(|e| e.to_string())?;
    let drawn: Vec<&str> = doc
        .descendants()
        .map(|n| n.tag_name().name())
        .filter(|t| matches!(*t, "path" | "circle"))
        .collect();
    let outlines_below =
        drawn.iter().rposition(|&t| t == "path") < drawn.iter().position(|&t| t == "circle");
    let circles = drawn.iter().filter(|&&t| t == "circle").count();
    let msg = format!(
        "{} GeoJSON features (grammar ok: {points_ok}); SVG has {} paths then {circles} circles, outlines beneath points: {outlines_below}",
        features.len(),
        drawn.len() - circles
    );
    if features.len() == 700 && points_ok && circles == 700 && outlines_below {
        Ok(msg)
    } else {
        Err(msg)
    }
}

/// Runs every subcommand twice into separate directories and compares every
/// output file and stream byte for byte.
fn determinism() -> Verdict {
    let scratch = tempfile::tempdir().map_err(|e| e.to_string())?;
    let index_file = scratch.path().join("cities.gsix");
    let built = Command::new(env!("CARGO_BIN_EXE_geoswarm"))
        .args([
            "index",
            "build",
            "--customers",
            data("cities.csv").to_str().unwrap(),
            "--out",
            index_file.to_str().unwrap(),
        ])
        .output()
        .map_err(|e| e.to_string())?;
    if !built.status.success() {
        return Err(String::from_utf8_lossy(&built.stderr).into_owned());
    }
    let d = |n: &str| data(n).to_str().unwrap().to_string();
    let idx = index_file.to_str().unwrap().to_string();
    let runs: Vec<(&str, Vec<String>)> = vec![
        (
            "index-build",
            vec![
                "index".into(),
                "build".into(),
                "--customers".into(),
                d("cities.csv"),
                "--levels".into(),
                "HIGH,LOW,MEDIUM,HIGH".into(),
                "--out".into(),
                "OUT/idx.gsix".into(),
            ],
        ),
        (
            "query-nearest",
            vec![
                "query".into(),
                "nearest".into(),
                "--index".into(),
                idx.clone(),
                "--point".into(),
                "POINT(12.5 41.9)".into(),
                "-k".into(),
                "20".into(),
                "--out".into(),
                "OUT/nearest.csv".into(),
            ],
        ),
        (
            "query-within",
            vec![
                "query".into(),
                "within".into(),
                "--index".into(),
                idx,
                "--polygon".into(),
                d("outlines.wkt"),
                "--out".into(),
                "OUT/within.csv".into(),
            ],
        ),
        (
            "optimize-facility",
            vec![
                "optimize".into(),
                "facility".into(),
                "--customers".into(),
                d("cities.csv"),
                "-k".into(),
                "3".into(),
                "--max-iterations".into(),
                "150".into(),
                "--history".into(),
                "OUT/h.csv".into(),
                "--out".into(),
                "OUT/facility.txt".into(),
            ],
        ),
        (
            "optimize-product-mix",
            vec![
                "optimize".into(),
                "product-mix".into(),
                "--problem".into(),
                d("textbook.problem"),
                "--topology".into(),
                "ring".into(),
                "--history".into(),
                "OUT/h.csv".into(),
                "--out".into(),
                "OUT/mix.txt".into(),
            ],
        ),
        (
            "hierarchy-levels",
            vec![
                "hierarchy".into(),
                "levels".into(),
                "--in".into(),
                d("employees.csv"),
                "--out".into(),
                "OUT/levels.csv".into(),
                "--unreachable".into(),
                "OUT/unreachable.csv".into(),
            ],
        ),
        (
            "render-geojson",
            vec![
                "render".into(),
                "--layers".into(),
                d("world.layers"),
                "--out".into(),
                "OUT/map.geojson".into(),
            ],
        ),
        (
            "render-svg",
            vec![
                "render".into(),
                "--layers".into(),
                d("world.layers"),
                "--out".into(),
                "OUT/map.svg".into(),
            ],
        ),
    ];
    let mut identical = Vec::new();
    for (name, args) in &runs {
        let mut snapshots = Vec::new();
        for attempt in 0..2 {
            let out_dir = scratch.path().join(format!("{name}-{attempt}"));
            fs::create_dir(&out_dir).map_err(|e| e.to_string())?;
            let prefix = out_dir.to_str().unwrap();
            let args: Vec<String> = args.iter().map(|a| a.replace("OUT", prefix)).collect();
            let o = Command::new(env!("CARGO_BIN_EXE_geoswarm"))
                .args(["--seed", "20240607"])
                .args(&args)
                .output()
                .map_err(|e| e.to_string())?;
            if !o.status.success() {
                return Err(format!(
                    "{name} failed: {}",
                    String::from_utf8_lossy(&o.stderr)
                ));
            }
            let mut files: Vec<(String, Vec<u8>)> = fs::read_dir(&out_dir)
                .unwrap()
                .map(|e| e.unwrap())
                .map(|e| {
                    (
                        e.file_name().to_string_lossy().into_owned(),
                        fs::read(e.path()).unwrap(),
                    )
                })
                .collect();
            files.sort();
            if files.is_empty() {
                return Err(format!("{name} wrote no files"));
            }
            snapshots.push((files, o.stdout, o.stderr));
        }
        if snapshots[0] != snapshots[1] {
            return Err(format!("{name} differs between runs"));
        }
        identical.push(*name);
    }
    Ok(format!(
        "{} subcommands byte-identical across reruns: {}",
        identical.len(),
        identical.join(", ")
    ))
}

fn geo_correctness() -> Verdict {
    let antipodal = geo::geodesic_distance(
        &GeoPoint::new(0.0, 0.0).unwrap(),
        &GeoPoint::new(180.0, 0.0).unwrap(),
    )
    .unwrap();
    let pole_to_pole = geo::geodesic_distance(
        &GeoPoint::new(30.0, 90.0).unwrap(),
        &GeoPoint::new(-150.0, -90.0).unwrap(),
    )
    .unwrap();
    let one_degree = geo::geodesic_distance(
        &GeoPoint::new(0.0, 0.0).unwrap(),
        &GeoPoint::new(1.0, 0.0).unwrap(),
    )
    .unwrap();
    let antipodal_err = (antipodal - PI * EARTH_RADIUS_M)
        .abs()
        .max((pole_to_pole - PI * EARTH_RADIUS_M).abs());
    let degree_err = (one_degree - EARTH_RADIUS_M * PI / 180.0).abs();

    let mut rng = SplitMix64(10);
    let mut wkt_bad = 0;
    for _ in 0..10_000 {
        let p = GeoPoint::new(rng.range(-180.0, 180.0), rng.range(-90.0, 90.0)).unwrap();
        let back = geo::parse_wkt_point(&geo::emit_wkt(&p)).unwrap();
        if back.lon().to_bits() != p.lon().to_bits() || back.lat().to_bits() != p.lat().to_bits() {
            wkt_bad += 1;
        }
    }

    let area = GeoRect::new(-30.0, -30.0, 30.0, 30.0).unwrap();
    let (mut compared, mut skipped, mut pip_bad) = (0, 0, 0);
    while compared < 10_000 {
        let poly = random_convex_polygon(&mut rng, &area, 12);
        let ring = ring_coords(&poly);
        let p = GeoPoint::new(rng.range(-35.0, 35.0), rng.range(-35.0, 35.0)).unwrap();
        if distance_to_boundary((p.lon(), p.lat()), &ring) < 1e-9 {
            skipped += 1;
            continue;
        }
        compared += 1;
        if geo::point_in_polygon(&p, &poly).unwrap()
            != (winding_number((p.lon(), p.lat()), &ring) != 0)
        {
            pip_bad += 1;
        }
    }
    let msg = format!(
        "antipodal error {antipodal_err:.2e} m, 1-degree error {degree_err:.2e} m; {wkt_bad}/10000 WKT round-trip failures; \
         {pip_bad}/{compared} containment mismatches ({skipped} near-boundary draws skipped)"
    );
    if antipodal_err <= 1e-3 && degree_err <= 1e-3 && wkt_bad == 0 && pip_bad == 0 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn main() -> ExitCode {
    let criteria: [(&str, Check); 10] = [
        ("PSO convergence on the 2-D sphere", pso_convergence),
        ("gbest history never increases", monotone_gbest),
        (
            "velocity and position updates are bit-exact",
            update_exactness,
        ),
        ("product mix matches the LP optimum", product_mix),
        ("facility location matches symmetry and grid scan", facility),
        ("grid index equals brute force and prunes", index_exactness),
        (
            "hierarchy levels equal BFS depth, cycles detected",
            hierarchy_oracle,
        ),
        ("700-city render and layered SVG", visualizer),
        ("CLI output is byte-deterministic", determinism),
        ("geodesic distance, WKT and containment", geo_correctness),
    ];
    let mut failures = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let verdict = panic::catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|e| {
            let what = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {what}"))
        });
        let elapsed = start.elapsed().as_secs_f64();
        match verdict {
            Ok(detail) => println!(
                "criterion {:>2} PASS  {name}: {detail} [{elapsed:.2}s]",
                i + 1
            ),
            Err(detail) => {
                failures += 1;
                println!(
                    "criterion {:>2} FAIL  {name}: {detail} [{elapsed:.2}s]",
                    i + 1
                );
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failures,
        criteria.len()
    );
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
