//! Brute-force reference implementations that the test suites compare the
//! library against, plus random instance generators.
//!
//! The oracles share only the point types and the haversine distance with the
//! code they check.

use std::collections::{BTreeSet, HashMap, VecDeque};

use geoswarm::geo::{self, GeoPoint, GeoPolygon, GeoRect};
use geoswarm::hierarchy::HierarchyRecord;

/// Winding number of `ring` around `p` (Sunday's crossing rule with signed
/// edge orientation). Non-zero means inside.
pub fn winding_number(p: (f64, f64), ring: &[(f64, f64)]) -> i32 {
    let is_left =
        |a: (f64, f64), b: (f64, f64)| (b.0 - a.0) * (p.1 - a.1) - (p.0 - a.0) * (b.1 - a.1);
    let mut wn = 0;
    for i in 0..ring.len() {
        let a = ring[i];
        let b = ring[(i + 1) % ring.len()];
        if a.1 <= p.1 {
            if b.1 > p.1 && is_left(a, b) > 0.0 {
                wn += 1;
            }
        } else if b.1 <= p.1 && is_left(a, b) < 0.0 {
            wn -= 1;
        }
    }
    wn
}

/// Smallest distance from `p` to the ring's edges in coordinate units.
pub fn distance_to_boundary(p: (f64, f64), ring: &[(f64, f64)]) -> f64 {
    (0..ring.len())
        .map(|i| {
            let a = ring[i];
            let b = ring[(i + 1) % ring.len()];
            let (dx, dy) = (b.0 - a.0, b.1 - a.1);
            let t = (((p.0 - a.0) * dx + (p.1 - a.1) * dy) / (dx * dx + dy * dy)).clamp(0.0, 1.0);
            let (cx, cy) = (a.0 + t * dx, a.1 + t * dy);
            ((p.0 - cx).powi(2) + (p.1 - cy).powi(2)).sqrt()
        })
        .fold(f64::INFINITY, f64::min)
}

pub fn ring_coords(poly: &GeoPolygon) -> Vec<(f64, f64)> {
    poly.ring().iter().map(|v| (v.lon(), v.lat())).collect()
}

/// Linear scan: the `k` closest points, ascending by distance then id.
pub fn brute_nearest<I: Ord + Clone>(
    points: &[(I, GeoPoint)],
    q: &GeoPoint,
    k: usize,
) -> Vec<(I, f64)> {
    let mut all: Vec<(I, f64)> = points
        .iter()
        .map(|(id, p)| (id.clone(), geo::geodesic_distance(q, p).unwrap()))
        .collect();
    all.sort_by(|a, b| a.1.total_cmp(&b.1).then_with(|| a.0.cmp(&b.0)));
    all.truncate(k);
    all
}

/// Linear scan filter with boundary-inclusive containment.
pub fn brute_range<I: Ord + Clone>(points: &[(I, GeoPoint)], region: &GeoPolygon) -> BTreeSet<I> {
    points
        .iter()
        .filter(|(_, p)| geo::point_in_polygon(p, region).unwrap())
        .map(|(id, _)| id.clone())
        .collect()
}

/// LP optimum by vertex enumeration: maximise `c·x` s.t. `A x ≤ b`, `x ≥ 0`.
///
/// Every choice of `n` tight constraints out of the `m + n` rows (including
/// the sign rows `−x_d ≤ 0`) is solved by Gaussian elimination; feasible
/// solutions are compared and the best one returned. Intended for ≤ 6
/// variables and ≤ 8 constraints.
pub fn lp_vertex_optimum(c: &[f64], a: &[Vec<f64>], b: &[f64]) -> Option<(Vec<f64>, f64)> {
    let n = c.len();
    let mut rows: Vec<(Vec<f64>, f64)> = a.iter().cloned().zip(b.iter().copied()).collect();
    for d in 0..n {
        let mut row = vec![0.0; n];
        row[d] = -1.0;
        rows.push((row, 0.0));
    }
    let feasible = |x: &[f64]| {
        rows.iter()
            .all(|(row, rhs)| row.iter().zip(x).map(|(a, v)| a * v).sum::<f64>() <= rhs + 1e-9)
    };
    let mut best: Option<(Vec<f64>, f64)> = None;
    for subset in combinations(rows.len(), n) {
        let system: Vec<(Vec<f64>, f64)> = subset.iter().map(|&i| rows[i].clone()).collect();
        let Some(x) = solve(system) else { continue };
        if !feasible(&x) {
            continue;
        }
        let value: f64 = c.iter().zip(&x).map(|(c, v)| c * v).sum();
        if best.as_ref().is_none_or(|(_, v)| value > *v) {
            best = Some((x, value));
        }
    }
    best
}

fn combinations(m: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, m: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..m {
            cur.push(i);
            rec(i + 1, m, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, m, k, &mut Vec::new(), &mut out);
    out
}

/// Gaussian elimination with partial pivoting; `None` when singular.
fn solve(mut system: Vec<(Vec<f64>, f64)>) -> Option<Vec<f64>> {
    let n = system.len();
    for col in 0..n {
        let pivot =
            (col..n).max_by(|&i, &j| system[i].0[col].abs().total_cmp(&system[j].0[col].abs()))?;
        if system[pivot].0[col].abs() < 1e-12 {
            return None;
        }
        system.swap(col, pivot);
        for r in 0..n {
            if r != col {
                let f = system[r].0[col] / system[col].0[col];
                if f != 0.0 {
                    let (pr, pb) = (system[col].0.clone(), system[col].1);
                    for (x, p) in system[r].0.iter_mut().zip(&pr) {
                        *x -= f * p;
                    }
                    system[r].1 -= f * pb;
                }
            }
        }
    }
    Some((0..n).map(|i| system[i].1 / system[i].0[i]).collect())
}

/// Depth of each reachable record by breadth-first search from all roots.
pub fn bfs_depths<I: Ord + Clone + std::hash::Hash>(
    records: &[HierarchyRecord<I>],
) -> HashMap<I, usize> {
    let mut children: HashMap<&I, Vec<&I>> = HashMap::new();
    for r in records {
        if let Some(m) = &r.manager_id {
            children.entry(m).or_default().push(&r.emp_id);
        }
    }
    let mut depth = HashMap::new();
    let mut queue: VecDeque<(&I, usize)> = records
        .iter()
        .filter(|r| r.manager_id.is_none())
        .map(|r| (&r.emp_id, 0))
        .collect();
    while let Some((id, d)) = queue.pop_front() {
        if depth.contains_key(id) {
            continue;
        }
        depth.insert(id.clone(), d);
        for c in children.get(id).into_iter().flatten() {
            queue.push_back((c, d + 1));
        }
    }
    depth
}

/// Everything reachable downward from `root` by breadth-first search.
pub fn bfs_reachable<I: Ord + Clone + std::hash::Hash>(
    records: &[HierarchyRecord<I>],
    root: &I,
) -> BTreeSet<I> {
    let mut children: HashMap<&I, Vec<&I>> = HashMap::new();
    for r in records {
        if let Some(m) = &r.manager_id {
            children.entry(m).or_default().push(&r.emp_id);
        }
    }
    let mut seen = BTreeSet::new();
    let mut queue = VecDeque::from([root]);
    while let Some(id) = queue.pop_front() {
        if seen.insert(id.clone()) {
            queue.extend(children.get(id).into_iter().flatten().copied());
        }
    }
    seen
}

/// Best single-facility cost over a `steps × steps` lattice of the region
/// (cell centres), evaluated with plain haversine sums.
pub fn grid_scan_facility(
    customers: &[GeoPoint],
    region: &GeoRect,
    steps: usize,
) -> (GeoPoint, f64) {
    let mut best = (
        region.clamp(region.lon_min(), region.lat_min()),
        f64::INFINITY,
    );
    for i in 0..steps {
        for j in 0..steps {
            let lon = region.lon_min()
                + (i as f64 + 0.5) / steps as f64 * (region.lon_max() - region.lon_min());
            let lat = region.lat_min()
                + (j as f64 + 0.5) / steps as f64 * (region.lat_max() - region.lat_min());
            let cand = GeoPoint::new(lon, lat).unwrap();
            let cost: f64 = customers
                .iter()
                .map(|c| geo::geodesic_distance(c, &cand).unwrap())
                .sum();
            if cost < best.1 {
                best = (cand, cost);
            }
        }
    }
    best
}

/// Small deterministic generator so the testkit needs no RNG dependency.
#[derive(Debug, Clone)]
pub struct SplitMix64(pub u64);

impl SplitMix64 {
    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform in `[0, 1)`.
    pub fn unit(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    pub fn range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + self.unit() * (hi - lo)
    }

    pub fn below(&mut self, n: usize) -> usize {
        (self.next_u64() % n as u64) as usize
    }
}

/// Uniform points inside `rect`, ids `0..n`.
pub fn random_points(rng: &mut SplitMix64, rect: &GeoRect, n: usize) -> Vec<(u64, GeoPoint)> {
    (0..n as u64)
        .map(|id| {
            let p = GeoPoint::new(
                rng.range(rect.lon_min(), rect.lon_max()),
                rng.range(rect.lat_min(), rect.lat_max()),
            )
            .unwrap();
            (id, p)
        })
        .collect()
}

/// Random convex polygon: `3..=max_vertices` points on an ellipse around a
/// centre inside `rect`, taken in angular order.
pub fn random_convex_polygon(
    rng: &mut SplitMix64,
    rect: &GeoRect,
    max_vertices: usize,
) -> GeoPolygon {
    loop {
        let cx = rng.range(rect.lon_min(), rect.lon_max());
        let cy = rng.range(rect.lat_min(), rect.lat_max());
        let w = rect.lon_max() - rect.lon_min();
        let h = rect.lat_max() - rect.lat_min();
        let (rx, ry) = (rng.range(0.01, 0.5) * w, rng.range(0.01, 0.5) * h);
        let n = 3 + rng.below(max_vertices - 2);
        let mut angles: Vec<f64> = (0..n)
            .map(|_| rng.range(0.0, std::f64::consts::TAU))
            .collect();
        angles.sort_by(f64::total_cmp);
        let ring: Option<Vec<GeoPoint>> = angles
            .iter()
            .map(|a| {
                let lon = (cx + rx * a.cos()).clamp(-180.0, 180.0);
                let lat = (cy + ry * a.sin()).clamp(-90.0, 90.0);
                GeoPoint::new(lon, lat).ok()
            })
            .collect();
        if let Some(Ok(poly)) = ring.map(GeoPolygon::new) {
            if poly.doubled_signed_area() > 0.0 {
                return poly;
            }
        }
    }
}

/// Random forest over ids `0..n`: each node picks a manager among the earlier
/// ones or becomes a root with probability `root_p`. Ids are shuffled.
pub fn random_forest(rng: &mut SplitMix64, n: usize, root_p: f64) -> Vec<HierarchyRecord<u64>> {
    let mut labels: Vec<u64> = (0..n as u64).collect();
    for i in (1..n).rev() {
        labels.swap(i, rng.below(i + 1));
    }
    let mut records: Vec<HierarchyRecord<u64>> = (0..n)
        .map(|i| {
            let manager = if i == 0 || rng.unit() < root_p {
                None
            } else {
                Some(labels[rng.below(i)])
            };
            HierarchyRecord::new(labels[i], manager)
        })
        .collect();
    for i in (1..records.len()).rev() {
        records.swap(i, rng.below(i + 1));
    }
    records
}

/// Random forest with one management loop of length `cycle_len` spliced in.
pub fn random_forest_with_cycle(
    rng: &mut SplitMix64,
    n: usize,
    cycle_len: usize,
) -> Vec<HierarchyRecord<u64>> {
    let mut records = random_forest(rng, n, 0.05);
    let start = n as u64;
    for j in 0..cycle_len as u64 {
        let next = start + (j + 1) % cycle_len as u64;
        records.push(HierarchyRecord::new(start + j, Some(next)));
    }
    // something hanging off the loop
    records.push(HierarchyRecord::new(start + cycle_len as u64, Some(start)));
    records
}
