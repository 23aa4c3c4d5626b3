//! Four-level grid index over [`GeoPoint`]s.
//!
//! Every entry is filed under its deepest (level-4) cell. A cell key is the
//! list of per-level cell coordinates, so upper-level cells are key prefixes
//! and each one covers a contiguous run of the key-sorted entry table. Queries
//! walk those runs with `partition_point` instead of keeping per-level maps.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, BinaryHeap};
use std::fmt::{self, Debug};
use std::str::FromStr;

use thiserror::Error;

use crate::geo::{self, GeoError, GeoPoint, GeoPolygon, GeoRect};

pub const LEVELS: usize = 4;

/// Absolute slack, in meters, applied to cell lower bounds before pruning.
const PRUNE_SLACK_M: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum IndexError {
    #[error("point for id {0} lies outside the index bounds")]
    PointOutOfBounds(String),
    #[error("duplicate id {0}")]
    DuplicateId(String),
    #[error("unknown grid density {0:?} (expected LOW, MEDIUM or HIGH)")]
    UnknownDensity(String),
    #[error(transparent)]
    Geo(#[from] GeoError),
}

/// Cells per axis at one grid level.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GridDensity {
    /// 4×4
    Low,
    /// 8×8
    Medium,
    /// 16×16
    High,
}

impl GridDensity {
    pub fn cells_per_axis(self) -> u32 {
        match self {
            GridDensity::Low => 4,
            GridDensity::Medium => 8,
            GridDensity::High => 16,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            GridDensity::Low => "LOW",
            GridDensity::Medium => "MEDIUM",
            GridDensity::High => "HIGH",
        }
    }
}

impl fmt::Display for GridDensity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for GridDensity {
    type Err = IndexError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_uppercase().as_str() {
            "LOW" => Ok(GridDensity::Low),
            "MEDIUM" => Ok(GridDensity::Medium),
            "HIGH" => Ok(GridDensity::High),
            _ => Err(IndexError::UnknownDensity(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridConfig {
    pub levels: [GridDensity; LEVELS],
    pub bounds: GeoRect,
}

impl GridConfig {
    pub fn new(levels: [GridDensity; LEVELS], bounds: GeoRect) -> Self {
        Self { levels, bounds }
    }

    /// `LEVEL1=HIGH, ..., LEVEL4=HIGH` over `bounds`.
    pub fn all_high(bounds: GeoRect) -> Self {
        Self::new([GridDensity::High; LEVELS], bounds)
    }

    /// Cells per axis of the whole grid at `level` (1-based).
    fn resolution(&self, level: usize) -> u32 {
        self.levels[..level]
            .iter()
            .map(|d| d.cells_per_axis())
            .product()
    }

    fn axis_cell(&self, value: f64, min: f64, max: f64) -> u32 {
        let n = self.resolution(LEVELS);
        let t = (value - min) / (max - min);
        // half-open cells, except that the last one also takes `max`
        ((t * n as f64).floor() as i64).clamp(0, n as i64 - 1) as u32
    }

    /// Key of the deepest cell holding `p`. Points outside the bounds map to
    /// the nearest border cell.
    pub fn cell_key(&self, p: &GeoPoint) -> CellKey {
        let b = &self.bounds;
        let gx = self.axis_cell(p.lon(), b.lon_min(), b.lon_max());
        let gy = self.axis_cell(p.lat(), b.lat_min(), b.lat_max());
        CellKey::from_global(&self.levels, gx, gy)
    }

    /// Coordinate rectangle `(lon0, lat0, lon1, lat1)` of the cell at `level`
    /// whose key prefix is `key[..level]`.
    fn cell_rect(&self, key: &CellKey, level: usize) -> (f64, f64, f64, f64) {
        let (cx, cy) = key.global_at(&self.levels, level);
        let n = self.resolution(level) as f64;
        let b = &self.bounds;
        let w = (b.lon_max() - b.lon_min()) / n;
        let h = (b.lat_max() - b.lat_min()) / n;
        (
            b.lon_min() + cx as f64 * w,
            b.lat_min() + cy as f64 * h,
            b.lon_min() + (cx + 1) as f64 * w,
            b.lat_min() + (cy + 1) as f64 * h,
        )
    }
}

/// Per-level `(column, row)` cell coordinates, level 1 first. Each coordinate
/// is relative to the parent cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CellKey(pub [(u16, u16); LEVELS]);

impl CellKey {
    fn from_global(levels: &[GridDensity; LEVELS], mut gx: u32, mut gy: u32) -> Self {
        let mut key = [(0u16, 0u16); LEVELS];
        for level in (0..LEVELS).rev() {
            let d = levels[level].cells_per_axis();
            key[level] = ((gx % d) as u16, (gy % d) as u16);
            gx /= d;
            gy /= d;
        }
        CellKey(key)
    }

    /// Grid-wide coordinates of the ancestor cell at `level` (1-based).
    fn global_at(&self, levels: &[GridDensity; LEVELS], level: usize) -> (u32, u32) {
        self.0[..level]
            .iter()
            .zip(levels)
            .fold((0, 0), |(x, y), (&(cx, cy), d)| {
                let n = d.cells_per_axis();
                (x * n + cx as u32, y * n + cy as u32)
            })
    }

    /// Cell coordinates at `level` (1-based), relative to the parent cell.
    pub fn level(&self, level: usize) -> (u16, u16) {
        self.0[level - 1]
    }

    fn prefix(&self, level: usize) -> &[(u16, u16)] {
        &self.0[..level]
    }
}

#[derive(Debug, Clone, PartialEq)]
struct Entry<I> {
    key: CellKey,
    id: I,
    point: GeoPoint,
}

/// Counters from a single query.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct QueryStats {
    /// Distances computed from the query to indexed points.
    pub point_evaluations: usize,
    /// Lower-bound distances computed from the query to grid cells.
    pub bound_evaluations: usize,
}

impl QueryStats {
    pub fn total(&self) -> usize {
        self.point_evaluations + self.bound_evaluations
    }
}

/// Immutable grid index. Build with [`GridIndex::build`].
#[derive(Debug, Clone, PartialEq)]
pub struct GridIndex<I> {
    config: GridConfig,
    /// Sorted by `(key, id)`.
    entries: Vec<Entry<I>>,
}

impl<I: Ord + Clone + Debug> GridIndex<I> {
    pub fn build(
        points: impl IntoIterator<Item = (I, GeoPoint)>,
        config: GridConfig,
    ) -> Result<Self, IndexError> {
        let mut seen = BTreeSet::new();
        let mut entries = Vec::new();
        for (id, point) in points {
            if !config.bounds.contains(&point) {
                return Err(IndexError::PointOutOfBounds(format!("{id:?}")));
            }
            if !seen.insert(id.clone()) {
                return Err(IndexError::DuplicateId(format!("{id:?}")));
            }
            entries.push(Entry {
                key: config.cell_key(&point),
                id,
                point,
            });
        }
        entries.sort_by(|a, b| a.key.cmp(&b.key).then_with(|| a.id.cmp(&b.id)));
        Ok(Self { config, entries })
    }

    pub fn config(&self) -> &GridConfig {
        &self.config
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// `(id, point)` pairs in cell-key order.
    pub fn entries(&self) -> impl Iterator<Item = (&I, &GeoPoint)> {
        self.entries.iter().map(|e| (&e.id, &e.point))
    }

    pub fn get(&self, id: &I) -> Option<&GeoPoint> {
        self.entries.iter().find(|e| &e.id == id).map(|e| &e.point)
    }

    /// Occupied deepest-level cells with their entry ids.
    pub fn cells(&self) -> BTreeMap<CellKey, Vec<&I>> {
        let mut cells: BTreeMap<CellKey, Vec<&I>> = BTreeMap::new();
        for e in &self.entries {
            cells.entry(e.key).or_default().push(&e.id);
        }
        cells
    }

    /// Cell key assigned to `id` at build time.
    pub fn cell_of(&self, id: &I) -> Option<CellKey> {
        self.entries.iter().find(|e| &e.id == id).map(|e| e.key)
    }

    /// The `k` entries closest to `q`, ascending by distance, ties by id.
    pub fn nearest(&self, q: &GeoPoint, k: usize) -> Result<Vec<(I, f64)>, IndexError> {
        self.nearest_with_stats(q, k).map(|(hits, _)| hits)
    }

    /// Exact best-first search over the cell hierarchy: cells are visited in
    /// order of their geodesic lower bound, and the search stops once no
    /// unvisited cell can beat the current `k`-th distance.
    pub fn nearest_with_stats(
        &self,
        q: &GeoPoint,
        k: usize,
    ) -> Result<(Vec<(I, f64)>, QueryStats), IndexError> {
        let mut stats = QueryStats::default();
        if k == 0 || self.entries.is_empty() {
            return Ok((Vec::new(), stats));
        }
        if q.srid() != geo::SRID_WGS84 {
            return Err(GeoError::SridMismatch(q.srid(), geo::SRID_WGS84).into());
        }

        let mut best: BinaryHeap<Hit<'_, I>> = BinaryHeap::with_capacity(k + 1);
        let mut frontier = BinaryHeap::new();
        frontier.push(Pending {
            bound: 0.0,
            node: Node {
                level: 0,
                start: 0,
                end: self.entries.len(),
            },
        });

        while let Some(Pending { bound, node }) = frontier.pop() {
            if best.len() == k {
                let worst = best.peek().map_or(f64::INFINITY, |h| h.distance);
                if bound - PRUNE_SLACK_M - worst * 1e-12 > worst {
                    break;
                }
            }
            if node.level == LEVELS {
                for e in &self.entries[node.start..node.end] {
                    stats.point_evaluations += 1;
                    let distance = geo::geodesic_distance(q, &e.point)?;
                    best.push(Hit {
                        distance,
                        id: &e.id,
                    });
                    if best.len() > k {
                        best.pop();
                    }
                }
                continue;
            }
            for child in self.children(&node) {
                stats.bound_evaluations += 1;
                let rect = self
                    .config
                    .cell_rect(&self.entries[child.start].key, child.level);
                frontier.push(Pending {
                    bound: rect_lower_bound(q, rect),
                    node: child,
                });
            }
        }

        let hits = best
            .into_sorted_vec()
            .into_iter()
            .map(|h| (h.id.clone(), h.distance))
            .collect();
        Ok((hits, stats))
    }

    /// Ids of all entries inside `region` (boundary inclusive).
    pub fn range_query(&self, region: &GeoPolygon) -> Result<BTreeSet<I>, IndexError> {
        self.range_query_with_stats(region).map(|(ids, _)| ids)
    }

    pub fn range_query_with_stats(
        &self,
        region: &GeoPolygon,
    ) -> Result<(BTreeSet<I>, QueryStats), IndexError> {
        let mut stats = QueryStats::default();
        let mut found = BTreeSet::new();
        if region.srid() != geo::SRID_WGS84 {
            return Err(GeoError::SridMismatch(region.srid(), geo::SRID_WGS84).into());
        }
        let (x0, y0, x1, y1) = region.extent();
        let mut stack = vec![Node {
            level: 0,
            start: 0,
            end: self.entries.len(),
        }];
        while let Some(node) = stack.pop() {
            if node.start == node.end {
                continue;
            }
            if node.level == LEVELS {
                for e in &self.entries[node.start..node.end] {
                    stats.point_evaluations += 1;
                    if geo::point_in_polygon(&e.point, region)? {
                        found.insert(e.id.clone());
                    }
                }
                continue;
            }
            for child in self.children(&node) {
                stats.bound_evaluations += 1;
                let (c0, r0, c1, r1) = self
                    .config
                    .cell_rect(&self.entries[child.start].key, child.level);
                let pad = 1e-9 * (c1 - c0).max(r1 - r0);
                if c0 - pad <= x1 && c1 + pad >= x0 && r0 - pad <= y1 && r1 + pad >= y0 {
                    stack.push(child);
                }
            }
        }
        Ok((found, stats))
    }

    /// Occupied child cells of `node`, each a contiguous run of entries.
    fn children(&self, node: &Node) -> Vec<Node> {
        let level = node.level + 1;
        let mut out = Vec::new();
        let mut start = node.start;
        while start < node.end {
            let prefix = self.entries[start].key.prefix(level);
            let len =
                self.entries[start..node.end].partition_point(|e| e.key.prefix(level) <= prefix);
            out.push(Node {
                level,
                start,
                end: start + len,
            });
            start += len;
        }
        out
    }
}

#[derive(Debug, Clone, Copy)]
struct Node {
    /// 0 is the whole grid; 4 is a deepest cell.
    level: usize,
    start: usize,
    end: usize,
}

struct Pending {
    bound: f64,
    node: Node,
}

impl PartialEq for Pending {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Pending {}

impl PartialOrd for Pending {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Pending {
    // min-heap on bound; ties by entry position for determinism
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .bound
            .total_cmp(&self.bound)
            .then_with(|| other.node.start.cmp(&self.node.start))
            .then_with(|| other.node.level.cmp(&self.node.level))
    }
}

struct Hit<'a, I> {
    distance: f64,
    id: &'a I,
}

impl<I: Ord> PartialEq for Hit<'_, I> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl<I: Ord> Eq for Hit<'_, I> {}

impl<I: Ord> PartialOrd for Hit<'_, I> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<I: Ord> Ord for Hit<'_, I> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.distance
            .total_cmp(&other.distance)
            .then_with(|| self.id.cmp(other.id))
    }
}

/// Smallest great-circle distance from `q` to any point of the lon/lat
/// rectangle `(lon0, lat0, lon1, lat1)`.
///
/// Inside the longitude band the closest point lies on `q`'s meridian.
/// Outside it, distance grows with the longitude gap at every latitude, so
/// the closest point lies on one of the two bounding meridians; along a
/// meridian `cos d` is a single sinusoid in latitude, maximised at
/// `atan2(sin φq, cos φq cos Δλ)` or else at a segment end.
fn rect_lower_bound(q: &GeoPoint, (lon0, lat0, lon1, lat1): (f64, f64, f64, f64)) -> f64 {
    let (qlon, qlat) = (q.lon(), q.lat());
    if (lon0..=lon1).contains(&qlon) {
        return geo::haversine(qlon, qlat, qlon, qlat.clamp(lat0, lat1));
    }
    let phi_q = qlat.to_radians();
    [lon0, lon1]
        .into_iter()
        .map(|edge| {
            let dlambda = (edge - qlon).to_radians();
            let peak = phi_q.sin().atan2(phi_q.cos() * dlambda.cos()).to_degrees();
            [lat0, lat1, peak.clamp(lat0, lat1)]
                .into_iter()
                .map(|lat| geo::haversine(qlon, qlat, edge, lat))
                .fold(f64::INFINITY, f64::min)
        })
        .fold(f64::INFINITY, f64::min)
}
