//! Geospatial business-intelligence optimisation.
//!
//! * [`geo`]: lon/lat points, polygons, WKT, haversine distance, containment
//! * [`index`]: four-level grid index with exact k-nearest and region queries
//! * [`pso`]: particle swarm optimiser with global and ring topologies
//! * [`objectives`]: benchmark, facility-location and product-mix fitness
//! * [`hierarchy`]: recursive employee/manager level evaluation

pub mod geo;
pub mod hierarchy;
pub mod index;
pub mod objectives;
pub mod pso;

pub use geo::{GeoError, GeoPoint, GeoPolygon, GeoRect};
pub use hierarchy::{HierarchyError, HierarchyLevels, HierarchyRecord};
pub use index::{GridConfig, GridDensity, GridIndex, IndexError};
pub use objectives::{FacilityInstance, Objective, ObjectiveError, ProductMixInstance};
pub use pso::{PsoError, RunOutcome, Swarm, SwarmConfig, Topology};
