//! Fitness functions for the swarm: analytic benchmarks, k-facility
//! placement over geodesic distance, and the penalised product-mix model.
//!
//! Everything here is minimised. Maximisation problems are negated.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::geo::{self, GeoPoint, GeoRect};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ObjectiveError {
    #[error("variable {0} has no positive constraint coefficient and no configured cap")]
    UnboundedVariable(usize),
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
    #[error("problem file line {line}: {message}")]
    Parse { line: usize, message: String },
}

type Evaluator = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// A box-bounded scalar function to minimise.
#[derive(Clone)]
pub struct Objective {
    label: String,
    bounds: Vec<(f64, f64)>,
    evaluate: Evaluator,
}

impl Objective {
    pub fn new(
        label: impl Into<String>,
        bounds: Vec<(f64, f64)>,
        evaluate: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            label: label.into(),
            bounds,
            evaluate: Arc::new(evaluate),
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn dimension(&self) -> usize {
        self.bounds.len()
    }

    pub fn bounds(&self) -> &[(f64, f64)] {
        &self.bounds
    }

    pub fn with_bounds(mut self, bounds: Vec<(f64, f64)>) -> Self {
        assert_eq!(bounds.len(), self.bounds.len(), "dimension must not change");
        self.bounds = bounds;
        self
    }

    pub fn evaluate(&self, x: &[f64]) -> f64 {
        (self.evaluate)(x)
    }
}

impl fmt::Debug for Objective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Objective")
            .field("label", &self.label)
            .field("bounds", &self.bounds)
            .finish_non_exhaustive()
    }
}

/// `Σ x²` over `[-5, 5]^n`.
pub fn sphere(dimension: usize) -> Objective {
    Objective::new("sphere", vec![(-5.0, 5.0); dimension], |x| {
        x.iter().map(|v| v * v).sum()
    })
}

/// `10n + Σ (x² − 10 cos 2πx)` over `[-5.12, 5.12]^n`.
pub fn rastrigin(dimension: usize) -> Objective {
    Objective::new("rastrigin", vec![(-5.12, 5.12); dimension], |x| {
        10.0 * x.len() as f64
            + x.iter()
                .map(|v| v * v - 10.0 * (2.0 * std::f64::consts::PI * v).cos())
                .sum::<f64>()
    })
}

/// Place `k` facilities so that the summed distance from every customer to
/// its nearest facility is minimal.
#[derive(Debug, Clone, PartialEq)]
pub struct FacilityInstance {
    customers: Vec<GeoPoint>,
    k: usize,
    region: GeoRect,
}

impl FacilityInstance {
    pub fn new(
        customers: Vec<GeoPoint>,
        k: usize,
        region: GeoRect,
    ) -> Result<Self, ObjectiveError> {
        if customers.is_empty() {
            return Err(ObjectiveError::InvalidInstance("no customers".into()));
        }
        if k == 0 {
            return Err(ObjectiveError::InvalidInstance(
                "k must be at least 1".into(),
            ));
        }
        if let Some(c) = customers.iter().find(|c| !region.contains(c)) {
            return Err(ObjectiveError::InvalidInstance(format!(
                "customer {c} lies outside the placement region"
            )));
        }
        if let Some(c) = customers.iter().find(|c| c.srid() != geo::SRID_WGS84) {
            return Err(ObjectiveError::InvalidInstance(format!(
                "customer {c} has SRID {}",
                c.srid()
            )));
        }
        Ok(Self {
            customers,
            k,
            region,
        })
    }

    pub fn customers(&self) -> &[GeoPoint] {
        &self.customers
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn region(&self) -> &GeoRect {
        &self.region
    }

    /// Reads a particle vector as `k` `(lon, lat)` pairs, clamped into the
    /// region.
    pub fn decode(&self, x: &[f64]) -> Vec<GeoPoint> {
        x.chunks_exact(2)
            .map(|pair| self.region.clamp(pair[0], pair[1]))
            .collect()
    }

    /// Σ over customers of the distance to the closest facility, in meters.
    pub fn cost(&self, facilities: &[GeoPoint]) -> f64 {
        self.customers
            .iter()
            .map(|c| {
                facilities
                    .iter()
                    .map(|f| geo::haversine(c.lon(), c.lat(), f.lon(), f.lat()))
                    .fold(f64::INFINITY, f64::min)
            })
            .sum()
    }
}

pub fn facility_objective(inst: &FacilityInstance) -> Objective {
    let r = inst.region;
    let bounds = (0..inst.k)
        .flat_map(|_| [(r.lon_min(), r.lon_max()), (r.lat_min(), r.lat_max())])
        .collect();
    let inst = inst.clone();
    Objective::new(format!("facility(k={})", inst.k), bounds, move |x| {
        inst.cost(&inst.decode(x))
    })
}

/// Maximise `profit · x` subject to `constraints · x ≤ rhs`, `x ≥ 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductMixInstance {
    profit: Vec<f64>,
    constraints: Vec<Vec<f64>>,
    rhs: Vec<f64>,
    penalty_weight: f64,
    variable_cap: Option<f64>,
}

impl ProductMixInstance {
    /// Penalty weight defaults to `1e4 · max(1, max |profit|)`.
    pub fn new(
        profit: Vec<f64>,
        constraints: Vec<Vec<f64>>,
        rhs: Vec<f64>,
    ) -> Result<Self, ObjectiveError> {
        let invalid = |m: String| Err(ObjectiveError::InvalidInstance(m));
        if profit.is_empty() {
            return invalid("no variables".into());
        }
        if constraints.len() != rhs.len() {
            return invalid(format!(
                "{} constraint rows but {} right-hand sides",
                constraints.len(),
                rhs.len()
            ));
        }
        if let Some((i, row)) = constraints
            .iter()
            .enumerate()
            .find(|(_, r)| r.len() != profit.len())
        {
            return invalid(format!(
                "constraint row {i} has {} coefficients, expected {}",
                row.len(),
                profit.len()
            ));
        }
        if let Some(b) = rhs.iter().find(|b| b.is_nan() || **b < 0.0) {
            return invalid(format!("right-hand side {b} is negative"));
        }
        let all = profit
            .iter()
            .chain(constraints.iter().flatten())
            .chain(&rhs);
        if all.clone().any(|v| !v.is_finite()) {
            return invalid("non-finite coefficient".into());
        }
        let scale = profit.iter().fold(1.0f64, |m, c| m.max(c.abs()));
        Ok(Self {
            profit,
            constraints,
            rhs,
            penalty_weight: 1e4 * scale,
            variable_cap: None,
        })
    }

    pub fn with_penalty_weight(mut self, mu: f64) -> Result<Self, ObjectiveError> {
        if !(mu > 0.0 && mu.is_finite()) {
            return Err(ObjectiveError::InvalidInstance(format!(
                "penalty weight {mu} must be positive"
            )));
        }
        self.penalty_weight = mu;
        Ok(self)
    }

    /// Upper bound used for variables no constraint limits.
    pub fn with_variable_cap(mut self, cap: f64) -> Result<Self, ObjectiveError> {
        if !(cap > 0.0 && cap.is_finite()) {
            return Err(ObjectiveError::InvalidInstance(format!(
                "variable cap {cap} must be positive"
            )));
        }
        self.variable_cap = Some(cap);
        Ok(self)
    }

    /// Parses the text problem format:
    ///
    /// ```text
    /// # comment
    /// profit: 3 5
    /// constraint: 1 0
    /// constraint: 0 2
    /// constraint: 3 2
    /// rhs: 4 12 18
    /// penalty: 50000      (optional)
    /// cap: 100            (optional)
    /// ```
    pub fn parse(text: &str) -> Result<Self, ObjectiveError> {
        let mut profit = None;
        let mut rhs = None;
        let mut constraints = Vec::new();
        let mut penalty = None;
        let mut cap = None;
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: String| ObjectiveError::Parse {
                line: n + 1,
                message,
            };
            let (key, values) = line
                .split_once(':')
                .ok_or_else(|| err(format!("expected `key: values`, got {line:?}")))?;
            let values = values
                .split_whitespace()
                .map(|t| {
                    t.parse::<f64>()
                        .map_err(|_| err(format!("not a number: {t:?}")))
                })
                .collect::<Result<Vec<f64>, _>>()?;
            let scalar = |values: &[f64]| match values {
                [v] => Ok(*v),
                _ => Err(err(format!("{key} takes exactly one value"))),
            };
            match key.trim() {
                "profit" => profit = Some(values),
                "rhs" => rhs = Some(values),
                "constraint" => constraints.push(values),
                "penalty" => penalty = Some(scalar(&values)?),
                "cap" => cap = Some(scalar(&values)?),
                other => return Err(err(format!("unknown key {other:?}"))),
            }
        }
        let missing = |k: &str| ObjectiveError::Parse {
            line: 0,
            message: format!("missing `{k}:` line"),
        };
        let mut inst = Self::new(
            profit.ok_or_else(|| missing("profit"))?,
            constraints,
            rhs.ok_or_else(|| missing("rhs"))?,
        )?;
        if let Some(mu) = penalty {
            inst = inst.with_penalty_weight(mu)?;
        }
        if let Some(c) = cap {
            inst = inst.with_variable_cap(c)?;
        }
        Ok(inst)
    }

    pub fn profit(&self) -> &[f64] {
        &self.profit
    }

    pub fn constraints(&self) -> &[Vec<f64>] {
        &self.constraints
    }

    pub fn rhs(&self) -> &[f64] {
        &self.rhs
    }

    pub fn penalty_weight(&self) -> f64 {
        self.penalty_weight
    }

    pub fn objective_value(&self, x: &[f64]) -> f64 {
        self.profit.iter().zip(x).map(|(c, v)| c * v).sum()
    }

    /// Largest amount by which `x` breaks a constraint or sign condition.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let rows = self
            .constraints
            .iter()
            .zip(&self.rhs)
            .map(|(row, b)| row.iter().zip(x).map(|(a, v)| a * v).sum::<f64>() - b);
        let signs = x.iter().map(|v| -v);
        rows.chain(signs).fold(0.0, f64::max)
    }

    fn penalty(&self, x: &[f64]) -> f64 {
        let rows: f64 = self
            .constraints
            .iter()
            .zip(&self.rhs)
            .map(|(row, b)| {
                let excess = row.iter().zip(x).map(|(a, v)| a * v).sum::<f64>() - b;
                let e = excess.max(0.0);
                e * e
            })
            .sum();
        let signs: f64 = x.iter().map(|v| (-v).max(0.0).powi(2)).sum();
        self.penalty_weight * (rows + signs)
    }

    /// `[0, ub_d]` with `ub_d` the tightest single-constraint cap
    /// `min b_r / a_rd` over rows with `a_rd > 0`.
    pub fn search_bounds(&self) -> Result<Vec<(f64, f64)>, ObjectiveError> {
        (0..self.profit.len())
            .map(|d| {
                let tight = self
                    .constraints
                    .iter()
                    .zip(&self.rhs)
                    .filter(|(row, _)| row[d] > 0.0)
                    .map(|(row, b)| b / row[d])
                    .fold(None, |m: Option<f64>, v| Some(m.map_or(v, |m| m.min(v))));
                let ub = tight
                    .or(self.variable_cap)
                    .ok_or(ObjectiveError::UnboundedVariable(d))?;
                // a zero cap pins the variable; keep the box non-degenerate
                Ok((0.0, ub.max(1e-9)))
            })
            .collect()
    }
}

/// `−profit·x + μ Σ max(0, (Ax − b)_r)² + μ Σ max(0, −x_d)²`.
pub fn product_mix_objective(inst: &ProductMixInstance) -> Result<Objective, ObjectiveError> {
    let bounds = inst.search_bounds()?;
    let inst = inst.clone();
    Ok(Objective::new("product-mix", bounds, move |x| {
        -inst.objective_value(x) + inst.penalty(x)
    }))
}
