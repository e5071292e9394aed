use serde::{Deserialize, Serialize};

use crate::{Cost, Error, Load, Result};

/// How travel costs are derived from coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum DistanceConvention {
    /// Plain Euclidean distance as a double.
    ExactReal,
    /// Euclidean distance multiplied by `factor` and rounded up to an integer.
    ScaledInteger { factor: u32 },
    /// Costs were supplied explicitly and are used verbatim.
    Explicit,
}

impl DistanceConvention {
    pub fn apply(self, euclid: f64) -> Cost {
        match self {
            DistanceConvention::ExactReal | DistanceConvention::Explicit => euclid,
            // The small slack absorbs float noise on values that are integral
            // in exact arithmetic, e.g. 100 * sqrt(0.25).
            DistanceConvention::ScaledInteger { factor } => {
                (euclid * f64::from(factor) - 1e-9).ceil()
            }
        }
    }

    pub fn is_integral(self) -> bool {
        matches!(self, DistanceConvention::ScaledInteger { .. })
    }

    /// Tolerance used when comparing cached and recomputed objectives.
    pub fn tolerance(self) -> Cost {
        if self.is_integral() {
            0.0
        } else {
            1e-6
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn dist(&self, other: &Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DepotSpec {
    pub capacity: Load,
    pub opening_cost: Cost,
    pub coords: Option<Point>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CustomerSpec {
    pub demand: Load,
    pub coords: Option<Point>,
}

/// Dense travel-cost matrix over all vertices. Depots occupy vertex ids
/// `0..m`, customers `m..m+n`.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    size: usize,
    data: Vec<Cost>,
    symmetric: bool,
}

impl DistanceMatrix {
    pub fn from_rows(rows: Vec<Vec<Cost>>) -> Result<Self> {
        let size = rows.len();
        let mut data = Vec::with_capacity(size * size);
        for (u, row) in rows.into_iter().enumerate() {
            if row.len() != size {
                return Err(Error::Semantic(format!(
                    "distance row {u} has {} entries, expected {size}",
                    row.len()
                )));
            }
            data.extend(row);
        }
        Self::from_flat(size, data)
    }

    pub fn from_flat(size: usize, data: Vec<Cost>) -> Result<Self> {
        if data.len() != size * size {
            return Err(Error::Semantic("distance matrix is not square".into()));
        }
        let mut symmetric = true;
        for u in 0..size {
            if data[u * size + u] != 0.0 {
                return Err(Error::Semantic(format!(
                    "distance diagonal entry {u} is not zero"
                )));
            }
            for v in 0..size {
                let c = data[u * size + v];
                if !(c >= 0.0) || !c.is_finite() {
                    return Err(Error::Semantic(format!(
                        "distance ({u},{v}) is negative or not finite"
                    )));
                }
                if c != data[v * size + u] {
                    symmetric = false;
                }
            }
        }
        Ok(DistanceMatrix {
            size,
            data,
            symmetric,
        })
    }

    pub fn from_points(points: &[Point], convention: DistanceConvention) -> Self {
        let size = points.len();
        let mut data = vec![0.0; size * size];
        for u in 0..size {
            for v in (u + 1)..size {
                let c = convention.apply(points[u].dist(&points[v]));
                data[u * size + v] = c;
                data[v * size + u] = c;
            }
        }
        DistanceMatrix {
            size,
            data,
            symmetric: true,
        }
    }

    #[inline]
    pub fn get(&self, u: usize, v: usize) -> Cost {
        self.data[u * self.size + v]
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }
}

/// A validated CLRP instance.
#[derive(Debug, Clone)]
pub struct Instance {
    pub name: String,
    pub depots: Vec<DepotSpec>,
    pub customers: Vec<CustomerSpec>,
    pub vehicle_capacity: Load,
    pub vehicle_cost: Cost,
    pub convention: DistanceConvention,
    dist: DistanceMatrix,
    total_demand: Load,
}

impl Instance {
    pub fn new(
        name: impl Into<String>,
        depots: Vec<DepotSpec>,
        customers: Vec<CustomerSpec>,
        vehicle_capacity: Load,
        vehicle_cost: Cost,
        convention: DistanceConvention,
        dist: DistanceMatrix,
    ) -> Result<Self> {
        if depots.is_empty() {
            return Err(Error::Semantic("instance has no depots".into()));
        }
        if customers.is_empty() {
            return Err(Error::Semantic("instance has no customers".into()));
        }
        if vehicle_capacity <= 0 {
            return Err(Error::Semantic("vehicle_capacity must be positive".into()));
        }
        if !(vehicle_cost >= 0.0) {
            return Err(Error::Semantic("vehicle_cost must be nonnegative".into()));
        }
        for (i, d) in depots.iter().enumerate() {
            if d.capacity <= 0 {
                return Err(Error::Semantic(format!(
                    "depot {i}: capacity must be positive"
                )));
            }
            if !(d.opening_cost >= 0.0) {
                return Err(Error::Semantic(format!(
                    "depot {i}: opening_cost must be nonnegative"
                )));
            }
        }
        for (j, c) in customers.iter().enumerate() {
            if c.demand <= 0 {
                return Err(Error::Semantic(format!(
                    "customer {j}: demand must be positive"
                )));
            }
            if c.demand > vehicle_capacity {
                return Err(Error::Semantic(format!(
                    "customer {j}: demand {} exceeds vehicle_capacity {vehicle_capacity}",
                    c.demand
                )));
            }
        }
        if dist.size() != depots.len() + customers.len() {
            return Err(Error::Semantic(format!(
                "distance matrix has {} vertices, expected {}",
                dist.size(),
                depots.len() + customers.len()
            )));
        }
        let total_demand = customers.iter().map(|c| c.demand).sum();
        Ok(Instance {
            name: name.into(),
            depots,
            customers,
            vehicle_capacity,
            vehicle_cost,
            convention,
            dist,
            total_demand,
        })
    }

    /// Builds an instance from coordinates, computing distances under `convention`.
    pub fn from_coordinates(
        name: impl Into<String>,
        depots: Vec<DepotSpec>,
        customers: Vec<CustomerSpec>,
        vehicle_capacity: Load,
        vehicle_cost: Cost,
        convention: DistanceConvention,
    ) -> Result<Self> {
        let mut points = Vec::with_capacity(depots.len() + customers.len());
        for (i, d) in depots.iter().enumerate() {
            points.push(
                d.coords
                    .ok_or_else(|| Error::Semantic(format!("depot {i}: missing coordinates")))?,
            );
        }
        for (j, c) in customers.iter().enumerate() {
            points
                .push(c.coords.ok_or_else(|| {
                    Error::Semantic(format!("customer {j}: missing coordinates"))
                })?);
        }
        let dist = DistanceMatrix::from_points(&points, convention);
        Self::new(
            name,
            depots,
            customers,
            vehicle_capacity,
            vehicle_cost,
            convention,
            dist,
        )
    }

    #[inline]
    pub fn num_depots(&self) -> usize {
        self.depots.len()
    }

    #[inline]
    pub fn num_customers(&self) -> usize {
        self.customers.len()
    }

    /// Vertex id of customer `j`.
    #[inline]
    pub fn cv(&self, j: usize) -> usize {
        self.depots.len() + j
    }

    /// Travel cost between two vertex ids.
    #[inline]
    pub fn c(&self, u: usize, v: usize) -> Cost {
        self.dist.get(u, v)
    }

    /// Travel cost between depot `i` and customer `j`.
    #[inline]
    pub fn dc(&self, i: usize, j: usize) -> Cost {
        self.dist.get(i, self.depots.len() + j)
    }

    /// Travel cost between customers `a` and `b`.
    #[inline]
    pub fn cc(&self, a: usize, b: usize) -> Cost {
        let m = self.depots.len();
        self.dist.get(m + a, m + b)
    }

    #[inline]
    pub fn demand(&self, j: usize) -> Load {
        self.customers[j].demand
    }

    pub fn total_demand(&self) -> Load {
        self.total_demand
    }

    pub fn total_capacity(&self) -> Load {
        self.depots.iter().map(|d| d.capacity).sum()
    }

    pub fn distances(&self) -> &DistanceMatrix {
        &self.dist
    }

    pub fn tolerance(&self) -> Cost {
        self.convention.tolerance()
    }

    /// True when no single depot capacity can bind, so capacity never
    /// discriminates between depots.
    pub fn depots_uncapacitated(&self) -> bool {
        self.depots.iter().all(|d| d.capacity >= self.total_demand)
    }

    pub fn ensure_feasible(&self) -> Result<()> {
        if self.total_capacity() < self.total_demand {
            return Err(Error::InfeasibleInstance(format!(
                "total depot capacity {} is below total demand {}",
                self.total_capacity(),
                self.total_demand
            )));
        }
        Ok(())
    }
}
