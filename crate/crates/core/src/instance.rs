use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Raw instance as it appears on disk. Nesting order is `valuations[i][j][r]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceData {
    pub m: usize,
    pub n: usize,
    pub rent: f64,
    pub valuations: Vec<Vec<Vec<f64>>>,
}

/// First invariant an [`InstanceData`] breaks.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum InstanceViolation {
    #[error("n < 1")]
    NoRooms,
    #[error("m < n")]
    TooFewTenants,
    #[error("m > 2n")]
    TooManyTenants,
    #[error("rent is not a finite nonnegative number")]
    BadRent,
    #[error("valuation tensor is not m x m x n (at {0})")]
    Shape(String),
    #[error("non-finite valuation at [{0}][{1}][{2}]")]
    NonFinite(usize, usize, usize),
    #[error("negative valuation at [{0}][{1}][{2}]")]
    Negative(usize, usize, usize),
}

/// Checks every instance invariant and names the first one that fails.
pub fn validate_instance(data: &InstanceData) -> Result<(), InstanceViolation> {
    let InstanceData {
        m,
        n,
        rent,
        valuations,
    } = data;
    let (m, n) = (*m, *n);
    if n < 1 {
        return Err(InstanceViolation::NoRooms);
    }
    if m < n {
        return Err(InstanceViolation::TooFewTenants);
    }
    if m > 2 * n {
        return Err(InstanceViolation::TooManyTenants);
    }
    if !rent.is_finite() || *rent < 0.0 {
        return Err(InstanceViolation::BadRent);
    }
    if valuations.len() != m {
        return Err(InstanceViolation::Shape(format!(
            "{} outer rows",
            valuations.len()
        )));
    }
    for (i, row) in valuations.iter().enumerate() {
        if row.len() != m {
            return Err(InstanceViolation::Shape(format!(
                "row {i} has {} entries",
                row.len()
            )));
        }
        for (j, rooms) in row.iter().enumerate() {
            if rooms.len() != n {
                return Err(InstanceViolation::Shape(format!(
                    "[{i}][{j}] has {} rooms",
                    rooms.len()
                )));
            }
            for (r, &v) in rooms.iter().enumerate() {
                if !v.is_finite() {
                    return Err(InstanceViolation::NonFinite(i, j, r));
                }
                if v < 0.0 {
                    return Err(InstanceViolation::Negative(i, j, r));
                }
            }
        }
    }
    Ok(())
}

/// A validated rent-division instance: `m` tenants, `n` rooms, total rent and
/// the valuation tensor `v[i][j][r]` (tenant `i` living with `j` in room `r`;
/// `v[i][i][r]` is living alone).
#[derive(Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "InstanceData", into = "InstanceData")]
pub struct Instance {
    m: usize,
    n: usize,
    rent: f64,
    values: Vec<f64>,
}

impl Instance {
    pub fn new(data: InstanceData) -> Result<Self, InstanceViolation> {
        validate_instance(&data)?;
        let InstanceData {
            m,
            n,
            rent,
            valuations,
        } = data;
        let values = valuations.into_iter().flatten().flatten().collect();
        Ok(Self { m, n, rent, values })
    }

    /// Builds an instance from a closure `f(i, j, r)`.
    pub fn from_fn(
        m: usize,
        n: usize,
        rent: f64,
        mut f: impl FnMut(usize, usize, usize) -> f64,
    ) -> Result<Self, InstanceViolation> {
        let valuations = (0..m)
            .map(|i| {
                (0..m)
                    .map(|j| (0..n).map(|r| f(i, j, r)).collect())
                    .collect()
            })
            .collect();
        Self::new(InstanceData {
            m,
            n,
            rent,
            valuations,
        })
    }

    pub fn tenants(&self) -> usize {
        self.m
    }

    pub fn rooms(&self) -> usize {
        self.n
    }

    pub fn rent(&self) -> f64 {
        self.rent
    }

    /// Same valuations, different total rent.
    pub fn with_rent(&self, rent: f64) -> Result<Self, InstanceViolation> {
        if !rent.is_finite() || rent < 0.0 {
            return Err(InstanceViolation::BadRent);
        }
        Ok(Self {
            rent,
            ..self.clone()
        })
    }

    /// `v[i][j][r]`. Panics on out-of-range ids.
    #[inline]
    pub fn value(&self, i: usize, j: usize, r: usize) -> f64 {
        assert!(i < self.m && j < self.m && r < self.n, "index out of range");
        self.values[(i * self.m + j) * self.n + r]
    }

    pub fn to_data(&self) -> InstanceData {
        InstanceData::from(self.clone())
    }
}

impl From<Instance> for InstanceData {
    fn from(inst: Instance) -> Self {
        let Instance { m, n, rent, values } = inst;
        let valuations = values
            .chunks(m * n)
            .map(|row| row.chunks(n).map(<[f64]>::to_vec).collect())
            .collect();
        InstanceData {
            m,
            n,
            rent,
            valuations,
        }
    }
}

impl TryFrom<InstanceData> for Instance {
    type Error = InstanceViolation;

    fn try_from(data: InstanceData) -> Result<Self, Self::Error> {
        Instance::new(data)
    }
}

impl fmt::Debug for Instance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Instance")
            .field("m", &self.m)
            .field("n", &self.n)
            .field("rent", &self.rent)
            .finish_non_exhaustive()
    }
}
