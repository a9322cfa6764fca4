use serde::{Deserialize, Serialize};

use crate::assignment::Assignment;
use crate::error::Result;
use crate::evaluate::social_welfare;
use crate::instance::Instance;

/// A solved (and possibly priced) assignment, as read and written by the CLI.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Solution {
    pub groups: Vec<Vec<usize>>,
    pub room_of_group: Vec<usize>,
    pub room_prices: Option<Vec<f64>>,
    pub tenant_prices: Option<Vec<f64>>,
    pub social_welfare: f64,
    pub epsilon: Option<f64>,
}

impl Solution {
    pub fn unpriced(inst: &Instance, a: &Assignment) -> Result<Self> {
        Ok(Self {
            groups: a.groups.clone(),
            room_of_group: a.room_of_group.clone(),
            room_prices: None,
            tenant_prices: None,
            social_welfare: social_welfare(inst, a)?,
            epsilon: None,
        })
    }

    pub fn assignment(&self) -> Assignment {
        Assignment::new(self.groups.clone(), self.room_of_group.clone())
    }
}
