//! Valuations, welfare and envy measures for a fixed instance and assignment.

use serde::{Deserialize, Serialize};

use crate::assignment::Assignment;
use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::TOLERANCE;

/// Room prices, indexed by room id.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PriceVector(pub Vec<f64>);

/// Per-tenant rent shares, indexed by tenant id.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TenantPrices(pub Vec<f64>);

impl PriceVector {
    pub fn total(&self) -> f64 {
        self.0.iter().sum()
    }
}

impl TenantPrices {
    pub fn total(&self) -> f64 {
        self.0.iter().sum()
    }

    /// Roommates split their room's price evenly; singles pay the whole room.
    pub fn equal_split(inst: &Instance, a: &Assignment, p: &PriceVector) -> Result<Self> {
        check_len(inst.rooms(), p.0.len())?;
        let shares = a
            .placements(inst)?
            .iter()
            .map(|pl| match pl.roommate {
                Some(_) => p.0[pl.room] / 2.0,
                None => p.0[pl.room],
            })
            .collect();
        Ok(Self(shares))
    }

    /// Room price implied by the occupants' shares (0 for an empty room).
    pub fn room_prices(&self, inst: &Instance, a: &Assignment) -> Result<PriceVector> {
        check_len(inst.tenants(), self.0.len())?;
        a.check(inst)?;
        let mut p = vec![0.0; inst.rooms()];
        for (g, members) in a.groups.iter().enumerate() {
            p[a.room_of_group[g]] = members.iter().map(|&t| self.0[t]).sum();
        }
        Ok(PriceVector(p))
    }
}

fn check_len(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::PriceLength { expected, got })
    }
}

/// Joint valuation of a rooming group for `room`: `v[i][j][r] + v[j][i][r]`
/// for a pair, `v[i][i][r]` for a single, 0 for nobody.
pub fn group_valuation(inst: &Instance, group: &[usize], room: usize) -> Result<f64> {
    if room >= inst.rooms() {
        return Err(Error::RoomOutOfRange(room));
    }
    if let Some(&t) = group.iter().find(|&&t| t >= inst.tenants()) {
        return Err(Error::TenantOutOfRange(t));
    }
    group_value(inst, group, room)
}

pub(crate) fn group_value(inst: &Instance, group: &[usize], room: usize) -> Result<f64> {
    match *group {
        [] => Ok(0.0),
        [i] => Ok(inst.value(i, i, room)),
        [i, j] if i == j => Ok(inst.value(i, i, room)),
        [i, j] => Ok(inst.value(i, j, room) + inst.value(j, i, room)),
        _ => Err(Error::GroupTooLarge(group.len())),
    }
}

/// Sum of group valuations over the assigned rooms, without the rent.
pub fn raw_valuation_sum(inst: &Instance, a: &Assignment) -> Result<f64> {
    a.check(inst)?;
    let mut total = 0.0;
    for (g, members) in a.groups.iter().enumerate() {
        total += group_value(inst, members, a.room_of_group[g])?;
    }
    Ok(total)
}

pub fn social_welfare(inst: &Instance, a: &Assignment) -> Result<f64> {
    Ok(raw_valuation_sum(inst, a)? - inst.rent())
}

/// `out[i][j]` is what tenant `i` would get by taking `j`'s place (living
/// with `j`'s roommate in `j`'s room, or alone there when `j` is single).
/// The diagonal holds each tenant's valuation of their own placement and
/// roommate entries are 0.
pub fn displaced_value_matrix(inst: &Instance, a: &Assignment) -> Result<Vec<Vec<f64>>> {
    let places = a.placements(inst)?;
    let m = inst.tenants();
    let mut out = vec![vec![0.0; m]; m];
    for i in 0..m {
        let me = places[i];
        out[i][i] = inst.value(i, me.roommate.unwrap_or(i), me.room);
        for j in (0..m).filter(|&j| j != i) {
            if me.roommate == Some(j) {
                continue;
            }
            let them = places[j];
            out[i][j] = inst.value(i, them.roommate.unwrap_or(i), them.room);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RefViolation {
    pub group: usize,
    pub envied_group: usize,
    /// Utility gain `group` would get from swapping, > tolerance.
    pub gain: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RefCheck {
    pub envy_free: bool,
    pub worst: Option<RefViolation>,
}

/// Room envy-freeness: every group weakly prefers its own room at its price.
pub fn is_room_envy_free(inst: &Instance, a: &Assignment, p: &PriceVector) -> Result<RefCheck> {
    check_len(inst.rooms(), p.0.len())?;
    a.check(inst)?;
    let mut worst: Option<RefViolation> = None;
    for (g, members) in a.groups.iter().enumerate() {
        let own_room = a.room_of_group[g];
        let own = group_value(inst, members, own_room)? - p.0[own_room];
        for (h, &other_room) in a.room_of_group.iter().enumerate() {
            if h == g {
                continue;
            }
            let gain = group_value(inst, members, other_room)? - p.0[other_room] - own;
            if gain > TOLERANCE && worst.is_none_or(|w| gain > w.gain) {
                worst = Some(RefViolation {
                    group: g,
                    envied_group: h,
                    gain,
                });
            }
        }
    }
    Ok(RefCheck {
        envy_free: worst.is_none(),
        worst,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnvyReport {
    pub pairwise_eps: Vec<Vec<f64>>,
    pub realized_epsilon: f64,
    pub envious_tenant_count: usize,
    /// For each tenant, the share of non-roommates they do not envy
    /// (1 when there is nobody to compare with).
    pub unenvied_share: Vec<f64>,
}

impl EnvyReport {
    /// Per-tenant share of others they do not envy, averaged over tenants.
    pub fn zero_envy_fraction(&self) -> f64 {
        self.unenvied_share.iter().sum::<f64>() / self.unenvied_share.len() as f64
    }

    /// Fraction of tenants who envy nobody at all.
    pub fn envy_free_tenant_fraction(&self) -> f64 {
        let m = self.pairwise_eps.len();
        (m - self.envious_tenant_count) as f64 / m as f64
    }
}

/// Smallest envy factor for one ordered pair: 1 when `own >= other`, the
/// ratio `other / own` when `own > 0`, infinity otherwise.
pub fn pair_epsilon(own: f64, other: f64) -> f64 {
    if own >= other - TOLERANCE {
        1.0
    } else if own > 0.0 {
        other / own
    } else {
        f64::INFINITY
    }
}

/// Per-pair realized envy factors for tenant shares `shares`.
pub fn envy_report(inst: &Instance, a: &Assignment, shares: &TenantPrices) -> Result<EnvyReport> {
    check_len(inst.tenants(), shares.0.len())?;
    let dv = displaced_value_matrix(inst, a)?;
    let places = a.placements(inst)?;
    let m = inst.tenants();
    let p = &shares.0;
    let mut pairwise = vec![vec![1.0; m]; m];
    let mut envious = 0;
    let mut unenvied_share = Vec::with_capacity(m);
    let mut realized: f64 = 1.0;
    for i in 0..m {
        let own = dv[i][i] - p[i];
        let (mut compared, mut envied) = (0, 0);
        for j in 0..m {
            if j == i || places[i].roommate == Some(j) {
                continue;
            }
            let eps = pair_epsilon(own, dv[i][j] - p[j]);
            pairwise[i][j] = eps;
            compared += 1;
            envied += usize::from(eps > 1.0);
            realized = realized.max(eps);
        }
        envious += usize::from(envied > 0);
        unenvied_share.push(if compared == 0 {
            1.0
        } else {
            (compared - envied) as f64 / compared as f64
        });
    }
    Ok(EnvyReport {
        pairwise_eps: pairwise,
        realized_epsilon: realized,
        envious_tenant_count: envious,
        unenvied_share,
    })
}
