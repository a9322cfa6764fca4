//! Prices for a fixed assignment.
//!
//! [`ref_prices`] finds room prices no rooming group envies. The min-ε
//! programs price tenants directly so that every tenant's utility is at
//! least `1/ε` of what they would get in any non-roommate's place, with room
//! envy-freeness kept as a side constraint. For fixed ε both are linear in
//! the prices, so ε is found by doubling then bisection over LP feasibility.

use serde::{Deserialize, Serialize};

use crate::assignment::Assignment;
use crate::error::{Error, Result};
use crate::evaluate::{
    displaced_value_matrix, group_value, pair_epsilon, PriceVector, TenantPrices,
};
use crate::greedy::rematch_rooms;
use crate::instance::Instance;
use crate::linprog::{
    check_feasible, find_feasible_point, solve_lp, LinearProgram, LpStatus, Relation,
    FEASIBILITY_TOLERANCE,
};
use crate::solution::Solution;

/// Largest ε tried before giving up.
pub const EPSILON_CAP: f64 = 1_048_576.0;
/// Bisection stops once the bracket is this narrow.
pub const EPSILON_WIDTH: f64 = 1e-4;
/// Distance below a returned ε at which infeasibility is re-checked.
pub const MINIMALITY_GAP: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PricingMode {
    /// Each tenant pays an individual share.
    TenantShares,
    /// Roommates split the room price evenly; a single pays it all.
    EqualRoomSplit,
}

impl PricingMode {
    pub fn name(self) -> &'static str {
        match self {
            PricingMode::TenantShares => "tenant-shares",
            PricingMode::EqualRoomSplit => "equal-room-split",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EpsilonSolution {
    pub epsilon: f64,
    pub tenant_prices: TenantPrices,
    pub room_prices: PriceVector,
    /// Times the minimality check found a feasible ε below the bisection
    /// result and the search restarted underneath it.
    pub flips: usize,
}

/// Which price variables the LP has and how shares and room prices are
/// built from them.
struct PriceModel {
    vars: usize,
    /// Tenant share as `coef * x[var]`.
    share: Vec<(usize, f64)>,
    /// Room price as a linear form over the variables.
    room: Vec<Vec<f64>>,
    /// Rooms whose price is pinned to zero.
    empty: Vec<usize>,
}

impl PriceModel {
    fn new(inst: &Instance, a: &Assignment, mode: PricingMode) -> Result<Self> {
        let (m, n) = (inst.tenants(), inst.rooms());
        let places = a.placements(inst)?;
        let occupants = a.room_occupants();
        let empty = (0..n).filter(|&r| occupants[r].is_empty()).collect();
        Ok(match mode {
            PricingMode::TenantShares => {
                let share = (0..m).map(|t| (t, 1.0)).collect();
                let room = occupants
                    .iter()
                    .map(|occ| {
                        let mut row = vec![0.0; m];
                        occ.iter().for_each(|&t| row[t] = 1.0);
                        row
                    })
                    .collect();
                Self {
                    vars: m,
                    share,
                    room,
                    empty,
                }
            }
            PricingMode::EqualRoomSplit => {
                let share = places
                    .iter()
                    .map(|pl| (pl.room, if pl.roommate.is_some() { 0.5 } else { 1.0 }))
                    .collect();
                let room = (0..n)
                    .map(|r| {
                        let mut row = vec![0.0; n];
                        row[r] = 1.0;
                        row
                    })
                    .collect();
                Self {
                    vars: n,
                    share,
                    room,
                    empty,
                }
            }
        })
    }

    fn shares(&self, x: &[f64]) -> TenantPrices {
        TenantPrices(self.share.iter().map(|&(v, c)| c * x[v]).collect())
    }

    fn rooms(&self, x: &[f64]) -> PriceVector {
        PriceVector(
            self.room
                .iter()
                .map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum())
                .collect(),
        )
    }

    /// Sum of room prices equals the rent, empty rooms cost nothing, and no
    /// group prefers another group's room at these prices.
    fn base_program(&self, inst: &Instance, a: &Assignment) -> Result<LinearProgram> {
        let mut lp = LinearProgram::new(self.vars);
        let mut total = vec![0.0; self.vars];
        for row in &self.room {
            add_into(&mut total, row, 1.0);
        }
        lp.add(total, Relation::Eq, inst.rent());
        for &r in &self.empty {
            lp.add(self.room[r].clone(), Relation::Eq, 0.0);
        }
        add_ref_rows(&mut lp, inst, a, &self.room)?;
        Ok(lp)
    }

    /// `eps * (own_i - share_i) >= displaced_ij - share_j` for every ordered
    /// non-roommate pair.
    fn add_envy_rows(
        &self,
        lp: &mut LinearProgram,
        displaced: &[Vec<f64>],
        roommate: &[Option<usize>],
        eps: f64,
    ) {
        let m = displaced.len();
        for i in 0..m {
            for j in 0..m {
                if i == j || roommate[i] == Some(j) {
                    continue;
                }
                let mut row = vec![0.0; self.vars];
                row[self.share[i].0] -= eps * self.share[i].1;
                row[self.share[j].0] += self.share[j].1;
                lp.add(row, Relation::Ge, displaced[i][j] - eps * displaced[i][i]);
            }
        }
    }
}

fn add_into(acc: &mut [f64], row: &[f64], f: f64) {
    for (a, b) in acc.iter_mut().zip(row) {
        *a += f * b;
    }
}

/// `price(other) - price(own) >= value(other) - value(own)` for every group
/// (empty groups value every room at 0) and every other group's room.
fn add_ref_rows(
    lp: &mut LinearProgram,
    inst: &Instance,
    a: &Assignment,
    room: &[Vec<f64>],
) -> Result<()> {
    for (g, members) in a.groups.iter().enumerate() {
        let own_room = a.room_of_group[g];
        let own = group_value(inst, members, own_room)?;
        for (h, &other_room) in a.room_of_group.iter().enumerate() {
            if h == g {
                continue;
            }
            let mut row = vec![0.0; lp.num_vars];
            add_into(&mut row, &room[other_room], 1.0);
            add_into(&mut row, &room[own_room], -1.0);
            lp.add(
                row,
                Relation::Ge,
                group_value(inst, members, other_room)? - own,
            );
        }
    }
    Ok(())
}

/// Room envy-free room prices summing to the rent. Among all such prices,
/// returns one maximizing the smallest utility of an occupied group.
///
/// Fails with [`Error::RefInfeasible`] when the rooms are not
/// welfare-maximizing for the assignment's groups.
pub fn ref_prices(inst: &Instance, a: &Assignment) -> Result<PriceVector> {
    a.check(inst)?;
    let n = inst.rooms();
    // variables: room prices, then the maximin level
    let mut lp = LinearProgram::new(n + 1);
    let mut objective = vec![0.0; n + 1];
    objective[n] = 1.0;
    lp = lp.maximize(objective);
    let mut total = vec![1.0; n + 1];
    total[n] = 0.0;
    lp.add(total, Relation::Eq, inst.rent());
    let room: Vec<Vec<f64>> = (0..n)
        .map(|r| {
            let mut row = vec![0.0; n + 1];
            row[r] = 1.0;
            row
        })
        .collect();
    add_ref_rows(&mut lp, inst, a, &room)?;
    for (g, members) in a.groups.iter().enumerate() {
        if members.is_empty() {
            continue;
        }
        let r = a.room_of_group[g];
        // level + price(r) <= value
        let mut row = room[r].clone();
        row[n] = 1.0;
        lp.add(row, Relation::Le, group_value(inst, members, r)?);
    }
    let out = solve_lp(&lp)?;
    match out.status {
        LpStatus::Optimal => Ok(PriceVector(out.solution[..n].to_vec())),
        LpStatus::Infeasible => Err(Error::RefInfeasible),
        // every occupied group caps the level, so this needs all rooms empty
        LpStatus::Unbounded => {
            let x = find_feasible_point(&lp)?.ok_or(Error::RefInfeasible)?;
            Ok(PriceVector(x[..n].to_vec()))
        }
    }
}

/// Whether tenant shares summing to the rent exist under which no tenant
/// prefers a non-roommate's placement and share.
pub fn pef_feasible(inst: &Instance, a: &Assignment) -> Result<bool> {
    let model = PriceModel::new(inst, a, PricingMode::TenantShares)?;
    let mut lp = LinearProgram::new(model.vars);
    lp.add(vec![1.0; model.vars], Relation::Eq, inst.rent());
    let displaced = displaced_value_matrix(inst, a)?;
    model.add_envy_rows(&mut lp, &displaced, &roommates(inst, a)?, 1.0);
    check_feasible(&lp)
}

fn roommates(inst: &Instance, a: &Assignment) -> Result<Vec<Option<usize>>> {
    Ok(a.placements(inst)?.iter().map(|p| p.roommate).collect())
}

/// Prepared min-ε program: the ε-independent part plus what is needed to
/// add the envy rows for any ε.
pub struct EpsilonProgram {
    model: PriceModel,
    base: LinearProgram,
    displaced: Vec<Vec<f64>>,
    roommate: Vec<Option<usize>>,
}

impl EpsilonProgram {
    pub fn new(inst: &Instance, a: &Assignment, mode: PricingMode) -> Result<Self> {
        a.check(inst)?;
        let model = PriceModel::new(inst, a, mode)?;
        let base = model.base_program(inst, a)?;
        Ok(Self {
            base,
            displaced: displaced_value_matrix(inst, a)?,
            roommate: roommates(inst, a)?,
            model,
        })
    }

    /// The full program at a fixed ε.
    pub fn at(&self, eps: f64) -> LinearProgram {
        let mut lp = self.base.clone();
        self.model
            .add_envy_rows(&mut lp, &self.displaced, &self.roommate, eps);
        lp
    }

    /// Whether room envy-freeness alone (no envy rows) can be met.
    pub fn ref_feasible(&self) -> Result<bool> {
        check_feasible(&self.base)
    }

    pub fn feasible(&self, eps: f64) -> Result<bool> {
        check_feasible(&self.at(eps))
    }

    fn point(&self, eps: f64) -> Result<Option<Vec<f64>>> {
        find_feasible_point(&self.at(eps))
    }

    /// Among prices feasible at `eps`, ones minimizing total pairwise envy
    /// `sum max(0, (displaced_ij - share_j) - (own_i - share_i))`. Falls back
    /// to `fallback` should the refinement fail numerically.
    fn least_envy(&self, eps: f64, fallback: Vec<f64>) -> Result<Vec<f64>> {
        let pairs: Vec<(usize, usize)> = (0..self.displaced.len())
            .flat_map(|i| (0..self.displaced.len()).map(move |j| (i, j)))
            .filter(|&(i, j)| i != j && self.roommate[i] != Some(j))
            .collect();
        let vars = self.model.vars + pairs.len();
        let widen = |row: Vec<f64>| {
            let mut row = row;
            row.resize(vars, 0.0);
            row
        };
        let inner = self.at(eps);
        let mut objective = vec![0.0; vars];
        objective[self.model.vars..]
            .iter_mut()
            .for_each(|c| *c = 1.0);
        let mut lp = LinearProgram::new(vars).minimize(objective);
        for c in inner.constraints {
            lp.add(widen(c.coeffs), c.relation, c.rhs);
        }
        for (k, &(i, j)) in pairs.iter().enumerate() {
            // envy_ij + (share_j - share_i) >= displaced_ij - own_i
            let e = self.model.vars + k;
            let mut row = vec![0.0; vars];
            row[e] = 1.0;
            row[self.model.share[j].0] += self.model.share[j].1;
            row[self.model.share[i].0] -= self.model.share[i].1;
            lp.add(
                row,
                Relation::Ge,
                self.displaced[i][j] - self.displaced[i][i],
            );
            lp.set_bounds(e, Some(0.0), None);
        }
        let out = solve_lp(&lp)?;
        if out.status != LpStatus::Optimal
            || self.at(eps).max_violation(&out.solution[..self.model.vars]) > FEASIBILITY_TOLERANCE
        {
            return Ok(fallback);
        }
        Ok(out.solution[..self.model.vars].to_vec())
    }

    /// Worst pairwise envy factor of the shares encoded by `x`.
    fn realized(&self, x: &[f64]) -> f64 {
        let shares = self.model.shares(x).0;
        let own = |i: usize| self.displaced[i][i] - shares[i];
        (0..shares.len())
            .flat_map(|i| (0..shares.len()).map(move |j| (i, j)))
            .filter(|&(i, j)| i != j && self.roommate[i] != Some(j))
            .map(|(i, j)| pair_epsilon(own(i), self.displaced[i][j] - shares[j]))
            .fold(1.0, f64::max)
    }

    /// Picks the reported prices at a feasible `eps`. LP round-off can leave
    /// their realized factor a hair above `eps` when some tenant's utility is
    /// near zero; the reported ε is raised to match so it stays truthful.
    fn finish(&self, eps: f64, x: Vec<f64>) -> Result<(f64, Vec<f64>)> {
        let x = self.least_envy(eps, x)?;
        let realized = self.realized(&x);
        let reported = if realized.is_finite() {
            eps.max(realized)
        } else {
            eps
        };
        Ok((reported, x))
    }

    fn solution(&self, epsilon: f64, x: Vec<f64>, flips: usize) -> EpsilonSolution {
        EpsilonSolution {
            epsilon,
            tenant_prices: self.model.shares(&x),
            room_prices: self.model.rooms(&x),
            flips,
        }
    }

    /// Doubling then bisection, with the minimality re-check described on
    /// [`min_epsilon_prices`].
    pub fn minimize(&self) -> Result<EpsilonSolution> {
        if !self.ref_feasible()? {
            return Err(Error::RefInfeasible);
        }
        if let Some(x) = self.point(1.0)? {
            let (eps, x) = self.finish(1.0, x)?;
            return Ok(self.solution(eps, x, 0));
        }
        let mut lo = 1.0;
        let mut hi = 2.0;
        let mut hi_x = loop {
            if let Some(x) = self.point(hi)? {
                break x;
            }
            lo = hi;
            hi *= 2.0;
            if hi > EPSILON_CAP {
                return Err(Error::UnboundedEnvy { cap: EPSILON_CAP });
            }
        };
        let mut flips = 0;
        loop {
            while hi - lo > EPSILON_WIDTH {
                let mid = 0.5 * (lo + hi);
                match self.point(mid)? {
                    Some(x) => {
                        hi = mid;
                        hi_x = x;
                    }
                    None => lo = mid,
                }
            }
            let (eps, x) = self.finish(hi, hi_x.clone())?;
            let probe = (eps - MINIMALITY_GAP).max(1.0);
            if eps <= 1.0 + MINIMALITY_GAP || probe >= hi {
                return Ok(self.solution(eps, x, flips));
            }
            match self.point(probe)? {
                None => return Ok(self.solution(eps, x, flips)),
                Some(x) => {
                    // feasibility is not monotone here; search below again
                    flips += 1;
                    hi = probe;
                    hi_x = x;
                    lo = 1.0;
                }
            }
        }
    }
}

/// Smallest ε (within [`EPSILON_WIDTH`]) for which prices exist that are
/// ε-envy-free between tenants and room envy-free between groups, with room
/// prices summing to the rent and empty rooms free.
///
/// The result is feasible at the returned ε, and infeasible at
/// `max(1, ε - MINIMALITY_GAP)` whenever ε exceeds `1 + MINIMALITY_GAP`.
pub fn min_epsilon_prices(
    inst: &Instance,
    a: &Assignment,
    mode: PricingMode,
) -> Result<EpsilonSolution> {
    EpsilonProgram::new(inst, a, mode)?.minimize()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PricingPolicy {
    Ref,
    MinEpsTenant,
    MinEpsEqual,
}

impl PricingPolicy {
    pub fn name(self) -> &'static str {
        match self {
            PricingPolicy::Ref => "ref",
            PricingPolicy::MinEpsTenant => "min-eps-tenant",
            PricingPolicy::MinEpsEqual => "min-eps-equal",
        }
    }
}

impl std::str::FromStr for PricingPolicy {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "ref" => Ok(PricingPolicy::Ref),
            "min-eps-tenant" => Ok(PricingPolicy::MinEpsTenant),
            "min-eps-equal" => Ok(PricingPolicy::MinEpsEqual),
            other => Err(format!("unknown pricing policy {other:?}")),
        }
    }
}

/// Re-matches rooms (keeping the groups), prices the result and packages it.
pub fn attach_prices(inst: &Instance, a: &Assignment, policy: PricingPolicy) -> Result<Solution> {
    let a = rematch_rooms(inst, a)?;
    let mut sol = Solution::unpriced(inst, &a)?;
    match policy {
        PricingPolicy::Ref => {
            sol.room_prices = Some(ref_prices(inst, &a)?.0);
        }
        PricingPolicy::MinEpsTenant | PricingPolicy::MinEpsEqual => {
            let mode = if policy == PricingPolicy::MinEpsTenant {
                PricingMode::TenantShares
            } else {
                PricingMode::EqualRoomSplit
            };
            let eps = min_epsilon_prices(inst, &a, mode)?;
            sol.room_prices = Some(eps.room_prices.0);
            sol.tenant_prices = Some(eps.tenant_prices.0);
            sol.epsilon = Some(eps.epsilon);
        }
    }
    Ok(sol)
}
