//! Greedy tuple selection and room re-matching for fixed rooming groups.

use crate::assignment::Assignment;
use crate::error::{Error, Result};
use crate::evaluate::group_value;
use crate::instance::Instance;
use crate::matching::max_weight_perfect_matching;

/// A candidate `(i, j, r)`: tenants `i <= j` in room `r`; `i == j` is a single.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CandidateTuple {
    pub i: usize,
    pub j: usize,
    pub r: usize,
    pub value: f64,
}

impl CandidateTuple {
    pub fn is_single(&self) -> bool {
        self.i == self.j
    }

    fn touches(&self, other: &CandidateTuple) -> bool {
        self.r == other.r
            || self.i == other.i
            || self.i == other.j
            || self.j == other.i
            || self.j == other.j
    }
}

/// All tuples in lexicographic `(i, j, r)` order.
pub fn candidate_tuples(inst: &Instance) -> Vec<CandidateTuple> {
    let (m, n) = (inst.tenants(), inst.rooms());
    let mut out = Vec::with_capacity(m * (m + 1) / 2 * n);
    for i in 0..m {
        for j in i..m {
            for r in 0..n {
                let value = if i == j {
                    inst.value(i, i, r)
                } else {
                    inst.value(i, j, r) + inst.value(j, i, r)
                };
                out.push(CandidateTuple { i, j, r, value });
            }
        }
    }
    out
}

/// The tuples greedy selects, in selection order.
pub fn greedy_picks(inst: &Instance) -> Vec<CandidateTuple> {
    let tuples = candidate_tuples(inst);
    let mut alive = vec![true; tuples.len()];
    let mut people_left = inst.tenants();
    let mut rooms_left = inst.rooms();
    let mut picks = Vec::with_capacity(rooms_left);

    loop {
        if people_left == 2 * rooms_left {
            kill(&tuples, &mut alive, CandidateTuple::is_single);
        } else if people_left == rooms_left {
            kill(&tuples, &mut alive, |t| !t.is_single());
        }
        // strict > keeps the lexicographically first among equal values
        let mut best: Option<usize> = None;
        for (k, t) in tuples.iter().enumerate() {
            if alive[k] && best.is_none_or(|b| t.value > tuples[b].value) {
                best = Some(k);
            }
        }
        let Some(best) = best else { break };
        let pick = tuples[best];
        if pick.is_single() && people_left - 1 > 2 * (rooms_left - 1) {
            kill(&tuples, &mut alive, CandidateTuple::is_single);
            continue;
        }
        picks.push(pick);
        kill(&tuples, &mut alive, |t| t.touches(&pick));
        people_left -= if pick.is_single() { 1 } else { 2 };
        rooms_left -= 1;
    }
    picks
}

fn kill(tuples: &[CandidateTuple], alive: &mut [bool], pred: impl Fn(&CandidateTuple) -> bool) {
    for (k, t) in tuples.iter().enumerate() {
        if pred(t) {
            alive[k] = false;
        }
    }
}

/// Greedy assignment built from [`greedy_picks`], in canonical form.
pub fn greedy_assign(inst: &Instance) -> Result<Assignment> {
    let mut rooms = vec![Vec::new(); inst.rooms()];
    for t in greedy_picks(inst) {
        rooms[t.r].push(t.i);
        if !t.is_single() {
            rooms[t.r].push(t.j);
        }
    }
    let a = Assignment::from_room_occupants(&rooms);
    a.check(inst).map_err(|e| {
        Error::InvalidAssignment(format!("greedy produced an invalid assignment: {e}"))
    })?;
    Ok(a)
}

/// Keeps the rooming groups and re-assigns rooms to maximize total group
/// valuation. The current rooms are kept when they are already optimal.
pub fn rematch_rooms(inst: &Instance, a: &Assignment) -> Result<Assignment> {
    a.check(inst)?;
    let n = inst.rooms();
    let weights = a
        .groups
        .iter()
        .map(|g| {
            (0..n)
                .map(|r| group_value(inst, g, r))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let (perm, best) = max_weight_perfect_matching(&weights)?;
    let current: f64 = a
        .room_of_group
        .iter()
        .enumerate()
        .map(|(g, &r)| weights[g][r])
        .sum();
    let tol = 1e-9 * best.abs().max(1.0);
    let room_of_group = if current >= best - tol {
        a.room_of_group.clone()
    } else {
        perm
    };
    Ok(Assignment::new(a.groups.clone(), room_of_group))
}

/// Greedy followed by room re-matching.
pub fn greedy_matching_assign(inst: &Instance) -> Result<Assignment> {
    rematch_rooms(inst, &greedy_assign(inst)?)
}
