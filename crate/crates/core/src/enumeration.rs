//! Exhaustive enumeration of assignments and closed-form counts.
//!
//! Enumeration order: take the lowest unhoused tenant `t`; try `t` alone,
//! then `t` with each later unhoused tenant in ascending order; for each
//! choice try the free rooms in ascending order. Every room-occupancy map is
//! produced exactly once, in canonical form.

use num_bigint::BigUint;

use crate::assignment::Assignment;
use crate::error::{Error, Result};
use crate::evaluate::social_welfare;
use crate::instance::Instance;

pub const DEFAULT_ENUMERATION_CAP: u64 = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct EnumerationMode {
    /// Also yield assignments that leave rooms unoccupied.
    pub allow_empty_rooms: bool,
}

impl EnumerationMode {
    pub const NO_EMPTY: Self = Self {
        allow_empty_rooms: false,
    };
    pub const ALLOW_EMPTY: Self = Self {
        allow_empty_rooms: true,
    };
}

type Choice = (Option<usize>, usize);

struct Frame {
    options: Vec<Choice>,
    next: usize,
    tenant: usize,
    applied: Option<Choice>,
}

/// Lazy depth-first iterator over assignments. See [`enumerate_assignments`].
pub struct Assignments {
    m: usize,
    n: usize,
    allow_empty: bool,
    rooms: Vec<Vec<usize>>,
    housed: Vec<bool>,
    unhoused: usize,
    free_rooms: usize,
    stack: Vec<Frame>,
    started: bool,
}

impl Assignments {
    fn new(m: usize, n: usize, mode: EnumerationMode) -> Self {
        Self {
            m,
            n,
            allow_empty: mode.allow_empty_rooms,
            rooms: vec![Vec::new(); n],
            housed: vec![false; m],
            unhoused: m,
            free_rooms: n,
            stack: Vec::new(),
            started: false,
        }
    }

    fn feasible_after(&self, people: usize) -> bool {
        let m = self.unhoused - people;
        let n = self.free_rooms - 1;
        m <= 2 * n && (self.allow_empty || m >= n)
    }

    fn frame_for_lowest(&self) -> Option<Frame> {
        let tenant = self.housed.iter().position(|h| !h)?;
        let free: Vec<usize> = (0..self.n).filter(|&r| self.rooms[r].is_empty()).collect();
        let mut options = Vec::new();
        if self.feasible_after(1) {
            options.extend(free.iter().map(|&r| (None, r)));
        }
        if self.unhoused >= 2 && self.feasible_after(2) {
            for u in (tenant + 1..self.m).filter(|&u| !self.housed[u]) {
                options.extend(free.iter().map(|&r| (Some(u), r)));
            }
        }
        Some(Frame {
            options,
            next: 0,
            tenant,
            applied: None,
        })
    }

    fn apply(&mut self, tenant: usize, (partner, room): Choice, on: bool) {
        self.housed[tenant] = on;
        if let Some(u) = partner {
            self.housed[u] = on;
        }
        let people = 1 + usize::from(partner.is_some());
        if on {
            self.rooms[room].push(tenant);
            self.rooms[room].extend(partner);
            self.unhoused -= people;
            self.free_rooms -= 1;
        } else {
            self.rooms[room].clear();
            self.unhoused += people;
            self.free_rooms += 1;
        }
    }
}

impl Iterator for Assignments {
    type Item = Assignment;

    fn next(&mut self) -> Option<Assignment> {
        if !self.started {
            self.started = true;
            let root = self.frame_for_lowest()?;
            self.stack.push(root);
        }
        loop {
            let top = self.stack.last_mut()?;
            let tenant = top.tenant;
            if let Some(choice) = top.applied.take() {
                self.apply(tenant, choice, false);
            }
            let top = self.stack.last_mut()?;
            if top.next == top.options.len() {
                self.stack.pop();
                continue;
            }
            let choice = top.options[top.next];
            top.next += 1;
            top.applied = Some(choice);
            self.apply(tenant, choice, true);
            match self.frame_for_lowest() {
                Some(frame) => self.stack.push(frame),
                None => return Some(Assignment::from_room_occupants(&self.rooms)),
            }
        }
    }
}

/// Every valid assignment of `inst`'s tenants, each exactly once, in the
/// order described in the module docs.
pub fn enumerate_assignments(inst: &Instance, mode: EnumerationMode) -> Assignments {
    Assignments::new(inst.tenants(), inst.rooms(), mode)
}

/// Same as [`enumerate_assignments`] but by shape only.
pub fn enumerate_shape(m: usize, n: usize, mode: EnumerationMode) -> Assignments {
    Assignments::new(m, n, mode)
}

fn factorial(k: usize) -> BigUint {
    (1..=k).fold(BigUint::from(1u32), |acc, x| acc * x)
}

fn check_shape(m: usize, n: usize) -> Result<()> {
    if n == 0 || m < n || m > 2 * n {
        return Err(Error::InvalidAssignment(format!(
            "(m, n) = ({m}, {n}) outside n <= m <= 2n"
        )));
    }
    Ok(())
}

/// Number of assignments with every room occupied:
/// `C(m, 2n-m) * (2m-2n)! * n! / ((m-n)! * 2^(m-n))`.
pub fn count_assignments(m: usize, n: usize) -> Result<BigUint> {
    check_shape(m, n)?;
    let singles = 2 * n - m;
    let doubles = m - n;
    let choose = factorial(m) / (factorial(singles) * factorial(m - singles));
    let pairings = factorial(2 * doubles) / (factorial(doubles) << doubles);
    Ok(choose * pairings * factorial(n))
}

/// Number of assignments when rooms may be left empty: sum over the number
/// of pairs `d` of (ways to pick and pair `2d` tenants) times (ways to place
/// the `m - d` groups into distinct rooms).
pub fn count_assignments_allowing_empty(m: usize, n: usize) -> Result<BigUint> {
    check_shape(m, n)?;
    let mut total = BigUint::from(0u32);
    for d in (m - n)..=(m / 2) {
        let groups = m - d;
        let choose = factorial(m) / (factorial(2 * d) * factorial(m - 2 * d));
        let pairings = factorial(2 * d) / (factorial(d) << d);
        let placements = factorial(n) / factorial(n - groups);
        total += choose * pairings * placements;
    }
    Ok(total)
}

pub fn count_for_mode(m: usize, n: usize, mode: EnumerationMode) -> Result<BigUint> {
    if mode.allow_empty_rooms {
        count_assignments_allowing_empty(m, n)
    } else {
        count_assignments(m, n)
    }
}

/// Best assignment by exhaustive search. Ties go to the first assignment in
/// enumeration order.
pub fn brute_force_max_welfare(
    inst: &Instance,
    mode: EnumerationMode,
    cap: u64,
) -> Result<(Assignment, f64)> {
    let count = count_for_mode(inst.tenants(), inst.rooms(), mode)?;
    if count > BigUint::from(cap) {
        return Err(Error::EnumerationCap {
            count: count.to_string(),
            cap,
        });
    }
    let mut best: Option<(Assignment, f64)> = None;
    for a in enumerate_assignments(inst, mode) {
        let w = social_welfare(inst, &a)?;
        if best.as_ref().is_none_or(|(_, bw)| w > *bw) {
            best = Some((a, w));
        }
    }
    best.ok_or_else(|| Error::InvalidAssignment("no assignment exists".into()))
}
