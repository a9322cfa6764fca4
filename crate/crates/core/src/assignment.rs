use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::Instance;

/// Rooming groups plus the permutation sending group `g` to room
/// `room_of_group[g]`. Groups hold 0, 1 or 2 tenant ids.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Assignment {
    pub groups: Vec<Vec<usize>>,
    pub room_of_group: Vec<usize>,
}

/// Where a tenant ended up.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Placement {
    pub group: usize,
    pub room: usize,
    pub roommate: Option<usize>,
}

impl Assignment {
    pub fn new(groups: Vec<Vec<usize>>, room_of_group: Vec<usize>) -> Self {
        Self {
            groups,
            room_of_group,
        }
    }

    /// Builds the canonical assignment whose room `r` holds `occupants[r]`.
    pub fn from_room_occupants(occupants: &[Vec<usize>]) -> Self {
        let groups = occupants.to_vec();
        let room_of_group = (0..occupants.len()).collect();
        Self {
            groups,
            room_of_group,
        }
        .canonical()
    }

    /// Occupants of each room, indexed by room id. Requires a valid assignment.
    pub fn room_occupants(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.groups.len()];
        for (g, &r) in self.room_of_group.iter().enumerate() {
            let mut members = self.groups[g].clone();
            members.sort_unstable();
            out[r] = members;
        }
        out
    }

    /// Canonical form: members sorted, non-empty groups ordered by smallest
    /// member, empty groups last in order of their rooms.
    pub fn canonical(&self) -> Self {
        let mut pairs: Vec<(Vec<usize>, usize)> = self
            .groups
            .iter()
            .zip(&self.room_of_group)
            .map(|(g, &r)| {
                let mut g = g.clone();
                g.sort_unstable();
                (g, r)
            })
            .collect();
        pairs.sort_by_key(|(g, r)| match g.first() {
            Some(&first) => (0, first),
            None => (1, *r),
        });
        let (groups, room_of_group) = pairs.into_iter().unzip();
        Self {
            groups,
            room_of_group,
        }
    }

    /// Validates against `inst` and describes the first problem found.
    pub fn check(&self, inst: &Instance) -> Result<()> {
        let (m, n) = (inst.tenants(), inst.rooms());
        let bad = |msg: String| Err(Error::InvalidAssignment(msg));
        if self.groups.len() != n {
            return bad(format!("{} groups for {n} rooms", self.groups.len()));
        }
        if self.room_of_group.len() != n {
            return bad(format!(
                "room map has {} entries for {n} rooms",
                self.room_of_group.len()
            ));
        }
        let mut room_used = vec![false; n];
        for &r in &self.room_of_group {
            if r >= n {
                return bad(format!("room {r} out of range"));
            }
            if std::mem::replace(&mut room_used[r], true) {
                return bad(format!("room {r} assigned to two groups"));
            }
        }
        let mut seen = vec![false; m];
        for (g, members) in self.groups.iter().enumerate() {
            if members.len() > 2 {
                return bad(format!("group {g} has {} members", members.len()));
            }
            for &t in members {
                if t >= m {
                    return bad(format!("tenant {t} out of range"));
                }
                if std::mem::replace(&mut seen[t], true) {
                    return bad(format!("tenant {t} appears twice"));
                }
            }
        }
        if let Some(t) = seen.iter().position(|s| !s) {
            return bad(format!("tenant {t} is not housed"));
        }
        Ok(())
    }

    /// Per-tenant placement, indexed by tenant id. Validates first.
    pub fn placements(&self, inst: &Instance) -> Result<Vec<Placement>> {
        self.check(inst)?;
        let mut out = vec![
            Placement {
                group: 0,
                room: 0,
                roommate: None
            };
            inst.tenants()
        ];
        for (g, members) in self.groups.iter().enumerate() {
            let room = self.room_of_group[g];
            for &t in members {
                let roommate = members.iter().copied().find(|&o| o != t);
                out[t] = Placement {
                    group: g,
                    room,
                    roommate,
                };
            }
        }
        Ok(out)
    }

    pub fn has_empty_room(&self) -> bool {
        self.groups.iter().any(Vec::is_empty)
    }
}

/// True iff `a` partitions the tenants of `inst` into at most-2 groups and
/// maps groups to rooms bijectively.
pub fn assignment_valid(inst: &Instance, a: &Assignment) -> bool {
    a.check(inst).is_ok()
}
