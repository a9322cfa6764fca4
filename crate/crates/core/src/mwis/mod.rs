//! Welfare maximization as maximum-weight independent set.
//!
//! Vertices are `(i, j, r)` triples over `2n` people (real tenants padded
//! with ghosts), weighted by the pair's joint valuation of room `r`, with
//! edges between triples that share a person or a room. A maximal
//! independent set has exactly `n` vertices and reads back as an assignment:
//! real pairs share, real-ghost pairs are singles, ghost pairs are empty rooms.

mod bitset;
mod graph;
mod solver;

use std::time::Instant;

pub use graph::{
    build_graph, check_claw_free, ClawCheck, GhostExtension, GraphDump, MwisGraph, MwisVertex,
};
pub use solver::{extend_to_maximal, solve_mwis_exact, solve_mwis_with_deadline, MwisSolution};

use crate::assignment::Assignment;
use crate::error::{Error, Result};
use crate::instance::Instance;

/// Reads a (maximal) independent set back as an assignment in canonical
/// form. Rooms no chosen vertex covers stay empty.
pub fn decode_assignment(
    inst: &Instance,
    ext: &GhostExtension,
    chosen: &[MwisVertex],
) -> Result<Assignment> {
    let n = inst.rooms();
    for (a, u) in chosen.iter().enumerate() {
        if u.r >= n || u.i >= ext.extended_m || u.j >= ext.extended_m || u.i == u.j {
            return Err(Error::NotDecodable(format!(
                "vertex {u:?} is not a triple of this instance"
            )));
        }
        if let Some(v) = chosen[a + 1..].iter().find(|v| u.conflicts(v)) {
            return Err(Error::NotDecodable(format!("{u:?} conflicts with {v:?}")));
        }
    }
    let mut rooms = vec![Vec::new(); n];
    for v in chosen {
        rooms[v.r] = [v.i, v.j]
            .into_iter()
            .filter(|&p| !ext.is_ghost(p))
            .collect();
    }
    let a = Assignment::from_room_occupants(&rooms);
    a.check(inst)
        .map_err(|e| Error::NotDecodable(e.to_string()))?;
    Ok(a)
}

/// Diagnostics from one [`mwis_assign_with_deadline`] run.
#[derive(Debug, Clone, PartialEq)]
pub struct MwisRun {
    pub assignment: Assignment,
    /// Weight of the independent set, equal to the raw valuation sum.
    pub weight: f64,
    /// Size of the set after extension to a maximal one (always `n`).
    pub set_size: usize,
    pub nodes: u64,
}

pub fn mwis_assign_with_deadline(inst: &Instance, deadline: Option<Instant>) -> Result<MwisRun> {
    let (g, ext) = build_graph(inst);
    let sol = solve_mwis_with_deadline(&g, deadline)?;
    let maximal = extend_to_maximal(&g, &sol.vertices);
    let chosen: Vec<MwisVertex> = maximal.iter().map(|&k| *g.vertex(k)).collect();
    let assignment = decode_assignment(inst, &ext, &chosen)?;
    Ok(MwisRun {
        assignment,
        weight: sol.weight,
        set_size: maximal.len(),
        nodes: sol.nodes,
    })
}

/// Welfare-maximizing assignment via the independent-set reduction.
pub fn mwis_assign(inst: &Instance) -> Result<Assignment> {
    Ok(mwis_assign_with_deadline(inst, None)?.assignment)
}
