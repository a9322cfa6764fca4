use serde::{Deserialize, Serialize};

use super::bitset::BitSet;
use crate::instance::Instance;

/// Vertex `(i, j, r)`: people `i < j` (real or ghost) sharing room `r`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MwisVertex {
    pub i: usize,
    pub j: usize,
    pub r: usize,
    #[serde(rename = "w")]
    pub weight: f64,
}

impl MwisVertex {
    /// Two vertices conflict when they share a person or a room.
    pub fn conflicts(&self, other: &MwisVertex) -> bool {
        self.r == other.r
            || self.i == other.i
            || self.i == other.j
            || self.j == other.i
            || self.j == other.j
    }
}

/// Vertex-weighted graph with known clique structure.
///
/// `partition` splits the vertex set into cliques; `cover` lists further
/// cliques. The exact solver uses both for its upper bound.
#[derive(Debug, Clone)]
pub struct MwisGraph {
    vertices: Vec<MwisVertex>,
    adjacency: Vec<BitSet>,
    pub(crate) partition: Vec<Vec<usize>>,
    pub(crate) cover: Vec<Vec<usize>>,
}

impl MwisGraph {
    /// Graph with explicit edges. Self-loops are ignored.
    pub fn from_edges(vertices: Vec<MwisVertex>, edges: &[(usize, usize)]) -> Self {
        let n = vertices.len();
        let mut adjacency = vec![BitSet::new(n); n];
        for &(u, v) in edges {
            assert!(u < n && v < n, "edge ({u}, {v}) out of range");
            if u != v {
                adjacency[u].insert(v);
                adjacency[v].insert(u);
            }
        }
        let partition = greedy_clique_partition(&adjacency);
        Self {
            vertices,
            adjacency,
            partition,
            cover: Vec::new(),
        }
    }

    /// Graph whose edges join vertices sharing a person or room.
    pub fn from_conflicts(vertices: Vec<MwisVertex>) -> Self {
        let mut edges = Vec::new();
        for u in 0..vertices.len() {
            for v in u + 1..vertices.len() {
                if vertices[u].conflicts(&vertices[v]) {
                    edges.push((u, v));
                }
            }
        }
        Self::from_edges(vertices, &edges)
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn vertices(&self) -> &[MwisVertex] {
        &self.vertices
    }

    pub fn vertex(&self, k: usize) -> &MwisVertex {
        &self.vertices[k]
    }

    pub fn adjacent(&self, u: usize, v: usize) -> bool {
        self.adjacency[u].contains(v)
    }

    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.adjacency[v].iter()
    }

    pub(crate) fn neighbor_set(&self, v: usize) -> &BitSet {
        &self.adjacency[v]
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        (0..self.len())
            .flat_map(|u| {
                self.neighbors(u)
                    .filter(move |&v| v > u)
                    .map(move |v| (u, v))
            })
            .collect()
    }

    pub fn is_independent(&self, set: &[usize]) -> bool {
        set.iter()
            .enumerate()
            .all(|(a, &u)| set[a + 1..].iter().all(|&v| u != v && !self.adjacent(u, v)))
    }

    pub fn weight_of(&self, set: &[usize]) -> f64 {
        set.iter().map(|&k| self.vertices[k].weight).sum()
    }

    /// Diagnostic dump: `{"vertices": [{"i","j","r","w"}], "edges": [[u, v]]}`.
    pub fn dump(&self) -> GraphDump {
        GraphDump {
            vertices: self.vertices.clone(),
            edges: self.edges(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphDump {
    pub vertices: Vec<MwisVertex>,
    pub edges: Vec<(usize, usize)>,
}

fn greedy_clique_partition(adjacency: &[BitSet]) -> Vec<Vec<usize>> {
    let n = adjacency.len();
    let mut assigned = vec![false; n];
    let mut parts = Vec::new();
    for v in 0..n {
        if assigned[v] {
            continue;
        }
        let mut clique = vec![v];
        assigned[v] = true;
        for (u, taken) in assigned.iter_mut().enumerate().skip(v + 1) {
            if !*taken && clique.iter().all(|&c| adjacency[c].contains(u)) {
                clique.push(u);
                *taken = true;
            }
        }
        parts.push(clique);
    }
    parts
}

/// Pads an instance with ghost tenants up to `2n` people. Ghost-real pairs
/// carry half the real tenant's single valuation on each side, so the pair
/// is worth exactly the real tenant living alone; everything else involving
/// a ghost is worth 0.
#[derive(Debug, Clone, PartialEq)]
pub struct GhostExtension {
    pub real_tenants: usize,
    pub extended_m: usize,
    rooms: usize,
    values: Vec<f64>,
}

impl GhostExtension {
    pub fn new(inst: &Instance) -> Self {
        let (m, n) = (inst.tenants(), inst.rooms());
        let em = 2 * n;
        let mut values = vec![0.0; em * em * n];
        for i in 0..em {
            for j in 0..em {
                for r in 0..n {
                    values[(i * em + j) * n + r] = match (i < m, j < m) {
                        (true, true) => inst.value(i, j, r),
                        (true, false) => inst.value(i, i, r) / 2.0,
                        (false, true) => inst.value(j, j, r) / 2.0,
                        (false, false) => 0.0,
                    };
                }
            }
        }
        Self {
            real_tenants: m,
            extended_m: em,
            rooms: n,
            values,
        }
    }

    pub fn ghost_ids(&self) -> std::ops::Range<usize> {
        self.real_tenants..self.extended_m
    }

    pub fn is_ghost(&self, id: usize) -> bool {
        id >= self.real_tenants
    }

    pub fn value(&self, i: usize, j: usize, r: usize) -> f64 {
        self.values[(i * self.extended_m + j) * self.rooms + r]
    }
}

/// Conflict graph over all `(i, j, r)` with `i < j` among the `2n` (possibly
/// ghost-padded) people. Vertices are ordered by `(i, j, r)`.
pub fn build_graph(inst: &Instance) -> (MwisGraph, GhostExtension) {
    let ext = GhostExtension::new(inst);
    let (em, n) = (ext.extended_m, inst.rooms());
    let mut vertices = Vec::with_capacity(n * em * (em - 1) / 2);
    for i in 0..em {
        for j in i + 1..em {
            for r in 0..n {
                let weight = ext.value(i, j, r) + ext.value(j, i, r);
                vertices.push(MwisVertex { i, j, r, weight });
            }
        }
    }
    let count = vertices.len();
    let mut adjacency = vec![BitSet::new(count); count];
    let mut by_room = vec![Vec::new(); n];
    let mut by_person = vec![Vec::new(); em];
    for (k, v) in vertices.iter().enumerate() {
        by_room[v.r].push(k);
        by_person[v.i].push(k);
        by_person[v.j].push(k);
    }
    for group in by_room.iter().chain(&by_person) {
        for &u in group {
            for &v in group {
                if u != v {
                    adjacency[u].insert(v);
                }
            }
        }
    }
    let graph = MwisGraph {
        vertices,
        adjacency,
        partition: by_room,
        cover: by_person,
    };
    (graph, ext)
}

/// Result of a claw search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClawCheck {
    pub claw_free: bool,
    /// Center and `d` pairwise non-adjacent neighbours, when a claw exists.
    pub witness: Option<(usize, Vec<usize>)>,
}

/// Searches for an induced `d`-claw: a vertex with `d` pairwise
/// non-adjacent neighbours.
pub fn check_claw_free(g: &MwisGraph, d: usize) -> ClawCheck {
    fn extend(g: &MwisGraph, cands: &BitSet, chosen: &mut Vec<usize>, d: usize) -> bool {
        if chosen.len() == d {
            return true;
        }
        for u in cands.iter() {
            let mut next = cands.clone();
            next.difference_with(g.neighbor_set(u));
            // only consider later candidates to avoid revisiting permutations
            for w in cands.iter().take_while(|&w| w <= u) {
                next.remove(w);
            }
            chosen.push(u);
            if extend(g, &next, chosen, d) {
                return true;
            }
            chosen.pop();
        }
        false
    }

    for center in 0..g.len() {
        let mut talons = Vec::with_capacity(d);
        if extend(g, g.neighbor_set(center), &mut talons, d) {
            return ClawCheck {
                claw_free: false,
                witness: Some((center, talons)),
            };
        }
    }
    ClawCheck {
        claw_free: true,
        witness: None,
    }
}
