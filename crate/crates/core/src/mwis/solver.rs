//! Exact maximum-weight independent set by branch and bound.
//!
//! Vertices with positive weight are searched in weight-descending order
//! (ties by index). Each node branches on its heaviest remaining vertex:
//! include it, then exclude it. The upper bound is a Lagrangian relaxation
//! of the clique constraints: the graph's clique partition is solved exactly
//! (best reduced weight per part) while the extra cover cliques are priced
//! with multipliers tuned by a few projected subgradient steps per node,
//! warm-started from the parent. Any multiplier vector gives a valid bound.

use std::time::Instant;

use super::bitset::BitSet;
use super::graph::MwisGraph;
use crate::error::{Error, Result};

/// Subgradient steps per node.
const BOUND_ITERATIONS: usize = 12;

#[derive(Debug, Clone, PartialEq)]
pub struct MwisSolution {
    /// Vertex indices of the independent set, ascending.
    pub vertices: Vec<usize>,
    pub weight: f64,
    /// Branch-and-bound nodes visited.
    pub nodes: u64,
}

struct Search {
    weight: Vec<f64>,
    original: Vec<usize>,
    closed_nbhd: Vec<BitSet>,
    part_of: Vec<usize>,
    covers_of: Vec<Vec<usize>>,
    covers: usize,
    best_weight: f64,
    best: Vec<usize>,
    chosen: Vec<usize>,
    nodes: u64,
    deadline: Option<Instant>,
    timed_out: bool,
    // scratch
    part_best: Vec<(f64, usize)>,
    active: Vec<bool>,
    grad: Vec<f64>,
}

impl Search {
    fn new(g: &MwisGraph, deadline: Option<Instant>) -> Self {
        let mut original: Vec<usize> = (0..g.len()).filter(|&k| g.vertex(k).weight > 0.0).collect();
        original.sort_by(|&a, &b| {
            g.vertex(b)
                .weight
                .total_cmp(&g.vertex(a).weight)
                .then(a.cmp(&b))
        });
        let size = original.len();
        let mut internal = vec![usize::MAX; g.len()];
        for (k, &v) in original.iter().enumerate() {
            internal[v] = k;
        }
        let weight = original.iter().map(|&v| g.vertex(v).weight).collect();
        let closed_nbhd = original
            .iter()
            .enumerate()
            .map(|(k, &v)| {
                let mut s = BitSet::new(size);
                s.insert(k);
                for u in g.neighbors(v) {
                    if internal[u] != usize::MAX {
                        s.insert(internal[u]);
                    }
                }
                s
            })
            .collect();
        let mut part_of = vec![0; size];
        for (p, part) in g.partition.iter().enumerate() {
            for &v in part {
                if internal[v] != usize::MAX {
                    part_of[internal[v]] = p;
                }
            }
        }
        let mut covers_of = vec![Vec::new(); size];
        for (c, clique) in g.cover.iter().enumerate() {
            for &v in clique {
                if internal[v] != usize::MAX {
                    covers_of[internal[v]].push(c);
                }
            }
        }
        Self {
            weight,
            original,
            closed_nbhd,
            part_of,
            covers_of,
            covers: g.cover.len(),
            best_weight: 0.0,
            best: Vec::new(),
            chosen: Vec::new(),
            nodes: 0,
            deadline,
            timed_out: false,
            part_best: vec![(0.0, usize::MAX); g.partition.len()],
            active: vec![false; g.cover.len()],
            grad: vec![0.0; g.cover.len()],
        }
    }

    fn seed_incumbent(&mut self) {
        let mut cand = BitSet::full(self.weight.len());
        let mut total = 0.0;
        let mut set = Vec::new();
        while let Some(v) = cand.first() {
            total += self.weight[v];
            set.push(v);
            cand.difference_with(&self.closed_nbhd[v]);
        }
        self.best_weight = total;
        self.best = set;
    }

    fn slack(&self) -> f64 {
        1e-12 * (1.0 + self.best_weight.abs())
    }

    /// Upper bound on the weight addable from `cand`. Returns early once the
    /// bound drops to `target` or below.
    fn bound(&mut self, cand: &BitSet, lambda: &mut [f64], target: f64) -> f64 {
        self.active.iter_mut().for_each(|a| *a = false);
        for v in cand.iter() {
            for &c in &self.covers_of[v] {
                self.active[c] = true;
            }
        }
        for (l, &a) in lambda.iter_mut().zip(&self.active) {
            if !a {
                *l = 0.0;
            }
        }
        let slack = self.slack();
        let mut best_bound = f64::INFINITY;
        let mut theta = 1.0;
        for _ in 0..BOUND_ITERATIONS.max(1) {
            self.part_best
                .iter_mut()
                .for_each(|p| *p = (0.0, usize::MAX));
            for v in cand.iter() {
                let reduced =
                    self.weight[v] - self.covers_of[v].iter().map(|&c| lambda[c]).sum::<f64>();
                let slot = &mut self.part_best[self.part_of[v]];
                if reduced > slot.0 {
                    *slot = (reduced, v);
                }
            }
            let value: f64 =
                lambda.iter().sum::<f64>() + self.part_best.iter().map(|p| p.0).sum::<f64>();
            if value < best_bound {
                best_bound = value;
            } else {
                theta *= 0.5;
            }
            if best_bound <= target + slack || self.covers == 0 {
                break;
            }
            for (g, &a) in self.grad.iter_mut().zip(&self.active) {
                *g = if a { 1.0 } else { 0.0 };
            }
            for &(_, v) in &self.part_best {
                if v != usize::MAX {
                    for &c in &self.covers_of[v] {
                        self.grad[c] -= 1.0;
                    }
                }
            }
            let mut norm = 0.0;
            for (g, &l) in self.grad.iter_mut().zip(lambda.iter()) {
                // projected: cannot lower a multiplier already at zero
                if l <= 0.0 && *g > 0.0 {
                    *g = 0.0;
                }
                norm += *g * *g;
            }
            if norm == 0.0 {
                break;
            }
            let step = theta * (value - target).max(slack) / norm;
            for (l, &g) in lambda.iter_mut().zip(&self.grad) {
                *l = (*l - step * g).max(0.0);
            }
        }
        best_bound
    }

    fn out_of_time(&mut self) -> bool {
        if self.timed_out {
            return true;
        }
        if self.nodes % 1024 == 1 {
            if let Some(d) = self.deadline {
                self.timed_out = Instant::now() >= d;
            }
        }
        self.timed_out
    }

    fn search(&mut self, mut cand: BitSet, current: f64, mut lambda: Vec<f64>) {
        if current > self.best_weight {
            self.best_weight = current;
            self.best = self.chosen.clone();
        }
        loop {
            self.nodes += 1;
            if self.out_of_time() {
                return;
            }
            let Some(v) = cand.first() else { return };
            let target = self.best_weight - current;
            if self.bound(&cand, &mut lambda, target) <= target + self.slack() {
                return;
            }
            let mut with_v = cand.clone();
            with_v.difference_with(&self.closed_nbhd[v]);
            self.chosen.push(v);
            self.search(with_v, current + self.weight[v], lambda.clone());
            self.chosen.pop();
            cand.remove(v);
        }
    }
}

/// Maximum-weight independent set. Zero-weight vertices are never chosen.
pub fn solve_mwis_exact(g: &MwisGraph) -> MwisSolution {
    solve_mwis_with_deadline(g, None).expect("no deadline was set")
}

/// As [`solve_mwis_exact`], giving up with [`Error::Timeout`] at `deadline`.
pub fn solve_mwis_with_deadline(g: &MwisGraph, deadline: Option<Instant>) -> Result<MwisSolution> {
    let started = Instant::now();
    let mut s = Search::new(g, deadline);
    s.seed_incumbent();
    let cand = BitSet::full(s.weight.len());
    let lambda = vec![0.0; s.covers];
    s.search(cand, 0.0, lambda);
    if s.timed_out {
        return Err(Error::Timeout(started.elapsed().as_secs_f64()));
    }
    let mut vertices: Vec<usize> = s.best.iter().map(|&k| s.original[k]).collect();
    vertices.sort_unstable();
    let weight = g.weight_of(&vertices);
    Ok(MwisSolution {
        vertices,
        weight,
        nodes: s.nodes,
    })
}

/// Adds vertices (in index order) until the set is maximal. Applied to an
/// optimum this only adds zero-weight vertices.
pub fn extend_to_maximal(g: &MwisGraph, set: &[usize]) -> Vec<usize> {
    let mut blocked = BitSet::new(g.len());
    let mut out = set.to_vec();
    for &v in set {
        blocked.insert(v);
        for u in g.neighbors(v) {
            blocked.insert(u);
        }
    }
    for v in 0..g.len() {
        if !blocked.contains(v) {
            out.push(v);
            blocked.insert(v);
            for u in g.neighbors(v) {
                blocked.insert(u);
            }
        }
    }
    out.sort_unstable();
    out
}
