//! Minimum-weight perfect matching of detection events.
//!
//! Pairwise distances come from one bounded Dijkstra search per defect. A
//! defect pair is only kept when it is strictly cheaper than sending both to
//! the boundary, which never changes the optimum. Each defect gets a private
//! boundary copy, and copies of kept pairs are joined at zero cost so that a
//! perfect matching always exists.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use super::blossom::max_weight_matching;
use super::graph::{DecodingGraph, INF};
use crate::error::{Error, Result};
use crate::unionfind::UnionFind;

const NO_EDGE: u32 = u32::MAX;

#[derive(Debug, Clone)]
pub struct MatchingGraph {
    /// Decoding-graph nodes of the defects.
    pub defects: Vec<usize>,
    /// `(i, j, weight)` over defect positions with `i < j`.
    pub pairs: Vec<(usize, usize, i64)>,
    pub boundary: Vec<Option<i64>>,
    // Per defect, the nodes reached by its search with their parent edges.
    trees: Vec<Vec<(u32, u32)>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Match {
    Pair(usize, usize),
    Boundary(usize),
}

/// Data qubits to flip, as sorted site indices.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Correction {
    pub flips: Vec<usize>,
}

/// Reusable search buffers.
#[derive(Debug, Clone, Default)]
struct Scratch {
    dist: Vec<i64>,
    parent: Vec<u32>,
    stamp: Vec<u32>,
    epoch: u32,
}

impl Scratch {
    fn reset(&mut self, n: usize) {
        if self.stamp.len() != n {
            self.dist = vec![INF; n];
            self.parent = vec![NO_EDGE; n];
            self.stamp = vec![0; n];
            self.epoch = 0;
        }
        self.epoch = self.epoch.wrapping_add(1);
        if self.epoch == 0 {
            self.stamp.fill(0);
            self.epoch = 1;
        }
    }

    fn get(&self, v: usize) -> i64 {
        if self.stamp[v] == self.epoch {
            self.dist[v]
        } else {
            INF
        }
    }

    fn set(&mut self, v: usize, d: i64, parent: u32) {
        self.stamp[v] = self.epoch;
        self.dist[v] = d;
        self.parent[v] = parent;
    }
}

impl DecodingGraph {
    /// Maps `(group, round)` defects onto detector nodes.
    pub fn defect_nodes(&self, defects: &crate::syndrome::DefectSet) -> Result<Vec<usize>> {
        defects
            .defects
            .iter()
            .map(|d| {
                self.detectors
                    .id(d.group, d.round)
                    .ok_or_else(|| Error::Internal(format!("no detector for group {} in round {}", d.group, d.round)))
            })
            .collect()
    }

    pub fn matching_graph(&self, defects: &[usize]) -> MatchingGraph {
        let n = self.num_nodes();
        let k = defects.len();
        let mut position = vec![u32::MAX; n];
        for (i, &d) in defects.iter().enumerate() {
            position[d] = i as u32;
        }
        let bd = &self.boundary_dist;
        let mut scratch = Scratch::default();
        let mut pairs = Vec::new();
        let mut trees = Vec::with_capacity(k);
        let mut heap = BinaryHeap::new();
        for (i, &src) in defects.iter().enumerate() {
            scratch.reset(n);
            let mut tree = Vec::new();
            scratch.set(src, 0, NO_EDGE);
            heap.push(Reverse((0i64, src as u32)));
            while let Some(Reverse((d, x))) = heap.pop() {
                let x = x as usize;
                if d > scratch.get(x) {
                    continue;
                }
                tree.push((x as u32, scratch.parent[x]));
                if self.is_boundary(x) {
                    continue;
                }
                let limit = bd[src].saturating_add(bd[x]);
                if x != src {
                    let j = position[x];
                    if j != u32::MAX && (j as usize) > i && d < limit {
                        pairs.push((i, j as usize, d));
                    }
                    // Nothing beyond x can beat both ends going to the boundary.
                    if d >= limit {
                        continue;
                    }
                }
                for &(y, e) in self.neighbours(x) {
                    let y = y as usize;
                    let nd = d + self.edges[e as usize].weight;
                    if nd < scratch.get(y) {
                        scratch.set(y, nd, e);
                        heap.push(Reverse((nd, y as u32)));
                    }
                }
            }
            trees.push(tree);
        }
        pairs.sort_unstable();
        MatchingGraph {
            defects: defects.to_vec(),
            pairs,
            boundary: defects.iter().map(|&d| self.boundary_distance(d)).collect(),
            trees,
        }
    }

    /// Flips along the matched paths.
    pub fn correction(&self, graph: &MatchingGraph, pairing: &[Match]) -> Result<Correction> {
        let mut flipped = Vec::new();
        let mut parent = vec![NO_EDGE; self.num_nodes()];
        let flip_edge = |e: usize, flipped: &mut Vec<usize>| {
            flipped.extend_from_slice(&self.edges[e].flips);
        };
        for m in pairing {
            match *m {
                Match::Pair(i, j) => {
                    for &(v, p) in &graph.trees[i] {
                        parent[v as usize] = p;
                    }
                    let src = graph.defects[i];
                    let mut at = graph.defects[j];
                    while at != src {
                        let e = parent[at];
                        if e == NO_EDGE {
                            return Err(Error::Decoder("matched pair has no connecting path".into()));
                        }
                        flip_edge(e as usize, &mut flipped);
                        let edge = &self.edges[e as usize];
                        at = if edge.a == at { edge.b } else { edge.a };
                    }
                    for &(v, _) in &graph.trees[i] {
                        parent[v as usize] = NO_EDGE;
                    }
                }
                Match::Boundary(i) => {
                    let mut at = graph.defects[i];
                    while !self.is_boundary(at) {
                        let e = self.boundary_parent[at];
                        if e == NO_EDGE {
                            return Err(Error::Decoder("defect cannot reach a boundary".into()));
                        }
                        flip_edge(e as usize, &mut flipped);
                        let edge = &self.edges[e as usize];
                        at = if edge.a == at { edge.b } else { edge.a };
                    }
                }
            }
        }
        flipped.sort_unstable();
        let mut flips = Vec::new();
        for chunk in flipped.chunk_by(|a, b| a == b) {
            if chunk.len() % 2 == 1 {
                flips.push(chunk[0]);
            }
        }
        Ok(Correction { flips })
    }

    /// Full decode of a list of defect nodes.
    pub fn decode(&self, defects: &[usize]) -> Result<Correction> {
        if defects.is_empty() {
            return Ok(Correction::default());
        }
        let mg = self.matching_graph(defects);
        let pairing = mwpm(&mg)?;
        self.correction(&mg, &pairing)
    }
}

impl MatchingGraph {
    /// A graph given directly by its weights, for matching without a decoding graph.
    /// Defect `i` is node `i`. Pairs with `i >= j` are rejected.
    pub fn from_weights(pairs: Vec<(usize, usize, i64)>, boundary: Vec<Option<i64>>) -> Result<Self> {
        let k = boundary.len();
        if let Some(p) = pairs.iter().find(|p| p.0 >= p.1 || p.1 >= k || p.2 < 0) {
            return Err(Error::InvalidParameter(format!("bad pair {p:?} for {k} defects")));
        }
        let mut pairs = pairs;
        pairs.sort_unstable();
        Ok(MatchingGraph { defects: (0..k).collect(), pairs, boundary, trees: vec![Vec::new(); k] })
    }

    pub fn total_weight(&self, pairing: &[Match]) -> i64 {
        pairing
            .iter()
            .map(|m| match *m {
                Match::Pair(i, j) => {
                    let (i, j) = (i.min(j), i.max(j));
                    self.pairs.iter().find(|p| p.0 == i && p.1 == j).map_or(INF, |p| p.2)
                }
                Match::Boundary(i) => self.boundary[i].unwrap_or(INF),
            })
            .sum()
    }
}

/// Minimum-weight pairing of the defects with each other or the boundary.
///
/// Defects only interact through kept pairs, so each connected component of
/// the pair graph is matched on its own.
pub fn mwpm(g: &MatchingGraph) -> Result<Vec<Match>> {
    let k = g.defects.len();
    let mut uf = UnionFind::new(k);
    for &(i, j, _) in &g.pairs {
        uf.union(i, j);
    }
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); k];
    for i in 0..k {
        members[uf.find(i)].push(i);
    }
    let mut pairs_of: Vec<Vec<(usize, usize, i64)>> = vec![Vec::new(); k];
    for &(i, j, w) in &g.pairs {
        pairs_of[uf.find(i)].push((i, j, w));
    }
    let mut local = vec![0usize; k];
    let mut out = Vec::with_capacity(k);
    for root in 0..k {
        let comp = &members[root];
        match comp.len() {
            0 => continue,
            1 => match g.boundary[comp[0]] {
                Some(_) => out.push(Match::Boundary(comp[0])),
                None => return Err(Error::Decoder(format!("defect {} left unmatched", comp[0]))),
            },
            _ => {
                for (a, &i) in comp.iter().enumerate() {
                    local[i] = a;
                }
                match_component(g, comp, &pairs_of[root], &local, &mut out)?;
            }
        }
    }
    out.sort_unstable_by_key(|m| match *m {
        Match::Pair(i, _) | Match::Boundary(i) => i,
    });
    Ok(out)
}

fn match_component(
    g: &MatchingGraph,
    comp: &[usize],
    pairs: &[(usize, usize, i64)],
    local: &[usize],
    out: &mut Vec<Match>,
) -> Result<()> {
    let k = comp.len();
    let mut edges: Vec<(usize, usize, i64)> = Vec::with_capacity(2 * pairs.len() + k);
    for &(i, j, w) in pairs {
        let (a, b) = (local[i], local[j]);
        edges.push((a, b, w));
        edges.push((k + a, k + b, 0));
    }
    for (a, &i) in comp.iter().enumerate() {
        if let Some(w) = g.boundary[i] {
            edges.push((a, k + a, w));
        }
    }
    let big = edges.iter().map(|e| e.2).max().unwrap_or(0) + 1;
    let flipped: Vec<_> = edges.iter().map(|&(i, j, w)| (i, j, big - w)).collect();
    let mate = max_weight_matching(2 * k, &flipped, true);
    for a in 0..k {
        match mate[a] {
            Some(m) if m == k + a => out.push(Match::Boundary(comp[a])),
            Some(m) if m < k => {
                if a < m {
                    out.push(Match::Pair(comp[a], comp[m]));
                }
            }
            _ => return Err(Error::Decoder(format!("defect {} left unmatched", comp[a]))),
        }
    }
    Ok(())
}
