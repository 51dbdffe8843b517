//! Spacetime decoding graph for X errors, built from the circuit.
//!
//! Every fault location of every noisy round is propagated through the rest
//! of its round as an X frame. Its effect splits into elementary pieces: an X
//! on one data qubit after a given timestep, or a flipped plaquette-ancilla
//! measurement. Each piece fires at most two detectors, so a fault whose
//! combined footprint is not graph-like is split into its pieces instead.

use serde::{Deserialize, Serialize};

use crate::effective_code::{EffectiveCode, Node};
use crate::error::{internal, Result};
use crate::geometry::{Boundary, CheckKind, CodeLayout, Coord, Direction, Endpoint};
use crate::noise::NoiseParams;
use crate::pauli::Basis;
use crate::schedule::{build_schedule, cnot_slot, group_measured_in, Operation, Protocol, SLOTS_PER_ROUND};

/// Indexing of `(group, round)` detectors for one check sector.
#[derive(Debug, Clone)]
pub struct DetectorMap {
    kind: CheckKind,
    total_rounds: usize,
    first: Vec<usize>,
    stride: Vec<usize>,
    offset: Vec<usize>,
    det_group: Vec<usize>,
    det_round: Vec<usize>,
}

impl DetectorMap {
    pub fn new(code: &EffectiveCode, kind: CheckKind, protocol: Protocol) -> Self {
        let total_rounds = protocol.total_rounds();
        let groups = code.sector(kind).groups();
        let mut m = DetectorMap {
            kind,
            total_rounds,
            first: Vec::with_capacity(groups.len()),
            stride: Vec::with_capacity(groups.len()),
            offset: Vec::with_capacity(groups.len()),
            det_group: Vec::new(),
            det_round: Vec::new(),
        };
        for (g, group) in groups.iter().enumerate() {
            let first = (0..total_rounds).find(|&r| group_measured_in(group, kind, r)).unwrap_or(0);
            let stride = if group.is_supercheck() { 2 } else { 1 };
            m.first.push(first);
            m.stride.push(stride);
            m.offset.push(m.det_group.len());
            let mut r = first + stride;
            while r < total_rounds {
                m.det_group.push(g);
                m.det_round.push(r);
                r += stride;
            }
        }
        m
    }

    pub fn kind(&self) -> CheckKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.det_group.len()
    }

    pub fn is_empty(&self) -> bool {
        self.det_group.is_empty()
    }

    /// Detector comparing the measurement of `group` in `round` with the previous one.
    pub fn id(&self, group: usize, round: usize) -> Option<usize> {
        let (first, stride) = (self.first[group], self.stride[group]);
        if round < first + stride || round >= self.total_rounds || !(round - first).is_multiple_of(stride) {
            return None;
        }
        Some(self.offset[group] + (round - first) / stride - 1)
    }

    pub fn group_and_round(&self, id: usize) -> (usize, usize) {
        (self.det_group[id], self.det_round[id])
    }

    pub fn measured_in(&self, group: usize, round: usize) -> bool {
        round >= self.first[group] && (round - self.first[group]).is_multiple_of(self.stride[group])
    }

    /// First measurement of `group` strictly after `round`.
    pub fn next_measurement(&self, group: usize, round: usize) -> usize {
        let (first, stride) = (self.first[group], self.stride[group]);
        if round < first {
            first
        } else {
            first + stride * ((round - first) / stride + 1)
        }
    }
}

/// How edge weights are assigned.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum WeightModel {
    /// `ln((1-p)/p)` from the circuit-level error model.
    #[default]
    LogLikelihood,
    /// Unit weights on elementary space-like and time-like edges only.
    Unit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphEdge {
    pub a: usize,
    pub b: usize,
    pub probability: f64,
    pub weight: i64,
    /// Data qubits (site indices) flipped by the error this edge stands for.
    pub flips: Vec<usize>,
}

/// Bookkeeping from graph construction.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphStats {
    pub mechanisms: usize,
    /// Faults with more than two detectors that were split into pieces.
    pub decomposed: usize,
    /// Faults that flip the logical without firing any detector.
    pub undetectable_logical: usize,
}

/// Scale from real-valued weights to the integers used by the matcher.
pub const WEIGHT_SCALE: f64 = 10_000.0;

pub(crate) const INF: i64 = i64::MAX / 4;

#[derive(Debug, Clone)]
pub struct DecodingGraph {
    pub(crate) detectors: DetectorMap,
    pub(crate) edges: Vec<GraphEdge>,
    pub(crate) adj_start: Vec<usize>,
    pub(crate) adj: Vec<(u32, u32)>,
    pub(crate) boundary_dist: Vec<i64>,
    pub(crate) boundary_parent: Vec<u32>,
    stats: GraphStats,
}

/// Small set where inserting a present element removes it.
#[derive(Debug, Clone, Copy)]
struct XorSet<const N: usize> {
    items: [u32; N],
    len: usize,
}

impl<const N: usize> Default for XorSet<N> {
    fn default() -> Self {
        XorSet { items: [0; N], len: 0 }
    }
}

impl<const N: usize> XorSet<N> {
    fn toggle(&mut self, x: usize) {
        let x = x as u32;
        if let Some(i) = self.as_slice().iter().position(|&y| y == x) {
            self.len -= 1;
            self.items[i] = self.items[self.len];
        } else {
            assert!(self.len < N, "fault footprint exceeds its capacity");
            self.items[self.len] = x;
            self.len += 1;
        }
    }

    fn as_slice(&self) -> &[u32] {
        &self.items[..self.len]
    }
}

/// Detectors, boundary parities and data flips of an X-type fault.
#[derive(Debug, Clone, Copy, Default)]
struct Footprint<const D: usize, const F: usize> {
    dets: XorSet<D>,
    low: bool,
    high: bool,
    flips: XorSet<F>,
}

impl<const D: usize, const F: usize> Footprint<D, F> {
    fn absorb<const D2: usize, const F2: usize>(&mut self, other: &Footprint<D2, F2>) {
        for &d in other.dets.as_slice() {
            self.dets.toggle(d as usize);
        }
        self.low ^= other.low;
        self.high ^= other.high;
        for &q in other.flips.as_slice() {
            self.flips.toggle(q as usize);
        }
    }
}

/// One elementary piece; fires at most two detectors.
type Atom = Footprint<2, 1>;

/// A fault split into pieces; a star ancilla reaches at most four data qubits
/// and the CNOT target adds one more.
#[derive(Debug, Clone, Copy, Default)]
struct Atoms {
    items: [Atom; 5],
    len: usize,
}

impl Atoms {
    fn one(a: Atom) -> Self {
        let mut out = Atoms::default();
        out.push(a);
        out
    }

    fn push(&mut self, a: Atom) {
        self.items[self.len] = a;
        self.len += 1;
    }

    fn extend(&mut self, other: &Atoms) {
        for a in other.as_slice() {
            self.push(*a);
        }
    }

    fn as_slice(&self) -> &[Atom] {
        &self.items[..self.len]
    }
}

#[derive(Debug, Clone, Copy)]
struct Entry {
    key: (u32, u32),
    prob: f64,
    flips: XorSet<5>,
}

/// Collects graph-like contributions of every fault mechanism.
struct Accumulator {
    low: usize,
    high: usize,
    entries: Vec<Entry>,
    stats: GraphStats,
}

impl Accumulator {
    fn add<const D: usize, const F: usize>(&mut self, fp: &Footprint<D, F>, prob: f64) -> bool {
        let key = match (fp.dets.as_slice(), fp.low, fp.high) {
            ([], low, high) => {
                if low && high {
                    self.stats.undetectable_logical += 1;
                }
                return true;
            }
            (&[a, c], false, false) => (a.min(c), a.max(c)),
            (&[a], true, false) => (a, self.low as u32),
            (&[a], false, true) => (a, self.high as u32),
            _ => return false,
        };
        let mut flips = XorSet::default();
        for &q in fp.flips.as_slice() {
            flips.toggle(q as usize);
        }
        self.entries.push(Entry { key, prob, flips });
        true
    }

    fn mechanism(&mut self, prob: f64, atoms: &Atoms) -> Result<()> {
        self.stats.mechanisms += 1;
        let mut total = Footprint::<10, 5>::default();
        for a in atoms.as_slice() {
            total.absorb(a);
        }
        if !self.add(&total, prob) {
            self.stats.decomposed += 1;
            for a in atoms.as_slice() {
                if !self.add(a, prob) {
                    return Err(internal("elementary fault fires more than two detectors"));
                }
            }
        }
        Ok(())
    }
}

struct Builder<'a> {
    layout: &'a CodeLayout,
    code: &'a EffectiveCode,
    map: DetectorMap,
}

impl Builder<'_> {
    /// X on data qubit `q` right after timestep `t` of round `j`.
    fn data_atom(&self, q: usize, j: usize, t: usize) -> Atom {
        let sector = self.code.sector(CheckKind::Plaquette);
        let site = self.layout.coord(q);
        let sides = self.layout.sides(site, CheckKind::Plaquette);
        let mut fp = Atom::default();
        fp.flips.toggle(q);
        for (s, node) in sector.qubit_nodes(q).into_iter().enumerate() {
            match node {
                Node::Boundary(Boundary::Low) => fp.low ^= true,
                Node::Boundary(Boundary::High) => fp.high ^= true,
                Node::Void => {}
                Node::Group(g) => {
                    let Endpoint::Check(ci) = sides[s] else { unreachable!() };
                    let slot = cnot_slot(direction_to(self.layout.check(ci).site, site));
                    let round =
                        if self.map.measured_in(g, j) && slot > t { j } else { self.map.next_measurement(g, j) };
                    fp.dets.toggle(self.map.id(g, round).expect("detector exists"));
                }
            }
        }
        fp
    }

    /// Flipped outcome of plaquette check `ci` in round `j`.
    fn measurement_atom(&self, ci: usize, j: usize) -> Atom {
        let g = self.code.sector(CheckKind::Plaquette).group_of_check(ci).expect("measured check survives");
        let mut fp = Atom::default();
        fp.dets.toggle(self.map.id(g, j).expect("detector exists"));
        fp.dets.toggle(self.map.id(g, self.map.next_measurement(g, j)).expect("detector exists"));
        fp
    }

    /// X on a star ancilla after timestep `t`, copied onto its later targets.
    fn star_spread_atoms(&self, ci: usize, j: usize, t: usize, out: &mut Atoms) {
        for &(dir, q) in &self.layout.check(ci).support {
            let qi = self.layout.index(q);
            let slot = cnot_slot(dir);
            if slot > t && !self.code.is_disabled(qi) {
                out.push(self.data_atom(qi, j, slot));
            }
        }
    }

    fn ancilla_x_atoms(&self, ancilla: usize, j: usize, t: usize) -> Atoms {
        let ci = self.layout.check_index(self.layout.coord(ancilla)).expect("ancilla site");
        let mut out = Atoms::default();
        match self.layout.check(ci).kind {
            CheckKind::Star => self.star_spread_atoms(ci, j, t, &mut out),
            CheckKind::Plaquette => out.push(self.measurement_atom(ci, j)),
        }
        out
    }

    fn is_ancilla(&self, q: usize) -> bool {
        self.layout.check_index(self.layout.coord(q)).is_some()
    }
}

fn direction_to(from: Coord, to: Coord) -> Direction {
    if to.r < from.r {
        Direction::North
    } else if to.r > from.r {
        Direction::South
    } else if to.c < from.c {
        Direction::West
    } else {
        Direction::East
    }
}

impl DecodingGraph {
    /// Graph for decoding X errors with plaquette detectors.
    pub fn new(
        layout: &CodeLayout,
        code: &EffectiveCode,
        noise: &NoiseParams,
        weights: WeightModel,
        protocol: Protocol,
    ) -> Result<Self> {
        let b = Builder { layout, code, map: DetectorMap::new(code, CheckKind::Plaquette, protocol) };
        let mut acc = Accumulator {
            low: b.map.len() + Boundary::Low as usize,
            high: b.map.len() + Boundary::High as usize,
            entries: Vec::new(),
            stats: GraphStats::default(),
        };
        let p = noise.p_comp();
        let schedules = [build_schedule(layout, code, 0), build_schedule(layout, code, 1)];
        for j in (0..protocol.total_rounds()).filter(|&r| protocol.is_noisy(r)) {
            let sched = &schedules[j % 2];
            let measured_here = |ci: usize| sched.measured.binary_search(&ci).is_ok();
            if weights == WeightModel::Unit {
                for &q in layout.data_qubits() {
                    let qi = layout.index(q);
                    if !code.is_disabled(qi) {
                        acc.mechanism(0.0, &Atoms::one(b.data_atom(qi, j, SLOTS_PER_ROUND - 1)))?;
                    }
                }
                for &ci in &sched.measured {
                    if layout.check(ci).kind == CheckKind::Plaquette {
                        acc.mechanism(0.0, &Atoms::one(b.measurement_atom(ci, j)))?;
                    }
                }
                continue;
            }
            for (t, slot) in sched.slots.iter().enumerate() {
                for op in &slot.ops {
                    match *op {
                        Operation::Prepare { qubit, basis: Basis::Z }
                        | Operation::Measure { qubit, basis: Basis::Z, .. } => {
                            let ci = layout.check_index(layout.coord(qubit)).expect("ancilla site");
                            acc.mechanism(noise.classical_rate(), &Atoms::one(b.measurement_atom(ci, j)))?;
                        }
                        Operation::Cnot { control, target } => {
                            let (c_atoms, t_atoms) = if b.is_ancilla(control) {
                                (b.ancilla_x_atoms(control, j, t), Atoms::one(b.data_atom(target, j, t)))
                            } else {
                                (Atoms::one(b.data_atom(control, j, t)), b.ancilla_x_atoms(target, j, t))
                            };
                            let rate = 4.0 * p / 15.0;
                            let mut both = c_atoms;
                            both.extend(&t_atoms);
                            acc.mechanism(rate, &c_atoms)?;
                            acc.mechanism(rate, &t_atoms)?;
                            acc.mechanism(rate, &both)?;
                        }
                        _ => {}
                    }
                }
                let idle_rate = 8.0 * p / 15.0;
                for &q in &slot.idle {
                    if !b.is_ancilla(q) {
                        acc.mechanism(idle_rate, &Atoms::one(b.data_atom(q, j, t)))?;
                    } else if (1..=4).contains(&t) {
                        let ci = layout.check_index(layout.coord(q)).expect("ancilla site");
                        if measured_here(ci) {
                            acc.mechanism(idle_rate, &b.ancilla_x_atoms(q, j, t))?;
                        }
                    }
                }
            }
        }

        let Accumulator { mut entries, stats, .. } = acc;
        // Stable, so the first of equally likely mechanisms stays the representative.
        entries.sort_by_key(|e| e.key);
        let mut edges: Vec<GraphEdge> = Vec::new();
        for run in entries.chunk_by(|x, y| x.key == y.key) {
            let mut prob = 0.0;
            let mut rep = &run[0];
            for e in run {
                prob = prob * (1.0 - e.prob) + e.prob * (1.0 - prob);
                if e.prob > rep.prob {
                    rep = e;
                }
            }
            let weight = match weights {
                WeightModel::Unit => 1,
                WeightModel::LogLikelihood => {
                    let q = prob.clamp(1e-12, 0.5 - 1e-9);
                    (((1.0 - q) / q).ln() * WEIGHT_SCALE).round() as i64
                }
            };
            let mut flips: Vec<usize> = rep.flips.as_slice().iter().map(|&q| q as usize).collect();
            flips.sort_unstable();
            edges.push(GraphEdge {
                a: run[0].key.0 as usize,
                b: run[0].key.1 as usize,
                probability: prob,
                weight,
                flips,
            });
        }

        let num_nodes = b.map.len() + 2;
        let mut degree = vec![0usize; num_nodes + 1];
        for e in &edges {
            degree[e.a] += 1;
            degree[e.b] += 1;
        }
        let mut adj_start = vec![0usize; num_nodes + 1];
        for v in 0..num_nodes {
            adj_start[v + 1] = adj_start[v] + degree[v];
        }
        let mut fill = adj_start.clone();
        let mut adj = vec![(0u32, 0u32); adj_start[num_nodes]];
        for (k, e) in edges.iter().enumerate() {
            adj[fill[e.a]] = (e.b as u32, k as u32);
            fill[e.a] += 1;
            adj[fill[e.b]] = (e.a as u32, k as u32);
            fill[e.b] += 1;
        }

        let mut graph = DecodingGraph {
            detectors: b.map,
            edges,
            adj_start,
            adj,
            boundary_dist: Vec::new(),
            boundary_parent: Vec::new(),
            stats,
        };
        graph.compute_boundary_tree();
        Ok(graph)
    }

    fn compute_boundary_tree(&mut self) {
        use std::cmp::Reverse;
        use std::collections::BinaryHeap;
        let n = self.num_nodes();
        let mut dist = vec![INF; n];
        let mut parent = vec![u32::MAX; n];
        let mut heap = BinaryHeap::new();
        for b in [self.detectors.len(), self.detectors.len() + 1] {
            dist[b] = 0;
            heap.push(Reverse((0i64, b as u32)));
        }
        while let Some(Reverse((d, x))) = heap.pop() {
            let x = x as usize;
            if d > dist[x] {
                continue;
            }
            for &(y, e) in self.neighbours(x) {
                let y = y as usize;
                if y >= self.detectors.len() {
                    continue;
                }
                let nd = d + self.edges[e as usize].weight;
                if nd < dist[y] {
                    dist[y] = nd;
                    parent[y] = e;
                    heap.push(Reverse((nd, y as u32)));
                }
            }
        }
        self.boundary_dist = dist;
        self.boundary_parent = parent;
    }

    pub fn num_nodes(&self) -> usize {
        self.detectors.len() + 2
    }

    pub fn detectors(&self) -> &DetectorMap {
        &self.detectors
    }

    pub fn edges(&self) -> &[GraphEdge] {
        &self.edges
    }

    pub fn stats(&self) -> GraphStats {
        self.stats
    }

    pub(crate) fn neighbours(&self, x: usize) -> &[(u32, u32)] {
        &self.adj[self.adj_start[x]..self.adj_start[x + 1]]
    }

    pub fn is_boundary(&self, node: usize) -> bool {
        node >= self.detectors.len()
    }

    /// Weight of the lightest path from a detector to either boundary.
    pub fn boundary_distance(&self, node: usize) -> Option<i64> {
        let d = self.boundary_dist[node];
        (d < INF).then_some(d)
    }
}
