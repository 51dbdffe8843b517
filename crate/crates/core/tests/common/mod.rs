//! Independent reference implementations used by the integration tests and
//! the acceptance run. Nothing here calls into the code it checks, apart
//! from reading its inputs.
#![allow(dead_code)]

use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap, VecDeque};

use rand::Rng;

use fabsim::decoder::DecodingGraph;
use fabsim::effective_code::EffectiveCode;
use fabsim::geometry::{CheckKind, CodeLayout, Coord};
use fabsim::pauli::{Basis, Pauli};
use fabsim::schedule::StabilizerBackend;
use fabsim::tableau::Tableau;

// ---------------------------------------------------------------------------
// State-vector reference for small Clifford circuits.

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Op {
    H(usize),
    Cnot(usize, usize),
    X(usize),
    Y(usize),
    Z(usize),
    MeasureZ(usize),
    MeasureX(usize),
    ResetZ(usize),
}

pub fn random_circuit<R: Rng>(n: usize, len: usize, max_measurements: usize, rng: &mut R) -> Vec<Op> {
    let mut ops = Vec::with_capacity(len);
    let mut measured = 0;
    while ops.len() < len {
        let q = rng.random_range(0..n);
        let op = match rng.random_range(0..10) {
            0..=2 => Op::H(q),
            3..=5 if n > 1 => {
                let mut t = rng.random_range(0..n - 1);
                if t >= q {
                    t += 1;
                }
                Op::Cnot(q, t)
            }
            6 => [Op::X(q), Op::Y(q), Op::Z(q)][rng.random_range(0..3)],
            7 | 8 if measured < max_measurements => {
                measured += 1;
                if rng.random_bool(0.5) {
                    Op::MeasureZ(q)
                } else {
                    Op::MeasureX(q)
                }
            }
            9 => Op::ResetZ(q),
            _ => continue,
        };
        ops.push(op);
    }
    ops
}

type Amp = (f64, f64);

fn mul(a: Amp, b: Amp) -> Amp {
    (a.0 * b.0 - a.1 * b.1, a.0 * b.1 + a.1 * b.0)
}

struct StateVector {
    amps: Vec<Amp>,
}

impl StateVector {
    fn new(n: usize) -> Self {
        let mut amps = vec![(0.0, 0.0); 1 << n];
        amps[0] = (1.0, 0.0);
        StateVector { amps }
    }

    fn h(&mut self, q: usize) {
        let m = 1 << q;
        let s = std::f64::consts::FRAC_1_SQRT_2;
        for i in 0..self.amps.len() {
            if i & m == 0 {
                let (a, b) = (self.amps[i], self.amps[i | m]);
                self.amps[i] = ((a.0 + b.0) * s, (a.1 + b.1) * s);
                self.amps[i | m] = ((a.0 - b.0) * s, (a.1 - b.1) * s);
            }
        }
    }

    fn x(&mut self, q: usize) {
        let m = 1 << q;
        for i in 0..self.amps.len() {
            if i & m == 0 {
                self.amps.swap(i, i | m);
            }
        }
    }

    fn z(&mut self, q: usize) {
        let m = 1 << q;
        for (i, a) in self.amps.iter_mut().enumerate() {
            if i & m != 0 {
                *a = (-a.0, -a.1);
            }
        }
    }

    /// Y = iXZ.
    fn y(&mut self, q: usize) {
        self.z(q);
        self.x(q);
        for a in &mut self.amps {
            *a = mul(*a, (0.0, 1.0));
        }
    }

    fn cnot(&mut self, c: usize, t: usize) {
        let (mc, mt) = (1 << c, 1 << t);
        for i in 0..self.amps.len() {
            if i & mc != 0 && i & mt == 0 {
                self.amps.swap(i, i | mt);
            }
        }
    }

    fn prob_one(&self, q: usize) -> f64 {
        let m = 1 << q;
        self.amps.iter().enumerate().filter(|(i, _)| i & m != 0).map(|(_, a)| a.0 * a.0 + a.1 * a.1).sum()
    }

    fn project(&self, q: usize, outcome: bool, p: f64) -> StateVector {
        let m = 1 << q;
        let norm = p.sqrt();
        let amps = self
            .amps
            .iter()
            .enumerate()
            .map(|(i, a)| if ((i & m) != 0) == outcome { (a.0 / norm, a.1 / norm) } else { (0.0, 0.0) })
            .collect();
        StateVector { amps }
    }
}

/// Exact distribution over the recorded outcomes: each mid-circuit
/// measurement in order, then a Z measurement of every qubit.
pub fn exact_distribution(n: usize, ops: &[Op]) -> BTreeMap<Vec<bool>, f64> {
    let mut out = BTreeMap::new();
    branch(StateVector::new(n), n, ops, Vec::new(), 1.0, &mut out);
    out
}

fn branch(
    mut sv: StateVector,
    n: usize,
    ops: &[Op],
    record: Vec<bool>,
    weight: f64,
    out: &mut BTreeMap<Vec<bool>, f64>,
) {
    const EPS: f64 = 1e-12;
    for (k, &op) in ops.iter().enumerate() {
        match op {
            Op::H(q) => sv.h(q),
            Op::X(q) => sv.x(q),
            Op::Y(q) => sv.y(q),
            Op::Z(q) => sv.z(q),
            Op::Cnot(c, t) => sv.cnot(c, t),
            Op::MeasureZ(q) | Op::MeasureX(q) | Op::ResetZ(q) => {
                let x_basis = matches!(op, Op::MeasureX(_));
                if x_basis {
                    sv.h(q);
                }
                let p1 = sv.prob_one(q);
                for (outcome, p) in [(false, 1.0 - p1), (true, p1)] {
                    if p < EPS {
                        continue;
                    }
                    let mut next = sv.project(q, outcome, p);
                    let mut rec = record.clone();
                    if matches!(op, Op::ResetZ(_)) {
                        if outcome {
                            next.x(q);
                        }
                    } else {
                        rec.push(outcome);
                    }
                    if x_basis {
                        next.h(q);
                    }
                    branch(next, n, &ops[k + 1..], rec, weight * p, out);
                }
                return;
            }
        }
    }
    // Final readout of every qubit.
    for (i, a) in sv.amps.iter().enumerate() {
        let p = a.0 * a.0 + a.1 * a.1;
        if p < EPS {
            continue;
        }
        let mut rec = record.clone();
        rec.extend((0..n).map(|q| i >> q & 1 == 1));
        *out.entry(rec).or_insert(0.0) += weight * p;
    }
}

/// One shot of the same circuit on the tableau.
pub fn run_on_tableau<R: Rng>(n: usize, ops: &[Op], rng: &mut R) -> Vec<bool> {
    let mut t = Tableau::new(n).expect("nonempty register");
    let mut record = Vec::new();
    for &op in ops {
        match op {
            Op::H(q) => t.h(q),
            Op::X(q) => t.pauli(q, Pauli::X),
            Op::Y(q) => t.pauli(q, Pauli::Y),
            Op::Z(q) => t.pauli(q, Pauli::Z),
            Op::Cnot(c, tq) => t.cnot(c, tq),
            Op::MeasureZ(q) => record.push(t.measure(q, Basis::Z, rng).outcome),
            Op::MeasureX(q) => record.push(t.measure(q, Basis::X, rng).outcome),
            Op::ResetZ(q) => t.reset(q, Basis::Z, rng),
        }
    }
    for q in 0..n {
        record.push(t.measure_z(q, rng).outcome);
    }
    record
}

#[derive(Debug, Clone)]
pub struct ChiSquare {
    pub statistic: f64,
    pub dof: usize,
    /// Shots landing on outcomes the reference says are impossible.
    pub impossible: usize,
}

impl ChiSquare {
    /// Accepts when the statistic is within three standard deviations of its mean.
    pub fn passes(&self) -> bool {
        self.impossible == 0 && self.statistic <= self.dof as f64 + 3.0 * (2.0 * self.dof as f64).sqrt()
    }
}

pub fn chi_square(observed: &BTreeMap<Vec<bool>, usize>, exact: &BTreeMap<Vec<bool>, f64>, shots: usize) -> ChiSquare {
    let mut statistic = 0.0;
    for (k, &p) in exact {
        let e = p * shots as f64;
        let o = observed.get(k).copied().unwrap_or(0) as f64;
        statistic += (o - e).powi(2) / e;
    }
    let impossible = observed.iter().filter(|(k, _)| !exact.contains_key(*k)).map(|(_, &c)| c).sum();
    ChiSquare { statistic, dof: exact.len().saturating_sub(1), impossible }
}

// ---------------------------------------------------------------------------
// Matching references.

/// Minimum total weight over all ways of pairing defects with each other or
/// sending them to the boundary, by exhaustive recursion.
pub fn brute_force_matching(
    k: usize,
    pair: &dyn Fn(usize, usize) -> Option<i64>,
    boundary: &[Option<i64>],
) -> Option<i64> {
    fn go(used: &mut Vec<bool>, pair: &dyn Fn(usize, usize) -> Option<i64>, boundary: &[Option<i64>]) -> Option<i64> {
        let Some(i) = used.iter().position(|&u| !u) else {
            return Some(0);
        };
        used[i] = true;
        let mut best: Option<i64> = None;
        if let Some(b) = boundary[i] {
            if let Some(rest) = go(used, pair, boundary) {
                best = Some(b + rest);
            }
        }
        for j in i + 1..used.len() {
            if used[j] {
                continue;
            }
            if let Some(w) = pair(i, j) {
                used[j] = true;
                if let Some(rest) = go(used, pair, boundary) {
                    best = Some(best.map_or(w + rest, |b| b.min(w + rest)));
                }
                used[j] = false;
            }
        }
        used[i] = false;
        best
    }
    go(&mut vec![false; k], pair, boundary)
}

/// Shortest distances from each defect by plain Dijkstra over the decoding
/// graph's edge list, never passing through a boundary node: the full pair
/// table and the distance of each defect to the nearest boundary.
pub fn reference_distances(graph: &DecodingGraph, defects: &[usize]) -> (Vec<Vec<Option<i64>>>, Vec<Option<i64>>) {
    let n = graph.num_nodes();
    let mut adj: Vec<Vec<(usize, i64)>> = vec![Vec::new(); n];
    for e in graph.edges() {
        adj[e.a].push((e.b, e.weight));
        adj[e.b].push((e.a, e.weight));
    }
    let mut pairs = vec![vec![None; defects.len()]; defects.len()];
    let mut boundary = vec![None; defects.len()];
    for (i, &src) in defects.iter().enumerate() {
        let mut dist = vec![i64::MAX; n];
        dist[src] = 0;
        let mut heap = BinaryHeap::from([Reverse((0i64, src))]);
        while let Some(Reverse((d, x))) = heap.pop() {
            if d > dist[x] || graph.is_boundary(x) {
                continue;
            }
            for &(y, w) in &adj[x] {
                if d + w < dist[y] {
                    dist[y] = d + w;
                    heap.push(Reverse((d + w, y)));
                }
            }
        }
        for (j, &t) in defects.iter().enumerate() {
            if dist[t] < i64::MAX && i != j {
                pairs[i][j] = Some(dist[t]);
            }
        }
        boundary[i] = (0..n).filter(|&v| graph.is_boundary(v) && dist[v] < i64::MAX).map(|v| dist[v]).min();
    }
    (pairs, boundary)
}

// ---------------------------------------------------------------------------
// Effective-distance reference.

/// Lightest operator of type `kind` ("Z" strings commute with every star
/// group, "X" strings with every plaquette group) on functioning qubits
/// that anticommutes with the given conjugate logical. Breadth-first search
/// over syndrome space, so it makes no use of the check-graph structure.
pub fn brute_force_distance(
    layout: &CodeLayout,
    code: &EffectiveCode,
    commute_with: CheckKind,
    conjugate: &[Coord],
) -> Option<usize> {
    let groups = code.sector(commute_with).groups();
    let bits = groups.len() + 1;
    assert!(bits <= 26, "syndrome space too large for exhaustive search");
    let mut moves: Vec<u32> = Vec::new();
    for &q in layout.data_qubits() {
        if code.is_disabled(layout.index(q)) {
            continue;
        }
        let mut m = 0u32;
        for (g, group) in groups.iter().enumerate() {
            if group.support.contains(&q) {
                m ^= 1 << g;
            }
        }
        if conjugate.contains(&q) {
            m ^= 1 << groups.len();
        }
        moves.push(m);
    }
    let target = 1u32 << groups.len();
    let mut dist = vec![u8::MAX; 1 << bits];
    dist[0] = 0;
    let mut queue = VecDeque::from([0u32]);
    while let Some(s) = queue.pop_front() {
        if s == target {
            return Some(dist[s as usize] as usize);
        }
        for &m in &moves {
            let t = s ^ m;
            if dist[t as usize] == u8::MAX {
                dist[t as usize] = dist[s as usize] + 1;
                queue.push_back(t);
            }
        }
    }
    None
}

/// Number of sites of `a` that also appear in `b`.
pub fn overlap(a: &[Coord], b: &[Coord]) -> usize {
    a.iter().filter(|q| b.contains(q)).count()
}

// ---------------------------------------------------------------------------
// Fault injection.

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fault {
    /// X on the control, target or both right after a CNOT.
    Cnot { control: bool, target: bool },
    /// X right after a preparation.
    Prepare,
    /// Flipped measurement result.
    Measure,
}

/// Wraps a backend and injects one fault right after its `at`-th operation.
pub struct Injector<B> {
    pub inner: B,
    pub calls: usize,
    pub at: usize,
    pub fault: Fault,
    pub fired: bool,
}

impl<B: StabilizerBackend> Injector<B> {
    pub fn new(inner: B, at: usize, fault: Fault) -> Self {
        Injector { inner, calls: 0, at, fault, fired: false }
    }

    fn hit(&mut self) -> bool {
        let h = self.calls == self.at;
        self.calls += 1;
        h
    }
}

impl<B: StabilizerBackend> StabilizerBackend for Injector<B> {
    fn reset(&mut self, qubit: usize, basis: Basis) {
        self.inner.reset(qubit, basis);
        if self.hit() && self.fault == Fault::Prepare {
            self.inner.apply_pauli(qubit, Pauli::X);
            self.fired = true;
        }
    }

    fn cnot(&mut self, control: usize, target: usize) {
        self.inner.cnot(control, target);
        if self.hit() {
            if let Fault::Cnot { control: c, target: t } = self.fault {
                if c {
                    self.inner.apply_pauli(control, Pauli::X);
                }
                if t {
                    self.inner.apply_pauli(target, Pauli::X);
                }
                self.fired = true;
            }
        }
    }

    fn apply_pauli(&mut self, qubit: usize, pauli: Pauli) {
        self.inner.apply_pauli(qubit, pauli);
    }

    fn measure(&mut self, qubit: usize, basis: Basis) -> bool {
        let v = self.inner.measure(qubit, basis);
        if self.hit() && self.fault == Fault::Measure {
            self.fired = true;
            return !v;
        }
        v
    }
}
