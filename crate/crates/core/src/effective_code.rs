//! Fabrication defects and the effective code they leave behind.
//!
//! Disabled data qubits are contracted out of each check sector with a
//! union-find over checks plus two boundary nodes. Every connected set of
//! checks becomes one supercheck; a set touching a boundary is absorbed into
//! it and its checks are dropped. The lattice percolates when the two
//! boundaries of a sector end up in the same set, in which case no logical
//! qubit survives.

use std::collections::{BTreeSet, VecDeque};
use std::fmt::Write as _;
use std::path::Path;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{check_probability, invalid, Error, Result};
use crate::geometry::{Boundary, CheckKind, CodeLayout, Coord, Direction, Endpoint, Link, SiteKind};
use crate::unionfind::UnionFind;

/// A concrete set of fabrication faults.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct FabricationSpec {
    pub faulty_qubits: BTreeSet<Coord>,
    pub faulty_links: BTreeSet<Link>,
    /// Rates the faults were sampled at; zero when loaded from a file.
    pub p_qubit: f64,
    pub p_link: f64,
}

impl FabricationSpec {
    pub fn is_empty(&self) -> bool {
        self.faulty_qubits.is_empty() && self.faulty_links.is_empty()
    }

    /// Parses the line format `Q r c` / `L r c d`, with `#` comments.
    pub fn parse(text: &str, layout: &CodeLayout, source: &Path) -> Result<Self> {
        let mut spec = FabricationSpec::default();
        for (lineno, raw) in text.lines().enumerate() {
            let err = |message: String| Error::Parse { path: source.to_path_buf(), line: lineno + 1, message };
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            let coord = |r: &str, c: &str| -> Result<Coord> {
                let r = r.parse().map_err(|_| err(format!("bad row `{r}`")))?;
                let c = c.parse().map_err(|_| err(format!("bad column `{c}`")))?;
                let site = Coord::new(r, c);
                if !layout.contains(site) {
                    return Err(err(format!("site {site} is outside the lattice")));
                }
                Ok(site)
            };
            match fields.as_slice() {
                ["Q", r, c] => {
                    spec.faulty_qubits.insert(coord(r, c)?);
                }
                ["L", r, c, d] => {
                    let site = coord(r, c)?;
                    let dir = Direction::from_letter(d).ok_or_else(|| err(format!("bad direction `{d}`")))?;
                    let link = layout
                        .link(site, dir)
                        .ok_or_else(|| err(format!("no link {} from site {site}", dir.letter())))?;
                    spec.faulty_links.insert(link);
                }
                _ => return Err(err(format!("unrecognised line `{line}`"))),
            }
        }
        Ok(spec)
    }

    pub fn read(path: &Path, layout: &CodeLayout) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io { path: path.to_path_buf(), source })?;
        Self::parse(&text, layout, path)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for q in &self.faulty_qubits {
            let _ = writeln!(out, "Q {} {}", q.r, q.c);
        }
        for l in &self.faulty_links {
            let _ = writeln!(out, "L {} {} {}", l.check_site.r, l.check_site.c, l.direction.letter());
        }
        out
    }
}

/// Draws each qubit faulty with probability `p_qubit` and each link faulty
/// with probability `p_link`, independently.
pub fn sample_fabrication<R: Rng + ?Sized>(
    layout: &CodeLayout,
    p_qubit: f64,
    p_link: f64,
    rng: &mut R,
) -> Result<FabricationSpec> {
    check_probability("p_qubit", p_qubit)?;
    check_probability("p_link", p_link)?;
    let mut spec = FabricationSpec { p_qubit, p_link, ..Default::default() };
    if p_qubit > 0.0 {
        for index in 0..layout.num_qubits() {
            if rng.random_bool(p_qubit) {
                spec.faulty_qubits.insert(layout.coord(index));
            }
        }
    }
    if p_link > 0.0 {
        for link in layout.links() {
            if rng.random_bool(p_link) {
                spec.faulty_links.insert(*link);
            }
        }
    }
    Ok(spec)
}

/// Data qubits that cannot be used: faulty ones, endpoints of faulty links,
/// and the whole support of any check whose syndrome qubit is faulty.
pub fn map_to_disabled(layout: &CodeLayout, spec: &FabricationSpec) -> BTreeSet<Coord> {
    let mut disabled = BTreeSet::new();
    for &q in &spec.faulty_qubits {
        match layout.site_kind(q) {
            SiteKind::Data => {
                disabled.insert(q);
            }
            _ => {
                if let Some(ci) = layout.check_index(q) {
                    disabled.extend(layout.check(ci).support.iter().map(|&(_, d)| d));
                }
            }
        }
    }
    disabled.extend(spec.faulty_links.iter().map(|l| l.data_site));
    disabled
}

/// Which kind of fabrication fault a rate refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FaultModel {
    Link,
    Qubit,
}

impl FaultModel {
    /// Number of faulty components that disable a given data qubit.
    fn exposure(self) -> i32 {
        match self {
            FaultModel::Link => 4,
            FaultModel::Qubit => 5,
        }
    }

    /// Probability that a bulk data qubit is disabled at fault rate `p`.
    pub fn disable_probability(self, p: f64) -> f64 {
        1.0 - (1.0 - p).powi(self.exposure())
    }

    /// Fault rate at which a data qubit is disabled with probability one half.
    pub fn critical_rate(self) -> f64 {
        1.0 - 0.5f64.powf(1.0 / self.exposure() as f64)
    }
}

/// Where a check or one side of a data qubit ends up after contraction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Node {
    Group(usize),
    Boundary(Boundary),
    /// Part of a group with no functioning support.
    Void,
}

/// A surviving check or a supercheck formed by merging several checks.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckGroup {
    /// Check indices, ascending.
    pub members: Vec<usize>,
    /// Members with at least one functioning data qubit; only these are measured.
    pub measured: Vec<usize>,
    /// Functioning data qubits covered an odd number of times by the members.
    pub support: Vec<Coord>,
}

impl CheckGroup {
    pub fn is_supercheck(&self) -> bool {
        self.members.len() > 1
    }

    pub fn weight(&self) -> usize {
        self.support.len()
    }
}

/// Contracted view of one check type.
#[derive(Debug, Clone)]
pub struct Sector {
    kind: CheckKind,
    groups: Vec<CheckGroup>,
    // Indexed by check index; checks of the other kind map to `Void`.
    node_of_check: Vec<Node>,
    // Indexed by site index; only data sites are meaningful.
    qubit_nodes: Vec<[Node; 2]>,
    boundaries_merged: bool,
}

impl Sector {
    fn build(layout: &CodeLayout, disabled: &[bool], kind: CheckKind) -> Sector {
        let checks: Vec<usize> = layout.checks_of(kind).map(|(i, _)| i).collect();
        let mut local = vec![usize::MAX; layout.checks().len()];
        for (k, &ci) in checks.iter().enumerate() {
            local[ci] = k;
        }
        let low = checks.len();
        let high = low + 1;
        let node_id = |e: Endpoint| match e {
            Endpoint::Check(ci) => local[ci],
            Endpoint::Boundary(Boundary::Low) => low,
            Endpoint::Boundary(Boundary::High) => high,
        };

        let mut uf = UnionFind::new(checks.len() + 2);
        for &q in layout.data_qubits() {
            if disabled[layout.index(q)] {
                let [a, b] = layout.sides(q, kind);
                uf.union(node_id(a), node_id(b));
            }
        }
        let boundaries_merged = uf.same(low, high);
        let root_low = uf.find(low);
        let root_high = uf.find(high);

        // Group checks by root, in order of their smallest member.
        let mut group_of_root = vec![usize::MAX; checks.len() + 2];
        let mut raw: Vec<Vec<usize>> = Vec::new();
        let mut root_of_check = vec![usize::MAX; layout.checks().len()];
        for &ci in &checks {
            let root = uf.find(local[ci]);
            root_of_check[ci] = root;
            if root == root_low || root == root_high {
                continue;
            }
            if group_of_root[root] == usize::MAX {
                group_of_root[root] = raw.len();
                raw.push(Vec::new());
            }
            raw[group_of_root[root]].push(ci);
        }

        let mut multiplicity = vec![0u8; layout.num_qubits()];
        let mut groups = Vec::new();
        let mut final_index = vec![None; raw.len()];
        for (g, members) in raw.into_iter().enumerate() {
            let mut touched = Vec::new();
            let mut measured = Vec::new();
            for &ci in &members {
                let mut any = false;
                for &(_, q) in &layout.check(ci).support {
                    let qi = layout.index(q);
                    if !disabled[qi] {
                        any = true;
                        if multiplicity[qi] == 0 {
                            touched.push(q);
                        }
                        multiplicity[qi] += 1;
                    }
                }
                if any {
                    measured.push(ci);
                }
            }
            let mut support: Vec<Coord> =
                touched.iter().copied().filter(|&q| multiplicity[layout.index(q)] % 2 == 1).collect();
            support.sort();
            for &q in &touched {
                multiplicity[layout.index(q)] = 0;
            }
            if !support.is_empty() {
                final_index[g] = Some(groups.len());
                groups.push(CheckGroup { members, measured, support });
            }
        }

        let resolve = |root: usize| -> Node {
            if root == root_low {
                Node::Boundary(Boundary::Low)
            } else if root == root_high {
                Node::Boundary(Boundary::High)
            } else {
                match final_index[group_of_root[root]] {
                    Some(g) => Node::Group(g),
                    None => Node::Void,
                }
            }
        };
        let mut node_of_check = vec![Node::Void; layout.checks().len()];
        for &ci in &checks {
            node_of_check[ci] = resolve(root_of_check[ci]);
        }
        let mut qubit_nodes = vec![[Node::Void; 2]; layout.num_qubits()];
        for &q in layout.data_qubits() {
            let sides = layout.sides(q, kind);
            qubit_nodes[layout.index(q)] = sides.map(|e| match e {
                Endpoint::Check(ci) => node_of_check[ci],
                Endpoint::Boundary(b) => resolve(uf.find(node_id(Endpoint::Boundary(b)))),
            });
        }

        Sector { kind, groups, node_of_check, qubit_nodes, boundaries_merged }
    }

    pub fn kind(&self) -> CheckKind {
        self.kind
    }

    pub fn groups(&self) -> &[CheckGroup] {
        &self.groups
    }

    pub fn group(&self, g: usize) -> &CheckGroup {
        &self.groups[g]
    }

    pub fn node_of_check(&self, check: usize) -> Node {
        self.node_of_check[check]
    }

    /// Group index of a check, if it survives.
    pub fn group_of_check(&self, check: usize) -> Option<usize> {
        match self.node_of_check[check] {
            Node::Group(g) => Some(g),
            _ => None,
        }
    }

    /// Nodes on the low and high side of a data qubit, given its site index.
    pub fn qubit_nodes(&self, qubit: usize) -> [Node; 2] {
        self.qubit_nodes[qubit]
    }

    pub fn boundaries_merged(&self) -> bool {
        self.boundaries_merged
    }

    /// Checks of this kind that no longer exist: absorbed into a boundary or void.
    pub fn disabled_checks(&self, layout: &CodeLayout) -> Vec<Coord> {
        layout
            .checks_of(self.kind)
            .filter(|(ci, _)| !matches!(self.node_of_check[*ci], Node::Group(_)))
            .map(|(_, ch)| ch.site)
            .collect()
    }

    /// Shortest boundary-to-boundary path through the contracted sector,
    /// counting functioning data qubits. `None` when the boundaries merged.
    fn shortest_path(&self, layout: &CodeLayout, disabled: &[bool]) -> Option<LogicalPath> {
        if self.boundaries_merged {
            return None;
        }
        let g = self.groups.len();
        let id = |n: Node| match n {
            Node::Group(i) => Some(i),
            Node::Boundary(Boundary::Low) => Some(g),
            Node::Boundary(Boundary::High) => Some(g + 1),
            Node::Void => None,
        };
        let mut adjacency: Vec<Vec<(usize, Coord)>> = vec![Vec::new(); g + 2];
        for &q in layout.data_qubits() {
            let qi = layout.index(q);
            if disabled[qi] {
                continue;
            }
            let [a, b] = self.qubit_nodes[qi];
            if let (Some(a), Some(b)) = (id(a), id(b)) {
                if a != b {
                    adjacency[a].push((b, q));
                    adjacency[b].push((a, q));
                }
            }
        }
        let mut parent: Vec<Option<(usize, Coord)>> = vec![None; g + 2];
        let mut seen = vec![false; g + 2];
        let mut queue = VecDeque::from([g]);
        seen[g] = true;
        while let Some(u) = queue.pop_front() {
            if u == g + 1 {
                break;
            }
            for &(v, q) in &adjacency[u] {
                if !seen[v] {
                    seen[v] = true;
                    parent[v] = Some((u, q));
                    queue.push_back(v);
                }
            }
        }
        if !seen[g + 1] {
            return None;
        }
        let mut qubits = Vec::new();
        let mut at = g + 1;
        while let Some((prev, q)) = parent[at] {
            qubits.push(q);
            at = prev;
        }
        qubits.reverse();
        Some(LogicalPath { qubits })
    }

    /// Functioning data qubits with exactly one side on the low boundary.
    /// This is a bare logical of the opposite Pauli type.
    fn low_cut(&self, layout: &CodeLayout, disabled: &[bool]) -> Vec<Coord> {
        let low = Node::Boundary(Boundary::Low);
        layout
            .data_qubits()
            .iter()
            .copied()
            .filter(|&q| {
                let qi = layout.index(q);
                let [a, b] = self.qubit_nodes[qi];
                !disabled[qi] && ((a == low) != (b == low))
            })
            .collect()
    }
}

/// A dressed logical operator, listed along its path.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LogicalPath {
    pub qubits: Vec<Coord>,
}

impl LogicalPath {
    pub fn weight(&self) -> usize {
        self.qubits.len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LogicalKind {
    Z,
    X,
}

/// Code that remains after disabling data qubits.
#[derive(Debug, Clone)]
pub struct EffectiveCode {
    distance: usize,
    disabled: BTreeSet<Coord>,
    disabled_mask: Vec<bool>,
    sectors: [Sector; 2],
    logical_z: Option<LogicalPath>,
    logical_x: Option<LogicalPath>,
    logical_z_cut: Vec<Coord>,
    logical_x_cut: Vec<Coord>,
}

pub fn build_effective_code(layout: &CodeLayout, disabled: &BTreeSet<Coord>) -> Result<EffectiveCode> {
    let mut mask = vec![false; layout.num_qubits()];
    for &q in disabled {
        if !layout.contains(q) || layout.site_kind(q) != SiteKind::Data {
            return Err(invalid(format!("disabled site {q} is not a data qubit")));
        }
        mask[layout.index(q)] = true;
    }
    let star = Sector::build(layout, &mask, CheckKind::Star);
    let plaquette = Sector::build(layout, &mask, CheckKind::Plaquette);
    // A Z string runs between the star boundaries, an X string between the plaquette ones.
    let logical_z = star.shortest_path(layout, &mask);
    let logical_x = plaquette.shortest_path(layout, &mask);
    let logical_z_cut = plaquette.low_cut(layout, &mask);
    let logical_x_cut = star.low_cut(layout, &mask);
    Ok(EffectiveCode {
        distance: layout.distance(),
        disabled: disabled.clone(),
        disabled_mask: mask,
        sectors: [star, plaquette],
        logical_z,
        logical_x,
        logical_z_cut,
        logical_x_cut,
    })
}

impl EffectiveCode {
    /// Nominal distance of the underlying lattice.
    pub fn nominal_distance(&self) -> usize {
        self.distance
    }

    pub fn percolated(&self) -> bool {
        self.logical_z.is_none() || self.logical_x.is_none()
    }

    pub fn sector(&self, kind: CheckKind) -> &Sector {
        &self.sectors[kind as usize]
    }

    pub fn disabled(&self) -> &BTreeSet<Coord> {
        &self.disabled
    }

    pub fn is_disabled(&self, qubit: usize) -> bool {
        self.disabled_mask[qubit]
    }

    pub fn disabled_mask(&self) -> &[bool] {
        &self.disabled_mask
    }

    pub fn logical(&self, kind: LogicalKind) -> Option<&LogicalPath> {
        match kind {
            LogicalKind::Z => self.logical_z.as_ref(),
            LogicalKind::X => self.logical_x.as_ref(),
        }
    }

    /// Bare Z logical commuting with every star, used to read out X-error failures.
    pub fn logical_z_cut(&self) -> &[Coord] {
        &self.logical_z_cut
    }

    /// Bare X logical commuting with every plaquette.
    pub fn logical_x_cut(&self) -> &[Coord] {
        &self.logical_x_cut
    }

    /// Data support of a check after removing disabled qubits.
    pub fn restricted_support(&self, layout: &CodeLayout, check: usize) -> Vec<(Direction, Coord)> {
        layout.check(check).support.iter().copied().filter(|&(_, q)| !self.disabled_mask[layout.index(q)]).collect()
    }

    /// Largest supercheck support over both sectors, zero if nothing survives.
    pub fn max_supercheck_weight(&self) -> usize {
        self.sectors.iter().flat_map(|s| s.groups.iter()).map(CheckGroup::weight).max().unwrap_or(0)
    }
}

/// Effective distance of one logical type; `None` when it no longer exists.
pub fn effective_distance(code: &EffectiveCode, kind: LogicalKind) -> Option<usize> {
    code.logical(kind).map(LogicalPath::weight)
}

/// Smaller of the Z and X effective distances.
pub fn min_effective_distance(code: &EffectiveCode) -> Option<usize> {
    Some(effective_distance(code, LogicalKind::Z)?.min(effective_distance(code, LogicalKind::X)?))
}

/// Percolation test without building groups or paths.
pub fn is_percolated(layout: &CodeLayout, disabled: &[bool]) -> bool {
    CheckKind::ALL.iter().any(|&kind| {
        let checks = layout.checks_of(kind).count();
        let mut local = vec![usize::MAX; layout.checks().len()];
        for (k, (ci, _)) in layout.checks_of(kind).enumerate() {
            local[ci] = k;
        }
        let node_id = |e: Endpoint| match e {
            Endpoint::Check(ci) => local[ci],
            Endpoint::Boundary(Boundary::Low) => checks,
            Endpoint::Boundary(Boundary::High) => checks + 1,
        };
        let mut uf = UnionFind::new(checks + 2);
        for &q in layout.data_qubits() {
            if disabled[layout.index(q)] {
                let [a, b] = layout.sides(q, kind);
                uf.union(node_id(a), node_id(b));
            }
        }
        uf.same(checks, checks + 1)
    })
}
