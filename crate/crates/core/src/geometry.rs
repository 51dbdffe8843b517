//! Planar surface-code lattice on a `(2L-1) x (2L-1)` grid.
//!
//! A site `(r, c)` with `r + c` even holds a data qubit. Sites with `r` odd and
//! `c` even hold star (X-type) syndrome qubits; sites with `r` even and `c` odd
//! hold plaquette (Z-type) syndrome qubits. Every site is a physical qubit with
//! index `r * (2L - 1) + c`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Lattice position, ordered row-major.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Coord {
    pub r: usize,
    pub c: usize,
}

impl Coord {
    pub const fn new(r: usize, c: usize) -> Self {
        Coord { r, c }
    }

    /// Neighbouring site in `dir`, if it lies on a grid of side `size`.
    pub fn step(self, dir: Direction, size: usize) -> Option<Coord> {
        let (dr, dc) = dir.offset();
        let r = self.r.checked_add_signed(dr)?;
        let c = self.c.checked_add_signed(dc)?;
        (r < size && c < size).then_some(Coord { r, c })
    }
}

impl fmt::Display for Coord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", self.r, self.c)
    }
}

/// Compass direction from a syndrome qubit to one of its data qubits.
///
/// The declaration order is the CNOT order used by the schedule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Direction {
    North,
    West,
    East,
    South,
}

impl Direction {
    pub const ALL: [Direction; 4] = [Direction::North, Direction::West, Direction::East, Direction::South];

    pub fn offset(self) -> (isize, isize) {
        match self {
            Direction::North => (-1, 0),
            Direction::West => (0, -1),
            Direction::East => (0, 1),
            Direction::South => (1, 0),
        }
    }

    /// Position in the CNOT order, starting at 0 for north.
    pub fn order(self) -> usize {
        self as usize
    }

    pub fn opposite(self) -> Direction {
        match self {
            Direction::North => Direction::South,
            Direction::West => Direction::East,
            Direction::East => Direction::West,
            Direction::South => Direction::North,
        }
    }

    pub fn letter(self) -> char {
        match self {
            Direction::North => 'n',
            Direction::West => 'w',
            Direction::East => 'e',
            Direction::South => 's',
        }
    }

    pub fn from_letter(s: &str) -> Option<Direction> {
        match s {
            "n" => Some(Direction::North),
            "w" => Some(Direction::West),
            "e" => Some(Direction::East),
            "s" => Some(Direction::South),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SiteKind {
    Data,
    Star,
    Plaquette,
}

/// Type of a stabilizer check. Stars measure X and detect Z errors; plaquettes
/// measure Z and detect X errors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CheckKind {
    Star,
    Plaquette,
}

impl CheckKind {
    pub const ALL: [CheckKind; 2] = [CheckKind::Star, CheckKind::Plaquette];

    pub fn other(self) -> CheckKind {
        match self {
            CheckKind::Star => CheckKind::Plaquette,
            CheckKind::Plaquette => CheckKind::Star,
        }
    }
}

/// One of the two boundaries of a check sector. For stars `Low` is the top
/// edge and `High` the bottom edge; for plaquettes `Low` is the left edge and
/// `High` the right edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Boundary {
    Low,
    High,
}

/// What lies on one side of a data qubit within a check sector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Endpoint {
    /// Index into [`CodeLayout::checks`].
    Check(usize),
    Boundary(Boundary),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckOperator {
    pub site: Coord,
    pub kind: CheckKind,
    /// Data qubits coupled to this check, in CNOT order.
    pub support: Vec<(Direction, Coord)>,
}

impl CheckOperator {
    pub fn weight(&self) -> usize {
        self.support.len()
    }
}

/// Physical coupling between a syndrome qubit and an adjacent data qubit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Link {
    pub check_site: Coord,
    pub direction: Direction,
    pub data_site: Coord,
}

#[derive(Debug, Clone)]
pub struct CodeLayout {
    distance: usize,
    size: usize,
    data_qubits: Vec<Coord>,
    checks: Vec<CheckOperator>,
    links: Vec<Link>,
    logical_z: Vec<Coord>,
    logical_x: Vec<Coord>,
    // Site index to check index.
    check_at: Vec<Option<usize>>,
    // Per site index and per sector, the two sides of a data qubit.
    sides: Vec<[[Endpoint; 2]; 2]>,
}

impl CodeLayout {
    /// Builds the distance-`distance` planar code. Requires `distance >= 2`.
    pub fn new(distance: usize) -> Result<Self> {
        if distance < 2 {
            return Err(invalid(format!("code distance must be at least 2, got {distance}")));
        }
        let size = 2 * distance - 1;
        let kind_of = |r: usize, c: usize| site_kind(r, c);

        let mut data_qubits = Vec::new();
        let mut checks = Vec::new();
        let mut check_at = vec![None; size * size];
        for r in 0..size {
            for c in 0..size {
                let here = Coord::new(r, c);
                match kind_of(r, c) {
                    SiteKind::Data => data_qubits.push(here),
                    kind => {
                        let support =
                            Direction::ALL.iter().filter_map(|&d| here.step(d, size).map(|q| (d, q))).collect();
                        check_at[r * size + c] = Some(checks.len());
                        checks.push(CheckOperator {
                            site: here,
                            kind: if kind == SiteKind::Star { CheckKind::Star } else { CheckKind::Plaquette },
                            support,
                        });
                    }
                }
            }
        }

        let mut links: Vec<Link> = checks
            .iter()
            .flat_map(|ch| {
                ch.support.iter().map(move |&(direction, data_site)| Link { check_site: ch.site, direction, data_site })
            })
            .collect();
        links.sort();

        let logical_z = (0..size).step_by(2).map(|r| Coord::new(r, 0)).collect();
        let logical_x = (0..size).step_by(2).map(|c| Coord::new(0, c)).collect();

        let mut layout = CodeLayout {
            distance,
            size,
            data_qubits,
            checks,
            links,
            logical_z,
            logical_x,
            check_at,
            sides: Vec::new(),
        };
        let boundary = Endpoint::Boundary;
        let mut sides = vec![[[boundary(Boundary::Low); 2]; 2]; size * size];
        for &q in &layout.data_qubits {
            let mut entry = [[boundary(Boundary::Low); 2]; 2];
            for kind in CheckKind::ALL {
                // Low side first: north for vertical pairs, west for horizontal pairs.
                let vertical = (kind == CheckKind::Star) == (q.r % 2 == 0);
                let (lo, hi) =
                    if vertical { (Direction::North, Direction::South) } else { (Direction::West, Direction::East) };
                let side = |d: Direction, b: Boundary| match q.step(d, size) {
                    Some(s) => Endpoint::Check(layout.check_at[layout.index(s)].unwrap()),
                    None => Endpoint::Boundary(b),
                };
                entry[kind as usize] = [side(lo, Boundary::Low), side(hi, Boundary::High)];
            }
            sides[layout.index(q)] = entry;
        }
        layout.sides = sides;
        Ok(layout)
    }

    pub fn distance(&self) -> usize {
        self.distance
    }

    /// Side length `2L - 1` of the grid.
    pub fn size(&self) -> usize {
        self.size
    }

    /// Total number of physical qubits, including syndrome qubits.
    pub fn num_qubits(&self) -> usize {
        self.size * self.size
    }

    pub fn index(&self, site: Coord) -> usize {
        site.r * self.size + site.c
    }

    pub fn coord(&self, index: usize) -> Coord {
        Coord::new(index / self.size, index % self.size)
    }

    pub fn contains(&self, site: Coord) -> bool {
        site.r < self.size && site.c < self.size
    }

    pub fn site_kind(&self, site: Coord) -> SiteKind {
        site_kind(site.r, site.c)
    }

    pub fn data_qubits(&self) -> &[Coord] {
        &self.data_qubits
    }

    /// All checks, stars and plaquettes interleaved in row-major site order.
    pub fn checks(&self) -> &[CheckOperator] {
        &self.checks
    }

    pub fn check(&self, index: usize) -> &CheckOperator {
        &self.checks[index]
    }

    pub fn check_index(&self, site: Coord) -> Option<usize> {
        self.check_at.get(self.index(site)).copied().flatten()
    }

    pub fn checks_of(&self, kind: CheckKind) -> impl Iterator<Item = (usize, &CheckOperator)> {
        self.checks.iter().enumerate().filter(move |(_, ch)| ch.kind == kind)
    }

    pub fn links(&self) -> &[Link] {
        &self.links
    }

    pub fn link(&self, check_site: Coord, direction: Direction) -> Option<Link> {
        self.check_index(check_site)?;
        let data_site = check_site.step(direction, self.size)?;
        Some(Link { check_site, direction, data_site })
    }

    /// Bare Z logical: data qubits of column 0.
    pub fn logical_z(&self) -> &[Coord] {
        &self.logical_z
    }

    /// Bare X logical: data qubits of row 0.
    pub fn logical_x(&self) -> &[Coord] {
        &self.logical_x
    }

    /// The one or two checks of `kind` acting on data qubit `q`.
    pub fn adjacent_checks(&self, q: Coord, kind: CheckKind) -> Result<Vec<&CheckOperator>> {
        if !self.contains(q) || self.site_kind(q) != SiteKind::Data {
            return Err(invalid(format!("site {q} is not a data qubit")));
        }
        Ok(self
            .sides(q, kind)
            .iter()
            .filter_map(|e| match *e {
                Endpoint::Check(i) => Some(&self.checks[i]),
                Endpoint::Boundary(_) => None,
            })
            .collect())
    }

    /// Low and high side of data qubit `q` in the `kind` sector.
    pub fn sides(&self, q: Coord, kind: CheckKind) -> [Endpoint; 2] {
        self.sides[self.index(q)][kind as usize]
    }
}

fn site_kind(r: usize, c: usize) -> SiteKind {
    match (r % 2, c % 2) {
        (0, 0) | (1, 1) => SiteKind::Data,
        (1, 0) => SiteKind::Star,
        _ => SiteKind::Plaquette,
    }
}

/// True when two Pauli operators of opposite type overlap on an even number
/// of qubits, i.e. commute.
pub fn overlap_is_even(a: &[Coord], b: &[Coord]) -> bool {
    a.iter().filter(|q| b.contains(q)).count() % 2 == 0
}

#[cfg(test)]
mod tests {
    use super::*;

    fn support(ch: &CheckOperator) -> Vec<Coord> {
        ch.support.iter().map(|&(_, q)| q).collect()
    }

    #[test]
    fn counts_match_closed_forms() {
        for l in 2..=12 {
            let layout = CodeLayout::new(l).unwrap();
            assert_eq!(layout.data_qubits().len(), l * l + (l - 1) * (l - 1));
            assert_eq!(layout.checks_of(CheckKind::Star).count(), l * (l - 1));
            assert_eq!(layout.checks_of(CheckKind::Plaquette).count(), l * (l - 1));
            assert_eq!(layout.logical_z().len(), l);
            assert_eq!(layout.logical_x().len(), l);
        }
    }

    #[test]
    fn distance_three_weights() {
        let layout = CodeLayout::new(3).unwrap();
        let weight = |r, c| layout.check(layout.check_index(Coord::new(r, c)).unwrap()).weight();
        assert_eq!(weight(1, 0), 3);
        assert_eq!(weight(1, 2), 4);
        assert_eq!(weight(0, 1), 3);
        assert_eq!(weight(2, 1), 4);
    }

    #[test]
    fn weight_three_checks_sit_on_their_boundaries() {
        let layout = CodeLayout::new(6).unwrap();
        let edge = layout.size() - 1;
        for ch in layout.checks() {
            assert!(ch.weight() >= 3);
            let on_edge = match ch.kind {
                CheckKind::Star => ch.site.c == 0 || ch.site.c == edge,
                CheckKind::Plaquette => ch.site.r == 0 || ch.site.r == edge,
            };
            assert_eq!(ch.weight() == 3, on_edge, "{:?}", ch.site);
        }
    }

    #[test]
    fn checks_commute_and_logicals_anticommute() {
        let layout = CodeLayout::new(5).unwrap();
        let stars: Vec<_> = layout.checks_of(CheckKind::Star).map(|(_, c)| support(c)).collect();
        let plaqs: Vec<_> = layout.checks_of(CheckKind::Plaquette).map(|(_, c)| support(c)).collect();
        for s in &stars {
            for p in &plaqs {
                assert!(overlap_is_even(s, p));
            }
            assert!(overlap_is_even(s, layout.logical_z()));
        }
        for p in &plaqs {
            assert!(overlap_is_even(p, layout.logical_x()));
        }
        assert!(!overlap_is_even(layout.logical_z(), layout.logical_x()));
    }

    #[test]
    fn adjacent_checks_and_sides_agree() {
        let layout = CodeLayout::new(4).unwrap();
        for &q in layout.data_qubits() {
            for kind in CheckKind::ALL {
                let adj = layout.adjacent_checks(q, kind).unwrap();
                assert!(!adj.is_empty() && adj.len() <= 2);
                for ch in &adj {
                    assert!(support(ch).contains(&q));
                }
                let sides = layout.sides(q, kind);
                let n_checks = sides.iter().filter(|e| matches!(e, Endpoint::Check(_))).count();
                assert_eq!(n_checks, adj.len());
            }
        }
        assert!(layout.adjacent_checks(Coord::new(1, 0), CheckKind::Star).is_err());
    }

    #[test]
    fn single_check_qubits_lie_on_their_boundary() {
        let layout = CodeLayout::new(5).unwrap();
        let edge = layout.size() - 1;
        for &q in layout.data_qubits() {
            if layout.adjacent_checks(q, CheckKind::Star).unwrap().len() == 1 {
                assert!(q.r == 0 || q.r == edge);
            }
            if layout.adjacent_checks(q, CheckKind::Plaquette).unwrap().len() == 1 {
                assert!(q.c == 0 || q.c == edge);
            }
        }
    }

    #[test]
    fn links_are_unique_and_complete() {
        let layout = CodeLayout::new(3).unwrap();
        let total: usize = layout.checks().iter().map(|c| c.weight()).sum();
        assert_eq!(layout.links().len(), total);
        let mut dedup = layout.links().to_vec();
        dedup.dedup();
        assert_eq!(dedup.len(), total);
        assert!(layout.link(Coord::new(1, 0), Direction::West).is_none());
        assert!(layout.link(Coord::new(0, 0), Direction::East).is_none());
    }

    #[test]
    fn rejects_tiny_distance() {
        assert!(CodeLayout::new(1).is_err());
        assert!(CodeLayout::new(0).is_err());
    }
}
