//! Stabilizer tableau simulator in the destabilizer formulation.
//!
//! Rows `0..n` are destabilizers, `n..2n` stabilizers and row `2n` is scratch
//! space for deterministic measurements. Each row stores its X and Z bits
//! packed into `u64` words plus a sign bit; a row with both bits set on a
//! qubit denotes Y there.

use rand::Rng;

use crate::error::{invalid, Result};
use crate::pauli::{Basis, Pauli};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Gate {
    H(usize),
    Cnot(usize, usize),
    X(usize),
    Y(usize),
    Z(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Measurement {
    /// `true` for the −1 eigenvalue.
    pub outcome: bool,
    pub deterministic: bool,
}

#[derive(Debug, Clone)]
pub struct Tableau {
    n: usize,
    words: usize,
    xs: Vec<u64>,
    zs: Vec<u64>,
    signs: Vec<bool>,
}

impl Tableau {
    /// All-zero state on `n >= 1` qubits.
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(invalid("tableau needs at least one qubit"));
        }
        let words = n.div_ceil(64);
        let rows = 2 * n + 1;
        let mut t =
            Tableau { n, words, xs: vec![0; rows * words], zs: vec![0; rows * words], signs: vec![false; rows] };
        for q in 0..n {
            t.set_x(q, q, true);
            t.set_z(n + q, q, true);
        }
        Ok(t)
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    #[inline]
    fn bit(q: usize) -> (usize, u64) {
        (q / 64, 1u64 << (q % 64))
    }

    #[inline]
    fn x(&self, row: usize, q: usize) -> bool {
        let (w, m) = Self::bit(q);
        self.xs[row * self.words + w] & m != 0
    }

    #[inline]
    fn z(&self, row: usize, q: usize) -> bool {
        let (w, m) = Self::bit(q);
        self.zs[row * self.words + w] & m != 0
    }

    fn set_x(&mut self, row: usize, q: usize, v: bool) {
        let (w, m) = Self::bit(q);
        let word = &mut self.xs[row * self.words + w];
        if v {
            *word |= m
        } else {
            *word &= !m
        }
    }

    fn set_z(&mut self, row: usize, q: usize, v: bool) {
        let (w, m) = Self::bit(q);
        let word = &mut self.zs[row * self.words + w];
        if v {
            *word |= m
        } else {
            *word &= !m
        }
    }

    fn check_qubit(&self, q: usize) -> Result<()> {
        if q < self.n {
            Ok(())
        } else {
            Err(invalid(format!("qubit {q} out of range for {} qubits", self.n)))
        }
    }

    pub fn apply(&mut self, gate: Gate) -> Result<()> {
        match gate {
            Gate::H(q) => {
                self.check_qubit(q)?;
                self.h(q);
            }
            Gate::Cnot(a, b) => {
                self.check_qubit(a)?;
                self.check_qubit(b)?;
                if a == b {
                    return Err(invalid("CNOT control equals target"));
                }
                self.cnot(a, b);
            }
            Gate::X(q) | Gate::Y(q) | Gate::Z(q) => {
                self.check_qubit(q)?;
                let p = match gate {
                    Gate::X(_) => Pauli::X,
                    Gate::Y(_) => Pauli::Y,
                    _ => Pauli::Z,
                };
                self.pauli(q, p);
            }
        }
        Ok(())
    }

    pub fn h(&mut self, q: usize) {
        let (w, m) = Self::bit(q);
        for row in 0..2 * self.n {
            let i = row * self.words + w;
            let (x, z) = (self.xs[i] & m, self.zs[i] & m);
            if x != 0 && z != 0 {
                self.signs[row] ^= true;
            }
            self.xs[i] = (self.xs[i] & !m) | z;
            self.zs[i] = (self.zs[i] & !m) | x;
        }
    }

    pub fn cnot(&mut self, a: usize, b: usize) {
        for row in 0..2 * self.n {
            let (xa, za, xb, zb) = (self.x(row, a), self.z(row, a), self.x(row, b), self.z(row, b));
            if xa && zb && (xb == za) {
                self.signs[row] ^= true;
            }
            if xa {
                self.set_x(row, b, !xb);
            }
            if zb {
                self.set_z(row, a, !za);
            }
        }
    }

    /// Conjugation by a Pauli only flips signs of anticommuting rows.
    pub fn pauli(&mut self, q: usize, p: Pauli) {
        if p.is_identity() {
            return;
        }
        for row in 0..2 * self.n {
            let anti = (p.has_x() && self.z(row, q)) ^ (p.has_z() && self.x(row, q));
            if anti {
                self.signs[row] ^= true;
            }
        }
    }

    /// Multiplies row `i` into row `h`, tracking the phase exactly.
    fn rowsum(&mut self, h: usize, i: usize) {
        let w = self.words;
        // Exponent of i picked up, mod 4.
        let mut acc: i64 = 2 * (self.signs[h] as i64) + 2 * (self.signs[i] as i64);
        for k in 0..w {
            let (x1, z1) = (self.xs[i * w + k], self.zs[i * w + k]);
            let (x2, z2) = (self.xs[h * w + k], self.zs[h * w + k]);
            let y1 = x1 & z1;
            let xo1 = x1 & !z1;
            let zo1 = z1 & !x1;
            let y2 = x2 & z2;
            let xo2 = x2 & !z2;
            let zo2 = z2 & !x2;
            let pos = (y1 & zo2) | (xo1 & y2) | (zo1 & xo2);
            let neg = (y1 & xo2) | (xo1 & zo2) | (zo1 & y2);
            acc += pos.count_ones() as i64 - neg.count_ones() as i64;
        }
        self.signs[h] = acc.rem_euclid(4) == 2;
        for k in 0..w {
            self.xs[h * w + k] ^= self.xs[i * w + k];
            self.zs[h * w + k] ^= self.zs[i * w + k];
        }
    }

    fn clear_row(&mut self, row: usize) {
        let w = self.words;
        self.xs[row * w..(row + 1) * w].fill(0);
        self.zs[row * w..(row + 1) * w].fill(0);
        self.signs[row] = false;
    }

    fn copy_row(&mut self, dst: usize, src: usize) {
        let w = self.words;
        self.xs.copy_within(src * w..(src + 1) * w, dst * w);
        self.zs.copy_within(src * w..(src + 1) * w, dst * w);
        self.signs[dst] = self.signs[src];
    }

    pub fn measure_z<R: Rng + ?Sized>(&mut self, q: usize, rng: &mut R) -> Measurement {
        let n = self.n;
        if let Some(p) = (n..2 * n).find(|&row| self.x(row, q)) {
            for row in 0..2 * n {
                if row != p && self.x(row, q) {
                    self.rowsum(row, p);
                }
            }
            self.copy_row(p - n, p);
            self.clear_row(p);
            self.set_z(p, q, true);
            let outcome = rng.random::<bool>();
            self.signs[p] = outcome;
            Measurement { outcome, deterministic: false }
        } else {
            let scratch = 2 * n;
            self.clear_row(scratch);
            for row in 0..n {
                if self.x(row, q) {
                    self.rowsum(scratch, row + n);
                }
            }
            Measurement { outcome: self.signs[scratch], deterministic: true }
        }
    }

    pub fn measure<R: Rng + ?Sized>(&mut self, q: usize, basis: Basis, rng: &mut R) -> Measurement {
        match basis {
            Basis::Z => self.measure_z(q, rng),
            Basis::X => {
                self.h(q);
                let m = self.measure_z(q, rng);
                self.h(q);
                m
            }
        }
    }

    /// Resets `q` to `|0>` or `|+>`.
    pub fn reset<R: Rng + ?Sized>(&mut self, q: usize, basis: Basis, rng: &mut R) {
        if self.measure_z(q, rng).outcome {
            self.pauli(q, Pauli::X);
        }
        if basis == Basis::X {
            self.h(q);
        }
    }

    /// Expectation value of a Pauli product if it is determined by the state:
    /// `Some(false)` for +1, `Some(true)` for −1, `None` when random.
    pub fn expectation(&mut self, ops: &[(usize, Pauli)]) -> Option<bool> {
        let n = self.n;
        let mut px = vec![0u64; self.words];
        let mut pz = vec![0u64; self.words];
        for &(q, p) in ops {
            let (w, m) = Self::bit(q);
            if p.has_x() {
                px[w] ^= m;
            }
            if p.has_z() {
                pz[w] ^= m;
            }
        }
        let anticommutes = |t: &Tableau, row: usize| {
            let w = t.words;
            let mut parity = 0u32;
            for k in 0..w {
                parity ^= ((t.xs[row * w + k] & pz[k]) ^ (t.zs[row * w + k] & px[k])).count_ones() & 1;
            }
            parity == 1
        };
        if (n..2 * n).any(|row| anticommutes(self, row)) {
            return None;
        }
        let scratch = 2 * n;
        self.clear_row(scratch);
        for row in 0..n {
            if anticommutes(self, row) {
                self.rowsum(scratch, row + n);
            }
        }
        let w = self.words;
        debug_assert!(self.xs[scratch * w..(scratch + 1) * w] == px[..]);
        debug_assert!(self.zs[scratch * w..(scratch + 1) * w] == pz[..]);
        Some(self.signs[scratch])
    }

    /// Checks that the rows form a symplectic basis with the right pairing.
    pub fn is_consistent(&self) -> bool {
        let n = self.n;
        let w = self.words;
        let sym = |a: usize, b: usize| {
            let mut parity = 0u32;
            for k in 0..w {
                parity ^= ((self.xs[a * w + k] & self.zs[b * w + k]) ^ (self.zs[a * w + k] & self.xs[b * w + k]))
                    .count_ones()
                    & 1;
            }
            parity == 1
        };
        for i in 0..2 * n {
            for j in i + 1..2 * n {
                let expected = j == i + n;
                if sym(i, j) != expected {
                    return false;
                }
            }
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn fresh_state_measures_zero() {
        let mut t = Tableau::new(3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for q in 0..3 {
            let m = t.measure_z(q, &mut rng);
            assert!(m.deterministic && !m.outcome);
        }
    }

    #[test]
    fn x_flips_outcome() {
        let mut t = Tableau::new(2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        t.apply(Gate::X(1)).unwrap();
        assert!(t.measure_z(1, &mut rng).outcome);
        assert!(!t.measure_z(0, &mut rng).outcome);
    }

    #[test]
    fn bell_pair_is_correlated() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mut ones = 0;
        for _ in 0..200 {
            let mut t = Tableau::new(2).unwrap();
            t.h(0);
            t.cnot(0, 1);
            assert_eq!(t.expectation(&[(0, Pauli::Z), (1, Pauli::Z)]), Some(false));
            assert_eq!(t.expectation(&[(0, Pauli::X), (1, Pauli::X)]), Some(false));
            assert_eq!(t.expectation(&[(0, Pauli::Y), (1, Pauli::Y)]), Some(true));
            assert_eq!(t.expectation(&[(0, Pauli::Z)]), None);
            let a = t.measure_z(0, &mut rng);
            let b = t.measure_z(1, &mut rng);
            assert!(!a.deterministic && b.deterministic);
            assert_eq!(a.outcome, b.outcome);
            ones += a.outcome as usize;
        }
        assert!((60..140).contains(&ones));
    }

    #[test]
    fn plus_state_measures_plus_in_x() {
        let mut t = Tableau::new(1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        t.reset(0, Basis::X, &mut rng);
        let m = t.measure(0, Basis::X, &mut rng);
        assert!(m.deterministic && !m.outcome);
        t.apply(Gate::Z(0)).unwrap();
        assert!(t.measure(0, Basis::X, &mut rng).outcome);
    }

    #[test]
    fn reset_clears_any_state() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mut t = Tableau::new(2).unwrap();
        t.h(0);
        t.cnot(0, 1);
        t.reset(1, Basis::Z, &mut rng);
        let m = t.measure_z(1, &mut rng);
        assert!(m.deterministic && !m.outcome);
    }

    #[test]
    fn wide_registers_cross_word_boundaries() {
        let mut t = Tableau::new(130).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        t.h(3);
        t.cnot(3, 70);
        t.cnot(70, 129);
        let ops = [(3, Pauli::Z), (129, Pauli::Z)];
        assert_eq!(t.expectation(&ops), Some(false));
        assert!(t.is_consistent());
        let a = t.measure_z(129, &mut rng).outcome;
        assert_eq!(t.measure_z(3, &mut rng).outcome, a);
    }

    #[test]
    fn invalid_gates_are_rejected() {
        let mut t = Tableau::new(2).unwrap();
        assert!(t.apply(Gate::H(2)).is_err());
        assert!(t.apply(Gate::Cnot(1, 1)).is_err());
        assert!(Tableau::new(0).is_err());
    }
}
