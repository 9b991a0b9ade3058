//! Tensor layout of `N` two-level qubits and one truncated resonator mode.
//!
//! Basis index ordering is fixed: qubit 0 is the most significant factor and
//! the resonator is the last (least significant) factor, so
//!
//! ```text
//! index = mask * (fock_cutoff + 1) + n
//! ```
//!
//! where bit `N-1-k` of `mask` is set when qubit `k` is excited. Ground `|g>`
//! is level 0 and excited `|e>` is level 1.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Level {
    #[serde(rename = "g")]
    Ground,
    #[serde(rename = "e")]
    Excited,
}

impl Level {
    pub fn is_excited(self) -> bool {
        self == Level::Excited
    }

    pub fn symbol(self) -> char {
        match self {
            Level::Ground => 'g',
            Level::Excited => 'e',
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct HilbertSpace {
    n_qubits: usize,
    fock_cutoff: usize,
}

impl HilbertSpace {
    pub fn new(n_qubits: usize, fock_cutoff: usize) -> Self {
        assert!(n_qubits < usize::BITS as usize - 8, "too many qubits for a dense layout");
        Self { n_qubits, fock_cutoff }
    }

    /// Qubits only, resonator truncated to its vacuum.
    pub fn qubits_only(n_qubits: usize) -> Self {
        Self::new(n_qubits, 0)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn fock_cutoff(&self) -> usize {
        self.fock_cutoff
    }

    pub fn fock_levels(&self) -> usize {
        self.fock_cutoff + 1
    }

    pub fn dimension(&self) -> usize {
        (1usize << self.n_qubits) * self.fock_levels()
    }

    pub fn index_of(&self, levels: &[Level], photons: usize) -> Result<usize> {
        if levels.len() != self.n_qubits {
            return Err(Error::InvalidParameter(format!(
                "expected {} qubit levels, got {}",
                self.n_qubits,
                levels.len()
            )));
        }
        if photons > self.fock_cutoff {
            return Err(Error::InvalidParameter(format!(
                "photon number {photons} exceeds fock cutoff {}",
                self.fock_cutoff
            )));
        }
        let mask = levels.iter().fold(0usize, |acc, l| (acc << 1) | l.is_excited() as usize);
        Ok(mask * self.fock_levels() + photons)
    }

    pub fn qubit_mask(&self, index: usize) -> usize {
        index / self.fock_levels()
    }

    pub fn photons(&self, index: usize) -> usize {
        index % self.fock_levels()
    }

    /// Bit of `mask` that holds qubit `k`.
    pub fn qubit_bit(&self, k: usize) -> usize {
        1 << (self.n_qubits - 1 - k)
    }

    pub fn is_excited(&self, index: usize, k: usize) -> bool {
        self.qubit_mask(index) & self.qubit_bit(k) != 0
    }

    pub fn level(&self, index: usize, k: usize) -> Level {
        if self.is_excited(index, k) {
            Level::Excited
        } else {
            Level::Ground
        }
    }

    /// Index of the basis state with qubit `k` flipped; photons untouched.
    pub fn flip(&self, index: usize, k: usize) -> usize {
        let mask = self.qubit_mask(index) ^ self.qubit_bit(k);
        mask * self.fock_levels() + self.photons(index)
    }

    pub fn excitations(&self, index: usize) -> usize {
        self.qubit_mask(index).count_ones() as usize + self.photons(index)
    }

    pub fn label(&self, index: usize) -> String {
        let mut s = String::new();
        for k in 0..self.n_qubits {
            s.push(self.level(index, k).symbol());
            s.push(',');
        }
        s.push_str(&self.photons(index).to_string());
        s
    }

    /// Parses a ket label such as `"e,g,0"`: one `g`/`e` per qubit followed by
    /// the photon number. Surrounding `|` and `>` are tolerated.
    pub fn parse_label(&self, label: &str) -> Result<usize> {
        let trimmed = label.trim().trim_start_matches('|').trim_end_matches('>').trim_end_matches('⟩');
        let parts: Vec<&str> = trimmed.split(',').map(str::trim).collect();
        if parts.len() != self.n_qubits + 1 {
            return Err(Error::InvalidParameter(format!(
                "ket label {label:?} needs {} qubit levels and a photon number",
                self.n_qubits
            )));
        }
        let mut levels = Vec::with_capacity(self.n_qubits);
        for p in &parts[..self.n_qubits] {
            levels.push(match *p {
                "g" | "0" => Level::Ground,
                "e" | "1" => Level::Excited,
                other => return Err(Error::InvalidParameter(format!("unknown qubit level {other:?} in ket label"))),
            });
        }
        let photons: usize = parts[self.n_qubits]
            .parse()
            .map_err(|_| Error::InvalidParameter(format!("bad photon number in ket label {label:?}")))?;
        self.index_of(&levels, photons)
    }

    pub(crate) fn ensure_same(&self, other: &HilbertSpace) -> Result<()> {
        if self != other {
            return Err(Error::SpaceMismatch { left: self.to_string(), right: other.to_string() });
        }
        Ok(())
    }
}

impl fmt::Display for HilbertSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} qubit(s) x fock[0..={}] (dim {})", self.n_qubits, self.fock_cutoff, self.dimension())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dimension_and_ordering() {
        let s = HilbertSpace::new(2, 4);
        assert_eq!(s.dimension(), 20);
        use Level::*;
        assert_eq!(s.index_of(&[Ground, Ground], 0).unwrap(), 0);
        assert_eq!(s.index_of(&[Ground, Ground], 3).unwrap(), 3);
        assert_eq!(s.index_of(&[Ground, Excited], 0).unwrap(), 5);
        assert_eq!(s.index_of(&[Excited, Ground], 0).unwrap(), 10);
        assert_eq!(s.index_of(&[Excited, Excited], 4).unwrap(), 19);
        assert!(s.is_excited(10, 0));
        assert!(!s.is_excited(10, 1));
        assert_eq!(s.flip(10, 1), 15);
        assert_eq!(s.excitations(19), 6);
    }

    #[test]
    fn labels_round_trip() {
        let s = HilbertSpace::new(3, 2);
        for i in 0..s.dimension() {
            assert_eq!(s.parse_label(&s.label(i)).unwrap(), i);
        }
        assert_eq!(s.parse_label("|e,g,g,1>").unwrap(), s.parse_label("e,g,g,1").unwrap());
        assert!(s.parse_label("e,g,0").is_err());
        assert!(s.parse_label("e,x,g,0").is_err());
        assert!(s.parse_label("e,g,g,3").is_err());
    }
}
