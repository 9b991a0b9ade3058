use nalgebra::DVector;
use num_complex::Complex64 as C64;

use serde::ser::{SerializeMap, SerializeStruct};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::space::HilbertSpace;

/// Pure state over a [`HilbertSpace`].
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    space: HilbertSpace,
    amplitudes: DVector<C64>,
}

impl StateVector {
    pub fn from_amplitudes(space: HilbertSpace, amplitudes: DVector<C64>) -> Result<Self> {
        if amplitudes.len() != space.dimension() {
            return Err(Error::InvalidParameter(format!(
                "amplitude vector of length {} does not match {space}",
                amplitudes.len()
            )));
        }
        Ok(Self { space, amplitudes })
    }

    pub fn from_vec(space: HilbertSpace, amplitudes: Vec<C64>) -> Result<Self> {
        Self::from_amplitudes(space, DVector::from_vec(amplitudes))
    }

    pub fn basis(space: HilbertSpace, index: usize) -> Self {
        assert!(index < space.dimension(), "basis index {index} out of range for {space}");
        let mut amplitudes = DVector::zeros(space.dimension());
        amplitudes[index] = C64::new(1.0, 0.0);
        Self { space, amplitudes }
    }

    pub fn from_label(space: HilbertSpace, label: &str) -> Result<Self> {
        Ok(Self::basis(space, space.parse_label(label)?))
    }

    /// Builds a state from `(label, amplitude)` pairs; the result is not
    /// renormalized.
    pub fn from_terms(space: HilbertSpace, terms: &[(&str, C64)]) -> Result<Self> {
        let mut amplitudes = DVector::zeros(space.dimension());
        for (label, amp) in terms {
            amplitudes[space.parse_label(label)?] += amp;
        }
        Ok(Self { space, amplitudes })
    }

    pub fn space(&self) -> &HilbertSpace {
        &self.space
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.amplitudes
    }

    pub fn amplitudes_mut(&mut self) -> &mut DVector<C64> {
        &mut self.amplitudes
    }

    pub fn into_amplitudes(self) -> DVector<C64> {
        self.amplitudes
    }

    pub fn amplitude(&self, index: usize) -> C64 {
        self.amplitudes[index]
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    pub fn normalized(mut self) -> Result<Self> {
        let n = self.norm();
        if !(n > 0.0 && n.is_finite()) {
            return Err(Error::InvalidParameter("cannot normalize a zero state".into()));
        }
        self.amplitudes.unscale_mut(n);
        Ok(self)
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &StateVector) -> Result<C64> {
        self.space.ensure_same(&other.space)?;
        Ok(self.amplitudes.dotc(&other.amplitudes))
    }

    pub fn scaled(&self, factor: C64) -> Self {
        Self { space: self.space, amplitudes: &self.amplitudes * factor }
    }

    /// Largest componentwise `|a_i - b_i|`; phase sensitive.
    pub fn max_abs_diff(&self, other: &StateVector) -> Result<f64> {
        self.space.ensure_same(&other.space)?;
        Ok(self.amplitudes.iter().zip(other.amplitudes.iter()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max))
    }

    /// Total population on basis states selected by `pred(index)`.
    pub fn population_where(&self, pred: impl Fn(usize) -> bool) -> f64 {
        self.amplitudes.iter().enumerate().filter(|(i, _)| pred(*i)).map(|(_, a)| a.norm_sqr()).sum()
    }

    /// Population outside the resonator vacuum.
    pub fn resonator_excited_population(&self) -> f64 {
        let s = self.space;
        self.population_where(|i| s.photons(i) != 0)
    }

    /// Nonzero components as `(label, amplitude)`.
    pub fn terms(&self, threshold: f64) -> Vec<(String, C64)> {
        self.amplitudes
            .iter()
            .enumerate()
            .filter(|(_, a)| a.norm() > threshold)
            .map(|(i, a)| (self.space.label(i), *a))
            .collect()
    }
}

/// Serialized as the space plus every nonzero amplitude keyed by its label,
/// in basis order, each as `[re, im]`.
impl Serialize for StateVector {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        struct Amplitudes<'a>(&'a StateVector);
        impl Serialize for Amplitudes<'_> {
            fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
                let terms = self.0.terms(0.0);
                let mut map = serializer.serialize_map(Some(terms.len()))?;
                for (label, a) in &terms {
                    map.serialize_entry(label, &[a.re, a.im])?;
                }
                map.end()
            }
        }
        let mut st = serializer.serialize_struct("StateVector", 3)?;
        st.serialize_field("n_qubits", &self.space.n_qubits())?;
        st.serialize_field("fock_cutoff", &self.space.fock_cutoff())?;
        st.serialize_field("amplitudes", &Amplitudes(self))?;
        st.end()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basis_and_labels() {
        let s = HilbertSpace::new(2, 3);
        let psi = StateVector::from_label(s, "e,g,0").unwrap();
        assert_eq!(psi.amplitude(s.parse_label("e,g,0").unwrap()), C64::new(1.0, 0.0));
        assert!((psi.norm() - 1.0).abs() < 1e-15);
        assert_eq!(psi.resonator_excited_population(), 0.0);
    }

    #[test]
    fn length_checked() {
        let s = HilbertSpace::new(1, 1);
        assert!(StateVector::from_vec(s, vec![C64::new(1.0, 0.0); 3]).is_err());
    }

    #[test]
    fn inner_requires_same_space() {
        let a = StateVector::basis(HilbertSpace::new(1, 1), 0);
        let b = StateVector::basis(HilbertSpace::new(1, 2), 0);
        assert!(matches!(a.inner(&b), Err(Error::SpaceMismatch { .. })));
    }
}
