use num_complex::Complex64;

use super::QubitError;

/// Amplitudes over the 2^n computational basis states.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    pub fn new(n_qubits: usize, amps: Vec<Complex64>) -> Result<Self, QubitError> {
        if amps.len() != 1usize << n_qubits {
            return Err(QubitError::DimensionMismatch { expected: 1 << n_qubits, got: amps.len() });
        }
        Ok(Self { n_qubits, amps })
    }

    /// Like [`StateVector::new`] but rescales to unit norm.
    pub fn normalized(n_qubits: usize, amps: Vec<Complex64>) -> Result<Self, QubitError> {
        let mut s = Self::new(n_qubits, amps)?;
        let n = s.norm();
        if n == 0.0 {
            return Err(QubitError::ZeroNorm);
        }
        s.scale(Complex64::new(1.0 / n, 0.0));
        Ok(s)
    }

    pub fn basis(n_qubits: usize, label: usize) -> Self {
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n_qubits];
        amps[label] = Complex64::new(1.0, 0.0);
        Self { n_qubits, amps }
    }

    pub(crate) fn zeros(n_qubits: usize) -> Self {
        Self { n_qubits, amps: vec![Complex64::new(0.0, 0.0); 1 << n_qubits] }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub(crate) fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// ⟨self|other⟩.
    pub fn inner(&self, other: &StateVector) -> Complex64 {
        debug_assert_eq!(self.dim(), other.dim());
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum()
    }

    /// |⟨self|other⟩|², invariant under global phases of either state.
    pub fn fidelity(&self, other: &StateVector) -> f64 {
        self.inner(other).norm_sqr()
    }

    pub fn scale(&mut self, c: Complex64) {
        for a in &mut self.amps {
            *a *= c;
        }
    }

    /// self += c · other
    pub fn axpy(&mut self, c: Complex64, other: &StateVector) {
        for (a, b) in self.amps.iter_mut().zip(&other.amps) {
            *a += c * b;
        }
    }

    /// Total weight on basis labels whose popcount equals `n`.
    pub fn weight_with_particle_number(&self, n: u32) -> f64 {
        self.amps.iter().enumerate().filter(|(b, _)| b.count_ones() == n).map(|(_, a)| a.norm_sqr()).sum()
    }
}
