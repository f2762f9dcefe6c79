use super::config::{InitialState, SolverConfig};
use crate::error::{domain, Error, Result};
use crate::qubo::Hamiltonian;

/// Current configuration of a run with cached local fields, energy and the
/// dynamic offset.
#[derive(Debug, Clone)]
pub struct SolverState<H: Hamiltonian> {
    pub(crate) bits: Vec<bool>,
    pub(crate) fields: H::Fields,
    pub(crate) energy: f64,
    pub(crate) offset: f64,
}

/// Builds the starting state: all zeros unless the config supplies bits.
pub fn init_state<H: Hamiltonian>(model: &H, config: &SolverConfig) -> Result<SolverState<H>> {
    let n = model.dimension();
    if n == 0 {
        return Err(domain("model has no variables"));
    }
    let bits = match &config.initial_state {
        InitialState::Zeros => vec![false; n],
        InitialState::Given(b) if b.len() == n => b.clone(),
        InitialState::Given(b) => {
            return Err(Error::Dimension {
                expected: n,
                got: b.len(),
            })
        }
    };
    Ok(SolverState::from_bits(model, bits))
}

impl<H: Hamiltonian> SolverState<H> {
    pub fn from_bits(model: &H, bits: Vec<bool>) -> Self {
        let fields = model.init_fields(&bits);
        let energy = model.energy(&bits);
        Self {
            bits,
            fields,
            energy,
            offset: 0.0,
        }
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn fields(&self) -> &H::Fields {
        &self.fields
    }

    pub fn energy(&self) -> f64 {
        self.energy
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn set_offset(&mut self, offset: f64) {
        debug_assert!(offset >= 0.0);
        self.offset = offset;
    }

    #[inline]
    pub fn flip_delta(&self, model: &H, a: usize) -> f64 {
        model.flip_delta(&self.fields, &self.bits, a)
    }

    /// Toggles bit `a`, updating energy and the neighbours' fields, and
    /// clears the dynamic offset.
    pub fn apply_flip(&mut self, model: &H, a: usize) {
        self.energy += model.flip_delta(&self.fields, &self.bits, a);
        model.commit_flip(&mut self.fields, &self.bits, a);
        self.bits[a] = !self.bits[a];
        self.offset = 0.0;
    }

    /// Absolute gap between the tracked energy and a full recomputation.
    pub fn audit(&self, model: &H) -> f64 {
        (self.energy - model.energy(&self.bits)).abs()
    }

    /// Recomputes fields and energy from scratch, discarding accumulated
    /// rounding.
    pub fn resync(&mut self, model: &H) {
        self.fields = model.init_fields(&self.bits);
        self.energy = model.energy(&self.bits);
    }
}
