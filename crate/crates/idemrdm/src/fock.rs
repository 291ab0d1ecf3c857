//! Fock-space core: orbitals, occupation states, ladder operators.
//!
//! States live in the graded Fock space over a d-dimensional single-particle
//! space. An occupation state is the sorted list of occupied basis orbital
//! ids: non-decreasing for bosons (repeats allowed), strictly increasing for
//! fermions. The fermionic reference sign is the ascending wedge order.
//!
//! Ladder conventions, fixed once here and relied on everywhere else:
//! creation on basis id i prepends i and reorders into canonical order,
//! picking up (-1)^p for fermions (p = number of occupied ids below i) and
//! sqrt(n_i + 1) for bosons; annihilation is the exact adjoint. Creation is
//! linear in its orbital argument, annihilation antilinear. Under these
//! conventions the overlap of two product states equals the permanent
//! (bosons) or determinant (fermions) of the orbital Gram matrix with no
//! extra prefactor, which is what `transition_amplitude` computes.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::{determinant, gram_matrix, permanent_ryser};

/// Amplitudes below this are dropped after ladder updates; keeps exact
/// cancellations from leaving zero-weight terms behind.
pub(crate) const AMPLITUDE_PRUNE: f64 = 1e-15;

/// Exchange statistics of the particle species.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Statistics {
    Boson,
    Fermion,
}

impl Statistics {
    /// Sign of a transposition: -1 for fermions, +1 for bosons.
    pub fn transposition_sign(self) -> f64 {
        match self {
            Statistics::Boson => 1.0,
            Statistics::Fermion => -1.0,
        }
    }

    /// Sign of a permutation given its inversion count.
    pub fn permutation_sign(self, inversions: usize) -> f64 {
        match self {
            Statistics::Boson => 1.0,
            Statistics::Fermion => {
                if inversions.is_multiple_of(2) {
                    1.0
                } else {
                    -1.0
                }
            }
        }
    }
}

/// The d-dimensional one-particle Hilbert space; a factory for orbitals.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SingleParticleSpace {
    dim: usize,
}

impl SingleParticleSpace {
    pub fn new(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::DimensionMismatch(0, 1));
        }
        Ok(Self { dim })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn basis_orbital(&self, id: usize) -> Result<Orbital> {
        Orbital::basis(self.dim, id)
    }

    pub fn orbital(&self, amps: Vec<Complex64>) -> Result<Orbital> {
        if amps.len() != self.dim {
            return Err(Error::DimensionMismatch(amps.len(), self.dim));
        }
        Orbital::new(amps)
    }
}

/// A single-particle state: dense amplitudes over the basis orbitals.
#[derive(Clone, Debug, PartialEq)]
pub struct Orbital {
    amps: Vec<Complex64>,
}

impl Orbital {
    pub fn new(amps: Vec<Complex64>) -> Result<Self> {
        if amps.is_empty() {
            return Err(Error::DimensionMismatch(0, 1));
        }
        for (i, z) in amps.iter().enumerate() {
            if !z.re.is_finite() || !z.im.is_finite() {
                return Err(Error::NonFiniteEntry(0, i));
            }
        }
        Ok(Self { amps })
    }

    pub fn basis(dim: usize, id: usize) -> Result<Self> {
        if id >= dim {
            return Err(Error::InvalidOccupation(format!(
                "basis orbital id {} out of range for dimension {}",
                id, dim
            )));
        }
        let mut amps = vec![Complex64::ZERO; dim];
        amps[id] = Complex64::ONE;
        Ok(Self { amps })
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    /// <self | other>, antilinear in self.
    pub fn braket(&self, other: &Orbital) -> Result<Complex64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch(self.dim(), other.dim()));
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if n < 1e-300 {
            return Err(Error::ZeroState);
        }
        Ok(self.scaled(Complex64::new(1.0 / n, 0.0)))
    }

    pub fn scaled(&self, z: Complex64) -> Self {
        Self {
            amps: self.amps.iter().map(|a| a * z).collect(),
        }
    }

    pub fn add(&self, other: &Orbital) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch(self.dim(), other.dim()));
        }
        Ok(Self {
            amps: self
                .amps
                .iter()
                .zip(&other.amps)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }
}

/// Sorted occupied-orbital ids. Non-decreasing for bosons, strictly
/// increasing for fermions; the empty list is the vacuum.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct OccupationState(Vec<usize>);

impl OccupationState {
    /// Builds from already-sorted ids, validating against the statistics.
    pub fn new(ids: Vec<usize>, stats: Statistics, dim: usize) -> Result<Self> {
        for window in ids.windows(2) {
            let ok = match stats {
                Statistics::Boson => window[0] <= window[1],
                Statistics::Fermion => window[0] < window[1],
            };
            if !ok {
                return Err(Error::InvalidOccupation(format!(
                    "ids {:?} not in canonical order for {:?}",
                    ids, stats
                )));
            }
        }
        if let Some(&last) = ids.last() {
            if last >= dim {
                return Err(Error::InvalidOccupation(format!(
                    "orbital id {} out of range for dimension {}",
                    last, dim
                )));
            }
        }
        Ok(Self(ids))
    }

    pub fn vacuum() -> Self {
        Self(Vec::new())
    }

    /// Internal constructor for ids already known to be canonically sorted,
    /// e.g. sublists of an already-validated state.
    pub(crate) fn from_sorted_unchecked(ids: Vec<usize>) -> Self {
        Self(ids)
    }

    pub fn ids(&self) -> &[usize] {
        &self.0
    }

    /// Particle number.
    pub fn grade(&self) -> usize {
        self.0.len()
    }

    /// Occupation count per orbital id.
    pub fn counts(&self) -> BTreeMap<usize, usize> {
        let mut counts = BTreeMap::new();
        for &id in &self.0 {
            *counts.entry(id).or_insert(0) += 1;
        }
        counts
    }

    /// Product of factorials of the per-orbital occupation counts.
    pub fn occupancy_factorial(&self) -> f64 {
        self.counts()
            .values()
            .map(|&n| (1..=n).product::<usize>() as f64)
            .product()
    }
}

impl Ord for OccupationState {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0
            .len()
            .cmp(&other.0.len())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for OccupationState {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// All occupation states of a given particle number over `dim` orbitals.
pub fn occupation_states(dim: usize, grade: usize, stats: Statistics) -> Vec<OccupationState> {
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(grade);
    fn rec(
        dim: usize,
        grade: usize,
        stats: Statistics,
        start: usize,
        current: &mut Vec<usize>,
        out: &mut Vec<OccupationState>,
    ) {
        if current.len() == grade {
            out.push(OccupationState(current.clone()));
            return;
        }
        for id in start..dim {
            current.push(id);
            let next = match stats {
                Statistics::Boson => id,
                Statistics::Fermion => id + 1,
            };
            rec(dim, grade, stats, next, current, out);
            current.pop();
        }
    }
    rec(dim, grade, stats, 0, &mut current, &mut out);
    out
}

/// A vector in Fock space: sparse complex amplitudes over occupation states.
#[derive(Clone, Debug, PartialEq)]
pub struct GradedVector {
    stats: Statistics,
    dim: usize,
    terms: BTreeMap<OccupationState, Complex64>,
}

impl GradedVector {
    pub fn zero(stats: Statistics, dim: usize) -> Self {
        Self {
            stats,
            dim,
            terms: BTreeMap::new(),
        }
    }

    pub fn vacuum(stats: Statistics, dim: usize) -> Self {
        let mut v = Self::zero(stats, dim);
        v.terms.insert(OccupationState::vacuum(), Complex64::ONE);
        v
    }

    pub fn from_terms<I>(stats: Statistics, dim: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (OccupationState, Complex64)>,
    {
        let mut v = Self::zero(stats, dim);
        for (state, amp) in terms {
            // Revalidate: the state may have been built for another species.
            let state = OccupationState::new(state.0, stats, dim)?;
            v.add_term(state, amp);
        }
        Ok(v)
    }

    pub fn statistics(&self) -> Statistics {
        self.stats
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> &BTreeMap<OccupationState, Complex64> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn max_grade(&self) -> usize {
        self.terms.keys().map(|s| s.grade()).max().unwrap_or(0)
    }

    pub fn norm(&self) -> f64 {
        self.terms
            .values()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn scaled(&self, z: Complex64) -> Self {
        let mut out = self.clone();
        out.terms.retain(|_, amp| {
            *amp *= z;
            amp.norm() > AMPLITUDE_PRUNE
        });
        out
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if n < 1e-300 {
            return Err(Error::ZeroState);
        }
        Ok(self.scaled(Complex64::new(1.0 / n, 0.0)))
    }

    fn add_term(&mut self, state: OccupationState, amp: Complex64) {
        let entry = self.terms.entry(state.clone()).or_insert(Complex64::ZERO);
        *entry += amp;
        if entry.norm() <= AMPLITUDE_PRUNE {
            self.terms.remove(&state);
        }
    }

    pub fn add_scaled(&mut self, other: &GradedVector, coeff: Complex64) -> Result<()> {
        if self.stats != other.stats {
            return Err(Error::StatisticsMismatch);
        }
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch(self.dim, other.dim));
        }
        for (state, amp) in &other.terms {
            self.add_term(state.clone(), amp * coeff);
        }
        Ok(())
    }
}

/// <u | v>, antilinear in u.
pub fn inner_product(u: &GradedVector, v: &GradedVector) -> Result<Complex64> {
    if u.stats != v.stats {
        return Err(Error::StatisticsMismatch);
    }
    if u.dim != v.dim {
        return Err(Error::DimensionMismatch(u.dim, v.dim));
    }
    let mut acc = Complex64::ZERO;
    for (state, amp) in &u.terms {
        if let Some(other) = v.terms.get(state) {
            acc += amp.conj() * other;
        }
    }
    Ok(acc)
}

/// Creation on a single basis orbital id applied to one occupation state.
/// Returns None when the result vanishes (fermionic double occupancy).
fn create_basis(
    state: &OccupationState,
    id: usize,
    stats: Statistics,
) -> Option<(OccupationState, f64)> {
    let ids = &state.0;
    let pos = ids.partition_point(|&x| x < id);
    match stats {
        Statistics::Fermion => {
            if ids.get(pos) == Some(&id) {
                return None;
            }
            let mut new_ids = Vec::with_capacity(ids.len() + 1);
            new_ids.extend_from_slice(&ids[..pos]);
            new_ids.push(id);
            new_ids.extend_from_slice(&ids[pos..]);
            let sign = if pos % 2 == 0 { 1.0 } else { -1.0 };
            Some((OccupationState(new_ids), sign))
        }
        Statistics::Boson => {
            let count = ids[pos..].iter().take_while(|&&x| x == id).count();
            let mut new_ids = Vec::with_capacity(ids.len() + 1);
            new_ids.extend_from_slice(&ids[..pos]);
            new_ids.push(id);
            new_ids.extend_from_slice(&ids[pos..]);
            Some((OccupationState(new_ids), ((count + 1) as f64).sqrt()))
        }
    }
}

/// Annihilation on a single basis orbital id; adjoint of `create_basis`.
fn annihilate_basis(
    state: &OccupationState,
    id: usize,
    stats: Statistics,
) -> Option<(OccupationState, f64)> {
    let ids = &state.0;
    let pos = ids.partition_point(|&x| x < id);
    if ids.get(pos) != Some(&id) {
        return None;
    }
    let mut new_ids = Vec::with_capacity(ids.len() - 1);
    new_ids.extend_from_slice(&ids[..pos]);
    new_ids.extend_from_slice(&ids[pos + 1..]);
    match stats {
        Statistics::Fermion => {
            let sign = if pos % 2 == 0 { 1.0 } else { -1.0 };
            Some((OccupationState(new_ids), sign))
        }
        Statistics::Boson => {
            let count = ids[pos..].iter().take_while(|&&x| x == id).count();
            Some((OccupationState(new_ids), (count as f64).sqrt()))
        }
    }
}

/// Applies the creation operator of `orbital` (linear in the orbital).
pub fn create_apply(v: &GradedVector, orbital: &Orbital) -> Result<GradedVector> {
    if orbital.dim() != v.dim {
        return Err(Error::DimensionMismatch(orbital.dim(), v.dim));
    }
    let mut out = GradedVector::zero(v.stats, v.dim);
    for (state, amp) in &v.terms {
        for (id, &coeff) in orbital.amps.iter().enumerate() {
            if coeff == Complex64::ZERO {
                continue;
            }
            if let Some((new_state, factor)) = create_basis(state, id, v.stats) {
                out.add_term(new_state, amp * coeff * factor);
            }
        }
    }
    Ok(out)
}

/// Applies the annihilation operator of `orbital` (antilinear in the
/// orbital), the adjoint of `create_apply` with the same orbital.
pub fn annihilate_apply(v: &GradedVector, orbital: &Orbital) -> Result<GradedVector> {
    if orbital.dim() != v.dim {
        return Err(Error::DimensionMismatch(orbital.dim(), v.dim));
    }
    let mut out = GradedVector::zero(v.stats, v.dim);
    for (state, amp) in &v.terms {
        for (id, &coeff) in orbital.amps.iter().enumerate() {
            if coeff == Complex64::ZERO {
                continue;
            }
            if let Some((new_state, factor)) = annihilate_basis(state, id, v.stats) {
                out.add_term(new_state, amp * coeff.conj() * factor);
            }
        }
    }
    Ok(out)
}

/// Product state a'(psi_1) ... a'(psi_n) |vac>, applied right to left.
/// Unnormalized: bosonic repeats and non-orthogonal orbitals change the norm.
pub fn from_orbitals(orbitals: &[Orbital], stats: Statistics) -> Result<GradedVector> {
    if orbitals.is_empty() {
        return Err(Error::EmptyOrbitals);
    }
    let dim = orbitals[0].dim();
    for orb in orbitals {
        if orb.dim() != dim {
            return Err(Error::DimensionMismatch(orb.dim(), dim));
        }
    }
    let mut v = GradedVector::vacuum(stats, dim);
    for orb in orbitals.iter().rev() {
        v = create_apply(&v, orb)?;
    }
    Ok(v)
}

/// Overlap of two product states via the orbital Gram matrix: permanent for
/// bosons, determinant for fermions. Equals
/// `inner_product(from_orbitals(bra), from_orbitals(ket))` exactly.
pub fn transition_amplitude(
    bra: &[Orbital],
    ket: &[Orbital],
    stats: Statistics,
) -> Result<Complex64> {
    let a = gram_matrix(bra, ket)?;
    match stats {
        Statistics::Boson => permanent_ryser(&a),
        Statistics::Fermion => determinant(&a),
    }
}
