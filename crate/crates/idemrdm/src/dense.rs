//! Explicit first-quantized representation: dense slot tensors, exchange
//! symmetrization, slot-subset states, and the symmetrized partial trace.
//!
//! A `LabeledTensor` stores a rank-N tensor over d-dimensional slots with
//! slot 0 most significant. Exchange symmetry is imposed the expensive way,
//! by summing all N! slot permutations, which is exactly why this module is
//! the cross-check oracle rather than the production path: it never uses the
//! occupation-number shortcuts the fast path relies on.
//!
//! `subsystem_basis_states` builds the slot-subset decomposition of an
//! n-particle occupation inside an N-slot state: one term per n-subset of
//! slots, all sharing the same symmetrized base tensor up to a configurable
//! phase per subset, globally normalized. Contracting such a bra against a
//! symmetrized N-slot ket and projecting the complement-slot remainder onto
//! kept-side occupations yields the reduced density matrix
//! (`partial_trace_explicit`). The subset phases cancel in every density
//! matrix entry, which the randomized suites exercise explicitly.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::entanglement::{Bipartition, DensityMatrix, Side};
use crate::error::{Error, Result};
use crate::fock::{
    from_orbitals, inner_product, transition_amplitude, GradedVector, OccupationState, Orbital,
    Statistics,
};

/// Dense storage cap: d^slots may not exceed this.
pub const DENSE_SIZE_GUARD: usize = 10_000_000;
/// Cap on slots! * d^slots work in full symmetrization.
const SYMMETRIZE_WORK_GUARD: f64 = 5e8;
/// Antisymmetrization smaller than this times the input scale means the
/// orbitals were linearly dependent.
pub const DEPENDENT_ORBITALS_TOL: f64 = 1e-10;

/// Dense rank-N tensor over d-dimensional slots, slot 0 most significant.
#[derive(Clone, Debug, PartialEq)]
pub struct LabeledTensor {
    dim: usize,
    slots: usize,
    data: Vec<Complex64>,
    symmetry: Option<Statistics>,
}

fn dense_len(dim: usize, slots: usize) -> Result<usize> {
    if dim == 0 {
        return Err(Error::DimensionMismatch(0, 1));
    }
    let len = (dim as u128).checked_pow(slots as u32);
    match len {
        Some(l) if l <= DENSE_SIZE_GUARD as u128 => Ok(l as usize),
        _ => Err(Error::SizeGuard { dim, slots }),
    }
}

impl LabeledTensor {
    pub fn zeros(dim: usize, slots: usize) -> Result<Self> {
        let len = dense_len(dim, slots)?;
        Ok(Self {
            dim,
            slots,
            data: vec![Complex64::ZERO; len],
            symmetry: None,
        })
    }

    pub fn from_data(
        dim: usize,
        slots: usize,
        data: Vec<Complex64>,
        symmetry: Option<Statistics>,
    ) -> Result<Self> {
        let len = dense_len(dim, slots)?;
        if data.len() != len {
            return Err(Error::BadMatrixShape {
                n: slots,
                got: data.len(),
            });
        }
        Ok(Self {
            dim,
            slots,
            data,
            symmetry,
        })
    }

    /// Unsymmetrized product of single-particle orbitals, one per slot.
    pub fn product(orbitals: &[Orbital]) -> Result<Self> {
        if orbitals.is_empty() {
            return Err(Error::EmptyOrbitals);
        }
        let dim = orbitals[0].dim();
        for orb in orbitals {
            if orb.dim() != dim {
                return Err(Error::DimensionMismatch(orb.dim(), dim));
            }
        }
        let slots = orbitals.len();
        let mut out = Self::zeros(dim, slots)?;
        let mut idx = vec![0usize; slots];
        for flat in 0..out.data.len() {
            decode_index(flat, dim, slots, &mut idx);
            let mut amp = Complex64::ONE;
            for (k, &j) in idx.iter().enumerate() {
                amp *= orbitals[k].amplitudes()[j];
                if amp == Complex64::ZERO {
                    break;
                }
            }
            out.data[flat] = amp;
        }
        Ok(out)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn slots(&self) -> usize {
        self.slots
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn symmetry(&self) -> Option<Statistics> {
        self.symmetry
    }

    pub fn index_of(&self, indices: &[usize]) -> usize {
        debug_assert_eq!(indices.len(), self.slots);
        indices.iter().fold(0, |acc, &j| acc * self.dim + j)
    }

    pub fn get(&self, indices: &[usize]) -> Complex64 {
        self.data[self.index_of(indices)]
    }

    pub fn set(&mut self, indices: &[usize], value: Complex64) {
        let idx = self.index_of(indices);
        self.data[idx] = value;
    }

    pub fn norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn scaled(&self, z: Complex64) -> Self {
        Self {
            dim: self.dim,
            slots: self.slots,
            data: self.data.iter().map(|a| a * z).collect(),
            symmetry: self.symmetry,
        }
    }

    pub fn add_scaled(&mut self, other: &Self, coeff: Complex64) -> Result<()> {
        if self.dim != other.dim || self.slots != other.slots {
            return Err(Error::DimensionMismatch(other.dim, self.dim));
        }
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += coeff * b;
        }
        // Sums do not preserve a symmetry claim unless both sides share it.
        if self.symmetry != other.symmetry {
            self.symmetry = None;
        }
        Ok(())
    }

    /// <self | other>, antilinear in self.
    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        if self.dim != other.dim || self.slots != other.slots {
            return Err(Error::DimensionMismatch(other.dim, self.dim));
        }
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if n < 1e-300 {
            return Err(Error::ZeroState);
        }
        Ok(self.scaled(Complex64::new(1.0 / n, 0.0)))
    }

    pub(crate) fn with_symmetry(mut self, symmetry: Option<Statistics>) -> Self {
        self.symmetry = symmetry;
        self
    }
}

pub(crate) fn decode_index(mut flat: usize, dim: usize, slots: usize, out: &mut [usize]) {
    debug_assert_eq!(out.len(), slots);
    for k in (0..slots).rev() {
        out[k] = flat % dim;
        flat /= dim;
    }
}

/// All permutations of 0..n with parity, via Heap's algorithm.
fn permutations_with_parity(n: usize) -> Vec<(Vec<usize>, bool)> {
    let mut items: Vec<usize> = (0..n).collect();
    let mut out = Vec::new();
    let mut odd = false;
    let mut counters = vec![0usize; n];
    out.push((items.clone(), odd));
    let mut i = 0;
    while i < n {
        if counters[i] < i {
            if i % 2 == 0 {
                items.swap(0, i);
            } else {
                items.swap(counters[i], i);
            }
            odd = !odd;
            out.push((items.clone(), odd));
            counters[i] += 1;
            i = 0;
        } else {
            counters[i] = 0;
            i += 1;
        }
    }
    out
}

fn factorial(n: usize) -> f64 {
    (1..=n).product::<usize>() as f64
}

pub(crate) fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc = 1.0;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc.round()
}

/// Sum over all slot permutations with exchange signs, unnormalized.
pub fn symmetrize_raw(t: &LabeledTensor, stats: Statistics) -> Result<LabeledTensor> {
    let n = t.slots;
    if factorial(n) * t.data.len() as f64 > SYMMETRIZE_WORK_GUARD {
        return Err(Error::ScaleGuard(format!(
            "full symmetrization of {} slots over dimension {} exceeds the work cap",
            n, t.dim
        )));
    }
    let perms = permutations_with_parity(n);
    let mut out = LabeledTensor::zeros(t.dim, n)?;
    let mut idx = vec![0usize; n];
    let mut permuted = vec![0usize; n];
    for flat in 0..out.data.len() {
        decode_index(flat, t.dim, n, &mut idx);
        let mut acc = Complex64::ZERO;
        for (perm, odd) in &perms {
            for (k, &p) in perm.iter().enumerate() {
                permuted[k] = idx[p];
            }
            let v = t.data[t.index_of(&permuted)];
            if stats == Statistics::Fermion && *odd {
                acc -= v;
            } else {
                acc += v;
            }
        }
        out.data[flat] = acc;
    }
    Ok(out.with_symmetry(Some(stats)))
}

/// Exchange-symmetrized unit-norm tensor. Errors with `DependentOrbitals`
/// when antisymmetrization annihilates the input.
pub fn symmetrize_explicit(t: &LabeledTensor, stats: Statistics) -> Result<LabeledTensor> {
    let raw = symmetrize_raw(t, stats)?;
    let scale = factorial(t.slots) * t.norm();
    if raw.norm() <= DEPENDENT_ORBITALS_TOL * scale {
        return Err(Error::DependentOrbitals);
    }
    raw.normalized()
}

/// Projector that symmetrizes only the first `k` slots, leaving the rest
/// alone: (1/k!) sum over permutations of the leading slots with exchange
/// signs. Idempotent.
pub fn elementary_symmetrize(t: &LabeledTensor, k: usize, stats: Statistics) -> Result<LabeledTensor> {
    let n = t.slots;
    if k > n {
        return Err(Error::GradeExceedsRank { k, rank: n });
    }
    if factorial(k) * t.data.len() as f64 > SYMMETRIZE_WORK_GUARD {
        return Err(Error::ScaleGuard(format!(
            "head symmetrization of {} of {} slots exceeds the work cap",
            k, n
        )));
    }
    let perms = permutations_with_parity(k);
    let inv_kfact = 1.0 / factorial(k);
    let mut out = LabeledTensor::zeros(t.dim, n)?;
    let mut idx = vec![0usize; n];
    let mut permuted = vec![0usize; n];
    for flat in 0..out.data.len() {
        decode_index(flat, t.dim, n, &mut idx);
        permuted[k..n].copy_from_slice(&idx[k..n]);
        let mut acc = Complex64::ZERO;
        for (perm, odd) in &perms {
            for (slot, &p) in perm.iter().enumerate() {
                permuted[slot] = idx[p];
            }
            let v = t.data[t.index_of(&permuted)];
            if stats == Statistics::Fermion && *odd {
                acc -= v;
            } else {
                acc += v;
            }
        }
        out.data[flat] = acc * inv_kfact;
    }
    Ok(out)
}

/// Nonzero entries of the unit-norm symmetrized basis product of `ids`:
/// (flat index, real coefficient) pairs. A basis product has one nonzero
/// entry, so its symmetrization has at most n! of them; building these
/// directly sidesteps the dense d^n sweep of `symmetrize_raw`.
pub(crate) fn symmetric_basis_entries(
    dim: usize,
    ids: &[usize],
    stats: Statistics,
) -> Result<Vec<(usize, f64)>> {
    for &id in ids {
        if id >= dim {
            return Err(Error::InvalidOccupation(format!(
                "orbital id {} out of range for dimension {}",
                id, dim
            )));
        }
    }
    let n = ids.len();
    let mut acc: BTreeMap<usize, f64> = BTreeMap::new();
    for (perm, odd) in permutations_with_parity(n) {
        let mut flat = 0usize;
        for &p in &perm {
            flat = flat * dim + ids[p];
        }
        let sign = if stats == Statistics::Fermion && odd {
            -1.0
        } else {
            1.0
        };
        *acc.entry(flat).or_insert(0.0) += sign;
    }
    acc.retain(|_, v| *v != 0.0);
    let norm = acc.values().map(|v| v * v).sum::<f64>().sqrt();
    if norm < 1e-300 {
        return Err(Error::ZeroState);
    }
    Ok(acc.into_iter().map(|(flat, v)| (flat, v / norm)).collect())
}

/// Product of basis orbitals e_{ids[0]} x ... x e_{ids[n-1]}, slot order.
pub fn basis_product_tensor(dim: usize, ids: &[usize]) -> Result<LabeledTensor> {
    let mut out = LabeledTensor::zeros(dim, ids.len())?;
    for &id in ids {
        if id >= dim {
            return Err(Error::InvalidOccupation(format!(
                "orbital id {} out of range for dimension {}",
                id, dim
            )));
        }
    }
    let flat = ids.iter().fold(0, |acc, &j| acc * dim + j);
    out.data[flat] = Complex64::ONE;
    Ok(out)
}

/// Unit-norm symmetrized tensor of one occupation state; the dense image of
/// the occupation basis vector. Grade 0 gives the scalar 1.
pub fn unit_symmetric_basis_tensor(
    dim: usize,
    occ: &OccupationState,
    stats: Statistics,
) -> Result<LabeledTensor> {
    if occ.grade() == 0 {
        return LabeledTensor::from_data(dim, 0, vec![Complex64::ONE], Some(stats));
    }
    let mut out = LabeledTensor::zeros(dim, occ.grade())?;
    for (flat, coef) in symmetric_basis_entries(dim, occ.ids(), stats)? {
        out.data[flat] = Complex64::new(coef, 0.0);
    }
    Ok(out.with_symmetry(Some(stats)))
}

/// Dense image of a Fock vector whose terms all sit at one grade; unitary,
/// so norms and inner products carry over exactly.
pub fn dense_from_graded(v: &GradedVector, slots: usize) -> Result<LabeledTensor> {
    let mut out = LabeledTensor::zeros(v.dim(), slots)?;
    for (occ, amp) in v.terms() {
        if occ.grade() != slots {
            return Err(Error::InvalidOccupation(format!(
                "term of grade {} cannot embed into {} slots",
                occ.grade(),
                slots
            )));
        }
        let basis = unit_symmetric_basis_tensor(v.dim(), occ, v.statistics())?;
        out.add_scaled(&basis, *amp)?;
    }
    Ok(out.with_symmetry(Some(v.statistics())))
}

/// Phase per slot subset, used to twist the subsystem decomposition. The
/// default phase is zero everywhere; density matrices must not depend on the
/// choice, which the randomized suites check.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct PhaseAssignment {
    phases: BTreeMap<Vec<usize>, f64>,
}

impl PhaseAssignment {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn set_phase(&mut self, mut subset: Vec<usize>, theta: f64) {
        subset.sort_unstable();
        subset.dedup();
        self.phases.insert(subset, theta);
    }

    pub fn phase(&self, subset: &[usize]) -> f64 {
        self.phases.get(subset).copied().unwrap_or(0.0)
    }

    pub fn factor(&self, subset: &[usize]) -> Complex64 {
        let theta = self.phase(subset);
        Complex64::new(theta.cos(), theta.sin())
    }
}

/// A vector that lives on n of N slots: one dense rank-n tensor per sorted
/// n-subset of slot positions.
#[derive(Clone, Debug, PartialEq)]
pub struct PartialSlotVector {
    dim: usize,
    total_slots: usize,
    rank: usize,
    terms: BTreeMap<Vec<usize>, Vec<Complex64>>,
}

impl PartialSlotVector {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn total_slots(&self) -> usize {
        self.total_slots
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn subsets(&self) -> impl Iterator<Item = &Vec<usize>> {
        self.terms.keys()
    }

    pub fn term(&self, subset: &[usize]) -> Option<&[Complex64]> {
        self.terms.get(subset).map(|v| v.as_slice())
    }

    pub fn norm(&self) -> f64 {
        self.terms
            .values()
            .flat_map(|t| t.iter())
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Contracts this vector as a bra against a full N-slot ket. Each
    /// n-subset term eats its slots; the remainder lives on the complement
    /// subset with the surviving N - n slots.
    pub fn contract_bra(&self, ket: &LabeledTensor) -> Result<PartialSlotVector> {
        if ket.dim() != self.dim {
            return Err(Error::DimensionMismatch(ket.dim(), self.dim));
        }
        if ket.slots() != self.total_slots {
            return Err(Error::DimensionMismatch(ket.slots(), self.total_slots));
        }
        let d = self.dim;
        let n = self.rank;
        let total = self.total_slots;
        let m = total - n;
        let m_len = dense_len(d, m)?;
        let n_len = dense_len(d, n)?;
        let stride: Vec<usize> = (0..total)
            .map(|k| d.pow((total - 1 - k) as u32))
            .collect();
        let mut out_terms = BTreeMap::new();
        let mut js = vec![0usize; n];
        let mut jc = vec![0usize; m];
        for (subset, bra) in &self.terms {
            let complement: Vec<usize> = (0..total).filter(|s| !subset.contains(s)).collect();
            let mut out = vec![Complex64::ZERO; m_len];
            for (flat_s, amp) in bra.iter().enumerate().take(n_len) {
                decode_index(flat_s, d, n, &mut js);
                let b = amp.conj();
                if b == Complex64::ZERO {
                    continue;
                }
                let base: usize = subset
                    .iter()
                    .zip(&js)
                    .map(|(&slot, &j)| j * stride[slot])
                    .sum();
                for (flat_c, slot_out) in out.iter_mut().enumerate() {
                    decode_index(flat_c, d, m, &mut jc);
                    let full: usize = base
                        + complement
                            .iter()
                            .zip(&jc)
                            .map(|(&slot, &j)| j * stride[slot])
                            .sum::<usize>();
                    *slot_out += b * ket.data()[full];
                }
            }
            out_terms.insert(complement, out);
        }
        Ok(PartialSlotVector {
            dim: d,
            total_slots: total,
            rank: m,
            terms: out_terms,
        })
    }
}

pub(crate) fn subsets_of_size(total: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(k);
    fn rec(total: usize, k: usize, start: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if current.len() == k {
            out.push(current.clone());
            return;
        }
        for s in start..total {
            current.push(s);
            rec(total, k, s + 1, current, out);
            current.pop();
        }
    }
    rec(total, k, 0, &mut current, &mut out);
    out
}

/// Slot-subset decomposition of an n-particle occupation inside an N-slot
/// state: one term per n-subset of slots, each the symmetrized basis tensor
/// of the occupation times that subset's phase, globally unit-normalized.
/// With three slots and one particle in orbital e the result is
/// (e on slot 0 + e on slot 1 + e on slot 2) / sqrt(3).
pub fn subsystem_basis_states(
    occ: &OccupationState,
    dim: usize,
    total_slots: usize,
    stats: Statistics,
    phases: &PhaseAssignment,
) -> Result<PartialSlotVector> {
    let n = occ.grade();
    if n > total_slots {
        return Err(Error::SubsystemTooLarge {
            n,
            total: total_slots,
        });
    }
    if n == 0 {
        let mut terms = BTreeMap::new();
        terms.insert(Vec::new(), vec![phases.factor(&[])]);
        return Ok(PartialSlotVector {
            dim,
            total_slots,
            rank: 0,
            terms,
        });
    }
    let entries = symmetric_basis_entries(dim, occ.ids(), stats)?;
    let base_len = dense_len(dim, n)?;
    let subsets = subsets_of_size(total_slots, n);
    let inv_total = 1.0 / (subsets.len() as f64).sqrt();
    let mut terms = BTreeMap::new();
    for subset in subsets {
        let factor = phases.factor(&subset) * inv_total;
        let mut data = vec![Complex64::ZERO; base_len];
        for &(flat, coef) in &entries {
            data[flat] = factor * coef;
        }
        terms.insert(subset, data);
    }
    Ok(PartialSlotVector {
        dim,
        total_slots,
        rank: n,
        terms,
    })
}

/// Occupations of one grade drawn from an explicit orbital id list.
pub(crate) fn occupations_from_ids(
    ids: &[usize],
    grade: usize,
    stats: Statistics,
) -> Vec<OccupationState> {
    let mut sorted = ids.to_vec();
    sorted.sort_unstable();
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(grade);
    fn rec(
        ids: &[usize],
        grade: usize,
        stats: Statistics,
        start: usize,
        current: &mut Vec<usize>,
        out: &mut Vec<OccupationState>,
    ) {
        if current.len() == grade {
            out.push(OccupationState::from_sorted_unchecked(current.clone()));
            return;
        }
        for pos in start..ids.len() {
            current.push(ids[pos]);
            let next = match stats {
                Statistics::Boson => pos,
                Statistics::Fermion => pos + 1,
            };
            rec(ids, grade, stats, next, current, out);
            current.pop();
        }
    }
    rec(&sorted, grade, stats, 0, &mut current, &mut out);
    out
}

/// Reduced density matrix by explicit slot-subset contraction: trace out the
/// orbitals of one side of the bipartition from dense symmetrized tensors.
///
/// For every traced-side occupation of every particle number, the matching
/// slot-subset bra is contracted against the state; the remainder on the
/// reference subset (the trailing slots) is projected onto kept-side
/// occupations. The subset count enters as a binomial factor so that the
/// kept coefficients match the occupation-number factorization up to a
/// phase that is constant per traced occupation, hence invisible in the
/// density matrix. Components are weighted, each normalized first; the
/// result is trace-normalized.
pub fn partial_trace_explicit(
    components: &[(f64, LabeledTensor)],
    bipartition: &Bipartition,
    traced: Side,
    phases: &PhaseAssignment,
) -> Result<DensityMatrix> {
    if components.is_empty() {
        return Err(Error::ZeroState);
    }
    let stats = match components[0].1.symmetry() {
        Some(s) => s,
        None => return Err(Error::StatisticsMismatch),
    };
    let mut accum: BTreeMap<(OccupationState, OccupationState), Complex64> = BTreeMap::new();
    let traced_ids = bipartition.side_ids(traced);
    let kept_ids = bipartition.side_ids(traced.other());
    for (weight, tensor) in components {
        if *weight <= 0.0 {
            return Err(Error::BadWeights(*weight));
        }
        if tensor.symmetry() != Some(stats) {
            return Err(Error::StatisticsMismatch);
        }
        if tensor.dim() != bipartition.dim() {
            return Err(Error::DimensionMismatch(tensor.dim(), bipartition.dim()));
        }
        let psi = tensor.normalized()?;
        let total = psi.slots();
        for traced_grade in 0..=total {
            let kept_grade = total - traced_grade;
            let reference_subset: Vec<usize> = (traced_grade..total).collect();
            let scale = binomial(total, traced_grade);
            let kept_states = occupations_from_ids(kept_ids, kept_grade, stats);
            if kept_states.is_empty() {
                continue;
            }
            let kept_entries: Vec<Vec<(usize, f64)>> = kept_states
                .iter()
                .map(|b| symmetric_basis_entries(psi.dim(), b.ids(), stats))
                .collect::<Result<_>>()?;
            for a in occupations_from_ids(traced_ids, traced_grade, stats) {
                let bra = subsystem_basis_states(&a, psi.dim(), total, stats, phases)?;
                let w = bra.contract_bra(&psi)?;
                let w_ref = match w.term(&reference_subset) {
                    Some(t) => t,
                    None => continue,
                };
                // The kept basis tensors are real, so the bra side needs no
                // conjugation; only their few nonzero entries contribute.
                let coeffs: Vec<Complex64> = kept_entries
                    .iter()
                    .map(|entries| {
                        let mut acc = Complex64::ZERO;
                        for &(flat, coef) in entries {
                            acc += coef * w_ref[flat];
                        }
                        scale * acc
                    })
                    .collect();
                for (i, b) in kept_states.iter().enumerate() {
                    if coeffs[i] == Complex64::ZERO {
                        continue;
                    }
                    for (jj, b2) in kept_states.iter().enumerate() {
                        let value = weight * coeffs[i] * coeffs[jj].conj();
                        if value == Complex64::ZERO {
                            continue;
                        }
                        *accum
                            .entry((b.clone(), b2.clone()))
                            .or_insert(Complex64::ZERO) += value;
                    }
                }
            }
        }
    }
    DensityMatrix::from_accumulated(stats, accum)
}

/// Distinguishable-particle partial trace over explicit slots: no exchange
/// symmetry, plain multi-index bookkeeping. Returns the kept-slot matrix,
/// row-major over the kept multi-index.
pub fn slot_partial_trace(t: &LabeledTensor, traced_slots: &[usize]) -> Result<(usize, Vec<Complex64>)> {
    let total = t.slots();
    let mut traced = traced_slots.to_vec();
    traced.sort_unstable();
    traced.dedup();
    if traced.len() != traced_slots.len() || traced.iter().any(|&s| s >= total) {
        return Err(Error::BadBipartition(format!(
            "traced slots {:?} invalid for {} slots",
            traced_slots, total
        )));
    }
    let kept: Vec<usize> = (0..total).filter(|s| !traced.contains(s)).collect();
    let d = t.dim();
    let m = kept.len();
    let kept_len = dense_len(d, m)?;
    if kept_len.checked_mul(kept_len).is_none_or(|x| x > DENSE_SIZE_GUARD) {
        return Err(Error::SizeGuard { dim: d, slots: 2 * m });
    }
    let stride: Vec<usize> = (0..total).map(|k| d.pow((total - 1 - k) as u32)).collect();
    let traced_len = dense_len(d, traced.len())?;
    let mut rho = vec![Complex64::ZERO; kept_len * kept_len];
    let mut jk = vec![0usize; m];
    let mut jk2 = vec![0usize; m];
    let mut jt = vec![0usize; traced.len()];
    for row in 0..kept_len {
        decode_index(row, d, m, &mut jk);
        let row_base: usize = kept.iter().zip(&jk).map(|(&s, &j)| j * stride[s]).sum();
        for col in 0..kept_len {
            decode_index(col, d, m, &mut jk2);
            let col_base: usize = kept.iter().zip(&jk2).map(|(&s, &j)| j * stride[s]).sum();
            let mut acc = Complex64::ZERO;
            for flat_t in 0..traced_len {
                decode_index(flat_t, d, traced.len(), &mut jt);
                let off: usize = traced.iter().zip(&jt).map(|(&s, &j)| j * stride[s]).sum();
                acc += t.data()[row_base + off] * t.data()[col_base + off].conj();
            }
            rho[row * kept_len + col] = acc;
        }
    }
    Ok((m, rho))
}

/// Report from the three-route amplitude comparison.
#[derive(Clone, Debug)]
pub struct CorrespondenceReport {
    pub max_residual: f64,
    pub cases: usize,
    pub pass: bool,
}

/// Checks that normalized transition amplitudes agree along three routes:
/// dense symmetrized tensors, ladder-operator products, and the Gram-matrix
/// permanent or determinant. Bras are basis occupations plus random orbital
/// lists; nearly dependent draws are resampled.
pub fn sea_correspondence(
    orbitals: &[Orbital],
    stats: Statistics,
    tol: f64,
    seed: u64,
) -> Result<CorrespondenceReport> {
    use rand::{Rng, SeedableRng};
    let n = orbitals.len();
    if n == 0 {
        return Err(Error::EmptyOrbitals);
    }
    let dim = orbitals[0].dim();
    if n > 5 || dim > 6 {
        return Err(Error::ScaleGuard(format!(
            "correspondence check capped at 5 particles over 6 orbitals, got {} over {}",
            n, dim
        )));
    }

    let ket_dense = symmetrize_explicit(&LabeledTensor::product(orbitals)?, stats)?;
    let ket_fock = from_orbitals(orbitals, stats)?;
    let ket_fock_norm = ket_fock.norm();
    let ket_gram = transition_amplitude(orbitals, orbitals, stats)?.re;
    if ket_gram <= 0.0 {
        return Err(Error::DependentOrbitals);
    }

    let mut bras: Vec<Vec<Orbital>> = Vec::new();
    for occ in crate::fock::occupation_states(dim, n, stats).into_iter().take(12) {
        let orbs: Result<Vec<Orbital>> = occ.ids().iter().map(|&id| Orbital::basis(dim, id)).collect();
        bras.push(orbs?);
    }
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut random_needed = 6;
    let mut attempts = 0;
    while random_needed > 0 && attempts < 200 {
        attempts += 1;
        let cand: Vec<Orbital> = (0..n)
            .map(|_| {
                Orbital::new(
                    (0..dim)
                        .map(|_| {
                            Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
                        })
                        .collect(),
                )
                .unwrap()
            })
            .collect();
        let self_overlap = transition_amplitude(&cand, &cand, stats)?.re;
        let scale: f64 = cand.iter().map(|o| o.norm().powi(2)).product();
        if self_overlap <= 1e-6 * scale {
            continue;
        }
        bras.push(cand);
        random_needed -= 1;
    }

    let mut max_residual: f64 = 0.0;
    let mut cases = 0;
    for bra in &bras {
        let bra_gram = transition_amplitude(bra, bra, stats)?.re;
        if bra_gram <= 0.0 {
            continue;
        }
        // Dense route.
        let bra_dense = symmetrize_explicit(&LabeledTensor::product(bra)?, stats)?;
        let r_dense = bra_dense.inner(&ket_dense)?;
        // Ladder route.
        let bra_fock = from_orbitals(bra, stats)?;
        let r_ladder =
            inner_product(&bra_fock, &ket_fock)? / (bra_fock.norm() * ket_fock_norm);
        // Gram kernel route.
        let r_kernel = transition_amplitude(bra, orbitals, stats)? / (bra_gram * ket_gram).sqrt();
        let residual = (r_dense - r_ladder)
            .norm()
            .max((r_ladder - r_kernel).norm())
            .max((r_dense - r_kernel).norm());
        max_residual = max_residual.max(residual);
        cases += 1;
    }
    Ok(CorrespondenceReport {
        max_residual,
        cases,
        pass: max_residual <= tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::occupation_states;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_orbital(rng: &mut ChaCha8Rng, dim: usize) -> Orbital {
        Orbital::new(
            (0..dim)
                .map(|_| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
                .collect(),
        )
        .unwrap()
    }

    fn random_tensor(rng: &mut ChaCha8Rng, dim: usize, slots: usize) -> LabeledTensor {
        let len = dim.pow(slots as u32);
        LabeledTensor::from_data(
            dim,
            slots,
            (0..len)
                .map(|_| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
                .collect(),
            None,
        )
        .unwrap()
    }

    #[test]
    fn product_tensor_entries() {
        let e0 = Orbital::basis(2, 0).unwrap();
        let e1 = Orbital::basis(2, 1).unwrap();
        let t = LabeledTensor::product(&[e0, e1]).unwrap();
        assert_eq!(t.get(&[0, 1]), Complex64::ONE);
        assert_eq!(t.get(&[1, 0]), Complex64::ZERO);
    }

    #[test]
    fn symmetrized_tensors_have_exchange_symmetry() {
        let mut rng = ChaCha8Rng::seed_from_u64(61);
        let t = random_tensor(&mut rng, 3, 3);
        let sym = symmetrize_raw(&t, Statistics::Boson).unwrap();
        let anti = symmetrize_raw(&t, Statistics::Fermion).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    let s = sym.get(&[i, j, k]);
                    assert!((s - sym.get(&[j, i, k])).norm() < 1e-12);
                    assert!((s - sym.get(&[k, j, i])).norm() < 1e-12);
                    let a = anti.get(&[i, j, k]);
                    assert!((a + anti.get(&[j, i, k])).norm() < 1e-12);
                    assert!((a + anti.get(&[i, k, j])).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn symmetrize_explicit_unit_norm_and_dependence_error() {
        let mut rng = ChaCha8Rng::seed_from_u64(67);
        let a = random_orbital(&mut rng, 3);
        let b = random_orbital(&mut rng, 3);
        let t = LabeledTensor::product(&[a.clone(), b]).unwrap();
        let sym = symmetrize_explicit(&t, Statistics::Fermion).unwrap();
        assert!((sym.norm() - 1.0).abs() < 1e-12);
        let dep = LabeledTensor::product(&[a.clone(), a]).unwrap();
        assert!(matches!(
            symmetrize_explicit(&dep, Statistics::Fermion),
            Err(Error::DependentOrbitals)
        ));
    }

    #[test]
    fn elementary_symmetrize_is_idempotent() {
        let mut rng = ChaCha8Rng::seed_from_u64(71);
        for stats in [Statistics::Boson, Statistics::Fermion] {
            let t = random_tensor(&mut rng, 3, 3);
            let once = elementary_symmetrize(&t, 2, stats).unwrap();
            let twice = elementary_symmetrize(&once, 2, stats).unwrap();
            let mut diff = once.clone();
            diff.add_scaled(&twice, -Complex64::ONE).unwrap();
            assert!(diff.norm() < 1e-12, "stats={:?}", stats);
        }
    }

    #[test]
    fn elementary_symmetrize_kills_repeated_fermion_head_indices() {
        let mut rng = ChaCha8Rng::seed_from_u64(73);
        let t = random_tensor(&mut rng, 3, 3);
        let proj = elementary_symmetrize(&t, 2, Statistics::Fermion).unwrap();
        for i in 0..3 {
            for k in 0..3 {
                assert!(proj.get(&[i, i, k]).norm() < 1e-12);
            }
        }
        assert!(matches!(
            elementary_symmetrize(&t, 4, Statistics::Fermion),
            Err(Error::GradeExceedsRank { .. })
        ));
    }

    #[test]
    fn unit_basis_tensors_are_orthonormal() {
        for stats in [Statistics::Boson, Statistics::Fermion] {
            let states = occupation_states(3, 2, stats);
            let tensors: Vec<LabeledTensor> = states
                .iter()
                .map(|occ| unit_symmetric_basis_tensor(3, occ, stats).unwrap())
                .collect();
            for (i, ti) in tensors.iter().enumerate() {
                for (j, tj) in tensors.iter().enumerate() {
                    let expect = if i == j { 1.0 } else { 0.0 };
                    let got = ti.inner(tj).unwrap();
                    assert!(
                        (got - c(expect, 0.0)).norm() < 1e-12,
                        "stats={:?} i={} j={}",
                        stats,
                        i,
                        j
                    );
                }
            }
        }
    }

    #[test]
    fn dense_embedding_preserves_inner_products() {
        let mut rng = ChaCha8Rng::seed_from_u64(79);
        for stats in [Statistics::Boson, Statistics::Fermion] {
            let states = occupation_states(4, 2, stats);
            let mut u = GradedVector::zero(stats, 4);
            let mut v = GradedVector::zero(stats, 4);
            for occ in states {
                let basis = GradedVector::from_terms(
                    stats,
                    4,
                    [(occ.clone(), Complex64::ONE)],
                )
                .unwrap();
                u.add_scaled(&basis, c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
                    .unwrap();
                v.add_scaled(&basis, c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
                    .unwrap();
            }
            let du = dense_from_graded(&u, 2).unwrap();
            let dv = dense_from_graded(&v, 2).unwrap();
            let direct = inner_product(&u, &v).unwrap();
            let dense = du.inner(&dv).unwrap();
            assert!((direct - dense).norm() < 1e-12, "stats={:?}", stats);
        }
    }

    #[test]
    fn one_particle_over_three_slots_splits_evenly() {
        let occ = OccupationState::new(vec![2], Statistics::Fermion, 5).unwrap();
        let psv = subsystem_basis_states(&occ, 5, 3, Statistics::Fermion, &PhaseAssignment::zero())
            .unwrap();
        assert_eq!(psv.rank(), 1);
        assert_eq!(psv.subsets().count(), 3);
        let expect = 1.0 / 3f64.sqrt();
        for subset in [vec![0], vec![1], vec![2]] {
            let term = psv.term(&subset).unwrap();
            assert!((term[2] - c(expect, 0.0)).norm() < 1e-12);
            assert!(term.iter().map(|z| z.norm_sqr()).sum::<f64>() - expect * expect < 1e-12);
        }
        assert!((psv.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn contract_bra_lands_on_complement_subsets() {
        let mut rng = ChaCha8Rng::seed_from_u64(83);
        let ket = symmetrize_raw(&random_tensor(&mut rng, 3, 3), Statistics::Boson).unwrap();
        let occ = OccupationState::new(vec![1], Statistics::Boson, 3).unwrap();
        let bra =
            subsystem_basis_states(&occ, 3, 3, Statistics::Boson, &PhaseAssignment::zero()).unwrap();
        let w = bra.contract_bra(&ket).unwrap();
        assert_eq!(w.rank(), 2);
        let keys: Vec<Vec<usize>> = w.subsets().cloned().collect();
        assert_eq!(keys, vec![vec![0, 1], vec![0, 2], vec![1, 2]]);
    }

    #[test]
    fn explicit_trace_on_split_boson_pair() {
        // State (a'(psi))^2 |vac> with psi = (e0+e1)/sqrt2, orbital 0 kept:
        // diagonal (1/4, 1/2, 1/4) over vacuum, one, and two kept particles.
        let psi = Orbital::new(vec![c(1.0 / 2f64.sqrt(), 0.0), c(1.0 / 2f64.sqrt(), 0.0)]).unwrap();
        let t = symmetrize_explicit(
            &LabeledTensor::product(&[psi.clone(), psi]).unwrap(),
            Statistics::Boson,
        )
        .unwrap();
        let bip = Bipartition::new(2, vec![0]).unwrap();
        let rho = partial_trace_explicit(
            &[(1.0, t)],
            &bip,
            Side::Right,
            &PhaseAssignment::zero(),
        )
        .unwrap();
        let vac = OccupationState::vacuum();
        let one = OccupationState::new(vec![0], Statistics::Boson, 2).unwrap();
        let two = OccupationState::new(vec![0, 0], Statistics::Boson, 2).unwrap();
        assert!((rho.entry_by_label(&vac, &vac).unwrap() - c(0.25, 0.0)).norm() < 1e-12);
        assert!((rho.entry_by_label(&one, &one).unwrap() - c(0.5, 0.0)).norm() < 1e-12);
        assert!((rho.entry_by_label(&two, &two).unwrap() - c(0.25, 0.0)).norm() < 1e-12);
        assert!((rho.trace() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn explicit_trace_keeps_coherence_within_a_sector() {
        // (|{0,2}> + |{1,2}>)/sqrt2 with orbital 2 traced out keeps the
        // off-diagonal between kept occupations {0} and {1}.
        let stats = Statistics::Fermion;
        let amp = c(1.0 / 2f64.sqrt(), 0.0);
        let v = GradedVector::from_terms(
            stats,
            3,
            [
                (OccupationState::new(vec![0, 2], stats, 3).unwrap(), amp),
                (OccupationState::new(vec![1, 2], stats, 3).unwrap(), amp),
            ],
        )
        .unwrap();
        let t = dense_from_graded(&v, 2).unwrap();
        let bip = Bipartition::new(3, vec![0, 1]).unwrap();
        let rho =
            partial_trace_explicit(&[(1.0, t)], &bip, Side::Right, &PhaseAssignment::zero())
                .unwrap();
        let a = OccupationState::new(vec![0], stats, 3).unwrap();
        let b = OccupationState::new(vec![1], stats, 3).unwrap();
        assert!((rho.entry_by_label(&a, &a).unwrap() - c(0.5, 0.0)).norm() < 1e-12);
        assert!((rho.entry_by_label(&a, &b).unwrap().norm() - 0.5).abs() < 1e-12);
        assert!((rho.trace() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn explicit_trace_is_phase_independent() {
        let mut rng = ChaCha8Rng::seed_from_u64(89);
        let stats = Statistics::Fermion;
        let a = random_orbital(&mut rng, 4);
        let b = random_orbital(&mut rng, 4);
        let c3 = random_orbital(&mut rng, 4);
        let t = symmetrize_explicit(&LabeledTensor::product(&[a, b, c3]).unwrap(), stats).unwrap();
        let bip = Bipartition::new(4, vec![0, 1]).unwrap();
        let plain = partial_trace_explicit(
            &[(1.0, t.clone())],
            &bip,
            Side::Right,
            &PhaseAssignment::zero(),
        )
        .unwrap();
        let mut phases = PhaseAssignment::zero();
        for k in 0..=3 {
            for subset in subsets_of_size(3, k) {
                phases.set_phase(subset, rng.random_range(0.0..std::f64::consts::TAU));
            }
        }
        let twisted =
            partial_trace_explicit(&[(1.0, t)], &bip, Side::Right, &phases).unwrap();
        assert!(plain.max_abs_diff(&twisted).unwrap() < 1e-12);
    }

    #[test]
    fn slot_trace_of_product_state_is_pure() {
        let mut rng = ChaCha8Rng::seed_from_u64(97);
        let a = random_orbital(&mut rng, 3);
        let b = random_orbital(&mut rng, 3);
        let t = LabeledTensor::product(&[a.clone(), b]).unwrap().normalized().unwrap();
        let (m, rho) = slot_partial_trace(&t, &[1]).unwrap();
        assert_eq!(m, 1);
        // Purity: rho^2 = rho.
        let mut rho2 = vec![Complex64::ZERO; 9];
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    rho2[i * 3 + j] += rho[i * 3 + k] * rho[k * 3 + j];
                }
            }
        }
        for (x, y) in rho.iter().zip(&rho2) {
            assert!((x - y).norm() < 1e-12);
        }
    }

    #[test]
    fn slot_trace_of_maximally_entangled_pair() {
        let mut t = LabeledTensor::zeros(2, 2).unwrap();
        let amp = c(1.0 / 2f64.sqrt(), 0.0);
        t.set(&[0, 0], amp);
        t.set(&[1, 1], amp);
        let (_, rho) = slot_partial_trace(&t, &[0]).unwrap();
        assert!((rho[0] - c(0.5, 0.0)).norm() < 1e-12);
        assert!((rho[3] - c(0.5, 0.0)).norm() < 1e-12);
        assert!(rho[1].norm() < 1e-12);
    }

    #[test]
    fn amplitude_routes_agree_on_random_orbitals() {
        let mut rng = ChaCha8Rng::seed_from_u64(101);
        for stats in [Statistics::Boson, Statistics::Fermion] {
            let orbitals: Vec<Orbital> = (0..2).map(|_| random_orbital(&mut rng, 3)).collect();
            let report = sea_correspondence(&orbitals, stats, 1e-10, 7).unwrap();
            assert!(report.pass, "stats={:?} residual={}", stats, report.max_residual);
            assert!(report.cases >= 6);
        }
    }
}
