//! Reduced density matrices over mode bipartitions, entropies, and the
//! observable-restriction consistency check.
//!
//! The fast path works in the occupation-number basis: splitting the mode
//! set into left and right factorizes every occupation exactly, the only
//! subtlety being the fermionic crossing sign from reordering creation
//! operators into left-before-right canonical order. Reduced density
//! matrices are accumulated from those factorized coefficients.
//!
//! `gns_restriction_check` verifies the defining property of the reduced
//! state: for observables supported on one side, restriction and lifting
//! give the same expectations, Tr(rho_S K) = <Psi| lift(K) |Psi>. The lift
//! is taken through the same canonical factorization, so the identity must
//! hold to rounding for every K, not just parity-even ones.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dense::{slot_partial_trace, LabeledTensor};
use crate::eigen::hermitian_eigenvalues;
use crate::error::{Error, Result};
use crate::fock::{inner_product, GradedVector, OccupationState, Statistics};

/// Hermiticity tolerance for density matrix validation, relative.
pub const HERMITICITY_TOL: f64 = 1e-12;
/// Eigenvalues of a valid density matrix may undershoot zero by this much.
pub const EIGENVALUE_FLOOR: f64 = -1e-10;
/// Trace of a valid density matrix must sit within this of one.
pub const TRACE_TOL: f64 = 1e-10;
/// Entropy refuses eigenvalues below this; smaller negatives are clamped.
pub const ENTROPY_EIGENVALUE_FLOOR: f64 = -1e-8;

/// One half of a mode bipartition.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn other(self) -> Side {
        match self {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        }
    }
}

/// A partition of the modes 0..dim into two non-empty sides.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bipartition {
    dim: usize,
    left: Vec<usize>,
    right: Vec<usize>,
}

impl Bipartition {
    /// Left side as given, right side the complement.
    pub fn new(dim: usize, left: Vec<usize>) -> Result<Self> {
        let mut left = left;
        left.sort_unstable();
        left.dedup();
        if left.iter().any(|&id| id >= dim) {
            return Err(Error::BadBipartition(format!(
                "left modes {:?} out of range for dimension {}",
                left, dim
            )));
        }
        let right: Vec<usize> = (0..dim).filter(|id| !left.contains(id)).collect();
        if left.is_empty() || right.is_empty() {
            return Err(Error::BadBipartition(
                "both sides of the bipartition must be non-empty".into(),
            ));
        }
        Ok(Self { dim, left, right })
    }

    /// Both sides explicit; they must partition 0..dim exactly.
    pub fn from_sides(dim: usize, left: Vec<usize>, right: Vec<usize>) -> Result<Self> {
        let mut all: Vec<usize> = left.iter().chain(right.iter()).copied().collect();
        all.sort_unstable();
        if all != (0..dim).collect::<Vec<_>>() {
            return Err(Error::BadBipartition(format!(
                "sides {:?} | {:?} do not partition the {} modes",
                left, right, dim
            )));
        }
        let mut left = left;
        let mut right = right;
        left.sort_unstable();
        right.sort_unstable();
        if left.is_empty() || right.is_empty() {
            return Err(Error::BadBipartition(
                "both sides of the bipartition must be non-empty".into(),
            ));
        }
        Ok(Self { dim, left, right })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn side_ids(&self, side: Side) -> &[usize] {
        match side {
            Side::Left => &self.left,
            Side::Right => &self.right,
        }
    }

    pub fn side_of(&self, id: usize) -> Side {
        if self.left.binary_search(&id).is_ok() {
            Side::Left
        } else {
            Side::Right
        }
    }
}

/// Splits an occupation across the bipartition. The sign reorders the
/// creation-operator string into left-before-right canonical order: for
/// fermions (-1) per (left id, right id) pair with the right id smaller.
pub(crate) fn factorize(
    occ: &OccupationState,
    bipartition: &Bipartition,
    stats: Statistics,
) -> (OccupationState, OccupationState, f64) {
    let mut left = Vec::new();
    let mut right = Vec::new();
    let mut crossings = 0usize;
    for &id in occ.ids() {
        match bipartition.side_of(id) {
            Side::Left => {
                crossings += right.len();
                left.push(id);
            }
            Side::Right => right.push(id),
        }
    }
    let sign = stats.permutation_sign(crossings);
    (
        OccupationState::from_sorted_unchecked(left),
        OccupationState::from_sorted_unchecked(right),
        sign,
    )
}

/// Sign to reassemble |left>|right> into the flat occupation; inverse of the
/// `factorize` sign for the same pair.
pub(crate) fn crossing_sign(left: &[usize], right: &[usize], stats: Statistics) -> f64 {
    let mut crossings = 0usize;
    for &l in left {
        crossings += right.iter().take_while(|&&r| r < l).count();
    }
    stats.permutation_sign(crossings)
}

fn merge_sorted(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        if a[i] <= b[j] {
            out.push(a[i]);
            i += 1;
        } else {
            out.push(b[j]);
            j += 1;
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

/// Density matrix over an explicit occupation-state basis, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    stats: Statistics,
    basis: Vec<OccupationState>,
    entries: Vec<Complex64>,
}

impl DensityMatrix {
    /// Assembles from accumulated weighted entries and normalizes the trace
    /// to one. The basis is the sorted union of the labels that appear.
    pub fn from_accumulated(
        stats: Statistics,
        accum: BTreeMap<(OccupationState, OccupationState), Complex64>,
    ) -> Result<Self> {
        let mut basis: Vec<OccupationState> = Vec::new();
        for (b, b2) in accum.keys() {
            basis.push(b.clone());
            basis.push(b2.clone());
        }
        basis.sort();
        basis.dedup();
        if basis.is_empty() {
            return Err(Error::ZeroState);
        }
        let n = basis.len();
        let index: BTreeMap<&OccupationState, usize> =
            basis.iter().enumerate().map(|(i, b)| (b, i)).collect();
        let mut entries = vec![Complex64::ZERO; n * n];
        for ((b, b2), v) in &accum {
            entries[index[b] * n + index[b2]] = *v;
        }
        let trace: f64 = (0..n).map(|i| entries[i * n + i].re).sum();
        if trace <= 1e-300 {
            return Err(Error::ZeroState);
        }
        let inv = Complex64::new(1.0 / trace, 0.0);
        for e in &mut entries {
            *e *= inv;
        }
        Ok(Self {
            stats,
            basis,
            entries,
        })
    }

    pub fn statistics(&self) -> Statistics {
        self.stats
    }

    pub fn basis(&self) -> &[OccupationState] {
        &self.basis
    }

    pub fn dimension(&self) -> usize {
        self.basis.len()
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        self.entries[i * self.basis.len() + j]
    }

    pub fn entry_by_label(&self, row: &OccupationState, col: &OccupationState) -> Option<Complex64> {
        let i = self.basis.iter().position(|b| b == row)?;
        let j = self.basis.iter().position(|b| b == col)?;
        Some(self.entry(i, j))
    }

    pub fn trace(&self) -> f64 {
        (0..self.basis.len()).map(|i| self.entry(i, i).re).sum()
    }

    /// Ascending eigenvalues.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        hermitian_eigenvalues(self.basis.len(), &self.entries)
    }

    fn hermiticity_residual(&self) -> f64 {
        let n = self.basis.len();
        let scale = self
            .entries
            .iter()
            .map(|z| z.norm())
            .fold(0.0f64, f64::max)
            .max(1.0);
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                worst = worst.max((self.entry(i, j) - self.entry(j, i).conj()).norm());
            }
        }
        worst / scale
    }

    /// Checks the defining invariants: Hermitian, positive semidefinite up
    /// to rounding, unit trace.
    pub fn validate(&self) -> Result<()> {
        let herm = self.hermiticity_residual();
        if herm > HERMITICITY_TOL {
            return Err(Error::NotHermitian(herm));
        }
        let eig = self.eigenvalues()?;
        if let Some(&lowest) = eig.first() {
            if lowest < EIGENVALUE_FLOOR {
                return Err(Error::NegativeEigenvalue(lowest));
            }
        }
        let trace = self.trace();
        if (trace - 1.0).abs() > TRACE_TOL {
            return Err(Error::NotNormalized(trace));
        }
        Ok(())
    }

    /// Largest entry difference after aligning the two label sets; labels
    /// missing on one side count as zero there.
    pub fn max_abs_diff(&self, other: &DensityMatrix) -> Result<f64> {
        if self.stats != other.stats {
            return Err(Error::StatisticsMismatch);
        }
        let mut labels: Vec<OccupationState> = self
            .basis
            .iter()
            .chain(other.basis.iter())
            .cloned()
            .collect();
        labels.sort();
        labels.dedup();
        let mut worst = 0.0f64;
        for a in &labels {
            for b in &labels {
                let x = self.entry_by_label(a, b).unwrap_or(Complex64::ZERO);
                let y = other.entry_by_label(a, b).unwrap_or(Complex64::ZERO);
                worst = worst.max((x - y).norm());
            }
        }
        Ok(worst)
    }

    /// Largest difference between sorted spectra, shorter one padded with
    /// zeros from below.
    pub fn spectral_distance(&self, other: &DensityMatrix) -> Result<f64> {
        let mut a = self.eigenvalues()?;
        let mut b = other.eigenvalues()?;
        while a.len() < b.len() {
            a.insert(0, 0.0);
        }
        while b.len() < a.len() {
            b.insert(0, 0.0);
        }
        Ok(a.iter()
            .zip(&b)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max))
    }
}

/// Particle-number superselection sector of an occupation: the number itself
/// for bosons, its parity for fermions.
fn sector(stats: Statistics, occ: &OccupationState) -> usize {
    match stats {
        Statistics::Boson => occ.grade(),
        Statistics::Fermion => occ.grade() % 2,
    }
}

/// Zeroes coherences between different superselection sectors. Diagonal
/// blocks and the trace are untouched.
pub fn ssr_project(rho: &DensityMatrix) -> DensityMatrix {
    let n = rho.basis.len();
    let mut entries = rho.entries.clone();
    for i in 0..n {
        for j in 0..n {
            if sector(rho.stats, &rho.basis[i]) != sector(rho.stats, &rho.basis[j]) {
                entries[i * n + j] = Complex64::ZERO;
            }
        }
    }
    DensityMatrix {
        stats: rho.stats,
        basis: rho.basis.clone(),
        entries,
    }
}

/// Von Neumann entropy in bits. Eigenvalues may undershoot zero only within
/// the entropy floor; they are clamped into [0, 1] before the sum.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> Result<f64> {
    let herm = rho.hermiticity_residual();
    if herm > HERMITICITY_TOL {
        return Err(Error::NotHermitian(herm));
    }
    let eig = rho.eigenvalues()?;
    let mut entropy = 0.0;
    for &lambda in &eig {
        if lambda < ENTROPY_EIGENVALUE_FLOOR {
            return Err(Error::NegativeEigenvalue(lambda));
        }
        let p = lambda.clamp(0.0, 1.0);
        if p > 0.0 {
            entropy -= p * p.log2();
        }
    }
    Ok(entropy)
}

fn factorized_coefficients(
    state: &GradedVector,
    bipartition: &Bipartition,
    traced: Side,
) -> BTreeMap<OccupationState, BTreeMap<OccupationState, Complex64>> {
    // kept label -> traced label -> coefficient
    let mut coeffs: BTreeMap<OccupationState, BTreeMap<OccupationState, Complex64>> =
        BTreeMap::new();
    for (occ, amp) in state.terms() {
        let (l, r, sign) = factorize(occ, bipartition, state.statistics());
        let (kept, gone) = match traced {
            Side::Right => (l, r),
            Side::Left => (r, l),
        };
        *coeffs
            .entry(kept)
            .or_default()
            .entry(gone)
            .or_insert(Complex64::ZERO) += amp * sign;
    }
    coeffs
}

/// Reduced density matrix of a normalized mixture over occupation states,
/// tracing out one side of the bipartition. Trace-normalized.
pub fn reduced_density_matrix_mixed(
    components: &[(f64, GradedVector)],
    bipartition: &Bipartition,
    traced: Side,
) -> Result<DensityMatrix> {
    if components.is_empty() {
        return Err(Error::ZeroState);
    }
    let stats = components[0].1.statistics();
    let mut accum: BTreeMap<(OccupationState, OccupationState), Complex64> = BTreeMap::new();
    for (weight, state) in components {
        if *weight <= 0.0 {
            return Err(Error::BadWeights(*weight));
        }
        if state.statistics() != stats {
            return Err(Error::StatisticsMismatch);
        }
        if state.dim() != bipartition.dim() {
            return Err(Error::DimensionMismatch(state.dim(), bipartition.dim()));
        }
        let state = state.normalized()?;
        let coeffs = factorized_coefficients(&state, bipartition, traced);
        let kept_labels: Vec<&OccupationState> = coeffs.keys().collect();
        for &b in &kept_labels {
            for &b2 in &kept_labels {
                let mut acc = Complex64::ZERO;
                for (gone, c) in &coeffs[b] {
                    if let Some(c2) = coeffs[b2].get(gone) {
                        acc += c * c2.conj();
                    }
                }
                if acc != Complex64::ZERO {
                    *accum
                        .entry((b.clone(), b2.clone()))
                        .or_insert(Complex64::ZERO) += weight * acc;
                }
            }
        }
    }
    DensityMatrix::from_accumulated(stats, accum)
}

/// Reduced density matrix of a pure state.
pub fn reduced_density_matrix(
    state: &GradedVector,
    bipartition: &Bipartition,
    traced: Side,
) -> Result<DensityMatrix> {
    reduced_density_matrix_mixed(&[(1.0, state.clone())], bipartition, traced)
}

/// Observable supported on one side: a matrix over an explicit basis of
/// occupations of that side's modes. Occupations outside `basis` are treated
/// as zero rows and columns.
#[derive(Clone, Debug)]
pub struct LocalObservable {
    pub side: Side,
    pub basis: Vec<OccupationState>,
    matrix: Vec<Complex64>,
}

impl LocalObservable {
    pub fn new(side: Side, basis: Vec<OccupationState>, matrix: Vec<Complex64>) -> Result<Self> {
        let n = basis.len();
        if matrix.len() != n * n {
            return Err(Error::BadMatrixShape {
                n,
                got: matrix.len(),
            });
        }
        let mut dedup = basis.clone();
        dedup.sort();
        dedup.dedup();
        if dedup.len() != n {
            return Err(Error::InvalidOccupation(
                "observable basis contains duplicate occupations".into(),
            ));
        }
        Ok(Self {
            side,
            basis,
            matrix,
        })
    }

    pub fn matrix(&self) -> &[Complex64] {
        &self.matrix
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.matrix[i * self.basis.len() + j]
    }
}

/// Applies the lift of a one-sided observable to a Fock vector: factorize
/// each occupation, act on the observable's side, reassemble with crossing
/// signs.
pub fn lift_apply(
    observable: &LocalObservable,
    bipartition: &Bipartition,
    v: &GradedVector,
) -> Result<GradedVector> {
    let stats = v.statistics();
    let side_ids = bipartition.side_ids(observable.side);
    for occ in &observable.basis {
        if !occ.ids().iter().all(|id| side_ids.contains(id)) {
            return Err(Error::InvalidOccupation(format!(
                "observable basis state {:?} uses modes outside its side",
                occ.ids()
            )));
        }
    }
    let mut terms: BTreeMap<OccupationState, Complex64> = BTreeMap::new();
    for (occ, amp) in v.terms() {
        let (l, r, sign) = factorize(occ, bipartition, stats);
        let (acted, spectator) = match observable.side {
            Side::Left => (l, r),
            Side::Right => (r, l),
        };
        let col = match observable.basis.iter().position(|b| *b == acted) {
            Some(c) => c,
            None => continue, // zero column outside the declared basis
        };
        for (row, new_acted) in observable.basis.iter().enumerate() {
            let k = observable.get(row, col);
            if k == Complex64::ZERO {
                continue;
            }
            let (left_ids, right_ids) = match observable.side {
                Side::Left => (new_acted.ids(), spectator.ids()),
                Side::Right => (spectator.ids(), new_acted.ids()),
            };
            let reassembled = crossing_sign(left_ids, right_ids, stats);
            let merged = OccupationState::from_sorted_unchecked(merge_sorted(left_ids, right_ids));
            *terms.entry(merged).or_insert(Complex64::ZERO) += amp * sign * reassembled * k;
        }
    }
    GradedVector::from_terms(stats, v.dim(), terms)
}

/// <v | lift(K) v> without normalization.
pub fn lifted_expectation(
    observable: &LocalObservable,
    bipartition: &Bipartition,
    v: &GradedVector,
) -> Result<Complex64> {
    let kv = lift_apply(observable, bipartition, v)?;
    inner_product(v, &kv)
}

/// Tr(rho K) with label alignment; rho labels outside the observable basis
/// contribute nothing, matching the zero-extension of the observable.
pub fn restricted_expectation(rho: &DensityMatrix, observable: &LocalObservable) -> Complex64 {
    let mut acc = Complex64::ZERO;
    let positions: Vec<Option<usize>> = rho
        .basis()
        .iter()
        .map(|b| observable.basis.iter().position(|k| k == b))
        .collect();
    for (i, pi) in positions.iter().enumerate() {
        let Some(ki) = pi else { continue };
        for (j, pj) in positions.iter().enumerate() {
            let Some(kj) = pj else { continue };
            acc += rho.entry(i, j) * observable.get(*kj, *ki);
        }
    }
    acc
}

pub(crate) fn splitmix64(seed: u64, index: u64) -> u64 {
    let mut z = seed
        .wrapping_add(index.wrapping_mul(0x9E37_79B9_7F4A_7C15))
        .wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub(crate) fn random_hermitian(rng: &mut ChaCha8Rng, n: usize) -> Vec<Complex64> {
    let mut m = vec![Complex64::ZERO; n * n];
    for i in 0..n {
        m[i * n + i] = Complex64::new(rng.random_range(-1.0..1.0), 0.0);
        for j in i + 1..n {
            let z = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            m[i * n + j] = z;
            m[j * n + i] = z.conj();
        }
    }
    m
}

/// Result of the observable-restriction check.
#[derive(Clone, Debug)]
pub struct GnsReport {
    pub max_residual: f64,
    pub trials: usize,
    pub pass: bool,
}

/// All occupations of one side up to a grade cap.
fn side_basis(
    bipartition: &Bipartition,
    side: Side,
    max_grade: usize,
    stats: Statistics,
) -> Vec<OccupationState> {
    let ids = bipartition.side_ids(side);
    let mut basis = Vec::new();
    for grade in 0..=max_grade {
        basis.extend(crate::dense::occupations_from_ids(ids, grade, stats));
    }
    basis
}

/// Draws random Hermitian observables on the left modes and compares the
/// restricted expectation through the reduced density matrix with the
/// lifted expectation on the full state. A distinguishable-particle control
/// over plain slot tensors runs alongside to vouch for the comparison
/// machinery itself. Residuals are folded into one maximum.
pub fn gns_restriction_check(
    components: &[(f64, GradedVector)],
    bipartition: &Bipartition,
    trials: usize,
    seed: u64,
    tol: f64,
) -> Result<GnsReport> {
    if components.is_empty() {
        return Err(Error::ZeroState);
    }
    let stats = components[0].1.statistics();
    let weight_sum: f64 = components.iter().map(|(w, _)| *w).sum();
    if weight_sum <= 0.0 {
        return Err(Error::BadWeights(weight_sum));
    }
    let normalized: Vec<(f64, GradedVector)> = components
        .iter()
        .map(|(w, v)| Ok((*w / weight_sum, v.normalized()?)))
        .collect::<Result<_>>()?;
    let max_grade = normalized
        .iter()
        .map(|(_, v)| v.max_grade())
        .max()
        .unwrap_or(0);
    let rho = reduced_density_matrix_mixed(&normalized, bipartition, Side::Right)?;
    let basis = side_basis(bipartition, Side::Left, max_grade, stats);
    let mut max_residual = 0.0f64;

    for trial in 0..trials {
        let mut rng = ChaCha8Rng::seed_from_u64(splitmix64(seed, trial as u64 + 1));
        let k = LocalObservable::new(
            Side::Left,
            basis.clone(),
            random_hermitian(&mut rng, basis.len()),
        )?;
        let restricted = restricted_expectation(&rho, &k);
        let mut lifted = Complex64::ZERO;
        for (w, v) in &normalized {
            lifted += w * lifted_expectation(&k, bipartition, v)?;
        }
        max_residual = max_residual.max((restricted - lifted).norm());
    }

    // Control: distinguishable pair with no exchange symmetry at all. The
    // identity must hold by plain index bookkeeping.
    let mut rng = ChaCha8Rng::seed_from_u64(splitmix64(seed, 0xC0FFEE));
    for _ in 0..8 {
        let d = 3;
        let data: Vec<Complex64> = (0..d * d)
            .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        let t = LabeledTensor::from_data(d, 2, data, None)?.normalized()?;
        let (_, rho_a) = slot_partial_trace(&t, &[1])?;
        let k = random_hermitian(&mut rng, d);
        let mut lhs = Complex64::ZERO;
        for i in 0..d {
            for j in 0..d {
                lhs += rho_a[i * d + j] * k[j * d + i];
            }
        }
        let mut rhs = Complex64::ZERO;
        for i in 0..d {
            for i2 in 0..d {
                for j in 0..d {
                    rhs += t.data()[i * d + j].conj() * k[i * d + i2] * t.data()[i2 * d + j];
                }
            }
        }
        max_residual = max_residual.max((lhs - rhs).norm());
    }

    Ok(GnsReport {
        max_residual,
        trials,
        pass: max_residual <= tol,
    })
}

/// The one-particle-each-side construction: a two-particle fermion state
/// with one particle on each side of the split. The reduced left state has
/// entries X[a][b] = sum over right modes of c[a][mu] conj(c[b][mu]), and
/// restricted expectations must match lifted ones entry for entry. Returns
/// the largest residual across the three ways of computing <K>.
pub fn two_particle_restriction_identity(
    left_modes: usize,
    right_modes: usize,
    seed: u64,
) -> Result<f64> {
    let dim = left_modes + right_modes;
    let stats = Statistics::Fermion;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut c = vec![Complex64::ZERO; left_modes * right_modes];
    let mut norm2 = 0.0;
    for z in &mut c {
        *z = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        norm2 += z.norm_sqr();
    }
    let inv = Complex64::new(1.0 / norm2.sqrt(), 0.0);
    for z in &mut c {
        *z *= inv;
    }

    let mut terms = Vec::new();
    for a in 0..left_modes {
        for mu in 0..right_modes {
            let occ = OccupationState::new(vec![a, left_modes + mu], stats, dim)?;
            terms.push((occ, c[a * right_modes + mu]));
        }
    }
    let state = GradedVector::from_terms(stats, dim, terms)?;
    let bipartition = Bipartition::new(dim, (0..left_modes).collect())?;

    let basis: Vec<OccupationState> = (0..left_modes)
        .map(|a| OccupationState::new(vec![a], stats, dim))
        .collect::<Result<_>>()?;
    let k = LocalObservable::new(
        Side::Left,
        basis,
        random_hermitian(&mut rng, left_modes),
    )?;

    let rho = reduced_density_matrix(&state, &bipartition, Side::Right)?;
    let via_rho = restricted_expectation(&rho, &k);
    let via_lift = lifted_expectation(&k, &bipartition, &state)?;
    // Direct formula from the coefficient matrix.
    let mut via_direct = Complex64::ZERO;
    for a in 0..left_modes {
        for b in 0..left_modes {
            let mut x_ab = Complex64::ZERO;
            for mu in 0..right_modes {
                x_ab += c[a * right_modes + mu] * c[b * right_modes + mu].conj();
            }
            via_direct += x_ab * k.get(b, a);
        }
    }
    Ok((via_rho - via_lift)
        .norm()
        .max((via_rho - via_direct).norm())
        .max((via_lift - via_direct).norm()))
}
