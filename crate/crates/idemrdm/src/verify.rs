//! Randomized cross-formalism verification and the permanent benchmark.
//!
//! Each instance draws a random mixture of occupation-basis states, a random
//! mode bipartition, and a random phase assignment for the slot-subset
//! decomposition, then computes every reduced density matrix twice: through
//! the occupation-number factorization and through the dense slot-tensor
//! contraction, the latter with both default and randomized subset phases.
//! Entries must agree after label alignment and spectra must be independent
//! of the phase choice. Instance generation is keyed by (seed, index) so
//! runs shard deterministically.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dense::{
    dense_from_graded, partial_trace_explicit, subsets_of_size, LabeledTensor, PhaseAssignment,
};
use crate::entanglement::{
    reduced_density_matrix_mixed, splitmix64, Bipartition, Side,
};
use crate::error::{Error, Result};
use crate::fock::{occupation_states, GradedVector, Statistics};
use crate::kernels::{permanent_naive, permanent_ryser, SquareMatrix, NAIVE_MAX_ORDER, RYSER_MAX_ORDER};

/// One random mixture over a random bipartition with twisted subset phases.
struct Instance {
    components: Vec<(f64, GradedVector)>,
    bipartition: Bipartition,
    phases: PhaseAssignment,
}

fn random_instance(rng: &mut ChaCha8Rng, max_particles: usize) -> Result<Instance> {
    let dim = rng.random_range(2..=8);
    let stats = if rng.random_bool(0.5) {
        Statistics::Fermion
    } else {
        Statistics::Boson
    };
    let particle_cap = match stats {
        Statistics::Fermion => max_particles.min(dim),
        Statistics::Boson => max_particles,
    };
    let component_count = if rng.random_bool(1.0 / 3.0) {
        rng.random_range(2..=3)
    } else {
        1
    };

    let mut components = Vec::with_capacity(component_count);
    let mut max_grade = 0;
    for _ in 0..component_count {
        let n = rng.random_range(1..=particle_cap);
        max_grade = max_grade.max(n);
        let basis = occupation_states(dim, n, stats);
        let pick = rng.random_range(1..=4.min(basis.len()));
        let mut order: Vec<usize> = (0..basis.len()).collect();
        for i in 0..pick {
            let j = rng.random_range(i..order.len());
            order.swap(i, j);
        }
        let terms: Vec<_> = order[..pick]
            .iter()
            .map(|&bi| {
                (
                    basis[bi].clone(),
                    Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)),
                )
            })
            .collect();
        let v = GradedVector::from_terms(stats, dim, terms)?.normalized()?;
        components.push(v);
    }
    let raw_weights: Vec<f64> = (0..component_count)
        .map(|_| rng.random_range(0.1..1.0))
        .collect();
    let total: f64 = raw_weights.iter().sum();
    let components: Vec<(f64, GradedVector)> = raw_weights
        .into_iter()
        .map(|w| w / total)
        .zip(components)
        .collect();

    let mut modes: Vec<usize> = (0..dim).collect();
    for i in (1..modes.len()).rev() {
        let j = rng.random_range(0..=i);
        modes.swap(i, j);
    }
    let split = rng.random_range(1..dim);
    let bipartition = Bipartition::new(dim, modes[..split].to_vec())?;

    let mut phases = PhaseAssignment::zero();
    for size in 0..=max_grade {
        for subset in subsets_of_size(max_grade, size) {
            phases.set_phase(subset, rng.random_range(0.0..std::f64::consts::TAU));
        }
    }
    Ok(Instance {
        components,
        bipartition,
        phases,
    })
}

/// Residuals from one instance: worst aligned-entry difference and worst
/// sorted-spectrum difference across both traced sides and both oracle
/// phase choices.
#[derive(Clone, Copy, Debug)]
pub struct InstanceOutcome {
    pub entry_residual: f64,
    pub spectral_residual: f64,
}

fn run_instance(instance: &Instance) -> Result<InstanceOutcome> {
    let dense: Vec<(f64, LabeledTensor)> = instance
        .components
        .iter()
        .map(|(w, v)| Ok((*w, dense_from_graded(v, v.max_grade())?)))
        .collect::<Result<_>>()?;
    let zero_phases = PhaseAssignment::zero();

    let mut entry_residual = 0.0f64;
    let mut spectral_residual = 0.0f64;
    for traced in [Side::Right, Side::Left] {
        let fast = reduced_density_matrix_mixed(&instance.components, &instance.bipartition, traced)?;
        let oracle_plain =
            partial_trace_explicit(&dense, &instance.bipartition, traced, &zero_phases)?;
        let oracle_twisted =
            partial_trace_explicit(&dense, &instance.bipartition, traced, &instance.phases)?;
        fast.validate()?;
        oracle_plain.validate()?;
        oracle_twisted.validate()?;
        entry_residual = entry_residual
            .max(fast.max_abs_diff(&oracle_plain)?)
            .max(fast.max_abs_diff(&oracle_twisted)?);
        spectral_residual = spectral_residual
            .max(fast.spectral_distance(&oracle_plain)?)
            .max(fast.spectral_distance(&oracle_twisted)?)
            .max(oracle_plain.spectral_distance(&oracle_twisted)?);
    }
    Ok(InstanceOutcome {
        entry_residual,
        spectral_residual,
    })
}

/// Runs the instance derived from (seed, index). Deterministic in both.
pub fn equivalence_instance(seed: u64, index: u64, max_particles: usize) -> Result<InstanceOutcome> {
    if max_particles == 0 {
        return Err(Error::Schema("max particles must be at least one".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(splitmix64(seed, index));
    let instance = random_instance(&mut rng, max_particles)?;
    run_instance(&instance)
}

/// Aggregate of a batch of equivalence instances.
#[derive(Clone, Copy, Debug)]
pub struct EquivalenceOutcome {
    pub instances: usize,
    pub max_entry_residual: f64,
    pub max_spectral_residual: f64,
}

impl EquivalenceOutcome {
    pub fn passes(&self, tol: f64) -> bool {
        self.max_entry_residual <= tol && self.max_spectral_residual <= tol
    }
}

/// Runs `instances` sequentially indexed instances.
pub fn equivalence_suite(instances: usize, seed: u64, max_particles: usize) -> Result<EquivalenceOutcome> {
    let mut max_entry = 0.0f64;
    let mut max_spectral = 0.0f64;
    for index in 0..instances {
        let outcome = equivalence_instance(seed, index as u64, max_particles)?;
        max_entry = max_entry.max(outcome.entry_residual);
        max_spectral = max_spectral.max(outcome.spectral_residual);
    }
    Ok(EquivalenceOutcome {
        instances,
        max_entry_residual: max_entry,
        max_spectral_residual: max_spectral,
    })
}

/// One permanent benchmark measurement.
#[derive(Clone, Debug)]
pub struct BenchRow {
    pub n: usize,
    pub method: &'static str,
    pub seconds: f64,
    pub checksum: String,
}

fn bench_matrix(n: usize) -> SquareMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(splitmix64(0xB3A5, n as u64));
    let entries = (0..n * n)
        .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    SquareMatrix::new(n, entries).expect("finite random entries")
}

fn format_checksum(z: Complex64) -> String {
    format!("{:+.9e}{:+.9e}i", z.re, z.im)
}

/// Times the permanent on seeded matrices, min over `reps` runs per order.
/// The naive method runs alongside where its order cap allows.
pub fn bench_permanent_rows(min_n: usize, max_n: usize, reps: usize) -> Result<Vec<BenchRow>> {
    if min_n == 0 || min_n > max_n || max_n > RYSER_MAX_ORDER || reps == 0 {
        return Err(Error::Schema(format!(
            "benchmark range {}..={} with {} reps is invalid",
            min_n, max_n, reps
        )));
    }
    let mut rows = Vec::new();
    for n in min_n..=max_n {
        let a = bench_matrix(n);
        let mut best = f64::INFINITY;
        let mut value = Complex64::ZERO;
        for _ in 0..reps {
            let start = std::time::Instant::now();
            value = permanent_ryser(&a)?;
            best = best.min(start.elapsed().as_secs_f64());
        }
        rows.push(BenchRow {
            n,
            method: "ryser",
            seconds: best,
            checksum: format_checksum(value),
        });
        if n <= NAIVE_MAX_ORDER {
            let mut best = f64::INFINITY;
            let mut value = Complex64::ZERO;
            for _ in 0..reps {
                let start = std::time::Instant::now();
                value = permanent_naive(&a)?;
                best = best.min(start.elapsed().as_secs_f64());
            }
            rows.push(BenchRow {
                n,
                method: "naive",
                seconds: best,
                checksum: format_checksum(value),
            });
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn equivalence_holds_on_a_quick_batch() {
        let outcome = equivalence_suite(24, 0xA11CE, 4).unwrap();
        assert_eq!(outcome.instances, 24);
        assert!(
            outcome.passes(1e-10),
            "entry={} spectral={}",
            outcome.max_entry_residual,
            outcome.max_spectral_residual
        );
    }

    /// Everything the generator drew, as a comparable string. Residuals make
    /// a poor discriminator: instances from unrelated seeds can share one
    /// exactly (a half entry off by one ulp in both, say).
    fn instance_fingerprint(seed: u64, index: u64) -> String {
        let mut rng = ChaCha8Rng::seed_from_u64(splitmix64(seed, index));
        let instance = random_instance(&mut rng, 4).unwrap();
        let mut out = String::new();
        for (w, v) in &instance.components {
            out.push_str(&format!("w={:.17e}", w));
            for (occ, amp) in v.terms() {
                out.push_str(&format!(" {:?}:{:.17e},{:.17e}", occ.ids(), amp.re, amp.im));
            }
            out.push(';');
        }
        out.push_str(&format!("L={:?}", instance.bipartition.side_ids(Side::Left)));
        out
    }

    #[test]
    fn instances_are_deterministic_in_seed_and_index() {
        let a = equivalence_instance(42, 7, 4).unwrap();
        let b = equivalence_instance(42, 7, 4).unwrap();
        assert_eq!(a.entry_residual.to_bits(), b.entry_residual.to_bits());
        assert_eq!(a.spectral_residual.to_bits(), b.spectral_residual.to_bits());
        assert_eq!(instance_fingerprint(42, 7), instance_fingerprint(42, 7));
        assert_ne!(instance_fingerprint(42, 7), instance_fingerprint(43, 7));
        assert_ne!(instance_fingerprint(42, 7), instance_fingerprint(42, 8));
    }

    #[test]
    fn bench_rows_cover_both_methods_in_range() {
        let rows = bench_permanent_rows(3, 5, 2).unwrap();
        let ryser: Vec<_> = rows.iter().filter(|r| r.method == "ryser").collect();
        let naive: Vec<_> = rows.iter().filter(|r| r.method == "naive").collect();
        assert_eq!(ryser.len(), 3);
        assert_eq!(naive.len(), 3);
        for (r, n) in ryser.iter().zip(&naive) {
            assert_eq!(r.n, n.n);
            assert_eq!(r.checksum, n.checksum, "methods disagree at n={}", r.n);
            assert!(r.seconds >= 0.0 && n.seconds >= 0.0);
        }
        assert!(bench_permanent_rows(5, 3, 1).is_err());
        assert!(bench_permanent_rows(1, 31, 1).is_err());
    }
}
