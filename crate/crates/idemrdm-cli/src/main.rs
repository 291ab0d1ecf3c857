//! Command line front end over the reduction and verification library.
//!
//! Every subcommand reads the JSON state-file schema, runs one computation
//! or verification suite, and reports in text, JSON, or CSV. JSON reports
//! are byte-identical across runs with the same inputs and seed except for
//! the `wall_seconds` field.

use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use idemrdm::{
    bench_permanent_rows, dense_from_graded, equivalence_instance, gns_restriction_check,
    parse_state_file, partial_trace_explicit, reduced_density_matrix_mixed, ssr_project,
    transition_amplitude, von_neumann_entropy, DensityMatrix, Error, LabeledTensor, LoadedState,
    Orbital, PhaseAssignment, Result, Side,
};

#[derive(Parser)]
#[command(
    name = "idemrdm",
    version,
    about = "Reduced density matrices and entanglement entropies of identical particles"
)]
struct Cli {
    /// Pass/fail threshold threaded into every verification gate.
    #[arg(long, global = true, default_value_t = 1e-10)]
    tolerance: f64,

    /// Output format; csv applies to bench-permanent and to rdm eigenvalue
    /// lists only.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TraceSide {
    /// Trace out the left detector region.
    #[value(name = "L", alias = "l")]
    Left,
    /// Trace out the right detector region.
    #[value(name = "R", alias = "r")]
    Right,
}

impl TraceSide {
    fn side(self) -> Side {
        match self {
            TraceSide::Left => Side::Left,
            TraceSide::Right => Side::Right,
        }
    }

    fn name(self) -> &'static str {
        match self {
            TraceSide::Left => "L",
            TraceSide::Right => "R",
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Transition amplitude between two single-term product states.
    Amplitude { bra: PathBuf, ket: PathBuf },

    /// Reduced density matrix after tracing out one detector region.
    Rdm {
        state: PathBuf,
        /// Region to trace out.
        #[arg(long, value_enum)]
        trace: TraceSide,
        /// Project out coherences between superselection sectors.
        #[arg(long)]
        ssr: bool,
    },

    /// Von Neumann entropy of the reduced state.
    Entropy {
        state: PathBuf,
        /// Region to trace out.
        #[arg(long, value_enum)]
        trace: TraceSide,
    },

    /// Cross-check the occupation-factorized reduction against the dense
    /// slot-tensor contraction, on the given state and optionally on a
    /// batch of random instances.
    VerifyEquivalence {
        state: PathBuf,
        /// Number of additional random instances to run.
        #[arg(long)]
        random: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Particle-number cap for the random instances.
        #[arg(long, default_value_t = 4)]
        max_particles: usize,
    },

    /// Compare restricted and lifted expectation values on random local
    /// observables.
    VerifyGns {
        state: PathBuf,
        #[arg(long, default_value_t = 50)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },

    /// Time the permanent kernels over a range of matrix orders.
    BenchPermanent {
        #[arg(long, default_value_t = 4)]
        min: usize,
        #[arg(long, default_value_t = 20)]
        max: usize,
        #[arg(long, default_value_t = 3)]
        reps: usize,
    },
}

/// Everything one subcommand produces; `main` picks the surface to print.
struct Output {
    command: &'static str,
    inputs_digest: String,
    results: Value,
    pass: bool,
    text: String,
    csv: Option<String>,
}

fn main() {
    let cli = Cli::parse();
    let started = Instant::now();
    match run(&cli) {
        Ok(output) => {
            let wall = started.elapsed().as_secs_f64();
            match emit(&cli, &output, wall) {
                Ok(()) => std::process::exit(if output.pass { 0 } else { 1 }),
                Err(err) => {
                    eprintln!("error: {}", err);
                    std::process::exit(2);
                }
            }
        }
        Err(err) => {
            eprintln!("error: {}", err);
            std::process::exit(2);
        }
    }
}

fn emit(cli: &Cli, output: &Output, wall_seconds: f64) -> Result<()> {
    match cli.format {
        Format::Text => {
            print!("{}", output.text);
            if !output.text.ends_with('\n') {
                println!();
            }
        }
        Format::Json => {
            let report = json!({
                "command": output.command,
                "inputs_digest": output.inputs_digest,
                "tolerance": cli.tolerance,
                "results": output.results,
                "pass": output.pass,
                "wall_seconds": wall_seconds,
            });
            println!("{}", serde_json::to_string_pretty(&report)?);
        }
        Format::Csv => match &output.csv {
            Some(csv) => print!("{}", csv),
            None => {
                return Err(Error::Schema(
                    "csv output applies to bench-permanent and rdm only".into(),
                ))
            }
        },
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<Output> {
    match &cli.command {
        Command::Amplitude { bra, ket } => amplitude_command(bra, ket),
        Command::Rdm { state, trace, ssr } => rdm_command(state, *trace, *ssr),
        Command::Entropy { state, trace } => entropy_command(state, *trace),
        Command::VerifyEquivalence {
            state,
            random,
            seed,
            max_particles,
        } => verify_equivalence_command(state, *random, *seed, *max_particles, cli.tolerance),
        Command::VerifyGns {
            state,
            trials,
            seed,
        } => verify_gns_command(state, *trials, *seed, cli.tolerance),
        Command::BenchPermanent { min, max, reps } => bench_command(*min, *max, *reps),
    }
}

fn load_state(path: &Path) -> Result<LoadedState> {
    parse_state_file(path)
        .map_err(|err| Error::Schema(format!("{}: {}", path.display(), err)))
}

fn digest_files(paths: &[&Path]) -> Result<String> {
    let mut hasher = Sha256::new();
    for path in paths {
        hasher.update(std::fs::read(path)?);
    }
    Ok(hex_string(&hasher.finalize()))
}

fn digest_params(params: &str) -> String {
    hex_string(&Sha256::digest(params.as_bytes()))
}

fn hex_string(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{:02x}", b)).collect()
}

fn warn_norm(loaded: &LoadedState) {
    if let Some(deviation) = loaded.norm_warning {
        eprintln!(
            "warning: input norm deviated from one by {:.3e}; renormalized",
            deviation
        );
    }
}

/// The single product term of a pure state file, as an amplitude and the
/// basis orbitals it occupies.
fn single_term_orbitals(loaded: &LoadedState) -> Result<(Complex64, Vec<Orbital>)> {
    let terms = loaded
        .file
        .terms
        .as_ref()
        .ok_or_else(|| Error::Schema("amplitude needs a pure state, not a mixture".into()))?;
    if terms.len() != 1 {
        return Err(Error::Schema(
            "amplitude needs exactly one product term per file".into(),
        ));
    }
    let term = &terms[0];
    let amp = Complex64::new(term.amplitude[0], term.amplitude[1]);
    let orbitals = term
        .orbitals
        .iter()
        .map(|&id| Orbital::basis(loaded.file.dim, id))
        .collect::<Result<Vec<_>>>()?;
    Ok((amp, orbitals))
}

fn amplitude_command(bra_path: &Path, ket_path: &Path) -> Result<Output> {
    let bra_loaded = load_state(bra_path)?;
    let ket_loaded = load_state(ket_path)?;
    if bra_loaded.statistics != ket_loaded.statistics {
        return Err(Error::StatisticsMismatch);
    }
    if bra_loaded.file.dim != ket_loaded.file.dim {
        return Err(Error::DimensionMismatch(
            bra_loaded.file.dim,
            ket_loaded.file.dim,
        ));
    }
    let (bra_amp, bra_orbitals) = single_term_orbitals(&bra_loaded)?;
    let (ket_amp, ket_orbitals) = single_term_orbitals(&ket_loaded)?;
    // States of different particle number are orthogonal outright.
    let amp = if bra_orbitals.len() == ket_orbitals.len() {
        bra_amp.conj()
            * ket_amp
            * transition_amplitude(&bra_orbitals, &ket_orbitals, bra_loaded.statistics)?
    } else {
        Complex64::ZERO
    };
    Ok(Output {
        command: "amplitude",
        inputs_digest: digest_files(&[bra_path, ket_path])?,
        results: json!({
            "amplitude": [amp.re, amp.im],
            "norm": amp.norm(),
            "order": [bra_orbitals.len(), ket_orbitals.len()],
        }),
        pass: true,
        text: format!("{:+.12e} {:+.12e}i\n", amp.re, amp.im),
        csv: None,
    })
}

fn occupation_label(ids: &[usize]) -> String {
    let inner: Vec<String> = ids.iter().map(|id| id.to_string()).collect();
    format!("{{{}}}", inner.join(","))
}

fn density_matrix_json(rho: &DensityMatrix) -> Result<Value> {
    let n = rho.dimension();
    let basis: Vec<Value> = rho.basis().iter().map(|occ| json!(occ.ids())).collect();
    let matrix: Vec<Vec<[f64; 2]>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let z = rho.entry(i, j);
                    [z.re, z.im]
                })
                .collect()
        })
        .collect();
    Ok(json!({
        "basis": basis,
        "matrix": matrix,
        "eigenvalues": rho.eigenvalues()?,
        "trace": rho.trace(),
    }))
}

fn density_matrix_text(rho: &DensityMatrix) -> String {
    let labels: Vec<String> = rho
        .basis()
        .iter()
        .map(|occ| occupation_label(occ.ids()))
        .collect();
    let width = labels.iter().map(|l| l.len()).max().unwrap_or(2);
    let mut out = format!("basis {}\n", labels.join(" "));
    for (i, label) in labels.iter().enumerate() {
        let row: Vec<String> = (0..rho.dimension())
            .map(|j| {
                let z = rho.entry(i, j);
                format!("({:+.12e},{:+.12e})", z.re, z.im)
            })
            .collect();
        out.push_str(&format!("{:>width$} {}\n", label, row.join(" "), width = width));
    }
    out
}

fn rdm_command(path: &Path, trace: TraceSide, ssr: bool) -> Result<Output> {
    let loaded = load_state(path)?;
    warn_norm(&loaded);
    let mut rho = reduced_density_matrix_mixed(&loaded.components, &loaded.bipartition, trace.side())?;
    if ssr {
        rho = ssr_project(&rho);
    }
    rho.validate()?;
    let eigenvalues = rho.eigenvalues()?;
    let mut results = density_matrix_json(&rho)?;
    results["traced"] = json!(trace.name());
    results["ssr"] = json!(ssr);
    let mut csv = String::from("index,eigenvalue\n");
    for (i, lambda) in eigenvalues.iter().enumerate() {
        csv.push_str(&format!("{},{:.12e}\n", i, lambda));
    }
    Ok(Output {
        command: "rdm",
        inputs_digest: digest_files(&[path])?,
        results,
        pass: true,
        text: density_matrix_text(&rho),
        csv: Some(csv),
    })
}

fn entropy_command(path: &Path, trace: TraceSide) -> Result<Output> {
    let loaded = load_state(path)?;
    warn_norm(&loaded);
    let rho = reduced_density_matrix_mixed(&loaded.components, &loaded.bipartition, trace.side())?;
    rho.validate()?;
    let entropy = von_neumann_entropy(&rho)?;
    Ok(Output {
        command: "entropy",
        inputs_digest: digest_files(&[path])?,
        results: json!({
            "entropy": entropy,
            "eigenvalues": rho.eigenvalues()?,
            "traced": trace.name(),
        }),
        pass: true,
        text: format!("{:.6}\n", entropy),
        csv: None,
    })
}

/// Random phase for every subset of the slot positions, seeded.
fn random_phases(max_grade: usize, seed: u64) -> PhaseAssignment {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut phases = PhaseAssignment::zero();
    for mask in 0u64..(1u64 << max_grade) {
        let subset: Vec<usize> = (0..max_grade).filter(|k| mask >> k & 1 == 1).collect();
        phases.set_phase(subset, rng.random_range(0.0..std::f64::consts::TAU));
    }
    phases
}

fn verify_equivalence_command(
    path: &Path,
    random: Option<usize>,
    seed: u64,
    max_particles: usize,
    tolerance: f64,
) -> Result<Output> {
    let loaded = load_state(path)?;
    warn_norm(&loaded);
    for (_, component) in &loaded.components {
        let grades: std::collections::BTreeSet<usize> =
            component.terms().keys().map(|occ| occ.grade()).collect();
        if grades.len() > 1 {
            return Err(Error::Schema(
                "the dense cross-check needs every component at a single particle number".into(),
            ));
        }
    }
    let dense: Vec<(f64, LabeledTensor)> = loaded
        .components
        .iter()
        .map(|(w, v)| Ok((*w, dense_from_graded(v, v.max_grade())?)))
        .collect::<Result<_>>()?;
    let max_grade = loaded
        .components
        .iter()
        .map(|(_, v)| v.max_grade())
        .max()
        .unwrap_or(0);
    let zero = PhaseAssignment::zero();
    let twisted = random_phases(max_grade, seed);

    let mut state_entry = 0.0f64;
    let mut state_spectral = 0.0f64;
    for traced in [Side::Right, Side::Left] {
        let fast = reduced_density_matrix_mixed(&loaded.components, &loaded.bipartition, traced)?;
        let plain = partial_trace_explicit(&dense, &loaded.bipartition, traced, &zero)?;
        let twist = partial_trace_explicit(&dense, &loaded.bipartition, traced, &twisted)?;
        fast.validate()?;
        plain.validate()?;
        twist.validate()?;
        state_entry = state_entry
            .max(fast.max_abs_diff(&plain)?)
            .max(fast.max_abs_diff(&twist)?);
        state_spectral = state_spectral
            .max(fast.spectral_distance(&plain)?)
            .max(fast.spectral_distance(&twist)?)
            .max(plain.spectral_distance(&twist)?);
    }

    let mut text = format!(
        "state entry residual {:.3e}\nstate spectral residual {:.3e}\n",
        state_entry, state_spectral
    );
    let mut pass = state_entry <= tolerance && state_spectral <= tolerance;
    let mut random_results = Value::Null;
    if let Some(instances) = random {
        let threads = std::env::var("IDEMRDM_THREADS")
            .ok()
            .and_then(|raw| raw.parse::<usize>().ok())
            .unwrap_or(0);
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|err| Error::Schema(format!("thread pool: {}", err)))?;
        let outcomes: Result<Vec<_>> = pool.install(|| {
            use rayon::prelude::*;
            (0..instances)
                .into_par_iter()
                .map(|index| equivalence_instance(seed, index as u64, max_particles))
                .collect()
        });
        let outcomes = outcomes?;
        let entry = outcomes.iter().map(|o| o.entry_residual).fold(0.0, f64::max);
        let spectral = outcomes
            .iter()
            .map(|o| o.spectral_residual)
            .fold(0.0, f64::max);
        pass &= entry <= tolerance && spectral <= tolerance;
        random_results = json!({
            "instances": instances,
            "entry_residual": entry,
            "spectral_residual": spectral,
        });
        text.push_str(&format!(
            "random instances {} entry {:.3e} spectral {:.3e}\n",
            instances, entry, spectral
        ));
    }
    text.push_str(if pass { "PASS\n" } else { "FAIL\n" });

    Ok(Output {
        command: "verify-equivalence",
        inputs_digest: digest_files(&[path])?,
        results: json!({
            "state_entry_residual": state_entry,
            "state_spectral_residual": state_spectral,
            "random": random_results,
        }),
        pass,
        text,
        csv: None,
    })
}

fn verify_gns_command(path: &Path, trials: usize, seed: u64, tolerance: f64) -> Result<Output> {
    let loaded = load_state(path)?;
    warn_norm(&loaded);
    let report = gns_restriction_check(
        &loaded.components,
        &loaded.bipartition,
        trials,
        seed,
        tolerance,
    )?;
    let text = format!(
        "trials {}\nmax residual {:.3e}\n{}\n",
        report.trials,
        report.max_residual,
        if report.pass { "PASS" } else { "FAIL" }
    );
    Ok(Output {
        command: "verify-gns",
        inputs_digest: digest_files(&[path])?,
        results: json!({
            "max_residual": report.max_residual,
            "trials": report.trials,
            "pass": report.pass,
        }),
        pass: report.pass,
        text,
        csv: None,
    })
}

fn bench_command(min: usize, max: usize, reps: usize) -> Result<Output> {
    let rows = bench_permanent_rows(min, max, reps)?;
    let mut csv = String::from("n,method,seconds,checksum\n");
    let mut rows_json = Vec::new();
    for row in &rows {
        csv.push_str(&format!(
            "{},{},{:.9e},{}\n",
            row.n, row.method, row.seconds, row.checksum
        ));
        rows_json.push(json!({
            "n": row.n,
            "method": row.method,
            "seconds": row.seconds,
            "checksum": row.checksum,
        }));
    }
    Ok(Output {
        command: "bench-permanent",
        inputs_digest: digest_params(&format!("min={} max={} reps={}", min, max, reps)),
        results: json!({ "rows": rows_json }),
        pass: true,
        text: csv.clone(),
        csv: Some(csv),
    })
}
