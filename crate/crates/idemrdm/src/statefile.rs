//! JSON state files: schema, parsing, and validation.
//!
//! A state file fixes the species, the mode count, the left/right mode
//! split, and either one pure state (`terms`) or a mixture of weighted pure
//! states (`mixture`), exactly one of the two. Amplitudes are [re, im]
//! pairs; orbital lists must already be in canonical order. States that are
//! normalized only approximately are accepted with a recorded warning and
//! renormalized.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::entanglement::Bipartition;
use crate::error::{Error, Result};
use crate::fock::{GradedVector, OccupationState, Statistics};

/// Norm deviations larger than this are surfaced as a warning.
pub const NORM_WARNING_TOL: f64 = 1e-6;
/// Mixture weights must sum to one within this.
pub const WEIGHT_SUM_TOL: f64 = 1e-9;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StateFile {
    pub statistics: Statistics,
    pub dim: usize,
    pub modes: Modes,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub terms: Option<Vec<TermSpec>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mixture: Option<Vec<MixtureComponent>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Modes {
    #[serde(rename = "L")]
    pub left: Vec<usize>,
    #[serde(rename = "R")]
    pub right: Vec<usize>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TermSpec {
    pub amplitude: [f64; 2],
    pub orbitals: Vec<usize>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MixtureComponent {
    pub weight: f64,
    pub terms: Vec<TermSpec>,
}

/// A parsed and validated state file, components unit-normalized.
#[derive(Clone, Debug)]
pub struct LoadedState {
    pub statistics: Statistics,
    pub bipartition: Bipartition,
    pub components: Vec<(f64, GradedVector)>,
    /// Largest norm deviation found before renormalizing, when above the
    /// warning threshold.
    pub norm_warning: Option<f64>,
    /// The raw file, kept for callers that need the literal term list.
    pub file: StateFile,
}

fn build_component(
    terms: &[TermSpec],
    stats: Statistics,
    dim: usize,
) -> Result<(GradedVector, f64)> {
    if terms.is_empty() {
        return Err(Error::Schema("a state needs at least one term".into()));
    }
    let mut pairs = Vec::with_capacity(terms.len());
    for term in terms {
        let [re, im] = term.amplitude;
        if !re.is_finite() || !im.is_finite() {
            return Err(Error::Schema(format!(
                "non-finite amplitude [{}, {}]",
                re, im
            )));
        }
        let occ = OccupationState::new(term.orbitals.clone(), stats, dim)?;
        pairs.push((occ, Complex64::new(re, im)));
    }
    let v = GradedVector::from_terms(stats, dim, pairs)?;
    let norm = v.norm();
    if norm < 1e-12 {
        return Err(Error::ZeroState);
    }
    Ok((v.normalized()?, (norm - 1.0).abs()))
}

/// Parses and validates a state file from its JSON text.
pub fn parse_state_str(text: &str) -> Result<LoadedState> {
    let file: StateFile = serde_json::from_str(text)?;
    let bipartition = Bipartition::from_sides(
        file.dim,
        file.modes.left.clone(),
        file.modes.right.clone(),
    )?;
    let mut norm_deviation = 0.0f64;
    let components = match (&file.terms, &file.mixture) {
        (Some(terms), None) => {
            let (v, dev) = build_component(terms, file.statistics, file.dim)?;
            norm_deviation = dev;
            vec![(1.0, v)]
        }
        (None, Some(mixture)) => {
            if mixture.is_empty() {
                return Err(Error::Schema("mixture must contain components".into()));
            }
            let mut total = 0.0;
            let mut components = Vec::with_capacity(mixture.len());
            for part in mixture {
                // Written so that a NaN weight also fails.
                let positive = part.weight > 0.0;
                if !positive {
                    return Err(Error::BadWeights(part.weight));
                }
                total += part.weight;
                let (v, dev) = build_component(&part.terms, file.statistics, file.dim)?;
                norm_deviation = norm_deviation.max(dev);
                components.push((part.weight, v));
            }
            if (total - 1.0).abs() > WEIGHT_SUM_TOL {
                return Err(Error::BadWeights(total));
            }
            components
        }
        (Some(_), Some(_)) => {
            return Err(Error::Schema(
                "a state file carries either terms or mixture, not both".into(),
            ))
        }
        (None, None) => {
            return Err(Error::Schema(
                "a state file needs either terms or mixture".into(),
            ))
        }
    };
    let norm_warning = (norm_deviation > NORM_WARNING_TOL).then_some(norm_deviation);
    Ok(LoadedState {
        statistics: file.statistics,
        bipartition,
        components,
        norm_warning,
        file,
    })
}

/// Parses a state file from disk.
pub fn parse_state_file(path: &std::path::Path) -> Result<LoadedState> {
    let text = std::fs::read_to_string(path)?;
    parse_state_str(&text)
}

/// Serializes a state file back to JSON.
pub fn to_json(file: &StateFile) -> Result<String> {
    Ok(serde_json::to_string_pretty(file)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pure_json() -> &'static str {
        r#"{
            "statistics": "fermion",
            "dim": 4,
            "modes": {"L": [0, 1], "R": [2, 3]},
            "terms": [
                {"amplitude": [0.7071067811865476, 0.0], "orbitals": [0, 2]},
                {"amplitude": [0.7071067811865476, 0.0], "orbitals": [1, 3]}
            ]
        }"#
    }

    #[test]
    fn parses_a_pure_state() {
        let loaded = parse_state_str(pure_json()).unwrap();
        assert_eq!(loaded.statistics, Statistics::Fermion);
        assert_eq!(loaded.components.len(), 1);
        assert!(loaded.norm_warning.is_none());
        assert_eq!(loaded.bipartition.side_ids(crate::entanglement::Side::Left), &[0, 1]);
        let (w, v) = &loaded.components[0];
        assert_eq!(*w, 1.0);
        assert!((v.norm() - 1.0).abs() < 1e-12);
        assert_eq!(v.terms().len(), 2);
    }

    #[test]
    fn renormalizes_with_warning() {
        let text = r#"{
            "statistics": "boson",
            "dim": 2,
            "modes": {"L": [0], "R": [1]},
            "terms": [{"amplitude": [2.0, 0.0], "orbitals": [0, 1]}]
        }"#;
        let loaded = parse_state_str(text).unwrap();
        assert!(loaded.norm_warning.is_some());
        assert!((loaded.components[0].1.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_terms_and_mixture_together() {
        let text = r#"{
            "statistics": "fermion",
            "dim": 2,
            "modes": {"L": [0], "R": [1]},
            "terms": [{"amplitude": [1.0, 0.0], "orbitals": [0]}],
            "mixture": [{"weight": 1.0, "terms": [{"amplitude": [1.0, 0.0], "orbitals": [0]}]}]
        }"#;
        assert!(matches!(parse_state_str(text), Err(Error::Schema(_))));
        let neither = r#"{
            "statistics": "fermion",
            "dim": 2,
            "modes": {"L": [0], "R": [1]}
        }"#;
        assert!(matches!(parse_state_str(neither), Err(Error::Schema(_))));
    }

    #[test]
    fn rejects_noncanonical_orbital_order() {
        let unsorted = r#"{
            "statistics": "fermion",
            "dim": 4,
            "modes": {"L": [0, 1], "R": [2, 3]},
            "terms": [{"amplitude": [1.0, 0.0], "orbitals": [2, 0]}]
        }"#;
        assert!(matches!(
            parse_state_str(unsorted),
            Err(Error::InvalidOccupation(_))
        ));
        let repeated_fermion = r#"{
            "statistics": "fermion",
            "dim": 4,
            "modes": {"L": [0, 1], "R": [2, 3]},
            "terms": [{"amplitude": [1.0, 0.0], "orbitals": [2, 2]}]
        }"#;
        assert!(parse_state_str(repeated_fermion).is_err());
        let repeated_boson = r#"{
            "statistics": "boson",
            "dim": 4,
            "modes": {"L": [0, 1], "R": [2, 3]},
            "terms": [{"amplitude": [1.0, 0.0], "orbitals": [2, 2]}]
        }"#;
        assert!(parse_state_str(repeated_boson).is_ok());
    }

    #[test]
    fn mixture_weights_must_sum_to_one() {
        let text = r#"{
            "statistics": "fermion",
            "dim": 2,
            "modes": {"L": [0], "R": [1]},
            "mixture": [
                {"weight": 0.5, "terms": [{"amplitude": [1.0, 0.0], "orbitals": [0]}]},
                {"weight": 0.6, "terms": [{"amplitude": [1.0, 0.0], "orbitals": [1]}]}
            ]
        }"#;
        assert!(matches!(parse_state_str(text), Err(Error::BadWeights(_))));
    }

    #[test]
    fn modes_must_partition_the_dimension() {
        let text = r#"{
            "statistics": "fermion",
            "dim": 3,
            "modes": {"L": [0], "R": [2]},
            "terms": [{"amplitude": [1.0, 0.0], "orbitals": [0]}]
        }"#;
        assert!(matches!(
            parse_state_str(text),
            Err(Error::BadBipartition(_))
        ));
    }

    #[test]
    fn round_trips_through_json() {
        let loaded = parse_state_str(pure_json()).unwrap();
        let text = to_json(&loaded.file).unwrap();
        let reloaded = parse_state_str(&text).unwrap();
        assert_eq!(loaded.components.len(), reloaded.components.len());
        let (_, a) = &loaded.components[0];
        let (_, b) = &reloaded.components[0];
        assert_eq!(a.terms(), b.terms());
    }
}
