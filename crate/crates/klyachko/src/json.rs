//! JSON formats for fans, divisors, filtration families and reports.
//!
//! All rational numbers cross the boundary as strings `"p/q"` or `"p"`, so
//! no consumer ever sees a rounded value. Emitted fans and families
//! re-parse to the same in-memory values.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::construction::{ConstructionReport, OptimalityReport, StableExample};
use crate::degree::DegreeVector;
use crate::error::{Error, Result};
use crate::fan::{Fan, ValidationReport};
use crate::filtration::{FiltrationFamily, InvariantRecord};
use crate::freeness::{FreenessReport, SplittingCertificate};
use crate::linalg::{Rat, Subspace};
use crate::stability::{StabilityStatus, StabilityVerdict};

/// Parses `"p/q"` or `"p"`; the denominator must be nonzero.
pub fn parse_rat(s: &str) -> Result<Rat> {
    let bad = |_| Error::InvalidFiltration(format!("bad rational literal {s:?}"));
    let t = s.trim();
    match t.split_once('/') {
        None => Ok(Rat::from_integer(t.parse::<BigInt>().map_err(bad)?)),
        Some((num, den)) => {
            let n = num.trim().parse::<BigInt>().map_err(bad)?;
            let d = den.trim().parse::<BigInt>().map_err(bad)?;
            if d.is_zero() {
                return Err(Error::InvalidFiltration(format!(
                    "zero denominator in {s:?}"
                )));
            }
            Ok(Rat::new(n, d))
        }
    }
}

/// Formats a rational as `"p/q"`, or `"p"` for integers.
pub fn fmt_rat(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

fn basis_to_strings(s: &Subspace) -> Vec<Vec<String>> {
    s.basis()
        .iter()
        .map(|row| row.iter().map(fmt_rat).collect())
        .collect()
}

// ---------------------------------------------------------------------------
// Input files
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FanJson {
    pub dim: usize,
    pub rays: Vec<Vec<i64>>,
    pub max_cones: Vec<Vec<usize>>,
}

impl FanJson {
    pub fn to_fan(&self) -> Result<Fan> {
        Fan::new(self.dim, self.rays.clone(), self.max_cones.clone())
    }

    pub fn from_fan(fan: &Fan) -> Self {
        FanJson {
            dim: fan.dim(),
            rays: fan.rays().to_vec(),
            max_cones: fan.max_cones().to_vec(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DivisorJson {
    pub coeffs: Vec<i64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct JumpJson {
    pub i: i64,
    pub basis: Vec<Vec<String>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FamilyJson {
    pub rank: usize,
    pub filtrations: Vec<Vec<JumpJson>>,
    /// Optional construction metadata; ignored on input.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<i64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub constant: Option<i64>,
}

impl FamilyJson {
    pub fn to_family(&self) -> Result<FiltrationFamily> {
        let filtrations = self
            .filtrations
            .iter()
            .map(|jumps| {
                jumps
                    .iter()
                    .map(|jump| {
                        let rows: Vec<Vec<Rat>> = jump
                            .basis
                            .iter()
                            .map(|row| row.iter().map(|s| parse_rat(s)).collect())
                            .collect::<Result<_>>()?;
                        Ok((jump.i, Subspace::span(&rows, self.rank)?))
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        FiltrationFamily::new(self.rank, filtrations)
    }

    pub fn from_family(family: &FiltrationFamily) -> Self {
        FamilyJson {
            rank: family.rank(),
            filtrations: family
                .ray_filtrations()
                .iter()
                .map(|filt| {
                    filt.jumps()
                        .iter()
                        .map(|(i, s)| JumpJson {
                            i: *i,
                            basis: basis_to_strings(s),
                        })
                        .collect()
                })
                .collect(),
            weights: None,
            constant: None,
        }
    }

    pub fn from_example(example: &StableExample) -> Self {
        let mut json = Self::from_family(&example.family);
        json.weights = Some(example.weights.clone());
        json.constant = Some(example.constant);
        json
    }
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize)]
pub struct ValidateOut {
    pub smooth: bool,
    pub complete: bool,
    pub messages: Vec<String>,
}

impl ValidateOut {
    pub fn new(report: &ValidationReport) -> Self {
        ValidateOut {
            smooth: report.smooth,
            complete: report.complete,
            messages: report.messages.clone(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DegreesOut {
    pub deg: Vec<i64>,
}

impl DegreesOut {
    pub fn new(v: &DegreeVector) -> Self {
        DegreesOut { deg: v.deg.clone() }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct InvariantsOut {
    pub iota: Vec<i64>,
    pub c1: Vec<i64>,
    pub slope: String,
}

impl InvariantsOut {
    pub fn new(record: &InvariantRecord) -> Self {
        InvariantsOut {
            iota: record.iota.clone(),
            c1: record.c1.clone(),
            slope: fmt_rat(&record.slope),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct WitnessOut {
    pub basis: Vec<Vec<String>>,
    pub slope: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerdictOut {
    pub status: String,
    pub slope: String,
    pub exhaustive: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<WitnessOut>,
}

impl VerdictOut {
    pub fn new(verdict: &StabilityVerdict) -> Self {
        VerdictOut {
            status: match verdict.status {
                StabilityStatus::Stable => "stable",
                StabilityStatus::StrictlySemistable => "strictly_semistable",
                StabilityStatus::Unstable => "unstable",
            }
            .to_string(),
            slope: fmt_rat(&verdict.ambient_slope),
            exhaustive: verdict.exhaustive,
            witness: verdict.witness.as_ref().map(|w| WitnessOut {
                basis: basis_to_strings(&w.subspace),
                slope: fmt_rat(&w.slope),
            }),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PieceOut {
    pub multiweight: Vec<i64>,
    pub basis: Vec<Vec<String>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CertificateOut {
    pub rays: Vec<usize>,
    pub compatible: bool,
    pub verified: bool,
    pub pieces: Vec<PieceOut>,
}

impl CertificateOut {
    pub fn new(cert: &SplittingCertificate) -> Self {
        CertificateOut {
            rays: cert.rays.clone(),
            compatible: cert.compatible,
            verified: cert.verified,
            pieces: cert
                .pieces
                .iter()
                .map(|(w, s)| PieceOut {
                    multiweight: w.clone(),
                    basis: basis_to_strings(s),
                })
                .collect(),
        }
    }
}

fn sing_dim_value(sing_dim: Option<usize>) -> serde_json::Value {
    match sing_dim {
        Some(d) => serde_json::Value::from(d),
        None => serde_json::Value::from("empty"),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ConeVerdictOut {
    pub rays: Vec<usize>,
    pub compatible: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct FreenessOut {
    pub locally_free: bool,
    pub minimal_incompatible_cones: Vec<Vec<usize>>,
    pub sing_dim: serde_json::Value,
    pub unverified: Vec<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cone_verdicts: Option<Vec<ConeVerdictOut>>,
}

impl FreenessOut {
    pub fn new(report: &FreenessReport, with_verdicts: bool) -> Self {
        FreenessOut {
            locally_free: report.locally_free,
            minimal_incompatible_cones: report
                .minimal_incompatible
                .iter()
                .map(|c| c.ray_indices().to_vec())
                .collect(),
            sing_dim: sing_dim_value(report.sing_dim),
            unverified: report
                .unverified
                .iter()
                .map(|c| c.ray_indices().to_vec())
                .collect(),
            cone_verdicts: with_verdicts.then(|| {
                report
                    .cone_verdicts
                    .iter()
                    .map(|(c, ok)| ConeVerdictOut {
                        rays: c.ray_indices().to_vec(),
                        compatible: *ok,
                    })
                    .collect()
            }),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RankRowOut {
    pub rank: usize,
    pub slope: String,
    pub closed_form_matches: bool,
    pub stable: bool,
    pub exhaustive: bool,
    pub locally_free: bool,
    pub sing_dim: serde_json::Value,
    pub pass: bool,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConstructionOut {
    pub weights: Vec<i64>,
    pub constant: i64,
    pub rows: Vec<RankRowOut>,
    pub all_pass: bool,
}

impl ConstructionOut {
    pub fn new(report: &ConstructionReport) -> Self {
        ConstructionOut {
            weights: report.weights.clone(),
            constant: report.constant,
            rows: report
                .rows
                .iter()
                .map(|row| RankRowOut {
                    rank: row.rank,
                    slope: fmt_rat(&row.slope),
                    closed_form_matches: row.closed_form_matches,
                    stable: row.stable,
                    exhaustive: row.exhaustive,
                    locally_free: row.locally_free,
                    sing_dim: sing_dim_value(row.sing_dim),
                    pass: row.pass,
                    notes: row.notes.clone(),
                })
                .collect(),
            all_pass: report.all_pass,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct OptimalityOut {
    pub n: usize,
    pub sing_dim: serde_json::Value,
    pub expected: usize,
    pub minimal_are_three_cones: bool,
    pub low_dims_compatible: bool,
    pub triples_distinct: bool,
    pub stable: bool,
    pub pass: bool,
}

impl OptimalityOut {
    pub fn new(report: &OptimalityReport) -> Self {
        OptimalityOut {
            n: report.dim,
            sing_dim: sing_dim_value(report.sing_dim),
            expected: report.expected,
            minimal_are_three_cones: report.minimal_are_three_cones,
            low_dims_compatible: report.low_dims_compatible,
            triples_distinct: report.triples_distinct,
            stable: report.stable,
            pass: report.pass,
        }
    }
}
