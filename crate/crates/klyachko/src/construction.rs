//! Construction of stable low-rank families and verification drivers.
//!
//! On a polarised smooth complete toric variety with ray degrees
//! `deg_ρ = deg_L(D_ρ)`, set `m_ρ = Π_{ρ' ≠ ρ} deg_ρ'`, so that
//! `m_ρ · deg_ρ` is a constant `c`. Marking each ray with one vector of a
//! general-position collection and filtering `0 → line → full` with the
//! jump at `m_ρ` yields, for every rank `2 <= r <= #rays - 1`, a slope
//! stable family that is locally free iff `r >= dim`, with singular locus
//! of dimension strictly below `dim - r` otherwise.

use crate::degree::PolarisedDivisor;
use crate::error::{Error, Result};
use crate::fan::{Cone, Fan};
use crate::filtration::FiltrationFamily;
use crate::freeness::{singular_locus, FreenessReport};
use crate::linalg::{moment_vector, rat_int, Rat, Subspace};
use crate::stability::{check_stability, StabilityStatus};

/// A constructed stable family together with its defining data.
#[derive(Debug, Clone)]
pub struct StableExample {
    pub family: FiltrationFamily,
    /// Marked line per ray.
    pub marked: Vec<Subspace>,
    /// Jump height per ray: the product of the other rays' degrees.
    pub weights: Vec<i64>,
    /// Common value of `weights[ρ] * deg_ρ`.
    pub constant: i64,
}

/// `m` vectors in `Q^r` such that any `d <= min(r, m)` of them are linearly
/// independent: points on the moment curve with parameters `1..=m`.
pub fn general_position_vectors(r: usize, m: usize) -> Result<Vec<Vec<Rat>>> {
    if r < 2 {
        return Err(Error::RankOutOfRange { rank: r, max: usize::MAX });
    }
    Ok((1..=m as i64).map(|t| moment_vector(t, r)).collect())
}

/// Exhaustively checks the general-position property: every subset of size
/// `d <= min(r, m)` is linearly independent.
pub fn validate_general_position(vectors: &[Vec<Rat>], r: usize) -> bool {
    use itertools::Itertools;
    if vectors.iter().any(|v| v.len() != r) {
        return false;
    }
    let m = vectors.len();
    for d in 1..=r.min(m) {
        for subset in vectors.iter().combinations(d) {
            let rows: Vec<Vec<Rat>> = subset.into_iter().cloned().collect();
            match Subspace::span(&rows, r) {
                Ok(s) if s.dim() == d => {}
                _ => return false,
            }
        }
    }
    true
}

/// Builds the rank-`r` stable family on `(fan, divisor)`.
///
/// Admissible ranks are `2 <= r <= #rays - 1`; per ray the filtration jumps
/// to the marked line at 0 and to the full space at `m_ρ`.
pub fn build_stable_family(
    fan: &Fan,
    divisor: &PolarisedDivisor,
    r: usize,
) -> Result<StableExample> {
    let num_rays = fan.num_rays();
    if r < 2 || r + 1 > num_rays {
        return Err(Error::RankOutOfRange {
            rank: r,
            max: num_rays.saturating_sub(1),
        });
    }
    let degrees = divisor.degrees();
    let weights: Vec<i64> = (0..num_rays)
        .map(|ray| {
            degrees
                .iter()
                .enumerate()
                .filter(|&(other, _)| other != ray)
                .try_fold(1i64, |acc, (_, &d)| acc.checked_mul(d))
                .ok_or(Error::Overflow("jump weight"))
        })
        .collect::<Result<Vec<_>>>()?;
    let constant = weights[0]
        .checked_mul(degrees[0])
        .ok_or(Error::Overflow("degree product"))?;
    for (ray, (&w, &d)) in weights.iter().zip(degrees.iter()).enumerate() {
        if w.checked_mul(d) != Some(constant) {
            return Err(Error::Internal(format!(
                "weight times degree is not constant on ray {ray}"
            )));
        }
    }

    let vectors = general_position_vectors(r, num_rays)?;
    if !validate_general_position(&vectors, r) {
        return Err(Error::Internal(
            "moment-curve vectors failed the general position check".into(),
        ));
    }
    let marked: Vec<Subspace> = vectors
        .iter()
        .map(|v| Subspace::line(v))
        .collect::<Result<Vec<_>>>()?;
    let filtrations = marked
        .iter()
        .zip(weights.iter())
        .map(|(line, &m)| vec![(0, line.clone()), (m, Subspace::full(r))])
        .collect();
    let family = FiltrationFamily::new(r, filtrations)?;
    Ok(StableExample {
        family,
        marked,
        weights,
        constant,
    })
}

/// `-c (r-1) #rays / r`: the closed-form slope of the constructed family.
pub fn closed_form_slope(constant: i64, r: usize, num_rays: usize) -> Rat {
    -(rat_int(constant) * rat_int(r as i64 - 1) * rat_int(num_rays as i64))
        / rat_int(r as i64)
}

/// One verified rank in [`verify_construction`].
#[derive(Debug, Clone)]
pub struct RankRow {
    pub rank: usize,
    pub slope: Rat,
    pub closed_form_matches: bool,
    pub stable: bool,
    pub exhaustive: bool,
    pub locally_free: bool,
    pub sing_dim: Option<usize>,
    pub pass: bool,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct ConstructionReport {
    pub weights: Vec<i64>,
    pub constant: i64,
    pub rows: Vec<RankRow>,
    pub all_pass: bool,
}

/// Builds and checks the family for every admissible rank: stable with an
/// exhaustive candidate set, slope equal to the closed form, locally free
/// exactly when `r >= dim`, and singular locus dimension `< dim - r`
/// otherwise.
pub fn verify_construction(fan: &Fan, divisor: &PolarisedDivisor) -> Result<ConstructionReport> {
    fan.require_smooth_complete()?;
    let n = fan.dim();
    let num_rays = fan.num_rays();
    let mut rows = Vec::new();
    let mut weights = Vec::new();
    let mut constant = 0i64;
    for r in 2..num_rays {
        let example = build_stable_family(fan, divisor, r)?;
        weights = example.weights.clone();
        constant = example.constant;
        let mut notes = Vec::new();

        let slope = example.family.slope(divisor)?;
        let closed = closed_form_slope(example.constant, r, num_rays);
        let closed_form_matches = slope == closed;
        if !closed_form_matches {
            notes.push(format!("slope {slope} differs from closed form {closed}"));
        }

        let verdict = check_stability(&example.family, divisor)?;
        let stable = verdict.status == StabilityStatus::Stable;
        if !stable {
            notes.push(format!("expected stable, got {:?}", verdict.status));
        }
        if !verdict.exhaustive {
            notes.push("candidate set unexpectedly non-exhaustive".into());
        }

        let freeness = singular_locus(&example.family, fan)?;
        let free_ok = freeness.locally_free == (r >= n);
        if !free_ok {
            notes.push(format!(
                "locally_free = {} but rank {r} vs dimension {n}",
                freeness.locally_free
            ));
        }
        let sing_ok = if r < n {
            matches!(freeness.sing_dim, Some(s) if s + r < n)
        } else {
            freeness.sing_dim.is_none()
        };
        if !sing_ok {
            notes.push(format!("sing_dim {:?} out of bounds", freeness.sing_dim));
        }
        if !freeness.unverified.is_empty() {
            notes.push("unverified incompatibility verdicts".into());
        }

        let pass = closed_form_matches
            && stable
            && verdict.exhaustive
            && free_ok
            && sing_ok
            && freeness.unverified.is_empty();
        rows.push(RankRow {
            rank: r,
            slope,
            closed_form_matches,
            stable,
            exhaustive: verdict.exhaustive,
            locally_free: freeness.locally_free,
            sing_dim: freeness.sing_dim,
            pass,
            notes,
        });
    }
    let all_pass = !rows.is_empty() && rows.iter().all(|row| row.pass);
    Ok(ConstructionReport {
        weights,
        constant,
        rows,
        all_pass,
    })
}

/// Outcome of [`verify_rank2_optimality`].
#[derive(Debug, Clone)]
pub struct OptimalityReport {
    pub dim: usize,
    pub sing_dim: Option<usize>,
    pub expected: usize,
    /// Minimal incompatible cones are exactly the 3-dimensional cones.
    pub minimal_are_three_cones: bool,
    /// All cones of dimension <= 2 are compatible.
    pub low_dims_compatible: bool,
    /// Every 3-cone carries three pairwise distinct marked lines.
    pub triples_distinct: bool,
    pub stable: bool,
    pub pass: bool,
}

/// Checks that the rank-2 family on projective `n`-space (`n >= 3`) has a
/// singular locus of dimension exactly `n - 3`, realized by every
/// 3-dimensional cone via three pairwise distinct marked lines, with all
/// smaller cones compatible.
pub fn verify_rank2_optimality(n: usize) -> Result<OptimalityReport> {
    if n < 3 {
        return Err(Error::InvalidFan(format!(
            "rank-2 optimality needs dimension >= 3, got {n}"
        )));
    }
    let fan = Fan::projective_space(n);
    let mut coeffs = vec![0i64; n + 1];
    coeffs[n] = 1;
    let divisor = PolarisedDivisor::new(&fan, coeffs)?;
    let example = build_stable_family(&fan, &divisor, 2)?;
    let verdict = check_stability(&example.family, &divisor)?;
    let stable = verdict.status == StabilityStatus::Stable;
    let report: FreenessReport = singular_locus(&example.family, &fan)?;

    let three_cones = fan.cones_of_dim(3)?;
    let mut minimal = report.minimal_incompatible.clone();
    minimal.sort();
    let minimal_are_three_cones = minimal == three_cones;

    let low_dims_compatible = report
        .cone_verdicts
        .iter()
        .filter(|(c, _)| c.dim() <= 2)
        .all(|(_, ok)| *ok);

    let triples_distinct = three_cones.iter().all(|cone| {
        let lines: Vec<&Subspace> = cone
            .ray_indices()
            .iter()
            .map(|&r| &example.marked[r])
            .collect();
        lines[0] != lines[1] && lines[0] != lines[2] && lines[1] != lines[2]
    });

    let expected = n - 3;
    let pass = report.sing_dim == Some(expected)
        && minimal_are_three_cones
        && low_dims_compatible
        && triples_distinct
        && stable
        && report.unverified.is_empty();
    Ok(OptimalityReport {
        dim: n,
        sing_dim: report.sing_dim,
        expected,
        minimal_are_three_cones,
        low_dims_compatible,
        triples_distinct,
        stable,
        pass,
    })
}

/// The 3-dimensional cones of a fan whose three marked lines are pairwise
/// distinct; used to cross-check which cones must be incompatible for a
/// rank-2 family.
pub fn distinct_line_triples(fan: &Fan, marked: &[Subspace]) -> Result<Vec<Cone>> {
    if marked.len() != fan.num_rays() {
        return Err(Error::DimensionMismatch {
            expected: fan.num_rays(),
            got: marked.len(),
        });
    }
    if fan.dim() < 3 {
        return Ok(Vec::new());
    }
    Ok(fan
        .cones_of_dim(3)?
        .into_iter()
        .filter(|cone| {
            let idx = cone.ray_indices();
            let a = &marked[idx[0]];
            let b = &marked[idx[1]];
            let c = &marked[idx[2]];
            a != b && a != c && b != c
        })
        .collect())
}
