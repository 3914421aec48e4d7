//! Slope stability of filtration families.
//!
//! Stability is decided by comparing the ambient slope against the slope of
//! the subsheaf induced on each candidate subspace `F`. For line-type
//! families (every proper jump subspace is a line) the candidate set below
//! is provably exhaustive: the induced slope of `F` depends only on
//! `dim F` and on which marked lines `F` contains, it improves as `dim F`
//! shrinks to the span of the contained lines, and containing no marked
//! line at all gives a dimension-independent value. So spans of subsets of
//! marked lines plus one generic subspace per dimension attain every
//! extremal value. For general families a sum/intersection closure of the
//! jump subspaces is used instead and the verdict is flagged non-exhaustive.

use std::collections::BTreeSet;

use itertools::Itertools;
use rayon::prelude::*;

use crate::degree::PolarisedDivisor;
use crate::error::{Error, Result};
use crate::filtration::FiltrationFamily;
use crate::linalg::{moment_vector, rat_int, Rat, Subspace};

/// Default number of closure passes for non-line-type candidate generation.
pub const DEFAULT_CLOSURE_CAP: usize = 3;

/// Hard bound on the closure set size.
const CLOSURE_SIZE_LIMIT: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StabilityStatus {
    Stable,
    StrictlySemistable,
    Unstable,
}

/// A destabilizing (or slope-matching) subspace together with the slope of
/// the subsheaf it induces.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub subspace: Subspace,
    pub slope: Rat,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StabilityVerdict {
    pub status: StabilityStatus,
    pub ambient_slope: Rat,
    /// Present iff the status is not `Stable`; the worst offender, ties
    /// broken by smallest dimension then lexicographically smallest basis.
    pub witness: Option<Witness>,
    /// Whether the candidate set provably covers all subspaces.
    pub exhaustive: bool,
}

/// Finite reduction of the subspace quantifier.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CandidateSet {
    pub subspaces: Vec<Subspace>,
    pub exhaustive: bool,
}

/// True iff every proper nonzero jump subspace of the family is a line.
pub fn is_line_type(family: &FiltrationFamily) -> bool {
    family
        .proper_jump_subspaces()
        .iter()
        .all(|s| s.dim() == 1)
}

/// Candidate subspaces with the default closure cap.
pub fn candidates(family: &FiltrationFamily) -> Result<CandidateSet> {
    candidates_with_cap(family, DEFAULT_CLOSURE_CAP)
}

/// Candidate subspaces. `closure_cap` bounds the closure passes taken in
/// the non-line-type branch; it has no effect on line-type families.
pub fn candidates_with_cap(family: &FiltrationFamily, closure_cap: usize) -> Result<CandidateSet> {
    let r = family.rank();
    if r == 1 {
        return Ok(CandidateSet {
            subspaces: Vec::new(),
            exhaustive: true,
        });
    }
    if is_line_type(family) {
        let marked = family.proper_jump_subspaces();
        let mut spans: BTreeSet<Subspace> = BTreeSet::new();
        for subset in marked.iter().powerset() {
            if subset.is_empty() {
                continue;
            }
            let vectors: Vec<Vec<Rat>> = subset
                .iter()
                .map(|line| line.basis()[0].clone())
                .collect();
            let span = Subspace::span(&vectors, r)?;
            if span.is_proper_nonzero() {
                spans.insert(span);
            }
        }
        let conditions: Vec<Subspace> = spans.iter().cloned().collect();
        let mut subspaces: Vec<Subspace> = conditions.clone();
        for d in 1..r {
            subspaces.push(generic_subspace(d, r, &conditions)?);
        }
        sort_candidates(&mut subspaces);
        Ok(CandidateSet {
            subspaces,
            exhaustive: true,
        })
    } else {
        let mut lattice: BTreeSet<Subspace> =
            family.proper_jump_subspaces().into_iter().collect();
        for _ in 0..closure_cap {
            let snapshot: Vec<Subspace> = lattice.iter().cloned().collect();
            let before = lattice.len();
            'outer: for (i, a) in snapshot.iter().enumerate() {
                for b in snapshot.iter().skip(i + 1) {
                    for c in [a.sum(b)?, a.intersect(b)?] {
                        if c.is_proper_nonzero() {
                            lattice.insert(c);
                        }
                    }
                    if lattice.len() >= CLOSURE_SIZE_LIMIT {
                        break 'outer;
                    }
                }
            }
            if lattice.len() == before {
                break;
            }
        }
        let conditions: Vec<Subspace> = lattice.iter().cloned().collect();
        let mut subspaces: Vec<Subspace> = conditions.clone();
        for d in 1..r {
            subspaces.push(generic_subspace(d, r, &conditions)?);
        }
        let mut deduped: Vec<Subspace> = subspaces
            .into_iter()
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        sort_candidates(&mut deduped);
        Ok(CandidateSet {
            subspaces: deduped,
            exhaustive: false,
        })
    }
}

fn sort_candidates(subspaces: &mut [Subspace]) {
    subspaces.sort_by(|a, b| {
        a.dim()
            .cmp(&b.dim())
            .then_with(|| a.basis().cmp(b.basis()))
    });
}

/// Deterministic `d`-dimensional subspace meeting every condition subspace
/// minimally: dimensions of intersections are `max(0, d + dim W - r)`.
/// Built one moment-curve vector at a time with parameters `t = 1, 2, ...`;
/// each step only needs to avoid finitely many proper subspaces, and a
/// moment vector lies in a fixed proper subspace for fewer than `r` values
/// of `t`, so the search terminates.
fn generic_subspace(d: usize, r: usize, conditions: &[Subspace]) -> Result<Subspace> {
    let mut current = Subspace::zero(r);
    let mut t: i64 = 0;
    while current.dim() < d {
        t += 1;
        if t > 10_000 {
            return Err(Error::Internal(
                "generic subspace search did not terminate".into(),
            ));
        }
        let v = moment_vector(t, r);
        if current.contains_vector(&v)? {
            continue;
        }
        let tentative = current.sum(&Subspace::span(&[v], r)?)?;
        let k = tentative.dim();
        let ok = conditions.iter().try_fold(true, |acc, w| {
            if !acc {
                return Ok::<bool, Error>(false);
            }
            let target = (k + w.dim()).saturating_sub(r);
            Ok(tentative.intersect(w)?.dim() == target)
        })?;
        if ok {
            current = tentative;
        }
    }
    Ok(current)
}

/// Decides slope stability per the subspace slope comparison, with the
/// default closure cap.
pub fn check_stability(
    family: &FiltrationFamily,
    divisor: &PolarisedDivisor,
) -> Result<StabilityVerdict> {
    check_stability_with_cap(family, divisor, DEFAULT_CLOSURE_CAP)
}

/// Decides slope stability: stable iff every candidate `F` satisfies
/// `(1/dim F) Σ iota_ρ(F) deg_ρ > (1/rank) Σ iota_ρ(E) deg_ρ`, i.e. every
/// induced subsheaf has strictly smaller slope.
pub fn check_stability_with_cap(
    family: &FiltrationFamily,
    divisor: &PolarisedDivisor,
    closure_cap: usize,
) -> Result<StabilityVerdict> {
    let degrees = divisor.degrees();
    let rank = family.rank();
    let ambient_value = family.weighted_iota_sum(degrees)? / rat_int(rank as i64);
    let ambient_slope = -ambient_value.clone();
    let cands = candidates_with_cap(family, closure_cap)?;

    let evaluated: Vec<(Rat, Subspace)> = cands
        .subspaces
        .par_iter()
        .map(|f| -> Result<(Rat, Subspace)> {
            let induced = family.induced_family(f)?;
            let value = induced.weighted_iota_sum(degrees)? / rat_int(f.dim() as i64);
            Ok((value, f.clone()))
        })
        .collect::<Result<Vec<_>>>()?;

    let worst = evaluated.into_iter().min_by(|(va, fa), (vb, fb)| {
        va.cmp(vb)
            .then_with(|| fa.dim().cmp(&fb.dim()))
            .then_with(|| fa.basis().cmp(fb.basis()))
    });

    let verdict = match worst {
        None => StabilityVerdict {
            status: StabilityStatus::Stable,
            ambient_slope,
            witness: None,
            exhaustive: cands.exhaustive,
        },
        Some((value, subspace)) => {
            let status = match value.cmp(&ambient_value) {
                std::cmp::Ordering::Less => StabilityStatus::Unstable,
                std::cmp::Ordering::Equal => StabilityStatus::StrictlySemistable,
                std::cmp::Ordering::Greater => StabilityStatus::Stable,
            };
            let witness = if status == StabilityStatus::Stable {
                None
            } else {
                Some(Witness {
                    slope: -value,
                    subspace,
                })
            };
            StabilityVerdict {
                status,
                ambient_slope,
                witness,
                exhaustive: cands.exhaustive,
            }
        }
    };
    Ok(verdict)
}
