//! Families of filtrations and their numerical invariants.
//!
//! An equivariant reflexive sheaf of rank `r` on a toric variety is the same
//! data as a vector space `Q^r` together with one bounded increasing
//! filtration per ray. A filtration is stored sparsely as its jump list:
//! pairs `(i_1, S_1), ..., (i_k, S_k)` with strictly increasing indices and
//! strictly increasing subspaces ending at the full space; the filtration
//! evaluates to the largest `S_j` with `i_j <= i`, and to zero below `i_1`.

use crate::degree::PolarisedDivisor;
use crate::error::{Error, Result};
use crate::fan::{Cone, Fan};
use crate::linalg::{rat_int, Rat, Subspace};

/// One ray's filtration, as a sparse jump list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RayFiltration {
    jumps: Vec<(i64, Subspace)>,
}

impl RayFiltration {
    /// Jump pairs `(index, subspace)`, increasing in both components.
    pub fn jumps(&self) -> &[(i64, Subspace)] {
        &self.jumps
    }

    /// Sorted list of jump indices.
    pub fn jump_indices(&self) -> Vec<i64> {
        self.jumps.iter().map(|(i, _)| *i).collect()
    }

    pub fn first_jump(&self) -> i64 {
        self.jumps[0].0
    }

    pub fn last_jump(&self) -> i64 {
        self.jumps[self.jumps.len() - 1].0
    }

    /// Filtration value at `i`.
    pub fn eval(&self, i: i64, ambient: usize) -> Subspace {
        let mut current = Subspace::zero(ambient);
        for (j, s) in &self.jumps {
            if *j <= i {
                current = s.clone();
            } else {
                break;
            }
        }
        current
    }
}

/// A rank-`r` family of filtrations, one per ray of a fan.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiltrationFamily {
    rank: usize,
    rays: Vec<RayFiltration>,
}

/// Summary invariants of a family with respect to a polarisation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InvariantRecord {
    /// Weighted jump sum per ray.
    pub iota: Vec<i64>,
    /// First Chern class coefficients: `-iota` per ray.
    pub c1: Vec<i64>,
    pub slope: Rat,
}

impl FiltrationFamily {
    /// Validates and builds a family. Each ray's jump list must be strictly
    /// increasing in index, strictly increasing as subspaces starting from a
    /// nonzero one, and must end at the full space.
    pub fn new(rank: usize, filtrations: Vec<Vec<(i64, Subspace)>>) -> Result<Self> {
        if rank == 0 {
            return Err(Error::InvalidFiltration("rank must be positive".into()));
        }
        let mut rays = Vec::with_capacity(filtrations.len());
        for (ray, jumps) in filtrations.into_iter().enumerate() {
            if jumps.is_empty() {
                return Err(Error::InvalidFiltration(format!(
                    "ray {ray}: empty jump list"
                )));
            }
            for (i, (_, s)) in jumps.iter().enumerate() {
                if s.ambient_dim() != rank {
                    return Err(Error::DimensionMismatch {
                        expected: rank,
                        got: s.ambient_dim(),
                    });
                }
                if i > 0 && jumps[i - 1].0 >= jumps[i].0 {
                    return Err(Error::InvalidFiltration(format!(
                        "ray {ray}: jump indices not strictly increasing"
                    )));
                }
                if i > 0
                    && !(s.contains_subspace(&jumps[i - 1].1)? && s.dim() > jumps[i - 1].1.dim())
                {
                    return Err(Error::InvalidFiltration(format!(
                        "ray {ray}: jump subspaces not strictly increasing"
                    )));
                }
            }
            if jumps[0].1.is_zero() {
                return Err(Error::InvalidFiltration(format!(
                    "ray {ray}: first jump subspace is zero"
                )));
            }
            if !jumps[jumps.len() - 1].1.is_full() {
                return Err(Error::InvalidFiltration(format!(
                    "ray {ray}: filtration does not reach the full space"
                )));
            }
            rays.push(RayFiltration { jumps });
        }
        Ok(FiltrationFamily { rank, rays })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn num_rays(&self) -> usize {
        self.rays.len()
    }

    pub fn ray_filtration(&self, ray: usize) -> Result<&RayFiltration> {
        self.rays.get(ray).ok_or(Error::InvalidRay(ray))
    }

    pub fn ray_filtrations(&self) -> &[RayFiltration] {
        &self.rays
    }

    /// The filtration value `E^ρ(i)`.
    pub fn eval(&self, ray: usize, i: i64) -> Result<Subspace> {
        Ok(self.ray_filtration(ray)?.eval(i, self.rank))
    }

    /// Weighted jump sum `Σ_i i · (dim E^ρ(i) - dim E^ρ(i-1))` of one ray.
    pub fn iota(&self, ray: usize) -> Result<i64> {
        let filt = self.ray_filtration(ray)?;
        let mut total: i64 = 0;
        let mut prev_dim = 0usize;
        for (i, s) in filt.jumps() {
            total += i * (s.dim() as i64 - prev_dim as i64);
            prev_dim = s.dim();
        }
        Ok(total)
    }

    pub fn iota_all(&self) -> Vec<i64> {
        (0..self.num_rays())
            .map(|r| self.iota(r).expect("ray index in range"))
            .collect()
    }

    /// First Chern class divisor coefficients: `-iota` on each ray.
    pub fn first_chern(&self) -> Vec<i64> {
        self.iota_all().into_iter().map(|i| -i).collect()
    }

    /// Slope with respect to `divisor`:
    /// `-(1/rank) Σ_ρ iota_ρ · deg_L(D_ρ)`, exactly.
    pub fn slope(&self, divisor: &PolarisedDivisor) -> Result<Rat> {
        Ok(-self.weighted_iota_sum(divisor.degrees())? / rat_int(self.rank as i64))
    }

    /// `Σ_ρ iota_ρ · deg_ρ` as an exact rational.
    pub fn weighted_iota_sum(&self, degrees: &[i64]) -> Result<Rat> {
        if degrees.len() != self.num_rays() {
            return Err(Error::DimensionMismatch {
                expected: self.num_rays(),
                got: degrees.len(),
            });
        }
        let mut acc = rat_int(0);
        for (ray, &deg) in degrees.iter().enumerate() {
            acc += rat_int(self.iota(ray)?) * rat_int(deg);
        }
        Ok(acc)
    }

    pub fn invariants(&self, divisor: &PolarisedDivisor) -> Result<InvariantRecord> {
        Ok(InvariantRecord {
            iota: self.iota_all(),
            c1: self.first_chern(),
            slope: self.slope(divisor)?,
        })
    }

    /// Tensors by the equivariant line bundle with coefficients `shifts`:
    /// every jump index on ray `ρ` moves by `-shifts[ρ]`. Feeding each ray's
    /// first jump index normalizes all first jumps to 0.
    pub fn tensor_line_bundle(&self, shifts: &[i64]) -> Result<FiltrationFamily> {
        if shifts.len() != self.num_rays() {
            return Err(Error::DimensionMismatch {
                expected: self.num_rays(),
                got: shifts.len(),
            });
        }
        let rays = self
            .rays
            .iter()
            .zip(shifts.iter())
            .map(|(filt, &s)| RayFiltration {
                jumps: filt
                    .jumps
                    .iter()
                    .map(|(i, sub)| (i - s, sub.clone()))
                    .collect(),
            })
            .collect();
        Ok(FiltrationFamily {
            rank: self.rank,
            rays,
        })
    }

    /// The induced family on a proper nonzero subspace `F`: per ray the
    /// filtration `F ∩ E^ρ(i)`, rewritten in coordinates on `F` and with
    /// duplicate consecutive subspaces merged onto the earliest index that
    /// attains each dimension.
    pub fn induced_family(&self, f: &Subspace) -> Result<FiltrationFamily> {
        if f.ambient_dim() != self.rank {
            return Err(Error::DimensionMismatch {
                expected: self.rank,
                got: f.ambient_dim(),
            });
        }
        if !f.is_proper_nonzero() {
            return Err(Error::ImproperSubspace);
        }
        let pivots = f.pivot_columns();
        let d = f.dim();
        let mut rays = Vec::with_capacity(self.rays.len());
        for filt in &self.rays {
            let mut jumps: Vec<(i64, Subspace)> = Vec::new();
            let mut prev_dim = 0usize;
            for (i, s) in filt.jumps() {
                let meet = f.intersect(s)?;
                if meet.dim() > prev_dim {
                    // Coordinates of a vector of F with respect to F's
                    // canonical basis are its entries at F's pivot columns.
                    let rows: Vec<Vec<Rat>> = meet
                        .basis()
                        .iter()
                        .map(|row| pivots.iter().map(|&p| row[p].clone()).collect())
                        .collect();
                    jumps.push((*i, Subspace::span(&rows, d)?));
                    prev_dim = meet.dim();
                }
            }
            rays.push(jumps);
        }
        FiltrationFamily::new(d, rays)
    }

    /// Multiplicity of the character `m` in the sections over the affine
    /// chart of `cone`: `dim ⋂_{ρ ∈ cone} E^ρ(<m, u_ρ>)`.
    pub fn section_weights(&self, fan: &Fan, cone: &Cone, m: &[i64]) -> Result<usize> {
        if m.len() != fan.dim() {
            return Err(Error::DimensionMismatch {
                expected: fan.dim(),
                got: m.len(),
            });
        }
        if fan.num_rays() != self.num_rays() {
            return Err(Error::DimensionMismatch {
                expected: fan.num_rays(),
                got: self.num_rays(),
            });
        }
        if !fan.contains_cone(cone) {
            return Err(Error::ConeNotInFan(cone.ray_indices().to_vec()));
        }
        let mut space = Subspace::full(self.rank);
        for &ray in cone.ray_indices() {
            let u = fan.ray(ray)?;
            let pairing: i64 = m.iter().zip(u.iter()).map(|(a, b)| a * b).sum();
            space = space.intersect(&self.eval(ray, pairing)?)?;
        }
        Ok(space.dim())
    }

    /// All distinct proper nonzero subspaces occurring as jumps.
    pub fn proper_jump_subspaces(&self) -> Vec<Subspace> {
        let mut out = std::collections::BTreeSet::new();
        for filt in &self.rays {
            for (_, s) in filt.jumps() {
                if s.is_proper_nonzero() {
                    out.insert(s.clone());
                }
            }
        }
        out.into_iter().collect()
    }
}
