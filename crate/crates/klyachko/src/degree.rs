//! Moment polytopes and intersection degrees of ample toric divisors.
//!
//! For `L = Σ a_ρ D_ρ` on a smooth complete fan, the polytope is
//! `P_L = { m : <m, u_ρ> >= -a_ρ }`; each maximal cone contributes the
//! vertex solving its `n` equalities. The degree `deg_L(D_ρ) = L^{n-1}·D_ρ`
//! is the normalized lattice volume of the facet dual to `ρ`, computed by
//! triangulating the facet from its lexicographically smallest vertex and
//! summing determinants in a lattice basis of the facet's direction space.

use num_bigint::BigInt;

use num_traits::Signed;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fan::{Cone, Fan};
use crate::linalg::{det_int, integer_kernel_basis, express_in_lattice_basis, rat_vec, solve_square, Rat};

/// Per-ray intersection degrees `deg_L(D_ρ)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegreeVector {
    pub deg: Vec<i64>,
}

/// An ample divisor on a smooth complete fan, with its degrees precomputed.
///
/// Construction validates the fan, checks ampleness, and computes every
/// `deg_L(D_ρ)` once; stability checks then reuse the cached values.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolarisedDivisor {
    coeffs: Vec<i64>,
    degrees: Vec<i64>,
}

impl PolarisedDivisor {
    pub fn new(fan: &Fan, coeffs: Vec<i64>) -> Result<Self> {
        fan.require_smooth_complete()?;
        check_coeff_count(fan, &coeffs)?;
        let verts = integral_vertices(fan, &coeffs)?;
        if !ample_from_vertices(fan, &coeffs, &verts) {
            return Err(Error::NotAmple);
        }
        let cones_by_dim = fan.cones_by_dim();
        let degrees: Vec<i64> = (0..fan.num_rays())
            .into_par_iter()
            .map(|ray| facet_degree_inner(fan, ray, &verts, &cones_by_dim))
            .collect::<Result<Vec<_>>>()?;
        if let Some(bad) = degrees.iter().position(|&d| d < 1) {
            return Err(Error::Internal(format!(
                "nonpositive degree {} on ray {bad} of an ample divisor",
                degrees[bad]
            )));
        }
        Ok(PolarisedDivisor { coeffs, degrees })
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    pub fn degrees(&self) -> &[i64] {
        &self.degrees
    }

    pub fn degree(&self, ray: usize) -> Result<i64> {
        self.degrees.get(ray).copied().ok_or(Error::InvalidRay(ray))
    }

    pub fn degree_vector(&self) -> DegreeVector {
        DegreeVector {
            deg: self.degrees.clone(),
        }
    }
}

/// Vertex of `P_L` for each maximal cone, in maximal-cone order: the unique
/// solution of `<v, u_ρ> = -a_ρ` over the cone's rays.
pub fn vertices(fan: &Fan, coeffs: &[i64]) -> Result<Vec<Vec<Rat>>> {
    fan.require_smooth_complete()?;
    check_coeff_count(fan, coeffs)?;
    fan.max_cones()
        .iter()
        .map(|cone| {
            let mat: Vec<Vec<Rat>> = cone.iter().map(|&r| rat_vec(fan.ray(r).unwrap())).collect();
            let rhs: Vec<Rat> = cone.iter().map(|&r| -crate::linalg::rat_int(coeffs[r])).collect();
            solve_square(&mat, &rhs).ok_or_else(|| {
                Error::Internal(format!("singular vertex system on maximal cone {cone:?}"))
            })
        })
        .collect()
}

/// Strict convexity of the support function across every wall.
pub fn is_ample(fan: &Fan, coeffs: &[i64]) -> Result<bool> {
    fan.require_smooth_complete()?;
    check_coeff_count(fan, coeffs)?;
    let verts = integral_vertices(fan, coeffs)?;
    Ok(ample_from_vertices(fan, coeffs, &verts))
}

/// `deg_L(D_ρ)`: normalized `(n-1)`-volume of the facet of `P_L` dual to
/// `ray`. Errors on non-ample input.
pub fn facet_degree(fan: &Fan, coeffs: &[i64], ray: usize) -> Result<i64> {
    fan.require_smooth_complete()?;
    check_coeff_count(fan, coeffs)?;
    if ray >= fan.num_rays() {
        return Err(Error::InvalidRay(ray));
    }
    let verts = integral_vertices(fan, coeffs)?;
    if !ample_from_vertices(fan, coeffs, &verts) {
        return Err(Error::NotAmple);
    }
    facet_degree_inner(fan, ray, &verts, &fan.cones_by_dim())
}

fn check_coeff_count(fan: &Fan, coeffs: &[i64]) -> Result<()> {
    if coeffs.len() != fan.num_rays() {
        return Err(Error::DimensionMismatch {
            expected: fan.num_rays(),
            got: coeffs.len(),
        });
    }
    Ok(())
}

/// On a smooth fan the vertex systems are unimodular, so vertices are
/// integral; a non-integral solution indicates a bug.
fn integral_vertices(fan: &Fan, coeffs: &[i64]) -> Result<Vec<Vec<i64>>> {
    vertices(fan, coeffs)?
        .into_iter()
        .map(|v| {
            v.into_iter()
                .map(|x| {
                    if !num_traits::One::is_one(x.denom()) {
                        return Err(Error::Internal("non-integral vertex on smooth fan".into()));
                    }
                    i64::try_from(x.numer()).map_err(|_| Error::Overflow("polytope vertex"))
                })
                .collect()
        })
        .collect()
}

fn dot(a: &[i64], b: &[i64]) -> i128 {
    a.iter().zip(b.iter()).map(|(&x, &y)| x as i128 * y as i128).sum()
}

fn ample_from_vertices(fan: &Fan, coeffs: &[i64], verts: &[Vec<i64>]) -> bool {
    for owners in fan.wall_map().values() {
        if owners.len() != 2 {
            return false;
        }
        let (c1, opp1) = owners[0];
        let (c2, opp2) = owners[1];
        if dot(&verts[c1], fan.ray(opp2).unwrap()) <= -(coeffs[opp2] as i128)
            || dot(&verts[c2], fan.ray(opp1).unwrap()) <= -(coeffs[opp1] as i128)
        {
            return false;
        }
    }
    true
}

fn facet_degree_inner(
    fan: &Fan,
    ray: usize,
    verts: &[Vec<i64>],
    cones_by_dim: &[Vec<Cone>],
) -> Result<i64> {
    let n = fan.dim();
    if n == 1 {
        // The facet is a vertex.
        return Ok(1);
    }
    let face = Cone::new(vec![ray]);
    let simplices = triangulate_face(fan, verts, &face, cones_by_dim);
    let kernel = integer_kernel_basis(fan.ray(ray)?);
    let mut total = BigInt::from(0);
    for simplex in &simplices {
        debug_assert_eq!(simplex.len(), n);
        let base = &simplex[0];
        let coords: Vec<Vec<i64>> = simplex[1..]
            .iter()
            .map(|w| {
                let diff: Vec<i64> = w.iter().zip(base.iter()).map(|(a, b)| a - b).collect();
                express_in_lattice_basis(&diff, &kernel).ok_or_else(|| {
                    Error::Internal("facet vertex difference outside facet lattice".into())
                })
            })
            .collect::<Result<Vec<_>>>()?;
        total += det_int(&coords).abs();
    }
    i64::try_from(&total).map_err(|_| Error::Overflow("facet degree"))
}

/// Triangulates the face of `P_L` dual to the cone `face` into simplices of
/// lattice points, coning from the lexicographically smallest vertex over
/// the triangulated subfaces that avoid it.
fn triangulate_face(
    fan: &Fan,
    verts: &[Vec<i64>],
    face: &Cone,
    cones_by_dim: &[Vec<Cone>],
) -> Vec<Vec<Vec<i64>>> {
    let owners: Vec<usize> = (0..fan.max_cones().len())
        .filter(|&ci| {
            face.ray_indices()
                .iter()
                .all(|r| fan.max_cones()[ci].contains(r))
        })
        .collect();
    let k = fan.dim() - face.dim();
    if k == 0 {
        return vec![vec![verts[owners[0]].clone()]];
    }
    let apex = owners
        .iter()
        .map(|&ci| &verts[ci])
        .min()
        .expect("face of a complete fan has a vertex")
        .clone();
    let mut simplices = Vec::new();
    for sub in &cones_by_dim[face.dim() + 1] {
        if !face.is_face_of(sub) {
            continue;
        }
        let sub_has_apex = (0..fan.max_cones().len())
            .filter(|&ci| sub.ray_indices().iter().all(|r| fan.max_cones()[ci].contains(r)))
            .any(|ci| verts[ci] == apex);
        if sub_has_apex {
            continue;
        }
        for mut simplex in triangulate_face(fan, verts, sub, cones_by_dim) {
            let mut with_apex = vec![apex.clone()];
            with_apex.append(&mut simplex);
            simplices.push(with_apex);
        }
    }
    simplices
}
