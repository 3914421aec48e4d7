//! Shared oracles and generators for the integration suites.
//!
//! The oracles deliberately avoid the implementation paths they check: the
//! degree oracle counts lattice points of dilates and takes finite
//! differences, and the splitting oracle searches over explicit piece
//! assignments drawn from the closure lattice of the filtration subspaces.

#![allow(dead_code)]

use std::collections::BTreeSet;

use itertools::Itertools;
use rand::Rng;

use klyachko::degree::is_ample;
use klyachko::fan::Fan;
use klyachko::filtration::FiltrationFamily;
use klyachko::linalg::{rat_int, rat_vec, solve_square, Rat, Subspace};

// ---------------------------------------------------------------------------
// Ehrhart-difference degree oracle
// ---------------------------------------------------------------------------

/// `deg_L(D_ray)` as the `(n-1)`-st finite difference at 0 of the lattice
/// point count of the `k`-dilated facet. Exact for lattice polytopes since
/// the facet's Ehrhart polynomial has degree `n-1`.
pub fn ehrhart_facet_degree(fan: &Fan, coeffs: &[i64], ray: usize) -> i64 {
    let n = fan.dim();
    let counts: Vec<i64> = (0..n as i64)
        .map(|k| count_facet_points(fan, coeffs, ray, k))
        .collect();
    let mut total = 0i64;
    for (j, &f) in counts.iter().enumerate() {
        let sign = if (n - 1 - j).is_multiple_of(2) { 1 } else { -1 };
        total += sign * binom(n as i64 - 1, j as i64) * f;
    }
    total
}

fn binom(n: i64, k: i64) -> i64 {
    if k < 0 || k > n {
        return 0;
    }
    let mut acc = 1i64;
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// Number of lattice points on the `ray`-facet of the `k`-th dilate:
/// `<m, u_ray> = -k a_ray` and `<m, u> >= -k a` for every ray.
fn count_facet_points(fan: &Fan, coeffs: &[i64], ray: usize, k: i64) -> i64 {
    let n = fan.dim();
    if k == 0 {
        return 1; // the origin
    }
    // Vertex enumeration by exhaustion over all n-subsets of the
    // constraints, independent of the fan's cone structure.
    let mut verts: Vec<Vec<Rat>> = Vec::new();
    for subset in (0..fan.num_rays()).combinations(n) {
        let mat: Vec<Vec<Rat>> = subset
            .iter()
            .map(|&r| rat_vec(fan.ray(r).unwrap()))
            .collect();
        let rhs: Vec<Rat> = subset
            .iter()
            .map(|&r| rat_int(-k * coeffs[r]))
            .collect();
        let Some(v) = solve_square(&mat, &rhs) else {
            continue;
        };
        let feasible = (0..fan.num_rays()).all(|r| {
            let u = rat_vec(fan.ray(r).unwrap());
            let dot: Rat = v
                .iter()
                .zip(u.iter())
                .map(|(a, b)| a * b)
                .fold(rat_int(0), |acc, x| acc + x);
            dot >= rat_int(-k * coeffs[r])
        });
        if feasible {
            verts.push(v);
        }
    }
    assert!(!verts.is_empty(), "dilated polytope has no vertices");
    let mut lo = vec![i64::MAX; n];
    let mut hi = vec![i64::MIN; n];
    for v in &verts {
        for (i, x) in v.iter().enumerate() {
            let f = i64::try_from(&x.floor().to_integer()).unwrap();
            let c = i64::try_from(&x.ceil().to_integer()).unwrap();
            lo[i] = lo[i].min(f);
            hi[i] = hi[i].max(c);
        }
    }
    let mut count = 0i64;
    let mut point = lo.clone();
    loop {
        let on_facet = {
            let u = fan.ray(ray).unwrap();
            let dot: i64 = point.iter().zip(u.iter()).map(|(a, b)| a * b).sum();
            dot == -k * coeffs[ray]
        };
        if on_facet {
            let inside = (0..fan.num_rays()).all(|r| {
                let u = fan.ray(r).unwrap();
                let dot: i64 = point.iter().zip(u.iter()).map(|(a, b)| a * b).sum();
                dot >= -k * coeffs[r]
            });
            if inside {
                count += 1;
            }
        }
        let mut carry = true;
        for i in 0..n {
            if carry {
                point[i] += 1;
                if point[i] > hi[i] {
                    point[i] = lo[i];
                } else {
                    carry = false;
                }
            }
        }
        if carry {
            break;
        }
    }
    count
}

/// First ample coefficient vector in lexicographic order over
/// `[0..=max_coeff]^rays`, if any.
pub fn find_ample(fan: &Fan, max_coeff: i64) -> Option<Vec<i64>> {
    let rays = fan.num_rays();
    let mut coeffs = vec![0i64; rays];
    loop {
        if is_ample(fan, &coeffs).unwrap() {
            return Some(coeffs);
        }
        let mut carry = true;
        for i in (0..rays).rev() {
            if carry {
                coeffs[i] += 1;
                if coeffs[i] > max_coeff {
                    coeffs[i] = 0;
                } else {
                    carry = false;
                }
            }
        }
        if carry {
            return None;
        }
    }
}

/// All ample coefficient vectors with entries in `0..=max_coeff`, in
/// lexicographic order, up to `limit` of them.
pub fn ample_polarisations(fan: &Fan, max_coeff: i64, limit: usize) -> Vec<Vec<i64>> {
    let rays = fan.num_rays();
    let mut out = Vec::new();
    let mut coeffs = vec![0i64; rays];
    loop {
        if out.len() >= limit {
            return out;
        }
        if is_ample(fan, &coeffs).unwrap() {
            out.push(coeffs.clone());
        }
        let mut carry = true;
        for i in (0..rays).rev() {
            if carry {
                coeffs[i] += 1;
                if coeffs[i] > max_coeff {
                    coeffs[i] = 0;
                } else {
                    carry = false;
                }
            }
        }
        if carry {
            return out;
        }
    }
}

// ---------------------------------------------------------------------------
// Exhaustive splitting oracle
// ---------------------------------------------------------------------------

/// Decides compatibility by exhaustive search: pieces are spanned by
/// vectors drawn from the canonical bases of the sum/intersection closure
/// of the filtration subspaces, assigned to multiweights on the jump grid.
/// Complete for small ranks because any splitting can be rebuilt from
/// basis vectors of the closure lattice by greedy extension.
pub fn splitting_oracle(family: &FiltrationFamily, rays: &[usize]) -> bool {
    let r = family.rank();
    let jump_lists: Vec<Vec<i64>> = rays
        .iter()
        .map(|&ray| family.ray_filtration(ray).unwrap().jump_indices())
        .collect();

    // Closure lattice of the jump subspaces (finite for <= 3 generators).
    let mut lattice: BTreeSet<Subspace> = BTreeSet::new();
    lattice.insert(Subspace::full(r));
    for &ray in rays {
        for (_, s) in family.ray_filtration(ray).unwrap().jumps() {
            lattice.insert(s.clone());
        }
    }
    loop {
        let snapshot: Vec<Subspace> = lattice.iter().cloned().collect();
        let before = lattice.len();
        for (i, a) in snapshot.iter().enumerate() {
            for b in snapshot.iter().skip(i + 1) {
                for c in [a.sum(b).unwrap(), a.intersect(b).unwrap()] {
                    if !c.is_zero() {
                        lattice.insert(c);
                    }
                }
            }
        }
        assert!(lattice.len() < 2000, "closure lattice blew up");
        if lattice.len() == before {
            break;
        }
    }
    let pool: Vec<Vec<Rat>> = lattice
        .iter()
        .flat_map(|s| s.basis().iter().cloned())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();

    let grid: Vec<Vec<i64>> = if rays.is_empty() {
        vec![Vec::new()]
    } else {
        jump_lists
            .iter()
            .map(|jl| jl.iter().copied())
            .multi_cartesian_product()
            .collect()
    };

    // Candidate (vector, multiweight) pairs. A piece vector at weight w
    // must lie in every E^ρ(w_j) and, when w_j is not the first jump,
    // outside E^ρ(previous jump) — both forced by the splitting axioms.
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    for (gi, weights) in grid.iter().enumerate() {
        for (pi, v) in pool.iter().enumerate() {
            let mut admissible = true;
            for (j, &ray) in rays.iter().enumerate() {
                let here = family.eval(ray, weights[j]).unwrap();
                if !here.contains_vector(v).unwrap() {
                    admissible = false;
                    break;
                }
                let pos = jump_lists[j].iter().position(|&a| a == weights[j]).unwrap();
                if pos > 0 {
                    let prev = family.eval(ray, jump_lists[j][pos - 1]).unwrap();
                    if prev.contains_vector(v).unwrap() {
                        admissible = false;
                        break;
                    }
                }
            }
            if admissible {
                pairs.push((pi, gi));
            }
        }
    }

    let mut chosen: Vec<(usize, usize)> = Vec::with_capacity(r);
    search_splittings(
        family, rays, &jump_lists, &pool, &grid, &pairs, 0, &mut chosen,
        &Subspace::zero(r),
    )
}

#[allow(clippy::too_many_arguments)]
fn search_splittings(
    family: &FiltrationFamily,
    rays: &[usize],
    jump_lists: &[Vec<i64>],
    pool: &[Vec<Rat>],
    grid: &[Vec<i64>],
    pairs: &[(usize, usize)],
    start: usize,
    chosen: &mut Vec<(usize, usize)>,
    span_so_far: &Subspace,
) -> bool {
    let r = family.rank();
    if chosen.len() == r {
        return reconstruction_holds(family, rays, jump_lists, pool, grid, chosen);
    }
    for (idx, &(pi, gi)) in pairs.iter().enumerate().skip(start) {
        if span_so_far.contains_vector(&pool[pi]).unwrap() {
            continue; // dependent, cannot extend to a direct sum
        }
        let grown = span_so_far
            .sum(&Subspace::line(&pool[pi]).unwrap())
            .unwrap();
        chosen.push((pi, gi));
        if search_splittings(
            family, rays, jump_lists, pool, grid, pairs, idx + 1, chosen, &grown,
        ) {
            return true;
        }
        chosen.pop();
    }
    false
}

fn reconstruction_holds(
    family: &FiltrationFamily,
    rays: &[usize],
    jump_lists: &[Vec<i64>],
    pool: &[Vec<Rat>],
    grid: &[Vec<i64>],
    chosen: &[(usize, usize)],
) -> bool {
    let r = family.rank();
    for (j, &ray) in rays.iter().enumerate() {
        for &a in &jump_lists[j] {
            let vectors: Vec<Vec<Rat>> = chosen
                .iter()
                .filter(|(_, gi)| grid[*gi][j] <= a)
                .map(|(pi, _)| pool[*pi].clone())
                .collect();
            let span = Subspace::span(&vectors, r).unwrap();
            if span != family.eval(ray, a).unwrap() {
                return false;
            }
        }
    }
    true
}

// ---------------------------------------------------------------------------
// Random generators (callers seed their own ChaCha RNG for determinism)
// ---------------------------------------------------------------------------

pub fn random_vector<R: Rng>(rng: &mut R, n: usize) -> Vec<Rat> {
    (0..n).map(|_| rat_int(rng.gen_range(-2..=2))).collect()
}

/// Random subspace of `Q^n` with `1 <= dim <= max_dim`.
pub fn random_subspace<R: Rng>(rng: &mut R, n: usize, max_dim: usize) -> Subspace {
    loop {
        let k = rng.gen_range(1..=max_dim);
        let rows: Vec<Vec<Rat>> = (0..k).map(|_| random_vector(rng, n)).collect();
        let s = Subspace::span(&rows, n).unwrap();
        if !s.is_zero() && s.dim() <= max_dim {
            return s;
        }
    }
}

/// Random valid family: per ray one or two jumps with small indices.
pub fn random_family<R: Rng>(rng: &mut R, rank: usize, num_rays: usize) -> FiltrationFamily {
    let filtrations = (0..num_rays)
        .map(|_| {
            let two_jumps = rank >= 2 && rng.gen_bool(0.75);
            let first = rng.gen_range(-2i64..=2);
            if two_jumps {
                let proper = loop {
                    let s = random_subspace(rng, rank, rank - 1);
                    if s.is_proper_nonzero() {
                        break s;
                    }
                };
                let second = first + rng.gen_range(1i64..=3);
                vec![(first, proper), (second, Subspace::full(rank))]
            } else {
                vec![(first, Subspace::full(rank))]
            }
        })
        .collect();
    FiltrationFamily::new(rank, filtrations).unwrap()
}

/// Random unimodular integer matrix as rational rows: a product of
/// elementary shear and swap operations applied to the identity.
#[allow(clippy::needless_range_loop)] // index loop: rows alias within `m`
pub fn random_unimodular<R: Rng>(rng: &mut R, n: usize) -> Vec<Vec<Rat>> {
    let mut m: Vec<Vec<i64>> = (0..n)
        .map(|i| (0..n).map(|j| i64::from(i == j)).collect())
        .collect();
    for _ in 0..3 * n {
        let i = rng.gen_range(0..n);
        let mut j = rng.gen_range(0..n);
        if n > 1 {
            while j == i {
                j = rng.gen_range(0..n);
            }
            let c = rng.gen_range(-2i64..=2);
            for k in 0..n {
                let delta = c * m[j][k];
                m[i][k] += delta;
            }
        }
        if rng.gen_bool(0.3) {
            m.swap(i, j);
        }
    }
    m.iter().map(|row| rat_vec(row)).collect()
}

/// Applies an invertible matrix to every jump subspace of a family.
pub fn transform_family(family: &FiltrationFamily, mat: &[Vec<Rat>]) -> FiltrationFamily {
    let rank = family.rank();
    let filtrations = family
        .ray_filtrations()
        .iter()
        .map(|filt| {
            filt.jumps()
                .iter()
                .map(|(i, s)| {
                    let rows: Vec<Vec<Rat>> = s
                        .basis()
                        .iter()
                        .map(|v| {
                            mat.iter()
                                .map(|row| {
                                    row.iter()
                                        .zip(v.iter())
                                        .map(|(a, b)| a * b)
                                        .fold(rat_int(0), |acc, x| acc + x)
                                })
                                .collect()
                        })
                        .collect();
                    (*i, Subspace::span(&rows, rank).unwrap())
                })
                .collect()
        })
        .collect();
    FiltrationFamily::new(rank, filtrations).unwrap()
}

/// The test fans of the acceptance suite with their polarisations.
pub fn theorem_cases() -> Vec<(&'static str, Fan, Vec<i64>)> {
    let p1xp1 = Fan::projective_space(1).product(&Fan::projective_space(1));
    let f1 = Fan::hirzebruch(1);
    let f1_coeffs = find_ample(&f1, 3).expect("hirzebruch surface has an ample divisor");
    vec![
        ("P2 O(1)", Fan::projective_space(2), vec![0, 0, 1]),
        ("P3 O(1)", Fan::projective_space(3), vec![0, 0, 0, 1]),
        ("P4 O(1)", Fan::projective_space(4), vec![0, 0, 0, 0, 1]),
        ("P1xP1 O(1,1)", p1xp1.clone(), vec![1, 0, 1, 0]),
        ("P1xP1 O(1,2)", p1xp1, vec![1, 0, 2, 0]),
        ("F1 ample-search", f1, f1_coeffs),
    ]
}
