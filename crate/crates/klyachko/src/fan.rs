//! Fans of smooth complete toric varieties.
//!
//! A [`Fan`] is a list of primitive ray generators in `Z^n` plus the maximal
//! cones, each given as a set of ray indices. All fans accepted downstream
//! are simplicial (smoothness is checked), so a cone is identified with its
//! ray-index set and every subset of a cone's rays is a face.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::linalg::{det_int, rank_int};

/// A fan in `N ≅ Z^n`, described by rays and maximal cones.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fan {
    dim: usize,
    rays: Vec<Vec<i64>>,
    max_cones: Vec<Vec<usize>>,
}

/// A cone of a simplicial fan: a sorted set of ray indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cone {
    ray_indices: Vec<usize>,
}

impl Cone {
    /// Builds a cone from ray indices; sorts and deduplicates.
    pub fn new(mut ray_indices: Vec<usize>) -> Self {
        ray_indices.sort_unstable();
        ray_indices.dedup();
        Cone { ray_indices }
    }

    pub fn ray_indices(&self) -> &[usize] {
        &self.ray_indices
    }

    /// Dimension of the cone; valid because accepted fans are simplicial.
    pub fn dim(&self) -> usize {
        self.ray_indices.len()
    }

    pub fn is_face_of(&self, other: &Cone) -> bool {
        self.ray_indices.iter().all(|r| other.ray_indices.contains(r))
    }
}

/// Outcome of [`Fan::validate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationReport {
    pub smooth: bool,
    pub complete: bool,
    pub messages: Vec<String>,
}

impl Fan {
    /// Builds a fan after basic shape checks (ray lengths, index ranges,
    /// duplicate or nested maximal cones). Geometric validity is the job of
    /// [`Fan::validate`].
    pub fn new(dim: usize, rays: Vec<Vec<i64>>, max_cones: Vec<Vec<usize>>) -> Result<Fan> {
        if dim == 0 {
            return Err(Error::InvalidFan("ambient dimension must be positive".into()));
        }
        if rays.is_empty() {
            return Err(Error::InvalidFan("fan has no rays".into()));
        }
        for (i, r) in rays.iter().enumerate() {
            if r.len() != dim {
                return Err(Error::InvalidFan(format!(
                    "ray {i} has length {} instead of {dim}",
                    r.len()
                )));
            }
        }
        if max_cones.is_empty() {
            return Err(Error::InvalidFan("fan has no maximal cones".into()));
        }
        let mut sorted_cones: Vec<Vec<usize>> = Vec::with_capacity(max_cones.len());
        for c in &max_cones {
            if c.is_empty() {
                return Err(Error::InvalidFan("empty maximal cone".into()));
            }
            let mut s = c.clone();
            s.sort_unstable();
            s.dedup();
            if s.len() != c.len() {
                return Err(Error::InvalidFan(format!("repeated ray index in cone {c:?}")));
            }
            if let Some(&bad) = s.iter().find(|&&i| i >= rays.len()) {
                return Err(Error::InvalidRay(bad));
            }
            sorted_cones.push(s);
        }
        for (i, a) in sorted_cones.iter().enumerate() {
            for (j, b) in sorted_cones.iter().enumerate() {
                if i != j && a.iter().all(|r| b.contains(r)) {
                    return Err(Error::InvalidFan(format!(
                        "maximal cone {a:?} is contained in {b:?}"
                    )));
                }
            }
        }
        Ok(Fan {
            dim,
            rays,
            max_cones: sorted_cones,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rays(&self) -> &[Vec<i64>] {
        &self.rays
    }

    pub fn ray(&self, i: usize) -> Result<&[i64]> {
        self.rays.get(i).map(|r| r.as_slice()).ok_or(Error::InvalidRay(i))
    }

    pub fn num_rays(&self) -> usize {
        self.rays.len()
    }

    pub fn max_cones(&self) -> &[Vec<usize>] {
        &self.max_cones
    }

    /// Smoothness and completeness report.
    ///
    /// Structural defects (non-primitive rays, repeated rays, cones with
    /// linearly dependent rays) are errors. Smoothness means every maximal
    /// cone is generated by part of a `Z`-basis (gcd of its maximal minors
    /// is 1). Completeness is the combinatorial criterion for simplicial
    /// fans: pure of dimension `n`, every `(n-1)`-face on exactly two
    /// maximal cones, and connected facet-adjacency.
    pub fn validate(&self) -> Result<ValidationReport> {
        for (i, r) in self.rays.iter().enumerate() {
            let g = r.iter().fold(BigInt::zero(), |acc, &x| acc.gcd(&BigInt::from(x)));
            if g != BigInt::one() {
                return Err(Error::InvalidFan(format!("ray {i} {r:?} is not primitive")));
            }
        }
        for i in 0..self.rays.len() {
            for j in i + 1..self.rays.len() {
                if self.rays[i] == self.rays[j] {
                    return Err(Error::InvalidFan(format!("rays {i} and {j} coincide")));
                }
            }
        }
        if let Some(unused) =
            (0..self.rays.len()).find(|r| !self.max_cones.iter().any(|c| c.contains(r)))
        {
            return Err(Error::InvalidFan(format!(
                "ray {unused} does not belong to any maximal cone"
            )));
        }
        let mut messages = Vec::new();
        let mut smooth = true;
        for cone in &self.max_cones {
            let rows: Vec<Vec<i64>> = cone.iter().map(|&r| self.rays[r].clone()).collect();
            if rank_int(&rows) != cone.len() {
                return Err(Error::InvalidFan(format!(
                    "cone {cone:?} has linearly dependent rays"
                )));
            }
            let g = minor_gcd(&rows);
            if g != BigInt::one() {
                smooth = false;
                messages.push(format!(
                    "cone {cone:?} is not smooth (lattice index {g})"
                ));
            }
        }

        let pure = self.max_cones.iter().all(|c| c.len() == self.dim);
        let mut complete = pure;
        if !pure {
            messages.push("fan is not pure of maximal dimension".into());
        } else {
            let walls = self.wall_map();
            for (facet, owners) in &walls {
                if owners.len() != 2 {
                    complete = false;
                    messages.push(format!(
                        "facet {facet:?} lies on {} maximal cone(s)",
                        owners.len()
                    ));
                }
            }
            if complete && !self.facet_graph_connected(&walls) {
                complete = false;
                messages.push("facet-adjacency graph is disconnected".into());
            }
        }
        Ok(ValidationReport {
            smooth,
            complete,
            messages,
        })
    }

    /// Errors unless the fan validates as smooth and complete.
    pub fn require_smooth_complete(&self) -> Result<()> {
        let report = self.validate()?;
        if !report.smooth || !report.complete {
            return Err(Error::NotSmoothComplete(report.messages.join("; ")));
        }
        Ok(())
    }

    /// Map facet (as sorted ray-index set) -> list of (maximal cone index,
    /// opposite ray index).
    pub(crate) fn wall_map(&self) -> BTreeMap<Vec<usize>, Vec<(usize, usize)>> {
        let mut walls: BTreeMap<Vec<usize>, Vec<(usize, usize)>> = BTreeMap::new();
        for (ci, cone) in self.max_cones.iter().enumerate() {
            for &opp in cone {
                let facet: Vec<usize> = cone.iter().copied().filter(|&r| r != opp).collect();
                walls.entry(facet).or_default().push((ci, opp));
            }
        }
        walls
    }

    fn facet_graph_connected(&self, walls: &BTreeMap<Vec<usize>, Vec<(usize, usize)>>) -> bool {
        let n = self.max_cones.len();
        let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
        for owners in walls.values() {
            if owners.len() == 2 {
                adj[owners[0].0].push(owners[1].0);
                adj[owners[1].0].push(owners[0].0);
            }
        }
        let mut seen = vec![false; n];
        let mut queue = VecDeque::from([0usize]);
        seen[0] = true;
        while let Some(c) = queue.pop_front() {
            for &d in &adj[c] {
                if !seen[d] {
                    seen[d] = true;
                    queue.push_back(d);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// Fan of projective space of dimension `n`: rays `e_1..e_n` and
    /// `-(e_1+..+e_n)`, maximal cones all `n`-subsets.
    pub fn projective_space(n: usize) -> Fan {
        assert!(n >= 1, "projective space needs n >= 1");
        let mut rays: Vec<Vec<i64>> = (0..n)
            .map(|i| (0..n).map(|j| i64::from(i == j)).collect())
            .collect();
        rays.push(vec![-1; n]);
        let max_cones = (0..=n)
            .rev()
            .map(|skip| (0..=n).filter(|&r| r != skip).collect())
            .collect();
        Fan::new(n, rays, max_cones).expect("projective space fan is well-formed")
    }

    /// Product fan: rays of `self` embedded first, then rays of `other`;
    /// maximal cones are pairwise unions.
    pub fn product(&self, other: &Fan) -> Fan {
        let dim = self.dim + other.dim;
        let mut rays: Vec<Vec<i64>> = Vec::with_capacity(self.num_rays() + other.num_rays());
        for r in &self.rays {
            let mut v = r.clone();
            v.extend(std::iter::repeat_n(0, other.dim));
            rays.push(v);
        }
        for r in &other.rays {
            let mut v = vec![0; self.dim];
            v.extend(r.iter().copied());
            rays.push(v);
        }
        let offset = self.num_rays();
        let mut max_cones = Vec::with_capacity(self.max_cones.len() * other.max_cones.len());
        for a in &self.max_cones {
            for b in &other.max_cones {
                let mut c = a.clone();
                c.extend(b.iter().map(|&r| r + offset));
                max_cones.push(c);
            }
        }
        Fan::new(dim, rays, max_cones).expect("product fan is well-formed")
    }

    /// Hirzebruch surface fan: rays `(1,0), (0,1), (-1,a), (0,-1)` with the
    /// four adjacent 2-cones.
    pub fn hirzebruch(a: i64) -> Fan {
        assert!(a >= 0, "hirzebruch parameter must be nonnegative");
        let rays = vec![vec![1, 0], vec![0, 1], vec![-1, a], vec![0, -1]];
        let max_cones = vec![vec![0, 1], vec![1, 2], vec![2, 3], vec![3, 0]];
        Fan::new(2, rays, max_cones).expect("hirzebruch fan is well-formed")
    }

    /// All distinct `d`-dimensional faces of maximal cones, sorted. `d = 0`
    /// is the zero cone.
    pub fn cones_of_dim(&self, d: usize) -> Result<Vec<Cone>> {
        if d > self.dim {
            return Err(Error::InvalidFan(format!(
                "cone dimension {d} exceeds fan dimension {}",
                self.dim
            )));
        }
        let mut faces: BTreeSet<Vec<usize>> = BTreeSet::new();
        for cone in &self.max_cones {
            if cone.len() < d {
                continue;
            }
            for subset in combinations(cone, d) {
                faces.insert(subset);
            }
        }
        Ok(faces.into_iter().map(Cone::new).collect())
    }

    /// All faces of all maximal cones, grouped by dimension (index = dim).
    pub fn cones_by_dim(&self) -> Vec<Vec<Cone>> {
        (0..=self.dim)
            .map(|d| self.cones_of_dim(d).expect("dimension in range"))
            .collect()
    }

    /// True iff `cone`'s rays form a face of some maximal cone.
    pub fn contains_cone(&self, cone: &Cone) -> bool {
        self.max_cones
            .iter()
            .any(|mc| cone.ray_indices().iter().all(|r| mc.contains(r)))
    }

    /// Dimension of the torus orbit attached to `cone`: `n - dim(cone)`.
    pub fn orbit_dim(&self, cone: &Cone) -> usize {
        self.dim - cone.dim()
    }
}

/// gcd of all `k x k` minors of a `k x n` integer matrix (`k <= n`).
fn minor_gcd(rows: &[Vec<i64>]) -> BigInt {
    let k = rows.len();
    let n = rows[0].len();
    let mut g = BigInt::zero();
    for cols in combinations(&(0..n).collect::<Vec<_>>(), k) {
        let minor: Vec<Vec<i64>> = rows
            .iter()
            .map(|row| cols.iter().map(|&c| row[c]).collect())
            .collect();
        g = g.gcd(&det_int(&minor).abs());
        if g == BigInt::one() {
            break;
        }
    }
    g
}

fn combinations(items: &[usize], k: usize) -> Vec<Vec<usize>> {
    use itertools::Itertools;
    items.iter().copied().combinations(k).collect()
}
