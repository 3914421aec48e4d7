//! Exact rational linear algebra.
//!
//! Everything downstream (filtrations, stability, compatibility) reduces to
//! sums, intersections and membership tests of subspaces of `Q^r`. All
//! arithmetic is exact: `Rat` is an arbitrary-precision rational and a
//! [`Subspace`] is stored in reduced row echelon form, so subspace equality
//! is plain data equality and subspaces can be used as set/map keys.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

/// Exact rational scalar; always reduced, denominator positive.
pub type Rat = BigRational;

/// Integer as a `Rat`.
pub fn rat_int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// `num/den` as a `Rat`. Panics if `den == 0`.
pub fn rat(num: i64, den: i64) -> Rat {
    Rat::new(BigInt::from(num), BigInt::from(den))
}

/// Converts an integer vector to a rational one.
pub fn rat_vec(v: &[i64]) -> Vec<Rat> {
    v.iter().map(|&x| rat_int(x)).collect()
}

/// A linear subspace of `Q^n` in canonical form.
///
/// The basis rows are in reduced row echelon form with strictly increasing
/// pivots and no zero rows, so two values represent the same subspace iff
/// they are equal as data.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subspace {
    ambient_dim: usize,
    basis: Vec<Vec<Rat>>,
}

impl Subspace {
    /// The zero subspace of `Q^n`.
    pub fn zero(ambient_dim: usize) -> Self {
        Subspace {
            ambient_dim,
            basis: Vec::new(),
        }
    }

    /// The full space `Q^n`.
    pub fn full(ambient_dim: usize) -> Self {
        let basis = (0..ambient_dim)
            .map(|i| {
                let mut row = vec![Rat::zero(); ambient_dim];
                row[i] = Rat::one();
                row
            })
            .collect();
        Subspace { ambient_dim, basis }
    }

    /// Canonical span of an arbitrary list of vectors.
    ///
    /// Idempotent and independent of the input ordering; errors on a vector
    /// of the wrong length.
    pub fn span(vectors: &[Vec<Rat>], ambient_dim: usize) -> Result<Self> {
        let mut rows = Vec::with_capacity(vectors.len());
        for v in vectors {
            if v.len() != ambient_dim {
                return Err(Error::DimensionMismatch {
                    expected: ambient_dim,
                    got: v.len(),
                });
            }
            rows.push(v.clone());
        }
        rref(&mut rows);
        Ok(Subspace {
            ambient_dim,
            basis: rows,
        })
    }

    /// Span of a single vector.
    pub fn line(v: &[Rat]) -> Result<Self> {
        Self::span(&[v.to_vec()], v.len())
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Canonical (RREF) basis rows.
    pub fn basis(&self) -> &[Vec<Rat>] {
        &self.basis
    }

    pub fn is_zero(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.basis.len() == self.ambient_dim
    }

    pub fn is_proper_nonzero(&self) -> bool {
        !self.is_zero() && !self.is_full()
    }

    /// Exact membership test.
    pub fn contains_vector(&self, v: &[Rat]) -> Result<bool> {
        if v.len() != self.ambient_dim {
            return Err(Error::DimensionMismatch {
                expected: self.ambient_dim,
                got: v.len(),
            });
        }
        Ok(self.reduce(v).iter().all(|x| x.is_zero()))
    }

    /// True iff `other ⊆ self`.
    pub fn contains_subspace(&self, other: &Subspace) -> Result<bool> {
        self.check_ambient(other)?;
        for row in &other.basis {
            if !self.contains_vector(row)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Residual of `v` after elimination against the canonical basis.
    fn reduce(&self, v: &[Rat]) -> Vec<Rat> {
        let mut w = v.to_vec();
        for row in &self.basis {
            let p = pivot_col(row).expect("canonical basis has no zero rows");
            if !w[p].is_zero() {
                let c = w[p].clone();
                for (wi, ri) in w.iter_mut().zip(row.iter()) {
                    *wi -= &c * ri;
                }
            }
        }
        w
    }

    /// Canonical sum `self + other`.
    pub fn sum(&self, other: &Subspace) -> Result<Subspace> {
        self.check_ambient(other)?;
        let mut rows: Vec<Vec<Rat>> = self.basis.clone();
        rows.extend(other.basis.iter().cloned());
        rref(&mut rows);
        Ok(Subspace {
            ambient_dim: self.ambient_dim,
            basis: rows,
        })
    }

    /// Canonical intersection `self ∩ other`, via the Zassenhaus block trick:
    /// row reduce `[A | A; B | 0]`; rows whose left half vanished carry a
    /// basis of the intersection in their right half.
    pub fn intersect(&self, other: &Subspace) -> Result<Subspace> {
        self.check_ambient(other)?;
        let n = self.ambient_dim;
        if self.is_zero() || other.is_zero() {
            return Ok(Subspace::zero(n));
        }
        let mut rows: Vec<Vec<Rat>> = Vec::with_capacity(self.dim() + other.dim());
        for a in &self.basis {
            let mut row = a.clone();
            row.extend(a.iter().cloned());
            rows.push(row);
        }
        for b in &other.basis {
            let mut row = b.clone();
            row.extend(std::iter::repeat_n(Rat::zero(), n));
            rows.push(row);
        }
        rref(&mut rows);
        let inter: Vec<Vec<Rat>> = rows
            .iter()
            .filter(|row| row[..n].iter().all(|x| x.is_zero()))
            .map(|row| row[n..].to_vec())
            .collect();
        Subspace::span(&inter, n)
    }

    /// Pivot columns of the canonical basis; coordinates of any `v ∈ self`
    /// with respect to the basis are exactly the entries of `v` at these
    /// columns.
    pub fn pivot_columns(&self) -> Vec<usize> {
        self.basis
            .iter()
            .map(|row| pivot_col(row).expect("canonical basis has no zero rows"))
            .collect()
    }

    fn check_ambient(&self, other: &Subspace) -> Result<()> {
        if self.ambient_dim != other.ambient_dim {
            return Err(Error::DimensionMismatch {
                expected: self.ambient_dim,
                got: other.ambient_dim,
            });
        }
        Ok(())
    }
}

/// Moment-curve vector `(1, t, t^2, ..., t^{dim-1})`; any `dim` of them with
/// distinct parameters are linearly independent (Vandermonde).
pub fn moment_vector(t: i64, dim: usize) -> Vec<Rat> {
    let mut v = Vec::with_capacity(dim);
    let mut acc = Rat::one();
    for _ in 0..dim {
        v.push(acc.clone());
        acc *= rat_int(t);
    }
    v
}

/// Extends `base` to `target` by greedily adding canonical basis vectors of
/// `target`; returns the added vectors (a basis of a complement of `base`
/// inside `target`). With `reverse` the basis of `target` is scanned from
/// the last pivot backwards.
pub fn complement_within(base: &Subspace, target: &Subspace, reverse: bool) -> Result<Subspace> {
    let mut current = base.clone();
    let mut added: Vec<Vec<Rat>> = Vec::new();
    let rows: Vec<&Vec<Rat>> = if reverse {
        target.basis().iter().rev().collect()
    } else {
        target.basis().iter().collect()
    };
    for row in rows {
        if !current.contains_vector(row)? {
            added.push(row.clone());
            current = current.sum(&Subspace::line(row)?)?;
        }
    }
    if current != target.sum(base)? {
        return Err(Error::Internal(
            "complement extension did not reach the target space".into(),
        ));
    }
    Subspace::span(&added, base.ambient_dim())
}

fn pivot_col(row: &[Rat]) -> Option<usize> {
    row.iter().position(|x| !x.is_zero())
}

/// In-place reduced row echelon form; zero rows are removed and the
/// surviving rows end up sorted by pivot column.
#[allow(clippy::needless_range_loop)] // index loops: rows alias within `rows`
pub fn rref(rows: &mut Vec<Vec<Rat>>) {
    if rows.is_empty() {
        return;
    }
    let ncols = rows[0].len();
    let mut lead = 0usize;
    for col in 0..ncols {
        if lead >= rows.len() {
            break;
        }
        let Some(sel) = (lead..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(lead, sel);
        let inv = rows[lead][col].clone();
        for x in rows[lead].iter_mut() {
            *x /= &inv;
        }
        for r in 0..rows.len() {
            if r != lead && !rows[r][col].is_zero() {
                let c = rows[r][col].clone();
                for k in 0..ncols {
                    let delta = &c * &rows[lead][k];
                    rows[r][k] -= delta;
                }
            }
        }
        lead += 1;
    }
    rows.retain(|row| row.iter().any(|x| !x.is_zero()));
}

/// Solves the square system `mat · x = rhs` exactly; `None` if singular.
#[allow(clippy::needless_range_loop)] // index loops: rows alias within `aug`
pub fn solve_square(mat: &[Vec<Rat>], rhs: &[Rat]) -> Option<Vec<Rat>> {
    let n = mat.len();
    assert!(mat.iter().all(|row| row.len() == n) && rhs.len() == n);
    let mut aug: Vec<Vec<Rat>> = mat
        .iter()
        .zip(rhs.iter())
        .map(|(row, b)| {
            let mut r = row.clone();
            r.push(b.clone());
            r
        })
        .collect();
    for col in 0..n {
        let sel = (col..n).find(|&r| !aug[r][col].is_zero())?;
        aug.swap(col, sel);
        let inv = aug[col][col].clone();
        for x in aug[col].iter_mut() {
            *x /= &inv;
        }
        for r in 0..n {
            if r != col && !aug[r][col].is_zero() {
                let c = aug[r][col].clone();
                for k in col..=n {
                    let delta = &c * &aug[col][k];
                    aug[r][k] -= delta;
                }
            }
        }
    }
    Some(aug.into_iter().map(|row| row[n].clone()).collect())
}

// ---------------------------------------------------------------------------
// Integer lattice helpers (exact, arbitrary precision where it matters).
// ---------------------------------------------------------------------------

/// Determinant of a square integer matrix, by fraction-free elimination.
pub fn det_int(mat: &[Vec<i64>]) -> BigInt {
    let n = mat.len();
    if n == 0 {
        return BigInt::one();
    }
    assert!(mat.iter().all(|row| row.len() == n));
    let mut a: Vec<Vec<BigInt>> = mat
        .iter()
        .map(|row| row.iter().map(|&x| BigInt::from(x)).collect())
        .collect();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            let Some(sel) = (k + 1..n).find(|&r| !a[r][k].is_zero()) else {
                return BigInt::zero();
            };
            a.swap(k, sel);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = num / &prev; // exact by Bareiss
            }
        }
        prev = a[k][k].clone();
    }
    sign * a[n - 1][n - 1].clone()
}

/// Rank of an integer matrix over `Q`.
pub fn rank_int(rows: &[Vec<i64>]) -> usize {
    let mut m: Vec<Vec<Rat>> = rows.iter().map(|r| rat_vec(r)).collect();
    rref(&mut m);
    m.len()
}

/// A basis of the integer kernel `{x ∈ Z^n : <x, u> = 0}` of a primitive
/// vector `u`. Obtained by reducing `u` to a unit vector with unimodular
/// column operations; the transformed complementary columns are the basis.
#[allow(clippy::needless_range_loop)] // index loop: columns alias within `cols`
pub fn integer_kernel_basis(u: &[i64]) -> Vec<Vec<i64>> {
    let n = u.len();
    let mut w: Vec<i64> = u.to_vec();
    // cols[j] tracks the j-th column of the accumulated unimodular matrix.
    let mut cols: Vec<Vec<i64>> = (0..n)
        .map(|j| (0..n).map(|i| i64::from(i == j)).collect())
        .collect();
    loop {
        let nonzero: Vec<usize> = (0..n).filter(|&j| w[j] != 0).collect();
        if nonzero.len() <= 1 {
            break;
        }
        // Reduce the largest entry by the smallest nonzero one.
        let &jmin = nonzero
            .iter()
            .min_by_key(|&&j| w[j].unsigned_abs())
            .unwrap();
        let &jmax = nonzero
            .iter()
            .filter(|&&j| j != jmin)
            .max_by_key(|&&j| w[j].unsigned_abs())
            .unwrap();
        let q = w[jmax].div_euclid(w[jmin]);
        w[jmax] -= q * w[jmin];
        for i in 0..n {
            let delta = q * cols[jmin][i];
            cols[jmax][i] -= delta;
        }
    }
    let lead = (0..n).find(|&j| w[j] != 0).expect("u must be nonzero");
    debug_assert_eq!(w[lead].abs(), 1, "kernel basis requires a primitive vector");
    (0..n).filter(|&j| j != lead).map(|j| cols[j].clone()).collect()
}

/// Expresses `v` as an integer combination of `basis` rows; `None` if `v` is
/// outside the spanned lattice.
pub fn express_in_lattice_basis(v: &[i64], basis: &[Vec<i64>]) -> Option<Vec<i64>> {
    let n = v.len();
    let k = basis.len();
    // Solve basis^T · c = v over Q by row reduction of the augmented system.
    let mut aug: Vec<Vec<Rat>> = (0..n)
        .map(|i| {
            let mut row: Vec<Rat> = (0..k).map(|j| rat_int(basis[j][i])).collect();
            row.push(rat_int(v[i]));
            row
        })
        .collect();
    rref(&mut aug);
    let mut coeffs = vec![Rat::zero(); k];
    for row in &aug {
        let p = pivot_col(row)?;
        if p == k {
            return None; // inconsistent
        }
        coeffs[p] = row[k].clone();
    }
    let mut out = Vec::with_capacity(k);
    for c in coeffs {
        if !c.denom().is_one() {
            return None;
        }
        out.push(i64::try_from(c.numer()).ok()?);
    }
    Some(out)
}
