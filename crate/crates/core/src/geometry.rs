//! Points and flats of the affine space F_q^n, and Gaussian binomial counts.
//!
//! Flats are stored canonically: the direction basis is in reduced row-echelon
//! form and the base point is the unique point of the flat that vanishes in
//! every pivot coordinate. Two flats with the same point set therefore compare
//! equal field by field.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::GeometryError;
use crate::field::{FieldElement, FiniteField};
use crate::subsets::KSubsets;

/// Largest number of points q^n an affine space may have before enumeration is refused.
pub const MAX_AFFINE_POINTS: u64 = 4096;

/// Gaussian binomial coefficient: the number of m-dimensional subspaces of F_q^n.
///
/// Evaluated as the running product of (q^{n-i} - 1)/(q^{i+1} - 1), each partial
/// product being itself a Gaussian binomial, so every division is exact.
pub fn q_binomial(n: i64, m: i64, q: u64) -> Result<u128, GeometryError> {
    if m < 0 || n < 0 || m > n {
        return Err(GeometryError::InvalidParameters(format!(
            "q-binomial needs 0 <= m <= n, got n = {n}, m = {m}"
        )));
    }
    if q < 2 {
        return Err(GeometryError::InvalidParameters(format!(
            "q-binomial needs q >= 2, got {q}"
        )));
    }
    let q = q as u128;
    let pow = |e: i64| -> Result<u128, GeometryError> {
        (0..e).try_fold(1u128, |acc, _| {
            acc.checked_mul(q).ok_or(GeometryError::Overflow)
        })
    };
    let mut value = 1u128;
    for i in 0..m {
        let num = pow(n - i)? - 1;
        let den = pow(i + 1)? - 1;
        value = value.checked_mul(num).ok_or(GeometryError::Overflow)? / den;
    }
    Ok(value)
}

/// Point of F_q^n.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Point(Vec<FieldElement>);

impl Point {
    pub fn new(coords: Vec<FieldElement>) -> Self {
        Point(coords)
    }

    pub fn origin(n: usize) -> Self {
        Point(vec![FieldElement::ZERO; n])
    }

    /// Point with coordinates given by field element indices.
    pub fn from_indices(f: &FiniteField, coords: &[u32]) -> Result<Self, GeometryError> {
        coords
            .iter()
            .map(|&c| f.element(c).map_err(GeometryError::from))
            .collect::<Result<Vec<_>, _>>()
            .map(Point)
    }

    pub fn coords(&self) -> &[FieldElement] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn is_origin(&self) -> bool {
        self.0.iter().all(|c| c.is_zero())
    }

    pub fn add(&self, other: &Point, f: &FiniteField) -> Point {
        Point(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(&a, &b)| f.add(a, b))
                .collect(),
        )
    }

    pub fn sub(&self, other: &Point, f: &FiniteField) -> Point {
        Point(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(&a, &b)| f.sub(a, b))
                .collect(),
        )
    }

    pub fn scale(&self, s: FieldElement, f: &FiniteField) -> Point {
        Point(self.0.iter().map(|&a| f.mul(s, a)).collect())
    }

    /// Position of the point in lexicographic coordinate order.
    pub fn index(&self, q: u32) -> usize {
        self.0
            .iter()
            .fold(0usize, |acc, c| acc * q as usize + c.index() as usize)
    }

    /// Inverse of [`Point::index`].
    pub fn from_index(index: usize, n: usize, q: u32) -> Point {
        let mut coords = vec![FieldElement::ZERO; n];
        let mut rest = index;
        for slot in coords.iter_mut().rev() {
            *slot = FieldElement::from_raw((rest % q as usize) as u32);
            rest /= q as usize;
        }
        Point(coords)
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// Parameters (q, n, m) of the design of points and m-flats in F_q^n.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeometryParams {
    pub q: u32,
    pub n: u32,
    pub m: u32,
}

impl GeometryParams {
    pub fn new(q: u32, n: u32, m: u32) -> Result<Self, GeometryError> {
        if m >= n {
            return Err(GeometryError::InvalidParameters(format!(
                "flat dimension m = {m} must be below ambient dimension n = {n}"
            )));
        }
        if q < 2 {
            return Err(GeometryError::InvalidParameters(format!("q = {q}")));
        }
        Ok(GeometryParams { q, n, m })
    }

    pub fn num_points(&self) -> Result<u64, GeometryError> {
        (0..self.n).try_fold(1u64, |acc, _| {
            acc.checked_mul(self.q as u64)
                .ok_or(GeometryError::Overflow)
        })
    }
}

/// Canonical m-flat of F_q^n.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Flat {
    pivots: Vec<usize>,
    basis: Vec<Vec<FieldElement>>,
    base: Point,
}

impl Flat {
    /// Builds the flat `base + span(directions)` in canonical form.
    pub fn new(
        f: &FiniteField,
        base: Point,
        directions: &[Vec<FieldElement>],
    ) -> Result<Flat, GeometryError> {
        let n = base.dim();
        if let Some(d) = directions.iter().find(|d| d.len() != n) {
            return Err(GeometryError::DimensionMismatch {
                expected: n,
                got: d.len(),
            });
        }
        let (basis, pivots) = row_reduce(f, directions.to_vec());
        if basis.len() != directions.len() {
            return Err(GeometryError::DependentBasis);
        }
        let base = reduce_against(f, base.0, &basis, &pivots);
        Ok(Flat {
            pivots,
            basis,
            base: Point(base),
        })
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn ambient_dim(&self) -> usize {
        self.base.dim()
    }

    pub fn base(&self) -> &Point {
        &self.base
    }

    /// Reduced row-echelon direction basis.
    pub fn basis(&self) -> &[Vec<FieldElement>] {
        &self.basis
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Membership by reducing `x - base` against the echelon basis.
    pub fn contains(&self, x: &Point, f: &FiniteField) -> bool {
        if x.dim() != self.ambient_dim() {
            return false;
        }
        let diff = x.sub(&self.base, f).0;
        reduce_against(f, diff, &self.basis, &self.pivots)
            .iter()
            .all(|c| c.is_zero())
    }

    /// All q^m points of the flat, ordered by their coefficient vectors.
    pub fn points(&self, f: &FiniteField) -> Vec<Point> {
        let m = self.dim();
        let q = f.order() as usize;
        let total = q.pow(m as u32);
        let mut out = Vec::with_capacity(total);
        let mut coeffs = vec![FieldElement::ZERO; m];
        for idx in 0..total {
            let mut rest = idx;
            for c in coeffs.iter_mut().rev() {
                *c = FieldElement::from_raw((rest % q) as u32);
                rest /= q;
            }
            let mut p = self.base.0.clone();
            for (s, row) in coeffs.iter().zip(&self.basis) {
                if s.is_zero() {
                    continue;
                }
                for (slot, &r) in p.iter_mut().zip(row) {
                    *slot = f.add(*slot, f.mul(*s, r));
                }
            }
            out.push(Point(p));
        }
        out
    }
}

/// Whether `x` lies on `fl`.
pub fn flat_contains(fl: &Flat, x: &Point, f: &FiniteField) -> bool {
    fl.contains(x, f)
}

/// The line {s x : s in F_q} through the origin.
pub fn line_through_origin(x: &Point, f: &FiniteField) -> Result<Flat, GeometryError> {
    if x.is_origin() {
        return Err(GeometryError::ZeroDirection);
    }
    Flat::new(f, Point::origin(x.dim()), std::slice::from_ref(&x.0))
}

/// All q^n points of F_q^n in lexicographic order.
pub fn enumerate_points(n: u32, f: &FiniteField) -> Result<Vec<Point>, GeometryError> {
    let total = GeometryParams {
        q: f.order(),
        n,
        m: 0,
    }
    .num_points()?;
    if total > MAX_AFFINE_POINTS {
        return Err(GeometryError::TooLarge(total));
    }
    Ok((0..total as usize)
        .map(|i| Point::from_index(i, n as usize, f.order()))
        .collect())
}

/// Every m-flat of F_q^n exactly once.
///
/// Echelon bases are generated directly (pivot set, then free entries), and each
/// linear subspace is paired with its q^{n-m} coset representatives, which are the
/// points vanishing on the pivot coordinates.
pub fn enumerate_flats(g: &GeometryParams, f: &FiniteField) -> Result<Vec<Flat>, GeometryError> {
    if f.order() != g.q {
        return Err(GeometryError::FieldMismatch {
            field: f.order(),
            q: g.q,
        });
    }
    let total = g.num_points()?;
    if total > MAX_AFFINE_POINTS {
        return Err(GeometryError::TooLarge(total));
    }
    let n = g.n as usize;
    let m = g.m as usize;
    let q = g.q as usize;

    let mut flats = Vec::new();
    for pivots in KSubsets::new(n, m) {
        let free: Vec<(usize, usize)> = pivots
            .iter()
            .enumerate()
            .flat_map(|(row, &pc)| {
                let pivots = &pivots;
                (pc + 1..n)
                    .filter(move |c| !pivots.contains(c))
                    .map(move |c| (row, c))
            })
            .collect();
        let non_pivot: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
        let basis_count = q.pow(free.len() as u32);
        let coset_count = q.pow(non_pivot.len() as u32);
        for b in 0..basis_count {
            let mut basis = vec![vec![FieldElement::ZERO; n]; m];
            for (row, &pc) in pivots.iter().enumerate() {
                basis[row][pc] = FieldElement::ONE;
            }
            let mut rest = b;
            for &(row, col) in free.iter().rev() {
                basis[row][col] = FieldElement::from_raw((rest % q) as u32);
                rest /= q;
            }
            for c in 0..coset_count {
                let mut base = vec![FieldElement::ZERO; n];
                let mut rest = c;
                for &col in non_pivot.iter().rev() {
                    base[col] = FieldElement::from_raw((rest % q) as u32);
                    rest /= q;
                }
                flats.push(Flat {
                    pivots: pivots.clone(),
                    basis: basis.clone(),
                    base: Point(base),
                });
            }
        }
    }
    Ok(flats)
}

/// Reduced row-echelon form of the given rows; zero rows are dropped.
fn row_reduce(
    f: &FiniteField,
    mut rows: Vec<Vec<FieldElement>>,
) -> (Vec<Vec<FieldElement>>, Vec<usize>) {
    let n = rows.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut rank = 0;
    for col in 0..n {
        let Some(sel) = (rank..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(rank, sel);
        let inv = f.inv(rows[rank][col]).expect("pivot is nonzero");
        for c in rows[rank].iter_mut() {
            *c = f.mul(inv, *c);
        }
        for r in 0..rows.len() {
            if r == rank || rows[r][col].is_zero() {
                continue;
            }
            let factor = rows[r][col];
            let pivot_row = rows[rank].clone();
            for (slot, &v) in rows[r].iter_mut().zip(&pivot_row) {
                *slot = f.sub(*slot, f.mul(factor, v));
            }
        }
        pivots.push(col);
        rank += 1;
    }
    rows.truncate(rank);
    (rows, pivots)
}

/// Subtracts the echelon rows so that every pivot coordinate of `v` becomes zero.
fn reduce_against(
    f: &FiniteField,
    mut v: Vec<FieldElement>,
    basis: &[Vec<FieldElement>],
    pivots: &[usize],
) -> Vec<FieldElement> {
    for (row, &pc) in basis.iter().zip(pivots) {
        let s = v[pc];
        if s.is_zero() {
            continue;
        }
        for (slot, &r) in v.iter_mut().zip(row) {
            *slot = f.sub(*slot, f.mul(s, r));
        }
    }
    v
}
