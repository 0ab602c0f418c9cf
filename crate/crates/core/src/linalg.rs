//! Dense exact linear algebra over `Q(i)`.
//!
//! Gauss-Jordan elimination with leftmost-column, topmost-row pivoting and
//! pivots scaled to one. Since every space involved has dimension at most
//! `2^{2n}`, nothing fancier is needed.

use std::fmt;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::scalar::GaussianRational;

pub type Vector = Vec<GaussianRational>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinalgError {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("ambient dimensions differ: {0} vs {1}")]
    AmbientMismatch(usize, usize),
    #[error("basis vector {index} of the subspace is not contained in the larger space")]
    NotContained { index: usize },
    #[error("vector does not lie in the space being reduced")]
    NotInSpace,
    #[error("induced map is not well defined: {0}")]
    NotWellDefined(String),
    #[error("matrix is singular")]
    Singular,
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<GaussianRational>,
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            let row: Vec<String> = self.row(r).iter().map(|x| x.to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![GaussianRational::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, GaussianRational::one());
        }
        m
    }

    /// Builds from row vectors; `cols` is needed when there are no rows.
    pub fn from_rows(cols: usize, rows: &[Vector]) -> Result<Self, LinalgError> {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for (r, row) in rows.iter().enumerate() {
            if row.len() != cols {
                return Err(LinalgError::Shape(format!("row {r} has length {}, expected {cols}", row.len())));
            }
            data.extend(row.iter().cloned());
        }
        Ok(Self { rows: rows.len(), cols, data })
    }

    pub fn from_columns(rows: usize, columns: &[Vector]) -> Result<Self, LinalgError> {
        Ok(Self::from_rows(rows, columns)?.transpose())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &GaussianRational {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, value: GaussianRational) {
        self.data[r * self.cols + c] = value;
    }

    pub fn row(&self, r: usize) -> &[GaussianRational] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_vectors(&self) -> Vec<Vector> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn column(&self, c: usize) -> Vector {
        (0..self.rows).map(|r| self.get(r, c).clone()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c).clone());
            }
        }
        t
    }

    /// Entrywise complex conjugate.
    pub fn conj(&self) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|x| x.conj()).collect() }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    /// First nonzero entry as `(row, col)`.
    pub fn first_nonzero(&self) -> Option<(usize, usize)> {
        self.data.iter().position(|x| !x.is_zero()).map(|i| (i / self.cols, i % self.cols))
    }

    pub fn mul(&self, other: &Matrix) -> Result<Matrix, LinalgError> {
        if self.cols != other.rows {
            return Err(LinalgError::Shape(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Matrix::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k);
                if a.is_zero() {
                    continue;
                }
                for c in 0..other.cols {
                    let b = other.get(k, c);
                    if !b.is_zero() {
                        out.data[r * other.cols + c] += &(a * b);
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[GaussianRational]) -> Result<Vector, LinalgError> {
        if v.len() != self.cols {
            return Err(LinalgError::Shape(format!("vector of length {} for {} columns", v.len(), self.cols)));
        }
        Ok((0..self.rows)
            .map(|r| {
                let mut acc = GaussianRational::zero();
                for (a, b) in self.row(r).iter().zip(v) {
                    if !a.is_zero() && !b.is_zero() {
                        acc += &(a * b);
                    }
                }
                acc
            })
            .collect())
    }

    pub fn add(&self, other: &Matrix) -> Result<Matrix, LinalgError> {
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return Err(LinalgError::Shape(format!(
                "cannot add {}x{} and {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn scale(&self, c: &GaussianRational) -> Matrix {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|a| a * c).collect() }
    }

    /// Reduced row echelon form and pivot columns.
    pub fn rref(&self) -> (Matrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..m.cols {
            if row == m.rows {
                break;
            }
            let Some(found) = (row..m.rows).find(|&r| !m.get(r, col).is_zero()) else {
                continue;
            };
            m.swap_rows(row, found);
            let inv = m.get(row, col).inv().expect("pivot is nonzero");
            for c in col..m.cols {
                let v = m.get(row, c) * &inv;
                m.set(row, c, v);
            }
            for r in 0..m.rows {
                if r == row || m.get(r, col).is_zero() {
                    continue;
                }
                let factor = m.get(r, col).clone();
                for c in col..m.cols {
                    let sub = &factor * m.get(row, c);
                    if !sub.is_zero() {
                        let v = m.get(r, c) - &sub;
                        m.set(r, c, v);
                    }
                }
            }
            pivots.push(col);
            row += 1;
        }
        (m, pivots)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    pub fn inverse(&self) -> Result<Matrix, LinalgError> {
        if self.rows != self.cols {
            return Err(LinalgError::Shape(format!("{}x{} is not square", self.rows, self.cols)));
        }
        let n = self.rows;
        let mut aug = Matrix::zeros(n, 2 * n);
        for r in 0..n {
            for c in 0..n {
                aug.set(r, c, self.get(r, c).clone());
            }
            aug.set(r, n + r, GaussianRational::one());
        }
        let (red, pivots) = aug.rref();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return Err(LinalgError::Singular);
        }
        let mut inv = Matrix::zeros(n, n);
        for r in 0..n {
            for c in 0..n {
                inv.set(r, c, red.get(r, n + c).clone());
            }
        }
        Ok(inv)
    }

    /// `{v : M v = 0}`.
    pub fn kernel_basis(&self) -> Subspace {
        let (red, pivots) = self.rref();
        let mut vectors = Vec::new();
        for free in (0..self.cols).filter(|c| !pivots.contains(c)) {
            let mut v = vec![GaussianRational::zero(); self.cols];
            v[free] = GaussianRational::one();
            for (r, &p) in pivots.iter().enumerate() {
                v[p] = -red.get(r, free);
            }
            vectors.push(v);
        }
        Subspace::span(self.cols, &vectors).expect("kernel vectors have the right length")
    }

    /// Column space.
    pub fn image_basis(&self) -> Subspace {
        Subspace::from_matrix(&self.transpose())
    }
}

/// A linear subspace of `Q(i)^ambient`, stored as the rows of its rref basis.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Subspace {
    basis: Matrix,
    pivots: Vec<usize>,
}

impl fmt::Debug for Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Subspace(dim {} in {}) {:?}", self.dim(), self.ambient(), self.basis)
    }
}

impl Subspace {
    pub fn zero(ambient: usize) -> Self {
        Self { basis: Matrix::zeros(0, ambient), pivots: Vec::new() }
    }

    pub fn full(ambient: usize) -> Self {
        Self::from_matrix(&Matrix::identity(ambient))
    }

    /// Row space of `m`.
    pub fn from_matrix(m: &Matrix) -> Self {
        let (red, pivots) = m.rref();
        let rows: Vec<Vector> = (0..pivots.len()).map(|r| red.row(r).to_vec()).collect();
        Self { basis: Matrix::from_rows(m.cols(), &rows).expect("rows share a width"), pivots }
    }

    pub fn span(ambient: usize, vectors: &[Vector]) -> Result<Self, LinalgError> {
        Ok(Self::from_matrix(&Matrix::from_rows(ambient, vectors)?))
    }

    pub fn ambient(&self) -> usize {
        self.basis.cols()
    }

    pub fn dim(&self) -> usize {
        self.basis.rows()
    }

    pub fn basis(&self) -> Vec<Vector> {
        self.basis.row_vectors()
    }

    pub fn basis_matrix(&self) -> &Matrix {
        &self.basis
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Subtracts basis rows to clear the pivot columns of `v`.
    fn residual(&self, v: &[GaussianRational]) -> Vector {
        let mut out = v.to_vec();
        for (r, &p) in self.pivots.iter().enumerate() {
            if out[p].is_zero() {
                continue;
            }
            let factor = out[p].clone();
            for (c, b) in self.basis.row(r).iter().enumerate() {
                if !b.is_zero() {
                    out[c] -= &(&factor * b);
                }
            }
        }
        out
    }

    pub fn contains(&self, v: &[GaussianRational]) -> bool {
        v.len() == self.ambient() && self.residual(v).iter().all(Zero::is_zero)
    }

    /// Index of the first basis vector of `other` not in `self`, if any.
    pub fn first_not_contained(&self, other: &Subspace) -> Option<usize> {
        (0..other.dim()).find(|&r| !self.contains(other.basis.row(r)))
    }

    pub fn contains_subspace(&self, other: &Subspace) -> bool {
        self.ambient() == other.ambient() && self.first_not_contained(other).is_none()
    }

    fn check_ambient(&self, other: &Subspace) -> Result<(), LinalgError> {
        if self.ambient() != other.ambient() {
            Err(LinalgError::AmbientMismatch(self.ambient(), other.ambient()))
        } else {
            Ok(())
        }
    }

    pub fn sum(&self, other: &Subspace) -> Result<Subspace, LinalgError> {
        self.check_ambient(other)?;
        let mut rows = self.basis();
        rows.extend(other.basis());
        Subspace::span(self.ambient(), &rows)
    }

    /// Zassenhaus: row reduce `[[A, A], [B, 0]]`; rows whose left half vanish
    /// carry a basis of the intersection in their right half.
    pub fn intersection(&self, other: &Subspace) -> Result<Subspace, LinalgError> {
        self.check_ambient(other)?;
        let n = self.ambient();
        let mut rows = Vec::new();
        for v in self.basis() {
            let mut row = v.clone();
            row.extend(v);
            rows.push(row);
        }
        for v in other.basis() {
            let mut row = v;
            row.extend(vec![GaussianRational::zero(); n]);
            rows.push(row);
        }
        let (red, pivots) = Matrix::from_rows(2 * n, &rows)?.rref();
        let inter: Vec<Vector> = pivots
            .iter()
            .enumerate()
            .filter(|(_, &p)| p >= n)
            .map(|(r, _)| red.row(r)[n..].to_vec())
            .collect();
        Subspace::span(n, &inter)
    }

    /// Image of this subspace under `m`.
    pub fn map(&self, m: &Matrix) -> Result<Subspace, LinalgError> {
        let images = self.basis().iter().map(|v| m.mul_vec(v)).collect::<Result<Vec<_>, _>>()?;
        Subspace::span(m.rows(), &images)
    }
}

/// `big / small` with deterministic coset representatives.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Quotient {
    big: Subspace,
    small: Subspace,
    reps: Vec<Vector>,
    rep_pivots: Vec<usize>,
}

pub fn quotient(big: &Subspace, small: &Subspace) -> Result<Quotient, LinalgError> {
    big.check_ambient(small)?;
    if let Some(index) = big.first_not_contained(small) {
        return Err(LinalgError::NotContained { index });
    }
    let reduced: Vec<Vector> = big.basis().iter().map(|v| small.residual(v)).collect();
    let rest = Subspace::span(big.ambient(), &reduced)?;
    Ok(Quotient { big: big.clone(), small: small.clone(), reps: rest.basis(), rep_pivots: rest.pivots.clone() })
}

impl Quotient {
    pub fn dim(&self) -> usize {
        self.reps.len()
    }

    pub fn big(&self) -> &Subspace {
        &self.big
    }

    pub fn small(&self) -> &Subspace {
        &self.small
    }

    /// Coset representatives; they vanish on the pivot columns of `small`.
    pub fn representatives(&self) -> &[Vector] {
        &self.reps
    }

    /// Quotient coordinates of `v`, which must lie in `big`.
    pub fn reduce(&self, v: &[GaussianRational]) -> Result<Vector, LinalgError> {
        if v.len() != self.big.ambient() {
            return Err(LinalgError::Shape(format!("vector of length {} in ambient {}", v.len(), self.big.ambient())));
        }
        let r = self.small.residual(v);
        let coords: Vector = self.rep_pivots.iter().map(|&p| r[p].clone()).collect();
        let mut rest = r;
        for (c, rep) in coords.iter().zip(&self.reps) {
            for (x, y) in rest.iter_mut().zip(rep) {
                *x -= &(c * y);
            }
        }
        if rest.iter().any(|x| !x.is_zero()) {
            return Err(LinalgError::NotInSpace);
        }
        Ok(coords)
    }

    /// True when `v` lies in `big` and represents the zero class.
    pub fn is_trivial(&self, v: &[GaussianRational]) -> bool {
        self.small.contains(v)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MapKind {
    Iso,
    Injective,
    Surjective,
    Zero,
    Other,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InducedMap {
    pub matrix: Matrix,
    pub rank: usize,
    pub injective: bool,
    pub surjective: bool,
}

impl InducedMap {
    pub fn kind(&self) -> MapKind {
        match (self.injective, self.surjective) {
            (true, true) => MapKind::Iso,
            (true, false) => MapKind::Injective,
            _ if self.rank == 0 => MapKind::Zero,
            (false, true) => MapKind::Surjective,
            (false, false) => MapKind::Other,
        }
    }
}

/// Matrix of the map `src -> dst` induced by `raw` on the ambient spaces.
pub fn induced_map(src: &Quotient, dst: &Quotient, raw: &Matrix) -> Result<InducedMap, LinalgError> {
    if raw.cols() != src.big.ambient() || raw.rows() != dst.big.ambient() {
        return Err(LinalgError::Shape(format!(
            "raw map is {}x{}, quotients live in {} and {}",
            raw.rows(),
            raw.cols(),
            src.big.ambient(),
            dst.big.ambient()
        )));
    }
    for (i, v) in src.big.basis().iter().enumerate() {
        if !dst.big.contains(&raw.mul_vec(v)?) {
            return Err(LinalgError::NotWellDefined(format!("cocycle {i} is not mapped to a cocycle")));
        }
    }
    for (i, v) in src.small.basis().iter().enumerate() {
        if !dst.small.contains(&raw.mul_vec(v)?) {
            return Err(LinalgError::NotWellDefined(format!("coboundary {i} has a nonzero image class")));
        }
    }
    let columns = src.reps.iter().map(|rep| dst.reduce(&raw.mul_vec(rep)?)).collect::<Result<Vec<_>, _>>()?;
    let matrix = Matrix::from_columns(dst.dim(), &columns)?;
    let rank = matrix.rank();
    Ok(InducedMap { rank, injective: rank == src.dim(), surjective: rank == dst.dim(), matrix })
}
