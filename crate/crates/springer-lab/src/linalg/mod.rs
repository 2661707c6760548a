//! Dense exact linear algebra over a finite field.
//!
//! Subspaces are stored by a basis in reduced row-echelon form, so two
//! subspaces are equal iff their stored bases are equal.

mod bitmat;

pub use bitmat::BitMat;

use std::ops::{Add, Index, IndexMut, Mul, Sub};

use thiserror::Error;

use crate::gf2k::FiniteField;
use crate::partition::Partition;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinalgError {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("matrix is not nilpotent")]
    NotNilpotent,
    #[error("subspace is not stable under the matrix")]
    NotStable,
    #[error("matrix is singular")]
    Singular,
    #[error("subspace is not contained in the expected ambient subspace")]
    NotContained,
}

/// Row-major dense matrix.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Mat<F> {
    rows: usize,
    cols: usize,
    data: Vec<F>,
}

impl<F: FiniteField> Mat<F> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat {
            rows,
            cols,
            data: vec![F::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Mat::from_fn(n, n, |i, j| if i == j { F::one() } else { F::zero() })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> F) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Mat { rows, cols, data }
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<F>) -> Self {
        assert_eq!(
            data.len(),
            rows * cols,
            "data length must equal rows * cols"
        );
        Mat { rows, cols, data }
    }

    /// Builds from rows of bitmasks; panics on ragged input.
    pub fn from_bits<R: AsRef<[u32]>>(rows: &[R]) -> Self {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            assert_eq!(r.as_ref().len(), cols, "ragged rows");
            data.extend(r.as_ref().iter().map(|&b| F::from_bits(b)));
        }
        Mat {
            rows: rows.len(),
            cols,
            data,
        }
    }

    pub fn from_rows(rows: &[Vec<F>], cols: usize) -> Self {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            assert_eq!(r.len(), cols, "ragged rows");
            data.extend_from_slice(r);
        }
        Mat {
            rows: rows.len(),
            cols,
            data,
        }
    }

    pub fn from_columns(columns: &[Vec<F>], rows: usize) -> Self {
        Mat::from_rows(columns, rows).transpose()
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn data(&self) -> &[F] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[F] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<F> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn row_vectors(&self) -> Vec<Vec<F>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn to_bits(&self) -> Vec<Vec<u32>> {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(|e| e.bits()).collect())
            .collect()
    }

    /// Re-reads the bitmask entries in another field (used for 0/1 seed data).
    pub fn lift<G: FiniteField>(&self) -> Mat<G> {
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|e| G::from_bits(e.bits())).collect(),
        }
    }

    pub fn transpose(&self) -> Self {
        Mat::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|e| e.is_zero())
    }

    pub fn scale(&self, c: F) -> Self {
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&e| e * c).collect(),
        }
    }

    pub fn apply(&self, v: &[F]) -> Vec<F> {
        assert_eq!(v.len(), self.cols, "vector length must equal column count");
        (0..self.rows)
            .map(|i| {
                let mut acc = F::zero();
                for (a, b) in self.row(i).iter().zip(v) {
                    acc += *a * *b;
                }
                acc
            })
            .collect()
    }

    pub fn pow(&self, mut exp: u64) -> Self {
        assert!(self.is_square());
        let mut result = Mat::identity(self.rows);
        let mut base = self.clone();
        while exp > 0 {
            if exp & 1 == 1 {
                result = &result * &base;
            }
            exp >>= 1;
            if exp > 0 {
                base = &base * &base;
            }
        }
        result
    }

    /// Nilpotent iff x^N = 0; checked by repeated squaring.
    pub fn is_nilpotent(&self) -> bool {
        assert!(self.is_square());
        let mut p = self.clone();
        let mut e = 1usize;
        while e < self.rows {
            if p.is_zero() {
                return true;
            }
            p = &p * &p;
            e *= 2;
        }
        p.is_zero()
    }

    pub fn submatrix(&self, row0: usize, col0: usize, rows: usize, cols: usize) -> Self {
        Mat::from_fn(rows, cols, |i, j| self[(row0 + i, col0 + j)])
    }

    pub fn set_block(&mut self, row0: usize, col0: usize, block: &Mat<F>) {
        for i in 0..block.rows {
            for j in 0..block.cols {
                self[(row0 + i, col0 + j)] = block[(i, j)];
            }
        }
    }

    /// Returns (rref, pivot columns).
    pub fn rref(&self) -> (Self, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m[(i, c)].is_zero()) else {
                continue;
            };
            m.swap_rows(r, p);
            let inv = m[(r, c)].try_inv().expect("pivot is nonzero");
            for j in c..m.cols {
                let v = m[(r, j)] * inv;
                m[(r, j)] = v;
            }
            for i in 0..m.rows {
                if i != r {
                    let factor = m[(i, c)];
                    if !factor.is_zero() {
                        for j in c..m.cols {
                            let v = m[(r, j)];
                            m[(i, j)] -= factor * v;
                        }
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Null space {v : self · v = 0}.
    pub fn kernel(&self) -> Subspace<F> {
        let (r, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let vectors: Vec<Vec<F>> = free
            .iter()
            .map(|&fc| {
                let mut v = vec![F::zero(); self.cols];
                v[fc] = F::one();
                for (row, &pc) in pivots.iter().enumerate() {
                    v[pc] = -r[(row, fc)];
                }
                v
            })
            .collect();
        Subspace::span(self.cols, &vectors)
    }

    pub fn inverse(&self) -> Option<Self> {
        assert!(self.is_square());
        let n = self.rows;
        let mut aug = Mat::zeros(n, 2 * n);
        aug.set_block(0, 0, self);
        aug.set_block(0, n, &Mat::identity(n));
        let (r, pivots) = aug.rref();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return None;
        }
        Some(r.submatrix(0, n, n, n))
    }

    /// g · self · g⁻¹.
    pub fn conjugate(&self, g: &Mat<F>, g_inv: &Mat<F>) -> Self {
        &(g * self) * g_inv
    }

    /// Packs the entries into a 128-bit key when they fit.
    pub fn pack(&self) -> Option<u128> {
        let width = F::DEGREE as usize;
        if self.data.len() * width > 128 {
            return None;
        }
        let mut key = 0u128;
        for e in &self.data {
            key = (key << width) | e.bits() as u128;
        }
        Some(key)
    }

    pub fn unpack(key: u128, rows: usize, cols: usize) -> Self {
        let width = F::DEGREE as usize;
        let mask = (1u128 << width) - 1;
        let len = rows * cols;
        let data = (0..len)
            .map(|idx| F::from_bits(((key >> ((len - 1 - idx) * width)) & mask) as u32))
            .collect();
        Mat { rows, cols, data }
    }
}

impl<F> Index<(usize, usize)> for Mat<F> {
    type Output = F;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &F {
        &self.data[i * self.cols + j]
    }
}

impl<F> IndexMut<(usize, usize)> for Mat<F> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut F {
        &mut self.data[i * self.cols + j]
    }
}

impl<F: FiniteField> Mul for &Mat<F> {
    type Output = Mat<F>;
    fn mul(self, rhs: &Mat<F>) -> Mat<F> {
        assert_eq!(self.cols, rhs.rows, "inner dimensions must agree");
        let mut out = Mat::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                let rrow = rhs.row(k);
                let orow = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
                for (o, &b) in orow.iter_mut().zip(rrow) {
                    *o += a * b;
                }
            }
        }
        out
    }
}

impl<F: FiniteField> Add for &Mat<F> {
    type Output = Mat<F>;
    fn add(self, rhs: &Mat<F>) -> Mat<F> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(&a, &b)| a + b)
                .collect(),
        }
    }
}

impl<F: FiniteField> Sub for &Mat<F> {
    type Output = Mat<F>;
    fn sub(self, rhs: &Mat<F>) -> Mat<F> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(&a, &b)| a - b)
                .collect(),
        }
    }
}

/// Standard basis vector.
pub fn unit_vector<F: FiniteField>(dim: usize, i: usize) -> Vec<F> {
    let mut v = vec![F::zero(); dim];
    v[i] = F::one();
    v
}

pub fn is_zero_vector<F: FiniteField>(v: &[F]) -> bool {
    v.iter().all(|e| e.is_zero())
}

pub fn add_vectors<F: FiniteField>(a: &[F], b: &[F]) -> Vec<F> {
    a.iter().zip(b).map(|(&x, &y)| x + y).collect()
}

pub fn scale_vector<F: FiniteField>(c: F, v: &[F]) -> Vec<F> {
    v.iter().map(|&x| c * x).collect()
}

/// Bilinear form ᵗv · gram · w.
pub fn bilinear<F: FiniteField>(gram: &Mat<F>, v: &[F], w: &[F]) -> F {
    let gw = gram.apply(w);
    v.iter().zip(&gw).map(|(&a, &b)| a * b).sum()
}

/// Subspace of F^ambient with a canonical RREF basis.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Subspace<F> {
    ambient: usize,
    basis: Mat<F>,
}

impl<F: FiniteField> Subspace<F> {
    pub fn zero(ambient: usize) -> Self {
        Subspace {
            ambient,
            basis: Mat::zeros(0, ambient),
        }
    }

    pub fn full(ambient: usize) -> Self {
        Subspace {
            ambient,
            basis: Mat::identity(ambient),
        }
    }

    pub fn span(ambient: usize, vectors: &[Vec<F>]) -> Self {
        if vectors.is_empty() {
            return Subspace::zero(ambient);
        }
        let (r, pivots) = Mat::from_rows(vectors, ambient).rref();
        Subspace {
            ambient,
            basis: r.submatrix(0, 0, pivots.len(), ambient),
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.rows
    }

    /// RREF basis, one vector per row.
    pub fn basis(&self) -> &Mat<F> {
        &self.basis
    }

    pub fn basis_vectors(&self) -> Vec<Vec<F>> {
        self.basis.row_vectors()
    }

    pub fn contains(&self, v: &[F]) -> bool {
        self.coordinates(v).is_some()
    }

    /// Coefficients of `v` in the stored basis.
    pub fn coordinates(&self, v: &[F]) -> Option<Vec<F>> {
        assert_eq!(v.len(), self.ambient);
        // With an RREF basis the coefficients are read off at pivot columns.
        let mut residual = v.to_vec();
        let mut coords = Vec::with_capacity(self.dim());
        for i in 0..self.dim() {
            let row = self.basis.row(i);
            let pivot = row
                .iter()
                .position(|e| !e.is_zero())
                .expect("rref row is nonzero");
            let c = residual[pivot];
            coords.push(c);
            if !c.is_zero() {
                for (r, &b) in residual.iter_mut().zip(row) {
                    *r -= c * b;
                }
            }
        }
        is_zero_vector(&residual).then_some(coords)
    }

    pub fn contains_subspace(&self, other: &Subspace<F>) -> bool {
        (0..other.dim()).all(|i| self.contains(other.basis.row(i)))
    }

    pub fn sum(&self, other: &Subspace<F>) -> Subspace<F> {
        let mut vs = self.basis_vectors();
        vs.extend(other.basis_vectors());
        Subspace::span(self.ambient, &vs)
    }

    pub fn intersection(&self, other: &Subspace<F>) -> Subspace<F> {
        // v = Σ a_i u_i = Σ b_j w_j; solve on the stacked coefficient vector.
        let (d1, d2) = (self.dim(), other.dim());
        if d1 == 0 || d2 == 0 {
            return Subspace::zero(self.ambient);
        }
        let mut stacked = self.basis_vectors();
        stacked.extend(other.basis_vectors());
        let m = Mat::from_columns(&stacked, self.ambient);
        let kernel = m.kernel();
        let vectors: Vec<Vec<F>> = kernel
            .basis_vectors()
            .iter()
            .map(|coeffs| {
                let mut v = vec![F::zero(); self.ambient];
                for (i, c) in coeffs[..d1].iter().enumerate() {
                    for (x, b) in v.iter_mut().zip(self.basis.row(i)) {
                        *x += *c * *b;
                    }
                }
                v
            })
            .collect();
        Subspace::span(self.ambient, &vectors)
    }

    pub fn is_stable_under(&self, x: &Mat<F>) -> bool {
        (0..self.dim()).all(|i| self.contains(&x.apply(self.basis.row(i))))
    }

    pub fn image_under(&self, x: &Mat<F>) -> Subspace<F> {
        let vs: Vec<Vec<F>> = (0..self.dim())
            .map(|i| x.apply(self.basis.row(i)))
            .collect();
        Subspace::span(x.rows(), &vs)
    }

    /// Standard basis vectors completing a basis of the ambient space,
    /// chosen greedily from the lowest index.
    pub fn complement_units(&self) -> Vec<Vec<F>> {
        let mut current = self.clone();
        let mut out = Vec::new();
        for i in 0..self.ambient {
            if current.dim() == self.ambient {
                break;
            }
            let e = unit_vector(self.ambient, i);
            if !current.contains(&e) {
                current = Subspace::span(self.ambient, &{
                    let mut vs = current.basis_vectors();
                    vs.push(e.clone());
                    vs
                });
                out.push(e);
            }
        }
        out
    }

    /// Vectors from `outer`'s basis completing `self` to a basis of `outer`.
    pub fn complement_within(&self, outer: &Subspace<F>) -> Vec<Vec<F>> {
        let mut current = self.basis_vectors();
        let mut dim = self.dim();
        let mut out = Vec::new();
        for v in outer.basis_vectors() {
            current.push(v.clone());
            let s = Subspace::span(self.ambient, &current);
            if s.dim() > dim {
                dim = s.dim();
                out.push(v);
            } else {
                current.pop();
            }
        }
        out
    }

    /// {v : ⟨w, v⟩ = 0 for all w in self} for the form with Gram matrix `gram`.
    pub fn perp(&self, gram: &Mat<F>) -> Subspace<F> {
        if self.dim() == 0 {
            return Subspace::full(self.ambient);
        }
        (&self.basis * gram).kernel()
    }

    pub fn is_isotropic(&self, gram: &Mat<F>) -> bool {
        let b = &(&self.basis * gram) * &self.basis.transpose();
        b.is_zero()
    }
}

/// Reduced row echelon form, rank and kernel of `m`.
pub fn rref_rank_kernel<F: FiniteField>(m: &Mat<F>) -> (Mat<F>, usize, Subspace<F>) {
    let (r, pivots) = m.rref();
    (r, pivots.len(), m.kernel())
}

/// Subspace of the rows × cols matrix space, with matrices flattened row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatSpace<F> {
    rows: usize,
    cols: usize,
    space: Subspace<F>,
}

impl<F: FiniteField> MatSpace<F> {
    pub fn from_matrices(rows: usize, cols: usize, mats: &[Mat<F>]) -> Self {
        let vs: Vec<Vec<F>> = mats
            .iter()
            .map(|m| {
                assert_eq!((m.rows, m.cols), (rows, cols));
                m.data.clone()
            })
            .collect();
        MatSpace {
            rows,
            cols,
            space: Subspace::span(rows * cols, &vs),
        }
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn subspace(&self) -> &Subspace<F> {
        &self.space
    }

    pub fn basis(&self) -> Vec<Mat<F>> {
        self.space
            .basis_vectors()
            .into_iter()
            .map(|v| Mat::from_vec(self.rows, self.cols, v))
            .collect()
    }

    pub fn contains(&self, m: &Mat<F>) -> bool {
        (m.rows, m.cols) == (self.rows, self.cols) && self.space.contains(&m.data)
    }

    pub fn sum(&self, other: &MatSpace<F>) -> MatSpace<F> {
        assert_eq!(self.shape(), other.shape());
        MatSpace {
            rows: self.rows,
            cols: self.cols,
            space: self.space.sum(&other.space),
        }
    }

    /// Σ c_i b_i for the stored basis.
    pub fn combination(&self, coeffs: &[F]) -> Mat<F> {
        assert_eq!(coeffs.len(), self.dim());
        let mut data = vec![F::zero(); self.rows * self.cols];
        for (i, &c) in coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for (d, &b) in data.iter_mut().zip(self.space.basis().row(i)) {
                *d += c * b;
            }
        }
        Mat::from_vec(self.rows, self.cols, data)
    }

    /// Every element, in the order of coefficient vectors read as base-q
    /// numbers. Intended for small spaces only.
    pub fn elements(&self) -> impl Iterator<Item = Mat<F>> + '_ {
        let d = self.dim();
        let q = F::ORDER as u64;
        let total = q
            .checked_pow(d as u32)
            .expect("space too large to enumerate");
        (0..total).map(move |mut idx| {
            let mut coeffs = vec![F::zero(); d];
            for c in coeffs.iter_mut().rev() {
                *c = F::from_bits((idx % q) as u32);
                idx /= q;
            }
            self.combination(&coeffs)
        })
    }
}

/// A homogeneous linear condition: the matrix must map to zero.
pub type LinearCondition<'a, F> = &'a dyn Fn(&Mat<F>) -> Mat<F>;

/// Common solution space of homogeneous linear conditions on rows × cols
/// matrices. Each condition is evaluated on matrix units to build its
/// coefficient matrix, so it must be linear.
pub fn solve_linear_subspace<F: FiniteField>(
    rows: usize,
    cols: usize,
    conditions: &[LinearCondition<'_, F>],
) -> Result<MatSpace<F>, LinalgError> {
    let unknowns = rows * cols;
    if unknowns == 0 {
        return Ok(MatSpace::from_matrices(rows, cols, &[]));
    }
    let mut equations: Vec<Vec<F>> = Vec::new();
    for cond in conditions {
        let images: Vec<Mat<F>> = (0..unknowns)
            .map(|u| {
                let mut m = Mat::zeros(rows, cols);
                m.data[u] = F::one();
                cond(&m)
            })
            .collect();
        let out_len = images[0].data.len();
        if images.iter().any(|m| m.data.len() != out_len) {
            return Err(LinalgError::Shape(
                "condition produced inconsistent output shapes".to_string(),
            ));
        }
        if !cond(&Mat::zeros(rows, cols)).is_zero() {
            return Err(LinalgError::Shape(
                "condition is not homogeneous".to_string(),
            ));
        }
        for eq in 0..out_len {
            equations.push(images.iter().map(|m| m.data[eq]).collect());
        }
    }
    let space = if equations.is_empty() {
        Subspace::full(unknowns)
    } else {
        Mat::from_rows(&equations, unknowns).kernel()
    };
    Ok(MatSpace { rows, cols, space })
}

/// Jordan type of a nilpotent matrix from the rank sequence of its powers.
pub fn jordan_type<F: FiniteField>(x: &Mat<F>) -> Result<Partition, LinalgError> {
    if !x.is_square() {
        return Err(LinalgError::Shape(
            "jordan_type needs a square matrix".into(),
        ));
    }
    let n = x.rows();
    let mut ranks = vec![n];
    let mut p = Mat::identity(n);
    while *ranks.last().unwrap() > 0 {
        p = &p * x;
        let r = p.rank();
        if r == *ranks.last().unwrap() {
            return Err(LinalgError::NotNilpotent);
        }
        ranks.push(r);
    }
    // number of parts ≥ i is rank(x^(i-1)) − rank(x^i)
    let counts: Vec<usize> = ranks.windows(2).map(|w| w[0] - w[1]).collect();
    Ok(Partition::from_conjugate_counts(&counts))
}

/// E^x = {y : yx = xy}.
pub fn centralizer_algebra<F: FiniteField>(x: &Mat<F>) -> MatSpace<F> {
    assert!(x.is_square());
    let n = x.rows();
    let commutator = |y: &Mat<F>| &(y * x) - &(x * y);
    solve_linear_subspace(n, n, &[&commutator]).expect("square shapes are consistent")
}

/// span{ y·v : y ∈ E }.
pub fn algebra_orbit_of_vector<F: FiniteField>(
    algebra: &MatSpace<F>,
    v: &[F],
) -> Result<Subspace<F>, LinalgError> {
    let (rows, cols) = algebra.shape();
    if cols != v.len() {
        return Err(LinalgError::Shape(format!(
            "vector of length {} against {}x{} matrices",
            v.len(),
            rows,
            cols
        )));
    }
    let images: Vec<Vec<F>> = algebra.basis().iter().map(|y| y.apply(v)).collect();
    Ok(Subspace::span(rows, &images))
}

/// Matrix of x on `top / bottom` for x-stable subspaces bottom ⊆ top,
/// together with the representatives in `top` used as the quotient basis.
pub fn subquotient_action<F: FiniteField>(
    x: &Mat<F>,
    top: &Subspace<F>,
    bottom: &Subspace<F>,
) -> Result<(Mat<F>, Vec<Vec<F>>), LinalgError> {
    if !top.contains_subspace(bottom) {
        return Err(LinalgError::NotContained);
    }
    if !top.is_stable_under(x) || !bottom.is_stable_under(x) {
        return Err(LinalgError::NotStable);
    }
    let reps = bottom.complement_within(top);
    let mut basis = bottom.basis_vectors();
    basis.extend(reps.iter().cloned());
    let d_bottom = bottom.dim();
    let d = reps.len();
    // coordinates of x·r in the basis (bottom, reps)
    let solver = Subspace {
        ambient: x.rows(),
        basis: Mat::from_rows(&basis, x.rows()),
    };
    let mut cols = Vec::with_capacity(d);
    for r in &reps {
        let image = x.apply(r);
        let coords = solve_in_basis(&solver, &image).ok_or(LinalgError::NotStable)?;
        cols.push(coords[d_bottom..].to_vec());
    }
    Ok((Mat::from_columns(&cols, d), reps))
}

/// Coefficients of `v` in the (not necessarily echelon) basis stored as rows.
fn solve_in_basis<F: FiniteField>(basis_rows: &Subspace<F>, v: &[F]) -> Option<Vec<F>> {
    let k = basis_rows.basis.rows;
    let n = basis_rows.ambient;
    let mut aug = Mat::zeros(n, k + 1);
    for j in 0..k {
        for i in 0..n {
            aug[(i, j)] = basis_rows.basis[(j, i)];
        }
    }
    for i in 0..n {
        aug[(i, k)] = v[i];
    }
    let (r, pivots) = aug.rref();
    if pivots.contains(&k) {
        return None;
    }
    let mut coords = vec![F::zero(); k];
    for (row, &pc) in pivots.iter().enumerate() {
        coords[pc] = r[(row, k)];
    }
    Some(coords)
}

/// x restricted to W (in W's basis) and acting on V/W (in the basis of
/// standard vectors completing W, lowest index first).
pub fn restrict_and_quotient<F: FiniteField>(
    x: &Mat<F>,
    w: &Subspace<F>,
) -> Result<(Mat<F>, Mat<F>), LinalgError> {
    if !x.is_square() || x.rows() != w.ambient_dim() {
        return Err(LinalgError::Shape("matrix and subspace disagree".into()));
    }
    if !w.is_stable_under(x) {
        return Err(LinalgError::NotStable);
    }
    let n = x.rows();
    let on_w = {
        let cols: Vec<Vec<F>> = w
            .basis_vectors()
            .iter()
            .map(|b| w.coordinates(&x.apply(b)).expect("W is x-stable"))
            .collect();
        Mat::from_columns(&cols, w.dim())
    };
    let reps = w.complement_units();
    let mut basis = w.basis_vectors();
    basis.extend(reps.iter().cloned());
    let holder = Subspace {
        ambient: n,
        basis: Mat::from_rows(&basis, n),
    };
    let d = reps.len();
    let cols: Vec<Vec<F>> = reps
        .iter()
        .map(|r| {
            let coords = solve_in_basis(&holder, &x.apply(r)).expect("basis spans V");
            coords[w.dim()..].to_vec()
        })
        .collect();
    Ok((on_w, Mat::from_columns(&cols, d)))
}

/// Gram matrix of a bilinear form restricted to a list of vectors.
pub fn gram_of<F: FiniteField>(gram: &Mat<F>, vectors: &[Vec<F>]) -> Mat<F> {
    let k = vectors.len();
    Mat::from_fn(k, k, |i, j| bilinear(gram, &vectors[i], &vectors[j]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf2k::Gf2k;
    use num_traits::Zero;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    type F2 = Gf2k<1>;
    type F4 = Gf2k<2>;

    fn jordan_block<F: FiniteField>(k: usize) -> Mat<F> {
        Mat::from_fn(k, k, |i, j| if j == i + 1 { F::one() } else { F::zero() })
    }

    fn block_diag<F: FiniteField>(blocks: &[Mat<F>]) -> Mat<F> {
        let n: usize = blocks.iter().map(|b| b.rows()).sum();
        let mut m = Mat::zeros(n, n);
        let mut off = 0;
        for b in blocks {
            m.set_block(off, off, b);
            off += b.rows();
        }
        m
    }

    fn random_mat<F: FiniteField>(rng: &mut impl Rng, r: usize, c: usize) -> Mat<F> {
        Mat::from_fn(r, c, |_, _| {
            F::from_bits(rng.random_range(0..F::ORDER as u32))
        })
    }

    fn random_invertible<F: FiniteField>(rng: &mut impl Rng, n: usize) -> (Mat<F>, Mat<F>) {
        loop {
            let g = random_mat::<F>(rng, n, n);
            if let Some(gi) = g.inverse() {
                return (g, gi);
            }
        }
    }

    #[test]
    fn rref_examples() {
        let (_, rank, ker) = rref_rank_kernel(&Mat::<F2>::identity(3));
        assert_eq!((rank, ker.dim()), (3, 0));
        let (_, rank, ker) = rref_rank_kernel(&Mat::<F2>::zeros(2, 3));
        assert_eq!((rank, ker.dim()), (0, 3));
        let m = Mat::<F2>::from_bits(&[[1, 1], [1, 1]]);
        let (r, rank, ker) = rref_rank_kernel(&m);
        assert_eq!(rank, 1);
        assert_eq!(r, Mat::from_bits(&[[1, 1], [0, 0]]));
        assert_eq!(ker.basis_vectors(), vec![vec![F2::ONE, F2::ONE]]);
    }

    #[test]
    fn kernel_annihilates_and_rank_nullity() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..200 {
            let r = rng.random_range(1..6);
            let c = rng.random_range(1..6);
            let m = random_mat::<F4>(&mut rng, r, c);
            let (_, rank, ker) = rref_rank_kernel(&m);
            assert_eq!(rank + ker.dim(), c);
            for v in ker.basis_vectors() {
                assert!(is_zero_vector(&m.apply(&v)));
            }
            let other = random_mat::<F4>(&mut rng, c, 3);
            assert!((&m * &other).rank() <= rank.min(other.rank()));
        }
    }

    #[test]
    fn inverse_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..50 {
            let (g, gi) = random_invertible::<F4>(&mut rng, 4);
            assert_eq!(&g * &gi, Mat::identity(4));
        }
        assert!(Mat::<F2>::from_bits(&[[1, 1], [1, 1]]).inverse().is_none());
    }

    #[test]
    fn jordan_type_examples() {
        assert_eq!(
            jordan_type(&Mat::<F2>::zeros(3, 3)).unwrap(),
            Partition::column(3)
        );
        assert_eq!(
            jordan_type(&jordan_block::<F2>(3)).unwrap(),
            Partition::row(3)
        );
        let x = block_diag(&[jordan_block::<F2>(2), jordan_block(1)]);
        assert_eq!(jordan_type(&x).unwrap(), Partition::new(vec![2, 1]));
        assert_eq!(
            jordan_type(&Mat::<F2>::identity(2)),
            Err(LinalgError::NotNilpotent)
        );
    }

    #[test]
    fn jordan_type_is_conjugation_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in 1..=6 {
            for lambda in crate::partition::partitions(n) {
                let blocks: Vec<Mat<F4>> =
                    lambda.parts().iter().map(|&k| jordan_block(k)).collect();
                let x = block_diag(&blocks);
                let (g, gi) = random_invertible::<F4>(&mut rng, n);
                assert_eq!(jordan_type(&x.conjugate(&g, &gi)).unwrap(), lambda);
            }
        }
    }

    #[test]
    fn centralizer_dimension_matches_conjugate_partition() {
        for n in 1..=6 {
            for lambda in crate::partition::partitions(n) {
                let blocks: Vec<Mat<F2>> =
                    lambda.parts().iter().map(|&k| jordan_block(k)).collect();
                let x = block_diag(&blocks);
                let e = centralizer_algebra(&x);
                let expected: usize = lambda.conjugate().parts().iter().map(|p| p * p).sum();
                assert_eq!(e.dim(), expected, "{lambda}");
                assert!(e.contains(&Mat::identity(n)));
                assert!(e.contains(&x));
                let basis = e.basis();
                if basis.len() >= 2 {
                    assert!(e.contains(&(&basis[0] * &basis[basis.len() - 1])));
                }
            }
        }
        assert_eq!(centralizer_algebra(&jordan_block::<F2>(2)).dim(), 2);
        assert_eq!(centralizer_algebra(&Mat::<F2>::zeros(3, 3)).dim(), 9);
    }

    #[test]
    fn algebra_orbit_examples() {
        let e0 = centralizer_algebra(&Mat::<F2>::zeros(3, 3));
        let v = vec![F2::ZERO, F2::ONE, F2::ZERO];
        assert_eq!(algebra_orbit_of_vector(&e0, &v).unwrap().dim(), 3);
        let x = jordan_block::<F2>(3);
        let cyclic = vec![F2::ZERO, F2::ZERO, F2::ONE];
        let w = algebra_orbit_of_vector(&centralizer_algebra(&x), &cyclic).unwrap();
        let krylov = Subspace::span(
            3,
            &[cyclic.clone(), x.apply(&cyclic), x.apply(&x.apply(&cyclic))],
        );
        assert_eq!(w, krylov);
        assert_eq!(w.dim(), 3);
        assert_eq!(
            algebra_orbit_of_vector(&e0, &[F2::ZERO; 3]).unwrap().dim(),
            0
        );
        assert!(algebra_orbit_of_vector(&e0, &[F2::ZERO; 2]).is_err());
    }

    #[test]
    fn restrict_and_quotient_examples() {
        let x = jordan_block::<F2>(3);
        let im_x = Subspace::full(3).image_under(&x);
        assert_eq!(im_x.dim(), 2);
        let (on_w, on_q) = restrict_and_quotient(&x, &im_x).unwrap();
        assert_eq!(jordan_type(&on_w).unwrap(), Partition::row(2));
        assert_eq!(jordan_type(&on_q).unwrap(), Partition::row(1));

        let zero = Mat::<F2>::zeros(3, 3);
        let w = Subspace::span(3, &[unit_vector(3, 1)]);
        let (a, b) = restrict_and_quotient(&zero, &w).unwrap();
        assert!(a.is_zero() && b.is_zero());

        let not_stable = Subspace::span(3, &[unit_vector(3, 2)]);
        assert_eq!(
            restrict_and_quotient(&x, &not_stable),
            Err(LinalgError::NotStable)
        );
    }

    /// For W = E^x·v the Jordan type of x is the coordinatewise sum of the
    /// types on W and on V/W (exhaustive over GF(2), dim ≤ 3). The multiset
    /// union reading fails already for a single 2-block with v in its kernel.
    #[test]
    fn multiset_union_law_exhaustive() {
        for n in 1..=3usize {
            let total = 1u32 << (n * n);
            for bits in 0..total {
                let x = Mat::<F2>::from_fn(n, n, |i, j| F2::from_bits(bits >> (i * n + j) & 1));
                if !x.is_nilpotent() {
                    continue;
                }
                let e = centralizer_algebra(&x);
                let lambda = jordan_type(&x).unwrap();
                for vbits in 0..(1u32 << n) {
                    let v: Vec<F2> = (0..n).map(|i| F2::from_bits(vbits >> i & 1)).collect();
                    let w = algebra_orbit_of_vector(&e, &v).unwrap();
                    let (on_w, on_q) = restrict_and_quotient(&x, &w).unwrap();
                    let l1 = jordan_type(&on_w).unwrap();
                    let l2 = jordan_type(&on_q).unwrap();
                    assert_eq!(
                        l1.add_parts(&l2),
                        lambda,
                        "x={:?} v={:?}",
                        x.to_bits(),
                        vbits
                    );
                }
            }
        }
    }

    #[test]
    fn multiset_union_reading_fails() {
        let x = jordan_block::<F2>(2);
        let v = unit_vector(2, 0);
        let w = algebra_orbit_of_vector(&centralizer_algebra(&x), &v).unwrap();
        let (on_w, on_q) = restrict_and_quotient(&x, &w).unwrap();
        let (l1, l2) = (jordan_type(&on_w).unwrap(), jordan_type(&on_q).unwrap());
        assert_eq!(
            (l1.clone(), l2.clone()),
            (Partition::row(1), Partition::row(1))
        );
        assert_ne!(l1.union(&l2), Partition::row(2));
        assert_eq!(l1.add_parts(&l2), Partition::row(2));
    }

    #[test]
    fn solve_shape_errors() {
        let bad = |m: &Mat<F2>| {
            if m[(0, 0)].is_zero() {
                Mat::zeros(1, 1)
            } else {
                Mat::zeros(2, 2)
            }
        };
        assert!(solve_linear_subspace(2, 2, &[&bad]).is_err());
    }

    #[test]
    fn subspace_operations() {
        let a = Subspace::<F2>::span(3, &[unit_vector(3, 0), unit_vector(3, 1)]);
        let b = Subspace::<F2>::span(3, &[unit_vector(3, 1), unit_vector(3, 2)]);
        assert_eq!(a.intersection(&b), Subspace::span(3, &[unit_vector(3, 1)]));
        assert_eq!(a.sum(&b).dim(), 3);
        assert_eq!(a.complement_units(), vec![unit_vector(3, 2)]);
        let m = Mat::<F2>::from_bits(&[[1, 0, 1], [0, 1, 1]]);
        let (r, _) = m.rref();
        assert_eq!(r, m);
    }

    #[test]
    fn pack_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..20 {
            let m = random_mat::<F4>(&mut rng, 4, 4);
            assert_eq!(Mat::unpack(m.pack().unwrap(), 4, 4), m);
        }
    }
}
