//! Forms, the involution θ, the groups and Lie algebras it cuts out, and the
//! standard subalgebras of sp.
//!
//! Basis conventions. For N = 2n the coordinates are e_1..e_n, f_1..f_n and
//! J = [[0, 1_n], [1_n, 0]]. For N = 2n + 1 they are e_0, e_1..e_n, f_1..f_n
//! and J = diag(1, [[0, 1_n], [1_n, 0]]). In both cases ⟨v, w⟩ = ᵗv J w and
//! Q(v) = (x_0²) + Σ x_i y_i.

use std::collections::{HashSet, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gf2k::FiniteField;
use crate::linalg::{
    bilinear, scale_vector, solve_linear_subspace, unit_vector, LinalgError, Mat, MatSpace,
    Subspace,
};
use crate::Limits;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ThetaError {
    #[error("expected a {expected}x{expected} matrix, got {rows}x{cols}")]
    Shape {
        expected: usize,
        rows: usize,
        cols: usize,
    },
    #[error("matrix is singular")]
    Singular,
    #[error("matrix does not satisfy ᵗ(Jx) = Jx")]
    NotInGTheta,
    #[error("operation needs an {0} form context")]
    WrongParity(&'static str),
    #[error("matrix is not semisimple")]
    NotSemisimple,
    #[error("eigenvalues do not all lie in the base field")]
    NotSplit,
    #[error("matrix is not in sp")]
    NotInSp,
    #[error("parameter {name} = {value} out of range 0..={max}")]
    ParameterOutOfRange {
        name: &'static str,
        value: usize,
        max: usize,
    },
    #[error("{what} of size {size} exceeds the resource limit {limit}")]
    ResourceLimit {
        what: &'static str,
        size: u128,
        limit: u128,
    },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

/// Ambient dimension N with its form J and quadratic form Q.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FormContext {
    dim: usize,
    n: usize,
    parity: Parity,
}

impl FormContext {
    pub fn new(dim: usize) -> Self {
        assert!(dim >= 1, "ambient dimension must be positive");
        FormContext {
            dim,
            n: dim / 2,
            parity: if dim.is_multiple_of(2) {
                Parity::Even
            } else {
                Parity::Odd
            },
        }
    }

    /// N = 2n.
    pub fn symplectic(n: usize) -> Self {
        FormContext::new(2 * n)
    }

    /// N = 2n + 1.
    pub fn odd(n: usize) -> Self {
        FormContext::new(2 * n + 1)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    fn offset(&self) -> usize {
        match self.parity {
            Parity::Even => 0,
            Parity::Odd => 1,
        }
    }

    /// Coordinate of e_i, 1 ≤ i ≤ n (e_0 is coordinate 0 in odd contexts).
    pub fn e(&self, i: usize) -> usize {
        assert!(i >= 1 && i <= self.n);
        self.offset() + i - 1
    }

    /// Coordinate of f_i, 1 ≤ i ≤ n.
    pub fn f(&self, i: usize) -> usize {
        assert!(i >= 1 && i <= self.n);
        self.offset() + self.n + i - 1
    }

    pub fn basis_labels(&self) -> Vec<String> {
        let mut out = Vec::with_capacity(self.dim);
        if self.parity == Parity::Odd {
            out.push("e0".to_string());
        }
        out.extend((1..=self.n).map(|i| format!("e{i}")));
        out.extend((1..=self.n).map(|i| format!("f{i}")));
        out
    }

    pub fn gram<F: FiniteField>(&self) -> Mat<F> {
        let mut j = Mat::zeros(self.dim, self.dim);
        if self.parity == Parity::Odd {
            j[(0, 0)] = F::one();
        }
        for i in 1..=self.n {
            j[(self.e(i), self.f(i))] = F::one();
            j[(self.f(i), self.e(i))] = F::one();
        }
        j
    }

    pub fn pairing<F: FiniteField>(&self, v: &[F], w: &[F]) -> F {
        bilinear(&self.gram(), v, w)
    }

    pub fn quadratic<F: FiniteField>(&self, v: &[F]) -> F {
        let mut q = F::zero();
        if self.parity == Parity::Odd {
            q += v[0] * v[0];
        }
        for i in 1..=self.n {
            q += v[self.e(i)] * v[self.f(i)];
        }
        q
    }

    fn check_shape<F: FiniteField>(&self, m: &Mat<F>) -> Result<(), ThetaError> {
        if m.rows() != self.dim || m.cols() != self.dim {
            return Err(ThetaError::Shape {
                expected: self.dim,
                rows: m.rows(),
                cols: m.cols(),
            });
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Level {
    Group,
    Lie,
}

/// θ(g) = J⁻¹ ᵗg⁻¹ J on the group, x ↦ J ᵗx J on the Lie algebra.
pub fn theta<F: FiniteField>(
    g: &Mat<F>,
    ctx: &FormContext,
    level: Level,
) -> Result<Mat<F>, ThetaError> {
    ctx.check_shape(g)?;
    let j = ctx.gram::<F>();
    match level {
        Level::Group => {
            let inv = g.inverse().ok_or(ThetaError::Singular)?;
            Ok(&(&j * &inv.transpose()) * &j)
        }
        Level::Lie => Ok(&(&j * &g.transpose()) * &j),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Membership {
    Sp,
    O,
    GTheta,
    GIotaTheta,
    SpLie,
    GThetaLie,
}

pub fn membership<F: FiniteField>(
    g: &Mat<F>,
    ctx: &FormContext,
    which: Membership,
) -> Result<bool, ThetaError> {
    ctx.check_shape(g)?;
    let j = ctx.gram::<F>();
    let preserves_form = || &(&g.transpose() * &j) * g == j;
    Ok(match which {
        Membership::Sp => preserves_form(),
        Membership::O => {
            preserves_form()
                && (0..ctx.dim()).all(|i| {
                    let e = unit_vector::<F>(ctx.dim(), i);
                    ctx.quadratic(&g.apply(&e)) == ctx.quadratic(&e)
                })
        }
        Membership::GTheta => match g.inverse() {
            Some(_) => theta(g, ctx, Level::Group)? == *g,
            None => false,
        },
        Membership::GIotaTheta => {
            let jg = &j * g;
            g.inverse().is_some() && jg.transpose() == jg
        }
        Membership::SpLie => (&(&g.transpose() * &j) + &(&j * g)).is_zero(),
        Membership::GThetaLie => {
            let jx = &j * g;
            jx.transpose() == jx
        }
    })
}

/// Lie algebra as a matrix space: sp (even N) or g^θ (either parity).
pub fn lie_algebra<F: FiniteField>(ctx: &FormContext, which: Membership) -> MatSpace<F> {
    let j = ctx.gram::<F>();
    let n = ctx.dim();
    match which {
        Membership::SpLie => {
            let cond = |x: &Mat<F>| &(&x.transpose() * &j) + &(&j * x);
            solve_linear_subspace(n, n, &[&cond]).expect("consistent shapes")
        }
        Membership::GThetaLie => {
            let cond = |x: &Mat<F>| {
                let jx = &j * x;
                &jx.transpose() - &jx
            };
            solve_linear_subspace(n, n, &[&cond]).expect("consistent shapes")
        }
        other => panic!("{other:?} is not a Lie algebra predicate"),
    }
}

/// Blocks of an element of g^θ for odd N: the sp(V) part, the vector part
/// identified with Σ c_i e_i + Σ b_i f_i ∈ V, and the scalar corner.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GThetaParts<F> {
    pub h: Mat<F>,
    pub v: Vec<F>,
    pub z: F,
}

pub fn decompose_g_theta<F: FiniteField>(
    x: &Mat<F>,
    ctx: &FormContext,
) -> Result<GThetaParts<F>, ThetaError> {
    if ctx.parity() != Parity::Odd {
        return Err(ThetaError::WrongParity("odd"));
    }
    if !membership(x, ctx, Membership::GThetaLie)? {
        return Err(ThetaError::NotInGTheta);
    }
    let n = ctx.n();
    let h = x.submatrix(1, 1, 2 * n, 2 * n);
    // first row is (a, b, c)
    let b: Vec<F> = (1..=n).map(|i| x[(0, i)]).collect();
    let c: Vec<F> = (1..=n).map(|i| x[(0, n + i)]).collect();
    let mut v = c;
    v.extend(b);
    Ok(GThetaParts { h, v, z: x[(0, 0)] })
}

pub fn assemble_g_theta<F: FiniteField>(parts: &GThetaParts<F>, ctx: &FormContext) -> Mat<F> {
    let n = ctx.n();
    let mut x = Mat::zeros(ctx.dim(), ctx.dim());
    x[(0, 0)] = parts.z;
    x.set_block(1, 1, &parts.h);
    for i in 1..=n {
        let (c, b) = (parts.v[i - 1], parts.v[n + i - 1]);
        x[(0, i)] = b;
        x[(0, n + i)] = c;
        x[(i, 0)] = c;
        x[(n + i, 0)] = b;
    }
    x
}

/// diag(1, y) for y acting on the 2n-dimensional part of an odd context.
pub fn embed_odd<F: FiniteField>(y: &Mat<F>) -> Mat<F> {
    let mut g = Mat::identity(y.rows() + 1);
    g.set_block(1, 1, y);
    g
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SubalgebraName {
    /// Diagonal torus diag(t_1..t_n, t_1..t_n).
    T,
    /// Lie algebra of the Borel subgroup: t ⊕ n.
    B,
    /// [[a, b], [0, ᵗa]] with a strictly upper triangular and b symmetric.
    N,
    /// n with zero diagonal in b.
    Ns,
    /// Diagonal part of b.
    D,
    /// D with b_i = 0 for i > k.
    Dk(usize),
    /// t ⊕ n_s ⊕ D_k.
    Nk(usize),
    /// Odd contexts: the vector part of g^θ.
    GV,
    /// Odd contexts: the scalar corner of g^θ.
    Z,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StandardSubalgebra<F> {
    pub name: SubalgebraName,
    pub space: MatSpace<F>,
}

pub fn standard_subalgebra<F: FiniteField>(
    name: SubalgebraName,
    ctx: &FormContext,
) -> Result<StandardSubalgebra<F>, ThetaError> {
    let n = ctx.n();
    let dim = ctx.dim();
    let unit = |pairs: &[(usize, usize)]| {
        let mut m = Mat::<F>::zeros(dim, dim);
        for &(i, j) in pairs {
            m[(i, j)] = F::one();
        }
        m
    };
    let needs_even = |name| {
        if ctx.parity() != Parity::Even {
            Err(ThetaError::WrongParity(name))
        } else {
            Ok(())
        }
    };
    let check_k = |k: usize| {
        if k > n {
            Err(ThetaError::ParameterOutOfRange {
                name: "k",
                value: k,
                max: n,
            })
        } else {
            Ok(())
        }
    };
    let torus = || -> Vec<Mat<F>> {
        (1..=n)
            .map(|i| unit(&[(ctx.e(i), ctx.e(i)), (ctx.f(i), ctx.f(i))]))
            .collect()
    };
    // a strictly upper triangular: e_i ↦ ... entries (e_i, e_j) with ᵗa on the f block
    let strict_upper = || -> Vec<Mat<F>> {
        let mut out = Vec::new();
        for i in 1..=n {
            for j in i + 1..=n {
                out.push(unit(&[(ctx.e(i), ctx.e(j)), (ctx.f(j), ctx.f(i))]));
            }
        }
        out
    };
    let symmetric_offdiag = || -> Vec<Mat<F>> {
        let mut out = Vec::new();
        for i in 1..=n {
            for j in i + 1..=n {
                out.push(unit(&[(ctx.e(i), ctx.f(j)), (ctx.e(j), ctx.f(i))]));
            }
        }
        out
    };
    let diagonal_b =
        |k: usize| -> Vec<Mat<F>> { (1..=k).map(|i| unit(&[(ctx.e(i), ctx.f(i))])).collect() };

    let basis: Vec<Mat<F>> = match name {
        SubalgebraName::T => {
            needs_even("even")?;
            torus()
        }
        SubalgebraName::B => {
            needs_even("even")?;
            let mut b = torus();
            b.extend(strict_upper());
            b.extend(symmetric_offdiag());
            b.extend(diagonal_b(n));
            b
        }
        SubalgebraName::N => {
            needs_even("even")?;
            let mut b = strict_upper();
            b.extend(symmetric_offdiag());
            b.extend(diagonal_b(n));
            b
        }
        SubalgebraName::Ns => {
            needs_even("even")?;
            let mut b = strict_upper();
            b.extend(symmetric_offdiag());
            b
        }
        SubalgebraName::D => {
            needs_even("even")?;
            diagonal_b(n)
        }
        SubalgebraName::Dk(k) => {
            needs_even("even")?;
            check_k(k)?;
            diagonal_b(k)
        }
        SubalgebraName::Nk(k) => {
            needs_even("even")?;
            check_k(k)?;
            let mut b = torus();
            b.extend(strict_upper());
            b.extend(symmetric_offdiag());
            b.extend(diagonal_b(k));
            b
        }
        SubalgebraName::GV => {
            if ctx.parity() != Parity::Odd {
                return Err(ThetaError::WrongParity("odd"));
            }
            let mut b = Vec::new();
            for i in 1..=n {
                b.push(unit(&[(0, n + i), (i, 0)]));
                b.push(unit(&[(0, i), (n + i, 0)]));
            }
            b
        }
        SubalgebraName::Z => {
            if ctx.parity() != Parity::Odd {
                return Err(ThetaError::WrongParity("odd"));
            }
            vec![unit(&[(0, 0)])]
        }
    };
    Ok(StandardSubalgebra {
        name,
        space: MatSpace::from_matrices(dim, dim, &basis),
    })
}

/// M_i = span(e_1, ..., e_i).
pub fn coordinate_isotropic<F: FiniteField>(
    ctx: &FormContext,
    i: usize,
) -> Result<Subspace<F>, ThetaError> {
    if i > ctx.n() {
        return Err(ThetaError::ParameterOutOfRange {
            name: "i",
            value: i,
            max: ctx.n(),
        });
    }
    let vs: Vec<Vec<F>> = (1..=i).map(|k| unit_vector(ctx.dim(), ctx.e(k))).collect();
    Ok(Subspace::span(ctx.dim(), &vs))
}

/// Does `x` lie in the torus t?
pub fn in_torus<F: FiniteField>(x: &Mat<F>, ctx: &FormContext) -> bool {
    let n = ctx.n();
    (0..ctx.dim()).all(|i| (0..ctx.dim()).all(|j| i == j || x[(i, j)].is_zero()))
        && (1..=n).all(|i| x[(ctx.e(i), ctx.e(i))] == x[(ctx.f(i), ctx.f(i))])
}

/// Finds g ∈ Sp with g⁻¹ x g ∈ t for a split semisimple x ∈ sp.
///
/// Eigenspaces of a self-adjoint x are pairwise orthogonal, hence each is
/// non-degenerate; a symplectic basis of each is built by greedy pairing and
/// the pairs become the columns (e'_j, f'_j) of g.
pub fn diagonalize_split_semisimple<F: FiniteField>(
    x: &Mat<F>,
    ctx: &FormContext,
) -> Result<Mat<F>, ThetaError> {
    if ctx.parity() != Parity::Even {
        return Err(ThetaError::WrongParity("even"));
    }
    ctx.check_shape(x)?;
    if !membership(x, ctx, Membership::SpLie)? {
        return Err(ThetaError::NotInSp);
    }
    if in_torus(x, ctx) {
        return Ok(Mat::identity(ctx.dim()));
    }
    let dim = ctx.dim();
    let j = ctx.gram::<F>();
    let mut eigenspaces = Vec::new();
    let mut total = 0;
    for lambda in F::elements() {
        let shifted = x - &Mat::identity(dim).scale(lambda);
        let eig = shifted.kernel();
        if eig.dim() == 0 {
            continue;
        }
        let generalized = shifted.pow(dim as u64).kernel();
        if generalized.dim() != eig.dim() {
            return Err(ThetaError::NotSemisimple);
        }
        total += eig.dim();
        eigenspaces.push(eig);
    }
    if total < dim {
        return Err(ThetaError::NotSplit);
    }
    let mut es = Vec::new();
    let mut fs = Vec::new();
    for space in eigenspaces {
        let mut current = space;
        while current.dim() > 0 {
            let vs = current.basis_vectors();
            let v = vs[0].clone();
            let w = vs
                .iter()
                .find(|w| !bilinear(&j, &v, w).is_zero())
                .ok_or(ThetaError::NotSemisimple)?;
            let c = bilinear(&j, &v, w).try_inv().expect("nonzero pairing");
            let w = scale_vector(c, w);
            let pair = Subspace::span(dim, &[v.clone(), w.clone()]);
            current = current.intersection(&pair.perp(&j));
            es.push(v);
            fs.push(w);
        }
    }
    let mut cols = es;
    cols.extend(fs);
    Ok(Mat::from_columns(&cols, dim))
}

/// Root-subgroup elements of Sp_2n for every root and every nonzero field
/// coefficient.
pub fn sp_generators<F: FiniteField>(n: usize) -> Vec<Mat<F>> {
    let ctx = FormContext::symplectic(n);
    let dim = 2 * n;
    let mut out = Vec::new();
    for t in F::nonzero_elements() {
        let elem = |pairs: &[(usize, usize)]| {
            let mut g = Mat::<F>::identity(dim);
            for &(a, b) in pairs {
                g[(a, b)] += t;
            }
            g
        };
        for i in 1..=n {
            for j in 1..=n {
                if i != j {
                    // ε_i − ε_j
                    out.push(elem(&[(ctx.e(i), ctx.e(j)), (ctx.f(j), ctx.f(i))]));
                }
            }
            for j in i..=n {
                // ±(ε_i + ε_j), including the long roots ±2ε_i
                if i == j {
                    out.push(elem(&[(ctx.e(i), ctx.f(i))]));
                    out.push(elem(&[(ctx.f(i), ctx.e(i))]));
                } else {
                    out.push(elem(&[(ctx.e(i), ctx.f(j)), (ctx.e(j), ctx.f(i))]));
                    out.push(elem(&[(ctx.f(i), ctx.e(j)), (ctx.f(j), ctx.e(i))]));
                }
            }
        }
    }
    out
}

/// |Sp_2n(q)| = q^(n²) Π_{i=1..n} (q^(2i) − 1).
pub fn sp_order(n: usize, q: u128) -> u128 {
    let mut order = q.pow((n * n) as u32);
    for i in 1..=n {
        order *= q.pow(2 * i as u32) - 1;
    }
    order
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum GroupKind {
    /// Sp(V) for N = 2n.
    Sp,
    /// G^θ: for odd N this is diag(1, Sp_2n).
    GTheta,
}

/// A fully enumerated finite group, stored by packed matrix keys.
#[derive(Clone, Debug)]
pub struct GroupTable<F> {
    pub context: FormContext,
    pub kind: GroupKind,
    keys: Vec<u128>,
    pub generators: Vec<Mat<F>>,
    pub claimed_order: u128,
}

impl<F: FiniteField> GroupTable<F> {
    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    pub fn element(&self, i: usize) -> Mat<F> {
        Mat::unpack(self.keys[i], self.context.dim(), self.context.dim())
    }

    pub fn elements(&self) -> impl Iterator<Item = Mat<F>> + '_ {
        (0..self.keys.len()).map(|i| self.element(i))
    }

    pub fn contains(&self, g: &Mat<F>) -> bool {
        g.pack()
            .is_some_and(|k| self.keys.binary_search(&k).is_ok())
    }

    /// Inverse of a group element, using g⁻¹ = J ᵗg J for form-preserving g.
    pub fn inverse(&self, g: &Mat<F>) -> Mat<F> {
        let j = self.context.gram::<F>();
        &(&j * &g.transpose()) * &j
    }
}

pub fn group_order(ctx: &FormContext, kind: GroupKind, q: u128) -> Result<u128, ThetaError> {
    match (kind, ctx.parity()) {
        (GroupKind::Sp, Parity::Even) | (GroupKind::GTheta, Parity::Even) => {
            Ok(sp_order(ctx.n(), q))
        }
        (GroupKind::GTheta, Parity::Odd) => Ok(sp_order(ctx.n(), q)),
        (GroupKind::Sp, Parity::Odd) => Err(ThetaError::WrongParity("even")),
    }
}

/// Enumerates Sp or G^θ, by a predicate scan over all matrices when that is
/// tiny and otherwise by closure from root-subgroup generators.
pub fn group_enumerate<F: FiniteField>(
    ctx: &FormContext,
    kind: GroupKind,
    limits: &Limits,
) -> Result<GroupTable<F>, ThetaError> {
    let q = F::ORDER as u128;
    let claimed = group_order(ctx, kind, q)?;
    if !limits.unsafe_limits && claimed > limits.max_group_order {
        return Err(ThetaError::ResourceLimit {
            what: "group order",
            size: claimed,
            limit: limits.max_group_order,
        });
    }
    let dim = ctx.dim();
    if dim * dim * F::DEGREE as usize > 128 {
        return Err(ThetaError::ResourceLimit {
            what: "packed matrix width in bits",
            size: (dim * dim * F::DEGREE as usize) as u128,
            limit: 128,
        });
    }
    let base: Vec<Mat<F>> = sp_generators(ctx.n());
    let generators: Vec<Mat<F>> = match ctx.parity() {
        Parity::Even => base,
        Parity::Odd => base.iter().map(embed_odd).collect(),
    };
    let scan_bits = dim * dim * F::DEGREE as usize;
    let mut keys: Vec<u128> = if scan_bits <= 20 {
        let which = match kind {
            GroupKind::Sp => Membership::Sp,
            GroupKind::GTheta => Membership::GTheta,
        };
        (0..1u128 << scan_bits)
            .map(|k| Mat::<F>::unpack(k, dim, dim))
            .filter(|g| g.inverse().is_some() && membership(g, ctx, which).unwrap_or(false))
            .map(|g| g.pack().expect("fits"))
            .collect()
    } else {
        closure(&generators, dim)
    };
    keys.sort_unstable();
    Ok(GroupTable {
        context: *ctx,
        kind,
        keys,
        generators,
        claimed_order: claimed,
    })
}

fn closure<F: FiniteField>(generators: &[Mat<F>], dim: usize) -> Vec<u128> {
    let id = Mat::<F>::identity(dim);
    let mut seen: HashSet<u128> = HashSet::new();
    seen.insert(id.pack().expect("fits"));
    let mut queue = VecDeque::from([id]);
    while let Some(g) = queue.pop_front() {
        for s in generators {
            let h = &g * s;
            if seen.insert(h.pack().expect("fits")) {
                queue.push_back(h);
            }
        }
    }
    seen.into_iter().collect()
}

/// Upper block-triangular shape [[b, c], [0, d]] with b upper triangular.
pub fn has_borel_shape<F: FiniteField>(g: &Mat<F>, ctx: &FormContext) -> bool {
    let n = ctx.n();
    (1..=n).all(|i| (1..=n).all(|j| g[(ctx.f(i), ctx.e(j))].is_zero()))
        && (1..=n).all(|i| (1..i).all(|j| g[(ctx.e(i), ctx.e(j))].is_zero()))
}

/// Sp element diag(a, ᵗa⁻¹) · [[1, s], [0, 1]] with a upper triangular
/// invertible and s symmetric; every element of B(F_q) has this form.
pub fn borel_element<F: FiniteField>(a: &Mat<F>, s: &Mat<F>) -> Option<Mat<F>> {
    let n = a.rows();
    let a_inv_t = a.inverse()?.transpose();
    let mut levi = Mat::zeros(2 * n, 2 * n);
    levi.set_block(0, 0, a);
    levi.set_block(n, n, &a_inv_t);
    let mut unip = Mat::identity(2 * n);
    unip.set_block(0, n, s);
    Some(&levi * &unip)
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
    type F16 = Gf2k<4>;

    fn random_sp<F: FiniteField>(rng: &mut impl Rng, n: usize, steps: usize) -> Mat<F> {
        let gens = sp_generators::<F>(n);
        let mut g = Mat::identity(2 * n);
        for _ in 0..steps {
            g = &g * &gens[rng.random_range(0..gens.len())];
        }
        g
    }

    #[test]
    fn gram_is_symmetric_involution() {
        for dim in 1..=9 {
            let ctx = FormContext::new(dim);
            let j = ctx.gram::<F4>();
            assert_eq!(j.transpose(), j);
            assert_eq!(&j * &j, Mat::identity(dim));
        }
        let ctx = FormContext::symplectic(3);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for _ in 0..50 {
            let v: Vec<F4> = (0..6)
                .map(|_| F4::from_bits(rng.random_range(0..4)))
                .collect();
            let w: Vec<F4> = (0..6)
                .map(|_| F4::from_bits(rng.random_range(0..4)))
                .collect();
            assert!(ctx.pairing(&v, &v).is_zero());
            // polarization
            let vw: Vec<F4> = v.iter().zip(&w).map(|(a, b)| *a + *b).collect();
            assert_eq!(
                ctx.quadratic(&vw) - ctx.quadratic(&v) - ctx.quadratic(&w),
                ctx.pairing(&v, &w)
            );
        }
    }

    #[test]
    fn theta_examples() {
        let ctx = FormContext::symplectic(1);
        assert_eq!(
            theta(&Mat::<F4>::identity(2), &ctx, Level::Group).unwrap(),
            Mat::identity(2)
        );
        let t = F4::from_bits(2);
        let g = Mat::from_vec(2, 2, vec![t, F4::ZERO, F4::ZERO, t.try_inv().unwrap()]);
        assert_eq!(theta(&g, &ctx, Level::Group).unwrap(), g);
        let singular = Mat::<F4>::zeros(2, 2);
        assert_eq!(
            theta(&singular, &ctx, Level::Group),
            Err(ThetaError::Singular)
        );
        let gt = lie_algebra::<F4>(&FormContext::new(4), Membership::GThetaLie);
        for x in gt.basis() {
            assert_eq!(theta(&x, &FormContext::new(4), Level::Lie).unwrap(), x);
        }
    }

    #[test]
    fn theta_is_an_involution() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for dim in 1..=6 {
            let ctx = FormContext::new(dim);
            for _ in 0..20 {
                let g =
                    Mat::<F16>::from_fn(dim, dim, |_, _| F16::from_bits(rng.random_range(0..16)));
                assert_eq!(
                    theta(&theta(&g, &ctx, Level::Lie).unwrap(), &ctx, Level::Lie).unwrap(),
                    g
                );
                if g.inverse().is_some() {
                    let once = theta(&g, &ctx, Level::Group).unwrap();
                    assert_eq!(theta(&once, &ctx, Level::Group).unwrap(), g);
                }
            }
        }
    }

    #[test]
    fn membership_examples() {
        let ctx = FormContext::symplectic(2);
        let id = Mat::<F2>::identity(4);
        for which in [
            Membership::Sp,
            Membership::O,
            Membership::GTheta,
            Membership::GIotaTheta,
        ] {
            assert!(membership(&id, &ctx, which).unwrap());
        }
        // swap e_1 and f_1
        let mut swap = Mat::<F2>::identity(4);
        let (e1, f1) = (ctx.e(1), ctx.f(1));
        swap[(e1, e1)] = F2::ZERO;
        swap[(f1, f1)] = F2::ZERO;
        swap[(e1, f1)] = F2::ONE;
        swap[(f1, e1)] = F2::ONE;
        assert!(membership(&swap, &ctx, Membership::Sp).unwrap());
        assert!(membership(&Mat::<F2>::identity(3), &ctx, Membership::Sp).is_err());
    }

    #[test]
    fn orthogonal_is_inside_symplectic_exhaustive() {
        let ctx = FormContext::symplectic(2);
        let mut o_count = 0;
        for key in 0..1u128 << 16 {
            let g = Mat::<F2>::unpack(key, 4, 4);
            if g.inverse().is_none() {
                continue;
            }
            if membership(&g, &ctx, Membership::O).unwrap() {
                o_count += 1;
                assert!(membership(&g, &ctx, Membership::Sp).unwrap());
            }
        }
        // O^+_4(2) has order 72
        assert_eq!(o_count, 72);
    }

    #[test]
    fn lie_algebra_dimensions_and_equality() {
        for n in 1..=6 {
            let even = FormContext::symplectic(n);
            let sp = lie_algebra::<F2>(&even, Membership::SpLie);
            let gt = lie_algebra::<F2>(&even, Membership::GThetaLie);
            assert_eq!(sp.dim(), n * (2 * n + 1));
            assert_eq!(sp, gt);
            let odd = FormContext::odd(n);
            assert_eq!(
                lie_algebra::<F2>(&odd, Membership::GThetaLie).dim(),
                (n + 1) * (2 * n + 1)
            );
        }
    }

    #[test]
    fn decomposition_round_trip_and_equivariance() {
        let ctx = FormContext::odd(2);
        let gt = lie_algebra::<F4>(&ctx, Membership::GThetaLie);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let zero = decompose_g_theta(&Mat::<F4>::zeros(5, 5), &ctx).unwrap();
        assert!(zero.h.is_zero() && zero.v.iter().all(|e| e.is_zero()) && zero.z.is_zero());
        for _ in 0..50 {
            let coeffs: Vec<F4> = (0..gt.dim())
                .map(|_| F4::from_bits(rng.random_range(0..4)))
                .collect();
            let x = gt.combination(&coeffs);
            let parts = decompose_g_theta(&x, &ctx).unwrap();
            assert!(membership(&parts.h, &FormContext::symplectic(2), Membership::SpLie).unwrap());
            assert_eq!(assemble_g_theta(&parts, &ctx), x);
            let y = random_sp::<F4>(&mut rng, 2, 12);
            let g = embed_odd(&y);
            let g_inv = g.inverse().unwrap();
            let moved = decompose_g_theta(&x.conjugate(&g, &g_inv), &ctx).unwrap();
            assert_eq!(moved.v, y.apply(&parts.v));
            assert_eq!(moved.h, parts.h.conjugate(&y, &y.inverse().unwrap()));
            assert_eq!(moved.z, parts.z);
        }
        let h = lie_algebra::<F4>(&FormContext::symplectic(2), Membership::SpLie);
        for y in h.basis() {
            // embed_odd puts a 1 in the corner; the Lie embedding has 0 there
            let mut x = embed_odd(&y);
            x[(0, 0)] = F4::ZERO;
            let parts = decompose_g_theta(&x, &ctx).unwrap();
            assert_eq!(parts.h, y);
            assert!(parts.v.iter().all(|e| e.is_zero()) && parts.z.is_zero());
        }
        assert_eq!(
            decompose_g_theta(&Mat::<F4>::identity(4), &FormContext::new(4)),
            Err(ThetaError::WrongParity("odd"))
        );
    }

    #[test]
    fn subalgebra_dimensions() {
        for n in 1..=4 {
            let ctx = FormContext::symplectic(n);
            let dim = |name| standard_subalgebra::<F2>(name, &ctx).unwrap().space.dim();
            assert_eq!(dim(SubalgebraName::T), n);
            assert_eq!(dim(SubalgebraName::D), n);
            assert_eq!(dim(SubalgebraName::N), n * n);
            assert_eq!(dim(SubalgebraName::Ns), n * n - n);
            assert_eq!(dim(SubalgebraName::B), n * n + n);
            for k in 0..=n {
                assert_eq!(dim(SubalgebraName::Dk(k)), k);
                assert_eq!(dim(SubalgebraName::Nk(k)), n * n + k);
            }
            let sp = lie_algebra::<F2>(&ctx, Membership::SpLie);
            for name in [SubalgebraName::B, SubalgebraName::N] {
                for x in standard_subalgebra::<F2>(name, &ctx).unwrap().space.basis() {
                    assert!(sp.contains(&x));
                }
            }
            // n = n_s ⊕ D
            let ns = standard_subalgebra::<F2>(SubalgebraName::Ns, &ctx)
                .unwrap()
                .space;
            let d = standard_subalgebra::<F2>(SubalgebraName::D, &ctx)
                .unwrap()
                .space;
            assert_eq!(
                ns.sum(&d),
                standard_subalgebra::<F2>(SubalgebraName::N, &ctx)
                    .unwrap()
                    .space
            );
            // [t, D] = 0
            for t in standard_subalgebra::<F2>(SubalgebraName::T, &ctx)
                .unwrap()
                .space
                .basis()
            {
                for x in d.basis() {
                    assert_eq!(&t * &x, &x * &t);
                }
            }
        }
        let ctx2 = FormContext::symplectic(2);
        let d = standard_subalgebra::<F2>(SubalgebraName::D, &ctx2)
            .unwrap()
            .space;
        let mut units = Vec::new();
        for (i, j) in [(0, 2), (1, 3)] {
            let mut m = Mat::<F2>::zeros(4, 4);
            m[(i, j)] = F2::ONE;
            units.push(m);
        }
        assert_eq!(d, MatSpace::from_matrices(4, 4, &units));
        assert!(standard_subalgebra::<F2>(SubalgebraName::Dk(3), &ctx2).is_err());
        let odd = FormContext::odd(2);
        assert_eq!(
            standard_subalgebra::<F2>(SubalgebraName::GV, &odd)
                .unwrap()
                .space
                .dim(),
            4
        );
        assert_eq!(
            standard_subalgebra::<F2>(SubalgebraName::Z, &odd)
                .unwrap()
                .space
                .dim(),
            1
        );
        assert_eq!(coordinate_isotropic::<F2>(&ctx2, 2).unwrap().dim(), 2);
        assert!(coordinate_isotropic::<F2>(&ctx2, 2)
            .unwrap()
            .is_isotropic(&ctx2.gram()));
    }

    #[test]
    fn diagonalize_round_trips() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let ctx1 = FormContext::symplectic(1);
        let t = Mat::<F4>::identity(2).scale(F4::from_bits(3));
        assert_eq!(
            diagonalize_split_semisimple(&t, &ctx1).unwrap(),
            Mat::identity(2)
        );
        for n in [1usize, 2, 3] {
            let ctx = FormContext::symplectic(n);
            for _ in 0..30 {
                let diag: Vec<F4> = (0..n)
                    .map(|_| F4::from_bits(rng.random_range(0..4)))
                    .collect();
                let mut s = Mat::<F4>::zeros(2 * n, 2 * n);
                for i in 1..=n {
                    s[(ctx.e(i), ctx.e(i))] = diag[i - 1];
                    s[(ctx.f(i), ctx.f(i))] = diag[i - 1];
                }
                let y = random_sp::<F4>(&mut rng, n, 20);
                let x = s.conjugate(&y, &y.inverse().unwrap());
                let g = diagonalize_split_semisimple(&x, &ctx).unwrap();
                assert!(membership(&g, &ctx, Membership::Sp).unwrap());
                let back = x.conjugate(&g.inverse().unwrap(), &g);
                assert!(in_torus(&back, &ctx));
                let mut got: Vec<F4> = (1..=n).map(|i| back[(ctx.e(i), ctx.e(i))]).collect();
                let mut want = diag.clone();
                got.sort();
                want.sort();
                assert_eq!(got, want);
            }
        }
        // a nonzero nilpotent is not semisimple
        let mut x = Mat::<F4>::zeros(2, 2);
        x[(0, 1)] = F4::ONE;
        assert_eq!(
            diagonalize_split_semisimple(&x, &ctx1),
            Err(ThetaError::NotSemisimple)
        );
    }

    #[test]
    fn generators_are_symplectic() {
        for n in 1..=3 {
            let ctx = FormContext::symplectic(n);
            for g in sp_generators::<F4>(n) {
                assert!(membership(&g, &ctx, Membership::Sp).unwrap());
            }
        }
    }

    #[test]
    fn small_groups() {
        let limits = Limits::default();
        let sp2 =
            group_enumerate::<F2>(&FormContext::symplectic(1), GroupKind::Sp, &limits).unwrap();
        assert_eq!(sp2.len(), 6);
        let sp4 =
            group_enumerate::<F2>(&FormContext::symplectic(2), GroupKind::Sp, &limits).unwrap();
        assert_eq!(sp4.len(), 720);
        assert_eq!(sp4.claimed_order, 720);
        let sp2_16 =
            group_enumerate::<F16>(&FormContext::symplectic(1), GroupKind::Sp, &limits).unwrap();
        assert_eq!(sp2_16.len() as u128, sp_order(1, 16));
        let gt = group_enumerate::<F2>(&FormContext::odd(1), GroupKind::GTheta, &limits).unwrap();
        assert_eq!(gt.len(), 6);
        for g in gt.elements() {
            assert_eq!(g[(0, 0)], F2::ONE);
            assert!((1..3).all(|i| g[(0, i)].is_zero() && g[(i, 0)].is_zero()));
        }
        let gt4 = group_enumerate::<F4>(&FormContext::odd(1), GroupKind::GTheta, &limits).unwrap();
        assert_eq!(gt4.len() as u128, sp_order(1, 4));
        for g in gt4.elements() {
            assert!(gt4.contains(&gt4.inverse(&g)));
            assert_eq!(&g * &gt4.inverse(&g), Mat::identity(3));
        }
        let tight = Limits {
            max_group_order: 100,
            ..Limits::default()
        };
        assert!(group_enumerate::<F2>(&FormContext::symplectic(2), GroupKind::Sp, &tight).is_err());
    }

    #[test]
    fn closure_matches_predicate_scan_on_sp2_f4() {
        let ctx = FormContext::symplectic(1);
        let mut by_closure = closure(&sp_generators::<F4>(1), 2);
        by_closure.sort_unstable();
        let scanned = group_enumerate::<F4>(&ctx, GroupKind::Sp, &Limits::default()).unwrap();
        assert_eq!(by_closure.len(), scanned.len());
        assert!(by_closure
            .iter()
            .all(|k| scanned.contains(&Mat::unpack(*k, 2, 2))));
    }

    #[test]
    fn borel_elements() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let ctx = FormContext::symplectic(3);
        for _ in 0..50 {
            let a = Mat::<F4>::from_fn(3, 3, |i, j| match i.cmp(&j) {
                std::cmp::Ordering::Greater => F4::ZERO,
                std::cmp::Ordering::Equal => F4::from_bits(rng.random_range(1..4)),
                std::cmp::Ordering::Less => F4::from_bits(rng.random_range(0..4)),
            });
            let mut s = Mat::<F4>::zeros(3, 3);
            for i in 0..3 {
                for j in i..3 {
                    let v = F4::from_bits(rng.random_range(0..4));
                    s[(i, j)] = v;
                    s[(j, i)] = v;
                }
            }
            let g = borel_element(&a, &s).unwrap();
            assert!(membership(&g, &ctx, Membership::Sp).unwrap());
            assert!(has_borel_shape(&g, &ctx));
        }
    }
}
