//! Points of the strata X_Λ of the exotic nilcone, built from the parabolic
//! P = Stab(M_{m1}) with Levi GL(M_{m1}) × Sp(M_{m1}^⊥/M_{m1}).
//!
//! A point of M_Λ is (x1 + x2 + y, v): x1 ∈ gl(M_{m1}) nilpotent of type
//! λ^(1) with v cyclic for E^{x1}, x2 in the symplectic orbit labelled
//! (λ^(2), λ^(3)) on the middle block, and y in the nilradical n_P.

use std::collections::{BTreeMap, HashSet};

use rand::seq::IndexedRandom;
use rand::Rng;

use crate::combinatorics::{dim_gl_orbit, dim_unipotent_radical};
use crate::gf2k::FiniteField;
use crate::linalg::{gram_of, Mat, MatSpace, Subspace};
use crate::partition::Partition;
use crate::theta::{coordinate_isotropic, lie_algebra, sp_generators, FormContext, Membership};
use crate::Limits;

use super::fiber::{springer_fiber_count, FiberVariant};
use super::invariants::ah_pair_label_in;
use super::render::{orbit_dim_for_label, orbit_for_label, shipped_table};
use super::{
    fingerprint_with_gram, sp_nilpotent_fingerprint, space_element, stratum_label, OrbitError,
    OrbitFingerprint,
};
use crate::linalg::{centralizer_algebra, restrict_and_quotient, subquotient_action};

/// n_P = {y ∈ sp : yV ⊆ M^⊥, yM^⊥ ⊆ M, yM = 0} for M = M_{m1}.
pub fn parabolic_nilradical<F: FiniteField>(
    ctx: &FormContext,
    m1: usize,
) -> Result<MatSpace<F>, OrbitError> {
    let dim = ctx.dim();
    let n = ctx.n();
    if m1 > n {
        return Err(OrbitError::Precondition(format!(
            "m1 = {m1} exceeds n = {n}"
        )));
    }
    let in_m = |i: usize| (1..=m1).any(|k| ctx.e(k) == i);
    let outside_perp = |i: usize| (1..=m1).any(|k| ctx.f(k) == i);
    let mut units = Vec::new();
    for row in 0..dim {
        for col in 0..dim {
            // yM = 0; image inside M^⊥; M^⊥ lands in M
            let allowed = !in_m(col) && !outside_perp(row) && (outside_perp(col) || in_m(row));
            if allowed {
                let mut u = Mat::<F>::zeros(dim, dim);
                u[(row, col)] = F::one();
                units.push(u);
            }
        }
    }
    let shape = MatSpace::from_matrices(dim, dim, &units);
    let sp = lie_algebra::<F>(ctx, Membership::SpLie);
    let meet = shape.subspace().intersection(sp.subspace());
    let basis: Vec<Mat<F>> = meet
        .basis_vectors()
        .into_iter()
        .map(|v| Mat::from_vec(dim, dim, v))
        .collect();
    Ok(MatSpace::from_matrices(dim, dim, &basis))
}

fn check_label(lambda: &[Partition; 3], ctx: &FormContext) -> Result<usize, OrbitError> {
    let total: usize = lambda.iter().map(Partition::size).sum();
    if total != ctx.n() {
        return Err(OrbitError::Precondition(format!(
            "label has weight {total}, expected {}",
            ctx.n()
        )));
    }
    Ok(lambda[0].size())
}

/// A point (x, v) with its Lagrangian M.
pub type Triple<F> = (Mat<F>, Vec<F>, Subspace<F>);

/// The Levi point (x1 + x2, v) with x1 in Jordan form, v the sum of the block
/// generators and x2 the tabulated representative; M = M_n.
fn levi_point<F: FiniteField>(
    lambda: &[Partition; 3],
    ctx: &FormContext,
) -> Result<Triple<F>, OrbitError> {
    let m1 = check_label(lambda, ctx)?;
    let dim = ctx.dim();
    let mut x = Mat::<F>::zeros(dim, dim);
    let mut v = vec![F::zero(); dim];
    let mut start = 1;
    for &size in lambda[0].parts() {
        // x e_{i+1} = e_i inside the block, ᵗ on the f side
        for i in start..start + size - 1 {
            x[(ctx.e(i), ctx.e(i + 1))] = F::one();
            x[(ctx.f(i + 1), ctx.f(i))] = F::one();
        }
        v[ctx.e(start + size - 1)] = F::one();
        start += size;
    }
    let (_, rep) = orbit_for_label(&lambda[1], &lambda[2]).ok_or_else(|| {
        OrbitError::Precondition(format!(
            "no tabulated orbit for ({}, {})",
            lambda[1], lambda[2]
        ))
    })?;
    let r = ctx.n() - m1;
    // the small context orders its basis e'_1..e'_r, f'_1..f'_r
    let to_big = |i: usize| {
        if i < r {
            ctx.e(m1 + i + 1)
        } else {
            ctx.f(m1 + i - r + 1)
        }
    };
    for a in 0..2 * r {
        for b in 0..2 * r {
            x[(to_big(a), to_big(b))] = F::from_bits(rep[(a, b)].bits());
        }
    }
    let m = coordinate_isotropic::<F>(ctx, ctx.n())?;
    Ok((x, v, m))
}

/// A point (x1 + x2 + y, v) of M_Λ whose stratum label is Λ, with M = M_n.
///
/// The Levi point itself (y = 0) can be degenerate: for Λ = ((1), (1), ∅)
/// it satisfies the defining conditions of M_Λ but x vanishes on the
/// Lagrangian, so it is labelled ((1,1), ∅, ∅). The filler y ∈ n_P is the
/// first one in base-q order for which the label comes out as Λ.
pub fn stratum_representative<F: FiniteField>(
    lambda: &[Partition; 3],
    ctx: &FormContext,
) -> Result<Triple<F>, OrbitError> {
    let m1 = check_label(lambda, ctx)?;
    let (x0, v, m) = levi_point::<F>(lambda, ctx)?;
    let nil = parabolic_nilradical::<F>(ctx, m1)?;
    let total = (F::ORDER as u64)
        .saturating_pow(nil.dim() as u32)
        .min(1 << 16);
    for idx in 0..total {
        let x = &x0 + &space_element(&nil, idx);
        if stratum_label(&x, &v, &m, ctx)?.triple().as_ref() == Some(lambda) {
            return Ok((x, v, m));
        }
    }
    Err(OrbitError::Precondition(format!(
        "no point of M_Λ with label ({}, {}, {}) found",
        lambda[0], lambda[1], lambda[2]
    )))
}

/// Number of x-stable isotropic W₁ of dimension m1 containing v such that
/// (x|W₁, v) has pair label (λ^(1), ∅) and x on W₁^⊥/W₁ has fingerprint
/// `sp_part`.
pub fn stabilizing_subspace_count<F: FiniteField>(
    x: &Mat<F>,
    v: &[F],
    m1: usize,
    lambda1: &Partition,
    sp_part: &OrbitFingerprint,
    ctx: &FormContext,
    limits: &Limits,
) -> Result<u128, OrbitError> {
    if m1 > ctx.n() || lambda1.size() != m1 {
        return Err(OrbitError::Precondition("m1 disagrees with λ^(1)".into()));
    }
    let j = ctx.gram::<F>();
    let dim = ctx.dim();
    let mut found: HashSet<Vec<Vec<u32>>> = HashSet::new();
    let mut visited = 0u128;
    let mut stack = vec![Subspace::<F>::zero(dim)];
    let mut seen: HashSet<Vec<Vec<u32>>> = HashSet::new();
    while let Some(w) = stack.pop() {
        visited += 1;
        if !limits.unsafe_limits && visited > limits.max_flags {
            return Err(OrbitError::ResourceLimit {
                what: "stable isotropic subspaces",
                size: visited,
                limit: limits.max_flags,
            });
        }
        if w.dim() == m1 {
            if w.contains(v) {
                found.insert(w.basis().to_bits());
            }
            continue;
        }
        // every x-stable W has an x-stable complete flag, so grow by lines u
        // with xu ∈ W inside W^⊥
        let perp = w.perp(&j);
        let cond_rows = {
            let mut rows = (w.basis() * &j).row_vectors();
            rows.extend((&(perp.basis() * &j) * x).row_vectors());
            rows
        };
        let k = Mat::from_rows(&cond_rows, dim).kernel();
        let reps = w.complement_within(&k);
        super::fiber::for_each_line(&reps, |u| {
            let next = w.sum(&Subspace::span(dim, &[u]));
            if seen.insert(next.basis().to_bits()) {
                stack.push(next);
            }
        });
    }
    let mut count = 0u128;
    for bits in found {
        let w = Subspace::span(dim, &Mat::<F>::from_bits(&bits).row_vectors());
        if subspace_matches(x, v, &w, lambda1, sp_part, &j)? {
            count += 1;
        }
    }
    Ok(count)
}

fn subspace_matches<F: FiniteField>(
    x: &Mat<F>,
    v: &[F],
    w: &Subspace<F>,
    lambda1: &Partition,
    sp_part: &OrbitFingerprint,
    j: &Mat<F>,
) -> Result<bool, OrbitError> {
    let (on_w, _) = restrict_and_quotient(x, w)?;
    let coords = w.coordinates(v).expect("v ∈ W");
    let label = ah_pair_label_in(&centralizer_algebra(&on_w), &on_w, &coords)?;
    if &label.first != lambda1 || !label.second.is_empty() {
        return Ok(false);
    }
    let (x_bar, reps) = subquotient_action(x, &w.perp(j), w)?;
    let fp = if reps.is_empty() {
        OrbitFingerprint::empty()
    } else {
        fingerprint_with_gram(&x_bar, &gram_of(j, &reps))?
    };
    Ok(&fp == sp_part)
}

/// A sampled point g·(x, v) of X_Λ with its Lagrangian gM_n.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StratumSample<F> {
    pub x: Mat<F>,
    pub v: Vec<F>,
    pub m: Subspace<F>,
    pub lambda: [Partition; 3],
    pub attempts: usize,
    /// Stabilizing-subspace count of the returned sample.
    pub stabilizing_count: u128,
    /// Whether x lies in the orbit induced from O_{λ^(1)} × O_2, the open
    /// orbit of (O_{λ^(1)} × O_2) + n_P; None when no orbit table covers n.
    pub induced_orbit: Option<bool>,
    /// False when the retry cap ran out before a sample carried the label Λ
    /// with x in the induced orbit.
    pub accepted: bool,
}

/// Random symplectic matrix: a product of random root elements.
pub fn random_sp_element<F: FiniteField, R: Rng + ?Sized>(
    n: usize,
    rng: &mut R,
    steps: usize,
) -> Mat<F> {
    let gens = sp_generators::<F>(n);
    let mut g = Mat::identity(2 * n);
    for _ in 0..steps {
        g = &g * gens.choose(rng).expect("generators exist");
    }
    g
}

/// dim O_{λ^(1)} + dim O_2 + 2 dim U_P: the dimension of the orbit that is
/// dense in (O_{λ^(1)} × O_2) + n_P.
pub fn induced_orbit_dim(lambda: &[Partition; 3]) -> Option<usize> {
    let m1 = lambda[0].size();
    let n = m1 + lambda[1].size() + lambda[2].size();
    let o2 = orbit_dim_for_label(&lambda[1], &lambda[2])?;
    Some(dim_gl_orbit(&lambda[0]) + o2 + 2 * dim_unipotent_radical(n, m1))
}

fn in_induced_orbit<F: FiniteField>(
    x: &Mat<F>,
    lambda: &[Partition; 3],
    ctx: &FormContext,
) -> Result<Option<bool>, OrbitError> {
    let Some(want) = induced_orbit_dim(lambda) else {
        return Ok(None);
    };
    let fp = sp_nilpotent_fingerprint(x, ctx)?;
    Ok(shipped_table().lookup(&fp).map(|e| e.orbit_dim == want))
}

/// Samples g·(x1 + x2 + y, v) with random y ∈ n_P and random g ∈ Sp, until a
/// sample lies in X^0_Λ (label Λ, x in the induced orbit) or `max_attempts`
/// is exhausted. The stabilizing-subspace count is recorded, not required.
pub fn generic_stratum_sample<F: FiniteField, R: Rng + ?Sized>(
    lambda: &[Partition; 3],
    ctx: &FormContext,
    rng: &mut R,
    max_attempts: usize,
    limits: &Limits,
) -> Result<StratumSample<F>, OrbitError> {
    let m1 = check_label(lambda, ctx)?;
    let (x0, v0, m0) = stratum_representative::<F>(lambda, ctx)?;
    let sp_part = orbit_for_label(&lambda[1], &lambda[2])
        .expect("checked by stratum_representative")
        .0;
    let nil = parabolic_nilradical::<F>(ctx, m1)?;
    let mut last = None;
    for attempt in 1..=max_attempts.max(1) {
        let coeffs: Vec<F> = (0..nil.dim())
            .map(|_| F::from_bits(rng.random_range(0..F::ORDER as u32)))
            .collect();
        let x1 = &x0 + &nil.combination(&coeffs);
        let g = random_sp_element::<F, R>(ctx.n(), rng, 8 * ctx.dim());
        let g_inv = g.inverse().expect("symplectic matrices are invertible");
        let x = x1.conjugate(&g, &g_inv);
        let v = g.apply(&v0);
        let m = m0.image_under(&g);
        let count = stabilizing_subspace_count(&x, &v, m1, &lambda[0], &sp_part, ctx, limits)?;
        let labelled = stratum_label(&x, &v, &m, ctx)?.triple().as_ref() == Some(lambda);
        let induced_orbit = in_induced_orbit(&x, lambda, ctx)?;
        let accepted = labelled && induced_orbit != Some(false);
        let sample = StratumSample {
            x,
            v,
            m,
            lambda: lambda.clone(),
            attempts: attempt,
            stabilizing_count: count,
            induced_orbit,
            accepted,
        };
        if accepted {
            return Ok(sample);
        }
        last = Some(sample);
    }
    Ok(last.expect("at least one attempt"))
}

/// Fiber counts over the points of M_Λ^0 in the slice (Levi point) + n_P.
///
/// Every point of M_Λ is L-conjugate to one in the slice, so the census sees
/// every P-orbit of M_Λ^0 (label Λ, x in the induced orbit). The generic
/// count is the most frequent one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiberCensus {
    pub q: u64,
    /// fiber count ↦ number of slice points with that count
    pub histogram: BTreeMap<u128, u64>,
    /// Slice points rejected as outside M_Λ^0.
    pub rejected: u64,
    /// Stabilizing-subspace counts seen on the accepted points.
    pub stabilizing_counts: BTreeMap<u128, u64>,
}

impl FiberCensus {
    pub fn generic_count(&self) -> Option<u128> {
        // ties resolve to the smaller count; none occur at tested sizes
        let best = self.histogram.values().copied().max()?;
        self.histogram
            .iter()
            .find(|(_, &n)| n == best)
            .map(|(&c, _)| c)
    }
}

pub fn stratum_fiber_census<F: FiniteField>(
    lambda: &[Partition; 3],
    ctx: &FormContext,
    variant: FiberVariant,
    limits: &Limits,
) -> Result<FiberCensus, OrbitError> {
    let m1 = check_label(lambda, ctx)?;
    let (x0, v, m) = stratum_representative::<F>(lambda, ctx)?;
    let sp_part = orbit_for_label(&lambda[1], &lambda[2])
        .expect("checked by stratum_representative")
        .0;
    let nil = parabolic_nilradical::<F>(ctx, m1)?;
    let total = (F::ORDER as u128)
        .checked_pow(nil.dim() as u32)
        .unwrap_or(u128::MAX);
    if !limits.unsafe_limits && total > limits.max_flags {
        return Err(OrbitError::ResourceLimit {
            what: "parabolic nilradical slice",
            size: total,
            limit: limits.max_flags,
        });
    }
    let mut census = FiberCensus {
        q: F::ORDER as u64,
        histogram: BTreeMap::new(),
        rejected: 0,
        stabilizing_counts: BTreeMap::new(),
    };
    for idx in 0..total as u64 {
        let x = &x0 + &space_element(&nil, idx);
        let open = stratum_label(&x, &v, &m, ctx)?.triple().as_ref() == Some(lambda)
            && in_induced_orbit(&x, lambda, ctx)? != Some(false);
        if !open {
            census.rejected += 1;
            continue;
        }
        let stab = stabilizing_subspace_count(&x, &v, m1, &lambda[0], &sp_part, ctx, limits)?;
        *census.stabilizing_counts.entry(stab).or_default() += 1;
        let count = springer_fiber_count(&x, &v, m1, ctx, variant, limits)?;
        *census.histogram.entry(count).or_default() += 1;
    }
    Ok(census)
}
