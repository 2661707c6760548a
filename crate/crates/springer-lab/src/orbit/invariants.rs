//! Conjugacy invariants: the (λ, ε) fingerprint of a symplectic nilpotent,
//! the bipartition of a nilpotent pair, and the stratum label of a triple.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::gf2k::FiniteField;
use crate::linalg::{
    algebra_orbit_of_vector, bilinear, centralizer_algebra, gram_of, jordan_type,
    restrict_and_quotient, subquotient_action, LinalgError, Mat, MatSpace, Subspace,
};
use crate::partition::Partition;
use crate::theta::{membership, FormContext, Membership, Parity};

use super::{render, OrbitError};

/// Jordan type λ, the bits ε[m] = [∃ v ∈ ker x^m : ⟨x^(m−1) v, v⟩ ≠ 0] and
/// the index χ(m) = min{k : ⟨x^(2k+1) v, v⟩ = 0 on ker x^m}, for
/// m = 1..λ_1 (stored at index m − 1).
///
/// χ refines ε (ε[m] = 1 iff m is even and χ(m) = m/2); the bits alone
/// merge the two orbits of type (3,3) in sp_6.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct OrbitFingerprint {
    pub lambda: Partition,
    pub eps: Vec<u8>,
    pub chi: Vec<u8>,
}

impl OrbitFingerprint {
    /// The fingerprint of the zero space.
    pub fn empty() -> Self {
        OrbitFingerprint {
            lambda: Partition::empty(),
            eps: Vec::new(),
            chi: Vec::new(),
        }
    }

    /// Half the dimension of the symplectic space.
    pub fn rank(&self) -> usize {
        self.lambda.size() / 2
    }

    /// Compact text form `λ:ε;χ` such as `(2):01;01`.
    pub fn key(&self) -> String {
        let digits = |v: &[u8]| -> String { v.iter().map(|b| char::from(b'0' + b)).collect() };
        format!(
            "{}:{};{}",
            self.lambda,
            digits(&self.eps),
            digits(&self.chi)
        )
    }
}

impl fmt::Display for OrbitFingerprint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.key())
    }
}

/// Fingerprint of a nilpotent x that is self-adjoint for the form `gram`.
///
/// v ↦ ⟨x^(m−1) v, v⟩ is additive in characteristic 2 for self-adjoint x and
/// scales by c², so it vanishes on ker x^m iff it vanishes on a basis.
pub fn fingerprint_with_gram<F: FiniteField>(
    x: &Mat<F>,
    gram: &Mat<F>,
) -> Result<OrbitFingerprint, OrbitError> {
    let lambda = jordan_type(x).map_err(|e| match e {
        LinalgError::NotNilpotent => OrbitError::NotNilpotent,
        other => other.into(),
    })?;
    let top = lambda.largest();
    // powers[i] = x^i
    let mut powers = vec![Mat::identity(x.rows())];
    for i in 0..top {
        let next = &powers[i] * x;
        powers.push(next);
    }
    let vanishes = |j: usize, basis: &[Vec<F>]| {
        basis
            .iter()
            .all(|v| bilinear(gram, &powers[j].apply(v), v).is_zero())
    };
    let mut eps = Vec::with_capacity(top);
    let mut chi = Vec::with_capacity(top);
    for (m, power) in powers.iter().enumerate().take(top + 1).skip(1) {
        let kernel = power.kernel().basis_vectors();
        eps.push(!vanishes(m - 1, &kernel) as u8);
        let k = (0..)
            .find(|&k| 2 * k + 1 >= m || vanishes(2 * k + 1, &kernel))
            .expect("terminates");
        chi.push(k as u8);
    }
    Ok(OrbitFingerprint { lambda, eps, chi })
}

pub fn sp_nilpotent_fingerprint<F: FiniteField>(
    x: &Mat<F>,
    ctx: &FormContext,
) -> Result<OrbitFingerprint, OrbitError> {
    if ctx.parity() != Parity::Even || !membership(x, ctx, Membership::SpLie)? {
        return Err(OrbitError::NotInSp);
    }
    fingerprint_with_gram(x, &ctx.gram())
}

/// (λ^(1), λ^(2)) with λ^(1) the type of x on W = E^x v and λ^(2) the type
/// on V/W.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PairLabel {
    pub first: Partition,
    pub second: Partition,
}

impl fmt::Display for PairLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.first, self.second)
    }
}

pub fn ah_pair_label<F: FiniteField>(x: &Mat<F>, v: &[F]) -> Result<PairLabel, OrbitError> {
    ah_pair_label_in(&centralizer_algebra(x), x, v)
}

/// Same as [`ah_pair_label`] with a precomputed centralizer algebra E^x.
pub(crate) fn ah_pair_label_in<F: FiniteField>(
    centralizer: &MatSpace<F>,
    x: &Mat<F>,
    v: &[F],
) -> Result<PairLabel, OrbitError> {
    if !x.is_nilpotent() {
        return Err(OrbitError::NotNilpotent);
    }
    let w = algebra_orbit_of_vector(centralizer, v)?;
    let (on_w, on_quotient) = restrict_and_quotient(x, &w)?;
    Ok(PairLabel {
        first: jordan_type(&on_w)?,
        second: jordan_type(&on_quotient)?,
    })
}

/// Label of a point (x, v) of a stratum X_Λ presented with a Lagrangian M.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct StratumLabel {
    pub lambda1: Partition,
    pub sp_part: OrbitFingerprint,
    /// (λ^(2), λ^(3)) when the fingerprint has an entry in the rendering table.
    pub rendered: Option<(Partition, Partition)>,
}

impl StratumLabel {
    pub fn triple(&self) -> Option<[Partition; 3]> {
        self.rendered
            .as_ref()
            .map(|(a, b)| [self.lambda1.clone(), a.clone(), b.clone()])
    }
}

impl fmt::Display for StratumLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.rendered {
            Some((a, b)) => write!(f, "({}, {}, {})", self.lambda1, a, b),
            None => write!(f, "({}, [{}])", self.lambda1, self.sp_part),
        }
    }
}

/// λ^(1) is the type of x|_M on W = E^{x|_M} v; the symplectic part is the
/// fingerprint of x on W^⊥/W with the induced form.
pub fn stratum_label<F: FiniteField>(
    x: &Mat<F>,
    v: &[F],
    m: &Subspace<F>,
    ctx: &FormContext,
) -> Result<StratumLabel, OrbitError> {
    if ctx.parity() != Parity::Even || !membership(x, ctx, Membership::SpLie)? {
        return Err(OrbitError::NotInSp);
    }
    if !x.is_nilpotent() {
        return Err(OrbitError::NotNilpotent);
    }
    let j = ctx.gram::<F>();
    if m.dim() != ctx.n() || !m.is_isotropic(&j) {
        return Err(OrbitError::Precondition("M is not Lagrangian".into()));
    }
    if !m.is_stable_under(x) {
        return Err(OrbitError::Precondition("M is not x-stable".into()));
    }
    let v_in_m = m
        .coordinates(v)
        .ok_or_else(|| OrbitError::Precondition("v is not in M".into()))?;
    let (x_on_m, _) = restrict_and_quotient(x, m)?;
    let w_coords = algebra_orbit_of_vector(&centralizer_algebra(&x_on_m), &v_in_m)?;
    let (x_on_w, _) = restrict_and_quotient(&x_on_m, &w_coords)?;
    let lambda1 = jordan_type(&x_on_w)?;
    // back to ambient coordinates: Σ c_i m_i
    let m_basis = m.basis_vectors();
    let w_vectors: Vec<Vec<F>> = w_coords
        .basis_vectors()
        .iter()
        .map(|c| {
            let mut out = vec![F::zero(); ctx.dim()];
            for (ci, mi) in c.iter().zip(&m_basis) {
                for (o, &e) in out.iter_mut().zip(mi) {
                    *o += *ci * e;
                }
            }
            out
        })
        .collect();
    let w = Subspace::span(ctx.dim(), &w_vectors);
    let (x_bar, reps) = subquotient_action(x, &w.perp(&j), &w)?;
    let sp_part = fingerprint_with_gram(&x_bar, &gram_of(&j, &reps))?;
    let rendered = render::render(&sp_part);
    Ok(StratumLabel {
        lambda1,
        sp_part,
        rendered,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf2k::Gf2k;
    use crate::linalg::unit_vector;
    use crate::orbit::{
        conjugation_orbits, gl_generators, gl_nilpotents, pair_orbits, sp_nilpotents,
    };
    use crate::theta::{coordinate_isotropic, group_enumerate, GroupKind};
    use crate::Limits;
    use std::collections::{HashMap, HashSet};

    type F2 = Gf2k<1>;
    type F4 = Gf2k<2>;

    fn regular_sp2<F: FiniteField>() -> Mat<F> {
        // x f_1 = e_1
        let mut x = Mat::zeros(2, 2);
        x[(0, 1)] = F::one();
        x
    }

    #[test]
    fn fingerprint_examples() {
        let ctx = FormContext::symplectic(1);
        let zero = sp_nilpotent_fingerprint(&Mat::<F2>::zeros(2, 2), &ctx).unwrap();
        assert_eq!(zero.lambda, Partition::column(2));
        assert_eq!(zero.eps, vec![0]);
        let reg = sp_nilpotent_fingerprint(&regular_sp2::<F2>(), &ctx).unwrap();
        assert_eq!(reg.lambda, Partition::row(2));
        assert_eq!(reg.eps, vec![0, 1]);
        assert_eq!(reg.chi, vec![0, 1]);
        assert_eq!(reg.key(), "(2):01;01");
        let mut not_sp = Mat::<F2>::zeros(2, 2);
        not_sp[(0, 0)] = F2::ONE;
        assert_eq!(
            sp_nilpotent_fingerprint(&not_sp, &ctx),
            Err(OrbitError::NotInSp)
        );
    }

    fn check_fingerprint_completeness<F: FiniteField>(n: usize, expected_orbits: usize) {
        let nil = sp_nilpotents::<F>(n, 1 << 22).unwrap();
        let ctx = FormContext::symplectic(n);
        let group = group_enumerate::<F>(&ctx, GroupKind::Sp, &Limits::default()).unwrap();
        let orbits = conjugation_orbits(&nil, &group).unwrap();
        assert_eq!(orbits.len(), expected_orbits);
        let mut seen = HashSet::new();
        for orbit in &orbits {
            let fp = sp_nilpotent_fingerprint(&nil[orbit[0]], &ctx).unwrap();
            assert!(orbit
                .iter()
                .all(|&i| sp_nilpotent_fingerprint(&nil[i], &ctx).unwrap() == fp));
            assert!(seen.insert(fp));
        }
    }

    #[test]
    fn fingerprint_separates_sp4_orbits() {
        check_fingerprint_completeness::<F2>(1, 2);
        check_fingerprint_completeness::<F4>(1, 2);
        check_fingerprint_completeness::<F2>(2, 5);
    }

    #[test]
    fn fingerprint_splits_the_22_pair() {
        let nil = sp_nilpotents::<F2>(2, 1 << 20).unwrap();
        let ctx = FormContext::symplectic(2);
        let split: HashSet<OrbitFingerprint> = nil
            .iter()
            .map(|x| sp_nilpotent_fingerprint(x, &ctx).unwrap())
            .filter(|fp| fp.lambda == Partition::new(vec![2, 2]))
            .collect();
        assert_eq!(split.len(), 2);
    }

    #[test]
    fn pair_label_examples() {
        let v = unit_vector::<F2>(3, 0);
        let zero = ah_pair_label(&Mat::<F2>::zeros(3, 3), &v).unwrap();
        assert_eq!(zero.first, Partition::column(3));
        assert!(zero.second.is_empty());
        let mut reg = Mat::<F2>::zeros(3, 3);
        reg[(0, 1)] = F2::ONE;
        reg[(1, 2)] = F2::ONE;
        let none = ah_pair_label(&reg, &[F2::ZERO; 3]).unwrap();
        assert_eq!(
            (none.first, none.second),
            (Partition::empty(), Partition::row(3))
        );
        // e_3 generates under x: e_3 ↦ e_2 ↦ e_1
        let cyclic = ah_pair_label(&reg, &unit_vector::<F2>(3, 2)).unwrap();
        assert_eq!(
            (cyclic.first, cyclic.second),
            (Partition::row(3), Partition::empty())
        );
    }

    fn check_ah_classification<F: FiniteField>(n: usize, expected: usize) {
        let xs = gl_nilpotents::<F>(n, 1 << 20).unwrap();
        let vectors: Vec<Vec<F>> = (0..F::ORDER.pow(n as u32))
            .map(|mut idx| {
                (0..n)
                    .map(|_| {
                        let c = F::from_bits((idx % F::ORDER) as u32);
                        idx /= F::ORDER;
                        c
                    })
                    .collect()
            })
            .collect();
        let mut pairs = Vec::new();
        let mut labels = Vec::new();
        for x in &xs {
            let e = centralizer_algebra(x);
            let ty = jordan_type(x).unwrap();
            for v in &vectors {
                let l = ah_pair_label_in(&e, x, v).unwrap();
                assert_eq!(l.first.add_parts(&l.second), ty);
                labels.push(l);
                pairs.push((x.clone(), v.clone()));
            }
        }
        let orbits = pair_orbits(&pairs, &gl_generators::<F>(n)).unwrap();
        let mut distinct = HashMap::new();
        for orbit in &orbits {
            let l = &labels[orbit[0]];
            assert!(orbit.iter().all(|&i| &labels[i] == l));
            assert!(distinct.insert(l.clone(), ()).is_none());
        }
        assert_eq!(orbits.len(), expected);
    }

    #[test]
    fn ah_labels_classify_small_pairs() {
        check_ah_classification::<F2>(1, 2);
        check_ah_classification::<F2>(2, 5);
        check_ah_classification::<F4>(2, 5);
        check_ah_classification::<F2>(3, 10);
    }

    #[test]
    fn stratum_label_examples() {
        let ctx = FormContext::symplectic(1);
        let m = coordinate_isotropic::<F2>(&ctx, 1).unwrap();
        let e1 = unit_vector::<F2>(2, 0);
        let a = stratum_label(&Mat::zeros(2, 2), &e1, &m, &ctx).unwrap();
        assert_eq!(a.lambda1, Partition::row(1));
        assert!(a.sp_part.lambda.is_empty());
        assert_eq!(a.to_string(), "((1), ∅, ∅)");
        let b = stratum_label(&regular_sp2::<F2>(), &[F2::ZERO; 2], &m, &ctx).unwrap();
        assert!(b.lambda1.is_empty());
        assert_eq!(b.to_string(), "(∅, (1), ∅)");
        let c = stratum_label(&Mat::<F2>::zeros(2, 2), &[F2::ZERO; 2], &m, &ctx).unwrap();
        assert_eq!(c.to_string(), "(∅, ∅, (1))");
        // v outside M
        let f1 = unit_vector::<F2>(2, 1);
        assert!(matches!(
            stratum_label(&Mat::zeros(2, 2), &f1, &m, &ctx),
            Err(OrbitError::Precondition(_))
        ));
    }

    #[test]
    fn stratum_label_is_conjugation_invariant() {
        use rand::{Rng, SeedableRng};
        use rand_chacha::ChaCha8Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let ctx = FormContext::symplectic(2);
        let m = coordinate_isotropic::<F4>(&ctx, 2).unwrap();
        let group = crate::theta::sp_generators::<F4>(2);
        let n_space =
            crate::theta::standard_subalgebra::<F4>(crate::theta::SubalgebraName::N, &ctx)
                .unwrap()
                .space;
        for _ in 0..40 {
            let coeffs: Vec<F4> = (0..n_space.dim())
                .map(|_| F4::from_bits(rng.random_range(0..4)))
                .collect();
            let x = n_space.combination(&coeffs);
            let v: Vec<F4> = (0..4)
                .map(|i| {
                    if i < 2 {
                        F4::from_bits(rng.random_range(0..4))
                    } else {
                        F4::ZERO
                    }
                })
                .collect();
            // n stabilizes the standard flag, hence M
            let label = stratum_label(&x, &v, &m, &ctx).unwrap();
            let mut g = Mat::identity(4);
            for _ in 0..10 {
                g = &g * &group[rng.random_range(0..group.len())];
            }
            let g_inv = g.inverse().unwrap();
            let moved = stratum_label(
                &x.conjugate(&g, &g_inv),
                &g.apply(&v),
                &m.image_under(&g),
                &ctx,
            )
            .unwrap();
            assert_eq!(label, moved);
            assert_eq!(label.lambda1.size() + label.sp_part.rank(), 2);
        }
    }
}
