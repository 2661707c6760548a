//! Orbit enumeration and conjugacy over finite fields, conjugacy invariants,
//! Springer-fiber point counts and the stratification of the exotic nilcone.

mod fiber;
mod invariants;
pub mod render;
mod strata;

use std::collections::HashMap;
use std::hash::Hash;

use petgraph::unionfind::UnionFind;
use rayon::prelude::*;
use thiserror::Error;

use crate::gf2k::FiniteField;
use crate::linalg::{LinalgError, Mat, MatSpace};
use crate::theta::{embed_odd, lie_algebra, FormContext, GroupTable, Membership, ThetaError};

pub use fiber::{
    fit_minimal_degree, fit_point_polynomial, flag_count, springer_fiber_count, FiberVariant,
    FitReport, PointCountSeries,
};
pub(crate) use invariants::ah_pair_label_in;
pub use invariants::{
    ah_pair_label, fingerprint_with_gram, sp_nilpotent_fingerprint, stratum_label,
    OrbitFingerprint, PairLabel, StratumLabel,
};
pub use strata::{
    generic_stratum_sample, induced_orbit_dim, parabolic_nilradical, random_sp_element,
    stabilizing_subspace_count, stratum_fiber_census, stratum_representative, FiberCensus,
    StratumSample,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OrbitError {
    #[error("element {0} maps outside the element set")]
    Closure(usize),
    #[error("matrix is not nilpotent")]
    NotNilpotent,
    #[error("matrix is not in sp")]
    NotInSp,
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("{what} of size {size} exceeds the resource limit {limit}")]
    ResourceLimit {
        what: &'static str,
        size: u128,
        limit: u128,
    },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Theta(#[from] ThetaError),
}

/// Partition of `elements` into orbits of the group generated by
/// `generators`, via union-find over the generator action. Orbits are sorted
/// internally and ordered by their smallest index.
pub fn orbit_partition<T, G>(
    elements: &[T],
    generators: &[G],
    act: impl Fn(&G, &T) -> T + Sync,
) -> Result<Vec<Vec<usize>>, OrbitError>
where
    T: Hash + Eq + Sync,
    G: Sync,
{
    let index: HashMap<&T, usize> = elements.iter().enumerate().map(|(i, e)| (e, i)).collect();
    let edges: Vec<Result<Vec<usize>, OrbitError>> = elements
        .par_iter()
        .enumerate()
        .map(|(i, e)| {
            generators
                .iter()
                .map(|g| index.get(&act(g, e)).copied().ok_or(OrbitError::Closure(i)))
                .collect()
        })
        .collect();
    let mut uf = UnionFind::<usize>::new(elements.len());
    for (i, targets) in edges.into_iter().enumerate() {
        for j in targets? {
            uf.union(i, j);
        }
    }
    let mut by_root: HashMap<usize, Vec<usize>> = HashMap::new();
    for i in 0..elements.len() {
        by_root.entry(uf.find(i)).or_default().push(i);
    }
    let mut orbits: Vec<Vec<usize>> = by_root.into_values().collect();
    orbits.sort_by_key(|o| o[0]);
    Ok(orbits)
}

/// A generator together with its inverse, for conjugation actions.
#[derive(Clone, Debug)]
pub struct Conjugator<F> {
    pub g: Mat<F>,
    pub g_inv: Mat<F>,
}

impl<F: FiniteField> Conjugator<F> {
    pub fn new(g: Mat<F>) -> Self {
        let g_inv = g.inverse().expect("generators are invertible");
        Conjugator { g, g_inv }
    }

    pub fn conjugate(&self, x: &Mat<F>) -> Mat<F> {
        x.conjugate(&self.g, &self.g_inv)
    }

    pub fn pair(&self, (x, v): &(Mat<F>, Vec<F>)) -> (Mat<F>, Vec<F>) {
        (self.conjugate(x), self.g.apply(v))
    }
}

pub fn conjugators<F: FiniteField>(generators: &[Mat<F>]) -> Vec<Conjugator<F>> {
    generators.iter().cloned().map(Conjugator::new).collect()
}

/// Orbits of the conjugation action of a group (given by its generators).
pub fn conjugation_orbits<F: FiniteField>(
    elements: &[Mat<F>],
    group: &GroupTable<F>,
) -> Result<Vec<Vec<usize>>, OrbitError> {
    let gens = conjugators(&group.generators);
    orbit_partition(elements, &gens, |c, x| c.conjugate(x))
}

/// Orbits of the diagonal action g·(x, v) = (gxg⁻¹, gv).
pub fn pair_orbits<F: FiniteField>(
    elements: &[(Mat<F>, Vec<F>)],
    generators: &[Mat<F>],
) -> Result<Vec<Vec<usize>>, OrbitError> {
    let gens = conjugators(generators);
    orbit_partition(elements, &gens, |c, p| c.pair(p))
}

/// Elements of `space` with index `idx` in base-q coefficient order.
fn space_element<F: FiniteField>(space: &MatSpace<F>, mut idx: u64) -> Mat<F> {
    let q = F::ORDER as u64;
    let mut coeffs = vec![F::zero(); space.dim()];
    for c in coeffs.iter_mut().rev() {
        *c = F::from_bits((idx % q) as u32);
        idx /= q;
    }
    space.combination(&coeffs)
}

/// All nilpotent elements of a matrix space, by exhaustive scan.
pub fn nilpotent_elements<F: FiniteField>(
    space: &MatSpace<F>,
    limit: u128,
) -> Result<Vec<Mat<F>>, OrbitError> {
    let total = (F::ORDER as u128)
        .checked_pow(space.dim() as u32)
        .unwrap_or(u128::MAX);
    if total > limit {
        return Err(OrbitError::ResourceLimit {
            what: "matrix space",
            size: total,
            limit,
        });
    }
    Ok((0..total as u64)
        .into_par_iter()
        .map(|i| space_element(space, i))
        .filter(|m| m.is_nilpotent())
        .collect())
}

/// Every nilpotent element of sp_2n(F_q).
pub fn sp_nilpotents<F: FiniteField>(n: usize, limit: u128) -> Result<Vec<Mat<F>>, OrbitError> {
    let sp = lie_algebra::<F>(&FormContext::symplectic(n), Membership::SpLie);
    nilpotent_elements(&sp, limit)
}

/// Every nilpotent element of gl_n(F_q).
pub fn gl_nilpotents<F: FiniteField>(n: usize, limit: u128) -> Result<Vec<Mat<F>>, OrbitError> {
    let units: Vec<Mat<F>> = (0..n * n)
        .map(|u| {
            let mut m = Mat::zeros(n, n);
            m[(u / n, u % n)] = F::one();
            m
        })
        .collect();
    nilpotent_elements(&MatSpace::from_matrices(n, n, &units), limit)
}

/// Elementary transvections and diagonal scalings; they generate GL_n(F_q).
pub fn gl_generators<F: FiniteField>(n: usize) -> Vec<Mat<F>> {
    let mut out = Vec::new();
    for t in F::nonzero_elements() {
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    let mut g = Mat::identity(n);
                    g[(i, j)] = t;
                    out.push(g);
                }
            }
        }
        if t != F::one() {
            let mut d = Mat::identity(n);
            d[(0, 0)] = t;
            out.push(d);
        }
    }
    out
}

/// Finds g in the group with g x g⁻¹ = y.
pub fn conjugacy_test<F: FiniteField>(
    x: &Mat<F>,
    y: &Mat<F>,
    group: &GroupTable<F>,
) -> Option<Mat<F>> {
    if x == y {
        return Some(Mat::identity(x.rows()));
    }
    group.elements().find(|g| g * x == y * g)
}

/// The element x(ξ) of g^θ for N = 2n + 1: f_{j−1, j} = 1 in the upper-left
/// block of the sp part, g = diag(0, …, 0, 1), c = (0, …, 0, ξ).
pub fn x_xi_family<F: FiniteField>(n: usize, xi: F) -> Mat<F> {
    assert!(n >= 1);
    let ctx = FormContext::symplectic(n);
    let mut h = Mat::zeros(2 * n, 2 * n);
    for j in 2..=n {
        h[(ctx.e(j - 1), ctx.e(j))] = F::one();
        h[(ctx.f(j), ctx.f(j - 1))] = F::one();
    }
    h[(ctx.e(n), ctx.f(n))] = F::one();
    let mut x = embed_odd(&h);
    x[(0, 0)] = F::zero();
    let odd = FormContext::odd(n);
    // c sits in row 0 under f_n, ᵗc in column 0 beside e_n
    x[(0, 1 + ctx.f(n))] = xi;
    x[(1 + ctx.e(n), 0)] = xi;
    debug_assert_eq!(x.rows(), odd.dim());
    x
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf2k::Gf2k;
    use crate::linalg::{jordan_type, unit_vector};
    use crate::partition::{partitions, Partition};
    use crate::theta::{decompose_g_theta, group_enumerate, membership, GroupKind};
    use crate::Limits;
    use std::collections::HashSet;

    type F2 = Gf2k<1>;
    type F4 = Gf2k<2>;

    #[test]
    fn sp2_over_f2_orbits() {
        let nil = sp_nilpotents::<F2>(1, 1 << 20).unwrap();
        assert_eq!(nil.len(), 4);
        let group = group_enumerate::<F2>(
            &FormContext::symplectic(1),
            GroupKind::Sp,
            &Limits::default(),
        )
        .unwrap();
        let orbits = conjugation_orbits(&nil, &group).unwrap();
        let mut sizes: Vec<usize> = orbits.iter().map(|o| o.len()).collect();
        sizes.sort();
        assert_eq!(sizes, [1, 3]);
    }

    #[test]
    fn singleton_and_closure_error() {
        let zero = vec![Mat::<F2>::zeros(2, 2)];
        let group = group_enumerate::<F2>(
            &FormContext::symplectic(1),
            GroupKind::Sp,
            &Limits::default(),
        )
        .unwrap();
        assert_eq!(conjugation_orbits(&zero, &group).unwrap().len(), 1);
        let mut x = Mat::<F2>::zeros(2, 2);
        x[(0, 1)] = F2::ONE;
        assert!(matches!(
            conjugation_orbits(&[x], &group),
            Err(OrbitError::Closure(0))
        ));
    }

    #[test]
    fn sp4_over_f2_has_five_orbits() {
        let nil = sp_nilpotents::<F2>(2, 1 << 20).unwrap();
        // Steinberg: q^(2·#positive roots)
        assert_eq!(nil.len(), 1 << 8);
        let group = group_enumerate::<F2>(
            &FormContext::symplectic(2),
            GroupKind::Sp,
            &Limits::default(),
        )
        .unwrap();
        let orbits = conjugation_orbits(&nil, &group).unwrap();
        assert_eq!(orbits.len(), 5);
        let types: HashSet<Partition> = nil.iter().map(|x| jordan_type(x).unwrap()).collect();
        assert_eq!(types.len(), 4);
    }

    #[test]
    fn gl_generators_generate_small_gl() {
        // |GL_2(F_4)| = 180
        let gens = conjugators(&gl_generators::<F4>(2));
        let id = Mat::<F4>::identity(2);
        let mut seen = HashSet::from([id.clone()]);
        let mut stack = vec![id];
        while let Some(g) = stack.pop() {
            for c in &gens {
                let h = &g * &c.g;
                if seen.insert(h.clone()) {
                    stack.push(h);
                }
            }
        }
        assert_eq!(seen.len(), 180);
    }

    #[test]
    fn gl_nilpotent_orbits_are_jordan_types() {
        for n in 1..=3 {
            let nil = gl_nilpotents::<F2>(n, 1 << 20).unwrap();
            assert_eq!(nil.len(), 1 << (n * n - n));
            let orbits = orbit_partition(&nil, &conjugators(&gl_generators::<F2>(n)), |c, x| {
                c.conjugate(x)
            })
            .unwrap();
            assert_eq!(orbits.len(), partitions(n).len());
        }
    }

    #[test]
    fn x_xi_examples() {
        let ctx = FormContext::odd(1);
        let x = x_xi_family(1, F2::ONE);
        assert!(membership(&x, &ctx, Membership::GThetaLie).unwrap());
        let (e0, e1, f1) = (
            unit_vector::<F2>(3, 0),
            unit_vector::<F2>(3, 1),
            unit_vector::<F2>(3, 2),
        );
        assert_eq!(x.apply(&f1), crate::linalg::add_vectors(&e1, &e0));
        assert_eq!(x.apply(&e0), e1);
        assert!(x.apply(&e1).iter().all(|c| c.bits() == 0));
        assert!(x.pow(3).is_zero() && !x.pow(2).is_zero());
        for n in 1..=4 {
            let odd = FormContext::odd(n);
            for xi in F4::elements() {
                let x = x_xi_family(n, xi);
                assert!(membership(&x, &odd, Membership::GThetaLie).unwrap());
                let want = if xi.bits() == 0 {
                    Partition::new(vec![2 * n, 1])
                } else {
                    Partition::row(2 * n + 1)
                };
                assert_eq!(jordan_type(&x).unwrap(), want);
            }
        }
        let parts = decompose_g_theta(&x_xi_family(1, F4::from_bits(2)), &ctx).unwrap();
        assert_eq!(jordan_type(&parts.h).unwrap(), Partition::row(2));
        assert_eq!(parts.v, vec![F4::from_bits(2), F4::ZERO]);
        assert!(parts.z.bits() == 0);
    }

    #[test]
    fn x_xi_family_non_conjugate_over_f4() {
        let group =
            group_enumerate::<F4>(&FormContext::odd(1), GroupKind::GTheta, &Limits::default())
                .unwrap();
        let x1 = x_xi_family(1, F4::ONE);
        assert!(conjugacy_test(&x1, &x1, &group).is_some());
        for xi in F4::nonzero_elements().filter(|&xi| xi != F4::ONE) {
            let y = x_xi_family(1, xi);
            assert!(conjugacy_test(&x1, &y, &group).is_none());
            assert!(conjugacy_test(&y, &x1, &group).is_none());
        }
    }

    #[test]
    fn conjugacy_examples() {
        let group = group_enumerate::<F2>(
            &FormContext::symplectic(1),
            GroupKind::Sp,
            &Limits::default(),
        )
        .unwrap();
        let mut x = Mat::<F2>::zeros(2, 2);
        x[(0, 1)] = F2::ONE;
        let y = x.transpose();
        let g = conjugacy_test(&x, &y, &group).unwrap();
        assert_eq!(x.conjugate(&g, &g.inverse().unwrap()), y);
        assert_eq!(conjugacy_test(&x, &x, &group).unwrap(), Mat::identity(2));
        assert!(conjugacy_test(&x, &Mat::zeros(2, 2), &group).is_none());
    }
}
