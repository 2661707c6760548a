//! Bipartition labels for nilpotent orbits of sp_2r in characteristic 2.
//!
//! The table maps the (λ, ε) fingerprint of an orbit O to the bipartition
//! (α, β) of its Springer representation. It is derived exactly:
//!
//! * the point count P_O(q) of the full Springer fiber of a representative is
//!   computed through the first step of the flag, P_O = Σ_ℓ P_{O(ℓ)}, where ℓ
//!   runs over the lines of ker x and O(ℓ) is the orbit induced on ℓ^⊥/ℓ;
//!   the number of lines of each induced type is interpolated in q;
//! * deg P_O = dim B_x must equal the b-invariant 2n(α) + 2n(β) + |β| and the
//!   leading coefficient must equal dim (α, β);
//! * O lies in H·(n_s ⊕ D_|α|), so the least k with O ∩ (n_s ⊕ D_k) ≠ ∅ is
//!   at most |α|.
//!
//! When these constraints admit more than one bijection, the first in
//! enumeration order is used and the others are recorded per entry.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::combinatorics::{b_invariant, enumerate_multipartitions, IrrepLabel, Multipartition};
use crate::gf2k::{FiniteField, Gf2k};
use crate::linalg::{gram_of, subquotient_action, Mat, Subspace};
use crate::partition::Partition;
use crate::theta::{standard_subalgebra, FormContext, SubalgebraName};

use super::fiber::for_each_line;
use super::{
    fingerprint_with_gram, fit_point_polynomial, space_element, OrbitError, OrbitFingerprint,
    PointCountSeries,
};

type F2 = Gf2k<1>;

/// Integer polynomial in q, lowest degree first.
pub type Poly = Vec<i128>;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RenderEntry {
    pub rank: usize,
    pub fingerprint: OrbitFingerprint,
    pub alpha: Partition,
    pub beta: Partition,
    /// Representative over F_2 lying in n, as row bitmasks.
    pub representative: Vec<Vec<u32>>,
    /// Point count of the full Springer fiber of the representative.
    pub fiber_polynomial: Poly,
    pub orbit_dim: usize,
    /// Least k with O ∩ (n_s ⊕ D_k) ≠ ∅ over the scanned fields.
    pub min_k: usize,
    /// Other labels this orbit receives in some consistent bijection.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub alternatives: Vec<(Partition, Partition)>,
}

impl RenderEntry {
    pub fn representative_matrix(&self) -> Mat<F2> {
        Mat::from_bits(&self.representative)
    }

    pub fn fiber_degree(&self) -> usize {
        self.fiber_polynomial.len().saturating_sub(1)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RenderTable {
    pub entries: Vec<RenderEntry>,
}

impl RenderTable {
    pub fn lookup(&self, fp: &OrbitFingerprint) -> Option<&RenderEntry> {
        self.entries.iter().find(|e| &e.fingerprint == fp)
    }

    pub fn by_label(&self, alpha: &Partition, beta: &Partition) -> Option<&RenderEntry> {
        self.entries
            .iter()
            .find(|e| &e.alpha == alpha && &e.beta == beta)
    }

    pub fn max_rank(&self) -> usize {
        self.entries.iter().map(|e| e.rank).max().unwrap_or(0)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("table serializes")
    }
}

const SHIPPED: &str = include_str!("render_table.json");

/// The shipped table (ranks 0 to 3).
pub fn shipped_table() -> &'static RenderTable {
    static TABLE: OnceLock<RenderTable> = OnceLock::new();
    TABLE.get_or_init(|| serde_json::from_str(SHIPPED).expect("shipped rendering table parses"))
}

/// (α, β) for a fingerprint covered by the shipped table.
pub fn render(fp: &OrbitFingerprint) -> Option<(Partition, Partition)> {
    if fp.lambda.is_empty() {
        return Some((Partition::empty(), Partition::empty()));
    }
    shipped_table()
        .lookup(fp)
        .map(|e| (e.alpha.clone(), e.beta.clone()))
}

/// Fingerprint and F_2 representative of the orbit labelled (α, β).
pub fn orbit_for_label(alpha: &Partition, beta: &Partition) -> Option<(OrbitFingerprint, Mat<F2>)> {
    if alpha.is_empty() && beta.is_empty() {
        let fp = OrbitFingerprint::empty();
        return Some((fp, Mat::zeros(0, 0)));
    }
    shipped_table()
        .by_label(alpha, beta)
        .map(|e| (e.fingerprint.clone(), e.representative_matrix()))
}

/// Orbit dimension of the orbit labelled (α, β), when tabulated.
pub fn orbit_dim_for_label(alpha: &Partition, beta: &Partition) -> Option<usize> {
    if alpha.is_empty() && beta.is_empty() {
        return Some(0);
    }
    shipped_table().by_label(alpha, beta).map(|e| e.orbit_dim)
}

fn poly_add(a: &Poly, b: &Poly) -> Poly {
    let mut out = vec![0; a.len().max(b.len())];
    for (i, c) in a.iter().enumerate() {
        out[i] += c;
    }
    for (i, c) in b.iter().enumerate() {
        out[i] += c;
    }
    while out.last() == Some(&0) {
        out.pop();
    }
    out
}

fn poly_mul(a: &Poly, b: &Poly) -> Poly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

pub fn poly_eval(p: &Poly, q: u128) -> i128 {
    p.iter().rev().fold(0i128, |acc, &c| acc * q as i128 + c)
}

/// Π_{i=1..r} (q^(2i) − 1)/(q − 1) = Π_i (1 + q + … + q^(2i−1)).
fn zero_orbit_polynomial(r: usize) -> Poly {
    (1..=r).fold(vec![1], |acc, i| poly_mul(&acc, &vec![1; 2 * i]))
}

/// Counts the lines ℓ of ker x by the fingerprint of x on ℓ^⊥/ℓ.
fn line_classes<F: FiniteField>(
    x2: &Mat<F2>,
    ctx: &FormContext,
) -> Result<BTreeMap<OrbitFingerprint, u128>, OrbitError> {
    let x: Mat<F> = x2.lift();
    let j = ctx.gram::<F>();
    let dim = ctx.dim();
    let mut out = BTreeMap::new();
    let mut err = None;
    for_each_line(&x.kernel().basis_vectors(), |u| {
        if err.is_some() {
            return;
        }
        let line = Subspace::span(dim, &[u]);
        let induced = subquotient_action(&x, &line.perp(&j), &line)
            .map_err(OrbitError::from)
            .and_then(|(xb, reps)| fingerprint_with_gram(&xb, &gram_of(&j, &reps)));
        match induced {
            Ok(fp) => *out.entry(fp).or_insert(0u128) += 1,
            Err(e) => err = Some(e),
        }
    });
    match err {
        Some(e) => Err(e),
        None => Ok(out),
    }
}

fn line_classes_at(
    q: u64,
    x: &Mat<F2>,
    ctx: &FormContext,
) -> Result<BTreeMap<OrbitFingerprint, u128>, OrbitError> {
    match q {
        2 => line_classes::<Gf2k<1>>(x, ctx),
        4 => line_classes::<Gf2k<2>>(x, ctx),
        8 => line_classes::<Gf2k<3>>(x, ctx),
        16 => line_classes::<Gf2k<4>>(x, ctx),
        32 => line_classes::<Gf2k<5>>(x, ctx),
        64 => line_classes::<Gf2k<6>>(x, ctx),
        _ => Err(OrbitError::Precondition(format!(
            "no field of order {q} available"
        ))),
    }
}

/// Orbit data found by scanning n(F_q): a representative of least weight
/// and the least k with the orbit meeting n_s ⊕ D_k.
#[derive(Clone, Debug)]
struct ScanInfo {
    representative: Option<Mat<F2>>,
    min_k: usize,
}

/// Index of the last nonzero diagonal entry of the b-block, or 0.
fn diagonal_k<F: FiniteField>(x: &Mat<F>, ctx: &FormContext) -> usize {
    (1..=ctx.n())
        .rev()
        .find(|&i| !x[(ctx.e(i), ctx.f(i))].is_zero())
        .unwrap_or(0)
}

fn scan_n<F: FiniteField>(
    ctx: &FormContext,
    info: &mut BTreeMap<OrbitFingerprint, ScanInfo>,
    limit: u128,
) -> Result<(), OrbitError> {
    let n = standard_subalgebra::<F>(SubalgebraName::N, ctx)?.space;
    let total = (F::ORDER as u128).pow(n.dim() as u32);
    if total > limit {
        return Err(OrbitError::ResourceLimit {
            what: "nilradical scan",
            size: total,
            limit,
        });
    }
    let gram = ctx.gram::<F>();
    for idx in 0..total as u64 {
        let x = space_element(&n, idx);
        let fp = fingerprint_with_gram(&x, &gram)?;
        let k = diagonal_k(&x, ctx);
        let entry = info.entry(fp).or_insert(ScanInfo {
            representative: None,
            min_k: k,
        });
        entry.min_k = entry.min_k.min(k);
        if F::ORDER == 2 {
            let x2: Mat<F2> = x.lift();
            let weight = |m: &Mat<F2>| m.data().iter().filter(|e| !e.is_zero()).count();
            let better = match &entry.representative {
                None => true,
                Some(cur) => (weight(&x2), x2.to_bits()) < (weight(cur), cur.to_bits()),
            };
            if better {
                entry.representative = Some(x2);
            }
        }
    }
    Ok(())
}

/// Settings for [`derive_table`].
#[derive(Clone, Copy, Debug)]
pub struct DeriveOptions {
    pub max_rank: usize,
    /// Field orders scanned for the n_s ⊕ D_k constraint.
    pub k_scan_orders: &'static [u64],
    /// Line counts at an extra q are checked when they stay below this.
    pub extra_check_lines: u128,
}

impl Default for DeriveOptions {
    fn default() -> Self {
        DeriveOptions {
            max_rank: 3,
            k_scan_orders: &[2, 4],
            extra_check_lines: 300_000,
        }
    }
}

fn to_i128_poly(coeffs: &[BigRational]) -> Option<Poly> {
    coeffs
        .iter()
        .map(|c| {
            if c.is_integer() {
                c.to_integer().to_i128()
            } else {
                None
            }
        })
        .collect()
}

/// Full-fiber polynomial of `x` given the polynomials of rank r − 1.
fn fiber_polynomial(
    x: &Mat<F2>,
    ctx: &FormContext,
    lower: &BTreeMap<OrbitFingerprint, Poly>,
    opts: &DeriveOptions,
) -> Result<Poly, OrbitError> {
    if x.is_zero() {
        return Ok(zero_orbit_polynomial(ctx.n()));
    }
    let kd = x.kernel().dim();
    let mut orders: Vec<u64> = (1..=kd as u32).map(|i| 1u64 << i).collect();
    let next = 1u128 << (kd + 1);
    if (next.pow(kd as u32) - 1) / (next - 1) <= opts.extra_check_lines {
        orders.push(next as u64);
    }
    let mut samples: BTreeMap<OrbitFingerprint, Vec<(u64, u128)>> = BTreeMap::new();
    for &q in &orders {
        let classes = line_classes_at(q, x, ctx)?;
        for fp in classes.keys() {
            samples.entry(fp.clone()).or_default();
        }
        for (fp, pts) in samples.iter_mut() {
            pts.push((q, classes.get(fp).copied().unwrap_or(0)));
        }
    }
    let mut total = Poly::new();
    for (fp, pts) in samples {
        let fit = fit_point_polynomial(&PointCountSeries::new(pts), kd - 1)?;
        if !fit.is_consistent() {
            return Err(OrbitError::Precondition(format!(
                "line count of type {fp} is not polynomial"
            )));
        }
        let c = to_i128_poly(&fit.coefficients).ok_or_else(|| {
            OrbitError::Precondition(format!(
                "line count of type {fp} has fractional coefficients"
            ))
        })?;
        let sub = lower.get(&fp).ok_or_else(|| {
            OrbitError::Precondition(format!("induced type {fp} missing from the lower rank"))
        })?;
        total = poly_add(&total, &poly_mul(&c, sub));
    }
    Ok(total)
}

struct Derived {
    fingerprint: OrbitFingerprint,
    representative: Mat<F2>,
    poly: Poly,
    min_k: usize,
}

fn derive_rank(
    r: usize,
    lower: &BTreeMap<OrbitFingerprint, Poly>,
    opts: &DeriveOptions,
) -> Result<Vec<Derived>, OrbitError> {
    let ctx = FormContext::symplectic(r);
    let mut info = BTreeMap::new();
    let limit = 1u128 << 24;
    for &q in opts.k_scan_orders {
        match q {
            2 => scan_n::<Gf2k<1>>(&ctx, &mut info, limit)?,
            4 => scan_n::<Gf2k<2>>(&ctx, &mut info, limit)?,
            8 => scan_n::<Gf2k<3>>(&ctx, &mut info, limit)?,
            _ => {
                return Err(OrbitError::Precondition(format!(
                    "unsupported scan order {q}"
                )))
            }
        }
    }
    info.into_iter()
        .map(|(fingerprint, si)| {
            let representative = si.representative.ok_or_else(|| {
                OrbitError::Precondition(format!("orbit {fingerprint} has no F_2 point in n"))
            })?;
            let poly = fiber_polynomial(&representative, &ctx, lower, opts)?;
            Ok(Derived {
                fingerprint,
                representative,
                poly,
                min_k: si.min_k,
            })
        })
        .collect()
}

/// Every bijection orbits → bipartitions respecting the candidate lists.
fn all_matchings(candidates: &[Vec<Multipartition>]) -> Vec<Vec<Multipartition>> {
    fn rec(
        i: usize,
        candidates: &[Vec<Multipartition>],
        used: &mut Vec<Multipartition>,
        out: &mut Vec<Vec<Multipartition>>,
    ) {
        if i == candidates.len() {
            out.push(used.clone());
            return;
        }
        for c in &candidates[i] {
            if !used.contains(c) {
                used.push(c.clone());
                rec(i + 1, candidates, used, out);
                used.pop();
            }
        }
    }
    let mut out = Vec::new();
    rec(0, candidates, &mut Vec::new(), &mut out);
    out
}

fn assign(r: usize, derived: Vec<Derived>) -> Result<Vec<RenderEntry>, OrbitError> {
    let labels = enumerate_multipartitions(r, 2);
    if labels.len() != derived.len() {
        return Err(OrbitError::Precondition(format!(
            "rank {r}: {} orbits for {} bipartitions",
            derived.len(),
            labels.len()
        )));
    }
    let candidates: Vec<Vec<Multipartition>> = derived
        .iter()
        .map(|d| {
            let degree = d.poly.len() - 1;
            let lead = *d.poly.last().expect("nonzero polynomial");
            labels
                .iter()
                .filter(|l| {
                    let (a, b) = (&l.components[0], &l.components[1]);
                    b_invariant(a, b) == degree
                        && IrrepLabel::Wreath {
                            label: (*l).clone(),
                        }
                        .dim() as i128
                            == lead
                        && a.size() >= d.min_k
                })
                .cloned()
                .collect()
        })
        .collect();
    let matchings = all_matchings(&candidates);
    let chosen = matchings
        .first()
        .ok_or_else(|| OrbitError::Precondition(format!("rank {r}: no consistent labelling")))?;
    Ok(derived
        .into_iter()
        .enumerate()
        .map(|(i, d)| {
            let mut alternatives: Vec<(Partition, Partition)> = Vec::new();
            for m in &matchings[1..] {
                let alt = (m[i].components[0].clone(), m[i].components[1].clone());
                if m[i] != chosen[i] && !alternatives.contains(&alt) {
                    alternatives.push(alt);
                }
            }
            RenderEntry {
                rank: r,
                orbit_dim: 2 * r * r - 2 * (d.poly.len() - 1),
                alpha: chosen[i].components[0].clone(),
                beta: chosen[i].components[1].clone(),
                representative: d.representative.to_bits(),
                fiber_polynomial: d.poly,
                min_k: d.min_k,
                fingerprint: d.fingerprint,
                alternatives,
            }
        })
        .collect())
}

/// Derives the rendering table for ranks 1..=max_rank from scratch.
pub fn derive_table(opts: &DeriveOptions) -> Result<RenderTable, OrbitError> {
    let mut lower: BTreeMap<OrbitFingerprint, Poly> = BTreeMap::new();
    lower.insert(OrbitFingerprint::empty(), vec![1]);
    let mut entries = Vec::new();
    for r in 1..=opts.max_rank {
        let derived = derive_rank(r, &lower, opts)?;
        lower = derived
            .iter()
            .map(|d| (d.fingerprint.clone(), d.poly.clone()))
            .collect();
        entries.extend(assign(r, derived)?);
    }
    Ok(RenderTable { entries })
}

/// Exact value of a fitted polynomial, as a rational, for reports.
pub fn poly_to_rational(p: &Poly) -> Vec<BigRational> {
    p.iter()
        .map(|&c| BigRational::from_integer(BigInt::from(c)))
        .collect()
}

/// Leading coefficient; zero for the zero polynomial.
pub fn poly_leading(p: &Poly) -> i128 {
    p.last().copied().unwrap_or(0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::orbit::{flag_count, springer_fiber_count, FiberVariant};
    use crate::Limits;

    fn p(parts: &[usize]) -> Partition {
        Partition::new(parts.to_vec())
    }

    #[test]
    fn polynomial_helpers() {
        assert_eq!(zero_orbit_polynomial(1), vec![1, 1]);
        for q in [2u128, 4, 8] {
            assert_eq!(
                poly_eval(&zero_orbit_polynomial(3), q) as u128,
                flag_count(3, q)
            );
        }
        assert_eq!(poly_mul(&vec![1, 1], &vec![-1, 1]), vec![-1, 0, 1]);
        assert_eq!(poly_add(&vec![1, 1], &vec![0, -1]), vec![1]);
    }

    #[test]
    fn rank_one_labels() {
        let ctx = FormContext::symplectic(1);
        let zero = fingerprint_with_gram(&Mat::<F2>::zeros(2, 2), &ctx.gram()).unwrap();
        let mut x = Mat::<F2>::zeros(2, 2);
        x[(ctx.e(1), ctx.f(1))] = F2::ONE;
        let regular = fingerprint_with_gram(&x, &ctx.gram()).unwrap();
        assert_eq!(render(&zero), Some((Partition::empty(), p(&[1]))));
        assert_eq!(render(&regular), Some((p(&[1]), Partition::empty())));
    }

    #[test]
    fn rederive_low_ranks_matches_shipped() {
        let opts = DeriveOptions {
            max_rank: 2,
            ..DeriveOptions::default()
        };
        let table = derive_table(&opts).unwrap();
        assert_eq!(table.entries.len(), 2 + 5);
        for e in &table.entries {
            let shipped = shipped_table()
                .lookup(&e.fingerprint)
                .expect("shipped entry");
            assert_eq!(shipped, e);
        }
        let dims: Vec<usize> = table
            .entries
            .iter()
            .filter(|e| e.rank == 2)
            .map(|e| e.orbit_dim)
            .collect();
        let mut sorted = dims.clone();
        sorted.sort_unstable();
        assert_eq!(sorted, [0, 4, 4, 6, 8]);
        assert!(table.entries.iter().all(|e| e.alternatives.is_empty()));
    }

    #[test]
    fn shipped_table_is_a_bijection_per_rank() {
        let table = shipped_table();
        for r in 1..=table.max_rank() {
            let mut labels: Vec<Multipartition> = table
                .entries
                .iter()
                .filter(|e| e.rank == r)
                .map(|e| Multipartition::new(vec![e.alpha.clone(), e.beta.clone()]))
                .collect();
            labels.sort();
            let mut all = enumerate_multipartitions(r, 2);
            all.sort();
            assert_eq!(labels, all);
            for e in table.entries.iter().filter(|e| e.rank == r) {
                assert_eq!(b_invariant(&e.alpha, &e.beta), e.fiber_degree());
                let x = e.representative_matrix();
                let ctx = FormContext::symplectic(r);
                assert_eq!(
                    fingerprint_with_gram(&x, &ctx.gram()).unwrap(),
                    e.fingerprint
                );
            }
        }
    }

    #[test]
    fn fiber_polynomials_match_direct_counts() {
        let table = shipped_table();
        let limits = Limits::default();
        for e in &table.entries {
            let ctx = FormContext::symplectic(e.rank);
            let x = e.representative_matrix();
            let v = vec![F2::zero(); ctx.dim()];
            let direct =
                springer_fiber_count(&x, &v, 0, &ctx, FiberVariant::Full, &limits).unwrap();
            assert_eq!(
                direct as i128,
                poly_eval(&e.fiber_polynomial, 2),
                "{}",
                e.fingerprint
            );
            if e.rank <= 2 {
                let x4: Mat<Gf2k<2>> = x.lift();
                let v4 = vec![Gf2k::<2>::zero(); ctx.dim()];
                let direct =
                    springer_fiber_count(&x4, &v4, 0, &ctx, FiberVariant::Full, &limits).unwrap();
                assert_eq!(
                    direct as i128,
                    poly_eval(&e.fiber_polynomial, 4),
                    "{}",
                    e.fingerprint
                );
            }
        }
    }

    /// Full re-derivation including rank 3; slow on one core.
    #[test]
    #[ignore]
    fn rederive_rank_three() {
        let table = derive_table(&DeriveOptions::default()).unwrap();
        if std::env::var_os("SPRINGER_LAB_WRITE_TABLE").is_some() {
            std::fs::write(
                concat!(env!("CARGO_MANIFEST_DIR"), "/src/orbit/render_table.json"),
                table.to_json(),
            )
            .unwrap();
        }
        assert_eq!(&table, shipped_table());
    }
}
