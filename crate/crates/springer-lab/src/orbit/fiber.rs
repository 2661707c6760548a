//! Point counts of Springer fibers by direct enumeration of isotropic flags,
//! and exact polynomial fitting of point-count series.
//!
//! A complete isotropic flag F_1 ⊂ … ⊂ F_n is built one line at a time: the
//! next line is any line of F_i^⊥ / F_i (every vector is isotropic for an
//! alternating form). For self-adjoint x, g⁻¹x ∈ n for the flag gM_• is
//! equivalent to x F_i ⊆ F_(i−1) for i ≤ n: the conditions on the
//! coisotropic half F_i^⊥ are the adjoints of these.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::gf2k::FiniteField;
use crate::linalg::{is_zero_vector, Mat, Subspace};
use crate::theta::{membership, FormContext, Membership, Parity};
use crate::Limits;

use super::OrbitError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FiberVariant {
    /// x F_i ⊆ F_(i−1) and v ∈ F_n.
    Full,
    /// x F_i ⊆ F_(i−1) and v ∈ F_(m1).
    Restricted,
    /// x F_i ⊆ F_i; v is ignored.
    SemisimpleB,
}

/// Number of complete isotropic flags: Π_{i=1..n} (q^(2i) − 1)/(q − 1).
pub fn flag_count(n: usize, q: u128) -> u128 {
    (1..=n)
        .map(|i| (q.pow(2 * i as u32) - 1) / (q - 1))
        .product()
}

pub fn springer_fiber_count<F: FiniteField>(
    x: &Mat<F>,
    v: &[F],
    m1: usize,
    ctx: &FormContext,
    variant: FiberVariant,
    limits: &Limits,
) -> Result<u128, OrbitError> {
    if ctx.parity() != Parity::Even || !membership(x, ctx, Membership::SpLie)? {
        return Err(OrbitError::NotInSp);
    }
    if variant != FiberVariant::SemisimpleB && !x.is_nilpotent() {
        return Err(OrbitError::NotNilpotent);
    }
    if v.len() != ctx.dim() || m1 > ctx.n() {
        return Err(OrbitError::Precondition(
            "vector length or m1 out of range".into(),
        ));
    }
    let total = flag_count(ctx.n(), F::ORDER as u128);
    if !limits.unsafe_limits && total > limits.max_flags {
        return Err(OrbitError::ResourceLimit {
            what: "isotropic flag variety",
            size: total,
            limit: limits.max_flags,
        });
    }
    let target = match variant {
        FiberVariant::Full => Some(ctx.n()),
        FiberVariant::Restricted => Some(m1),
        FiberVariant::SemisimpleB => None,
    };
    let walker = FlagWalker {
        x,
        v: if is_zero_vector(v) || target.is_none() {
            None
        } else {
            Some(v)
        },
        j: ctx.gram(),
        n: ctx.n(),
        target: target.unwrap_or(0),
        semisimple: variant == FiberVariant::SemisimpleB,
    };
    Ok(walker.count(&Subspace::zero(ctx.dim())))
}

struct FlagWalker<'a, F> {
    x: &'a Mat<F>,
    v: Option<&'a [F]>,
    j: Mat<F>,
    n: usize,
    target: usize,
    semisimple: bool,
}

impl<F: FiniteField> FlagWalker<'_, F> {
    /// Subspaces K ⊇ F whose lines K/F are the admissible next steps, one per
    /// eigenvalue in the semisimple case.
    fn candidates(&self, flag: &Subspace<F>) -> Vec<Subspace<F>> {
        let dim = self.j.rows();
        let perp = flag.perp(&self.j);
        // rows of (perp basis)·J·(x − λ) cut out {u : (x − λ)u ∈ F}
        let perp_j = perp.basis() * &self.j;
        let flag_j = flag.basis() * &self.j;
        let shifts: Vec<F> = if self.semisimple {
            F::elements().collect()
        } else {
            vec![F::zero()]
        };
        shifts
            .into_iter()
            .filter_map(|lambda| {
                let shifted = self.x - &Mat::identity(dim).scale(lambda);
                let cond = &perp_j * &shifted;
                let mut rows = flag_j.row_vectors();
                rows.extend(cond.row_vectors());
                let k = Mat::from_rows(&rows, dim).kernel();
                (k.dim() > flag.dim()).then_some(k)
            })
            .collect()
    }

    fn count(&self, flag: &Subspace<F>) -> u128 {
        let i = flag.dim();
        if i == self.n {
            return 1;
        }
        if let Some(v) = self.v {
            // v ∈ F_target ⊆ F_i^⊥ is needed for every i ≤ target
            if i < self.target && !flag.perp(&self.j).contains(v) {
                return 0;
            }
            if i == self.target && !flag.contains(v) {
                return 0;
            }
        }
        let q = F::ORDER as u128;
        let last = i + 1 == self.n;
        let mut total = 0u128;
        for k in self.candidates(flag) {
            let extra = k.dim() - i;
            let v_pending = self.v.filter(|v| i + 1 == self.target && !flag.contains(v));
            if last {
                total += match v_pending {
                    // the only admissible line is the one through v
                    Some(v) => k.contains(v) as u128,
                    None => (q.pow(extra as u32) - 1) / (q - 1),
                };
                continue;
            }
            if let Some(v) = v_pending {
                if k.contains(v) {
                    total +=
                        self.count(&flag.sum(&Subspace::span(flag.ambient_dim(), &[v.to_vec()])));
                }
                continue;
            }
            let reps = flag.complement_within(&k);
            for_each_line(&reps, |u| {
                total += self.count(&flag.sum(&Subspace::span(flag.ambient_dim(), &[u])));
            });
        }
        total
    }
}

/// Calls `f` once per line of span(reps), on the normalized vector whose
/// first nonzero coefficient is 1.
pub(crate) fn for_each_line<F: FiniteField>(reps: &[Vec<F>], mut f: impl FnMut(Vec<F>)) {
    let r = reps.len();
    if r == 0 {
        return;
    }
    let dim = reps[0].len();
    let q = F::ORDER as u64;
    for lead in 0..r {
        let free = r - lead - 1;
        for mut idx in 0..q.pow(free as u32) {
            let mut u = reps[lead].clone();
            for rep in &reps[lead + 1..] {
                let c = F::from_bits((idx % q) as u32);
                idx /= q;
                if !c.is_zero() {
                    for (a, &b) in u.iter_mut().zip(rep) {
                        *a += c * b;
                    }
                }
            }
            debug_assert_eq!(u.len(), dim);
            f(u);
        }
    }
}

/// (q, count) pairs with distinct ascending q.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PointCountSeries {
    pub points: Vec<(u64, u128)>,
}

impl PointCountSeries {
    pub fn new(mut points: Vec<(u64, u128)>) -> Self {
        points.sort_by_key(|p| p.0);
        points.dedup_by_key(|p| p.0);
        PointCountSeries { points }
    }
}

/// Result of interpolating through the first `degree + 1` points and
/// checking the rest.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FitReport {
    /// Coefficients c_0, c_1, … of the interpolant (trailing zeros trimmed).
    pub coefficients: Vec<BigRational>,
    /// Points beyond the interpolation set that disagree: (q, predicted, actual).
    pub mismatches: Vec<(u64, BigRational, u128)>,
    /// Number of points that were checked but not used to interpolate.
    pub checked: usize,
}

impl FitReport {
    pub fn is_consistent(&self) -> bool {
        self.mismatches.is_empty()
    }

    /// Degree of the interpolant; the zero polynomial reports 0.
    pub fn degree(&self) -> usize {
        self.coefficients.len().saturating_sub(1)
    }

    pub fn leading(&self) -> BigRational {
        self.coefficients
            .last()
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    /// Coefficients when they are all integers.
    pub fn integer_coefficients(&self) -> Option<Vec<i128>> {
        self.coefficients
            .iter()
            .map(|c| {
                if c.is_integer() {
                    i128::try_from(c.to_integer()).ok()
                } else {
                    None
                }
            })
            .collect()
    }

    pub fn evaluate(&self, q: u64) -> BigRational {
        let q = BigRational::from_integer(BigInt::from(q));
        self.coefficients
            .iter()
            .rev()
            .fold(BigRational::zero(), |acc, c| acc * &q + c)
    }

    pub fn describe(&self) -> String {
        let mut terms = Vec::new();
        for (i, c) in self.coefficients.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let coeff = c.to_string();
            terms.push(match i {
                0 => coeff,
                1 if c.is_one() => "q".to_string(),
                1 => format!("{coeff}q"),
                _ if c.is_one() => format!("q^{i}"),
                _ => format!("{coeff}q^{i}"),
            });
        }
        if terms.is_empty() {
            "0".to_string()
        } else {
            terms.join(" + ")
        }
    }
}

/// Exact rational interpolation through the first `degree + 1` points.
/// Further points are checked; disagreement is reported, not raised.
pub fn fit_point_polynomial(
    series: &PointCountSeries,
    degree: usize,
) -> Result<FitReport, OrbitError> {
    let pts = &series.points;
    if pts.len() < degree + 1 {
        return Err(OrbitError::Precondition(format!(
            "{} points cannot determine a degree {degree} polynomial",
            pts.len()
        )));
    }
    let used = &pts[..=degree];
    let xs: Vec<BigRational> = used
        .iter()
        .map(|p| BigRational::from_integer(BigInt::from(p.0)))
        .collect();
    let ys: Vec<BigRational> = used
        .iter()
        .map(|p| BigRational::from_integer(BigInt::from(p.1)))
        .collect();
    let mut coefficients = newton_to_monomial(&xs, &divided_differences(&xs, &ys));
    while coefficients.len() > 1 && coefficients.last().is_some_and(|c| c.is_zero()) {
        coefficients.pop();
    }
    if coefficients.len() == 1 && coefficients[0].is_zero() {
        coefficients.clear();
    }
    let mut report = FitReport {
        coefficients,
        mismatches: Vec::new(),
        checked: pts.len() - used.len(),
    };
    for &(q, count) in &pts[degree + 1..] {
        let predicted = report.evaluate(q);
        if predicted != BigRational::from_integer(BigInt::from(count)) {
            report.mismatches.push((q, predicted, count));
        }
    }
    Ok(report)
}

/// Lowest-degree interpolant that every remaining point confirms. A fit
/// that uses all points is never returned: it would be unchecked.
pub fn fit_minimal_degree(series: &PointCountSeries) -> Option<FitReport> {
    let len = series.points.len();
    (0..len.saturating_sub(1)).find_map(|d| {
        fit_point_polynomial(series, d)
            .ok()
            .filter(FitReport::is_consistent)
    })
}

fn divided_differences(xs: &[BigRational], ys: &[BigRational]) -> Vec<BigRational> {
    let mut table = ys.to_vec();
    let n = xs.len();
    for level in 1..n {
        for i in (level..n).rev() {
            table[i] = (&table[i] - &table[i - 1]) / (&xs[i] - &xs[i - level]);
        }
    }
    table
}

fn newton_to_monomial(xs: &[BigRational], dd: &[BigRational]) -> Vec<BigRational> {
    // Horner on the Newton form: p = dd_0 + (t − x_0)(dd_1 + (t − x_1)(…))
    let n = dd.len();
    let mut poly = vec![dd[n - 1].clone()];
    for i in (0..n - 1).rev() {
        let mut next = vec![BigRational::zero(); poly.len() + 1];
        for (k, c) in poly.iter().enumerate() {
            next[k + 1] += c;
            next[k] -= c * &xs[i];
        }
        next[0] += &dd[i];
        poly = next;
    }
    poly
}
