//! Label calculus for S_n, the wreath products W_{n,r} = S_n ⋉ (Z/r)^n and the
//! subgroups W♮_m = S_{m1} × W_{m2}: multipartitions, irreducible dimensions,
//! the natural bijections between label sets, and the dimension formulas of
//! the exotic nilcone strata.

use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::partition::{partitions, Partition};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CombinatoricsError {
    #[error("weight mismatch: expected {expected}, got {actual}")]
    WeightMismatch { expected: usize, actual: usize },
    #[error("composition {0} has m3 ≠ 0")]
    NonzeroM3(CompositionM),
    #[error("malformed label: {0}")]
    Malformed(String),
    #[error("dimension {0} is not a non-negative even difference")]
    NotHalfInteger(i64),
}

/// n! / Π hook lengths, exactly.
pub fn hook_dim_big(lambda: &Partition) -> BigUint {
    let conj = lambda.conjugate();
    let mut num = BigUint::one();
    for k in 2..=lambda.size() {
        num *= k;
    }
    let mut den = BigUint::one();
    for (i, &row) in lambda.parts().iter().enumerate() {
        for j in 0..row {
            den *= (row - j - 1) + (conj.parts()[j] - i - 1) + 1;
        }
    }
    num / den
}

/// Dimension of the irreducible S_n-module labelled by λ.
pub fn hook_dim(lambda: &Partition) -> u128 {
    hook_dim_big(lambda)
        .to_u128()
        .expect("dimension fits in u128")
}

pub fn factorial(n: usize) -> u128 {
    (1..=n as u128).product()
}

pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc = 1u128;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

pub fn multinomial(parts: &[usize]) -> u128 {
    let mut total = 0;
    let mut acc = 1u128;
    for &p in parts {
        total += p;
        acc *= binomial(total, p);
    }
    acc
}

/// An r-tuple of partitions.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Multipartition {
    pub components: Vec<Partition>,
}

impl Multipartition {
    pub fn new(components: Vec<Partition>) -> Self {
        Multipartition { components }
    }

    pub fn r(&self) -> usize {
        self.components.len()
    }

    pub fn n(&self) -> usize {
        self.components.iter().map(Partition::size).sum()
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.components.iter().map(Partition::size).collect()
    }

    /// Σ n(λ^(i)).
    pub fn n_statistic(&self) -> usize {
        self.components.iter().map(Partition::n_statistic).sum()
    }
}

impl fmt::Display for Multipartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let body: Vec<String> = self.components.iter().map(|p| p.to_string()).collect();
        write!(f, "({})", body.join(", "))
    }
}

/// All r-multipartitions of n: larger first components first, and within a
/// weight, components in [`partitions`] order.
pub fn enumerate_multipartitions(n: usize, r: usize) -> Vec<Multipartition> {
    assert!(r >= 1);
    fn rec(
        remaining: usize,
        slots: usize,
        prefix: &mut Vec<Partition>,
        out: &mut Vec<Multipartition>,
    ) {
        if slots == 1 {
            for p in partitions(remaining) {
                prefix.push(p);
                out.push(Multipartition::new(prefix.clone()));
                prefix.pop();
            }
            return;
        }
        for size in (0..=remaining).rev() {
            for p in partitions(size) {
                prefix.push(p);
                rec(remaining - size, slots - 1, prefix, out);
                prefix.pop();
            }
        }
    }
    let mut out = Vec::new();
    rec(n, r, &mut Vec::new(), &mut out);
    out
}

/// m = (m1, m2, m3) with Σ m_i = n.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CompositionM {
    pub m1: usize,
    pub m2: usize,
    pub m3: usize,
}

impl CompositionM {
    pub fn new(m1: usize, m2: usize, m3: usize) -> Self {
        CompositionM { m1, m2, m3 }
    }

    pub fn n(&self) -> usize {
        self.m1 + self.m2 + self.m3
    }

    /// (p1, p2) = (m1, m1 + m2).
    pub fn partial_sums(&self) -> (usize, usize) {
        (self.m1, self.m1 + self.m2)
    }

    /// m′ ≤ m iff p′_i ≤ p_i for i = 1, 2.
    pub fn le(&self, other: &CompositionM) -> bool {
        let (a1, a2) = self.partial_sums();
        let (b1, b2) = other.partial_sums();
        self.n() == other.n() && a1 <= b1 && a2 <= b2
    }

    /// m(k) = (m1, k, m2 − k).
    pub fn split(&self, k: usize) -> CompositionM {
        assert!(k <= self.m2);
        CompositionM::new(self.m1, k, self.m2 - k)
    }
}

impl fmt::Display for CompositionM {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.m1, self.m2, self.m3)
    }
}

/// Q_{n,3}, in lexicographic order.
pub fn compositions_3(n: usize) -> Vec<CompositionM> {
    let mut out = Vec::new();
    for m1 in 0..=n {
        for m2 in 0..=n - m1 {
            out.push(CompositionM::new(m1, m2, n - m1 - m2));
        }
    }
    out
}

/// Q^0_{n,3}: the compositions with m3 = 0.
pub fn compositions_3_reduced(n: usize) -> Vec<CompositionM> {
    (0..=n).map(|m1| CompositionM::new(m1, n - m1, 0)).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "group", rename_all = "snake_case")]
pub enum IrrepLabel {
    Symmetric {
        label: Partition,
    },
    Wreath {
        label: Multipartition,
    },
    /// ρ1 ⊠ Ind(ρ̃2 ⊠ ρ̃3) for W♮_m = S_{m1} × W_{m2}.
    WNat {
        first: Partition,
        second: (Partition, Partition),
    },
}

impl IrrepLabel {
    pub fn dim(&self) -> u128 {
        match self {
            IrrepLabel::Symmetric { label } => hook_dim(label),
            IrrepLabel::Wreath { label } => {
                multinomial(&label.sizes())
                    * label.components.iter().map(hook_dim).product::<u128>()
            }
            IrrepLabel::WNat { first, second } => {
                let (a, b) = second;
                hook_dim(first)
                    * binomial(a.size() + b.size(), a.size())
                    * hook_dim(a)
                    * hook_dim(b)
            }
        }
    }
}

impl fmt::Display for IrrepLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IrrepLabel::Symmetric { label } => write!(f, "{label}"),
            IrrepLabel::Wreath { label } => write!(f, "{label}"),
            IrrepLabel::WNat { first, second } => {
                write!(f, "{first} ⊠ ({}, {})", second.0, second.1)
            }
        }
    }
}

/// |W_{n,r}| = r^n · n!.
pub fn wreath_order(n: usize, r: usize) -> u128 {
    (r as u128).pow(n as u32) * factorial(n)
}

/// |W♮_m| = m1! · 2^m2 · m2!.
pub fn w_nat_order(m: &CompositionM) -> u128 {
    factorial(m.m1) * wreath_order(m.m2, 2)
}

/// Degree in which the W_n-module (α, β) first occurs in the coinvariant
/// algebra: 2n(α) + 2n(β) + |β|.
pub fn b_invariant(alpha: &Partition, beta: &Partition) -> usize {
    2 * alpha.n_statistic() + 2 * beta.n_statistic() + beta.size()
}

/// (λ′, λ″) ∈ (S_k × S_{n−k})^∧ ↦ the bipartition (λ′, λ″) of W_n, with its
/// dimension binom(n, k) · dim λ′ · dim λ″.
pub fn bijection_wn(
    first: &Partition,
    second: &Partition,
    n: usize,
) -> Result<(Multipartition, u128), CombinatoricsError> {
    if first.size() + second.size() != n {
        return Err(CombinatoricsError::WeightMismatch {
            expected: n,
            actual: first.size() + second.size(),
        });
    }
    let label = Multipartition::new(vec![first.clone(), second.clone()]);
    let dim = binomial(n, first.size()) * hook_dim(first) * hook_dim(second);
    Ok((label, dim))
}

/// (ρ1, ρ2, ρ3) ∈ (S_{m1} × S_k × S_{m2−k})^∧ ↦ (ρ♮, ρ̂).
pub fn nat_and_hat_maps(
    rho: &[Partition; 3],
    m: &CompositionM,
    k: usize,
) -> Result<(IrrepLabel, IrrepLabel), CombinatoricsError> {
    if m.m3 != 0 {
        return Err(CombinatoricsError::NonzeroM3(*m));
    }
    let want = m.split(k);
    let got = [rho[0].size(), rho[1].size(), rho[2].size()];
    if got != [want.m1, want.m2, want.m3] {
        return Err(CombinatoricsError::WeightMismatch {
            expected: want.n(),
            actual: got.iter().sum(),
        });
    }
    let nat = IrrepLabel::WNat {
        first: rho[0].clone(),
        second: (rho[1].clone(), rho[2].clone()),
    };
    let hat = IrrepLabel::Wreath {
        label: Multipartition::new(rho.to_vec()),
    };
    Ok((nat, hat))
}

/// Order of W♮_m together with a count of the signed permutations of
/// {1..n} that map M_{m1} = span(e_1..e_{m1}) to itself.
pub fn w_nat_data(m: &CompositionM) -> Result<(u128, u128), CombinatoricsError> {
    if m.m3 != 0 {
        return Err(CombinatoricsError::NonzeroM3(*m));
    }
    let n = m.n();
    let mut count = 0u128;
    let mut perm: Vec<usize> = (0..n).collect();
    for_each_permutation(&mut perm, 0, &mut |sigma| {
        // e_i ↦ e_σ(i) or f_σ(i); the sign pattern is free outside 1..m1
        if (0..m.m1).all(|i| sigma[i] < m.m1) {
            count += 1u128 << (n - m.m1);
        }
    });
    // each permutation stands for 2^n signed ones; the others flip some e_i ↦ f_σ(i), i ≤ m1
    Ok((w_nat_order(m), count))
}

fn for_each_permutation(items: &mut [usize], start: usize, f: &mut impl FnMut(&[usize])) {
    if start == items.len() {
        f(items);
        return;
    }
    for i in start..items.len() {
        items.swap(start, i);
        for_each_permutation(items, start + 1, f);
        items.swap(start, i);
    }
}

/// Brute-force version of [`w_nat_data`]'s count, enumerating every sign
/// pattern explicitly.
pub fn w_nat_stabilizer_bruteforce(m: &CompositionM) -> u128 {
    let n = m.n();
    let mut count = 0u128;
    let mut perm: Vec<usize> = (0..n).collect();
    for_each_permutation(&mut perm, 0, &mut |sigma| {
        for signs in 0u32..1 << n {
            // bit i set: e_i ↦ f_σ(i)
            let stable = (0..m.m1).all(|i| signs >> i & 1 == 0 && sigma[i] < m.m1);
            count += stable as u128;
        }
    });
    count
}

pub fn dim_sp(n: usize) -> usize {
    2 * n * n + n
}

/// Nilcone of sp_2n: 2n².
pub fn dim_sp_nilcone(n: usize) -> usize {
    2 * n * n
}

/// dim X_k = (dim H − 2n) + 2k.
pub fn dim_x_k(n: usize, k: usize) -> usize {
    dim_sp(n) - 2 * n + 2 * k
}

/// dim SX_m = 2n² + 2m1 + m2 − m3.
pub fn dim_sx_m(m: &CompositionM) -> i64 {
    let n = m.n() as i64;
    2 * n * n + 2 * m.m1 as i64 + m.m2 as i64 - m.m3 as i64
}

/// dim SX_{m, nil} = 2n² + m1.
pub fn dim_sx_m_nil(m: &CompositionM) -> usize {
    2 * m.n() * m.n() + m.m1
}

/// Nilpotent GL_n-orbit of type λ: n² − n − 2n(λ).
pub fn dim_gl_orbit(lambda: &Partition) -> usize {
    let n = lambda.size();
    n * n - n - 2 * lambda.n_statistic()
}

/// GL_n-orbit of nilpotent pairs labelled (λ^(1), λ^(2)):
/// n² − n − 2n(Λ) + |λ^(1)|.
pub fn dim_pair_orbit(first: &Partition, second: &Partition) -> usize {
    let n = first.size() + second.size();
    n * n - n - 2 * (first.n_statistic() + second.n_statistic()) + first.size()
}

/// dim U_P for the stabilizer of M_{m1}: (dim H − dim L)/2 with
/// L = GL_{m1} × Sp_{2(n−m1)}.
pub fn dim_unipotent_radical(n: usize, m1: usize) -> usize {
    (dim_sp(n) - m1 * m1 - dim_sp(n - m1)) / 2
}

/// dim X_Λ = 2 dim U_P + dim O_1 + dim O_2, where O_1 is the pair orbit
/// ((λ^(1)), ∅) and dim O_2 is supplied by the caller.
pub fn dim_stratum(lambda: &Multipartition, dim_o2: Option<usize>) -> Option<usize> {
    let n = lambda.n();
    let m1 = lambda.components[0].size();
    let dim_o1 = dim_pair_orbit(&lambda.components[0], &Partition::empty());
    dim_o2.map(|o2| 2 * dim_unipotent_radical(n, m1) + dim_o1 + o2)
}

/// d_Λ = (dim SX_{m,nil} − dim X_Λ)/2 for m = (|λ^(1)|, |λ^(2)| + |λ^(3)|, 0).
pub fn fiber_dimension(
    lambda: &Multipartition,
    dim_o2: Option<usize>,
) -> Result<Option<usize>, CombinatoricsError> {
    let m = composition_of(lambda);
    let Some(dim_x) = dim_stratum(lambda, dim_o2) else {
        return Ok(None);
    };
    let diff = dim_sx_m_nil(&m) as i64 - dim_x as i64;
    if diff < 0 || diff % 2 != 0 {
        return Err(CombinatoricsError::NotHalfInteger(diff));
    }
    Ok(Some(diff as usize / 2))
}

/// m = (|λ^(1)|, |λ^(2)| + |λ^(3)|, 0), the composition whose P̃(m) holds Λ.
pub fn composition_of(lambda: &Multipartition) -> CompositionM {
    let s = lambda.sizes();
    CompositionM::new(s[0], s[1] + s[2], 0)
}

/// One line of the Springer table.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpringerRow {
    pub lambda: Multipartition,
    pub m: CompositionM,
    pub k: usize,
    pub rho_hat: IrrepLabel,
    pub rho_nat: IrrepLabel,
    pub dim_rho_hat: u128,
    pub dim_rho_nat: u128,
    /// None when no orbit dimension is available for (λ^(2), λ^(3)).
    pub dim_x: Option<usize>,
    pub d_lambda: Option<usize>,
}

/// Source of dim O for the symplectic nilpotent orbit labelled (α, β).
pub type DimOracle<'a> = &'a dyn Fn(&Partition, &Partition) -> Option<usize>;

/// One row per Λ ∈ P_{n,3}, grouped by m ∈ Q^0_{n,3} in increasing m1.
pub fn springer_table(
    n: usize,
    dim_oracle: Option<DimOracle<'_>>,
) -> Result<Vec<SpringerRow>, CombinatoricsError> {
    let mut rows = Vec::new();
    for m in compositions_3_reduced(n) {
        for lambda in enumerate_multipartitions(n, 3) {
            if composition_of(&lambda) != m {
                continue;
            }
            let k = lambda.components[1].size();
            let rho = [
                lambda.components[0].clone(),
                lambda.components[1].clone(),
                lambda.components[2].clone(),
            ];
            let (rho_nat, rho_hat) = nat_and_hat_maps(&rho, &m, k)?;
            let dim_o2 = dim_oracle.and_then(|f| f(&lambda.components[1], &lambda.components[2]));
            let dim_x = dim_stratum(&lambda, dim_o2);
            let d_lambda = fiber_dimension(&lambda, dim_o2)?;
            rows.push(SpringerRow {
                dim_rho_hat: rho_hat.dim(),
                dim_rho_nat: rho_nat.dim(),
                lambda,
                m,
                k,
                rho_hat,
                rho_nat,
                dim_x,
                d_lambda,
            });
        }
    }
    Ok(rows)
}

/// Dimension of the regular nilpotent orbit of sp_2r: dim Sp_2r − r.
pub fn regular_sp_orbit_dim(r: usize) -> usize {
    dim_sp(r) - r
}
