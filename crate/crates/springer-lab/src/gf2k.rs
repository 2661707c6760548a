//! Exact arithmetic in GF(2^k), 1 ≤ k ≤ 16.
//!
//! Two views of the same arithmetic are provided. [`Gf2k<K>`] fixes the degree
//! at compile time and is the scalar type used by every matrix routine; the
//! runtime [`Field`] / [`FieldElem`] pair is used at I/O boundaries where the
//! degree comes from data and mismatches must be reported rather than ruled
//! out by the type checker.
//!
//! Elements are polynomials over GF(2) stored as coefficient bitmasks. Each
//! degree has one fixed irreducible modulus (see [`MODULI`]).

use std::fmt;
use std::hash::Hash;
use std::iter::{Product, Sum};
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use num_traits::{One, Zero};
use thiserror::Error;

/// Largest supported extension degree; also the enumeration guard.
pub const MAX_DEGREE: u32 = 16;

/// Fixed irreducible modulus per degree, indexed by k (entry 0 unused).
pub const MODULI: [u32; 17] = [
    0, 0b11,      // x + 1
    0b111,     // x^2 + x + 1
    0b1011,    // x^3 + x + 1
    0b1_0011,  // x^4 + x + 1
    0b10_0101, // x^5 + x^2 + 1
    0x43,      // x^6 + x + 1
    0x83,      // x^7 + x + 1
    0x11B,     // x^8 + x^4 + x^3 + x + 1
    0x211,     // x^9 + x^4 + 1
    0x409,     // x^10 + x^3 + 1
    0x805,     // x^11 + x^2 + 1
    0x1009,    // x^12 + x^3 + 1
    0x201B,    // x^13 + x^4 + x^3 + x + 1
    0x4021,    // x^14 + x^5 + 1
    0x8003,    // x^15 + x + 1
    0x1_002D,  // x^16 + x^5 + x^3 + x^2 + 1
];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("operands live in different fields: {left} and {right}")]
    Mismatch { left: String, right: String },
    #[error("division by zero")]
    DivisionByZero,
    #[error("enumerating GF(2^{k}) exceeds the resource limit k <= {limit}")]
    ResourceLimit { k: u32, limit: u32 },
    #[error("unsupported extension degree {0} (expected 1..=16)")]
    UnsupportedDegree(u32),
    #[error("unrecognized field name {0:?} (expected \"gf2^k\")")]
    BadName(String),
    #[error("bitmask {bits} is not an element of GF(2^{k})")]
    OutOfRange { bits: u64, k: u32 },
}

/// Carry-less product of two k-bit polynomials reduced modulo `modulus`.
#[inline(always)]
pub fn mul_bits(a: u32, b: u32, k: u32, modulus: u32) -> u32 {
    let mut acc = 0u32;
    let mut a = a;
    let mut b = b;
    while b != 0 {
        if b & 1 != 0 {
            acc ^= a;
        }
        b >>= 1;
        a <<= 1;
        if a >> k != 0 {
            a ^= modulus;
        }
    }
    acc
}

fn pow_bits(base: u32, mut exp: u64, k: u32, modulus: u32) -> u32 {
    let mut result = 1u32;
    let mut b = base;
    while exp > 0 {
        if exp & 1 == 1 {
            result = mul_bits(result, b, k, modulus);
        }
        b = mul_bits(b, b, k, modulus);
        exp >>= 1;
    }
    result
}

/// Inverse by Fermat: a^(2^k - 2).
fn inv_bits(a: u32, k: u32, modulus: u32) -> Option<u32> {
    (a != 0).then(|| pow_bits(a, (1u64 << k) - 2, k, modulus))
}

/// Scalar interface shared by all matrix and geometry code.
pub trait FiniteField:
    Copy
    + Eq
    + Ord
    + Hash
    + Default
    + fmt::Debug
    + fmt::Display
    + Send
    + Sync
    + 'static
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
    + MulAssign
    + Sum
    + Product
{
    const DEGREE: u32;
    const ORDER: usize = 1 << Self::DEGREE;

    /// Panics when `bits` is not below the field order.
    fn from_bits(bits: u32) -> Self;
    fn bits(self) -> u32;
    fn try_inv(self) -> Option<Self>;

    fn frobenius(self) -> Self {
        self * self
    }

    fn pow(self, exp: u64) -> Self {
        let mut result = Self::one();
        let mut base = self;
        let mut e = exp;
        while e > 0 {
            if e & 1 == 1 {
                result *= base;
            }
            base *= base;
            e >>= 1;
        }
        result
    }

    /// All elements in increasing bitmask order.
    fn elements() -> impl Iterator<Item = Self> {
        (0..Self::ORDER as u32).map(Self::from_bits)
    }

    fn nonzero_elements() -> impl Iterator<Item = Self> {
        (1..Self::ORDER as u32).map(Self::from_bits)
    }

    fn descriptor() -> Field {
        Field::new(Self::DEGREE).expect("compile-time degree is supported")
    }
}

/// Element of GF(2^K) with the degree fixed at compile time.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Gf2k<const K: u32>(u16);

impl<const K: u32> Gf2k<K> {
    const MODULUS: u32 = {
        assert!(K >= 1 && K <= MAX_DEGREE, "degree out of range");
        MODULI[K as usize]
    };

    pub const ZERO: Self = Gf2k(0);
    pub const ONE: Self = Gf2k(1);

    pub const fn new(bits: u16) -> Self {
        assert!((bits as u32) >> K == 0, "bitmask exceeds field degree");
        Gf2k(bits)
    }
}

impl<const K: u32> FiniteField for Gf2k<K> {
    const DEGREE: u32 = K;

    #[inline]
    fn from_bits(bits: u32) -> Self {
        assert!(bits >> K == 0, "bitmask {bits} exceeds GF(2^{K})");
        Gf2k(bits as u16)
    }

    #[inline]
    fn bits(self) -> u32 {
        self.0 as u32
    }

    fn try_inv(self) -> Option<Self> {
        inv_bits(self.0 as u32, K, Self::MODULUS).map(|b| Gf2k(b as u16))
    }
}

impl<const K: u32> fmt::Debug for Gf2k<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl<const K: u32> fmt::Display for Gf2k<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl<const K: u32> Zero for Gf2k<K> {
    fn zero() -> Self {
        Gf2k(0)
    }
    fn is_zero(&self) -> bool {
        self.0 == 0
    }
}

impl<const K: u32> One for Gf2k<K> {
    fn one() -> Self {
        Gf2k(1)
    }
}

// characteristic 2: addition and subtraction are both XOR
#[allow(clippy::suspicious_arithmetic_impl, clippy::suspicious_op_assign_impl)]
impl<const K: u32> Add for Gf2k<K> {
    type Output = Self;
    #[inline(always)]
    fn add(self, rhs: Self) -> Self {
        Gf2k(self.0 ^ rhs.0)
    }
}

#[allow(clippy::suspicious_arithmetic_impl, clippy::suspicious_op_assign_impl)]
impl<const K: u32> Sub for Gf2k<K> {
    type Output = Self;
    #[inline(always)]
    fn sub(self, rhs: Self) -> Self {
        Gf2k(self.0 ^ rhs.0)
    }
}

impl<const K: u32> Neg for Gf2k<K> {
    type Output = Self;
    #[inline(always)]
    fn neg(self) -> Self {
        self
    }
}

impl<const K: u32> Mul for Gf2k<K> {
    type Output = Self;
    #[inline(always)]
    fn mul(self, rhs: Self) -> Self {
        if K == 1 {
            return Gf2k(self.0 & rhs.0);
        }
        Gf2k(mul_bits(self.0 as u32, rhs.0 as u32, K, Self::MODULUS) as u16)
    }
}

#[allow(clippy::suspicious_arithmetic_impl, clippy::suspicious_op_assign_impl)]
impl<const K: u32> Div for Gf2k<K> {
    type Output = Self;
    /// Panics on a zero divisor; use [`FiniteField::try_inv`] to handle it.
    fn div(self, rhs: Self) -> Self {
        self * rhs.try_inv().expect("division by zero in GF(2^k)")
    }
}

#[allow(clippy::suspicious_arithmetic_impl, clippy::suspicious_op_assign_impl)]
impl<const K: u32> AddAssign for Gf2k<K> {
    #[inline(always)]
    fn add_assign(&mut self, rhs: Self) {
        self.0 ^= rhs.0;
    }
}

#[allow(clippy::suspicious_arithmetic_impl, clippy::suspicious_op_assign_impl)]
impl<const K: u32> SubAssign for Gf2k<K> {
    #[inline(always)]
    fn sub_assign(&mut self, rhs: Self) {
        self.0 ^= rhs.0;
    }
}

impl<const K: u32> MulAssign for Gf2k<K> {
    #[inline(always)]
    fn mul_assign(&mut self, rhs: Self) {
        *self = *self * rhs;
    }
}

impl<const K: u32> DivAssign for Gf2k<K> {
    fn div_assign(&mut self, rhs: Self) {
        *self = *self / rhs;
    }
}

impl<const K: u32> Sum for Gf2k<K> {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::zero(), |a, b| a + b)
    }
}

impl<const K: u32> Product for Gf2k<K> {
    fn product<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::one(), |a, b| a * b)
    }
}

/// Runtime descriptor of GF(2^k).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Field {
    k: u32,
    modulus: u32,
}

impl Field {
    pub fn new(k: u32) -> Result<Self, FieldError> {
        if !(1..=MAX_DEGREE).contains(&k) {
            return Err(FieldError::UnsupportedDegree(k));
        }
        Ok(Field {
            k,
            modulus: MODULI[k as usize],
        })
    }

    /// Field of order `q`, which must be a supported power of two.
    pub fn with_order(q: u64) -> Result<Self, FieldError> {
        if q < 2 || !q.is_power_of_two() {
            return Err(FieldError::UnsupportedDegree(0));
        }
        Field::new(q.trailing_zeros())
    }

    /// Parses the serialized name `"gf2^k"`.
    pub fn parse(name: &str) -> Result<Self, FieldError> {
        let k = name
            .strip_prefix("gf2^")
            .and_then(|s| s.parse::<u32>().ok())
            .ok_or_else(|| FieldError::BadName(name.to_string()))?;
        Field::new(k)
    }

    pub fn name(&self) -> String {
        format!("gf2^{}", self.k)
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn modulus(&self) -> u32 {
        self.modulus
    }

    pub fn order(&self) -> u64 {
        1u64 << self.k
    }

    pub fn elem(&self, bits: u64) -> Result<FieldElem, FieldError> {
        if bits >> self.k != 0 {
            return Err(FieldError::OutOfRange { bits, k: self.k });
        }
        Ok(FieldElem {
            field: *self,
            bits: bits as u32,
        })
    }

    pub fn zero(&self) -> FieldElem {
        FieldElem {
            field: *self,
            bits: 0,
        }
    }

    pub fn one(&self) -> FieldElem {
        FieldElem {
            field: *self,
            bits: 1,
        }
    }

    /// All elements in increasing bitmask order.
    pub fn enumerate(&self) -> Result<Vec<FieldElem>, FieldError> {
        if self.k > MAX_DEGREE {
            return Err(FieldError::ResourceLimit {
                k: self.k,
                limit: MAX_DEGREE,
            });
        }
        Ok((0..self.order() as u32)
            .map(|bits| FieldElem { field: *self, bits })
            .collect())
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "gf2^{}", self.k)
    }
}

/// Element tagged with its runtime field.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FieldElem {
    field: Field,
    bits: u32,
}

impl FieldElem {
    pub fn field(&self) -> Field {
        self.field
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn is_zero(&self) -> bool {
        self.bits == 0
    }

    fn same_field(&self, other: &FieldElem) -> Result<(), FieldError> {
        if self.field != other.field {
            return Err(FieldError::Mismatch {
                left: self.field.name(),
                right: other.field.name(),
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &FieldElem) -> Result<FieldElem, FieldError> {
        self.same_field(other)?;
        Ok(FieldElem {
            field: self.field,
            bits: self.bits ^ other.bits,
        })
    }

    pub fn mul(&self, other: &FieldElem) -> Result<FieldElem, FieldError> {
        self.same_field(other)?;
        Ok(FieldElem {
            field: self.field,
            bits: mul_bits(self.bits, other.bits, self.field.k, self.field.modulus),
        })
    }

    pub fn inv(&self) -> Result<FieldElem, FieldError> {
        inv_bits(self.bits, self.field.k, self.field.modulus)
            .map(|bits| FieldElem {
                field: self.field,
                bits,
            })
            .ok_or(FieldError::DivisionByZero)
    }

    pub fn frobenius(&self) -> FieldElem {
        FieldElem {
            field: self.field,
            bits: mul_bits(self.bits, self.bits, self.field.k, self.field.modulus),
        }
    }

    pub fn pow(&self, exp: u64) -> FieldElem {
        FieldElem {
            field: self.field,
            bits: pow_bits(self.bits, exp, self.field.k, self.field.modulus),
        }
    }

    /// Converts into the compile-time representation of the same field.
    pub fn to_static<F: FiniteField>(&self) -> Result<F, FieldError> {
        if self.field.k != F::DEGREE {
            return Err(FieldError::Mismatch {
                left: self.field.name(),
                right: F::descriptor().name(),
            });
        }
        Ok(F::from_bits(self.bits))
    }
}

impl fmt::Display for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.bits)
    }
}

/// Runs `$body` with the type alias `$F` bound to `Gf2k<$k>` for a runtime
/// degree `$k`; evaluates `$fallback` for unsupported degrees.
#[macro_export]
macro_rules! with_field {
    ($k:expr, $F:ident => $body:expr, _ => $fallback:expr) => {
        match $k {
            1 => {
                type $F = $crate::gf2k::Gf2k<1>;
                $body
            }
            2 => {
                type $F = $crate::gf2k::Gf2k<2>;
                $body
            }
            3 => {
                type $F = $crate::gf2k::Gf2k<3>;
                $body
            }
            4 => {
                type $F = $crate::gf2k::Gf2k<4>;
                $body
            }
            5 => {
                type $F = $crate::gf2k::Gf2k<5>;
                $body
            }
            6 => {
                type $F = $crate::gf2k::Gf2k<6>;
                $body
            }
            7 => {
                type $F = $crate::gf2k::Gf2k<7>;
                $body
            }
            8 => {
                type $F = $crate::gf2k::Gf2k<8>;
                $body
            }
            9 => {
                type $F = $crate::gf2k::Gf2k<9>;
                $body
            }
            10 => {
                type $F = $crate::gf2k::Gf2k<10>;
                $body
            }
            11 => {
                type $F = $crate::gf2k::Gf2k<11>;
                $body
            }
            12 => {
                type $F = $crate::gf2k::Gf2k<12>;
                $body
            }
            13 => {
                type $F = $crate::gf2k::Gf2k<13>;
                $body
            }
            14 => {
                type $F = $crate::gf2k::Gf2k<14>;
                $body
            }
            15 => {
                type $F = $crate::gf2k::Gf2k<15>;
                $body
            }
            16 => {
                type $F = $crate::gf2k::Gf2k<16>;
                $body
            }
            _ => $fallback,
        }
    };
}
