//! Exact arithmetic in `BS(1,k) = < x, y | y x y^-1 = x^k >` as affine maps
//! `z ↦ k^b z + a`.
//!
//! The translation part `a` lives in `ℤ[1/k]` and can be as large as
//! `k^(k^27)`, so it is stored as a sparse signed-digit expansion
//! `Σ d_e k^e` with `0 < |d_e| < k`. Such an expansion is zero exactly when
//! it has no digits, and is an integer exactly when it has no negative
//! exponent: the lowest digit of a nonzero expansion is never divisible by
//! `k`.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// An element of `ℤ[1/k]` as a sparse signed-digit expansion. Digit maps
/// are not unique (`2 - 3 = -1` for `k = 3`), so equality compares values.
#[derive(Clone, Debug)]
pub struct KAdic {
    k: u32,
    digits: BTreeMap<BigInt, i64>,
}

impl KAdic {
    pub fn zero(k: u32) -> KAdic {
        KAdic { k, digits: BTreeMap::new() }
    }

    /// `d · k^e` for a single small digit.
    pub fn monomial(k: u32, digit: i64, exponent: BigInt) -> KAdic {
        let mut out = KAdic::zero(k);
        out.add_digit(exponent, digit);
        out
    }

    pub fn from_bigint(k: u32, n: &BigInt) -> KAdic {
        let mut out = KAdic::zero(k);
        let sign: i64 = if n.is_negative() { -1 } else { 1 };
        let (_, radix) = n.to_radix_le(k);
        for (e, d) in radix.into_iter().enumerate() {
            if d != 0 {
                out.digits.insert(BigInt::from(e), sign * i64::from(d));
            }
        }
        out
    }

    pub fn base(&self) -> u32 {
        self.k
    }

    pub fn is_zero(&self) -> bool {
        self.digits.is_empty()
    }

    pub fn is_integer(&self) -> bool {
        self.digits.keys().next().is_none_or(|e| !e.is_negative())
    }

    /// Number of nonzero digits.
    pub fn weight(&self) -> usize {
        self.digits.len()
    }

    pub fn top_exponent(&self) -> Option<&BigInt> {
        self.digits.keys().next_back()
    }

    fn add_digit(&mut self, mut exponent: BigInt, mut digit: i64) {
        let k = i64::from(self.k);
        while digit != 0 {
            let current = self.digits.remove(&exponent).unwrap_or(0) + digit;
            // current lies in (-2k, 2k); fold it back into (-k, k)
            let carry = if current >= k {
                1
            } else if current <= -k {
                -1
            } else {
                0
            };
            let rest = current - carry * k;
            if rest != 0 {
                self.digits.insert(exponent.clone(), rest);
            }
            digit = carry;
            exponent += 1;
        }
    }

    pub fn add(&self, other: &KAdic) -> KAdic {
        self.add_shifted(other, &BigInt::zero())
    }

    /// `self + k^shift · other`.
    pub fn add_shifted(&self, other: &KAdic, shift: &BigInt) -> KAdic {
        let (mut out, small, small_shift) = if other.weight() <= self.weight() || !shift.is_zero() {
            (self.clone(), other, shift.clone())
        } else {
            (other.clone(), self, BigInt::zero())
        };
        for (e, &d) in &small.digits {
            out.add_digit(e + &small_shift, d);
        }
        out
    }

    pub fn neg(&self) -> KAdic {
        KAdic { k: self.k, digits: self.digits.iter().map(|(e, d)| (e.clone(), -d)).collect() }
    }

    /// `k^shift · self`.
    pub fn shift(&self, shift: &BigInt) -> KAdic {
        KAdic { k: self.k, digits: self.digits.iter().map(|(e, &d)| (e + shift, d)).collect() }
    }

    /// The dense integer value, refusing values above `budget_bits`.
    pub fn to_bigint(&self, budget_bits: u64) -> Result<BigInt> {
        if !self.is_integer() {
            return Err(Error::InvalidParameter("k-adic value is not an integer".into()));
        }
        let Some(top) = self.top_exponent() else {
            return Ok(BigInt::zero());
        };
        let bits = top.to_f64().unwrap_or(f64::INFINITY) * f64::from(self.k).log2();
        if bits > budget_bits as f64 {
            return Err(Error::TowerOverflow(format!(
                "integer with about {bits:.0} bits exceeds the {budget_bits}-bit budget"
            )));
        }
        let k = BigInt::from(self.k);
        let mut value = BigInt::zero();
        let mut pos = top.to_u64().expect("checked above");
        // Horner evaluation from the top digit down
        for (e, &d) in self.digits.iter().rev() {
            let e = e.to_u64().expect("non-negative and below top");
            value *= num_traits::pow(k.clone(), (pos - e) as usize);
            value += d;
            pos = e;
        }
        value *= num_traits::pow(k, pos as usize);
        Ok(value)
    }

    /// The exact rational value as `(p, e)` meaning `p / k^e`.
    pub fn to_rational(&self, budget_bits: u64) -> Result<(BigInt, BigInt)> {
        let low = match self.digits.keys().next() {
            Some(e) if e.is_negative() => -e.clone(),
            _ => BigInt::zero(),
        };
        let p = self.shift(&low).to_bigint(budget_bits)?;
        Ok((p, low))
    }
}

impl PartialEq for KAdic {
    fn eq(&self, other: &KAdic) -> bool {
        self.k == other.k && self.add(&other.neg()).is_zero()
    }
}

impl Eq for KAdic {}

impl fmt::Display for KAdic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.digits.is_empty() {
            return write!(f, "0");
        }
        let terms: Vec<String> = self.digits.iter().rev().map(|(e, d)| format!("{d}*{}^{e}", self.k)).collect();
        write!(f, "{}", terms.join(" + "))
    }
}

/// The affine map `z ↦ k^b z + a`. With `x = (1, 0)` and `y = (0, 1)` the
/// product is `(a, b)(a', b') = (a + k^b a', b + b')`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffinePair {
    pub a: KAdic,
    pub b: BigInt,
}

impl AffinePair {
    pub fn identity(k: u32) -> AffinePair {
        AffinePair { a: KAdic::zero(k), b: BigInt::zero() }
    }

    /// `x^n`.
    pub fn x_power(k: u32, n: &BigInt) -> AffinePair {
        AffinePair { a: KAdic::from_bigint(k, n), b: BigInt::zero() }
    }

    /// `y^n`.
    pub fn y_power(k: u32, n: BigInt) -> AffinePair {
        AffinePair { a: KAdic::zero(k), b: n }
    }

    pub fn x(k: u32) -> AffinePair {
        AffinePair::x_power(k, &BigInt::one())
    }

    pub fn y(k: u32) -> AffinePair {
        AffinePair::y_power(k, BigInt::one())
    }

    pub fn k(&self) -> u32 {
        self.a.base()
    }

    pub fn is_identity(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn mul(&self, other: &AffinePair) -> AffinePair {
        AffinePair { a: self.a.add_shifted(&other.a, &self.b), b: &self.b + &other.b }
    }

    pub fn mul_assign(&mut self, other: &AffinePair) {
        *self = self.mul(other);
    }

    /// Right multiplication by `x^{±1}`.
    pub fn mul_x(&mut self, sign: i64) {
        let b = self.b.clone();
        self.a.add_digit(b, sign);
    }

    pub fn inverse(&self) -> AffinePair {
        AffinePair { a: self.a.shift(&-&self.b).neg(), b: -&self.b }
    }

    /// `n` with `self = x^n`, if the element lies in `<x>`.
    pub fn as_x_power(&self, budget_bits: u64) -> Result<Option<BigInt>> {
        if !self.b.is_zero() || !self.a.is_integer() {
            return Ok(None);
        }
        self.a.to_bigint(budget_bits).map(Some)
    }

    /// `n` with `self = y^n`, if the element lies in `<y>`.
    pub fn as_y_power(&self) -> Option<&BigInt> {
        self.a.is_zero().then_some(&self.b)
    }
}

impl fmt::Display for AffinePair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.a, self.b)
    }
}
