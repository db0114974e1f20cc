//! Truncated power series around a base point.
//!
//! A `TruncSeries<C>` stands for `e^{shift} * sum_{k<=N} c_k w^k` with
//! `w = x - base`. The exponential prefactor is only used by the exact
//! backend, where `e^{c*a}` cannot be a rational coefficient; the floating
//! backend folds it into the coefficients and keeps `shift = 0`.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Exact rational number (arbitrary precision, always in lowest terms).
pub type Rat = BigRational;

/// Coefficient field shared by the exact and the floating backends.
pub trait Coeff:
    Clone
    + PartialEq
    + Debug
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Send
    + Sync
{
    fn from_i64(v: i64) -> Self;

    /// Exact for `Rat`; every finite binary64 value is a dyadic rational.
    fn from_f64(v: f64) -> Result<Self>;

    fn from_rat(r: &Rat) -> Self;

    fn as_f64(&self) -> f64;

    /// `e^self` when the backend can hold it as a coefficient.
    fn try_exp(&self) -> Option<Self>;

    /// Cauchy product `out_k = sum_{i+j=k} a_i b_j` for `k < len`.
    fn convolve(a: &[Self], b: &[Self], len: usize) -> Vec<Self> {
        let mut out = vec![Self::zero(); len];
        for (i, x) in a.iter().enumerate().take(len) {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate().take(len - i) {
                out[i + j] = out[i + j].clone() + x.clone() * y.clone();
            }
        }
        out
    }
}

impl Coeff for f64 {
    fn from_i64(v: i64) -> Self {
        v as f64
    }

    fn from_f64(v: f64) -> Result<Self> {
        Ok(v)
    }

    fn from_rat(r: &Rat) -> Self {
        rat_to_f64(r)
    }

    fn as_f64(&self) -> f64 {
        *self
    }

    fn try_exp(&self) -> Option<Self> {
        Some(self.exp())
    }
}

impl Coeff for Rat {
    fn from_i64(v: i64) -> Self {
        Rat::from_integer(BigInt::from(v))
    }

    fn from_f64(v: f64) -> Result<Self> {
        Rat::from_float(v).ok_or_else(|| Error::InexactBackend(format!("non-finite value {v}")))
    }

    fn from_rat(r: &Rat) -> Self {
        r.clone()
    }

    fn as_f64(&self) -> f64 {
        rat_to_f64(self)
    }

    fn try_exp(&self) -> Option<Self> {
        self.is_zero().then(Rat::one)
    }

    /// Clears denominators first so the inner loop is integer-only; a
    /// rational sum would take two big gcds per step.
    fn convolve(a: &[Self], b: &[Self], len: usize) -> Vec<Self> {
        let (na, da) = common_denominator(a);
        let (nb, db) = common_denominator(b);
        let mut out = vec![BigInt::zero(); len];
        for (i, x) in na.iter().enumerate().take(len) {
            if x.is_zero() {
                continue;
            }
            for (j, y) in nb.iter().enumerate().take(len - i) {
                out[i + j] += x * y;
            }
        }
        let den = da * db;
        out.into_iter().map(|n| Rat::new(n, den.clone())).collect()
    }
}

/// Integer numerators over the least common denominator.
fn common_denominator(v: &[Rat]) -> (Vec<BigInt>, BigInt) {
    let mut lcm = BigInt::one();
    for x in v {
        if !x.denom().is_one() {
            lcm = lcm.lcm(x.denom());
        }
    }
    let nums = v
        .iter()
        .map(|x| x.numer() * (&lcm / x.denom()))
        .collect();
    (nums, lcm)
}

/// `Rat::from_integer` shorthand.
pub fn rat(n: i64) -> Rat {
    Rat::from_i64(n)
}

/// `n/d` as an exact rational. Panics when `d == 0`.
pub fn ratio(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_to_f64(r: &Rat) -> f64 {
    if let Some(v) = r.to_f64() {
        if v.is_finite() && (v != 0.0 || r.is_zero()) {
            return v;
        }
    }
    let (ln, sign) = rat_ln_abs(r);
    sign * ln.exp()
}

/// `ln|n|` for a nonzero big integer, without overflowing to infinity.
pub fn bigint_ln_abs(n: &BigInt) -> f64 {
    let bits = n.bits();
    if bits <= 1000 {
        return n.abs().to_f64().unwrap_or(f64::INFINITY).ln();
    }
    let shift = bits - 64;
    let top: BigInt = n.abs() >> shift;
    top.to_f64().unwrap_or(f64::INFINITY).ln() + shift as f64 * std::f64::consts::LN_2
}

/// `(ln|r|, sign(r))`; `(-inf, 0.0)` for zero.
pub fn rat_ln_abs(r: &Rat) -> (f64, f64) {
    if r.is_zero() {
        return (f64::NEG_INFINITY, 0.0);
    }
    let sign = if r.is_negative() { -1.0 } else { 1.0 };
    (bigint_ln_abs(r.numer()) - bigint_ln_abs(r.denom()), sign)
}

#[derive(Debug, Clone, PartialEq)]
pub struct TruncSeries<C> {
    base: f64,
    coeffs: Vec<C>,
    shift: C,
}

impl<C: Coeff> TruncSeries<C> {
    /// Series with the given coefficients; the order is `coeffs.len() - 1`.
    pub fn new(base: f64, coeffs: Vec<C>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::ContractViolation(
                "a truncated series needs at least one coefficient".into(),
            ));
        }
        Ok(Self {
            base,
            coeffs,
            shift: C::zero(),
        })
    }

    /// Coefficients `c_0..c_order`, zero-padded or truncated as needed.
    pub fn from_prefix(base: f64, order: usize, prefix: &[C]) -> Self {
        let coeffs = (0..=order)
            .map(|k| prefix.get(k).cloned().unwrap_or_else(C::zero))
            .collect();
        Self {
            base,
            coeffs,
            shift: C::zero(),
        }
    }

    pub fn zero(base: f64, order: usize) -> Self {
        Self::from_prefix(base, order, &[])
    }

    pub fn constant(base: f64, order: usize, c: C) -> Self {
        Self::from_prefix(base, order, &[c])
    }

    pub fn one(base: f64, order: usize) -> Self {
        Self::constant(base, order, C::one())
    }

    /// The series of `x` itself: `base + w`.
    pub fn identity(base: f64, order: usize) -> Result<Self> {
        Ok(Self::from_prefix(base, order, &[C::from_f64(base)?, C::one()]))
    }

    /// `e^{c (base + w)}` to order N.
    pub fn exp_linear(c: &C, base: f64, order: usize) -> Result<Self> {
        let exponent = c.clone() * C::from_f64(base)?;
        let mut coeffs = Vec::with_capacity(order + 1);
        let mut term = C::one();
        coeffs.push(term.clone());
        for k in 1..=order {
            term = term * c.clone() / C::from_i64(k as i64);
            coeffs.push(term.clone());
        }
        let mut out = Self {
            base,
            coeffs,
            shift: C::zero(),
        };
        out.absorb_exp(exponent);
        Ok(out)
    }

    pub fn base(&self) -> f64 {
        self.base
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[C] {
        &self.coeffs
    }

    /// Exponent of the symbolic `e^{shift}` prefactor (zero unless exact).
    pub fn shift(&self) -> &C {
        &self.shift
    }

    pub fn coeff(&self, k: usize) -> Result<&C> {
        self.coeffs.get(k).ok_or(Error::IndexOutOfRange {
            index: k,
            order: self.order(),
        })
    }

    pub fn truncate(&self, order: usize) -> Self {
        let mut out = Self::from_prefix(self.base, order, &self.coeffs);
        out.shift = self.shift.clone();
        out
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.base != other.base || self.order() != other.order() {
            return Err(Error::ContractViolation(format!(
                "series mismatch: base {} order {} vs base {} order {}",
                self.base,
                self.order(),
                other.base,
                other.order()
            )));
        }
        Ok(())
    }

    fn check_same_shift(&self, other: &Self) -> Result<()> {
        if self.shift != other.shift {
            return Err(Error::ContractViolation(
                "cannot add series carrying different exponential prefactors".into(),
            ));
        }
        Ok(())
    }

    /// Multiply by `e^{exponent}`: folded when the backend allows it.
    fn absorb_exp(&mut self, exponent: C) {
        match exponent.try_exp() {
            Some(factor) => {
                if !factor.is_one() {
                    for c in &mut self.coeffs {
                        *c = c.clone() * factor.clone();
                    }
                }
            }
            None => self.shift = self.shift.clone() + exponent,
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        self.check_same_shift(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a.clone() + b.clone())
            .collect();
        Ok(Self {
            base: self.base,
            coeffs,
            shift: self.shift.clone(),
        })
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.checked_add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        self.scale(&-C::one())
    }

    pub fn scale(&self, c: &C) -> Self {
        Self {
            base: self.base,
            coeffs: self.coeffs.iter().map(|x| x.clone() * c.clone()).collect(),
            shift: self.shift.clone(),
        }
    }

    /// Cauchy product truncated at the common order.
    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let coeffs = C::convolve(&self.coeffs, &other.coeffs, self.order() + 1);
        Ok(Self {
            base: self.base,
            coeffs,
            shift: self.shift.clone() + other.shift.clone(),
        })
    }

    /// `self^n` by binary powering; `n = 0` gives the unit series.
    pub fn pow(&self, n: u32) -> Self {
        let mut result = Self::one(self.base, self.order());
        let mut square = self.clone();
        let mut e = n;
        while e > 0 {
            if e & 1 == 1 {
                result = result.checked_mul(&square).expect("same shape");
            }
            e >>= 1;
            if e > 0 {
                square = square.checked_mul(&square).expect("same shape");
            }
        }
        result
    }

    /// Multiplicative inverse, `r_k = -(1/c_0) sum_{j=1..k} c_j r_{k-j}`.
    pub fn recip(&self) -> Result<Self> {
        let c0 = &self.coeffs[0];
        if c0.is_zero() {
            return Err(Error::NonInvertibleSeries);
        }
        let inv0 = C::one() / c0.clone();
        let mut out: Vec<C> = Vec::with_capacity(self.coeffs.len());
        out.push(inv0.clone());
        for k in 1..self.coeffs.len() {
            let mut acc = C::zero();
            for j in 1..=k {
                acc = acc + self.coeffs[j].clone() * out[k - j].clone();
            }
            out.push(-(acc * inv0.clone()));
        }
        Ok(Self {
            base: self.base,
            coeffs: out,
            shift: -self.shift.clone(),
        })
    }

    /// `e^{g(w)}` for this series `g`. The constant term becomes a prefactor
    /// (folded or carried); the remainder uses `k E_k = sum_j j g_j E_{k-j}`.
    pub fn exp(&self) -> Result<Self> {
        if !self.shift.is_zero() {
            return Err(Error::InexactBackend(
                "exponential of a series with a transcendental prefactor".into(),
            ));
        }
        let order = self.order();
        let mut e: Vec<C> = Vec::with_capacity(order + 1);
        e.push(C::one());
        for k in 1..=order {
            let mut acc = C::zero();
            for j in 1..=k {
                if !self.coeffs[j].is_zero() {
                    acc = acc + C::from_i64(j as i64) * self.coeffs[j].clone() * e[k - j].clone();
                }
            }
            e.push(acc / C::from_i64(k as i64));
        }
        let mut out = Self {
            base: self.base,
            coeffs: e,
            shift: C::zero(),
        };
        out.absorb_exp(self.coeffs[0].clone());
        Ok(out)
    }

    /// Evaluate at `w` in floating point (including any carried prefactor).
    pub fn eval_f64(&self, w: f64) -> f64 {
        let poly = self
            .coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * w + c.as_f64());
        poly * self.shift.as_f64().exp()
    }

    /// Convert coefficients to floating point, folding the prefactor.
    pub fn to_f64_series(&self) -> TruncSeries<f64> {
        let shift = self.shift.as_f64();
        TruncSeries {
            base: self.base,
            coeffs: self
                .coeffs
                .iter()
                .map(|c| scaled_to_f64(c, shift))
                .collect(),
            shift: 0.0,
        }
    }
}

/// `c * e^{shift}` without overflowing the intermediate `e^{shift}`.
pub fn scaled_to_f64<C: Coeff>(c: &C, shift: f64) -> f64 {
    let v = c.as_f64();
    if shift == 0.0 || v == 0.0 {
        return v;
    }
    let direct = v * shift.exp();
    if direct.is_finite() && direct != 0.0 {
        return direct;
    }
    v.signum() * (v.abs().ln() + shift).exp()
}
