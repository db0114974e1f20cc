//! Exponential-Laurent expressions `e^{m u} * sum_k c_k u^k`.
//!
//! The set is closed under `d/du`, under multiplication, and under the
//! reciprocal-variable derivative `-u^2 d/du`, which is all the exact
//! identity checks need.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::series::{rat, Rat};

#[derive(Debug, Clone)]
pub struct ExpLaurent {
    rate: i64,
    terms: BTreeMap<i64, Rat>,
}

impl ExpLaurent {
    pub fn new(rate: i64, terms: impl IntoIterator<Item = (i64, Rat)>) -> Self {
        let mut out = Self {
            rate,
            terms: BTreeMap::new(),
        };
        for (k, c) in terms {
            out.add_term(k, c);
        }
        out
    }

    pub fn zero() -> Self {
        Self::new(0, [])
    }

    pub fn constant(c: Rat) -> Self {
        Self::new(0, [(0, c)])
    }

    /// `c * e^{rate u} * u^power`.
    pub fn monomial(rate: i64, power: i64, c: Rat) -> Self {
        Self::new(rate, [(power, c)])
    }

    /// `u^power` with unit coefficient and no exponential.
    pub fn power(power: i64) -> Self {
        Self::monomial(0, power, Rat::one())
    }

    pub fn rate(&self) -> i64 {
        self.rate
    }

    pub fn terms(&self) -> &BTreeMap<i64, Rat> {
        &self.terms
    }

    pub fn coeff(&self, power: i64) -> Rat {
        self.terms.get(&power).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn min_power(&self) -> Option<i64> {
        self.terms.keys().next().copied()
    }

    pub fn max_power(&self) -> Option<i64> {
        self.terms.keys().next_back().copied()
    }

    fn add_term(&mut self, power: i64, c: Rat) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(power).or_insert_with(Rat::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&power);
        }
    }

    /// Sum of two expressions; their exponential rates must agree unless one
    /// side is zero.
    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        if other.is_zero() {
            return Ok(self.clone());
        }
        if self.is_zero() {
            return Ok(other.clone());
        }
        if self.rate != other.rate {
            return Err(Error::ContractViolation(format!(
                "cannot add e^({}u) and e^({}u) expressions",
                self.rate, other.rate
            )));
        }
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.add_term(*k, c.clone());
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.checked_add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        self.scale(&-Rat::one())
    }

    pub fn scale(&self, c: &Rat) -> Self {
        Self::new(self.rate, self.terms.iter().map(|(k, v)| (*k, v * c)))
    }

    /// Multiply by `u^k`.
    pub fn shift_power(&self, k: i64) -> Self {
        Self {
            rate: self.rate,
            terms: self.terms.iter().map(|(p, c)| (p + k, c.clone())).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::new(self.rate + other.rate, []);
        for (i, a) in &self.terms {
            for (j, b) in &other.terms {
                out.add_term(i + j, a * b);
            }
        }
        out
    }

    /// `d/du`: `c u^k -> c m u^k + c k u^{k-1}`.
    pub fn derive(&self) -> Self {
        let m = rat(self.rate);
        let mut out = Self::new(self.rate, []);
        for (k, c) in &self.terms {
            out.add_term(*k, c * &m);
            out.add_term(k - 1, c * rat(*k));
        }
        out
    }

    pub fn derive_n(&self, n: usize) -> Self {
        (0..n).fold(self.clone(), |acc, _| acc.derive())
    }

    /// Derivative with respect to the reciprocal variable, `-u^2 d/du`.
    pub fn recip_derive(&self) -> Self {
        self.derive().shift_power(2).neg()
    }

    /// `u^2 d/du`.
    pub fn square_derive(&self) -> Self {
        self.derive().shift_power(2)
    }
}

impl PartialEq for ExpLaurent {
    fn eq(&self, other: &Self) -> bool {
        if self.is_zero() && other.is_zero() {
            return true;
        }
        self.rate == other.rate && self.terms == other.terms
    }
}

impl Eq for ExpLaurent {}

impl fmt::Display for ExpLaurent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        if self.rate != 0 {
            write!(f, "e^({}u)*(", self.rate)?;
        }
        for (i, (k, c)) in self.terms.iter().enumerate() {
            let sign = if c.is_negative() { "-" } else { "+" };
            if i == 0 {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            let mag = c.abs();
            match *k {
                0 => write!(f, "{mag}")?,
                _ if mag.is_one() => write!(f, "u^{k}")?,
                _ => write!(f, "{mag}*u^{k}")?,
            }
        }
        if self.rate != 0 {
            write!(f, ")")?;
        }
        Ok(())
    }
}
