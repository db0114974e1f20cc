//! Exact coefficient tables for the Bessel (Krall-Frink), generalized
//! Laguerre, probabilists' Hermite and Touchard families.
//!
//! Each family has a primary constructor plus an independent second route
//! (explicit sum vs. recurrence) so the two can be cross-checked.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::series::{rat, Coeff, Rat};

/// Dense polynomial with exact rational coefficients, index = power.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RatPoly {
    coeffs: Vec<Rat>,
}

impl RatPoly {
    pub fn new(mut coeffs: Vec<Rat>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| rat(c)).collect())
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::from_ints(&[1])
    }

    /// `c * x^k`.
    pub fn monomial(k: usize, c: Rat) -> Self {
        let mut coeffs = vec![Rat::zero(); k + 1];
        coeffs[k] = c;
        Self::new(coeffs)
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> Rat {
        self.coeffs.get(k).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Rat {
        self.coeffs.last().cloned().unwrap_or_else(Rat::zero)
    }

    pub fn has_integer_coeffs(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_integer())
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        Self::new((0..n).map(|k| self.coeff(k) + other.coeff(k)).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&-Rat::one()))
    }

    pub fn scale(&self, c: &Rat) -> Self {
        Self::new(self.coeffs.iter().map(|x| x * c).collect())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = vec![Rat::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }

    /// Multiply by `x`.
    pub fn mul_x(&self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut coeffs = Vec::with_capacity(self.coeffs.len() + 1);
        coeffs.push(Rat::zero());
        coeffs.extend(self.coeffs.iter().cloned());
        Self::new(coeffs)
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * rat(k as i64))
                .collect(),
        )
    }

    /// Horner evaluation in the caller's coefficient field.
    pub fn eval<C: Coeff>(&self, x: &C) -> C {
        self.coeffs
            .iter()
            .rev()
            .fold(C::zero(), |acc, c| acc * x.clone() + C::from_rat(c))
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        self.eval(&x)
    }

    pub fn eval_rat(&self, x: &Rat) -> Rat {
        self.eval(x)
    }
}

impl fmt::Display for RatPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if c.is_negative() { "-" } else { "+" })?;
            }
            first = false;
            let mag = c.abs();
            match k {
                0 => write!(f, "{mag}")?,
                1 if mag.is_one() => write!(f, "x")?,
                1 => write!(f, "{mag}*x")?,
                _ if mag.is_one() => write!(f, "x^{k}")?,
                _ => write!(f, "{mag}*x^{k}")?,
            }
        }
        Ok(())
    }
}

pub fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * k)
}

pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    (0..k).fold(BigInt::one(), |acc, i| acc * (n - i) / (i + 1))
}

fn int(v: BigInt) -> Rat {
    Rat::from_integer(v)
}

/// Krall-Frink Bessel polynomial `B_n(z) = sum_k (n+k)!/((n-k)! k!) (z/2)^k`.
pub fn bessel_poly(n: usize) -> RatPoly {
    let n = n as u64;
    let coeffs = (0..=n)
        .map(|k| {
            let num = factorial(n + k);
            let den = factorial(n - k) * factorial(k) * (BigInt::one() << k);
            Rat::new(num, den)
        })
        .collect();
    RatPoly::new(coeffs)
}

/// `B_n = (2n-1) z B_{n-1} + B_{n-2}`, seeded with `1` and `1 + z`.
pub fn bessel_poly_by_recurrence(n: usize) -> RatPoly {
    let mut prev = RatPoly::one();
    if n == 0 {
        return prev;
    }
    let mut cur = RatPoly::from_ints(&[1, 1]);
    for m in 2..=n {
        let next = cur.mul_x().scale(&rat(2 * m as i64 - 1)).add(&prev);
        prev = cur;
        cur = next;
    }
    cur
}

/// Generalized Laguerre `L_n^(alpha)(x) = sum_k (-1)^k C(n+alpha, n-k) x^k / k!`.
pub fn laguerre_poly(n: usize, alpha: u32) -> RatPoly {
    let n = n as u64;
    let coeffs = (0..=n)
        .map(|k| {
            let c = Rat::new(binomial(n + alpha as u64, n - k), factorial(k));
            if k % 2 == 1 {
                -c
            } else {
                c
            }
        })
        .collect();
    RatPoly::new(coeffs)
}

/// `(k+1) L_{k+1} = (2k+1+alpha-x) L_k - (k+alpha) L_{k-1}`.
pub fn laguerre_poly_by_recurrence(n: usize, alpha: u32) -> RatPoly {
    let a = alpha as i64;
    let mut prev = RatPoly::one();
    if n == 0 {
        return prev;
    }
    let mut cur = RatPoly::from_ints(&[1 + a, -1]);
    for k in 1..n as i64 {
        let lin = RatPoly::from_ints(&[2 * k + 1 + a, -1]);
        let next = lin
            .mul(&cur)
            .sub(&prev.scale(&rat(k + a)))
            .scale(&Rat::new(BigInt::one(), BigInt::from(k + 1)));
        prev = cur;
        cur = next;
    }
    cur
}

/// Probabilists' Hermite via `He_{n+1} = x He_n - n He_{n-1}`.
pub fn hermite_prob_poly(n: usize) -> RatPoly {
    let mut prev = RatPoly::one();
    if n == 0 {
        return prev;
    }
    let mut cur = RatPoly::from_ints(&[0, 1]);
    for m in 1..n {
        let next = cur.mul_x().sub(&prev.scale(&rat(m as i64)));
        prev = cur;
        cur = next;
    }
    cur
}

/// `He_n = n! sum_m (-1)^m x^{n-2m} / (m! (n-2m)! 2^m)`.
pub fn hermite_prob_poly_by_sum(n: usize) -> RatPoly {
    let n = n as u64;
    let mut coeffs = vec![Rat::zero(); n as usize + 1];
    for m in 0..=n / 2 {
        let den = factorial(m) * factorial(n - 2 * m) * (BigInt::one() << m);
        let c = Rat::new(factorial(n), den);
        coeffs[(n - 2 * m) as usize] = if m % 2 == 1 { -c } else { c };
    }
    RatPoly::new(coeffs)
}

/// Touchard polynomial in `y = e^x`: `phi_{n+1}(y) = y (phi_n(y) + phi_n'(y))`.
pub fn touchard_poly(n: usize) -> RatPoly {
    (0..n).fold(RatPoly::one(), |p, _| p.add(&p.derivative()).mul_x())
}

/// Stirling numbers of the second kind `S(n, k)` for `k = 0..=n`, via
/// `S(n, k) = k S(n-1, k) + S(n-1, k-1)`.
pub fn stirling2_row(n: usize) -> Vec<BigInt> {
    let mut row = vec![BigInt::one()];
    for m in 1..=n {
        let mut next = vec![BigInt::zero(); m + 1];
        for k in 1..=m {
            let stay = if k < m { &row[k] * k } else { BigInt::zero() };
            next[k] = stay + &row[k - 1];
        }
        row = next;
    }
    row
}

pub fn touchard_poly_by_stirling(n: usize) -> RatPoly {
    RatPoly::new(stirling2_row(n).into_iter().map(int).collect())
}
