//! Direct Lagrange inversion of `x = a + l f(x)`.
//!
//! `c_n = (1/n) [w^{n-1}] f(a + w)^n`, computed by powering the truncated
//! Taylor series of `f` around the base point. No orthogonal-polynomial
//! closed form is used anywhere on this path, so the closed forms can be
//! checked against it.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::{rat_ln_abs, Coeff, Rat, TruncSeries};

/// The right-hand side `f` of `x = a + l f(x)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "camelCase")]
pub enum Functional {
    /// `e^x`
    PlainExp,
    /// `e^x / (x - b)`
    ExpOverLinear { b: f64 },
    /// `e^x (x - t)`
    ExpTimesLinear { t: f64 },
    /// `e^{-x^2/2}`
    Gauss,
    /// `e^{e^x}`
    DoubleExp,
    /// `x^2 e^{-2/x}`
    SqExpRecip,
}

impl Functional {
    pub fn check_base(&self, a: f64) -> Result<()> {
        match *self {
            Functional::ExpOverLinear { b } if a == b => Err(Error::PoleAtBase { base: a }),
            Functional::SqExpRecip if a == 0.0 => Err(Error::PoleAtBase { base: a }),
            _ => Ok(()),
        }
    }

    /// Pointwise value `f(x)`.
    pub fn eval(&self, x: f64) -> f64 {
        match *self {
            Functional::PlainExp => x.exp(),
            Functional::ExpOverLinear { b } => x.exp() / (x - b),
            Functional::ExpTimesLinear { t } => x.exp() * (x - t),
            Functional::Gauss => (-x * x / 2.0).exp(),
            Functional::DoubleExp => x.exp().exp(),
            Functional::SqExpRecip => x * x * (-2.0 / x).exp(),
        }
    }

    /// `f'(x)`.
    pub fn derivative(&self, x: f64) -> f64 {
        match *self {
            Functional::PlainExp => x.exp(),
            Functional::ExpOverLinear { b } => {
                let d = x - b;
                x.exp() * (d - 1.0) / (d * d)
            }
            Functional::ExpTimesLinear { t } => x.exp() * (x - t + 1.0),
            Functional::Gauss => -x * (-x * x / 2.0).exp(),
            Functional::DoubleExp => x.exp() * x.exp().exp(),
            Functional::SqExpRecip => (2.0 * x + 2.0) * (-2.0 / x).exp(),
        }
    }
}

/// Taylor coefficients of `f(a + w)` to order `order`.
pub fn f_series<C: Coeff>(desc: &Functional, a: f64, order: usize) -> Result<TruncSeries<C>> {
    desc.check_base(a)?;
    let x = TruncSeries::<C>::identity(a, order)?;
    let one = C::one();
    match *desc {
        Functional::PlainExp => TruncSeries::exp_linear(&one, a, order),
        Functional::ExpOverLinear { b } => {
            let denom = x.checked_sub(&TruncSeries::constant(a, order, C::from_f64(b)?))?;
            TruncSeries::exp_linear(&one, a, order)?.checked_mul(&denom.recip()?)
        }
        Functional::ExpTimesLinear { t } => {
            let lin = x.checked_sub(&TruncSeries::constant(a, order, C::from_f64(t)?))?;
            TruncSeries::exp_linear(&one, a, order)?.checked_mul(&lin)
        }
        Functional::Gauss => {
            let half = one.clone() / C::from_i64(2);
            x.checked_mul(&x)?.scale(&-half).exp()
        }
        Functional::DoubleExp => TruncSeries::exp_linear(&one, a, order)?.exp(),
        Functional::SqExpRecip => {
            let inner = x.recip()?.scale(&C::from_i64(-2)).exp()?;
            x.checked_mul(&x)?.checked_mul(&inner)
        }
    }
}

/// A coefficient `value * e^{exp_multiple}`; `exp_multiple` is always zero
/// in the floating backend.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaledCoeff<C> {
    pub value: C,
    pub exp_multiple: C,
}

impl ScaledCoeff<Rat> {
    pub fn to_f64(&self) -> f64 {
        let (ln, sign) = rat_ln_abs(&self.value);
        if sign == 0.0 {
            return 0.0;
        }
        sign * (ln + self.exp_multiple.as_f64()).exp()
    }
}

/// Lagrange coefficients `c_1..c_N` in the chosen backend.
pub fn lagrange_coefficients_in<C: Coeff>(
    desc: &Functional,
    a: f64,
    order: usize,
) -> Result<Vec<ScaledCoeff<C>>> {
    if order == 0 {
        return Ok(Vec::new());
    }
    // c_N needs w^{N-1} of f^N, so order N-1 is enough.
    let f = f_series::<C>(desc, a, order - 1)?;
    let mut power = f.clone();
    let mut out = Vec::with_capacity(order);
    for n in 1..=order {
        let c = power.coeff(n - 1)?.clone() / C::from_i64(n as i64);
        out.push(ScaledCoeff {
            value: c,
            exp_multiple: power.shift().clone(),
        });
        if n < order {
            power = power.checked_mul(&f)?;
        }
    }
    Ok(out)
}

/// Exact coefficients for binary64 inputs (taken as exact dyadic rationals).
pub fn lagrange_coefficients_exact(
    desc: &Functional,
    a: f64,
    order: usize,
) -> Result<Vec<ScaledCoeff<Rat>>> {
    lagrange_coefficients_in::<Rat>(desc, a, order)
}

/// Coefficients of the root expansion `x(l) = a + sum_n c_n l^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesSolution {
    pub family: Functional,
    pub base: f64,
    pub order: usize,
    /// `coeffs[n-1] = c_n`.
    pub coeffs: Vec<f64>,
}

impl SeriesSolution {
    /// `c_n`, 1-based.
    pub fn coeff(&self, n: usize) -> Option<f64> {
        n.checked_sub(1).and_then(|i| self.coeffs.get(i).copied())
    }
}

pub fn lagrange_coefficients(desc: &Functional, a: f64, order: usize) -> Result<SeriesSolution> {
    let coeffs = lagrange_coefficients_in::<f64>(desc, a, order)?
        .into_iter()
        .map(|c| c.value)
        .collect();
    Ok(SeriesSolution {
        family: *desc,
        base: a,
        order,
        coeffs,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SummationOptions {
    pub max_terms: usize,
    pub tol: f64,
}

impl Default for SummationOptions {
    fn default() -> Self {
        Self {
            max_terms: 40,
            tol: 1e-12,
        }
    }
}

/// Outcome of summing `base + sum_n t_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesSum {
    pub value: f64,
    pub terms_used: usize,
    /// Stopped on the tolerance rule before exhausting the term budget.
    pub converged: bool,
    pub diverged: bool,
    /// `partial_sums[0] = base`, then one entry per term used.
    pub partial_sums: Vec<f64>,
    pub terms: Vec<f64>,
}

/// Number of consecutive magnitude increases (from `n >= 5`) that flags
/// divergence.
const DIVERGENCE_STREAK: usize = 3;
const DIVERGENCE_FROM: usize = 5;

/// Sum `base + sum_{n>=1} term(n)`.
///
/// Stops once two consecutive terms satisfy `|t_n| <= tol |S_n|` (a single
/// small term is not enough: several families have identically zero
/// coefficients at every other order). Zero terms are skipped by the
/// divergence streak, which compares against the last nonzero term.
pub fn sum_terms(
    base: f64,
    l_is_zero: bool,
    opts: &SummationOptions,
    mut term: impl FnMut(usize) -> f64,
) -> SeriesSum {
    let mut out = SeriesSum {
        value: base,
        terms_used: 0,
        converged: false,
        diverged: false,
        partial_sums: vec![base],
        terms: Vec::new(),
    };
    if l_is_zero {
        out.converged = true;
        return out;
    }
    let mut sum = base;
    let mut prev_small = false;
    let mut last_nonzero: Option<f64> = None;
    let mut streak = 0;
    for n in 1..=opts.max_terms {
        let t = term(n);
        if !t.is_finite() {
            out.diverged = true;
            break;
        }
        sum += t;
        out.terms.push(t);
        out.partial_sums.push(sum);
        out.terms_used = n;
        out.value = sum;

        let mag = t.abs();
        if mag != 0.0 {
            if let Some(last) = last_nonzero {
                if n >= DIVERGENCE_FROM && mag > last {
                    streak += 1;
                } else {
                    streak = 0;
                }
            }
            last_nonzero = Some(mag);
        }
        if streak >= DIVERGENCE_STREAK {
            out.diverged = true;
            break;
        }

        let small = mag <= opts.tol * sum.abs();
        if small && prev_small {
            out.converged = true;
            break;
        }
        prev_small = small;
    }
    out
}

/// Partial sums of `a + sum c_n l^n` with the stopping and divergence rules
/// of [`sum_terms`].
pub fn series_eval(sol: &SeriesSolution, l: f64, opts: &SummationOptions) -> SeriesSum {
    let opts = SummationOptions {
        max_terms: opts.max_terms.min(sol.coeffs.len()),
        ..*opts
    };
    sum_terms(sol.base, l == 0.0, &opts, |n| {
        sol.coeffs[n - 1] * l.powi(n as i32)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::{rat, ratio};

    #[test]
    fn plain_exp_series() {
        let s = f_series::<Rat>(&Functional::PlainExp, 0.0, 3).unwrap();
        assert_eq!(s.coeffs(), &[rat(1), rat(1), ratio(1, 2), ratio(1, 6)]);
    }

    #[test]
    fn exp_over_linear_series() {
        let s = f_series::<Rat>(&Functional::ExpOverLinear { b: -1.0 }, 0.0, 1).unwrap();
        assert_eq!(s.coeffs(), &[rat(1), rat(0)]);
    }

    #[test]
    fn exp_times_linear_series() {
        let s = f_series::<Rat>(&Functional::ExpTimesLinear { t: 1.0 }, 0.0, 0).unwrap();
        assert_eq!(s.coeffs(), &[rat(-1)]);
    }

    #[test]
    fn poles_rejected() {
        assert_eq!(
            f_series::<f64>(&Functional::ExpOverLinear { b: 2.0 }, 2.0, 3),
            Err(Error::PoleAtBase { base: 2.0 })
        );
        assert_eq!(
            lagrange_coefficients(&Functional::SqExpRecip, 0.0, 3),
            Err(Error::PoleAtBase { base: 0.0 })
        );
    }

    #[test]
    fn tree_function_coefficients() {
        let c = lagrange_coefficients_exact(&Functional::PlainExp, 0.0, 4).unwrap();
        let values: Vec<Rat> = c.iter().map(|s| s.value.clone()).collect();
        assert_eq!(values, vec![rat(1), rat(1), ratio(3, 2), ratio(8, 3)]);
    }

    #[test]
    fn first_coefficient_is_f_at_base() {
        let cases = [
            Functional::PlainExp,
            Functional::ExpOverLinear { b: -2.5 },
            Functional::ExpTimesLinear { t: 0.75 },
            Functional::Gauss,
            Functional::DoubleExp,
            Functional::SqExpRecip,
        ];
        for desc in cases {
            let sol = lagrange_coefficients(&desc, 0.6, 5).unwrap();
            let f = desc.eval(0.6);
            assert!((sol.coeffs[0] - f).abs() <= 1e-14 * f.abs(), "{desc:?}");
        }
    }

    #[test]
    fn exp_over_linear_second_coefficient() {
        // (1/2) d/dx [e^{2x}/(x-b)^2] at 0 = (1/b^2)(1 + 1/b)
        let b = -3.0;
        let sol = lagrange_coefficients(&Functional::ExpOverLinear { b }, 0.0, 2).unwrap();
        let expected = 1.0 / (b * b) * (1.0 - 1.0 / (0.0 - b));
        assert!((sol.coeffs[1] - expected).abs() < 1e-15);
    }

    #[test]
    fn exact_prefactor_is_carried() {
        let c = lagrange_coefficients_exact(&Functional::PlainExp, 0.5, 3).unwrap();
        assert_eq!(c[2].exp_multiple, ratio(3, 2));
        assert_eq!(c[2].value, ratio(3, 2));
    }

    #[test]
    fn double_exp_exact_only_at_zero() {
        assert!(lagrange_coefficients_exact(&Functional::DoubleExp, 0.0, 4).is_ok());
        assert!(matches!(
            lagrange_coefficients_exact(&Functional::DoubleExp, 0.5, 4),
            Err(Error::InexactBackend(_))
        ));
    }

    #[test]
    fn zero_l_returns_base() {
        let sol = lagrange_coefficients(&Functional::PlainExp, 1.25, 10).unwrap();
        let s = series_eval(&sol, 0.0, &SummationOptions::default());
        assert_eq!(s.value, 1.25);
        assert_eq!(s.terms_used, 0);
        assert!(!s.diverged);
    }

    #[test]
    fn divergence_outside_radius() {
        let sol = lagrange_coefficients(&Functional::PlainExp, 0.0, 40).unwrap();
        let s = series_eval(&sol, 1.0, &SummationOptions::default());
        assert!(s.diverged);
    }

    #[test]
    fn zero_terms_do_not_stop_summation() {
        // x = l e^{-x^2/2} at a = 0 has c_2 = c_4 = ... = 0
        let sol = lagrange_coefficients(&Functional::Gauss, 0.0, 40).unwrap();
        let s = series_eval(&sol, 0.2, &SummationOptions::default());
        assert!(s.converged);
        let x = s.value;
        assert!((x - 0.2 * (-x * x / 2.0).exp()).abs() < 1e-13);
    }
}
