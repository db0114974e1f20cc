//! Root solvers whose series terms are written with orthogonal polynomials.
//!
//! Every family solves `x = base + l f(x)` on the branch through `x(0) = base`:
//!
//! | family        | equation                    | term polynomial        |
//! |---------------|-----------------------------|------------------------|
//! | `quadexp`     | `(x-a)(x-b) = l e^x`        | Bessel `B_{n-1}`       |
//! | `ratioexp`    | `(x-s)/(x-t) = l e^x`       | Laguerre `L_{n-1}^(1)` |
//! | `gauss`       | `x = a + l e^{-x^2/2}`      | Hermite `He_{n-1}`     |
//! | `doubleexp`   | `x = a + l e^{e^x}`         | Touchard `phi_{n-1}`   |
//! | `besselrecip` | `x = a + l x^2 e^{-2/x}`    | none (direct inversion)|
//! | `plainexp`    | `x = a + l e^x`             | `n^{n-1}/n!`           |
//!
//! Terms are assembled as `(ln|t|, sign)` so that the `n^n`-type growth of
//! the prefactors never overflows before the final conversion. Polynomial
//! factors are evaluated exactly on the rational value of the argument where
//! the argument is rational; those alternating sums lose all precision in
//! binary64 once `n / |a - b|` is moderately large.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lagrange::{lagrange_coefficients, sum_terms, Functional, SeriesSum, SummationOptions};
use crate::numeric::wynn_epsilon;
use crate::orthopoly::{
    bessel_poly, hermite_prob_poly, laguerre_poly, stirling2_row, RatPoly,
};
use crate::series::{bigint_ln_abs, rat, rat_ln_abs, Coeff, Rat};

/// Residual threshold (relative to `max(1, |l|)`) below which a root counts
/// as converged.
pub const RESIDUAL_THRESHOLD: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    QuadExp,
    RatioExp,
    Gauss,
    DoubleExp,
    BesselRecip,
    PlainExp,
}

impl Family {
    pub const ALL: [Family; 6] = [
        Family::QuadExp,
        Family::RatioExp,
        Family::Gauss,
        Family::DoubleExp,
        Family::BesselRecip,
        Family::PlainExp,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::QuadExp => "quadexp",
            Family::RatioExp => "ratioexp",
            Family::Gauss => "gauss",
            Family::DoubleExp => "doubleexp",
            Family::BesselRecip => "besselrecip",
            Family::PlainExp => "plainexp",
        }
    }

    /// Whether a printed (uncorrected) term formula is available.
    pub fn has_printed_form(self) -> bool {
        matches!(self, Family::RatioExp | Family::Gauss | Family::DoubleExp)
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::ContractViolation(format!("unknown family `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadExpParams {
    pub a: f64,
    pub b: f64,
    pub l: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatioExpParams {
    pub s: f64,
    pub t: f64,
    pub l: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalarShiftParams {
    pub a: f64,
    pub l: f64,
}

/// Which quadexp expansion to sum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum BranchChoice {
    #[default]
    Auto,
    BaseA,
    BaseB,
}

/// The branch a report's root lies on. Families other than quadexp always
/// report `baseA` (the branch through their single base point).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Branch {
    BaseA,
    BaseB,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    pub max_terms: usize,
    pub tol: f64,
    pub accelerate: bool,
    pub branch: BranchChoice,
    /// Sum the formula exactly as printed instead of the validated one.
    pub paper_as_printed: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            max_terms: 40,
            tol: 1e-12,
            accelerate: false,
            branch: BranchChoice::Auto,
            paper_as_printed: false,
        }
    }
}

impl SolveOptions {
    fn validate(&self) -> Result<()> {
        if self.max_terms == 0 {
            return Err(Error::ContractViolation("maxTerms must be at least 1".into()));
        }
        if !(self.tol > 0.0) {
            return Err(Error::ContractViolation("tol must be positive".into()));
        }
        Ok(())
    }

    fn summation(&self) -> SummationOptions {
        SummationOptions {
            max_terms: self.max_terms,
            tol: self.tol,
        }
    }
}

/// Serialized solver output. Field order is part of the JSON contract.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SolveReport {
    pub family: Family,
    pub params: BTreeMap<String, f64>,
    #[serde(with = "finite_or_null")]
    pub root: f64,
    pub terms_used: usize,
    #[serde(with = "finite_or_null")]
    pub residual: f64,
    pub converged: bool,
    pub branch: Branch,
    pub accelerated: bool,
    pub warnings: Vec<String>,
}

/// Non-finite floats become `null` (and come back as NaN) so reports stay
/// valid JSON.
pub mod finite_or_null {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else {
            s.serialize_none()
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::NAN))
    }
}

/// A report together with the raw series data behind it.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveTrace {
    pub report: SolveReport,
    pub base: f64,
    pub terms: Vec<f64>,
    pub partial_sums: Vec<f64>,
}

/// `(ln|v|, sign)` representation of a real number; sign 0 means zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogTerm {
    pub ln: f64,
    pub sign: f64,
}

impl LogTerm {
    pub const ZERO: LogTerm = LogTerm {
        ln: f64::NEG_INFINITY,
        sign: 0.0,
    };
    pub const ONE: LogTerm = LogTerm { ln: 0.0, sign: 1.0 };

    pub fn from_f64(v: f64) -> Self {
        if v == 0.0 {
            Self::ZERO
        } else {
            Self {
                ln: v.abs().ln(),
                sign: v.signum(),
            }
        }
    }

    pub fn from_rat(r: &Rat) -> Self {
        let (ln, sign) = rat_ln_abs(r);
        Self { ln, sign }
    }

    /// `e^x`.
    pub fn exp(x: f64) -> Self {
        Self { ln: x, sign: 1.0 }
    }

    pub fn mul(self, o: Self) -> Self {
        if self.sign == 0.0 || o.sign == 0.0 {
            return Self::ZERO;
        }
        Self {
            ln: self.ln + o.ln,
            sign: self.sign * o.sign,
        }
    }

    pub fn div(self, o: Self) -> Self {
        self.mul(Self {
            ln: -o.ln,
            sign: o.sign,
        })
    }

    pub fn powi(self, n: usize) -> Self {
        if n == 0 {
            return Self::ONE;
        }
        if self.sign == 0.0 {
            return Self::ZERO;
        }
        Self {
            ln: self.ln * n as f64,
            sign: if n % 2 == 0 { 1.0 } else { self.sign },
        }
    }

    pub fn value(self) -> f64 {
        if self.sign == 0.0 {
            0.0
        } else {
            self.sign * self.ln.exp()
        }
    }
}

pub fn ln_factorial(n: usize) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

fn exact(v: f64) -> Result<Rat> {
    Rat::from_f64(v)
}

fn ensure_finite(values: &[(&str, f64)]) -> Result<()> {
    for (name, v) in values {
        if !v.is_finite() {
            return Err(Error::ContractViolation(format!("{name} must be finite, got {v}")));
        }
    }
    Ok(())
}

/// `n`-th summand of the Bessel series through `base` for `(x-base)(x-other) = l e^x`:
/// `(1/(n! n)) (n l e^base/(base-other))^n B_{n-1}(-2/(n (base-other)))`.
fn bessel_series_term(n: usize, base: f64, other: f64, l: f64) -> Result<f64> {
    if base == other {
        return Err(Error::DegenerateParams(
            "a = b: the Bessel series divides by a - b".into(),
        ));
    }
    if l == 0.0 {
        return Ok(0.0);
    }
    let nf = n as f64;
    let d = base - other;
    let ratio = LogTerm::from_f64(nf * l / d).mul(LogTerm::exp(base));
    let d_exact = exact(base)? - exact(other)?;
    let z = rat(-2) / (rat(n as i64) * d_exact);
    let poly = LogTerm::from_rat(&bessel_poly(n - 1).eval_rat(&z));
    let denom = LogTerm::exp(ln_factorial(n) + nf.ln());
    Ok(ratio.powi(n).mul(poly).div(denom).value())
}

/// Term of `(x-a)(x-b) = l e^x` expanded through `a`:
/// `(1/(n! n)) (n l e^a/(a-b))^n B_{n-1}(-2/(n (a-b)))`.
pub fn quadexp_term(n: usize, p: &QuadExpParams) -> Result<f64> {
    bessel_series_term(n, p.a, p.b, p.l)
}

/// Mirror expansion through `b`:
/// `(1/(n! n)) (-n l e^b/(a-b))^n B_{n-1}(+2/(n (a-b)))`.
pub fn quadexp_term_branch_b(n: usize, p: &QuadExpParams) -> Result<f64> {
    bessel_series_term(n, p.b, p.a, p.l)
}

/// Laguerre series for `x = s + l e^x (x - t)`:
/// `c_n = e^{ns} (s-t)/n L_{n-1}^(1)(n(t-s))`.
pub fn ratioexp_term(n: usize, p: &RatioExpParams) -> Result<f64> {
    if p.s == p.t {
        return Err(Error::DegenerateParams("s = t".into()));
    }
    if p.l == 0.0 {
        return Ok(0.0);
    }
    let nf = n as f64;
    let arg = rat(n as i64) * (exact(p.t)? - exact(p.s)?);
    let lag = LogTerm::from_rat(&laguerre_poly(n - 1, 1).eval_rat(&arg));
    let t = LogTerm::exp(nf * p.s)
        .mul(LogTerm::from_f64(p.s - p.t))
        .mul(LogTerm::from_f64(p.l).powi(n))
        .mul(lag)
        .div(LogTerm::from_f64(nf));
    Ok(t.value())
}

/// The Laguerre series as printed: base `t`, summand
/// `(t-s)^n l^n / n L_{n-1}^(1)(n(t-s))`.
pub fn ratioexp_term_printed(n: usize, p: &RatioExpParams) -> Result<f64> {
    if p.s == p.t {
        return Err(Error::DegenerateParams("s = t".into()));
    }
    let arg = rat(n as i64) * (exact(p.t)? - exact(p.s)?);
    let lag = LogTerm::from_rat(&laguerre_poly(n - 1, 1).eval_rat(&arg));
    let t = LogTerm::from_f64((p.t - p.s) * p.l)
        .powi(n)
        .mul(lag)
        .div(LogTerm::from_f64(n as f64));
    Ok(t.value())
}

/// `sum_j c_j n^{floor(j/2)} a^j` over the monomials of `He_m`; together
/// with `sqrt(n)^(m mod 2)` this is `He_m(sqrt(n) a)`.
fn hermite_scaled_rational(m: usize, n: usize, a: &Rat) -> Rat {
    let he: RatPoly = hermite_prob_poly(m);
    let nr = rat(n as i64);
    let mut acc = Rat::zero();
    for (j, c) in he.coeffs().iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        acc += c * num_traits::pow(nr.clone(), j / 2) * num_traits::pow(a.clone(), j);
    }
    acc
}

/// Hermite series for `x = a + l e^{-x^2/2}`:
/// `c_n = (-1)^{n-1} n^{(n-1)/2} e^{-n a^2/2} He_{n-1}(sqrt(n) a) / n!`.
///
/// `n^{(n-1)/2} He_{n-1}(sqrt(n) a)` only involves integer powers of `n`
/// (the polynomial has fixed parity), so it is evaluated exactly.
pub fn gauss_term(n: usize, p: &ScalarShiftParams) -> Result<f64> {
    if p.l == 0.0 {
        return Ok(0.0);
    }
    let m = n - 1;
    let a = exact(p.a)?;
    // n^{m/2} (sqrt n)^j = n^{(m+j)/2}, with m + j even.
    let he = hermite_prob_poly(m);
    let nr = rat(n as i64);
    let mut acc = Rat::zero();
    for (j, c) in he.coeffs().iter().enumerate() {
        if !c.is_zero() {
            acc += c * num_traits::pow(nr.clone(), (m + j) / 2) * num_traits::pow(a.clone(), j);
        }
    }
    let sign = if m % 2 == 1 { -1.0 } else { 1.0 };
    let nf = n as f64;
    let t = LogTerm::from_rat(&acc)
        .mul(LogTerm { ln: 0.0, sign })
        .mul(LogTerm::exp(-nf * p.a * p.a / 2.0 - ln_factorial(n)))
        .mul(LogTerm::from_f64(p.l).powi(n));
    Ok(t.value())
}

/// The Hermite series as printed, with `H_m = e^{x^2/2} D^m e^{-x^2/2}
/// = (-1)^m He_m`: `l^n/n! e^{n a^2/2} H_{n-1}(sqrt(n) a)`.
pub fn gauss_term_printed(n: usize, p: &ScalarShiftParams) -> Result<f64> {
    let m = n - 1;
    let a = exact(p.a)?;
    let he = LogTerm::from_rat(&hermite_scaled_rational(m, n, &a)).mul(if m % 2 == 1 {
        LogTerm::exp(0.5 * (n as f64).ln())
    } else {
        LogTerm::ONE
    });
    let sign = if m % 2 == 1 { -1.0 } else { 1.0 };
    let nf = n as f64;
    let t = he
        .mul(LogTerm { ln: 0.0, sign })
        .mul(LogTerm::exp(nf * p.a * p.a / 2.0 - ln_factorial(n)))
        .mul(LogTerm::from_f64(p.l).powi(n));
    Ok(t.value())
}

/// `ln phi_m(y)` for `y > 0`; all Stirling weights are non-negative.
fn touchard_ln(m: usize, ln_y: f64) -> f64 {
    let logs: Vec<f64> = stirling2_row(m)
        .iter()
        .enumerate()
        .filter(|(_, s)| !s.is_zero())
        .map(|(k, s)| bigint_ln_abs(s) + k as f64 * ln_y)
        .collect();
    let max = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    max + logs.iter().map(|v| (v - max).exp()).sum::<f64>().ln()
}

/// Touchard series for `x = a + l e^{e^x}`:
/// `c_n = e^{n e^a} phi_{n-1}(n e^a) / n!`.
pub fn doubleexp_term(n: usize, p: &ScalarShiftParams) -> Result<f64> {
    if p.l == 0.0 {
        return Ok(0.0);
    }
    let nf = n as f64;
    let ln_y = nf.ln() + p.a;
    let t = LogTerm::exp(nf * p.a.exp() + touchard_ln(n - 1, ln_y) - ln_factorial(n))
        .mul(LogTerm::from_f64(p.l).powi(n));
    Ok(t.value())
}

/// The Touchard series as printed: prefactor `e^{e^a}` instead of `e^{n e^a}`.
pub fn doubleexp_term_printed(n: usize, p: &ScalarShiftParams) -> Result<f64> {
    if p.l == 0.0 {
        return Ok(0.0);
    }
    let nf = n as f64;
    let ln_y = nf.ln() + p.a;
    let t = LogTerm::exp(p.a.exp() + touchard_ln(n - 1, ln_y) - ln_factorial(n))
        .mul(LogTerm::from_f64(p.l).powi(n));
    Ok(t.value())
}

/// `x = a + l e^x`: `c_n = n^{n-1} e^{na} / n!`.
pub fn plainexp_term(n: usize, p: &ScalarShiftParams) -> Result<f64> {
    if p.l == 0.0 {
        return Ok(0.0);
    }
    let nf = n as f64;
    let t = LogTerm::exp((nf - 1.0) * nf.ln() + nf * p.a - ln_factorial(n))
        .mul(LogTerm::from_f64(p.l).powi(n));
    Ok(t.value())
}

/// One of the six solvable equations, with its parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Equation {
    QuadExp(QuadExpParams),
    RatioExp(RatioExpParams),
    Gauss(ScalarShiftParams),
    DoubleExp(ScalarShiftParams),
    BesselRecip(ScalarShiftParams),
    PlainExp(ScalarShiftParams),
}

impl Equation {
    pub fn family(&self) -> Family {
        match self {
            Equation::QuadExp(_) => Family::QuadExp,
            Equation::RatioExp(_) => Family::RatioExp,
            Equation::Gauss(_) => Family::Gauss,
            Equation::DoubleExp(_) => Family::DoubleExp,
            Equation::BesselRecip(_) => Family::BesselRecip,
            Equation::PlainExp(_) => Family::PlainExp,
        }
    }

    pub fn l(&self) -> f64 {
        match self {
            Equation::QuadExp(p) => p.l,
            Equation::RatioExp(p) => p.l,
            Equation::Gauss(p)
            | Equation::DoubleExp(p)
            | Equation::BesselRecip(p)
            | Equation::PlainExp(p) => p.l,
        }
    }

    /// Same equation with a different `l`.
    pub fn with_l(&self, l: f64) -> Self {
        let mut out = *self;
        match &mut out {
            Equation::QuadExp(p) => p.l = l,
            Equation::RatioExp(p) => p.l = l,
            Equation::Gauss(p)
            | Equation::DoubleExp(p)
            | Equation::BesselRecip(p)
            | Equation::PlainExp(p) => p.l = l,
        }
        out
    }

    pub fn params(&self) -> BTreeMap<String, f64> {
        let pairs: Vec<(&str, f64)> = match self {
            Equation::QuadExp(p) => vec![("a", p.a), ("b", p.b), ("l", p.l)],
            Equation::RatioExp(p) => vec![("s", p.s), ("t", p.t), ("l", p.l)],
            Equation::Gauss(p)
            | Equation::DoubleExp(p)
            | Equation::BesselRecip(p)
            | Equation::PlainExp(p) => vec![("a", p.a), ("l", p.l)],
        };
        pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
    }

    /// Base point of the main expansion (`a`, or `s` for ratioexp).
    pub fn base_point(&self) -> f64 {
        match self {
            Equation::QuadExp(p) => p.a,
            Equation::RatioExp(p) => p.s,
            Equation::Gauss(p)
            | Equation::DoubleExp(p)
            | Equation::BesselRecip(p)
            | Equation::PlainExp(p) => p.a,
        }
    }

    /// The `x = base + l f(x)` form of the main expansion.
    pub fn functional(&self) -> Functional {
        match self {
            Equation::QuadExp(p) => Functional::ExpOverLinear { b: p.b },
            Equation::RatioExp(p) => Functional::ExpTimesLinear { t: p.t },
            Equation::Gauss(_) => Functional::Gauss,
            Equation::DoubleExp(_) => Functional::DoubleExp,
            Equation::BesselRecip(_) => Functional::SqExpRecip,
            Equation::PlainExp(_) => Functional::PlainExp,
        }
    }

    /// Residual of the original equation (ratioexp in multiplied-out form).
    pub fn residual(&self, x: f64) -> f64 {
        match self {
            Equation::QuadExp(p) => (x - p.a) * (x - p.b) - p.l * x.exp(),
            Equation::RatioExp(p) => x - p.s - p.l * x.exp() * (x - p.t),
            _ => x - self.base_point() - self.l() * self.functional().eval(x),
        }
    }

    /// Analytic derivative of [`Equation::residual`].
    pub fn residual_derivative(&self, x: f64) -> f64 {
        match self {
            Equation::QuadExp(p) => 2.0 * x - p.a - p.b - p.l * x.exp(),
            _ => 1.0 - self.l() * self.functional().derivative(x),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Equation::QuadExp(p) => {
                ensure_finite(&[("a", p.a), ("b", p.b), ("l", p.l)])?;
                if p.a == p.b {
                    return Err(Error::DegenerateParams(
                        "a = b: the Bessel series divides by a - b".into(),
                    ));
                }
            }
            Equation::RatioExp(p) => {
                ensure_finite(&[("s", p.s), ("t", p.t), ("l", p.l)])?;
                if p.s == p.t {
                    return Err(Error::DegenerateParams("s = t".into()));
                }
            }
            Equation::BesselRecip(p) => {
                ensure_finite(&[("a", p.a), ("l", p.l)])?;
                if p.a == 0.0 {
                    return Err(Error::PoleAtBase { base: 0.0 });
                }
            }
            Equation::Gauss(p) | Equation::DoubleExp(p) | Equation::PlainExp(p) => {
                ensure_finite(&[("a", p.a), ("l", p.l)])?;
            }
        }
        Ok(())
    }

    /// Series term `t_n` of the validated (or printed) formula.
    pub fn term(&self, n: usize, paper_as_printed: bool) -> Result<f64> {
        match (self, paper_as_printed) {
            (Equation::QuadExp(p), _) => quadexp_term(n, p),
            (Equation::RatioExp(p), false) => ratioexp_term(n, p),
            (Equation::RatioExp(p), true) => ratioexp_term_printed(n, p),
            (Equation::Gauss(p), false) => gauss_term(n, p),
            (Equation::Gauss(p), true) => gauss_term_printed(n, p),
            (Equation::DoubleExp(p), false) => doubleexp_term(n, p),
            (Equation::DoubleExp(p), true) => doubleexp_term_printed(n, p),
            (Equation::PlainExp(p), _) => plainexp_term(n, p),
            (Equation::BesselRecip(p), _) => {
                let sol = lagrange_coefficients(&Functional::SqExpRecip, p.a, n)?;
                Ok(sol.coeffs[n - 1] * p.l.powi(n as i32))
            }
        }
    }

    pub fn solve(&self, opts: &SolveOptions) -> Result<SolveReport> {
        self.solve_traced(opts).map(|t| t.report)
    }

    pub fn solve_traced(&self, opts: &SolveOptions) -> Result<SolveTrace> {
        self.validate()?;
        opts.validate()?;
        match self {
            Equation::QuadExp(p) => solve_quadexp(p, opts),
            Equation::BesselRecip(p) => {
                let sol = lagrange_coefficients(&Functional::SqExpRecip, p.a, opts.max_terms)?;
                let l = p.l;
                let sum = sum_terms(p.a, l == 0.0, &opts.summation(), |n| {
                    sol.coeffs[n - 1] * l.powi(n as i32)
                });
                Ok(finish(self, p.a, sum, Branch::BaseA, opts, Vec::new()))
            }
            _ => {
                let printed = opts.paper_as_printed && self.family().has_printed_form();
                let base = match (self, printed) {
                    (Equation::RatioExp(p), true) => p.t,
                    _ => self.base_point(),
                };
                let sum = sum_with(base, self.l(), opts, |n| self.term(n, printed))?;
                let mut warnings = Vec::new();
                if printed {
                    warnings.push(
                        "summed the printed term formula, which disagrees with direct Lagrange inversion"
                            .to_string(),
                    );
                }
                let mut trace = finish(self, base, sum, Branch::BaseA, opts, warnings);
                if let Equation::PlainExp(p) = self {
                    let z = (p.l * p.a.exp()).abs();
                    if z >= (-1f64).exp() {
                        trace.report.converged = false;
                        trace.report.warnings.push(format!(
                            "|l e^a| = {z} is outside the principal-branch disc |z| < 1/e"
                        ));
                    }
                }
                Ok(trace)
            }
        }
    }
}

fn sum_with(
    base: f64,
    l: f64,
    opts: &SolveOptions,
    term: impl Fn(usize) -> Result<f64>,
) -> Result<SeriesSum> {
    let mut err = None;
    let sum = sum_terms(base, l == 0.0, &opts.summation(), |n| match term(n) {
        Ok(t) => t,
        Err(e) => {
            err.get_or_insert(e);
            f64::NAN
        }
    });
    match err {
        Some(e) => Err(e),
        None => Ok(sum),
    }
}

fn solve_quadexp(p: &QuadExpParams, opts: &SolveOptions) -> Result<SolveTrace> {
    let eq = Equation::QuadExp(*p);
    let branch_a = || -> Result<SolveTrace> {
        let sum = sum_with(p.a, p.l, opts, |n| quadexp_term(n, p))?;
        Ok(finish(&eq, p.a, sum, Branch::BaseA, opts, Vec::new()))
    };
    let branch_b = || -> Result<SolveTrace> {
        let sum = sum_with(p.b, p.l, opts, |n| quadexp_term_branch_b(n, p))?;
        Ok(finish(&eq, p.b, sum, Branch::BaseB, opts, Vec::new()))
    };
    match opts.branch {
        BranchChoice::BaseA => branch_a(),
        BranchChoice::BaseB => branch_b(),
        BranchChoice::Auto => {
            let a = branch_a()?;
            if a.report.converged {
                return Ok(a);
            }
            let mut b = branch_b()?;
            if b.report.converged {
                b.report
                    .warnings
                    .insert(0, "branch baseA did not converge; fell back to baseB".into());
                return Ok(b);
            }
            let mut a = a;
            a.report.warnings.push("branch baseB did not converge either".into());
            Ok(a)
        }
    }
}

fn finish(
    eq: &Equation,
    base: f64,
    sum: SeriesSum,
    branch: Branch,
    opts: &SolveOptions,
    mut warnings: Vec<String>,
) -> SolveTrace {
    let l = eq.l();
    let mut root = sum.value;
    let mut residual = eq.residual(root).abs();
    let mut accelerated = false;
    if opts.accelerate && l != 0.0 {
        if let Ok(w) = wynn_epsilon(&sum.partial_sums) {
            let rw = eq.residual(w).abs();
            if w.is_finite() && (rw <= residual || !residual.is_finite()) {
                root = w;
                residual = rw;
                accelerated = true;
            }
        }
    }
    if sum.diverged {
        warnings.push(format!("series diverged after {} terms", sum.terms_used));
    } else if !sum.converged {
        warnings.push(format!(
            "term budget of {} exhausted before the tolerance was met",
            opts.max_terms
        ));
    }
    let residual_ok = residual <= RESIDUAL_THRESHOLD * l.abs().max(1.0);
    if !residual_ok {
        warnings.push(format!("residual {residual:e} above threshold"));
    }
    let converged = residual_ok && (sum.converged || accelerated);
    SolveTrace {
        report: SolveReport {
            family: eq.family(),
            params: eq.params(),
            root,
            terms_used: sum.terms_used,
            residual,
            converged,
            branch,
            accelerated,
            warnings,
        },
        base,
        terms: sum.terms,
        partial_sums: sum.partial_sums,
    }
}

pub fn quadexp_solve(p: &QuadExpParams, opts: &SolveOptions) -> Result<SolveReport> {
    Equation::QuadExp(*p).solve(opts)
}

pub fn ratioexp_solve(p: &RatioExpParams, opts: &SolveOptions) -> Result<SolveReport> {
    Equation::RatioExp(*p).solve(opts)
}

pub fn gauss_solve(p: &ScalarShiftParams, opts: &SolveOptions) -> Result<SolveReport> {
    Equation::Gauss(*p).solve(opts)
}

pub fn doubleexp_solve(p: &ScalarShiftParams, opts: &SolveOptions) -> Result<SolveReport> {
    Equation::DoubleExp(*p).solve(opts)
}

pub fn besselrecip_solve(p: &ScalarShiftParams, opts: &SolveOptions) -> Result<SolveReport> {
    Equation::BesselRecip(*p).solve(opts)
}

pub fn plainexp_solve(p: &ScalarShiftParams, opts: &SolveOptions) -> Result<SolveReport> {
    Equation::PlainExp(*p).solve(opts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lagrange::lagrange_coefficients_exact;

    fn rel(x: f64, y: f64) -> f64 {
        if x == y {
            0.0
        } else {
            (x - y).abs() / x.abs().max(y.abs())
        }
    }

    #[test]
    fn quadexp_first_terms() {
        let p = QuadExpParams { a: 0.0, b: -3.0, l: 0.1 };
        assert!(rel(quadexp_term(1, &p).unwrap(), 0.1 / 3.0) < 1e-15);
        let (a, b, l) = (0.4, -1.7, 0.3);
        let p = QuadExpParams { a, b, l };
        let t1 = l * a.exp() / (a - b);
        assert!(rel(quadexp_term(1, &p).unwrap(), t1) < 1e-14);
        let t2 = l * l * (2.0 * a).exp() / ((a - b) * (a - b)) * (1.0 - 1.0 / (a - b));
        assert!(rel(quadexp_term(2, &p).unwrap(), t2) < 1e-14);
    }

    #[test]
    fn quadexp_degenerate() {
        let p = QuadExpParams { a: 1.0, b: 1.0, l: 0.1 };
        assert!(matches!(quadexp_term(1, &p), Err(Error::DegenerateParams(_))));
        assert!(matches!(
            quadexp_solve(&p, &SolveOptions::default()),
            Err(Error::DegenerateParams(_))
        ));
    }

    #[test]
    fn quadexp_matches_exact_engine() {
        let p = QuadExpParams { a: 0.5, b: -2.25, l: 1.0 };
        let exact = lagrange_coefficients_exact(&Functional::ExpOverLinear { b: p.b }, p.a, 15)
            .unwrap();
        for (i, c) in exact.iter().enumerate() {
            let n = i + 1;
            assert!(rel(quadexp_term(n, &p).unwrap(), c.to_f64()) < 1e-12, "n = {n}");
        }
    }

    #[test]
    fn zero_l_returns_base() {
        let opts = SolveOptions::default();
        let eqs = [
            Equation::QuadExp(QuadExpParams { a: 0.3, b: -3.0, l: 0.0 }),
            Equation::RatioExp(RatioExpParams { s: 0.3, t: 1.0, l: 0.0 }),
            Equation::Gauss(ScalarShiftParams { a: 0.3, l: 0.0 }),
            Equation::DoubleExp(ScalarShiftParams { a: 0.3, l: 0.0 }),
            Equation::BesselRecip(ScalarShiftParams { a: 0.3, l: 0.0 }),
            Equation::PlainExp(ScalarShiftParams { a: 0.3, l: 0.0 }),
        ];
        for eq in eqs {
            let r = eq.solve(&opts).unwrap();
            assert_eq!(r.root, 0.3, "{:?}", eq.family());
            assert_eq!(r.terms_used, 0);
            assert_eq!(r.residual, 0.0);
            assert!(r.converged);
            assert_eq!(r.branch, Branch::BaseA);
        }
    }

    #[test]
    fn first_coefficients_equal_f_at_base() {
        let r = RatioExpParams { s: 0.2, t: 1.1, l: 1.0 };
        assert!(rel(ratioexp_term(1, &r).unwrap(), 0.2f64.exp() * (0.2 - 1.1)) < 1e-15);
        let g = ScalarShiftParams { a: 0.7, l: 1.0 };
        assert!(rel(doubleexp_term(1, &g).unwrap(), 0.7f64.exp().exp()) < 1e-14);
        assert!(rel(gauss_term(1, &g).unwrap(), (-0.49f64 / 2.0).exp()) < 1e-15);
        assert!(rel(plainexp_term(1, &g).unwrap(), 0.7f64.exp()) < 1e-15);
    }

    #[test]
    fn gauss_even_terms_vanish_at_zero() {
        let p = ScalarShiftParams { a: 0.0, l: 1.0 };
        assert_eq!(gauss_term(2, &p).unwrap(), 0.0);
        assert_eq!(gauss_term(4, &p).unwrap(), 0.0);
        assert!(rel(gauss_term(3, &p).unwrap(), -0.5) < 1e-15);
    }

    #[test]
    fn plainexp_outside_disc_does_not_converge() {
        let p = ScalarShiftParams { a: 0.0, l: 0.5 };
        let r = plainexp_solve(&p, &SolveOptions::default()).unwrap();
        assert!(!r.converged);
        assert!(!r.warnings.is_empty());
    }

    #[test]
    fn besselrecip_rejects_zero_base() {
        let p = ScalarShiftParams { a: 0.0, l: 0.1 };
        assert_eq!(
            besselrecip_solve(&p, &SolveOptions::default()),
            Err(Error::PoleAtBase { base: 0.0 })
        );
    }

    #[test]
    fn auto_branch_falls_back() {
        // l large enough that the expansion through a diverges but the one
        // through b (far to the left, where e^b is tiny) converges.
        let p = QuadExpParams { a: 0.0, b: -6.0, l: 30.0 };
        let r = quadexp_solve(&p, &SolveOptions::default()).unwrap();
        assert_eq!(r.branch, Branch::BaseB);
        assert!(r.converged);
        assert!(r.residual <= RESIDUAL_THRESHOLD * 30.0);
    }

    #[test]
    fn family_names_round_trip() {
        for f in Family::ALL {
            assert_eq!(f.name().parse::<Family>().unwrap(), f);
        }
        assert!("nope".parse::<Family>().is_err());
    }
}
