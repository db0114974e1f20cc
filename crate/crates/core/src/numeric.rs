//! Independent numerics: a safeguarded Newton oracle, Lambert W, the Wynn
//! epsilon accelerator and radius-of-convergence estimates.

use serde::{Deserialize, Serialize};

use crate::closed_form::{Equation, SolveOptions, SolveReport};
use crate::error::{Error, Result};
use crate::lagrange::{lagrange_coefficients, SeriesSolution};

/// An equation and a search interval for the Newton oracle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootProblem {
    pub equation: Equation,
    pub lo: f64,
    pub hi: f64,
}

const NEWTON_MAX_ITER: usize = 200;

/// Newton iteration from `x0`, falling back to bisection whenever a step
/// leaves the current bracket. Succeeds only with `|residual| <= tol`.
pub fn newton_solve(p: &RootProblem, x0: f64, tol: f64) -> Result<f64> {
    if !(p.lo < p.hi) || !p.lo.is_finite() || !p.hi.is_finite() {
        return Err(Error::ContractViolation(format!(
            "invalid interval [{}, {}]",
            p.lo, p.hi
        )));
    }
    if !(tol > 0.0) {
        return Err(Error::ContractViolation("tol must be positive".into()));
    }
    let f = |x: f64| p.equation.residual(x);
    let df = |x: f64| p.equation.residual_derivative(x);

    let mut x = x0.clamp(p.lo, p.hi);
    if !x.is_finite() {
        x = 0.5 * (p.lo + p.hi);
    }
    let (mut lo, mut hi) = (p.lo, p.hi);
    let (mut flo, fhi) = (f(lo), f(hi));
    let bracketed = flo.is_finite() && fhi.is_finite() && flo.signum() != fhi.signum();

    for _ in 0..NEWTON_MAX_ITER {
        let fx = f(x);
        if fx.abs() <= tol {
            return Ok(x);
        }
        if bracketed && fx.is_finite() {
            if fx.signum() == flo.signum() {
                lo = x;
                flo = fx;
            } else {
                hi = x;
            }
        }
        let d = df(x);
        let step = fx / d;
        let candidate = x - step;
        let inside = |c: f64| {
            if bracketed {
                c > lo && c < hi
            } else {
                c >= p.lo && c <= p.hi
            }
        };
        let next = if candidate.is_finite() && d.abs() >= 1e-14 && inside(candidate) {
            candidate
        } else if bracketed {
            0.5 * (lo + hi)
        } else {
            return Err(Error::NoRootInInterval { lo: p.lo, hi: p.hi });
        };
        if next == x || (bracketed && hi - lo <= 4.0 * f64::EPSILON * x.abs().max(f64::MIN_POSITIVE)) {
            x = next;
            break;
        }
        x = next;
    }
    let r = f(x);
    if r.abs() <= tol {
        Ok(x)
    } else if bracketed {
        Err(Error::ToleranceNotReached { x, residual: r })
    } else {
        Err(Error::NoRootInInterval { lo: p.lo, hi: p.hi })
    }
}

/// Sub-intervals of a uniform grid of `steps` cells on which the residual
/// changes sign. A grid point where the residual is exactly zero is reported
/// once, as the degenerate interval `(x, x)`.
pub fn bracket_scan(p: &RootProblem, steps: usize) -> Result<Vec<(f64, f64)>> {
    if steps < 2 || !(p.lo < p.hi) {
        return Err(Error::ContractViolation(
            "bracket_scan needs lo < hi and at least two steps".into(),
        ));
    }
    let h = (p.hi - p.lo) / steps as f64;
    let xs: Vec<f64> = (0..=steps)
        .map(|i| if i == steps { p.hi } else { p.lo + h * i as f64 })
        .collect();
    let fs: Vec<f64> = xs.iter().map(|&x| p.equation.residual(x)).collect();
    let mut out = Vec::new();
    for i in 0..=steps {
        if fs[i] == 0.0 {
            out.push((xs[i], xs[i]));
        } else if i < steps && fs[i + 1] != 0.0 && fs[i].signum() != fs[i + 1].signum() {
            if fs[i].is_finite() && fs[i + 1].is_finite() {
                out.push((xs[i], xs[i + 1]));
            }
        }
    }
    Ok(out)
}

/// Principal branch `W_0` by Halley iteration.
pub fn lambert_w_principal(z: f64) -> Result<f64> {
    let branch = -(-1f64).exp();
    if z.is_nan() || z < branch {
        return Err(Error::OutOfBranch { z });
    }
    if z == branch {
        return Ok(-1.0);
    }
    if z == 0.0 {
        return Ok(0.0);
    }
    if z.is_infinite() {
        return Ok(f64::INFINITY);
    }
    let mut w = if z < -0.25 {
        // Expansion about the branch point in p = sqrt(2(ez + 1)).
        let p = (2.0 * (std::f64::consts::E * z + 1.0)).max(0.0).sqrt();
        -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p * p * p
    } else if z < 3.0 {
        let l = z.ln_1p();
        l * (1.0 - l.ln_1p() / (2.0 + l))
    } else {
        let l1 = z.ln();
        let l2 = l1.ln();
        l1 - l2 + l2 / l1
    };
    for _ in 0..64 {
        let ew = w.exp();
        let f = w * ew - z;
        if f == 0.0 {
            break;
        }
        let wp1 = w + 1.0;
        if wp1 == 0.0 {
            break;
        }
        let step = f / (ew * wp1 - (w + 2.0) * f / (2.0 * wp1));
        if !step.is_finite() {
            break;
        }
        w -= step;
        if step.abs() <= 4.0 * f64::EPSILON * (1.0 + w.abs()) {
            break;
        }
    }
    Ok(w.max(-1.0))
}

/// Wynn epsilon extrapolation of a sequence of partial sums: the last entry
/// of the deepest complete even column. A column is abandoned when some
/// difference vanishes to within rounding, which is also how an already
/// converged sequence stops.
pub fn wynn_epsilon(sums: &[f64]) -> Result<f64> {
    if sums.len() < 5 {
        return Err(Error::InsufficientTerms {
            needed: 5,
            got: sums.len(),
        });
    }
    if sums.iter().any(|s| !s.is_finite()) {
        return Err(Error::ContractViolation("partial sums must be finite".into()));
    }
    let mut prev: Vec<f64> = vec![0.0; sums.len() + 1];
    let mut cur: Vec<f64> = sums.to_vec();
    let mut best = *sums.last().unwrap();
    let mut col = 0usize;
    while cur.len() > 1 {
        let mut next = Vec::with_capacity(cur.len() - 1);
        for j in 0..cur.len() - 1 {
            let diff = cur[j + 1] - cur[j];
            let scale = cur[j + 1].abs().max(cur[j].abs());
            if diff.abs() <= 1e-300_f64.max(2.0 * f64::EPSILON * scale) {
                return Ok(best);
            }
            next.push(prev[j + 1] + 1.0 / diff);
        }
        if next.iter().any(|v| !v.is_finite()) {
            return Ok(best);
        }
        col += 1;
        if col % 2 == 0 {
            best = *next.last().unwrap();
        }
        prev = cur;
        cur = next;
    }
    Ok(best)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum RadiusMethod {
    Ratio,
    DombSykes,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Confidence {
    Stable,
    Noisy,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RadiusEstimate {
    #[serde(with = "crate::closed_form::finite_or_null")]
    pub estimate: f64,
    pub method: RadiusMethod,
    pub n_used: usize,
    pub confidence: Confidence,
}

/// Minimum number of nonzero coefficients the estimators accept.
pub const RADIUS_MIN_NONZERO: usize = 10;
/// Relative spread of the tail ratios above which an estimate is noisy.
const NOISY_SPREAD: f64 = 0.2;

/// Radius estimate from a coefficient sequence (`coeffs[n-1] = c_n`).
pub fn radius_estimate_with(coeffs: &[f64], method: RadiusMethod) -> Result<RadiusEstimate> {
    let nz: Vec<(usize, f64)> = coeffs
        .iter()
        .enumerate()
        .filter(|(_, c)| **c != 0.0 && c.is_finite())
        .map(|(i, c)| (i + 1, c.abs()))
        .collect();
    if nz.len() < RADIUS_MIN_NONZERO {
        return Err(Error::InsufficientTerms {
            needed: RADIUS_MIN_NONZERO,
            got: nz.len(),
        });
    }
    // Root-test ratios between consecutive nonzero coefficients, so that
    // families with vanishing odd or even orders are handled uniformly.
    let ratios: Vec<(usize, f64)> = nz
        .windows(2)
        .map(|w| {
            let gap = (w[1].0 - w[0].0) as f64;
            (w[1].0, ((w[1].1.ln() - w[0].1.ln()) / gap).exp())
        })
        .collect();
    let tail = &ratios[ratios.len() / 2..];
    let max = tail.iter().map(|r| r.1).fold(0.0, f64::max);
    let min = tail.iter().map(|r| r.1).fold(f64::INFINITY, f64::min);
    let mean = tail.iter().map(|r| r.1).sum::<f64>() / tail.len() as f64;
    let confidence = if mean > 0.0 && (max - min) / mean > NOISY_SPREAD {
        Confidence::Noisy
    } else {
        Confidence::Stable
    };
    let ratio_estimate = if max > 0.0 { 1.0 / max } else { f64::INFINITY };
    let ratio_result = RadiusEstimate {
        estimate: ratio_estimate,
        method: RadiusMethod::Ratio,
        n_used: tail.len(),
        confidence,
    };
    match method {
        RadiusMethod::Ratio => Ok(ratio_result),
        RadiusMethod::DombSykes => {
            // Least-squares line through (1/n, r_n); the intercept is 1/R.
            let k = tail.len() as f64;
            let xs: Vec<f64> = tail.iter().map(|r| 1.0 / r.0 as f64).collect();
            let mx = xs.iter().sum::<f64>() / k;
            let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
            let sxy: f64 = xs.iter().zip(tail).map(|(x, r)| (x - mx) * (r.1 - mean)).sum();
            let intercept = if sxx > 0.0 { mean - sxy / sxx * mx } else { mean };
            if intercept.is_finite() && intercept > 0.0 {
                Ok(RadiusEstimate {
                    estimate: 1.0 / intercept,
                    method: RadiusMethod::DombSykes,
                    n_used: tail.len(),
                    confidence,
                })
            } else {
                Ok(ratio_result)
            }
        }
    }
}

/// Domb-Sykes estimate, or the plain ratio estimate when the fit is unusable.
pub fn radius_estimate(sol: &SeriesSolution) -> Result<RadiusEstimate> {
    radius_estimate_with(&sol.coeffs, RadiusMethod::DombSykes)
}

/// Series solution next to the Newton oracle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CompareRecord {
    #[serde(flatten)]
    pub report: SolveReport,
    #[serde(with = "crate::closed_form::finite_or_null")]
    pub newton_root: f64,
    #[serde(with = "crate::closed_form::finite_or_null")]
    pub difference: f64,
    pub accelerated_value: Option<f64>,
    pub radius: Option<RadiusEstimate>,
    /// Root from the printed formula, for families that have one.
    pub paper_as_printed: Option<f64>,
}

/// Interval searched by the oracle: the series root plus or minus a margin
/// that grows with `|l|`, clipped away from singular points.
fn oracle_interval(eq: &Equation, x0: f64) -> (f64, f64) {
    let h = (0.5 + 2.0 * eq.l().abs()).min(10.0);
    let (mut lo, mut hi) = (x0 - h, x0 + h);
    if let Equation::BesselRecip(p) = eq {
        // Stay on the side of the pole at zero that holds the base point.
        if p.a > 0.0 {
            lo = lo.max(f64::MIN_POSITIVE);
        } else {
            hi = hi.min(-f64::MIN_POSITIVE);
        }
    }
    (lo, hi)
}

pub fn compare_report(eq: &Equation, opts: &SolveOptions) -> Result<CompareRecord> {
    let trace = eq.solve_traced(opts)?;
    let report = trace.report;
    let x0 = if report.root.is_finite() { report.root } else { eq.base_point() };
    let (lo, hi) = oracle_interval(eq, x0);
    let tol = 1e-13 * eq.l().abs().max(1.0) * x0.abs().max(1.0);
    let newton_root = newton_solve(&RootProblem { equation: *eq, lo, hi }, x0, tol).unwrap_or(f64::NAN);
    let difference = (report.root - newton_root).abs();

    let accelerated_value = if opts.accelerate {
        wynn_epsilon(&trace.partial_sums).ok()
    } else {
        None
    };
    let radius = lagrange_coefficients(&eq.functional(), eq.base_point(), opts.max_terms.max(20))
        .ok()
        .and_then(|sol| radius_estimate(&sol).ok());
    let paper_as_printed = if eq.family().has_printed_form() {
        let printed = SolveOptions {
            paper_as_printed: true,
            accelerate: false,
            ..*opts
        };
        eq.solve(&printed).ok().map(|r| r.root)
    } else {
        None
    };
    Ok(CompareRecord {
        report,
        newton_root,
        difference,
        accelerated_value,
        radius,
        paper_as_printed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closed_form::{QuadExpParams, ScalarShiftParams};
    use crate::lagrange::Functional;

    #[test]
    fn lambert_w_values() {
        assert_eq!(lambert_w_principal(0.0).unwrap(), 0.0);
        assert!((lambert_w_principal(std::f64::consts::E).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(lambert_w_principal(-(-1f64).exp()).unwrap(), -1.0);
        assert!(matches!(lambert_w_principal(-0.5), Err(Error::OutOfBranch { .. })));
        let w = lambert_w_principal(-0.3678).unwrap();
        assert!((w * w.exp() + 0.3678).abs() < 1e-15);
    }

    #[test]
    fn wynn_on_alternating_log_series() {
        let mut s = 0.0;
        let sums: Vec<f64> = (1..=20)
            .map(|k| {
                s += if k % 2 == 1 { 1.0 } else { -1.0 } / k as f64;
                s
            })
            .collect();
        let w = wynn_epsilon(&sums).unwrap();
        assert!((w - 2f64.ln()).abs() < 1e-10);
        assert!((sums[19] - 2f64.ln()).abs() > 1e-2);
        assert!(matches!(
            wynn_epsilon(&sums[..4]),
            Err(Error::InsufficientTerms { needed: 5, got: 4 })
        ));
    }

    #[test]
    fn wynn_on_constant_sequence() {
        assert_eq!(wynn_epsilon(&[2.0; 8]).unwrap(), 2.0);
    }

    #[test]
    fn radius_of_plain_exp() {
        let sol = lagrange_coefficients(&Functional::PlainExp, 0.0, 40).unwrap();
        let ds = radius_estimate(&sol).unwrap();
        let exact = (-1f64).exp();
        assert_eq!(ds.method, RadiusMethod::DombSykes);
        assert!((ds.estimate - exact).abs() / exact < 0.01);
        let r = radius_estimate_with(&sol.coeffs, RadiusMethod::Ratio).unwrap();
        assert!((r.estimate - exact).abs() / exact < 0.05);
        assert_eq!(r.confidence, Confidence::Stable);
    }

    #[test]
    fn radius_needs_ten_nonzero() {
        let c = [1.0, 0.0, 1.0, 0.0, 1.0];
        assert!(matches!(
            radius_estimate_with(&c, RadiusMethod::Ratio),
            Err(Error::InsufficientTerms { .. })
        ));
    }

    #[test]
    fn radius_of_geometric_series() {
        let c: Vec<f64> = (1..=30).map(|n| 2f64.powi(n)).collect();
        let r = radius_estimate_with(&c, RadiusMethod::DombSykes).unwrap();
        assert!((r.estimate - 0.5).abs() < 1e-12);
    }

    #[test]
    fn newton_on_plain_exp() {
        let eq = Equation::PlainExp(ScalarShiftParams { a: 0.0, l: 0.1 });
        let p = RootProblem { equation: eq, lo: -1.0, hi: 1.0 };
        let x = newton_solve(&p, 0.0, 1e-15).unwrap();
        assert!(eq.residual(x).abs() <= 1e-15);
        // x = -W(-l)
        let w = lambert_w_principal(-0.1).unwrap();
        assert!((x + w).abs() < 1e-14);
    }

    #[test]
    fn newton_without_root() {
        let eq = Equation::PlainExp(ScalarShiftParams { a: 0.0, l: 1.0 });
        let p = RootProblem { equation: eq, lo: -1.0, hi: 1.0 };
        assert!(matches!(
            newton_solve(&p, 0.0, 1e-12),
            Err(Error::NoRootInInterval { .. })
        ));
    }

    #[test]
    fn bracket_scan_finds_both_quadexp_roots() {
        let eq = Equation::QuadExp(QuadExpParams { a: 0.0, b: -3.0, l: 0.1 });
        let p = RootProblem { equation: eq, lo: -4.0, hi: 1.0 };
        let b = bracket_scan(&p, 50).unwrap();
        assert_eq!(b.len(), 2);
    }

    #[test]
    fn bracket_scan_counts_grid_zero_once() {
        let eq = Equation::PlainExp(ScalarShiftParams { a: 0.5, l: 0.0 });
        let p = RootProblem { equation: eq, lo: 0.0, hi: 1.0 };
        assert_eq!(bracket_scan(&p, 4).unwrap(), vec![(0.5, 0.5)]);
    }

    #[test]
    fn compare_at_zero_l() {
        let eq = Equation::Gauss(ScalarShiftParams { a: 0.3, l: 0.0 });
        let r = compare_report(&eq, &SolveOptions::default()).unwrap();
        assert_eq!(r.difference, 0.0);
    }
}
