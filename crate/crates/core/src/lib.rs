//! Series solutions of generalized Lambert-W equations.
//!
//! The crate is organised bottom-up:
//!
//! * [`series`] and [`exp_laurent`]: truncated power series and
//!   exponential-Laurent expressions over exact rationals or `f64`.
//! * [`orthopoly`]: Bessel, Laguerre, Hermite and Touchard coefficient tables.
//! * [`lagrange`]: direct Lagrange inversion of `x = a + l f(x)`; the
//!   reference every closed form is checked against.
//! * [`closed_form`]: root solvers whose series terms are written with
//!   orthogonal polynomials.
//! * [`identity`]: exact checks of the polynomial representations and
//!   operator identities, plus the errata report.
//! * [`numeric`]: Newton/bisection oracle, radius estimation, Wynn epsilon
//!   acceleration and the principal Lambert W.

pub mod closed_form;
pub mod error;
pub mod exp_laurent;
pub mod identity;
pub mod lagrange;
pub mod numeric;
pub mod orthopoly;
pub mod series;

pub use closed_form::{Equation, Family, SolveOptions, SolveReport};
pub use error::{Error, Result};
pub use exp_laurent::ExpLaurent;
pub use lagrange::{Functional, SeriesSolution};
pub use orthopoly::RatPoly;
pub use series::{Coeff, Rat, TruncSeries};
