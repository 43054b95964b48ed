//! Arithmetic, logarithmic and generalized logarithmic means, and checks of
//! the trapezoid-defect bounds specialised to `f(x) = xⁿ`.
//!
//! For `f(x) = xⁿ` the trapezoid defect on `[a, b]` is
//! `|A(aⁿ, bⁿ) - Lₙⁿ(a, b)|` and `|f''(x)| = n(n-1)|x|^{n-2}`, so each bound
//! becomes `n(n-1)` times the bound for endpoint data `(|a|^{n-2}, |b|^{n-2})`.

use serde::{Deserialize, Serialize};

use crate::bounds::{
    bound_v1, bound_v2, bound_v3, HolderPair, Interval, SecondDerivEndpoints, V2Exponent,
};
use crate::error::{Error, Result};
use crate::functions::{FunctionSpec, DEFAULT_GRID_N, DEFAULT_QC_TOL};

/// A record counts as holding when `rhs - lhs >= -HOLDS_TOL`.
pub const HOLDS_TOL: f64 = 1e-12;

/// `(a + b) / 2`
pub fn arithmetic_mean(a: f64, b: f64) -> f64 {
    0.5 * (a + b)
}

/// `(a - b) / (ln|a| - ln|b|)`
pub fn logarithmic_mean(a: f64, b: f64) -> Result<f64> {
    if a == 0.0 || b == 0.0 || a.abs() == b.abs() {
        return Err(Error::domain(format!(
            "logarithmic mean needs nonzero arguments with |a| != |b|, got ({a}, {b})"
        )));
    }
    Ok((a - b) / (a.abs().ln() - b.abs().ln()))
}

/// `[(b^{n+1} - a^{n+1}) / ((n+1)(b-a))]^{1/n}`, the real `n`-th root.
pub fn generalized_log_mean(a: f64, b: f64, n: i32) -> Result<f64> {
    if n == 0 || n == -1 {
        return Err(Error::domain(format!(
            "generalized log-mean undefined for n = {n}"
        )));
    }
    if a == b {
        return Err(Error::domain("generalized log-mean needs a != b"));
    }
    let bracket = log_mean_bracket(a, b, n);
    if !bracket.is_finite() {
        return Err(Error::domain(format!(
            "generalized log-mean bracket not finite for ({a}, {b}, {n})"
        )));
    }
    real_root(bracket, n)
}

/// `(b^{n+1} - a^{n+1}) / ((n+1)(b-a))`, the mean value of `xⁿ` on `[a, b]`.
fn log_mean_bracket(a: f64, b: f64, n: i32) -> f64 {
    (b.powi(n + 1) - a.powi(n + 1)) / ((n as f64 + 1.0) * (b - a))
}

fn real_root(x: f64, n: i32) -> Result<f64> {
    let inv = 1.0 / n as f64;
    if x > 0.0 {
        Ok(x.powf(inv))
    } else if n % 2 != 0 && x < 0.0 {
        Ok(-(-x).powf(inv))
    } else {
        Err(Error::domain(format!("no real {n}-th root of {x}")))
    }
}

/// Which single-interval bound the check specialises.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Proposition {
    /// Hölder split bound; needs `q > 1 + √2/2`.
    P5,
    /// Power-mean bound; needs `q >= 1`.
    P6,
    /// Weighted-Hölder bound; needs `q > 1`.
    P7,
}

impl std::str::FromStr for Proposition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "P5" => Ok(Proposition::P5),
            "P6" => Ok(Proposition::P6),
            "P7" => Ok(Proposition::P7),
            _ => Err(Error::Parse(format!(
                "unknown proposition `{s}` (expected P5, P6 or P7)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeansCheckRecord {
    pub proposition: Proposition,
    pub a: f64,
    pub b: f64,
    pub n: u32,
    pub q: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
    pub margin: f64,
    /// Grid verdict on quasi-convexity of `|f''|` for `xⁿ` on `[a, b]`.
    pub quasiconvex: bool,
}

pub fn check_means_proposition(
    which: Proposition,
    a: f64,
    b: f64,
    n: u32,
    q: f64,
) -> Result<MeansCheckRecord> {
    if n < 2 {
        return Err(Error::domain(format!("means checks need n >= 2, got {n}")));
    }
    let iv = Interval::new(a, b)?;
    let ni = n as i32;

    let lhs =
        (arithmetic_mean(a.powi(ni), b.powi(ni)) - generalized_log_mean(a, b, ni)?.powi(ni)).abs();

    // |a|^{n-2} with 0⁰ = 1 (powi already gives that)
    let scale = (n * (n - 1)) as f64;
    let d2 = SecondDerivEndpoints::new(scale * a.abs().powi(ni - 2), scale * b.abs().powi(ni - 2))?;
    let rhs = match which {
        Proposition::P5 => bound_v1(iv, HolderPair::new(q)?, d2)?,
        Proposition::P6 => bound_v2(iv, q, d2, V2Exponent::ProofExponent)?,
        Proposition::P7 => bound_v3(iv, HolderPair::new(q)?, d2)?,
    };

    let power = FunctionSpec::polynomial(&monomial(n));
    let quasiconvex = power
        .is_quasiconvex(iv, 2, DEFAULT_GRID_N, DEFAULT_QC_TOL)?
        .holds;

    let margin = rhs - lhs;
    Ok(MeansCheckRecord {
        proposition: which,
        a,
        b,
        n,
        q,
        lhs,
        rhs,
        holds: margin >= -HOLDS_TOL,
        margin,
        quasiconvex,
    })
}

fn monomial(n: u32) -> Vec<f64> {
    let mut c = vec![0.0; n as usize + 1];
    c[n as usize] = 1.0;
    c
}
