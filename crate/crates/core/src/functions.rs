//! Test-function registry: analytic derivatives, a grid quasi-convexity
//! verdict, supremum estimation and the reference integral.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::adaptive::{self, Options};
use crate::bounds::Interval;
use crate::error::{Error, Result};

/// Default number of uniform samples for the quasi-convexity verdict.
pub const DEFAULT_GRID_N: usize = 1025;
/// Default tolerance for the quasi-convexity verdict.
pub const DEFAULT_QC_TOL: f64 = 1e-9;

/// The closed set of supported function families.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Family {
    /// `Σ cᵢ xⁱ`, coefficients in increasing degree.
    Polynomial { coeffs: Vec<f64> },
    /// `c · e^{kx}`
    Exponential { scale: f64, rate: f64 },
    /// `1 / (x + s)`
    Reciprocal { shift: f64 },
    /// `1` on `[-2, -1]`, `t²` on `(-1, 2]`. Quasi-convex but not convex;
    /// order-0 evaluation only.
    PiecewiseG,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FunctionSpec {
    pub family: Family,
    pub label: String,
}

impl FunctionSpec {
    pub fn new(family: Family, label: impl Into<String>) -> Result<Self> {
        match &family {
            Family::Polynomial { coeffs } => {
                if coeffs.is_empty() || coeffs.iter().any(|c| !c.is_finite()) {
                    return Err(Error::Parse("polynomial needs finite coefficients".into()));
                }
            }
            Family::Exponential { scale, rate } => {
                if !(scale.is_finite() && rate.is_finite()) {
                    return Err(Error::Parse("exponential parameters must be finite".into()));
                }
            }
            Family::Reciprocal { shift } => {
                if !shift.is_finite() {
                    return Err(Error::Parse("reciprocal shift must be finite".into()));
                }
            }
            Family::PiecewiseG => {}
        }
        Ok(Self {
            family,
            label: label.into(),
        })
    }

    pub fn polynomial(coeffs: &[f64]) -> Self {
        let spec = Family::Polynomial {
            coeffs: coeffs.to_vec(),
        };
        let label = spec.to_string();
        Self::new(spec, label).expect("finite coefficients")
    }

    pub fn exponential(scale: f64, rate: f64) -> Self {
        let spec = Family::Exponential { scale, rate };
        let label = spec.to_string();
        Self::new(spec, label).expect("finite parameters")
    }

    pub fn reciprocal(shift: f64) -> Self {
        let spec = Family::Reciprocal { shift };
        let label = spec.to_string();
        Self::new(spec, label).expect("finite shift")
    }

    pub fn piecewise_g() -> Self {
        Self {
            family: Family::PiecewiseG,
            label: "g".into(),
        }
    }

    pub fn supports_second_derivative(&self) -> bool {
        !matches!(self.family, Family::PiecewiseG)
    }

    /// Checks that every point of `iv` lies in the function's domain.
    pub fn check_domain(&self, iv: Interval) -> Result<()> {
        match self.family {
            Family::Reciprocal { shift } => {
                if iv.contains(-shift) {
                    return Err(Error::Evaluation(format!(
                        "pole x = {} inside [{}, {}]",
                        -shift,
                        iv.a(),
                        iv.b()
                    )));
                }
            }
            Family::PiecewiseG if iv.a() < -2.0 || iv.b() > 2.0 => {
                return Err(Error::Evaluation("g is defined on [-2, 2] only".into()));
            }
            _ => {}
        }
        Ok(())
    }

    /// Value (`order = 0`), first or second derivative at `x`.
    pub fn evaluate(&self, x: f64, order: u8) -> Result<f64> {
        if order > 2 {
            return Err(Error::UnsupportedOrder {
                order,
                family: self.family.name(),
            });
        }
        match &self.family {
            Family::Polynomial { coeffs } => Ok(horner_derivative(coeffs, x, order)),
            Family::Exponential { scale, rate } => {
                Ok(scale * rate.powi(order as i32) * (rate * x).exp())
            }
            Family::Reciprocal { shift } => {
                let u = x + shift;
                if u == 0.0 {
                    return Err(Error::Evaluation(format!("pole at x = {x}")));
                }
                Ok(match order {
                    0 => 1.0 / u,
                    1 => -1.0 / (u * u),
                    _ => 2.0 / (u * u * u),
                })
            }
            Family::PiecewiseG => {
                if order > 0 {
                    return Err(Error::UnsupportedOrder {
                        order,
                        family: "piecewise g",
                    });
                }
                if !(-2.0..=2.0).contains(&x) {
                    return Err(Error::Evaluation(format!("g undefined at {x}")));
                }
                Ok(if x <= -1.0 { 1.0 } else { x * x })
            }
        }
    }

    pub fn value(&self, x: f64) -> Result<f64> {
        self.evaluate(x, 0)
    }

    /// Grid verdict on quasi-convexity of `f` (`order = 0`) or `|f''|`
    /// (`order = 2`) over `grid_n` uniform samples of `iv`.
    pub fn is_quasiconvex(
        &self,
        iv: Interval,
        order: u8,
        grid_n: usize,
        tol: f64,
    ) -> Result<QuasiconvexVerdict> {
        if grid_n < 3 {
            return Err(Error::domain(format!(
                "quasi-convexity grid needs at least 3 points, got {grid_n}"
            )));
        }
        if order != 0 && order != 2 {
            return Err(Error::UnsupportedOrder {
                order,
                family: self.family.name(),
            });
        }
        let xs = uniform_grid(iv, grid_n);
        let samples = xs
            .iter()
            .map(|&x| {
                self.evaluate(x, order)
                    .map(|v| if order == 2 { v.abs() } else { v })
            })
            .collect::<Result<Vec<_>>>()?;
        let witness = valley_violation(&samples, tol).map(|(i, j, k)| (xs[i], xs[j], xs[k]));
        Ok(QuasiconvexVerdict {
            holds: witness.is_none(),
            witness,
            grid_size: grid_n,
            tolerance: tol,
        })
    }

    /// Largest `|f''|` on a uniform grid including both endpoints. A lower
    /// estimate of the supremum, exact when `|f''|` peaks at a grid point.
    pub fn sup_abs_d2(&self, iv: Interval, grid_n: usize) -> Result<f64> {
        if grid_n < 2 {
            return Err(Error::domain(format!(
                "supremum grid needs at least 2 points, got {grid_n}"
            )));
        }
        uniform_grid(iv, grid_n)
            .into_iter()
            .try_fold(0.0f64, |m, x| Ok(m.max(self.evaluate(x, 2)?.abs())))
    }

    /// `∫ₐᵇ f` to absolute accuracy `1e-10`: exact antiderivatives for
    /// polynomials and exponentials, adaptive Gauss–Kronrod otherwise.
    pub fn reference_integral(&self, iv: Interval) -> Result<f64> {
        self.check_domain(iv)?;
        let (a, b) = (iv.a(), iv.b());
        match &self.family {
            Family::Polynomial { coeffs } => Ok(coeffs
                .iter()
                .enumerate()
                .map(|(i, c)| {
                    let k = i as i32 + 1;
                    c * (b.powi(k) - a.powi(k)) / k as f64
                })
                .sum()),
            Family::Exponential { scale, rate } => {
                if *rate == 0.0 {
                    Ok(scale * (b - a))
                } else {
                    Ok(scale / rate * (rate * a).exp() * (rate * (b - a)).exp_m1())
                }
            }
            Family::Reciprocal { .. } => {
                adaptive::integrate(|x| self.value(x), a, b, Options::default()).map(|e| e.value)
            }
            Family::PiecewiseG => {
                // split at the kink so both pieces are smooth
                let mut total = 0.0;
                let mut lo = a;
                for hi in [-1.0, b] {
                    if hi > lo && hi <= b {
                        total +=
                            adaptive::integrate(|x| self.value(x), lo, hi, Options::default())?
                                .value;
                        lo = hi;
                    }
                }
                Ok(total)
            }
        }
    }
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::Polynomial { .. } => "polynomial",
            Family::Exponential { .. } => "exponential",
            Family::Reciprocal { .. } => "reciprocal",
            Family::PiecewiseG => "piecewise g",
        }
    }
}

/// Same grammar accepted by [`Family::from_str`].
impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::Polynomial { coeffs } => {
                f.write_str("poly:")?;
                for (i, c) in coeffs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{c}")?;
                }
                Ok(())
            }
            Family::Exponential { scale, rate } => write!(f, "exp:{scale},{rate}"),
            Family::Reciprocal { shift } => write!(f, "recip:{shift}"),
            Family::PiecewiseG => f.write_str("g"),
        }
    }
}

/// Parses `poly:c0,c1,...`, `exp:c,k`, `recip:s` or `g`.
impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "g" {
            return Ok(Family::PiecewiseG);
        }
        let (kind, args) = s
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("function `{s}`: expected family:params")))?;
        let nums = args
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| Error::Parse(format!("function `{s}`: bad number `{t}`")))
            })
            .collect::<Result<Vec<_>>>()?;
        let arity = |n: usize| {
            if nums.len() == n {
                Ok(())
            } else {
                Err(Error::Parse(format!(
                    "function `{s}`: expected {n} parameters, got {}",
                    nums.len()
                )))
            }
        };
        match kind {
            "poly" => Ok(Family::Polynomial { coeffs: nums }),
            "exp" => {
                arity(2)?;
                Ok(Family::Exponential {
                    scale: nums[0],
                    rate: nums[1],
                })
            }
            "recip" => {
                arity(1)?;
                Ok(Family::Reciprocal { shift: nums[0] })
            }
            other => Err(Error::Parse(format!("unknown function family `{other}`"))),
        }
    }
}

impl FromStr for FunctionSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let family: Family = s.parse()?;
        let label = family.to_string();
        FunctionSpec::new(family, label)
    }
}

/// Outcome of the grid quasi-convexity test.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuasiconvexVerdict {
    pub holds: bool,
    /// Grid points `x < y < z` with `f(y) > max{f(x), f(z)} + tolerance`.
    pub witness: Option<(f64, f64, f64)>,
    pub grid_size: usize,
    pub tolerance: f64,
}

/// `n` equally spaced points from `a` to `b` inclusive; the last is `b` exactly.
pub fn uniform_grid(iv: Interval, n: usize) -> Vec<f64> {
    let (a, w) = (iv.a(), iv.width());
    let last = (n - 1) as f64;
    (0..n)
        .map(|i| {
            if i + 1 == n {
                iv.b()
            } else {
                a + w * (i as f64 / last)
            }
        })
        .collect()
}

/// Valley-shape test. A sampled sequence is quasi-convex on the grid iff no
/// interior sample exceeds both the smallest value to its left and the
/// smallest value to its right by more than `tol`. Returns indices of the
/// most severe violating triple, if any.
///
/// Linear time; equivalent to checking every triple `i < j < k`.
pub fn valley_violation(samples: &[f64], tol: f64) -> Option<(usize, usize, usize)> {
    let n = samples.len();
    if n < 3 {
        return None;
    }
    // suffix_min[j] = index of the minimum over samples[j..]
    let mut suffix_min = vec![n - 1; n];
    for j in (0..n - 1).rev() {
        let next = suffix_min[j + 1];
        suffix_min[j] = if samples[j] <= samples[next] { j } else { next };
    }
    let mut prefix_min = 0;
    let mut worst: Option<(f64, (usize, usize, usize))> = None;
    for j in 1..n - 1 {
        if samples[j - 1] < samples[prefix_min] {
            prefix_min = j - 1;
        }
        let right = suffix_min[j + 1];
        let excess = samples[j] - samples[prefix_min].max(samples[right]);
        if excess > tol && worst.is_none_or(|(e, _)| excess > e) {
            worst = Some((excess, (prefix_min, j, right)));
        }
    }
    worst.map(|(_, t)| t)
}

fn horner_derivative(coeffs: &[f64], x: f64, order: u8) -> f64 {
    let order = order as usize;
    coeffs
        .iter()
        .enumerate()
        .skip(order)
        .rev()
        .fold(0.0, |acc, (i, &c)| {
            let falling: f64 = (0..order).map(|k| (i - k) as f64).product();
            acc * x + c * falling
        })
}
