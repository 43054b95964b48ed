//! Composite trapezoid and midpoint sums with a-priori error certificates.
//!
//! On each subinterval `[xᵢ, xᵢ₊₁]` of width `Δᵢ` the trapezoid error is at
//! most `Δᵢ · best_bound([xᵢ, xᵢ₊₁], q, |f''(xᵢ)|, |f''(xᵢ₊₁)|)`, which scales
//! like `Δᵢ³`. Quasi-convexity of `|f''|^q` on `[a, b]` carries over to every
//! subinterval, so the endpoint maximum is the local one. The certificate is
//! the sum of the local terms.
//!
//! For the weighted-Hölder term the constants are those of the underlying
//! single-interval bound, `B(2, p+1)^{1/p}` with `Δᵢ³` scaling and local
//! endpoints. The midpoint sum has no certificate.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{best_bound, BoundKind, Interval, SecondDerivEndpoints};
use crate::error::{Error, Result};
use crate::functions::{FunctionSpec, QuasiconvexVerdict, DEFAULT_GRID_N, DEFAULT_QC_TOL};

/// Nodes `a = x₀ < x₁ < … < xₙ = b`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Partition {
    nodes: Vec<f64>,
}

impl Partition {
    pub fn new(nodes: Vec<f64>) -> Result<Self> {
        if nodes.len() < 2 {
            return Err(Error::domain("partition needs at least two nodes"));
        }
        if nodes.iter().any(|x| !x.is_finite()) || nodes.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::domain(
                "partition nodes must be finite and strictly increasing",
            ));
        }
        Ok(Self { nodes })
    }

    /// `n + 1` equally spaced nodes spanning `iv`.
    pub fn uniform(iv: Interval, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::domain("uniform partition needs n >= 1"));
        }
        let nodes = (0..=n)
            .map(|i| {
                if i == n {
                    iv.b()
                } else {
                    iv.a() + iv.width() * (i as f64 / n as f64)
                }
            })
            .collect();
        Self::new(nodes)
    }

    /// Inserts every subinterval midpoint.
    pub fn refined(&self) -> Self {
        let mut nodes = Vec::with_capacity(2 * self.nodes.len() - 1);
        for w in self.nodes.windows(2) {
            nodes.push(w[0]);
            nodes.push(0.5 * (w[0] + w[1]));
        }
        nodes.push(*self.nodes.last().expect("nonempty"));
        Self { nodes }
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Number of subintervals.
    pub fn len(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn interval(&self) -> Interval {
        Interval::new(self.nodes[0], self.nodes[self.nodes.len() - 1]).expect("validated")
    }

    pub fn subintervals(&self) -> impl Iterator<Item = Interval> + '_ {
        self.nodes
            .windows(2)
            .map(|w| Interval::new(w[0], w[1]).expect("validated"))
    }
}

/// `Σ (f(xᵢ) + f(xᵢ₊₁))/2 · Δᵢ`
pub fn trapezoid_sum(f: &FunctionSpec, d: &Partition) -> Result<f64> {
    let values = d
        .nodes
        .iter()
        .map(|&x| f.value(x))
        .collect::<Result<Vec<_>>>()?;
    Ok(d.nodes
        .windows(2)
        .zip(values.windows(2))
        .map(|(x, y)| 0.5 * (y[0] + y[1]) * (x[1] - x[0]))
        .sum())
}

/// `Σ f((xᵢ + xᵢ₊₁)/2) · Δᵢ`
pub fn midpoint_sum(f: &FunctionSpec, d: &Partition) -> Result<f64> {
    d.nodes
        .windows(2)
        .map(|x| Ok(f.value(0.5 * (x[0] + x[1]))? * (x[1] - x[0])))
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Method {
    Trapezoid,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LocalBound {
    pub index: usize,
    pub width: f64,
    pub local_bound: f64,
    pub winner: BoundKind,
}

/// A-priori bound on `|∫ f - T(f, d)|`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub total: f64,
    pub per_interval: Vec<LocalBound>,
    pub q: f64,
    pub method: Method,
}

/// Bound on the trapezoid error over one subinterval, and which formula gave it.
pub fn interval_certificate(f: &FunctionSpec, sub: Interval, q: f64) -> Result<(f64, BoundKind)> {
    let d2 = SecondDerivEndpoints::new(f.evaluate(sub.a(), 2)?, f.evaluate(sub.b(), 2)?)?;
    let b = best_bound(sub, q, d2)?;
    Ok((sub.width() * b.best, b.winner))
}

pub fn composite_certificate(f: &FunctionSpec, d: &Partition, q: f64) -> Result<Certificate> {
    let per_interval = d
        .subintervals()
        .collect::<Vec<_>>()
        .into_par_iter()
        .enumerate()
        .map(|(index, sub)| {
            let (local_bound, winner) = interval_certificate(f, sub, q)?;
            Ok(LocalBound {
                index,
                width: sub.width(),
                local_bound,
                winner,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let total = round_up_sum(per_interval.iter().map(|l| l.local_bound));
    Ok(Certificate {
        total,
        per_interval,
        q,
        method: Method::Trapezoid,
    })
}

/// Sum of nonnegative terms, widened by a bound on its own rounding error so
/// the result never falls below the exact sum.
fn round_up_sum(terms: impl ExactSizeIterator<Item = f64>) -> f64 {
    let n = terms.len() as f64;
    let sum: f64 = terms.sum();
    sum * (1.0 + (n + 2.0) * f64::EPSILON)
}

/// A trapezoid value with its certificate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertifiedResult {
    pub value: f64,
    pub certificate: Certificate,
    pub partition: Partition,
    /// Number of doublings performed from the single-interval start.
    pub refinements: usize,
    /// Grid verdict on quasi-convexity of `|f''|` over the whole interval,
    /// the hypothesis the certificate relies on.
    pub quasiconvex: QuasiconvexVerdict,
}

/// Doubles a uniform partition from `n = 1` until the certificate is at most
/// `eps`. Fails with [`Error::BudgetExhausted`] once `n` would exceed `max_n`.
pub fn integrate_certified(
    f: &FunctionSpec,
    iv: Interval,
    q: f64,
    eps: f64,
    max_n: usize,
) -> Result<CertifiedResult> {
    if !(eps.is_finite() && eps > 0.0) {
        return Err(Error::domain(format!(
            "target eps must be positive, got {eps}"
        )));
    }
    if max_n == 0 {
        return Err(Error::domain("max_n must be at least 1"));
    }
    f.check_domain(iv)?;
    let quasiconvex = f.is_quasiconvex(iv, 2, DEFAULT_GRID_N, DEFAULT_QC_TOL)?;

    let mut partition = Partition::uniform(iv, 1)?;
    let mut refinements = 0;
    loop {
        let certificate = composite_certificate(f, &partition, q)?;
        let value = trapezoid_sum(f, &partition)?;
        let result = CertifiedResult {
            value,
            certificate,
            partition,
            refinements,
            quasiconvex: quasiconvex.clone(),
        };
        if result.certificate.total <= eps {
            return Ok(result);
        }
        let n = result.partition.len();
        if n.saturating_mul(2) > max_n {
            return Err(Error::BudgetExhausted {
                best: Box::new(result),
            });
        }
        partition = Partition::uniform(iv, 2 * n)?;
        refinements += 1;
    }
}
