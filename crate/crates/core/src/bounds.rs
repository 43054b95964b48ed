//! Closed-form Iyengar-type bounds on the trapezoid defect
//!
//! ```text
//! | (f(a) + f(b))/2 - (1/(b-a)) ∫ₐᵇ f |
//! ```
//!
//! for twice differentiable `f` whose `|f''|^q` is quasi-convex on `[a, b]`,
//! plus the classical first-derivative bounds they refine.
//!
//! Every bound depends on `f` only through `max{|f''(a)|^q, |f''(b)|^q}^{1/q}`,
//! which for nonnegative data is just `max{|f''(a)|, |f''(b)|}`; it is computed
//! in that form so large derivative values never overflow through `x^q`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special::beta;

/// Smallest exponent for which the Hölder split behind [`bound_v1`] is finite:
/// `2q² - 4q + 1 > 0` ⇔ `q > 1 + √2/2`.
pub const V1_FRONTIER: f64 = 1.0 + std::f64::consts::FRAC_1_SQRT_2;

/// A closed interval `[a, b]` with finite `a < b`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    a: f64,
    b: f64,
}

impl Interval {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite()) {
            return Err(Error::domain(format!(
                "interval endpoints must be finite, got [{a}, {b}]"
            )));
        }
        if a >= b {
            return Err(Error::domain(format!(
                "interval requires a < b, got [{a}, {b}]"
            )));
        }
        Ok(Self { a, b })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn width(&self) -> f64 {
        self.b - self.a
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.a + self.b)
    }

    /// True when the interval reaches below zero. The bounds never use
    /// `a >= 0`, but reports carry this flag so runs restricted to
    /// `[0, ∞)` can filter.
    pub fn negative_domain(&self) -> bool {
        self.a < 0.0
    }

    pub fn contains(&self, x: f64) -> bool {
        self.a <= x && x <= self.b
    }
}

/// Returns `p = q/(q-1)`, the Hölder conjugate of `q > 1`.
pub fn conjugate_exponent(q: f64) -> Result<f64> {
    if !q.is_finite() || q <= 1.0 {
        return Err(Error::domain(format!("no finite conjugate for q = {q}")));
    }
    Ok(q / (q - 1.0))
}

/// Conjugate exponent pair `(q, p)` with `1/p + 1/q = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HolderPair {
    q: f64,
    p: f64,
}

impl HolderPair {
    pub fn new(q: f64) -> Result<Self> {
        let p = conjugate_exponent(q)?;
        Ok(Self { q, p })
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    /// Whether `∫₀¹ t^{(q-p)/(q-1)} dt` converges, i.e. `2q² - 4q + 1 > 0`.
    pub fn v1_valid(&self) -> bool {
        2.0 * self.q * self.q - 4.0 * self.q + 1.0 > 0.0
    }

    /// `∫₀¹ t^{(q-p)/(q-1)} dt = (q-1)/(2q-p-1)` when finite.
    pub fn holder_split_factor(&self) -> Result<f64> {
        if !self.v1_valid() {
            return Err(divergent(self.q));
        }
        Ok((self.q - 1.0) / (2.0 * self.q - self.p - 1.0))
    }
}

fn divergent(q: f64) -> Error {
    Error::validity(format!(
        "Hölder split divergent for this q (q = {q}, need q > {V1_FRONTIER:.6})"
    ))
}

/// `|f''(a)|` and `|f''(b)|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SecondDerivEndpoints {
    d2a: f64,
    d2b: f64,
}

impl SecondDerivEndpoints {
    /// Takes absolute values of the supplied derivatives.
    pub fn new(d2a: f64, d2b: f64) -> Result<Self> {
        if !(d2a.is_finite() && d2b.is_finite()) {
            return Err(Error::domain(format!(
                "second-derivative endpoint data must be finite, got ({d2a}, {d2b})"
            )));
        }
        Ok(Self {
            d2a: d2a.abs(),
            d2b: d2b.abs(),
        })
    }

    pub fn d2a(&self) -> f64 {
        self.d2a
    }

    pub fn d2b(&self) -> f64 {
        self.d2b
    }

    /// `max{d2a^q, d2b^q}^{1/q}`
    pub fn max_norm(&self) -> f64 {
        self.d2a.max(self.d2b)
    }
}

/// Which closed-form bound produced a value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum BoundKind {
    /// Hölder split with `t^{p}(1-t)^{q}` weight.
    V1,
    /// Power-mean split.
    V2,
    /// Weighted Hölder with weight `t`.
    V3,
}

impl std::fmt::Display for BoundKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            BoundKind::V1 => "V1",
            BoundKind::V2 => "V2",
            BoundKind::V3 => "V3",
        })
    }
}

/// Exponent applied to `2/((q+1)(q+2))` in the power-mean bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum V2Exponent {
    /// `1/q`, what the power-mean argument actually produces.
    #[default]
    ProofExponent,
    /// `(q-1)/q`, the printed variant. Kept only for the discrimination
    /// experiment; it is not a sound bound in general.
    StatementExponent,
}

/// All three bounds with their minimum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundBreakdown {
    pub v1: Option<f64>,
    pub v2: f64,
    pub v3: Option<f64>,
    pub best: f64,
    pub winner: BoundKind,
}

/// `((b-a)²/2) ((q-1)/(2q-p-1))^{(q-1)/q} B(p+1, q+1)^{1/q} max^{1/q}`.
pub fn bound_v1(iv: Interval, hp: HolderPair, d2: SecondDerivEndpoints) -> Result<f64> {
    Ok(0.5 * iv.width().powi(2) * v1_constant(hp)? * d2.max_norm())
}

fn v1_constant(hp: HolderPair) -> Result<f64> {
    let (q, p) = (hp.q, hp.p);
    let split = hp.holder_split_factor()?;
    Ok(split.powf((q - 1.0) / q) * beta(p + 1.0, q + 1.0)?.powf(1.0 / q))
}

/// `φ(q) = (2/((q+1)(q+2)))^{1/q}`; `φ(1) = 1/3` and `1/3 < φ < 1` beyond.
pub fn power_mean_factor(q: f64) -> f64 {
    (2.0 / ((q + 1.0) * (q + 2.0))).powf(1.0 / q)
}

/// `((b-a)²/4) (2/((q+1)(q+2)))^{e} max^{1/q}` with `e = 1/q` or `(q-1)/q`.
pub fn bound_v2(
    iv: Interval,
    q: f64,
    d2: SecondDerivEndpoints,
    variant: V2Exponent,
) -> Result<f64> {
    check_q_at_least_one(q)?;
    let base = 2.0 / ((q + 1.0) * (q + 2.0));
    let factor = match variant {
        V2Exponent::ProofExponent => base.powf(1.0 / q),
        V2Exponent::StatementExponent => base.powf((q - 1.0) / q),
    };
    Ok(0.25 * iv.width().powi(2) * factor * d2.max_norm())
}

/// `((b-a)²/2^{1+1/q}) B(2, p+1)^{1/p} max^{1/q}`.
pub fn bound_v3(iv: Interval, hp: HolderPair, d2: SecondDerivEndpoints) -> Result<f64> {
    Ok(iv.width().powi(2) * v3_constant(hp)? * d2.max_norm())
}

fn v3_constant(hp: HolderPair) -> Result<f64> {
    let (q, p) = (hp.q, hp.p);
    Ok(beta(2.0, p + 1.0)?.powf(1.0 / p) / 2f64.powf(1.0 + 1.0 / q))
}

fn check_q_at_least_one(q: f64) -> Result<()> {
    if !q.is_finite() || q < 1.0 {
        return Err(Error::domain(format!(
            "exponent must satisfy q >= 1, got {q}"
        )));
    }
    Ok(())
}

/// Evaluates every bound defined at `q` and returns the smallest. Ties go to
/// the lowest index.
pub fn best_bound(iv: Interval, q: f64, d2: SecondDerivEndpoints) -> Result<BoundBreakdown> {
    let v2 = bound_v2(iv, q, d2, V2Exponent::ProofExponent)?;
    let (v1, v3) = if q > 1.0 {
        let hp = HolderPair::new(q)?;
        let v1 = if hp.v1_valid() {
            Some(bound_v1(iv, hp, d2)?)
        } else {
            None
        };
        (v1, Some(bound_v3(iv, hp, d2)?))
    } else {
        (None, None)
    };

    let mut best = v2;
    let mut winner = BoundKind::V2;
    if let Some(v) = v1 {
        if v <= best {
            best = v;
            winner = BoundKind::V1;
        }
    }
    if let Some(v) = v3 {
        if v < best {
            best = v;
            winner = BoundKind::V3;
        }
    }
    Ok(BoundBreakdown {
        v1,
        v2,
        v3,
        best,
        winner,
    })
}

/// Declared monotonicity of `|f''|^q` on the interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Trend {
    #[default]
    Unknown,
    Decreasing,
    Increasing,
}

/// `((b-a)²/4) max^{1/q}`: the power-mean bound with `φ(q)` replaced by 1.
pub fn bound_v2_limit(iv: Interval, q: f64, d2: SecondDerivEndpoints) -> Result<f64> {
    bound_v2_limit_with_trend(iv, q, d2, Trend::Unknown)
}

/// As [`bound_v2_limit`], using only the endpoint the declared trend makes
/// maximal.
pub fn bound_v2_limit_with_trend(
    iv: Interval,
    q: f64,
    d2: SecondDerivEndpoints,
    trend: Trend,
) -> Result<f64> {
    check_q_at_least_one(q)?;
    let m = match trend {
        Trend::Unknown => d2.max_norm(),
        Trend::Decreasing => d2.d2a,
        Trend::Increasing => d2.d2b,
    };
    Ok(0.25 * iv.width().powi(2) * m)
}

/// Bounds with the endpoint maximum replaced by `M = sup |f''|`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SupKind {
    V1,
    V3,
}

pub fn sup_bound(kind: SupKind, iv: Interval, hp: HolderPair, m: f64) -> Result<f64> {
    if !m.is_finite() || m < 0.0 {
        return Err(Error::domain(format!(
            "supremum M must be finite and >= 0, got {m}"
        )));
    }
    let w2 = iv.width().powi(2);
    match kind {
        SupKind::V1 => Ok(0.5 * w2 * m * v1_constant(hp)?),
        SupKind::V3 => Ok(w2 * m * v3_constant(hp)?),
    }
}

/// Classical Iyengar bound `M(b-a)/4 - (f(b)-f(a))²/(4M(b-a))`, where `M` is
/// a Lipschitz constant of `f`.
pub fn classic_iyengar_bound(iv: Interval, m: f64, fa: f64, fb: f64) -> Result<f64> {
    let w = iv.width();
    if !(m.is_finite() && m > 0.0) {
        return Err(Error::Inconsistent(format!(
            "Lipschitz constant must be positive, got {m}"
        )));
    }
    let df = fb - fa;
    if df.abs() > m * w {
        return Err(Error::Inconsistent(format!(
            "|f(b) - f(a)| = {} exceeds M(b-a) = {}",
            df.abs(),
            m * w
        )));
    }
    // clamp away the rounding residue in the extremal case M(b-a) = |Δf|
    Ok((m * w / 4.0 - df * df / (4.0 * m * w)).max(0.0))
}

/// First-derivative bounds for quasi-convex `|f'|`, returned as
/// `((b-a)/4 · max{|f'(a)|, |f'(b)|}, (b-a)/(2(p+1)^{1/p}) · max{...}^{(p-1)/p})`.
///
/// The second component needs `p > 1`; use [`ion_sup_bound`] when only the
/// first is wanted.
pub fn ion_bounds(iv: Interval, p: f64, d1a: f64, d1b: f64) -> Result<(f64, f64)> {
    let first = ion_sup_bound(iv, d1a, d1b)?;
    if !p.is_finite() || p <= 1.0 {
        return Err(Error::domain(format!(
            "second first-derivative bound needs p > 1, got {p}"
        )));
    }
    let m = d1a.abs().max(d1b.abs());
    let second = iv.width() / (2.0 * (p + 1.0).powf(1.0 / p)) * m;
    Ok((first, second))
}

pub fn ion_sup_bound(iv: Interval, d1a: f64, d1b: f64) -> Result<f64> {
    if !(d1a.is_finite() && d1b.is_finite()) {
        return Err(Error::domain(
            "first-derivative endpoint data must be finite",
        ));
    }
    Ok(iv.width() / 4.0 * d1a.abs().max(d1b.abs()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn unit() -> Interval {
        Interval::new(0.0, 1.0).unwrap()
    }

    fn d2(a: f64, b: f64) -> SecondDerivEndpoints {
        SecondDerivEndpoints::new(a, b).unwrap()
    }

    #[test]
    fn interval_rejects_bad_endpoints() {
        assert!(Interval::new(1.0, 1.0).is_err());
        assert!(Interval::new(2.0, 1.0).is_err());
        assert!(Interval::new(0.0, f64::INFINITY).is_err());
        assert!(Interval::new(-1.0, 0.0).unwrap().negative_domain());
    }

    #[test]
    fn conjugates() {
        assert_eq!(conjugate_exponent(2.0).unwrap(), 2.0);
        assert_abs_diff_eq!(conjugate_exponent(3.0).unwrap(), 1.5, epsilon = 1e-15);
        assert_abs_diff_eq!(conjugate_exponent(1.2).unwrap(), 6.0, epsilon = 1e-12);
        assert!(conjugate_exponent(1.0).is_err());
        assert!(conjugate_exponent(0.5).is_err());
    }

    #[test]
    fn holder_pair_flags() {
        assert!(!HolderPair::new(1.7).unwrap().v1_valid());
        assert!(HolderPair::new(1.71).unwrap().v1_valid());
        let hp = HolderPair::new(2.0).unwrap();
        assert_abs_diff_eq!(1.0 / hp.p() + 1.0 / hp.q(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn v1_examples() {
        let hp = HolderPair::new(2.0).unwrap();
        let expected = (1.0f64 / 30.0).sqrt();
        assert_abs_diff_eq!(
            bound_v1(unit(), hp, d2(2.0, 2.0)).unwrap(),
            expected,
            epsilon = 1e-15
        );
        assert_eq!(bound_v1(unit(), hp, d2(0.0, 0.0)).unwrap(), 0.0);
        let wide = Interval::new(0.0, 2.0).unwrap();
        assert_abs_diff_eq!(
            bound_v1(wide, hp, d2(2.0, 2.0)).unwrap(),
            4.0 * expected,
            epsilon = 1e-14
        );
    }

    #[test]
    fn v1_refuses_below_frontier() {
        for q in [1.1, 1.5, 1.7] {
            let hp = HolderPair::new(q).unwrap();
            assert!(matches!(
                bound_v1(unit(), hp, d2(1.0, 1.0)),
                Err(Error::Validity(_))
            ));
        }
    }

    #[test]
    fn v2_examples() {
        let v = bound_v2(unit(), 1.0, d2(2.0, 2.0), V2Exponent::ProofExponent).unwrap();
        assert_abs_diff_eq!(v, 1.0 / 6.0, epsilon = 1e-15);
        let v = bound_v2(unit(), 2.0, d2(2.0, 2.0), V2Exponent::ProofExponent).unwrap();
        assert_abs_diff_eq!(v, 0.5 * (1.0f64 / 6.0).sqrt(), epsilon = 1e-15);
        for variant in [V2Exponent::ProofExponent, V2Exponent::StatementExponent] {
            assert_eq!(bound_v2(unit(), 1.0, d2(0.0, 0.0), variant).unwrap(), 0.0);
        }
        assert!(bound_v2(unit(), 0.9, d2(1.0, 1.0), V2Exponent::ProofExponent).is_err());
    }

    #[test]
    fn v3_examples() {
        let hp = HolderPair::new(2.0).unwrap();
        let v = bound_v3(unit(), hp, d2(2.0, 2.0)).unwrap();
        assert_abs_diff_eq!(
            v,
            1.0 / (2.0 * 2f64.sqrt()) * (1.0f64 / 12.0).sqrt() * 2.0,
            epsilon = 1e-15
        );
        assert_eq!(bound_v3(unit(), hp, d2(0.0, 0.0)).unwrap(), 0.0);
        // frozen from an independent high-precision quadrature of ∫(1-t)^{1.5} t dt
        let hp3 = HolderPair::new(3.0).unwrap();
        assert_abs_diff_eq!(
            bound_v3(unit(), hp3, d2(2.0, 2.0)).unwrap(),
            0.186_918_074_867_919_41,
            epsilon = 1e-13
        );
    }

    #[test]
    fn best_bound_examples() {
        let b = best_bound(unit(), 2.0, d2(2.0, 2.0)).unwrap();
        assert_eq!(b.winner, BoundKind::V1);
        assert_abs_diff_eq!(b.best, 0.182_574_185_835_055_37, epsilon = 1e-14);

        let b = best_bound(unit(), 1.0, d2(2.0, 2.0)).unwrap();
        assert_eq!(b.winner, BoundKind::V2);
        assert!(b.v1.is_none() && b.v3.is_none());
        assert_abs_diff_eq!(b.best, 1.0 / 6.0, epsilon = 1e-15);

        let b = best_bound(Interval::new(-3.0, 7.0).unwrap(), 3.0, d2(0.0, 0.0)).unwrap();
        assert_eq!(b.best, 0.0);
        assert_eq!(b.winner, BoundKind::V1);
    }

    #[test]
    fn v1_absent_between_one_and_frontier() {
        let b = best_bound(unit(), 1.5, d2(1.0, 3.0)).unwrap();
        assert!(b.v1.is_none());
        assert!(b.v3.is_some());
    }

    #[test]
    fn limit_examples() {
        assert_abs_diff_eq!(
            bound_v2_limit(unit(), 2.0, d2(2.0, 2.0)).unwrap(),
            0.5,
            epsilon = 1e-15
        );
        assert_eq!(bound_v2_limit(unit(), 1.0, d2(0.0, 0.0)).unwrap(), 0.0);
        let iv = Interval::new(0.0, 3.0).unwrap();
        assert_abs_diff_eq!(
            bound_v2_limit(iv, 1.0, d2(1.0, 2.0)).unwrap(),
            4.5,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            bound_v2_limit_with_trend(iv, 1.0, d2(1.0, 2.0), Trend::Decreasing).unwrap(),
            2.25,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            bound_v2_limit_with_trend(iv, 1.0, d2(1.0, 2.0), Trend::Increasing).unwrap(),
            4.5,
            epsilon = 1e-15
        );
    }

    #[test]
    fn sup_examples() {
        let hp = HolderPair::new(2.0).unwrap();
        assert_abs_diff_eq!(
            sup_bound(SupKind::V1, unit(), hp, 2.0).unwrap(),
            0.182_574_185_835_055_37,
            epsilon = 1e-14
        );
        assert_eq!(sup_bound(SupKind::V3, unit(), hp, 0.0).unwrap(), 0.0);
        assert_abs_diff_eq!(
            sup_bound(SupKind::V3, unit(), hp, 2.0).unwrap(),
            0.204_124_145_231_931_5,
            epsilon = 1e-14
        );
        assert!(sup_bound(SupKind::V3, unit(), hp, -1.0).is_err());
        let low = HolderPair::new(1.5).unwrap();
        assert!(matches!(
            sup_bound(SupKind::V1, unit(), low, 1.0),
            Err(Error::Validity(_))
        ));
    }

    #[test]
    fn classic_examples() {
        assert_abs_diff_eq!(
            classic_iyengar_bound(unit(), 2.0, 0.0, 1.0).unwrap(),
            0.375,
            epsilon = 1e-15
        );
        assert_eq!(classic_iyengar_bound(unit(), 1.0, 0.0, 1.0).unwrap(), 0.0);
        let iv = Interval::new(0.0, 2.0).unwrap();
        assert_abs_diff_eq!(
            classic_iyengar_bound(iv, 1.0, 0.0, 0.0).unwrap(),
            0.5,
            epsilon = 1e-15
        );
        assert!(matches!(
            classic_iyengar_bound(unit(), 0.0, 0.0, 1.0),
            Err(Error::Inconsistent(_))
        ));
        assert!(matches!(
            classic_iyengar_bound(unit(), 0.5, 0.0, 1.0),
            Err(Error::Inconsistent(_))
        ));
    }

    #[test]
    fn ion_examples() {
        let (s, h) = ion_bounds(unit(), 2.0, 0.0, 2.0).unwrap();
        assert_abs_diff_eq!(s, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(h, 1.0 / 3f64.sqrt(), epsilon = 1e-15);
        assert_eq!(ion_bounds(unit(), 2.0, 0.0, 0.0).unwrap(), (0.0, 0.0));
        let iv = Interval::new(0.0, 4.0).unwrap();
        let (s, h) = ion_bounds(iv, 2.0, 1.0, 1.0).unwrap();
        assert_abs_diff_eq!(s, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(h, 4.0 / (2.0 * 3f64.sqrt()), epsilon = 1e-15);
        assert!(ion_bounds(unit(), 1.0, 1.0, 1.0).is_err());
        assert_eq!(ion_sup_bound(unit(), 1.0, -3.0).unwrap(), 0.75);
    }

    #[test]
    fn sandwich_endpoints() {
        assert_eq!(power_mean_factor(1.0), 1.0 / 3.0);
        assert_abs_diff_eq!(
            power_mean_factor(2.0),
            (1.0f64 / 6.0).sqrt(),
            epsilon = 1e-15
        );
        assert!(power_mean_factor(100.0) < 1.0);
    }
}
