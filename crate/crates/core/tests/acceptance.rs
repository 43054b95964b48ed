//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use quasiquad::bounds::{
    bound_v1, bound_v2, HolderPair, Interval, SecondDerivEndpoints, V2Exponent, V1_FRONTIER,
};
use quasiquad::corpus::default_corpus;
use quasiquad::functions::{valley_violation, DEFAULT_QC_TOL};
use quasiquad::means::{check_means_proposition, Proposition};
use quasiquad::quadrature::{
    composite_certificate, integrate_certified, midpoint_sum, trapezoid_sum, Partition,
};
use quasiquad::special::beta;
use quasiquad::verify::{
    frontier_study, lemma_identity_residual, open_closed_grid, sandwich_check, summarize, sweep,
    trapezoid_defect, DEFAULT_DEPTHS, DEFAULT_Q_GRID, LEMMA_TOL,
};
use quasiquad::{Error, FunctionSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        let holds: bool = $cond;
        if !holds {
            return Err(format!($($fmt)+));
        }
    };
}

fn iv(a: f64, b: f64) -> Interval {
    Interval::new(a, b).expect("valid interval")
}

fn square() -> FunctionSpec {
    FunctionSpec::polynomial(&[0.0, 0.0, 1.0])
}

fn within(limit: Duration, start: Instant) -> Result<Duration, String> {
    let took = start.elapsed();
    if took < limit {
        Ok(took)
    } else {
        Err(format!("took {took:?}, limit {limit:?}"))
    }
}

fn quadratic_tightness() -> Outcome {
    let start = Instant::now();
    let unit = iv(0.0, 1.0);
    let d2 = SecondDerivEndpoints::new(2.0, 2.0).map_err(|e| e.to_string())?;
    let bound = bound_v2(unit, 1.0, d2, V2Exponent::ProofExponent).map_err(|e| e.to_string())?;
    let defect = trapezoid_defect(&square(), unit).map_err(|e| e.to_string())?;
    ensure!((bound - 1.0 / 6.0).abs() <= 1e-12, "bound {bound} != 1/6");
    ensure!(
        (defect - 1.0 / 6.0).abs() <= 1e-12,
        "defect {defect} != 1/6"
    );
    ensure!(
        (bound - defect).abs() <= 1e-12,
        "bound {bound} vs defect {defect}"
    );

    let p2 = Partition::uniform(unit, 2).map_err(|e| e.to_string())?;
    let cert = composite_certificate(&square(), &p2, 1.0).map_err(|e| e.to_string())?;
    ensure!(
        (cert.total - 1.0 / 24.0).abs() <= 1e-12,
        "n=2 certificate {} != 1/24",
        cert.total
    );
    let took = within(Duration::from_secs(1), start)?;
    Ok(format!(
        "bound={bound:.17} defect={defect:.17} cert(n=2)={:.17} in {took:?}",
        cert.total
    ))
}

fn soundness_sweep() -> Outcome {
    let start = Instant::now();
    let corpus = default_corpus();
    let mut labels: Vec<&str> = corpus.iter().map(|e| e.function.label.as_str()).collect();
    labels.sort_unstable();
    labels.dedup();
    ensure!(
        labels.len() >= 6,
        "corpus has only {} distinct functions",
        labels.len()
    );

    let records = sweep(&corpus, &DEFAULT_Q_GRID).map_err(|e| e.to_string())?;
    let s = summarize(&records);
    ensure!(
        s.records == corpus.len() * DEFAULT_Q_GRID.len(),
        "expected one record per entry and q"
    );
    ensure!(s.errors == 0, "{} records failed to evaluate", s.errors);
    ensure!(
        s.excluded == 0,
        "{} records failed the quasi-convexity verdict",
        s.excluded
    );
    ensure!(
        s.violations == 0,
        "{} violations, min margin {:?}",
        s.violations,
        s.min_margin
    );
    let took = within(Duration::from_secs(30), start)?;
    Ok(format!(
        "{} records, {} functions, 0 violations, min margin {:.3e} in {took:?}",
        s.records,
        labels.len(),
        s.min_margin.unwrap_or(f64::NAN)
    ))
}

fn integral_identity() -> Outcome {
    let start = Instant::now();
    let mut worst = 0.0f64;
    for e in default_corpus() {
        let c = lemma_identity_residual(&e.function, e.interval)
            .map_err(|err| format!("{}: {err}", e.function.label))?;
        ensure!(
            c.residual <= LEMMA_TOL,
            "{} residual {:.3e}",
            e.function.label,
            c.residual
        );
        worst = worst.max(c.residual);
    }
    let took = within(Duration::from_secs(10), start)?;
    Ok(format!("max residual {worst:.3e} in {took:?}"))
}

fn v1_frontier() -> Outcome {
    let unit = iv(0.0, 1.0);
    let d2 = SecondDerivEndpoints::new(2.0, 2.0).map_err(|e| e.to_string())?;
    for q in [1.1, 1.5, 1.7] {
        let hp = HolderPair::new(q).map_err(|e| e.to_string())?;
        ensure!(
            matches!(bound_v1(unit, hp, d2), Err(Error::Validity(_))),
            "bound_v1 accepted q = {q}"
        );
        let study = frontier_study(q, &DEFAULT_DEPTHS).map_err(|e| e.to_string())?;
        ensure!(
            study.closed_form.is_none(),
            "closed form reported below the frontier at q = {q}"
        );
        ensure!(
            study.diverges(),
            "truncation study does not diverge at q = {q}: {:?}",
            study.truncated
        );
    }
    let mut worst_gap = 0.0f64;
    for q in [1.71, 2.0, 5.0] {
        let hp = HolderPair::new(q).map_err(|e| e.to_string())?;
        let v = bound_v1(unit, hp, d2).map_err(|e| format!("q = {q}: {e}"))?;
        ensure!(v.is_finite() && v > 0.0, "bound_v1({q}) = {v}");
        let study = frontier_study(q, &DEFAULT_DEPTHS).map_err(|e| e.to_string())?;
        let gap = study
            .closed_form_gap()
            .ok_or_else(|| format!("no closed form at q = {q}"))?;
        ensure!(
            gap <= 1e-8,
            "truncated integral misses closed form by {gap:.3e} at q = {q}"
        );
        worst_gap = worst_gap.max(gap);
    }
    Ok(format!(
        "frontier {V1_FRONTIER:.6}; diverges at 1.1/1.5/1.7, max gap {worst_gap:.3e} at 1.71/2/5"
    ))
}

fn sandwich() -> Outcome {
    let at_one = sandwich_check(&[1.0]).map_err(|e| e.to_string())?;
    ensure!(
        at_one.passed,
        "phi(1) = {} not 1/3 within 1e-15",
        at_one.entries[0].phi
    );
    let grid = open_closed_grid(1.0, 100.0, 1000);
    ensure!(
        grid.len() == 1000 && grid[0] > 1.0 && grid[999] == 100.0,
        "grid is not 1000 points in (1, 100]"
    );
    let r = sandwich_check(&grid).map_err(|e| e.to_string())?;
    if let Some(bad) = r
        .entries
        .iter()
        .find(|e| !(1.0 / 3.0 < e.phi && e.phi < 1.0))
    {
        return Err(format!("phi({}) = {}", bad.q, bad.phi));
    }
    ensure!(r.passed, "sandwich report failed");
    let lo = r
        .entries
        .iter()
        .map(|e| e.phi)
        .fold(f64::INFINITY, f64::min);
    let hi = r.entries.iter().map(|e| e.phi).fold(0.0, f64::max);
    Ok(format!(
        "phi(1)={:.17}, phi over (1,100] in [{lo:.6}, {hi:.6}]",
        at_one.entries[0].phi
    ))
}

fn certified_integration() -> Outcome {
    let eps = 1e-4;
    let r = integrate_certified(&square(), iv(0.0, 1.0), 1.0, eps, 1 << 20)
        .map_err(|e| e.to_string())?;
    // exact 1/3 as hi + lo; value - hi is exact since value is near hi
    let hi = 1.0 / 3.0;
    let lo = (-3.0f64).mul_add(hi, 1.0) / 3.0;
    let true_error = ((r.value - hi) - lo).abs();
    let oracle = square()
        .reference_integral(iv(0.0, 1.0))
        .map_err(|e| e.to_string())?;
    ensure!(oracle == hi, "oracle {oracle} disagrees with 1/3");
    let cert = r.certificate.total;
    ensure!(cert <= eps, "certificate {cert} > {eps}");
    ensure!(
        true_error <= cert,
        "true error {true_error:e} > certificate {cert:e}"
    );
    let n = r.partition.len() as f64;
    ensure!(1.0 / (6.0 * n * n) <= eps, "n = {n} too coarse");
    Ok(format!(
        "n={n} value={:.17} cert={cert:.6e} true error={true_error:.6e}",
        r.value
    ))
}

fn means_grid() -> Outcome {
    let points = [0.5, 1.0, 1.5, 2.0, 3.0];
    let q_for = |p: Proposition| -> &'static [f64] {
        match p {
            Proposition::P5 => &[1.75, 2.0, 3.0, 5.0, 10.0],
            Proposition::P6 => &[1.0, 1.5, 2.0, 3.0, 5.0, 10.0],
            Proposition::P7 => &[1.5, 2.0, 3.0, 5.0, 10.0],
        }
    };
    let mut checked = 0;
    let mut worst_equality = 0.0f64;
    for &a in &points {
        for &b in points.iter().filter(|&&b| b > a) {
            for n in 2..=4u32 {
                for prop in [Proposition::P5, Proposition::P6, Proposition::P7] {
                    for &q in q_for(prop) {
                        let r = check_means_proposition(prop, a, b, n, q)
                            .map_err(|e| format!("{prop:?} a={a} b={b} n={n} q={q}: {e}"))?;
                        ensure!(
                            r.holds,
                            "{prop:?} a={a} b={b} n={n} q={q}: lhs {} > rhs {}",
                            r.lhs,
                            r.rhs
                        );
                        checked += 1;
                        if prop == Proposition::P6 && n == 2 && q == 1.0 {
                            let gap = (r.rhs - r.lhs).abs();
                            ensure!(gap <= 1e-12, "P6 equality off by {gap:e} at a={a} b={b}");
                            worst_equality = worst_equality.max(gap);
                        }
                    }
                }
            }
        }
    }
    Ok(format!(
        "{checked} records hold, P6 n=2 q=1 max gap {worst_equality:.3e}"
    ))
}

fn brute_force_violation(s: &[f64], tol: f64) -> bool {
    let n = s.len();
    (0..n).any(|i| (i + 1..n).any(|j| (j + 1..n).any(|k| s[j] > s[i].max(s[k]) + tol)))
}

fn piecewise_monotone(rng: &mut ChaCha8Rng) -> Vec<f64> {
    let len = rng.gen_range(3..=64);
    let pieces = rng.gen_range(1..=4);
    let mut cuts: Vec<usize> = (0..pieces - 1).map(|_| rng.gen_range(1..len)).collect();
    cuts.push(len);
    cuts.sort_unstable();
    let mut up = rng.gen_bool(0.5);
    let mut v: f64 = rng.gen_range(-1.0..1.0);
    let mut out = Vec::with_capacity(len);
    for i in 0..len {
        if cuts.first() == Some(&i) {
            cuts.remove(0);
            up = !up;
        }
        // occasional flat steps and steps smaller than the tolerance
        let step = match rng.gen_range(0..10) {
            0 => 0.0,
            1 => DEFAULT_QC_TOL * rng.gen_range(0.0..2.0),
            _ => rng.gen_range(0.0..1.0),
        };
        v += if up { step } else { -step };
        out.push(v);
    }
    out
}

fn integer_beta_oracle(m: u64, n: u64) -> f64 {
    fn fact(k: u64) -> u128 {
        (1..=k as u128).product()
    }
    fn gcd(a: u128, b: u128) -> u128 {
        if b == 0 {
            a
        } else {
            gcd(b, a % b)
        }
    }
    let num = fact(m - 1) * fact(n - 1);
    let den = fact(m + n - 1);
    let g = gcd(num, den);
    let (num, den) = (num / g, den / g);
    assert!(num < 1 << 53 && den < 1 << 53);
    num as f64 / den as f64
}

fn brute_force_equivalences() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0001);
    let mut violating = 0;
    for case in 0..50 {
        let s = piecewise_monotone(&mut rng);
        let fast = valley_violation(&s, DEFAULT_QC_TOL);
        let slow = brute_force_violation(&s, DEFAULT_QC_TOL);
        ensure!(
            fast.is_some() == slow,
            "case {case} (len {}): valley {fast:?}, brute force {slow}",
            s.len()
        );
        if let Some((i, j, k)) = fast {
            ensure!(
                i < j && j < k && s[j] > s[i].max(s[k]) + DEFAULT_QC_TOL,
                "case {case}: bad witness"
            );
            violating += 1;
        }
    }
    for m in 1..=10u64 {
        for n in 1..=10u64 {
            let got = beta(m as f64, n as f64).map_err(|e| e.to_string())?;
            let want = integer_beta_oracle(m, n);
            ensure!(
                got.to_bits() == want.to_bits(),
                "B({m},{n}) = {got:e}, factorial formula {want:e}"
            );
        }
    }
    Ok(format!(
        "50 samples agree ({violating} non-quasi-convex), B(m,n) exact for m,n <= 10"
    ))
}

fn refinement_identity() -> Outcome {
    let corpus = default_corpus();
    let mut combos = 0;
    let mut worst = 0.0f64;
    for e in corpus.iter().take(10) {
        let (a, b) = (e.interval.a(), e.interval.b());
        let skewed = vec![
            a,
            a + 0.1 * (b - a),
            a + 0.45 * (b - a),
            a + 0.5 * (b - a),
            b,
        ];
        let partitions = [Partition::uniform(e.interval, 3), Partition::new(skewed)];
        for d in partitions {
            let d = d.map_err(|err| err.to_string())?;
            let f = &e.function;
            let t_n = trapezoid_sum(f, &d).map_err(|err| err.to_string())?;
            let m_n = midpoint_sum(f, &d).map_err(|err| err.to_string())?;
            let t_2n = trapezoid_sum(f, &d.refined()).map_err(|err| err.to_string())?;
            let gap = (t_2n - 0.5 * (t_n + m_n)).abs();
            ensure!(
                gap <= 1e-12,
                "{} on {} nodes: gap {gap:e}",
                f.label,
                d.nodes().len()
            );
            worst = worst.max(gap);
            combos += 1;
        }
    }
    ensure!(combos == 20, "ran {combos} combinations");
    Ok(format!("{combos} combinations, max gap {worst:.3e}"))
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("quadratic tightness", quadratic_tightness),
        ("soundness sweep", soundness_sweep),
        ("integral identity", integral_identity),
        ("v1 validity frontier", v1_frontier),
        ("sandwich bounds", sandwich),
        ("certified integration", certified_integration),
        ("means propositions", means_grid),
        ("brute-force equivalences", brute_force_equivalences),
        ("refinement identity", refinement_identity),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let outcome =
            catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("PASS  {}. {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL  {}. {name}: {why}", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
