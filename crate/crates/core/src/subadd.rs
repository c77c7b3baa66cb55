//! Grid checks for Popa subadditivity, additive boundedness, one-sided
//! Heiberg-Seneta probes and the bound-propagation sandwich.

use crate::error::{Error, Result};
use crate::kernels::{kernel_eval, KernelParams};
use crate::popa::{circle_unchecked, inverse_unchecked, PopaParam};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Spacing {
    Linear,
    Geometric,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
    pub spacing: Spacing,
}

impl GridSpec {
    pub fn new(lo: f64, hi: f64, n: usize, spacing: Spacing) -> Result<Self> {
        let g = GridSpec { lo, hi, n, spacing };
        g.validate()?;
        Ok(g)
    }

    pub fn linear(lo: f64, hi: f64, n: usize) -> Result<Self> {
        GridSpec::new(lo, hi, n, Spacing::Linear)
    }

    pub fn geometric(lo: f64, hi: f64, n: usize) -> Result<Self> {
        GridSpec::new(lo, hi, n, Spacing::Geometric)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lo.is_finite() && self.hi.is_finite() && self.lo < self.hi) {
            return Err(Error::invalid(format!(
                "grid needs finite lo < hi, got [{}, {}]",
                self.lo, self.hi
            )));
        }
        if self.n < 2 {
            return Err(Error::invalid("grid needs at least two points"));
        }
        if self.spacing == Spacing::Geometric && !(self.lo > 0.0) {
            return Err(Error::invalid("geometric grid needs lo > 0"));
        }
        Ok(())
    }

    /// Grid points, endpoints exact.
    pub fn points(&self) -> Vec<f64> {
        let last = (self.n - 1) as f64;
        (0..self.n)
            .map(|k| {
                if k == 0 {
                    return self.lo;
                }
                if k == self.n - 1 {
                    return self.hi;
                }
                let frac = k as f64 / last;
                match self.spacing {
                    Spacing::Linear => self.lo + (self.hi - self.lo) * frac,
                    Spacing::Geometric => self.lo * (self.hi / self.lo).powf(frac),
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubaddReport {
    pub holds: bool,
    /// Largest violation, clipped at zero.
    pub worst_violation: f64,
    /// Pair attaining `worst_violation`; for pointwise checks both entries are
    /// the sample point.
    pub worst_pair: (f64, f64),
    pub pairs_checked: usize,
    pub pairs_skipped: usize,
    pub violations: usize,
}

#[derive(Debug)]
struct Tally {
    worst_violation: f64,
    worst_pair: (f64, f64),
    checked: usize,
    skipped: usize,
    violations: usize,
    tol: f64,
}

impl Tally {
    fn new(tol: f64) -> Self {
        Tally {
            worst_violation: 0.0,
            worst_pair: (f64::NAN, f64::NAN),
            checked: 0,
            skipped: 0,
            violations: 0,
            tol,
        }
    }

    fn record(&mut self, pair: (f64, f64), excess: f64) {
        self.checked += 1;
        let v = excess.max(0.0);
        if v > self.tol {
            self.violations += 1;
        }
        // strict comparison keeps the first pair in iteration order
        if v > self.worst_violation || self.worst_pair.0.is_nan() {
            self.worst_violation = v;
            self.worst_pair = pair;
        }
    }

    fn finish(self) -> SubaddReport {
        SubaddReport {
            holds: self.worst_violation <= self.tol,
            worst_violation: self.worst_violation,
            worst_pair: self.worst_pair,
            pairs_checked: self.checked,
            pairs_skipped: self.skipped,
            violations: self.violations,
        }
    }
}

fn check_tol(tol: f64) -> Result<()> {
    if tol >= 0.0 && tol.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid("tolerance must be finite and non-negative"))
    }
}

fn eval_in<S>(s: &S, sigma: PopaParam, x: f64) -> Result<f64>
where
    S: Fn(f64) -> f64,
{
    let v = s(x);
    if !v.is_finite() {
        return Err(Error::NonFinite { at: x, value: v });
    }
    if !sigma.contains(v) {
        return Err(Error::OffDomain { param: sigma, value: v });
    }
    Ok(v)
}

/// Exhaustive check of `S(x o_rho y) <= S(x) o_sigma S(y)` over grid pairs
/// `x <= y`. Pairs whose product leaves `[lo, hi]` are skipped.
pub fn subadditivity_check<S>(
    s: S,
    rho: PopaParam,
    sigma: PopaParam,
    grid: &GridSpec,
    tol: f64,
) -> Result<SubaddReport>
where
    S: Fn(f64) -> f64,
{
    rho.check()?;
    sigma.check()?;
    grid.validate()?;
    check_tol(tol)?;
    let pts = grid.points();
    for &p in &pts {
        rho.require(p)?;
    }
    let values = pts
        .iter()
        .map(|&x| eval_in(&s, sigma, x))
        .collect::<Result<Vec<_>>>()?;
    let mut tally = Tally::new(tol);
    for i in 0..pts.len() {
        for j in i..pts.len() {
            let xy = circle_unchecked(rho, pts[i], pts[j]);
            if !(xy >= grid.lo && xy <= grid.hi) || !rho.contains(xy) {
                tally.skipped += 1;
                continue;
            }
            let lhs = eval_in(&s, sigma, xy)?;
            let rhs = circle_unchecked(sigma, values[i], values[j]);
            tally.record((pts[i], pts[j]), lhs - rhs);
        }
    }
    Ok(tally.finish())
}

/// Pointwise check of `S(t) <= K_kappa(t) + tol` on `samples`.
pub fn additively_bounded_check<S>(
    s: S,
    kp: &KernelParams,
    samples: &[f64],
    tol: f64,
) -> Result<SubaddReport>
where
    S: Fn(f64) -> f64,
{
    check_tol(tol)?;
    let mut tally = Tally::new(tol);
    for &t in samples {
        let k = kernel_eval(kp, t)?;
        let v = s(t);
        if !v.is_finite() {
            return Err(Error::NonFinite { at: t, value: v });
        }
        tally.record((t, t), v - k);
    }
    Ok(tally.finish())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HsProbe {
    pub limsup_estimate: f64,
    pub passes: bool,
}

/// `u_n = 2^{-n}` for `n = 1..=40`.
pub fn default_probe_sequence() -> Vec<f64> {
    (1..=40).map(|n| 0.5f64.powi(n)).collect()
}

pub const MIN_PROBE_LEN: usize = 8;

/// `lim sup_{u -> 0+} S(u)` estimated as the maximum over the tail half of
/// `sequence`.
pub fn heiberg_seneta_probe<S>(s: S, sequence: &[f64], tol: f64) -> Result<HsProbe>
where
    S: Fn(f64) -> f64,
{
    if sequence.len() < MIN_PROBE_LEN {
        return Err(Error::invalid(format!(
            "probe sequence needs at least {MIN_PROBE_LEN} points, got {}",
            sequence.len()
        )));
    }
    if !sequence.iter().all(|&u| u > 0.0 && u.is_finite()) {
        return Err(Error::invalid("probe sequence must be positive"));
    }
    if !sequence.windows(2).all(|w| w[1] < w[0]) {
        return Err(Error::invalid("probe sequence must be strictly decreasing"));
    }
    let mut est = f64::NEG_INFINITY;
    for &u in &sequence[sequence.len() / 2..] {
        let v = s(u);
        if v.is_nan() {
            return Err(Error::NonFinite { at: u, value: v });
        }
        est = est.max(v);
    }
    Ok(HsProbe {
        limsup_estimate: est,
        passes: est <= tol,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SandwichReport {
    /// Sandwich verified on every probe of `B_delta(b)`, or premise failed.
    pub holds: bool,
    /// `S <= M` held on every probe of `B_delta(a)`; when false the check is
    /// vacuous and `holds` is true.
    pub premise_holds: bool,
    /// Largest amount by which either side of the sandwich was crossed.
    pub worst_violation: f64,
    pub lower: f64,
    pub upper: f64,
}

fn ball_probes(param: PopaParam, centre: f64, delta: f64, probes: usize) -> Vec<f64> {
    (0..probes)
        .map(|k| centre - delta + 2.0 * delta * k as f64 / (probes - 1) as f64)
        .filter(|&x| param.contains(x))
        .collect()
}

/// Given `S <= M` on the Euclidean ball `B_delta(a)`, verifies
/// `S(b o a) o_sigma M^{-1} <= S(x) <= S(b o a^{-1}) o_sigma M` for probes
/// `x` in `B_delta(b)`. For `rho > 0` the bounds propagate only when `b >= a + delta`.
#[allow(clippy::too_many_arguments)]
pub fn prop5_sandwich_check<S>(
    s: S,
    rho: PopaParam,
    sigma: PopaParam,
    a: f64,
    b: f64,
    delta: f64,
    m: f64,
    probes: usize,
) -> Result<SandwichReport>
where
    S: Fn(f64) -> f64,
{
    rho.check()?;
    sigma.check()?;
    rho.require(a)?;
    rho.require(b)?;
    sigma.require(m)?;
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::invalid("delta must be positive"));
    }
    if probes < 2 {
        return Err(Error::invalid("need at least two probes"));
    }
    let slack = 1e-12 * (1.0 + m.abs());
    let premise_holds = ball_probes(rho, a, delta, probes)
        .into_iter()
        .map(|x| eval_in(&s, sigma, x).map(|v| v <= m + slack))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .all(|ok| ok);

    let ba = circle_unchecked(rho, b, a);
    let b_over_a = circle_unchecked(rho, b, inverse_unchecked(rho, a));
    for (what, v) in [("b o a", ba), ("b o a^{-1}", b_over_a)] {
        if !rho.contains(v) {
            return Err(Error::invalid(format!("{what} = {v} leaves the domain")));
        }
    }
    let lower = circle_unchecked(sigma, eval_in(&s, sigma, ba)?, inverse_unchecked(sigma, m));
    let upper = circle_unchecked(sigma, eval_in(&s, sigma, b_over_a)?, m);
    if !premise_holds {
        return Ok(SandwichReport {
            holds: true,
            premise_holds,
            worst_violation: 0.0,
            lower,
            upper,
        });
    }
    let band = 1e-12 * (1.0 + lower.abs().max(upper.abs()));
    let mut worst = 0.0f64;
    for x in ball_probes(rho, b, delta, probes) {
        let v = eval_in(&s, sigma, x)?;
        worst = worst.max(lower - v).max(v - upper);
    }
    Ok(SandwichReport {
        holds: worst <= band,
        premise_holds,
        worst_violation: worst.max(0.0),
        lower,
        upper,
    })
}
