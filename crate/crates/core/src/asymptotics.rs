//! Asymptotic operators of Karamata, Beurling and general regular variation,
//! their exact pre-limit cocycle identities, `x -> inf` limit estimation on
//! geometric grids, kernel/index recovery and the Beck-sequence sums.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::popa::{circle_unchecked, from_log_scale_unchecked, log_scale_unchecked, PopaParam};

/// What a [`SampledFunction::Table`] returns outside its abscissae.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outside {
    Refuse,
    Zero,
}

/// A function known either by an evaluation rule or on a finite table.
///
/// Tables interpolate linearly in `(log x, log f)`, falling back to a linear
/// coordinate wherever the logarithm is unavailable (non-positive `x` or `f`).
#[derive(Clone)]
pub enum SampledFunction {
    Rule(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
    Table {
        xs: Arc<[f64]>,
        ys: Arc<[f64]>,
        outside: Outside,
    },
}

impl fmt::Debug for SampledFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SampledFunction::Rule(_) => write!(f, "SampledFunction::Rule(..)"),
            SampledFunction::Table { xs, outside, .. } => write!(
                f,
                "SampledFunction::Table({} points on [{}, {}], {:?})",
                xs.len(),
                xs[0],
                xs[xs.len() - 1],
                outside
            ),
        }
    }
}

impl SampledFunction {
    pub fn rule<F>(f: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        SampledFunction::Rule(Arc::new(f))
    }

    pub fn constant(c: f64) -> Self {
        SampledFunction::rule(move |_| c)
    }

    pub fn table(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self> {
        if xs.len() != ys.len() {
            return Err(Error::invalid(format!(
                "table has {} abscissae but {} values",
                xs.len(),
                ys.len()
            )));
        }
        if xs.len() < 2 {
            return Err(Error::invalid("table needs at least two points"));
        }
        if let Some(k) = xs.iter().chain(&ys).position(|v| !v.is_finite()) {
            return Err(Error::invalid(format!("non-finite table entry at position {k}")));
        }
        if let Some(k) = xs.windows(2).position(|w| !(w[0] < w[1])) {
            return Err(Error::invalid(format!(
                "abscissae must be strictly increasing (rows {} and {})",
                k,
                k + 1
            )));
        }
        Ok(SampledFunction::Table {
            xs: xs.into(),
            ys: ys.into(),
            outside: Outside::Refuse,
        })
    }

    /// Same table, evaluating to zero outside its range.
    pub fn zero_outside(self) -> Self {
        match self {
            SampledFunction::Table { xs, ys, .. } => SampledFunction::Table {
                xs,
                ys,
                outside: Outside::Zero,
            },
            rule => rule,
        }
    }

    /// Tabulated range, `None` for rules.
    pub fn range(&self) -> Option<(f64, f64)> {
        match self {
            SampledFunction::Rule(_) => None,
            SampledFunction::Table { xs, .. } => Some((xs[0], xs[xs.len() - 1])),
        }
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        let v = match self {
            SampledFunction::Rule(f) => f(x),
            SampledFunction::Table { xs, ys, outside } => {
                let (lo, hi) = (xs[0], xs[xs.len() - 1]);
                if !(x >= lo && x <= hi) {
                    return match outside {
                        Outside::Zero if !x.is_nan() => Ok(0.0),
                        _ => Err(Error::OutOfRange { x, lo, hi }),
                    };
                }
                interpolate(xs, ys, x)
            }
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::NonFinite { at: x, value: v })
        }
    }

    fn eval_positive(&self, x: f64, what: &'static str) -> Result<f64> {
        let v = self.eval(x)?;
        if v > 0.0 {
            Ok(v)
        } else {
            Err(Error::NonPositive { what, at: x, value: v })
        }
    }
}

fn interpolate(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    let k = xs.partition_point(|&xi| xi <= x);
    if k == 0 {
        return ys[0];
    }
    if xs[k - 1] == x || k == xs.len() {
        return ys[k - 1];
    }
    let (x0, x1, y0, y1) = (xs[k - 1], xs[k], ys[k - 1], ys[k]);
    let frac = if x0 > 0.0 {
        (x / x0).ln() / (x1 / x0).ln()
    } else {
        (x - x0) / (x1 - x0)
    };
    if y0 > 0.0 && y1 > 0.0 {
        y0 * (y1 / y0).powf(frac)
    } else {
        y0 + (y1 - y0) * frac
    }
}

/// `x o_phi t = x + t phi(x)`, which must stay positive.
fn accelerate(phi: &SampledFunction, t: f64, x: f64) -> Result<(f64, f64)> {
    let p = phi.eval_positive(x, "phi")?;
    let y = x + t * p;
    if !(y > 0.0) {
        return Err(Error::NonPositive {
            what: "x + t phi(x)",
            at: x,
            value: y,
        });
    }
    Ok((y, p))
}

/// `K(t, x) f = f(x t) / f(x)`.
pub fn karamata_op(f: &SampledFunction, t: f64, x: f64) -> Result<f64> {
    if !(t > 0.0 && x > 0.0) {
        return Err(Error::invalid(format!("Karamata operator needs t, x > 0, got t = {t}, x = {x}")));
    }
    Ok(f.eval_positive(x * t, "f")? / f.eval_positive(x, "f")?)
}

/// `eta_x(t) = phi(x + t phi(x)) / phi(x)`.
pub fn eta_x(phi: &SampledFunction, t: f64, x: f64) -> Result<f64> {
    let (y, p) = accelerate(phi, t, x)?;
    Ok(phi.eval_positive(y, "phi")? / p)
}

/// `K^phi(t, x) f = f(x + t phi(x)) / f(x)`.
pub fn beurling_op(f: &SampledFunction, phi: &SampledFunction, t: f64, x: f64) -> Result<f64> {
    let (y, _) = accelerate(phi, t, x)?;
    Ok(f.eval_positive(y, "f")? / f.eval_positive(x, "f")?)
}

/// `K_h^phi(t, x) = [f(x + t phi(x)) - f(x)] / h(x)`.
pub fn general_op(
    f: &SampledFunction,
    phi: &SampledFunction,
    h: &SampledFunction,
    t: f64,
    x: f64,
) -> Result<f64> {
    let hx = h.eval_positive(x, "h")?;
    let (y, _) = accelerate(phi, t, x)?;
    Ok((f.eval(y)? - f.eval(x)?) / hx)
}

/// `K(st, x) - K(s, xt) K(t, x)`.
pub fn cocycle_residual_karamata(f: &SampledFunction, s: f64, t: f64, x: f64) -> Result<f64> {
    Ok(karamata_op(f, s * t, x)? - karamata_op(f, s, x * t)? * karamata_op(f, t, x)?)
}

/// `K^phi(t o_{phi x} s, x) - K^phi(s, x o_phi t) K^phi(t, x)` where
/// `t o_{phi x} s = t + s eta_x(t)`.
pub fn cocycle_residual_beurling(
    f: &SampledFunction,
    phi: &SampledFunction,
    s: f64,
    t: f64,
    x: f64,
) -> Result<f64> {
    let (y, _) = accelerate(phi, t, x)?;
    let ts = t + s * eta_x(phi, t, x)?;
    Ok(beurling_op(f, phi, ts, x)? - beurling_op(f, phi, s, y)? * beurling_op(f, phi, t, x)?)
}

/// `K_h^phi(t o_{phi x} s, x) - [K_h^phi(s, y) K^phi(t, x) h + K_h^phi(t, x)]`
/// with `y = x o_phi t` and `K^phi(t, x) h = h(y) / h(x)`.
pub fn cocycle_residual_general(
    f: &SampledFunction,
    phi: &SampledFunction,
    h: &SampledFunction,
    s: f64,
    t: f64,
    x: f64,
) -> Result<f64> {
    let (y, _) = accelerate(phi, t, x)?;
    let ts = t + s * eta_x(phi, t, x)?;
    let lhs = general_op(f, phi, h, ts, x)?;
    let rhs = general_op(f, phi, h, s, y)? * beurling_op(h, phi, t, x)? + general_op(f, phi, h, t, x)?;
    Ok(lhs - rhs)
}

/// Geometric grid `x0 * ratio^n` with a stability-window Cauchy criterion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LimitScheme {
    pub x0: f64,
    pub ratio: f64,
    pub max_steps: usize,
    pub tol: f64,
    pub stability_window: usize,
}

impl Default for LimitScheme {
    fn default() -> Self {
        LimitScheme {
            x0: 10.0,
            ratio: 2.0,
            max_steps: 40,
            tol: 1e-6,
            stability_window: 3,
        }
    }
}

impl LimitScheme {
    pub fn validate(&self) -> Result<()> {
        if !(self.x0 > 0.0 && self.x0.is_finite()) {
            return Err(Error::invalid("x0 must be positive"));
        }
        if !(self.ratio > 1.0 && self.ratio.is_finite()) {
            return Err(Error::invalid("ratio must exceed 1"));
        }
        if !(self.tol > 0.0) {
            return Err(Error::invalid("tol must be positive"));
        }
        if self.stability_window < 2 {
            return Err(Error::invalid("stability_window must be at least 2"));
        }
        if self.max_steps < 1 {
            return Err(Error::invalid("max_steps must be at least 1"));
        }
        Ok(())
    }

    pub fn grid_point(&self, n: usize) -> f64 {
        self.x0 * self.ratio.powi(n as i32)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimationResult {
    pub value: f64,
    pub converged: bool,
    /// Largest scaled pairwise difference `|a - b| / (1 + max(|a|, |b|))` in the
    /// final window; `inf` if fewer than `stability_window` values were seen.
    pub last_delta: f64,
    pub steps_used: usize,
}

fn window_delta(window: &[f64]) -> f64 {
    let mut worst = 0.0f64;
    for (i, a) in window.iter().enumerate() {
        for b in &window[i + 1..] {
            worst = worst.max((a - b).abs() / (1.0 + a.abs().max(b.abs())));
        }
    }
    worst
}

/// Walks the grid until the last `stability_window` values agree to `tol`
/// (absolute plus relative) or `max_steps` values have been taken.
pub fn estimate_limit<F>(mut op_curve: F, scheme: &LimitScheme) -> Result<EstimationResult>
where
    F: FnMut(f64) -> Result<f64>,
{
    scheme.validate()?;
    let mut values = Vec::with_capacity(scheme.max_steps);
    let mut last_delta = f64::INFINITY;
    for step in 0..scheme.max_steps {
        let x = scheme.grid_point(step);
        let v = op_curve(x).and_then(|v| {
            if v.is_finite() {
                Ok(v)
            } else {
                Err(Error::NonFinite { at: x, value: v })
            }
        });
        let v = v.map_err(|e| Error::Evaluation {
            step,
            x,
            source: Box::new(e),
        })?;
        values.push(v);
        if values.len() >= scheme.stability_window {
            last_delta = window_delta(&values[values.len() - scheme.stability_window..]);
            if last_delta <= scheme.tol {
                return Ok(EstimationResult {
                    value: v,
                    converged: true,
                    last_delta,
                    steps_used: values.len(),
                });
            }
        }
    }
    Ok(EstimationResult {
        value: *values.last().expect("max_steps >= 1"),
        converged: false,
        last_delta,
        steps_used: values.len(),
    })
}

/// Estimates `rho` in `eta_x(t) -> 1 + rho t`; the returned value is
/// `(lim eta_x(t_probe) - 1) / t_probe`.
pub fn estimate_eta_rho(
    phi: &SampledFunction,
    t_probe: f64,
    scheme: &LimitScheme,
) -> Result<EstimationResult> {
    if t_probe == 0.0 || !t_probe.is_finite() {
        return Err(Error::invalid("t_probe must be finite and non-zero"));
    }
    let r = estimate_limit(|x| eta_x(phi, t_probe, x), scheme)?;
    Ok(EstimationResult {
        value: (r.value - 1.0) / t_probe,
        ..r
    })
}

/// One point of an estimated kernel. `result` is `Err` when the operator could
/// not be evaluated along the grid; a non-converged `Ok` means the limit was
/// not established.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelEstimate {
    pub t: f64,
    pub result: Result<EstimationResult>,
}

impl KernelEstimate {
    pub fn converged(&self) -> bool {
        matches!(self.result, Ok(r) if r.converged)
    }

    pub fn value(&self) -> Option<f64> {
        self.result.as_ref().ok().map(|r| r.value)
    }
}

/// Per-`t` limits of the general operator `[f(x + t phi(x)) - f(x)] / h(x)`.
pub fn estimate_kernel(
    f: &SampledFunction,
    phi: &SampledFunction,
    h: &SampledFunction,
    t_grid: &[f64],
    scheme: &LimitScheme,
) -> Vec<KernelEstimate> {
    t_grid
        .iter()
        .map(|&t| KernelEstimate {
            t,
            result: estimate_limit(|x| general_op(f, phi, h, t, x), scheme),
        })
        .collect()
}

/// Per-`lambda` limits of `f(lambda x) / f(x)`.
pub fn estimate_karamata_kernel(
    f: &SampledFunction,
    lambdas: &[f64],
    scheme: &LimitScheme,
) -> Vec<KernelEstimate> {
    lambdas
        .iter()
        .map(|&t| KernelEstimate {
            t,
            result: estimate_limit(|x| karamata_op(f, t, x), scheme),
        })
        .collect()
}

/// Per-`t` limits of `f(x + t phi(x)) / f(x)`.
pub fn estimate_beurling_kernel(
    f: &SampledFunction,
    phi: &SampledFunction,
    t_grid: &[f64],
    scheme: &LimitScheme,
) -> Vec<KernelEstimate> {
    t_grid
        .iter()
        .map(|&t| KernelEstimate {
            t,
            result: estimate_limit(|x| beurling_op(f, phi, t, x), scheme),
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KappaFit {
    pub kappa: f64,
    pub rms_residual: f64,
}

/// Least-squares `kappa` in `log eta_sigma(K(t)) = kappa log eta_rho(t)`,
/// solved through the normal equation.
pub fn fit_kappa(samples: &[(f64, f64)], rho: PopaParam, sigma: PopaParam) -> Result<KappaFit> {
    rho.check()?;
    sigma.check()?;
    if samples.is_empty() {
        return Err(Error::invalid("no kernel samples to fit"));
    }
    let mut pts = Vec::with_capacity(samples.len());
    for &(t, v) in samples {
        rho.require(t)?;
        sigma.require(v)?;
        pts.push((log_scale_unchecked(rho, t), log_scale_unchecked(sigma, v)));
    }
    let sxx: f64 = pts.iter().map(|(a, _)| a * a).sum();
    if sxx == 0.0 {
        return Err(Error::invalid("all samples sit at the identity; kappa is undetermined"));
    }
    let sxy: f64 = pts.iter().map(|(a, b)| a * b).sum();
    let kappa = sxy / sxx;
    let ss: f64 = pts.iter().map(|(a, b)| (b - kappa * a).powi(2)).sum();
    Ok(KappaFit {
        kappa,
        rms_residual: (ss / pts.len() as f64).sqrt(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoPointIndex {
    pub rho: f64,
    pub rho1: f64,
    pub rho2: f64,
    pub consistent: bool,
    /// `(p, q)` when `log lambda1 / log lambda2` is within rounding of `p/q`, `q <= 16`.
    pub rational_ratio: Option<(i64, i64)>,
}

const MAX_RATIONAL_DENOMINATOR: i64 = 16;

fn small_rational(r: f64) -> Option<(i64, i64)> {
    let eps = 1e-9 * r.abs().max(1.0);
    (1..=MAX_RATIONAL_DENOMINATOR).find_map(|q| {
        let p = (r * q as f64).round();
        ((r - p / q as f64).abs() <= eps).then_some((p as i64, q))
    })
}

/// Index recovery from two ratio limits `g_i = lim f(lambda_i x) / f(x)`.
pub fn two_point_index(
    lambda1: f64,
    g1: f64,
    lambda2: f64,
    g2: f64,
    tol: f64,
) -> Result<TwoPointIndex> {
    for (name, v) in [("lambda1", lambda1), ("g1", g1), ("lambda2", lambda2), ("g2", g2)] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::NonPositive { what: name, at: v, value: v });
        }
    }
    if lambda1 == 1.0 || lambda2 == 1.0 {
        return Err(Error::invalid("lambda = 1 carries no information about the index"));
    }
    let (l1, l2) = (lambda1.ln(), lambda2.ln());
    let rho1 = g1.ln() / l1;
    let rho2 = g2.ln() / l2;
    Ok(TwoPointIndex {
        rho: 0.5 * (rho1 + rho2),
        rho1,
        rho2,
        consistent: (rho1 - rho2).abs() <= tol,
        rational_ratio: small_rational(l1 / l2),
    })
}

/// Largest Beck partition we are willing to materialize.
pub const MAX_BECK_POINTS: usize = 100_000_000;

/// Beck points `delta^{0 o}, ..., delta^{i o}` where `i` is the first index
/// with `delta^{i o} >= u`.
#[derive(Debug, Clone, PartialEq)]
pub struct BeckPartition {
    pub param: PopaParam,
    pub delta: f64,
    pub points: Vec<f64>,
}

impl BeckPartition {
    pub fn i(&self) -> usize {
        self.points.len() - 1
    }

    /// `Delta_m = delta^{m o} - delta^{(m-1) o}` for `m = 1..=i`.
    pub fn increments(&self) -> impl Iterator<Item = f64> + '_ {
        self.points.windows(2).map(|w| w[1] - w[0])
    }
}

fn beck_step(param: PopaParam, delta: f64) -> Result<f64> {
    param.require(delta)?;
    if !(delta > param.identity()) {
        return Err(Error::invalid(format!(
            "Beck step must exceed the identity {}, got {delta}",
            param.identity()
        )));
    }
    Ok(log_scale_unchecked(param, delta))
}

fn beck_count(param: PopaParam, wd: f64, u: f64) -> Result<usize> {
    param.require(u)?;
    if u < param.identity() {
        return Err(Error::invalid(format!(
            "Beck partition needs u >= {}, got {u}",
            param.identity()
        )));
    }
    let estimate = (log_scale_unchecked(param, u) / wd).ceil();
    if !(estimate <= MAX_BECK_POINTS as f64) {
        return Err(Error::PartitionTooFine {
            needed: estimate,
            limit: MAX_BECK_POINTS,
        });
    }
    Ok(estimate as usize)
}

fn beck_point(param: PopaParam, wd: f64, m: usize) -> f64 {
    from_log_scale_unchecked(param, m as f64 * wd)
}

pub fn beck_partition(param: PopaParam, delta: f64, u: f64) -> Result<BeckPartition> {
    let wd = beck_step(param, delta)?;
    let guess = beck_count(param, wd, u)?;
    // rounding in the closed form can move the crossing by one step
    let mut i = guess.saturating_sub(1);
    while i > 0 && beck_point(param, wd, i - 1) >= u {
        i -= 1;
    }
    while beck_point(param, wd, i) < u {
        i += 1;
    }
    let points = (0..=i).map(|m| beck_point(param, wd, m)).collect();
    Ok(BeckPartition { param, delta, points })
}

fn eta_unchecked(param: PopaParam, t: f64) -> f64 {
    match param {
        PopaParam::Zero => 1.0,
        PopaParam::Finite(rho) => 1.0 + rho * t,
        PopaParam::Infinity => t,
    }
}

/// Right-endpoint Riemann sum of `g / eta` over the Beck partition of
/// `[identity, u]`, the final cell clipped at `u`. Converges to
/// `int g(x) / eta(x) dx` at rate `O(delta)`.
pub fn beck_riemann_sum<G>(g: G, param: PopaParam, delta: f64, u: f64) -> Result<f64>
where
    G: Fn(f64) -> f64,
{
    let part = beck_partition(param, delta, u)?;
    let mut sum = 0.0;
    for w in part.points.windows(2) {
        let right = w[1].min(u);
        let gv = g(right);
        if !gv.is_finite() {
            return Err(Error::NonFinite { at: right, value: gv });
        }
        sum += gv / eta_unchecked(param, right) * (right - w[0]);
    }
    Ok(sum)
}

/// `K(delta) * sum_{m=1}^{i} g(delta^{(m-1) o})`, the reconstruction of `F*`
/// on Beck points.
pub fn goldie_sum<G>(k_delta: f64, g: G, param: PopaParam, delta: f64, i: usize) -> Result<f64>
where
    G: Fn(f64) -> f64,
{
    let wd = beck_step(param, delta)?;
    if i > MAX_BECK_POINTS {
        return Err(Error::PartitionTooFine {
            needed: i as f64,
            limit: MAX_BECK_POINTS,
        });
    }
    let mut sum = 0.0;
    for m in 0..i {
        let x = beck_point(param, wd, m);
        let gv = g(x);
        if !gv.is_finite() {
            return Err(Error::NonFinite { at: x, value: gv });
        }
        sum += gv;
    }
    Ok(k_delta * sum)
}

/// `delta^{n o}` by iterating the group operation, for cross-checking closed forms.
pub fn beck_point_by_iteration(param: PopaParam, delta: f64, n: usize) -> f64 {
    (0..n).fold(param.identity(), |acc, _| circle_unchecked(param, acc, delta))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rule(f: fn(f64) -> f64) -> SampledFunction {
        SampledFunction::rule(f)
    }

    #[test]
    fn table_validation_and_interpolation() {
        assert!(SampledFunction::table(vec![1.0], vec![1.0]).is_err());
        assert!(SampledFunction::table(vec![1.0, 1.0], vec![1.0, 2.0]).is_err());
        assert!(SampledFunction::table(vec![1.0, 2.0], vec![1.0, f64::NAN]).is_err());
        // power laws are reproduced exactly by log-log interpolation
        let xs: Vec<f64> = (0..5).map(|k| 10f64.powi(k)).collect();
        let ys: Vec<f64> = xs.iter().map(|x| x * x).collect();
        let f = SampledFunction::table(xs, ys).unwrap();
        assert!((f.eval(3.0).unwrap() - 9.0).abs() < 1e-12);
        assert!((f.eval(5000.0).unwrap() - 2.5e7).abs() < 1e-4);
        assert_eq!(f.eval(100.0).unwrap(), 1e4);
        assert!(matches!(f.eval(2e4), Err(Error::OutOfRange { .. })));
        assert_eq!(f.clone().zero_outside().eval(2e4).unwrap(), 0.0);
        // zero values fall back to linear interpolation
        let g = SampledFunction::table(vec![1.0, 2.0], vec![0.0, 4.0]).unwrap();
        assert!((g.eval(2f64.sqrt()).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn karamata_examples() {
        let sq = rule(|x| x * x);
        assert_eq!(karamata_op(&sq, 3.0, 7.0).unwrap(), 9.0);
        assert_eq!(karamata_op(&SampledFunction::constant(1.0), 3.0, 7.0).unwrap(), 1.0);
        let f = rule(|x| x * x * x.ln());
        let k = karamata_op(&f, 2.0, 1e6).unwrap();
        let direct = 4.0 * (1.0 + 2f64.ln() / 1e6f64.ln());
        assert!((k - direct).abs() < 1e-12);
        assert!(matches!(
            karamata_op(&rule(|x| x - 5.0), 2.0, 1.0),
            Err(Error::NonPositive { .. })
        ));
    }

    #[test]
    fn eta_x_examples() {
        let id = rule(|x| x);
        for x in [1.0, 10.0, 1e6] {
            assert!((eta_x(&id, 0.7, x).unwrap() - 1.7).abs() < 1e-15);
        }
        assert_eq!(eta_x(&SampledFunction::constant(1.0), 0.7, 3.0).unwrap(), 1.0);
        let sqrt = rule(f64::sqrt);
        let x: f64 = 1e8;
        let expected = (1.0 + 1.0 / x.sqrt()).sqrt();
        assert!((eta_x(&sqrt, 1.0, x).unwrap() - expected).abs() < 1e-15);
    }

    #[test]
    fn beurling_and_general_examples() {
        let one = SampledFunction::constant(1.0);
        let log = rule(f64::ln);
        assert!((beurling_op(&rule(f64::exp), &one, 1.0, 2.0).unwrap() - std::f64::consts::E).abs() < 1e-14);
        let cube = rule(|x| x.powi(3));
        let id = rule(|x| x);
        assert!((beurling_op(&cube, &id, 0.5, 4.0).unwrap() - 1.5f64.powi(3)).abs() < 1e-13);
        assert!((general_op(&cube, &id, &cube, 0.5, 4.0).unwrap() - (1.5f64.powi(3) - 1.0)).abs() < 1e-13);
        assert_eq!(general_op(&one, &one, &one, 3.0, 5.0).unwrap(), 0.0);
        let v = general_op(&log, &one, &one, 1.0, 100.0).unwrap();
        assert!((v - (101.0f64 / 100.0).ln()).abs() < 1e-15);
        assert!(general_op(&log, &one, &rule(|_| 0.0), 1.0, 100.0).is_err());
        assert!(beurling_op(&log, &one, -200.0, 100.0).is_err());
    }

    #[test]
    fn cocycle_degenerate_cases() {
        let f = rule(|x| x.sqrt() + x.ln().powi(2) + 1.0);
        let phi = rule(|x| 1.0 + 0.3 * x);
        let h = rule(|x| 2.0 + x.sin());
        assert_eq!(cocycle_residual_karamata(&f, 1.0, 2.0, 3.0).unwrap(), 0.0);
        assert!(cocycle_residual_karamata(&f, 2.0, 1.0, 3.0).unwrap().abs() < 1e-15);
        assert!(cocycle_residual_beurling(&f, &phi, 0.0, 2.0, 3.0).unwrap().abs() < 1e-14);
        assert!(cocycle_residual_general(&f, &phi, &h, 0.0, 2.0, 3.0).unwrap().abs() < 1e-14);
        // h = f: the general operator is the Beurling operator minus one
        let g = general_op(&f, &phi, &f, 1.3, 4.0).unwrap();
        let b = beurling_op(&f, &phi, 1.3, 4.0).unwrap();
        assert!((g - (b - 1.0)).abs() < 1e-15);
    }

    #[test]
    fn limit_examples() {
        let scheme = LimitScheme::default();
        let r = estimate_limit(|_| Ok(4.5), &scheme).unwrap();
        assert!(r.converged);
        assert_eq!(r.value, 4.5);
        assert_eq!(r.steps_used, scheme.stability_window);

        let slow = LimitScheme {
            tol: 1e-3,
            max_steps: 200,
            ..scheme
        };
        let r = estimate_limit(|x| Ok(2.0 + 1.0 / x.ln()), &slow).unwrap();
        assert!(r.converged);
        assert!(r.last_delta <= 1e-3);
        assert!((r.value - 2.0).abs() < 0.05);

        let r = estimate_limit(|x| Ok(x.ln().sin()), &scheme).unwrap();
        assert!(!r.converged);
        assert_eq!(r.steps_used, scheme.max_steps);

        let err = estimate_limit(|x| if x > 100.0 { Err(Error::invalid("boom")) } else { Ok(1.0 / x) }, &LimitScheme { tol: 1e-12, ..scheme })
            .unwrap_err();
        assert!(matches!(err, Error::Evaluation { step: 4, .. }));
    }

    #[test]
    fn eta_rho_examples() {
        let scheme = LimitScheme::default();
        let r = estimate_eta_rho(&rule(|x| x), 1.0, &scheme).unwrap();
        assert!(r.converged);
        assert!((r.value - 1.0).abs() < 1e-14);
        let r = estimate_eta_rho(&SampledFunction::constant(1.0), 0.5, &scheme).unwrap();
        assert_eq!(r.value, 0.0);
        let r = estimate_eta_rho(&rule(|x| x / (1.0 + x.ln())), 1.0, &LimitScheme { tol: 1e-10, ..scheme }).unwrap();
        assert!(!r.converged);
        assert!(r.value > 0.0 && r.value < 0.05);
        assert!(estimate_eta_rho(&rule(|x| x), 0.0, &scheme).is_err());
    }

    #[test]
    fn kernel_estimation_examples() {
        let scheme = LimitScheme::default();
        let sq = rule(|x| x * x);
        let est = estimate_karamata_kernel(&sq, &[2.0, 3.0], &scheme);
        assert!(est.iter().all(KernelEstimate::converged));
        assert!((est[0].value().unwrap() - 4.0).abs() < 1e-12);

        let a = 1.5;
        let f = SampledFunction::rule(move |x: f64| x.powf(a));
        let id = rule(|x| x);
        let est = estimate_kernel(&f, &id, &f, &[0.5, 1.0, 2.0], &scheme);
        for e in &est {
            assert!(e.converged());
            assert!((e.value().unwrap() - ((1.0 + e.t).powf(a) - 1.0)).abs() < 1e-12);
        }

        let osc = rule(|x| x * (2.0 + x.ln().sin()));
        let est = estimate_karamata_kernel(&osc, &[2.0], &scheme);
        assert!(!est[0].converged());
    }

    #[test]
    fn fit_examples() {
        let one = PopaParam::Finite(1.0);
        let fit = fit_kappa(&[(0.5, 1.25), (1.0, 3.0), (2.0, 8.0)], one, one).unwrap();
        assert!((fit.kappa - 2.0).abs() < 1e-14);
        assert!(fit.rms_residual < 1e-14);
        let fit = fit_kappa(&[(0.5, 0.0), (2.0, 0.0)], one, PopaParam::Finite(3.0)).unwrap();
        assert_eq!(fit.kappa, 0.0);
        assert!(fit_kappa(&[], one, one).is_err());
        assert!(fit_kappa(&[(0.0, 0.0)], one, one).is_err());
        assert!(fit_kappa(&[(1.0, -2.0)], one, one).is_err());
    }

    #[test]
    fn two_point_examples() {
        let r = two_point_index(2.0, 8.0, 3.0, 27.0, 1e-9).unwrap();
        assert!((r.rho - 3.0).abs() < 1e-14);
        assert!(r.consistent);
        assert_eq!(r.rational_ratio, None);
        let r = two_point_index(2.0, 8.0, 3.0, 81.0, 1e-9).unwrap();
        assert!((r.rho1 - 3.0).abs() < 1e-14 && (r.rho2 - 4.0).abs() < 1e-14);
        assert!(!r.consistent);
        let r = two_point_index(2.0, 8.0, 4.0, 64.0, 1e-9).unwrap();
        assert_eq!(r.rational_ratio, Some((1, 2)));
        assert!(two_point_index(1.0, 8.0, 3.0, 27.0, 1e-9).is_err());
        assert!(two_point_index(2.0, -8.0, 3.0, 27.0, 1e-9).is_err());
    }

    #[test]
    fn beck_partition_examples() {
        let p = beck_partition(PopaParam::Zero, 0.25, 1.0).unwrap();
        assert_eq!(p.points, vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert_eq!(p.i(), 4);

        let one = PopaParam::Finite(1.0);
        let p = beck_partition(one, 0.1, 0.25).unwrap();
        assert_eq!(p.i(), 3);
        assert!((p.points[2] - 0.21).abs() < 1e-15);
        assert!((p.points[3] - 0.331).abs() < 1e-15);
        // sandwich and increments
        let p = beck_partition(one, 0.01, 1.0).unwrap();
        let i = p.i();
        assert!(p.points[i - 1] < 1.0 && p.points[i] >= 1.0);
        for (m, d) in p.increments().enumerate() {
            let expected = 0.01 * (1.0 + p.points[m]);
            assert!((d - expected).abs() < 1e-14);
        }
        let total: f64 = p.increments().sum();
        assert!((total - p.points[i]).abs() < 1e-13);

        assert!(beck_partition(one, -0.1, 1.0).is_err());
        assert!(matches!(
            beck_partition(PopaParam::Zero, 1e-9, 1.0),
            Err(Error::PartitionTooFine { .. })
        ));
    }

    #[test]
    fn beck_sum_examples() {
        let one = PopaParam::Finite(1.0);
        // g = eta telescopes to u exactly
        let s = beck_riemann_sum(|t| 1.0 + t, one, 0.05, 0.9).unwrap();
        assert!((s - 0.9).abs() < 1e-14);
        // u below the first Beck point: single clipped cell
        let s = beck_riemann_sum(|_| 2.0, one, 0.5, 0.1).unwrap();
        assert!(s > 0.0 && s <= 2.0 * 0.5);
        let s = beck_riemann_sum(|_| 1.0, one, 0.001, 1.0).unwrap();
        assert!((s - std::f64::consts::LN_2).abs() < 1e-3);
    }

    #[test]
    fn goldie_sum_examples() {
        let one = PopaParam::Finite(1.0);
        assert_eq!(goldie_sum(3.0, |t| t, one, 0.1, 0).unwrap(), 0.0);
        assert_eq!(goldie_sum(3.0, |_| 1.0, one, 0.1, 7).unwrap(), 21.0);
    }
}
