//! Popa groups `G_rho = {t : 1 + rho t > 0}` under `x o y = x + y (1 + rho x)`.
//!
//! `rho = 0` is the additive reals and `rho = inf` the multiplicative positive
//! reals. Every group is carried onto `(R, +)` by the log-scale map
//! [`to_log_scale`], which is `log eta_rho` for finite `rho`, the identity for
//! `rho = 0` and `log` for `rho = inf`. Most formulas in the crate are written
//! through that map so that the three variants share one code path.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Values of `1 + rho t` at or below this are treated as off-domain.
pub const DOMAIN_GUARD: f64 = 1e-300;

/// Deformation parameter selecting a Popa group.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PopaParam {
    /// `G_0 = (R, +)`.
    Zero,
    /// `G_rho` for `0 < rho < inf`.
    Finite(f64),
    /// `G_inf = (R_+, x)`.
    Infinity,
}

impl PopaParam {
    /// Maps `0` to [`PopaParam::Zero`] and `+inf` to [`PopaParam::Infinity`].
    pub fn new(rho: f64) -> Result<Self> {
        if rho.is_nan() || rho < 0.0 {
            return Err(Error::InvalidParam(format!("rho must be >= 0, got {rho}")));
        }
        Ok(if rho == 0.0 {
            PopaParam::Zero
        } else if rho.is_infinite() {
            PopaParam::Infinity
        } else {
            PopaParam::Finite(rho)
        })
    }

    pub fn check(self) -> Result<Self> {
        match self {
            PopaParam::Finite(rho) if !(rho > 0.0 && rho.is_finite()) => Err(Error::InvalidParam(
                format!("Finite(rho) requires 0 < rho < inf, got {rho}"),
            )),
            p => Ok(p),
        }
    }

    /// Numeric value of the parameter (`0`, `rho` or `+inf`).
    pub fn rho(self) -> f64 {
        match self {
            PopaParam::Zero => 0.0,
            PopaParam::Finite(rho) => rho,
            PopaParam::Infinity => f64::INFINITY,
        }
    }

    /// The Popa centre `rho* = -1/rho`; `-inf` for `Zero`, `0` for `Infinity`.
    pub fn centre(self) -> f64 {
        match self {
            PopaParam::Zero => f64::NEG_INFINITY,
            PopaParam::Finite(rho) => -1.0 / rho,
            PopaParam::Infinity => 0.0,
        }
    }

    pub fn identity(self) -> f64 {
        match self {
            PopaParam::Infinity => 1.0,
            _ => 0.0,
        }
    }

    pub fn contains(self, t: f64) -> bool {
        if !t.is_finite() {
            return false;
        }
        match self {
            PopaParam::Zero => true,
            PopaParam::Finite(rho) => 1.0 + rho * t > DOMAIN_GUARD,
            PopaParam::Infinity => t > 0.0,
        }
    }

    pub(crate) fn require(self, t: f64) -> Result<()> {
        self.check()?;
        if self.contains(t) {
            Ok(())
        } else {
            Err(Error::OffDomain {
                param: self,
                value: t,
            })
        }
    }

    /// Scale factor of the Haar measure against the log-scale Lebesgue measure:
    /// `(1 + rho) / rho` for finite `rho`, `1` otherwise.
    pub fn haar_scale(self) -> f64 {
        match self {
            PopaParam::Finite(rho) => (1.0 + rho) / rho,
            _ => 1.0,
        }
    }
}

impl fmt::Display for PopaParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PopaParam::Zero => write!(f, "0"),
            PopaParam::Finite(rho) => write!(f, "{rho}"),
            PopaParam::Infinity => write!(f, "inf"),
        }
    }
}

impl FromStr for PopaParam {
    type Err = Error;

    /// Accepts `"0"`, `"inf"` or a positive decimal.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "inf" {
            return Ok(PopaParam::Infinity);
        }
        let rho: f64 = s
            .parse()
            .map_err(|_| Error::InvalidParam(format!("expected \"0\", \"inf\" or a decimal, got {s:?}")))?;
        if rho.is_infinite() {
            return Err(Error::InvalidParam(format!("use \"inf\" for rho = infinity, got {s:?}")));
        }
        PopaParam::new(rho)
    }
}

/// An element of `G_param`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PopaPoint {
    param: PopaParam,
    value: f64,
}

impl PopaPoint {
    pub fn new(param: PopaParam, value: f64) -> Result<Self> {
        param.require(value)?;
        Ok(PopaPoint { param, value })
    }

    pub fn identity(param: PopaParam) -> Result<Self> {
        PopaPoint::new(param, param.identity())
    }

    pub fn param(&self) -> PopaParam {
        self.param
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    /// Membership in `G_rho^+`, i.e. `value >= identity`.
    pub fn is_nonnegative(&self) -> bool {
        self.value >= self.param.identity()
    }
}

fn same_param(x: &PopaPoint, y: &PopaPoint) -> Result<PopaParam> {
    if x.param == y.param {
        Ok(x.param)
    } else {
        Err(Error::ParamMismatch {
            left: x.param,
            right: y.param,
        })
    }
}

/// The Golab-Schinzel solution `eta_rho(t) = 1 + rho t`; `1` for `Zero`, `t` for `Infinity`.
pub fn eta(param: PopaParam, t: f64) -> Result<f64> {
    param.require(t)?;
    Ok(match param {
        PopaParam::Zero => 1.0,
        PopaParam::Finite(rho) => 1.0 + rho * t,
        PopaParam::Infinity => t,
    })
}

/// Isomorphism `G_param -> (R, +)`: `ln(1 + rho t)`, `t`, or `ln t`.
pub fn to_log_scale(param: PopaParam, t: f64) -> Result<f64> {
    param.require(t)?;
    Ok(log_scale_unchecked(param, t))
}

pub(crate) fn log_scale_unchecked(param: PopaParam, t: f64) -> f64 {
    match param {
        PopaParam::Zero => t,
        PopaParam::Finite(rho) => (rho * t).ln_1p(),
        PopaParam::Infinity => t.ln(),
    }
}

/// Inverse of [`to_log_scale`].
pub fn from_log_scale(param: PopaParam, w: f64) -> Result<f64> {
    param.check()?;
    if w.is_nan() {
        return Err(Error::invalid("log-scale value is NaN"));
    }
    Ok(from_log_scale_unchecked(param, w))
}

pub(crate) fn from_log_scale_unchecked(param: PopaParam, w: f64) -> f64 {
    match param {
        PopaParam::Zero => w,
        PopaParam::Finite(rho) => w.exp_m1() / rho,
        PopaParam::Infinity => w.exp(),
    }
}

/// `eta_rho` as an isomorphism onto `(R_+, x)`; `exp` for `Zero`.
pub fn to_multiplicative(x: &PopaPoint) -> f64 {
    match x.param {
        PopaParam::Zero => x.value.exp(),
        PopaParam::Finite(rho) => 1.0 + rho * x.value,
        PopaParam::Infinity => x.value,
    }
}

pub fn from_multiplicative(param: PopaParam, v: f64) -> Result<PopaPoint> {
    param.check()?;
    if !(v > 0.0 && v.is_finite()) {
        return Err(Error::NonPositive {
            what: "multiplicative value",
            at: v,
            value: v,
        });
    }
    let value = match param {
        PopaParam::Zero => v.ln(),
        PopaParam::Finite(rho) => (v - 1.0) / rho,
        PopaParam::Infinity => v,
    };
    PopaPoint::new(param, value)
}

pub(crate) fn circle_unchecked(param: PopaParam, x: f64, y: f64) -> f64 {
    match param {
        PopaParam::Zero => x + y,
        // symmetric evaluation keeps the operation exactly commutative
        PopaParam::Finite(rho) => x + y + rho * (x * y),
        PopaParam::Infinity => x * y,
    }
}

pub(crate) fn inverse_unchecked(param: PopaParam, t: f64) -> f64 {
    match param {
        PopaParam::Zero => -t,
        PopaParam::Finite(rho) => -t / (1.0 + rho * t),
        PopaParam::Infinity => 1.0 / t,
    }
}

/// Group operation `x o_rho y`.
pub fn circle(x: &PopaPoint, y: &PopaPoint) -> Result<PopaPoint> {
    let param = same_param(x, y)?;
    PopaPoint::new(param, circle_unchecked(param, x.value, y.value))
}

/// `-t / eta(t)`; `1/t` in `G_inf`.
pub fn inverse(x: &PopaPoint) -> Result<PopaPoint> {
    PopaPoint::new(x.param, inverse_unchecked(x.param, x.value))
}

/// The `n`-fold product `delta^{n o}` with `delta^{0 o} = identity`; negative `n`
/// powers the inverse.
pub fn power(param: PopaParam, delta: f64, n: i64) -> Result<f64> {
    param.require(delta)?;
    let value = match param {
        PopaParam::Zero => n as f64 * delta,
        PopaParam::Finite(rho) => ((n as f64) * (rho * delta).ln_1p()).exp_m1() / rho,
        PopaParam::Infinity => delta.powf(n as f64),
    };
    if !param.contains(value) {
        return Err(Error::invalid(format!(
            "power {n} of {delta} leaves G_{param} numerically ({value})"
        )));
    }
    Ok(value)
}

/// Group norm: `|ln(1 + rho t)| (1 + rho) / rho`, `|t|` for `Zero`, `|ln t|` for `Infinity`.
pub fn norm(x: &PopaPoint) -> f64 {
    log_scale_unchecked(x.param, x.value).abs() * x.param.haar_scale()
}

/// Order on `G_rho`, which coincides with the order of the reals.
pub fn leq(x: &PopaPoint, y: &PopaPoint) -> Result<bool> {
    same_param(x, y)?;
    Ok(x.value <= y.value)
}

/// The group-theoretic order: `x <= y` iff `y o x^{-1}` lies in `G_rho^+`.
pub fn leq_by_group(x: &PopaPoint, y: &PopaPoint) -> Result<bool> {
    let param = same_param(x, y)?;
    let diff = circle_unchecked(param, y.value, inverse_unchecked(param, x.value));
    Ok(diff >= param.identity())
}
